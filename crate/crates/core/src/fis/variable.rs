use super::{FisError, GaussianMf};

/// A labelled fuzzy set within a linguistic variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    pub mf: GaussianMf,
}

/// Closed interval `[lo, hi]` a variable is defined over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Universe {
    lo: f64,
    hi: f64,
}

impl Universe {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FisError> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(FisError::NonFinite("universe bound"));
        }
        if lo >= hi {
            return Err(FisError::InvalidRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    universe: Universe,
    terms: Vec<Term>,
}

impl LinguisticVariable {
    /// Builds a variable. Labels must be unique and term centers
    /// non-decreasing in list order.
    pub fn new(
        name: impl Into<String>,
        universe: Universe,
        terms: Vec<Term>,
    ) -> Result<Self, FisError> {
        let name = name.into();
        if terms.is_empty() {
            return Err(FisError::NoTerms(name));
        }
        for (i, term) in terms.iter().enumerate() {
            if terms[..i].iter().any(|t| t.label == term.label) {
                return Err(FisError::DuplicateLabel {
                    variable: name,
                    label: term.label.clone(),
                });
            }
        }
        if terms
            .windows(2)
            .any(|w| w[1].mf.center() < w[0].mf.center())
        {
            return Err(FisError::UnorderedTerms(name));
        }
        Ok(Self {
            name,
            universe,
            terms,
        })
    }

    /// Shorthand for a variable whose terms share one sigma.
    pub fn gaussian(
        name: impl Into<String>,
        universe: Universe,
        sigma: f64,
        terms: &[(&str, f64)],
    ) -> Result<Self, FisError> {
        let terms = terms
            .iter()
            .map(|&(label, center)| {
                Ok(Term {
                    label: label.to_string(),
                    mf: GaussianMf::new(center, sigma)?,
                })
            })
            .collect::<Result<Vec<_>, FisError>>()?;
        Self::new(name, universe, terms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    /// Degree of every term at `x`, in term order. `x` is clamped to the
    /// universe first so out-of-range readings saturate at the edge terms.
    pub fn fuzzify(&self, x: f64) -> Vec<f64> {
        let x = self.universe.clamp(x);
        self.terms.iter().map(|t| t.mf.membership(x)).collect()
    }
}
