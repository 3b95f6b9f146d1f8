use super::{FisError, LinguisticVariable};

/// How a rule combines its antecedent degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    /// Minimum of the antecedent degrees.
    And,
    /// Maximum of the antecedent degrees.
    Or,
}

/// One IF-THEN rule, stored as term indices into the owning system's
/// variables. `None` in the antecedent means "don't care".
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    antecedent: Vec<Option<usize>>,
    consequent: usize,
    weight: f64,
    connective: Connective,
}

impl Rule {
    pub fn new(
        antecedent: Vec<Option<usize>>,
        consequent: usize,
        weight: f64,
        connective: Connective,
    ) -> Result<Self, FisError> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(FisError::InvalidWeight(weight));
        }
        if antecedent.iter().all(Option::is_none) {
            return Err(FisError::EmptyAntecedent);
        }
        Ok(Self {
            antecedent,
            consequent,
            weight,
            connective,
        })
    }

    /// Builds an all-AND rule with weight 1 by resolving labels against the
    /// given variables.
    pub fn from_labels(
        inputs: &[LinguisticVariable],
        output: &LinguisticVariable,
        antecedent: &[&str],
        consequent: &str,
    ) -> Result<Self, FisError> {
        if antecedent.len() != inputs.len() {
            return Err(FisError::InputCount {
                expected: inputs.len(),
                got: antecedent.len(),
            });
        }
        let antecedent = inputs
            .iter()
            .zip(antecedent)
            .map(|(var, label)| {
                var.term_index(label)
                    .map(Some)
                    .ok_or_else(|| FisError::UnknownLabel {
                        variable: var.name().to_string(),
                        label: label.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let consequent = output
            .term_index(consequent)
            .ok_or_else(|| FisError::UnknownLabel {
                variable: output.name().to_string(),
                label: consequent.to_string(),
            })?;
        Self::new(antecedent, consequent, 1.0, Connective::And)
    }

    pub fn antecedent(&self) -> &[Option<usize>] {
        &self.antecedent
    }

    pub fn consequent(&self) -> usize {
        self.consequent
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn connective(&self) -> Connective {
        self.connective
    }

    /// Firing strength given per-input degree vectors (one entry per term).
    pub fn strength(&self, fuzzified: &[Vec<f64>]) -> Result<f64, FisError> {
        if fuzzified.len() != self.antecedent.len() {
            return Err(FisError::InputCount {
                expected: self.antecedent.len(),
                got: fuzzified.len(),
            });
        }
        let mut acc: Option<f64> = None;
        for (input, (term, degrees)) in self.antecedent.iter().zip(fuzzified).enumerate() {
            let Some(term) = *term else { continue };
            let degree = *degrees
                .get(term)
                .ok_or(FisError::TermIndex { input, index: term })?;
            acc = Some(match (acc, self.connective) {
                (None, _) => degree,
                (Some(a), Connective::And) => a.min(degree),
                (Some(a), Connective::Or) => a.max(degree),
            });
        }
        Ok(acc.unwrap_or(0.0) * self.weight)
    }
}
