use super::{FisError, LinguisticVariable, Rule};

pub const DEFAULT_RESOLUTION: usize = 1001;
pub const MIN_RESOLUTION: usize = 101;

/// A Mamdani fuzzy inference system: min/max connectives, min implication,
/// max aggregation and centroid defuzzification over a sampled output
/// universe. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Fis {
    name: String,
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<Rule>,
    resolution: usize,
    default_output: f64,
}

/// Result of one inference. `fired` is false when every rule strength was
/// below machine epsilon and `value` is the configured default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    pub value: f64,
    pub fired: bool,
}

impl Fis {
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: Vec<Rule>,
    ) -> Result<Self, FisError> {
        let default_output = output.universe().lo();
        let fis = Self {
            name: name.into(),
            inputs,
            output,
            rules,
            resolution: DEFAULT_RESOLUTION,
            default_output,
        };
        fis.validate()?;
        Ok(fis)
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self, FisError> {
        if resolution < MIN_RESOLUTION {
            return Err(FisError::Resolution(resolution));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn with_default_output(mut self, value: f64) -> Result<Self, FisError> {
        if !value.is_finite() {
            return Err(FisError::NonFinite("default output"));
        }
        self.default_output = value;
        Ok(self)
    }

    fn validate(&self) -> Result<(), FisError> {
        if self.inputs.is_empty() {
            return Err(FisError::InputCount {
                expected: 1,
                got: 0,
            });
        }
        for rule in &self.rules {
            if rule.antecedent().len() != self.inputs.len() {
                return Err(FisError::InputCount {
                    expected: self.inputs.len(),
                    got: rule.antecedent().len(),
                });
            }
            for (input, (term, var)) in rule.antecedent().iter().zip(&self.inputs).enumerate() {
                if let Some(index) = *term {
                    if index >= var.terms().len() {
                        return Err(FisError::TermIndex { input, index });
                    }
                }
            }
            if rule.consequent() >= self.output.terms().len() {
                return Err(FisError::TermIndex {
                    input: self.inputs.len(),
                    index: rule.consequent(),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn default_output(&self) -> f64 {
        self.default_output
    }

    pub fn fuzzify(&self, inputs: &[f64]) -> Result<Vec<Vec<f64>>, FisError> {
        if inputs.len() != self.inputs.len() {
            return Err(FisError::InputCount {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        if inputs.iter().any(|x| !x.is_finite()) {
            return Err(FisError::NonFinite("input value"));
        }
        Ok(self
            .inputs
            .iter()
            .zip(inputs)
            .map(|(var, &x)| var.fuzzify(x))
            .collect())
    }

    /// Per-rule firing strengths, in rule order.
    pub fn strengths(&self, inputs: &[f64]) -> Result<Vec<f64>, FisError> {
        let fuzzified = self.fuzzify(inputs)?;
        self.rules.iter().map(|r| r.strength(&fuzzified)).collect()
    }

    pub fn infer(&self, inputs: &[f64]) -> Result<Inference, FisError> {
        let strengths = self.strengths(inputs)?;
        let no_fire = Inference {
            value: self.default_output,
            fired: false,
        };
        if strengths.iter().all(|&s| s < f64::EPSILON) {
            return Ok(no_fire);
        }

        // Clipping and max-aggregation commute per consequent term, so
        // fold rules sharing a consequent before touching the grid.
        let terms = self.output.terms();
        let mut clip = vec![0.0f64; terms.len()];
        for (rule, s) in self.rules.iter().zip(&strengths) {
            let c = &mut clip[rule.consequent()];
            *c = c.max(*s);
        }

        let universe = self.output.universe();
        let step = (universe.hi() - universe.lo()) / (self.resolution - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..self.resolution {
            let y = universe.lo() + k as f64 * step;
            let mu = terms
                .iter()
                .zip(&clip)
                .filter(|(_, &c)| c > 0.0)
                .map(|(t, &c)| c.min(t.mf.membership(y)))
                .fold(0.0, f64::max);
            num += y * mu;
            den += mu;
        }
        if den <= 0.0 {
            return Ok(no_fire);
        }
        Ok(Inference {
            value: universe.clamp(num / den),
            fired: true,
        })
    }
}
