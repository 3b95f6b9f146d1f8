use super::FisError;

/// Gaussian membership function `exp(-(x - center)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMf {
    center: f64,
    sigma: f64,
}

impl GaussianMf {
    pub fn new(center: f64, sigma: f64) -> Result<Self, FisError> {
        if !center.is_finite() {
            return Err(FisError::NonFinite("membership center"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(FisError::InvalidSigma(sigma));
        }
        Ok(Self { center, sigma })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Degree of membership of `x`. Exactly 1 at the center.
    pub fn membership(&self, x: f64) -> f64 {
        let d = x - self.center;
        (-(d * d) / (2.0 * self.sigma * self.sigma)).exp()
    }
}
