//! Poisson arrival streams and the arrival-count law they must follow.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use super::Movement;

/// Derives an independent stream seed from the master seed and a stream
/// name. Stable across platforms and releases (FNV-1a then SplitMix64).
pub fn stream_seed(master: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn seeded_rng(master: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, name))
}

/// Exponential inter-arrival generator for one movement.
#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    movement: Movement,
    rate: f64,
    exp: Exp<f64>,
    rng: ChaCha8Rng,
}

impl ArrivalProcess {
    /// `rate` in vehicles per second; must be positive and finite.
    pub fn new(movement: Movement, rate: f64, master_seed: u64) -> Result<Self, String> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(format!(
                "arrival rate for {movement} must be > 0, got {rate}"
            ));
        }
        let exp = Exp::new(rate).map_err(|e| e.to_string())?;
        Ok(Self {
            movement,
            rate,
            exp,
            rng: seeded_rng(master_seed, &format!("arrivals/{movement}")),
        })
    }

    pub fn movement(&self) -> Movement {
        self.movement
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Next gap in seconds, mean `1 / rate`.
    pub fn sample_interarrival(&mut self) -> f64 {
        self.exp.sample(&mut self.rng)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PmfError {
    #[error("arrival count must be non-negative, got {0}")]
    NegativeCount(i64),
    #[error("rate and window must be positive, got rate {rate}, window {window}")]
    NonPositive { rate: f64, window: f64 },
}

/// Probability of exactly `k` arrivals in a window of `window` seconds:
/// `(rate*window)^k e^(-rate*window) / k!`.
pub fn arrival_count_pmf(rate: f64, window: f64, k: i64) -> Result<f64, PmfError> {
    if k < 0 {
        return Err(PmfError::NegativeCount(k));
    }
    if !(rate > 0.0 && window > 0.0) {
        return Err(PmfError::NonPositive { rate, window });
    }
    let m = rate * window;
    if k == 0 {
        return Ok((-m).exp());
    }
    let k = k as f64;
    Ok((k * m.ln() - m - ln_gamma(k + 1.0)).exp())
}

/// Outcome of a chi-square goodness-of-fit test of window counts against
/// the Poisson law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl GoodnessOfFit {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Bins counts by value, pooling neighbouring bins until each has an
/// expected frequency of at least 5; the last bin holds the upper tail.
pub fn poisson_goodness_of_fit(counts: &[u64], rate: f64, window: f64) -> GoodnessOfFit {
    let n = counts.len() as f64;
    let max_k = counts.iter().copied().max().unwrap_or(0) as i64;
    let mean = rate * window;
    let horizon = max_k.max((mean + 10.0 * mean.sqrt() + 10.0) as i64);

    let mut observed = vec![0u64; horizon as usize + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }
    let pmf: Vec<f64> = (0..=horizon)
        .map(|k| arrival_count_pmf(rate, window, k).expect("valid arguments"))
        .collect();

    // (observed, expected) per pooled bin
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    let mut cumulative = 0.0;
    for k in 0..=horizon as usize {
        o += observed[k] as f64;
        e += pmf[k] * n;
        cumulative += pmf[k];
        let tail = (1.0 - cumulative).max(0.0) * n;
        if e >= 5.0 && tail >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    // Remaining probability mass and observations go to the tail bin.
    e += (1.0 - cumulative).max(0.0) * n;
    match bins.last_mut() {
        Some(last) if e < 5.0 => {
            last.0 += o;
            last.1 += e;
        }
        _ => bins.push((o, e)),
    }

    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    GoodnessOfFit {
        statistic,
        degrees_of_freedom: dof,
        p_value: 1.0 - dist.cdf(statistic),
    }
}
