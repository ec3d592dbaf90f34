use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Seed;

/// Normal quantile used for every reported confidence interval.
pub const Z95: f64 = 1.96;

/// Single-pass moment accumulator (count, mean, and central moment sums up
/// to fourth order). Partial accumulators merge exactly in the algebraic
/// sense, so samples can be reduced in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamingStats {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl StreamingStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2 - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    pub fn merge(&mut self, other: &StreamingStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;

        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 =
            self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n) + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;

        self.count += other.count;
        self.mean = mean;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sum_sq_dev(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance (zero until two values are seen).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Estimate of the mean with its standard error.
    pub fn finalize(&self, seed: Seed) -> Result<Estimate> {
        if self.count < 2 {
            return Err(Error::invalid(
                "samples",
                format!("need at least 2 values to estimate, got {}", self.count),
            ));
        }
        let se = (self.variance() / self.count as f64).sqrt();
        Ok(Estimate::new(self.mean, se, self.count, seed))
    }

    /// Estimate of the population variance, with the large-sample standard
    /// error `sqrt((mu4 - sigma^4 (n - 3)/(n - 1)) / n)` of the sample variance.
    pub fn variance_estimate(&self, seed: Seed) -> Result<Estimate> {
        if self.count < 4 {
            return Err(Error::invalid(
                "samples",
                format!("need at least 4 values to estimate a variance, got {}", self.count),
            ));
        }
        let n = self.count as f64;
        let s2 = self.variance();
        let mu4 = self.m4 / n;
        let var_of_s2 = ((mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0);
        Ok(Estimate::new(s2, var_of_s2.sqrt(), self.count, seed))
    }
}

/// A Monte Carlo result: mean, standard error, and 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_samples: u64,
    pub seed: Seed,
}

impl Estimate {
    pub fn new(mean: f64, std_error: f64, n_samples: u64, seed: Seed) -> Self {
        Estimate {
            mean,
            std_error,
            ci95_low: mean - Z95 * std_error,
            ci95_high: mean + Z95 * std_error,
            n_samples,
            seed,
        }
    }

    /// Standardized distance to `reference`. A zero standard error gives 0 on
    /// an exact match and an infinite score otherwise.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }

    pub fn within_sigmas(&self, reference: f64, sigmas: f64) -> bool {
        self.z_score(reference).abs() <= sigmas
    }
}
