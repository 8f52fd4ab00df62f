use crate::{Error, Result};

/// Shannon entropy in bits of the distribution given by `counts`.
pub fn shannon_entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            p * libm::log2(p)
        })
        .sum::<f64>()
}

/// Daróczy entropy of degree `beta`: `(sum p^beta - 1) / (2^(1-beta) - 1)`.
/// Normalized so a fair coin scores 1; tends to Shannon entropy as `beta -> 1`.
pub fn beta_entropy(counts: &[f64], beta: f64) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| libm::pow(c / total, beta))
        .sum();
    (s - 1.0) / (libm::pow(2.0, 1.0 - beta) - 1.0)
}

/// Entropy family used to score splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Impurity {
    Shannon,
    Beta(f64),
}

impl Impurity {
    pub fn beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() || beta == 1.0 {
            return Err(Error::Parameter {
                name: "beta",
                reason: "must be positive and different from 1",
            });
        }
        Ok(Self::Beta(beta))
    }

    pub fn of(&self, counts: &[f64]) -> f64 {
        match *self {
            Self::Shannon => shannon_entropy(counts),
            Self::Beta(b) => beta_entropy(counts, b),
        }
    }
}
