//! Renewal (exploration) and refinement (exploitation) diagnostics.

use serde::{Deserialize, Serialize};

use crate::bits::{hamming, BitString};
use crate::error::{Error, Result};

/// Per-generation renewal (`alpha`) and refinement (`beta`) values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl MetricSeries {
    pub fn push(&mut self, alpha: f64, beta: f64) {
        self.alpha.push(alpha);
        self.beta.push(beta);
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

fn shape(pop: &[BitString]) -> Result<(usize, usize)> {
    let n = pop.first().map(BitString::len).ok_or(Error::EmptySample)?;
    if n == 0 {
        return Err(Error::InvalidConfig("zero-length individuals".into()));
    }
    Ok((pop.len(), n))
}

/// Mean normalized Hamming distance between each individual and its trial.
pub fn renewal_metric(pop: &[BitString], trials: &[BitString]) -> Result<f64> {
    let (mu, n) = shape(pop)?;
    if trials.len() != mu {
        return Err(Error::LengthMismatch { expected: mu, actual: trials.len() });
    }
    let mut total = 0usize;
    for (x, tx) in pop.iter().zip(trials) {
        x.check_len(n)?;
        total += hamming(x, tx)?;
    }
    Ok(total as f64 / (mu * n) as f64)
}

/// Mean normalized closeness of the population to the best explored solution.
pub fn refinement_metric(pop: &[BitString], best: &BitString) -> Result<f64> {
    let (mu, n) = shape(pop)?;
    let mut total = 0usize;
    for x in pop {
        x.check_len(n)?;
        total += n - hamming(x, best)?;
    }
    Ok(total as f64 / (mu * n) as f64)
}
