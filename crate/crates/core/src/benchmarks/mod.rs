//! Benchmark problems P1 to P7 and the name registry used by the harness.

mod continuous;
mod root2path;

pub use continuous::{decode, eval_continuous, ContinuousFn, EncodedContinuousProblem};
pub use root2path::{f2_root2path, path_length, path_position, Root2Path};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Length of the all-ones prefix; equals `sum_i prod_{j<=i} x_j`.
pub fn f1_leading(bits: &BitString) -> usize {
    bits.iter().take_while(|&b| b).count()
}

/// P1: leading ones.
#[derive(Debug, Clone)]
pub struct LeadingOnes {
    n: usize,
}

impl LeadingOnes {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        LeadingOnes { n }
    }
}

impl Problem for LeadingOnes {
    fn name(&self) -> &str {
        "P1"
    }

    fn n_bits(&self) -> usize {
        self.n
    }

    fn fitness(&self, bits: &BitString, _rng: &mut RngStream) -> f64 {
        f1_leading(bits) as f64
    }

    fn known_max(&self) -> Option<f64> {
        Some(self.n as f64)
    }
}

/// Names accepted by [`problem_by_name`].
pub const PROBLEM_NAMES: [&str; 7] = ["P1", "P2", "P3", "P4", "P5", "P6", "P7"];

/// Builds a benchmark with its standard dimensions (case-insensitive name).
pub fn problem_by_name(name: &str) -> Result<Box<dyn Problem>> {
    let problem: Box<dyn Problem> = match name.to_ascii_uppercase().as_str() {
        "P1" => Box::new(LeadingOnes::new(30)),
        "P2" => Box::new(Root2Path::new(29)?),
        "P3" => Box::new(EncodedContinuousProblem::standard(ContinuousFn::MaxAbs)),
        "P4" => Box::new(EncodedContinuousProblem::standard(ContinuousFn::Griewank)),
        "P5" => Box::new(EncodedContinuousProblem::standard(ContinuousFn::NoisyQuartic)),
        "P6" => Box::new(EncodedContinuousProblem::standard(ContinuousFn::Rosenbrock)),
        "P7" => Box::new(EncodedContinuousProblem::standard(ContinuousFn::Ackley)),
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_ones_examples() {
        assert_eq!(f1_leading(&BitString::ones(30)), 30);
        assert_eq!(f1_leading(&BitString::zeros(30)), 0);
        assert_eq!(f1_leading(&BitString::parse("1101111").unwrap()), 2);
    }

    #[test]
    fn leading_ones_matches_prefix_products() {
        let mut rng = RngStream::new(6);
        for _ in 0..200 {
            let mut x = BitString::random(12, &mut rng);
            for j in 0..rng.below(6) {
                x.set(j, true);
            }
            let sum: usize = (1..=12)
                .map(|i| (0..i).map(|j| x[j] as usize).product::<usize>())
                .sum();
            assert_eq!(f1_leading(&x), sum);
        }
    }

    #[test]
    fn registry_matches_bit_lengths() {
        let expected = [30, 29, 180, 480, 240, 300, 300];
        for (name, n) in PROBLEM_NAMES.iter().zip(expected) {
            let p = problem_by_name(name).unwrap();
            assert_eq!(p.n_bits(), n, "{name}");
            assert_eq!(p.name(), *name);
        }
        assert_eq!(problem_by_name("p4").unwrap().n_bits(), 480);
        assert!(matches!(problem_by_name("P9"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn registry_maxima() {
        assert_eq!(problem_by_name("P1").unwrap().known_max(), Some(30.0));
        assert_eq!(problem_by_name("P2").unwrap().known_max(), Some(49992.0));
        for name in ["P3", "P4", "P5", "P6", "P7"] {
            let p = problem_by_name(name).unwrap();
            assert_eq!(p.known_max(), Some(0.0));
            assert_eq!(p.success_tol(), 1e-2);
        }
        assert!(!problem_by_name("P5").unwrap().deterministic());
    }
}
