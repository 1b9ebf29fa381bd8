use std::f64::consts::{E, PI};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Decodes consecutive `k`-bit groups (most significant bit first) onto
/// `[lo, hi]`. The all-zeros group maps to `lo` and the all-ones group to `hi`.
pub fn decode(bits: &BitString, k: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if k == 0 || k > 63 || !bits.len().is_multiple_of(k) {
        return Err(Error::IndivisibleLength { len: bits.len(), group: k });
    }
    let top = (1u64 << k) - 1;
    let span = hi - lo;
    Ok(bits
        .as_slice()
        .chunks(k)
        .map(|group| {
            let v = group.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            if v == top {
                hi
            } else {
                lo + (v as f64 * span) / top as f64
            }
        })
        .collect())
}

/// The five real-valued benchmark functions (P3 to P7), written for
/// maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuousFn {
    /// P3: `-max |x_i|`.
    MaxAbs,
    /// P4: negated Griewank shifted to 100.
    Griewank,
    /// P5: negated quartic with additive uniform noise.
    NoisyQuartic,
    /// P6: negated Rosenbrock.
    Rosenbrock,
    /// P7: negated Ackley.
    Ackley,
}

impl ContinuousFn {
    pub fn id(self) -> &'static str {
        match self {
            ContinuousFn::MaxAbs => "P3",
            ContinuousFn::Griewank => "P4",
            ContinuousFn::NoisyQuartic => "P5",
            ContinuousFn::Rosenbrock => "P6",
            ContinuousFn::Ackley => "P7",
        }
    }

    /// Box `[lo, hi]` shared by every coordinate.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            ContinuousFn::MaxAbs => (-10.0, 10.0),
            ContinuousFn::Griewank => (-300.0, 300.0),
            ContinuousFn::NoisyQuartic => (-1.28, 1.28),
            ContinuousFn::Rosenbrock => (-2.048, 2.048),
            ContinuousFn::Ackley => (-30.0, 30.0),
        }
    }

    /// Bits per coordinate for the standard 30-dimensional instance.
    pub fn bits_per_dim(self) -> usize {
        match self {
            ContinuousFn::MaxAbs => 6,
            ContinuousFn::Griewank => 16,
            ContinuousFn::NoisyQuartic => 8,
            ContinuousFn::Rosenbrock | ContinuousFn::Ackley => 10,
        }
    }

    fn value(self, x: &[f64], rng: &mut RngStream) -> f64 {
        let d = x.len() as f64;
        match self {
            ContinuousFn::MaxAbs => -x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            ContinuousFn::Griewank => {
                let sq: f64 = x.iter().map(|v| (v - 100.0).powi(2)).sum();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| ((v - 100.0) / ((i + 1) as f64).sqrt()).cos())
                    .product();
                -sq / 4000.0 + prod - 1.0
            }
            ContinuousFn::NoisyQuartic => {
                let s: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v.powi(4)).sum();
                -s - rng.uniform()
            }
            ContinuousFn::Rosenbrock => -x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum::<f64>(),
            ContinuousFn::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                -20.0 + 20.0 * (-0.2 * sq.sqrt()).exp() + cs.exp() - E
            }
        }
    }
}

/// Value of `f` at `x`; `x` must lie inside the function's box.
pub fn eval_continuous(f: ContinuousFn, x: &[f64], rng: &mut RngStream) -> Result<f64> {
    let (lo, hi) = f.bounds();
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(lo..=hi).contains(*v)) {
        return Err(Error::OutOfBounds(format!("{}: x[{i}] = {v} not in [{lo}, {hi}]", f.id())));
    }
    if x.is_empty() {
        return Err(Error::InvalidConfig("empty input vector".into()));
    }
    Ok(f.value(x, rng))
}

/// A real-valued function searched through a plain binary encoding.
#[derive(Debug, Clone)]
pub struct EncodedContinuousProblem {
    pub function: ContinuousFn,
    pub dims: usize,
    pub bits_per_dim: usize,
    pub success_tol: f64,
}

impl EncodedContinuousProblem {
    /// 30 dimensions at the function's standard resolution.
    pub fn standard(function: ContinuousFn) -> Self {
        EncodedContinuousProblem {
            function,
            dims: 30,
            bits_per_dim: function.bits_per_dim(),
            success_tol: 1e-2,
        }
    }

    pub fn decode(&self, bits: &BitString) -> Result<Vec<f64>> {
        let (lo, hi) = self.function.bounds();
        decode(bits, self.bits_per_dim, lo, hi)
    }
}

impl Problem for EncodedContinuousProblem {
    fn name(&self) -> &str {
        self.function.id()
    }

    fn n_bits(&self) -> usize {
        self.dims * self.bits_per_dim
    }

    fn fitness(&self, bits: &BitString, rng: &mut RngStream) -> f64 {
        let x = self.decode(bits).expect("length fixed by n_bits");
        self.function.value(&x, rng)
    }

    fn known_max(&self) -> Option<f64> {
        Some(0.0)
    }

    fn success_tol(&self) -> f64 {
        self.success_tol
    }

    fn deterministic(&self) -> bool {
        self.function != ContinuousFn::NoisyQuartic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [ContinuousFn; 5] = [
        ContinuousFn::MaxAbs,
        ContinuousFn::Griewank,
        ContinuousFn::NoisyQuartic,
        ContinuousFn::Rosenbrock,
        ContinuousFn::Ackley,
    ];

    #[test]
    fn decode_endpoints() {
        for f in ALL {
            let (lo, hi) = f.bounds();
            let k = f.bits_per_dim();
            assert_eq!(decode(&BitString::zeros(k), k, lo, hi).unwrap(), vec![lo]);
            assert_eq!(decode(&BitString::ones(k), k, lo, hi).unwrap(), vec![hi]);
        }
    }

    #[test]
    fn decode_hits_griewank_center_exactly() {
        // (100 + 300) / 600 * 65535 = 43690
        let x = decode(&BitString::from_int(43690, 16), 16, -300.0, 300.0).unwrap();
        assert_eq!(x, vec![100.0]);
    }

    #[test]
    fn decode_is_msb_first_and_grouped() {
        let bits = BitString::parse("0001").unwrap();
        assert_eq!(decode(&bits, 2, 0.0, 3.0).unwrap(), vec![0.0, 1.0]);
        let bits = BitString::parse("1000").unwrap();
        assert_eq!(decode(&bits, 4, 0.0, 15.0).unwrap(), vec![8.0]);
    }

    #[test]
    fn decode_is_monotone() {
        let k = 10;
        let values: Vec<f64> = (0..1u64 << k)
            .map(|v| decode(&BitString::from_int(v, k), k, -2.048, 2.048).unwrap()[0])
            .collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn decode_rejects_indivisible() {
        assert!(matches!(
            decode(&BitString::zeros(7), 3, 0.0, 1.0),
            Err(Error::IndivisibleLength { len: 7, group: 3 })
        ));
    }

    #[test]
    fn analytic_optima() {
        let mut rng = RngStream::new(0);
        let zeros = vec![0.0; 30];
        assert_eq!(eval_continuous(ContinuousFn::MaxAbs, &zeros, &mut rng).unwrap(), 0.0);
        assert_eq!(eval_continuous(ContinuousFn::Griewank, &[100.0; 30], &mut rng).unwrap(), 0.0);
        assert_eq!(eval_continuous(ContinuousFn::Rosenbrock, &[1.0; 30], &mut rng).unwrap(), 0.0);
        let ackley = eval_continuous(ContinuousFn::Ackley, &zeros, &mut rng).unwrap();
        assert!(ackley.abs() < 1e-12, "{ackley}");
        for _ in 0..100 {
            let v = eval_continuous(ContinuousFn::NoisyQuartic, &zeros, &mut rng).unwrap();
            assert!(v > -1.0 && v <= 0.0);
        }
    }

    #[test]
    fn out_of_box_rejected() {
        let mut rng = RngStream::new(0);
        let err = eval_continuous(ContinuousFn::MaxAbs, &[0.0, 10.5], &mut rng);
        assert!(matches!(err, Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn sampled_values_never_positive() {
        let mut rng = RngStream::new(31);
        for f in [ContinuousFn::Griewank, ContinuousFn::Rosenbrock, ContinuousFn::Ackley] {
            let (lo, hi) = f.bounds();
            for _ in 0..20_000 {
                let x: Vec<f64> = (0..30).map(|_| rng.range(lo, hi)).collect();
                assert!(eval_continuous(f, &x, &mut rng).unwrap() <= 0.0);
            }
        }
    }

    #[test]
    fn rosenbrock_optimum_is_off_grid() {
        // nearest grid point to 1 per coordinate; the best decodable value
        // stays strictly negative
        let (lo, hi) = ContinuousFn::Rosenbrock.bounds();
        let top = (1u64 << 10) - 1;
        // no grid value equals 1, so every (1 - x_i)^2 term is positive
        assert!((0..=top).all(|g| decode(&BitString::from_int(g, 10), 10, lo, hi).unwrap()[0] != 1.0));
        let step = (hi - lo) / top as f64;
        let v = ((1.0 - lo) / step).round() as u64;
        let candidates: Vec<f64> = [v - 1, v, v + 1]
            .iter()
            .map(|&g| decode(&BitString::from_int(g, 10), 10, lo, hi).unwrap()[0])
            .collect();
        assert!(candidates.iter().all(|&c| c != 1.0));
        let mut rng = RngStream::new(0);
        let best = candidates
            .iter()
            .map(|&c| eval_continuous(ContinuousFn::Rosenbrock, &[c; 30], &mut rng).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best < 0.0, "{best}");
    }

    #[test]
    fn noisy_problem_is_flagged() {
        let p = EncodedContinuousProblem::standard(ContinuousFn::NoisyQuartic);
        assert!(!p.deterministic());
        let q = EncodedContinuousProblem::standard(ContinuousFn::Griewank);
        assert!(q.deterministic());
        let mut rng = RngStream::new(2);
        let bits = BitString::random(q.n_bits(), &mut rng);
        assert_eq!(q.fitness(&bits, &mut rng), q.fitness(&bits, &mut rng));
    }
}
