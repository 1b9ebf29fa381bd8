//! Root2path long-path landscape.
//!
//! The path for one bit is `0, 1`. The path for `n` bits is the `n - 2` path
//! prefixed with `00`, then a single bridge string (`01` followed by the last
//! string of the `n - 2` path), then the `n - 2` path in reverse prefixed
//! with `11`. Strings on the path score `n^2` plus their 1-based position;
//! every other string scores its number of zeros, which leads toward the
//! all-zeros start of the path.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Number of strings on the path for an odd bit length `n`.
pub fn path_length(n: usize) -> u64 {
    assert!(n % 2 == 1, "path length is defined for odd n");
    // L(1) = 2, L(n) = 2 L(n - 2) + 1  =>  L(n) = 3 * 2^((n - 1) / 2) - 1
    3 * (1u64 << ((n - 1) / 2)) - 1
}

/// 0-based index of `bits` along the path, or `None` when off the path.
pub fn path_position(bits: &BitString) -> Option<u64> {
    position(bits.as_slice())
}

fn position(s: &[bool]) -> Option<u64> {
    let m = s.len();
    if m == 1 {
        return Some(s[0] as u64);
    }
    let rest = &s[2..];
    let sub = path_length(m - 2);
    match (s[0], s[1]) {
        (false, false) => position(rest),
        (false, true) => is_path_end(rest).then_some(sub),
        (true, true) => position(rest).map(|q| 2 * sub - q),
        (true, false) => None,
    }
}

// The last string of a path is `1` for one bit and `11 0...0` otherwise.
fn is_path_end(s: &[bool]) -> bool {
    match s.len() {
        1 => s[0],
        _ => s[0] && s[1] && s[2..].iter().all(|&b| !b),
    }
}

/// Root2path fitness of an odd-length string.
pub fn f2_root2path(bits: &BitString) -> Result<u64> {
    let n = bits.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenPathLength(n));
    }
    Ok(match path_position(bits) {
        Some(k) => (n * n) as u64 + k + 1,
        None => (n - bits.count_ones()) as u64,
    })
}

/// P2: Root2path over `n` bits.
#[derive(Debug, Clone)]
pub struct Root2Path {
    n: usize,
}

impl Root2Path {
    pub fn new(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::EvenPathLength(n));
        }
        Ok(Root2Path { n })
    }
}

impl Problem for Root2Path {
    fn name(&self) -> &str {
        "P2"
    }

    fn n_bits(&self) -> usize {
        self.n
    }

    fn fitness(&self, bits: &BitString, _rng: &mut RngStream) -> f64 {
        f2_root2path(bits).expect("odd length checked at construction") as f64
    }

    fn known_max(&self) -> Option<f64> {
        Some(((self.n * self.n) as u64 + path_length(self.n)) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent construction: materialize the path as a list of strings.
    fn build_path(n: usize) -> Vec<String> {
        if n == 1 {
            return vec!["0".into(), "1".into()];
        }
        let sub = build_path(n - 2);
        let mut path: Vec<String> = sub.iter().map(|s| format!("00{s}")).collect();
        path.push(format!("01{}", sub.last().unwrap()));
        path.extend(sub.iter().rev().map(|s| format!("11{s}")));
        path
    }

    #[test]
    fn lengths_follow_the_recursion() {
        let mut expected = 2u64;
        for n in (1..=29).step_by(2) {
            assert_eq!(path_length(n), expected, "n = {n}");
            expected = 2 * expected + 1;
        }
        assert_eq!(path_length(29), 49151);
    }

    #[test]
    fn positions_match_enumerated_path() {
        for n in [1, 3, 5, 7, 9, 11] {
            let path = build_path(n);
            assert_eq!(path.len() as u64, path_length(n));
            for (k, s) in path.iter().enumerate() {
                let bits = BitString::parse(s).unwrap();
                assert_eq!(path_position(&bits), Some(k as u64), "{s}");
            }
            // every other string is off the path
            let on: std::collections::HashSet<_> = path.iter().cloned().collect();
            for v in 0..(1u64 << n) {
                let bits = BitString::from_int(v, n);
                if !on.contains(&bits.to_string()) {
                    assert_eq!(path_position(&bits), None);
                }
            }
        }
    }

    #[test]
    fn exhaustive_maximum_and_path_dominance() {
        for n in [5usize, 7, 9] {
            let mut on_path = Vec::new();
            let mut max_off = 0;
            let mut max_all = 0;
            for v in 0..(1u64 << n) {
                let bits = BitString::from_int(v, n);
                let f = f2_root2path(&bits).unwrap();
                max_all = max_all.max(f);
                match path_position(&bits) {
                    Some(k) => on_path.push((k, f)),
                    None => max_off = max_off.max(f),
                }
            }
            assert_eq!(max_all, path_length(n) + (n * n) as u64);
            on_path.sort();
            assert!(on_path.windows(2).all(|w| w[0].1 < w[1].1));
            assert!(on_path[0].1 > max_off);
        }
    }

    #[test]
    fn n29_maximum() {
        let path_end = format!("11{}", "0".repeat(27));
        let bits = BitString::parse(&path_end).unwrap();
        assert_eq!(path_position(&bits), Some(49150));
        assert_eq!(f2_root2path(&bits).unwrap(), 49992);
        assert_eq!(Root2Path::new(29).unwrap().known_max(), Some(49992.0));

        let start = BitString::zeros(29);
        assert!(f2_root2path(&start).unwrap() < f2_root2path(&bits).unwrap());
    }

    #[test]
    fn even_length_rejected() {
        assert!(matches!(f2_root2path(&BitString::zeros(4)), Err(Error::EvenPathLength(4))));
        assert!(Root2Path::new(30).is_err());
    }
}
