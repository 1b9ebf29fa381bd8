use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Fixed-length binary genotype.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BitString(vec![true; n])
    }

    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        BitString((0..n).map(|_| rng.bit()).collect())
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    section: "bitstring".into(),
                    message: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }

    /// The `bits` low-order bits of `value`, most significant first.
    pub fn from_int(value: u64, bits: usize) -> Self {
        BitString((0..bits).rev().map(|k| (value >> k) & 1 == 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        self.0[j]
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: bool) {
        self.0[j] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        BitString(self.0.iter().map(|b| !b).collect())
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected, actual: self.len() })
        }
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl Index<usize> for BitString {
    type Output = bool;

    fn index(&self, j: usize) -> &bool {
        &self.0[j]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming(a: &BitString, b: &BitString) -> Result<usize> {
    b.check_len(a.len())?;
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&bs("0101"), &bs("0101")).unwrap(), 0);
        assert_eq!(hamming(&bs("0000"), &bs("1111")).unwrap(), 4);
        assert_eq!(hamming(&bs("0101"), &bs("0011")).unwrap(), 2);
    }

    #[test]
    fn hamming_rejects_length_mismatch() {
        assert!(matches!(
            hamming(&bs("010"), &bs("0101")),
            Err(Error::LengthMismatch { expected: 3, actual: 4 })
        ));
    }

    #[test]
    fn from_int_is_msb_first() {
        assert_eq!(BitString::from_int(6, 4).to_string(), "0110");
        assert_eq!(BitString::from_int(1, 1).to_string(), "1");
    }

    proptest! {
        #[test]
        fn hamming_identity_and_complement(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let a = BitString::from(bits);
            prop_assert_eq!(hamming(&a, &a).unwrap(), 0);
            prop_assert_eq!(hamming(&a, &a.complement()).unwrap(), a.len());
        }

        #[test]
        fn hamming_symmetric_and_bounded(
            pair in (1usize..100).prop_flat_map(|n| (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
            ))
        ) {
            let a = BitString::from(pair.0);
            let b = BitString::from(pair.1);
            let d = hamming(&a, &b).unwrap();
            prop_assert_eq!(d, hamming(&b, &a).unwrap());
            prop_assert!(d <= a.len());
        }
    }
}
