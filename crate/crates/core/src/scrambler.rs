//! Constellation sign scrambling keyed by Henon map states.
//!
//! One stage multiplies the real part of symbol `k` by `sgn(x_a(k))` and the
//! imaginary part by `sgn(x_b(k))`, with `sgn(0) = +1`. The cascade runs six
//! stages over the pairs `(1,2) (1,3) (1,4) (2,3) (2,4) (3,4)`, all keyed by
//! the same per-symbol state. Every stage is an involution, so descrambling
//! is the same operation with the receiver's key.

use alloc::vec::Vec;

use crate::henon::HenonState;
use crate::{Complex64, Error, Result};

/// Two distinct map dimensions, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DimensionPair {
    a: u8,
    b: u8,
}

impl DimensionPair {
    /// All six pairs in cascade order.
    pub const CASCADE: [DimensionPair; 6] = [
        DimensionPair { a: 1, b: 2 },
        DimensionPair { a: 1, b: 3 },
        DimensionPair { a: 1, b: 4 },
        DimensionPair { a: 2, b: 3 },
        DimensionPair { a: 2, b: 4 },
        DimensionPair { a: 3, b: 4 },
    ];

    pub fn new(a: u8, b: u8) -> Result<Self> {
        if !(1..=4).contains(&a) || !(1..=4).contains(&b) {
            return Err(Error::invalid("dimension", "must be in 1..=4"));
        }
        if a == b {
            return Err(Error::invalid("dimension", "pair members must differ"));
        }
        Ok(DimensionPair { a, b })
    }

    /// Dimension keying the real part.
    pub fn real_dim(&self) -> u8 {
        self.a
    }

    /// Dimension keying the imaginary part.
    pub fn imag_dim(&self) -> u8 {
        self.b
    }
}

impl Default for DimensionPair {
    fn default() -> Self {
        DimensionPair { a: 1, b: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScrambleMode {
    Off,
    Single(DimensionPair),
    #[default]
    Cascade,
}

impl ScrambleMode {
    /// Number of sign stages applied per symbol.
    pub fn stages(&self) -> usize {
        match self {
            ScrambleMode::Off => 0,
            ScrambleMode::Single(_) => 1,
            ScrambleMode::Cascade => DimensionPair::CASCADE.len(),
        }
    }
}

impl core::fmt::Display for ScrambleMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScrambleMode::Off => f.write_str("off"),
            ScrambleMode::Single(p) => write!(f, "single{}{}", p.a, p.b),
            ScrambleMode::Cascade => f.write_str("cascade"),
        }
    }
}

#[inline]
fn key_sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_key(block_len: usize, key: &[HenonState]) -> Result<()> {
    if key.len() < block_len {
        return Err(Error::KeyUnderrun {
            needed: block_len,
            available: key.len(),
        });
    }
    Ok(())
}

fn stage_in_place(block: &mut [Complex64], key: &[HenonState], pair: DimensionPair) {
    let (ia, ib) = (pair.a as usize - 1, pair.b as usize - 1);
    for (sym, state) in block.iter_mut().zip(key) {
        sym.re *= key_sign(state[ia]);
        sym.im *= key_sign(state[ib]);
    }
}

/// Applies `mode` in place. Scrambling and descrambling are the same call.
pub fn apply_in_place(
    block: &mut [Complex64],
    key: &[HenonState],
    mode: ScrambleMode,
) -> Result<()> {
    if mode == ScrambleMode::Off {
        return Ok(());
    }
    check_key(block.len(), key)?;
    match mode {
        ScrambleMode::Off => {}
        ScrambleMode::Single(pair) => stage_in_place(block, key, pair),
        ScrambleMode::Cascade => {
            for pair in DimensionPair::CASCADE {
                stage_in_place(block, key, pair);
            }
        }
    }
    Ok(())
}

/// Single-stage scrambling with one dimension pair.
pub fn scramble(
    block: &[Complex64],
    key: &[HenonState],
    pair: DimensionPair,
) -> Result<Vec<Complex64>> {
    let mut out = block.to_vec();
    apply_in_place(&mut out, key, ScrambleMode::Single(pair))?;
    Ok(out)
}

/// Six-stage cascade.
pub fn cascade_scramble(block: &[Complex64], key: &[HenonState]) -> Result<Vec<Complex64>> {
    let mut out = block.to_vec();
    apply_in_place(&mut out, key, ScrambleMode::Cascade)?;
    Ok(out)
}

/// Inverts [`scramble`] or [`cascade_scramble`] using the receiver's key.
///
/// Only the signs of the key matter, so a slave key `alpha * x` with
/// `alpha > 0` recovers the symbols exactly.
pub fn descramble(
    block: &[Complex64],
    slave_key: &[HenonState],
    mode: ScrambleMode,
) -> Result<Vec<Complex64>> {
    let mut out = block.to_vec();
    apply_in_place(&mut out, slave_key, mode)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::string::ToString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_stage_example() {
        let key = [HenonState::new(0.5, -0.3, 0.0, 0.0)];
        let out = scramble(&[c(1.0, 1.0)], &key, DimensionPair::new(1, 2).unwrap()).unwrap();
        assert_eq!(out, [c(1.0, -1.0)]);
    }

    #[test]
    fn positive_key_is_identity() {
        let key = [HenonState::new(0.5, 0.3, 1.2, 0.0)];
        let x = [c(0.3, -0.7)];
        for pair in DimensionPair::CASCADE {
            assert_eq!(scramble(&x, &key, pair).unwrap(), x);
        }
        assert_eq!(cascade_scramble(&x, &key).unwrap(), x);
    }

    #[test]
    fn cascade_sign_bookkeeping() {
        let key = [HenonState::new(0.5, -0.5, 0.5, -0.5)];
        assert_eq!(
            cascade_scramble(&[c(1.0, 1.0)], &key).unwrap(),
            [c(1.0, 1.0)]
        );
        // real: s1 s1 s1 s2 s2 s3 = s1 s3, imag: s2 s3 s4 s3 s4 s4 = s2 s4
        let key = [HenonState::new(-0.5, 0.5, 0.5, 0.5)];
        assert_eq!(
            cascade_scramble(&[c(1.0, 1.0)], &key).unwrap(),
            [c(-1.0, 1.0)]
        );
    }

    #[test]
    fn zero_component_counts_as_positive() {
        let key = [HenonState::new(0.0, -0.0, 0.0, 0.0)];
        assert_eq!(
            cascade_scramble(&[c(2.0, -3.0)], &key).unwrap(),
            [c(2.0, -3.0)]
        );
    }

    #[test]
    fn key_underrun() {
        let key = [HenonState::default()];
        let block = [c(1.0, 0.0), c(0.0, 1.0)];
        assert_eq!(
            cascade_scramble(&block, &key),
            Err(Error::KeyUnderrun {
                needed: 2,
                available: 1
            })
        );
        // Off never touches the key.
        assert_eq!(descramble(&block, &[], ScrambleMode::Off).unwrap(), block);
    }

    #[test]
    fn pair_validation() {
        assert!(DimensionPair::new(1, 1).is_err());
        assert!(DimensionPair::new(0, 2).is_err());
        assert!(DimensionPair::new(2, 5).is_err());
        assert_eq!(DimensionPair::new(3, 4).unwrap(), DimensionPair::CASCADE[5]);
    }

    #[test]
    fn exactly_six_unordered_pairs() {
        let mut seen = std::collections::BTreeSet::new();
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                if let Ok(p) = DimensionPair::new(a, b) {
                    seen.insert((p.a.min(p.b), p.a.max(p.b)));
                }
            }
        }
        assert_eq!(seen.len(), 6);
        for p in DimensionPair::CASCADE {
            assert!(seen.contains(&(p.a, p.b)));
        }
    }

    #[test]
    fn mode_display() {
        assert_eq!(ScrambleMode::Cascade.to_string(), "cascade");
        assert_eq!(
            ScrambleMode::Single(DimensionPair::new(2, 4).unwrap()).to_string(),
            "single24"
        );
        assert_eq!(ScrambleMode::Off.to_string(), "off");
    }
}
