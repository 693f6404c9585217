//! Bit-to-symbol mapping and hard-decision demapping.
//!
//! Bits are `u8` values 0 or 1. A symbol's bit word is read MSB first, and the
//! word value is the constellation index used for tie-breaking.
//!
//! Normative tables (all unit average energy):
//!
//! | scheme | word | point |
//! |--------|------|-------|
//! | BPSK   | `b0` | `+1` for 0, `-1` for 1 |
//! | QPSK   | `b0 b1` | `(s(b0) + j s(b1)) / sqrt 2`, `s(0) = +1`, `s(1) = -1` |
//! | 8PSK   | `b0 b1 b2` | `s(b0) cos t + j s(b1) sin t`, `t = pi/8` if `b0^b1^b2 = 0` else `3pi/8` |
//! | 16QAM  | `b0 b1 b2 b3` | `(l(b0 b1) + j l(b2 b3)) / sqrt 10`, `l`: 00→+1, 01→+3, 10→−1, 11→−3 |
//!
//! BPSK, QPSK and 16QAM are Gray coded. The 8PSK table is not: the real sign,
//! the imaginary sign and the parity of the word each own one bit, so a sign
//! flip of either axis toggles exactly half of the bits on average. Points
//! inside a quadrant differ in one bit, points across an axis in two.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationScheme {
    Bpsk,
    Qpsk,
    Psk8,
    Qam16,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 4] = [
        ModulationScheme::Bpsk,
        ModulationScheme::Qpsk,
        ModulationScheme::Psk8,
        ModulationScheme::Qam16,
    ];

    pub const fn bits_per_symbol(self) -> usize {
        match self {
            ModulationScheme::Bpsk => 1,
            ModulationScheme::Qpsk => 2,
            ModulationScheme::Psk8 => 3,
            ModulationScheme::Qam16 => 4,
        }
    }

    pub const fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    pub const fn name(self) -> &'static str {
        match self {
            ModulationScheme::Bpsk => "bpsk",
            ModulationScheme::Qpsk => "qpsk",
            ModulationScheme::Psk8 => "8psk",
            ModulationScheme::Qam16 => "16qam",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Some(ModulationScheme::Bpsk),
            "qpsk" => Some(ModulationScheme::Qpsk),
            "8psk" | "psk8" => Some(ModulationScheme::Psk8),
            "16qam" | "qam16" => Some(ModulationScheme::Qam16),
            _ => None,
        }
    }

    /// Constellation point for a bit word.
    pub fn point(self, word: usize) -> Complex64 {
        debug_assert!(word < self.order());
        let sign = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
        match self {
            ModulationScheme::Bpsk => Complex64::new(sign(word & 1), 0.0),
            ModulationScheme::Qpsk => Complex64::new(
                sign((word >> 1) & 1) * FRAC_1_SQRT_2,
                sign(word & 1) * FRAC_1_SQRT_2,
            ),
            ModulationScheme::Psk8 => {
                let (b0, b1, b2) = ((word >> 2) & 1, (word >> 1) & 1, word & 1);
                let theta = if b0 ^ b1 ^ b2 == 0 {
                    PI / 8.0
                } else {
                    3.0 * PI / 8.0
                };
                Complex64::new(sign(b0) * libm::cos(theta), sign(b1) * libm::sin(theta))
            }
            ModulationScheme::Qam16 => {
                let level = |pair: usize| {
                    let magnitude = if pair & 1 == 0 { 1.0 } else { 3.0 };
                    sign(pair >> 1) * magnitude
                };
                let scale = 1.0 / libm::sqrt(10.0);
                Complex64::new(level((word >> 2) & 3) * scale, level(word & 3) * scale)
            }
        }
    }

    /// All points in index order.
    pub fn constellation(self) -> Vec<Complex64> {
        (0..self.order()).map(|w| self.point(w)).collect()
    }
}

impl core::fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps a bit sequence to constellation symbols.
pub fn map_bits(bits: &[u8], scheme: ModulationScheme) -> Result<Vec<Complex64>> {
    let k = scheme.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::LengthMismatch {
            expected: bits.len().div_ceil(k) * k,
            actual: bits.len(),
        });
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::invalid("bits", "values must be 0 or 1"));
    }
    Ok(bits
        .chunks_exact(k)
        .map(|chunk| scheme.point(chunk.iter().fold(0, |w, &b| (w << 1) | b as usize)))
        .collect())
}

/// Nearest-point index; equidistant points resolve to the lower index.
pub fn nearest_index(symbol: Complex64, constellation: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, p) in constellation.iter().enumerate() {
        let d = (symbol - p).norm_sqr();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    best
}

/// Hard-decision demapping.
pub fn demap_symbols(symbols: &[Complex64], scheme: ModulationScheme) -> Vec<u8> {
    let table = scheme.constellation();
    let k = scheme.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * k);
    for &s in symbols {
        let w = nearest_index(s, &table);
        out.extend((0..k).rev().map(|i| ((w >> i) & 1) as u8));
    }
    out
}
