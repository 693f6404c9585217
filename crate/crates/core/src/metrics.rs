//! Fidelity and secrecy metrics.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Number of positions where `tx` and `rx` differ.
pub fn bit_errors(tx: &[u8], rx: &[u8]) -> Result<usize> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    Ok(tx.iter().zip(rx).filter(|(a, b)| a != b).count())
}

pub fn bit_error_rate(tx: &[u8], rx: &[u8]) -> Result<f64> {
    if tx.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(bit_errors(tx, rx)? as f64 / tx.len() as f64)
}

fn xlog2x(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * libm::log2(p)
    }
}

/// Mutual information per bit between transmitted and recovered bits for a
/// binary symmetric channel with crossover `p` and equiprobable inputs:
/// `1 + p log2 p + (1 - p) log2 (1 - p)`.
pub fn information_leakage(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("ber", "must lie in [0, 1]"));
    }
    Ok((1.0 + xlog2x(p) + xlog2x(1.0 - p)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageResult {
    pub ber: f64,
    pub leakage: f64,
}

impl LeakageResult {
    pub fn from_ber(ber: f64) -> Result<Self> {
        Ok(LeakageResult {
            ber,
            leakage: information_leakage(ber)?,
        })
    }
}

/// Fixed-width histogram over `[lo, hi)`. Samples below `lo` land in the first
/// bin and samples at or above `hi` in the last, so every sample is counted.
pub fn histogram(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<u64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::invalid("bins", "must be at least 1"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("range", "requires finite lo < hi"));
    }
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for &x in samples {
        if x.is_nan() {
            return Err(Error::invalid("samples", "NaN cannot be binned"));
        }
        let idx = if x < lo {
            0
        } else {
            (libm::floor((x - lo) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup |F_a - F_b|`.
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small lambda.
        let mut cdf = 0.0;
        let c = -PI * PI / (8.0 * lambda * lambda);
        for k in 1..=20 {
            let m = (2 * k - 1) as f64;
            cdf += libm::exp(c * m * m);
        }
        1.0 - libm::sqrt(2.0 * PI) / lambda * cdf
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = libm::exp(-2.0 * kf * kf * lambda * lambda);
            sum += sign * term;
            if term < 1e-300 {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

fn sorted(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("samples", "NaN in KS input"));
    }
    let mut s = v.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    Ok(s)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// effective size `n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max(libm::fabs(i as f64 / na - j as f64 / nb));
    }
    // Once one sample is exhausted its CDF is 1 and the other can only approach it.
    let ne = na * nb / (na + nb);
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(libm::sqrt(ne) * d),
    })
}
