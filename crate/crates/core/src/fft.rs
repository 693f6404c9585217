//! Iterative radix-2 decimation-in-time FFT.
//!
//! Neither direction is normalized; the OFDM modem applies its own scaling.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X[k] = sum x[n] exp(-j 2 pi k n / N)`
    Forward,
    /// `x[n] = sum X[k] exp(+j 2 pi k n / N)`
    Inverse,
}

/// Precomputed twiddles and bit-reversal permutation for one transform size.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid("n_fft", "must be a power of two >= 2"));
        }
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        Ok(Fft {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [Complex64], dir: Direction) -> Result<()> {
        if buf.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: buf.len(),
            });
        }
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.n {
            let stride = self.n / (2 * half);
            for start in (0..self.n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = match dir {
                        Direction::Forward => w,
                        Direction::Inverse => w.conj(),
                    };
                    let t = w * buf[start + k + half];
                    let u = buf[start + k];
                    buf[start + k] = u + t;
                    buf[start + k + half] = u - t;
                }
            }
            half *= 2;
        }
        Ok(())
    }

    pub fn forward(&self, buf: &mut [Complex64]) -> Result<()> {
        self.process(buf, Direction::Forward)
    }

    pub fn inverse(&self, buf: &mut [Complex64]) -> Result<()> {
        self.process(buf, Direction::Inverse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let ang = sign * 2.0 * PI * (k * i) as f64 / n as f64;
                        v * Complex64::new(ang.cos(), ang.sin())
                    })
                    .sum()
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                Complex64::new(
                    ((i * 7 + 3) % 11) as f64 - 5.0,
                    ((i * 5 + 1) % 13) as f64 * 0.25,
                )
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        for n in [2, 4, 8, 32, 256] {
            let x = signal(n);
            let plan = Fft::new(n).unwrap();
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut y = x.clone();
                plan.process(&mut y, dir).unwrap();
                let expected = naive_dft(&x, sign);
                for (a, b) in y.iter().zip(&expected) {
                    assert!((a - b).norm() < 1e-9 * n as f64, "n={n}");
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let plan = Fft::new(64).unwrap();
        let x = signal(64);
        let mut y = x.clone();
        plan.forward(&mut y).unwrap();
        plan.inverse(&mut y).unwrap();
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 64.0 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Fft::new(0).is_err());
        assert!(Fft::new(1).is_err());
        assert!(Fft::new(12).is_err());
        let plan = Fft::new(8).unwrap();
        assert!(plan.forward(&mut [Complex64::new(0.0, 0.0); 4]).is_err());
    }
}
