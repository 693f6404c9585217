//! DCO-OFDM modem.
//!
//! Transmit: `n_data = n_fft/2 - 1` symbols are placed in a hermitian
//! spectrum `[0, X1..Xm, 0, conj(Xm)..conj(X1)]`, transformed with
//! `s[j] = (1/N) sum X'[n] exp(+j 2 pi n j / N)`, prefixed with the last
//! `cp_len` samples, lifted by a DC bias and clipped at zero.
//!
//! The bias is `rms * 10^(dc_bias_db / 20)`, where `rms = sqrt(2 n_data) / N`
//! is the RMS of the un-biased waveform for unit-energy symbols. Using the
//! nominal RMS keeps the bias identical for every OFDM symbol of a config.

use alloc::vec::Vec;

use crate::fft::Fft;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub n_fft: usize,
    pub cp_len: usize,
    /// DC bias above the nominal signal RMS, in dB.
    pub dc_bias_db: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            n_fft: 128,
            cp_len: 16,
            dc_bias_db: 7.0,
        }
    }
}

impl OfdmConfig {
    pub fn new(n_fft: usize, cp_len: usize, dc_bias_db: f64) -> Result<Self> {
        let cfg = OfdmConfig {
            n_fft,
            cp_len,
            dc_bias_db,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fft < 4 || !self.n_fft.is_power_of_two() {
            return Err(Error::invalid("n_fft", "must be a power of two >= 4"));
        }
        if self.cp_len >= self.n_fft {
            return Err(Error::invalid("cp_len", "must be smaller than n_fft"));
        }
        if !self.dc_bias_db.is_finite() {
            return Err(Error::invalid("dc_bias_db", "must be finite"));
        }
        Ok(())
    }

    /// Data subcarriers per OFDM symbol.
    pub fn n_data(&self) -> usize {
        self.n_fft / 2 - 1
    }

    /// Samples per OFDM symbol including the cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.cp_len
    }

    pub fn nominal_rms(&self) -> f64 {
        libm::sqrt(2.0 * self.n_data() as f64) / self.n_fft as f64
    }

    pub fn dc_bias(&self) -> f64 {
        self.nominal_rms() * libm::pow(10.0, self.dc_bias_db / 20.0)
    }
}

/// Non-negative LED drive samples for one OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<f64>,
    pub dc_bias: f64,
    /// Samples that were negative after biasing and got clipped to zero.
    pub clipped: usize,
}

/// Per-subcarrier complex gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub gains: Vec<Complex64>,
}

impl ChannelEstimate {
    pub fn unity(n: usize) -> Self {
        ChannelEstimate {
            gains: alloc::vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn zero_gain_indices(&self) -> Vec<usize> {
        self.gains
            .iter()
            .enumerate()
            .filter(|(_, g)| g.norm_sqr() == 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `[0, X1..Xm, 0, conj(Xm)..conj(X1)]`.
///
/// Only `n_fft == 2 * block.len() + 2` is required here, so non-power-of-two
/// layouts can be inspected; [`OfdmModem`] enforces the full config.
pub fn hermitian_extend(block: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    if cfg.n_fft < 4 || !cfg.n_fft.is_multiple_of(2) || block.len() != cfg.n_fft / 2 - 1 {
        return Err(Error::LengthMismatch {
            expected: cfg.n_fft / 2 - 1,
            actual: block.len(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(cfg.n_fft);
    out.push(zero);
    out.extend_from_slice(block);
    out.push(zero);
    out.extend(block.iter().rev().map(|x| x.conj()));
    Ok(out)
}

/// Modulator/demodulator bound to one validated config.
#[derive(Debug, Clone)]
pub struct OfdmModem {
    cfg: OfdmConfig,
    fft: Fft,
}

impl OfdmModem {
    pub fn new(cfg: OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(OfdmModem {
            cfg,
            fft: Fft::new(cfg.n_fft)?,
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// Scaled inverse transform of a hermitian-extended block, before CP and bias.
    pub fn time_domain(&self, extended: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut buf = extended.to_vec();
        self.fft.inverse(&mut buf)?;
        let scale = 1.0 / self.cfg.n_fft as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        Ok(buf)
    }

    /// Transmits a hermitian-extended block.
    pub fn modulate_extended(&self, extended: &[Complex64]) -> Result<TimeSignal> {
        let body = self.time_domain(extended)?;
        let dc_bias = self.cfg.dc_bias();
        let cp = self.cfg.cp_len;
        let mut samples = Vec::with_capacity(self.cfg.symbol_len());
        samples.extend(body[body.len() - cp..].iter().map(|v| v.re));
        samples.extend(body.iter().map(|v| v.re));
        let mut clipped = 0;
        for s in samples.iter_mut() {
            *s += dc_bias;
            if *s < 0.0 {
                *s = 0.0;
                clipped += 1;
            }
        }
        Ok(TimeSignal {
            samples,
            dc_bias,
            clipped,
        })
    }

    /// Hermitian extension followed by [`OfdmModem::modulate_extended`].
    pub fn modulate(&self, block: &[Complex64]) -> Result<TimeSignal> {
        self.modulate_extended(&hermitian_extend(block, &self.cfg)?)
    }

    /// Strips the CP, removes `dc_bias`, transforms and returns subcarriers `1..=n_data`.
    pub fn demodulate(&self, samples: &[f64], dc_bias: f64) -> Result<Vec<Complex64>> {
        if samples.len() != self.cfg.symbol_len() {
            return Err(Error::LengthMismatch {
                expected: self.cfg.symbol_len(),
                actual: samples.len(),
            });
        }
        let mut buf: Vec<Complex64> = samples[self.cfg.cp_len..]
            .iter()
            .map(|&s| Complex64::new(s - dc_bias, 0.0))
            .collect();
        self.fft.forward(&mut buf)?;
        Ok(buf[1..=self.cfg.n_data()].to_vec())
    }
}

pub fn ofdm_modulate(extended: &[Complex64], cfg: &OfdmConfig) -> Result<TimeSignal> {
    OfdmModem::new(*cfg)?.modulate_extended(extended)
}

pub fn ofdm_demodulate(samples: &[f64], cfg: &OfdmConfig, dc_bias: f64) -> Result<Vec<Complex64>> {
    OfdmModem::new(*cfg)?.demodulate(samples, dc_bias)
}

/// Least-squares estimate `rx / tx` per subcarrier.
pub fn ls_channel_estimate(
    rx_pilot: &[Complex64],
    tx_pilot: &[Complex64],
) -> Result<ChannelEstimate> {
    if rx_pilot.len() != tx_pilot.len() {
        return Err(Error::LengthMismatch {
            expected: tx_pilot.len(),
            actual: rx_pilot.len(),
        });
    }
    let mut gains = Vec::with_capacity(tx_pilot.len());
    for (i, (r, t)) in rx_pilot.iter().zip(tx_pilot).enumerate() {
        if t.norm_sqr() == 0.0 {
            return Err(Error::ZeroDivisor {
                what: "pilot",
                index: i,
            });
        }
        gains.push(r / t);
    }
    Ok(ChannelEstimate { gains })
}

pub fn equalize(block: &[Complex64], est: &ChannelEstimate) -> Result<Vec<Complex64>> {
    if block.len() != est.gains.len() {
        return Err(Error::LengthMismatch {
            expected: est.gains.len(),
            actual: block.len(),
        });
    }
    block
        .iter()
        .zip(&est.gains)
        .enumerate()
        .map(|(i, (x, g))| {
            if g.norm_sqr() == 0.0 {
                Err(Error::ZeroDivisor {
                    what: "channel gain",
                    index: i,
                })
            } else {
                Ok(x / g)
            }
        })
        .collect()
}
