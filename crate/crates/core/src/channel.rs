//! Line-of-sight optical channel with photodiode noise.
//!
//! The channel is a single flat tap: `y = H_loss * x + n`, with
//! `H_loss = R * G_filter * H_los` and `H_los` the Lambertian LOS DC gain
//!
//! ```text
//! H_los = (m + 1) / (2 pi d^2) * cos^m(phi) * A_R * cos(psi),   psi <= FOV
//! ```
//!
//! Noise is zero-mean Gaussian whose standard deviation is the root sum of
//! the shot and thermal noise currents.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Lambertian mode number from the LED semi-angle at half power, in degrees.
pub fn lambertian_order(semi_angle_half_power_deg: f64) -> Result<f64> {
    if !(semi_angle_half_power_deg > 0.0 && semi_angle_half_power_deg < 90.0) {
        return Err(Error::invalid("semi_angle", "must lie in (0, 90) degrees"));
    }
    let c = libm::cos(semi_angle_half_power_deg.to_radians());
    Ok(-core::f64::consts::LN_2 / libm::log(c))
}

/// Emitter/receiver placement and optics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    /// Metres.
    pub emitter_pos: Vec3,
    pub receiver_pos: Vec3,
    pub emitter_normal: Vec3,
    pub receiver_normal: Vec3,
    pub lambertian_order: f64,
    /// Photodiode active area, m².
    pub receiver_area: f64,
    /// Receiver field of view (half angle), degrees.
    pub fov_half_angle_deg: f64,
    /// Optical power of the LED, W.
    pub emitter_power: f64,
    pub filter_gain: f64,
}

impl Default for ChannelGeometry {
    /// Ceiling LED at (0, 0, 3) m facing down, upward photodiode at
    /// (2.5, 2.5, 0) m, 60° half-power semi-angle (order 1), 1 cm² area,
    /// 85° FOV, 3.2 W.
    fn default() -> Self {
        ChannelGeometry {
            emitter_pos: [0.0, 0.0, 3.0],
            receiver_pos: [2.5, 2.5, 0.0],
            emitter_normal: [0.0, 0.0, -1.0],
            receiver_normal: [0.0, 0.0, 1.0],
            lambertian_order: 1.0,
            receiver_area: 1e-4,
            fov_half_angle_deg: 85.0,
            emitter_power: 3.2,
            filter_gain: 1.0,
        }
    }
}

impl ChannelGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambertian_order >= 0.0) {
            return Err(Error::invalid("lambertian_order", "must be >= 0"));
        }
        if !(self.receiver_area > 0.0) {
            return Err(Error::invalid("receiver_area", "must be > 0"));
        }
        if !(self.fov_half_angle_deg > 0.0 && self.fov_half_angle_deg <= 90.0) {
            return Err(Error::invalid("fov", "must lie in (0, 90] degrees"));
        }
        if norm(self.emitter_normal) == 0.0 || norm(self.receiver_normal) == 0.0 {
            return Err(Error::invalid("normal", "must be non-zero"));
        }
        Ok(())
    }

    pub fn distance(&self) -> f64 {
        let d = [
            self.receiver_pos[0] - self.emitter_pos[0],
            self.receiver_pos[1] - self.emitter_pos[1],
            self.receiver_pos[2] - self.emitter_pos[2],
        ];
        norm(d)
    }

    /// `(cos phi, cos psi)`: irradiance angle at the emitter, incidence angle
    /// at the receiver.
    pub fn angle_cosines(&self) -> Result<(f64, f64)> {
        let d = [
            self.receiver_pos[0] - self.emitter_pos[0],
            self.receiver_pos[1] - self.emitter_pos[1],
            self.receiver_pos[2] - self.emitter_pos[2],
        ];
        let dist = norm(d);
        if dist == 0.0 {
            return Err(Error::CoincidentPositions);
        }
        let cos_phi = dot(self.emitter_normal, d) / (dist * norm(self.emitter_normal));
        let cos_psi = -dot(self.receiver_normal, d) / (dist * norm(self.receiver_normal));
        Ok((cos_phi, cos_psi))
    }

    /// Power received with the LED at its nominal output, W.
    pub fn received_power(&self) -> Result<f64> {
        Ok(los_gain(self)? * self.emitter_power)
    }
}

/// LOS DC gain. Zero outside the receiver FOV or behind either device.
pub fn los_gain(geom: &ChannelGeometry) -> Result<f64> {
    let (cos_phi, cos_psi) = geom.angle_cosines()?;
    if cos_phi <= 0.0 || cos_psi < 0.0 {
        return Ok(0.0);
    }
    let psi = libm::acos(cos_psi.min(1.0));
    if psi > geom.fov_half_angle_deg.to_radians() {
        return Ok(0.0);
    }
    let d = geom.distance();
    let m = geom.lambertian_order;
    Ok((m + 1.0) / (2.0 * PI * d * d) * libm::pow(cos_phi, m) * geom.receiver_area * cos_psi)
}

/// Thermal noise variance formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalForm {
    /// `4 K T B / R_f`
    #[default]
    Standard,
    /// `4 K T / (B R_f)`, as typeset in the source derivation.
    AsPrinted,
}

/// Photodiode receiver constants. Powers in W, currents in A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// A/W.
    pub responsivity: f64,
    /// C.
    pub electron_charge: f64,
    pub received_power: f64,
    pub background_power: f64,
    /// Hz.
    pub bandwidth: f64,
    /// J/K.
    pub boltzmann: f64,
    /// K.
    pub temperature: f64,
    /// Ohm.
    pub feedback_resistance: f64,
    pub thermal_form: ThermalForm,
}

impl NoiseParams {
    /// Receiver defaults: 0.54 A/W, 100 MHz, 298 K, 10 kOhm, 1 µW of ambient
    /// light. These are conventional values, not measured ones.
    pub fn with_received_power(received_power: f64) -> Self {
        NoiseParams {
            responsivity: 0.54,
            electron_charge: 1.602_176_634e-19,
            received_power,
            background_power: 1e-6,
            bandwidth: 100e6,
            boltzmann: 1.380_649e-23,
            temperature: 298.0,
            feedback_resistance: 10e3,
            thermal_form: ThermalForm::Standard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.responsivity, "responsivity"),
            (self.electron_charge, "electron_charge"),
            (self.received_power, "received_power"),
            (self.background_power, "background_power"),
            (self.bandwidth, "bandwidth"),
            (self.boltzmann, "boltzmann"),
            (self.temperature, "temperature"),
            (self.feedback_resistance, "feedback_resistance"),
        ];
        for (v, name) in fields {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be > 0"));
            }
        }
        Ok(())
    }
}

impl Default for NoiseParams {
    /// Received power from the default geometry.
    fn default() -> Self {
        let p_r = ChannelGeometry::default().received_power().unwrap_or(0.0);
        Self::with_received_power(p_r)
    }
}

/// Noise budget; `*_sq` are variances in A², `total` is a standard deviation in A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBudget {
    pub shot_sq: f64,
    pub thermal_sq: f64,
    pub total: f64,
}

/// `sqrt(shot^2 + thermal^2)`.
pub fn combine_noise(shot: f64, thermal: f64) -> f64 {
    libm::hypot(shot, thermal)
}

pub fn noise_variance(p: &NoiseParams) -> NoiseBudget {
    let shot_sq = 2.0
        * p.electron_charge
        * p.responsivity
        * (p.received_power + p.background_power)
        * p.bandwidth;
    let thermal_sq = match p.thermal_form {
        ThermalForm::Standard => {
            4.0 * p.boltzmann * p.temperature * p.bandwidth / p.feedback_resistance
        }
        ThermalForm::AsPrinted => {
            4.0 * p.boltzmann * p.temperature / (p.bandwidth * p.feedback_resistance)
        }
    };
    NoiseBudget {
        shot_sq,
        thermal_sq,
        total: libm::sqrt(shot_sq + thermal_sq),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelMode {
    /// Unit gain, no noise.
    Ideal,
    /// Gain and noise from geometry and receiver constants.
    Physical,
    /// Unit gain; noise sized to the signal's AC power at the target SNR (dB).
    SnrSweep { snr_db: f64 },
}

impl core::fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChannelMode::Ideal => f.write_str("ideal"),
            ChannelMode::Physical => f.write_str("physical"),
            ChannelMode::SnrSweep { snr_db } => write!(f, "sweep@{snr_db}dB"),
        }
    }
}

/// A resolved flat channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub mode: ChannelMode,
    /// Amplitude gain applied to the transmitted samples.
    pub gain: f64,
    /// Noise standard deviation for [`ChannelMode::Physical`].
    pub noise_std: f64,
}

impl Channel {
    pub fn ideal() -> Self {
        Channel {
            mode: ChannelMode::Ideal,
            gain: 1.0,
            noise_std: 0.0,
        }
    }

    pub fn snr_sweep(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::invalid("snr_db", "must be finite"));
        }
        Ok(Channel {
            mode: ChannelMode::SnrSweep { snr_db },
            gain: 1.0,
            noise_std: 0.0,
        })
    }

    /// `gain = R * G_filter * H_los`; noise from `noise` with its received
    /// power replaced by `H_los * P_E`.
    pub fn physical(geom: &ChannelGeometry, noise: &NoiseParams) -> Result<Self> {
        geom.validate()?;
        let h = los_gain(geom)?;
        let mut noise = *noise;
        noise.received_power = h * geom.emitter_power;
        Ok(Channel {
            mode: ChannelMode::Physical,
            gain: noise.responsivity * geom.filter_gain * h,
            noise_std: noise_variance(&noise).total,
        })
    }

    pub fn new(mode: ChannelMode, geom: &ChannelGeometry, noise: &NoiseParams) -> Result<Self> {
        match mode {
            ChannelMode::Ideal => Ok(Self::ideal()),
            ChannelMode::Physical => Self::physical(geom, noise),
            ChannelMode::SnrSweep { snr_db } => Self::snr_sweep(snr_db),
        }
    }

    /// Noise standard deviation that would be added to `signal`.
    pub fn noise_std_for(&self, signal: &[f64]) -> f64 {
        match self.mode {
            ChannelMode::Ideal => 0.0,
            ChannelMode::Physical => self.noise_std,
            ChannelMode::SnrSweep { snr_db } => {
                libm::sqrt(ac_power(signal) / libm::pow(10.0, snr_db / 10.0))
            }
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, signal: &[f64], rng: &mut R) -> Vec<f64> {
        let sigma = self.noise_std_for(signal);
        signal
            .iter()
            .map(|&x| {
                let y = self.gain * x;
                if sigma > 0.0 {
                    y + sigma * rng.sample::<f64, _>(StandardNormal)
                } else {
                    y
                }
            })
            .collect()
    }
}

/// Mean-removed power of a real signal.
pub fn ac_power(signal: &[f64]) -> f64 {
    if signal.is_empty() {
        return 0.0;
    }
    let n = signal.len() as f64;
    let mean = signal.iter().sum::<f64>() / n;
    signal.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Passes `signal` through `channel` with noise drawn from a ChaCha8 stream seeded by `rng_seed`.
pub fn apply_channel(signal: &[f64], channel: &Channel, rng_seed: u64) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(channel.apply(signal, &mut rng))
}
