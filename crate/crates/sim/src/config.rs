//! Plain-text `key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Vectors are written
//! as comma-separated numbers, e.g. `tx_position = 0, 0, 3`.

use std::fmt::Write as _;
use std::path::Path;

use hcvlc_core::channel::{lambertian_order, ThermalForm};
use hcvlc_core::henon::HenonState;
use hcvlc_core::link::{ChannelKind, Role, SimConfig};
use hcvlc_core::mapping::ModulationScheme;
use hcvlc_core::scrambler::{DimensionPair, ScrambleMode};
use hcvlc_core::sync::ControlConstant;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value:?} ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: &'static str,
    },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] hcvlc_core::Error),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Simulation settings plus the few knobs that only the CLI uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub sim: SimConfig,
    /// Half-power semi-angle of the LED, degrees; sets the Lambertian order.
    pub semi_angle_deg: f64,
    /// Informational; the noise bandwidth is set separately.
    pub symbol_rate: f64,
    /// Room extent (x, y, z) in metres, centred on the origin in x and y.
    pub room_size: [f64; 3],
    pub sync_max_iter: usize,
    /// Smallest and largest FFT sizes for `bench`.
    pub bench_n_min: usize,
    pub bench_n_max: usize,
    pub bench_frames: usize,
}

impl Default for Config {
    fn default() -> Self {
        let semi_angle_deg = 60.0;
        let mut sim = SimConfig::default();
        sim.geometry.lambertian_order = lambertian_order(semi_angle_deg).expect("valid angle");
        Config {
            sim,
            semi_angle_deg,
            symbol_rate: 1e9,
            room_size: [5.0, 5.0, 3.0],
            sync_max_iter: 10_000,
            bench_n_min: 64,
            bench_n_max: 4096,
            bench_frames: 200,
        }
    }
}

/// Keys whose defaults are conventional choices rather than published values.
const ASSUMED: &[&str] = &[
    "n_fft",
    "cp_len",
    "dc_bias_db",
    "data_symbols_per_frame",
    "rx_normal",
    "tx_normal",
    "responsivity",
    "bandwidth",
    "temperature",
    "feedback_resistance",
    "background_power",
    "sync_tol",
    "sync_preamble",
    "eavesdropper_seed",
];

pub const KEYS: &[&str] = &[
    "scheme",
    "scrambler",
    "role",
    "channel",
    "snr_grid_db",
    "bits_per_point",
    "rng_seed",
    "n_fft",
    "cp_len",
    "dc_bias_db",
    "data_symbols_per_frame",
    "symbol_rate",
    "room_size",
    "tx_position",
    "rx_position",
    "tx_normal",
    "rx_normal",
    "led_power",
    "active_area",
    "fov_half_angle_deg",
    "semi_angle_deg",
    "filter_gain",
    "responsivity",
    "electron_charge",
    "background_power",
    "bandwidth",
    "boltzmann",
    "temperature",
    "feedback_resistance",
    "thermal_form",
    "henon_a",
    "henon_b",
    "master_seed",
    "slave_seed",
    "eavesdropper_seed",
    "smc_t",
    "smc_eps1",
    "smc_eps2",
    "smc_q",
    "smc_beta",
    "smc_gamma",
    "smc_c1",
    "smc_c2",
    "smc_c3",
    "smc_alpha",
    "smc_constant",
    "sync_tol",
    "sync_preamble",
    "sync_max_iter",
    "bench_n_min",
    "bench_n_max",
    "bench_frames",
];

fn bad(key: &str, value: &str, reason: &'static str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason,
    }
}

fn float(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(key, v, "expected a finite number"))
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| bad(key, v, "expected a non-negative integer"))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|p| float(key, p)).collect()
}

fn array<const N: usize>(key: &str, v: &str) -> Result<[f64; N], ConfigError> {
    list(key, v)?
        .try_into()
        .map_err(|_| bad(key, v, "wrong number of components"))
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn parse_scrambler(v: &str) -> Option<ScrambleMode> {
    match v {
        "off" => Some(ScrambleMode::Off),
        "cascade" => Some(ScrambleMode::Cascade),
        s => {
            let d = s.strip_prefix("single")?.as_bytes();
            if d.len() != 2 {
                return None;
            }
            let pair = DimensionPair::new(d[0].wrapping_sub(b'0'), d[1].wrapping_sub(b'0')).ok()?;
            Some(ScrambleMode::Single(pair))
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Config::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), ConfigError> {
        let (k, v) = kv.split_once('=').ok_or(ConfigError::Syntax { line: 0 })?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let s = &mut self.sim;
        match key {
            "scheme" => {
                s.scheme = ModulationScheme::from_name(v)
                    .ok_or_else(|| bad(key, v, "bpsk, qpsk, 8psk or 16qam"))?
            }
            "scrambler" => {
                s.scrambler =
                    parse_scrambler(v).ok_or_else(|| bad(key, v, "off, cascade or singleAB"))?
            }
            "role" => {
                s.role = match v {
                    "legitimate" => Role::Legitimate,
                    "eavesdropper" => Role::Eavesdropper,
                    _ => return Err(bad(key, v, "legitimate or eavesdropper")),
                }
            }
            "channel" => {
                s.channel = match v {
                    "ideal" => ChannelKind::Ideal,
                    "physical" => ChannelKind::Physical,
                    "sweep" => ChannelKind::SnrSweep,
                    _ => return Err(bad(key, v, "ideal, physical or sweep")),
                }
            }
            "snr_grid_db" => s.snr_grid_db = list(key, v)?,
            "bits_per_point" => s.bits_per_point = count(key, v)?,
            "rng_seed" => s.rng_seed = v.parse().map_err(|_| bad(key, v, "expected a u64"))?,
            "n_fft" => s.ofdm.n_fft = count(key, v)?,
            "cp_len" => s.ofdm.cp_len = count(key, v)?,
            "dc_bias_db" => s.ofdm.dc_bias_db = float(key, v)?,
            "data_symbols_per_frame" => s.data_symbols_per_frame = count(key, v)?,
            "symbol_rate" => self.symbol_rate = float(key, v)?,
            "room_size" => self.room_size = array(key, v)?,
            "tx_position" => s.geometry.emitter_pos = array(key, v)?,
            "rx_position" => s.geometry.receiver_pos = array(key, v)?,
            "tx_normal" => s.geometry.emitter_normal = array(key, v)?,
            "rx_normal" => s.geometry.receiver_normal = array(key, v)?,
            "led_power" => s.geometry.emitter_power = float(key, v)?,
            "active_area" => s.geometry.receiver_area = float(key, v)?,
            "fov_half_angle_deg" => s.geometry.fov_half_angle_deg = float(key, v)?,
            "semi_angle_deg" => {
                self.semi_angle_deg = float(key, v)?;
                s.geometry.lambertian_order = lambertian_order(self.semi_angle_deg)?;
            }
            "filter_gain" => s.geometry.filter_gain = float(key, v)?,
            "responsivity" => s.noise.responsivity = float(key, v)?,
            "electron_charge" => s.noise.electron_charge = float(key, v)?,
            "background_power" => s.noise.background_power = float(key, v)?,
            "bandwidth" => s.noise.bandwidth = float(key, v)?,
            "boltzmann" => s.noise.boltzmann = float(key, v)?,
            "temperature" => s.noise.temperature = float(key, v)?,
            "feedback_resistance" => s.noise.feedback_resistance = float(key, v)?,
            "thermal_form" => {
                s.noise.thermal_form = match v {
                    "standard" => ThermalForm::Standard,
                    "as_printed" => ThermalForm::AsPrinted,
                    _ => return Err(bad(key, v, "standard or as_printed")),
                }
            }
            "henon_a" => s.map.a = float(key, v)?,
            "henon_b" => s.map.b = float(key, v)?,
            "master_seed" => s.master_seed = HenonState(array(key, v)?),
            "slave_seed" => s.slave_seed = HenonState(array(key, v)?),
            "eavesdropper_seed" => s.eavesdropper_seed = HenonState(array(key, v)?),
            "smc_t" => s.smc.t = float(key, v)?,
            "smc_eps1" => s.smc.eps1 = float(key, v)?,
            "smc_eps2" => s.smc.eps2 = float(key, v)?,
            "smc_q" => s.smc.q = float(key, v)?,
            "smc_beta" => s.smc.beta = float(key, v)?,
            "smc_gamma" => s.smc.gamma = float(key, v)?,
            "smc_c1" => s.smc.c1 = float(key, v)?,
            "smc_c2" => s.smc.c2 = float(key, v)?,
            "smc_c3" => s.smc.c3 = float(key, v)?,
            "smc_alpha" => s.smc.alpha = float(key, v)?,
            "smc_constant" => {
                s.smc.constant = match v {
                    "corrected" => ControlConstant::Corrected,
                    "as_printed" => ControlConstant::AsPrinted,
                    _ => return Err(bad(key, v, "corrected or as_printed")),
                }
            }
            "sync_tol" => s.sync_tol = float(key, v)?,
            "sync_preamble" => s.sync_preamble = count(key, v)?,
            "sync_max_iter" => self.sync_max_iter = count(key, v)?,
            "bench_n_min" => self.bench_n_min = count(key, v)?,
            "bench_n_max" => self.bench_n_max = count(key, v)?,
            "bench_frames" => self.bench_frames = count(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sim.validate()?;
        if self.sim.snr_grid_db.is_empty() {
            return Err(bad("snr_grid_db", "", "must not be empty"));
        }
        if self.sync_max_iter == 0 {
            return Err(bad("sync_max_iter", "0", "must be at least 1"));
        }
        if self.symbol_rate.is_nan() || self.symbol_rate <= 0.0 {
            return Err(bad(
                "symbol_rate",
                &self.symbol_rate.to_string(),
                "must be > 0",
            ));
        }
        let [rx, ry, rz] = self.room_size;
        for (key, p) in [
            ("tx_position", self.sim.geometry.emitter_pos),
            ("rx_position", self.sim.geometry.receiver_pos),
        ] {
            let inside =
                p[0].abs() <= rx / 2.0 && p[1].abs() <= ry / 2.0 && (0.0..=rz).contains(&p[2]);
            if !inside {
                return Err(bad(key, &join(&p), "outside room_size"));
            }
        }
        if !(self.bench_n_min.is_power_of_two() && self.bench_n_max.is_power_of_two())
            || self.bench_n_min < 8
            || self.bench_n_min > self.bench_n_max
        {
            return Err(bad(
                "bench_n_min",
                &self.bench_n_min.to_string(),
                "need powers of two 8 <= min <= max",
            ));
        }
        if self.bench_frames == 0 {
            return Err(bad("bench_frames", "0", "zero-length payload"));
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> String {
        let s = &self.sim;
        match key {
            "scheme" => s.scheme.to_string(),
            "scrambler" => s.scrambler.to_string(),
            "role" => s.role.to_string(),
            "channel" => match s.channel {
                ChannelKind::Ideal => "ideal",
                ChannelKind::Physical => "physical",
                ChannelKind::SnrSweep => "sweep",
            }
            .to_string(),
            "snr_grid_db" => join(&s.snr_grid_db),
            "bits_per_point" => s.bits_per_point.to_string(),
            "rng_seed" => s.rng_seed.to_string(),
            "n_fft" => s.ofdm.n_fft.to_string(),
            "cp_len" => s.ofdm.cp_len.to_string(),
            "dc_bias_db" => format!("{:?}", s.ofdm.dc_bias_db),
            "data_symbols_per_frame" => s.data_symbols_per_frame.to_string(),
            "symbol_rate" => format!("{:?}", self.symbol_rate),
            "room_size" => join(&self.room_size),
            "tx_position" => join(&s.geometry.emitter_pos),
            "rx_position" => join(&s.geometry.receiver_pos),
            "tx_normal" => join(&s.geometry.emitter_normal),
            "rx_normal" => join(&s.geometry.receiver_normal),
            "led_power" => format!("{:?}", s.geometry.emitter_power),
            "active_area" => format!("{:?}", s.geometry.receiver_area),
            "fov_half_angle_deg" => format!("{:?}", s.geometry.fov_half_angle_deg),
            "semi_angle_deg" => format!("{:?}", self.semi_angle_deg),
            "filter_gain" => format!("{:?}", s.geometry.filter_gain),
            "responsivity" => format!("{:?}", s.noise.responsivity),
            "electron_charge" => format!("{:?}", s.noise.electron_charge),
            "background_power" => format!("{:?}", s.noise.background_power),
            "bandwidth" => format!("{:?}", s.noise.bandwidth),
            "boltzmann" => format!("{:?}", s.noise.boltzmann),
            "temperature" => format!("{:?}", s.noise.temperature),
            "feedback_resistance" => format!("{:?}", s.noise.feedback_resistance),
            "thermal_form" => match s.noise.thermal_form {
                ThermalForm::Standard => "standard",
                ThermalForm::AsPrinted => "as_printed",
            }
            .to_string(),
            "henon_a" => format!("{:?}", s.map.a),
            "henon_b" => format!("{:?}", s.map.b),
            "master_seed" => join(&s.master_seed.0),
            "slave_seed" => join(&s.slave_seed.0),
            "eavesdropper_seed" => join(&s.eavesdropper_seed.0),
            "smc_t" => format!("{:?}", s.smc.t),
            "smc_eps1" => format!("{:?}", s.smc.eps1),
            "smc_eps2" => format!("{:?}", s.smc.eps2),
            "smc_q" => format!("{:?}", s.smc.q),
            "smc_beta" => format!("{:?}", s.smc.beta),
            "smc_gamma" => format!("{:?}", s.smc.gamma),
            "smc_c1" => format!("{:?}", s.smc.c1),
            "smc_c2" => format!("{:?}", s.smc.c2),
            "smc_c3" => format!("{:?}", s.smc.c3),
            "smc_alpha" => format!("{:?}", s.smc.alpha),
            "smc_constant" => match s.smc.constant {
                ControlConstant::Corrected => "corrected",
                ControlConstant::AsPrinted => "as_printed",
            }
            .to_string(),
            "sync_tol" => format!("{:?}", s.sync_tol),
            "sync_preamble" => s.sync_preamble.to_string(),
            "sync_max_iter" => self.sync_max_iter.to_string(),
            "bench_n_min" => self.bench_n_min.to_string(),
            "bench_n_max" => self.bench_n_max.to_string(),
            "bench_frames" => self.bench_frames.to_string(),
            _ => unreachable!("unlisted key {key}"),
        }
    }

    /// Renders every key; conventional defaults are tagged `# assumed`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = write!(out, "{key} = {}", self.value_of(key));
            if ASSUMED.contains(key) {
                out.push_str("  # assumed");
            }
            out.push('\n');
        }
        out
    }
}
