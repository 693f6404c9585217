//! End-to-end transmit/receive chain.
//!
//! ```text
//! bits -> map -> scramble(master key) -> hermitian -> IFFT -> CP -> bias
//!      -> flat channel -> CP strip -> FFT -> LS estimate (pilot) -> equalize
//!      -> descramble(receiver key) -> demap
//! ```
//!
//! Each frame is one pilot OFDM symbol followed by
//! `data_symbols_per_frame` payload OFDM symbols. The map advances once per
//! constellation symbol, after a `sync_preamble` of iterations that both ends
//! run before the first payload symbol.
//!
//! The legitimate receiver advances a slave map under sliding-mode control,
//! observing the master state every step, and descrambles with the slave
//! state. The eavesdropper runs the same demodulator but descrambles with a
//! free-running map started from its own guess of the seed; it never sees the
//! master seed or the controller constants.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{Channel, ChannelGeometry, ChannelMode, NoiseParams};
use crate::henon::{HenonMap, HenonParams, HenonState};
use crate::mapping::{demap_symbols, map_bits, ModulationScheme};
use crate::metrics::{bit_errors, histogram, information_leakage, ks_two_sample, KsResult};
use crate::ofdm::{equalize, ls_channel_estimate, OfdmConfig, OfdmModem};
use crate::scrambler::{apply_in_place, ScrambleMode};
use crate::sync::{SmcParams, SyncSession};
use crate::{Complex64, Error, Result};

const PILOT_SEED: u64 = 0x9110_7000_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Legitimate,
    Eavesdropper,
}

impl Role {
    pub const BOTH: [Role; 2] = [Role::Legitimate, Role::Eavesdropper];

    pub fn name(self) -> &'static str {
        match self {
            Role::Legitimate => "legitimate",
            Role::Eavesdropper => "eavesdropper",
        }
    }
}

impl core::fmt::Display for Role {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which channel the link uses; the SNR itself is passed per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Ideal,
    Physical,
    SnrSweep,
}

/// Everything needed to simulate one link.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: ModulationScheme,
    pub scrambler: ScrambleMode,
    pub ofdm: OfdmConfig,
    pub data_symbols_per_frame: usize,
    pub channel: ChannelKind,
    pub geometry: ChannelGeometry,
    pub noise: NoiseParams,
    pub map: HenonParams,
    pub master_seed: HenonState,
    pub slave_seed: HenonState,
    /// The eavesdropper's (wrong) guess of the master seed.
    pub eavesdropper_seed: HenonState,
    pub smc: SmcParams,
    pub sync_tol: f64,
    /// Map iterations run by both ends before the payload.
    pub sync_preamble: usize,
    pub snr_grid_db: Vec<f64>,
    pub bits_per_point: usize,
    pub rng_seed: u64,
    pub role: Role,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: ModulationScheme::Qpsk,
            scrambler: ScrambleMode::Cascade,
            ofdm: OfdmConfig::default(),
            data_symbols_per_frame: 8,
            channel: ChannelKind::SnrSweep,
            geometry: ChannelGeometry::default(),
            noise: NoiseParams::default(),
            map: HenonParams::default(),
            master_seed: HenonState::MASTER_SEED,
            slave_seed: HenonState::SLAVE_SEED,
            eavesdropper_seed: HenonState::SLAVE_SEED,
            smc: SmcParams::default(),
            sync_tol: 1e-6,
            sync_preamble: 500,
            snr_grid_db: (0..=6).map(|i| 5.0 * i as f64).collect(),
            bits_per_point: 1_000_000,
            rng_seed: 1,
            role: Role::Legitimate,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.smc.validate()?;
        self.geometry.validate()?;
        if self.data_symbols_per_frame == 0 {
            return Err(Error::invalid(
                "data_symbols_per_frame",
                "must be at least 1",
            ));
        }
        if self.bits_per_point == 0 {
            return Err(Error::invalid("bits_per_point", "must be at least 1"));
        }
        if self.sync_preamble == 0 {
            return Err(Error::invalid("sync_preamble", "must be at least 1"));
        }
        if !(self.sync_tol >= 0.0) {
            return Err(Error::invalid("sync_tol", "must be >= 0"));
        }
        if self.channel == ChannelKind::Physical {
            self.noise.validate()?;
        }
        Ok(())
    }

    /// Constellation symbols per OFDM symbol.
    pub fn symbols_per_ofdm_symbol(&self) -> usize {
        self.ofdm.n_data()
    }

    pub fn bits_per_frame(&self) -> usize {
        self.data_symbols_per_frame * self.ofdm.n_data() * self.scheme.bits_per_symbol()
    }

    /// Frames needed to carry `bits` payload bits.
    pub fn frames_for(&self, bits: usize) -> usize {
        bits.div_ceil(self.bits_per_frame())
    }

    fn channel_for(&self, snr_db: f64) -> Result<Channel> {
        let mode = match self.channel {
            ChannelKind::Ideal => ChannelMode::Ideal,
            ChannelKind::Physical => ChannelMode::Physical,
            ChannelKind::SnrSweep => ChannelMode::SnrSweep { snr_db },
        };
        Channel::new(mode, &self.geometry, &self.noise)
    }
}

/// Mixes a root seed with a job index (splitmix64 finalizer).
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random payload bits.
pub fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

/// Known unit-energy QPSK pilot occupying every data subcarrier.
pub fn pilot_symbols(n_data: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(PILOT_SEED);
    let s = core::f64::consts::FRAC_1_SQRT_2;
    (0..n_data)
        .map(|_| {
            let re = if rng.random::<bool>() { s } else { -s };
            let im = if rng.random::<bool>() { s } else { -s };
            Complex64::new(re, im)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncSummary {
    pub converged: bool,
    pub iterations_to_converge: usize,
    pub final_error_norm: f64,
    /// Largest error seen during the payload.
    pub max_payload_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub role: Role,
    pub scheme: ModulationScheme,
    pub scrambler: ScrambleMode,
    /// Requested SNR, or for the physical channel the nominal electrical SNR.
    pub snr_db: f64,
    pub bits: usize,
    pub bit_errors: usize,
    pub ber: f64,
    pub leakage: f64,
    pub frames: usize,
    pub seed: u64,
    /// Present for the legitimate role only.
    pub sync: Option<SyncSummary>,
    pub clipped_samples: usize,
}

impl LinkReport {
    /// Binomial standard error of the BER estimate.
    pub fn ber_std_error(&self) -> f64 {
        let p = self.ber;
        libm::sqrt(p * (1.0 - p) / self.bits as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub recovered: Vec<u8>,
    pub report: LinkReport,
}

enum ReceiverKey {
    Synchronized(SyncSession),
    FreeRunning(HenonMap),
}

impl ReceiverKey {
    fn next(&mut self) -> Result<(HenonState, f64)> {
        match self {
            ReceiverKey::Synchronized(s) => {
                s.step()?;
                Ok((s.slave(), s.error().norm_inf()))
            }
            ReceiverKey::FreeRunning(m) => Ok((m.advance(0.0)?, 0.0)),
        }
    }
}

/// Sends `payload` over the configured link and returns what `role` recovers.
///
/// The payload is padded with random bits up to a whole number of frames; the
/// padding is not counted in the BER.
pub fn transmit(
    cfg: &SimConfig,
    role: Role,
    snr_db: f64,
    payload: &[u8],
    seed: u64,
) -> Result<Transmission> {
    cfg.validate()?;
    if payload.is_empty() {
        return Err(Error::EmptyInput);
    }
    let modem = OfdmModem::new(cfg.ofdm)?;
    let channel = cfg.channel_for(snr_db)?;
    let n_data = cfg.ofdm.n_data();
    let bps = cfg.scheme.bits_per_symbol();
    let bits_per_ofdm = n_data * bps;
    let frames = cfg.frames_for(payload.len());
    let total_bits = frames * cfg.bits_per_frame();

    let mut padded = Vec::with_capacity(total_bits);
    padded.extend_from_slice(payload);
    padded.extend(random_bits(
        total_bits - payload.len(),
        derive_seed(seed, u64::MAX),
    ));

    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(1);

    // Transmitter key: the free-running master map.
    let mut tx_map = HenonMap::new(cfg.master_seed, cfg.map);
    tx_map.skip(cfg.sync_preamble)?;

    let (mut rx_key, sync_summary) = match role {
        Role::Legitimate => {
            let mut session = SyncSession::new(cfg.master_seed, cfg.slave_seed, cfg.map, cfg.smc)?;
            let report = session.run_until_converged(cfg.sync_tol, cfg.sync_preamble)?;
            while session.iteration() < cfg.sync_preamble {
                session.step()?;
            }
            let summary = SyncSummary {
                converged: report.converged,
                iterations_to_converge: report.iterations_to_converge,
                final_error_norm: session.error().norm_inf(),
                max_payload_error: 0.0,
            };
            (ReceiverKey::Synchronized(session), Some(summary))
        }
        Role::Eavesdropper => {
            let mut map = HenonMap::new(cfg.eavesdropper_seed, cfg.map);
            map.skip(cfg.sync_preamble)?;
            (ReceiverKey::FreeRunning(map), None)
        }
    };
    let mut max_payload_error: f64 = 0.0;

    let pilot = pilot_symbols(n_data);
    let pilot_signal = modem.modulate(&pilot)?;
    // Physical mode drives the LED so that the bias level equals its nominal power.
    let optical_scale = match cfg.channel {
        ChannelKind::Physical => cfg.geometry.emitter_power / pilot_signal.dc_bias,
        _ => 1.0,
    };
    let rx_bias = pilot_signal.dc_bias * optical_scale * channel.gain;
    let sym_len = cfg.ofdm.symbol_len();

    let mut recovered = Vec::with_capacity(total_bits);
    let mut clipped = 0;
    let mut tx_key = Vec::with_capacity(n_data);
    let mut rx_key_buf = Vec::with_capacity(n_data);
    let mut frame_samples = Vec::with_capacity((1 + cfg.data_symbols_per_frame) * sym_len);

    for frame in padded.chunks_exact(cfg.bits_per_frame()) {
        frame_samples.clear();
        frame_samples.extend_from_slice(&pilot_signal.samples);
        clipped += pilot_signal.clipped;
        for chunk in frame.chunks_exact(bits_per_ofdm) {
            let mut symbols = map_bits(chunk, cfg.scheme)?;
            tx_key.clear();
            for _ in 0..n_data {
                tx_key.push(tx_map.advance(0.0)?);
            }
            apply_in_place(&mut symbols, &tx_key, cfg.scrambler)?;
            let sig = modem.modulate(&symbols)?;
            clipped += sig.clipped;
            frame_samples.extend_from_slice(&sig.samples);
        }
        if optical_scale != 1.0 {
            frame_samples.iter_mut().for_each(|s| *s *= optical_scale);
        }

        let received = channel.apply(&frame_samples, &mut noise_rng);

        let mut ofdm_symbols = received.chunks_exact(sym_len);
        let rx_pilot = modem.demodulate(ofdm_symbols.next().expect("pilot"), rx_bias)?;
        let estimate = ls_channel_estimate(&rx_pilot, &pilot)?;
        for samples in ofdm_symbols {
            let mut symbols = equalize(&modem.demodulate(samples, rx_bias)?, &estimate)?;
            rx_key_buf.clear();
            for _ in 0..n_data {
                let (state, err) = rx_key.next()?;
                max_payload_error = max_payload_error.max(err);
                rx_key_buf.push(state);
            }
            apply_in_place(&mut symbols, &rx_key_buf, cfg.scrambler)?;
            recovered.extend(demap_symbols(&symbols, cfg.scheme));
        }
    }

    // Physical mode has no target SNR; report the electrical SNR it implies.
    let snr_db = match cfg.channel {
        ChannelKind::Physical => {
            let ac_rms = cfg.geometry.emitter_power / libm::pow(10.0, cfg.ofdm.dc_bias_db / 20.0);
            20.0 * libm::log10(channel.gain * ac_rms / channel.noise_std)
        }
        _ => snr_db,
    };
    recovered.truncate(payload.len());
    let errors = bit_errors(payload, &recovered)?;
    let ber = errors as f64 / payload.len() as f64;
    let report = LinkReport {
        role,
        scheme: cfg.scheme,
        scrambler: cfg.scrambler,
        snr_db,
        bits: payload.len(),
        bit_errors: errors,
        ber,
        leakage: information_leakage(ber)?,
        frames,
        seed,
        sync: sync_summary.map(|s| SyncSummary {
            max_payload_error,
            ..s
        }),
        clipped_samples: clipped,
    };
    Ok(Transmission { recovered, report })
}

/// Simulates `cfg.bits_per_point` random bits, rounded up to whole frames,
/// for `cfg.role` at one SNR.
pub fn run_link_once(cfg: &SimConfig, snr_db: f64) -> Result<LinkReport> {
    run_link_with(cfg, cfg.role, snr_db, cfg.rng_seed)
}

/// [`run_link_once`] with an explicit role and seed.
pub fn run_link_with(cfg: &SimConfig, role: Role, snr_db: f64, seed: u64) -> Result<LinkReport> {
    cfg.validate()?;
    let bits = random_bits(
        cfg.frames_for(cfg.bits_per_point) * cfg.bits_per_frame(),
        seed,
    );
    Ok(transmit(cfg, role, snr_db, &bits, seed)?.report)
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub scheme: ModulationScheme,
    pub scrambler_mode: ScrambleMode,
    pub role: Role,
    pub ber: f64,
    pub leakage: f64,
    pub frames: usize,
    pub seed: u64,
}

impl From<&LinkReport> for SweepRecord {
    fn from(r: &LinkReport) -> Self {
        SweepRecord {
            snr_db: r.snr_db,
            scheme: r.scheme,
            scrambler_mode: r.scrambler,
            role: r.role,
            ber: r.ber,
            leakage: r.leakage,
            frames: r.frames,
            seed: r.seed,
        }
    }
}

/// Seed of grid point `index`; both roles at one point share it, so they see
/// the same payload and the same noise.
pub fn point_seed(cfg: &SimConfig, index: usize) -> u64 {
    derive_seed(cfg.rng_seed, index as u64)
}

/// 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput);
        }
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// MSB-first bit serialization.
    pub fn to_bits(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|&p| (0..8).rev().map(move |i| (p >> i) & 1))
            .collect()
    }

    pub fn from_bits(width: usize, height: usize, bits: &[u8]) -> Result<Self> {
        let pixels = bits
            .chunks_exact(8)
            .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn histogram(&self) -> Vec<u64> {
        let samples: Vec<f64> = self.pixels.iter().map(|&p| f64::from(p)).collect();
        histogram(&samples, 256, 0.0, 256.0).expect("non-empty image")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageTransmission {
    pub recovered: GrayImage,
    pub report: LinkReport,
    pub original_histogram: Vec<u64>,
    pub recovered_histogram: Vec<u64>,
    pub ks: KsResult,
}

/// Sends an image for `cfg.role` at `snr_db` and compares pixel distributions.
pub fn transmit_image(
    image: &GrayImage,
    cfg: &SimConfig,
    snr_db: f64,
) -> Result<ImageTransmission> {
    let tx = transmit(cfg, cfg.role, snr_db, &image.to_bits(), cfg.rng_seed)?;
    let recovered = GrayImage::from_bits(image.width, image.height, &tx.recovered)?;
    let a: Vec<f64> = image.pixels.iter().map(|&p| f64::from(p)).collect();
    let b: Vec<f64> = recovered.pixels.iter().map(|&p| f64::from(p)).collect();
    Ok(ImageTransmission {
        original_histogram: image.histogram(),
        recovered_histogram: recovered.histogram(),
        ks: ks_two_sample(&a, &b)?,
        recovered,
        report: tx.report,
    })
}
