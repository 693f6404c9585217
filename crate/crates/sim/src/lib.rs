//! Sweeps, demos and benchmarks on top of `hcvlc-core`, plus the config,
//! CSV and PGM formats used by the `hcvlc` binary.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use hcvlc_core::henon::HenonMap;
use hcvlc_core::link::{
    self, point_seed, random_bits, GrayImage, ImageTransmission, Role, SweepRecord,
};
use hcvlc_core::mapping::{demap_symbols, map_bits};
use hcvlc_core::ofdm::{OfdmConfig, OfdmModem};
use hcvlc_core::scrambler::{apply_in_place, DimensionPair, ScrambleMode};
use hcvlc_core::sync::SyncSession;

pub mod config;
pub mod io;

pub use config::{Config, ConfigError};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] hcvlc_core::Error),
    #[error(
        "synchronization failed at {snr_db} dB: error {error:e} after {iterations} iterations"
    )]
    SyncFailed {
        snr_db: f64,
        iterations: usize,
        error: f64,
    },
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

fn check_sync(report: &link::LinkReport, tol: f64) -> Result<()> {
    if let Some(s) = report.sync {
        if !s.converged || s.max_payload_error > tol {
            return Err(SimError::SyncFailed {
                snr_db: report.snr_db,
                iterations: s.iterations_to_converge,
                error: s.final_error_norm.max(s.max_payload_error),
            });
        }
    }
    Ok(())
}

/// Runs both roles at every grid SNR. Rows come back in grid order with the
/// legitimate row first at each point, whatever order the jobs finish in.
pub fn run_ber_sweep(cfg: &Config) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let sim = &cfg.sim;
    let jobs: Vec<(usize, f64, Role)> = sim
        .snr_grid_db
        .iter()
        .enumerate()
        .flat_map(|(i, &snr)| Role::BOTH.into_iter().map(move |r| (i, snr, r)))
        .collect();
    jobs.par_iter()
        .map(|&(i, snr, role)| {
            let report = link::run_link_with(sim, role, snr, point_seed(sim, i))?;
            check_sync(&report, sim.sync_tol)?;
            Ok(SweepRecord::from(&report))
        })
        .collect()
}

/// Same points as [`run_ber_sweep`]; the leakage column is what matters here.
pub fn run_leakage_sweep(cfg: &Config) -> Result<Vec<SweepRecord>> {
    run_ber_sweep(cfg)
}

/// Sends an image for `cfg.sim.role` at the first grid SNR.
pub fn send_image(cfg: &Config, image: &GrayImage) -> Result<ImageTransmission> {
    cfg.validate()?;
    let snr = cfg.sim.snr_grid_db[0];
    let out = link::transmit_image(image, &cfg.sim, snr)?;
    check_sync(&out.report, cfg.sim.sync_tol)?;
    Ok(out)
}

pub fn histogram_csv(t: &ImageTransmission) -> String {
    let mut s = String::from("value,original,recovered\n");
    for (v, (a, b)) in t
        .original_histogram
        .iter()
        .zip(&t.recovered_histogram)
        .enumerate()
    {
        let _ = writeln!(s, "{v},{a},{b}");
    }
    s
}

pub fn image_stats_csv(t: &ImageTransmission) -> String {
    let r = &t.report;
    format!(
        "role,scheme,scrambler_mode,snr_db,ber,ks_statistic,ks_p_value,seed\n{},{},{},{:?},{:?},{:?},{:?},{}\n",
        r.role, r.scheme, r.scrambler, r.snr_db, r.ber, t.ks.statistic, t.ks.p_value, r.seed
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncDemo {
    /// `(k, e(k), u(k))`; `u` is `None` on the final row.
    pub rows: Vec<(usize, [f64; 4], Option<f64>)>,
    pub first_converged: Option<usize>,
    /// Largest error after `first_converged`.
    pub max_error_after: f64,
}

impl SyncDemo {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,e1,e2,e3,e4,norm_inf,u\n");
        for (k, e, u) in &self.rows {
            let norm = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let _ = write!(
                s,
                "{k},{:?},{:?},{:?},{:?},{norm:?},",
                e[0], e[1], e[2], e[3]
            );
            if let Some(u) = u {
                let _ = write!(s, "{u:?}");
            }
            s.push('\n');
        }
        s
    }

    pub fn held(&self, tol: f64) -> bool {
        self.first_converged.is_some() && self.max_error_after <= tol
    }
}

/// Runs `sync_max_iter` coupled steps from the configured seeds.
pub fn sync_demo(cfg: &Config) -> Result<SyncDemo> {
    cfg.validate()?;
    let s = &cfg.sim;
    let mut session = SyncSession::new(s.master_seed, s.slave_seed, s.map, s.smc)?;
    let mut rows = Vec::with_capacity(cfg.sync_max_iter + 1);
    let mut first = None;
    let mut max_after: f64 = 0.0;
    for k in 0..=cfg.sync_max_iter {
        let e = session.error();
        let norm = e.norm_inf();
        if first.is_none() && norm <= s.sync_tol {
            first = Some(k);
        }
        if first.is_some() {
            max_after = max_after.max(norm);
        }
        let u = if k < cfg.sync_max_iter {
            Some(session.step()?.control)
        } else {
            None
        };
        rows.push((k, e.0, u));
    }
    Ok(SyncDemo {
        rows,
        first_converged: first,
        max_error_after: max_after,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n_fft: usize,
    pub mode: ScrambleMode,
    pub frames: usize,
    /// Whole chain, one OFDM symbol per frame.
    pub seconds_per_frame: f64,
    /// One scrambling pass only.
    pub scramble_seconds_per_frame: f64,
}

pub const BENCH_HEADER: &str =
    "n_fft,scrambler_mode,frames,seconds_per_frame,scramble_seconds_per_frame";

/// Times the noiseless chain for one FFT size and scrambler mode.
pub fn bench_point(
    base: &Config,
    n_fft: usize,
    mode: ScrambleMode,
    frames: usize,
) -> Result<BenchRow> {
    if frames == 0 {
        return Err(config::ConfigError::BadValue {
            key: "bench_frames".into(),
            value: "0".into(),
            reason: "zero-length payload",
        }
        .into());
    }
    let s = &base.sim;
    let ofdm = OfdmConfig::new(
        n_fft,
        base.sim.ofdm.cp_len.min(n_fft / 4),
        s.ofdm.dc_bias_db,
    )?;
    let modem = OfdmModem::new(ofdm)?;
    let n_data = ofdm.n_data();
    let bits = random_bits(frames * n_data * s.scheme.bits_per_symbol(), s.rng_seed);
    let mut map = HenonMap::new(s.master_seed, s.map);
    let keys: Vec<_> = (0..frames * n_data)
        .map(|_| map.advance(0.0))
        .collect::<hcvlc_core::Result<_>>()?;
    let frame_bits = n_data * s.scheme.bits_per_symbol();

    let start = Instant::now();
    let mut errors = 0usize;
    for (f, chunk) in bits.chunks_exact(frame_bits).enumerate() {
        let key = &keys[f * n_data..(f + 1) * n_data];
        let mut symbols = map_bits(chunk, s.scheme)?;
        apply_in_place(&mut symbols, key, mode)?;
        let signal = modem.modulate(&symbols)?;
        let mut rx = modem.demodulate(&signal.samples, signal.dc_bias)?;
        apply_in_place(&mut rx, key, mode)?;
        let out = demap_symbols(&rx, s.scheme);
        errors += out.iter().zip(chunk).filter(|(a, b)| a != b).count();
    }
    let total = start.elapsed().as_secs_f64();
    debug_assert_eq!(errors, 0);

    // Scrambling alone, timed over all frames at once so the clock's own
    // cost does not swamp small blocks.
    let mut blocks: Vec<_> = bits
        .chunks_exact(frame_bits)
        .map(|c| map_bits(c, s.scheme))
        .collect::<hcvlc_core::Result<_>>()?;
    let start = Instant::now();
    for (f, block) in blocks.iter_mut().enumerate() {
        apply_in_place(block, &keys[f * n_data..(f + 1) * n_data], mode)?;
    }
    let scramble_time = start.elapsed().as_secs_f64();
    std::hint::black_box(&blocks);

    Ok(BenchRow {
        n_fft,
        mode,
        frames,
        seconds_per_frame: total / frames as f64,
        scramble_seconds_per_frame: scramble_time / frames as f64,
    })
}

/// Single-stage and cascade timings for every power of two in the bench range.
pub fn bench_scaling(cfg: &Config) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut n = cfg.bench_n_min;
    while n <= cfg.bench_n_max {
        for mode in [
            ScrambleMode::Single(DimensionPair::default()),
            ScrambleMode::Cascade,
        ] {
            rows.push(bench_point(cfg, n, mode, cfg.bench_frames)?);
        }
        n *= 2;
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e}",
            r.n_fft, r.mode, r.frames, r.seconds_per_frame, r.scramble_seconds_per_frame
        );
    }
    s
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        assert!((fit_slope(&x, &y) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn bench_rejects_empty_payload() {
        let cfg = Config::default();
        assert!(bench_point(&cfg, 64, ScrambleMode::Cascade, 0).is_err());
    }

    #[test]
    fn sync_demo_converges_with_reference_values() {
        let mut cfg = Config::default();
        cfg.sync_max_iter = 200;
        let demo = sync_demo(&cfg).unwrap();
        assert!(demo.held(1e-6));
        assert_eq!(demo.rows.len(), 201);
        assert!(demo.rows.last().unwrap().2.is_none());
        assert!(demo.to_csv().starts_with("k,e1,e2,e3,e4,norm_inf,u\n0,"));
    }
}
