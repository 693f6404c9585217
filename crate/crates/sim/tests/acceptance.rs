//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p hcvlc-sim --test acceptance` (release-grade
//! optimization comes from the workspace test profile).

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hcvlc_core::channel::{los_gain, ChannelGeometry};
use hcvlc_core::henon::{henon_step, HenonMap, HenonParams, HenonState};
use hcvlc_core::link::{run_link_with, transmit_image, ChannelKind, GrayImage, Role, SweepRecord};
use hcvlc_core::mapping::ModulationScheme;
use hcvlc_core::ofdm::{hermitian_extend, OfdmConfig, OfdmModem};
use hcvlc_core::scrambler::{cascade_scramble, descramble, DimensionPair, ScrambleMode};
use hcvlc_core::sync::{sync_error, synchronize_step, SmcParams, SyncSession};
use hcvlc_core::Complex64;
use hcvlc_sim::{bench_point, fit_slope, run_ber_sweep, Config};

type Outcome = Result<String, String>;

const MAP: HenonParams = HenonParams::HYPERCHAOTIC;
const PSK: [ModulationScheme; 3] = [
    ModulationScheme::Bpsk,
    ModulationScheme::Qpsk,
    ModulationScheme::Psk8,
];
const SINGLE: ScrambleMode = ScrambleMode::Single(DimensionPair::CASCADE[0]);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sync_convergence() -> Outcome {
    let start = Instant::now();
    let tol = 1e-6;
    let mut session = SyncSession::new(
        HenonState::MASTER_SEED,
        HenonState::SLAVE_SEED,
        MAP,
        SmcParams::REFERENCE,
    )
    .map_err(|e| e.to_string())?;
    let report = session
        .run_until_converged(tol, 500)
        .map_err(|e| e.to_string())?;
    if !report.converged {
        return Err(format!(
            "not converged after 500 iterations, error {:e}",
            report.final_error_norm
        ));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        session.step().map_err(|e| e.to_string())?;
        worst = worst.max(session.error().norm_inf());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= tol && secs < 1.0,
        format!(
            "converged at k={}, max error over next 10^4 steps {worst:.2e}, {secs:.3}s",
            report.iterations_to_converge
        ),
    )
}

fn error_dynamics() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut state = || HenonState(std::array::from_fn(|_| rng.random_range(-1.5..1.5)));
    let smc = SmcParams::REFERENCE;
    let alpha = smc.alpha;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (state(), state());
        let step = synchronize_step(&x, &y, &MAP, &smc).map_err(|e| e.to_string())?;
        let e = sync_error(&y, &x, alpha);
        let x_next = henon_step(&x, &MAP, 0.0).map_err(|e| e.to_string())?;
        let got = sync_error(&step.slave, &x_next, alpha);
        let want = [
            (1.0 - alpha) * MAP.a + alpha * x.x3() * x.x3() - y.x3() * y.x3() - MAP.b * e.0[3]
                + step.control,
            e.0[0],
            e.0[1],
            e.0[2],
        ];
        for i in 0..4 {
            worst = worst.max((got.0[i] - want[i]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 1e-12 && secs < 1.0,
        format!("max deviation {worst:.2e} over 1000 pairs, {secs:.3}s"),
    )
}

fn scramble_round_trip() -> Outcome {
    let start = Instant::now();
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let symbols: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();

    let mut session = SyncSession::new(
        HenonState::MASTER_SEED,
        HenonState::SLAVE_SEED,
        MAP,
        SmcParams::REFERENCE,
    )
    .map_err(|e| e.to_string())?;
    session
        .run_until_converged(1e-6, 500)
        .map_err(|e| e.to_string())?;
    let mut tx_map = HenonMap::new(HenonState::MASTER_SEED, MAP);
    tx_map
        .skip(session.iteration())
        .map_err(|e| e.to_string())?;
    let mut master = Vec::with_capacity(n);
    let mut slave = Vec::with_capacity(n);
    for _ in 0..n {
        master.push(tx_map.advance(0.0).map_err(|e| e.to_string())?);
        session.step().map_err(|e| e.to_string())?;
        slave.push(session.slave());
    }

    let tx = cascade_scramble(&symbols, &master).map_err(|e| e.to_string())?;
    let bits = |v: &[Complex64]| {
        v.iter()
            .map(|z| (z.re.to_bits(), z.im.to_bits()))
            .collect::<Vec<_>>()
    };
    let reference = bits(&symbols);
    for c in [0.8, 1.0, 3.7] {
        let key: Vec<HenonState> = slave.iter().map(|s| c * *s).collect();
        let rx = descramble(&tx, &key, ScrambleMode::Cascade).map_err(|e| e.to_string())?;
        if bits(&rx) != reference {
            let bad = rx.iter().zip(&symbols).filter(|(a, b)| a != b).count();
            return Err(format!("{bad} of {n} symbols differ with key scale {c}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        secs < 5.0,
        format!("10^5 symbols exact for scales 0.8, 1, 3.7, {secs:.3}s"),
    )
}

fn sweep_config(scheme: ModulationScheme, scrambler: ScrambleMode, bits: usize) -> Config {
    let mut cfg = Config::default();
    cfg.sim.scheme = scheme;
    cfg.sim.scrambler = scrambler;
    cfg.sim.channel = ChannelKind::SnrSweep;
    cfg.sim.bits_per_point = bits;
    cfg.sim.snr_grid_db = (0..=6).map(|i| 5.0 * i as f64).collect();
    cfg
}

fn legitimate_ber() -> Outcome {
    let cfg = sweep_config(ModulationScheme::Psk8, ScrambleMode::Cascade, 10_000_000);
    let r = run_link_with(&cfg.sim, Role::Legitimate, 25.0, cfg.sim.rng_seed)
        .map_err(|e| e.to_string())?;
    let sync = r.sync.ok_or("no sync report")?;
    ensure(
        sync.converged && r.bits >= 10_000_000 && r.ber <= 1e-5,
        format!(
            "8psk cascade 25 dB: {} errors in {} bits, BER {:.2e}",
            r.bit_errors, r.bits, r.ber
        ),
    )
}

/// Cascade and single-stage sweeps for the three PSK schemes.
struct Sweeps {
    cascade: Vec<(ModulationScheme, Vec<SweepRecord>)>,
    single: Vec<(ModulationScheme, Vec<SweepRecord>)>,
    bits: Vec<usize>,
}

fn run_sweeps() -> Result<Sweeps, String> {
    let mut out = Sweeps {
        cascade: Vec::new(),
        single: Vec::new(),
        bits: Vec::new(),
    };
    for scheme in PSK {
        let cfg = sweep_config(scheme, ScrambleMode::Cascade, 1_000_000);
        out.bits
            .push(cfg.sim.frames_for(cfg.sim.bits_per_point) * cfg.sim.bits_per_frame());
        out.cascade
            .push((scheme, run_ber_sweep(&cfg).map_err(|e| e.to_string())?));
        let cfg = sweep_config(scheme, SINGLE, 1_000_000);
        out.single
            .push((scheme, run_ber_sweep(&cfg).map_err(|e| e.to_string())?));
    }
    Ok(out)
}

fn eavesdropper_ber(s: &Sweeps) -> Outcome {
    let mut lo: f64 = 1.0;
    let mut hi: f64 = 0.0;
    let mut bad = Vec::new();
    for (scheme, rows) in &s.cascade {
        for r in rows.iter().filter(|r| r.role == Role::Eavesdropper) {
            lo = lo.min(r.ber);
            hi = hi.max(r.ber);
            if !(0.45..=0.55).contains(&r.ber) {
                bad.push(format!("{scheme}@{}dB={:.4}", r.snr_db, r.ber));
            }
        }
    }
    ensure(
        bad.is_empty(),
        format!(
            "cascade, 21 points, 10^6 bits each: BER in [{lo:.4}, {hi:.4}] {}",
            bad.join(" ")
        ),
    )
}

fn leakage_bounds(s: &Sweeps) -> Outcome {
    let mut eve_max: f64 = 0.0;
    let mut legit_min: f64 = 1.0;
    for (_, rows) in &s.cascade {
        for r in rows {
            match r.role {
                Role::Eavesdropper => eve_max = eve_max.max(r.leakage),
                Role::Legitimate if r.snr_db >= 25.0 => legit_min = legit_min.min(r.leakage),
                Role::Legitimate => {}
            }
        }
    }
    ensure(
        eve_max <= 0.1 && legit_min >= 0.999,
        format!("eavesdropper max {eve_max:.2e}, legitimate min at >= 25 dB {legit_min:.6}"),
    )
}

fn test_image() -> GrayImage {
    let (w, h) = (128usize, 128usize);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64 - 64.0, (i / w) as f64 - 64.0);
            let r2 = x * x + y * y;
            (30.0 + 180.0 * (-r2 / 1800.0).exp() + 0.25 * x).clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(w, h, pixels).expect("valid image")
}

fn image_ks() -> Outcome {
    let img = test_image();
    let mut cfg = sweep_config(ModulationScheme::Qpsk, ScrambleMode::Cascade, 1);
    let legit = transmit_image(&img, &cfg.sim, 25.0).map_err(|e| e.to_string())?;
    cfg.sim.role = Role::Eavesdropper;
    let eve = transmit_image(&img, &cfg.sim, 25.0).map_err(|e| e.to_string())?;
    ensure(
        legit.ks.p_value >= 0.99 && eve.ks.p_value < 1e-10,
        format!(
            "128x128 image: legitimate p={:.4} (BER {:.1e}), eavesdropper p={:.2e} (BER {:.3})",
            legit.ks.p_value, legit.report.ber, eve.ks.p_value, eve.report.ber
        ),
    )
}

fn los_gain_check() -> Outcome {
    let geom = ChannelGeometry::default();
    let h = los_gain(&geom).map_err(|e| e.to_string())?;
    let rel = (h / 6.20e-7 - 1.0).abs();
    let (_, cos_psi) = geom.angle_cosines().map_err(|e| e.to_string())?;
    let psi = cos_psi.acos().to_degrees();
    let just_in = los_gain(&ChannelGeometry {
        fov_half_angle_deg: psi + 1e-9,
        ..geom
    })
    .map_err(|e| e.to_string())?;
    let just_out = los_gain(&ChannelGeometry {
        fov_half_angle_deg: psi - 1e-9,
        ..geom
    })
    .map_err(|e| e.to_string())?;
    ensure(
        rel <= 0.01 && just_out == 0.0 && just_in > 0.0,
        format!(
            "H={h:.4e} ({:.2}% off), incidence {psi:.3} deg, cutoff exact",
            rel * 100.0
        ),
    )
}

fn ofdm_identities() -> Outcome {
    let cfg = OfdmConfig::default();
    let modem = OfdmModem::new(cfg).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let block: Vec<Complex64> = (0..cfg.n_data())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let t = modem
            .time_domain(&hermitian_extend(&block, &cfg).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let peak = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(t.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / peak);
    }
    let mut errors = 0;
    for scheme in ModulationScheme::ALL {
        for mode in [SINGLE, ScrambleMode::Cascade] {
            let mut c = sweep_config(scheme, mode, 100_000);
            c.sim.channel = ChannelKind::Ideal;
            errors += run_link_with(&c.sim, Role::Legitimate, 0.0, 5)
                .map_err(|e| e.to_string())?
                .bit_errors;
        }
    }
    ensure(
        worst < 1e-12 && errors == 0,
        format!("max relative imaginary part {worst:.1e}; loopback errors {errors} over 4 schemes x 2 modes"),
    )
}

fn cascade_vs_single(s: &Sweeps) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for (((scheme, c_rows), (_, s_rows)), &n) in s.cascade.iter().zip(&s.single).zip(&s.bits) {
        for (c, si) in c_rows.iter().zip(s_rows) {
            let n = n as f64;
            let sigma = (c.ber * (1.0 - c.ber) / n + si.ber * (1.0 - si.ber) / n).sqrt();
            let margin = if sigma > 0.0 {
                (c.ber - si.ber) / sigma
            } else {
                f64::INFINITY
            };
            worst = worst.min(margin);
            if margin < -2.0 {
                bad.push(format!(
                    "{scheme}/{}@{}dB {:.3e}<{:.3e}",
                    c.role, c.snr_db, c.ber, si.ber
                ));
            }
        }
    }
    ensure(
        bad.is_empty(),
        format!(
            "42 points, worst (cascade - single)/sigma = {worst:.2} {}",
            bad.join(" ")
        ),
    )
}

fn complexity_trend() -> Outcome {
    let cfg = Config::default();
    let sizes: Vec<usize> = (6..=12).map(|k| 1 << k).collect();
    // Best of several repeats, interleaved across sizes so that a burst of
    // background load does not land on a single point.
    let modes = [SINGLE, ScrambleMode::Cascade];
    let mut best = vec![[(f64::INFINITY, f64::INFINITY); 2]; sizes.len()];
    for _ in 0..11 {
        for (i, &n) in sizes.iter().enumerate() {
            for (m, &mode) in modes.iter().enumerate() {
                let row = bench_point(&cfg, n, mode, (1 << 19) / n).map_err(|e| e.to_string())?;
                let b = &mut best[i][m];
                *b = (
                    b.0.min(row.seconds_per_frame),
                    b.1.min(row.scramble_seconds_per_frame),
                );
            }
        }
    }
    let frame: Vec<f64> = best.iter().map(|[s, c]| s.0.max(c.0)).collect();
    let overhead: Vec<f64> = best.iter().map(|[s, c]| c.1 - s.1).collect();
    let x: Vec<f64> = sizes
        .iter()
        .map(|&n| (n as f64 * (n as f64).log2()).ln())
        .collect();
    let y: Vec<f64> = frame.iter().map(|t| t.ln()).collect();
    let slope = fit_slope(&x, &y);
    let max_doubling = frame.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    if overhead.iter().any(|&o| o <= 0.0) {
        return Err(format!("cascade not slower than single: {overhead:?}"));
    }
    let xn: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let yo: Vec<f64> = overhead.iter().map(|t| t.ln()).collect();
    let overhead_slope = fit_slope(&xn, &yo);
    let within = |s: f64| (1.0 / 1.5..=1.5).contains(&s);
    ensure(
        within(slope) && within(overhead_slope) && max_doubling <= 2.5,
        format!(
            "slope vs N log N {slope:.3}, max doubling ratio {max_doubling:.2}, overhead slope vs N {overhead_slope:.3}; per-frame us {:?}",
            frame.iter().map(|t| (t * 1e7).round() / 10.0).collect::<Vec<_>>()
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hcvlc"))
        .current_dir(dir)
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("hcvlc {} exited with {status}", args.join(" ")))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    std::fs::write(
        d.join("run.cfg"),
        "scheme = 8psk\nscrambler = cascade\nbits_per_point = 50000\nsnr_grid_db = 0, 10, 20\n",
    )
    .map_err(|e| e.to_string())?;
    std::fs::write(d.join("in.pgm"), hcvlc_sim::io::encode_pgm(&test_image()))
        .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let tag = |name: &str| format!("{name}.{run}");
        let ber = tag("ber.csv");
        let leak = tag("leak.csv");
        let img = tag("out.pgm");
        let hist = tag("hist.csv");
        let stats = tag("stats.csv");
        let sync = tag("sync.csv");
        let eve = tag("eve.pgm");
        let eve_stats = tag("eve_stats.csv");
        let common = ["--config", "run.cfg", "--seed", "42"];
        let jobs: [Vec<&str>; 5] = [
            vec!["sweep-ber", "-o", &ber],
            vec!["sweep-leakage", "-o", &leak],
            vec![
                "send-image",
                "in.pgm",
                "-o",
                &img,
                "--histogram",
                &hist,
                "--stats",
                &stats,
            ],
            vec![
                "send-image",
                "in.pgm",
                "-o",
                &eve,
                "--set",
                "role=eavesdropper",
                "--stats",
                &eve_stats,
            ],
            vec!["sync-demo", "-o", &sync],
        ];
        for job in jobs {
            let args: Vec<&str> = common.iter().copied().chain(job).collect();
            run_cli(d, &args)?;
        }
        outputs.push(
            [ber, leak, img, hist, stats, sync, eve, eve_stats]
                .iter()
                .map(|f| std::fs::read(d.join(f)).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let same = outputs[0] == outputs[1];
    ensure(
        same,
        format!("8 artifacts from 5 commands, identical across reruns: {same}"),
    )
}

fn main() -> ExitCode {
    let sweeps_start = Instant::now();
    let sweeps = run_sweeps();
    let sweep_secs = sweeps_start.elapsed().as_secs_f64();
    let from_sweeps = |f: fn(&Sweeps) -> Outcome| match &sweeps {
        Ok(s) => f(s),
        Err(e) => Err(format!("sweep failed: {e}")),
    };

    let mut results: Vec<(&str, Outcome)> = vec![
        ("synchronization convergence", sync_convergence()),
        ("error-dynamics oracle", error_dynamics()),
        ("scramble round-trip", scramble_round_trip()),
        ("legitimate BER", legitimate_ber()),
        ("eavesdropper BER", from_sweeps(eavesdropper_ber)),
        ("leakage bounds", from_sweeps(leakage_bounds)),
        ("image KS", image_ks()),
        ("LOS gain", los_gain_check()),
        ("OFDM identities", ofdm_identities()),
        ("cascade vs single", from_sweeps(cascade_vs_single)),
    ];
    results.push(("complexity trend", complexity_trend()));
    results.push(("determinism", determinism()));

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("({} sweep points in {sweep_secs:.1}s)", 2 * 2 * 3 * 7);
    if failed == 0 {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", results.len());
        ExitCode::FAILURE
    }
}
