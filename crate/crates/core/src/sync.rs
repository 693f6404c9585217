//! Discrete sliding-mode projective synchronization of two Henon maps.
//!
//! The receiver drives its own map (the slave, state `y`) toward `alpha * x`,
//! where `x` is the transmitter's map state. With
//!
//! ```text
//! e(k) = y(k) - alpha * x(k)
//! S(k) = e1 + c1 e2 + c2 e3 + c3 e4
//! ```
//!
//! the control law forces the reaching dynamics
//! `S(k+1) = (1 - qT) S - eps1 |S|^beta sgn S - eps2 T |S|^gamma sgn S`.
//! Because `alpha > 0` preserves signs, a synchronized slave reproduces the
//! master's scrambling key.

use alloc::vec::Vec;

use crate::henon::{henon_step, HenonMap, HenonParams, HenonState};
use crate::{Error, Result};

/// How the constant term at the end of the control law is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlConstant {
    /// `+ (alpha - 1) * a`: cancels the `(1 - alpha) * a` drift of the error
    /// dynamics, so `e = 0` is an equilibrium.
    #[default]
    Corrected,
    /// `- a + alpha`, as typeset in the original derivation. Only equivalent
    /// to [`ControlConstant::Corrected`] when `a = 1`.
    AsPrinted,
}

/// Controller constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcParams {
    /// Sampling step.
    pub t: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub q: f64,
    /// Exponent of the `eps1` reaching term, in (0, 1).
    pub beta: f64,
    /// Exponent of the `eps2` reaching term, > 1.
    pub gamma: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Projective scaling factor.
    pub alpha: f64,
    pub constant: ControlConstant,
}

impl SmcParams {
    /// Reference controller: T = 1, eps1 = eps2 = 0.1, q = 0.7, alpha = 0.8,
    /// gamma = 1.2, beta = 0.9, c = (0.001, 0, 0).
    pub const REFERENCE: SmcParams = SmcParams {
        t: 1.0,
        eps1: 0.1,
        eps2: 0.1,
        q: 0.7,
        beta: 0.9,
        gamma: 1.2,
        c1: 0.001,
        c2: 0.0,
        c3: 0.0,
        alpha: 0.8,
        constant: ControlConstant::Corrected,
    };

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &'static str, &'static str); 7] = [
            (self.t > 0.0, "t", "must be > 0"),
            (self.eps1 > 0.0, "eps1", "must be > 0"),
            (self.eps2 > 0.0, "eps2", "must be > 0"),
            (self.q > 0.0, "q", "must be > 0"),
            (1.0 - self.q * self.t > 0.0, "q", "requires 1 - q*t > 0"),
            (
                self.beta > 0.0 && self.beta < 1.0,
                "beta",
                "must lie in (0, 1)",
            ),
            (self.gamma > 1.0, "gamma", "must be > 1"),
        ];
        for (ok, name, reason) in checks {
            if !ok {
                return Err(Error::invalid(name, reason));
            }
        }
        let finite = [self.c1, self.c2, self.c3, self.alpha];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("c/alpha", "must be finite"));
        }
        Ok(())
    }
}

impl Default for SmcParams {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// Componentwise projective synchronization error `y - alpha * x`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SyncError(pub [f64; 4]);

impl SyncError {
    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| f64::max(m, libm::fabs(*v)))
    }
}

pub fn sync_error(slave: &HenonState, master: &HenonState, alpha: f64) -> SyncError {
    let mut e = [0.0; 4];
    for (i, ei) in e.iter_mut().enumerate() {
        *ei = slave[i] - alpha * master[i];
    }
    SyncError(e)
}

pub fn sliding_surface(e: &SyncError, params: &SmcParams) -> f64 {
    let [e1, e2, e3, e4] = e.0;
    e1 + params.c1 * e2 + params.c2 * e3 + params.c3 * e4
}

/// `sgn` with `sgn(0) = 0`.
fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn control_law(
    e: &SyncError,
    s: f64,
    master: &HenonState,
    slave: &HenonState,
    map: &HenonParams,
    params: &SmcParams,
) -> f64 {
    let [e1, e2, e3, e4] = e.0;
    let p = params;
    let mag = libm::fabs(s);
    let sign = signum0(s);
    let reaching = (1.0 - p.q * p.t) * s
        - p.eps1 * libm::pow(mag, p.beta) * sign
        - p.eps2 * p.t * libm::pow(mag, p.gamma) * sign;
    let constant = match p.constant {
        ControlConstant::Corrected => (p.alpha - 1.0) * map.a,
        ControlConstant::AsPrinted => -map.a + p.alpha,
    };
    let x3 = master.x3();
    let y3 = slave.x3();
    reaching - p.c1 * e1 - p.c2 * e2 - p.c3 * e3 + map.b * e4 - p.alpha * x3 * x3
        + y3 * y3
        + constant
}

/// Outcome of one controlled slave step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncStep {
    /// Slave state after the step.
    pub slave: HenonState,
    /// Control applied during the step.
    pub control: f64,
    /// Error before the step.
    pub error: SyncError,
    /// Sliding surface value before the step.
    pub surface: f64,
}

/// Computes the control from the current pair and advances the slave once.
/// The master is advanced by the caller.
pub fn synchronize_step(
    master: &HenonState,
    slave: &HenonState,
    map: &HenonParams,
    params: &SmcParams,
) -> Result<SyncStep> {
    let error = sync_error(slave, master, params.alpha);
    let surface = sliding_surface(&error, params);
    let control = control_law(&error, surface, master, slave, map, params);
    let next = henon_step(slave, map, control)?;
    Ok(SyncStep {
        slave: next,
        control,
        error,
        surface,
    })
}

/// Summary of a synchronization run.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncReport {
    /// Index `k` of the first error below tolerance, or the number of
    /// iterations run when `converged` is false.
    pub iterations_to_converge: usize,
    pub final_error_norm: f64,
    pub converged: bool,
    /// `e(0) ..= e(k_final)`.
    pub error_history: Vec<SyncError>,
    /// Control applied at each step; one shorter than `error_history`.
    pub control_history: Vec<f64>,
}

/// A master map and a controlled slave map advanced in lockstep.
#[derive(Debug, Clone)]
pub struct SyncSession {
    master: HenonMap,
    slave: HenonState,
    smc: SmcParams,
}

impl SyncSession {
    pub fn new(
        master_seed: HenonState,
        slave_seed: HenonState,
        map: HenonParams,
        smc: SmcParams,
    ) -> Result<Self> {
        smc.validate()?;
        Ok(SyncSession {
            master: HenonMap::new(master_seed, map),
            slave: slave_seed,
            smc,
        })
    }

    pub fn master(&self) -> HenonState {
        self.master.state()
    }

    pub fn slave(&self) -> HenonState {
        self.slave
    }

    pub fn iteration(&self) -> usize {
        self.master.iteration()
    }

    pub fn error(&self) -> SyncError {
        sync_error(&self.slave, &self.master.state(), self.smc.alpha)
    }

    /// Advances master (free) and slave (controlled) by one step.
    pub fn step(&mut self) -> Result<SyncStep> {
        let iteration = self.master.iteration() + 1;
        let master = self.master.state();
        let step = synchronize_step(&master, &self.slave, self.master.params(), &self.smc)
            .map_err(|_| Error::Divergence { iteration })?;
        self.master.advance(0.0)?;
        self.slave = step.slave;
        Ok(step)
    }

    /// Steps until `||e||_inf <= tol` or `max_iter` steps have been taken.
    pub fn run_until_converged(&mut self, tol: f64, max_iter: usize) -> Result<SyncReport> {
        if !(tol >= 0.0) {
            return Err(Error::invalid("tol", "must be >= 0"));
        }
        if max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        let mut error_history = Vec::new();
        let mut control_history = Vec::new();
        let mut k = 0;
        loop {
            let e = self.error();
            error_history.push(e);
            let norm = e.norm_inf();
            if norm <= tol || k == max_iter {
                return Ok(SyncReport {
                    iterations_to_converge: k,
                    final_error_norm: norm,
                    converged: norm <= tol,
                    error_history,
                    control_history,
                });
            }
            control_history.push(self.step()?.control);
            k += 1;
        }
    }
}

pub fn run_synchronization(
    master_seed: HenonState,
    slave_seed: HenonState,
    map: HenonParams,
    params: SmcParams,
    tol: f64,
    max_iter: usize,
) -> Result<SyncReport> {
    SyncSession::new(master_seed, slave_seed, map, params)?.run_until_converged(tol, max_iter)
}
