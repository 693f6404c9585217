//! Fourth-order hyperchaotic Henon map.
//!
//! ```text
//! x1(k+1) = a - x3(k)^2 - b*x4(k) + u(k)
//! x2(k+1) = x1(k)
//! x3(k+1) = x2(k)
//! x4(k+1) = x3(k)
//! ```
//!
//! The transmitter (master) runs the map with `u = 0`. The receiver (slave)
//! injects the sliding-mode control `u(k)` into the first equation.

use alloc::vec::Vec;
use core::ops::{Index, Mul, Sub};

use crate::{Error, Result};

/// Map coefficients `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonParams {
    pub a: f64,
    pub b: f64,
}

impl HenonParams {
    /// Reference coefficients, known to produce hyperchaos.
    pub const HYPERCHAOTIC: HenonParams = HenonParams { a: 1.76, b: 0.1 };

    pub const fn new(a: f64, b: f64) -> Self {
        HenonParams { a, b }
    }

    /// True for the reference hyperchaotic regime (a = 1.76, b = 0.1).
    ///
    /// Other coefficient pairs are not classified; no Lyapunov analysis is done.
    pub fn is_hyperchaotic(&self) -> bool {
        *self == Self::HYPERCHAOTIC
    }
}

impl Default for HenonParams {
    fn default() -> Self {
        Self::HYPERCHAOTIC
    }
}

/// Map state `(x1, x2, x3, x4)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HenonState(pub [f64; 4]);

impl HenonState {
    /// Transmitter initial condition used throughout the reference experiments.
    pub const MASTER_SEED: HenonState = HenonState([0.1, -0.1, 0.1, 0.1]);
    /// Receiver initial condition used throughout the reference experiments.
    pub const SLAVE_SEED: HenonState = HenonState([0.3, -0.1, 0.2, 0.1]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        HenonState([x1, x2, x3, x4])
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    pub fn x3(&self) -> f64 {
        self.0[2]
    }
    pub fn x4(&self) -> f64 {
        self.0[3]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| f64::max(m, libm::fabs(*v)))
    }
}

impl Index<usize> for HenonState {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Mul<HenonState> for f64 {
    type Output = HenonState;

    fn mul(self, rhs: HenonState) -> HenonState {
        HenonState(rhs.0.map(|v| self * v))
    }
}

impl Sub for HenonState {
    type Output = HenonState;

    fn sub(self, rhs: HenonState) -> HenonState {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        HenonState(out)
    }
}

/// One iteration of the map with additive control on the first equation.
///
/// A divergence error from this function reports iteration 0; [`HenonMap`]
/// and [`generate_sequence`] rewrite it with the real iteration index.
pub fn henon_step(state: &HenonState, params: &HenonParams, control: f64) -> Result<HenonState> {
    let [x1, x2, x3, x4] = state.0;
    let next = HenonState([params.a - x3 * x3 - params.b * x4 + control, x1, x2, x3]);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::Divergence { iteration: 0 })
    }
}

/// A stateful map instance that counts its own iterations.
#[derive(Debug, Clone)]
pub struct HenonMap {
    state: HenonState,
    params: HenonParams,
    iteration: usize,
}

impl HenonMap {
    pub fn new(seed: HenonState, params: HenonParams) -> Self {
        HenonMap {
            state: seed,
            params,
            iteration: 0,
        }
    }

    pub fn state(&self) -> HenonState {
        self.state
    }

    pub fn params(&self) -> &HenonParams {
        &self.params
    }

    /// Number of completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Advances the map by one step and returns the new state.
    pub fn advance(&mut self, control: f64) -> Result<HenonState> {
        let next =
            henon_step(&self.state, &self.params, control).map_err(|_| Error::Divergence {
                iteration: self.iteration + 1,
            })?;
        self.state = next;
        self.iteration += 1;
        Ok(next)
    }

    /// Discards `n` uncontrolled iterations.
    pub fn skip(&mut self, n: usize) -> Result<()> {
        for _ in 0..n {
            self.advance(0.0)?;
        }
        Ok(())
    }
}

/// Iterates the free-running map `skip` times, then returns the next `n` states.
pub fn generate_sequence(
    seed: HenonState,
    params: HenonParams,
    n: usize,
    skip: usize,
) -> Result<Vec<HenonState>> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let mut map = HenonMap::new(seed, params);
    map.skip(skip)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(map.advance(0.0)?);
    }
    Ok(out)
}
