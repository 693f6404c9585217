//! Link-level building blocks for hyperchaos-secured visible light communication.
//!
//! The crate models a DCO-OFDM intensity-modulated link whose constellation
//! symbols are sign-scrambled by a 4D hyperchaotic Henon map. The receiver
//! recovers the key stream by driving its own copy of the map into projective
//! synchronization with the transmitter through a discrete sliding-mode
//! controller.
//!
//! Everything here is `no_std` and only needs `alloc`. File formats, the CLI
//! and wall-clock benchmarks live in the `hcvlc-sim` companion crate.
//!
//! Module overview:
//!
//! * [`henon`]: the 4D map used as key-stream generator.
//! * [`sync`]: sliding-mode projective synchronization of a slave map.
//! * [`mapping`]: BPSK/QPSK/8PSK/16QAM mappers and hard demappers.
//! * [`scrambler`]: single-stage and six-stage constellation sign scrambling.
//! * [`fft`]: radix-2 transform used by the OFDM modem.
//! * [`ofdm`]: hermitian extension, IFFT/FFT, cyclic prefix, DC bias, LS estimation.
//! * [`channel`]: Lambertian LOS gain, shot/thermal noise and the flat channel.
//! * [`metrics`]: BER, information leakage, histograms and the two-sample KS test.
//! * [`link`]: the end-to-end transmit/receive chain for both receiver roles.
#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
mod error;
pub mod fft;
pub mod henon;
pub mod link;
pub mod mapping;
pub mod metrics;
pub mod ofdm;
pub mod scrambler;
pub mod sync;

pub use error::{Error, Result};

pub use num_complex::Complex64;
