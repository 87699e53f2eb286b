//! Generalized n-bit superdense coding over GHZ states.
//!
//! - [`qstate`]: dense statevector engine.
//! - [`circuit`]: gate lists, depth and gate counts, basis transpilation,
//!   pair cancellation and a QASM subset.
//! - [`protocol`]: GHZ preparation, message encoding, mirror decoding and the
//!   readout-to-message mapping.
//! - [`noise`]: Pauli-trajectory noise with readout flips and idle decay.
//! - [`experiment`]: message sweeps, aggregations and CSV reports.
//! - [`cli`]: the `superdense` command.

pub mod circuit;
pub mod cli;
pub mod experiment;
pub mod noise;
pub mod protocol;
pub mod qstate;
