//! Desk-scale random circuit sampling (RCS) benchmark toolkit.
//!
//! The crate covers the whole RCS pipeline on a laptop-sized problem:
//!
//! * [`hwmodel`]: grid topology and calibration records, error statistics.
//! * [`circuit`]: layered circuit IR, the patterned RCS generator, patch
//!   splitting and the line-oriented text format.
//! * [`statevec`]: exact state-vector simulation and sampling.
//! * [`noise`]: the discrete error model (fidelity forecast, white noise,
//!   stochastic Pauli trajectories).
//! * [`xeb`]: linear cross-entropy benchmarking and fSim parameter refits.
//! * [`embed`]: error-aware placement of a logical layout on the hardware grid.
//! * [`tncost`]: tensor-network construction, contraction planning with
//!   slicing, exact amplitude contraction and runtime estimates.
//! * [`workflow`]: the file-based task store behind the `rcsbench` CLI.

pub mod circuit;
pub mod embed;
pub mod error;
pub mod hwmodel;
pub mod noise;
pub mod rng;
pub mod samples;
pub mod statevec;
pub mod tncost;
pub mod workflow;
pub mod xeb;

pub use error::{Error, Result};
