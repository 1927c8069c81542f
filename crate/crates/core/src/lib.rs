//! Vacuum-state truncation in a Kerr-interrupted `n`-photon parametric
//! cascade.
//!
//! A signal mode is driven from `|0>` towards `|n>` in `N` equal parametric
//! stages, and after every stage a cross-Kerr coupling imprints a phase
//! proportional to the photon number of a probe mode. Frequent interruption
//! freezes the signal in vacuum unless the probe itself is in vacuum, so
//! projecting the signal onto `|0>` removes exactly the vacuum component of
//! the probe.
//!
//! - [`fock`]: truncated Fock-space operators, propagators and states.
//! - [`kernel`]: closed-form per-photon-number amplitudes and their
//!   large-`N` expansion.
//! - [`probe`]: probe states (Fock, coherent, displaced-squeezed, custom).
//! - [`cascade`]: the full-space reference run and the block run, emission
//!   probability and post-selection.
//! - [`experiment`]: CSV-producing drivers used by the `zeno-scissors` CLI.

pub mod analysis;
pub mod cascade;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod kernel;
pub mod probe;

pub use cascade::{run_blocks, run_oracle, truncation_fidelity_sweep, CascadeResult, PostSelection, SweepRow};
pub use error::{Error, Result};
pub use fock::{AmplitudeVector, ComplexMatrix, JointState, ModeSpace, C64};
pub use kernel::{vw_asymptotic, vw_closed_form, BlockAmplitudes, StageParams};
pub use probe::{build_state, photon_statistics, strip_vacuum, PhotonStatistics, ProbeKind, ProbeStateSpec};
