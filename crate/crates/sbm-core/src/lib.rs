//! Simulation and analysis toolkit for the spin-boson model under strong
//! time-independent driving.
//!
//! The crate provides two independent routes to the same physics:
//!
//! * [`evolve`] — exact numerical propagation in a truncated Fock ⊗ spin
//!   space (Hermitian eigendecomposition; no time-step error for constant
//!   drives), valid for any atomic splitting, drive kind, and ramp;
//! * [`analytic`] — closed-form coherent-state trajectories, the exact
//!   `⟨σz(t)⟩` formula for photon drive at zero splitting, the
//!   Bessel-function resonance condition, and the coupling estimator
//!   built on it.
//!
//! [`experiments`] orchestrates the standard runs (dynamics traces,
//! amplitude scans, rise-time scans, coupling estimation) and [`cli`]
//! exposes them as the `sbm` command with CSV/JSON/SVG output.
//!
//! Internal units: the photon frequency is `ω = 1`, times are in `1/ω`,
//! and every rate is a ratio to `ω`.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod fock;
pub mod model;

pub use error::{Result, SbmError};
pub use model::{DriveKind, DriveSpec, ModelParams, NumericsConfig, RampProfile};
