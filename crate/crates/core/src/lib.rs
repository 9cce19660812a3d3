//! Simulation of controlled-unitary gate teleportation through a pair of
//! quantum switches, its Sagnac-interferometer photonic model and the
//! average gate fidelity under imperfect reciprocity.
//!
//! * [`qmath`]: dense operators, states, measurement, phase comparison.
//! * [`gates`]: target gate, switch gates, corrections, presets.
//! * [`protocol`]: the two-party protocol and its operator identities.
//! * [`photonic`]: Jones-calculus model of the optical setup.
//! * [`fidelity`]: average gate fidelity and δ sweeps.

pub mod error;
pub mod fidelity;
pub mod gates;
pub mod photonic;
pub mod protocol;
pub mod qmath;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use gates::{BranchClass, CUParams, Preset};
pub use qmath::{Cplx, Operator, StateVec, UnitVec3};
