//! Spin-1/2 no-hidden-variables laboratory.
//!
//! The crate compares two ways of computing the direction-averaged squared
//! spin expectation `∫ E(n)² dΩ` for a single spin-1/2:
//!
//! * the quantum route, where `E(n) = Tr[ψ n·σ]` and the Bloch ball bounds the
//!   integral by `4π/3`;
//! * hidden-variable routes, where `E(n)` is the mean of a `±1`-valued response
//!   function over a classical probability space, bounded by `4π`.
//!
//! Modules, bottom-up: [`qm`] (2×2 operator algebra and the Born rule),
//! [`sphere`] (quadrature grids and seeded direction sampling), [`hv`]
//! (probability spaces, response functions, conformance checks), [`contrast`]
//! (the two contrast values and the combined report) and [`report`]
//! (serialization used by the `nogo` binary).

pub mod cli;
pub mod contrast;
pub mod error;
pub mod hv;
pub mod qm;
pub mod report;
pub mod sphere;

pub use error::{Error, Result};

/// Largest quantum value of `∫ E(n)² dΩ`, reached by pure states: `4π/3`.
pub const QUANTUM_BOUND: f64 = 4.0 * std::f64::consts::PI / 3.0;

/// Upper bound of `∫ E(n)² dΩ` for any `±1`-valued response model: `4π`.
pub const HV_BOUND: f64 = 4.0 * std::f64::consts::PI;
