//! Ground-state energy fluctuations of small quantum systems entangled with
//! an environment.
//!
//! The system's reduced density matrix is summarized by a few moments: the
//! Bloch vector for a qubit, `<q^2>` and `<p^2>` for an oscillator. From
//! these the crate computes energy distributions, generating functions,
//! cumulants and purity, and checks them against brute-force oracles.
//!
//! Library types are generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar. The [`oracle`] module works in `f64` only.

// `!(x > 0)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod oscillator;
pub mod qubit;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type QubitParams64 = qubit::QubitParams<f64>;
pub type QubitParams32 = qubit::QubitParams<f32>;
pub type BlochVector64 = qubit::BlochVector<f64>;
pub type BlochVector32 = qubit::BlochVector<f32>;
pub type OscillatorParams64 = oscillator::OscillatorParams<f64>;
pub type OscillatorParams32 = oscillator::OscillatorParams<f32>;
pub type GaussianMoments64 = oscillator::GaussianMoments<f64>;
pub type GaussianMoments32 = oscillator::GaussianMoments<f32>;
pub type ShapeParams64 = oscillator::ShapeParams<f64>;
pub type ShapeParams32 = oscillator::ShapeParams<f32>;
pub type FockDistribution64 = oscillator::FockDistribution<f64>;
pub type FockDistribution32 = oscillator::FockDistribution<f32>;
pub type OhmicBathParams64 = bath::OhmicBathParams<f64>;
pub type OhmicBathParams32 = bath::OhmicBathParams<f32>;

/// Crate version, embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
