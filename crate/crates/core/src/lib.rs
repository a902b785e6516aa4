//! Core kernels for studying the low-rank bias of deep fully-connected
//! networks with homogeneous nonlinearities.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`linalg`]: dense row-major matrices, a from-scratch one-sided Jacobi
//!   SVD, Schatten norms, and numerical rank.
//! - [`network`]: fully-connected networks with the leaky nonlinearity
//!   family `σ_a`, exact Jacobians, parameter norms, and the serial /
//!   parallel composition constructions.
//! - [`training`]: L2-regularized losses, reverse-mode gradients, Adam with
//!   decoupled weight decay followed by plain gradient descent, and a
//!   representation-cost estimator.
//! - [`rank`]: the certification suite — Jacobian rank probing, Schatten
//!   certificates, bottleneck spectra, balancedness residuals, TSP lower
//!   bounds, rank-1 interpolators, tripoint detection, denoising scores.
//! - [`baselines`]: kernel ridge regression contrast (full-rank Jacobians).
//! - [`datagen`]: seeded synthetic generators and closed-form fixtures.
//!
//! Everything here is pure computation over owned values: no IO, no global
//! state, deterministic given seeds. The crate is `no_std`-compatible
//! (with `alloc`); disable the default `std` feature for embedded use.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod datagen;
pub mod error;
pub mod linalg;
pub mod map;
pub mod network;
pub mod rank;
#[cfg(test)]
pub(crate) mod testutil;
pub mod training;

pub use error::{Error, Result};
pub use linalg::{Matrix, SingularSpectrum};
pub use map::DifferentiableMap;
pub use network::NetworkParams;
