//! Stationary vortex sheets near nondegenerate point-vortex equilibria.
//!
//! Each sheet is a perturbed circle of radius `ε` around a vortex center.
//! Starting from a critical point of the Kirchhoff-Routh function, the solver
//! continues in `ε` with a quasi-Newton iteration built on the exact `ε = 0`
//! linearization. An independent principal-value quadrature checks the
//! results.

// Quadrature loops index several parallel arrays by the same node.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod domain;
pub mod error;
pub mod functional;
pub mod kirchhoff_routh;
pub mod linear_model;
pub mod sheet;
pub mod solver;
pub mod spectral;
pub mod vec2;
pub mod verify;

pub use error::{Error, Result};
