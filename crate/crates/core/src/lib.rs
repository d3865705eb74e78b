//! Two restaurants competing for diners, waiters and cooks.
//!
//! Diners move toward the restaurant offering more quality per dollar,
//! waiters toward higher take-home pay, cooks toward higher base pay. This
//! crate integrates those dynamics, finds and classifies the steady state,
//! optimizes one restaurant's wages under a tipping or no-tipping policy,
//! locates the conventional tip rate at which abandoning tips becomes more
//! profitable, and measures parameter sensitivity with Latin hypercube
//! sampling and partial rank correlation.

pub mod dynamics;
pub mod equilibrium;
pub mod model;
pub mod policy;
pub mod presets;
pub mod roots;
pub mod sensitivity;
pub mod svg;

pub use model::{EcosystemConfig, Param, Restaurant, State};
