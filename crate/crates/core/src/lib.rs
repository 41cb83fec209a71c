//! Bifurcation analysis of the planar two-neuron sigmoid network
//!
//! ```text
//! u' = -u + a phi(u) - b v + c
//! v' = -v + phi(u),        phi(u) = 1 / (1 + exp(-4u))
//! ```
//!
//! The crate covers equilibria and their types, the Liénard form at an
//! equilibrium, closed-form and numerical Lyapunov (focal) values, limit-cycle
//! search on Poincaré sections, portrait classification and scans of the
//! `(b, c)` plane at fixed `a`.

mod error;
mod roots;

pub mod dynamics;
pub mod lienard;
pub mod lyapunov;
pub mod model;
pub mod portrait;
pub mod scan;

pub use error::{Error, Result};
pub use model::{
    equilibria, reduce_original, sigmoid, symmetry_conjugate, vector_field, Equilibrium, EquilibriumKind,
    OriginalParams, Params, State,
};
