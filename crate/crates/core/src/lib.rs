//! Exact constructions and diagnostics for the ergodic theory of circle maps.
//!
//! Everything is computed in exact rational arithmetic: piecewise-linear
//! circle maps, finite measures with atoms and piecewise-constant density,
//! `ℓ`-adic partition families, the trapping-region perturbation of
//! continuous maps, and finite-scale Birkhoff/Cesàro diagnostics.

pub mod error;
pub mod exact;
pub mod measure;
pub mod partition;
pub mod pl;
pub mod wicked;
pub mod shred;
pub mod classify;
pub mod sample;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
