//! Piecewise-linear circle maps, observables, and their exact fixed points.

mod fixed;
mod lift;
mod map;
mod observable;

pub use fixed::{Crossing, FixedSet, PeriodicSet};
pub(crate) use lift::sup_dist_to_integer;
pub use map::{PLCircleMap, DEFAULT_MAX_BREAKPOINTS};
pub use observable::Observable;
