//! Exact substrate: rationals, circle points, arcs and base-`ell` words.

mod circle;
mod rational;

pub use circle::{
    cylinder_length, split_unit, word_concat, word_interval, Arc, CirclePoint, Word,
};
pub use rational::{cmp_int, Rational};
