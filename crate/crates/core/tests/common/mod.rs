//! Oracles shared by the integration tests. They only read a map's
//! breakpoints and lift values and never call the library's dynamics.

#![allow(dead_code)]

use circle_ergodic::exact::{Arc, Rational};
use circle_ergodic::pl::PLCircleMap;

/// Float copy of a PL lift.
pub struct FloatMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    degree: f64,
}

impl FloatMap {
    pub fn new(f: &PLCircleMap) -> Self {
        let xs: Vec<f64> = f.breakpoints().iter().map(Rational::to_f64).collect();
        let ys: Vec<f64> = f.lift_values().iter().map(Rational::to_f64).collect();
        FloatMap { degree: ys[ys.len() - 1] - ys[0], xs, ys }
    }

    pub fn lift(&self, t: f64) -> f64 {
        let k = t.floor();
        let u = t - k;
        let i = match self.xs.partition_point(|&x| x <= u) {
            0 => 0,
            i if i >= self.xs.len() => self.xs.len() - 2,
            i => i - 1,
        };
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        y0 + (y1 - y0) * (u - x0) / (x1 - x0) + self.degree * k
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = self.lift(x);
        y - y.floor()
    }
}

pub fn circle_dist_f64(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `sup_t dist(F(t) - G(t), Z)` from the two lifts sampled on the union of
/// breakpoints; `1/2` as soon as `F - G` crosses a half-integer.
pub fn c0_oracle(f: &PLCircleMap, g: &PLCircleMap) -> Rational {
    let mut ts: Vec<Rational> = f.breakpoints().iter().chain(g.breakpoints()).cloned().collect();
    ts.sort();
    ts.dedup();
    let half = Rational::new(1, 2);
    let d: Vec<Rational> = ts.iter().map(|t| f.lift_evaluate(t) - g.lift_evaluate(t)).collect();
    let mut best = Rational::zero();
    for w in d.windows(2) {
        let (lo, hi) = if w[0] <= w[1] { (&w[0], &w[1]) } else { (&w[1], &w[0]) };
        if (lo - &half).floor() != (hi - &half).floor() {
            return half;
        }
    }
    for v in &d {
        best = best.max(v.dist_to_integer());
    }
    best
}

/// `x` in the open arc, by reducing `x - start` mod 1.
pub fn in_open_arc(arc: &Arc, x: &Rational) -> bool {
    let off = (x - arc.start().value()).fract();
    off.is_positive() && &off < arc.length()
}

/// Endpoints and interior points of the closed arc as lifts.
pub fn closed_samples(arc: &Arc, interior: usize) -> Vec<Rational> {
    let s = arc.start().value();
    let den = Rational::from_integer(interior as i64 + 1);
    (0..=interior + 1).map(|i| s + arc.length() * Rational::from_integer(i as i64) / &den).collect()
}
