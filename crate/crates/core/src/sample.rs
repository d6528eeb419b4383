//! Seeded random instances: PL maps, homeomorphisms, Morse-Smale
//! homeomorphisms, arcs and small perturbations.
//!
//! All coordinates are multiples of a fixed grid step so that slopes stay
//! moderate and the exact arithmetic stays small.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Arc, Rational};
use crate::pl::PLCircleMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct sorted multiples of `1/den` in `(0, 1)`.
fn interior_grid<R: Rng>(rng: &mut R, count: usize, den: usize) -> Vec<Rational> {
    let mut idx: Vec<usize> = sample(rng, den - 1, count).into_iter().map(|i| i + 1).collect();
    idx.sort_unstable();
    idx.into_iter().map(|i| Rational::new(i as i64, den as i64)).collect()
}

fn grid_value<R: Rng>(rng: &mut R, den: usize) -> Rational {
    Rational::new(rng.gen_range(0..den) as i64, den as i64)
}

/// Degree-`degree` PL map with `knots` breakpoints in `[0, 1)` (0 included);
/// `F(t) = v(t) + degree * t` with `v` random on a `1/(4 knots)` grid.
pub fn pl_map<R: Rng>(rng: &mut R, knots: usize, degree: i64) -> Result<PLCircleMap> {
    if knots == 0 {
        return Err(Error::InvalidInput("at least one knot is needed".into()));
    }
    let den = 4 * knots;
    let mut ts = vec![Rational::zero()];
    ts.extend(interior_grid(rng, knots - 1, den));
    let d = Rational::from_integer(degree);
    let mut vals: Vec<Rational> = ts.iter().map(|t| grid_value(rng, den) + &d * t).collect();
    ts.push(Rational::one());
    vals.push(&vals[0] + &d);
    PLCircleMap::new(ts, vals)
}

/// Orientation-preserving PL homeomorphism with `knots` breakpoints.
pub fn homeo<R: Rng>(rng: &mut R, knots: usize) -> Result<PLCircleMap> {
    if knots == 0 {
        return Err(Error::InvalidInput("at least one knot is needed".into()));
    }
    let den = 4 * knots;
    let mut ts = vec![Rational::zero()];
    ts.extend(interior_grid(rng, knots - 1, den));
    ts.push(Rational::one());
    let base = grid_value(rng, den);
    let mut vals = vec![base.clone()];
    vals.extend(interior_grid(rng, knots - 1, den).into_iter().map(|v| &base + v));
    vals.push(&base + Rational::one());
    PLCircleMap::new(ts, vals)
}

/// Degree-one homeomorphism with exactly `2 * pairs` fixed points, all
/// transversal, alternately repelling and attracting.
pub fn morse_smale<R: Rng>(rng: &mut R, pairs: usize) -> Result<PLCircleMap> {
    if pairs == 0 {
        return Err(Error::InvalidInput("at least one pair of fixed points is needed".into()));
    }
    let count = 2 * pairs;
    let den = 8 * count;
    let shift = grid_value(rng, den);
    let mut fixed: Vec<Rational> = vec![Rational::zero()];
    fixed.extend(interior_grid(rng, count - 1, den));
    let mut knots = Vec::with_capacity(2 * count + 1);
    for i in 0..count {
        let p = &fixed[i];
        let next = if i + 1 < count { fixed[i + 1].clone() } else { Rational::one() };
        let half = (&next - p) / Rational::from_integer(2);
        let mid = p + &half;
        let c = Rational::new(rng.gen_range(1..4), 4);
        let bump = &half * c;
        let v = if i % 2 == 0 { &mid + bump } else { &mid - bump };
        knots.push((p + &shift, p + &shift));
        knots.push((&mid + &shift, v + &shift));
    }
    knots.push((&shift + Rational::one(), &shift + Rational::one()));
    PLCircleMap::from_lift_knots(knots, 1)
}

/// Up to `count` disjoint arcs with endpoints on a `1/(4 count)` grid.
pub fn arcs<R: Rng>(rng: &mut R, count: usize) -> Vec<Arc> {
    if count == 0 {
        return Vec::new();
    }
    let den = 4 * count;
    let ends = interior_grid(rng, 2 * count, den + 1);
    ends.chunks(2)
        .filter(|c| c[0] < c[1])
        .map(|c| Arc::from_lift(&c[0], &c[1] - &c[0]).expect("positive length"))
        .collect()
}

/// `g + η` with `η` a random PL function on `g`'s breakpoints plus
/// `extra` random ones, `|η| < radius`.
pub fn perturbation<R: Rng>(rng: &mut R, g: &PLCircleMap, radius: &Rational, extra: usize) -> Result<PLCircleMap> {
    if !radius.is_positive() {
        return Err(Error::InvalidInput("perturbation radius must be positive".into()));
    }
    let steps = 1000i64;
    let mut ts: Vec<Rational> = g.breakpoints().to_vec();
    ts.extend(interior_grid(rng, extra, 4 * extra.max(1) + 1));
    ts.sort();
    ts.dedup();
    let mut eta: Vec<Rational> =
        ts.iter().map(|_| radius * Rational::new(rng.gen_range(1 - steps..steps), steps)).collect();
    let last = eta.len() - 1;
    eta[last] = eta[0].clone();
    let vals = ts.iter().zip(&eta).map(|(t, e)| g.lift_evaluate(t) + e).collect();
    PLCircleMap::new(ts, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl::FixedSet;

    #[test]
    fn seeded_maps_repeat() {
        let a = pl_map(&mut rng(7), 6, 2).unwrap();
        let b = pl_map(&mut rng(7), 6, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.degree_i64(), 2);
    }

    #[test]
    fn homeos_are_homeos() {
        let mut r = rng(1);
        for _ in 0..20 {
            assert!(homeo(&mut r, 5).unwrap().is_orientation_preserving_homeo());
        }
    }

    #[test]
    fn morse_smale_fixed_points() {
        let mut r = rng(3);
        for k in 1..4 {
            let h = morse_smale(&mut r, k).unwrap();
            assert!(h.is_orientation_preserving_homeo());
            let fx = h.fixed_points();
            assert_eq!(fx.len(), 2 * k);
            assert!(fx.iter().all(FixedSet::is_transversal));
        }
    }

    #[test]
    fn perturbation_is_close() {
        let mut r = rng(5);
        let g = PLCircleMap::expanding(2).unwrap();
        let radius = Rational::new(1, 50);
        let p = perturbation(&mut r, &g, &radius, 4).unwrap();
        assert!(g.c0_distance(&p) < radius);
    }
}
