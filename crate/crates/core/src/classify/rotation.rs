//! Rotation numbers and the basin decomposition of PL homeomorphisms with
//! rational rotation number.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Arc, CirclePoint, Rational};
use crate::measure::CircleMeasure;
use crate::pl::{FixedSet, PLCircleMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RotationNumber {
    /// `r/q` with `q` the minimal period of the periodic points.
    Exact { value: Rational, period: usize },
    /// `lower < ρ < upper` from `F^Q(0)`, width `2/Q`.
    Bracket { lower: Rational, upper: Rational, iterations: usize },
}

impl RotationNumber {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RotationNumber::Exact { value, .. } => Some(value),
            RotationNumber::Bracket { .. } => None,
        }
    }
}

fn lift_orbit(h: &PLCircleMap, x: &Rational, q: usize) -> Rational {
    let mut t = x.clone();
    for _ in 0..q {
        t = h.lift_evaluate(&t);
    }
    t
}

/// `ρ(h) ∈ [0, 1)` for the lift with `F(0) ∈ [0, 1)`; exact when some period
/// `q <= max_period` exists.
pub fn rotation_number(h: &PLCircleMap, max_period: usize) -> Result<RotationNumber> {
    if !h.is_orientation_preserving_homeo() {
        return Err(Error::NotOrientationPreserving);
    }
    if max_period == 0 {
        return Err(Error::InvalidInput("max period must be at least 1".into()));
    }
    let mut power = PLCircleMap::identity();
    for q in 1..=max_period {
        power = h.compose(&power)?;
        if let Some(set) = power.fixed_points().first() {
            let x = set.start().value().clone();
            let r = lift_orbit(h, &x, q) - &x;
            return Ok(RotationNumber::Exact { value: r / Rational::from_integer(q as i64), period: q });
        }
    }
    let big_q = Rational::from_integer(max_period as i64);
    let end = lift_orbit(h, &Rational::zero(), max_period);
    Ok(RotationNumber::Bracket {
        lower: (&end - Rational::one()) / &big_q,
        upper: (&end + Rational::one()) / &big_q,
        iterations: max_period,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A component of `S^1 \ Per(h)`: an open arc whose points converge to the
/// orbit of the endpoint on `attracting`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Gap {
    pub arc: Arc,
    pub attracting: Side,
    pub limit: CirclePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysicalMeasure {
    pub orbit: Vec<CirclePoint>,
    pub measure: CircleMeasure,
    /// Open arcs; the basin also contains the orbit itself.
    pub basin: Vec<Arc>,
    pub basin_measure: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BasinDecomposition {
    pub rotation: Rational,
    pub period: usize,
    /// Fixed sets of `h^period`, i.e. all periodic points of `h`.
    pub periodic: Vec<FixedSet>,
    pub gaps: Vec<Gap>,
    pub physical: Vec<PhysicalMeasure>,
    /// `m(Per(h))`.
    pub periodic_measure: Rational,
}

impl BasinDecomposition {
    /// `Σ basin measures + m(Per)`; equal to one.
    pub fn total(&self) -> Rational {
        self.physical.iter().map(|p| &p.basin_measure).sum::<Rational>() + &self.periodic_measure
    }

    pub fn basin_cover(&self) -> Rational {
        self.physical.iter().map(|p| &p.basin_measure).sum()
    }

    /// Physical measure whose basin holds `x`, for `x` off `Per(h)`.
    pub fn attractor_of(&self, x: &CirclePoint) -> Option<usize> {
        self.physical.iter().position(|p| p.basin.iter().any(|a| a.contains_open(x)))
    }
}

fn orbit_of(h: &PLCircleMap, p: &CirclePoint, q: usize) -> Vec<CirclePoint> {
    let mut out = Vec::with_capacity(q);
    let mut y = p.clone();
    for _ in 0..q {
        out.push(y.clone());
        y = h.evaluate(&y);
    }
    out.sort();
    out
}

/// `Per(h)`, the gaps between periodic sets and the periodic Dirac measures
/// attracting them.
pub fn basin_decomposition(h: &PLCircleMap, max_period: usize) -> Result<BasinDecomposition> {
    let (rotation, q) = match rotation_number(h, max_period)? {
        RotationNumber::Exact { value, period } => (value, period),
        RotationNumber::Bracket { .. } => return Err(Error::RotationNotDetected(max_period)),
    };
    let r = &rotation * Rational::from_integer(q as i64);
    let power = h.iterate(q)?;
    let periodic = power.fixed_points();
    let periodic_measure: Rational = periodic.iter().map(FixedSet::measure).sum();
    // (left end, right end) of each periodic set as lifts
    let ends: Vec<(Rational, Rational)> = periodic
        .iter()
        .map(|s| match s {
            FixedSet::Point { at, .. } => (at.value().clone(), at.value().clone()),
            FixedSet::Arc { arc } => (arc.start().value().clone(), arc.end_lift()),
        })
        .collect();
    let mut gaps = Vec::new();
    let full = periodic.iter().any(|s| matches!(s, FixedSet::Arc { arc } if arc.length() == &Rational::one()));
    if !full {
        for i in 0..ends.len() {
            let a = ends[i].1.clone();
            let mut b = ends[(i + 1) % ends.len()].0.clone();
            while b <= a {
                b += Rational::one();
            }
            let len = &b - &a;
            if len.is_zero() {
                continue;
            }
            let mid = &a + &len / Rational::from_integer(2);
            let above = power.lift_evaluate(&mid) - &mid - &r;
            let (attracting, limit) = if above.is_positive() {
                (Side::Right, CirclePoint::from_lift(&b))
            } else {
                (Side::Left, CirclePoint::from_lift(&a))
            };
            gaps.push(Gap { arc: Arc::from_lift(&a, len)?, attracting, limit });
        }
    }
    let mut by_orbit: BTreeMap<Vec<CirclePoint>, Vec<Arc>> = BTreeMap::new();
    for g in &gaps {
        by_orbit.entry(orbit_of(h, &g.limit, q)).or_default().push(g.arc.clone());
    }
    let physical = by_orbit
        .into_iter()
        .map(|(orbit, basin)| {
            let basin_measure = basin.iter().map(Arc::measure).sum();
            PhysicalMeasure { measure: CircleMeasure::uniform_atoms(&orbit), orbit, basin, basin_measure }
        })
        .collect();
    Ok(BasinDecomposition { rotation, period: q, periodic, gaps, physical, periodic_measure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn two_point_homeo() -> PLCircleMap {
        // fixed at 0 (repelling) and 1/2 (attracting)
        PLCircleMap::from_lift_knots(
            vec![(q!(0), q!(0)), (q!(1, 4), q!(3, 8)), (q!(1, 2), q!(1, 2)), (q!(3, 4), q!(5, 8)), (q!(1), q!(1))],
            1,
        )
        .unwrap()
    }

    #[test]
    fn rotation_examples() {
        let r = PLCircleMap::rotation(&q!(2, 5));
        assert_eq!(rotation_number(&r, 10).unwrap(), RotationNumber::Exact { value: q!(2, 5), period: 5 });
        assert_eq!(rotation_number(&two_point_homeo(), 4).unwrap().exact(), Some(&q!(0)));
        let g = two_point_homeo();
        let conj = g.invert().unwrap().compose(&PLCircleMap::rotation(&q!(1, 3))).unwrap().compose(&g).unwrap();
        assert_eq!(rotation_number(&conj, 6).unwrap().exact(), Some(&q!(1, 3)));
        assert!(rotation_number(&PLCircleMap::expanding(2).unwrap(), 3).is_err());
    }

    #[test]
    fn bracket_when_undetected() {
        let r = PLCircleMap::rotation(&q!(3, 11));
        match rotation_number(&r, 5).unwrap() {
            RotationNumber::Bracket { lower, upper, .. } => {
                assert!(lower < q!(3, 11) && q!(3, 11) < upper);
                assert_eq!(upper - lower, q!(2, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_point_basins() {
        let d = basin_decomposition(&two_point_homeo(), 4).unwrap();
        assert_eq!(d.physical.len(), 1);
        assert_eq!(d.physical[0].orbit, vec![CirclePoint::new(q!(1, 2)).unwrap()]);
        assert_eq!(d.physical[0].basin_measure, q!(1));
        assert_eq!(d.total(), q!(1));
    }

    #[test]
    fn rotation_half_is_all_periodic() {
        let d = basin_decomposition(&PLCircleMap::rotation(&q!(1, 2)), 4).unwrap();
        assert!(d.gaps.is_empty() && d.physical.is_empty());
        assert_eq!(d.periodic_measure, q!(1));
    }
}
