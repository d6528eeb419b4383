//! Exact fixed and periodic points of PL circle maps.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::map::PLCircleMap;
use crate::error::Result;
use crate::exact::{Arc, CirclePoint, Rational};

/// How `D(x) = F(x) - x - k` behaves at an isolated zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossing {
    /// `D` goes from negative to positive: the graph crosses the diagonal upward.
    Upward,
    /// `D` goes from positive to negative.
    Downward,
    /// No sign change.
    Touching,
}

impl Crossing {
    pub fn is_transversal(self) -> bool {
        self != Crossing::Touching
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FixedSet {
    Point { at: CirclePoint, crossing: Crossing },
    /// A closed arc `[start, start + length]` of fixed points.
    Arc { arc: Arc },
}

impl FixedSet {
    pub fn is_transversal(&self) -> bool {
        matches!(self, FixedSet::Point { crossing, .. } if crossing.is_transversal())
    }

    /// Lebesgue measure of the set.
    pub fn measure(&self) -> Rational {
        match self {
            FixedSet::Point { .. } => Rational::zero(),
            FixedSet::Arc { arc } => arc.measure(),
        }
    }

    /// Left endpoint as a circle point.
    pub fn start(&self) -> &CirclePoint {
        match self {
            FixedSet::Point { at, .. } => at,
            FixedSet::Arc { arc } => arc.start(),
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, x: &CirclePoint) -> bool {
        match self {
            FixedSet::Point { at, .. } => at == x,
            FixedSet::Arc { arc } => closed_arc_contains(arc, x),
        }
    }
}

pub(crate) fn closed_arc_contains(arc: &Arc, x: &CirclePoint) -> bool {
    let off = (x.value() - arc.start().value()).fract();
    off <= *arc.length() || arc.length() == &Rational::one()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PeriodicSet {
    pub set: FixedSet,
    pub period: usize,
}

impl PLCircleMap {
    /// All fixed points, sorted by position; intervals of fixed points are
    /// returned as closed arcs.
    pub fn fixed_points(&self) -> Vec<FixedSet> {
        let lift = self.lift_ref();
        let m = lift.pieces();
        let d: Vec<Rational> = lift.breaks.iter().zip(&lift.values).map(|(x, y)| y - x).collect();
        let slope = |i: usize| lift.slope(i) - Rational::one();

        // flat integer pieces of D, as index runs
        let flat: Vec<bool> = (0..m).map(|i| d[i] == d[i + 1] && d[i].is_integer()).collect();
        if flat.iter().all(|&b| b) {
            return vec![FixedSet::Arc { arc: Arc::full() }];
        }
        let mut arcs: Vec<(Rational, Rational)> = Vec::new();
        let mut i = 0;
        while i < m {
            if flat[i] {
                let a = lift.breaks[i].clone();
                let mut j = i;
                while j < m && flat[j] {
                    j += 1;
                }
                arcs.push((a, lift.breaks[j].clone()));
                i = j;
            } else {
                i += 1;
            }
        }
        // merge the run ending at 1 with the one starting at 0
        if arcs.len() >= 2 && flat[0] && flat[m - 1] {
            let last = arcs.pop().unwrap();
            let first = &mut arcs[0];
            first.0 = last.0 - Rational::one();
        }
        let arc_sets: Vec<Arc> = arcs
            .iter()
            .map(|(a, b)| Arc::between(a, b).expect("fixed arc has positive length"))
            .collect();

        let mut points: Vec<(Rational, usize)> = Vec::new();
        for i in 0..m {
            if d[i] == d[i + 1] {
                continue;
            }
            let (lo, hi) = if d[i] < d[i + 1] { (&d[i], &d[i + 1]) } else { (&d[i + 1], &d[i]) };
            let mut k: BigInt = lo.ceil();
            while Rational::from_bigint(k.clone()) <= *hi {
                let kq = Rational::from_bigint(k.clone());
                let x = &lift.breaks[i] + (&kq - &d[i]) * (&lift.breaks[i + 1] - &lift.breaks[i]) / (&d[i + 1] - &d[i]);
                if x < lift.breaks[i + 1] {
                    points.push((x, i));
                }
                k += 1;
            }
        }
        let mut out: Vec<FixedSet> = Vec::new();
        for (x, i) in points {
            let at = CirclePoint::from_lift(&x);
            if arc_sets.iter().any(|a| closed_arc_contains(a, &at)) {
                continue;
            }
            let (sl, sr) = if x == lift.breaks[i] {
                let prev = if i == 0 { m - 1 } else { i - 1 };
                (slope(prev), slope(i))
            } else {
                (slope(i), slope(i))
            };
            let crossing = if sl.is_positive() && sr.is_positive() {
                Crossing::Upward
            } else if sl.is_negative() && sr.is_negative() {
                Crossing::Downward
            } else {
                Crossing::Touching
            };
            out.push(FixedSet::Point { at, crossing });
        }
        out.extend(arc_sets.into_iter().map(|arc| FixedSet::Arc { arc }));
        out.sort_by(|a, b| a.start().cmp(b.start()));
        out.dedup();
        out
    }

    /// Periodic sets of `self` whose period divides `period`, each tagged
    /// with its exact minimal period. Crossing tags refer to `self^period`.
    pub fn periodic_points(&self, period: usize) -> Result<Vec<PeriodicSet>> {
        assert!(period >= 1, "period must be positive");
        let top = self.iterate(period)?;
        let sets = top.fixed_points();
        let divisors: Vec<usize> = (1..=period).filter(|q| period % q == 0).collect();
        let mut lower: Vec<(usize, Vec<FixedSet>)> = Vec::new();
        for &q in &divisors[..divisors.len() - 1] {
            lower.push((q, self.iterate(q)?.fixed_points()));
        }
        let mut out = Vec::with_capacity(sets.len());
        for set in sets {
            let mut minimal = period;
            for (q, fixed) in &lower {
                let hit = match &set {
                    FixedSet::Point { at, .. } => fixed.iter().any(|s| s.contains(at)),
                    FixedSet::Arc { arc } => fixed.iter().any(|s| match s {
                        FixedSet::Arc { arc: big } => arc_inside(arc, big),
                        FixedSet::Point { .. } => false,
                    }),
                };
                if hit {
                    minimal = *q;
                    break;
                }
            }
            out.push(PeriodicSet { set, period: minimal });
        }
        Ok(out)
    }
}

fn arc_inside(small: &Arc, big: &Arc) -> bool {
    if big.length() == &Rational::one() {
        return true;
    }
    let off = (small.start().value() - big.start().value()).fract();
    &off + small.length() <= *big.length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(q!(n, d)).unwrap()
    }

    #[test]
    fn expanding_fixed_points() {
        let e2 = PLCircleMap::expanding(2).unwrap();
        assert_eq!(e2.fixed_points(), vec![FixedSet::Point { at: pt(0, 1), crossing: Crossing::Upward }]);
        let e3 = PLCircleMap::expanding(3).unwrap();
        let fx = e3.fixed_points();
        assert_eq!(fx.len(), 2);
        assert_eq!(fx[0].start(), &pt(0, 1));
        assert_eq!(fx[1].start(), &pt(1, 2));
        assert!(fx.iter().all(FixedSet::is_transversal));
    }

    #[test]
    fn rotation_half_is_periodic_everywhere() {
        let r = PLCircleMap::rotation(&q!(1, 2));
        assert!(r.fixed_points().is_empty());
        let per = r.periodic_points(2).unwrap();
        assert_eq!(per.len(), 1);
        assert_eq!(per[0].set, FixedSet::Arc { arc: Arc::full() });
        assert_eq!(per[0].period, 2);
    }

    #[test]
    fn attracting_and_repelling_points() {
        // F(x) = x + (1/8) sin-like bump: fixed at 0 and 1/2
        let f = PLCircleMap::new(
            vec![q!(0), q!(1, 4), q!(1, 2), q!(3, 4), q!(1)],
            vec![q!(0), q!(3, 8), q!(1, 2), q!(5, 8), q!(1)],
        )
        .unwrap();
        let fx = f.fixed_points();
        assert_eq!(fx.len(), 2);
        assert_eq!(fx[0], FixedSet::Point { at: pt(0, 1), crossing: Crossing::Upward });
        assert_eq!(fx[1], FixedSet::Point { at: pt(1, 2), crossing: Crossing::Downward });
    }

    #[test]
    fn fixed_arc_across_zero() {
        // identity on [3/4, 1] and [0, 1/4], pushed right in between
        let f = PLCircleMap::new(
            vec![q!(0), q!(1, 4), q!(1, 2), q!(3, 4), q!(1)],
            vec![q!(0), q!(1, 4), q!(5, 8), q!(3, 4), q!(1)],
        )
        .unwrap();
        let fx = f.fixed_points();
        assert_eq!(fx, vec![FixedSet::Arc { arc: Arc::between(&q!(-1, 4), &q!(1, 4)).unwrap() }]);
    }

    #[test]
    fn tangential_point() {
        let f = PLCircleMap::new(vec![q!(0), q!(1, 2), q!(1)], vec![q!(1, 8), q!(1, 2), q!(9, 8)]).unwrap();
        let fx = f.fixed_points();
        assert_eq!(fx, vec![FixedSet::Point { at: pt(1, 2), crossing: Crossing::Touching }]);
    }

    #[test]
    fn minimal_periods() {
        let r = PLCircleMap::rotation(&q!(1, 3));
        let per = r.periodic_points(6).unwrap();
        assert_eq!(per.len(), 1);
        assert_eq!(per[0].period, 3);
    }
}
