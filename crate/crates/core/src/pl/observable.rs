use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::lift::PlLift;
use super::map::{PLCircleMap, DEFAULT_MAX_BREAKPOINTS};
use crate::error::{Error, Result};
use crate::exact::{CirclePoint, Rational};

/// A continuous piecewise-linear function `S^1 -> R`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Observable {
    lift: PlLift,
}

#[derive(Serialize, Deserialize)]
struct ObservableRecord {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObservableRecord { breakpoints: self.lift.breaks.clone(), values: self.lift.values.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ObservableRecord::deserialize(d)?;
        Observable::new(r.breakpoints, r.values).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Obs(")?;
        for (x, y) in self.lift.breaks.iter().zip(&self.lift.values) {
            write!(f, "{x}->{y} ")?;
        }
        write!(f, ")")
    }
}

impl Observable {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if values.first() != values.last() {
            return Err(Error::InvalidInput("observable must take equal values at 0 and 1".into()));
        }
        PlLift::new(breakpoints, values, BigInt::zero()).map(|l| Observable { lift: l.simplify() })
    }

    pub fn constant(c: Rational) -> Self {
        Observable::new(vec![Rational::zero(), Rational::one()], vec![c.clone(), c]).unwrap()
    }

    /// Tent of height 1 at `peak`, supported on the open arc of half-width
    /// `half_width` around it; `0 < half_width <= 1/2`.
    pub fn tent(peak: &CirclePoint, half_width: &Rational) -> Result<Self> {
        if !half_width.is_positive() || *half_width > Rational::half() {
            return Err(Error::InvalidInput(format!("tent half-width {half_width} outside (0, 1/2]")));
        }
        let p = peak.value();
        let knots = vec![
            (p - half_width, Rational::zero()),
            (p.clone(), Rational::one()),
            (p + half_width, Rational::zero()),
            (p - half_width + Rational::one(), Rational::zero()),
        ];
        let mut knots = knots;
        knots.dedup_by(|b, a| a.0 == b.0);
        PlLift::from_period_knots(knots, BigInt::zero()).map(|l| Observable { lift: l })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.lift.breaks
    }

    pub fn values(&self) -> &[Rational] {
        &self.lift.values
    }

    /// Value at any real lift coordinate (periodic).
    pub fn evaluate_lift(&self, t: &Rational) -> Rational {
        self.lift.eval(t)
    }

    pub fn evaluate(&self, x: &CirclePoint) -> Rational {
        self.lift.eval(x.value())
    }

    pub fn sup_norm(&self) -> Rational {
        self.lift.values.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero)
    }

    /// `(min, max)` over the closed lift interval `[a, b]`.
    pub fn range_on(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let mut lo = self.lift.eval(a);
        let mut hi = lo.clone();
        let mut add = |v: Rational| {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        };
        add(self.lift.eval(b));
        let mut k = a.floor();
        loop {
            let base = Rational::from_bigint(k.clone());
            if &base > b {
                break;
            }
            for (x, v) in self.lift.breaks.iter().zip(&self.lift.values) {
                let t = &base + x;
                if &t > a && &t < b {
                    add(v.clone());
                }
            }
            k += 1;
        }
        (lo, hi)
    }

    /// Oscillation `max - min` over the closed lift interval `[a, b]`.
    pub fn oscillation_on(&self, a: &Rational, b: &Rational) -> Rational {
        let (lo, hi) = self.range_on(a, b);
        hi - lo
    }

    /// Exact `∫_a^b φ` for `0 <= a <= b <= 1`.
    pub fn integral_on_unit(&self, a: &Rational, b: &Rational) -> Rational {
        let mut total = Rational::zero();
        let half = Rational::half();
        let br = &self.lift.breaks;
        for i in 0..self.lift.pieces() {
            let lo = a.clone().max(br[i].clone());
            let hi = b.clone().min(br[i + 1].clone());
            if lo < hi {
                let (u, v) = (self.lift.eval(&lo), self.piece_value(i, &hi));
                total += (&hi - &lo) * (u + v) * &half;
            }
        }
        total
    }

    fn piece_value(&self, i: usize, x: &Rational) -> Rational {
        let br = &self.lift.breaks;
        let vs = &self.lift.values;
        &vs[i] + (&vs[i + 1] - &vs[i]) * (x - &br[i]) / (&br[i + 1] - &br[i])
    }

    /// `φ ∘ g`.
    pub fn pull_back(&self, g: &PLCircleMap) -> Result<Observable> {
        self.pull_back_capped(g, DEFAULT_MAX_BREAKPOINTS)
    }

    pub fn pull_back_capped(&self, g: &PLCircleMap, cap: usize) -> Result<Observable> {
        PlLift::compose(&self.lift, g.lift_ref(), cap).map(|l| Observable { lift: l })
    }

    /// `a φ + b ψ`.
    pub fn combine(&self, a: &Rational, other: &Observable, b: &Rational) -> Observable {
        let merged = PlLift::merged(&self.lift, &other.lift);
        let (xs, vs): (Vec<_>, Vec<_>) = merged.into_iter().map(|(x, u, v)| (x, a * u + b * v)).unzip();
        Observable { lift: PlLift::new(xs, vs, BigInt::zero()).expect("merged breakpoints").simplify() }
    }
}
