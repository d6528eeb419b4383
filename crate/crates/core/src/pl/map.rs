use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::lift::{sup_dist_to_integer, PlLift};
use crate::error::{Error, Result};
use crate::exact::{CirclePoint, Rational};

/// Default cap on breakpoints produced by composition and iteration.
pub const DEFAULT_MAX_BREAKPOINTS: usize = 1_000_000;

/// A continuous piecewise-linear circle map given by its lift on `[0, 1]`.
///
/// Stored canonically: `F(0)` in `[0, 1)` and no collinear interior
/// breakpoints, so structural equality is equality of circle maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLCircleMap {
    lift: PlLift,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MapRecord {
    breakpoints: Vec<Rational>,
    lift_values: Vec<Rational>,
}

impl Serialize for PLCircleMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRecord { breakpoints: self.lift.breaks.clone(), lift_values: self.lift.values.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLCircleMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapRecord::deserialize(d)?;
        PLCircleMap::new(r.breakpoints, r.lift_values).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for PLCircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL(deg {}; ", self.lift.shift)?;
        for (x, y) in self.lift.breaks.iter().zip(&self.lift.values) {
            write!(f, "{x}->{y} ")?;
        }
        write!(f, ")")
    }
}

impl PLCircleMap {
    /// Map from breakpoints `0 = x_0 < ... < x_m = 1` and lift values.
    /// The degree `F(1) - F(0)` must be an integer.
    pub fn new(breakpoints: Vec<Rational>, lift_values: Vec<Rational>) -> Result<Self> {
        if lift_values.len() < 2 {
            return Err(Error::InvalidInput("a map needs at least two breakpoints".into()));
        }
        let deg = &lift_values[lift_values.len() - 1] - &lift_values[0];
        if !deg.is_integer() {
            return Err(Error::InvalidInput(format!("degree {deg} is not an integer")));
        }
        let lift = PlLift::new(breakpoints, lift_values, deg.floor())?;
        Ok(Self::canonical(lift))
    }

    pub(crate) fn canonical(mut lift: PlLift) -> Self {
        let k = lift.values[0].floor();
        if !k.is_zero() {
            let kq = Rational::from_bigint(k);
            for v in lift.values.iter_mut() {
                *v -= &kq;
            }
        }
        PLCircleMap { lift: lift.simplify() }
    }

    /// Map from knots `(x, F(x))` spanning one period `[a, a + 1]`.
    pub fn from_lift_knots(knots: Vec<(Rational, Rational)>, degree: i64) -> Result<Self> {
        PlLift::from_period_knots(knots, BigInt::from(degree)).map(Self::canonical)
    }

    pub fn identity() -> Self {
        Self::rotation(&Rational::zero())
    }

    pub fn rotation(angle: &Rational) -> Self {
        let a = angle.fract();
        let b = &a + Rational::one();
        Self::canonical(PlLift {
            breaks: vec![Rational::zero(), Rational::one()],
            values: vec![a, b],
            shift: BigInt::one(),
        })
    }

    /// The linear map `x -> ell x mod 1`; `|ell| >= 2`.
    pub fn expanding(ell: i64) -> Result<Self> {
        if ell.abs() < 2 {
            return Err(Error::InvalidInput(format!("expanding map needs |ell| >= 2, got {ell}")));
        }
        Self::linear(ell)
    }

    /// `x -> d x mod 1` for any integer `d`.
    pub fn linear(d: i64) -> Result<Self> {
        Self::new(vec![Rational::zero(), Rational::one()], vec![Rational::zero(), Rational::from_integer(d)])
    }

    pub(crate) fn lift_ref(&self) -> &PlLift {
        &self.lift
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.lift.breaks
    }

    pub fn lift_values(&self) -> &[Rational] {
        &self.lift.values
    }

    pub fn degree(&self) -> &BigInt {
        &self.lift.shift
    }

    pub fn degree_i64(&self) -> i64 {
        self.lift.shift.to_i64().unwrap_or(i64::MAX)
    }

    pub fn piece_count(&self) -> usize {
        self.lift.pieces()
    }

    pub fn slope(&self, piece: usize) -> Rational {
        self.lift.slope(piece)
    }

    /// Largest absolute slope, an exact Lipschitz constant for the lift.
    pub fn lipschitz(&self) -> Rational {
        (0..self.piece_count()).map(|i| self.slope(i).abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn lift_evaluate(&self, t: &Rational) -> Rational {
        self.lift.eval(t)
    }

    pub fn evaluate(&self, x: &CirclePoint) -> CirclePoint {
        CirclePoint::from_lift(&self.lift.eval(x.value()))
    }

    pub fn is_homeomorphism(&self) -> bool {
        if !self.lift.shift.abs().is_one() {
            return false;
        }
        let up = self.lift.shift.is_positive();
        self.lift.values.windows(2).all(|w| if up { w[0] < w[1] } else { w[0] > w[1] })
    }

    pub fn is_orientation_preserving_homeo(&self) -> bool {
        self.is_homeomorphism() && self.lift.shift.is_positive()
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PLCircleMap) -> Result<PLCircleMap> {
        self.compose_capped(g, DEFAULT_MAX_BREAKPOINTS)
    }

    pub fn compose_capped(&self, g: &PLCircleMap, cap: usize) -> Result<PLCircleMap> {
        PlLift::compose(&self.lift, &g.lift, cap).map(Self::canonical)
    }

    pub fn iterate(&self, n: usize) -> Result<PLCircleMap> {
        self.iterate_capped(n, DEFAULT_MAX_BREAKPOINTS)
    }

    pub fn iterate_capped(&self, n: usize, cap: usize) -> Result<PLCircleMap> {
        let mut acc = PLCircleMap::identity();
        for _ in 0..n {
            acc = self.compose_capped(&acc, cap)?;
        }
        Ok(acc)
    }

    pub fn invert(&self) -> Result<PLCircleMap> {
        if !self.is_homeomorphism() {
            return Err(Error::NotHomeomorphism);
        }
        let mut knots: Vec<(Rational, Rational)> =
            self.lift.values.iter().cloned().zip(self.lift.breaks.iter().cloned()).collect();
        if self.lift.shift.is_negative() {
            knots.reverse();
        }
        PlLift::from_period_knots(knots, self.lift.shift.clone()).map(Self::canonical)
    }

    /// Exact `sup_x d(f(x), g(x))` for the flat circle metric.
    pub fn c0_distance(&self, g: &PLCircleMap) -> Rational {
        let merged = PlLift::merged(&self.lift, &g.lift);
        let diffs: Vec<Rational> = merged.into_iter().map(|(_, a, b)| a - b).collect();
        sup_dist_to_integer(diffs.windows(2).map(|w| (&w[0], &w[1])))
    }

    /// Exact image of the closed lift interval `[a, b]` as a lift interval
    /// `[lo, hi]` (min and max of the lift over it).
    pub fn image_interval(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let mut lo = self.lift.eval(a);
        let mut hi = lo.clone();
        let mut consider = |v: Rational| {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        };
        consider(self.lift.eval(b));
        let br = &self.lift.breaks;
        let mut k = a.floor();
        loop {
            let base = Rational::from_bigint(k.clone());
            if &base > b {
                break;
            }
            let (ua, ub) = (a - &base, b - &base);
            let from = br.partition_point(|x| x <= &ua);
            let to = br.partition_point(|x| x < &ub);
            for x in br.iter().take(to).skip(from) {
                consider(self.lift.eval(&(&base + x)));
            }
            k += 1;
        }
        (lo, hi)
    }
}
