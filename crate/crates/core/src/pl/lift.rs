//! Piecewise-affine lifts `F: R -> R` with `F(t + 1) = F(t) + shift`.
//!
//! Shared by circle maps (`shift` = degree) and observables (`shift` = 0).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct PlLift {
    /// `0 = x_0 < x_1 < ... < x_m = 1`
    pub(crate) breaks: Vec<Rational>,
    pub(crate) values: Vec<Rational>,
    pub(crate) shift: BigInt,
}

impl PlLift {
    pub(crate) fn new(breaks: Vec<Rational>, values: Vec<Rational>, shift: BigInt) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "need matching breakpoint/value lists of length >= 2, got {} and {}",
                breaks.len(),
                values.len()
            )));
        }
        if !breaks[0].is_zero() || breaks[breaks.len() - 1] != Rational::one() {
            return Err(Error::InvalidInput("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        Ok(PlLift { breaks, values, shift })
    }

    pub(crate) fn pieces(&self) -> usize {
        self.breaks.len() - 1
    }

    pub(crate) fn slope(&self, i: usize) -> Rational {
        (&self.values[i + 1] - &self.values[i]) / (&self.breaks[i + 1] - &self.breaks[i])
    }

    /// Index `i` of the piece `[x_i, x_{i+1})` containing `u` in `[0, 1)`.
    pub(crate) fn piece_of(&self, u: &Rational) -> usize {
        // first break strictly greater than u, minus one
        let pos = self.breaks.partition_point(|b| b <= u);
        pos.saturating_sub(1).min(self.pieces() - 1)
    }

    fn eval_unit(&self, u: &Rational) -> Rational {
        let i = self.piece_of(u);
        let (x0, x1) = (&self.breaks[i], &self.breaks[i + 1]);
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        if u == x0 {
            return y0.clone();
        }
        y0 + (y1 - y0) * (u - x0) / (x1 - x0)
    }

    pub(crate) fn eval(&self, t: &Rational) -> Rational {
        let k = t.floor();
        if k.is_zero() {
            return self.eval_unit(t);
        }
        let u = t - Rational::from_bigint(k.clone());
        self.eval_unit(&u) + Rational::from_bigint(k * &self.shift)
    }

    /// Drops interior breakpoints where adjacent slopes agree.
    pub(crate) fn simplify(mut self) -> Self {
        let mut keep_b = vec![self.breaks[0].clone()];
        let mut keep_v = vec![self.values[0].clone()];
        let m = self.pieces();
        for i in 1..m {
            let left = (&self.values[i] - keep_v.last().unwrap()) / (&self.breaks[i] - keep_b.last().unwrap());
            let right = self.slope(i);
            if left != right {
                keep_b.push(self.breaks[i].clone());
                keep_v.push(self.values[i].clone());
            }
        }
        keep_b.push(self.breaks[m].clone());
        keep_v.push(self.values[m].clone());
        self.breaks = keep_b;
        self.values = keep_v;
        self
    }

    /// Builds a lift from knots covering exactly one period `[a, a+1]`.
    pub(crate) fn from_period_knots(mut knots: Vec<(Rational, Rational)>, shift: BigInt) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("need at least two knots".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("knot abscissae must increase".into()));
        }
        let shift_q = Rational::from_bigint(shift.clone());
        let a = knots[0].0.clone();
        if knots[knots.len() - 1].0 != &a + Rational::one() {
            return Err(Error::InvalidInput("knots must span exactly one period".into()));
        }
        // move the period start into [0, 1)
        let k = a.floor();
        if !k.is_zero() {
            let kq = Rational::from_bigint(k);
            let dv = &kq * &shift_q;
            for (x, y) in knots.iter_mut() {
                *x -= &kq;
                *y -= &dv;
            }
        }
        let a = knots[0].0.clone();
        let one = Rational::one();
        // value at 1, interpolated if needed
        let pos = knots.partition_point(|(x, _)| *x < one);
        if knots[pos].0 != one {
            let (x0, y0) = &knots[pos - 1];
            let (x1, y1) = &knots[pos];
            let y = y0 + (y1 - y0) * (&one - x0) / (x1 - x0);
            knots.insert(pos, (one.clone(), y));
        }
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(knots.len() + 1);
        for (x, y) in knots.iter().filter(|(x, _)| *x >= one) {
            out.push((x - &one, y - &shift_q));
        }
        for (x, y) in knots.iter().filter(|(x, _)| *x > a && *x <= one) {
            out.push((x.clone(), y.clone()));
        }
        // when a == 0 the first list already starts at 0
        if out[0].0 != Rational::zero() {
            return Err(Error::InvalidInput("internal: knot rebase failed".into()));
        }
        out.dedup_by(|b, a| a.0 == b.0);
        let (breaks, values) = out.into_iter().unzip();
        PlLift::new(breaks, values, shift).map(PlLift::simplify)
    }

    /// Exact composition `outer ∘ inner`, capped in breakpoint count.
    pub(crate) fn compose(outer: &PlLift, inner: &PlLift, cap: usize) -> Result<PlLift> {
        let mut xs: Vec<Rational> = Vec::new();
        let mut ts: Vec<Rational> = Vec::new();
        let outer_breaks = &outer.breaks[..outer.breaks.len() - 1];
        for i in 0..inner.pieces() {
            let (x0, x1) = (&inner.breaks[i], &inner.breaks[i + 1]);
            let (g0, g1) = (&inner.values[i], &inner.values[i + 1]);
            xs.push(x0.clone());
            ts.push(g0.clone());
            if g0 == g1 {
                continue;
            }
            let (lo, hi) = if g0 < g1 { (g0, g1) } else { (g1, g0) };
            let turns = (hi.ceil() - lo.floor()).to_usize().unwrap_or(usize::MAX);
            if turns.saturating_mul(outer_breaks.len()).saturating_add(xs.len()) > cap {
                return Err(Error::ResourceExhausted {
                    what: "composition breakpoints",
                    needed: turns.saturating_mul(outer_breaks.len()),
                    cap,
                });
            }
            let mut hits: Vec<Rational> = Vec::new();
            let mut j = lo.floor();
            let top = hi.ceil();
            while j <= top {
                let base = Rational::from_bigint(j.clone());
                for b in outer_breaks {
                    let t = &base + b;
                    if &t > lo && &t < hi {
                        hits.push(t);
                    }
                }
                j += 1;
            }
            if g0 > g1 {
                hits.sort_by(|a, b| b.cmp(a));
            } else {
                hits.sort();
            }
            let dx = x1 - x0;
            let dg = g1 - g0;
            for t in hits {
                xs.push(x0 + &dx * (&t - g0) / &dg);
                ts.push(t);
            }
        }
        xs.push(Rational::one());
        ts.push(inner.values[inner.pieces()].clone());
        if xs.len() > cap {
            return Err(Error::ResourceExhausted { what: "composition breakpoints", needed: xs.len(), cap });
        }
        let values: Vec<Rational> = ts.iter().map(|t| outer.eval(t)).collect();
        let shift = &outer.shift * &inner.shift;
        PlLift::new(xs, values, shift).map(PlLift::simplify)
    }

    /// Merged breakpoints of two lifts with both value lists.
    pub(crate) fn merged(a: &PlLift, b: &PlLift) -> Vec<(Rational, Rational, Rational)> {
        let mut xs: Vec<Rational> = a.breaks.iter().chain(b.breaks.iter()).cloned().collect();
        xs.sort();
        xs.dedup();
        xs.into_iter()
            .map(|x| {
                let (va, vb) = if x == Rational::one() {
                    (a.values[a.pieces()].clone(), b.values[b.pieces()].clone())
                } else {
                    (a.eval(&x), b.eval(&x))
                };
                (x, va, vb)
            })
            .collect()
    }
}

/// `sup` of the distance-to-nearest-integer over affine segments with the
/// given endpoint values; `1/2` as soon as a segment crosses a half-integer.
pub(crate) fn sup_dist_to_integer<'a, I>(segments: I) -> Rational
where
    I: IntoIterator<Item = (&'a Rational, &'a Rational)>,
{
    let half = Rational::half();
    let mut best = Rational::zero();
    for (u, v) in segments {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        // first half-integer >= lo is floor(lo - 1/2) + 1/2 + (1 if below lo)
        let shifted = lo - &half;
        let c = shifted.ceil();
        let h = Rational::from_bigint(c) + &half;
        if &h <= hi {
            return half;
        }
        let d = u.dist_to_integer().max(v.dist_to_integer());
        if d > best {
            best = d;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn lift(b: &[(i64, i64)], v: &[(i64, i64)], s: i64) -> PlLift {
        PlLift::new(
            b.iter().map(|&(n, d)| q!(n, d)).collect(),
            v.iter().map(|&(n, d)| q!(n, d)).collect(),
            BigInt::from(s),
        )
        .unwrap()
    }

    #[test]
    fn eval_extends_periodically() {
        let l = lift(&[(0, 1), (1, 1)], &[(0, 1), (2, 1)], 2);
        assert_eq!(l.eval(&q!(3, 8)), q!(3, 4));
        assert_eq!(l.eval(&q!(11, 8)), q!(11, 4));
        assert_eq!(l.eval(&q!(-1, 8)), q!(-1, 4));
    }

    #[test]
    fn simplify_removes_collinear_knots() {
        let l = lift(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (1, 1), (2, 1)], 2).simplify();
        assert_eq!(l.breaks.len(), 2);
    }

    #[test]
    fn period_knots_rebase() {
        // rotation by 1/3 given on [1/2, 3/2]
        let knots = vec![(q!(1, 2), q!(5, 6)), (q!(3, 2), q!(11, 6))];
        let l = PlLift::from_period_knots(knots, BigInt::from(1)).unwrap();
        assert_eq!(l.breaks, vec![q!(0), q!(1)]);
        assert_eq!(l.values, vec![q!(1, 3), q!(4, 3)]);
    }

    #[test]
    fn half_integer_crossing_detected() {
        let (a, b) = (q!(1, 4), q!(3, 4));
        assert_eq!(sup_dist_to_integer([(&a, &b)]), q!(1, 2));
        let (c, d) = (q!(1, 8), q!(3, 8));
        assert_eq!(sup_dist_to_integer([(&c, &d)]), q!(3, 8));
        let (e, f) = (q!(-3, 8), q!(-1, 8));
        assert_eq!(sup_dist_to_integer([(&e, &f)]), q!(3, 8));
    }
}
