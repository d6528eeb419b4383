//! Exact orbit sums of PL observables.
//!
//! An orbit is traced once; each visited point is filed under the piece of a
//! common refinement of all observables, so every observable's sum at every
//! horizon follows from per-piece counts and coordinate sums. Orbits that
//! revisit a point are closed off as eventually periodic and extended
//! arithmetically.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{CirclePoint, Rational};
use crate::pl::{Observable, PLCircleMap};

/// Observables sharing one refinement of `[0, 1)`.
#[derive(Clone, Debug)]
pub struct Battery {
    breaks: Vec<Rational>,
    /// `[observable][piece] = (c, s)` with `φ(x) = c + s x` on the piece.
    coef: Vec<Vec<(Rational, Rational)>>,
}

impl Battery {
    /// `extra` adds cut points (e.g. cylinder boundaries) to the refinement.
    pub fn new(observables: &[Observable], extra: &[Rational]) -> Self {
        let mut cuts: Vec<Rational> = observables
            .iter()
            .flat_map(|o| o.breakpoints().iter().cloned())
            .chain(extra.iter().map(Rational::fract))
            .filter(|b| b.is_positive() && *b < Rational::one())
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut starts = vec![Rational::zero()];
        starts.extend(cuts.iter().cloned());
        let mut ends = cuts.clone();
        ends.push(Rational::one());
        let coef = observables
            .iter()
            .map(|o| {
                starts
                    .iter()
                    .zip(&ends)
                    .map(|(a, b)| {
                        let (va, vb) = (o.evaluate_lift(a), o.evaluate_lift(b));
                        let s = (&vb - &va) / (b - a);
                        (&va - &s * a, s)
                    })
                    .collect()
            })
            .collect();
        Battery { breaks: cuts, coef }
    }

    pub fn len(&self) -> usize {
        self.coef.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coef.is_empty()
    }

    pub fn pieces(&self) -> usize {
        self.breaks.len() + 1
    }

    /// Index of the piece holding `x ∈ [0, 1)`.
    pub fn piece(&self, x: &Rational) -> usize {
        self.breaks.partition_point(|b| b <= x)
    }

    /// Left end of piece `i`.
    pub fn piece_start(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::zero()
        } else {
            self.breaks[i - 1].clone()
        }
    }

    /// Right end of piece `i`.
    pub fn piece_end(&self, i: usize) -> Rational {
        self.breaks.get(i).cloned().unwrap_or_else(Rational::one)
    }

    fn sums(&self, acc: &Accumulator) -> Vec<Rational> {
        self.coef
            .iter()
            .map(|row| {
                row.iter()
                    .zip(acc.counts.iter().zip(&acc.coords))
                    .filter(|(_, (n, _))| **n > 0)
                    .map(|((c, s), (n, x))| c * Rational::from_integer(*n as i64) + s * x)
                    .sum()
            })
            .collect()
    }
}

/// Snapping of orbit points to multiples of `1/modulus` once their size
/// exceeds `max_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snap {
    pub max_bits: u64,
    pub modulus: BigInt,
}

impl Default for Snap {
    fn default() -> Self {
        // odd modulus: keeps doubling-type maps from collapsing snapped points to 0
        Snap { max_bits: 512, modulus: (BigInt::one() << 128u32) + 51 }
    }
}

#[derive(Clone, Debug, Default)]
struct Accumulator {
    counts: Vec<u64>,
    coords: Vec<Rational>,
}

impl Accumulator {
    fn new(pieces: usize) -> Self {
        Accumulator { counts: vec![0; pieces], coords: vec![Rational::zero(); pieces] }
    }

    fn push(&mut self, piece: usize, x: &Rational) {
        self.counts[piece] += 1;
        self.coords[piece] += x;
    }

    fn add_scaled(&mut self, other: &Accumulator, times: u64) {
        if times == 0 {
            return;
        }
        let t = Rational::from_integer(times as i64);
        for i in 0..self.counts.len() {
            if other.counts[i] > 0 {
                self.counts[i] += other.counts[i] * times;
                self.coords[i] += &other.coords[i] * &t;
            }
        }
    }
}

/// One traced orbit `x_0, x_1, ...` with per-horizon accumulations.
#[derive(Clone, Debug)]
pub struct Trace {
    /// Number of distinct points visited before the first repeat or the
    /// longest horizon.
    pub visited: usize,
    /// `(s, k)`: `x_{s+k} = x_s`.
    pub cycle: Option<(usize, usize)>,
    pub snapped: bool,
    /// Fixed point that absorbs the orbit inside one contracting affine piece.
    pub limit: Option<Rational>,
    cycle_points: Vec<Rational>,
    accs: Vec<Accumulator>,
}

/// A one-step orbit rule on representatives in `[0, 1)`.
pub trait Step {
    fn step(&self, x: &Rational) -> Rational;

    /// `Some(ℓ)` when the rule is `x -> ℓ x mod 1`, which keeps the
    /// denominator and allows integer stepping.
    fn multiplier(&self) -> Option<u32> {
        None
    }

    /// `Some((a, p))` when the rule is `y -> p + a (y - p)` with `0 < a < 1`
    /// on a piece holding `x` and `p`, so the orbit of `x` never leaves it.
    fn contraction(&self, _x: &Rational) -> Option<(Rational, Rational)> {
        None
    }
}

impl Step for PLCircleMap {
    fn step(&self, x: &Rational) -> Rational {
        self.lift_evaluate(x).fract()
    }

    fn contraction(&self, x: &Rational) -> Option<(Rational, Rational)> {
        let (bs, vs) = (self.breakpoints(), self.lift_values());
        let i = bs.partition_point(|b| b <= x).checked_sub(1)?.min(bs.len() - 2);
        let (u, v) = (&bs[i], &bs[i + 1]);
        let a = (&vs[i + 1] - &vs[i]) / (v - u);
        if !a.is_positive() || a >= Rational::one() {
            return None;
        }
        // F(t) - t decreases by less than 1 across the piece
        let k = Rational::from_bigint((&vs[i] - u).floor());
        if k < &vs[i + 1] - v {
            return None;
        }
        let c = &vs[i] - &a * u;
        let p = (c - k) / (Rational::one() - &a);
        Some((a, p))
    }
}

/// `x -> ℓ x mod 1`.
#[derive(Clone, Copy, Debug)]
pub struct Multiply(pub u32);

impl Step for Multiply {
    fn step(&self, x: &Rational) -> Rational {
        let n = (x.numer() * BigInt::from(self.0)) % x.denom();
        Rational::from_big(n, x.denom().clone())
    }

    fn multiplier(&self) -> Option<u32> {
        Some(self.0)
    }
}

/// `|c| a^m < 2^-8 / modulus`, judged in floating point with a margin.
fn negligible(a: &Rational, m: usize, c: &Rational, modulus: &BigInt) -> bool {
    let log_c = c.abs().to_f64().log2();
    let log_a = a.to_f64().log2();
    let limit = -(modulus.bits() as f64) - 8.0;
    log_c.is_finite() && log_a.is_finite() && log_c + m as f64 * log_a < limit
}

fn sorted_horizons(horizons: &[usize]) -> Vec<usize> {
    let mut hs: Vec<usize> = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    hs
}

/// Extends a traced prefix of `len` points by its terminal cycle (the `k`
/// entries starting at `x_s`) to every remaining horizon.
#[allow(clippy::too_many_arguments)]
fn close_cycle<P>(
    hs: &[usize],
    next_h: usize,
    acc: &Accumulator,
    len: usize,
    cyc_pieces: &[usize],
    cyc_points: &[P],
    snaps: &mut Vec<Accumulator>,
    push: impl Fn(&mut Accumulator, usize, &P),
) {
    let k = cyc_points.len();
    let mut cyc = Accumulator::new(acc.counts.len());
    for (p, x) in cyc_pieces.iter().zip(cyc_points) {
        push(&mut cyc, *p, x);
    }
    for &h in &hs[next_h..] {
        let extra = h - len;
        let mut a = acc.clone();
        a.add_scaled(&cyc, (extra / k) as u64);
        for i in 0..extra % k {
            push(&mut a, cyc_pieces[i], &cyc_points[i]);
        }
        snaps.push(a);
    }
}

impl Trace {
    /// Traces `x_0 = x` for `max(horizons)` steps (sums over `k = 0..N-1`).
    pub fn run(step: &dyn Step, x: &Rational, battery: &Battery, horizons: &[usize], snap: Option<&Snap>) -> Trace {
        if let Some(ell) = step.multiplier() {
            return Self::run_multiply(ell, x, battery, horizons);
        }
        let hs = sorted_horizons(horizons);
        let top = hs.last().copied().unwrap_or(0);
        let mut seen: HashMap<Rational, usize> = HashMap::new();
        let mut points = Vec::new();
        let mut pieces = Vec::new();
        let mut acc = Accumulator::new(battery.pieces());
        let mut snaps = Vec::with_capacity(hs.len());
        let mut next_h = 0;
        let mut cycle = None;
        let mut snapped = false;
        let mut limit = None;
        let mut cur = x.fract();
        for k in 0..top {
            if let Some(&s) = seen.get(&cur) {
                cycle = Some((s, k - s));
                break;
            }
            let piece = battery.piece(&cur);
            if let Some((a, p)) = step.contraction(&cur) {
                if p != cur && battery.piece_start(piece) <= p && p <= battery.piece_end(piece) {
                    // x_{k+j} = p + a^j (x_k - p) stays in this piece for good
                    let d = &cur - &p;
                    let one_minus = Rational::one() - &a;
                    let geometric = &d / &one_minus;
                    for &h in &hs[next_h..] {
                        let m = h - k;
                        let base = Rational::from_integer(m as i64) * &p + &geometric;
                        let mut tail = match snap {
                            // a^m d / (1 - a) is far below 1/modulus: drop it
                            Some(sn) if negligible(&a, m, &geometric, &sn.modulus) => {
                                snapped = true;
                                base.round_to_denominator(&sn.modulus)
                            }
                            _ => base - &geometric * a.pow(m as u32),
                        };
                        if let Some(sn) = snap {
                            if tail.bits() > sn.max_bits {
                                tail = tail.round_to_denominator(&sn.modulus);
                                snapped = true;
                            }
                        }
                        let mut t = acc.clone();
                        t.counts[piece] += m as u64;
                        t.coords[piece] += &tail;
                        snaps.push(t);
                    }
                    next_h = hs.len();
                    limit = Some(p);
                    break;
                }
            }
            acc.push(piece, &cur);
            seen.insert(cur.clone(), k);
            points.push(cur.clone());
            pieces.push(piece);
            while next_h < hs.len() && hs[next_h] == k + 1 {
                snaps.push(acc.clone());
                next_h += 1;
            }
            let mut nx = step.step(&cur);
            if let Some(sn) = snap {
                if nx.bits() > sn.max_bits {
                    nx = nx.round_to_denominator(&sn.modulus).fract();
                    snapped = true;
                }
            }
            cur = nx;
        }
        let mut cycle_points = Vec::new();
        if let Some((s, k)) = cycle {
            let (cp, cx) = (&pieces[s..s + k], &points[s..s + k]);
            close_cycle(&hs, next_h, &acc, points.len(), cp, cx, &mut snaps, |a, p, x| a.push(p, x));
            cycle_points = points[s..s + k].to_vec();
        }
        let accs = horizons.iter().map(|h| snaps[hs.binary_search(h).expect("horizon")].clone()).collect();
        Trace { visited: points.len(), cycle, snapped, limit, cycle_points, accs }
    }

    fn run_multiply(ell: u32, x: &Rational, battery: &Battery, horizons: &[usize]) -> Trace {
        let x = x.fract();
        let den = x.denom().clone();
        let ell = BigInt::from(ell);
        // x >= b  iff  numerator >= ceil(b * den)
        let thresholds: Vec<BigInt> = battery
            .breaks
            .iter()
            .map(|b| (b * Rational::from_bigint(den.clone())).ceil())
            .collect();
        let hs = sorted_horizons(horizons);
        let top = hs.last().copied().unwrap_or(0);
        // the orbit is purely periodic once the factors shared with ℓ have
        // left the denominator, which takes at most bits(den) steps
        let anchor_at = den.bits() as usize;
        let mut anchor: Option<BigInt> = None;
        let mut points: Vec<BigInt> = Vec::new();
        let mut pieces = Vec::new();
        let mut counts = vec![0u64; battery.pieces()];
        let mut sums = vec![BigInt::from(0); battery.pieces()];
        let mut int_snaps: Vec<(Vec<u64>, Vec<BigInt>)> = Vec::with_capacity(hs.len());
        let mut next_h = 0;
        let mut cycle = None;
        let mut cur = x.numer().clone();
        let mut visited = 0;
        for k in 0..top {
            if anchor.as_ref() == Some(&cur) {
                cycle = Some((anchor_at, k - anchor_at));
                break;
            }
            if k == anchor_at {
                anchor = Some(cur.clone());
            }
            let piece = thresholds.partition_point(|t| *t <= cur);
            counts[piece] += 1;
            sums[piece] += &cur;
            let next = (&cur * &ell) % &den;
            if k >= anchor_at {
                pieces.push(piece);
                points.push(std::mem::replace(&mut cur, next));
            } else {
                cur = next;
            }
            visited += 1;
            while next_h < hs.len() && hs[next_h] == k + 1 {
                int_snaps.push((counts.clone(), sums.clone()));
                next_h += 1;
            }
        }
        let d = Rational::from_bigint(den.clone());
        let to_acc = |(c, s): (Vec<u64>, Vec<BigInt>)| Accumulator {
            counts: c,
            coords: s.into_iter().map(|n| Rational::from_bigint(n) / &d).collect(),
        };
        let mut snaps: Vec<Accumulator> = int_snaps.into_iter().map(to_acc).collect();
        let mut cycle_points = Vec::new();
        if let Some((s, k)) = cycle {
            let acc = to_acc((counts, sums));
            debug_assert_eq!((s, k), (anchor_at, points.len()));
            close_cycle(&hs, next_h, &acc, visited, &pieces, &points, &mut snaps, |a, p, n| {
                a.counts[p] += 1;
                a.coords[p] += &(Rational::from_bigint(n.clone()) / &d);
            });
            cycle_points = points.iter().map(|n| Rational::from_big(n.clone(), den.clone())).collect();
        }
        let accs = horizons.iter().map(|h| snaps[hs.binary_search(h).expect("horizon")].clone()).collect();
        Trace { visited, cycle, snapped: false, limit: None, cycle_points, accs }
    }

    /// `Σ_{k<N} φ_i(x_k)` for every horizon `N` (outer) and observable `i`.
    pub fn sums(&self, battery: &Battery) -> Vec<Vec<Rational>> {
        self.accs.iter().map(|a| battery.sums(a)).collect()
    }

    /// Visit counts per battery piece at each horizon.
    pub fn piece_counts(&self) -> Vec<&[u64]> {
        self.accs.iter().map(|a| a.counts.as_slice()).collect()
    }

    /// Points of the terminal cycle, if one was found.
    pub fn cycle_points(&self) -> Option<&[Rational]> {
        self.cycle.map(|_| self.cycle_points.as_slice())
    }
}

/// `(1/n) Σ_{k=0}^{n-1} φ(f^k(x))`, exact.
pub fn birkhoff_average(f: &PLCircleMap, x: &CirclePoint, phi: &Observable, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    Ok(birkhoff_sum_from(f, x, phi, 0, n - 1) / Rational::from_integer(n as i64))
}

/// `Σ_{m=from}^{to} φ(f^m(x))`, exact; zero when `from > to`.
pub fn birkhoff_sum_from(f: &PLCircleMap, x: &CirclePoint, phi: &Observable, from: usize, to: usize) -> Rational {
    if from > to {
        return Rational::zero();
    }
    let battery = Battery::new(std::slice::from_ref(phi), &[]);
    let hs = if from == 0 { vec![to + 1] } else { vec![from, to + 1] };
    let t = Trace::run(f, x.value(), &battery, &hs, None);
    let sums = t.sums(&battery);
    if from == 0 {
        sums[0][0].clone()
    } else {
        &sums[1][0] - &sums[0][0]
    }
}

/// Averages at each horizon and their spread `max - min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapRecord {
    pub horizons: Vec<usize>,
    pub averages: Vec<Rational>,
    pub gap: Rational,
}

/// Spread of exact Birkhoff averages over `horizons`.
pub fn birkhoff_gap(f: &PLCircleMap, x: &CirclePoint, phi: &Observable, horizons: &[usize]) -> Result<GapRecord> {
    if horizons.is_empty() || horizons.contains(&0) {
        return Err(Error::InvalidInput("horizons must be nonempty and positive".into()));
    }
    let battery = Battery::new(std::slice::from_ref(phi), &[]);
    let t = Trace::run(f, x.value(), &battery, horizons, None);
    let averages: Vec<Rational> = t
        .sums(&battery)
        .into_iter()
        .zip(horizons)
        .map(|(s, &n)| &s[0] / Rational::from_integer(n as i64))
        .collect();
    Ok(GapRecord { horizons: horizons.to_vec(), gap: spread(&averages), averages })
}

pub(crate) fn spread(v: &[Rational]) -> Rational {
    match (v.iter().max(), v.iter().min()) {
        (Some(a), Some(b)) => a - b,
        _ => Rational::zero(),
    }
}
