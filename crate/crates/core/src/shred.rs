//! Trapping-region perturbation of continuous circle maps.
//!
//! The circle is cut into `|I|` cells `R_i`, each cut into `|J|` subcells
//! `R_ij`. The perturbed map `g` agrees with `f` on subcell endpoints, is
//! constant (equal to an anchor `p_{τ(i)j}`) on the closed `δ`-interior of
//! each subcell, and affine on the two collars in between.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Arc, CirclePoint, Rational};
use crate::pl::{Observable, PLCircleMap};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShredConfig {
    /// Number of cells `|I|`; the smallest feasible count when absent.
    pub cells: Option<usize>,
    /// Number of subcells per cell `|J|`; the smallest count above `1/ε` when absent.
    pub subdivisions: Option<usize>,
    /// Collar width; a quarter of the subcell length, halved until enough
    /// measure is left, when absent.
    pub delta: Option<Rational>,
    /// Explicit cell map `τ`; by default `τ(i)` is the cell holding `f(mid R_i)`.
    pub tau: Option<Vec<usize>>,
}

/// One trapping region `U_(r,j)` and its cycle of small sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Region {
    /// Index `r` of the periodic orbit of `τ`.
    pub orbit: usize,
    /// Subcell index `j`.
    pub sub: usize,
    /// Open arcs whose union is the region.
    pub arcs: Vec<Arc>,
    /// Open arcs `W^1, ..., W^k` visited cyclically.
    pub cycle: Vec<Arc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ItemVerdict {
    pub item: String,
    pub passed: bool,
    /// Smallest exact margin by which the property holds (when it does).
    pub slack: Option<Rational>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub items: Vec<ItemVerdict>,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn min_slack(&self) -> Option<Rational> {
        self.items.iter().filter_map(|i| i.slack.clone()).min()
    }

    pub fn first_failure(&self) -> Option<&ItemVerdict> {
        self.items.iter().find(|i| !i.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrappingReport {
    pub eps: Rational,
    pub delta: Rational,
    pub cells: Vec<Arc>,
    pub subcells: Vec<Vec<Arc>>,
    /// Open `δ`-interiors `R_ij^δ`.
    pub interiors: Vec<Vec<Arc>>,
    pub anchors: Vec<Vec<CirclePoint>>,
    pub tau: Vec<usize>,
    /// Periodic orbits `O_r` of `τ`, each starting at its smallest element.
    pub orbits: Vec<Vec<usize>>,
    pub regions: Vec<Region>,
    /// Exact `d_{C^0}(f, g)`.
    pub distance: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

/// Smallest `|I|` with `(Lip(f) + 1) / |I| < ε`.
pub fn minimal_cells(f: &PLCircleMap, eps: &Rational) -> usize {
    let bound = (f.lipschitz() + Rational::one()) / eps;
    let n = bound.floor() + 1;
    usize::try_from(n).unwrap_or(usize::MAX)
}

/// Builds `g` and the trapping report.
pub fn shred(f: &PLCircleMap, eps: &Rational, cfg: &ShredConfig) -> Result<(PLCircleMap, TrappingReport)> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::InvalidInput(format!("epsilon {eps} outside (0, 1]")));
    }
    let need_cells = minimal_cells(f, eps);
    let ni = cfg.cells.unwrap_or(need_cells);
    if ni < need_cells {
        return Err(Error::Infeasible(format!(
            "{ni} cells are too coarse for epsilon {eps}; at least {need_cells} are needed"
        )));
    }
    let min_sub = (eps.recip().floor() + 1u32).try_into().unwrap_or(usize::MAX);
    let nj = cfg.subdivisions.unwrap_or(min_sub);
    if nj < min_sub {
        return Err(Error::Infeasible(format!("{nj} subdivisions do not exceed 1/epsilon; need {min_sub}")));
    }
    let cap = crate::pl::DEFAULT_MAX_BREAKPOINTS / 4;
    if ni.saturating_mul(nj) > cap {
        return Err(Error::ResourceExhausted { what: "shredding subcells", needed: ni.saturating_mul(nj), cap });
    }
    let total = Rational::from_integer((ni * nj) as i64);
    let sub_len = total.recip();
    let cell_len = Rational::from_integer(ni as i64).recip();
    let delta = match &cfg.delta {
        Some(d) => {
            if !d.is_positive() || d * Rational::from_integer(2) >= sub_len {
                return Err(Error::InvalidInput(format!("delta {d} must lie in (0, subcell length / 2)")));
            }
            d.clone()
        }
        None => {
            let mut d = &sub_len / Rational::from_integer(4);
            while Rational::from_integer(2) * &d * &total >= *eps {
                d = d / Rational::from_integer(2);
            }
            d
        }
    };
    if Rational::from_integer(2) * &delta * &total >= *eps {
        return Err(Error::Infeasible(format!("delta {delta} leaves too little measure in the interiors")));
    }

    let cell_start = |i: usize| Rational::from_integer(i as i64) * &cell_len;
    let sub_start = |i: usize, j: usize| Rational::from_integer((i * nj + j) as i64) * &sub_len;
    let cell_of = |y: &Rational| -> usize {
        let idx = (y.fract() * Rational::from_integer(ni as i64)).floor();
        usize::try_from(idx).expect("cell index in range")
    };

    let tau: Vec<usize> = match &cfg.tau {
        Some(t) => {
            if t.len() != ni || t.iter().any(|&x| x >= ni) {
                return Err(Error::InvalidInput(format!("tau must map {ni} cells into themselves")));
            }
            for (i, &ti) in t.iter().enumerate() {
                let (lo, hi) = f.image_interval(&cell_start(i), &cell_start(i + 1));
                if !closed_intervals_meet_mod1(&lo, &hi, &cell_start(ti), &cell_start(ti + 1)) {
                    return Err(Error::InvalidInput(format!("f(R_{i}) does not meet R_{ti}")));
                }
            }
            t.clone()
        }
        None => (0..ni)
            .map(|i| {
                let mid = &cell_start(i) + &cell_len / Rational::from_integer(2);
                cell_of(&f.lift_evaluate(&mid))
            })
            .collect(),
    };

    let half = Rational::half();
    let mut breaks = Vec::with_capacity(4 * ni * nj + 1);
    let mut values = Vec::with_capacity(4 * ni * nj + 1);
    let mut cells = Vec::with_capacity(ni);
    let mut subcells = Vec::with_capacity(ni);
    let mut interiors = Vec::with_capacity(ni);
    let mut anchors = Vec::with_capacity(ni);
    for i in 0..ni {
        cells.push(Arc::from_lift(&cell_start(i), cell_len.clone())?);
        let mut srow = Vec::with_capacity(nj);
        let mut irow = Vec::with_capacity(nj);
        let mut arow = Vec::with_capacity(nj);
        for j in 0..nj {
            let a = sub_start(i, j);
            srow.push(Arc::from_lift(&a, sub_len.clone())?);
            irow.push(Arc::from_lift(&(&a + &delta), &sub_len - Rational::from_integer(2) * &delta)?);
            arow.push(CirclePoint::from_lift(&(&a + &sub_len * &half)));
        }
        subcells.push(srow);
        interiors.push(irow);
        anchors.push(arow);
    }
    for i in 0..ni {
        let ti = tau[i];
        // lift level of R_{τ(i)} next to f(mid R_i)
        let mid = &cell_start(i) + &cell_len * &half;
        let y = f.lift_evaluate(&mid);
        let base = Rational::from_bigint(y.floor());
        for j in 0..nj {
            let a = sub_start(i, j);
            let b = &a + &sub_len;
            let p = anchors[ti][j].value();
            let mut level = &base + p;
            // keep the anchor lift within one cell of f(mid R_i)
            if &level - &y > half {
                level -= &Rational::one();
            } else if &y - &level > half {
                level += &Rational::one();
            }
            breaks.push(a.clone());
            values.push(f.lift_evaluate(&a));
            breaks.push(&a + &delta);
            values.push(level.clone());
            breaks.push(&b - &delta);
            values.push(level);
        }
    }
    breaks.push(Rational::one());
    values.push(f.lift_evaluate(&Rational::one()));
    let g = PLCircleMap::new(breaks, values)?;
    let distance = f.c0_distance(&g);
    if distance >= *eps {
        return Err(Error::Infeasible(format!("perturbation moved points by {distance}, not below {eps}")));
    }

    let orbits = periodic_orbits(&tau);
    let basin = orbit_basins(&tau, &orbits);
    let mut regions = Vec::with_capacity(orbits.len() * nj);
    for (r, orbit) in orbits.iter().enumerate() {
        let members: Vec<usize> = (0..ni).filter(|&i| basin[i] == r).collect();
        let alpha = orbit[0];
        for j in 0..nj {
            let arcs = members.iter().map(|&i| interiors[i][j].clone()).collect();
            let mut cycle = Vec::with_capacity(orbit.len());
            let mut c = tau[alpha];
            for _ in 0..orbit.len() {
                cycle.push(interiors[c][j].clone());
                c = tau[c];
            }
            regions.push(Region { orbit: r, sub: j, arcs, cycle });
        }
    }
    let report = TrappingReport {
        eps: eps.clone(),
        delta,
        cells,
        subcells,
        interiors,
        anchors,
        tau,
        orbits,
        regions,
        distance,
        verification: None,
    };
    Ok((g, report))
}

fn closed_intervals_meet_mod1(lo: &Rational, hi: &Rational, a: &Rational, b: &Rational) -> bool {
    // shift [a, b] by the integer that puts a just above lo - 1
    let k = (lo - a).floor();
    let mut shift = Rational::from_bigint(k);
    loop {
        let (sa, sb) = (a + &shift, b + &shift);
        if &sa > hi {
            return false;
        }
        if &sb >= lo {
            return true;
        }
        shift += Rational::one();
    }
}

/// Periodic orbits of a self-map of `{0, ..., n-1}`, each listed from its
/// smallest element, ordered by that element.
pub fn periodic_orbits(tau: &[usize]) -> Vec<Vec<usize>> {
    let n = tau.len();
    let mut periodic = BTreeSet::new();
    for i in 0..n {
        // after n steps every point is on a cycle
        let mut x = i;
        for _ in 0..n {
            x = tau[x];
        }
        periodic.insert(x);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for &s in &periodic {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut x = tau[s];
        while x != s {
            seen[x] = true;
            orbit.push(x);
            x = tau[x];
        }
        out.push(orbit);
    }
    out
}

/// For each point, the index of the periodic orbit it falls into.
fn orbit_basins(tau: &[usize], orbits: &[Vec<usize>]) -> Vec<usize> {
    let mut which = vec![usize::MAX; tau.len()];
    for (r, o) in orbits.iter().enumerate() {
        for &x in o {
            which[x] = r;
        }
    }
    (0..tau.len())
        .map(|i| {
            let mut x = i;
            while which[x] == usize::MAX {
                x = tau[x];
            }
            which[x]
        })
        .collect()
}

fn closure(arc: &Arc) -> (Rational, Rational) {
    (arc.start().value().clone(), arc.end_lift())
}

/// Best margin by which closed `[lo, hi]` sits inside one of the open arcs.
fn inside_any(arcs: &[Arc], lo: &Rational, hi: &Rational) -> Option<Rational> {
    arcs.iter().filter_map(|a| a.closed_margin(lo, hi)).max()
}

/// Lebesgue measure of a union of closed lift intervals.
fn union_measure(intervals: &[(Rational, Rational)]) -> Rational {
    let mut pieces: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in intervals {
        if hi - lo >= Rational::one() {
            return Rational::one();
        }
        pieces.extend(crate::exact::split_unit(lo, hi));
    }
    pieces.sort();
    let mut total = Rational::zero();
    let mut cur: Option<(Rational, Rational)> = None;
    for (a, b) in pieces {
        match &mut cur {
            Some((_, e)) if a <= *e => {
                if b > *e {
                    *e = b;
                }
            }
            _ => {
                if let Some((s, e)) = cur.take() {
                    total += e - s;
                }
                cur = Some((a, b));
            }
        }
    }
    if let Some((s, e)) = cur {
        total += e - s;
    }
    total
}

fn arc_diameter(a: &Arc) -> Rational {
    a.length().clone().min(Rational::half())
}

fn verdict(item: &str, failures: Vec<String>, slack: Option<Rational>, ok_detail: String) -> ItemVerdict {
    if failures.is_empty() {
        ItemVerdict { item: item.into(), passed: true, slack, detail: ok_detail }
    } else {
        ItemVerdict { item: item.into(), passed: false, slack: None, detail: failures.join("; ") }
    }
}

fn min_opt(a: Option<Rational>, b: Rational) -> Option<Rational> {
    Some(match a {
        Some(x) => x.min(b),
        None => b,
    })
}

/// Exact check of the five trapping properties for `g` and the regions of
/// `report`.
pub fn verify_shredding(g: &PLCircleMap, report: &TrappingReport) -> Verification {
    let eps = &report.eps;
    let horizon = report.cells.len();
    let mut items = Vec::with_capacity(5);

    // i) g(closure U) ⊂ U
    let mut fails = Vec::new();
    let mut slack: Option<Rational> = None;
    for (u, reg) in report.regions.iter().enumerate() {
        for arc in &reg.arcs {
            let (a, b) = closure(arc);
            let (lo, hi) = g.image_interval(&a, &b);
            match inside_any(&reg.arcs, &lo, &hi) {
                Some(m) => slack = min_opt(slack, m),
                None => {
                    fails.push(format!("region {u}: image [{lo}, {hi}] of closed arc at {a} leaves the region"));
                    break;
                }
            }
        }
    }
    items.push(verdict("i", fails, slack.clone(), format!("{} regions map their closures inside", report.regions.len())));

    // ii) m(U) < ε, with regions pairwise disjoint
    let mut fails = Vec::new();
    let mut slack: Option<Rational> = None;
    let mut all: Vec<(Rational, Rational)> = Vec::new();
    let mut sum = Rational::zero();
    for (u, reg) in report.regions.iter().enumerate() {
        let iv: Vec<(Rational, Rational)> = reg.arcs.iter().map(closure).collect();
        let m = union_measure(&iv);
        sum += &m;
        all.extend(iv);
        if m >= *eps {
            fails.push(format!("region {u} has measure {m}"));
        } else {
            slack = min_opt(slack, eps - &m);
        }
    }
    let union = union_measure(&all);
    if union != sum {
        fails.push("regions overlap".into());
    }
    items.push(verdict("ii", fails, slack, "every region is smaller than epsilon".into()));

    // iii) m(∪U) > 1 - ε
    let margin = &union - (Rational::one() - eps);
    let fails = if margin.is_positive() { vec![] } else { vec![format!("regions cover only {union}")] };
    items.push(verdict("iii", fails, Some(margin), format!("regions cover {union}")));

    // iv) m(g(U)) < ε m(U)
    let mut fails = Vec::new();
    let mut slack: Option<Rational> = None;
    for (u, reg) in report.regions.iter().enumerate() {
        let iv: Vec<(Rational, Rational)> = reg.arcs.iter().map(closure).collect();
        let m = union_measure(&iv);
        let images: Vec<(Rational, Rational)> = iv.iter().map(|(a, b)| g.image_interval(a, b)).collect();
        let gm = union_measure(&images);
        let bound = eps * &m;
        if gm < bound {
            slack = min_opt(slack, bound - gm);
        } else {
            fails.push(format!("region {u}: m(g(U)) = {gm} is not below {bound}"));
        }
    }
    items.push(verdict("iv", fails, slack, "every region is crushed".into()));

    // v) cycles of small sets absorbing the region
    let mut fails = Vec::new();
    let mut slack: Option<Rational> = None;
    for (u, reg) in report.regions.iter().enumerate() {
        let k = reg.cycle.len();
        if k == 0 {
            fails.push(format!("region {u} has an empty cycle"));
            continue;
        }
        for (i, w) in reg.cycle.iter().enumerate() {
            let d = arc_diameter(w);
            if d >= *eps {
                fails.push(format!("region {u}: W^{} has diameter {d}", i + 1));
            } else {
                slack = min_opt(slack, eps - d);
            }
            let (a, b) = closure(w);
            let (lo, hi) = g.image_interval(&a, &b);
            match reg.cycle[(i + 1) % k].closed_margin(&lo, &hi) {
                Some(m) => slack = min_opt(slack, m),
                None => fails.push(format!("region {u}: g(closure W^{}) is not inside the next set", i + 1)),
            }
        }
        for arc in &reg.arcs {
            let (mut lo, mut hi) = closure(arc);
            let mut landed = None;
            for _ in 0..=horizon {
                if let Some(m) = inside_any(&reg.cycle, &lo, &hi) {
                    landed = Some(m);
                    break;
                }
                let next = g.image_interval(&lo, &hi);
                lo = next.0;
                hi = next.1;
            }
            match landed {
                Some(m) => slack = min_opt(slack, m),
                None => fails.push(format!("region {u}: closed arc at {} does not reach the cycle", arc.start().value())),
            }
        }
    }
    items.push(verdict("v", fails, slack, format!("cycles absorb every region within {horizon} steps")));
    Verification { items }
}

/// `V = ∪_j U_j` with `m(V)` and `m(g(V))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularityWitness {
    pub arcs: Vec<Arc>,
    pub measure: Rational,
    pub image_measure: Rational,
}

/// Large set crushed to a small one; refused unless the report verifies and
/// `m(V) > 1 - ε`, `m(g(V)) < ε`.
pub fn singularity_witness(g: &PLCircleMap, report: &TrappingReport) -> Result<SingularityWitness> {
    let v = verify_shredding(g, report);
    if let Some(fail) = v.first_failure() {
        return Err(Error::Refused(format!("report does not verify: item {} ({})", fail.item, fail.detail)));
    }
    let arcs: Vec<Arc> = report.regions.iter().flat_map(|r| r.arcs.iter().cloned()).collect();
    let iv: Vec<(Rational, Rational)> = arcs.iter().map(closure).collect();
    let measure = union_measure(&iv);
    let images: Vec<(Rational, Rational)> = iv.iter().map(|(a, b)| g.image_interval(a, b)).collect();
    let image_measure = union_measure(&images);
    let eps = &report.eps;
    if measure <= Rational::one() - eps || image_measure >= *eps {
        return Err(Error::Refused(format!(
            "no witness at scale {eps}: m(V) = {measure}, m(g(V)) = {image_measure}"
        )));
    }
    Ok(SingularityWitness { arcs, measure, image_measure })
}

/// Exact finite average and the bracket `Γ ± (δ + (r/n) c)` for an orbit
/// started in a cycle set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapBound {
    pub gamma: Rational,
    /// Largest oscillation of the observable over the closed cycle sets.
    pub oscillation: Rational,
    pub cycle_length: usize,
    pub remainder: usize,
    pub lower: Rational,
    pub upper: Rational,
    /// `(1/n) Σ_{m=1}^{n} φ(g^m(x))`.
    pub average: Rational,
    pub holds: bool,
}

/// Bracket for `(1/n) Σ_{m=1}^n φ(g^m x)` when `x` lies in a cycle set.
///
/// The remainder term uses `max(‖φ‖, sup|φ - Γ|)`, which is `‖φ‖` for
/// nonnegative observables.
pub fn birkhoff_gap_bound(
    g: &PLCircleMap,
    report: &TrappingReport,
    phi: &Observable,
    x: &CirclePoint,
    n: usize,
) -> Result<GapBound> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (cycle, start) = report
        .regions
        .iter()
        .find_map(|r| r.cycle.iter().position(|w| w.contains_open(x)).map(|i| (&r.cycle, i)))
        .ok_or_else(|| Error::InvalidInput(format!("point {} is not in a cycle set", x.value())))?;
    let k = cycle.len();
    let oscillation = (0..k)
        .map(|i| {
            let (a, b) = closure(&cycle[(start + i) % k]);
            phi.oscillation_on(&a, &b)
        })
        .max()
        .unwrap_or_else(Rational::zero);
    let mut orbit = Vec::with_capacity(k);
    let mut y = x.clone();
    for _ in 0..k {
        orbit.push(phi.evaluate(&y));
        y = g.evaluate(&y);
    }
    let gamma: Rational = orbit.iter().sum::<Rational>() / Rational::from_integer(k as i64);
    let average = crate::classify::birkhoff_sum_from(g, x, phi, 1, n) / Rational::from_integer(n as i64);
    let (phi_min, phi_max) = phi.range_on(&Rational::zero(), &Rational::one());
    let spread = (&phi_max - &gamma).max(&gamma - &phi_min).max(phi.sup_norm());
    let r = n % k;
    let width = &oscillation + Rational::from_integer(r as i64) / Rational::from_integer(n as i64) * spread;
    let lower = &gamma - &width;
    let upper = &gamma + &width;
    let holds = lower <= average && average <= upper;
    Ok(GapBound { gamma, oscillation, cycle_length: k, remainder: r, lower, upper, average, holds })
}

/// The five-cell, four-subcell example whose cell map has exactly the two
/// fixed cells `1` and `3` (counting from 1): `f` is flat at the midpoint of
/// cell 1 over cells 1-2 and flat at the midpoint of cell 3 over cells 3-5.
pub fn eight_region_example() -> (PLCircleMap, Rational, ShredConfig) {
    let mid = |i: i64| Rational::new(2 * i + 1, 10);
    let knots = vec![
        (mid(0), mid(0)),
        (mid(1), mid(0)),
        (mid(2), mid(2)),
        (mid(3), mid(2)),
        (mid(4), mid(2)),
        (mid(0) + Rational::one(), mid(0)),
    ];
    let f = PLCircleMap::from_lift_knots(knots, 0).expect("valid knots");
    let cfg = ShredConfig { cells: Some(5), subdivisions: Some(4), delta: None, tau: None };
    (f, Rational::new(3, 4), cfg)
}
