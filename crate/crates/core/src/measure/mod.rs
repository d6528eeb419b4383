//! Exact finite measures on the circle: atoms plus piecewise-constant density.

mod cylinder;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use cylinder::{CylinderSpec, Extension};

use crate::error::{Error, Result};
use crate::exact::{split_unit, word_interval, Arc, CirclePoint, Rational, Word};
use crate::pl::{Observable, PLCircleMap};

/// A finite positive measure on `R/Z`.
///
/// Canonical form: atoms sorted by position with positive masses; density
/// pieces are disjoint half-open intervals `[a, b)` of `[0, 1]`, sorted,
/// with positive density and adjacent equal densities merged. Equality of
/// values is therefore equality of measures.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CircleMeasure {
    atoms: Vec<(CirclePoint, Rational)>,
    pieces: Vec<(Rational, Rational, Rational)>,
}

impl fmt::Debug for CircleMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Measure{{")?;
        for (x, w) in &self.atoms {
            write!(f, " {w}@{x:?}")?;
        }
        for (a, b, d) in &self.pieces {
            write!(f, " {d}[{a},{b})")?;
        }
        write!(f, " }}")
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    at: Rational,
    mass: Rational,
}

#[derive(Serialize, Deserialize)]
struct PieceRecord {
    start: Rational,
    length: Rational,
    density: Rational,
}

#[derive(Serialize, Deserialize)]
struct MeasureRecord {
    atoms: Vec<AtomRecord>,
    pieces: Vec<PieceRecord>,
}

impl Serialize for CircleMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRecord {
            atoms: self.atoms.iter().map(|(x, w)| AtomRecord { at: x.value().clone(), mass: w.clone() }).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|(a, b, d)| PieceRecord { start: a.clone(), length: b - a, density: d.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MeasureRecord::deserialize(d)?;
        let build = || -> Result<CircleMeasure> {
            let atoms = r
                .atoms
                .into_iter()
                .map(|a| Ok((CirclePoint::new(a.at)?, a.mass)))
                .collect::<Result<Vec<_>>>()?;
            let pieces = r
                .pieces
                .into_iter()
                .map(|p| Ok((Arc::new(CirclePoint::new(p.start)?, p.length)?, p.density)))
                .collect::<Result<Vec<_>>>()?;
            CircleMeasure::new(atoms, pieces)
        };
        build().map_err(serde::de::Error::custom)
    }
}

impl CircleMeasure {
    /// Probability measure from atoms and density arcs. Atoms must sit at
    /// distinct points, arcs must be disjoint, total mass must be 1.
    pub fn new(atoms: Vec<(CirclePoint, Rational)>, pieces: Vec<(Arc, Rational)>) -> Result<Self> {
        let m = Self::finite(atoms, pieces)?;
        if m.total_mass() != Rational::one() {
            return Err(Error::InvalidInput(format!("total mass is {}, expected 1", m.total_mass())));
        }
        Ok(m)
    }

    /// Finite positive measure with the same validation as [`new`](Self::new)
    /// apart from the unit-mass requirement.
    pub fn finite(atoms: Vec<(CirclePoint, Rational)>, pieces: Vec<(Arc, Rational)>) -> Result<Self> {
        if atoms.iter().any(|(_, w)| w.is_negative()) || pieces.iter().any(|(_, d)| d.is_negative()) {
            return Err(Error::InvalidInput("masses and densities must be nonnegative".into()));
        }
        let mut seen: Vec<&CirclePoint> = atoms.iter().map(|(x, _)| x).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("atoms must sit at distinct points".into()));
        }
        let mut flat: Vec<(Rational, Rational, Rational)> = Vec::new();
        for (arc, d) in &pieces {
            for (a, b) in arc.unit_pieces() {
                flat.push((a, b, d.clone()));
            }
        }
        flat.sort();
        if flat.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidInput("density arcs overlap".into()));
        }
        Ok(Self::from_raw(atoms, flat))
    }

    /// Builds a canonical measure, summing overlapping contributions.
    fn from_raw(atoms: Vec<(CirclePoint, Rational)>, contributions: Vec<(Rational, Rational, Rational)>) -> Self {
        let mut amap: BTreeMap<CirclePoint, Rational> = BTreeMap::new();
        for (x, w) in atoms {
            if !w.is_zero() {
                *amap.entry(x).or_default() += w;
            }
        }
        let atoms = amap.into_iter().filter(|(_, w)| !w.is_zero()).collect();

        let mut events: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (a, b, d) in contributions {
            if a < b && !d.is_zero() {
                *events.entry(a).or_default() += &d;
                *events.entry(b).or_default() -= &d;
            }
        }
        let mut pieces: Vec<(Rational, Rational, Rational)> = Vec::new();
        let mut level = Rational::zero();
        let mut prev: Option<Rational> = None;
        for (x, delta) in events {
            if let Some(p) = prev.take() {
                if !level.is_zero() && p < x {
                    match pieces.last_mut() {
                        Some(last) if last.1 == p && last.2 == level => last.1 = x.clone(),
                        _ => pieces.push((p, x.clone(), level.clone())),
                    }
                }
            }
            level += delta;
            prev = Some(x);
        }
        CircleMeasure { atoms, pieces }
    }

    pub fn lebesgue() -> Self {
        CircleMeasure { atoms: vec![], pieces: vec![(Rational::zero(), Rational::one(), Rational::one())] }
    }

    pub fn dirac(x: CirclePoint) -> Self {
        CircleMeasure { atoms: vec![(x, Rational::one())], pieces: vec![] }
    }

    /// Uniform probability on a finite set of distinct points.
    pub fn uniform_atoms(points: &[CirclePoint]) -> Self {
        let w = Rational::from_integer(points.len() as i64).recip();
        Self::from_raw(points.iter().map(|p| (p.clone(), w.clone())).collect(), vec![])
    }

    pub fn atoms(&self) -> &[(CirclePoint, Rational)] {
        &self.atoms
    }

    /// Density pieces as arcs.
    pub fn pieces(&self) -> Vec<(Arc, Rational)> {
        self.pieces
            .iter()
            .map(|(a, b, d)| (Arc::between(a, b).expect("nonempty piece"), d.clone()))
            .collect()
    }

    /// Density pieces as `[a, b)` sub-intervals of `[0, 1]`.
    pub fn raw_pieces(&self) -> &[(Rational, Rational, Rational)] {
        &self.pieces
    }

    pub fn total_mass(&self) -> Rational {
        let a: Rational = self.atoms.iter().map(|(_, w)| w).sum();
        let p: Rational = self.pieces.iter().map(|(a, b, d)| (b - a) * d).sum();
        a + p
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass() == Rational::one()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return CircleMeasure::default();
        }
        CircleMeasure {
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * c)).collect(),
            pieces: self.pieces.iter().map(|(a, b, d)| (a.clone(), b.clone(), d * c)).collect(),
        }
    }

    pub fn add(&self, other: &CircleMeasure) -> Self {
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        let pieces = self.pieces.iter().chain(&other.pieces).cloned().collect();
        Self::from_raw(atoms, pieces)
    }

    /// `Σ c_i μ_i`.
    pub fn combination(terms: &[(Rational, CircleMeasure)]) -> Self {
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        for (c, m) in terms {
            atoms.extend(m.atoms.iter().map(|(x, w)| (x.clone(), w * c)));
            pieces.extend(m.pieces.iter().map(|(a, b, d)| (a.clone(), b.clone(), d * c)));
        }
        Self::from_raw(atoms, pieces)
    }

    /// Exact push-forward `f_* μ`.
    pub fn pushforward(&self, f: &PLCircleMap) -> Self {
        let atoms = self.atoms.iter().map(|(x, w)| (f.evaluate(x), w.clone())).collect::<Vec<_>>();
        let mut new_atoms = atoms;
        let mut contributions = Vec::new();
        let br = f.breakpoints();
        for (a, b, d) in &self.pieces {
            let start = br.partition_point(|x| x <= a).saturating_sub(1);
            for i in start..f.piece_count() {
                if &br[i] >= b {
                    break;
                }
                let lo = a.clone().max(br[i].clone());
                let hi = b.clone().min(br[i + 1].clone());
                if lo >= hi {
                    continue;
                }
                let s = f.slope(i);
                let flo = f.lift_evaluate(&lo);
                if s.is_zero() {
                    new_atoms.push((CirclePoint::from_lift(&flo), d * (&hi - &lo)));
                    continue;
                }
                let fhi = &flo + &s * (&hi - &lo);
                let dens = d / s.abs();
                let (u, v) = if flo <= fhi { (flo, fhi) } else { (fhi, flo) };
                for (p, q) in split_unit(&u, &v) {
                    contributions.push((p, q, dens.clone()));
                }
            }
        }
        Self::from_raw(new_atoms, contributions)
    }

    /// `f_*^k μ`.
    pub fn pushforward_iter(&self, f: &PLCircleMap, k: usize) -> Self {
        let mut m = self.clone();
        for _ in 0..k {
            m = m.pushforward(f);
        }
        m
    }

    /// `(1/n) Σ_{k<n} f_*^k μ`, failing when the representation would grow
    /// beyond `cap` pieces plus atoms.
    pub fn cesaro(&self, f: &PLCircleMap, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("Cesàro horizon must be at least 1".into()));
        }
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..n {
            cur = cur.pushforward(f);
            let size = cur.atoms.len() + cur.pieces.len();
            if size > cap {
                return Err(Error::ResourceExhausted { what: "measure pieces", needed: size, cap });
            }
            acc = acc.add(&cur);
        }
        Ok(acc.scale(&Rational::from_integer(n as i64).recip()))
    }

    pub fn integrate(&self, phi: &Observable) -> Rational {
        let a: Rational = self.atoms.iter().map(|(x, w)| phi.evaluate(x) * w).sum();
        let p: Rational = self.pieces.iter().map(|(lo, hi, d)| phi.integral_on_unit(lo, hi) * d).sum();
        a + p
    }

    /// `μ([a, b))` for `0 <= a <= b <= 1`.
    pub fn mass_of_unit_interval(&self, a: &Rational, b: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (x, w) in &self.atoms {
            if x.value() >= a && x.value() < b {
                total += w;
            }
        }
        for (lo, hi, d) in &self.pieces {
            let l = lo.clone().max(a.clone());
            let h = hi.clone().min(b.clone());
            if l < h {
                total += (h - l) * d;
            }
        }
        total
    }

    pub fn mass_of_arc(&self, arc: &Arc) -> Rational {
        arc.unit_pieces().iter().map(|(a, b)| self.mass_of_unit_interval(a, b)).sum()
    }

    pub fn mass_of_arcs(&self, arcs: &[Arc]) -> Rational {
        arcs.iter().map(|a| self.mass_of_arc(a)).sum()
    }

    /// `μ([0, x))` at each of the sorted points `xs` in `[0, 1]`.
    pub fn cdf_at_sorted(&self, xs: &[Rational]) -> Vec<Rational> {
        let mut out = Vec::with_capacity(xs.len());
        let mut ai = 0;
        let mut pi = 0;
        let mut done_atoms = Rational::zero();
        let mut done_pieces = Rational::zero();
        for x in xs {
            while ai < self.atoms.len() && self.atoms[ai].0.value() < x {
                done_atoms += &self.atoms[ai].1;
                ai += 1;
            }
            while pi < self.pieces.len() && &self.pieces[pi].1 <= x {
                let (a, b, d) = &self.pieces[pi];
                done_pieces += (b - a) * d;
                pi += 1;
            }
            let mut partial = Rational::zero();
            if pi < self.pieces.len() && &self.pieces[pi].0 < x {
                let (a, _, d) = &self.pieces[pi];
                partial = (x - a) * d;
            }
            out.push(&done_atoms + &done_pieces + partial);
        }
        out
    }

    /// Cylinder values `μ(I_α^p)` for every word of length `p`.
    pub fn cylinder_vector(&self, ell: u32, p: usize) -> Result<CylinderSpec> {
        let total = (ell as usize).checked_pow(p as u32).ok_or(Error::ResourceExhausted {
            what: "cylinder words",
            needed: usize::MAX,
            cap: 1 << 24,
        })?;
        if total > 1 << 24 {
            return Err(Error::ResourceExhausted { what: "cylinder words", needed: total, cap: 1 << 24 });
        }
        let den = Rational::from_integer(total as i64);
        let xs: Vec<Rational> = (0..=total).map(|i| Rational::from_integer(i as i64) / &den).collect();
        let cdf = self.cdf_at_sorted(&xs);
        let values = cdf.windows(2).map(|w| &w[1] - &w[0]).collect();
        CylinderSpec::from_values_unchecked(ell, p, values)
    }

    /// `μ(I_α)` for one word.
    pub fn cylinder_mass(&self, w: &Word) -> Rational {
        self.mass_of_arc(&word_interval(w))
    }

    /// Exact `∫_0^1 |F_μ - F_ν|` with CDFs anchored at 0.
    pub fn w1_distance(&self, other: &CircleMeasure) -> Rational {
        let mut xs: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for m in [self, other] {
            xs.extend(m.atoms.iter().map(|(x, _)| x.value().clone()));
            for (a, b, _) in &m.pieces {
                xs.push(a.clone());
                xs.push(b.clone());
            }
        }
        xs.sort();
        xs.dedup();
        let half = Rational::half();
        let mut total = Rational::zero();
        for w in xs.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let mid = (u + v) * &half;
            // right limit at u and left limit at v of the CDF difference
            let g_mid = self.mass_of_unit_interval(&Rational::zero(), &mid)
                - other.mass_of_unit_interval(&Rational::zero(), &mid);
            let slope = self.density_at(&mid) - other.density_at(&mid);
            let len = v - u;
            let g0 = &g_mid - &slope * (&mid - u);
            let g1 = &g_mid + &slope * (v - &mid);
            if g0.signum() * g1.signum() >= 0 {
                total += (g0.abs() + g1.abs()) * &half * &len;
            } else {
                let sq = &g0 * &g0 + &g1 * &g1;
                total += sq / ((&g0 - &g1).abs() * Rational::from_integer(2)) * &len;
            }
        }
        total
    }

    /// Density at a point that is not a piece endpoint.
    fn density_at(&self, x: &Rational) -> Rational {
        for (a, b, d) in &self.pieces {
            if a <= x && x < b {
                return d.clone();
            }
        }
        Rational::zero()
    }

    /// `|∫φ_j dμ - t_j| < ε_j` for every `j`.
    pub fn neighborhood_member(
        &self,
        observables: &[Observable],
        targets: &[Rational],
        epsilons: &[Rational],
    ) -> Result<bool> {
        if observables.len() != targets.len() || targets.len() != epsilons.len() {
            return Err(Error::InvalidInput("observable, target and epsilon lists differ in length".into()));
        }
        Ok(observables
            .iter()
            .zip(targets)
            .zip(epsilons)
            .all(|((phi, t), e)| (self.integrate(phi) - t).abs() < *e))
    }

    /// Restriction to the union of `arcs` (overlaps counted once).
    pub fn restrict(&self, arcs: &[Arc]) -> Self {
        let mut cover: Vec<(Rational, Rational)> = arcs.iter().flat_map(Arc::unit_pieces).collect();
        cover.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in cover {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        let atoms = self
            .atoms
            .iter()
            .filter(|(x, _)| merged.iter().any(|(a, b)| x.value() >= a && x.value() < b))
            .cloned()
            .collect();
        let mut pieces = Vec::new();
        for (lo, hi, d) in &self.pieces {
            for (a, b) in &merged {
                let l = lo.clone().max(a.clone());
                let h = hi.clone().min(b.clone());
                if l < h {
                    pieces.push((l, h, d.clone()));
                }
            }
        }
        Self::from_raw(atoms, pieces)
    }

    /// `μ(· ∩ S) / μ(S)`.
    pub fn restrict_normalize(&self, arcs: &[Arc]) -> Result<Self> {
        let r = self.restrict(arcs);
        let mass = r.total_mass();
        if mass.is_zero() {
            return Err(Error::EmptyConditioning);
        }
        Ok(r.scale(&mass.recip()))
    }

    /// Uniform probability on the orbit of a point of minimal period `k`.
    pub fn dirac_periodic(f: &PLCircleMap, p: &CirclePoint, k: usize) -> Result<Self> {
        let not_periodic = || Error::NotPeriodic { point: p.value().to_string(), period: k };
        if k == 0 {
            return Err(not_periodic());
        }
        let mut orbit = vec![p.clone()];
        let mut x = f.evaluate(p);
        while orbit.len() < k {
            if &x == p {
                return Err(not_periodic());
            }
            orbit.push(x.clone());
            x = f.evaluate(&x);
        }
        if &x != p {
            return Err(not_periodic());
        }
        Ok(Self::uniform_atoms(&orbit))
    }

    /// `(x, μ([0, x)))` at `samples + 1` equally spaced points.
    pub fn cdf_samples(&self, samples: usize) -> Vec<(Rational, Rational)> {
        let den = Rational::from_integer(samples.max(1) as i64);
        let xs: Vec<Rational> = (0..=samples).map(|i| Rational::from_integer(i as i64) / &den).collect();
        let cdf = self.cdf_at_sorted(&xs);
        xs.into_iter().zip(cdf).collect()
    }
}
