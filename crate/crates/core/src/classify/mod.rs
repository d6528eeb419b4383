//! Finite-scale evidence for the five labels wonderful, wholesome, weird,
//! wacky and wicked.
//!
//! Every verdict is three-valued. A label is witnessed or refuted only at
//! the tolerances of the [`WProtocol`]; the evidence map of each verdict
//! carries the exact numbers behind it.

mod birkhoff;
mod rotation;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use birkhoff::{birkhoff_average, birkhoff_gap, birkhoff_sum_from, Battery, GapRecord, Multiply, Snap, Step, Trace};
pub use rotation::{basin_decomposition, rotation_number, BasinDecomposition, Gap, PhysicalMeasure, RotationNumber, Side};

use crate::error::{Error, Result};
use crate::exact::{Arc, CirclePoint, Rational};
use crate::measure::{CircleMeasure, CylinderSpec};
use crate::pl::{Observable, PLCircleMap};
use crate::shred::{singularity_witness, SingularityWitness, TrappingReport};
use crate::partition::ConsistentFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Wonderful,
    Wholesome,
    Weird,
    Wacky,
    Wicked,
}

impl Label {
    pub const ALL: [Label; 5] = [Label::Wonderful, Label::Wholesome, Label::Weird, Label::Wacky, Label::Wicked];
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::Wonderful => "wonderful",
            Label::Wholesome => "wholesome",
            Label::Weird => "weird",
            Label::Wacky => "wacky",
            Label::Wicked => "wicked",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Witnessed,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Witnessed => "witnessed",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    pub status: Status,
    pub evidence: BTreeMap<String, String>,
}

impl Verdict {
    fn new(label: Label) -> Self {
        Verdict { label, status: Status::Inconclusive, evidence: BTreeMap::new() }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.evidence.insert(key.to_string(), value.to_string());
    }
}

/// Everything a classification run depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct WProtocol {
    /// Grid points `x_j = (j + offset) / grid`.
    pub grid: usize,
    pub grid_offset: Rational,
    pub horizons: Vec<usize>,
    /// Tents of height 1 at `j / tents`.
    pub tents: usize,
    pub tent_half_width: Rational,
    pub tol: Rational,
    pub gap_threshold: Rational,
    pub max_period: usize,
    /// Cylinder alphabet and level for Cesàro specs.
    pub cylinder_ell: u32,
    pub cylinder_level: usize,
    /// Declared invariant specs; Lebesgue and `δ_0` when empty.
    pub targets: Vec<CylinderSpec>,
    pub snap_bits: u64,
    pub snap_modulus: Rational,
}

impl Default for WProtocol {
    fn default() -> Self {
        let snap = Snap::default();
        WProtocol {
            grid: 1000,
            grid_offset: Rational::new(1, 1_000_003),
            horizons: vec![100, 1000, 10_000],
            tents: 8,
            tent_half_width: Rational::new(1, 8),
            tol: Rational::new(1, 100),
            gap_threshold: Rational::new(1, 100),
            max_period: 16,
            cylinder_ell: 2,
            cylinder_level: 1,
            targets: Vec::new(),
            snap_bits: snap.max_bits,
            snap_modulus: Rational::from_bigint(snap.modulus),
        }
    }
}

impl WProtocol {
    pub fn observables(&self) -> Result<Vec<Observable>> {
        (0..self.tents)
            .map(|j| {
                let peak = CirclePoint::from_lift(&Rational::new(j as i64, self.tents as i64));
                Observable::tent(&peak, &self.tent_half_width)
            })
            .collect()
    }

    pub fn grid_points(&self) -> Vec<Rational> {
        let g = Rational::from_integer(self.grid as i64);
        (0..self.grid).map(|j| (Rational::from_integer(j as i64) + &self.grid_offset) / &g).collect()
    }

    pub fn resolved_targets(&self) -> Result<Vec<(String, CylinderSpec)>> {
        if self.targets.is_empty() {
            return Ok(vec![
                ("lebesgue".into(), CylinderSpec::lebesgue(self.cylinder_ell, self.cylinder_level)?),
                ("dirac0".into(), CylinderSpec::dirac_zero(self.cylinder_ell, self.cylinder_level)?),
            ]);
        }
        self.targets
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.ell() != self.cylinder_ell || t.level() != self.cylinder_level {
                    return Err(Error::InvalidInput(format!("target {i} does not match the cylinder alphabet and level")));
                }
                Ok((format!("target{i}"), t.clone()))
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.grid == 0 || self.tents == 0 {
            return Err(Error::InvalidInput("grid and tent counts must be positive".into()));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::InvalidInput("horizons must be nonempty and positive".into()));
        }
        if !self.tol.is_positive() || self.tol >= Rational::one() {
            return Err(Error::InvalidInput(format!("tolerance {} outside (0, 1)", self.tol)));
        }
        if self.gap_threshold.is_negative() {
            return Err(Error::InvalidInput("gap threshold must be nonnegative".into()));
        }
        if !self.snap_modulus.is_integer() || !self.snap_modulus.is_positive() {
            return Err(Error::InvalidInput("snap modulus must be a positive integer".into()));
        }
        let top = *self.horizons.iter().max().expect("nonempty");
        let work = self.grid.saturating_mul(top);
        if work > MAX_ORBIT_STEPS {
            return Err(Error::ResourceExhausted { what: "orbit steps", needed: work, cap: MAX_ORBIT_STEPS });
        }
        Ok(())
    }
}

/// Upper bound on `grid * max(horizons)`.
pub const MAX_ORBIT_STEPS: usize = 100_000_000;

/// What is being classified.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Map(&'a PLCircleMap),
    /// A shredded map together with its trapping report.
    Shredded { g: &'a PLCircleMap, report: &'a TrappingReport },
    /// `f' = h'^{-1} E h'` observed through `h'`: orbits `E^k(h'(x))`,
    /// observables in the conjugated coordinate, Cesàro specs from the family.
    Conjugate(&'a ConsistentFamily),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridPoint {
    pub x: Rational,
    /// Largest spread of averages over the horizons, across observables.
    pub gap: Rational,
    pub snapped: bool,
    /// Length of the terminal cycle when the traced orbit repeats.
    pub cycle: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CesaroRow {
    pub horizon: usize,
    pub spec: CylinderSpec,
    /// Distance to each declared target, in target order.
    pub distances: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WDiagnostics {
    pub protocol: WProtocol,
    pub verdicts: Vec<Verdict>,
    pub grid: Vec<GridPoint>,
    pub target_names: Vec<String>,
    pub cesaro: Vec<CesaroRow>,
    /// `exact` or `grid`.
    pub cesaro_source: String,
    pub rotation: Option<RotationNumber>,
    pub basins: Option<BasinDecomposition>,
    pub singularity: Option<SingularityWitness>,
}

impl WDiagnostics {
    pub fn status(&self, label: Label) -> Status {
        self.verdicts.iter().find(|v| v.label == label).map(|v| v.status).unwrap_or(Status::Inconclusive)
    }

    pub fn verdict(&self, label: Label) -> &Verdict {
        self.verdicts.iter().find(|v| v.label == label).expect("all labels present")
    }
}

fn fraction(count: usize, total: usize) -> Rational {
    Rational::new(count as i64, total as i64)
}

/// Runs the protocol on `target`.
pub fn classify(target: Target<'_>, protocol: &WProtocol) -> Result<WDiagnostics> {
    protocol.validate()?;
    let observables = protocol.observables()?;
    let targets = protocol.resolved_targets()?;
    let ell = protocol.cylinder_ell;
    let level = protocol.cylinder_level;
    let n_words = (ell as usize).checked_pow(level as u32).filter(|&n| n <= 1 << 16).ok_or(Error::ResourceExhausted {
        what: "cylinder words",
        needed: usize::MAX,
        cap: 1 << 16,
    })?;
    if let Target::Conjugate(wp) = target {
        if wp.ell() != ell {
            return Err(Error::AlphabetMismatch(wp.ell(), ell));
        }
    }
    let cuts: Vec<Rational> = (1..n_words).map(|w| Rational::new(w as i64, n_words as i64)).collect();
    let battery = Battery::new(&observables, &cuts);
    let cyl_of_piece: Vec<usize> = (0..battery.pieces())
        .map(|i| {
            let s = battery.piece_start(i) * Rational::from_integer(n_words as i64);
            usize::try_from(s.floor()).expect("cylinder index")
        })
        .collect();
    let snap = Snap { max_bits: protocol.snap_bits, modulus: protocol.snap_modulus.numer().clone() };
    let horizons = &protocol.horizons;

    let (step, starts): (Box<dyn Step + '_>, Vec<Rational>) = match target {
        Target::Map(f) => (Box::new(f.clone()), protocol.grid_points()),
        Target::Shredded { g, .. } => (Box::new(g.clone()), protocol.grid_points()),
        Target::Conjugate(wp) => {
            let ys = protocol
                .grid_points()
                .iter()
                .map(|x| wp.conjugator_eval(&CirclePoint::from_lift(x)).into_value())
                .collect();
            (Box::new(Multiply(wp.ell())), ys)
        }
    };

    let mut grid = Vec::with_capacity(starts.len());
    let mut cyl_counts = vec![vec![0u64; n_words]; horizons.len()];
    let mut cycles: HashMap<Rational, usize> = HashMap::new();
    for (x, y) in protocol.grid_points().into_iter().zip(&starts) {
        let t = Trace::run(step.as_ref(), y, &battery, horizons, Some(&snap));
        let sums = t.sums(&battery);
        let mut gap = Rational::zero();
        for i in 0..battery.len() {
            let avgs: Vec<Rational> =
                sums.iter().zip(horizons).map(|(s, &n)| &s[i] / Rational::from_integer(n as i64)).collect();
            gap = gap.max(birkhoff::spread(&avgs));
        }
        for (h, counts) in t.piece_counts().into_iter().enumerate() {
            for (piece, &c) in counts.iter().enumerate() {
                cyl_counts[h][cyl_of_piece[piece]] += c;
            }
        }
        if let Some(pts) = t.cycle_points() {
            if !t.snapped {
                let key = pts.iter().min().expect("nonempty cycle").clone();
                *cycles.entry(key).or_default() += 1;
            }
        }
        grid.push(GridPoint { x, gap, snapped: t.snapped, cycle: t.cycle.map(|c| c.1) });
    }
    let total = grid.len();
    let small = grid.iter().filter(|p| p.gap < protocol.tol).count();
    let large = grid.iter().filter(|p| p.gap > protocol.gap_threshold).count();
    let snapped = grid.iter().filter(|p| p.snapped).count();
    let one_minus_tol = Rational::one() - &protocol.tol;

    // Cesàro specs
    let (cesaro_specs, cesaro_source) = cesaro_specs(target, protocol, &cyl_counts, total)?;
    let cesaro: Vec<CesaroRow> = cesaro_specs
        .into_iter()
        .zip(horizons)
        .map(|(spec, &horizon)| {
            let distances = targets.iter().map(|(_, t)| spec.distance(t)).collect::<Result<Vec<_>>>()?;
            Ok(CesaroRow { horizon, spec, distances })
        })
        .collect::<Result<_>>()?;

    // wholesome / wacky
    let mut wholesome = Verdict::new(Label::Wholesome);
    let mut wacky = Verdict::new(Label::Wacky);
    let frac_small = fraction(small, total);
    let frac_large = fraction(large, total);
    for v in [&mut wholesome, &mut wacky] {
        v.note("gridPoints", total);
        v.note("snappedPoints", snapped);
        v.note("horizons", format!("{horizons:?}"));
        v.note("fractionGapBelowTol", &frac_small);
        v.note("fractionGapAboveThreshold", &frac_large);
        v.note("maxGap", grid.iter().map(|p| p.gap.clone()).max().unwrap_or_else(Rational::zero));
    }
    let ws = frac_small >= one_minus_tol;
    let wk = frac_large >= one_minus_tol;
    match (ws, wk) {
        (true, false) => {
            wholesome.status = Status::Witnessed;
            wacky.status = Status::Refuted;
        }
        (false, true) => {
            wholesome.status = Status::Refuted;
            wacky.status = Status::Witnessed;
        }
        (true, true) => {
            wholesome.note("conflict", "both gap fractions passed; thresholds overlap");
            wacky.note("conflict", "both gap fractions passed; thresholds overlap");
        }
        (false, false) => {}
    }

    // wonderful
    let mut wonderful = Verdict::new(Label::Wonderful);
    let mut rotation = None;
    let mut basins = None;
    let homeo = match target {
        Target::Map(f) if f.is_homeomorphism() => Some(f),
        _ => None,
    };
    if let Some(h) = homeo {
        let (base, squared) = if h.is_orientation_preserving_homeo() {
            (h.clone(), false)
        } else {
            (h.compose(h)?, true)
        };
        if squared {
            wonderful.note("orientation", "reversing; decomposed the square");
        }
        let rn = rotation_number(&base, protocol.max_period)?;
        rotation = Some(rn.clone());
        match basin_decomposition(&base, protocol.max_period) {
            Ok(d) => {
                let cover = d.basin_cover();
                wonderful.note("physicalMeasures", d.physical.len());
                wonderful.note("basinCover", &cover);
                wonderful.note("periodicMeasure", &d.periodic_measure);
                wonderful.note("period", d.period);
                wonderful.status = if cover >= one_minus_tol { Status::Witnessed } else { Status::Refuted };
                basins = Some(d);
            }
            Err(Error::RotationNotDetected(q)) => {
                wonderful.note("rotation", format!("no periodic orbit up to period {q}"));
            }
            Err(e) => return Err(e),
        }
    } else {
        wonderful.note("basins", "no exact basin decomposition for non-homeomorphisms");
    }

    // weird
    let mut weird = Verdict::new(Label::Weird);
    let mut singularity = None;
    if homeo.is_some() {
        weird.status = Status::Refuted;
        weird.note("singular", "PL homeomorphisms map null sets to null sets");
    } else if let Target::Shredded { g, report } = target {
        let eps = &report.eps;
        match singularity_witness(g, report) {
            Ok(w) => {
                let region_max = report
                    .regions
                    .iter()
                    .map(|r| r.arcs.iter().map(Arc::measure).sum::<Rational>())
                    .max()
                    .unwrap_or_else(Rational::zero);
                let uncovered = Rational::one() - &w.measure;
                let bound = &region_max + &uncovered;
                let two_eps = Rational::from_integer(2) * eps;
                let empirical = cycles.values().copied().max().map(|c| fraction(c, total)).unwrap_or_else(Rational::zero);
                weird.note("eps", eps);
                weird.note("singularMeasure", &w.measure);
                weird.note("singularImageMeasure", &w.image_measure);
                weird.note("basinBound", &bound);
                weird.note("maxEmpiricalBasin", &empirical);
                weird.note("distinctCycles", cycles.len());
                if wacky.status == Status::Witnessed {
                    weird.status = Status::Refuted;
                } else if ws && !wk && bound < two_eps {
                    weird.status = Status::Witnessed;
                }
                singularity = Some(w);
            }
            Err(e) => weird.note("singularity", e),
        }
    } else if wacky.status == Status::Witnessed {
        weird.status = Status::Refuted;
        weird.note("wholesome", "refuted");
    }

    // wicked
    let mut wicked = Verdict::new(Label::Wicked);
    wicked.note("cesaroSource", &cesaro_source);
    let near: Vec<Vec<usize>> = cesaro
        .iter()
        .map(|row| row.distances.iter().enumerate().filter(|(_, d)| **d < protocol.tol).map(|(i, _)| i).collect())
        .collect();
    for (row, n) in cesaro.iter().zip(&near) {
        let names: Vec<&str> = n.iter().map(|&i| targets[i].0.as_str()).collect();
        wicked.note(&format!("near@{}", row.horizon), names.join(","));
        for (i, d) in row.distances.iter().enumerate() {
            wicked.note(&format!("distance@{}:{}", row.horizon, targets[i].0), d);
        }
    }
    let two_tol = Rational::from_integer(2) * &protocol.tol;
    let mut pair = None;
    'outer: for (h1, a) in near.iter().enumerate() {
        for (h2, b) in near.iter().enumerate() {
            if h1 == h2 {
                continue;
            }
            for &i in a {
                for &j in b {
                    if targets[i].1.distance(&targets[j].1)? > two_tol {
                        pair = Some((h1, i, h2, j));
                        break 'outer;
                    }
                }
            }
        }
    }
    if let Some((h1, i, h2, j)) = pair {
        wicked.status = Status::Witnessed;
        wicked.note(
            "approached",
            format!("{} at {}, {} at {}", targets[i].0, horizons[h1], targets[j].0, horizons[h2]),
        );
    } else if wholesome.status == Status::Witnessed {
        wicked.status = Status::Refuted;
        wicked.note("wacky", "refuted; wicked systems are wacky");
    }

    if wonderful.status == Status::Witnessed && weird.status == Status::Witnessed {
        wonderful.status = Status::Inconclusive;
        weird.status = Status::Inconclusive;
        wonderful.note("conflict", "weird evidence also passed");
        weird.note("conflict", "wonderful evidence also passed");
    }

    Ok(WDiagnostics {
        protocol: protocol.clone(),
        verdicts: vec![wonderful, wholesome, weird, wacky, wicked],
        grid,
        target_names: targets.into_iter().map(|(n, _)| n).collect(),
        cesaro,
        cesaro_source,
        rotation,
        basins,
        singularity,
    })
}

fn cesaro_specs(
    target: Target<'_>,
    protocol: &WProtocol,
    cyl_counts: &[Vec<u64>],
    grid: usize,
) -> Result<(Vec<CylinderSpec>, String)> {
    let ell = protocol.cylinder_ell;
    let p = protocol.cylinder_level;
    let horizons = &protocol.horizons;
    match target {
        Target::Conjugate(wp) => {
            let top = *horizons.iter().max().expect("nonempty");
            let mut acc = vec![Rational::zero(); (ell as usize).pow(p as u32)];
            let mut out = vec![None; horizons.len()];
            for k in 0..top {
                let s = wp.cylinder_pushforward(k, p)?;
                for (a, v) in acc.iter_mut().zip(s.values()) {
                    *a += v;
                }
                for (i, &h) in horizons.iter().enumerate() {
                    if h == k + 1 {
                        let w = Rational::from_integer(h as i64).recip();
                        out[i] = Some(CylinderSpec::new(ell, p, acc.iter().map(|a| a * &w).collect())?);
                    }
                }
            }
            Ok((out.into_iter().map(|s| s.expect("every horizon reached")).collect(), "exact".into()))
        }
        Target::Map(f) | Target::Shredded { g: f, .. } => {
            let leb = CircleMeasure::lebesgue();
            if leb.pushforward(f) == leb {
                let spec = leb.cylinder_vector(ell, p)?;
                return Ok((vec![spec; horizons.len()], "exact".into()));
            }
            let specs = cyl_counts
                .iter()
                .zip(horizons)
                .map(|(counts, &h)| {
                    let den = Rational::from_integer((grid * h) as i64);
                    CylinderSpec::new(ell, p, counts.iter().map(|&c| Rational::from_integer(c as i64) / &den).collect())
                })
                .collect::<Result<_>>()?;
            Ok((specs, "grid".into()))
        }
    }
}

/// Both sides of `m_n = m(A^c) C_n(m_{A^c}) + m(A) C_n(m_A)` where `C_n` is
/// the Cesàro average of push-forwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CesaroSplit {
    pub whole: CircleMeasure,
    pub split: CircleMeasure,
    pub mass_a: Rational,
}

/// Complement of a union of arcs, as disjoint arcs.
pub fn complement_arcs(arcs: &[Arc]) -> Vec<Arc> {
    let mut pieces: Vec<(Rational, Rational)> = arcs.iter().flat_map(Arc::unit_pieces).collect();
    pieces.sort();
    let mut out = Vec::new();
    let mut pos = Rational::zero();
    for (a, b) in pieces {
        if a > pos {
            out.push(Arc::from_lift(&pos, &a - &pos).expect("positive length"));
        }
        if b > pos {
            pos = b;
        }
    }
    if pos < Rational::one() {
        out.push(Arc::from_lift(&pos, Rational::one() - &pos).expect("positive length"));
    }
    out
}

pub fn cesaro_split(f: &PLCircleMap, a: &[Arc], n: usize, cap: usize) -> Result<CesaroSplit> {
    let leb = CircleMeasure::lebesgue();
    let whole = leb.cesaro(f, n, cap)?;
    let inside = leb.restrict(a);
    let mass_a = inside.total_mass();
    let outside = complement_arcs(a);
    let mut terms = Vec::new();
    if mass_a.is_positive() {
        terms.push((mass_a.clone(), leb.restrict_normalize(a)?.cesaro(f, n, cap)?));
    }
    let rest = Rational::one() - &mass_a;
    if rest.is_positive() {
        terms.push((rest, leb.restrict_normalize(&outside)?.cesaro(f, n, cap)?));
    }
    Ok(CesaroSplit { whole, split: CircleMeasure::combination(&terms), mass_a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn small() -> WProtocol {
        WProtocol { grid: 50, horizons: vec![20, 200], ..WProtocol::default() }
    }

    #[test]
    fn identity_is_wholesome_not_wonderful() {
        let d = classify(Target::Map(&PLCircleMap::identity()), &small()).unwrap();
        assert_eq!(d.status(Label::Wholesome), Status::Witnessed);
        assert_eq!(d.status(Label::Wacky), Status::Refuted);
        assert_eq!(d.status(Label::Wonderful), Status::Refuted);
        assert_eq!(d.status(Label::Weird), Status::Refuted);
        assert_eq!(d.status(Label::Wicked), Status::Refuted);
        assert_eq!(d.cesaro_source, "exact");
    }

    #[test]
    fn attracting_homeo_is_wonderful() {
        let h = PLCircleMap::from_lift_knots(
            vec![(q!(0), q!(0)), (q!(1, 20), q!(9, 20)), (q!(1, 2), q!(1, 2)), (q!(19, 20), q!(11, 20)), (q!(1), q!(1))],
            1,
        )
        .unwrap();
        let d = classify(Target::Map(&h), &small()).unwrap();
        assert_eq!(d.status(Label::Wonderful), Status::Witnessed);
        assert_eq!(d.basins.as_ref().unwrap().basin_cover(), q!(1));
    }

    #[test]
    fn complement_of_arcs() {
        let a = vec![Arc::from_lift(&q!(9, 10), q!(1, 5)).unwrap(), Arc::from_lift(&q!(1, 2), q!(1, 10)).unwrap()];
        let c = complement_arcs(&a);
        let total: Rational = c.iter().map(Arc::measure).sum();
        assert_eq!(total, q!(7, 10));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn split_identity_on_small_instance() {
        let f = PLCircleMap::from_lift_knots(vec![(q!(0), q!(1, 5)), (q!(1, 2), q!(1, 3)), (q!(1), q!(6, 5))], 1).unwrap();
        let a = vec![Arc::from_lift(&q!(1, 3), q!(1, 4)).unwrap()];
        let s = cesaro_split(&f, &a, 4, 10_000).unwrap();
        assert_eq!(s.whole, s.split);
        assert_eq!(s.mass_a, q!(1, 4));
    }
}
