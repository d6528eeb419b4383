//! Consistent `ℓ`-adic partition families `J_α^k` and their correspondence
//! with orientation-preserving circle homeomorphisms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{cylinder_length, Arc, CirclePoint, Rational, Word};
use crate::measure::{CircleMeasure, CylinderSpec};
use crate::pl::{sup_dist_to_integer, PLCircleMap};

/// Cap on the number of cells a family may hold.
pub const MAX_FAMILY_CELLS: usize = 1 << 22;

/// One cell `J_α^k = [start, start + length)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cell {
    pub word: Word,
    pub start: CirclePoint,
    pub length: Rational,
}

impl Cell {
    pub fn arc(&self) -> Arc {
        Arc::new(self.start.clone(), self.length.clone()).expect("cells are nonempty")
    }
}

/// First place where a family fails to be consistent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    /// Level of the parent cell (0 for the circle itself).
    pub level: usize,
    /// Word of the parent cell.
    pub parent: Word,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} parent '{}': {}", self.level, self.parent, self.reason)
    }
}

/// A finite hierarchy of partitions of the circle into arcs coded by words.
///
/// Levels store their nonempty cells in word order; a word missing from a
/// level denotes an empty cell, which sits at the point where its
/// neighbours meet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConsistentFamily {
    ell: u32,
    levels: Vec<Vec<Cell>>,
}

#[derive(Serialize, Deserialize)]
struct CellRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word: Option<String>,
    start: Rational,
    length: Rational,
}

#[derive(Serialize, Deserialize)]
struct FamilyRecord {
    ell: u32,
    depth: usize,
    levels: Vec<Vec<CellRecord>>,
}

impl Serialize for ConsistentFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let levels = self
            .levels
            .iter()
            .map(|lv| {
                lv.iter()
                    .map(|c| CellRecord {
                        word: Some(c.word.to_string()),
                        start: c.start.value().clone(),
                        length: c.length.clone(),
                    })
                    .collect()
            })
            .collect();
        FamilyRecord { ell: self.ell, depth: self.depth(), levels }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConsistentFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FamilyRecord::deserialize(d)?;
        let build = || -> Result<ConsistentFamily> {
            if r.levels.len() != r.depth {
                return Err(Error::InvalidInput(format!("depth {} but {} levels", r.depth, r.levels.len())));
            }
            let mut levels = Vec::with_capacity(r.depth);
            for (k, lv) in r.levels.into_iter().enumerate() {
                let full = lv.len() == (r.ell as usize).saturating_pow(k as u32 + 1);
                let mut cells = Vec::with_capacity(lv.len());
                for (i, c) in lv.into_iter().enumerate() {
                    let word = match c.word {
                        Some(w) => Word::parse(r.ell, &w)?,
                        None if full => Word::from_index(r.ell, k + 1, i as u64),
                        None => return Err(Error::InvalidInput("cells of a partial level need words".into())),
                    };
                    cells.push(Cell { word, start: CirclePoint::new(c.start)?, length: c.length });
                }
                levels.push(cells);
            }
            ConsistentFamily::new(r.ell, levels)
        };
        build().map_err(serde::de::Error::custom)
    }
}

impl ConsistentFamily {
    /// Validates shape and consistency.
    pub fn new(ell: u32, levels: Vec<Vec<Cell>>) -> Result<Self> {
        let fam = Self::new_unchecked(ell, levels)?;
        fam.consistency_check().map_err(Error::InconsistentFamily)?;
        Ok(fam)
    }

    /// Validates word shapes only; use [`consistency_check`](Self::consistency_check)
    /// to test the union identities.
    pub fn new_unchecked(ell: u32, levels: Vec<Vec<Cell>>) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidInput(format!("alphabet size {ell} below 2")));
        }
        if levels.is_empty() {
            return Err(Error::InvalidInput("a family needs depth at least 1".into()));
        }
        let cells: usize = levels.iter().map(Vec::len).sum();
        if cells > MAX_FAMILY_CELLS {
            return Err(Error::ResourceExhausted { what: "family cells", needed: cells, cap: MAX_FAMILY_CELLS });
        }
        for (k, lv) in levels.iter().enumerate() {
            for c in lv {
                if c.word.ell() != ell || c.word.len() != k + 1 {
                    return Err(Error::InvalidInput(format!("cell word {} does not fit level {}", c.word, k + 1)));
                }
                if !c.length.is_positive() {
                    return Err(Error::InvalidInput(format!("cell {} has nonpositive length", c.word)));
                }
            }
        }
        Ok(ConsistentFamily { ell, levels })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Nonempty cells of level `k` (1-based), in word order.
    pub fn level(&self, k: usize) -> &[Cell] {
        &self.levels[k - 1]
    }

    /// Cell for `w`, or `None` when it is empty.
    pub fn cell(&self, w: &Word) -> Option<&Cell> {
        let lv = &self.levels[w.len() - 1];
        lv.binary_search_by(|c| c.word.cmp(w)).ok().map(|i| &lv[i])
    }

    /// `m(J_α)`, zero for empty cells.
    pub fn mass(&self, w: &Word) -> Rational {
        self.cell(w).map(|c| c.length.clone()).unwrap_or_else(Rational::zero)
    }

    /// True when every word of every level has a nonempty cell.
    pub fn is_complete(&self) -> bool {
        self.levels.iter().enumerate().all(|(k, lv)| Some(lv.len()) == (self.ell as usize).checked_pow(k as u32 + 1))
    }

    /// The union identities `J_α^p = ∪_c J_{αc}^{p+1}` with children laid
    /// out in word order from the parent's start; reports the first failure.
    pub fn consistency_check(&self) -> std::result::Result<(), Violation> {
        let top = &self.levels[0];
        check_children(0, &Word::empty(self.ell), top.first().map(|c| c.start.value().clone()), &Rational::one(), top)?;
        for k in 1..self.levels.len() {
            let parents = &self.levels[k - 1];
            let children = &self.levels[k];
            let mut ci = 0;
            for parent in parents {
                let begin = ci;
                while ci < children.len() && children[ci].word.prefix(k) == parent.word {
                    ci += 1;
                }
                if ci < children.len() && children[ci].word.prefix(k) < parent.word {
                    return Err(Violation {
                        level: k,
                        parent: children[ci].word.prefix(k),
                        reason: "cell out of word order or without a parent".into(),
                    });
                }
                check_children(k, &parent.word, Some(parent.start.value().clone()), &parent.length, &children[begin..ci])?;
            }
            if ci < children.len() {
                return Err(Violation {
                    level: k,
                    parent: children[ci].word.prefix(k),
                    reason: "cell out of word order or without a parent".into(),
                });
            }
        }
        Ok(())
    }

    /// `J_α^k = h^{-1}(I_α^k)` for `k = 1..=depth`.
    pub fn from_homeo(h: &PLCircleMap, ell: u32, depth: usize) -> Result<Self> {
        if !h.is_orientation_preserving_homeo() {
            return Err(Error::NotOrientationPreserving);
        }
        if ell < 2 || depth == 0 {
            return Err(Error::InvalidInput("need ell >= 2 and depth >= 1".into()));
        }
        let cells: usize = (1..=depth).map(|k| (ell as usize).saturating_pow(k as u32)).sum();
        if cells > MAX_FAMILY_CELLS {
            return Err(Error::ResourceExhausted { what: "family cells", needed: cells, cap: MAX_FAMILY_CELLS });
        }
        let hinv = h.invert()?;
        let mut levels = Vec::with_capacity(depth);
        for k in 1..=depth {
            let n = (ell as usize).pow(k as u32);
            let den = Rational::from_integer(n as i64);
            // lift of h^{-1} at the l-adic points, made increasing
            let base = hinv.lift_evaluate(&Rational::zero());
            let pts: Vec<Rational> =
                (0..=n).map(|i| hinv.lift_evaluate(&(Rational::from_integer(i as i64) / &den))).collect();
            debug_assert!(pts[n] == &base + Rational::one());
            let lv = (0..n)
                .map(|i| Cell {
                    word: Word::from_index(ell, k, i as u64),
                    start: CirclePoint::from_lift(&pts[i]),
                    length: &pts[i + 1] - &pts[i],
                })
                .collect();
            levels.push(lv);
        }
        Ok(ConsistentFamily { ell, levels })
    }

    /// PL homeomorphism affine on each deepest cell with `h(J_α^n) = I_α^n`.
    pub fn to_homeo(&self) -> Result<PLCircleMap> {
        self.consistency_check().map_err(Error::InconsistentFamily)?;
        if !self.is_complete() {
            return Err(Error::InvalidInput("family has empty cells; no homeomorphism realises it".into()));
        }
        let deepest = self.level(self.depth());
        let step = cylinder_length(self.ell, self.depth());
        let mut x = deepest[0].start.value().clone();
        let mut knots = Vec::with_capacity(deepest.len() + 1);
        for (i, c) in deepest.iter().enumerate() {
            knots.push((x.clone(), &step * Rational::from_integer(i as i64)));
            x += &c.length;
        }
        knots.push((x, Rational::one()));
        PLCircleMap::from_lift_knots(knots, 1)
    }

    /// Deepest nonempty cells as `(lift start, length, word)` with
    /// increasing lift starts beginning in `[0, 1)`.
    fn deepest_lifts(&self) -> Vec<(Rational, Rational, &Word)> {
        let deepest = self.level(self.depth());
        let mut x = deepest[0].start.value().clone();
        let mut out = Vec::with_capacity(deepest.len());
        for c in deepest {
            out.push((x.clone(), c.length.clone(), &c.word));
            x += &c.length;
        }
        out
    }

    /// `h'_* m` where `h'` maps each deepest cell affinely onto `I_α^n`.
    pub fn pushforward_lebesgue(&self) -> CircleMeasure {
        let step = cylinder_length(self.ell, self.depth());
        let pieces = self
            .level(self.depth())
            .iter()
            .map(|c| {
                let a = Rational::from_bigint(c.word.value()) * &step;
                (Arc::from_lift(&a, step.clone()).expect("cylinder"), &c.length / &step)
            })
            .collect();
        CircleMeasure::new(vec![], pieces).expect("cells carry total mass one")
    }

    /// Exact `sup_x d(h(x), h'(x))` where `h'` is the piecewise-affine map
    /// sending each deepest cell onto its cylinder (with jumps across empty
    /// cells).
    pub fn c0_distance_to(&self, h: &PLCircleMap) -> Rational {
        let step = cylinder_length(self.ell, self.depth());
        let mut diffs: Vec<(Rational, Rational)> = Vec::new();
        for (a, len, w) in self.deepest_lifts() {
            let b = &a + &len;
            let ya = Rational::from_bigint(w.value()) * &step;
            let slope = &step / &len;
            let mut xs = vec![a.clone(), b.clone()];
            let mut k = a.floor();
            loop {
                let base = Rational::from_bigint(k.clone());
                if base > b {
                    break;
                }
                for br in h.breakpoints() {
                    let t = &base + br;
                    if t > a && t < b {
                        xs.push(t);
                    }
                }
                k += 1;
            }
            xs.sort();
            let vals: Vec<Rational> =
                xs.iter().map(|x| h.lift_evaluate(x) - (&ya + &slope * (x - &a))).collect();
            for w in vals.windows(2) {
                diffs.push((w[0].clone(), w[1].clone()));
            }
        }
        sup_dist_to_integer(diffs.iter().map(|(u, v)| (u, v)))
    }

    /// `E_*^q h'_* m (I_α^p) = Σ_β m(J_{βα}^{q+p})`, with cells beyond the
    /// family depth subdivided in proportion to Lebesgue measure.
    pub fn cylinder_pushforward(&self, q: usize, p: usize) -> Result<CylinderSpec> {
        if p == 0 {
            return Err(Error::InvalidInput("cylinder level must be at least 1".into()));
        }
        let ell = self.ell as usize;
        let n_words = ell.checked_pow(p as u32).filter(|&n| n <= 1 << 24).ok_or(Error::ResourceExhausted {
            what: "cylinder words",
            needed: usize::MAX,
            cap: 1 << 24,
        })?;
        let mut values = vec![Rational::zero(); n_words];
        let n = self.depth();
        if q + p <= n {
            for c in self.level(q + p) {
                let idx = word_slice_index(c.word.digits(), q, q + p, ell);
                values[idx] += &c.length;
            }
        } else if q >= n {
            let share = Rational::from_integer(n_words as i64).recip();
            return CylinderSpec::new(self.ell, p, vec![share; n_words]);
        } else {
            // E^q maps I_γ^n onto I_{γ[q..n]}^{n-q} uniformly
            let known = n - q;
            let spread = ell.pow((p - known) as u32);
            let share = Rational::from_integer(spread as i64).recip();
            for c in self.level(n) {
                let head = word_slice_index(c.word.digits(), q, n, ell);
                let mass = &c.length * &share;
                for j in 0..spread {
                    values[head * spread + j] += &mass;
                }
            }
        }
        CylinderSpec::new(self.ell, p, values)
    }

    /// `(1/n) Σ_{k<n} E_*^k h'_* m` at level `p`.
    pub fn cesaro_cylinder(&self, n: usize, p: usize) -> Result<CylinderSpec> {
        if n == 0 {
            return Err(Error::InvalidInput("Cesàro horizon must be at least 1".into()));
        }
        let specs = (0..n).map(|k| self.cylinder_pushforward(k, p)).collect::<Result<Vec<_>>>()?;
        let w = Rational::from_integer(n as i64).recip();
        let terms: Vec<(Rational, &CylinderSpec)> = specs.iter().map(|s| (w.clone(), s)).collect();
        CylinderSpec::combination(&terms)
    }

    /// Image of a point under `h'`.
    pub fn conjugator_eval(&self, x: &CirclePoint) -> CirclePoint {
        let step = cylinder_length(self.ell, self.depth());
        let cells = self.deepest_lifts();
        let first = cells[0].0.clone();
        let mut t = x.value().clone();
        if t < first {
            t += Rational::one();
        }
        let i = cells.partition_point(|(a, _, _)| *a <= t).saturating_sub(1);
        let (a, len, w) = &cells[i];
        let y = Rational::from_bigint(w.value()) * &step + (&t - a) * &step / len;
        CirclePoint::from_lift(&y)
    }
}

fn word_slice_index(digits: &[u32], from: usize, to: usize, ell: usize) -> usize {
    digits[from..to].iter().fold(0usize, |acc, &d| acc * ell + d as usize)
}

fn check_children(
    level: usize,
    parent: &Word,
    start: Option<Rational>,
    length: &Rational,
    children: &[Cell],
) -> std::result::Result<(), Violation> {
    let fail = |reason: String| Err(Violation { level, parent: parent.clone(), reason });
    if children.windows(2).any(|w| w[0].word >= w[1].word) {
        return fail("children out of word order".into());
    }
    let Some(mut pos) = start else {
        return fail("no cells".into());
    };
    if children.first().map(|c| c.start.value()) != Some(&pos.fract()) {
        return fail("first child does not start at the parent's start".into());
    }
    let mut total = Rational::zero();
    for c in children {
        if c.start.value() != &pos.fract() {
            return fail(format!("child '{}' is not contiguous with its predecessor", c.word));
        }
        pos += &c.length;
        total += &c.length;
    }
    if &total != length {
        return fail(format!("children cover {total}, parent has length {length}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::word_interval;
    use crate::q;

    #[test]
    fn identity_gives_adic_cells() {
        let f = ConsistentFamily::from_homeo(&PLCircleMap::identity(), 2, 3).unwrap();
        for k in 1..=3 {
            for c in f.level(k) {
                assert_eq!(c.arc(), word_interval(&c.word));
            }
        }
        assert_eq!(f.to_homeo().unwrap(), PLCircleMap::identity());
    }

    #[test]
    fn rotation_preimage_wraps() {
        let f = ConsistentFamily::from_homeo(&PLCircleMap::rotation(&q!(1, 4)), 2, 1).unwrap();
        let j0 = &f.level(1)[0];
        assert_eq!(j0.start.value(), &q!(3, 4));
        assert_eq!(j0.length, q!(1, 2));
    }

    #[test]
    fn two_cell_family_homeo() {
        let cells = vec![
            Cell { word: Word::parse(2, "0").unwrap(), start: CirclePoint::zero(), length: q!(1, 3) },
            Cell { word: Word::parse(2, "1").unwrap(), start: CirclePoint::new(q!(1, 3)).unwrap(), length: q!(2, 3) },
        ];
        let h = ConsistentFamily::new(2, vec![cells]).unwrap().to_homeo().unwrap();
        assert_eq!(h.breakpoints(), &[q!(0), q!(1, 3), q!(1)]);
        assert_eq!(h.slope(0), q!(3, 2));
        assert_eq!(h.slope(1), q!(3, 4));
    }

    #[test]
    fn swapped_children_reported_at_parent() {
        let f = ConsistentFamily::from_homeo(&PLCircleMap::identity(), 2, 2).unwrap();
        let mut levels = f.levels.clone();
        levels[1].swap(0, 1);
        let bad = ConsistentFamily::new_unchecked(2, levels).unwrap();
        let v = bad.consistency_check().unwrap_err();
        assert_eq!(v.level, 1);
        assert_eq!(v.parent, Word::parse(2, "0").unwrap());
    }

    #[test]
    fn shrunken_cell_rejected() {
        let f = ConsistentFamily::from_homeo(&PLCircleMap::identity(), 2, 2).unwrap();
        let mut levels = f.levels.clone();
        levels[1][3].length = q!(1, 8);
        let bad = ConsistentFamily::new_unchecked(2, levels).unwrap();
        assert!(bad.consistency_check().is_err());
    }

    #[test]
    fn pushforward_at_identity_is_lebesgue() {
        let f = ConsistentFamily::from_homeo(&PLCircleMap::identity(), 3, 2).unwrap();
        for q in 0..5 {
            assert_eq!(f.cylinder_pushforward(q, 2).unwrap(), CylinderSpec::lebesgue(3, 2).unwrap());
        }
        assert_eq!(f.pushforward_lebesgue(), CircleMeasure::lebesgue());
    }

    #[test]
    fn serde_roundtrip() {
        let h = PLCircleMap::new(vec![q!(0), q!(1, 2), q!(1)], vec![q!(1, 5), q!(1, 3), q!(6, 5)]).unwrap();
        let f = ConsistentFamily::from_homeo(&h, 2, 3).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: ConsistentFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
