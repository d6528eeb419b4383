//! Linear expanding maps, their conjugates `h^{-1} E_ℓ h`, and the
//! perturbation of a conjugator whose Cesàro push-forwards of Lebesgue
//! measure sit on a prescribed invariant measure over a window of times.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{CirclePoint, Rational, Word};
use crate::measure::{CylinderSpec, Extension};
use crate::partition::{Cell, ConsistentFamily};
use crate::pl::PLCircleMap;

/// `x -> ℓ x mod 1`.
pub fn expanding_map(ell: i64) -> Result<PLCircleMap> {
    PLCircleMap::expanding(ell)
}

/// `f = h^{-1} ∘ E_ℓ ∘ h` together with its conjugator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandingConjugacy {
    pub ell: i64,
    pub h: PLCircleMap,
    pub f: PLCircleMap,
}

/// Builds `h^{-1} E_ℓ h` and checks it has `|ℓ - 1|` fixed points.
pub fn conjugate(h: &PLCircleMap, ell: i64) -> Result<ExpandingConjugacy> {
    if !h.is_orientation_preserving_homeo() {
        return Err(Error::NotOrientationPreserving);
    }
    let e = expanding_map(ell)?;
    let f = h.invert()?.compose(&e.compose(h)?)?;
    let count = f.fixed_points().len() as i64;
    if count != (ell - 1).abs() {
        return Err(Error::InvalidInput(format!(
            "conjugate has {count} fixed points, expected {}",
            (ell - 1).abs()
        )));
    }
    Ok(ExpandingConjugacy { ell, h: h.clone(), f })
}

/// `R_{j/(ℓ-1)} ∘ h` for `0 <= j < ℓ - 1`: all conjugators giving the same map.
pub fn rotation_companions(h: &PLCircleMap, ell: i64) -> Result<Vec<PLCircleMap>> {
    if !h.is_orientation_preserving_homeo() {
        return Err(Error::NotOrientationPreserving);
    }
    if ell < 2 {
        return Err(Error::InvalidInput(format!("rotation companions need ell >= 2, got {ell}")));
    }
    (0..ell - 1)
        .map(|j| PLCircleMap::rotation(&Rational::new(j, ell - 1)).compose(h))
        .collect()
}

/// `E_*^q h_* m (I_α^p) = Σ_β m(J_{βα}^{q+p})` from a family of depth at
/// least `q + p`.
pub fn cylinder_pushforward(fam: &ConsistentFamily, q: usize, p: usize) -> Result<CylinderSpec> {
    if fam.depth() < q + p {
        return Err(Error::InsufficientDepth { depth: fam.depth(), required: q + p });
    }
    fam.cylinder_pushforward(q, p)
}

/// Same, building the family from `h`.
pub fn cylinder_pushforward_homeo(h: &PLCircleMap, ell: u32, q: usize, p: usize) -> Result<CylinderSpec> {
    let fam = ConsistentFamily::from_homeo(h, ell, q + p)?;
    fam.cylinder_pushforward(q, p)
}

/// `(1/n) Σ_{k<n} E_*^k h_* m` at level `p`; needs depth `n - 1 + p`.
pub fn cesaro_cylinder(fam: &ConsistentFamily, n: usize, p: usize) -> Result<CylinderSpec> {
    let required = (n + p).saturating_sub(1);
    if fam.depth() < required {
        return Err(Error::InsufficientDepth { depth: fam.depth(), required });
    }
    fam.cesaro_cylinder(n, p)
}

/// Minimal `n_0 >= 1` with `ℓ^{-n_0} <= ε`.
pub fn scale_index(ell: u32, eps: &Rational) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput(format!("epsilon {eps} must be positive")));
    }
    let inv = eps.recip();
    let mut n0 = 1usize;
    let mut pow = Rational::from_integer(ell as i64);
    while pow < inv {
        pow *= &Rational::from_integer(ell as i64);
        n0 += 1;
    }
    Ok(n0)
}

/// Output of [`wicked_perturb`].
#[derive(Clone, Debug)]
pub struct WickedPerturbation {
    pub ell: u32,
    pub n0: usize,
    pub p: usize,
    pub n: usize,
    pub target: CylinderSpec,
    /// Family of depth `n - 1 + p`; its affine conjugator is `h'`.
    pub family: ConsistentFamily,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowRow {
    pub k: usize,
    pub distance: Rational,
    pub cesaro_distance: Rational,
}

impl WickedPerturbation {
    /// `h'` as a PL homeomorphism, when no cell of the family is empty.
    pub fn conjugator(&self) -> Option<PLCircleMap> {
        self.family.to_homeo().ok()
    }

    /// Exact `sup_x d(h(x), h'(x))`.
    pub fn c0_distance(&self, h: &PLCircleMap) -> Rational {
        self.family.c0_distance_to(h)
    }

    /// `E_*^k h'_* m` at the target's level.
    pub fn pushforward_spec(&self, k: usize) -> Result<CylinderSpec> {
        self.family.cylinder_pushforward(k, self.p)
    }

    /// Per-`k` distance to the target for `k < n`, with the distance of the
    /// running Cesàro average `(1/(k+1)) Σ_{j<=k}` as a second column.
    pub fn window_rows(&self) -> Result<Vec<WindowRow>> {
        let mut rows = Vec::with_capacity(self.n);
        let mut acc = vec![Rational::zero(); self.target.values().len()];
        for k in 0..self.n {
            let s = self.pushforward_spec(k)?;
            for (a, v) in acc.iter_mut().zip(s.values()) {
                *a += v;
            }
            let w = Rational::from_integer(k as i64 + 1).recip();
            let avg: Vec<Rational> = acc.iter().map(|a| a * &w).collect();
            let avg = CylinderSpec::new(self.ell, self.p, avg)?;
            rows.push(WindowRow { k, distance: s.distance(&self.target)?, cesaro_distance: avg.distance(&self.target)? });
        }
        Ok(rows)
    }

    /// True when `E_*^k h'_* m` equals the target exactly for `n_0 <= k < n`.
    pub fn window_exact(&self) -> Result<bool> {
        for k in self.n0..self.n {
            if self.pushforward_spec(k)? != self.target {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Image of a point under `h'`.
    pub fn conjugator_eval(&self, x: &CirclePoint) -> CirclePoint {
        self.family.conjugator_eval(x)
    }
}

/// Perturbs `h` so that `E_*^k h'_* m` equals the invariant `target` on
/// cylinders of its level for every `n_0 <= k < n`, while `h'` stays within
/// `ε` of `h`. Cells below level `n_0` come from `h`; deeper cells follow
/// `m(J_{βγ}) = m(J_β^{n_0}) μ(I_γ)`.
pub fn wicked_perturb(
    h: &PLCircleMap,
    ell: u32,
    target: &CylinderSpec,
    ext: Extension,
    eps: &Rational,
    n: usize,
) -> Result<WickedPerturbation> {
    if ell < 2 {
        return Err(Error::InvalidInput(format!("alphabet size must be at least 2, got {ell}")));
    }
    if target.ell() != ell {
        return Err(Error::AlphabetMismatch(target.ell(), ell));
    }
    target.check_invariant()?;
    target.check_extension(ext)?;
    let n0 = scale_index(ell, eps)?;
    let p = target.level();
    if n <= n0 + p {
        return Err(Error::Infeasible(format!("n = {n} must exceed n0 + p = {}", n0 + p)));
    }
    let depth = n - 1 + p;
    // with full support every level is complete, so the size is known now
    if target.values().iter().all(Rational::is_positive) {
        let cap = crate::partition::MAX_FAMILY_CELLS;
        let needed = (1..=depth)
            .try_fold(0usize, |acc, k| (ell as usize).checked_pow(k as u32).and_then(|c| acc.checked_add(c)))
            .unwrap_or(usize::MAX);
        if needed > cap {
            return Err(Error::ResourceExhausted { what: "family cells", needed, cap });
        }
    }
    let base = ConsistentFamily::from_homeo(h, ell, n0)?;
    let mut levels: Vec<Vec<Cell>> = (1..=n0).map(|k| base.level(k).to_vec()).collect();
    let mut total = levels.iter().map(Vec::len).sum::<usize>();
    for k in n0 + 1..=depth {
        let parents = &levels[k - 2];
        let head_mass: Vec<Rational> = parents.iter().map(|c| base.mass(&c.word.prefix(n0))).collect();
        let mut next = Vec::new();
        for (parent, head) in parents.iter().zip(&head_mass) {
            let mut pos = parent.start.value().clone();
            for c in 0..ell {
                let word = parent.word.push(c);
                let gamma = word.suffix(k - n0);
                let mu = target.extended_value(&gamma, ext);
                if mu.is_zero() {
                    continue;
                }
                let length = head * &mu;
                next.push(Cell { word, start: CirclePoint::from_lift(&pos), length: length.clone() });
                pos += &length;
            }
        }
        total += next.len();
        if total > crate::partition::MAX_FAMILY_CELLS {
            return Err(Error::ResourceExhausted {
                what: "family cells",
                needed: total,
                cap: crate::partition::MAX_FAMILY_CELLS,
            });
        }
        levels.push(next);
    }
    let family = ConsistentFamily::new(ell, levels)?;
    Ok(WickedPerturbation { ell, n0, p, n, target: target.clone(), family })
}

/// Words of length `p` in order, as strings; a convenience for reports.
pub fn word_labels(ell: u32, p: usize) -> Vec<String> {
    Word::all(ell, p).map(|w| w.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn scale_index_examples() {
        assert_eq!(scale_index(2, &q!(1, 4)).unwrap(), 2);
        assert_eq!(scale_index(2, &q!(1, 5)).unwrap(), 3);
        assert_eq!(scale_index(2, &q!(1, 2)).unwrap(), 1);
        assert_eq!(scale_index(3, &q!(1, 10)).unwrap(), 3);
    }

    #[test]
    fn identity_conjugates_to_itself() {
        let c = conjugate(&PLCircleMap::identity(), 3).unwrap();
        assert_eq!(c.f, PLCircleMap::expanding(3).unwrap());
        let comps = rotation_companions(&PLCircleMap::identity(), 3).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1], PLCircleMap::rotation(&q!(1, 2)));
        assert_eq!(conjugate(&comps[1], 3).unwrap().f, c.f);
    }

    #[test]
    fn rotated_conjugator_has_one_fixed_point() {
        let c = conjugate(&PLCircleMap::rotation(&q!(1, 4)), 2).unwrap();
        assert_eq!(c.f.fixed_points().len(), 1);
        assert_eq!(c.f.degree_i64(), 2);
    }

    #[test]
    fn dirac_window_is_exact() {
        let t = CylinderSpec::dirac_zero(2, 3).unwrap();
        let w = wicked_perturb(&PLCircleMap::identity(), 2, &t, Extension::Markov, &q!(1, 4), 8).unwrap();
        assert_eq!(w.n0, 2);
        assert!(w.window_exact().unwrap());
        assert!(w.c0_distance(&PLCircleMap::identity()) < q!(1, 4));
        assert!(w.conjugator().is_none());
    }

    #[test]
    fn lebesgue_target_keeps_identity() {
        let t = CylinderSpec::lebesgue(2, 2).unwrap();
        let w = wicked_perturb(&PLCircleMap::identity(), 2, &t, Extension::Markov, &q!(1, 4), 7).unwrap();
        assert_eq!(w.conjugator().unwrap(), PLCircleMap::identity());
        for k in 0..10 {
            assert_eq!(w.pushforward_spec(k).unwrap(), t);
        }
    }

    #[test]
    fn non_invariant_target_rejected() {
        let bad = CylinderSpec::new(2, 2, vec![q!(1, 2), q!(1, 2), q!(0), q!(0)]).unwrap();
        let err = wicked_perturb(&PLCircleMap::identity(), 2, &bad, Extension::Markov, &q!(1, 4), 8).unwrap_err();
        assert!(matches!(err, Error::NonInvariantTarget { .. }));
    }

    #[test]
    fn depth_is_enforced() {
        let fam = ConsistentFamily::from_homeo(&PLCircleMap::identity(), 2, 3).unwrap();
        assert!(matches!(cylinder_pushforward(&fam, 2, 2), Err(Error::InsufficientDepth { .. })));
        assert!(cesaro_cylinder(&fam, 3, 1).is_ok());
    }
}
