use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rational, Word};

/// How a level-`p` spec is continued to deeper levels.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    /// Markov chain of order `p - 1` with the spec's transition ratios.
    #[default]
    Markov,
    /// Independent digits with the level-1 marginal; only valid for specs
    /// that already have product form.
    Product,
}

/// Values `μ(I_α^p)` of a measure on all words of length `p`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CylinderSpec {
    ell: u32,
    p: usize,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct SpecRecord {
    ell: u32,
    p: usize,
    values: BTreeMap<String, Rational>,
}

impl Serialize for CylinderSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let values = Word::all(self.ell, self.p).zip(&self.values).map(|(w, v)| (w.to_string(), v.clone())).collect();
        SpecRecord { ell: self.ell, p: self.p, values }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CylinderSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SpecRecord::deserialize(d)?;
        CylinderSpec::from_word_map(r.ell, r.p, &r.values).map_err(serde::de::Error::custom)
    }
}

impl CylinderSpec {
    pub(crate) fn from_values_unchecked(ell: u32, p: usize, values: Vec<Rational>) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidInput(format!("alphabet size {ell} below 2")));
        }
        Ok(CylinderSpec { ell, p, values })
    }

    /// Probability vector indexed by word order; `p >= 1`.
    pub fn new(ell: u32, p: usize, values: Vec<Rational>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("spec level must be at least 1".into()));
        }
        let expected = (ell as usize).checked_pow(p as u32).unwrap_or(usize::MAX);
        if values.len() != expected {
            return Err(Error::InvalidInput(format!("expected {expected} values, got {}", values.len())));
        }
        if values.iter().any(Rational::is_negative) {
            return Err(Error::InvalidInput("spec values must be nonnegative".into()));
        }
        let total: Rational = values.iter().sum();
        if total != Rational::one() {
            return Err(Error::InvalidInput(format!("spec values sum to {total}, expected 1")));
        }
        Self::from_values_unchecked(ell, p, values)
    }

    /// From a map word string -> value; missing words count as zero.
    pub fn from_word_map(ell: u32, p: usize, map: &BTreeMap<String, Rational>) -> Result<Self> {
        let n = (ell as usize).checked_pow(p as u32).unwrap_or(usize::MAX);
        if n > 1 << 24 {
            return Err(Error::ResourceExhausted { what: "cylinder words", needed: n, cap: 1 << 24 });
        }
        let mut values = vec![Rational::zero(); n];
        for (k, v) in map {
            let w = Word::parse(ell, k)?;
            if w.len() != p {
                return Err(Error::InvalidInput(format!("word {k} does not have length {p}")));
            }
            values[w.index()] = v.clone();
        }
        Self::new(ell, p, values)
    }

    pub fn lebesgue(ell: u32, p: usize) -> Result<Self> {
        let n = (ell as usize).pow(p as u32);
        let v = Rational::from_integer(n as i64).recip();
        Self::new(ell, p, vec![v; n])
    }

    /// `δ_0`: all mass on the word `0...0`.
    pub fn dirac_zero(ell: u32, p: usize) -> Result<Self> {
        let n = (ell as usize).pow(p as u32);
        let mut values = vec![Rational::zero(); n];
        values[0] = Rational::one();
        Self::new(ell, p, values)
    }

    /// Bernoulli product measure with digit probabilities `probs`.
    pub fn bernoulli(probs: &[Rational], p: usize) -> Result<Self> {
        let ell = probs.len() as u32;
        let values = Word::all(ell, p).map(|w| w.digits().iter().map(|&d| probs[d as usize].clone()).fold(Rational::one(), |a, b| a * b)).collect();
        Self::new(ell, p, values)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn level(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, w: &Word) -> &Rational {
        &self.values[w.index()]
    }

    /// Marginal at a coarser level `q <= p` (sum over suffixes).
    pub fn marginal(&self, q: usize) -> CylinderSpec {
        assert!(q <= self.p);
        let block = (self.ell as usize).pow((self.p - q) as u32);
        let values = self.values.chunks(block).map(|c| c.iter().sum()).collect();
        CylinderSpec { ell: self.ell, p: q, values }
    }

    /// Checks `Σ_c μ(αc) = Σ_b μ(bα)` for every word `α` of length `p - 1`.
    pub fn check_invariant(&self) -> Result<()> {
        if self.p < 1 {
            return Ok(());
        }
        let ell = self.ell as usize;
        let short = ell.pow((self.p - 1) as u32);
        for a in 0..short {
            let right: Rational = (0..ell).map(|c| &self.values[a * ell + c]).sum();
            let left: Rational = (0..ell).map(|b| &self.values[b * short + a]).sum();
            if left != right {
                let w = Word::from_index(self.ell, self.p - 1, a as u64);
                return Err(Error::NonInvariantTarget { word: w.to_string() });
            }
        }
        Ok(())
    }

    pub fn is_invariant(&self) -> bool {
        self.check_invariant().is_ok()
    }

    /// True when the spec equals the product of its level-1 marginal.
    pub fn is_product(&self) -> bool {
        let m = self.marginal(1);
        Word::all(self.ell, self.p).zip(&self.values).all(|(w, v)| {
            let prod = w.digits().iter().map(|&d| m.values[d as usize].clone()).fold(Rational::one(), |a, b| a * b);
            &prod == v
        })
    }

    /// `μ(I_γ)` for a word of any length under the chosen extension.
    pub fn extended_value(&self, w: &Word, ext: Extension) -> Rational {
        let k = w.len();
        if k <= self.p {
            let block = (self.ell as usize).pow((self.p - k) as u32);
            let start = w.index() * block;
            return self.values[start..start + block].iter().sum();
        }
        match ext {
            Extension::Product => {
                let m = self.marginal(1);
                w.digits().iter().map(|&d| m.values[d as usize].clone()).fold(Rational::one(), |a, b| a * b)
            }
            Extension::Markov => {
                let p = self.p;
                let short = self.marginal(p - 1);
                let mut v = self.value(&w.prefix(p)).clone();
                for i in 1..=k - p {
                    if v.is_zero() {
                        return v;
                    }
                    let win = Word::new(self.ell, w.digits()[i..i + p].to_vec()).expect("digits in range");
                    let num = self.value(&win);
                    if num.is_zero() {
                        return Rational::zero();
                    }
                    let head = Word::new(self.ell, w.digits()[i..i + p - 1].to_vec()).expect("digits in range");
                    let den = short.value(&head);
                    v = v * num / den;
                }
                v
            }
        }
    }

    /// Validates that `ext` is usable with this spec.
    pub fn check_extension(&self, ext: Extension) -> Result<()> {
        match ext {
            Extension::Markov => Ok(()),
            Extension::Product if self.is_product() => Ok(()),
            Extension::Product => Err(Error::InvalidInput(
                "product extension requested for a spec that is not of product form".into(),
            )),
        }
    }

    /// `max_α |a(α) - b(α)|`.
    pub fn distance(&self, other: &CylinderSpec) -> Result<Rational> {
        if self.ell != other.ell || self.p != other.p {
            return Err(Error::InvalidInput(format!(
                "spec dimensions differ: (ell {}, p {}) vs (ell {}, p {})",
                self.ell, self.p, other.ell, other.p
            )));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero))
    }

    /// `Σ c_i s_i` over specs of equal shape.
    pub fn combination(terms: &[(Rational, &CylinderSpec)]) -> Result<CylinderSpec> {
        let first = terms.first().ok_or_else(|| Error::InvalidInput("empty combination".into()))?.1;
        let mut values = vec![Rational::zero(); first.values.len()];
        for (c, s) in terms {
            if s.ell != first.ell || s.p != first.p {
                return Err(Error::InvalidInput("spec dimensions differ".into()));
            }
            for (v, x) in values.iter_mut().zip(&s.values) {
                *v += c * x;
            }
        }
        Ok(CylinderSpec { ell: first.ell, p: first.p, values })
    }
}
