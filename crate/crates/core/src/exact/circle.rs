use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// A point of the circle `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    /// Reduces any real lift value mod 1.
    pub fn from_lift(t: &Rational) -> Self {
        CirclePoint(t.fract())
    }

    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value >= Rational::one() {
            return Err(Error::InvalidInput(format!("circle point {value} outside [0,1)")));
        }
        Ok(CirclePoint(value))
    }

    pub fn zero() -> Self {
        CirclePoint(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    /// Flat circle metric `min(|x-y|, 1-|x-y|)`.
    pub fn distance(&self, other: &CirclePoint) -> Rational {
        (&self.0 - &other.0).dist_to_integer()
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<CirclePoint> for Rational {
    fn from(p: CirclePoint) -> Rational {
        p.0
    }
}

/// Half-open arc `[start, start + length)` taken mod 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    start: CirclePoint,
    length: Rational,
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, +{})", self.start, self.length)
    }
}

impl Arc {
    pub fn new(start: CirclePoint, length: Rational) -> Result<Self> {
        if !length.is_positive() || length > Rational::one() {
            return Err(Error::InvalidInput(format!("arc length {length} outside (0,1]")));
        }
        Ok(Arc { start, length })
    }

    /// Arc starting at the lift value `start` (reduced mod 1).
    pub fn from_lift(start: &Rational, length: Rational) -> Result<Self> {
        Arc::new(CirclePoint::from_lift(start), length)
    }

    /// `[a, b)` for lift values `a < b <= a + 1`.
    pub fn between(a: &Rational, b: &Rational) -> Result<Self> {
        Arc::from_lift(a, b - a)
    }

    pub fn full() -> Self {
        Arc { start: CirclePoint::zero(), length: Rational::one() }
    }

    pub fn start(&self) -> &CirclePoint {
        &self.start
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    /// Lift value of the right endpoint, in `(0, 2)`.
    pub fn end_lift(&self) -> Rational {
        self.start.value() + &self.length
    }

    pub fn measure(&self) -> Rational {
        self.length.clone()
    }

    pub fn midpoint(&self) -> CirclePoint {
        CirclePoint::from_lift(&(self.start.value() + &self.length / Rational::from_integer(2)))
    }

    /// Offset of `x` from the start, in `[0, 1)`.
    fn offset(&self, x: &Rational) -> Rational {
        (x - self.start.value()).fract()
    }

    /// Half-open membership with wraparound.
    pub fn contains(&self, x: &CirclePoint) -> bool {
        self.offset(x.value()) < self.length
    }

    /// Membership in the open arc `(start, start + length)`.
    pub fn contains_open(&self, x: &CirclePoint) -> bool {
        if self.length == Rational::one() {
            return x != &self.start;
        }
        let o = self.offset(x.value());
        o.is_positive() && o < self.length
    }

    /// Margin by which the closed lift interval `[lo, hi]` sits inside the
    /// open arc, or `None` when it is not contained.
    pub fn closed_margin(&self, lo: &Rational, hi: &Rational) -> Option<Rational> {
        let width = hi - lo;
        if width.is_negative() || width >= Rational::one() {
            return None;
        }
        let o = self.offset(lo);
        let left = o.clone();
        let right = &self.length - &o - &width;
        if left.is_positive() && right.is_positive() {
            Some(left.min(right))
        } else {
            None
        }
    }

    /// The arc as one or two half-open pieces `[a, b)` of `[0, 1]`.
    pub fn unit_pieces(&self) -> Vec<(Rational, Rational)> {
        split_unit(self.start.value(), &self.end_lift())
    }

    pub fn intersection_measure(&self, other: &Arc) -> Rational {
        let mut total = Rational::zero();
        for (a, b) in self.unit_pieces() {
            for (c, d) in other.unit_pieces() {
                let lo = a.clone().max(c.clone());
                let hi = b.clone().min(d);
                if lo < hi {
                    total += hi - lo;
                }
            }
        }
        total
    }
}

/// Splits the lift interval `[a, b)` into pieces of `[0, 1]`, one per turn.
/// Requires `a <= b`; wraps as many times as needed.
pub fn split_unit(a: &Rational, b: &Rational) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    if a >= b {
        return out;
    }
    let k0 = a.floor();
    let mut k = k0;
    loop {
        let base = Rational::from_bigint(k.clone());
        let lo = a.clone().max(base.clone());
        let hi = b.clone().min(&base + Rational::one());
        if lo < hi {
            out.push((lo - &base, hi - &base));
        }
        if &base + Rational::one() >= *b {
            break;
        }
        k += 1;
    }
    out
}

/// A finite word over the alphabet `{0, ..., ell-1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    ell: u32,
    digits: Vec<u32>,
}

const DIGIT_CHARS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

impl Word {
    pub fn new(ell: u32, digits: Vec<u32>) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidInput(format!("alphabet size {ell} < 2")));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= ell) {
            return Err(Error::InvalidInput(format!("digit {d} not below {ell}")));
        }
        Ok(Word { ell, digits })
    }

    pub fn empty(ell: u32) -> Self {
        Word { ell, digits: Vec::new() }
    }

    /// The word of length `len` whose base-`ell` value is `index`.
    pub fn from_index(ell: u32, len: usize, mut index: u64) -> Self {
        let mut digits = vec![0; len];
        for d in digits.iter_mut().rev() {
            *d = (index % ell as u64) as u32;
            index /= ell as u64;
        }
        Word { ell, digits }
    }

    /// Parses a digit string like `"0110"`; digits above 9 use `a..z`.
    pub fn parse(ell: u32, s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(ell, digits)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Base-`ell` value of the word.
    pub fn value(&self) -> BigInt {
        let ell = BigInt::from(self.ell);
        self.digits.iter().fold(BigInt::zero(), |acc, &d| acc * &ell + BigInt::from(d))
    }

    /// Index for short words, used to address dense per-level tables.
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0usize, |acc, &d| acc * self.ell as usize + d as usize)
    }

    pub fn push(&self, d: u32) -> Word {
        let mut digits = self.digits.clone();
        digits.push(d);
        Word { ell: self.ell, digits }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word { ell: self.ell, digits: self.digits[..len].to_vec() }
    }

    pub fn suffix(&self, len: usize) -> Word {
        Word { ell: self.ell, digits: self.digits[self.digits.len() - len..].to_vec() }
    }

    pub fn starts_with(&self, other: &Word) -> bool {
        self.digits.starts_with(&other.digits)
    }

    pub fn ends_with(&self, other: &Word) -> bool {
        self.digits.ends_with(&other.digits)
    }

    /// All `ell^len` words of length `len`, in base-`ell` order.
    pub fn all(ell: u32, len: usize) -> impl Iterator<Item = Word> {
        let count = (ell as u64).pow(len as u32);
        (0..count).map(move |i| Word::from_index(ell, len, i))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", DIGIT_CHARS[d as usize] as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\u{2082}{}", self, self.ell)
    }
}

/// Concatenation `ab`.
pub fn word_concat(a: &Word, b: &Word) -> Result<Word> {
    if a.ell != b.ell {
        return Err(Error::AlphabetMismatch(a.ell, b.ell));
    }
    let mut digits = a.digits.clone();
    digits.extend_from_slice(&b.digits);
    Ok(Word { ell: a.ell, digits })
}

/// The cylinder interval `[a / ell^p, (a+1) / ell^p)` of a word of length `p`.
pub fn word_interval(w: &Word) -> Arc {
    let scale = num_traits::pow(BigInt::from(w.ell), w.len());
    let start = Rational::from_big(w.value(), scale.clone());
    let length = Rational::from_big(BigInt::one(), scale);
    Arc { start: CirclePoint(start), length }
}

/// `ell^-p` as a rational.
pub fn cylinder_length(ell: u32, p: usize) -> Rational {
    Rational::from_big(BigInt::one(), num_traits::pow(BigInt::from(ell), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;
    use proptest::prelude::*;

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(q!(n, d)).unwrap()
    }

    #[test]
    fn concat_examples() {
        let a = Word::parse(2, "010").unwrap();
        let b = Word::parse(2, "11").unwrap();
        assert_eq!(word_concat(&a, &b).unwrap().to_string(), "01011");
        let e = Word::empty(8);
        let seven = Word::parse(8, "7").unwrap();
        assert_eq!(word_concat(&e, &seven).unwrap(), seven);
        let c = Word::parse(3, "21").unwrap();
        let d = Word::parse(3, "02").unwrap();
        assert_eq!(word_concat(&c, &d).unwrap().to_string(), "2102");
        assert!(matches!(word_concat(&a, &c), Err(Error::AlphabetMismatch(2, 3))));
    }

    #[test]
    fn interval_examples() {
        let i000 = word_interval(&Word::parse(2, "000").unwrap());
        assert_eq!(i000.start().value(), &q!(0));
        assert_eq!(i000.length(), &q!(1, 8));
        let i111 = word_interval(&Word::parse(2, "111").unwrap());
        assert_eq!(i111.start().value(), &q!(7, 8));
        assert_eq!(i111.end_lift(), q!(1));
        let whole = word_interval(&Word::empty(3));
        assert_eq!(whole, Arc::full());
    }

    #[test]
    fn measure_and_membership() {
        let a = word_interval(&Word::parse(2, "000").unwrap());
        assert_eq!(a.measure(), q!(1, 8));
        assert!(!a.contains(&pt(1, 8)));
        assert!(a.contains(&pt(0, 1)));
        let wrap = Arc::new(pt(3, 4), q!(1, 2)).unwrap();
        assert!(wrap.contains(&pt(1, 8)));
        assert!(!wrap.contains(&pt(1, 4)));
        assert!(wrap.contains(&pt(3, 4)));
        assert!(!wrap.contains_open(&pt(3, 4)));
        assert_eq!(wrap.unit_pieces(), vec![(q!(3, 4), q!(1)), (q!(0), q!(1, 4))]);
    }

    #[test]
    fn closed_margin_checks_strict_containment() {
        let a = Arc::new(pt(1, 4), q!(1, 2)).unwrap();
        assert_eq!(a.closed_margin(&q!(1, 2), &q!(1, 2)), Some(q!(1, 4)));
        assert_eq!(a.closed_margin(&q!(5, 16), &q!(11, 16)), Some(q!(1, 16)));
        assert_eq!(a.closed_margin(&q!(1, 4), &q!(1, 2)), None);
        // lift shifted by a full turn
        assert_eq!(a.closed_margin(&q!(3, 2), &q!(3, 2)), Some(q!(1, 4)));
    }

    #[test]
    fn split_unit_wraps() {
        assert_eq!(split_unit(&q!(1, 2), &q!(5, 2)).len(), 3);
        assert_eq!(split_unit(&q!(-1, 4), &q!(1, 4)), vec![(q!(3, 4), q!(1)), (q!(0), q!(1, 4))]);
    }

    #[test]
    fn partition_property_exhaustive() {
        for ell in 2..=4u32 {
            for p in 0..=8usize {
                if (ell as u64).pow(p as u32) > 70_000 {
                    continue;
                }
                let arcs: Vec<Arc> = Word::all(ell, p).map(|w| word_interval(&w)).collect();
                let total: Rational = arcs.iter().map(|a| a.measure()).sum();
                assert_eq!(total, q!(1));
                // consecutive and contiguous in word order, hence disjoint
                for pair in arcs.windows(2) {
                    assert_eq!(pair[0].end_lift(), pair[1].start().value().clone());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn refinement_is_union_of_children(ell in 2u32..5, p in 0usize..6, seed in any::<u64>()) {
            let count = (ell as u64).pow(p as u32);
            let w = Word::from_index(ell, p, seed % count.max(1));
            let parent = word_interval(&w);
            let children: Vec<Arc> = (0..ell).map(|c| word_interval(&w.push(c))).collect();
            prop_assert_eq!(children[0].start(), parent.start());
            prop_assert_eq!(children[ell as usize - 1].end_lift(), parent.end_lift());
            for pair in children.windows(2) {
                prop_assert_eq!(pair[0].end_lift(), pair[1].start().value().clone());
            }
        }
    }
}
