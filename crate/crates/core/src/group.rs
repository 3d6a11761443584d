//! Exact arithmetic in D4, D4^n and the vector groups Z2^n, Z4^n.
//!
//! A D4 element is written `r^t s^k` with `t` in Z2 and `k` in Z4, and the
//! product is
//!
//! ```text
//! r^t s^k · r^t' s^k' = r^(t+t') s^((-1)^t' k + k')
//! ```
//!
//! i.e. moving `s^k` past a reflection negates its exponent. Everything here
//! is integer arithmetic with an explicit reduction after each step.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Element of Z2^n.
pub type Z2Vector = BitVector;

/// Element of Z4^n, one digit per component.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Z4Vector {
    digits: Vec<u8>,
}

impl Z4Vector {
    /// Rejects digits outside `0..4`.
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&value) = digits.iter().find(|&&d| d > 3) {
            return Err(Error::InvalidDigit { value, modulus: 4 });
        }
        Ok(Self { digits })
    }

    /// Reduces every entry mod 4.
    pub fn from_reduced<I: IntoIterator<Item = i64>>(values: I) -> Self {
        Self {
            digits: values.into_iter().map(|v| v.rem_euclid(4) as u8).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            digits: vec![0; len],
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self {
            digits: (0..len).map(|_| rng.random_range(0..4u8)).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.digits[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u8) {
        self.digits[i] = value & 3;
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            digits: self
                .digits
                .iter()
                .zip(&other.digits)
                .map(|(a, b)| (a + b) & 3)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            digits: self
                .digits
                .iter()
                .zip(&other.digits)
                .map(|(a, b)| (a + 4 - b) & 3)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            digits: self.digits.iter().map(|d| (4 - d) & 3).collect(),
        }
    }

    /// Bit `level` of every digit (level 0 is the parity).
    pub fn bit_plane(&self, level: u32) -> BitVector {
        BitVector::from_bools(self.digits.iter().map(|d| (d >> level) & 1 == 1))
    }

    /// Keeps only the components where `mask` is set.
    pub fn select(&self, mask: &BitVector) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: mask.len(),
            });
        }
        Ok(Self {
            digits: mask.ones_indices().map(|i| self.digits[i]).collect(),
        })
    }
}

impl fmt::Debug for Z4Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z4Vector({self})")
    }
}

impl fmt::Display for Z4Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Serialize for Z4Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.digits.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Z4Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Z4Vector::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// `r^t s^k` in the dihedral group of order 8.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct D4Element {
    t: u8,
    k: u8,
}

impl std::ops::Mul for D4Element {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        D4Element::mul(self, rhs)
    }
}

impl D4Element {
    pub const IDENTITY: Self = Self { t: 0, k: 0 };

    /// All eight elements, ordered by [`D4Element::code`].
    pub const ALL: [Self; 8] = [
        Self { t: 0, k: 0 },
        Self { t: 0, k: 1 },
        Self { t: 0, k: 2 },
        Self { t: 0, k: 3 },
        Self { t: 1, k: 0 },
        Self { t: 1, k: 1 },
        Self { t: 1, k: 2 },
        Self { t: 1, k: 3 },
    ];

    /// Reduces `t` mod 2 and `k` mod 4.
    pub const fn new(t: u8, k: u8) -> Self {
        Self { t: t & 1, k: k & 3 }
    }

    #[inline]
    pub const fn t(self) -> u8 {
        self.t
    }

    #[inline]
    pub const fn k(self) -> u8 {
        self.k
    }

    /// Index `4t + k` in `0..8`; also the canonical total order.
    #[inline]
    pub const fn code(self) -> usize {
        (self.t as usize) << 2 | self.k as usize
    }

    pub const fn from_code(code: usize) -> Self {
        Self::new((code >> 2) as u8, code as u8)
    }

    pub fn is_reflection(self) -> bool {
        self.t == 1
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Self {
        let k = if rhs.t == 0 { self.k } else { (4 - self.k) & 3 };
        Self::new(self.t ^ rhs.t, k + rhs.k)
    }

    #[inline]
    pub fn inverse(self) -> Self {
        if self.t == 1 {
            self
        } else {
            Self::new(0, 4 - self.k)
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_code(rng.random_range(0..8))
    }
}

impl PartialOrd for D4Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for D4Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl fmt::Debug for D4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r^{} s^{}", self.t, self.k)
    }
}

/// Group product in D4.
pub fn d4_mul(a: D4Element, b: D4Element) -> D4Element {
    a.mul(b)
}

pub fn d4_inverse(a: D4Element) -> D4Element {
    a.inverse()
}

/// Element of D4^n stored as its reflection bits and rotation digits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct D4nElement {
    t: Z2Vector,
    k: Z4Vector,
}

impl D4nElement {
    pub fn new(t: Z2Vector, k: Z4Vector) -> Result<Self> {
        if t.len() != k.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: k.len(),
            });
        }
        if t.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self { t, k })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            t: Z2Vector::zeros(n),
            k: Z4Vector::zeros(n),
        }
    }

    pub fn from_components(components: &[D4Element]) -> Result<Self> {
        Self::new(
            Z2Vector::from_bools(components.iter().map(|c| c.t == 1)),
            Z4Vector::new(components.iter().map(|c| c.k).collect())?,
        )
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            t: Z2Vector::random(n, rng),
            k: Z4Vector::random(n, rng),
        }
    }

    /// Element whose base-8 digits (component 0 least significant) are the
    /// component codes of `index`. Covers D4^n for `index < 8^n`.
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let comps: Vec<D4Element> = (0..n)
            .map(|_| {
                let c = D4Element::from_code(index & 7);
                index >>= 3;
                c
            })
            .collect();
        Self::from_components(&comps).expect("n >= 1")
    }

    /// Inverse of [`D4nElement::from_index`].
    pub fn to_index(&self) -> usize {
        (0..self.len())
            .rev()
            .fold(0, |acc, i| acc << 3 | self.component(i).code())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.t.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &Z2Vector {
        &self.t
    }

    pub fn k(&self) -> &Z4Vector {
        &self.k
    }

    #[inline]
    pub fn component(&self, i: usize) -> D4Element {
        D4Element::new(u8::from(self.t.get(i)), self.k.get(i))
    }

    pub fn components(&self) -> impl ExactSizeIterator<Item = D4Element> + '_ {
        (0..self.len()).map(move |i| self.component(i))
    }

    pub fn is_identity(&self) -> bool {
        self.t.is_zero() && self.k.is_zero()
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: rhs.len(),
            });
        }
        let comps: Vec<D4Element> = self
            .components()
            .zip(rhs.components())
            .map(|(a, b)| a.mul(b))
            .collect();
        Self::from_components(&comps)
    }

    pub fn inverse(&self) -> Self {
        let comps: Vec<D4Element> = self.components().map(D4Element::inverse).collect();
        Self::from_components(&comps).expect("same length")
    }
}

impl PartialOrd for D4nElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by component, each component ordered by its code.
impl Ord for D4nElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.components()
            .cmp(other.components())
            .then(self.len().cmp(&other.len()))
    }
}

impl fmt::Debug for D4nElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D4n(t={}, k={})", self.t, self.k)
    }
}

/// Componentwise product in D4^n.
pub fn d4n_mul(a: &D4nElement, b: &D4nElement) -> Result<D4nElement> {
    a.mul(b)
}

/// Label `(t, l)` of the order-two subgroup `{e, ×_i r^t_i s^l_i}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct InvolutionLabel {
    t: Z2Vector,
    l: Z4Vector,
}

impl InvolutionLabel {
    pub fn new(t: Z2Vector, l: Z4Vector) -> Result<Self> {
        if t.len() != l.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: l.len(),
            });
        }
        if t.is_empty() {
            return Err(Error::EmptyVector);
        }
        if t.is_zero() {
            return Err(Error::InvalidLabel("t must be nonzero"));
        }
        if (0..t.len()).any(|i| !t.get(i) && l.get(i) != 0) {
            return Err(Error::InvalidLabel("l_i must be 0 wherever t_i = 0"));
        }
        Ok(Self { t, l })
    }

    pub fn from_digits(t: &[u8], l: &[u8]) -> Result<Self> {
        if let Some(&value) = t.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidDigit { value, modulus: 2 });
        }
        Self::new(Z2Vector::from_bits(t), Z4Vector::new(l.to_vec())?)
    }

    /// Uniform over all `5^n - 1` valid labels: each component is uniform over
    /// `(0,0), (1,0), (1,1), (1,2), (1,3)`, rejecting `t = 0`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "n must be at least 1");
        loop {
            let mut t = Z2Vector::zeros(n);
            let mut l = Z4Vector::zeros(n);
            for i in 0..n {
                let c = rng.random_range(0..5u8);
                if c > 0 {
                    t.set(i, true);
                    l.set(i, c - 1);
                }
            }
            if !t.is_zero() {
                return Self { t, l };
            }
        }
    }

    /// Every valid label for `n` components (`5^n - 1` of them).
    pub fn enumerate(n: usize) -> Vec<Self> {
        let total = 5usize.pow(n as u32);
        (1..total)
            .map(|mut code| {
                let mut t = Z2Vector::zeros(n);
                let mut l = Z4Vector::zeros(n);
                for i in 0..n {
                    let c = (code % 5) as u8;
                    code /= 5;
                    if c > 0 {
                        t.set(i, true);
                        l.set(i, c - 1);
                    }
                }
                Self { t, l }
            })
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self) -> &Z2Vector {
        &self.t
    }

    pub fn l(&self) -> &Z4Vector {
        &self.l
    }

    /// The nontrivial element `×_i r^t_i s^l_i` of the subgroup.
    pub fn element(&self) -> D4nElement {
        D4nElement {
            t: self.t.clone(),
            k: self.l.clone(),
        }
    }

    pub fn class(&self) -> ClassLabel {
        conjugacy_class(self)
    }
}

impl fmt::Debug for InvolutionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvolutionLabel(t={}, l={})", self.t, self.l)
    }
}

#[derive(Serialize, Deserialize)]
struct LabelRepr {
    n: usize,
    t: Z2Vector,
    l: Z4Vector,
}

impl Serialize for InvolutionLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LabelRepr {
            n: self.n(),
            t: self.t.clone(),
            l: self.l.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InvolutionLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LabelRepr::deserialize(deserializer)?;
        if repr.t.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "n = {} but t has {} entries",
                repr.n,
                repr.t.len()
            )));
        }
        InvolutionLabel::new(repr.t, repr.l).map_err(serde::de::Error::custom)
    }
}

/// Returns the nontrivial element of the labeled subgroup.
pub fn involution_element(label: &InvolutionLabel) -> D4nElement {
    label.element()
}

/// Canonical form of a conjugacy class of reflection involutions: the pairs
/// `(t_i, l_i mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLabel(pub Vec<(u8, u8)>);

/// Subgroups `{e, r s^l}` and `{e, r s^(l+2)}` are conjugate in D4, so the
/// class of a label only remembers the parity of each `l_i`.
pub fn conjugacy_class(label: &InvolutionLabel) -> ClassLabel {
    ClassLabel(
        (0..label.n())
            .map(|i| (u8::from(label.t.get(i)), label.l.get(i) & 1))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: u8, k: u8) -> D4Element {
        D4Element::new(t, k)
    }

    #[test]
    fn product_examples() {
        assert_eq!(d4_mul(e(0, 1), e(0, 1)), e(0, 2));
        assert_eq!(d4_mul(e(1, 1), e(1, 1)), D4Element::IDENTITY);
        for g in D4Element::ALL {
            assert_eq!(d4_mul(D4Element::IDENTITY, g), g);
            assert_eq!(d4_mul(g, D4Element::IDENTITY), g);
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for a in D4Element::ALL {
            for b in D4Element::ALL {
                for c in D4Element::ALL {
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                }
            }
        }
        // Latin square: every row and column of the Cayley table is a permutation.
        for a in D4Element::ALL {
            let mut row: Vec<usize> = D4Element::ALL.iter().map(|&b| a.mul(b).code()).collect();
            let mut col: Vec<usize> = D4Element::ALL.iter().map(|&b| b.mul(a).code()).collect();
            row.sort();
            col.sort();
            assert_eq!(row, (0..8).collect::<Vec<_>>());
            assert_eq!(col, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn inverses_match_cayley_search() {
        for a in D4Element::ALL {
            let found = D4Element::ALL
                .into_iter()
                .find(|&b| a.mul(b) == D4Element::IDENTITY)
                .unwrap();
            assert_eq!(d4_inverse(a), found);
        }
        assert_eq!(d4_inverse(e(0, 1)), e(0, 3));
        for k in 0..4 {
            assert_eq!(d4_inverse(e(1, k)), e(1, k));
        }
    }

    #[test]
    fn d4n_products() {
        let g = D4nElement::from_components(&[e(1, 0), e(1, 0)]).unwrap();
        assert!(d4n_mul(&g, &g).unwrap().is_identity());
        assert_eq!(d4n_mul(&D4nElement::identity(2), &g).unwrap(), g);

        let a = D4nElement::new(Z2Vector::from_bits(&[0, 1]), Z4Vector::new(vec![1, 3]).unwrap())
            .unwrap();
        let b = D4nElement::new(Z2Vector::from_bits(&[1, 0]), Z4Vector::new(vec![2, 0]).unwrap())
            .unwrap();
        let expected = D4nElement::from_components(&[e(0, 1).mul(e(1, 2)), e(1, 3).mul(e(0, 0))])
            .unwrap();
        assert_eq!(d4n_mul(&a, &b).unwrap(), expected);
        assert_eq!(expected, D4nElement::from_components(&[e(1, 1), e(1, 3)]).unwrap());

        assert!(matches!(
            d4n_mul(&a, &D4nElement::identity(3)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn index_roundtrip() {
        for i in 0..64 {
            assert_eq!(D4nElement::from_index(2, i).to_index(), i);
        }
    }

    #[test]
    fn label_validation() {
        assert!(matches!(
            InvolutionLabel::from_digits(&[0, 0], &[0, 0]),
            Err(Error::InvalidLabel(_))
        ));
        assert!(InvolutionLabel::from_digits(&[0, 1], &[1, 0]).is_err());
        assert!(InvolutionLabel::from_digits(&[1], &[4]).is_err());
        assert!(InvolutionLabel::from_digits(&[1, 0], &[2]).is_err());

        let lab = InvolutionLabel::from_digits(&[1], &[2]).unwrap();
        assert_eq!(involution_element(&lab).component(0), e(1, 2));

        let lab = InvolutionLabel::from_digits(&[1, 1], &[0, 3]).unwrap();
        let h = involution_element(&lab);
        assert_eq!(h.components().collect::<Vec<_>>(), vec![e(1, 0), e(1, 3)]);
        assert!(h.mul(&h).unwrap().is_identity());
    }

    #[test]
    fn every_label_is_an_involution() {
        for n in 1..=3 {
            let labels = InvolutionLabel::enumerate(n);
            assert_eq!(labels.len(), 5usize.pow(n as u32) - 1);
            for lab in labels {
                let h = lab.element();
                assert!(!h.is_identity());
                assert!(h.mul(&h).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn label_json_shape() {
        let lab = InvolutionLabel::from_digits(&[1, 0, 1], &[3, 0, 2]).unwrap();
        let json = serde_json::to_string(&lab).unwrap();
        assert_eq!(json, r#"{"n":3,"t":[1,0,1],"l":[3,0,2]}"#);
        assert_eq!(serde_json::from_str::<InvolutionLabel>(&json).unwrap(), lab);
        assert!(serde_json::from_str::<InvolutionLabel>(r#"{"n":2,"t":[1,0,1],"l":[3,0,2]}"#).is_err());
        assert!(serde_json::from_str::<InvolutionLabel>(r#"{"n":1,"t":[0],"l":[0]}"#).is_err());
    }

    /// Conjugate subgroups by brute force: `{e,h}` ~ `{e,h'}` iff some `g`
    /// has `g h g^-1 = h'`, checked per component.
    fn brute_conjugate(a: &InvolutionLabel, b: &InvolutionLabel) -> bool {
        let (ha, hb) = (a.element(), b.element());
        (0..a.n()).all(|i| {
            D4Element::ALL.iter().any(|&g| {
                g.mul(ha.component(i)).mul(g.inverse()) == hb.component(i)
            })
        })
    }

    #[test]
    fn conjugacy_examples() {
        let lab = |t: &[u8], l: &[u8]| InvolutionLabel::from_digits(t, l).unwrap();
        assert_eq!(lab(&[1], &[0]).class(), lab(&[1], &[2]).class());
        assert_eq!(lab(&[1], &[1]).class(), lab(&[1], &[3]).class());
        assert_ne!(lab(&[1], &[0]).class(), lab(&[1], &[1]).class());
    }

    #[test]
    fn conjugacy_matches_brute_force() {
        for n in 1..=2 {
            let labels = InvolutionLabel::enumerate(n);
            for a in &labels {
                for b in &labels {
                    assert_eq!(a.class() == b.class(), brute_conjugate(a, b), "{a:?} {b:?}");
                }
            }
        }
    }
}
