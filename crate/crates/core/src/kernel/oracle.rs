//! Hiding functions with query counting.
//!
//! An oracle owns its planted label and never hands it out; code outside the
//! kernel sees only [`HiddenOracle::query`], [`HiddenOracle::n`] and the query
//! counter. The symbolic and dense simulators, which live next to this module,
//! read the label to model what the physical evaluation would do.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::group::{D4Element, D4nElement, InvolutionLabel};

/// Value of a hiding function: the smallest element of the coset `gH`, plus
/// the outputs of any ancilla functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetTag {
    pub representative: D4nElement,
    pub ancilla: Vec<u8>,
}

/// Lookup table on D4 evaluated at one component of a D4^n element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaFunction {
    component: usize,
    table: [u8; 8],
}

impl AncillaFunction {
    /// `table` is indexed by [`D4Element::code`], i.e. `4t + k`.
    pub fn new(component: usize, table: [u8; 8]) -> Self {
        Self { component, table }
    }

    pub fn constant(component: usize) -> Self {
        Self::new(component, [0; 8])
    }

    /// `r^t s^k ↦ (-1)^t k mod 4`: constant on every coset of `{e, r}` and
    /// different on the two halves of every coset of `{e, r s²}`.
    pub fn even_class(component: usize) -> Self {
        Self::new(component, [0, 1, 2, 3, 0, 3, 2, 1])
    }

    /// `r^t s^k ↦ ⌊k/2⌋`: constant on every coset of `{e, r s}` and different
    /// on the two halves of every coset of `{e, r s³}`.
    pub fn odd_class(component: usize) -> Self {
        Self::new(component, [0, 0, 1, 1, 0, 0, 1, 1])
    }

    pub fn component(&self) -> usize {
        self.component
    }

    #[inline]
    pub fn eval(&self, g: D4Element) -> u8 {
        self.table[g.code()]
    }

    /// Number of left cosets `{x, x h}` of `{e, h}` on which the function
    /// takes one value (out of 4 cosets, or 8 "pairs" when `h = e`).
    pub fn constant_cosets(&self, h: D4Element) -> usize {
        let same = D4Element::ALL
            .iter()
            .filter(|&&x| self.eval(x) == self.eval(x.mul(h)))
            .count();
        // Each coset is counted once per member.
        if h == D4Element::IDENTITY {
            same
        } else {
            same / 2
        }
    }

    pub fn is_constant_on_cosets(&self, h: D4Element) -> bool {
        self.constant_cosets(h) == 4
    }

    pub fn splits_every_coset(&self, h: D4Element) -> bool {
        self.constant_cosets(h) == 0
    }
}

pub fn ancilla_for_even_class(component: usize) -> AncillaFunction {
    AncillaFunction::even_class(component)
}

pub fn ancilla_for_odd_class(component: usize) -> AncillaFunction {
    AncillaFunction::odd_class(component)
}

/// Which subgroup a (possibly extended) hiding function actually hides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenStructure {
    /// The planted `{e, h}`.
    Involution,
    /// Only `{e}`: the function is injective.
    Trivial,
    /// Constant on some cosets of `{e, h}` and not others; no subgroup is hidden.
    Mixed,
}

/// Oracle for a function on D4^n that hides a planted order-two subgroup.
#[derive(Debug)]
pub struct HiddenOracle {
    label: InvolutionLabel,
    involution: D4nElement,
    ancillas: Vec<AncillaFunction>,
    queries: Arc<AtomicU64>,
}

impl HiddenOracle {
    pub fn plant(label: InvolutionLabel) -> Self {
        Self {
            involution: label.element(),
            label,
            ancillas: Vec::new(),
            queries: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Like [`HiddenOracle::plant`] but also checks the label against `n`.
    pub fn plant_checked(label: InvolutionLabel, n: usize) -> Result<Self> {
        if label.n() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: label.n(),
            });
        }
        Ok(Self::plant(label))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.label.n()
    }

    /// Queries made so far, shared with every oracle extended from this one.
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Evaluates the hiding function and counts one query.
    pub fn query(&self, g: &D4nElement) -> Result<CosetTag> {
        if g.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: g.len(),
            });
        }
        self.record_query();
        Ok(self.evaluate(g))
    }

    /// Oracle for `g ↦ (f(g), a(g_i))`; queries to it count against this
    /// oracle's counter.
    pub fn extended(&self, ancilla: AncillaFunction) -> Result<Self> {
        if ancilla.component() >= self.n() {
            return Err(Error::ComponentOutOfRange {
                index: ancilla.component(),
                n: self.n(),
            });
        }
        let mut ancillas = self.ancillas.clone();
        ancillas.push(ancilla);
        Ok(Self {
            label: self.label.clone(),
            involution: self.involution.clone(),
            ancillas,
            queries: Arc::clone(&self.queries),
        })
    }

    pub(in crate::kernel) fn record_query(&self) {
        self.queries.fetch_add(1, Ordering::Relaxed);
    }

    pub(in crate::kernel) fn label(&self) -> &InvolutionLabel {
        &self.label
    }

    /// The hiding function itself, uncounted.
    pub(in crate::kernel) fn evaluate(&self, g: &D4nElement) -> CosetTag {
        let partner = g.mul(&self.involution).expect("lengths checked by caller");
        let representative = if partner < *g { partner } else { g.clone() };
        CosetTag {
            representative,
            ancilla: self
                .ancillas
                .iter()
                .map(|a| a.eval(g.component(a.component())))
                .collect(),
        }
    }

    /// Whether `g` and `g h` give the same function value, i.e. whether
    /// measuring the function register after preparing from `g` leaves a
    /// two-element coset.
    pub(in crate::kernel) fn merges_with_partner(&self, g: &D4nElement) -> bool {
        self.ancillas.iter().all(|a| {
            let i = a.component();
            let x = g.component(i);
            a.eval(x) == a.eval(x.mul(self.involution.component(i)))
        })
    }

    #[cfg(any(test, feature = "audit"))]
    fn structure(&self) -> HiddenStructure {
        let mut all_constant = true;
        for a in &self.ancillas {
            let h = self.involution.component(a.component());
            if a.splits_every_coset(h) {
                return HiddenStructure::Trivial;
            }
            all_constant &= a.is_constant_on_cosets(h);
        }
        if all_constant {
            HiddenStructure::Involution
        } else {
            HiddenStructure::Mixed
        }
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_label(&self) -> &InvolutionLabel {
        &self.label
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_structure(&self) -> HiddenStructure {
        self.structure()
    }
}

/// Returns `extended(o, a)`.
pub fn extended_oracle(o: &HiddenOracle, a: AncillaFunction) -> Result<HiddenOracle> {
    o.extended(a)
}

/// Simon oracle on Z2^n: `f(x) = f(x ⊕ z)` for a hidden nonzero `z`.
#[derive(Debug)]
pub struct SimonOracle {
    mask: BitVector,
    queries: AtomicU64,
}

impl SimonOracle {
    pub fn new(mask: BitVector) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::EmptyVector);
        }
        if mask.is_zero() {
            return Err(Error::InvalidLabel("Simon mask must be nonzero"));
        }
        Ok(Self {
            mask,
            queries: AtomicU64::new(0),
        })
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// `min(x, x ⊕ z)`, counting one query.
    pub fn query(&self, x: &BitVector) -> Result<BitVector> {
        let partner = x.xor(&self.mask)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(if partner < *x { partner } else { x.clone() })
    }

    pub(in crate::kernel) fn record_query(&self) {
        self.queries.fetch_add(1, Ordering::Relaxed);
    }

    pub(in crate::kernel) fn mask(&self) -> &BitVector {
        &self.mask
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_mask(&self) -> &BitVector {
        &self.mask
    }
}
