//! Representations of D4 and the Clebsch-Gordan transform for the `D_j` family.
//!
//! All matrix entries are 0 or a power of `ω = i`, so every product computed
//! here is exact in floating point; the `1e-12` tolerance in the checks only
//! guards against a future non-exact path.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf2::BitVector;
use crate::group::{D4Element, Z2Vector};

/// Tolerance for every representation identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `ω^e` with `ω = i`.
pub fn omega_pow(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct RepMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl RepMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn scalar(value: Complex64) -> Self {
        Self {
            dim: 1,
            entries: vec![value],
        }
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len());
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let mut out = Self::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = self[(i, j)] * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal sum `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let mut out = Self::zeros(a + b);
        for i in 0..a {
            for j in 0..a {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..b {
            for j in 0..b {
                out[(a + i, a + j)] = rhs[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the matrix to a basis vector, returning the image column.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for RepMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RepMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Debug for RepMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepMatrix[")?;
        for i in 0..self.dim {
            write!(f, "[")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{}{:+}i ", z.re, z.im)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Irreducible representations of D4, named by their usual subscripts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Irrep {
    /// Trivial: `1`.
    #[serde(rename = "t")]
    T,
    /// `(-1)^t`.
    #[serde(rename = "a")]
    A,
    /// `(-1)^k`.
    #[serde(rename = "r")]
    R,
    /// `(-1)^(k+t)`.
    #[serde(rename = "ra")]
    Ra,
    /// The two-dimensional irrep, equal to `D_1`.
    #[serde(rename = "2dim")]
    Two,
}

impl Irrep {
    pub const ALL: [Irrep; 5] = [Irrep::T, Irrep::A, Irrep::R, Irrep::Ra, Irrep::Two];

    pub fn dim(self) -> usize {
        match self {
            Irrep::Two => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Irrep::T => "t",
            Irrep::A => "a",
            Irrep::R => "r",
            Irrep::Ra => "ra",
            Irrep::Two => "2dim",
        }
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn irrep_eval(id: Irrep, g: D4Element) -> RepMatrix {
    let sign = |e: u8| Complex64::new(if e & 1 == 0 { 1.0 } else { -1.0 }, 0.0);
    match id {
        Irrep::T => RepMatrix::scalar(Complex64::new(1.0, 0.0)),
        Irrep::A => RepMatrix::scalar(sign(g.t())),
        Irrep::R => RepMatrix::scalar(sign(g.k())),
        Irrep::Ra => RepMatrix::scalar(sign(g.k() + g.t())),
        Irrep::Two => redrep_eval(RedRepId::new(1), g),
    }
}

/// Index `j` in Z4 of the two-dimensional representation `D_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RedRepId(u8);

impl RedRepId {
    pub const ALL: [RedRepId; 4] = [RedRepId(0), RedRepId(1), RedRepId(2), RedRepId(3)];

    /// Reduces mod 4.
    pub const fn new(j: u8) -> Self {
        Self(j & 3)
    }

    pub const fn get(self) -> u8 {
        self.0
    }

    pub const fn neg(self) -> Self {
        Self::new(4 - self.0)
    }
}

impl fmt::Display for RedRepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D_{}", self.0)
    }
}

/// ```text
/// D_j(r^t s^k) = [ ω^{jk} δ_{t,0}    ω^{-jk} δ_{t,1} ]
///                [ ω^{jk} δ_{t,1}    ω^{-jk} δ_{t,0} ]
/// ```
pub fn redrep_eval(j: RedRepId, g: D4Element) -> RepMatrix {
    let e = i64::from(j.0) * i64::from(g.k());
    let zero = Complex64::new(0.0, 0.0);
    let (plus, minus) = (omega_pow(e), omega_pow(-e));
    if g.t() == 0 {
        RepMatrix::from_rows(&[&[plus, zero], &[zero, minus]])
    } else {
        RepMatrix::from_rows(&[&[zero, minus], &[plus, zero]])
    }
}

/// Labels of the two summands in `D_i ⊗ D_j = D_{i+j} ⊕ D_{i-j}`.
///
/// The first qubit after the double-controlled-not is the two-dimensional
/// multiplicity register: value 0 selects `plus`, value 1 selects `minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgOutcome {
    pub plus: RedRepId,
    pub minus: RedRepId,
}

impl CgOutcome {
    pub const MULTIPLICITY_DIM: usize = 2;
}

pub fn cg_series(i: RedRepId, j: RedRepId) -> CgOutcome {
    CgOutcome {
        plus: RedRepId::new(i.0 + j.0),
        minus: RedRepId::new(i.0 + 4 - j.0),
    }
}

/// `U|x,y⟩ = |x⊕y, x⟩` on two qubits, basis index `2x + y`.
pub fn double_cnot_matrix() -> RepMatrix {
    let perm: Vec<usize> = (0..4)
        .map(|idx| {
            let (x, y) = (idx >> 1, idx & 1);
            ((x ^ y) << 1) | x
        })
        .collect();
    RepMatrix::permutation(&perm)
}

pub fn pauli_x() -> RepMatrix {
    RepMatrix::permutation(&[1, 0])
}

/// Max over D4 of `|U (D_i ⊗ D_j) U† - (D_{i+j} ⊕ D_{i-j})|`.
pub fn verify_cg_conjugation(i: RedRepId, j: RedRepId) -> f64 {
    let u = double_cnot_matrix();
    let u_dag = u.adjoint();
    let out = cg_series(i, j);
    D4Element::ALL
        .iter()
        .map(|&g| {
            let lhs = u
                .mul(&redrep_eval(i, g).kron(&redrep_eval(j, g)))
                .mul(&u_dag);
            let rhs = redrep_eval(out.plus, g).direct_sum(&redrep_eval(out.minus, g));
            lhs.max_deviation(&rhs)
        })
        .fold(0.0, f64::max)
}

/// Max over D4 of `|X D_j X - D_{-j}|`.
pub fn verify_x_conjugation(j: RedRepId) -> f64 {
    let x = pauli_x();
    D4Element::ALL
        .iter()
        .map(|&g| {
            x.mul(&redrep_eval(j, g))
                .mul(&x)
                .max_deviation(&redrep_eval(j.neg(), g))
        })
        .fold(0.0, f64::max)
}

/// Which representation an identity check is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepId {
    Irrep(Irrep),
    Reducible(RedRepId),
}

impl RepId {
    pub fn eval(self, g: D4Element) -> RepMatrix {
        match self {
            RepId::Irrep(id) => irrep_eval(id, g),
            RepId::Reducible(j) => redrep_eval(j, g),
        }
    }

    pub fn all() -> impl Iterator<Item = RepId> {
        Irrep::ALL
            .into_iter()
            .map(RepId::Irrep)
            .chain(RedRepId::ALL.into_iter().map(RepId::Reducible))
    }
}

impl fmt::Display for RepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepId::Irrep(i) => write!(f, "{i}"),
            RepId::Reducible(j) => write!(f, "{j}"),
        }
    }
}

/// Max over all 64 pairs of `|ρ(g)ρ(h) - ρ(gh)|`.
pub fn homomorphism_deviation(rep: RepId) -> f64 {
    let mut worst: f64 = 0.0;
    for g in D4Element::ALL {
        for h in D4Element::ALL {
            let lhs = rep.eval(g).mul(&rep.eval(h));
            worst = worst.max(lhs.max_deviation(&rep.eval(g.mul(h))));
        }
    }
    worst
}

/// Max over D4 of `|ρ(g)ρ(g)† - 1|`.
pub fn unitarity_deviation(rep: RepId) -> f64 {
    D4Element::ALL
        .iter()
        .map(|&g| {
            let m = rep.eval(g);
            m.mul(&m.adjoint()).max_deviation(&RepMatrix::identity(m.dim()))
        })
        .fold(0.0, f64::max)
}

pub fn character(rep: RepId, g: D4Element) -> Complex64 {
    rep.eval(g).trace()
}

/// `(1/8) Σ_g conj(χ_a(g)) χ_b(g)`.
pub fn character_inner(a: RepId, b: RepId) -> Complex64 {
    D4Element::ALL
        .iter()
        .map(|&g| character(a, g).conj() * character(b, g))
        .sum::<Complex64>()
        / 8.0
}

/// Multiplicity of each irrep in `D_j`, from character inner products.
pub fn decompose_redrep(j: RedRepId) -> BTreeMap<Irrep, usize> {
    Irrep::ALL
        .into_iter()
        .filter_map(|id| {
            let m = character_inner(RepId::Irrep(id), RepId::Reducible(j));
            let count = m.re.round();
            debug_assert!((m.re - count).abs() < IDENTITY_TOLERANCE && m.im.abs() < IDENTITY_TOLERANCE);
            (count >= 1.0).then_some((id, count as usize))
        })
        .collect()
}

/// Clebsch-Gordan series of Z2^n: irrep labels combine by XOR.
///
/// Tensoring the characters `(-1)^{r1·x}` and `(-1)^{r2·x}` gives
/// `(-1)^{(r1+r2)·x}`, so the Gaussian elimination step of Simon's algorithm
/// is a sieve over this series.
pub fn cg_series_z2n(r1: &Z2Vector, r2: &Z2Vector) -> Result<BitVector> {
    r1.xor(r2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepCheck {
    pub rep: String,
    pub homomorphism: f64,
    pub unitarity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XConjugationCheck {
    pub j: RedRepId,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CgCheck {
    pub i: RedRepId,
    pub j: RedRepId,
    pub plus: RedRepId,
    pub minus: RedRepId,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub j: RedRepId,
    pub irreps: BTreeMap<Irrep, usize>,
}

/// Every representation identity of D4 with its worst deviation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub tolerance: f64,
    pub irreps: Vec<RepCheck>,
    pub reducible: Vec<RepCheck>,
    pub x_conjugation: Vec<XConjugationCheck>,
    pub cg_conjugation: Vec<CgCheck>,
    pub character_orthonormality: f64,
    pub decompositions: Vec<Decomposition>,
    pub max_deviation: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn run() -> Self {
        let check = |rep: RepId| RepCheck {
            rep: rep.to_string(),
            homomorphism: homomorphism_deviation(rep),
            unitarity: unitarity_deviation(rep),
        };
        let irreps: Vec<RepCheck> = Irrep::ALL.into_iter().map(|i| check(RepId::Irrep(i))).collect();
        let reducible: Vec<RepCheck> = RedRepId::ALL
            .into_iter()
            .map(|j| check(RepId::Reducible(j)))
            .collect();
        let x_conjugation: Vec<XConjugationCheck> = RedRepId::ALL
            .into_iter()
            .map(|j| XConjugationCheck {
                j,
                deviation: verify_x_conjugation(j),
            })
            .collect();
        let mut cg_conjugation = Vec::with_capacity(16);
        for i in RedRepId::ALL {
            for j in RedRepId::ALL {
                let out = cg_series(i, j);
                cg_conjugation.push(CgCheck {
                    i,
                    j,
                    plus: out.plus,
                    minus: out.minus,
                    deviation: verify_cg_conjugation(i, j),
                });
            }
        }
        let mut character_orthonormality: f64 = 0.0;
        for a in Irrep::ALL {
            for b in Irrep::ALL {
                let expected = if a == b { 1.0 } else { 0.0 };
                let got = character_inner(RepId::Irrep(a), RepId::Irrep(b));
                character_orthonormality =
                    character_orthonormality.max((got - Complex64::new(expected, 0.0)).norm());
            }
        }
        let decompositions = RedRepId::ALL
            .into_iter()
            .map(|j| Decomposition {
                j,
                irreps: decompose_redrep(j),
            })
            .collect();

        let max_deviation = irreps
            .iter()
            .chain(&reducible)
            .flat_map(|c| [c.homomorphism, c.unitarity])
            .chain(x_conjugation.iter().map(|c| c.deviation))
            .chain(cg_conjugation.iter().map(|c| c.deviation))
            .chain(std::iter::once(character_orthonormality))
            .fold(0.0, f64::max);
        Self {
            tolerance: IDENTITY_TOLERANCE,
            irreps,
            reducible,
            x_conjugation,
            cg_conjugation,
            character_orthonormality,
            decompositions,
            max_deviation,
            passed: max_deviation <= IDENTITY_TOLERANCE,
        }
    }
}
