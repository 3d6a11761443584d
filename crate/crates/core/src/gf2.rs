//! Dense linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed 64 bits to a word, least significant bit
//! first, so row operations run one word at a time. Bits past the logical
//! length of a vector (or past `cols` in a matrix row) are always zero.
//!
//! Elimination always picks the leftmost available pivot, which makes every
//! result a deterministic function of the input matrix.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Builds a vector from 0/1 values. Any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Unit vector with a single 1 at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            len,
            words: (0..words_for(len)).map(|_| rng.random::<u64>()).collect(),
        };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    /// Componentwise sum mod 2.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    /// Componentwise AND.
    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        })
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits, ascending.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones_indices().next()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Keeps only the positions where `mask` is set, in order.
    pub fn select(&self, mask: &Self) -> Result<Self> {
        self.check_len(mask)?;
        Ok(Self::from_bools(mask.ones_indices().map(|i| self.get(i))))
    }

    /// Little-endian integer value; only meaningful for `len <= 64`.
    pub fn to_index(&self) -> usize {
        debug_assert!(self.len <= WORD_BITS);
        self.words.first().copied().unwrap_or(0) as usize
    }

    pub fn from_index(len: usize, index: usize) -> Self {
        debug_assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if let Some(w) = v.words.first_mut() {
            *w = index as u64;
        }
        v.clear_tail();
        v
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(u8::from))
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(serde::de::Error::custom(format!(
                "bit value {bad} is not 0 or 1"
            )));
        }
        Ok(Self::from_bits(&bits))
    }
}

/// Dense row-major GF(2) matrix.
///
/// Zero-row matrices are allowed; they describe an empty system of equations
/// whose nullspace is the whole space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Output of [`BitMatrix::row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub reduced: BitMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    /// Zero matrix. Panics if `cols == 0`.
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(cols >= 1, "BitMatrix needs at least one column");
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks `rows` as matrix rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = Self::new(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Builds a matrix from nested 0/1 slices, e.g. `&[&[1, 1, 0], &[0, 1, 1]]`.
    pub fn from_bit_rows(rows: &[&[u8]]) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).ok_or(Error::EmptyVector)?;
        let rows: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bits(r)).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let rows: Vec<BitVector> = (0..rows).map(|_| BitVector::random(cols, rng)).collect();
        Self::from_rows(cols, &rows).expect("rows built with matching length")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.row_words(r)[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.row_words_mut(r)[c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Appends a row at the bottom.
    pub fn push_row(&mut self, row: &BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: row.len(),
            });
        }
        self.data.extend_from_slice(row.words());
        self.rows += 1;
        Ok(())
    }

    /// Matrix-vector product `m·x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let ones: u32 = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`, one word at a time.
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (src_row, dst_row) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, v) in dst_row.iter_mut().zip(src_row) {
            *d ^= v;
        }
    }

    /// In-place reduced row-echelon form; returns the pivot columns.
    fn reduce_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..pivot_cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in 0..self.rows {
                if r != rank && self.get(r, c) {
                    self.xor_row_into(rank, r);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    /// Reduced row-echelon form with leftmost pivots.
    pub fn row_reduce(&self) -> RowReduction {
        let mut reduced = self.clone();
        let pivots = reduced.reduce_in_place(self.cols);
        RowReduction {
            reduced,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Basis of `{x : m·x = 0}`, one vector per free column, in column order.
    pub fn null_space_basis(&self) -> Vec<BitVector> {
        let RowReduction {
            reduced, pivots, ..
        } = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(self.cols, free);
                for (r, &p) in pivots.iter().enumerate() {
                    if reduced.get(r, free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `m·x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: self.rows,
                right: b.len(),
            });
        }
        let mut aug = BitMatrix::new(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in self.row(r).ones_indices() {
                aug.set(r, c, true);
            }
            if b.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        let pivots = aug.reduce_in_place(self.cols);
        let rank = pivots.len();
        if (rank..self.rows).any(|r| aug.get(r, self.cols)) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Uniform sample from the nullspace with zero removed.
    ///
    /// Draws random combinations of the nullspace basis and rejects zero, so
    /// each nonzero element is equally likely.
    pub fn sample_nonzero_null_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<BitVector> {
        let basis = self.null_space_basis();
        if basis.is_empty() {
            return None;
        }
        loop {
            let mut v = BitVector::zeros(self.cols);
            for b in &basis {
                if rng.random::<bool>() {
                    v.xor_assign(b).expect("basis vectors share the column count");
                }
            }
            if !v.is_zero() {
                return Some(v);
            }
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// All vectors `x` with `m·x = 0`, by enumeration.
    fn brute_null_space(m: &BitMatrix) -> Vec<BitVector> {
        (0..1usize << m.cols())
            .map(|i| BitVector::from_index(m.cols(), i))
            .filter(|x| m.mul_vec(x).unwrap().is_zero())
            .collect()
    }

    fn span(basis: &[BitVector], cols: usize) -> Vec<BitVector> {
        let mut out = Vec::new();
        for mask in 0..1usize << basis.len() {
            let mut v = BitVector::zeros(cols);
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v.xor_assign(b).unwrap();
                }
            }
            out.push(v);
        }
        out.sort();
        out
    }

    #[test]
    fn bitvector_basics() {
        let a = BitVector::from_bits(&[1, 0, 1]);
        let b = BitVector::from_bits(&[1, 1, 0]);
        assert_eq!(a.xor(&b).unwrap(), BitVector::from_bits(&[0, 1, 1]));
        assert!(a.xor(&a).unwrap().is_zero());
        assert!(a.dot(&b).unwrap());
        assert_eq!(a.to_string(), "101");
        assert_eq!(a.ones_indices().collect::<Vec<_>>(), vec![0, 2]);
        assert!(matches!(
            a.xor(&BitVector::zeros(4)),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        ));
        let long = BitVector::ones(130);
        assert_eq!(long.count_ones(), 130);
        assert_eq!(long.ones_indices().last(), Some(129));
    }

    #[test]
    fn serde_as_bit_list() {
        let a = BitVector::from_bits(&[0, 1, 1]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[0,1,1]");
        assert_eq!(serde_json::from_str::<BitVector>(&json).unwrap(), a);
        assert!(serde_json::from_str::<BitVector>("[0,2]").is_err());
    }

    #[test]
    fn identity_reduces_to_itself() {
        for n in [1, 5, 64, 70] {
            let id = BitMatrix::identity(n);
            let red = id.row_reduce();
            assert_eq!(red.reduced, id);
            assert_eq!(red.rank, n);
            assert_eq!(red.pivots, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn dependent_rows_rank_two() {
        let m = BitMatrix::from_bit_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap();
        // Row space enumeration: the 8 combinations give only 4 distinct vectors.
        let rows: Vec<BitVector> = (0..3).map(|r| m.row(r)).collect();
        let mut distinct = span(&rows, 3);
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn zero_matrix_rank_zero() {
        assert_eq!(BitMatrix::new(4, 7).rank(), 0);
        assert_eq!(BitMatrix::new(0, 3).null_space_basis().len(), 3);
    }

    #[test]
    fn parity_constraint_null_space() {
        let m = BitMatrix::from_bit_rows(&[&[1, 1]]).unwrap();
        assert_eq!(m.null_space_basis(), vec![BitVector::from_bits(&[1, 1])]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            m.sample_nonzero_null_vector(&mut rng),
            Some(BitVector::from_bits(&[1, 1]))
        );
    }

    #[test]
    fn full_rank_square_has_no_null_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(BitMatrix::identity(6).sample_nonzero_null_vector(&mut rng), None);
    }

    #[test]
    fn wide_matrix_always_has_null_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..20 {
            let m = BitMatrix::random(n, n + 1, &mut rng);
            assert!(!m.null_space_basis().is_empty());
        }
    }

    #[test]
    fn random_6x9_null_space_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = BitMatrix::random(6, 9, &mut rng);
            let basis = m.null_space_basis();
            assert_eq!(span(&basis, 9), {
                let mut b = brute_null_space(&m);
                b.sort();
                b
            });
        }
    }

    #[test]
    fn solve_cases() {
        let b = BitVector::from_bits(&[1, 0, 1, 1]);
        assert_eq!(BitMatrix::identity(4).solve(&b).unwrap(), Some(b));

        let m = BitMatrix::from_bit_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(m.solve(&BitVector::from_bits(&[0, 1])).unwrap(), None);
        assert!(m.solve(&BitVector::zeros(3)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..24 {
            let m = loop {
                let m = BitMatrix::random(n, n, &mut rng);
                if m.rank() == n {
                    break m;
                }
            };
            let b = BitVector::random(n, &mut rng);
            let x = m.solve(&b).unwrap().unwrap();
            assert_eq!(m.mul_vec(&x).unwrap(), b);
        }
    }

    #[test]
    fn sampled_null_vectors_satisfy_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let m = BitMatrix::random(3, 5, &mut rng);
            let s = m.sample_nonzero_null_vector(&mut rng).unwrap();
            assert!(!s.is_zero());
            assert!(m.mul_vec(&s).unwrap().is_zero());
        }
    }

    #[test]
    fn null_sampling_is_uniform_over_nonzero_elements() {
        // Nullspace of [[1,1,0,0]] has 8 elements, 7 nonzero.
        let m = BitMatrix::from_bit_rows(&[&[1, 1, 0, 0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = std::collections::BTreeMap::new();
        let draws = 70_000;
        for _ in 0..draws {
            *counts
                .entry(m.sample_nonzero_null_vector(&mut rng).unwrap().to_index())
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 7);
        for &c in counts.values() {
            assert!((c as f64 - 10_000.0).abs() < 500.0, "{counts:?}");
        }
    }
}
