//! Symbolic simulation of coset states, the Clebsch-Gordan cascade and the
//! phase-doubling rounds.
//!
//! Every state that appears is `(|b⟩ + ω^θ |b+u⟩)/√2` with `ω = i`, or a
//! single basis state `|b⟩` when `u = 0`. Only `b` and the coefficient vector
//! `μ` are visible; the offset `u` and exponent `θ` stay inside the kernel.
//!
//! Measurements of superpositions whose branches carry equal weight are
//! simulated by drawing the branch bits uniformly and then computing the
//! visible outcome. The dense simulator in [`super::dense`] checks this model
//! against explicit state vectors.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::group::{D4nElement, Z4Vector};

use super::oracle::{HiddenOracle, SimonOracle};

/// Coefficient vector multiplying `l_i t_i` in the sealed phase.
pub type PhaseCoefficients = Z4Vector;

/// `(|b⟩ + ω^θ |b+u⟩)/√2`, or `|b⟩` when the offset is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTermState {
    b: BitVector,
    offset: BitVector,
    theta: u8,
}

impl TwoTermState {
    pub(in crate::kernel) fn new(b: BitVector, offset: BitVector, theta: u8) -> Self {
        debug_assert_eq!(b.len(), offset.len());
        let theta = if offset.is_zero() { 0 } else { theta & 3 };
        Self { b, offset, theta }
    }

    pub(in crate::kernel) fn single(b: BitVector) -> Self {
        let n = b.len();
        Self::new(b, BitVector::zeros(n), 0)
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// The basis label `b`.
    pub fn basis_label(&self) -> &BitVector {
        &self.b
    }

    pub(in crate::kernel) fn is_two_term(&self) -> bool {
        !self.offset.is_zero()
    }

    /// Amplitudes over `Z2^n`, index as in [`BitVector::to_index`].
    pub(in crate::kernel) fn amplitudes(&self) -> Vec<num_complex::Complex64> {
        use num_complex::Complex64;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n()];
        if self.is_two_term() {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            amps[self.b.to_index()] = Complex64::new(h, 0.0);
            let partner = self.b.xor(&self.offset).expect("equal lengths");
            amps[partner.to_index()] = crate::rep::omega_pow(self.theta as i64) * h;
        } else {
            amps[self.b.to_index()] = Complex64::new(1.0, 0.0);
        }
        amps
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_new(b: BitVector, offset: BitVector, theta: u8) -> Result<Self> {
        if b.len() != offset.len() {
            return Err(Error::LengthMismatch {
                left: b.len(),
                right: offset.len(),
            });
        }
        Ok(Self::new(b, offset, theta))
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_offset(&self) -> &BitVector {
        &self.offset
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_theta(&self) -> u8 {
        self.theta
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_is_two_term(&self) -> bool {
        self.is_two_term()
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_amplitudes(&self) -> Vec<num_complex::Complex64> {
        self.amplitudes()
    }
}

/// A measured coefficient vector together with the state it labels.
///
/// Fresh coset samples have `doublings() == 0`; each phase-doubling round
/// adds one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSample {
    mu: Z4Vector,
    doublings: u8,
    state: TwoTermState,
}

impl CosetSample {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &Z4Vector {
        &self.mu
    }

    pub fn coefficients(&self) -> &PhaseCoefficients {
        &self.mu
    }

    pub fn doublings(&self) -> u8 {
        self.doublings
    }

    pub fn state(&self) -> &TwoTermState {
        &self.state
    }

    pub fn into_state(self) -> TwoTermState {
        self.state
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_new(mu: Z4Vector, doublings: u8, state: TwoTermState) -> Result<Self> {
        if mu.len() != state.n() {
            return Err(Error::LengthMismatch {
                left: mu.len(),
                right: state.n(),
            });
        }
        Ok(Self {
            mu,
            doublings,
            state,
        })
    }
}

/// `Σ_i (-1)^{b_i + t_i} μ_i l_i mod 4` over the components where `t_i = 1`.
fn coset_phase(b: &BitVector, t: &BitVector, mu: &Z4Vector, l: &Z4Vector) -> u8 {
    let mut theta = 0i64;
    for i in t.ones_indices() {
        let term = i64::from(mu.get(i)) * i64::from(l.get(i));
        // t_i = 1, so the sign is (-1)^{b_i + 1}.
        theta += if b.get(i) { term } else { -term };
    }
    theta.rem_euclid(4) as u8
}

/// The state left after preparing from `g` and measuring `μ`.
pub(in crate::kernel) fn coset_sample_for(o: &HiddenOracle, g: &D4nElement, mu: Z4Vector) -> CosetSample {
    let b = g.t().clone();
    let state = if o.merges_with_partner(g) {
        let label = o.label();
        let theta = coset_phase(&b, label.t(), &mu, label.l());
        TwoTermState::new(b, label.t().clone(), theta)
    } else {
        TwoTermState::single(b)
    };
    CosetSample {
        mu,
        doublings: 0,
        state,
    }
}

#[cfg(any(test, feature = "audit"))]
pub fn audit_coset_sample_for(o: &HiddenOracle, g: &D4nElement, mu: Z4Vector) -> CosetSample {
    coset_sample_for(o, g, mu)
}

/// One run of the standard method followed by the conditional Fourier
/// transform; costs one query.
pub fn sample_coset_state<R: Rng + ?Sized>(o: &HiddenOracle, rng: &mut R) -> CosetSample {
    o.record_query();
    let n = o.n();
    let g = D4nElement::random(n, rng);
    let mu = Z4Vector::random(n, rng);
    coset_sample_for(o, &g, mu)
}

/// Like [`sample_coset_state`], but the reflection bits outside `support`
/// are fixed to zero. The returned sample lives on the `|support|`
/// components inside the mask.
pub fn sample_restricted_coset_state<R: Rng + ?Sized>(
    o: &HiddenOracle,
    support: &BitVector,
    rng: &mut R,
) -> Result<CosetSample> {
    let n = o.n();
    if support.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: support.len(),
        });
    }
    if support.is_zero() {
        return Err(Error::InvalidConfig("restricted sampling needs a nonempty support".into()));
    }
    o.record_query();
    let t = BitVector::random(n, rng).and(support)?;
    let g = D4nElement::new(t, Z4Vector::random(n, rng))?;
    let mu = Z4Vector::random(n, rng);
    let full = coset_sample_for(o, &g, mu);
    let partner_inside = o.label().t().is_subset_of(support)?;

    let b = full.state.b.select(support)?;
    let state = if partner_inside && full.state.is_two_term() {
        TwoTermState::new(b, full.state.offset.select(support)?, full.state.theta)
    } else {
        TwoTermState::single(b)
    };
    Ok(CosetSample {
        mu: full.mu.select(support)?,
        doublings: 0,
        state,
    })
}

/// State of `m` registers after the cascade of double-controlled-nots from
/// register 1 and the measurement of the phase ancilla.
#[derive(Clone, Debug)]
pub struct CascadeRecord {
    n: usize,
    level: u8,
    mus: Vec<Z4Vector>,
    mu_tot: Z4Vector,
    offset: BitVector,
    thetas: Vec<u8>,
    two_term: Vec<bool>,
    branches: BitVector,
    values: Vec<BitVector>,
}

impl CascadeRecord {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.mus.len()
    }

    /// Doubling level shared by all inputs.
    pub fn level(&self) -> u8 {
        self.level
    }

    /// Coefficient vector of input `j` (0-based).
    pub fn coefficients(&self, j: usize) -> &Z4Vector {
        &self.mus[j]
    }

    /// The measured ancilla `μ_tot`.
    pub fn mu_tot(&self) -> &Z4Vector {
        &self.mu_tot
    }

    /// Content of register `j ≥ 1` after the cascade: `v_1 + v_j`.
    fn register(&self, j: usize) -> BitVector {
        self.values[0].xor(&self.values[j]).expect("equal lengths")
    }

    /// The flip matrix: row `i`, column `j - 1` holds bit `level` of `(μ_j)_i`
    /// for `j = 2..m` (1-based).
    fn flip_matrix(&self) -> BitMatrix {
        let m = self.m();
        let mut w = BitMatrix::new(self.n, m - 1);
        let bit = self.level;
        for j in 1..m {
            let mu = &self.mus[j];
            for i in 0..self.n {
                if mu.get(i) >> bit & 1 == 1 {
                    w.set(i, j - 1, true);
                }
            }
        }
        w
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_branches(&self) -> &BitVector {
        &self.branches
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_register(&self, j: usize) -> BitVector {
        self.register(j)
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_values(&self) -> &[BitVector] {
        &self.values
    }

    #[cfg(any(test, feature = "audit"))]
    pub fn audit_offset(&self) -> &BitVector {
        &self.offset
    }
}

fn check_inputs(samples: &[CosetSample]) -> Result<(usize, u8, BitVector)> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::CascadeTooShort(m));
    }
    let n = samples[0].n();
    let level = samples[0].doublings;
    for s in samples {
        if s.n() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: s.n(),
            });
        }
        if s.doublings != level {
            return Err(Error::MixedRounds);
        }
    }
    if level >= 2 {
        return Err(Error::AlreadyTrivial);
    }
    let mut offset = BitVector::zeros(n);
    for s in samples.iter().filter(|s| s.state.is_two_term()) {
        if offset.is_zero() {
            offset = s.state.offset.clone();
        } else if offset != s.state.offset {
            return Err(Error::ContractViolation("cascade inputs have different offsets"));
        }
    }
    Ok((n, level, offset))
}

fn build_record(samples: Vec<CosetSample>, branches: BitVector, n: usize, level: u8, offset: BitVector) -> Result<CascadeRecord> {
    let m = samples.len();
    if branches.len() != m {
        return Err(Error::LengthMismatch {
            left: m,
            right: branches.len(),
        });
    }
    let mut values = Vec::with_capacity(m);
    for (j, s) in samples.iter().enumerate() {
        let mut v = s.state.b.clone();
        if branches.get(j) {
            if !s.state.is_two_term() {
                return Err(Error::ContractViolation("branch bit set on a single-term input"));
            }
            v.xor_assign(&s.state.offset)?;
        }
        values.push(v);
    }

    let mut tot: Vec<i64> = samples[0].mu.digits().iter().map(|&d| i64::from(d)).collect();
    for j in 1..m {
        let reg = values[0].xor(&values[j])?;
        let mu = &samples[j].mu;
        for (i, acc) in tot.iter_mut().enumerate() {
            let d = i64::from(mu.get(i));
            *acc += if reg.get(i) { -d } else { d };
        }
    }

    let mut mus = Vec::with_capacity(m);
    let mut thetas = Vec::with_capacity(m);
    let mut two_term = Vec::with_capacity(m);
    for s in samples {
        two_term.push(s.state.is_two_term());
        thetas.push(s.state.theta);
        mus.push(s.mu);
    }
    Ok(CascadeRecord {
        n,
        level,
        mus,
        mu_tot: Z4Vector::from_reduced(tot),
        offset,
        thetas,
        two_term,
        branches,
        values,
    })
}

/// Runs the cascade on `m ≥ 2` samples from the same round.
pub fn cg_cascade<R: Rng + ?Sized>(samples: Vec<CosetSample>, rng: &mut R) -> Result<CascadeRecord> {
    let (n, level, offset) = check_inputs(&samples)?;
    let branches = BitVector::from_bools(samples.iter().map(|s| s.state.is_two_term() && rng.random::<bool>()));
    build_record(samples, branches, n, level, offset)
}

/// [`cg_cascade`] with the branch bits given explicitly.
#[cfg(any(test, feature = "audit"))]
pub fn audit_cg_cascade_with_branches(samples: Vec<CosetSample>, branches: BitVector) -> Result<CascadeRecord> {
    let (n, level, offset) = check_inputs(&samples)?;
    build_record(samples, branches, n, level, offset)
}

/// Flip constraints of a cascade and, when usable, a flip vector.
#[derive(Clone, Debug)]
pub struct FlipAnalysis {
    /// `n × (m-1)` constraint matrix.
    pub w: BitMatrix,
    /// Uniform nonzero solution of `w·s = 0`; `None` when `w` is all zero or
    /// the nullspace is trivial.
    pub s: Option<BitVector>,
}

impl FlipAnalysis {
    pub fn is_degenerate(&self) -> bool {
        self.s.is_none()
    }
}

pub fn analyze_flips<R: Rng + ?Sized>(record: &CascadeRecord, rng: &mut R) -> FlipAnalysis {
    let w = record.flip_matrix();
    let s = if w.is_zero() {
        None
    } else {
        w.sample_nonzero_null_vector(rng)
    };
    FlipAnalysis { w, s }
}

/// Measurement outcomes and branch bookkeeping of one collapse.
#[derive(Clone, Debug)]
#[cfg_attr(not(any(test, feature = "audit")), allow(dead_code))]
pub struct CollapseTrace {
    /// Register 1 content `v_1`, measured and discarded.
    pub first_register: BitVector,
    /// `(j, content)` for every register `j ≥ 2` with `s_j = 0` (0-based `j`).
    pub measured: Vec<(usize, BitVector)>,
    /// `(j, content)` after the final cascade into `j` from the surviving
    /// register, for the other registers with `s_j = 1`.
    pub chained: Vec<(usize, BitVector)>,
    /// 0-based index of the register that survives.
    pub survivor: usize,
    /// Number of branch assignments consistent with all outcomes.
    pub consistent_branches: usize,
    /// Number of branch assignments before any measurement.
    pub total_branches: usize,
}

pub(in crate::kernel) fn collapse_inner(record: &CascadeRecord, s: &BitVector) -> Result<(CosetSample, CollapseTrace)> {
    let m = record.m();
    let n = record.n;
    if s.len() != m - 1 || s.is_zero() {
        return Err(Error::InconsistentFlip);
    }
    if !record.flip_matrix().mul_vec(s)?.is_zero() {
        return Err(Error::InconsistentFlip);
    }
    let in_s = |j: usize| j >= 1 && s.get(j - 1);
    let survivor = (1..m).find(|&j| in_s(j)).expect("s is nonzero");

    // Visible part of the ancilla that the flipped registers contributed.
    let mut r: Vec<i64> = record
        .mu_tot
        .digits()
        .iter()
        .zip(record.mus[0].digits())
        .map(|(&a, &b)| i64::from(a) - i64::from(b))
        .collect();
    let mut measured = Vec::new();
    for j in (1..m).filter(|&j| !in_s(j)) {
        let reg = record.register(j);
        let mu = &record.mus[j];
        for (i, acc) in r.iter_mut().enumerate() {
            let d = i64::from(mu.get(i));
            *acc -= if reg.get(i) { -d } else { d };
        }
        measured.push((j, reg));
    }
    let chained: Vec<(usize, BitVector)> = (survivor + 1..m)
        .filter(|&j| in_s(j))
        .map(|j| (j, record.values[survivor].xor(&record.values[j]).expect("equal lengths")))
        .collect();

    // Branch flips δ that leave every outcome unchanged.
    let mut constraints = BitMatrix::new(0, m);
    let mut push = |row: BitVector| constraints.push_row(&row).expect("row length m");
    push(BitVector::unit(m, 0));
    for j in 0..m {
        let unmoved = !record.two_term[j] || (j >= 1 && !in_s(j));
        if unmoved {
            push(BitVector::unit(m, j));
        }
        if in_s(j) && j != survivor {
            let mut row = BitVector::unit(m, j);
            row.set(survivor, true);
            push(row);
        }
    }
    for i in record.offset.ones_indices() {
        push(BitVector::from_bools((0..m).map(|j| j >= 1 && record.mus[j].get(i) & 1 == 1)));
    }
    let basis = if record.offset.is_zero() {
        Vec::new()
    } else {
        constraints.null_space_basis()
    };
    let total_branches = 1usize << record.two_term.iter().filter(|&&x| x).count().min(63);

    let b_out = record.register(survivor);
    let state = match basis.as_slice() {
        [] => TwoTermState::single(b_out),
        [delta] => {
            let theta: i64 = (0..m)
                .filter(|&j| delta.get(j))
                .map(|j| {
                    let th = i64::from(record.thetas[j]);
                    if record.branches.get(j) {
                        -th
                    } else {
                        th
                    }
                })
                .sum();
            TwoTermState::new(b_out, record.offset.clone(), theta.rem_euclid(4) as u8)
        }
        _ => return Err(Error::ContractViolation("collapse left more than two branches")),
    };
    let trace = CollapseTrace {
        first_register: record.values[0].clone(),
        measured,
        chained,
        survivor,
        consistent_branches: 1 << basis.len(),
        total_branches,
    };
    debug_assert_eq!(state.n(), n);
    let sample = CosetSample {
        mu: Z4Vector::from_reduced(r),
        doublings: record.level + 1,
        state,
    };
    Ok((sample, trace))
}

/// Measures the registers outside `s`, recombines the rest into the first
/// register in `s`, and returns it with its new coefficient vector.
pub fn collapse_and_recombine(record: &CascadeRecord, s: &BitVector) -> Result<CosetSample> {
    collapse_inner(record, s).map(|(sample, _)| sample)
}

#[cfg(any(test, feature = "audit"))]
pub fn audit_collapse_with_trace(record: &CascadeRecord, s: &BitVector) -> Result<(CosetSample, CollapseTrace)> {
    collapse_inner(record, s)
}

/// Result of one phase-doubling round.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    pub sample: CosetSample,
    /// Cascades run, including the successful one.
    pub attempts: u32,
}

/// Draws `m` inputs from `source`, cascades, and collapses; draws a fresh
/// batch whenever the flip analysis is degenerate, at most `retry_budget`
/// times.
pub fn phase_double_round<R, F>(m: usize, retry_budget: u32, mut source: F, rng: &mut R) -> Result<RoundOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<CosetSample>,
{
    for attempt in 1..=retry_budget + 1 {
        let inputs = (0..m).map(|_| source(rng)).collect::<Result<Vec<_>>>()?;
        let record = cg_cascade(inputs, rng)?;
        if let Some(s) = analyze_flips(&record, rng).s {
            return Ok(RoundOutcome {
                sample: collapse_and_recombine(&record, &s)?,
                attempts: attempt,
            });
        }
    }
    Err(Error::RetriesExhausted {
        stage: "phase doubling",
        budget: retry_budget,
    })
}

/// Counters accumulated by a [`PhaseDoubler`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DoublingStats {
    pub coset_samples: u64,
    pub round1_attempts: u64,
    pub round2_attempts: u64,
}

impl DoublingStats {
    /// Degenerate cascades that were thrown away.
    pub fn retries(&self, round1_outputs: u64, round2_outputs: u64) -> u64 {
        (self.round1_attempts - round1_outputs) + (self.round2_attempts - round2_outputs)
    }

    pub fn merge(&mut self, other: &Self) {
        self.coset_samples += other.coset_samples;
        self.round1_attempts += other.round1_attempts;
        self.round2_attempts += other.round2_attempts;
    }
}

/// Produces coset samples and doubled states from one oracle, optionally
/// restricted to a support mask, and counts the work.
#[derive(Debug)]
pub struct PhaseDoubler<'o> {
    oracle: &'o HiddenOracle,
    support: Option<BitVector>,
    width: usize,
    retry_budget: u32,
    round1_outputs: u64,
    round2_outputs: u64,
    stats: DoublingStats,
}

impl<'o> PhaseDoubler<'o> {
    pub fn new(oracle: &'o HiddenOracle, retry_budget: u32) -> Self {
        Self {
            width: oracle.n(),
            oracle,
            support: None,
            retry_budget,
            round1_outputs: 0,
            round2_outputs: 0,
            stats: DoublingStats::default(),
        }
    }

    pub fn restricted(oracle: &'o HiddenOracle, support: BitVector, retry_budget: u32) -> Result<Self> {
        if support.len() != oracle.n() {
            return Err(Error::LengthMismatch {
                left: oracle.n(),
                right: support.len(),
            });
        }
        if support.is_zero() {
            return Err(Error::InvalidConfig("restricted sampling needs a nonempty support".into()));
        }
        Ok(Self {
            width: support.count_ones(),
            oracle,
            support: Some(support),
            retry_budget,
            round1_outputs: 0,
            round2_outputs: 0,
            stats: DoublingStats::default(),
        })
    }

    /// Number of components of the produced states.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Inputs per cascade: `width + 2`.
    pub fn batch(&self) -> usize {
        self.width + 2
    }

    pub fn stats(&self) -> DoublingStats {
        self.stats
    }

    pub fn retries(&self) -> u64 {
        self.stats.retries(self.round1_outputs, self.round2_outputs)
    }

    pub fn fresh<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<CosetSample> {
        self.stats.coset_samples += 1;
        match &self.support {
            None => Ok(sample_coset_state(self.oracle, rng)),
            Some(mask) => sample_restricted_coset_state(self.oracle, mask, rng),
        }
    }

    /// One doubling of fresh samples: coefficients in `{0, 2}`.
    pub fn round_one<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<CosetSample> {
        let (m, budget) = (self.batch(), self.retry_budget);
        let out = phase_double_round(m, budget, |rng| self.fresh(rng), rng)?;
        self.stats.round1_attempts += u64::from(out.attempts);
        self.round1_outputs += 1;
        Ok(out.sample)
    }

    /// Two doublings: trivial phase.
    pub fn round_two<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<CosetSample> {
        let (m, budget) = (self.batch(), self.retry_budget);
        let out = phase_double_round(m, budget, |rng| self.round_one(rng), rng)?;
        self.stats.round2_attempts += u64::from(out.attempts);
        self.round2_outputs += 1;
        Ok(out.sample)
    }
}

/// Measures in the basis `(|x⟩ ± |x̄⟩)/√2`. Returns the basis label and the
/// sign.
///
/// When the offset is the complement the sign is `(-1)^{θ/2}`, and an odd
/// exponent is a contract violation. Any other state gives a fair coin.
pub fn psi_pm_measure<R: Rng + ?Sized>(state: &TwoTermState, rng: &mut R) -> Result<(BitVector, i8)> {
    let n = state.n();
    if state.offset.count_ones() == n {
        return match state.theta {
            0 => Ok((state.b.clone(), 1)),
            2 => Ok((state.b.clone(), -1)),
            _ => Err(Error::ContractViolation("odd phase exponent in sign measurement")),
        };
    }
    let x = if state.is_two_term() && rng.random::<bool>() {
        state.b.xor(&state.offset)?
    } else {
        state.b.clone()
    };
    let sign = if rng.random::<bool>() { 1 } else { -1 };
    Ok((x, sign))
}

/// Applies `H^{⊗n}` and measures.
pub fn hadamard_measure<R: Rng + ?Sized>(state: &TwoTermState, rng: &mut R) -> BitVector {
    let mut y = BitVector::random(state.n(), rng);
    if let Some(pivot) = state.offset.first_one() {
        if state.theta % 2 == 0 {
            let want = state.theta == 2;
            if y.dot(&state.offset).expect("equal lengths") != want {
                y.flip(pivot);
            }
        }
    }
    y
}

/// One Simon sample: a uniform `y` with `y·z = 0`; costs one query.
pub fn simon_sample<R: Rng + ?Sized>(o: &SimonOracle, rng: &mut R) -> BitVector {
    o.record_query();
    let x = BitVector::random(o.n(), rng);
    hadamard_measure(&TwoTermState::new(x, o.mask().clone(), 0), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::InvolutionLabel;
    use crate::kernel::oracle::AncillaFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(t: &[u8], l: &[u8]) -> HiddenOracle {
        HiddenOracle::plant(InvolutionLabel::from_digits(t, l).unwrap())
    }

    fn sample(mu: &[u8], b: &[u8], offset: &[u8], theta: u8, doublings: u8) -> CosetSample {
        CosetSample {
            mu: Z4Vector::new(mu.to_vec()).unwrap(),
            doublings,
            state: TwoTermState::new(BitVector::from_bits(b), BitVector::from_bits(offset), theta),
        }
    }

    #[test]
    fn coset_phase_worked_example() {
        let o = oracle(&[1], &[2]);
        let g = D4nElement::identity(1);
        let s = coset_sample_for(&o, &g, Z4Vector::new(vec![1]).unwrap());
        assert_eq!(s.state.theta, 2);
        assert_eq!(s.state.offset, BitVector::from_bits(&[1]));
    }

    #[test]
    fn zero_l_means_zero_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = oracle(&[1, 0, 1], &[0, 0, 0]);
        for _ in 0..200 {
            assert_eq!(sample_coset_state(&o, &mut rng).state.theta, 0);
        }
        assert_eq!(o.queries(), 200);
    }

    #[test]
    fn trivial_hidden_subgroup_gives_single_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = oracle(&[1], &[2]);
        let ext = base.extended(AncillaFunction::even_class(0)).unwrap();
        for _ in 0..100 {
            assert!(!sample_coset_state(&ext, &mut rng).state.is_two_term());
        }
    }

    #[test]
    fn cascade_worked_example() {
        let inputs = vec![
            sample(&[1], &[0], &[1], 0, 0),
            sample(&[1], &[0], &[1], 0, 0),
            sample(&[3], &[0], &[1], 0, 0),
        ];
        let rec = build_record(inputs, BitVector::zeros(3), 1, 0, BitVector::from_bits(&[1])).unwrap();
        assert_eq!(rec.mu_tot.digits(), &[1]);
        assert_eq!(rec.register(1), BitVector::from_bits(&[0]));

        let w = rec.flip_matrix();
        assert_eq!(w.row(0), BitVector::from_bits(&[1, 1]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fa = analyze_flips(&rec, &mut rng);
        assert_eq!(fa.s, Some(BitVector::from_bits(&[1, 1])));
    }

    #[test]
    fn cascade_without_offset_ignores_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inputs = vec![sample(&[1, 2], &[1, 0], &[0, 0], 0, 0), sample(&[3, 1], &[1, 1], &[0, 0], 0, 0)];
        let rec = cg_cascade(inputs, &mut rng).unwrap();
        // register 2 = (0,1): signs (+,-)
        assert_eq!(rec.mu_tot.digits(), &[0, 1]);
        assert!(rec.branches.is_zero());
    }

    #[test]
    fn cascade_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sample(&[1], &[0], &[1], 0, 0);
        assert_eq!(cg_cascade(vec![a.clone()], &mut rng).unwrap_err(), Error::CascadeTooShort(1));
        let b = sample(&[1, 1], &[0, 0], &[1, 1], 0, 0);
        assert!(matches!(cg_cascade(vec![a.clone(), b], &mut rng), Err(Error::LengthMismatch { .. })));
        let c = sample(&[2], &[0], &[1], 0, 1);
        assert_eq!(cg_cascade(vec![a, c], &mut rng).unwrap_err(), Error::MixedRounds);
        let d = sample(&[0], &[0], &[1], 0, 2);
        assert_eq!(cg_cascade(vec![d.clone(), d], &mut rng).unwrap_err(), Error::AlreadyTrivial);
    }

    #[test]
    fn degenerate_when_coefficients_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inputs = vec![
            sample(&[1, 3], &[0, 0], &[1, 1], 1, 0),
            sample(&[2, 0], &[0, 1], &[1, 1], 1, 0),
            sample(&[0, 2], &[1, 1], &[1, 1], 3, 0),
        ];
        let rec = cg_cascade(inputs, &mut rng).unwrap();
        assert!(analyze_flips(&rec, &mut rng).is_degenerate());
    }

    #[test]
    fn collapse_rejects_inconsistent_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inputs = vec![
            sample(&[1], &[0], &[1], 1, 0),
            sample(&[1], &[0], &[1], 1, 0),
            sample(&[2], &[1], &[1], 2, 0),
        ];
        let rec = cg_cascade(inputs, &mut rng).unwrap();
        for bad in [&[0u8, 0][..], &[1, 1], &[1], &[1, 0, 0]] {
            assert_eq!(
                collapse_and_recombine(&rec, &BitVector::from_bits(bad)).unwrap_err(),
                Error::InconsistentFlip
            );
        }
        let out = collapse_and_recombine(&rec, &BitVector::from_bits(&[0, 1])).unwrap();
        assert_eq!(out.doublings, 1);
    }

    #[test]
    fn round_outputs_double_the_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let label = InvolutionLabel::random(5, &mut rng);
            let o = HiddenOracle::plant(label.clone());
            let mut d = PhaseDoubler::new(&o, 10);
            let one = d.round_one(&mut rng).unwrap();
            assert_eq!(one.state.theta % 2, 0);
            assert!(one.mu.digits().iter().all(|&v| v % 2 == 0));
            let expect: i64 = label
                .t()
                .ones_indices()
                .map(|i| i64::from(one.mu.get(i)) * i64::from(label.l().get(i)))
                .sum();
            if one.state.is_two_term() {
                assert_eq!(i64::from(one.state.theta), expect.rem_euclid(4));
            }
            let two = d.round_two(&mut rng).unwrap();
            assert_eq!(two.state.theta, 0);
            assert!(two.mu.is_zero());
            assert_eq!(o.queries(), d.stats().coset_samples);
            assert_eq!(d.stats().coset_samples, 7 * d.stats().round1_attempts);
        }
    }

    #[test]
    fn psi_pm_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let plus = TwoTermState::new(BitVector::from_bits(&[0, 1]), BitVector::ones(2), 0);
        let minus = TwoTermState::new(BitVector::from_bits(&[0, 1]), BitVector::ones(2), 2);
        let odd = TwoTermState::new(BitVector::from_bits(&[0, 1]), BitVector::ones(2), 1);
        assert_eq!(psi_pm_measure(&plus, &mut rng).unwrap().1, 1);
        assert_eq!(psi_pm_measure(&minus, &mut rng).unwrap().1, -1);
        assert!(matches!(psi_pm_measure(&odd, &mut rng), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn hadamard_respects_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = BitVector::from_bits(&[1, 0, 1, 1]);
        for theta in [0u8, 2] {
            let st = TwoTermState::new(BitVector::from_bits(&[0, 1, 1, 0]), u.clone(), theta);
            for _ in 0..100 {
                assert_eq!(hadamard_measure(&st, &mut rng).dot(&u).unwrap(), theta == 2);
            }
        }
    }

    #[test]
    fn restricted_sampling_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = oracle(&[1, 0, 1, 1], &[1, 0, 2, 3]);
        let inside = BitVector::from_bits(&[1, 0, 1, 1]);
        for _ in 0..50 {
            let s = sample_restricted_coset_state(&o, &inside, &mut rng).unwrap();
            assert_eq!(s.n(), 3);
            assert_eq!(s.state.offset, BitVector::ones(3));
        }
        let partial = BitVector::from_bits(&[1, 1, 0, 0]);
        for _ in 0..50 {
            let s = sample_restricted_coset_state(&o, &partial, &mut rng).unwrap();
            assert!(!s.state.is_two_term());
        }
        assert_eq!(o.queries(), 100);
    }
}
