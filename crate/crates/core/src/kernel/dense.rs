//! State-vector ground truth for small `n`.
//!
//! [`dense_standard_method`] runs the standard method with explicit
//! amplitudes over the group register and the function register.
//! [`DenseRegisters`] holds `m` qubit registers plus a `Z4^n` ancilla and
//! replays a cascade and collapse gate by gate. Both are compared against
//! the symbolic kernel by [`cross_check`] and [`dense_collapse_check`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::group::{D4Element, D4nElement, InvolutionLabel, Z4Vector};
use crate::rep::omega_pow;

use super::coset::{analyze_flips, cg_cascade, collapse_inner, coset_sample_for, CosetSample, TwoTermState};
use super::oracle::{AncillaFunction, CosetTag, HiddenOracle};

/// Largest `n` accepted by the dense simulators.
pub const DENSE_MAX_N: usize = 2;

/// Tolerance for amplitude and probability comparisons.
pub const DENSE_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `min over phases φ of ‖a − e^{iφ} b‖₂`, evaluated directly rather than
/// through `|⟨a|b⟩|` so that equal states give a distance near machine
/// epsilon.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_dense_n(n: usize) -> Result<()> {
    if n == 0 || n > DENSE_MAX_N {
        return Err(Error::DenseTooLarge { n, max: DENSE_MAX_N });
    }
    Ok(())
}

/// One joint outcome of the function register and the `μ` registers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseOutcome {
    /// Index of the coset representative (base-8 component codes).
    pub tag: usize,
    pub ancilla: Vec<u8>,
    pub mu: Z4Vector,
    pub probability: f64,
    /// Post-measurement amplitudes over the reflection bits, as `[re, im]`.
    pub amplitudes: Vec<[f64; 2]>,
}

impl DenseOutcome {
    pub fn state(&self) -> Vec<Complex64> {
        self.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseOutcomeTable {
    pub n: usize,
    pub outcomes: Vec<DenseOutcome>,
}

impl DenseOutcomeTable {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Applies the 8×8 unitary `gate` to base-8 digit `c` of every index.
fn apply_digit_gate(state: &mut [Complex64], c: usize, gate: &[[Complex64; 8]; 8]) {
    let step = 8usize.pow(c as u32);
    let mut scratch = [ZERO; 8];
    for g in 0..state.len() {
        if (g / step) % 8 != 0 {
            continue;
        }
        for (d, s) in scratch.iter_mut().enumerate() {
            *s = state[g + d * step];
        }
        for (row, gate_row) in gate.iter().enumerate() {
            state[g + row * step] = gate_row.iter().zip(&scratch).map(|(a, b)| a * b).sum();
        }
    }
}

/// Fourier transform over `Z4` on `k`, forward when `t = 0` and inverse when
/// `t = 1`, acting on digit `4t + k`.
fn conditional_qft() -> [[Complex64; 8]; 8] {
    let mut gate = [[ZERO; 8]; 8];
    for t in 0..2usize {
        let sign = if t == 0 { 1 } else { -1 };
        for k in 0..4usize {
            for mu in 0..4usize {
                gate[4 * t + mu][4 * t + k] = omega_pow(sign * (mu * k) as i64) * 0.5;
            }
        }
    }
    gate
}

/// Standard method on an explicit state vector over `D4^n × tags`: uniform
/// superposition, oracle, measure the tag, conditional Fourier transform on
/// every component, measure `μ`. Returns every outcome with nonzero
/// probability. Counts one query.
pub fn dense_standard_method(o: &HiddenOracle) -> Result<DenseOutcomeTable> {
    let n = o.n();
    check_dense_n(n)?;
    o.record_query();
    let group = 8usize.pow(n as u32);

    let mut tags: BTreeMap<CosetTag, usize> = BTreeMap::new();
    let values: Vec<CosetTag> = (0..group).map(|g| o.evaluate(&D4nElement::from_index(n, g))).collect();
    for v in &values {
        let next = tags.len();
        tags.entry(v.clone()).or_insert(next);
    }
    let tag_count = tags.len();
    let index_of: Vec<usize> = values.iter().map(|v| tags[v]).collect();

    // Layout: index = g * tag_count + tag register.
    let amp = Complex64::new(1.0 / (group as f64).sqrt(), 0.0);
    let mut state = vec![ZERO; group * tag_count];
    for g in 0..group {
        state[g * tag_count] = amp;
    }
    let mut evaluated = vec![ZERO; state.len()];
    for g in 0..group {
        for r in 0..tag_count {
            evaluated[g * tag_count + (r + index_of[g]) % tag_count] = state[g * tag_count + r];
        }
    }
    let state = evaluated;

    let qft = conditional_qft();
    let mut outcomes = Vec::new();
    for (tag, &tag_index) in &tags {
        let mut branch: Vec<Complex64> = (0..group).map(|g| state[g * tag_count + tag_index]).collect();
        let p_tag = norm_sqr(&branch);
        if p_tag <= 0.0 {
            continue;
        }
        let scale = 1.0 / p_tag.sqrt();
        branch.iter_mut().for_each(|z| *z *= scale);
        for c in 0..n {
            apply_digit_gate(&mut branch, c, &qft);
        }
        for mu_index in 0..4usize.pow(n as u32) {
            let mu = Z4Vector::new((0..n).map(|i| (mu_index >> (2 * i) & 3) as u8).collect())?;
            let mut post = vec![ZERO; 1 << n];
            for (b, slot) in post.iter_mut().enumerate() {
                let g: usize = (0..n)
                    .map(|i| D4Element::new((b >> i & 1) as u8, mu.get(i)).code() * 8usize.pow(i as u32))
                    .sum();
                *slot = branch[g];
            }
            let p_mu = norm_sqr(&post);
            if p_mu <= DENSE_TOLERANCE * DENSE_TOLERANCE {
                continue;
            }
            let scale = 1.0 / p_mu.sqrt();
            outcomes.push(DenseOutcome {
                tag: tag.representative.to_index(),
                ancilla: tag.ancilla.clone(),
                mu,
                probability: p_tag * p_mu,
                amplitudes: post.iter().map(|z| [z.re * scale, z.im * scale]).collect(),
            });
        }
    }
    Ok(DenseOutcomeTable { n, outcomes })
}

/// Maximum discrepancies between the symbolic sampler and the dense
/// simulator.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub n: usize,
    pub labels: usize,
    pub oracles: usize,
    pub outcomes: usize,
    pub max_amplitude_distance: f64,
    pub max_probability_discrepancy: f64,
    pub max_normalization_error: f64,
    pub passed: bool,
}

impl CrossCheckReport {
    fn absorb(&mut self, other: &CrossCheckReport) {
        self.oracles += other.oracles;
        self.outcomes += other.outcomes;
        self.max_amplitude_distance = self.max_amplitude_distance.max(other.max_amplitude_distance);
        self.max_probability_discrepancy = self.max_probability_discrepancy.max(other.max_probability_discrepancy);
        self.max_normalization_error = self.max_normalization_error.max(other.max_normalization_error);
    }

    fn finish(&mut self) {
        self.passed = self.max_amplitude_distance < DENSE_TOLERANCE
            && self.max_probability_discrepancy < DENSE_TOLERANCE
            && self.max_normalization_error < DENSE_TOLERANCE;
    }
}

/// Compares every dense outcome of `o` with the symbolic state for every
/// group element the outcome could have come from.
pub fn cross_check_oracle(o: &HiddenOracle) -> Result<CrossCheckReport> {
    let n = o.n();
    let table = dense_standard_method(o)?;
    let group = 8usize.pow(n as u32);
    let weight = 1.0 / (group as f64 * 4f64.powi(n as i32));

    let mut preimages: BTreeMap<(usize, Vec<u8>), Vec<D4nElement>> = BTreeMap::new();
    for g in 0..group {
        let g = D4nElement::from_index(n, g);
        let tag = o.evaluate(&g);
        preimages.entry((tag.representative.to_index(), tag.ancilla)).or_default().push(g);
    }

    let mut report = CrossCheckReport {
        n,
        oracles: 1,
        max_normalization_error: (table.total_probability() - 1.0).abs(),
        ..Default::default()
    };
    let mut seen = 0usize;
    for outcome in &table.outcomes {
        let dense = outcome.state();
        report.max_normalization_error = report.max_normalization_error.max((norm_sqr(&dense) - 1.0).abs());
        let members = preimages
            .get(&(outcome.tag, outcome.ancilla.clone()))
            .ok_or(Error::ContractViolation("dense outcome without a preimage"))?;
        let symbolic_p = members.len() as f64 * weight;
        report.max_probability_discrepancy = report.max_probability_discrepancy.max((symbolic_p - outcome.probability).abs());
        for g in members {
            let sym = coset_sample_for(o, g, outcome.mu.clone()).state().amplitudes();
            report.max_amplitude_distance = report.max_amplitude_distance.max(phase_aligned_distance(&sym, &dense));
        }
        seen += 1;
    }
    // Every (tag, μ) pair the symbolic sampler can produce must appear.
    let expected = preimages.len() * 4usize.pow(n as u32);
    if seen != expected {
        report.max_probability_discrepancy = report.max_probability_discrepancy.max(weight);
    }
    report.outcomes = seen;
    report.finish();
    Ok(report)
}

/// Runs [`cross_check_oracle`] on each label's plain oracle and on its two
/// ancilla extensions at the first support component.
pub fn cross_check(n: usize, labels: &[InvolutionLabel]) -> Result<CrossCheckReport> {
    check_dense_n(n)?;
    let mut report = CrossCheckReport {
        n,
        labels: labels.len(),
        ..Default::default()
    };
    for label in labels {
        if label.n() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: label.n(),
            });
        }
        let base = HiddenOracle::plant(label.clone());
        let i = label.t().first_one().expect("labels have nonzero t");
        report.absorb(&cross_check_oracle(&base)?);
        for a in [AncillaFunction::even_class(i), AncillaFunction::odd_class(i)] {
            report.absorb(&cross_check_oracle(&base.extended(a)?)?);
        }
    }
    report.finish();
    Ok(report)
}

/// `m` registers of `n` qubits and one `Z4^n` ancilla, as a state vector.
#[derive(Clone, Debug)]
pub struct DenseRegisters {
    n: usize,
    regs: usize,
    amps: Vec<Complex64>,
}

impl DenseRegisters {
    /// Product of single-register states, ancilla at zero.
    pub fn from_states(states: &[Vec<Complex64>], n: usize) -> Result<Self> {
        check_dense_n(n)?;
        let regs = states.len();
        if regs == 0 || regs > 5 {
            return Err(Error::InvalidConfig(format!("dense register count {regs} outside 1..=5")));
        }
        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for s in states.iter().rev() {
            if s.len() != dim {
                return Err(Error::LengthMismatch { left: dim, right: s.len() });
            }
            amps = amps.iter().flat_map(|a| s.iter().map(move |b| a * b)).collect();
        }
        amps.resize(amps.len() * 4usize.pow(n as u32), ZERO);
        Ok(Self { n, regs, amps })
    }

    fn qubit_bits(&self) -> usize {
        self.n * self.regs
    }

    fn reg_value(&self, idx: usize, r: usize) -> usize {
        idx >> (r * self.n) & ((1 << self.n) - 1)
    }

    fn ancilla_value(&self, idx: usize) -> usize {
        idx >> self.qubit_bits()
    }

    fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                out[f(i)] = *a;
            }
        }
        self.amps = out;
    }

    /// Bitwise CNOT: register `target` ^= register `control`.
    pub fn cnot(&mut self, control: usize, target: usize) {
        let shift = target * self.n;
        let (n, c) = (self.n, control);
        self.permute(|i| i ^ ((i >> (c * n) & ((1 << n) - 1)) << shift));
    }

    /// Adds `μ_1 + Σ_{j≥2} (-1)^{reg_j} μ_j` to the ancilla, componentwise.
    pub fn add_phase_ancilla(&mut self, mus: &[Z4Vector]) -> Result<()> {
        if mus.len() != self.regs {
            return Err(Error::LengthMismatch { left: self.regs, right: mus.len() });
        }
        let (n, regs, qb) = (self.n, self.regs, self.qubit_bits());
        let me = self.clone();
        self.permute(|idx| {
            let mut anc = me.ancilla_value(idx);
            let mut out = 0usize;
            for i in 0..n {
                let mut d = anc & 3;
                anc >>= 2;
                d += mus[0].get(i) as usize;
                for (j, mu) in mus.iter().enumerate().take(regs).skip(1) {
                    let bit = me.reg_value(idx, j) >> i & 1;
                    let v = mu.get(i) as usize;
                    d += if bit == 1 { 4 - v } else { v };
                }
                out |= (d & 3) << (2 * i);
            }
            (idx & ((1 << qb) - 1)) | out << qb
        });
        Ok(())
    }

    fn project(&mut self, keep: impl Fn(usize) -> bool) -> f64 {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if !keep(i) {
                *a = ZERO;
            }
        }
        let p = norm_sqr(&self.amps);
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            self.amps.iter_mut().for_each(|z| *z *= s);
        }
        p
    }

    /// Projects the ancilla onto `value`; returns the outcome probability.
    pub fn measure_ancilla(&mut self, value: &Z4Vector) -> f64 {
        let target: usize = value.digits().iter().enumerate().map(|(i, &d)| (d as usize) << (2 * i)).sum();
        let me = self.clone();
        self.project(|i| me.ancilla_value(i) == target)
    }

    /// Projects register `r` onto `value`; returns the outcome probability.
    pub fn measure_register(&mut self, r: usize, value: &BitVector) -> f64 {
        let target = value.to_index();
        let me = self.clone();
        self.project(|i| me.reg_value(i, r) == target)
    }

    /// State of register `r`, provided every other register and the
    /// ancilla hold definite values.
    pub fn register_state(&self, r: usize) -> Result<Vec<Complex64>> {
        let mask = ((1usize << self.n) - 1) << (r * self.n);
        let mut rest = None;
        let mut out = vec![ZERO; 1 << self.n];
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() <= 1e-30 {
                continue;
            }
            match rest {
                None => rest = Some(i & !mask),
                Some(other) if other != i & !mask => {
                    return Err(Error::ContractViolation("register is entangled with the rest"));
                }
                _ => {}
            }
            out[self.reg_value(i, r)] = *a;
        }
        Ok(out)
    }
}

/// Outcome of replaying one cascade and collapse on state vectors.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CollapseCheck {
    pub amplitude_distance: f64,
    pub probability_discrepancy: f64,
}

/// Runs the symbolic cascade and collapse on `samples`, then replays the same
/// measurement outcomes on [`DenseRegisters`] and compares the surviving
/// register and the joint outcome probability. Returns `None` when the flip
/// analysis is degenerate.
pub fn dense_collapse_check<R: Rng + ?Sized>(samples: Vec<CosetSample>, rng: &mut R) -> Result<Option<CollapseCheck>> {
    let n = samples.first().map(|s| s.n()).ok_or(Error::CascadeTooShort(0))?;
    check_dense_n(n)?;
    let states: Vec<Vec<Complex64>> = samples.iter().map(|s| s.state().amplitudes()).collect();
    let mus: Vec<Z4Vector> = samples.iter().map(|s| s.mu().clone()).collect();
    let record = cg_cascade(samples, rng)?;
    let Some(s) = analyze_flips(&record, rng).s else {
        return Ok(None);
    };
    let (out, trace) = collapse_inner(&record, &s)?;

    let m = mus.len();
    let mut dense = DenseRegisters::from_states(&states, n)?;
    for j in 1..m {
        dense.cnot(0, j);
    }
    dense.add_phase_ancilla(&mus)?;
    let mut p = dense.measure_ancilla(record.mu_tot());
    p *= dense.measure_register(0, &trace.first_register);
    for (j, v) in &trace.measured {
        p *= dense.measure_register(*j, v);
    }
    for (j, v) in &trace.chained {
        dense.cnot(trace.survivor, *j);
        p *= dense.measure_register(*j, v);
    }
    let symbolic_p = trace.consistent_branches as f64 / trace.total_branches as f64;
    let survivor = dense.register_state(trace.survivor)?;
    Ok(Some(CollapseCheck {
        amplitude_distance: phase_aligned_distance(&out.state().amplitudes(), &survivor),
        probability_discrepancy: (p - symbolic_p).abs(),
    }))
}

/// Single-register measurement distributions used to check
/// [`super::coset::hadamard_measure`] and [`super::coset::psi_pm_measure`].
pub fn hadamard_distribution(state: &TwoTermState) -> Vec<f64> {
    let amps = state.amplitudes();
    let n = state.n();
    let scale = 1.0 / (1usize << n) as f64;
    (0..1usize << n)
        .map(|y| {
            let a: Complex64 = amps
                .iter()
                .enumerate()
                .map(|(x, z)| if (x & y).count_ones() % 2 == 1 { -z } else { *z })
                .sum();
            a.norm_sqr() * scale
        })
        .collect()
}

/// Probability of each `(x, sign)` outcome of the `(|x⟩ ± |x̄⟩)/√2`
/// measurement, keyed by the smaller of `x` and its complement.
pub fn psi_pm_distribution(state: &TwoTermState) -> BTreeMap<(usize, i8), f64> {
    let amps = state.amplitudes();
    let full = (1usize << state.n()) - 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = BTreeMap::new();
    for x in 0..=full {
        let xbar = x ^ full;
        if xbar < x {
            continue;
        }
        for sign in [1i8, -1] {
            let a = (amps[x] + amps[xbar] * f64::from(sign)) * h;
            let p = a.norm_sqr();
            if p > 1e-20 {
                out.insert((x, sign), p);
            }
        }
    }
    out
}
