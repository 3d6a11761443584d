//! Recovery of a hidden involution `{e, h}` in D4^n in three stages:
//! the reflection pattern `t` (stage A), the parities of `l` on the support
//! of `t` (stage B), and the full rotation digits `l` (stage C).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::simon::simon_finish;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::group::{D4nElement, InvolutionLabel, Z4Vector};
use crate::kernel::{hadamard_measure, psi_pm_measure, AncillaFunction, DoublingStats, HiddenOracle, PhaseDoubler};

/// Tunable constants of the solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Degenerate cascades tolerated per doubling round.
    pub retry_budget: u32,
    /// Extra samples beyond the needed rank before giving up on a linear
    /// system.
    pub simon_slack: usize,
    /// Orthogonality tests per component in stage C.
    pub stage_c_samples: u32,
    /// Full-pipeline restarts after a failure.
    pub restarts: u32,
    /// Random coset-constancy checks on the recovered label.
    pub verify_checks: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            retry_budget: 10,
            simon_slack: 10,
            stage_c_samples: 20,
            restarts: 3,
            verify_checks: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stage_c_samples == 0 {
            return Err(Error::InvalidConfig("stage C needs at least one sample".into()));
        }
        if self.verify_checks == 0 {
            return Err(Error::InvalidConfig("verification needs at least one check".into()));
        }
        Ok(())
    }
}

/// Work done by one stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    /// Simon samples, parity equations, or orthogonality tests drawn.
    pub samples: u64,
    /// Coset samples and cascade attempts behind them.
    pub doubling: DoublingStats,
    /// Degenerate cascades that were thrown away.
    pub retries: u64,
}

impl StageReport {
    fn add_doubler(&mut self, d: &PhaseDoubler<'_>) {
        self.doubling.merge(&d.stats());
        self.retries += d.retries();
    }

    pub fn queries(&self) -> u64 {
        self.doubling.coset_samples
    }
}

/// Per-stage totals across all attempts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageAccounting {
    pub stage_a: StageReport,
    pub stage_b: StageReport,
    pub stage_c: StageReport,
}

impl StageAccounting {
    pub fn queries(&self) -> u64 {
        self.stage_a.queries() + self.stage_b.queries() + self.stage_c.queries()
    }

    pub fn retries(&self) -> u64 {
        self.stage_a.retries + self.stage_b.retries + self.stage_c.retries
    }
}

/// Outcome of [`solve_hidden_involution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Label from the last attempt, if it got that far.
    pub label: Option<InvolutionLabel>,
    /// Coset-state queries spent by the stages.
    pub queries: u64,
    /// Classical oracle calls spent on verification.
    pub verification_queries: u64,
    /// Degenerate cascades discarded.
    pub retries: u64,
    /// Pipeline restarts used.
    pub restarts: u32,
    pub success: bool,
    pub stages: StageAccounting,
    /// Why the last failed attempt failed.
    pub failure: Option<String>,
}

/// Stage A: two doubling rounds per state, Hadamard measurement, Simon
/// post-processing. Work is added to `report` even on failure.
pub fn stage_a_determine_t<R: Rng + ?Sized>(
    o: &HiddenOracle,
    config: &SolverConfig,
    report: &mut StageReport,
    rng: &mut R,
) -> Result<BitVector> {
    let n = o.n();
    let mut doubler = PhaseDoubler::new(o, config.retry_budget);
    let result = simon_finish(n, n + config.simon_slack, |rng| Ok(doubler.round_two(rng)?.into_state()), rng);
    report.add_doubler(&doubler);
    let result = result?;
    report.samples += result.samples as u64;
    Ok(result.z)
}

/// Stage B: parities `l_i mod 2` on the support of `t`, zero elsewhere.
pub fn stage_b_parity<R: Rng + ?Sized>(
    o: &HiddenOracle,
    t: &BitVector,
    config: &SolverConfig,
    report: &mut StageReport,
    rng: &mut R,
) -> Result<BitVector> {
    let mut doubler = PhaseDoubler::restricted(o, t.clone(), config.retry_budget)?;
    let result = collect_parity_equations(&mut doubler, config, report, rng);
    report.add_doubler(&doubler);
    let local = result?;
    let mut parity = BitVector::zeros(o.n());
    for (j, i) in t.ones_indices().enumerate() {
        parity.set(i, local.get(j));
    }
    Ok(parity)
}

fn collect_parity_equations<R: Rng + ?Sized>(
    doubler: &mut PhaseDoubler<'_>,
    config: &SolverConfig,
    report: &mut StageReport,
    rng: &mut R,
) -> Result<BitVector> {
    let width = doubler.width();
    let budget = width + config.simon_slack;
    let mut rows: Vec<BitVector> = Vec::with_capacity(width);
    let mut rhs: Vec<bool> = Vec::with_capacity(width);
    let mut rank = 0;
    let mut drawn = 0;
    while rank < width {
        if drawn == budget {
            return Err(Error::RankDeficit {
                stage: "stage B",
                rank,
                needed: width,
                samples: drawn,
            });
        }
        let out = doubler.round_one(rng)?;
        drawn += 1;
        report.samples += 1;
        let p = out.coefficients().bit_plane(1);
        let (_, sign) = psi_pm_measure(out.state(), rng)?;
        if p.is_zero() {
            if sign < 0 {
                return Err(Error::Inconsistent("stage B"));
            }
            continue;
        }
        rows.push(p);
        rhs.push(sign < 0);
        rank = BitMatrix::from_rows(width, &rows)?.rank();
    }
    BitMatrix::from_rows(width, &rows)?
        .solve(&BitVector::from_bools(rhs))?
        .ok_or(Error::Inconsistent("stage B"))
}

/// Whether the ancilla-extended oracle still hides `{e, h}`: draws up to
/// `k` Hadamard samples from doubly-doubled states and looks for one that
/// is not orthogonal to `t`.
fn extension_keeps_subgroup<R: Rng + ?Sized>(
    ext: &HiddenOracle,
    t: &BitVector,
    config: &SolverConfig,
    report: &mut StageReport,
    rng: &mut R,
) -> Result<bool> {
    let mut doubler = PhaseDoubler::new(ext, config.retry_budget);
    let mut verdict = Ok(true);
    for _ in 0..config.stage_c_samples {
        let st = match doubler.round_two(rng) {
            Ok(s) => s.into_state(),
            Err(e) => {
                verdict = Err(e);
                break;
            }
        };
        report.samples += 1;
        if hadamard_measure(&st, rng).dot(t)? {
            verdict = Ok(false);
            break;
        }
    }
    report.add_doubler(&doubler);
    verdict
}

/// Stage C: resolves `l_i` within its parity class for every `i` with
/// `t_i = 1`.
pub fn stage_c_full_l<R: Rng + ?Sized>(
    o: &HiddenOracle,
    t: &BitVector,
    parities: &BitVector,
    config: &SolverConfig,
    report: &mut StageReport,
    rng: &mut R,
) -> Result<Z4Vector> {
    let mut l = Z4Vector::zeros(o.n());
    for i in t.ones_indices() {
        let odd = parities.get(i);
        let ancilla = if odd {
            AncillaFunction::odd_class(i)
        } else {
            AncillaFunction::even_class(i)
        };
        let ext = o.extended(ancilla)?;
        let base = u8::from(odd);
        let keeps = extension_keeps_subgroup(&ext, t, config, report, rng)?;
        l.set(i, if keeps { base } else { base + 2 });
    }
    Ok(l)
}

/// Checks `f(g) = f(g h)` on `checks` random `g`; returns the number of
/// oracle calls used.
fn verify_label<R: Rng + ?Sized>(o: &HiddenOracle, label: &InvolutionLabel, checks: u32, rng: &mut R) -> Result<(bool, u64)> {
    let h = label.element();
    let mut calls = 0;
    for _ in 0..checks {
        let g = D4nElement::random(o.n(), rng);
        let gh = g.mul(&h)?;
        calls += 2;
        if o.query(&g)? != o.query(&gh)? {
            return Ok((false, calls));
        }
    }
    Ok((true, calls))
}

fn run_stages<R: Rng + ?Sized>(
    o: &HiddenOracle,
    config: &SolverConfig,
    acc: &mut StageAccounting,
    rng: &mut R,
) -> Result<InvolutionLabel> {
    let t = stage_a_determine_t(o, config, &mut acc.stage_a, rng)?;
    let p = stage_b_parity(o, &t, config, &mut acc.stage_b, rng)?;
    let l = stage_c_full_l(o, &t, &p, config, &mut acc.stage_c, rng)?;
    InvolutionLabel::new(t, l)
}

/// Runs stages A, B and C, verifies the label, and restarts with fresh
/// randomness on failure.
pub fn solve_hidden_involution<R: Rng + ?Sized>(o: &HiddenOracle, config: &SolverConfig, rng: &mut R) -> Result<RecoveryResult> {
    config.validate()?;
    let mut stages = StageAccounting::default();
    let mut verification_queries = 0;
    let mut label = None;
    let mut failure = None;
    let mut success = false;
    let mut restarts = 0;
    for attempt in 0..=config.restarts {
        restarts = attempt;
        match run_stages(o, config, &mut stages, rng) {
            Ok(found) => {
                let (ok, calls) = verify_label(o, &found, config.verify_checks, rng)?;
                verification_queries += calls;
                label = Some(found);
                if ok {
                    success = true;
                    failure = None;
                    break;
                }
                failure = Some("verification failed".to_string());
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    Ok(RecoveryResult {
        label,
        queries: stages.queries(),
        verification_queries,
        retries: stages.retries(),
        restarts,
        success,
        stages,
        failure,
    })
}
