use cgsieve_core::{InvolutionLabel, RecoveryResult, StageAccounting};
use serde::Serialize;

/// One line of `cgsieve run` output per trial.
#[derive(Debug, Serialize)]
pub struct RunReport {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub trial: u64,
    pub n: usize,
    pub seed: u64,
    pub planted: InvolutionLabel,
    pub recovered: Option<InvolutionLabel>,
    pub queries: u64,
    pub verification_queries: u64,
    pub retries: u64,
    pub restarts: u32,
    pub success: bool,
    pub failure: Option<String>,
    pub stages: StageAccounting,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(trial: u64, seed: u64, planted: InvolutionLabel, result: RecoveryResult, wall_time_ms: Option<f64>) -> Self {
        // Success means the label verified against the oracle; the planted
        // label is compared too so a lucky wrong answer cannot count.
        let success = result.success && result.label.as_ref() == Some(&planted);
        Self {
            kind: "trial",
            trial,
            n: planted.n(),
            seed,
            recovered: result.label,
            planted,
            queries: result.queries,
            verification_queries: result.verification_queries,
            retries: result.retries,
            restarts: result.restarts,
            success,
            failure: result.failure,
            stages: result.stages,
            wall_time_ms,
        }
    }
}

/// Last line of `cgsieve run` output.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub n: usize,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub mean_retries: f64,
}

impl RunSummary {
    pub fn from_reports(n: usize, seed: u64, reports: &[RunReport]) -> Self {
        let trials = reports.len() as u64;
        let successes = reports.iter().filter(|r| r.success).count() as u64;
        let mean = |f: fn(&RunReport) -> u64| reports.iter().map(|r| f(r) as f64).sum::<f64>() / trials.max(1) as f64;
        Self {
            kind: "summary",
            n,
            seed,
            trials,
            successes,
            success_rate: successes as f64 / trials.max(1) as f64,
            mean_queries: mean(|r| r.queries),
            mean_retries: mean(|r| r.retries),
        }
    }
}

/// One point of a `cgsieve bench` sweep.
#[derive(Debug, Serialize)]
pub struct BenchPoint {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub n: usize,
    pub trials: u64,
    pub success_rate: f64,
    pub mean_queries: f64,
}

/// Log-log fit over a `cgsieve bench` sweep.
#[derive(Debug, Serialize)]
pub struct BenchFit {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub slope: f64,
    pub intercept: f64,
}

impl BenchFit {
    /// Least-squares line through `(ln n, ln mean_queries)`.
    pub fn fit(points: &[BenchPoint]) -> Self {
        let xy: Vec<(f64, f64)> = points.iter().map(|p| ((p.n as f64).ln(), p.mean_queries.ln())).collect();
        let k = xy.len() as f64;
        let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
        let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
        let num: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = if den > 0.0 { num / den } else { f64::NAN };
        Self {
            kind: "fit",
            slope,
            intercept: my - slope * mx,
        }
    }
}
