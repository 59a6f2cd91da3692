//! JSON run reports. Matrices are stored as lists of rows.

use affred::baselines::{PcaResult, SwarmStats, VariableAxes};
use affred::optimizer::LocalMinimum;
use affred::{CanonicalForm, MedianResult, ReductionResult};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult, RunConfig};

pub type Rows = Vec<Vec<f64>>;

pub fn rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSummary {
    pub rank: usize,
    pub h: Rows,
    pub lambda_sqrt: Vec<f64>,
    pub g_t: Rows,
    pub gamma: Vec<f64>,
    pub weights: Option<Vec<f64>>,
}

impl From<&CanonicalForm> for CanonicalSummary {
    fn from(cf: &CanonicalForm) -> Self {
        CanonicalSummary {
            rank: cf.rank,
            h: rows(&cf.h),
            lambda_sqrt: cf.lambda_sqrt.iter().copied().collect(),
            g_t: rows(&cf.g_t),
            gamma: cf.gamma.as_slice().to_vec(),
            weights: cf.weights.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimumSummary {
    pub value: f64,
    pub pair_sum: f64,
    pub b: Rows,
    pub start_id: usize,
    pub start_value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

impl From<&LocalMinimum> for MinimumSummary {
    fn from(m: &LocalMinimum) -> Self {
        MinimumSummary {
            value: m.value,
            pair_sum: 0.5 * m.value,
            b: rows(&m.b),
            start_id: m.start_id,
            start_value: m.start_value,
            iterations: m.iterations,
            gradient_norm: m.gradient_norm,
            converged: m.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxesSummary {
    pub variables: Vec<String>,
    pub directions: Rows,
    pub norms: Vec<f64>,
    pub defined: Vec<bool>,
}

impl AxesSummary {
    pub fn new(variables: &[String], axes: &VariableAxes) -> Self {
        AxesSummary {
            variables: variables.to_vec(),
            directions: rows(&axes.directions),
            norms: axes.norms.clone(),
            defined: axes.defined.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub q: usize,
    /// Sum over all ordered pairs.
    pub norm2: f64,
    /// Sum over unordered pairs, half of `norm2`.
    pub pair_sum: f64,
    pub b: Rows,
    pub z: Rows,
    pub starts_used: usize,
    pub rank_deficient: bool,
    pub converged_minima: usize,
    pub local_minima: Vec<MinimumSummary>,
    /// Rows of `G Λ^{-½} B`.
    pub variable_axes: AxesSummary,
    /// Rows of `G Λ^½ B`, the covariance of each variable with `Z`.
    pub variable_structure: AxesSummary,
}

impl ReductionSummary {
    pub fn new(q: usize, r: &ReductionResult, axes: AxesSummary, structure: AxesSummary) -> Self {
        ReductionSummary {
            q,
            norm2: r.value,
            pair_sum: 0.5 * r.value,
            b: rows(&r.b),
            z: rows(&r.z),
            starts_used: r.starts_used,
            rank_deficient: r.rank_deficient,
            converged_minima: r.local_minima.iter().filter(|m| m.converged).count(),
            local_minima: r.local_minima.iter().map(MinimumSummary::from).collect(),
            variable_axes: axes,
            variable_structure: structure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaSummary {
    pub q: usize,
    pub scores: Rows,
    pub loadings: Rows,
    pub singular_values: Vec<f64>,
    pub explained_fraction: Vec<f64>,
    pub variable_axes: AxesSummary,
}

impl PcaSummary {
    pub fn new(q: usize, p: &PcaResult, axes: AxesSummary) -> Self {
        PcaSummary {
            q,
            scores: rows(&p.scores),
            loadings: rows(&p.loadings),
            singular_values: p.singular_values.iter().copied().collect(),
            explained_fraction: p.explained_fraction.iter().copied().collect(),
            variable_axes: axes,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub search_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: String,
    pub command: String,
    pub config: RunConfig,
    pub n_points: usize,
    pub dim: usize,
    pub labels: Vec<String>,
    pub variables: Vec<String>,
    pub seed: u64,
    pub canonical: Option<CanonicalSummary>,
    pub reduction: Option<ReductionSummary>,
    pub pca: Option<PcaSummary>,
    pub swarm: Option<SwarmStats>,
    pub median: Option<MedianResult>,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("not a run report: {e}")))
    }

    /// The computed results only: timing, run id and the configuration echo
    /// (which names the output directory and worker count) are dropped.
    pub fn numeric_fields(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Some(obj) = v.as_object_mut() {
            for key in ["timing", "run_id", "config"] {
                obj.remove(key);
            }
        }
        v
    }
}

/// Hex digest of the command name and every configuration field that can
/// change the results.
pub fn run_id(command: &str, config: &RunConfig) -> String {
    let mut c = config.clone();
    c.out = Default::default();
    c.search.workers = None;
    let echo = serde_json::to_string(&c).expect("configurations serialize");
    let digest = Sha256::new().chain_update(command.as_bytes()).chain_update([0]).chain_update(echo.as_bytes()).finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
