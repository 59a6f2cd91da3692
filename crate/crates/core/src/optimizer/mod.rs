//! Multi-start search for the rank-`q` affine image `Z = HB`.
//!
//! The objective has many local minima, so each search runs a local descent
//! from a batch of starts and keeps a catalog of the distinct endpoints. `B`
//! and `BQ` give the same `ZZ'` for any orthogonal `Q`; endpoints are
//! reported in a canonical gauge and compared through `BB'`.

mod bfgs;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::linalg::needs_flip;
use crate::objective::ReductionObjective;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Random starts, in addition to any angle starts.
    pub n_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when `‖∇f‖ < gradient_tolerance · (1 + |f|)`.
    pub gradient_tolerance: f64,
    /// Two endpoints are the same minimum when their values differ by less
    /// than `value_dedup_tolerance · (1 + value)` ...
    pub value_dedup_tolerance: f64,
    /// ... and their `BB'` differ by less than this in Frobenius norm.
    pub gram_dedup_tolerance: f64,
    /// Lengths cycled over the random starting frames.
    pub scale_grid: Vec<f64>,
    /// Angle-grid starts used when `r = 2` and `q = 1`.
    pub angle_starts: usize,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            n_starts: 64,
            seed: 1,
            max_iterations: 2000,
            gradient_tolerance: 1e-9,
            value_dedup_tolerance: 1e-6,
            gram_dedup_tolerance: 1e-5,
            scale_grid: vec![0.25, 0.5, 0.75, 1.0],
            angle_starts: 36,
            workers: None,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_iterations", self.max_iterations as f64),
            ("gradient_tolerance", self.gradient_tolerance),
            ("value_dedup_tolerance", self.value_dedup_tolerance),
            ("gram_dedup_tolerance", self.gram_dedup_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("search option {name} must be positive, got {v}")));
            }
        }
        if self.scale_grid.is_empty() || self.scale_grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::input("scale grid must be a non-empty list of positive lengths"));
        }
        if self.workers == Some(0) {
            return Err(Error::input("worker count must be positive"));
        }
        Ok(())
    }
}

/// One descent endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub b: DMatrix<f64>,
    pub value: f64,
    pub start_id: usize,
    pub iterations: usize,
    pub converged: bool,
    pub start_value: f64,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    /// Global best `B`, in canonical gauge.
    pub b: DMatrix<f64>,
    /// `Z = HB`.
    pub z: DMatrix<f64>,
    pub value: f64,
    /// Distinct endpoints, ascending by value (ties by start id).
    pub local_minima: Vec<LocalMinimum>,
    pub seed: u64,
    pub starts_used: usize,
    /// Set when the best `B` has rank below `q`.
    pub rank_deficient: bool,
}

/// `k` unit vectors `(sin φ, cos φ)'` with `φ = jπ/k`. Half a turn suffices
/// because `B` and `−B` give the same fit.
pub fn angle_starts(k: usize) -> Vec<DMatrix<f64>> {
    (0..k)
        .map(|j| {
            let phi = j as f64 * std::f64::consts::PI / k as f64;
            DMatrix::from_column_slice(2, 1, &[phi.sin(), phi.cos()])
        })
        .collect()
}

/// `n` Haar-random `r×q` orthonormal frames, the `k`-th scaled by
/// `scale_grid[k mod len]`.
pub fn random_starts(r: usize, q: usize, n: usize, seed: u64, scale_grid: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    if q == 0 || q >= r {
        return Err(Error::input(format!("target dimension {q} must satisfy 1 <= q < r = {r}")));
    }
    if scale_grid.is_empty() {
        return Err(Error::input("scale grid is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|k| {
            let gauss = DMatrix::from_fn(r, q, |_, _| StandardNormal.sample(&mut rng));
            let qr = gauss.qr();
            let rr = qr.r();
            let mut frame = qr.q().columns(0, q).into_owned();
            for j in 0..q {
                // sign fix so the frame is Haar distributed
                if rr[(j, j)] < 0.0 {
                    frame.column_mut(j).neg_mut();
                }
            }
            frame * scale_grid[k % scale_grid.len()]
        })
        .collect())
}

/// Rotates `B` into the gauge where `B'B` is diagonal with descending entries
/// and each column's largest-magnitude entry is positive. `BB'` is unchanged.
pub fn canonicalize_b(b: &DMatrix<f64>) -> DMatrix<f64> {
    let q = b.ncols();
    let eig = SymmetricEigen::new(b.transpose() * b);
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let rot = DMatrix::from_fn(q, q, |i, k| eig.eigenvectors[(i, order[k])]);
    let mut out = b * rot;
    for j in 0..q {
        if needs_flip(&out, j) {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

/// Local descent from `b0` on the unweighted objective for `h`.
pub fn local_minimize(h: &DMatrix<f64>, b0: &DMatrix<f64>, opts: &SearchOptions) -> Result<LocalMinimum> {
    if h.ncols() != b0.nrows() {
        return Err(Error::input(format!("H has {} columns but B has {} rows", h.ncols(), b0.nrows())));
    }
    let obj = ReductionObjective::new(h.clone(), None)?;
    minimize_from(&obj, b0, 0, opts)
}

/// Local descent on a prepared objective; `start_id` is recorded verbatim.
pub fn minimize_from(obj: &ReductionObjective, b0: &DMatrix<f64>, start_id: usize, opts: &SearchOptions) -> Result<LocalMinimum> {
    let start_value = obj.value(b0);
    let out = bfgs::minimize(obj, b0, opts.max_iterations, opts.gradient_tolerance)?;
    Ok(LocalMinimum {
        b: out.b,
        value: out.value,
        start_id,
        iterations: out.iterations,
        converged: out.converged,
        start_value,
        gradient_norm: out.gradient_norm,
    })
}

/// Multi-start minimization over `B` (`r×q`) for the canonical form `cf`.
///
/// Starts are the angle grid (only for `r = 2, q = 1`) followed by
/// `opts.n_starts` random frames. Weighted canonical forms use product
/// weights `wᵢwⱼ` on the pair terms.
pub fn reduce(cf: &CanonicalForm, q: usize, opts: &SearchOptions) -> Result<ReductionResult> {
    opts.validate()?;
    let r = cf.h.ncols();
    if q == 0 || q >= r {
        return Err(Error::input(format!("target dimension {q} must satisfy 1 <= q < r = {r}")));
    }
    let mut starts = if r == 2 && q == 1 { angle_starts(opts.angle_starts) } else { Vec::new() };
    starts.extend(random_starts(r, q, opts.n_starts, opts.seed, &opts.scale_grid)?);
    if starts.is_empty() {
        return Err(Error::input("no starting points requested"));
    }

    let obj = ReductionObjective::new(cf.h.clone(), cf.weights.as_deref())?;
    let run = || -> Vec<Result<LocalMinimum>> {
        starts
            .par_iter()
            .enumerate()
            .map(|(id, b0)| minimize_from(&obj, b0, id, opts))
            .collect()
    };
    let results = match opts.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::input(format!("cannot start {k} workers: {e}")))?
            .install(run),
        None => run(),
    };

    let mut catalog: Vec<(LocalMinimum, DMatrix<f64>)> = Vec::new();
    for res in results {
        let mut m = res?;
        m.b = canonicalize_b(&m.b);
        let gram = &m.b * m.b.transpose();
        let duplicate = catalog.iter().any(|(seen, seen_gram)| {
            (seen.value - m.value).abs() < opts.value_dedup_tolerance * (1.0 + m.value.abs())
                && (seen_gram - &gram).norm() < opts.gram_dedup_tolerance
        });
        if !duplicate {
            catalog.push((m, gram));
        }
    }
    let mut local_minima: Vec<LocalMinimum> = catalog.into_iter().map(|(m, _)| m).collect();
    local_minima.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.start_id.cmp(&b.start_id)));

    let best = &local_minima[0];
    let z = &cf.h * &best.b;
    let sv = best.b.singular_values();
    let (top, bottom) = (sv.max(), sv.min());
    Ok(ReductionResult {
        b: best.b.clone(),
        z,
        value: best.value,
        rank_deficient: bottom.partial_cmp(&(1e-8 * top)) != Some(std::cmp::Ordering::Greater),
        local_minima,
        seed: opts.seed,
        starts_used: starts.len(),
    })
}
