//! The Mahalanobis canonical form of a centered scatter.
//!
//! The centered coordinates factor as `(I − 1γ')X = H Λ^½ G'` where `H` is
//! `N×r` with orthonormal columns, `Λ^½` holds the strictly positive singular
//! values and `G'` the direction cosines. `HH'` and the squared distances of
//! the rows of `H` are unchanged by any nonsingular affine map of `X`.
//!
//! `H` is only determined up to column signs (fixed here by making each
//! column's largest-magnitude entry positive) and, for repeated singular
//! values, up to a rotation within the tied block. Compare `HH'`, never `H`,
//! on inputs with ties.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::centering::{center, mean_gamma, point_gamma, CenteringVector};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geometry::coincidence_representatives;
use crate::linalg::{fix_column_signs, sorted_svd};

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// `N×r` standardized principal coordinates.
    pub h: DMatrix<f64>,
    /// Singular values, strictly positive and descending.
    pub lambda_sqrt: DVector<f64>,
    /// `r×p` direction cosines.
    pub g_t: DMatrix<f64>,
    pub rank: usize,
    pub gamma: CenteringVector,
    /// Point multiplicities, when built in weighted mode. `H'diag(w)H = I`
    /// replaces `H'H = I` in that case.
    pub weights: Option<Vec<f64>>,
}

impl CanonicalForm {
    pub fn n_points(&self) -> usize {
        self.h.nrows()
    }

    /// `H Λ^½ G'`, the centered coordinates.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.h * DMatrix::from_diagonal(&self.lambda_sqrt) * &self.g_t
    }
}

/// Centered SVD of `c` under `g`, keeping singular values above
/// `tol · (largest singular value)`.
pub fn canonical_form(c: &Configuration, g: &CenteringVector, tol: f64) -> Result<CanonicalForm> {
    let centered = check_and_center(c, g, tol)?;
    decompose(centered.coords().clone(), g.clone(), tol, None)
}

/// Weighted mode: each point counts with its multiplicity `wᵢ`.
///
/// The SVD is taken of the centered rows scaled by `√wᵢ`, and the scaling is
/// then undone on `H`, so `H Λ^½ G'` is still the centered scatter while
/// `H'diag(w)H = I`. Unit weights reproduce [`canonical_form`].
pub fn canonical_form_weighted(c: &Configuration, g: &CenteringVector, tol: f64) -> Result<CanonicalForm> {
    let centered = check_and_center(c, g, tol)?;
    let weights: Vec<f64> = (0..c.n_points()).map(|i| c.weight(i)).collect();
    let mut y = centered.coords().clone();
    for (i, w) in weights.iter().enumerate() {
        y.row_mut(i).scale_mut(w.sqrt());
    }
    let mut cf = decompose(y, g.clone(), tol, Some(weights))?;
    let weights = cf.weights.as_ref().expect("set above");
    for (i, w) in weights.iter().enumerate() {
        cf.h.row_mut(i).scale_mut(1.0 / w.sqrt());
    }
    fix_column_signs(&mut cf.h, Some(&mut cf.g_t));
    Ok(cf)
}

fn check_and_center(c: &Configuration, g: &CenteringVector, tol: f64) -> Result<Configuration> {
    if c.n_points() < 2 {
        return Err(Error::input("canonical form needs at least two points"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::input(format!("rank tolerance {tol} must lie in (0, 1)")));
    }
    center(c, g)
}

fn decompose(y: DMatrix<f64>, gamma: CenteringVector, tol: f64, weights: Option<Vec<f64>>) -> Result<CanonicalForm> {
    if y.amax() == 0.0 {
        return Err(Error::Degenerate("every point coincides with the chosen origin".into()));
    }
    let svd = sorted_svd(&y);
    let top = svd.singular_values[0];
    let rank = svd.singular_values.iter().take_while(|&&s| s > tol * top).count();
    let mut h = svd.u.columns(0, rank).into_owned();
    let mut g_t = svd.v_t.rows(0, rank).into_owned();
    fix_column_signs(&mut h, Some(&mut g_t));
    Ok(CanonicalForm {
        h,
        lambda_sqrt: svd.singular_values.rows(0, rank).into_owned(),
        g_t,
        rank,
        gamma,
        weights,
    })
}

/// The orthogonal projector `HH'`.
pub fn projector(cf: &CanonicalForm) -> DMatrix<f64> {
    &cf.h * cf.h.transpose()
}

/// Merges coincident points into their first occurrence. Weights add up and
/// labels are joined with `+`.
pub fn dedup_weighted(c: &Configuration) -> Configuration {
    let rep = coincidence_representatives(c);
    let keep: Vec<usize> = (0..c.n_points()).filter(|&i| rep[i] == i).collect();
    if keep.len() == c.n_points() {
        return c.clone();
    }
    let labels: Vec<String> = keep
        .iter()
        .map(|&k| {
            (0..c.n_points())
                .filter(|&i| rep[i] == k)
                .map(|i| c.label(i))
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let weights: Vec<f64> = keep
        .iter()
        .map(|&k| (0..c.n_points()).filter(|&i| rep[i] == k).map(|i| c.weight(i)).sum())
        .collect();
    let coords = DMatrix::from_fn(keep.len(), c.dim(), |i, j| c.coords()[(keep[i], j)]);
    Configuration::new(coords)
        .and_then(|m| m.with_labels(labels))
        .and_then(|m| m.with_weights(weights))
        .expect("merging keeps coordinates finite and weights positive")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplexKind {
    /// `N` equidistant points around their centroid.
    MeanCentered,
    /// `N − 1` equidistant points plus a final point at the origin.
    PointCentered,
}

/// The limiting canonical form reached as the number of variables grows:
/// `N` points spanning `N − 1` dimensions with every pairwise squared
/// distance equal to 2.
pub fn simplex_h(n: usize, kind: SimplexKind) -> Result<CanonicalForm> {
    if n < 2 {
        return Err(Error::input(format!("simplex needs at least two points, got {n}")));
    }
    let r = n - 1;
    let (mut h, gamma) = match kind {
        SimplexKind::MeanCentered => (helmert_basis(n), mean_gamma(n)?),
        SimplexKind::PointCentered => {
            let mut h = DMatrix::zeros(n, r);
            h.view_mut((0, 0), (r, r)).fill_with_identity();
            (h, point_gamma(n, n - 1)?)
        }
    };
    let mut g_t = DMatrix::identity(r, r);
    fix_column_signs(&mut h, Some(&mut g_t));
    Ok(CanonicalForm { h, lambda_sqrt: DVector::from_element(r, 1.0), g_t, rank: r, gamma, weights: None })
}

/// Orthonormal basis of the complement of `1` (Helmert contrasts).
fn helmert_basis(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let norm = (k1 * (k1 + 1.0)).sqrt();
        if i <= k {
            1.0 / norm
        } else if i == k + 1 {
            -k1 / norm
        } else {
            0.0
        }
    })
}
