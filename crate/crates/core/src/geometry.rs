//! Squared Euclidean distances, origin distances and association matrices.
//!
//! Pairwise distances are always formed from coordinate differences. The
//! Gram expansion `d0·1' + 1·d0' − 2XX'` is only used to rebuild distances
//! from an association matrix, where no coordinates are available.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};

/// Symmetric `N×N` matrix of squared inter-point distances with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquaredDistances(DMatrix<f64>);

impl SquaredDistances {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

/// Squared distance of every point from the current origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginDistances(DVector<f64>);

impl OriginDistances {
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

pub fn squared_distances(c: &Configuration) -> SquaredDistances {
    pairwise_sq(c.coords())
}

/// Squared distances between the rows of an arbitrary finite matrix.
pub fn pairwise_sq(x: &DMatrix<f64>) -> SquaredDistances {
    let n = x.nrows();
    let mut d2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = 0.0;
            for k in 0..x.ncols() {
                let diff = x[(i, k)] - x[(j, k)];
                s += diff * diff;
            }
            d2[(i, j)] = s;
            d2[(j, i)] = s;
        }
    }
    SquaredDistances(d2)
}

pub fn origin_sq_distances(c: &Configuration) -> OriginDistances {
    row_sq_norms(c.coords())
}

pub fn row_sq_norms(x: &DMatrix<f64>) -> OriginDistances {
    OriginDistances(DVector::from_fn(x.nrows(), |i, _| x.row(i).norm_squared()))
}

/// The outer-products matrix `XX'`.
pub fn association_matrix(c: &Configuration) -> DMatrix<f64> {
    let x = c.coords();
    x * x.transpose()
}

/// Rebuilds squared distances from an association matrix via
/// `d0·1' + 1·d0' − 2A`.
pub fn reconstruct_d2(a: &DMatrix<f64>) -> Result<SquaredDistances> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::input(format!("association matrix must be square, got {}x{}", n, a.ncols())));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::input(format!("association matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut d2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[(i, i)] + a[(j, j)] - 2.0 * a[(i, j)];
            d2[(i, j)] = v;
            d2[(j, i)] = v;
        }
    }
    Ok(SquaredDistances(d2))
}

/// Appends a point at the origin, labeled `ORIGIN` with unit weight.
pub fn augment_origin(c: &Configuration) -> Configuration {
    let (n, p) = (c.n_points(), c.dim());
    let coords = c.coords().clone().insert_rows(n, 1, 0.0);
    debug_assert_eq!(coords.ncols(), p);
    let mut labels = c.all_labels();
    labels.push("ORIGIN".to_string());
    let mut out = Configuration::new(coords)
        .and_then(|o| o.with_labels(labels))
        .expect("augmenting a valid configuration stays valid");
    if let Some(w) = c.weights() {
        let mut w = w.to_vec();
        w.push(1.0);
        out = out.with_weights(w).expect("appended weight is positive");
    }
    out
}

/// Two points closer than this (in squared distance) are the same location.
pub fn coincidence_tolerance(c: &Configuration) -> f64 {
    1e-18 * (origin_sq_distances(c).max() + 1.0)
}

/// For each point, the index of the first point at the same location.
pub fn coincidence_representatives(c: &Configuration) -> Vec<usize> {
    let d2 = squared_distances(c);
    let tol = coincidence_tolerance(c);
    let mut rep: Vec<usize> = (0..c.n_points()).collect();
    for i in 0..c.n_points() {
        if let Some(j) = (0..i).find(|&j| rep[j] == j && d2.get(i, j) < tol) {
            rep[i] = j;
        }
    }
    rep
}
