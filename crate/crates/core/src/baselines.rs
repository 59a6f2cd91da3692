//! Classical PCA for comparison, and aids for reading a reduced scatter.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalForm;
use crate::centering::{center, mean_gamma};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::linalg::{fix_column_signs, sorted_svd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Standardization {
    /// Mean-centered columns.
    Mean,
    /// Mean-centered columns scaled to unit sample standard deviation.
    Correlation,
}

pub fn standardize(c: &Configuration, mode: Standardization) -> Result<Configuration> {
    let centered = center(c, &mean_gamma(c.n_points())?)?;
    if mode == Standardization::Mean {
        return Ok(centered);
    }
    let n = c.n_points();
    if n < 2 {
        return Err(Error::input("correlation form needs at least two points"));
    }
    let mut y = centered.coords().clone();
    for j in 0..y.ncols() {
        let sd = (y.column(j).norm_squared() / (n - 1) as f64).sqrt();
        if sd.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::input(format!("column {j} has zero variance")));
        }
        y.column_mut(j).scale_mut(1.0 / sd);
    }
    Ok(centered.with_coords(y))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    /// `N×q` principal component scores.
    pub scores: DMatrix<f64>,
    /// `p×q` direction cosines.
    pub loadings: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    /// Share of the total sum of squares carried by each retained component.
    pub explained_fraction: DVector<f64>,
}

/// Top-`q` principal components of an already standardized scatter.
pub fn pca(c: &Configuration, q: usize) -> Result<PcaResult> {
    let svd = sorted_svd(c.coords());
    let s = &svd.singular_values;
    let top = s.max();
    let rank = s.iter().take_while(|&&v| v > 1e-10 * top).count();
    if q == 0 || q > rank {
        return Err(Error::input(format!("q = {q} must lie in 1..={rank} (rank of the data)")));
    }
    let mut loadings = svd.v_t.rows(0, q).transpose();
    let mut u_t = svd.u.columns(0, q).transpose();
    fix_column_signs(&mut loadings, Some(&mut u_t));
    let singular_values = s.rows(0, q).into_owned();
    let scores = u_t.transpose() * DMatrix::from_diagonal(&singular_values);
    let total: f64 = s.iter().map(|v| v * v).sum();
    let explained_fraction = singular_values.map(|v| v * v / total);
    Ok(PcaResult { scores, loadings, singular_values, explained_fraction })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub directions: usize,
    /// `u'H'Hu` for each sampled unit direction `u`.
    pub sums_of_squares: Vec<f64>,
    /// Largest `|u'H'Hu − 1|`.
    pub max_deviation: f64,
    /// Largest `|u'H'Hv|` over sampled orthogonal pairs `(u, v)`.
    pub max_cross: f64,
}

/// Samples unit directions in `r`-space and checks that every projection of
/// `H` has the same (unit) sum of squares and that orthogonal projections are
/// uncorrelated, so no direction can be preferred by variance.
pub fn equal_variance_witness(cf: &CanonicalForm, directions: usize, seed: u64) -> WitnessReport {
    let r = cf.h.ncols();
    let mut metric_h = cf.h.clone();
    if let Some(w) = &cf.weights {
        for (i, wi) in w.iter().enumerate() {
            metric_h.row_mut(i).scale_mut(wi.sqrt());
        }
    }
    let gram = metric_h.transpose() * &metric_h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || {
        let v = DVector::from_fn(r, |_, _| StandardNormal.sample(&mut rng));
        v.normalize()
    };
    let mut sums = Vec::with_capacity(directions);
    let mut max_cross = 0.0f64;
    for _ in 0..directions {
        let u = unit();
        sums.push(u.dot(&(&gram * &u)));
        if r > 1 {
            let w = unit();
            let v = (&w - &u * u.dot(&w)).normalize();
            max_cross = max_cross.max(u.dot(&(&gram * v)).abs());
        }
    }
    let max_deviation = sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    WitnessReport { directions, sums_of_squares: sums, max_deviation, max_cross }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableAxes {
    /// `p×q` rows of unit length (zero where undefined).
    pub directions: DMatrix<f64>,
    /// Row norms before normalization.
    pub norms: Vec<f64>,
    /// False where the norm is below `1e-12` and no direction is defined.
    pub defined: Vec<bool>,
}

impl VariableAxes {
    /// Normalizes each row of a `p×q` linear map.
    pub fn from_map(l: DMatrix<f64>) -> Self {
        normalize_rows(l)
    }
}

fn normalize_rows(l: DMatrix<f64>) -> VariableAxes {
    let mut directions = l;
    let mut norms = Vec::new();
    let mut defined = Vec::new();
    for i in 0..directions.nrows() {
        let n = directions.row(i).norm();
        norms.push(n);
        defined.push(n >= 1e-12);
        if n >= 1e-12 {
            directions.row_mut(i).scale_mut(1.0 / n);
        } else {
            directions.row_mut(i).fill(0.0);
        }
    }
    VariableAxes { directions, norms, defined }
}

fn check_b(cf: &CanonicalForm, b: &DMatrix<f64>) -> Result<()> {
    if b.nrows() != cf.h.ncols() {
        return Err(Error::input(format!("B has {} rows, canonical rank is {}", b.nrows(), cf.h.ncols())));
    }
    Ok(())
}

/// Rows of the composite linear map `G Λ^{-½} B` taking centered original
/// coordinates to `Z`, one row per original variable.
pub fn variable_axes(cf: &CanonicalForm, b: &DMatrix<f64>) -> Result<VariableAxes> {
    check_b(cf, b)?;
    let inv = DMatrix::from_diagonal(&cf.lambda_sqrt.map(|v| 1.0 / v));
    Ok(normalize_rows(cf.g_t.transpose() * inv * b))
}

/// Rows of `G Λ^½ B = X̃'Z`, the cross-products between each centered
/// original variable and the reduced coordinates.
pub fn variable_structure(cf: &CanonicalForm, b: &DMatrix<f64>) -> Result<VariableAxes> {
    check_b(cf, b)?;
    Ok(normalize_rows(cf.g_t.transpose() * DMatrix::from_diagonal(&cf.lambda_sqrt) * b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmStats {
    pub radii: Vec<f64>,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Polar angles in `[0, 2π)`, only for two-dimensional scatters.
    pub angles: Option<Vec<f64>>,
    /// Labels sorted by angle (ties by index), only in two dimensions.
    pub angular_order: Option<Vec<String>>,
}

/// Polar summary of a reduced scatter around the origin.
pub fn swarm_stats(z: &DMatrix<f64>, labels: &[String]) -> Result<SwarmStats> {
    if z.ncols() == 0 || z.nrows() == 0 {
        return Err(Error::input("swarm statistics need at least one point and one dimension"));
    }
    if labels.len() != z.nrows() {
        return Err(Error::input(format!("{} labels for {} points", labels.len(), z.nrows())));
    }
    let radii: Vec<f64> = z.row_iter().map(|r| r.norm()).collect();
    let min_radius = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let max_radius = radii.iter().copied().fold(0.0, f64::max);
    let (angles, angular_order) = if z.ncols() == 2 {
        let tau = std::f64::consts::TAU;
        let angles: Vec<f64> = z
            .row_iter()
            .map(|r| {
                let a = r[1].atan2(r[0]);
                if a < 0.0 { (a + tau).min(tau.next_down()) } else { a }
            })
            .collect();
        let mut order: Vec<usize> = (0..angles.len()).collect();
        order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]).then(i.cmp(&j)));
        (Some(angles), Some(order.into_iter().map(|i| labels[i].clone()).collect()))
    } else {
        (None, None)
    };
    Ok(SwarmStats { radii, min_radius, max_radius, angles, angular_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{canonical_form, simplex_h, SimplexKind};
    use approx::assert_relative_eq;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn standardize_examples() {
        let c = Configuration::from_rows(&[[1.0], [3.0]]).unwrap();
        let m = standardize(&c, Standardization::Mean).unwrap();
        assert_eq!(m.coords().as_slice(), &[-1.0, 1.0]);
        let k = standardize(&c, Standardization::Correlation).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(k.coords()[(0, 0)], -s, epsilon = 1e-15);
        assert_relative_eq!(k.coords()[(1, 0)], s, epsilon = 1e-15);
    }

    #[test]
    fn constant_column_rejected_in_correlation_mode() {
        let c = Configuration::from_rows(&[[1.0, 2.0], [3.0, 2.0]]).unwrap();
        match standardize(&c, Standardization::Correlation) {
            Err(Error::Input(msg)) => assert!(msg.contains("column 1")),
            other => panic!("{other:?}"),
        }
        assert!(standardize(&c, Standardization::Mean).is_ok());
    }

    #[test]
    fn perfectly_correlated_columns() {
        let c = Configuration::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [5.0, 10.0]]).unwrap();
        let s = standardize(&c, Standardization::Correlation).unwrap();
        let p = pca(&s, 1).unwrap();
        assert_relative_eq!(p.explained_fraction[0], 1.0, epsilon = 1e-12);
        assert!(pca(&s, 2).is_err());
    }

    #[test]
    fn orthogonal_design_gives_coordinate_axes() {
        // columns orthogonal and mean-free with norms 4 and 2
        let c = Configuration::from_rows(&[[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
        let p = pca(&c, 2).unwrap();
        assert_relative_eq!(p.singular_values[0], 8f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(p.singular_values[1], 2f64.sqrt(), epsilon = 1e-12);
        assert!((p.loadings.clone() - DMatrix::identity(2, 2)).amax() < 1e-12);
        let lt = p.loadings.transpose() * &p.loadings;
        assert!((lt - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn full_rank_pca_reproduces_input() {
        let c = Configuration::from_rows(&[[1.0, 2.0, 0.5], [2.0, 1.0, 3.0], [4.0, 0.0, 1.0], [0.0, 3.0, 2.0], [1.0, 1.0, 1.0]]).unwrap();
        let s = standardize(&c, Standardization::Mean).unwrap();
        let p = pca(&s, 3).unwrap();
        let back = &p.scores * p.loadings.transpose();
        assert!((back - s.coords()).amax() < 1e-9 * s.coords().amax());
    }

    #[test]
    fn longley_correlation_spectrum() {
        // reference singular values from an independent SVD of the same table
        let s = standardize(&crate::fixtures::longley().unwrap(), Standardization::Correlation).unwrap();
        let p = pca(&s, 6).unwrap();
        let sv = [8.24780344, 4.21905078, 1.94386348, 0.4774452, 0.39523419, 0.10285781];
        let frac = [7.55847351e-01, 1.97782105e-01, 4.19845027e-02, 2.53282130e-03, 1.73566735e-03, 1.17552540e-04];
        for k in 0..6 {
            assert_relative_eq!(p.singular_values[k], sv[k], max_relative = 1e-7);
            assert_relative_eq!(p.explained_fraction[k], frac[k], max_relative = 1e-7);
        }
        // total sum of squares of a correlation-standardized table is (N−1)p
        assert_relative_eq!(p.singular_values.norm_squared(), 90.0, max_relative = 1e-12);
    }

    #[test]
    fn witness_on_simplex_and_random_forms() {
        let cf = simplex_h(5, SimplexKind::MeanCentered).unwrap();
        let w = equal_variance_witness(&cf, 100, 3);
        assert_eq!(w.sums_of_squares.len(), 100);
        assert!(w.max_deviation < 1e-10);
        assert!(w.max_cross < 1e-10);
    }

    #[test]
    fn axes_for_identity_b() {
        let c = Configuration::from_rows(&[[1.0, 0.0], [0.0, 2.0], [-1.0, -2.0], [0.0, 0.5]]).unwrap();
        let cf = canonical_form(&c, &mean_gamma(4).unwrap(), 1e-10).unwrap();
        let axes = variable_axes(&cf, &DMatrix::identity(2, 2)).unwrap();
        let raw = cf.g_t.transpose() * DMatrix::from_diagonal(&cf.lambda_sqrt.map(|v| 1.0 / v));
        for i in 0..2 {
            assert_relative_eq!(axes.norms[i], raw.row(i).norm(), epsilon = 1e-14);
            assert!((axes.directions.row(i) - raw.row(i) / raw.row(i).norm()).amax() < 1e-14);
        }
        let zero = variable_axes(&cf, &DMatrix::zeros(2, 1)).unwrap();
        assert_eq!(zero.defined, vec![false, false]);
        assert!(variable_axes(&cf, &DMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn structure_rows_are_cross_products() {
        let c = Configuration::from_rows(&[[1.0, 0.0, 2.0], [0.0, 2.0, 1.0], [-1.0, -2.0, 0.0], [0.0, 0.5, -3.0]]).unwrap();
        let cf = canonical_form(&c, &mean_gamma(4).unwrap(), 1e-10).unwrap();
        let b = DMatrix::from_row_slice(3, 2, &[0.5, 0.1, -0.2, 0.7, 0.3, 0.3]);
        let s = variable_structure(&cf, &b).unwrap();
        let direct = cf.reconstruct().transpose() * (&cf.h * &b);
        for i in 0..3 {
            assert_relative_eq!(s.norms[i], direct.row(i).norm(), max_relative = 1e-12);
        }
    }

    #[test]
    fn swarm_examples() {
        let s = swarm_stats(&DMatrix::from_row_slice(1, 2, &[3.0, 4.0]), &labels(1)).unwrap();
        assert_eq!(s.radii, vec![5.0]);
        assert_relative_eq!(s.angles.unwrap()[0], 4f64.atan2(3.0));
        let s = swarm_stats(&DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]), &labels(2)).unwrap();
        assert_eq!(s.min_radius, 0.0);
        assert_relative_eq!(s.angles.as_ref().unwrap()[1], 1.5 * std::f64::consts::PI);
        assert_eq!(s.angular_order.unwrap(), vec!["1", "2"]);
        let one_d = swarm_stats(&DMatrix::from_column_slice(3, 1, &[-2.0, 1.0, 0.5]), &labels(3)).unwrap();
        assert_eq!(one_d.radii, vec![2.0, 1.0, 0.5]);
        assert!(one_d.angles.is_none());
    }
}
