//! Origin choice by generalized-inverse centering, and the affine-invariant
//! convex-hull-peeling median.
//!
//! A centering vector `γ` is any `N`-vector whose entries sum to one. Centering
//! maps `X` to `(I − 1γ')X`, which moves the `γ`-weighted average of the rows
//! to the origin. Composition obeys `(I − 1γ₂')(I − 1γ₁') = I − 1γ₂'`: the last
//! centering applied wins.

mod hull;
mod nnls;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use hull::{hull_vertex_flags, FEASIBILITY_TOLERANCE};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geometry::coincidence_representatives;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CenteringVector(DVector<f64>);

impl CenteringVector {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::input("centering vector must be non-empty"));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::input("centering vector has non-finite entries"));
        }
        let sum: f64 = gamma.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("centering vector sums to {sum}, expected 1")));
        }
        Ok(CenteringVector(DVector::from_vec(gamma)))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for CenteringVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        CenteringVector::new(v)
    }
}

impl From<CenteringVector> for Vec<f64> {
    fn from(g: CenteringVector) -> Self {
        g.0.as_slice().to_vec()
    }
}

/// The Moore–Penrose inverse of `1`: every entry `1/n`.
pub fn mean_gamma(n: usize) -> Result<CenteringVector> {
    if n == 0 {
        return Err(Error::input("mean centering needs at least one point"));
    }
    Ok(CenteringVector(DVector::from_element(n, 1.0 / n as f64)))
}

/// Centering on point `i` itself.
pub fn point_gamma(n: usize, i: usize) -> Result<CenteringVector> {
    if i >= n {
        return Err(Error::input(format!("point index {i} out of range for {n} points")));
    }
    let mut g = DVector::zeros(n);
    g[i] = 1.0;
    Ok(CenteringVector(g))
}

/// `X − 1(γ'X)`.
pub fn center(c: &Configuration, g: &CenteringVector) -> Result<Configuration> {
    let x = c.coords();
    if g.len() != x.nrows() {
        return Err(Error::input(format!(
            "centering vector has {} entries for {} points",
            g.len(),
            x.nrows()
        )));
    }
    let origin = g.as_vector().transpose() * x;
    let mut y = x.clone();
    for mut row in y.row_iter_mut() {
        row -= &origin;
    }
    Ok(c.with_coords(y))
}

/// The `N×N` centering operator `I − 1γ'`.
pub fn centering_matrix(g: &CenteringVector) -> DMatrix<f64> {
    let n = g.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - g.as_vector()[j])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianResult {
    pub gamma: CenteringVector,
    /// Point indices removed at each peeling stage, in order.
    pub peel_stages: Vec<Vec<usize>>,
    /// Innermost hull: all extreme, pairwise distinct, equally weighted.
    pub final_hull: Vec<usize>,
}

/// Peels convex hulls until the remaining points are all extreme and pairwise
/// distinct, then weights those equally.
///
/// At each stage every extreme point is removed, except that a location held
/// by several coincident copies loses only its lowest-indexed copy.
pub fn affine_median_gamma(c: &Configuration) -> Result<MedianResult> {
    let n = c.n_points();
    let rep = coincidence_representatives(c);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut peel_stages = Vec::new();

    loop {
        let flags = hull::vertex_flags_among(c, &remaining, &rep)?;
        let mut seen = std::collections::HashMap::new();
        for &i in &remaining {
            *seen.entry(rep[i]).or_insert(0usize) += 1;
        }
        let distinct = seen.values().all(|&k| k == 1);
        if distinct && flags.iter().all(|&f| f) {
            break;
        }

        let mut removed = Vec::new();
        let mut taken_from = std::collections::HashSet::new();
        for (&i, &extreme) in remaining.iter().zip(&flags) {
            if !extreme {
                continue;
            }
            if seen[&rep[i]] > 1 {
                if taken_from.insert(rep[i]) {
                    removed.push(i);
                }
            } else {
                removed.push(i);
            }
        }
        debug_assert!(!removed.is_empty());
        remaining.retain(|i| !removed.contains(i));
        peel_stages.push(removed);
    }

    let w = 1.0 / remaining.len() as f64;
    let mut gamma = DVector::zeros(n);
    for &i in &remaining {
        gamma[i] = w;
    }
    Ok(MedianResult { gamma: CenteringVector(gamma), peel_stages, final_hull: remaining })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(rows: &[[f64; 2]]) -> Configuration {
        Configuration::from_rows(rows).unwrap()
    }

    fn random_gamma(rng: &mut ChaCha8Rng, n: usize) -> CenteringVector {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s: f64 = v.iter().sum();
        // shift so the entries sum to one
        let shift = (1.0 - s) / n as f64;
        v.iter_mut().for_each(|x| *x += shift);
        let s: f64 = v.iter().sum();
        v[0] += 1.0 - s;
        CenteringVector::new(v).unwrap()
    }

    #[test]
    fn mean_gamma_entries() {
        assert_eq!(mean_gamma(4).unwrap().as_slice(), &[0.25; 4]);
        assert_eq!(mean_gamma(1).unwrap().as_slice(), &[1.0]);
        let s: f64 = mean_gamma(1000).unwrap().as_slice().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(mean_gamma(0).is_err());
    }

    #[test]
    fn point_gamma_entries() {
        assert_eq!(point_gamma(3, 0).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(point_gamma(3, 2).unwrap().as_slice(), &[0.0, 0.0, 1.0]);
        assert!(matches!(point_gamma(3, 3), Err(Error::Input(_))));
    }

    #[test]
    fn centering_vector_must_sum_to_one() {
        assert!(CenteringVector::new(vec![0.5, 0.4]).is_err());
        assert!(CenteringVector::new(vec![2.0, -1.0]).is_ok());
        assert!(serde_json::from_str::<CenteringVector>("[0.5,0.6]").is_err());
    }

    #[test]
    fn center_examples() {
        let x = cfg(&[[1.0, 1.0], [3.0, 3.0]]);
        let m = center(&x, &mean_gamma(2).unwrap()).unwrap();
        assert_eq!(m.coords(), &DMatrix::from_row_slice(2, 2, &[-1.0, -1.0, 1.0, 1.0]));
        let p = center(&x, &point_gamma(2, 0).unwrap()).unwrap();
        assert_eq!(p.coords(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 2.0]));
        assert!(center(&x, &mean_gamma(3).unwrap()).is_err());
    }

    #[test]
    fn point_centering_zeroes_that_row() {
        let x = cfg(&[[1.0, 5.0], [3.0, -2.0], [0.5, 0.25]]);
        for i in 0..3 {
            let y = center(&x, &point_gamma(3, i).unwrap()).unwrap();
            assert_eq!(y.coords().row(i).amax(), 0.0);
        }
    }

    #[test]
    fn composition_and_idempotency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.random_range(1..9);
            let x = Configuration::new(DMatrix::from_fn(n, 3, |_, _| rng.random_range(-5.0..5.0))).unwrap();
            let (g1, g2) = (random_gamma(&mut rng, n), random_gamma(&mut rng, n));
            let twice = center(&center(&x, &g1).unwrap(), &g2).unwrap();
            let once = center(&x, &g2).unwrap();
            assert!((twice.coords() - once.coords()).amax() < 1e-12 * (1.0 + x.coords().amax()));

            let prod = centering_matrix(&g2) * centering_matrix(&g1);
            assert!((prod - centering_matrix(&g2)).amax() < 1e-12);

            let again = center(&once, &g2).unwrap();
            assert!((again.coords() - once.coords()).amax() < 1e-12 * (1.0 + x.coords().amax()));

            let weighted_mean = g2.as_vector().transpose() * once.coords();
            assert!(weighted_mean.amax() < 1e-12 * (1.0 + x.coords().amax()));
        }
    }

    #[test]
    fn median_of_triangle() {
        let m = affine_median_gamma(&cfg(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_eq!(m.gamma.as_slice(), &[1.0 / 3.0; 3]);
        assert!(m.peel_stages.is_empty());
        assert_eq!(m.final_hull, vec![0, 1, 2]);
    }

    #[test]
    fn median_of_square_with_center() {
        let m = affine_median_gamma(&cfg(&[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0]])).unwrap();
        assert_eq!(m.gamma.as_slice(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(m.peel_stages, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn median_of_coincident_copies_keeps_one() {
        let m = affine_median_gamma(&cfg(&[[1.0, 1.0]; 4])).unwrap();
        assert_eq!(m.final_hull, vec![3]);
        assert_eq!(m.peel_stages, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(m.gamma.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn median_of_collinear_points() {
        let m = affine_median_gamma(&cfg(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]])).unwrap();
        assert_eq!(m.final_hull, vec![2]);
        assert_eq!(m.peel_stages, vec![vec![0, 4], vec![1, 3]]);
    }

    #[test]
    fn median_with_duplicated_hull_point() {
        // corner (0,0) held three times; only one copy leaves per stage
        let m = affine_median_gamma(&cfg(&[
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [6.0, 0.0],
            [0.0, 6.0],
            [1.0, 1.0],
        ]))
        .unwrap();
        // stage 2: {(0,0)x2, (1,1)} are all extreme; (1,1) goes with one copy
        assert_eq!(m.peel_stages, vec![vec![0, 3, 4], vec![1, 5]]);
        assert_eq!(m.final_hull, vec![2]);
        assert_eq!(m.gamma.as_slice(), &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_point_median() {
        let m = affine_median_gamma(&cfg(&[[2.0, 3.0]])).unwrap();
        assert_eq!(m.gamma.as_slice(), &[1.0]);
    }
}
