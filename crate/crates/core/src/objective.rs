//! The origin-centric discrepancy between squared-distance matrices.
//!
//! For `Z = HB` the objective is `Σᵢⱼ (d²ᵢⱼ(H) − d²ᵢⱼ(Z))²`, summed over all
//! ordered pairs. With `E = HH' − ZZ'` and `ρ = diag(E)` it decomposes as
//!
//! ```text
//! 4‖E‖² + 2(ρ'1)² + 2Nρ'ρ − 8ρ'E1
//! ```
//!
//! The last (cross) term vanishes whenever `1'H = 0`, i.e. under mean
//! centering; for any other origin it must be kept.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pairwise_sq, SquaredDistances};
use crate::linalg::frobenius_sq;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Discrepancies in squared distance from the origin, `d0(X) − d0(Z)`.
    pub rho: DVector<f64>,
    /// `4‖XX' − ZZ'‖²`
    pub gram_term: f64,
    /// `2(ρ'1)²`
    pub rho_sum_term: f64,
    /// `2Nρ'ρ`
    pub rho_quad_term: f64,
    /// `−8ρ'(XX' − ZZ')1`
    pub cross_term: f64,
}

impl Decomposition {
    pub fn total(&self) -> f64 {
        self.gram_term + self.rho_sum_term + self.rho_quad_term + self.cross_term
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    /// Sum over all ordered pairs `(i, j)`.
    pub value: f64,
    pub decomposition: Option<Decomposition>,
}

impl ObjectiveValue {
    /// Sum over unordered pairs `i < j`, i.e. half of `value`.
    pub fn pair_sum(&self) -> f64 {
        self.value / 2.0
    }
}

/// `Σᵢⱼ wᵢwⱼ (dxᵢⱼ − dzᵢⱼ)²`. Without weights every `wᵢ` is 1.
pub fn norm2_direct(dx: &SquaredDistances, dz: &SquaredDistances, w: Option<&[f64]>) -> Result<ObjectiveValue> {
    let n = dx.n();
    if dz.n() != n {
        return Err(Error::input(format!("distance matrices are {n}x{n} and {}x{}", dz.n(), dz.n())));
    }
    if let Some(w) = w {
        if w.len() != n {
            return Err(Error::input(format!("{} weights for {n} points", w.len())));
        }
    }
    let weight = |i: usize| w.map_or(1.0, |w| w[i]);
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            let r = dx.get(i, j) - dz.get(i, j);
            row += weight(j) * r * r;
        }
        total += weight(i) * row;
    }
    Ok(ObjectiveValue { value: 2.0 * total, decomposition: None })
}

fn check_shapes(h: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if h.ncols() != b.nrows() {
        return Err(Error::input(format!(
            "H is {}x{} but B is {}x{}",
            h.nrows(),
            h.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// `ρᵢ = hᵢ'hᵢ − hᵢ'BB'hᵢ`.
pub fn rho(h: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_shapes(h, b)?;
    let z = h * b;
    Ok(DVector::from_fn(h.nrows(), |i, _| h.row(i).norm_squared() - z.row(i).norm_squared()))
}

/// Closed form of the unweighted objective, with all four terms reported.
pub fn norm2_closed(h: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<ObjectiveValue> {
    check_shapes(h, b)?;
    let z = h * b;
    let e = h * h.transpose() - &z * z.transpose();
    let rho = e.diagonal();
    let n = h.nrows() as f64;
    let rho_sum = rho.sum();
    let e_row_sums = DVector::from_fn(e.nrows(), |i, _| e.row(i).sum());
    let decomposition = Decomposition {
        gram_term: 4.0 * frobenius_sq(&e),
        rho_sum_term: 2.0 * rho_sum * rho_sum,
        rho_quad_term: 2.0 * n * rho.norm_squared(),
        cross_term: -8.0 * rho.dot(&e_row_sums),
        rho,
    };
    Ok(ObjectiveValue { value: decomposition.total(), decomposition: Some(decomposition) })
}

/// Gradient of the unweighted objective with respect to the entries of `B`.
pub fn gradient_norm2(h: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_shapes(h, b)?;
    Ok(ReductionObjective::new(h.clone(), None)?.gradient(b))
}

/// The objective as a function of `B` for a fixed `H`, with the target
/// distances precomputed. Evaluation is `O(N²q)`.
#[derive(Clone, Debug)]
pub struct ReductionObjective {
    h: DMatrix<f64>,
    dx: SquaredDistances,
    weights: Option<DVector<f64>>,
}

impl ReductionObjective {
    pub fn new(h: DMatrix<f64>, weights: Option<&[f64]>) -> Result<Self> {
        if let Some(w) = weights {
            if w.len() != h.nrows() {
                return Err(Error::input(format!("{} weights for {} points", w.len(), h.nrows())));
            }
        }
        let dx = pairwise_sq(&h);
        Ok(ReductionObjective { h, dx, weights: weights.map(DVector::from_column_slice) })
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.h.ncols()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_ref().map(|w| w.as_slice())
    }

    pub fn value(&self, b: &DMatrix<f64>) -> f64 {
        let z = &self.h * b;
        let dz = pairwise_sq(&z);
        norm2_direct(&self.dx, &dz, self.weights()).expect("shapes agree").value
    }

    pub fn gradient(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.value_and_gradient(b).1
    }

    /// With `R = Dx − Dz`, `M = (wwᵀ)∘R` and its Laplacian
    /// `L = diag(M1) − M`, the gradient is `−8 H'LZ`.
    pub fn value_and_gradient(&self, b: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let n = self.h.nrows();
        let z = &self.h * b;
        let dz = pairwise_sq(&z);
        let weight = |i: usize| self.weights.as_ref().map_or(1.0, |w| w[i]);
        let mut lap = DMatrix::zeros(n, n);
        let mut total = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let r = self.dx.get(i, j) - dz.get(i, j);
                let m = weight(i) * weight(j) * r;
                total += m * r;
                lap[(i, j)] = -m;
                lap[(j, i)] = -m;
                lap[(i, i)] += m;
                lap[(j, j)] += m;
            }
        }
        let grad = self.h.transpose() * (lap * z) * -8.0;
        (2.0 * total, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centering::{center, point_gamma};
    use crate::config::Configuration;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hexagon_h() -> DMatrix<f64> {
        let r = 1.0 / 3f64.sqrt();
        DMatrix::from_fn(6, 2, |k, j| {
            let a = k as f64 * std::f64::consts::PI / 3.0;
            r * if j == 0 { a.cos() } else { a.sin() }
        })
    }

    fn d2(rows: &[[f64; 1]]) -> SquaredDistances {
        pairwise_sq(&DMatrix::from_fn(rows.len(), 1, |i, _| rows[i][0]))
    }

    fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, r: usize, center_mean: bool) -> DMatrix<f64> {
        let mut x = DMatrix::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0));
        if center_mean {
            let mean = x.row_mean();
            for mut row in x.row_iter_mut() {
                row -= &mean;
            }
        }
        x.qr().q().columns(0, r).into_owned()
    }

    #[test]
    fn identical_distances_give_zero() {
        let d = d2(&[[0.0], [1.0], [3.0]]);
        assert_eq!(norm2_direct(&d, &d, None).unwrap().value, 0.0);
    }

    #[test]
    fn two_point_example() {
        let dx = d2(&[[0.0], [2.0]]);
        let dz = d2(&[[0.0], [1.0]]);
        assert_eq!(norm2_direct(&dx, &dz, None).unwrap().value, 18.0);
        assert_eq!(norm2_direct(&dx, &dz, None).unwrap().pair_sum(), 9.0);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(norm2_direct(&d2(&[[0.0], [1.0]]), &d2(&[[0.0]]), None).is_err());
        assert!(norm2_direct(&d2(&[[0.0], [1.0]]), &d2(&[[0.0], [1.0]]), Some(&[1.0])).is_err());
        let h = DMatrix::zeros(3, 2);
        assert!(rho(&h, &DMatrix::zeros(3, 1)).is_err());
        assert!(norm2_closed(&h, &DMatrix::zeros(1, 1)).is_err());
        assert!(gradient_norm2(&h, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn hexagon_zero_map_two_ways() {
        let h = hexagon_h();
        let b = DMatrix::zeros(2, 1);
        let direct = norm2_direct(&pairwise_sq(&h), &pairwise_sq(&(&h * &b)), None).unwrap();
        let closed = norm2_closed(&h, &b).unwrap();
        assert_relative_eq!(direct.value, closed.value, max_relative = 1e-10);
        // Σᵢⱼ d²ᵢⱼ² over the hexagon: 6·(2·(1/3)² + 2·1² + (4/3)²)
        assert_relative_eq!(direct.value, 6.0 * (2.0 / 9.0 + 2.0 + 16.0 / 9.0), max_relative = 1e-14);
    }

    #[test]
    fn rho_examples() {
        let h = hexagon_h();
        let rot = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        assert!(rho(&h, &rot).unwrap().amax() < 1e-15);
        let r0 = rho(&h, &DMatrix::zeros(2, 1)).unwrap();
        for v in r0.iter() {
            assert_relative_eq!(*v, 1.0 / 3.0, epsilon = 1e-15);
        }
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let r = rho(&h, &b).unwrap();
        for i in 0..6 {
            assert_relative_eq!(r[i], 1.0 / 3.0 - h[(i, 0)].powi(2), epsilon = 1e-15);
        }
    }

    #[test]
    fn orthogonal_b_zeroes_every_term() {
        let h = hexagon_h();
        let rot = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let v = norm2_closed(&h, &rot).unwrap();
        let d = v.decomposition.unwrap();
        for t in [d.gram_term, d.rho_sum_term, d.rho_quad_term, d.cross_term] {
            assert!(t.abs() < 1e-28);
        }
    }

    #[test]
    fn closed_form_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..20 {
            let (n, r, q) = (rng.random_range(3..12), rng.random_range(2..5), 1);
            let r = r.min(n - 1);
            let b = DMatrix::from_fn(r, q, |_, _| rng.random_range(-1.5..1.5));

            let h = random_orthonormal(&mut rng, n, r, true);
            let closed = norm2_closed(&h, &b).unwrap();
            let direct = norm2_direct(&pairwise_sq(&h), &pairwise_sq(&(&h * &b)), None).unwrap();
            assert_relative_eq!(closed.value, direct.value, max_relative = 1e-10);
            assert!(closed.decomposition.unwrap().cross_term.abs() < 1e-10, "trial {trial}");

            // point-centered H: canonical form of a point-centered scatter
            let x = Configuration::new(DMatrix::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0))).unwrap();
            let y = center(&x, &point_gamma(n, 0).unwrap()).unwrap();
            let hp = y.coords().clone().svd(true, false).u.unwrap().columns(0, r).into_owned();
            let closed = norm2_closed(&hp, &b).unwrap();
            let direct = norm2_direct(&pairwise_sq(&hp), &pairwise_sq(&(&hp * &b)), None).unwrap();
            assert_relative_eq!(closed.value, direct.value, max_relative = 1e-10);
        }
    }

    #[test]
    fn unit_weights_equal_unweighted() {
        let h = hexagon_h();
        let b = DMatrix::from_column_slice(2, 1, &[0.3, 0.9]);
        let plain = ReductionObjective::new(h.clone(), None).unwrap();
        let unit = ReductionObjective::new(h, Some(&[1.0; 6])).unwrap();
        assert_eq!(plain.value(&b), unit.value(&b));
        assert_eq!(plain.gradient(&b), unit.gradient(&b));
    }

    #[test]
    fn weights_multiply_pair_terms() {
        let dx = d2(&[[0.0], [2.0], [5.0]]);
        let dz = d2(&[[0.0], [1.0], [3.0]]);
        let w = [2.0, 1.0, 3.0];
        let mut expected = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                expected += w[i] * w[j] * (dx.get(i, j) - dz.get(i, j)).powi(2);
            }
        }
        assert_relative_eq!(norm2_direct(&dx, &dz, Some(&w)).unwrap().value, expected, max_relative = 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_zero_and_at_orthogonal_b() {
        let h = hexagon_h();
        assert_eq!(gradient_norm2(&h, &DMatrix::zeros(2, 1)).unwrap().amax(), 0.0);
        let rot = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        assert!(gradient_norm2(&h, &rot).unwrap().amax() < 1e-14);
    }

    #[test]
    fn value_and_gradient_agree_with_value() {
        let h = hexagon_h();
        let obj = ReductionObjective::new(h, Some(&[1.0, 2.0, 1.0, 0.5, 1.0, 3.0])).unwrap();
        let b = DMatrix::from_column_slice(2, 1, &[0.4, -0.7]);
        assert_relative_eq!(obj.value_and_gradient(&b).0, obj.value(&b), max_relative = 1e-14);
    }
}
