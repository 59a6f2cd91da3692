use nalgebra::{DMatrix, DVector};

/// Lawson–Hanson active-set solver for `min ‖Ax − b‖ subject to x ≥ 0`.
///
/// Returns `None` if the iteration budget is exhausted.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_outer: usize) -> Option<DVector<f64>> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * (1.0 + a.amax() * b.amax());

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else {
            return Some(x);
        };
        passive[j] = true;

        // inner loop: restore feasibility of the passive set
        for _ in 0..=n {
            let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let z_p = solve_least_squares(a, &cols, b);
            let mut z = DVector::zeros(n);
            for (k, &c) in cols.iter().enumerate() {
                z[c] = z_p[k];
            }
            if cols.iter().all(|&c| z[c] > 0.0) {
                x = z;
                break;
            }
            let alpha = cols
                .iter()
                .filter(|&&c| z[c] <= 0.0)
                .map(|&c| x[c] / (x[c] - z[c]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for &c in &cols {
                if x[c] <= 1e-15 {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
        }
    }
    None
}

fn solve_least_squares(a: &DMatrix<f64>, cols: &[usize], b: &DVector<f64>) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    let svd = sub.svd(true, true);
    let eps = 1e-14 * svd.singular_values.max().max(f64::MIN_POSITIVE);
    svd.solve(b, eps).expect("u and v were computed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_optimum_when_feasible() {
        let a = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let x = nnls(&a, &b, 10).unwrap();
        assert!((x - b).norm() < 1e-14);
    }

    #[test]
    fn clamps_negative_components() {
        let a = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let x = nnls(&a, &b, 10).unwrap();
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn matches_known_solution() {
        // min ‖Ax − b‖, x ≥ 0; unconstrained solution has x1 < 0
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0, 1.0, 2.0]);
        let x = nnls(&a, &b, 10).unwrap();
        assert_eq!(x[0], 0.0);
        // with x0 = 0: minimize (x1 − 1)² + (x1 − 2)² → x1 = 1.5
        assert!((x[1] - 1.5).abs() < 1e-14);
    }
}
