//! Dense helpers shared by the decomposition-based modules.

use nalgebra::{DMatrix, DVector};

/// Thin SVD with singular values sorted in descending order.
pub(crate) struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    SortedSvd {
        u: DMatrix::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]),
        singular_values: DVector::from_fn(order.len(), |k, _| s[order[k]]),
        v_t: DMatrix::from_fn(order.len(), v_t.ncols(), |k, j| v_t[(order[k], j)]),
    }
}

/// Whether column `j` must be negated so that its largest-magnitude entry is
/// positive. Magnitudes within a relative 1e-12 of the maximum count as tied,
/// and ties go to the lowest row index.
pub(crate) fn needs_flip(m: &DMatrix<f64>, j: usize) -> bool {
    let col = m.column(j);
    let top = col.amax();
    col.iter()
        .find(|v| v.abs() >= top * (1.0 - 1e-12))
        .is_some_and(|v| *v < 0.0)
}

/// Applies the largest-entry-positive sign rule to each column of `m`,
/// negating the matching row of `partner` alongside.
pub(crate) fn fix_column_signs(m: &mut DMatrix<f64>, mut partner: Option<&mut DMatrix<f64>>) {
    for j in 0..m.ncols() {
        if needs_flip(m, j) {
            m.column_mut(j).neg_mut();
            if let Some(p) = partner.as_deref_mut() {
                p.row_mut(j).neg_mut();
            }
        }
    }
}

pub(crate) fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}
