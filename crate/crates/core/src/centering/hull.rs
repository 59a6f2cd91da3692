use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::nnls::nnls;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geometry::coincidence_representatives;

/// Normalized residual below which a point counts as a convex combination.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Flags the extreme points of the scatter.
///
/// Point `i` is flagged when it is not a convex combination of the other
/// distinct locations. Copies of one location are tested together and share a
/// flag, so a scatter of identical points is flagged everywhere.
pub fn hull_vertex_flags(c: &Configuration) -> Result<Vec<bool>> {
    let rep = coincidence_representatives(c);
    let all: Vec<usize> = (0..c.n_points()).collect();
    vertex_flags_among(c, &all, &rep)
}

/// Extreme-point flags for the rows `subset` of `c`, using a coincidence
/// grouping computed once on the full scatter.
pub(crate) fn vertex_flags_among(c: &Configuration, subset: &[usize], rep: &[usize]) -> Result<Vec<bool>> {
    let x = c.coords();
    subset
        .par_iter()
        .map(|&i| {
            let others: Vec<usize> = subset.iter().copied().filter(|&j| rep[j] != rep[i]).collect();
            if others.is_empty() {
                return Ok(true);
            }
            is_extreme(x, i, &others)
        })
        .collect()
}

/// Solves `min ‖Σ λj (xj − xi)‖² + s²(Σ λj − 1)²` over `λ ≥ 0`; the point is
/// interior iff the minimum is (numerically) zero. Coordinates are rescaled so
/// the tolerance is relative to the spread of the others around `xi`.
fn is_extreme(x: &DMatrix<f64>, i: usize, others: &[usize]) -> Result<bool> {
    let p = x.ncols();
    let scale = others
        .iter()
        .map(|&j| (x.row(j) - x.row(i)).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(true);
    }
    let a = DMatrix::from_fn(p + 1, others.len(), |r, k| {
        if r < p {
            (x[(others[k], r)] - x[(i, r)]) / scale
        } else {
            1.0
        }
    });
    let mut b = DVector::zeros(p + 1);
    b[p] = 1.0;
    let lambda = nnls(&a, &b, 3 * others.len() + 10).ok_or_else(|| Error::Solver {
        point: i,
        message: "iteration budget exhausted".into(),
    })?;
    let residual = (a * lambda - b).norm();
    if !residual.is_finite() {
        return Err(Error::Solver { point: i, message: "non-finite residual".into() });
    }
    Ok(residual > FEASIBILITY_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(rows: &[[f64; 2]]) -> Vec<bool> {
        hull_vertex_flags(&Configuration::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn square_with_center() {
        let f = flags(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(f, vec![true, true, true, true, false]);
    }

    #[test]
    fn collinear_midpoint_is_interior() {
        let f = flags(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(f, vec![true, false, true]);
    }

    #[test]
    fn coincident_points_are_all_extreme() {
        assert_eq!(flags(&[[1.0, 2.0]; 4]), vec![true; 4]);
        assert_eq!(flags(&[[3.0, 3.0]]), vec![true]);
    }

    #[test]
    fn copies_of_a_corner_share_its_flag() {
        let f = flags(&[[0.0, 0.0], [0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [1.0, 1.0]]);
        assert_eq!(f, vec![true, true, true, true, false]);
    }

    #[test]
    fn point_on_an_edge_is_not_a_vertex() {
        let f = flags(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, 0.0]]);
        assert_eq!(f, vec![true, true, true, false]);
    }

    #[test]
    fn works_in_three_dimensions() {
        let c = Configuration::from_rows(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.2, 0.2, 0.2],
        ])
        .unwrap();
        assert_eq!(hull_vertex_flags(&c).unwrap(), vec![true, true, true, true, false]);
    }
}
