use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labeled point scatter: `N` rows of `p` finite coordinates, with optional
/// per-point labels and positive multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    coords: DMatrix<f64>,
    labels: Option<Vec<String>>,
    weights: Option<Vec<f64>>,
}

impl Configuration {
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() == 0 || coords.ncols() == 0 {
            return Err(Error::input(format!(
                "configuration must have at least one point and one coordinate, got {}x{}",
                coords.nrows(),
                coords.ncols()
            )));
        }
        if let Some((k, v)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            let (i, j) = (k % coords.nrows(), k / coords.nrows());
            return Err(Error::input(format!("non-finite coordinate {v} at row {i}, column {j}")));
        }
        Ok(Configuration { coords, labels: None, weights: None })
    }

    /// Builds a configuration from row slices. All rows must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != p) {
            return Err(Error::input(format!("row {bad} has {} entries, expected {p}", rows[bad].as_ref().len())));
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i].as_ref()[j]))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_points() {
            return Err(Error::input(format!("{} labels for {} points", labels.len(), self.n_points())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n_points() {
            return Err(Error::input(format!("{} weights for {} points", weights.len(), self.n_points())));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::input(format!("weight {} at point {i} is not strictly positive", weights[i])));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn n_points(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of point `i`; unlabeled points are named by their 1-based index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn all_labels(&self) -> Vec<String> {
        (0..self.n_points()).map(|i| self.label(i)).collect()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Same labels and weights, new coordinates (row count must match).
    pub(crate) fn with_coords(&self, coords: DMatrix<f64>) -> Configuration {
        debug_assert_eq!(coords.nrows(), self.n_points());
        Configuration { coords, labels: self.labels.clone(), weights: self.weights.clone() }
    }

    /// Sub-configuration made of the listed rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Configuration {
        let coords = DMatrix::from_fn(rows.len(), self.dim(), |i, j| self.coords[(rows[i], j)]);
        Configuration {
            coords,
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
            weights: self.weights.as_ref().map(|w| rows.iter().map(|&i| w[i]).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = Configuration::from_rows(&[[0.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(Configuration::from_rows(&[[f64::INFINITY]]).is_err());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        let empty: [[f64; 0]; 0] = [];
        assert!(Configuration::from_rows(&empty).is_err());
        assert!(Configuration::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        let c = Configuration::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(c.clone().with_weights(vec![1.0, 0.0]).is_err());
        assert!(c.clone().with_weights(vec![1.0]).is_err());
        assert_eq!(c.with_weights(vec![2.0, 0.5]).unwrap().weight(0), 2.0);
    }

    #[test]
    fn default_labels_are_one_based() {
        let c = Configuration::from_rows(&[[1.0], [2.0]]).unwrap();
        assert_eq!(c.all_labels(), vec!["1", "2"]);
    }
}
