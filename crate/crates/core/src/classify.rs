//! L1 and Mahalanobis nearest-neighbour decisions.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::{Cholesky, Matrix};
use crate::{Error, Result};

pub const DEFAULT_K: usize = 1;
/// Relative ridge added to the covariance before inversion.
pub const COVARIANCE_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    L1,
    #[default]
    Mahalanobis,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L1 => "l1",
            Metric::Mahalanobis => "mahalanobis",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "mahalanobis" => Ok(Metric::Mahalanobis),
            _ => Err(Error::InvalidArgument("metric must be l1 or mahalanobis")),
        }
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

/// `√((a−b)ᵀ Σ⁻¹ (a−b))`; rounding below zero is clamped.
pub fn mahalanobis_distance(a: &[f64], b: &[f64], cov_inverse: &Matrix) -> Result<f64> {
    same_len(a, b)?;
    let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(libm::sqrt(cov_inverse.quadratic_form(&delta)?.max(0.0)))
}

/// `Σ + r·I` with `r = ridge · trace/m`, or `r = ridge` for a zero trace.
pub fn regularized_covariance(covariance: &Matrix) -> Matrix {
    let m = covariance.rows();
    let tr = covariance.trace();
    let r = if m > 0 && tr > 0.0 {
        COVARIANCE_RIDGE * tr / m as f64
    } else {
        COVARIANCE_RIDGE
    };
    covariance.shifted(r)
}

/// Labelled reference points for k-NN queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
    metric: Metric,
    covariance: Option<Matrix>,
    cov_inverse: Option<Matrix>,
    k: usize,
}

impl Gallery {
    fn check(points: &[Vec<f64>], labels: &[usize], k: usize) -> Result<usize> {
        let dim = points.first().ok_or(Error::Empty)?.len();
        if labels.len() != points.len() {
            return Err(Error::Dimension {
                expected: points.len(),
                actual: labels.len(),
            });
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                actual: p.len(),
            });
        }
        if k == 0 || k > points.len() {
            return Err(Error::InvalidArgument("k must be between 1 and the gallery size"));
        }
        Ok(dim)
    }

    pub fn l1(points: Vec<Vec<f64>>, labels: Vec<usize>, k: usize) -> Result<Self> {
        Self::check(&points, &labels, k)?;
        Ok(Gallery {
            points,
            labels,
            metric: Metric::L1,
            covariance: None,
            cov_inverse: None,
            k,
        })
    }

    /// `covariance` is regularized with [`regularized_covariance`] before
    /// inversion; failure to factor it is reported here.
    pub fn mahalanobis(points: Vec<Vec<f64>>, labels: Vec<usize>, covariance: Matrix, k: usize) -> Result<Self> {
        let dim = Self::check(&points, &labels, k)?;
        if covariance.rows() != dim || covariance.cols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: covariance.rows(),
            });
        }
        let inverse = Cholesky::new(&regularized_covariance(&covariance))?.inverse();
        Ok(Gallery {
            points,
            labels,
            metric: Metric::Mahalanobis,
            covariance: Some(covariance),
            cov_inverse: Some(inverse),
            k,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn covariance(&self) -> Option<&Matrix> {
        self.covariance.as_ref()
    }

    pub fn cov_inverse(&self) -> Option<&Matrix> {
        self.cov_inverse.as_ref()
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match &self.cov_inverse {
            Some(inv) => mahalanobis_distance(a, b, inv),
            None => l1_distance(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Position in the gallery.
    pub index: usize,
    pub label: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub label: usize,
    /// The k nearest points, closest first.
    pub neighbors: Vec<Neighbor>,
}

impl Decision {
    /// Distance to the closest neighbour carrying the decided label.
    pub fn distance(&self) -> f64 {
        self.neighbors
            .iter()
            .find(|n| n.label == self.label)
            .map_or(f64::INFINITY, |n| n.distance)
    }
}

/// Majority vote over the `k` nearest gallery points. Equal distances keep
/// gallery order; tied votes go to the smallest label.
pub fn knn_classify(gallery: &Gallery, query: &[f64]) -> Result<Decision> {
    if gallery.is_empty() {
        return Err(Error::Empty);
    }
    let mut all = Vec::with_capacity(gallery.len());
    for (index, (p, &label)) in gallery.points.iter().zip(&gallery.labels).enumerate() {
        let distance = gallery.distance(p, query)?;
        if distance.is_nan() {
            return Err(Error::NonFinite { index });
        }
        all.push(Neighbor { index, label, distance });
    }
    // stable sort keeps insertion order on ties
    all.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    all.truncate(gallery.k);
    let mut votes: Vec<(usize, usize)> = Vec::new();
    for n in &all {
        match votes.iter_mut().find(|(l, _)| *l == n.label) {
            Some((_, c)) => *c += 1,
            None => votes.push((n.label, 1)),
        }
    }
    let label = votes
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|&(l, _)| l)
        .ok_or(Error::Empty)?;
    Ok(Decision { label, neighbors: all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_distance(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 3.0);
        assert_eq!(l1_distance(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        assert!(l1_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mahalanobis_examples() {
        let inv = Cholesky::new(&Matrix::diagonal(&[4.0, 1.0])).unwrap().inverse();
        let d = mahalanobis_distance(&[2.0, 0.0], &[0.0, 0.0], &inv).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let id = Matrix::identity(2);
        assert_eq!(mahalanobis_distance(&[3.0, 4.0], &[0.0, 0.0], &id).unwrap(), 5.0);
        assert_eq!(mahalanobis_distance(&[3.0, 4.0], &[3.0, 4.0], &id).unwrap(), 0.0);
    }

    #[test]
    fn nearest_of_two() {
        let g = Gallery::l1(vec![vec![0.0], vec![10.0]], vec![0, 1], 1).unwrap();
        assert_eq!(knn_classify(&g, &[1.0]).unwrap().label, 0);
        assert_eq!(knn_classify(&g, &[10.0]).unwrap().label, 1);
        assert_eq!(knn_classify(&g, &[10.0]).unwrap().distance(), 0.0);
        assert!(knn_classify(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ties_follow_the_documented_order() {
        // equidistant: the first inserted point wins
        let g = Gallery::l1(vec![vec![2.0], vec![0.0]], vec![3, 1], 1).unwrap();
        assert_eq!(knn_classify(&g, &[1.0]).unwrap().label, 3);
        // one vote each: the smaller label wins
        let g = Gallery::l1(vec![vec![0.0], vec![3.0]], vec![5, 2], 2).unwrap();
        assert_eq!(knn_classify(&g, &[1.0]).unwrap().label, 2);
        // majority beats proximity
        let g = Gallery::l1(vec![vec![0.0], vec![2.0], vec![2.5]], vec![0, 1, 1], 3).unwrap();
        assert_eq!(knn_classify(&g, &[0.1]).unwrap().label, 1);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Gallery::l1(vec![], vec![], 1), Err(Error::Empty));
        assert!(Gallery::l1(vec![vec![0.0]], vec![0], 2).is_err());
        assert!(Gallery::l1(vec![vec![0.0]], vec![0], 0).is_err());
        let bad = Matrix::new(1, 1, vec![-1.0]).unwrap();
        assert_eq!(
            Gallery::mahalanobis(vec![vec![0.0]], vec![0], bad, 1),
            Err(Error::NotPositiveDefinite)
        );
        // a zero covariance falls back to the absolute ridge
        let g = Gallery::mahalanobis(vec![vec![0.0]], vec![0], Matrix::zeros(1, 1), 1).unwrap();
        assert!(g.cov_inverse().unwrap().get(0, 0) > 0.0);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::L1, Metric::Mahalanobis] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert!("cosine".parse::<Metric>().is_err());
    }
}
