//! Scatter matrices and regularized LDA.
//!
//! The generalized problem `S_B w = λ (S_W + μI) w` is reduced to a
//! symmetric one through the Cholesky factor `L` of `S_W + μI`:
//! `L⁻¹ S_B L⁻ᵀ y = λ y`, `w = L⁻ᵀ y`. Unit `y` gives
//! `wᵀ(S_W + μI)w = 1` for free.

use alloc::vec;
use alloc::vec::Vec;

use crate::feature::{Extractor, FeatureVector};
use crate::linalg::{symmetric_eigen, Cholesky, Matrix};
use crate::{Error, Result};

pub const DEFAULT_MU_SCALE: f64 = 1e-3;
/// Guards the relative-error denominator in [`class_constancy`].
pub const CONSTANCY_EPS: f64 = 1e-12;
/// Total-scatter eigenvalues below this fraction of the largest one are
/// treated as zero by the PCA pre-projection.
const PCA_RANK_TOL: f64 = 1e-10;

/// Feature vectors of one dimension with class labels in `[0, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    features: Vec<FeatureVector>,
    labels: Vec<usize>,
    classes: usize,
}

impl LabeledFeatures {
    /// `c` is taken as `max(label) + 1`; every class below it must occur.
    pub fn new(features: Vec<FeatureVector>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Dimension {
                expected: features.len(),
                actual: labels.len(),
            });
        }
        let d = features.first().ok_or(Error::Empty)?.len();
        if d == 0 {
            return Err(Error::InvalidArgument("feature dimension must be at least 1"));
        }
        for (k, f) in features.iter().enumerate() {
            if f.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    actual: f.len(),
                });
            }
            if let Some(i) = f.values().iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index: k * d + i });
            }
        }
        let classes = labels.iter().max().map_or(0, |&l| l + 1);
        let mut seen = vec![false; classes];
        for &l in &labels {
            seen[l] = true;
        }
        if seen.contains(&false) {
            return Err(Error::InvalidArgument("every class index below the largest must occur"));
        }
        Ok(LabeledFeatures {
            features,
            labels,
            classes,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        Self::new(rows.into_iter().map(FeatureVector::raw).collect(), labels)
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> + '_ {
        self.features.iter().zip(&self.labels).map(|(f, &l)| (f.values(), l))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPair {
    pub between: Matrix,
    pub within: Matrix,
    pub class_means: Vec<Vec<f64>>,
    pub global_mean: Vec<f64>,
    pub class_counts: Vec<usize>,
}

impl ScatterPair {
    pub fn dim(&self) -> usize {
        self.global_mean.len()
    }

    pub fn classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn samples(&self) -> usize {
        self.class_counts.iter().sum()
    }
}

fn symmetrize(m: &mut Matrix) {
    for i in 0..m.rows() {
        for j in 0..i {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scatter_matrices(data: &LabeledFeatures) -> Result<ScatterPair> {
    let (d, c) = (data.dim(), data.classes());
    let mut sums = vec![vec![0.0; d]; c];
    let mut counts = vec![0usize; c];
    for (x, l) in data.iter() {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    let class_means: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &n)| s.into_iter().map(|v| v / n as f64).collect())
        .collect();
    let n = data.len() as f64;
    let global_mean: Vec<f64> = (0..d)
        .map(|j| {
            class_means
                .iter()
                .zip(&counts)
                .map(|(m, &k)| m[j] * k as f64)
                .sum::<f64>()
                / n
        })
        .collect();

    let mut between = Matrix::zeros(d, d);
    for (m, &k) in class_means.iter().zip(&counts) {
        between.add_outer(&diff(m, &global_mean), k as f64);
    }
    let mut within = Matrix::zeros(d, d);
    for (x, l) in data.iter() {
        within.add_outer(&diff(x, &class_means[l]), 1.0);
    }
    symmetrize(&mut between);
    symmetrize(&mut within);
    Ok(ScatterPair {
        between,
        within,
        class_means,
        global_mean,
        class_counts: counts,
    })
}

/// A fitted discriminant subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    w: Matrix,
    eigenvalues: Vec<f64>,
    projected_means: Vec<Vec<f64>>,
    pooled_covariance: Matrix,
    mu_reg: f64,
}

impl LdaModel {
    /// Reassembles a model, e.g. after deserialization.
    pub fn from_parts(
        w: Matrix,
        eigenvalues: Vec<f64>,
        projected_means: Vec<Vec<f64>>,
        pooled_covariance: Matrix,
        mu_reg: f64,
    ) -> Result<Self> {
        let m = w.cols();
        let c = projected_means.len();
        if eigenvalues.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: eigenvalues.len(),
            });
        }
        if let Some(bad) = projected_means.iter().find(|p| p.len() != m) {
            return Err(Error::Dimension {
                expected: m,
                actual: bad.len(),
            });
        }
        if pooled_covariance.rows() != m || pooled_covariance.cols() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: pooled_covariance.rows(),
            });
        }
        if c == 0 || m + 1 > c {
            return Err(Error::InvalidArgument("subspace dimension must not exceed classes - 1"));
        }
        if !(mu_reg > 0.0 && mu_reg.is_finite()) {
            return Err(Error::InvalidArgument("regularization constant must be positive"));
        }
        Ok(LdaModel {
            w,
            eigenvalues,
            projected_means,
            pooled_covariance,
            mu_reg,
        })
    }

    /// Input feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    /// Subspace dimension `m`.
    pub fn subspace_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn classes(&self) -> usize {
        self.projected_means.len()
    }

    /// `d × m`, one discriminant direction per column.
    pub fn projection(&self) -> &Matrix {
        &self.w
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projected_means(&self) -> &[Vec<f64>] {
        &self.projected_means
    }

    /// `Wᵀ S_W W / (N − c)`; `N − c` is floored at 1.
    pub fn pooled_covariance(&self) -> &Matrix {
        &self.pooled_covariance
    }

    pub fn mu_reg(&self) -> f64 {
        self.mu_reg
    }

    /// `Wᵀx`.
    pub fn project_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.w.tr_mul_vec(x)
    }
}

pub fn project(model: &LdaModel, x: &FeatureVector) -> Result<FeatureVector> {
    Ok(FeatureVector::new(
        model.project_values(x.values())?,
        Extractor::Lda {
            dim: model.subspace_dim(),
        },
    ))
}

fn check_fit_args(sp: &ScatterPair, mu_scale: f64, m: usize) -> Result<()> {
    if !(mu_scale > 0.0 && mu_scale.is_finite()) {
        return Err(Error::InvalidArgument("mu_scale must be positive and finite"));
    }
    if sp.classes() == 0 || m + 1 > sp.classes() {
        return Err(Error::InvalidArgument("subspace dimension must not exceed classes - 1"));
    }
    if m > sp.dim() {
        return Err(Error::InvalidArgument(
            "subspace dimension must not exceed the feature dimension",
        ));
    }
    Ok(())
}

fn regularization(within: &Matrix, mu_scale: f64) -> f64 {
    let tr = within.trace();
    if tr > 0.0 {
        mu_scale * tr / within.rows() as f64
    } else {
        mu_scale
    }
}

/// Every generalized eigenvalue with its `w` (columns), descending.
fn generalized_eigen(between: &Matrix, within: &Matrix, mu: f64) -> Result<(Vec<f64>, Matrix)> {
    let d = between.rows();
    let chol = Cholesky::new(&within.shifted(mu))?;
    // Y = L⁻¹ S_B, then C = L⁻¹ Yᵀ = L⁻¹ S_B L⁻ᵀ
    let mut y = Matrix::zeros(d, d);
    for j in 0..d {
        for (i, v) in chol.solve_lower(&between.column(j)).into_iter().enumerate() {
            y.set(i, j, v);
        }
    }
    let mut reduced = Matrix::zeros(d, d);
    for j in 0..d {
        for (i, v) in chol.solve_lower(y.row(j)).into_iter().enumerate() {
            reduced.set(i, j, v);
        }
    }
    symmetrize(&mut reduced);
    let eig = symmetric_eigen(&reduced)?;
    let mut w = Matrix::zeros(d, d);
    for j in 0..d {
        for (i, v) in chol.solve_upper(&eig.vectors.column(j)).into_iter().enumerate() {
            w.set(i, j, v);
        }
    }
    let values = eig.values.into_iter().map(|v| v.max(0.0)).collect();
    Ok((values, w))
}

/// All `d` generalized eigenvalues of the regularized problem, descending.
pub fn discriminant_spectrum(sp: &ScatterPair, mu_scale: f64) -> Result<Vec<f64>> {
    if !(mu_scale > 0.0 && mu_scale.is_finite()) {
        return Err(Error::InvalidArgument("mu_scale must be positive and finite"));
    }
    let mu = regularization(&sp.within, mu_scale);
    Ok(generalized_eigen(&sp.between, &sp.within, mu)?.0)
}

/// Flips each column so its largest-magnitude entry is positive.
fn canonical_signs(w: &mut Matrix) {
    for j in 0..w.cols() {
        let mut best = 0usize;
        for i in 1..w.rows() {
            if w.get(i, j).abs() > w.get(best, j).abs() {
                best = i;
            }
        }
        if w.rows() > 0 && w.get(best, j) < 0.0 {
            for i in 0..w.rows() {
                w.set(i, j, -w.get(i, j));
            }
        }
    }
}

fn finish_model(sp: &ScatterPair, mut w: Matrix, eigenvalues: Vec<f64>, mu_reg: f64) -> Result<LdaModel> {
    canonical_signs(&mut w);
    let projected_means = sp
        .class_means
        .iter()
        .map(|mu| w.tr_mul_vec(mu))
        .collect::<Result<Vec<_>>>()?;
    let dof = sp.samples().saturating_sub(sp.classes()).max(1) as f64;
    let mut pooled = w.transpose().matmul(&sp.within)?.matmul(&w)?.scaled(1.0 / dof);
    symmetrize(&mut pooled);
    Ok(LdaModel {
        w,
        eigenvalues,
        projected_means,
        pooled_covariance: pooled,
        mu_reg,
    })
}

fn leading(values: &[f64], vectors: &Matrix, m: usize) -> (Vec<f64>, Matrix) {
    let w = Matrix::from_fn(vectors.rows(), m, |i, j| vectors.get(i, j));
    (values[..m].to_vec(), w)
}

/// Regularized LDA keeping the `m` leading directions (`m ≤ c − 1`).
pub fn fit_lda(sp: &ScatterPair, mu_scale: f64, m: usize) -> Result<LdaModel> {
    check_fit_args(sp, mu_scale, m)?;
    let mu = regularization(&sp.within, mu_scale);
    let (values, vectors) = generalized_eigen(&sp.between, &sp.within, mu)?;
    let (values, w) = leading(&values, &vectors, m);
    finish_model(sp, w, values, mu)
}

/// Orthonormal basis (columns) of the range of the total scatter
/// `S_B + S_W`.
pub fn total_scatter_basis(sp: &ScatterPair) -> Result<Matrix> {
    let d = sp.dim();
    let total = Matrix::from_fn(d, d, |i, j| sp.between.get(i, j) + sp.within.get(i, j));
    let eig = symmetric_eigen(&total)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let rank = eig
        .values
        .iter()
        .take_while(|&&v| top > 0.0 && v > PCA_RANK_TOL * top)
        .count();
    Ok(Matrix::from_fn(d, rank, |i, j| eig.vectors.get(i, j)))
}

/// LDA after projecting onto the range of the total scatter. The returned
/// model still maps the original `d`-dimensional features.
pub fn fit_lda_pca(sp: &ScatterPair, mu_scale: f64, m: usize) -> Result<LdaModel> {
    check_fit_args(sp, mu_scale, m)?;
    let p = total_scatter_basis(sp)?;
    if m > p.cols() {
        return Err(Error::InvalidArgument(
            "subspace dimension exceeds the rank of the total scatter",
        ));
    }
    let pt = p.transpose();
    let mut between = pt.matmul(&sp.between)?.matmul(&p)?;
    let mut within = pt.matmul(&sp.within)?.matmul(&p)?;
    symmetrize(&mut between);
    symmetrize(&mut within);
    let mu = regularization(&within, mu_scale);
    let (values, vectors) = generalized_eigen(&between, &within, mu)?;
    let (values, reduced) = leading(&values, &vectors, m);
    finish_model(sp, p.matmul(&reduced)?, values, mu)
}

/// Per class, each sample's `‖Wᵀx − Wᵀμ_i‖ / (‖Wᵀμ_i‖ + ε)` in input order.
pub fn class_constancy(model: &LdaModel, data: &LabeledFeatures) -> Result<Vec<Vec<f64>>> {
    if data.classes() > model.classes() {
        return Err(Error::InvalidArgument("data has classes the model does not know"));
    }
    let mut out = vec![Vec::new(); model.classes()];
    for (x, l) in data.iter() {
        let y = model.project_values(x)?;
        let mean = &model.projected_means[l];
        let num = libm::sqrt(y.iter().zip(mean).map(|(a, b)| (a - b) * (a - b)).sum());
        let den = libm::sqrt(mean.iter().map(|v| v * v).sum());
        out[l].push(num / (den + CONSTANCY_EPS));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d() -> LabeledFeatures {
        LabeledFeatures::from_rows(vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]], vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn one_dimensional_scatter_by_hand() {
        let sp = scatter_matrices(&one_d()).unwrap();
        assert_eq!(sp.class_means, vec![vec![1.0], vec![5.0]]);
        assert_eq!(sp.global_mean, vec![3.0]);
        assert_eq!(sp.between.data(), &[16.0]);
        assert_eq!(sp.within.data(), &[4.0]);
    }

    #[test]
    fn one_dimensional_fit() {
        let sp = scatter_matrices(&one_d()).unwrap();
        let model = fit_lda(&sp, 1e-9, 1).unwrap();
        assert!((model.eigenvalues()[0] - 4.0).abs() < 1e-6);
        // wᵀ(S_W + μI)w = 1 with S_W = 4
        let w = model.projection().get(0, 0);
        assert!(w > 0.0);
        assert!((w * w * (4.0 + model.mu_reg()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_scatters() {
        let single = LabeledFeatures::from_rows(vec![vec![1.0, 2.0], vec![3.0, -1.0]], vec![0, 0]).unwrap();
        let sp = scatter_matrices(&single).unwrap();
        assert!(sp.between.data().iter().all(|&v| v == 0.0));

        let points = LabeledFeatures::from_rows(vec![vec![1.0, 2.0], vec![3.0, -1.0]], vec![0, 1]).unwrap();
        let sp = scatter_matrices(&points).unwrap();
        assert!(sp.within.data().iter().all(|&v| v == 0.0));
        // singular S_W still fits
        let model = fit_lda(&sp, 1e-3, 1).unwrap();
        assert_eq!(model.mu_reg(), 1e-3);
        assert!(model.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn labels_are_validated() {
        assert!(LabeledFeatures::from_rows(vec![vec![1.0]], vec![1]).is_err());
        assert!(LabeledFeatures::from_rows(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 0]).is_err());
        assert!(LabeledFeatures::from_rows(vec![vec![f64::NAN]], vec![0]).is_err());
        assert_eq!(LabeledFeatures::from_rows(vec![], vec![]), Err(Error::Empty));
    }

    #[test]
    fn fit_arguments_are_checked() {
        let sp = scatter_matrices(&one_d()).unwrap();
        assert!(fit_lda(&sp, 0.0, 1).is_err());
        assert!(fit_lda(&sp, 1e-3, 2).is_err());
        assert_eq!(fit_lda(&sp, 1e-3, 0).unwrap().subspace_dim(), 0);
    }

    #[test]
    fn projected_class_mean_matches_stored_mean() {
        let data = LabeledFeatures::from_rows(
            vec![
                vec![0.0, 1.0, 0.5],
                vec![0.2, 1.1, 0.4],
                vec![2.0, 0.0, 1.0],
                vec![2.1, 0.3, 1.2],
                vec![1.0, 3.0, -1.0],
                vec![1.2, 2.7, -0.8],
            ],
            vec![0, 0, 1, 1, 2, 2],
        )
        .unwrap();
        let sp = scatter_matrices(&data).unwrap();
        for model in [fit_lda(&sp, 1e-3, 2).unwrap(), fit_lda_pca(&sp, 1e-3, 2).unwrap()] {
            for (mean, stored) in sp.class_means.iter().zip(model.projected_means()) {
                let y = model.project_values(mean).unwrap();
                for (a, b) in y.iter().zip(stored) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
            assert!(model.project_values(&[0.0; 3]).unwrap().iter().all(|&v| v == 0.0));
            assert!(model.project_values(&[0.0; 2]).is_err());
        }
    }

    #[test]
    fn single_point_classes_have_zero_constancy_error() {
        let data =
            LabeledFeatures::from_rows(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 3.0]], vec![0, 1, 2]).unwrap();
        let model = fit_lda(&scatter_matrices(&data).unwrap(), 1e-3, 2).unwrap();
        let errs = class_constancy(&model, &data).unwrap();
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().flatten().all(|&e| e == 0.0));
    }
}
