//! The interaction-weight matrix and its closed-form update.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FROBENIUS_TOL: f64 = 1e-9;

/// Symmetric, element-wise non-negative A×A matrix of unit Frobenius norm.
/// Diagonal entries weight main effects, off-diagonal entries pairwise interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix(DMatrix<f64>);

impl WeightMatrix {
    /// Validates symmetry, non-negativity and unit norm (within 1e-9).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let a = m.nrows();
        for i in 0..a {
            for j in 0..a {
                let v = m[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) = {v} is not >= 0")));
                }
                if v != m[(j, i)] {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        let norm = m.norm();
        if (norm - 1.0).abs() > FROBENIUS_TOL {
            return Err(Error::InvalidArgument(format!("Frobenius norm {norm} is not 1")));
        }
        Ok(Self(m))
    }

    /// Symmetrizes, clamps negatives to zero and rescales to unit norm.
    pub fn normalized(mut m: DMatrix<f64>) -> Result<Self> {
        symmetrize(&mut m);
        m.iter_mut().for_each(|v| *v = v.max(0.0));
        let norm = m.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate("weight matrix has no positive entry".into()));
        }
        m /= norm;
        symmetrize(&mut m);
        Ok(Self(m))
    }

    /// I/√A.
    pub fn uniform_diagonal(a: usize) -> Self {
        Self(DMatrix::identity(a, a) / (a as f64).sqrt())
    }

    /// diag(w)/‖w‖₂.
    pub fn from_diagonal(w: &[f64]) -> Result<Self> {
        Self::normalized(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(w)))
    }

    /// i.i.d. uniform(0,1) entries, symmetrized by averaging with the transpose.
    pub fn random<R: Rng + ?Sized>(a: usize, rng: &mut R) -> Self {
        let m = DMatrix::from_fn(a, a, |_, _| rng.gen::<f64>());
        let m = (&m + m.transpose()) * 0.5;
        Self::normalized(m).expect("uniform draws are positive almost surely")
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.0[(a, b)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let a = rows.len();
        if rows.iter().any(|r| r.len() != a) {
            return Err(Error::Format("weight matrix rows must form a square".into()));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(DMatrix::from_row_slice(a, a, &flat))
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(w: WeightMatrix) -> Self {
        w.rows()
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let a = m.nrows();
    for i in 0..a {
        for j in (i + 1)..a {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// |xi − xj|ᵀ W |xi − xj| with the absolute value taken element-wise.
pub fn quadratic_manhattan(xi: &[f64], xj: &[f64], w: &WeightMatrix) -> Result<f64> {
    let a = w.dim();
    for len in [xi.len(), xj.len()] {
        if len != a {
            return Err(Error::DimensionMismatch {
                expected: a,
                actual: len,
            });
        }
    }
    let d: Vec<f64> = xi.iter().zip(xj).map(|(p, q)| (p - q).abs()).collect();
    Ok(quadratic_form(w.matrix(), &d))
}

pub(crate) fn quadratic_form(w: &DMatrix<f64>, d: &[f64]) -> f64 {
    let a = d.len();
    let mut total = 0.0;
    for j in 0..a {
        if d[j] == 0.0 {
            continue;
        }
        let col = w.column(j);
        let mut acc = 0.0;
        for i in 0..a {
            acc += col[i] * d[i];
        }
        total += acc * d[j];
    }
    total
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues and column eigenvectors of a symmetric matrix.
fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("eigendecomposition failed: {e:?}")))?;
    let n = m.nrows();
    let s = eig.S();
    let u = eig.U();
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    match to_faer(m).self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(v) => v.into_iter().fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    }
}

/// The unconstrained-sign closed form: with eigenpairs (μᵢ, ψᵢ) of Σ,
/// W = Σᵢ ηᵢ ψᵢψᵢᵀ where η = (−μ)⁺/‖(−μ)⁺‖₂. This minimizes tr(WΣ) over
/// symmetric PSD matrices of unit Frobenius norm but may carry negative
/// entries.
///
/// Returns `Error::Degenerate` when Σ has no negative eigenvalue.
pub fn closed_form_update(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !sigma.is_square() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            actual: sigma.ncols(),
        });
    }
    let mut s = sigma.clone();
    symmetrize(&mut s);
    let scale = s.norm();
    if !scale.is_finite() {
        return Err(Error::InvalidArgument("scatter matrix is not finite".into()));
    }
    let tol = 1e-12 * scale;
    let (mu, psi) = symmetric_eigen(&s)?;
    let eta: Vec<f64> = mu.iter().map(|&m| if m < -tol { -m } else { 0.0 }).collect();
    let eta_norm = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
    if eta_norm == 0.0 {
        return Err(Error::Degenerate(
            "scatter matrix has no negative eigenvalue".into(),
        ));
    }
    let kept: Vec<usize> = (0..eta.len()).filter(|&i| eta[i] > 0.0).collect();
    let basis = psi.select_columns(&kept);
    let mut scaled = basis.clone();
    for (mut col, &i) in scaled.column_iter_mut().zip(&kept) {
        col *= eta[i] / eta_norm;
    }
    let mut w = scaled * basis.transpose();
    symmetrize(&mut w);
    Ok(w)
}

/// Brings a closed-form iterate onto the element-wise non-negative set:
/// negative entries are clamped to zero and, if that leaves the matrix
/// indefinite, the diagonal is raised by the magnitude of the smallest
/// eigenvalue. The result is rescaled to unit Frobenius norm.
pub fn enforce_nonnegative(mut w: DMatrix<f64>) -> Result<WeightMatrix> {
    symmetrize(&mut w);
    let clamped = w.iter().any(|&v| v < 0.0);
    if clamped {
        w.iter_mut().for_each(|v| *v = v.max(0.0));
        let min_eig = min_eigenvalue(&w);
        if min_eig < 0.0 {
            for i in 0..w.nrows() {
                w[(i, i)] -= min_eig;
            }
        }
    }
    WeightMatrix::normalized(w)
}

/// One W-step: closed form followed by the non-negativity repair.
pub fn update_weight_matrix(sigma: &DMatrix<f64>) -> Result<WeightMatrix> {
    enforce_nonnegative(closed_form_update(sigma)?)
}

/// Zeroes entries below `threshold` and renormalizes.
pub fn prune(w: &WeightMatrix, threshold: f64) -> Result<WeightMatrix> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "prune threshold must be non-negative, got {threshold}"
        )));
    }
    if w.matrix().iter().all(|&v| v >= threshold) {
        return Ok(w.clone());
    }
    let mut m = w.matrix().clone();
    m.iter_mut().for_each(|v| {
        if *v < threshold {
            *v = 0.0
        }
    });
    if m.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(format!(
            "every weight is below the prune threshold {threshold}"
        )));
    }
    WeightMatrix::normalized(m)
}
