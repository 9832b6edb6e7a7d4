//! Symmetric eigendecomposition and the spectral pieces of the step.
//!
//! Everything here is a pure function of its inputs. The iteration-level flow
//! is: decompose `H = ∇²f(x)` once, pick a shift `δⱼ` from a [`DeltaSchedule`]
//! by shifting the eigenvalues (the eigenvectors of `H + cId` equal those of
//! `H`), then build the sign-corrected direction with [`step_direction`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative accuracy expected from the eigensolver.
pub const EIGEN_TOL: f64 = 1e-10;

/// A matrix is treated as singular when `minsp ≤ SINGULAR_TOL · max(1, sp)`.
pub const SINGULAR_TOL: f64 = 1e-12;

const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Square matrix with finite entries and exact symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Symmetrizes `m` as `(m + mᵀ)/2`, so `a[i][j] == a[j][i]` bit for bit.
    pub fn new(mut m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix { rows, cols });
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `self + c·Id`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        Self(m)
    }
}

/// Eigenvalues sorted ascending with their orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralData {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `sp(A)`: the largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }

    /// `minsp(A)`: the smallest eigenvalue magnitude, zero iff `A` is singular.
    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(f64::INFINITY, |acc, l| acc.min(l.abs()))
    }

    /// Singularity threshold `SINGULAR_TOL · max(1, sp)` for this spectrum.
    pub fn singular_threshold(&self) -> f64 {
        SINGULAR_TOL * self.spectral_radius().max(1.0)
    }

    pub fn is_numerically_invertible(&self) -> bool {
        self.min_abs_eigenvalue() > self.singular_threshold()
    }

    /// Spectral data of `A + c·Id`. Shifting keeps the ascending order.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.add_scalar(c),
            eigenvectors: self.eigenvectors.clone(),
        }
    }

    /// `Σ λᵢ eᵢ eᵢᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is signed so that its
/// largest-magnitude coordinate (first one on ties) is positive, which makes
/// the output deterministic.
pub fn symmetric_eigendecompose(a: &SymmetricMatrix) -> Result<SpectralData> {
    let eig = SymmetricEigen::try_new(a.0.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::EigenNonConvergence { matrix: a.0.clone() })?;
    if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenNonConvergence { matrix: a.0.clone() });
    }

    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut eigenvalues = DVector::zeros(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues[dst] = eig.eigenvalues[src];
        let mut col = eig.eigenvectors.column(src).into_owned();
        let pivot = col
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
            .0;
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralData { eigenvalues, eigenvectors })
}

/// `H + δ·‖∇f‖^{1+α}·Id`.
pub fn build_regularized_hessian(h: &SymmetricMatrix, grad_norm: f64, delta: f64, alpha: f64) -> SymmetricMatrix {
    h.shifted(delta * grad_norm.powf(1.0 + alpha))
}

/// Ordered, pairwise distinct shifts `δ₀…δ_J` with gap constant
/// `κ = ½ min_{i≠j} |δᵢ − δⱼ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSchedule {
    deltas: Vec<f64>,
    kappa: f64,
}

impl DeltaSchedule {
    /// Requires at least two finite, pairwise distinct entries.
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() < 2 {
            return Err(Error::InvalidSchedule(format!(
                "need at least two shifts to define kappa, got {}",
                deltas.len()
            )));
        }
        if deltas.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidSchedule("shifts must be finite".into()));
        }
        let mut min_gap = f64::INFINITY;
        for (i, a) in deltas.iter().enumerate() {
            for b in &deltas[i + 1..] {
                min_gap = min_gap.min((a - b).abs());
            }
        }
        if min_gap <= 0.0 {
            return Err(Error::InvalidSchedule("shifts must be pairwise distinct".into()));
        }
        Ok(Self { deltas, kappa: 0.5 * min_gap })
    }

    /// `(0, 1, −1)`, the short schedule used in the experiments (`κ = ½`).
    pub fn experiment() -> Self {
        Self::new(vec![0.0, 1.0, -1.0]).expect("static schedule is valid")
    }

    /// `δⱼ = 2j` for `j = 0…m`: `m + 1` entries with `κ = 1`.
    pub fn theoretical(m: usize) -> Self {
        Self::new((0..=m.max(1)).map(|j| 2.0 * j as f64).collect()).expect("distinct by construction")
    }

    /// `δⱼ` uniform in `[2j, 2j + ½]` for `j = 0…m`, so `κ ≥ ¾`.
    pub fn theoretical_random(m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deltas = (0..=m.max(1))
            .map(|j| 2.0 * j as f64 + rng.random_range(0.0..=0.5))
            .collect();
        Self::new(deltas).expect("disjoint intervals")
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Whether the schedule has the `m + 1` entries the pigeonhole argument needs.
    pub fn is_theoretical_for(&self, m: usize) -> bool {
        self.deltas.len() > m
    }
}

/// Acceptance test applied to each shifted matrix `A_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeltaRule {
    /// First `j` with `A_j` numerically invertible.
    Determinant,
    /// First `j` with `minsp(A_j) ≥ κ‖∇f‖^{1+α}`.
    MinSpectrum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaChoice {
    pub index: usize,
    pub delta: f64,
    pub spectral: SpectralData,
}

/// Scans the schedule in order using the eigenvalues of `H` shifted per `δⱼ`.
pub fn select_delta(
    rule: DeltaRule,
    hessian: &SpectralData,
    grad_norm: f64,
    sched: &DeltaSchedule,
    alpha: f64,
) -> Result<DeltaChoice> {
    let scale = grad_norm.powf(1.0 + alpha);
    for (index, &delta) in sched.deltas.iter().enumerate() {
        let shifted = hessian.shifted(delta * scale);
        let accept = match rule {
            DeltaRule::Determinant => shifted.is_numerically_invertible(),
            DeltaRule::MinSpectrum => shifted.min_abs_eigenvalue() >= sched.kappa * scale,
        };
        if accept {
            return Ok(DeltaChoice { index, delta, spectral: shifted });
        }
    }
    Err(Error::ScheduleExhausted { tried: sched.len() })
}

pub fn select_delta_det(h: &SymmetricMatrix, grad_norm: f64, sched: &DeltaSchedule, alpha: f64) -> Result<DeltaChoice> {
    select_delta(DeltaRule::Determinant, &symmetric_eigendecompose(h)?, grad_norm, sched, alpha)
}

pub fn select_delta_minsp(h: &SymmetricMatrix, grad_norm: f64, sched: &DeltaSchedule, alpha: f64) -> Result<DeltaChoice> {
    select_delta(DeltaRule::MinSpectrum, &symmetric_eigendecompose(h)?, grad_norm, sched, alpha)
}

/// `w = Σ ⟨g, eᵢ⟩ eᵢ / |λᵢ|`, i.e. `pr₊(A⁻¹g) − pr₋(A⁻¹g)`.
pub fn step_direction(s: &SpectralData, grad: &DVector<f64>) -> Result<DVector<f64>> {
    if grad.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: grad.len() });
    }
    let threshold = s.singular_threshold();
    let min_abs = s.min_abs_eigenvalue();
    if min_abs <= threshold {
        return Err(Error::SingularDirection { min_abs, threshold });
    }
    let coeffs = s.eigenvectors.tr_mul(grad);
    let scaled = DVector::from_iterator(
        s.dim(),
        coeffs.iter().zip(s.eigenvalues.iter()).map(|(a, l)| a / l.abs()),
    );
    Ok(&s.eigenvectors * scaled)
}

/// `w / max(1, ‖w‖)`.
pub fn cap_direction(w: &DVector<f64>) -> DVector<f64> {
    let norm = w.norm();
    if norm > 1.0 {
        w / norm
    } else {
        w.clone()
    }
}
