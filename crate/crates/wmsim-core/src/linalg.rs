//! Dense complex linear algebra for small matrices (dim ≲ 64).
//!
//! Everything here is sized for desk-scale quantum problems: dense row-major
//! storage, cyclic Jacobi eigendecomposition for Hermitian matrices, and
//! matrix functions through the spectral theorem. No sparsity, no BLAS.

use num_complex::Complex64;
use thiserror::Error;

/// Scalar type used throughout the crate.
pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (‖m − m†‖_F = {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("scalar function returned a non-finite value at eigenvalue {0}")]
    NonFiniteFunction(f64),
    #[error("Jacobi eigensolver did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate (the time-reversal representation used here).
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Matrix product. Errors on dimension mismatch.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.dim != b.dim {
        return Err(LinalgError::DimensionMismatch(a.dim, b.dim));
    }
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Jordan product (A B + B A)/2.
pub fn jordan(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let ab = mat_mul(a, b)?;
    let ba = mat_mul(b, a)?;
    Ok(ab.add(&ba).scale(C64::new(0.5, 0.0)))
}

/// Commutator A B − B A.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let ab = mat_mul(a, b)?;
    let ba = mat_mul(b, a)?;
    Ok(ab.sub(&ba))
}

/// Spectral decomposition of a Hermitian matrix: ascending distinct
/// eigenvalues and orthogonal projectors onto (degeneracy-merged) eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
}

impl SpectralDecomposition {
    /// Σ f(λ_i) P_i.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix, LinalgError> {
        let dim = self.projectors[0].dim();
        let mut out = ComplexMatrix::zeros(dim);
        for (lambda, p) in self.eigenvalues.iter().zip(&self.projectors) {
            let v = f(*lambda);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(LinalgError::NonFiniteFunction(*lambda));
            }
            out = out.add(&p.scale(v));
        }
        Ok(out)
    }
}

/// Default relative tolerance for merging numerically split degenerate
/// eigenvalues into one projector.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

const HERMITICITY_TOL: f64 = 1e-10;
const MAX_JACOBI_SWEEPS: usize = 64;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues closer than `degeneracy_tol·‖m‖_F` are merged into a single
/// eigenspace so outcome alphabets stay stable under floating-point noise.
pub fn hermitian_eigen(
    m: &ComplexMatrix,
    degeneracy_tol: f64,
) -> Result<SpectralDecomposition, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let defect = m.hermiticity_defect();
    let scale = m.frobenius_norm().max(1.0);
    if defect > HERMITICITY_TOL * scale.max(1.0) {
        return Err(LinalgError::NotHermitian(defect));
    }

    let n = m.dim();
    // Work on the Hermitian average to scrub roundoff-level asymmetry.
    let mut a = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    let norm = a.frobenius_norm();
    let off_tol = 1e-14 * norm.max(f64::MIN_POSITIVE);

    let mut converged = n <= 1;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= off_tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= off_tol / (n as f64) {
                    continue;
                }
                // Complex Givens rotation zeroing a[(p, q)].
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);
                apply_rotation(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        // Final check: the last sweep may have converged without re-measuring.
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() > off_tol {
            return Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }

    // Sort eigenpairs ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();

    // Merge near-degenerate eigenvalues and build group projectors.
    let merge_gap = degeneracy_tol * norm.max(f64::MIN_POSITIVE);
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigs[end] - eigs[end - 1]).abs() <= merge_gap {
            end += 1;
        }
        let group = &order[start..end];
        let mut proj = ComplexMatrix::zeros(n);
        for &col in group {
            for i in 0..n {
                for j in 0..n {
                    proj[(i, j)] += v[(i, col)] * v[(j, col)].conj();
                }
            }
        }
        let mean = eigs[start..end].iter().sum::<f64>() / (end - start) as f64;
        eigenvalues.push(mean);
        projectors.push(proj);
        start = end;
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
    })
}

/// Two-sided update A ← J† A J, V ← V J for the complex Jacobi rotation
/// J restricted to the (p, q) plane: J_pp = c, J_pq = s, J_qp = −s̄, J_qq = c.
fn apply_rotation(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: C64) {
    let n = a.dim();
    // Columns: [A J]_ip = c A_ip − s̄ A_iq ; [A J]_iq = s A_ip + c A_iq.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * s.conj();
        a[(i, q)] = aip * s + aiq * c;
    }
    // Rows: [J† A]_pj = c A_pj − s A_qj ; [J† A]_qj = s̄ A_pj + c A_qj.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * s;
        a[(q, j)] = apj * s.conj() + aqj * c;
    }
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * s.conj();
        v[(i, q)] = vip * s + viq * c;
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Σ f(λ_i) P_i for Hermitian `m` (spectral theorem).
pub fn matrix_function(
    m: &ComplexMatrix,
    f: impl Fn(f64) -> C64,
) -> Result<ComplexMatrix, LinalgError> {
    let spec = hermitian_eigen(m, DEFAULT_DEGENERACY_TOL)?;
    spec.apply(f)
}
