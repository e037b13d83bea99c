//! Dense complex linear algebra over a bipartite space `H_A ⊗ H_B`.
//!
//! Composite indices are A-major: the basis vector `|α⟩_A ⊗ |β⟩_B` sits at
//! global index `α·dim_b + β`. Every module in the crate relies on this
//! convention, and `nalgebra`'s Kronecker product already follows it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance per unit dimension (scaled by `max(1, ‖H‖_F)`).
pub const HERMITIAN_TOL_PER_DIM: f64 = 1e-10;
/// Eigenvector orthonormality tolerance.
pub const ORTHONORMAL_TOL: f64 = 1e-9;
/// Relative spectral reconstruction tolerance.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Dimensions of the two factors of a bipartite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BipartiteSpace {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteSpace {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total dimension `dim_a · dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Global index of `|α⟩|β⟩`.
    pub fn index(&self, alpha: usize, beta: usize) -> usize {
        alpha * self.dim_b + beta
    }

    /// `X ⊗ Y` for `X` on A and `Y` on B.
    pub fn tensor_product(&self, x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
        expect_square(x, self.dim_a)?;
        expect_square(y, self.dim_b)?;
        Ok(x.kronecker(y))
    }

    /// `X ⊗ 1_B`.
    pub fn lift_a(&self, x: &CMatrix) -> Result<CMatrix> {
        self.tensor_product(x, &CMatrix::identity(self.dim_b, self.dim_b))
    }

    /// `1_A ⊗ Y`.
    pub fn lift_b(&self, y: &CMatrix) -> Result<CMatrix> {
        self.tensor_product(&CMatrix::identity(self.dim_a, self.dim_a), y)
    }

    /// `X ⊗ |y⟩` for vectors.
    pub fn tensor_vectors(&self, x: &CVector, y: &CVector) -> Result<CVector> {
        if x.len() != self.dim_a {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a,
                found: x.len(),
            });
        }
        if y.len() != self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim_b,
                found: y.len(),
            });
        }
        Ok(x.kronecker(y))
    }

    /// Partial trace over A: `X_B[β,β′] = Σ_α M[αβ, αβ′]`.
    pub fn partial_trace_a(&self, m: &CMatrix) -> Result<CMatrix> {
        expect_square(m, self.dim())?;
        let (da, db) = (self.dim_a, self.dim_b);
        Ok(CMatrix::from_fn(db, db, |b, bp| {
            (0..da).map(|a| m[(a * db + b, a * db + bp)]).sum()
        }))
    }

    /// Partial trace over B: `X_A[α,α′] = Σ_β M[αβ, α′β]`.
    pub fn partial_trace_b(&self, m: &CMatrix) -> Result<CMatrix> {
        expect_square(m, self.dim())?;
        let (da, db) = (self.dim_a, self.dim_b);
        Ok(CMatrix::from_fn(da, da, |a, ap| {
            (0..db).map(|b| m[(a * db + b, ap * db + b)]).sum()
        }))
    }
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `(eigenvalue, eigenvector)` pairs in descending order.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, CVector)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, self.vector(k)))
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> Complex) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            let s = f(v);
            scaled.column_mut(k).scale_mut_complex(s);
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|v| Complex::new(v, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: Complex);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, s: Complex) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

/// Spectral decomposition of a Hermitian operator.
///
/// The input is symmetrized before diagonalization, so tiny anti-Hermitian
/// noise within tolerance does not leak into the eigenvalues.
pub fn spectral_decompose(h: &CMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    check_finite(h)?;
    let residual = hermitian_residual(h);
    if residual > hermitian_tolerance(h) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(hermitian_eigen(&hermitian_part(h)))
}

/// Diagonalize without validation; `h` must already be Hermitian.
pub(crate) fn hermitian_eigen(h: &CMatrix) -> Spectrum {
    let n = h.nrows();
    if n == 0 {
        return Spectrum {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { values, vectors }
}

/// Tolerance used to accept an operator as Hermitian.
pub fn hermitian_tolerance(h: &CMatrix) -> f64 {
    HERMITIAN_TOL_PER_DIM * h.nrows().max(1) as f64 * h.norm().max(1.0)
}

/// `‖H − H†‖_F`.
pub fn hermitian_residual(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

/// `(H + H†)/2`.
pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

pub fn is_hermitian(h: &CMatrix) -> bool {
    h.is_square() && hermitian_residual(h) <= hermitian_tolerance(h)
}

pub fn trace(m: &CMatrix) -> Complex {
    m.trace()
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `XY − YX`.
pub fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// Computational basis vector `|k⟩` in dimension `dim`.
pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = Complex::new(1.0, 0.0);
    v
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex::new(v, 0.0)),
    ))
}

/// Build a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&v| Complex::new(v, 0.0)))
}

pub fn pauli_x() -> CMatrix {
    real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex::new(0.0, 1.0);
    CMatrix::from_row_slice(
        2,
        2,
        &[Complex::new(0.0, 0.0), -i, i, Complex::new(0.0, 0.0)],
    )
}

pub fn pauli_z() -> CMatrix {
    diag(&[1.0, -1.0])
}

/// Row-major `[re, im]` pairs, the serialized form of a complex matrix.
pub fn to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

/// Inverse of [`to_pairs`]; rows must have equal length.
pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            found: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, c| {
        Complex::new(rows[r][c][0], rows[r][c][1])
    }))
}

pub(crate) fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn expect_square(m: &CMatrix, dim: usize) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    Ok(())
}
