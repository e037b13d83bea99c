//! Finite-dimensional *-algebras of operators: commutants, bicommutants,
//! centers and the superselection sectors of a discrete superselection
//! structure.
//!
//! An [`OperatorAlgebra`] is stored as a Hilbert–Schmidt orthonormal basis of
//! its linear span, so membership residuals are plain projection residuals.
//!
//! Commutants are computed as null spaces of the maps `X ↦ XH − HX`. The
//! generators are first split into Hermitian parts; a generic real
//! combination `G` of those parts is diagonalized, and the block algebra of
//! `G`'s eigenspaces (which contains the commutant) seeds the search. Each
//! generator then restricts the candidate space through the null space of
//! its commutator map, so the expensive SVDs only ever run on the small
//! candidate space rather than on the full `d² × d²` stacked system.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::random::seeded;
use crate::states::{validate_projector_set, ProjectorSet};
use crate::tensor_space::{hermitian_eigen, outer, CMatrix, CVector, Complex};

/// Largest Hilbert-space dimension accepted by algebra operations.
pub const ALGEBRA_DIM_CAP: usize = 16;
/// Singular values at or below this fraction of the reference scale are null.
pub const NULL_SPACE_TOL: f64 = 1e-9;
/// Relative membership tolerance for [`OperatorAlgebra::contains`].
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative eigenvalue grouping tolerance for sector extraction.
pub const SECTOR_GROUPING_TOL: f64 = 1e-8;
/// Number of random central elements tried before giving up.
pub const SECTOR_DRAWS: usize = 3;

/// Linear span of operators closed under adjoint and product.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra {
    dim: usize,
    basis: Vec<CMatrix>,
    /// Column `j` is `vec(basis[j])` (column-major), `d² × n`.
    vecs: CMatrix,
}

/// Result of a span-membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub contained: bool,
    /// `‖X − proj(X)‖_F`.
    pub residual: f64,
}

/// Closure residuals of an algebra's basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureResiduals {
    pub adjoint: f64,
    pub product: f64,
    pub identity: f64,
}

fn vec_of(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

fn mat_of(dim: usize, v: &[Complex]) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v)
}

impl OperatorAlgebra {
    fn from_orthonormal_vecs(dim: usize, vecs: CMatrix) -> Self {
        let basis = (0..vecs.ncols())
            .map(|j| mat_of(dim, vecs.column(j).as_slice()))
            .collect();
        Self { dim, basis, vecs }
    }

    /// All `d × d` matrices.
    pub fn full(dim: usize) -> Self {
        let n = dim * dim;
        Self::from_orthonormal_vecs(dim, CMatrix::identity(n, n))
    }

    /// Multiples of the identity.
    pub fn scalars(dim: usize) -> Self {
        let id = CMatrix::identity(dim, dim).unscale((dim as f64).sqrt());
        Self::from_orthonormal_vecs(dim, CMatrix::from_columns(&[vec_of(&id)]))
    }

    /// Orthonormalized linear span of `elements`. Closure is not checked; see
    /// [`OperatorAlgebra::closure_residuals`].
    pub fn from_spanning_set(dim: usize, elements: &[CMatrix]) -> Result<Self> {
        for x in elements {
            check_dim(x, dim)?;
        }
        if elements.is_empty() {
            return Ok(Self::from_orthonormal_vecs(
                dim,
                CMatrix::zeros(dim * dim, 0),
            ));
        }
        let cols: Vec<CVector> = elements.iter().map(vec_of).collect();
        Ok(Self::from_orthonormal_vecs(
            dim,
            orthonormal_range(&CMatrix::from_columns(&cols)),
        ))
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the algebra as a linear space.
    pub fn linear_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let v = vec_of(x);
        let coeffs = self.vecs.adjoint() * &v;
        mat_of(self.dim, (&self.vecs * coeffs).as_slice())
    }

    /// Distance from `x` to the span.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Membership with relative tolerance `1e-9 · ‖x‖_F`.
    pub fn contains(&self, x: &CMatrix) -> Membership {
        let residual = self.residual(x);
        Membership {
            contained: residual <= MEMBERSHIP_TOL * x.norm(),
            residual,
        }
    }

    /// Largest residual of `other`'s basis elements against this span; zero
    /// iff `other ⊆ self`.
    pub fn containment_residual(&self, other: &OperatorAlgebra) -> f64 {
        other
            .basis
            .iter()
            .map(|x| self.residual(x))
            .fold(0.0, f64::max)
    }

    /// Symmetric subspace-equality residual.
    pub fn equality_residual(&self, other: &OperatorAlgebra) -> f64 {
        self.containment_residual(other)
            .max(other.containment_residual(self))
    }

    /// Adjoint closure, product closure and identity membership residuals.
    /// Quadratic in the linear dimension.
    pub fn closure_residuals(&self) -> ClosureResiduals {
        let adjoint = self
            .basis
            .iter()
            .map(|x| self.residual(&x.adjoint()))
            .fold(0.0, f64::max);
        let mut product: f64 = 0.0;
        for x in &self.basis {
            for y in &self.basis {
                product = product.max(self.residual(&(x * y)));
            }
        }
        let identity = self.residual(&CMatrix::identity(self.dim, self.dim));
        ClosureResiduals {
            adjoint,
            product,
            identity,
        }
    }

    /// Whether every pair of basis elements commutes.
    pub fn is_abelian(&self) -> bool {
        self.basis.iter().all(|x| {
            self.basis
                .iter()
                .all(|y| (x * y - y * x).norm() <= NULL_SPACE_TOL)
        })
    }

    /// Subspace intersection `self ∩ other`.
    pub fn intersect(&self, other: &OperatorAlgebra) -> Result<OperatorAlgebra> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (small, large) = if self.linear_dim() <= other.linear_dim() {
            (self, other)
        } else {
            (other, self)
        };
        if small.linear_dim() == 0 {
            return Ok(small.clone());
        }
        // Combinations of `small` with no component outside `large`.
        let outside = &small.vecs - &large.vecs * (large.vecs.adjoint() * &small.vecs);
        let null = null_space(&outside, NULL_SPACE_TOL);
        Ok(Self::from_orthonormal_vecs(
            self.dim,
            reorthonormalize(&small.vecs * null),
        ))
    }
}

fn check_dim(x: &CMatrix, dim: usize) -> Result<()> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    if x.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.nrows(),
        });
    }
    Ok(())
}

/// Orthonormal basis of the column space, rank decided relative to the
/// largest singular value.
fn orthonormal_range(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > NULL_SPACE_TOL * smax && smax > 0.0)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of `{c : ‖M c‖ ≈ 0}`, singular values `≤ tol` treated as
/// zero. `M` must have at least as many rows as columns.
fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let padded;
    let m = if m.nrows() < n {
        padded = m.clone().resize_vertically(n, Complex::new(0.0, 0.0));
        &padded
    } else {
        m
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] <= tol).collect();
    CMatrix::from_fn(n, keep.len(), |r, c| v_t[(keep[c], r)].conj())
}

/// Modified Gram–Schmidt pass to scrub rounding drift from products of
/// orthonormal factors.
fn reorthonormalize(mut vecs: CMatrix) -> CMatrix {
    for j in 0..vecs.ncols() {
        for i in 0..j {
            let proj = vecs.column(i).dotc(&vecs.column(j));
            let ci = vecs.column(i).into_owned();
            vecs.column_mut(j).axpy(-proj, &ci, Complex::new(1.0, 0.0));
        }
        let n = vecs.column(j).norm();
        vecs.column_mut(j).unscale_mut(n);
    }
    vecs
}

/// `(A + A†)/2` and `(A − A†)/(2i)` for every generator, dropping zeros.
fn hermitian_parts(generators: &[CMatrix]) -> Vec<CMatrix> {
    let scale = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let floor = 1e-14 * scale;
    let mut out = Vec::with_capacity(2 * generators.len());
    for g in generators {
        let re = (g + g.adjoint()).scale(0.5);
        let im = (g - g.adjoint()) * Complex::new(0.0, -0.5);
        for h in [re, im] {
            if h.norm() > floor {
                out.push(h);
            }
        }
    }
    out
}

/// Deterministic, generic real weights for combining generators.
fn generic_weight(k: usize) -> f64 {
    // Fractional parts of multiples of the plastic-number reciprocal are
    // well spread and never repeat.
    1.0 + ((k as f64 + 1.0) * 0.754_877_666_246_692_7).fract()
}

/// `𝒮′ = {X : XA = AX ∀A ∈ 𝒮}`.
///
/// The result is computed for `𝒮 ∪ 𝒮†`, which coincides with the commutant
/// of `𝒮` whenever the generating set is closed under adjoints (the case
/// for projector sets, algebras and Hermitian observables). This keeps the
/// result a *-algebra.
pub fn commutant(generators: &[CMatrix]) -> Result<OperatorAlgebra> {
    let dim = match generators.first() {
        Some(g) => g.nrows(),
        None => {
            return Err(Error::Precondition(
                "commutant needs at least one generator".into(),
            ))
        }
    };
    commutant_in(dim, generators)
}

/// Commutant with an explicit Hilbert-space dimension (allows empty sets).
pub fn commutant_in(dim: usize, generators: &[CMatrix]) -> Result<OperatorAlgebra> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if dim > ALGEBRA_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: ALGEBRA_DIM_CAP,
        });
    }
    for g in generators {
        check_dim(g, dim)?;
    }
    let parts = hermitian_parts(generators);
    if parts.is_empty() {
        return Ok(OperatorAlgebra::full(dim));
    }

    // Eigenspaces of a generic combination bound the commutant from above.
    let generic = parts
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(dim, dim), |acc, (k, h)| {
            acc + h.scale(generic_weight(k))
        });
    let spectrum = hermitian_eigen(&generic);
    let scale = spectrum.max().abs().max(spectrum.min().abs());
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..spectrum.len() {
        match clusters.last_mut() {
            Some(c) if spectrum.values[c[c.len() - 1]] - spectrum.values[k] <= 1e-8 * scale => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    let mut seed_cols = Vec::new();
    for cluster in &clusters {
        for &a in cluster {
            for &b in cluster {
                let va = spectrum.vector(a);
                let vb = spectrum.vector(b);
                seed_cols.push(vec_of(&(va * vb.adjoint())));
            }
        }
    }
    let mut vecs = CMatrix::from_columns(&seed_cols);

    // Reference scale for rank decisions: an upper bound on the commutator
    // map's largest singular value.
    let reference = 2.0 * parts.iter().map(|h| h.norm()).fold(0.0, f64::max);
    let tol = NULL_SPACE_TOL * reference;
    for h in &parts {
        if vecs.ncols() == 0 {
            break;
        }
        let cols: Vec<CVector> = (0..vecs.ncols())
            .map(|j| {
                let x = mat_of(dim, vecs.column(j).as_slice());
                vec_of(&(&x * h - h * &x))
            })
            .collect();
        let image = CMatrix::from_columns(&cols);
        if image.norm() <= tol {
            continue;
        }
        let null = null_space(&image, tol);
        vecs = &vecs * null;
    }
    Ok(OperatorAlgebra::from_orthonormal_vecs(
        dim,
        reorthonormalize(vecs),
    ))
}

/// `𝒮″ = (𝒮′)′`.
pub fn bicommutant(generators: &[CMatrix]) -> Result<OperatorAlgebra> {
    let first = commutant(generators)?;
    commutant_in(first.dim(), first.basis())
}

/// The algebra of observables `𝒜 = 𝒫′` fixed by a discrete superselection
/// structure: operators that are block diagonal with respect to the sectors.
pub fn generated_algebra(projset: &ProjectorSet) -> Result<OperatorAlgebra> {
    commutant_in(projset.dim(), projset.projectors())
}

/// `𝒵 = 𝒜 ∩ 𝒜′`.
pub fn center(algebra: &OperatorAlgebra) -> Result<OperatorAlgebra> {
    let comm = commutant_in(algebra.dim(), algebra.basis())?;
    algebra.intersect(&comm)
}

/// Membership test for `X ∈ 𝒜`.
pub fn contains(algebra: &OperatorAlgebra, x: &CMatrix) -> Result<Membership> {
    check_dim(x, algebra.dim())?;
    Ok(algebra.contains(x))
}

/// Minimal projectors of the center, recovered from the eigenspaces of a
/// random Hermitian central element. Uses a fixed default seed.
pub fn superselection_sectors(algebra: &OperatorAlgebra) -> Result<ProjectorSet> {
    superselection_sectors_seeded(algebra, 0x5EC7_0125)
}

/// [`superselection_sectors`] with an explicit seed for the random central
/// element. Accidental eigenvalue degeneracies are retried with fresh draws.
pub fn superselection_sectors_seeded(algebra: &OperatorAlgebra, seed: u64) -> Result<ProjectorSet> {
    let z = center(algebra)?;
    let dim = algebra.dim();
    let parts = hermitian_parts(z.basis());
    if parts.is_empty() {
        return Err(Error::SectorExtraction("center is trivial (zero)".into()));
    }
    let target = z.linear_dim();
    let mut rng = seeded(seed);
    let mut last = String::new();
    for _ in 0..SECTOR_DRAWS {
        let element = parts.iter().fold(CMatrix::zeros(dim, dim), |acc, h| {
            let w: f64 = rng.sample(StandardNormal);
            acc + h.scale(w)
        });
        let spectrum = hermitian_eigen(&element);
        let scale = spectrum.max().abs().max(spectrum.min().abs());
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in 0..spectrum.len() {
            match groups.last_mut() {
                Some(g)
                    if spectrum.values[g[0]] - spectrum.values[k]
                        <= SECTOR_GROUPING_TOL * scale =>
                {
                    g.push(k)
                }
                _ => groups.push(vec![k]),
            }
        }
        if groups.len() < target {
            last = format!(
                "{} eigenvalue groups for a {}-dimensional center (degenerate draw)",
                groups.len(),
                target
            );
            continue;
        }
        if groups.len() > target {
            return Err(Error::SectorExtraction(format!(
                "{} eigenvalue groups exceed center dimension {}",
                groups.len(),
                target
            )));
        }
        let mut projectors: Vec<CMatrix> = groups
            .iter()
            .map(|g| {
                g.iter().fold(CMatrix::zeros(dim, dim), |acc, &k| {
                    acc + outer(&spectrum.vector(k))
                })
            })
            .collect();
        for p in &projectors {
            let m = z.contains(p);
            if m.residual > SECTOR_GROUPING_TOL * p.norm() {
                return Err(Error::SectorExtraction(format!(
                    "eigenprojector outside the center (residual {:.3e})",
                    m.residual
                )));
            }
        }
        projectors.sort_by(|a, b| diagonal_key(b).partial_cmp(&diagonal_key(a)).unwrap());
        return validate_projector_set(projectors)
            .map_err(|v| Error::SectorExtraction(v.to_string()));
    }
    Err(Error::SectorExtraction(last))
}

/// Diagonal entries rounded to 1e-6, used to order sector projectors.
fn diagonal_key(p: &CMatrix) -> Vec<f64> {
    (0..p.nrows())
        .map(|i| (p[(i, i)].re * 1e6).round() / 1e6)
        .collect()
}

/// `Λ = Σ λ_i P_i` for a discrete superselection structure.
#[derive(Debug, Clone)]
pub struct SuperselectionOperator {
    eigenvalues: Vec<Complex>,
    sectors: ProjectorSet,
}

impl SuperselectionOperator {
    pub fn new(eigenvalues: Vec<Complex>, sectors: ProjectorSet) -> Result<Self> {
        if eigenvalues.len() != sectors.len() {
            return Err(Error::DimensionMismatch {
                expected: sectors.len(),
                found: eigenvalues.len(),
            });
        }
        Ok(Self {
            eigenvalues,
            sectors,
        })
    }

    pub fn eigenvalues(&self) -> &[Complex] {
        &self.eigenvalues
    }

    pub fn sectors(&self) -> &ProjectorSet {
        &self.sectors
    }

    pub fn operator(&self) -> CMatrix {
        let d = self.sectors.dim();
        self.sectors
            .projectors()
            .iter()
            .zip(&self.eigenvalues)
            .fold(CMatrix::zeros(d, d), |acc, (p, &l)| acc + p * l)
    }

    /// Largest `‖[Λ, X]‖_F` over the algebra's basis.
    pub fn max_commutator(&self, algebra: &OperatorAlgebra) -> f64 {
        let l = self.operator();
        algebra
            .basis()
            .iter()
            .map(|x| (&l * x - x * &l).norm())
            .fold(0.0, f64::max)
    }
}

/// Numerical check of `𝒜 = 𝒜″`, `𝒜′ ⊆ 𝒜` and `𝒵 = 𝒜′` for `𝒜 = 𝒫′`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DualityReport {
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub center_dim: usize,
    pub bicommutant_residual: f64,
    pub commutant_in_algebra_residual: f64,
    pub center_commutant_residual: f64,
    pub algebra_is_bicommutant: bool,
    pub commutant_in_algebra: bool,
    pub center_is_commutant: bool,
}

impl DualityReport {
    pub fn passes(&self) -> bool {
        self.algebra_is_bicommutant && self.commutant_in_algebra && self.center_is_commutant
    }
}

/// Tolerance used by [`verify_duality`].
pub const DUALITY_TOL: f64 = 1e-9;

pub fn verify_duality(projset: &ProjectorSet) -> Result<DualityReport> {
    let algebra = generated_algebra(projset)?;
    let comm = commutant_in(algebra.dim(), algebra.basis())?;
    let bicomm = commutant_in(comm.dim(), comm.basis())?;
    let z = algebra.intersect(&comm)?;

    let bicommutant_residual = algebra.equality_residual(&bicomm);
    let commutant_in_algebra_residual = algebra.containment_residual(&comm);
    let center_commutant_residual = z.equality_residual(&comm);
    Ok(DualityReport {
        algebra_dim: algebra.linear_dim(),
        commutant_dim: comm.linear_dim(),
        center_dim: z.linear_dim(),
        bicommutant_residual,
        commutant_in_algebra_residual,
        center_commutant_residual,
        algebra_is_bicommutant: bicomm.linear_dim() == algebra.linear_dim()
            && bicommutant_residual <= DUALITY_TOL,
        commutant_in_algebra: commutant_in_algebra_residual <= DUALITY_TOL,
        center_is_commutant: z.linear_dim() == comm.linear_dim()
            && center_commutant_residual <= DUALITY_TOL,
    })
}
