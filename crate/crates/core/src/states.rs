//! States and projector sets: pure bipartite states with their relative-state
//! expansion, validated density operators, exhaustive orthogonal projector
//! sets, apparatus projectors of the form `P_i^A ⊗ 1_B`, and conditional
//! states of B given an apparatus sector.

use crate::error::{Error, ProjectorViolation, Result};
use crate::tensor_space::{
    check_finite, expect_square, hermitian_eigen, hermitian_part, hermitian_residual,
    hermitian_tolerance, outer, BipartiteSpace, CMatrix, CVector, Complex, Spectrum,
};

/// Window within which constructors silently renormalize their input.
pub const NORMALIZATION_WINDOW: f64 = 1e-6;
/// Weights at or below this are treated as unoccupied sectors.
pub const OCCUPATION_EPS: f64 = 1e-12;
/// Density-operator trace tolerance.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Projector-set invariant tolerance (Frobenius residuals).
pub const PROJECTOR_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validate and wrap a matrix. The stored matrix is the Hermitian part of
    /// the input.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        check_finite(&matrix)?;
        let residual = hermitian_residual(&matrix);
        if residual > hermitian_tolerance(&matrix) {
            return Err(Error::NotHermitian { residual });
        }
        let matrix = hermitian_part(&matrix);
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let min = hermitian_eigen(&matrix).min();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// Wrap a matrix known to be a density operator up to rounding.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    /// `|ψ⟩⟨ψ|` for a vector normalized within the auto-normalization window.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let psi = normalize_within_window(psi)?;
        Ok(Self::from_trusted(outer(&psi)))
    }

    /// `1/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            matrix: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_eigen(&self.matrix)
    }

    /// Frobenius distance to another operator.
    pub fn distance(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

fn normalize_within_window(v: &CVector) -> Result<CVector> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (norm - 1.0).abs() > NORMALIZATION_WINDOW {
        return Err(Error::NotNormalized { norm });
    }
    Ok(v.unscale(norm))
}

/// Pure state `Σ c_{αβ} |α⟩|β⟩` on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: BipartiteSpace,
    /// `dim_a × dim_b`, row α holds the coefficients of the relative state.
    coefficients: CMatrix,
}

/// Unnormalized B-vector paired with A-basis vector `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeState {
    pub alpha: usize,
    pub vector: CVector,
    /// `‖φ_α‖²`, the probability of A-basis state `alpha`.
    pub weight: f64,
}

impl RelativeState {
    /// Zero rows are reported rather than rejected.
    pub fn is_zero(&self) -> bool {
        self.weight == 0.0
    }
}

/// Build a pure state from its `dim_a × dim_b` coefficient tensor.
pub fn make_pure(space: BipartiteSpace, coefficients: CMatrix) -> Result<PureState> {
    if coefficients.nrows() != space.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: space.dim_a(),
            found: coefficients.nrows(),
        });
    }
    if coefficients.ncols() != space.dim_b() {
        return Err(Error::DimensionMismatch {
            expected: space.dim_b(),
            found: coefficients.ncols(),
        });
    }
    check_finite(&coefficients)?;
    let norm = coefficients.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (norm - 1.0).abs() > NORMALIZATION_WINDOW {
        return Err(Error::NotNormalized { norm });
    }
    Ok(PureState {
        space,
        coefficients: coefficients.unscale(norm),
    })
}

impl PureState {
    /// Build from a global state vector in A-major order.
    pub fn from_vector(space: BipartiteSpace, psi: &CVector) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: psi.len(),
            });
        }
        let c = CMatrix::from_fn(space.dim_a(), space.dim_b(), |a, b| psi[space.index(a, b)]);
        make_pure(space, c)
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn coefficients(&self) -> &CMatrix {
        &self.coefficients
    }

    /// Global state vector in A-major order.
    pub fn vector(&self) -> CVector {
        let s = self.space;
        CVector::from_fn(s.dim(), |g, _| {
            self.coefficients[(g / s.dim_b(), g % s.dim_b())]
        })
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_trusted(outer(&self.vector()))
    }

    /// `|φ_α⟩ = Σ_β c_{αβ} |β⟩` and its squared norm.
    pub fn relative_state(&self, alpha: usize) -> Result<RelativeState> {
        if alpha >= self.space.dim_a() {
            return Err(Error::IndexOutOfRange {
                index: alpha,
                size: self.space.dim_a(),
            });
        }
        let vector: CVector = self.coefficients.row(alpha).transpose();
        let weight = vector.norm_squared();
        Ok(RelativeState {
            alpha,
            vector,
            weight,
        })
    }

    /// Relative states for every A-basis vector, zero rows included.
    pub fn relative_expansion(&self) -> Vec<RelativeState> {
        (0..self.space.dim_a())
            .map(|a| self.relative_state(a).expect("alpha in range"))
            .collect()
    }
}

/// `Σ_α |α⟩ ⊗ |φ_α⟩`.
pub fn reassemble(space: BipartiteSpace, expansion: &[RelativeState]) -> CVector {
    let mut psi = CVector::zeros(space.dim());
    for rel in expansion {
        for b in 0..space.dim_b() {
            psi[space.index(rel.alpha, b)] += rel.vector[b];
        }
    }
    psi
}

/// Exhaustive set of mutually orthogonal Hermitian projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    projectors: Vec<CMatrix>,
    labels: Vec<String>,
}

/// Check the projector-set invariants and return the validated set, or the
/// first violated invariant with its residual.
pub fn validate_projector_set(
    candidates: Vec<CMatrix>,
) -> Result<ProjectorSet, ProjectorViolation> {
    let labels = (0..candidates.len()).map(|i| i.to_string()).collect();
    ProjectorSet::with_labels(candidates, labels)
}

impl ProjectorSet {
    pub fn with_labels(
        candidates: Vec<CMatrix>,
        labels: Vec<String>,
    ) -> Result<Self, ProjectorViolation> {
        let first = candidates.first().ok_or(ProjectorViolation::Empty)?;
        let dim = first.nrows();
        for (index, p) in candidates.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(ProjectorViolation::Shape {
                    index,
                    rows: p.nrows(),
                    cols: p.ncols(),
                    dim,
                });
            }
        }
        for (index, p) in candidates.iter().enumerate() {
            let residual = hermitian_residual(p);
            if !(residual <= PROJECTOR_TOL) {
                return Err(ProjectorViolation::NotHermitian { index, residual });
            }
            let residual = (p * p - p).norm();
            if !(residual <= PROJECTOR_TOL) {
                return Err(ProjectorViolation::NotIdempotent { index, residual });
            }
        }
        for i in 0..candidates.len() {
            for j in (i + 1)..candidates.len() {
                let residual = (candidates[i].adjoint() * &candidates[j]).norm();
                if residual > PROJECTOR_TOL {
                    return Err(ProjectorViolation::NotOrthogonal { i, j, residual });
                }
            }
        }
        let sum = candidates
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
        let residual = (sum - CMatrix::identity(dim, dim)).norm();
        if residual > PROJECTOR_TOL {
            return Err(ProjectorViolation::Incomplete { residual });
        }
        let mut labels = labels;
        labels.resize_with(candidates.len(), String::new);
        Ok(Self {
            projectors: candidates,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn projector(&self, i: usize) -> &CMatrix {
        &self.projectors[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `tr P_i`, rounded to the nearest integer.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect()
    }
}

/// Apparatus projectors `P_i = P_i^A ⊗ 1_B` built from orthonormal A-vectors.
///
/// The sector bases also describe the subspaces `M_i^A` in which a selected
/// outcome's A-state may lie.
#[derive(Debug, Clone, PartialEq)]
pub struct ApparatusProjectorSet {
    space: BipartiteSpace,
    sector_bases: Vec<Vec<CVector>>,
    projectors_a: Vec<CMatrix>,
    lifted: ProjectorSet,
}

/// Build `P_i^A = Σ_{α∈i} |α⟩⟨α|` for each sector and lift to `P_i^A ⊗ 1_B`.
pub fn lift_apparatus_projectors(
    space: BipartiteSpace,
    sector_bases: Vec<Vec<CVector>>,
) -> Result<ApparatusProjectorSet> {
    if sector_bases.is_empty() {
        return Err(ProjectorViolation::Empty.into());
    }
    let mut all = Vec::new();
    for (index, sector) in sector_bases.iter().enumerate() {
        if sector.is_empty() {
            return Err(ProjectorViolation::EmptySector { index }.into());
        }
        for v in sector {
            if v.len() != space.dim_a() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim_a(),
                    found: v.len(),
                });
            }
            all.push(v);
        }
    }
    let n = all.len();
    let gram = CMatrix::from_fn(n, n, |i, j| all[i].dotc(all[j]));
    let residual = (gram - CMatrix::identity(n, n)).norm();
    if residual > PROJECTOR_TOL {
        return Err(ProjectorViolation::NotOrthonormal { residual }.into());
    }
    if n != space.dim_a() {
        return Err(ProjectorViolation::IncompleteBasis {
            count: n,
            dim: space.dim_a(),
        }
        .into());
    }
    let projectors_a: Vec<CMatrix> = sector_bases
        .iter()
        .map(|sector| {
            sector
                .iter()
                .fold(CMatrix::zeros(space.dim_a(), space.dim_a()), |acc, v| {
                    acc + outer(v)
                })
        })
        .collect();
    let lifted = projectors_a
        .iter()
        .map(|p| space.lift_a(p))
        .collect::<Result<Vec<_>>>()?;
    let lifted = validate_projector_set(lifted)?;
    Ok(ApparatusProjectorSet {
        space,
        sector_bases,
        projectors_a,
        lifted,
    })
}

impl ApparatusProjectorSet {
    /// Sectors given as groups of computational A-basis indices.
    pub fn from_index_sectors(space: BipartiteSpace, sectors: &[Vec<usize>]) -> Result<Self> {
        let mut bases = Vec::with_capacity(sectors.len());
        for sector in sectors {
            let mut vs = Vec::with_capacity(sector.len());
            for &alpha in sector {
                if alpha >= space.dim_a() {
                    return Err(Error::IndexOutOfRange {
                        index: alpha,
                        size: space.dim_a(),
                    });
                }
                vs.push(crate::tensor_space::basis_vector(space.dim_a(), alpha));
            }
            bases.push(vs);
        }
        lift_apparatus_projectors(space, bases)
    }

    /// One sector per computational A-basis vector.
    pub fn rank_one(space: BipartiteSpace) -> Result<Self> {
        let sectors: Vec<Vec<usize>> = (0..space.dim_a()).map(|a| vec![a]).collect();
        Self::from_index_sectors(space, &sectors)
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.projectors_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors_a.is_empty()
    }

    pub fn sector_bases(&self) -> &[Vec<CVector>] {
        &self.sector_bases
    }

    /// `P_i^A`.
    pub fn projector_a(&self, i: usize) -> &CMatrix {
        &self.projectors_a[i]
    }

    /// `P_i^A ⊗ 1_B`.
    pub fn projector(&self, i: usize) -> &CMatrix {
        self.lifted.projector(i)
    }

    pub fn lifted(&self) -> &ProjectorSet {
        &self.lifted
    }

    /// `d_i^A = tr P_i^A`.
    pub fn sector_dim(&self, i: usize) -> usize {
        self.sector_bases[i].len()
    }

    pub fn sector_dims(&self) -> Vec<usize> {
        self.sector_bases.iter().map(Vec::len).collect()
    }

    pub(crate) fn check_space(&self, dim: usize) -> Result<()> {
        if dim != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    /// `tr_A(P_i X)`, computed without forming the lifted product.
    pub fn sector_marginal(&self, x: &CMatrix, i: usize) -> Result<CMatrix> {
        expect_square(x, self.space.dim())?;
        let (da, db) = (self.space.dim_a(), self.space.dim_b());
        let pa = &self.projectors_a[i];
        let mut out = CMatrix::zeros(db, db);
        for a in 0..da {
            for g in 0..da {
                let p = pa[(a, g)];
                if p == Complex::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..db {
                    for bp in 0..db {
                        out[(b, bp)] += p * x[(g * db + b, a * db + bp)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `w_i = tr(ρ P_i)` for every sector.
    pub fn weights(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        self.check_space(rho.dim())?;
        (0..self.len())
            .map(|i| Ok(self.sector_marginal(rho.matrix(), i)?.trace().re))
            .collect()
    }
}

/// Outcome probability and conditional state of B for one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    pub weight: f64,
    pub state: DensityOperator,
}

/// `w_i = tr(ρ P_i)` and `ρ_i^B = tr_A(P_i ρ)/w_i`.
pub fn conditional_state(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
    i: usize,
) -> Result<ConditionalState> {
    apparatus.check_space(rho.dim())?;
    if i >= apparatus.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            size: apparatus.len(),
        });
    }
    let marginal = apparatus.sector_marginal(rho.matrix(), i)?;
    let weight = marginal.trace().re;
    if weight <= OCCUPATION_EPS {
        return Err(Error::UnoccupiedSector { index: i, weight });
    }
    Ok(ConditionalState {
        weight,
        state: DensityOperator::from_trusted(marginal.unscale(weight)),
    })
}

/// Conditional states for all sectors; `None` marks unoccupied sectors.
pub fn conditional_states(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
) -> Result<Vec<Option<ConditionalState>>> {
    (0..apparatus.len())
        .map(|i| match conditional_state(rho, apparatus, i) {
            Ok(c) => Ok(Some(c)),
            Err(Error::UnoccupiedSector { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_space::{basis_vector, diag, real_matrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn space22() -> BipartiteSpace {
        BipartiteSpace::new(2, 2).unwrap()
    }

    fn bell() -> PureState {
        make_pure(
            space22(),
            real_matrix(2, 2, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]),
        )
        .unwrap()
    }

    #[test]
    fn basis_state_density() {
        let psi = make_pure(space22(), real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let rho = psi.density();
        let mut want = CMatrix::zeros(4, 4);
        want[(0, 0)] = c(1.0);
        assert_eq!(rho.matrix(), &want);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_density_entries() {
        let rho = bell().density();
        for &(r, cc) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.matrix()[(r, cc)] - c(0.5)).norm() < 1e-15);
        }
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn make_pure_rejects_bad_norm_and_shape() {
        let half = real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(matches!(
            make_pure(space22(), half),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(
            make_pure(space22(), CMatrix::zeros(2, 2)).unwrap_err(),
            Error::ZeroVector
        );
        assert!(matches!(
            make_pure(space22(), CMatrix::zeros(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        // Inside the window the input is renormalized.
        let near = real_matrix(2, 2, &[1.0 + 5e-7, 0.0, 0.0, 0.0]);
        let psi = make_pure(space22(), near).unwrap();
        assert!((psi.coefficients().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_relative_states() {
        let psi = bell();
        let r0 = psi.relative_state(0).unwrap();
        assert!((r0.weight - 0.5).abs() < 1e-15);
        assert!((r0.vector[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(r0.vector[1], c(0.0));
        let exp = psi.relative_expansion();
        assert_eq!(exp.len(), 2);
        assert!((exp[1].vector[1] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((reassemble(psi.space(), &exp) - psi.vector()).norm() < 1e-15);
        assert!(matches!(
            psi.relative_state(2),
            Err(Error::IndexOutOfRange { index: 2, size: 2 })
        ));
    }

    #[test]
    fn zero_row_relative_state_is_flagged() {
        let psi = make_pure(space22(), real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let exp = psi.relative_expansion();
        assert!(!exp[0].is_zero());
        assert!(exp[1].is_zero());
        assert_eq!(exp.iter().filter(|r| !r.is_zero()).count(), 1);
    }

    #[test]
    fn product_state_relative_states_are_parallel() {
        let a = [0.6, 0.8];
        let b = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        let coeffs = real_matrix(2, 2, &[a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]);
        let psi = make_pure(space22(), coeffs).unwrap();
        let bv = CVector::from_vec(vec![c(b[0]), c(b[1])]);
        for rel in psi.relative_expansion() {
            assert!((rel.vector.clone() - bv.scale(a[rel.alpha])).norm() < 1e-15);
        }
    }

    #[test]
    fn projector_set_validation() {
        assert!(validate_projector_set(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).is_ok());

        let err = validate_projector_set(vec![diag(&[1.0, 0.0]), diag(&[1.0, 1.0])]).unwrap_err();
        assert_eq!(
            err,
            ProjectorViolation::NotOrthogonal {
                i: 0,
                j: 1,
                residual: 1.0
            }
        );
        assert_eq!(err.invariant(), "orthogonality");

        let err = validate_projector_set(vec![diag(&[1.0, 0.0])]).unwrap_err();
        assert!(
            matches!(err, ProjectorViolation::Incomplete { residual } if (residual - 1.0).abs() < 1e-15)
        );

        let err =
            validate_projector_set(vec![real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])]).unwrap_err();
        assert!(matches!(
            err,
            ProjectorViolation::NotHermitian { index: 0, .. }
        ));

        let err = validate_projector_set(vec![diag(&[2.0, 0.0])]).unwrap_err();
        assert!(matches!(
            err,
            ProjectorViolation::NotIdempotent { index: 0, .. }
        ));

        assert_eq!(
            validate_projector_set(vec![]).unwrap_err(),
            ProjectorViolation::Empty
        );
    }

    #[test]
    fn lift_rank_one_sectors() {
        let app = ApparatusProjectorSet::rank_one(space22()).unwrap();
        assert_eq!(app.projector(0), &diag(&[1.0, 1.0, 0.0, 0.0]));
        assert_eq!(app.projector(1), &diag(&[0.0, 0.0, 1.0, 1.0]));
        assert_eq!(app.sector_dims(), vec![1, 1]);
    }

    #[test]
    fn lift_two_dimensional_sectors() {
        let space = BipartiteSpace::new(4, 3).unwrap();
        let app =
            ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(app.sector_dims(), vec![2, 2]);
        assert_eq!(app.sector_dims().iter().sum::<usize>(), space.dim_a());
        assert_eq!(app.lifted().ranks(), vec![6, 6]);
    }

    #[test]
    fn lift_rejects_duplicates_and_gaps() {
        let v0 = basis_vector(2, 0);
        let err = lift_apparatus_projectors(space22(), vec![vec![v0.clone()], vec![v0.clone()]])
            .unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidProjectorSet(ProjectorViolation::NotOrthonormal { .. })
        ));
        let err = lift_apparatus_projectors(space22(), vec![vec![v0]]).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidProjectorSet(ProjectorViolation::IncompleteBasis { count: 1, dim: 2 })
        ));
    }

    #[test]
    fn bell_conditional_states() {
        let rho = bell().density();
        let app = ApparatusProjectorSet::rank_one(space22()).unwrap();
        let c0 = conditional_state(&rho, &app, 0).unwrap();
        let c1 = conditional_state(&rho, &app, 1).unwrap();
        assert!((c0.weight - 0.5).abs() < 1e-15 && (c1.weight - 0.5).abs() < 1e-15);
        assert!((c0.state.matrix() - diag(&[1.0, 0.0])).norm() < 1e-15);
        assert!((c1.state.matrix() - diag(&[0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn unoccupied_sector_reported() {
        let psi = make_pure(space22(), real_matrix(2, 2, &[0.6, 0.8, 0.0, 0.0])).unwrap();
        let app = ApparatusProjectorSet::rank_one(space22()).unwrap();
        let rho = psi.density();
        assert!(matches!(
            conditional_state(&rho, &app, 1),
            Err(Error::UnoccupiedSector { index: 1, .. })
        ));
        let all = conditional_states(&rho, &app).unwrap();
        assert!(all[0].is_some() && all[1].is_none());
    }

    #[test]
    fn density_operator_validation() {
        assert!(matches!(
            DensityOperator::new(diag(&[0.5, 0.6])),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            DensityOperator::new(diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityOperator::new(real_matrix(2, 2, &[0.5, 0.1, 0.0, 0.5])),
            Err(Error::NotHermitian { .. })
        ));
        assert!(DensityOperator::new(diag(&[0.75, 0.25])).is_ok());
    }
}
