//! Reduction channels and the equivalence relations they represent.
//!
//! * Lüders dephasing `ρ ↦ Σ P_i ρ P_i` and selection `ρ ↦ P_i ρ P_i / w_i`.
//! * The modified reduction `ρ̂ = Σ w_i (P_i^A/d_i^A) ⊗ ρ_i^B`, which keeps
//!   only the sector weights and the conditional states of B and discards
//!   everything about where inside `M_i^A` the apparatus state lies.
//! * The standard relation (`P_i σ P_i = P_i ρ P_i` for all `i`; the block
//!   projections span the projectors of `𝒜 = 𝒫′`, so this is equivalent to
//!   agreeing on `tr(Pσ)` for every projector `P ∈ 𝒜`) and the modified
//!   relation (`tr_A(P_i σ) = tr_A(P_i ρ)` for all `i`, equivalent to agreeing
//!   on every `tr(P_i Q σ)` with `Q = 1_A ⊗ Q_B`).
//! * An indirect-reduction (DLP) variant whose conditional states are
//!   replaced by pure states. The original prescription is not given as a
//!   formula; here each conditional state is replaced by the projector onto
//!   its dominant eigenvector, and the result is labeled as a reconstruction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{
    conditional_states, ApparatusProjectorSet, DensityOperator, ProjectorSet, PureState,
    OCCUPATION_EPS,
};
use crate::tensor_space::{expect_square, outer, CMatrix};

/// Tolerance on equivalence residuals.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// One occupied sector of a canonical representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorRep {
    pub index: usize,
    /// `w_i = tr(ρ P_i)`.
    pub weight: f64,
    /// `P_i^A / d_i^A`.
    pub state_a: DensityOperator,
    /// `tr_A(P_i ρ) / w_i`.
    pub state_b: DensityOperator,
}

/// Canonical (maximum-entropy) representative `ρ̂` of a modified
/// equivalence class.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceClassRep {
    apparatus: ApparatusProjectorSet,
    sectors: Vec<SectorRep>,
    rho_hat: DensityOperator,
}

/// Residuals of the representative's defining invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepResiduals {
    pub weight_sum: f64,
    pub reconstruction: f64,
    pub commutator: f64,
    pub idempotence: f64,
}

impl EquivalenceClassRep {
    /// Assemble `Σ w_i (P_i^A/d_i^A) ⊗ ρ_i^B` from weights and conditional
    /// states of B. Sectors may be listed in any order; unlisted sectors are
    /// unoccupied.
    pub fn from_parts(
        apparatus: &ApparatusProjectorSet,
        parts: Vec<(usize, f64, DensityOperator)>,
    ) -> Result<Self> {
        let space = apparatus.space();
        let mut sectors = Vec::with_capacity(parts.len());
        let mut rho_hat = CMatrix::zeros(space.dim(), space.dim());
        for (index, weight, state_b) in parts {
            if index >= apparatus.len() {
                return Err(Error::IndexOutOfRange {
                    index,
                    size: apparatus.len(),
                });
            }
            expect_square(state_b.matrix(), space.dim_b())?;
            if weight <= OCCUPATION_EPS {
                continue;
            }
            let d = apparatus.sector_dim(index) as f64;
            let state_a = DensityOperator::from_trusted(apparatus.projector_a(index).unscale(d));
            rho_hat += space
                .tensor_product(state_a.matrix(), state_b.matrix())?
                .scale(weight);
            sectors.push(SectorRep {
                index,
                weight,
                state_a,
                state_b,
            });
        }
        sectors.sort_by_key(|s| s.index);
        let total: f64 = sectors.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!("sector weights sum to {total}")));
        }
        Ok(Self {
            apparatus: apparatus.clone(),
            sectors,
            rho_hat: DensityOperator::from_trusted(rho_hat),
        })
    }

    pub fn apparatus(&self) -> &ApparatusProjectorSet {
        &self.apparatus
    }

    /// Occupied sectors in index order.
    pub fn sectors(&self) -> &[SectorRep] {
        &self.sectors
    }

    pub fn sector(&self, index: usize) -> Option<&SectorRep> {
        self.sectors.iter().find(|s| s.index == index)
    }

    pub fn rho_hat(&self) -> &DensityOperator {
        &self.rho_hat
    }

    /// Weights for all sectors, zero for unoccupied ones.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.apparatus.len()];
        for s in &self.sectors {
            w[s.index] = s.weight;
        }
        w
    }

    pub fn residuals(&self) -> Result<RepResiduals> {
        let space = self.apparatus.space();
        let weight_sum = (self.sectors.iter().map(|s| s.weight).sum::<f64>() - 1.0).abs();
        let mut rebuilt = CMatrix::zeros(space.dim(), space.dim());
        for s in &self.sectors {
            rebuilt += space
                .tensor_product(s.state_a.matrix(), s.state_b.matrix())?
                .scale(s.weight);
        }
        let reconstruction = (rebuilt - self.rho_hat.matrix()).norm();
        let commutator = (0..self.apparatus.len())
            .map(|i| {
                let p = self.apparatus.projector(i);
                (p * self.rho_hat.matrix() - self.rho_hat.matrix() * p).norm()
            })
            .fold(0.0, f64::max);
        let again = modified_reduce(&self.rho_hat, &self.apparatus)?;
        let idempotence = again.rho_hat.distance(&self.rho_hat);
        Ok(RepResiduals {
            weight_sum,
            reconstruction,
            commutator,
            idempotence,
        })
    }
}

/// `Σ P_i ρ P_i`.
pub fn luders_dephase(rho: &DensityOperator, projset: &ProjectorSet) -> Result<DensityOperator> {
    expect_square(rho.matrix(), projset.dim())?;
    let m = projset
        .projectors()
        .iter()
        .fold(CMatrix::zeros(rho.dim(), rho.dim()), |acc, p| {
            acc + p * rho.matrix() * p
        });
    Ok(DensityOperator::from_trusted(m))
}

/// Outcome probability and post-selection state.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub weight: f64,
    pub state: DensityOperator,
}

/// `w_i = tr(ρ P_i)`, `ρ_i = P_i ρ P_i / w_i`.
pub fn luders_select(rho: &DensityOperator, projset: &ProjectorSet, i: usize) -> Result<Selection> {
    expect_square(rho.matrix(), projset.dim())?;
    if i >= projset.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            size: projset.len(),
        });
    }
    let p = projset.projector(i);
    let block = p * rho.matrix() * p;
    let weight = block.trace().re;
    if weight <= OCCUPATION_EPS {
        return Err(Error::UnoccupiedSector { index: i, weight });
    }
    Ok(Selection {
        weight,
        state: DensityOperator::from_trusted(block.unscale(weight)),
    })
}

/// Canonical representative `ρ̂ = Σ w_i (P_i^A/d_i^A) ⊗ ρ_i^B`.
pub fn modified_reduce(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
) -> Result<EquivalenceClassRep> {
    apparatus.check_space(rho.dim())?;
    let parts = conditional_states(rho, apparatus)?
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i, c.weight, c.state)))
        .collect();
    EquivalenceClassRep::from_parts(apparatus, parts)
}

/// Outcome of an equivalence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub residual: f64,
}

impl Equivalence {
    fn from_residual(residual: f64) -> Self {
        Self {
            equivalent: residual <= EQUIVALENCE_TOL,
            residual,
        }
    }
}

/// Standard relation: `P_i σ P_i = P_i ρ P_i` for every sector.
pub fn equivalent_standard(
    sigma: &DensityOperator,
    rho: &DensityOperator,
    projset: &ProjectorSet,
) -> Result<Equivalence> {
    expect_square(sigma.matrix(), projset.dim())?;
    expect_square(rho.matrix(), projset.dim())?;
    let diff = sigma.matrix() - rho.matrix();
    let residual = projset
        .projectors()
        .iter()
        .map(|p| (p * &diff * p).norm())
        .fold(0.0, f64::max);
    Ok(Equivalence::from_residual(residual))
}

/// Modified relation: `tr_A(P_i σ) = tr_A(P_i ρ)` for every sector.
pub fn equivalent_modified(
    sigma: &DensityOperator,
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
) -> Result<Equivalence> {
    apparatus.check_space(sigma.dim())?;
    apparatus.check_space(rho.dim())?;
    let diff = sigma.matrix() - rho.matrix();
    let mut residual: f64 = 0.0;
    for i in 0..apparatus.len() {
        residual = residual.max(apparatus.sector_marginal(&diff, i)?.norm());
    }
    Ok(Equivalence::from_residual(residual))
}

/// Whether two representatives coincide, using `1e-9 · (1 + ‖a‖_F)`.
pub fn representatives_equal(a: &DensityOperator, b: &DensityOperator) -> bool {
    a.distance(b) <= EQUIVALENCE_TOL * (1.0 + a.matrix().norm())
}

/// Per-sector comparison of the Lüders post-selection state with the
/// modified representative's sector state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorComparison {
    pub index: usize,
    pub weight: f64,
    /// `‖tr_B(P_i ρ P_i)/w_i − P_i^A/d_i^A‖_F`.
    pub a_block_distance: f64,
    /// `‖tr_A(P_i ρ P_i)/w_i − ρ_i^B‖_F`; zero by construction.
    pub b_conditional_distance: f64,
}

/// Compare the two channels sector by sector (occupied sectors only).
pub fn compare_sectors(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
) -> Result<Vec<SectorComparison>> {
    let rep = modified_reduce(rho, apparatus)?;
    let space = apparatus.space();
    rep.sectors()
        .iter()
        .map(|s| {
            let p = apparatus.projector(s.index);
            let block = (p * rho.matrix() * p).unscale(s.weight);
            let a_marginal = space.partial_trace_b(&block)?;
            let b_marginal = space.partial_trace_a(&block)?;
            Ok(SectorComparison {
                index: s.index,
                weight: s.weight,
                a_block_distance: (a_marginal - s.state_a.matrix()).norm(),
                b_conditional_distance: (b_marginal - s.state_b.matrix()).norm(),
            })
        })
        .collect()
}

/// Sector of a [`DlpReduction`].
#[derive(Debug, Clone, PartialEq)]
pub struct DlpSector {
    pub index: usize,
    pub weight: f64,
    pub state_a: DensityOperator,
    /// The indirect-reduction conditional state `tr_A(P_i ρ)/w_i`.
    pub conditional: DensityOperator,
    /// Projector onto the dominant eigenvector of `conditional`.
    pub purified: DensityOperator,
    /// `1 − tr((ρ_i^B)²)`.
    pub purity_deficit: f64,
}

/// Representative with pure conditional states (dominant-eigenvector
/// reconstruction of the indirect-reduction prescription).
#[derive(Debug, Clone, PartialEq)]
pub struct DlpReduction {
    pub sectors: Vec<DlpSector>,
    pub rho_hat: DensityOperator,
}

impl DlpReduction {
    /// Marks the output as a reconstruction rather than a closed formula.
    pub const LABEL: &'static str = "dlp (dominant-eigenvector reconstruction)";

    pub fn max_purity_deficit(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| s.purity_deficit)
            .fold(0.0, f64::max)
    }
}

pub fn dlp_reduce(psi: &PureState, apparatus: &ApparatusProjectorSet) -> Result<DlpReduction> {
    if psi.space() != apparatus.space() {
        return Err(Error::DimensionMismatch {
            expected: apparatus.space().dim(),
            found: psi.space().dim(),
        });
    }
    let rep = modified_reduce(&psi.density(), apparatus)?;
    let space = apparatus.space();
    let mut rho_hat = CMatrix::zeros(space.dim(), space.dim());
    let mut sectors = Vec::with_capacity(rep.sectors().len());
    for s in rep.sectors() {
        let spectrum = s.state_b.spectrum();
        let purified = DensityOperator::from_trusted(outer(&spectrum.vector(0)));
        rho_hat += space
            .tensor_product(s.state_a.matrix(), purified.matrix())?
            .scale(s.weight);
        sectors.push(DlpSector {
            index: s.index,
            weight: s.weight,
            state_a: s.state_a.clone(),
            conditional: s.state_b.clone(),
            purity_deficit: 1.0 - s.state_b.purity(),
            purified,
        });
    }
    Ok(DlpReduction {
        sectors,
        rho_hat: DensityOperator::from_trusted(rho_hat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_pure, validate_projector_set};
    use crate::tensor_space::{diag, real_matrix, BipartiteSpace};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> PureState {
        make_pure(
            BipartiteSpace::new(2, 2).unwrap(),
            real_matrix(2, 2, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]),
        )
        .unwrap()
    }

    fn plus() -> DensityOperator {
        DensityOperator::new(real_matrix(2, 2, &[0.5, 0.5, 0.5, 0.5])).unwrap()
    }

    fn minus() -> DensityOperator {
        DensityOperator::new(real_matrix(2, 2, &[0.5, -0.5, -0.5, 0.5])).unwrap()
    }

    fn computational() -> ProjectorSet {
        validate_projector_set(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap()
    }

    #[test]
    fn dephasing_plus_state() {
        let out = luders_dephase(&plus(), &computational()).unwrap();
        assert!((out.matrix() - diag(&[0.5, 0.5])).norm() < 1e-15);
    }

    #[test]
    fn dephasing_fixed_points() {
        let rho = DensityOperator::new(diag(&[0.3, 0.7])).unwrap();
        assert_eq!(luders_dephase(&rho, &computational()).unwrap(), rho);
        let trivial = validate_projector_set(vec![CMatrix::identity(2, 2)]).unwrap();
        assert_eq!(luders_dephase(&plus(), &trivial).unwrap(), plus());
    }

    #[test]
    fn selection() {
        let s = luders_select(&plus(), &computational(), 0).unwrap();
        assert!((s.weight - 0.5).abs() < 1e-15);
        assert!((s.state.matrix() - diag(&[1.0, 0.0])).norm() < 1e-15);

        let fixed = DensityOperator::new(diag(&[1.0, 0.0])).unwrap();
        let s = luders_select(&fixed, &computational(), 0).unwrap();
        assert!((s.weight - 1.0).abs() < 1e-15);
        assert_eq!(s.state, fixed);

        assert!(matches!(
            luders_select(&fixed, &computational(), 1),
            Err(Error::UnoccupiedSector { index: 1, .. })
        ));
    }

    #[test]
    fn modified_bell() {
        let psi = bell();
        let app = ApparatusProjectorSet::rank_one(psi.space()).unwrap();
        let rep = modified_reduce(&psi.density(), &app).unwrap();
        assert!((rep.rho_hat().matrix() - diag(&[0.5, 0.0, 0.0, 0.5])).norm() < 1e-15);
        assert!(rep.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
        let r = rep.residuals().unwrap();
        assert!(r.reconstruction < 1e-15 && r.commutator < 1e-15 && r.idempotence < 1e-15);
    }

    #[test]
    fn modified_product_state() {
        // ρ_A = diag(0.5, 0.3, 0.2) commutes with the sectors {0,1},{2};
        // ρ̂ = (0.8·P_0/2 + 0.2·P_1) ⊗ ρ_B.
        let space = BipartiteSpace::new(3, 2).unwrap();
        let app = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2]]).unwrap();
        let rho_a = diag(&[0.5, 0.3, 0.2]);
        let rho_b = real_matrix(2, 2, &[0.6, 0.2, 0.2, 0.4]);
        let rho = DensityOperator::new(space.tensor_product(&rho_a, &rho_b).unwrap()).unwrap();
        let rep = modified_reduce(&rho, &app).unwrap();
        let want = space
            .tensor_product(&diag(&[0.4, 0.4, 0.2]), &rho_b)
            .unwrap();
        assert!((rep.rho_hat().matrix() - want).norm() < 1e-14);
    }

    #[test]
    fn standard_equivalence_examples() {
        let p = computational();
        let e = equivalent_standard(&minus(), &plus(), &p).unwrap();
        assert!(e.equivalent);
        assert!(
            equivalent_standard(&plus(), &plus(), &p)
                .unwrap()
                .equivalent
        );
        let d = DensityOperator::new(diag(&[0.9, 0.1])).unwrap();
        let e = equivalent_standard(&d, &plus(), &p).unwrap();
        assert!(!e.equivalent);
        assert!((e.residual - 0.4).abs() < 1e-15);
    }

    #[test]
    fn dlp_agrees_on_bell() {
        let psi = bell();
        let app = ApparatusProjectorSet::rank_one(psi.space()).unwrap();
        let dlp = dlp_reduce(&psi, &app).unwrap();
        let rep = modified_reduce(&psi.density(), &app).unwrap();
        assert!(dlp.rho_hat.distance(rep.rho_hat()) < 1e-14);
        assert!(dlp.max_purity_deficit() < 1e-14);
    }

    #[test]
    fn dlp_differs_with_two_relative_directions() {
        // Sector {0,1} carries relative states |0⟩ and |+⟩.
        let space = BipartiteSpace::new(3, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let h = s * FRAC_1_SQRT_2;
        let psi = make_pure(space, real_matrix(3, 2, &[s, 0.0, h, h, 0.0, s])).unwrap();
        let app = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2]]).unwrap();
        let dlp = dlp_reduce(&psi, &app).unwrap();
        // (|0⟩⟨0| + |+⟩⟨+|)/2 has purity 3/4.
        assert!((dlp.sectors[0].purity_deficit - 0.25).abs() < 1e-12);
        let rep = modified_reduce(&psi.density(), &app).unwrap();
        assert!(dlp.rho_hat.distance(rep.rho_hat()) > 0.01);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let app = ApparatusProjectorSet::rank_one(BipartiteSpace::new(2, 2).unwrap()).unwrap();
        assert!(matches!(
            modified_reduce(&plus(), &app),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 2
            })
        ));
    }
}
