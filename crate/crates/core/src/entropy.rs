//! Von Neumann entropy (in nats, `k = 1`) and the entropy relations between a
//! state, its Lüders dephasing and its modified representative:
//! `S(ρ) ≤ S(ρ̂_L) ≤ S(ρ̂_mod)`. The modified representative is used as the
//! maximum-entropy proxy for the experimental entropy; the difference
//! `S(ρ̂_mod) − S(ρ̂_L)` is reported as the Jaynes gap.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{random_density_with_rank, random_unitary, seeded, SeededRng};
use crate::reduction::{equivalent_modified, luders_dephase, modified_reduce, EquivalenceClassRep};
use crate::states::{ApparatusProjectorSet, DensityOperator};
use crate::tensor_space::{to_pairs, CMatrix, CVector, Complex};

/// Eigenvalues in `[-CLAMP, 0)` are treated as zero.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;
/// Slack allowed in the ordering chain, per inequality.
pub const ORDERING_TOL: f64 = 1e-9;
/// Tolerance on the block-decomposition identity.
pub const DECOMPOSITION_TOL: f64 = 1e-8;
/// Slack allowed when comparing sample entropies with the representative.
pub const MAX_ENTROPY_TOL: f64 = 1e-8;

/// `S(ρ) = −Σ λ ln λ` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    entropy_of_spectrum(&rho.spectrum().values)
}

fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -EIGENVALUE_CLAMP {
            return Err(Error::NotPositive { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s.max(0.0))
}

/// Shannon entropy of a probability vector (zeros skipped).
pub fn shannon_entropy(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorEntropy {
    pub index: usize,
    pub weight: f64,
    /// `S(ρ_i^B)`.
    pub entropy_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub s_rho: f64,
    pub s_luders: f64,
    pub s_modified: f64,
    /// `S(ρ̂_mod) − S(ρ̂_L)`.
    pub jaynes_gap: f64,
    pub sectors: Vec<SectorEntropy>,
    /// `|S(ρ̂_mod) − Σ w_i (ln d_i − ln w_i + S(ρ_i^B))|`.
    pub decomposition_residual: f64,
}

/// `Σ w_i (ln d_i^A + S(ρ_i^B)) + H({w_i})`, the entropy of a block sum of
/// products.
pub fn decomposed_entropy(rep: &EquivalenceClassRep) -> Result<f64> {
    let mut s = 0.0;
    for sector in rep.sectors() {
        let d = rep.apparatus().sector_dim(sector.index) as f64;
        s += sector.weight * (d.ln() + von_neumann_entropy(&sector.state_b)?);
    }
    Ok(s + shannon_entropy(&rep.weights()))
}

/// All three entropies, with the ordering and decomposition invariants
/// enforced.
pub fn entropy_chain(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
) -> Result<EntropyReport> {
    let luders = luders_dephase(rho, apparatus.lifted())?;
    let rep = modified_reduce(rho, apparatus)?;
    let s_rho = von_neumann_entropy(rho)?;
    let s_luders = von_neumann_entropy(&luders)?;
    let s_modified = von_neumann_entropy(rep.rho_hat())?;
    let sectors = rep
        .sectors()
        .iter()
        .map(|s| {
            Ok(SectorEntropy {
                index: s.index,
                weight: s.weight,
                entropy_b: von_neumann_entropy(&s.state_b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decomposition_residual = (s_modified - decomposed_entropy(&rep)?).abs();

    if s_rho > s_luders + ORDERING_TOL || s_luders > s_modified + ORDERING_TOL {
        return Err(Error::Invariant(format!(
            "entropy ordering violated: S(ρ)={s_rho}, S(luders)={s_luders}, S(modified)={s_modified}"
        )));
    }
    if decomposition_residual > DECOMPOSITION_TOL {
        return Err(Error::Invariant(format!(
            "entropy decomposition residual {decomposition_residual:.3e}"
        )));
    }
    Ok(EntropyReport {
        s_rho,
        s_luders,
        s_modified,
        jaynes_gap: s_modified - s_luders,
        sectors,
        decomposition_residual,
    })
}

/// `S(ρ̂_mod) − S(ρ̂_L)`.
pub fn jaynes_gap(rho: &DensityOperator, apparatus: &ApparatusProjectorSet) -> Result<f64> {
    let luders = luders_dephase(rho, apparatus.lifted())?;
    let rep = modified_reduce(rho, apparatus)?;
    Ok(von_neumann_entropy(rep.rho_hat())? - von_neumann_entropy(&luders)?)
}

/// Orthonormal basis of `M_i^A` as the columns of a `dim_a × d_i` matrix.
fn sector_frame(apparatus: &ApparatusProjectorSet, i: usize) -> CMatrix {
    CMatrix::from_columns(&apparatus.sector_bases()[i])
}

/// Random density operator on A supported in `M_i^A`.
fn random_sector_state(
    rng: &mut SeededRng,
    apparatus: &ApparatusProjectorSet,
    i: usize,
) -> CMatrix {
    let frame = sector_frame(apparatus, i);
    let d = frame.ncols();
    if rng.random_bool(0.25) {
        return apparatus.projector_a(i).unscale(d as f64);
    }
    let rank = rng.random_range(1..=d);
    let tau = random_density_with_rank(rng, d, rank);
    &frame * tau.matrix() * frame.adjoint()
}

/// `Σ w_i σ_i^A ⊗ ρ_i^B` with random `σ_i^A` in each `M_i^A`.
fn product_sample(rng: &mut SeededRng, rep: &EquivalenceClassRep) -> Result<CMatrix> {
    let space = rep.apparatus().space();
    let mut m = CMatrix::zeros(space.dim(), space.dim());
    for s in rep.sectors() {
        let sigma_a = random_sector_state(rng, rep.apparatus(), s.index);
        m += space
            .tensor_product(&sigma_a, s.state_b.matrix())?
            .scale(s.weight);
    }
    Ok(m)
}

/// Global pure state whose sector marginals on B equal `w_i ρ_i^B`, built by
/// purifying each conditional state into a random frame of `M_i^A` and
/// superposing sectors with random phases. `None` when some sector is too
/// small to purify its conditional state.
fn pure_sample(rng: &mut SeededRng, rep: &EquivalenceClassRep) -> Result<Option<CMatrix>> {
    let space = rep.apparatus().space();
    let mut psi = CVector::zeros(space.dim());
    for s in rep.sectors() {
        let spectrum = s.state_b.spectrum();
        let support: Vec<usize> = (0..spectrum.len())
            .filter(|&k| spectrum.values[k] > 1e-12)
            .collect();
        let frame = sector_frame(rep.apparatus(), s.index);
        let d = frame.ncols();
        if support.len() > d {
            return Ok(None);
        }
        let rotated = &frame * random_unitary(rng, d);
        let phase = Complex::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        for (slot, &k) in support.iter().enumerate() {
            let amp = phase * (s.weight * spectrum.values[k]).sqrt();
            let a_vec = rotated.column(slot).into_owned();
            psi += space.tensor_vectors(&a_vec, &spectrum.vector(k))? * amp;
        }
    }
    let n = psi.norm();
    Ok(Some(crate::tensor_space::outer(&psi.unscale(n))))
}

/// Draw `n` members of the modified equivalence class of `rep`.
///
/// Each sample is, at random, a product sample (random A-states inside each
/// `M_i^A`), a pure embedding with cross-sector coherence when sector
/// dimensions allow it, or a convex mixture of the two. Every sample is
/// checked against the modified relation before it is returned.
pub fn sample_equivalence_class(
    rep: &EquivalenceClassRep,
    n: usize,
    seed: u64,
) -> Result<Vec<DensityOperator>> {
    if n == 0 {
        return Err(Error::Precondition(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mode = rng.random_range(0..3u8);
        let m = match mode {
            0 => product_sample(&mut rng, rep)?,
            1 => match pure_sample(&mut rng, rep)? {
                Some(p) => p,
                None => product_sample(&mut rng, rep)?,
            },
            _ => {
                let a = product_sample(&mut rng, rep)?;
                let b = pure_sample(&mut rng, rep)?.unwrap_or_else(|| a.clone());
                let t: f64 = rng.random_range(0.0..1.0);
                a.scale(t) + b.scale(1.0 - t)
            }
        };
        let sigma = DensityOperator::from_trusted(m);
        let check = equivalent_modified(&sigma, rep.rho_hat(), rep.apparatus())?;
        if !check.equivalent {
            return Err(Error::Invariant(format!(
                "sampled state left the equivalence class (residual {:.3e})",
                check.residual
            )));
        }
        out.push(sigma);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntropyReport {
    pub samples: usize,
    pub representative_entropy: f64,
    pub max_sample_entropy: f64,
    /// `S(ρ̂) − max S(σ)`.
    pub min_gap: f64,
    /// Samples within `1e-9` of the representative's entropy.
    pub equality_count: usize,
}

/// Check `S(σ) ≤ S(ρ̂) + 1e-8` on `n` sampled class members.
pub fn verify_max_entropy(
    rep: &EquivalenceClassRep,
    n: usize,
    seed: u64,
) -> Result<MaxEntropyReport> {
    let bound = von_neumann_entropy(rep.rho_hat())?;
    let samples = sample_equivalence_class(rep, n, seed)?;
    let mut max_sample_entropy = f64::NEG_INFINITY;
    let mut equality_count = 0;
    for sigma in &samples {
        let s = von_neumann_entropy(sigma)?;
        if s > bound + MAX_ENTROPY_TOL {
            return Err(Error::MaxEntropyCounterexample {
                sample_entropy: s,
                bound,
                state: serde_json::to_string(&to_pairs(sigma.matrix())).expect("matrix serializes"),
            });
        }
        if (bound - s).abs() <= 1e-9 {
            equality_count += 1;
        }
        max_sample_entropy = max_sample_entropy.max(s);
    }
    Ok(MaxEntropyReport {
        samples: n,
        representative_entropy: bound,
        max_sample_entropy,
        min_gap: bound - max_sample_entropy,
        equality_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_pure;
    use crate::tensor_space::{diag, real_matrix, BipartiteSpace};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn bell_rho() -> (DensityOperator, ApparatusProjectorSet) {
        let space = BipartiteSpace::new(2, 2).unwrap();
        let psi = make_pure(
            space,
            real_matrix(2, 2, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]),
        )
        .unwrap();
        (
            psi.density(),
            ApparatusProjectorSet::rank_one(space).unwrap(),
        )
    }

    #[test]
    fn entropy_closed_forms() {
        let (rho, _) = bell_rho();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(5).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 5f64.ln()).abs() < 1e-12);
        // −(3/4)ln(3/4) − (1/4)ln(1/4)
        let want = -(0.75f64 * 0.75f64.ln()) - 0.25 * 0.25f64.ln();
        let d = DensityOperator::new(diag(&[0.75, 0.25])).unwrap();
        assert!((von_neumann_entropy(&d).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.562_335_144_618_9).abs() < 1e-12);
    }

    #[test]
    fn bell_chain() {
        let (rho, app) = bell_rho();
        let r = entropy_chain(&rho, &app).unwrap();
        assert!(r.s_rho.abs() < 1e-12);
        assert!((r.s_luders - LN_2).abs() < 1e-12);
        assert!((r.s_modified - LN_2).abs() < 1e-12);
        assert!(r.jaynes_gap.abs() < 1e-12);
    }

    #[test]
    fn plus_on_a_dephases_in_a_only() {
        let space = BipartiteSpace::new(2, 2).unwrap();
        let psi = make_pure(
            space,
            real_matrix(2, 2, &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]),
        )
        .unwrap();
        let app = ApparatusProjectorSet::rank_one(space).unwrap();
        let r = entropy_chain(&psi.density(), &app).unwrap();
        assert!(r.s_rho.abs() < 1e-12);
        assert!((r.s_luders - LN_2).abs() < 1e-12);
        assert!((r.s_modified - LN_2).abs() < 1e-12);
    }

    #[test]
    fn gap_for_pure_block_in_two_dimensional_sector() {
        // Sector {0,1} holds (|0⟩+|1⟩)|0⟩/√3·√2 with weight 2/3; Lüders keeps
        // it pure, the modified channel spreads it over M_0^A: gap = w ln 2.
        let space = BipartiteSpace::new(3, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let psi = make_pure(space, real_matrix(3, 2, &[s, 0.0, s, 0.0, 0.0, s])).unwrap();
        let app = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2]]).unwrap();
        let gap = jaynes_gap(&psi.density(), &app).unwrap();
        assert!((gap - 2.0 / 3.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_has_equal_entropies() {
        let (rho, app) = bell_rho();
        let rep = modified_reduce(&rho, &app).unwrap();
        let r = entropy_chain(rep.rho_hat(), &app).unwrap();
        assert!((r.s_rho - r.s_modified).abs() < 1e-12);
        assert!(jaynes_gap(rep.rho_hat(), &app).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sampler_respects_class_and_bound() {
        let space = BipartiteSpace::new(3, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let h = s * FRAC_1_SQRT_2;
        let psi = make_pure(space, real_matrix(3, 2, &[s, 0.0, h, h, 0.0, s])).unwrap();
        let app = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2]]).unwrap();
        let rep = modified_reduce(&psi.density(), &app).unwrap();
        let bound = von_neumann_entropy(rep.rho_hat()).unwrap();
        let samples = sample_equivalence_class(&rep, 50, 11).unwrap();
        assert_eq!(samples.len(), 50);
        for sigma in &samples {
            assert!(
                equivalent_modified(sigma, rep.rho_hat(), &app)
                    .unwrap()
                    .equivalent
            );
            assert!(von_neumann_entropy(sigma).unwrap() <= bound + MAX_ENTROPY_TOL);
        }
        let report = verify_max_entropy(&rep, 50, 11).unwrap();
        assert!(report.min_gap >= -MAX_ENTROPY_TOL);
    }

    #[test]
    fn rank_one_sectors_leave_no_freedom_for_product_samples() {
        let (rho, app) = bell_rho();
        let rep = modified_reduce(&rho, &app).unwrap();
        for sigma in sample_equivalence_class(&rep, 20, 5).unwrap() {
            // Only cross-sector coherences may differ.
            let diff = sigma.matrix() - rep.rho_hat().matrix();
            for i in 0..2 {
                let p = app.projector(i);
                assert!((p * &diff * p).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let (rho, app) = bell_rho();
        let rep = modified_reduce(&rho, &app).unwrap();
        assert!(matches!(
            verify_max_entropy(&rep, 0, 1),
            Err(Error::Precondition(_))
        ));
    }
}
