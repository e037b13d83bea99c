//! Closed-system dynamics on `A ⊗ B`, decoherence-time estimation, the
//! timescale inequality `τ_dec ≪ Δt ≪ τ_P`, the finite-candidate
//! predictability sieve and repeated-reduction entropy trajectories.

mod model;
mod sieve;

pub use model::{
    build_measurement_model, pointer_sectors, MeasurementModelConfig, PointerBasis, MODEL_DIM_CAP,
};
pub use sieve::{
    repeated_reduction_run, repeated_reduction_run_with, sieve, sieve_from, Channel,
    EntropyTrajectory, RunOptions, SieveCandidate, SieveReport, SIEVE_TIE_TOL,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{ApparatusProjectorSet, DensityOperator};
use crate::tensor_space::{
    check_finite, hermitian_part, hermitian_residual, hermitian_tolerance, spectral_decompose,
    BipartiteSpace, CMatrix, Complex, Spectrum,
};

/// Smallest initial interference norm accepted by the decoherence estimate.
pub const MIN_INITIAL_INTERFERENCE: f64 = 0.01;
/// Grid points the interference must stay below threshold.
pub const DECAY_PERSISTENCE: usize = 3;
/// Default factor for `≪`.
pub const TIMESCALE_FACTOR: f64 = 10.0;

/// `e^{−iHt}` for a fixed Hamiltonian, diagonalized once.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(hamiltonian: &CMatrix) -> Result<Self> {
        Ok(Self {
            spectrum: spectral_decompose(hamiltonian)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn unitary(&self, t: f64) -> CMatrix {
        self.spectrum.map(|e| Complex::from_polar(1.0, -e * t))
    }

    /// `e^{−iHt} ρ e^{iHt}`.
    pub fn evolve(&self, rho: &DensityOperator, t: f64) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        if !t.is_finite() {
            return Err(Error::NonFinite);
        }
        let u = self.unitary(t);
        Ok(DensityOperator::from_trusted(
            &u * rho.matrix() * u.adjoint(),
        ))
    }

    /// `ρ(t)` at every time of `times`, rotating into the eigenbasis once.
    pub fn evolve_many(
        &self,
        rho: &DensityOperator,
        times: &[f64],
    ) -> Result<Vec<DensityOperator>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let v = &self.spectrum.vectors;
        let e = &self.spectrum.values;
        let in_eigenbasis = v.adjoint() * rho.matrix() * v;
        times
            .iter()
            .map(|&t| {
                if !t.is_finite() {
                    return Err(Error::NonFinite);
                }
                let phased = CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
                    in_eigenbasis[(i, j)] * Complex::from_polar(1.0, -(e[i] - e[j]) * t)
                });
                Ok(DensityOperator::from_trusted(v * phased * v.adjoint()))
            })
            .collect()
    }
}

/// `ρ(t) = e^{−iHt} ρ e^{iHt}` (`ħ = 1`).
pub fn evolve(rho: &DensityOperator, hamiltonian: &CMatrix, t: f64) -> Result<DensityOperator> {
    Propagator::new(hamiltonian)?.evolve(rho, t)
}

/// Hamiltonian, initial state and time grid of a closed `A ⊗ B` model.
///
/// `environment_dim` records how many trailing levels of A belong to the
/// environment; decoherence is measured after tracing them out.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    space: BipartiteSpace,
    hamiltonian: CMatrix,
    initial: DensityOperator,
    times: Vec<f64>,
    environment_dim: usize,
}

impl EvolutionSpec {
    pub fn new(
        space: BipartiteSpace,
        hamiltonian: CMatrix,
        initial: DensityOperator,
        times: Vec<f64>,
        environment_dim: usize,
    ) -> Result<Self> {
        if hamiltonian.nrows() != space.dim() || hamiltonian.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: hamiltonian.nrows(),
            });
        }
        check_finite(&hamiltonian)?;
        let residual = hermitian_residual(&hamiltonian);
        if residual > hermitian_tolerance(&hamiltonian) {
            return Err(Error::NotHermitian { residual });
        }
        if initial.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: initial.dim(),
            });
        }
        if times.first() != Some(&0.0) {
            return Err(Error::Precondition("time grid must start at 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Precondition(
                "time grid must be strictly increasing".into(),
            ));
        }
        if environment_dim == 0 || !space.dim_a().is_multiple_of(environment_dim) {
            return Err(Error::Precondition(format!(
                "environment dimension {environment_dim} does not divide dim A = {}",
                space.dim_a()
            )));
        }
        Ok(Self {
            space,
            hamiltonian: hermitian_part(&hamiltonian),
            initial,
            times,
            environment_dim,
        })
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &DensityOperator {
        &self.initial
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn environment_dim(&self) -> usize {
        self.environment_dim
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::new(&self.hamiltonian)
    }

    pub fn with_initial(mut self, initial: DensityOperator) -> Result<Self> {
        if initial.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: initial.dim(),
            });
        }
        self.initial = initial;
        Ok(self)
    }
}

/// `‖ρ − Σ P_i ρ P_i‖_F / max(‖ρ‖_F, ε)`: the weight of the inter-sector
/// coherences.
pub fn interference_norm(rho: &DensityOperator, apparatus: &ApparatusProjectorSet) -> f64 {
    let m = rho.matrix();
    let mut diag = CMatrix::zeros(m.nrows(), m.ncols());
    for p in apparatus.lifted().projectors() {
        diag += p * m * p;
    }
    (m - diag).norm() / m.norm().max(f64::EPSILON)
}

/// Partial trace over the trailing `env_dim` levels of A.
pub fn trace_environment(m: &CMatrix, space: BipartiteSpace, env_dim: usize) -> Result<CMatrix> {
    if env_dim == 0 || !space.dim_a().is_multiple_of(env_dim) {
        return Err(Error::Precondition(format!(
            "environment dimension {env_dim} does not divide dim A = {}",
            space.dim_a()
        )));
    }
    let (dp, db) = (space.dim_a() / env_dim, space.dim_b());
    let n = dp * db;
    let mut out = CMatrix::zeros(n, n);
    for p in 0..dp {
        for b in 0..db {
            for pp in 0..dp {
                for bp in 0..db {
                    let mut s = Complex::new(0.0, 0.0);
                    for e in 0..env_dim {
                        s += m[((p * env_dim + e) * db + b, (pp * env_dim + e) * db + bp)];
                    }
                    out[(p * db + b, pp * db + bp)] = s;
                }
            }
        }
    }
    Ok(out)
}

/// Pointer projectors `Q_i` with `P_i^A = Q_i ⊗ 1_env`.
fn pointer_projectors(apparatus: &ApparatusProjectorSet, env_dim: usize) -> Result<Vec<CMatrix>> {
    let da = apparatus.space().dim_a();
    let dp = da / env_dim;
    (0..apparatus.len())
        .map(|i| {
            let pa = apparatus.projector_a(i);
            let q = CMatrix::from_fn(dp, dp, |r, c| {
                (0..env_dim)
                    .map(|e| pa[(r * env_dim + e, c * env_dim + e)])
                    .sum::<Complex>()
                    / env_dim as f64
            });
            let lifted = q.kronecker(&CMatrix::identity(env_dim, env_dim));
            let residual = (&lifted - pa).norm();
            if residual > 1e-9 {
                return Err(Error::Precondition(format!(
                    "sector {i} does not factor as pointer ⊗ 1_env (residual {residual:.3e})"
                )));
            }
            Ok(q)
        })
        .collect()
}

/// Interference norm of the state with the environment traced out; with
/// `env_dim = 1` this is [`interference_norm`].
///
/// Under closed dynamics that preserves the sectors the global norm is a
/// constant of motion, so decoherence only shows up in the reduced state.
pub fn environment_interference_norm(
    rho: &DensityOperator,
    apparatus: &ApparatusProjectorSet,
    env_dim: usize,
) -> Result<f64> {
    apparatus.check_space(rho.dim())?;
    if env_dim == 1 {
        return Ok(interference_norm(rho, apparatus));
    }
    let space = apparatus.space();
    let reduced = trace_environment(rho.matrix(), space, env_dim)?;
    let id_b = CMatrix::identity(space.dim_b(), space.dim_b());
    let mut diag = CMatrix::zeros(reduced.nrows(), reduced.ncols());
    for q in pointer_projectors(apparatus, env_dim)? {
        let p = q.kronecker(&id_b);
        diag += &p * &reduced * &p;
    }
    Ok((&reduced - diag).norm() / reduced.norm().max(f64::EPSILON))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceEstimate {
    /// `None` when the interference never decays within the grid.
    pub tau_dec: Option<f64>,
    pub initial_norm: f64,
    pub threshold: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

impl DecoherenceEstimate {
    pub fn is_unbounded(&self) -> bool {
        self.tau_dec.is_none()
    }
}

/// First grid time at which the (environment-traced) interference norm
/// drops below `1/e` of its initial value and stays there for
/// [`DECAY_PERSISTENCE`] consecutive grid points.
pub fn estimate_decoherence_time(
    spec: &EvolutionSpec,
    apparatus: &ApparatusProjectorSet,
) -> Result<DecoherenceEstimate> {
    apparatus.check_space(spec.space.dim())?;
    let propagator = spec.propagator()?;
    let initial_norm =
        environment_interference_norm(&spec.initial, apparatus, spec.environment_dim)?;
    if initial_norm <= MIN_INITIAL_INTERFERENCE {
        return Err(Error::Precondition(format!(
            "initial interference norm {initial_norm:.3e} leaves nothing to decay"
        )));
    }
    let norms = propagator
        .evolve_many(&spec.initial, &spec.times)?
        .iter()
        .map(|rho| environment_interference_norm(rho, apparatus, spec.environment_dim))
        .collect::<Result<Vec<_>>>()?;
    let threshold = initial_norm / std::f64::consts::E;
    let tau_dec = norms
        .windows(DECAY_PERSISTENCE)
        .position(|w| w.iter().all(|&n| n < threshold))
        .map(|k| spec.times[k]);
    Ok(DecoherenceEstimate {
        tau_dec,
        initial_norm,
        threshold,
        times: spec.times.clone(),
        norms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimescaleReport {
    pub tau_dec: Option<f64>,
    pub delta_t: f64,
    /// `None` means unbounded.
    pub tau_p: Option<f64>,
    pub factor: f64,
    /// `Δt / τ_dec`, `None` when `τ_dec` is unbounded.
    pub decoherence_ratio: Option<f64>,
    /// `τ_P / Δt`, `None` when `τ_P` is unbounded.
    pub stability_ratio: Option<f64>,
    pub decoherence_ok: bool,
    pub stability_ok: bool,
    pub passes: bool,
}

/// [`check_timescales_with`] at the default factor of 10.
pub fn check_timescales(
    tau_dec: Option<f64>,
    delta_t: f64,
    tau_p: Option<f64>,
) -> Result<TimescaleReport> {
    check_timescales_with(tau_dec, delta_t, tau_p, TIMESCALE_FACTOR)
}

/// `Δt ≥ f·τ_dec` and `τ_P ≥ f·Δt`. An unbounded `τ_dec` fails the first
/// inequality; an unbounded `τ_P` satisfies the second.
pub fn check_timescales_with(
    tau_dec: Option<f64>,
    delta_t: f64,
    tau_p: Option<f64>,
    factor: f64,
) -> Result<TimescaleReport> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !positive(delta_t)
        || !positive(factor)
        || !tau_dec.is_none_or(positive)
        || !tau_p.is_none_or(positive)
    {
        return Err(Error::Precondition(
            "timescales must be positive and finite".into(),
        ));
    }
    let decoherence_ok = tau_dec.is_some_and(|t| delta_t >= factor * t);
    let stability_ok = tau_p.is_none_or(|t| t >= factor * delta_t);
    Ok(TimescaleReport {
        tau_dec,
        delta_t,
        tau_p,
        factor,
        decoherence_ratio: tau_dec.map(|t| delta_t / t),
        stability_ratio: tau_p.map(|t| t / delta_t),
        decoherence_ok,
        stability_ok,
        passes: decoherence_ok && stability_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_pure;
    use crate::tensor_space::{basis_vector, pauli_x, real_matrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn rabi_oscillation() {
        let rho = DensityOperator::from_pure(&basis_vector(2, 0)).unwrap();
        for &t in &[0.0, 0.3, 1.1, 2.7] {
            let out = evolve(&rho, &pauli_x(), t).unwrap();
            assert!((out.matrix()[(1, 1)].re - t.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn batched_evolution_matches_single_steps() {
        let mut rng = crate::random::seeded(4);
        let h = crate::random::random_hermitian(&mut rng, 5);
        let rho = crate::random::random_density(&mut rng, 5);
        let prop = Propagator::new(&h).unwrap();
        let times = [0.0, 0.4, 2.5];
        for (t, out) in times.iter().zip(prop.evolve_many(&rho, &times).unwrap()) {
            assert!(out.distance(&prop.evolve(&rho, *t).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn trivial_and_commuting_evolution() {
        let rho = DensityOperator::new(crate::tensor_space::diag(&[0.7, 0.3])).unwrap();
        let zero = CMatrix::zeros(2, 2);
        assert!(evolve(&rho, &zero, 5.0).unwrap().distance(&rho) < 1e-14);
        let h = crate::tensor_space::pauli_z();
        assert!(evolve(&rho, &h, 3.0).unwrap().distance(&rho) < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let h = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            evolve(&rho, &h, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn interference_examples() {
        let space = BipartiteSpace::new(2, 1).unwrap();
        let app = ApparatusProjectorSet::rank_one(space).unwrap();
        let plus = make_pure(space, real_matrix(2, 1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        let n = interference_norm(&plus.density(), &app);
        assert!((n - FRAC_1_SQRT_2).abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!(interference_norm(&mixed, &app).abs() < 1e-15);
        assert!(
            (environment_interference_norm(&plus.density(), &app, 1).unwrap() - n).abs() < 1e-15
        );
    }

    #[test]
    fn timescale_examples() {
        assert!(
            check_timescales(Some(0.1), 1.0, Some(100.0))
                .unwrap()
                .passes
        );
        let r = check_timescales(Some(0.5), 1.0, Some(100.0)).unwrap();
        assert!(!r.decoherence_ok && r.stability_ok && !r.passes);
        let r = check_timescales(Some(0.1), 1.0, Some(5.0)).unwrap();
        assert!(r.decoherence_ok && !r.stability_ok);
        assert!(check_timescales(Some(0.1), 1.0, None).unwrap().passes);
        assert!(!check_timescales(None, 1.0, None).unwrap().passes);
        assert!(check_timescales(Some(-1.0), 1.0, None).is_err());
    }

    #[test]
    fn spec_validates_grid() {
        let space = BipartiteSpace::new(2, 1).unwrap();
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let h = CMatrix::zeros(2, 2);
        assert!(EvolutionSpec::new(space, h.clone(), rho.clone(), vec![0.0, 1.0], 1).is_ok());
        assert!(EvolutionSpec::new(space, h.clone(), rho.clone(), vec![0.1, 1.0], 1).is_err());
        assert!(EvolutionSpec::new(space, h.clone(), rho.clone(), vec![0.0, 1.0, 1.0], 1).is_err());
        assert!(EvolutionSpec::new(space, h, rho, vec![0.0], 3).is_err());
    }

    #[test]
    fn block_diagonal_initial_state_rejected() {
        let space = BipartiteSpace::new(2, 1).unwrap();
        let app = ApparatusProjectorSet::rank_one(space).unwrap();
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let spec = EvolutionSpec::new(space, pauli_x(), rho, vec![0.0, 1.0], 1).unwrap();
        assert!(matches!(
            estimate_decoherence_time(&spec, &app),
            Err(Error::Precondition(_))
        ));
    }
}
