//! Finite-candidate predictability sieve and repeated-reduction runs.

use serde::{Deserialize, Serialize};

use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::reduction::{luders_dephase, modified_reduce};
use crate::states::{ApparatusProjectorSet, DensityOperator};

use super::{interference_norm, EvolutionSpec, Propagator};

/// Candidates whose generated entropy is within this of the minimum tie.
pub const SIEVE_TIE_TOL: f64 = 1e-9;
/// Allowed per-step decrease of the applied channel's entropy.
pub const MONOTONICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SieveCandidate {
    pub id: String,
    pub apparatus: ApparatusProjectorSet,
}

impl SieveCandidate {
    pub fn new(id: impl Into<String>, apparatus: ApparatusProjectorSet) -> Self {
        Self {
            id: id.into(),
            apparatus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveReport {
    pub candidates: Vec<String>,
    /// `S(ρ̂) − S(ρ(0))` per candidate, nats.
    pub entropy_generated: Vec<f64>,
    pub winner: usize,
    /// Another candidate lies within [`SIEVE_TIE_TOL`] of the winner.
    pub tie: bool,
}

impl SieveReport {
    pub fn winner_id(&self) -> &str {
        &self.candidates[self.winner]
    }

    fn from_entropies(candidates: Vec<String>, entropy_generated: Vec<f64>) -> Self {
        let mut winner = 0;
        for (k, &s) in entropy_generated.iter().enumerate() {
            if s < entropy_generated[winner] {
                winner = k;
            }
        }
        let best = entropy_generated[winner];
        let tie = entropy_generated
            .iter()
            .enumerate()
            .any(|(k, &s)| k != winner && s - best <= SIEVE_TIE_TOL);
        Self {
            candidates,
            entropy_generated,
            winner,
            tie,
        }
    }
}

fn generated_entropy(
    propagator: &Propagator,
    rho: &DensityOperator,
    s0: f64,
    candidate: &SieveCandidate,
    delta_t: f64,
) -> Result<f64> {
    let evolved = propagator.evolve(rho, delta_t)?;
    let rep = modified_reduce(&evolved, &candidate.apparatus)?;
    Ok(von_neumann_entropy(rep.rho_hat())? - s0)
}

/// Evolve `ρ` by `Δt`, reduce with each candidate and pick the one that
/// generates the least entropy. Candidates are evaluated on up to `jobs`
/// threads; results are merged by index so the report does not depend on
/// `jobs`.
pub fn sieve_from(
    propagator: &Propagator,
    rho: &DensityOperator,
    candidates: &[SieveCandidate],
    delta_t: f64,
    jobs: usize,
) -> Result<SieveReport> {
    if candidates.is_empty() {
        return Err(Error::Precondition(
            "sieve needs at least one candidate".into(),
        ));
    }
    if !(delta_t.is_finite() && delta_t >= 0.0) {
        return Err(Error::Precondition(
            "delta_t must be finite and non-negative".into(),
        ));
    }
    for c in candidates {
        c.apparatus.check_space(rho.dim())?;
    }
    let s0 = von_neumann_entropy(rho)?;
    let jobs = jobs.clamp(1, candidates.len());
    let results: Vec<Result<f64>> = if jobs == 1 {
        candidates
            .iter()
            .map(|c| generated_entropy(propagator, rho, s0, c, delta_t))
            .collect()
    } else {
        let chunk = candidates.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = candidates
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|c| generated_entropy(propagator, rho, s0, c, delta_t))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sieve worker panicked"))
                .collect()
        })
    };
    let entropies = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SieveReport::from_entropies(
        candidates.iter().map(|c| c.id.clone()).collect(),
        entropies,
    ))
}

/// Sieve starting from the spec's initial state.
pub fn sieve(
    spec: &EvolutionSpec,
    candidates: &[SieveCandidate],
    delta_t: f64,
) -> Result<SieveReport> {
    sieve_from(&spec.propagator()?, spec.initial(), candidates, delta_t, 1)
}

/// Reduction channel applied between evolution steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    #[default]
    Modified,
    Luders,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub channel: Channel,
    /// Candidates re-sieved at every recorded state to estimate `τ_P`.
    pub sieve_candidates: Vec<SieveCandidate>,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyTrajectory {
    pub channel: Channel,
    pub delta_t: f64,
    pub times: Vec<f64>,
    pub s_rho: Vec<f64>,
    pub s_luders: Vec<f64>,
    pub s_modified: Vec<f64>,
    pub interference_norm: Vec<f64>,
    /// Sieve winner per recorded state; empty when not tracked.
    pub sieve_winners: Vec<usize>,
    /// Time of the first winner change; `None` if it never changes (or was
    /// not tracked).
    pub tau_p: Option<f64>,
    #[serde(skip)]
    pub final_state: DensityOperator,
}

impl EntropyTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Entropy after the applied channel at each recorded state.
    pub fn applied_entropy(&self) -> &[f64] {
        match self.channel {
            Channel::Modified => &self.s_modified,
            Channel::Luders => &self.s_luders,
        }
    }

    /// Largest per-step decrease of the applied channel's entropy.
    pub fn max_decrease(&self) -> f64 {
        self.applied_entropy()
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

/// [`repeated_reduction_run_with`] with the modified channel and no sieve
/// tracking.
pub fn repeated_reduction_run(
    spec: &EvolutionSpec,
    apparatus: &ApparatusProjectorSet,
    delta_t: f64,
    steps: usize,
) -> Result<EntropyTrajectory> {
    repeated_reduction_run_with(spec, apparatus, delta_t, steps, &RunOptions::default())
}

/// Record `ρ_0 = ρ(0)`, then repeat `ρ_{k+1} = U(Δt) R(ρ_k) U(Δt)†` with
/// `R` the chosen channel. Row `k` holds the entropies of `ρ_k`, its Lüders
/// dephasing and its modified representative, plus its interference norm,
/// so the run has `steps + 1` rows and each step is one (reduce, evolve)
/// pair. Since `S(R(ρ)) ≥ S(ρ)` and evolution preserves entropy, the applied
/// channel's entropy is non-decreasing; a violation is an invariant error.
pub fn repeated_reduction_run_with(
    spec: &EvolutionSpec,
    apparatus: &ApparatusProjectorSet,
    delta_t: f64,
    steps: usize,
    options: &RunOptions,
) -> Result<EntropyTrajectory> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    if !(delta_t.is_finite() && delta_t > 0.0) {
        return Err(Error::Precondition("delta_t must be positive".into()));
    }
    apparatus.check_space(spec.space().dim())?;
    let propagator = spec.propagator()?;
    let mut traj = EntropyTrajectory {
        channel: options.channel,
        delta_t,
        times: Vec::with_capacity(steps + 1),
        s_rho: Vec::with_capacity(steps + 1),
        s_luders: Vec::with_capacity(steps + 1),
        s_modified: Vec::with_capacity(steps + 1),
        interference_norm: Vec::with_capacity(steps + 1),
        sieve_winners: Vec::new(),
        tau_p: None,
        final_state: spec.initial().clone(),
    };
    let mut rho = spec.initial().clone();
    for k in 0..=steps {
        let luders = luders_dephase(&rho, apparatus.lifted())?;
        let modified = modified_reduce(&rho, apparatus)?.rho_hat().clone();
        let t = k as f64 * delta_t;
        traj.times.push(t);
        traj.s_rho.push(von_neumann_entropy(&rho)?);
        traj.s_luders.push(von_neumann_entropy(&luders)?);
        traj.s_modified.push(von_neumann_entropy(&modified)?);
        traj.interference_norm
            .push(interference_norm(&rho, apparatus));
        if !options.sieve_candidates.is_empty() {
            let report = sieve_from(
                &propagator,
                &rho,
                &options.sieve_candidates,
                delta_t,
                options.jobs,
            )?;
            if traj.tau_p.is_none()
                && traj
                    .sieve_winners
                    .first()
                    .is_some_and(|&w| w != report.winner)
            {
                traj.tau_p = Some(t);
            }
            traj.sieve_winners.push(report.winner);
        }
        let reduced = match options.channel {
            Channel::Modified => modified,
            Channel::Luders => luders,
        };
        if k == steps {
            traj.final_state = reduced;
        } else {
            rho = propagator.evolve(&reduced, delta_t)?;
        }
    }
    let decrease = traj.max_decrease();
    if decrease > MONOTONICITY_TOL {
        return Err(Error::Invariant(format!(
            "entropy decreased by {decrease:.3e} between reductions"
        )));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        build_measurement_model, pointer_sectors, MeasurementModelConfig, PointerBasis,
    };
    use crate::tensor_space::{BipartiteSpace, CMatrix};

    fn benchmark() -> (EvolutionSpec, Vec<SieveCandidate>) {
        let config = MeasurementModelConfig::default();
        let spec = build_measurement_model(&config).unwrap();
        let cands = vec![
            SieveCandidate::new("z", pointer_sectors(&config, PointerBasis::Z).unwrap()),
            SieveCandidate::new("x", pointer_sectors(&config, PointerBasis::X).unwrap()),
        ];
        (spec, cands)
    }

    #[test]
    fn single_candidate_wins() {
        let (spec, cands) = benchmark();
        let r = sieve(&spec, &cands[1..], 0.5).unwrap();
        assert_eq!(r.winner, 0);
        assert!(!r.tie);
        assert!(sieve(&spec, &[], 0.5).is_err());
    }

    #[test]
    fn jobs_do_not_change_the_report() {
        let (spec, cands) = benchmark();
        let prop = spec.propagator().unwrap();
        let a = sieve_from(&prop, spec.initial(), &cands, 0.7, 1).unwrap();
        let b = sieve_from(&prop, spec.initial(), &cands, 0.7, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn static_hamiltonian_ties_commuting_candidates() {
        let space = BipartiteSpace::new(2, 2).unwrap();
        let rho = DensityOperator::maximally_mixed(4).unwrap();
        let spec = EvolutionSpec::new(space, CMatrix::zeros(4, 4), rho, vec![0.0, 1.0], 1).unwrap();
        let rank_one = ApparatusProjectorSet::rank_one(space).unwrap();
        let whole = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1]]).unwrap();
        let r = sieve(
            &spec,
            &[
                SieveCandidate::new("a", rank_one),
                SieveCandidate::new("b", whole),
            ],
            1.0,
        )
        .unwrap();
        assert!(r.entropy_generated.iter().all(|s| s.abs() < 1e-12));
        assert!(r.tie);
        assert_eq!(r.winner, 0);
    }

    #[test]
    fn flat_trajectory_for_reduced_static_state() {
        let space = BipartiteSpace::new(2, 2).unwrap();
        let rho = DensityOperator::maximally_mixed(4).unwrap();
        let spec = EvolutionSpec::new(space, CMatrix::zeros(4, 4), rho, vec![0.0], 1).unwrap();
        let app = ApparatusProjectorSet::rank_one(space).unwrap();
        let t = repeated_reduction_run(&spec, &app, 1.0, 5).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.s_modified.iter().all(|s| (s - 4f64.ln()).abs() < 1e-12));
        assert!(t.s_rho.iter().all(|s| (s - 4f64.ln()).abs() < 1e-12));
    }

    #[test]
    fn one_step_composes_primitives() {
        let (spec, cands) = benchmark();
        let app = &cands[0].apparatus;
        let t = repeated_reduction_run(&spec, app, 0.3, 1).unwrap();
        let first = modified_reduce(spec.initial(), app).unwrap();
        let evolved = crate::dynamics::evolve(first.rho_hat(), spec.hamiltonian(), 0.3).unwrap();
        let second = modified_reduce(&evolved, app).unwrap();
        assert!(t.final_state.distance(second.rho_hat()) < 1e-12);
        assert!((t.s_rho[1] - von_neumann_entropy(&evolved).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn luders_run_stays_below_modified_run() {
        let (spec, cands) = benchmark();
        let app = &cands[0].apparatus;
        let m = repeated_reduction_run(&spec, app, 0.4, 10).unwrap();
        let options = RunOptions {
            channel: Channel::Luders,
            ..Default::default()
        };
        let l = repeated_reduction_run_with(&spec, app, 0.4, 10, &options).unwrap();
        for (a, b) in l.applied_entropy().iter().zip(m.applied_entropy()) {
            assert!(a <= &(b + 1e-9));
        }
    }
}
