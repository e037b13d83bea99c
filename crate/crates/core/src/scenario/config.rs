//! TOML scenario schema. Complex numbers are `[re, im]` pairs; matrices are
//! arrays of rows.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_measurement_model, pointer_sectors, EvolutionSpec, MeasurementModelConfig, PointerBasis,
    SieveCandidate,
};
use crate::error::{Error, ProjectorViolation};
use crate::states::{
    lift_apparatus_projectors, make_pure, ApparatusProjectorSet, DensityOperator, PureState,
};
use crate::tensor_space::{from_pairs, hermitian_eigen, BipartiteSpace, CMatrix, CVector};

use super::Violation;

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Required; there is no implicit randomness.
    pub seed: Option<u64>,
    pub space: Option<SpaceConfig>,
    /// Pointer benchmark model; fixes the space, Hamiltonian and initial
    /// state.
    pub model: Option<MeasurementModelConfig>,
    pub state: Option<StateSpec>,
    pub apparatus: Option<ApparatusSpec>,
    #[serde(default)]
    pub candidates: Vec<CandidateSpec>,
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub reduce: ReduceSection,
    pub sieve: Option<IntervalSpec>,
    pub run: Option<RunSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim_a: usize,
    pub dim_b: usize,
}

/// Exactly one of the fields must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    /// `"bell"` or `"maximally_mixed"`.
    pub preset: Option<String>,
    /// `dim_a × dim_b` amplitudes `c_{αβ}` of `Σ c_{αβ}|α⟩|β⟩`.
    pub coefficients: Option<ComplexRows>,
    pub density: Option<ComplexRows>,
}

/// Exactly one of the fields must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApparatusSpec {
    /// Groups of computational A-basis indices.
    pub sectors: Option<Vec<Vec<usize>>>,
    /// Orthonormal A-vectors per sector.
    pub bases: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    /// Projectors on A.
    pub projectors: Option<Vec<ComplexRows>>,
    /// Pointer basis of the benchmark model.
    pub pointer: Option<PointerBasis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub id: String,
    #[serde(flatten)]
    pub apparatus: ApparatusSpec,
}

/// Explicit dynamics for scenarios without a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub hamiltonian: ComplexRows,
    #[serde(default = "one")]
    pub environment_dim: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn one() -> usize {
    1
}

fn default_t_max() -> f64 {
    10.0
}

fn default_grid_points() -> usize {
    1001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSection {
    /// Equivalence-class samples for the max-entropy check; 0 disables it.
    #[serde(default = "default_samples")]
    pub max_entropy_samples: usize,
}

fn default_samples() -> usize {
    100
}

impl Default for ReduceSection {
    fn default() -> Self {
        Self {
            max_entropy_samples: default_samples(),
        }
    }
}

/// Reduction interval, absolute or in units of the decoherence time. When
/// both are given the relative form wins unless `τ_dec` is unbounded.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub delta_t: Option<f64>,
    pub delta_t_in_tau_dec: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(flatten)]
    pub interval: IntervalSpec,
    pub steps: usize,
    /// `≪` factor for the timescale check.
    #[serde(default = "default_factor")]
    pub factor: f64,
}

fn default_factor() -> f64 {
    crate::dynamics::TIMESCALE_FACTOR
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

/// Parse a TOML document. Errors carry toml's line/column context.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Violation> {
    toml::from_str(text).map_err(|e| Violation::new("", "parse", e.to_string().trim_end()))
}

/// Everything a command needs, built and validated from a config.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub space: BipartiteSpace,
    pub rho: Option<DensityOperator>,
    pub pure: Option<PureState>,
    pub apparatus: Option<ApparatusProjectorSet>,
    pub candidates: Vec<SieveCandidate>,
    pub dynamics: Option<EvolutionSpec>,
}

fn violation_from_error(field: &str, e: Error) -> Violation {
    match e {
        Error::InvalidProjectorSet(v) => projector_violation(field, &v),
        other => Violation::new(field, "value", other.to_string()),
    }
}

fn projector_violation(field: &str, v: &ProjectorViolation) -> Violation {
    let mut out = Violation::new(field, v.invariant(), v.to_string());
    out.residual = v.residual();
    out
}

fn check_interval(field: &str, spec: &IntervalSpec, out: &mut Vec<Violation>) {
    if spec.delta_t.is_none() && spec.delta_t_in_tau_dec.is_none() {
        out.push(Violation::new(
            field,
            "required",
            "set delta_t or delta_t_in_tau_dec",
        ));
    }
    for (name, v) in [
        ("delta_t", spec.delta_t),
        ("delta_t_in_tau_dec", spec.delta_t_in_tau_dec),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                out.push(Violation::new(
                    &format!("{field}.{name}"),
                    "positive",
                    format!("{v} is not positive"),
                ));
            }
        }
    }
}

impl Scenario {
    /// Validate every section and collect all violations found.
    pub fn build(config: ScenarioConfig) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        if config.name.trim().is_empty() {
            violations.push(Violation::new("name", "required", "scenario name is empty"));
        }
        if config.seed.is_none() {
            violations.push(Violation::new("seed", "required", "missing field `seed`"));
        }
        let space = match (&config.space, &config.model) {
            (Some(_), Some(_)) => {
                violations.push(Violation::new(
                    "space",
                    "exclusive",
                    "give either `space` or `model`, not both",
                ));
                None
            }
            (Some(s), None) => BipartiteSpace::new(s.dim_a, s.dim_b)
                .map_err(|e| violations.push(violation_from_error("space", e)))
                .ok(),
            (None, Some(m)) => m
                .space()
                .map_err(|e| violations.push(violation_from_error("model", e)))
                .ok(),
            (None, None) => {
                violations.push(Violation::new(
                    "space",
                    "required",
                    "missing `space` or `model` section",
                ));
                None
            }
        };
        let Some(space) = space else {
            return Err(violations);
        };

        let mut dynamics = None;
        if let Some(model) = &config.model {
            match build_measurement_model(model) {
                Ok(spec) => dynamics = Some(spec),
                Err(e) => violations.push(violation_from_error("model", e)),
            }
            if config.dynamics.is_some() {
                violations.push(Violation::new(
                    "dynamics",
                    "exclusive",
                    "a model scenario fixes its own dynamics",
                ));
            }
            if config.state.is_some() {
                violations.push(Violation::new(
                    "state",
                    "exclusive",
                    "a model scenario fixes its own initial state",
                ));
            }
        }

        let (rho, pure) = match (&config.state, &dynamics) {
            (Some(state), _) => match build_state(space, state) {
                Ok(pair) => pair,
                Err(v) => {
                    violations.push(v);
                    (None, None)
                }
            },
            (None, Some(spec)) => (Some(spec.initial().clone()), None),
            (None, None) => (None, None),
        };

        if let (Some(d), Some(rho)) = (&config.dynamics, &rho) {
            match build_dynamics(space, d, rho) {
                Ok(spec) => dynamics = Some(spec),
                Err(v) => violations.push(v),
            }
        }

        let apparatus = config.apparatus.as_ref().and_then(|a| {
            build_apparatus("apparatus", space, config.model.as_ref(), a)
                .map_err(|v| violations.push(v))
                .ok()
        });

        let mut candidates = Vec::new();
        for (k, c) in config.candidates.iter().enumerate() {
            let field = format!("candidates[{k}]");
            if config.candidates[..k].iter().any(|o| o.id == c.id) {
                violations.push(Violation::new(
                    &field,
                    "unique_id",
                    format!("duplicate candidate id `{}`", c.id),
                ));
            }
            match build_apparatus(&field, space, config.model.as_ref(), &c.apparatus) {
                Ok(a) => candidates.push(SieveCandidate::new(c.id.clone(), a)),
                Err(v) => violations.push(v),
            }
        }

        if let Some(sieve) = &config.sieve {
            check_interval("sieve", sieve, &mut violations);
            if config.candidates.is_empty() {
                violations.push(Violation::new(
                    "candidates",
                    "non_empty",
                    "sieve needs at least one candidate",
                ));
            }
        }
        if let Some(run) = &config.run {
            check_interval("run", &run.interval, &mut violations);
            if run.steps == 0 {
                violations.push(Violation::new(
                    "run.steps",
                    "positive",
                    "steps must be at least 1",
                ));
            }
            if !(run.factor.is_finite() && run.factor > 0.0) {
                violations.push(Violation::new(
                    "run.factor",
                    "positive",
                    "factor must be positive",
                ));
            }
        }

        if !violations.is_empty() {
            return Err(violations);
        }
        Ok(Self {
            seed: config.seed.expect("checked above"),
            config,
            space,
            rho,
            pure,
            apparatus,
            candidates,
            dynamics,
        })
    }

    /// Cross-section requirements of one command.
    pub fn require(&self, command: &str) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let need = |ok: bool, field: &str, v: &mut Vec<Violation>| {
            if !ok {
                v.push(Violation::new(
                    field,
                    "required",
                    format!("`{command}` needs `{field}`"),
                ));
            }
        };
        match command {
            "reduce" | "compare" => {
                need(self.rho.is_some(), "state", &mut v);
                need(self.apparatus.is_some(), "apparatus", &mut v);
            }
            "sieve" => {
                need(self.dynamics.is_some(), "dynamics", &mut v);
                need(!self.candidates.is_empty(), "candidates", &mut v);
                need(self.config.sieve.is_some(), "sieve", &mut v);
                if self
                    .config
                    .sieve
                    .as_ref()
                    .is_some_and(|s| s.delta_t.is_none())
                {
                    need(self.apparatus.is_some(), "apparatus", &mut v);
                }
            }
            "run" => {
                need(self.dynamics.is_some(), "dynamics", &mut v);
                need(self.apparatus.is_some(), "apparatus", &mut v);
                need(self.config.run.is_some(), "run", &mut v);
            }
            _ => {}
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

fn build_state(
    space: BipartiteSpace,
    spec: &StateSpec,
) -> Result<(Option<DensityOperator>, Option<PureState>), Violation> {
    let given = [
        spec.preset.is_some(),
        spec.coefficients.is_some(),
        spec.density.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Violation::new(
            "state",
            "exclusive",
            "give exactly one of `preset`, `coefficients`, `density`",
        ));
    }
    let wrap = |field: &str, e: Error| violation_from_error(field, e);
    if let Some(name) = &spec.preset {
        return match name.as_str() {
            "bell" => {
                let n = space.dim_a().min(space.dim_b());
                let amp = (1.0 / n as f64).sqrt();
                let c = CMatrix::from_fn(space.dim_a(), space.dim_b(), |a, b| {
                    if a == b {
                        amp.into()
                    } else {
                        0.0.into()
                    }
                });
                let psi = make_pure(space, c).map_err(|e| wrap("state.preset", e))?;
                Ok((Some(psi.density()), Some(psi)))
            }
            "maximally_mixed" => Ok((
                Some(
                    DensityOperator::maximally_mixed(space.dim())
                        .map_err(|e| wrap("state.preset", e))?,
                ),
                None,
            )),
            other => Err(Violation::new(
                "state.preset",
                "known_preset",
                format!("unknown state preset `{other}` (expected bell or maximally_mixed)"),
            )),
        };
    }
    if let Some(rows) = &spec.coefficients {
        let c = from_pairs(rows).map_err(|e| wrap("state.coefficients", e))?;
        if c.nrows() != space.dim_a() || c.ncols() != space.dim_b() {
            return Err(Violation::new(
                "state.coefficients",
                "shape",
                format!(
                    "expected {}×{} coefficients, found {}×{}",
                    space.dim_a(),
                    space.dim_b(),
                    c.nrows(),
                    c.ncols()
                ),
            ));
        }
        let psi = make_pure(space, c).map_err(|e| wrap("state.coefficients", e))?;
        return Ok((Some(psi.density()), Some(psi)));
    }
    let rows = spec.density.as_ref().expect("one field set");
    let m = from_pairs(rows).map_err(|e| wrap("state.density", e))?;
    if m.nrows() != space.dim() {
        return Err(Violation::new(
            "state.density",
            "shape",
            format!("expected a {0}×{0} matrix", space.dim()),
        ));
    }
    let rho = DensityOperator::new(m).map_err(|e| wrap("state.density", e))?;
    Ok((Some(rho), None))
}

fn build_dynamics(
    space: BipartiteSpace,
    d: &DynamicsSpec,
    rho: &DensityOperator,
) -> Result<EvolutionSpec, Violation> {
    let h =
        from_pairs(&d.hamiltonian).map_err(|e| violation_from_error("dynamics.hamiltonian", e))?;
    if d.grid_points < 2 || !(d.t_max.is_finite() && d.t_max > 0.0) {
        return Err(Violation::new(
            "dynamics",
            "grid",
            "need t_max > 0 and grid_points ≥ 2",
        ));
    }
    let step = d.t_max / (d.grid_points - 1) as f64;
    let times = (0..d.grid_points).map(|k| k as f64 * step).collect();
    EvolutionSpec::new(space, h, rho.clone(), times, d.environment_dim)
        .map_err(|e| violation_from_error("dynamics", e))
}

fn build_apparatus(
    field: &str,
    space: BipartiteSpace,
    model: Option<&MeasurementModelConfig>,
    spec: &ApparatusSpec,
) -> Result<ApparatusProjectorSet, Violation> {
    let given = [
        spec.sectors.is_some(),
        spec.bases.is_some(),
        spec.projectors.is_some(),
        spec.pointer.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Violation::new(
            field,
            "exclusive",
            "give exactly one of `sectors`, `bases`, `projectors`, `pointer`",
        ));
    }
    let sub = |key: &str| format!("{field}.{key}");
    if let Some(sectors) = &spec.sectors {
        return ApparatusProjectorSet::from_index_sectors(space, sectors)
            .map_err(|e| violation_from_error(&sub("sectors"), e));
    }
    if let Some(bases) = &spec.bases {
        let vecs = bases
            .iter()
            .map(|sector| {
                sector
                    .iter()
                    .map(|v| {
                        CVector::from_iterator(
                            v.len(),
                            v.iter()
                                .map(|&[re, im]| crate::tensor_space::Complex::new(re, im)),
                        )
                    })
                    .collect()
            })
            .collect();
        return lift_apparatus_projectors(space, vecs)
            .map_err(|e| violation_from_error(&sub("bases"), e));
    }
    if let Some(projectors) = &spec.projectors {
        let field = &sub("projectors");
        let wrap = |e: Error| violation_from_error(field, e);
        let ms = projectors
            .iter()
            .map(|p| from_pairs(p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(wrap)?;
        if let Some(bad) = ms.iter().position(|m| m.nrows() != space.dim_a()) {
            return Err(Violation::new(
                field,
                "shape",
                format!("projector {bad} is not {0}×{0}", space.dim_a()),
            ));
        }
        let set = crate::states::validate_projector_set(ms)
            .map_err(|v| projector_violation(field, &v))?;
        let bases = set
            .projectors()
            .iter()
            .map(|p| {
                let s = hermitian_eigen(p);
                s.pairs()
                    .filter(|(l, _)| *l > 0.5)
                    .map(|(_, v)| v)
                    .collect()
            })
            .collect();
        return lift_apparatus_projectors(space, bases).map_err(wrap);
    }
    let basis = spec.pointer.expect("one field set");
    let field = &sub("pointer");
    let model = model.ok_or_else(|| {
        Violation::new(
            field,
            "requires_model",
            "`pointer` sectors need a `model` section",
        )
    })?;
    pointer_sectors(model, basis).map_err(|e| violation_from_error(field, e))
}
