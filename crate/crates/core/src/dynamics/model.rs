//! Pointer-model benchmark: qubits ordered pointer ⊗ environment ⊗ system,
//! with A = pointer ⊗ environment and B = system.
//!
//! `H = g Σ_j a_j Z_j^ptr ⊗ Σ_s Z_s^sys + g_env Σ_{j,k} c_jk Z_j^ptr Z_k^env`
//! with `a_j = 2^{−j}` and `c_jk = 1 + frac((m+1)·ρ)` for `m` row-major over
//! `j, k` and `ρ` the plastic-number step (a low-discrepancy sequence, so
//! the couplings are incommensurate). Every qubit starts in `|+⟩`. The Hamiltonian is
//! diagonal in the computational basis, so it dephases the pointer in z.
//!
//! The environment is finite, so pointer coherence shows recurrences; the
//! decoherence time picks up the first dip below threshold that persists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{lift_apparatus_projectors, ApparatusProjectorSet, DensityOperator};
use crate::tensor_space::{basis_vector, diag, BipartiteSpace, CVector};

use super::EvolutionSpec;

/// Largest total Hilbert-space dimension a model may have.
pub const MODEL_DIM_CAP: usize = 64;

const COUPLING_STEP: f64 = 0.754_877_666_246_692_7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementModelConfig {
    pub system_qubits: usize,
    pub pointer_qubits: usize,
    pub environment_qubits: usize,
    pub g: f64,
    pub g_env: f64,
    /// `c_jk` override, row-major; empty selects the default sequence.
    pub environment_couplings: Vec<f64>,
    /// Last time of the decoherence grid.
    pub t_max: f64,
    pub grid_points: usize,
}

impl Default for MeasurementModelConfig {
    fn default() -> Self {
        Self {
            system_qubits: 1,
            pointer_qubits: 2,
            environment_qubits: 2,
            g: 1.0,
            g_env: 4.0,
            environment_couplings: Vec::new(),
            t_max: 6.0,
            grid_points: 2401,
        }
    }
}

impl MeasurementModelConfig {
    pub fn pointer_dim(&self) -> usize {
        1 << self.pointer_qubits
    }

    pub fn environment_dim(&self) -> usize {
        1 << self.environment_qubits
    }

    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    pub fn total_dim(&self) -> usize {
        1usize
            .checked_shl(
                (self.system_qubits + self.pointer_qubits + self.environment_qubits) as u32,
            )
            .unwrap_or(usize::MAX)
    }

    pub fn space(&self) -> Result<BipartiteSpace> {
        BipartiteSpace::new(
            self.pointer_dim() * self.environment_dim(),
            self.system_dim(),
        )
    }

    /// Whether the environment couples at all.
    pub fn is_decoupled(&self) -> bool {
        self.g_env == 0.0 || self.environment_qubits == 0
    }

    /// `c_jk`, row-major over pointer qubit `j` and environment qubit `k`.
    pub fn couplings(&self) -> Vec<f64> {
        if !self.environment_couplings.is_empty() {
            return self.environment_couplings.clone();
        }
        (0..self.pointer_qubits * self.environment_qubits)
            .map(|m| 1.0 + ((m + 1) as f64 * COUPLING_STEP).fract())
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let total = self.total_dim();
        if total > MODEL_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: total,
                cap: MODEL_DIM_CAP,
            });
        }
        if self.pointer_qubits == 0 || self.system_qubits == 0 {
            return Err(Error::Precondition(
                "model needs at least one pointer and one system qubit".into(),
            ));
        }
        let n = self.pointer_qubits * self.environment_qubits;
        if !self.environment_couplings.is_empty() && self.environment_couplings.len() != n {
            return Err(Error::Precondition(format!(
                "expected {n} environment couplings, found {}",
                self.environment_couplings.len()
            )));
        }
        if ![self.g, self.g_env, self.t_max]
            .iter()
            .chain(&self.environment_couplings)
            .all(|x| x.is_finite())
        {
            return Err(Error::NonFinite);
        }
        if self.g_env < 0.0 {
            return Err(Error::Precondition("g_env must be non-negative".into()));
        }
        if !(self.t_max > 0.0) || self.grid_points < 2 {
            return Err(Error::Precondition(
                "time grid needs t_max > 0 and at least 2 points".into(),
            ));
        }
        Ok(())
    }
}

/// `±1` eigenvalue of `Z` for qubit `q` (most significant first) of an
/// `n`-qubit register value.
fn z_value(register: usize, n: usize, q: usize) -> f64 {
    if (register >> (n - 1 - q)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The benchmark spec described in the module docs.
pub fn build_measurement_model(config: &MeasurementModelConfig) -> Result<EvolutionSpec> {
    config.validate()?;
    let (np, ne, ns) = (
        config.pointer_qubits,
        config.environment_qubits,
        config.system_qubits,
    );
    let (de, ds) = (config.environment_dim(), config.system_dim());
    let space = config.space()?;
    let c = config.couplings();
    let energies: Vec<f64> = (0..space.dim())
        .map(|index| {
            let s = index % ds;
            let e = (index / ds) % de;
            let p = index / (ds * de);
            let sys: f64 = (0..ns).map(|q| z_value(s, ns, q)).sum();
            let mut energy = 0.0;
            for j in 0..np {
                let zp = z_value(p, np, j);
                energy += config.g * 0.5f64.powi(j as i32) * zp * sys;
                for k in 0..ne {
                    energy += config.g_env * c[j * ne + k] * zp * z_value(e, ne, k);
                }
            }
            energy
        })
        .collect();
    let n = space.dim();
    let plus = CVector::from_element(n, (1.0 / n as f64).sqrt().into());
    let initial = DensityOperator::from_pure(&plus)?;
    let step = config.t_max / (config.grid_points - 1) as f64;
    let times = (0..config.grid_points).map(|k| k as f64 * step).collect();
    EvolutionSpec::new(space, diag(&energies), initial, times, de)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerBasis {
    Z,
    X,
}

/// One sector per pointer basis state, each spanning the full environment:
/// `P_b^A = |b⟩⟨b|_ptr ⊗ 1_env`.
pub fn pointer_sectors(
    config: &MeasurementModelConfig,
    basis: PointerBasis,
) -> Result<ApparatusProjectorSet> {
    config.validate()?;
    let space = config.space()?;
    let (dp, de) = (config.pointer_dim(), config.environment_dim());
    let pointer_state = |b: usize| -> CVector {
        match basis {
            PointerBasis::Z => basis_vector(dp, b),
            PointerBasis::X => {
                let amp = (1.0 / dp as f64).sqrt();
                // Hadamard^⊗n: ⟨p|b⟩ = (−1)^{popcount(p & b)} / √dp
                CVector::from_fn(dp, |p, _| {
                    let sign = if (p & b).count_ones().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    (sign * amp).into()
                })
            }
        }
    };
    let bases = (0..dp)
        .map(|b| {
            let v = pointer_state(b);
            (0..de).map(|e| v.kronecker(&basis_vector(de, e))).collect()
        })
        .collect();
    lift_apparatus_projectors(space, bases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        environment_interference_norm, estimate_decoherence_time, interference_norm,
    };

    #[test]
    fn dimensions() {
        let small = MeasurementModelConfig {
            pointer_qubits: 1,
            environment_qubits: 1,
            g_env: 5.0,
            ..Default::default()
        };
        assert_eq!(build_measurement_model(&small).unwrap().space().dim(), 8);
        let spec = build_measurement_model(&MeasurementModelConfig::default()).unwrap();
        assert_eq!(spec.space().dim(), 32);
        assert_eq!((spec.space().dim_a(), spec.space().dim_b()), (16, 2));
        assert_eq!(spec.environment_dim(), 4);
        let big = MeasurementModelConfig {
            environment_qubits: 4,
            ..Default::default()
        };
        assert!(matches!(
            build_measurement_model(&big),
            Err(Error::DimensionCap { dim: 128, cap: 64 })
        ));
    }

    #[test]
    fn sectors_are_valid_in_both_bases() {
        let config = MeasurementModelConfig::default();
        for basis in [PointerBasis::Z, PointerBasis::X] {
            let app = pointer_sectors(&config, basis).unwrap();
            assert_eq!(app.len(), 4);
            assert_eq!(app.sector_dims(), vec![4; 4]);
        }
    }

    #[test]
    fn global_interference_is_conserved_but_traced_one_decays() {
        let config = MeasurementModelConfig::default();
        let spec = build_measurement_model(&config).unwrap();
        let app = pointer_sectors(&config, PointerBasis::Z).unwrap();
        let prop = spec.propagator().unwrap();
        let rho0 = spec.initial().clone();
        let rho1 = prop.evolve(&rho0, 1.0).unwrap();
        assert!((interference_norm(&rho0, &app) - interference_norm(&rho1, &app)).abs() < 1e-12);
        let before = environment_interference_norm(&rho0, &app, 4).unwrap();
        let after = environment_interference_norm(&rho1, &app, 4).unwrap();
        assert!(after < 0.5 * before);
    }

    #[test]
    fn decoupled_environment_never_decoheres() {
        let config = MeasurementModelConfig {
            g_env: 0.0,
            ..Default::default()
        };
        assert!(config.is_decoupled());
        let spec = build_measurement_model(&config).unwrap();
        let app = pointer_sectors(&config, PointerBasis::Z).unwrap();
        assert!(estimate_decoherence_time(&spec, &app)
            .unwrap()
            .is_unbounded());
    }
}
