use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    check_timescales_with, estimate_decoherence_time, repeated_reduction_run_with, sieve_from,
    Channel, DecoherenceEstimate, RunOptions,
};
use crate::entropy::{entropy_chain, verify_max_entropy, von_neumann_entropy};
use crate::error::Error;
use crate::reduction::{
    compare_sectors, dlp_reduce, equivalent_modified, luders_dephase, modified_reduce,
};
use crate::states::{conditional_states, ApparatusProjectorSet, DensityOperator};
use crate::tensor_space::to_pairs;

use super::config::IntervalSpec;
use super::report::{format_float, RunReport};
use super::{Scenario, ScenarioError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReduceChannel {
    Luders,
    #[default]
    Modified,
    Dlp,
}

impl ReduceChannel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Luders => "luders",
            Self::Modified => "modified",
            Self::Dlp => "dlp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Reduce(ReduceChannel),
    Compare,
    Sieve,
    Run(ReduceChannel),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::Reduce(_) => "reduce",
            Self::Compare => "compare",
            Self::Sieve => "sieve",
            Self::Run(_) => "run",
        }
    }
}

/// Report, CSV files (name, contents) and a human-readable summary.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: RunReport,
    pub csv: Vec<(String, String)>,
    pub summary: String,
}

impl CommandOutput {
    /// Write `report.json` and the CSVs into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report.to_json_string())?;
        for (name, contents) in &self.csv {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn matrix_json(rho: &DensityOperator) -> Value {
    json!(to_pairs(rho.matrix()))
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, ScenarioError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| ScenarioError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row).map_err(internal)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ScenarioError::Internal(e.to_string()))
}

/// Run one command on a validated scenario. `jobs` bounds the threads
/// used for sieve candidates.
pub fn execute(
    scenario: &Scenario,
    command: Command,
    jobs: usize,
) -> Result<CommandOutput, ScenarioError> {
    scenario.require(command.name())?;
    let (results, csv, summary) = match command {
        Command::Validate => validate(scenario),
        Command::Reduce(channel) => reduce(scenario, channel)?,
        Command::Compare => compare(scenario)?,
        Command::Sieve => sieve(scenario, jobs)?,
        Command::Run(channel) => run(scenario, channel, jobs)?,
    };
    let report = RunReport::new(
        &scenario.config.name,
        command.name(),
        scenario.seed,
        results,
    )
    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    Ok(CommandOutput {
        report,
        csv,
        summary,
    })
}

type Parts = (Value, Vec<(String, String)>, String);

fn validate(s: &Scenario) -> Parts {
    let results = json!({
        "valid": true,
        "violations": Vec::<Violation>::new(),
        "dim_a": s.space.dim_a(),
        "dim_b": s.space.dim_b(),
        "sectors": s.apparatus.as_ref().map(ApparatusProjectorSet::sector_dims),
        "candidates": s.candidates.iter().map(|c| c.id.clone()).collect::<Vec<_>>(),
    });
    let summary = format!(
        "{}: valid (dim A = {}, dim B = {})\n",
        s.config.name,
        s.space.dim_a(),
        s.space.dim_b()
    );
    (results, Vec::new(), summary)
}

fn reduce(s: &Scenario, channel: ReduceChannel) -> Result<Parts, ScenarioError> {
    let rho = s.rho.as_ref().expect("required");
    let app = s.apparatus.as_ref().expect("required");
    let entropy = entropy_chain(rho, app)?;
    let weights = app.weights(rho)?;
    let conditionals: Vec<Value> = conditional_states(rho, app)?
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            c.map(|c| {
                json!({
                    "index": i,
                    "weight": c.weight,
                    "purity": c.state.purity(),
                    "state": matrix_json(&c.state),
                })
            })
        })
        .collect();
    let mut extra = serde_json::Map::new();
    let reduced = match channel {
        ReduceChannel::Luders => luders_dephase(rho, app.lifted())?,
        ReduceChannel::Modified => {
            let rep = modified_reduce(rho, app)?;
            extra.insert("residuals".into(), json!(rep.residuals()?));
            let n = s.config.reduce.max_entropy_samples;
            if n > 0 {
                extra.insert(
                    "max_entropy".into(),
                    json!(verify_max_entropy(&rep, n, s.seed)?),
                );
            }
            rep.rho_hat().clone()
        }
        ReduceChannel::Dlp => {
            let psi = s.pure.as_ref().ok_or_else(|| {
                ScenarioError::Config(vec![Violation::new(
                    "state",
                    "pure",
                    "the dlp channel needs a pure state (`coefficients` or the bell preset)",
                )])
            })?;
            let dlp = dlp_reduce(psi, app)?;
            extra.insert("label".into(), json!(crate::reduction::DlpReduction::LABEL));
            extra.insert("max_purity_deficit".into(), json!(dlp.max_purity_deficit()));
            extra.insert(
                "purity_deficits".into(),
                json!(dlp
                    .sectors
                    .iter()
                    .map(|x| json!({ "index": x.index, "purity_deficit": x.purity_deficit }))
                    .collect::<Vec<_>>()),
            );
            dlp.rho_hat
        }
    };
    let channel_entropy = von_neumann_entropy(&reduced)?;
    let mut results = json!({
        "channel": channel.name(),
        "weights": weights,
        "conditional_states": conditionals,
        "reduced_state": matrix_json(&reduced),
        "channel_entropy": channel_entropy,
        "entropy": entropy,
    });
    results.as_object_mut().expect("object").extend(extra);

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{} reduce --channel {}",
        s.config.name,
        channel.name()
    );
    let shown: Vec<String> = weights.iter().map(|w| format!("{w:.6}")).collect();
    let _ = writeln!(summary, "  weights          [{}]", shown.join(", "));
    let _ = writeln!(summary, "  S(rho)           {:.6}", entropy.s_rho);
    let _ = writeln!(summary, "  S(luders)        {:.6}", entropy.s_luders);
    let _ = writeln!(summary, "  S(modified)      {:.6}", entropy.s_modified);
    let _ = writeln!(summary, "  jaynes gap       {:.6}", entropy.jaynes_gap);
    let _ = writeln!(summary, "  channel entropy  {:.6}", channel_entropy);
    Ok((results, Vec::new(), summary))
}

fn compare(s: &Scenario) -> Result<Parts, ScenarioError> {
    let rho = s.rho.as_ref().expect("required");
    let app = s.apparatus.as_ref().expect("required");
    let luders = luders_dephase(rho, app.lifted())?;
    let rep = modified_reduce(rho, app)?;
    let check = equivalent_modified(&luders, rep.rho_hat(), app)?;
    if !check.equivalent {
        return Err(ScenarioError::Numerical(format!(
            "Lüders and modified outputs are not modified-equivalent (residual {:.3e})",
            check.residual
        )));
    }
    let entropy = entropy_chain(rho, app)?;
    let sectors = compare_sectors(rho, app)?;
    let results = json!({
        "entropy_table": [
            { "state": "rho", "entropy": entropy.s_rho },
            { "state": "luders", "entropy": entropy.s_luders },
            { "state": "modified", "entropy": entropy.s_modified },
        ],
        "jaynes_gap": entropy.jaynes_gap,
        "equivalence": [
            { "relation": "equivalent_modified(luders, modified)", "equivalent": check.equivalent, "residual": check.residual },
        ],
        "sectors": sectors,
        "luders_state": matrix_json(&luders),
        "modified_state": matrix_json(rep.rho_hat()),
    });
    let mut summary = String::new();
    let _ = writeln!(summary, "{} compare", s.config.name);
    let _ = writeln!(summary, "  {:<10} {:>12}", "state", "entropy");
    for (name, v) in [
        ("rho", entropy.s_rho),
        ("luders", entropy.s_luders),
        ("modified", entropy.s_modified),
    ] {
        let _ = writeln!(summary, "  {:<10} {:>12.6}", name, v);
    }
    let _ = writeln!(
        summary,
        "  equivalent_modified(luders, modified) = {}",
        check.equivalent
    );
    for c in &sectors {
        let _ = writeln!(
            summary,
            "  sector {}: w = {:.6}, A-block distance {:.3e}, B-conditional distance {:.3e}",
            c.index, c.weight, c.a_block_distance, c.b_conditional_distance
        );
    }
    Ok((results, Vec::new(), summary))
}

/// Decoherence estimate, or the reason it is unavailable.
fn decoherence(s: &Scenario) -> Result<Result<DecoherenceEstimate, String>, ScenarioError> {
    let (Some(spec), Some(app)) = (s.dynamics.as_ref(), s.apparatus.as_ref()) else {
        return Ok(Err("no apparatus to measure interference against".into()));
    };
    match estimate_decoherence_time(spec, app) {
        Ok(est) => Ok(Ok(est)),
        Err(Error::Precondition(m)) => Ok(Err(m)),
        Err(e) => Err(e.into()),
    }
}

fn resolve_interval(
    section: &str,
    interval: &IntervalSpec,
    tau_dec: Option<f64>,
) -> Result<f64, ScenarioError> {
    match (interval.delta_t_in_tau_dec, tau_dec, interval.delta_t) {
        (Some(f), Some(tau), _) => Ok(f * tau),
        (_, _, Some(dt)) => Ok(dt),
        _ => Err(ScenarioError::Numerical(format!(
            "{section}: delta_t is given relative to a decoherence time that is unbounded or unavailable"
        ))),
    }
}

fn decoherence_json(est: &Result<DecoherenceEstimate, String>) -> Value {
    match est {
        Ok(e) => json!({
            "tau_dec": e.tau_dec,
            "unbounded": e.is_unbounded(),
            "initial_norm": e.initial_norm,
            "threshold": e.threshold,
        }),
        Err(m) => json!({ "tau_dec": null, "unbounded": true, "unavailable": m }),
    }
}

fn sieve(s: &Scenario, jobs: usize) -> Result<Parts, ScenarioError> {
    let spec = s.dynamics.as_ref().expect("required");
    let interval = s.config.sieve.as_ref().expect("required");
    let est = if interval.delta_t_in_tau_dec.is_some() {
        Some(decoherence(s)?)
    } else {
        None
    };
    let tau = est
        .as_ref()
        .and_then(|e| e.as_ref().ok())
        .and_then(|e| e.tau_dec);
    let delta_t = resolve_interval("sieve", interval, tau)?;
    let report = sieve_from(
        &spec.propagator()?,
        spec.initial(),
        &s.candidates,
        delta_t,
        jobs,
    )?;
    let rows: Vec<Vec<String>> = report
        .candidates
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let tied = report.tie
                && report.entropy_generated[k] - report.entropy_generated[report.winner]
                    <= crate::dynamics::SIEVE_TIE_TOL;
            vec![
                id.clone(),
                format_float(report.entropy_generated[k]),
                u8::from(k == report.winner).to_string(),
                u8::from(tied).to_string(),
            ]
        })
        .collect();
    let csv = csv_string(
        &[
            "candidate_id",
            "entropy_generated_nats",
            "winner_flag",
            "tie_flag",
        ],
        &rows,
    )?;
    let results = json!({
        "delta_t": delta_t,
        "decoherence": est.as_ref().map(decoherence_json),
        "sieve": report,
    });
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{} sieve (delta_t = {:.6})",
        s.config.name, delta_t
    );
    for (id, e) in report.candidates.iter().zip(&report.entropy_generated) {
        let _ = writeln!(summary, "  {:<12} {:>12.6} nats", id, e);
    }
    let _ = writeln!(
        summary,
        "  winner: {}{}",
        report.winner_id(),
        if report.tie { " (tie)" } else { "" }
    );
    Ok((results, vec![("sieve.csv".into(), csv)], summary))
}

fn run(s: &Scenario, channel: ReduceChannel, jobs: usize) -> Result<Parts, ScenarioError> {
    let spec = s.dynamics.as_ref().expect("required");
    let app = s.apparatus.as_ref().expect("required");
    let section = s.config.run.as_ref().expect("required");
    let channel = match channel {
        ReduceChannel::Modified => Channel::Modified,
        ReduceChannel::Luders => Channel::Luders,
        ReduceChannel::Dlp => {
            return Err(ScenarioError::Config(vec![Violation::new(
                "channel",
                "supported",
                "run supports the luders and modified channels",
            )]))
        }
    };
    let est = decoherence(s)?;
    let tau_dec = est.as_ref().ok().and_then(|e| e.tau_dec);
    let delta_t = resolve_interval("run", &section.interval, tau_dec)?;
    let options = RunOptions {
        channel,
        sieve_candidates: s.candidates.clone(),
        jobs,
    };
    let traj = repeated_reduction_run_with(spec, app, delta_t, section.steps, &options)?;
    let timescales = check_timescales_with(tau_dec, delta_t, traj.tau_p, section.factor)?;
    let rows: Vec<Vec<String>> = (0..traj.len())
        .map(|k| {
            vec![
                k.to_string(),
                format_float(traj.times[k]),
                format_float(traj.s_rho[k]),
                format_float(traj.s_luders[k]),
                format_float(traj.s_modified[k]),
                format_float(traj.interference_norm[k]),
            ]
        })
        .collect();
    let csv = csv_string(
        &[
            "step",
            "time",
            "S_rho",
            "S_luders",
            "S_modified",
            "interference_norm",
        ],
        &rows,
    )?;
    let results = json!({
        "decoherence": decoherence_json(&est),
        "trajectory": traj,
        "timescales": timescales,
    });
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{} run ({} steps, delta_t = {:.6})",
        s.config.name, section.steps, delta_t
    );
    let fmt_opt = |t: Option<f64>| t.map_or("unbounded".to_string(), |t| format!("{t:.6}"));
    let _ = writeln!(summary, "  tau_dec  {}", fmt_opt(tau_dec));
    let _ = writeln!(summary, "  tau_P    {}", fmt_opt(traj.tau_p));
    let _ = writeln!(
        summary,
        "  S_modified {:.6} -> {:.6}",
        traj.s_modified[0],
        traj.s_modified[traj.len() - 1]
    );
    let _ = writeln!(
        summary,
        "  timescales: {} (decoherence {}, stability {})",
        if timescales.passes { "pass" } else { "fail" },
        if timescales.decoherence_ok {
            "ok"
        } else {
            "fail"
        },
        if timescales.stability_ok {
            "ok"
        } else {
            "fail"
        },
    );
    Ok((results, vec![("trajectory.csv".into(), csv)], summary))
}
