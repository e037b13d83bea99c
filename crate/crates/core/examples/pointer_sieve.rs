//! Decoherence time and predictability sieve on the pointer benchmark.
//!
//! The environment has only two qubits, so pointer coherence recurs. The
//! last table shows how the z/x entropy gap depends on where Δt falls.

use qequiv::dynamics::{
    build_measurement_model, estimate_decoherence_time, pointer_sectors, sieve,
    MeasurementModelConfig, PointerBasis, SieveCandidate,
};

fn main() -> qequiv::Result<()> {
    for g_env in [0.0, 1.0, 2.0, 4.0] {
        let config = MeasurementModelConfig {
            g_env,
            ..Default::default()
        };
        let spec = build_measurement_model(&config)?;
        let z = pointer_sectors(&config, PointerBasis::Z)?;
        let est = estimate_decoherence_time(&spec, &z)?;
        match est.tau_dec {
            Some(t) => println!("g_env = {g_env}: tau_dec = {t:.4}"),
            None => println!("g_env = {g_env}: no decoherence within the grid"),
        }
    }

    let config = MeasurementModelConfig::default();
    let spec = build_measurement_model(&config)?;
    let z = pointer_sectors(&config, PointerBasis::Z)?;
    let x = pointer_sectors(&config, PointerBasis::X)?;
    let tau = estimate_decoherence_time(&spec, &z)?
        .tau_dec
        .expect("benchmark decoheres");
    let candidates = [SieveCandidate::new("z", z), SieveCandidate::new("x", x)];

    let report = sieve(&spec, &candidates, 5.0 * tau)?;
    println!("\nsieve at 5 tau_dec:");
    for (id, s) in report.candidates.iter().zip(&report.entropy_generated) {
        println!("  {id}: {s:.6} nats");
    }
    println!("  winner {} (tie: {})", report.winner_id(), report.tie);

    println!("\ndelta_t/tau_dec   S_x - S_z");
    let mut z_wins = 0;
    let n = 40;
    for k in 1..=n {
        let r = sieve(&spec, &candidates, 0.5 * k as f64 * tau)?;
        let gap = r.entropy_generated[1] - r.entropy_generated[0];
        z_wins += usize::from(gap > 0.0);
        println!("  {:>5.1}          {gap:+.4}", 0.5 * k as f64);
    }
    println!("z wins at {z_wins} of {n} intervals");
    Ok(())
}
