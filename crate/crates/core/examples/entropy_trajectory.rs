//! Repeated reduction on the pointer benchmark with both channels.

use qequiv::dynamics::{
    build_measurement_model, check_timescales, estimate_decoherence_time, pointer_sectors,
    repeated_reduction_run_with, Channel, MeasurementModelConfig, PointerBasis, RunOptions,
    SieveCandidate,
};

fn main() -> qequiv::Result<()> {
    let config = MeasurementModelConfig::default();
    let spec = build_measurement_model(&config)?;
    let z = pointer_sectors(&config, PointerBasis::Z)?;
    let x = pointer_sectors(&config, PointerBasis::X)?;
    let tau = estimate_decoherence_time(&spec, &z)?
        .tau_dec
        .expect("benchmark decoheres");
    let delta_t = 10.0 * tau;

    let tracked = RunOptions {
        sieve_candidates: vec![
            SieveCandidate::new("z", z.clone()),
            SieveCandidate::new("x", x),
        ],
        ..Default::default()
    };
    let modified = repeated_reduction_run_with(&spec, &z, delta_t, 20, &tracked)?;
    let luders = repeated_reduction_run_with(
        &spec,
        &z,
        delta_t,
        20,
        &RunOptions {
            channel: Channel::Luders,
            ..Default::default()
        },
    )?;

    println!("step    time     S_rho  S_luders  S_modified  interference | luders run");
    for k in 0..modified.len() {
        println!(
            "{k:>4} {:>7.3} {:>9.5} {:>9.5} {:>11.5} {:>13.5} | {:.5}",
            modified.times[k],
            modified.s_rho[k],
            modified.s_luders[k],
            modified.s_modified[k],
            modified.interference_norm[k],
            luders.s_luders[k],
        );
    }
    let report = check_timescales(Some(tau), delta_t, modified.tau_p)?;
    println!(
        "tau_dec = {tau:.4}, delta_t = {delta_t:.4}, tau_P = {:?}, timescales pass: {}",
        modified.tau_p, report.passes
    );
    Ok(())
}
