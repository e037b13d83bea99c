//! Reduce a Bell pair with both channels and print weights, conditional
//! states and entropies.

use std::f64::consts::FRAC_1_SQRT_2;

use qequiv::entropy::entropy_chain;
use qequiv::reduction::{equivalent_modified, luders_dephase, modified_reduce};
use qequiv::states::{conditional_states, make_pure};
use qequiv::tensor_space::real_matrix;
use qequiv::{ApparatusProjectorSet, BipartiteSpace};

fn main() -> qequiv::Result<()> {
    let space = BipartiteSpace::new(2, 2)?;
    let psi = make_pure(
        space,
        real_matrix(2, 2, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]),
    )?;
    let rho = psi.density();
    let apparatus = ApparatusProjectorSet::rank_one(space)?;

    let luders = luders_dephase(&rho, apparatus.lifted())?;
    let rep = modified_reduce(&rho, &apparatus)?;
    println!("weights: {:?}", rep.weights());
    for (i, c) in conditional_states(&rho, &apparatus)?.iter().enumerate() {
        if let Some(c) = c {
            println!(
                "sector {i}: w = {:.3}, purity of rho_B = {:.6}",
                c.weight,
                c.state.purity()
            );
            println!("{:.3}", c.state.matrix().map(|z| z.re));
        }
    }

    let eq = equivalent_modified(&luders, rep.rho_hat(), &apparatus)?;
    println!(
        "Lüders output equivalent to the representative: {} (residual {:.1e})",
        eq.equivalent, eq.residual
    );
    println!("‖ρ̂_L − ρ̂_mod‖_F = {:.1e}", luders.distance(rep.rho_hat()));

    let s = entropy_chain(&rho, &apparatus)?;
    println!(
        "S(rho) = {:.6}  S(luders) = {:.6}  S(modified) = {:.6}",
        s.s_rho, s.s_luders, s.s_modified
    );
    println!("jaynes gap = {:.2e}", s.jaynes_gap);
    Ok(())
}
