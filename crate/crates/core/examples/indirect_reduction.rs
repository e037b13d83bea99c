//! Indirect (DLP) reduction: pure conditional states when each sector holds a
//! single relative direction, a purity deficit when it does not.

use qequiv::reduction::{dlp_reduce, modified_reduce};
use qequiv::states::make_pure;
use qequiv::tensor_space::real_matrix;
use qequiv::{ApparatusProjectorSet, BipartiteSpace};

fn main() -> qequiv::Result<()> {
    let space = BipartiteSpace::new(3, 2)?;
    let sectors = ApparatusProjectorSet::from_index_sectors(space, &[vec![0, 1], vec![2]])?;
    let s = 1.0 / 3f64.sqrt();
    let h = s * std::f64::consts::FRAC_1_SQRT_2;

    // |0⟩|0⟩ + |1⟩|0⟩ + |2⟩|1⟩: one relative direction per sector.
    let aligned = make_pure(space, real_matrix(3, 2, &[s, 0.0, s, 0.0, 0.0, s]))?;
    // |0⟩|0⟩ + |1⟩|+⟩ + |2⟩|1⟩: two directions in the first sector.
    let split = make_pure(space, real_matrix(3, 2, &[s, 0.0, h, h, 0.0, s]))?;

    for (name, psi) in [("aligned", &aligned), ("split", &split)] {
        let dlp = dlp_reduce(psi, &sectors)?;
        let rep = modified_reduce(&psi.density(), &sectors)?;
        println!("{name}:");
        for (d, m) in dlp.sectors.iter().zip(rep.sectors()) {
            println!(
                "  sector {}: w = {:.4}, purity of rho_B = {:.6}, deficit {:.6}",
                d.index,
                d.weight,
                m.state_b.purity(),
                d.purity_deficit
            );
        }
    }
    Ok(())
}
