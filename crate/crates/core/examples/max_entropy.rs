//! Sample members of a modified equivalence class and compare their
//! entropies with the representative's.

use qequiv::entropy::{sample_equivalence_class, verify_max_entropy, von_neumann_entropy};
use qequiv::random::{random_apparatus, random_density, seeded};
use qequiv::reduction::modified_reduce;
use qequiv::BipartiteSpace;

fn main() -> qequiv::Result<()> {
    let mut rng = seeded(17);
    let space = BipartiteSpace::new(4, 2)?;
    let apparatus = random_apparatus(&mut rng, space)?;
    let rho = random_density(&mut rng, space.dim());
    let rep = modified_reduce(&rho, &apparatus)?;

    println!(
        "sector dims {:?}, weights {:?}",
        apparatus.sector_dims(),
        rep.weights()
    );
    println!("S(rho) = {:.6}", von_neumann_entropy(&rho)?);
    println!("S(rep) = {:.6}", von_neumann_entropy(rep.rho_hat())?);

    let samples = sample_equivalence_class(&rep, 5, 1)?;
    for (k, sigma) in samples.iter().enumerate() {
        println!("sample {k}: S = {:.6}", von_neumann_entropy(sigma)?);
    }

    let report = verify_max_entropy(&rep, 500, 2)?;
    println!(
        "{} samples: max S = {:.6}, smallest gap to the bound {:.3e}",
        report.samples, report.max_sample_entropy, report.min_gap
    );
    Ok(())
}
