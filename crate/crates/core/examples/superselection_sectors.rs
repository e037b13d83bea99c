//! Build the algebra generated by a random apparatus projector set, recover
//! its superselection sectors from the center and check the duality
//! relations.

use qequiv::operator_algebra::{
    center, commutant, generated_algebra, superselection_sectors, verify_duality,
};
use qequiv::random::{random_apparatus, seeded};
use qequiv::BipartiteSpace;

fn main() -> qequiv::Result<()> {
    let mut rng = seeded(3);
    let space = BipartiteSpace::new(4, 2)?;
    let apparatus = random_apparatus(&mut rng, space)?;
    let projectors = apparatus.lifted();
    println!("sector dimensions on A: {:?}", apparatus.sector_dims());

    let algebra = generated_algebra(projectors)?;
    let expected: usize = apparatus
        .sector_dims()
        .iter()
        .map(|d| (d * space.dim_b()).pow(2))
        .sum();
    println!(
        "dim 𝒜 = {} (Σ (d_i·dim B)² = {expected})",
        algebra.linear_dim()
    );
    println!("dim 𝒜′ = {}", commutant(algebra.basis())?.linear_dim());
    println!("dim 𝒵 = {}", center(&algebra)?.linear_dim());

    let sectors = superselection_sectors(&algebra)?;
    for (k, p) in sectors.projectors().iter().enumerate() {
        let closest = projectors
            .projectors()
            .iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min);
        println!(
            "recovered sector {k}: rank {}, Frobenius error {closest:.1e}",
            sectors.ranks()[k]
        );
    }

    let report = verify_duality(projectors)?;
    println!(
        "𝒜 = 𝒜″: {} ({:.1e})  𝒜′ ⊆ 𝒜: {} ({:.1e})  𝒵 = 𝒜′: {} ({:.1e})",
        report.algebra_is_bicommutant,
        report.bicommutant_residual,
        report.commutant_in_algebra,
        report.commutant_in_algebra_residual,
        report.center_is_commutant,
        report.center_commutant_residual,
    );
    Ok(())
}
