//! Seeded random ensembles used by samplers, property tests and the
//! acceptance suite. All generators are ChaCha-based so runs are
//! reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::states::{lift_apparatus_projectors, ApparatusProjectorSet, DensityOperator};
use crate::tensor_space::{BipartiteSpace, CMatrix, CVector, Complex};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard normal: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with complex standard-normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Density operator `GG†/tr(GG†)` with `G` of shape `dim × rank`.
///
/// `rank == dim` gives the Hilbert–Schmidt ensemble.
pub fn random_density_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> DensityOperator {
    let g = ginibre(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_trusted(m.unscale(tr))
}

/// Hilbert–Schmidt random density operator.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    random_density_with_rank(rng, dim, dim)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex::new(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    (&g + g.adjoint()).scale(0.5)
}

/// Random ordered composition of `n` into positive parts.
pub fn random_composition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut current = 1;
    for _ in 1..n {
        if rng.random_bool(0.5) {
            parts.push(current);
            current = 1;
        } else {
            current += 1;
        }
    }
    parts.push(current);
    parts
}

/// Apparatus set whose sector bases partition the columns of a Haar-random
/// unitary on A into a random composition of `dim_a`.
pub fn random_apparatus<R: Rng + ?Sized>(
    rng: &mut R,
    space: BipartiteSpace,
) -> Result<ApparatusProjectorSet> {
    let sizes = random_composition(rng, space.dim_a());
    random_apparatus_with_sizes(rng, space, &sizes)
}

/// Random apparatus set with prescribed sector dimensions.
pub fn random_apparatus_with_sizes<R: Rng + ?Sized>(
    rng: &mut R,
    space: BipartiteSpace,
    sizes: &[usize],
) -> Result<ApparatusProjectorSet> {
    let u = random_unitary(rng, space.dim_a());
    let mut next = 0;
    let bases = sizes
        .iter()
        .map(|&s| {
            let sector = (next..next + s).map(|k| u.column(k).into_owned()).collect();
            next += s;
            sector
        })
        .collect();
    lift_apparatus_projectors(space, bases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_sum_to_n() {
        let mut rng = seeded(1);
        for n in 1..10 {
            for _ in 0..20 {
                let parts = random_composition(&mut rng, n);
                assert_eq!(parts.iter().sum::<usize>(), n);
                assert!(parts.iter().all(|&p| p >= 1));
            }
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(2);
        let u = random_unitary(&mut rng, 6);
        assert!((u.adjoint() * &u - CMatrix::identity(6, 6)).norm() < 1e-12);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = seeded(3);
        for rank in 1..=4 {
            let rho = random_density_with_rank(&mut rng, 4, rank);
            assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = random_density(&mut seeded(9), 3);
        let b = random_density(&mut seeded(9), 3);
        assert_eq!(a, b);
    }
}
