//! Property tests for the core invariants. Each case draws dimensions and a
//! seed; the seed drives the library's own samplers.

use proptest::prelude::*;

use qequiv::dynamics::{sieve_from, Propagator, SieveCandidate};
use qequiv::entropy::{entropy_chain, sample_equivalence_class, von_neumann_entropy};
use qequiv::random::{random_apparatus, random_density_with_rank, random_hermitian, seeded};
use qequiv::reduction::{
    equivalent_modified, equivalent_standard, luders_dephase, modified_reduce,
};
use qequiv::states::validate_projector_set;
use qequiv::tensor_space::trace;
use qequiv::{BipartiteSpace, CMatrix, DensityOperator};
use rand::Rng;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4, 1usize..=3)
}

fn state(space: BipartiteSpace, seed: u64) -> (qequiv::ApparatusProjectorSet, DensityOperator) {
    let mut rng = seeded(seed);
    let app = random_apparatus(&mut rng, space).unwrap();
    let rank = rng.random_range(1..=space.dim());
    (app, random_density_with_rank(&mut rng, space.dim(), rank))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apparatus_projectors_are_valid((a, b) in dims(), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let app = random_apparatus(&mut seeded(seed), space).unwrap();
        let p = app.lifted();
        let sum = p.projectors().iter().fold(CMatrix::zeros(space.dim(), space.dim()), |acc, x| acc + x);
        prop_assert!((sum - CMatrix::identity(space.dim(), space.dim())).norm() < 1e-10);
        for (i, pi) in p.projectors().iter().enumerate() {
            prop_assert!((pi * pi - pi).norm() < 1e-10);
            prop_assert_eq!(p.ranks()[i], app.sector_dim(i) * b);
        }
        prop_assert!(validate_projector_set(p.projectors().to_vec()).is_ok());
    }

    #[test]
    fn dropping_a_sector_breaks_exhaustiveness(seed in any::<u64>()) {
        let space = BipartiteSpace::new(3, 2).unwrap();
        let app = random_apparatus(&mut seeded(seed), space).unwrap();
        prop_assume!(app.len() > 1);
        let mut ps = app.lifted().projectors().to_vec();
        ps.pop();
        let err = validate_projector_set(ps).unwrap_err();
        prop_assert_eq!(err.invariant(), "exhaustiveness");
    }

    #[test]
    fn partial_trace_of_product((a, b) in dims(), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let mut rng = seeded(seed);
        let x = random_hermitian(&mut rng, a);
        let y = random_hermitian(&mut rng, b);
        let xy = space.tensor_product(&x, &y).unwrap();
        let tb = space.partial_trace_a(&xy).unwrap();
        let ta = space.partial_trace_b(&xy).unwrap();
        prop_assert!((tb - y.scale(trace(&x).re)).norm() < 1e-9);
        prop_assert!((ta - x.scale(trace(&y).re)).norm() < 1e-9);
    }

    #[test]
    fn representative_is_in_class_and_idempotent((a, b) in dims(), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let (app, rho) = state(space, seed);
        let rep = modified_reduce(&rho, &app).unwrap();
        prop_assert!((rep.rho_hat().trace() - 1.0).abs() < 1e-10);
        prop_assert!((rep.weights().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(equivalent_modified(rep.rho_hat(), &rho, &app).unwrap().equivalent);
        let again = modified_reduce(rep.rho_hat(), &app).unwrap();
        prop_assert!(again.rho_hat().distance(rep.rho_hat()) < 1e-9);
    }

    #[test]
    fn luders_dephasing_is_idempotent((a, b) in dims(), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let (app, rho) = state(space, seed);
        let once = luders_dephase(&rho, app.lifted()).unwrap();
        let twice = luders_dephase(&once, app.lifted()).unwrap();
        prop_assert!(once.distance(&twice) < 1e-10);
        prop_assert!(equivalent_standard(&once, &rho, app.lifted()).unwrap().equivalent);
        prop_assert!(equivalent_modified(&once, &rho, &app).unwrap().equivalent);
    }

    #[test]
    fn entropy_chain_is_ordered((a, b) in dims(), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let (app, rho) = state(space, seed);
        let r = entropy_chain(&rho, &app).unwrap();
        prop_assert!(r.s_rho >= -1e-12);
        prop_assert!(r.s_rho <= r.s_luders + 1e-9);
        prop_assert!(r.s_luders <= r.s_modified + 1e-9);
        prop_assert!(r.s_modified <= (space.dim() as f64).ln() + 1e-9);
        prop_assert!(r.decomposition_residual <= 1e-8);
    }

    #[test]
    fn class_samples_stay_below_the_representative((a, b) in (2usize..=4, 1usize..=3), seed in any::<u64>()) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let (app, rho) = state(space, seed);
        let rep = modified_reduce(&rho, &app).unwrap();
        let bound = von_neumann_entropy(rep.rho_hat()).unwrap();
        for sigma in sample_equivalence_class(&rep, 8, seed ^ 0x5eed).unwrap() {
            prop_assert!(equivalent_modified(&sigma, &rho, &app).unwrap().equivalent);
            prop_assert!(sigma.spectrum().min() >= -1e-10);
            prop_assert!(von_neumann_entropy(&sigma).unwrap() <= bound + 1e-8);
        }
    }

    #[test]
    fn evolution_preserves_spectrum((a, b) in dims(), seed in any::<u64>(), t in -5.0f64..5.0) {
        let space = BipartiteSpace::new(a, b).unwrap();
        let (_, rho) = state(space, seed);
        let h = random_hermitian(&mut seeded(seed.wrapping_add(1)), space.dim());
        let prop = Propagator::new(&h).unwrap();
        let out = prop.evolve(&rho, t).unwrap();
        let before = rho.spectrum().values;
        let after = out.spectrum().values;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        let back = prop.evolve(&out, -t).unwrap();
        prop_assert!(back.distance(&rho) < 1e-9);
        let many = prop.evolve_many(&rho, &[0.0, t]).unwrap();
        prop_assert!(many[0].distance(&rho) < 1e-12);
        prop_assert!(many[1].distance(&out) < 1e-9);
    }

    #[test]
    fn sieve_winner_ignores_candidate_order(seed in any::<u64>(), dt in 0.0f64..3.0) {
        let space = BipartiteSpace::new(3, 2).unwrap();
        let mut rng = seeded(seed);
        let candidates: Vec<_> = (0..3)
            .map(|k| SieveCandidate::new(format!("c{k}"), random_apparatus(&mut rng, space).unwrap()))
            .collect();
        let rho = random_density_with_rank(&mut rng, space.dim(), 1);
        let prop = Propagator::new(&random_hermitian(&mut rng, space.dim())).unwrap();
        let forward = sieve_from(&prop, &rho, &candidates, dt, 1).unwrap();
        let mut reversed = candidates.clone();
        reversed.reverse();
        let backward = sieve_from(&prop, &rho, &reversed, dt, 2).unwrap();
        prop_assume!(!forward.tie && !backward.tie);
        prop_assert_eq!(forward.winner_id(), backward.winner_id());
        for (k, id) in forward.candidates.iter().enumerate() {
            let j = backward.candidates.iter().position(|c| c == id).unwrap();
            prop_assert!((forward.entropy_generated[k] - backward.entropy_generated[j]).abs() < 1e-12);
        }
    }
}
