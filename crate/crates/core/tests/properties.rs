use proptest::prelude::*;

use unires::channels::random::{density, haar_unitary, hermitian, rng_from_seed, stochastic};
use unires::residual::{residual_bures, residual_kl, residual_trace};
use unires::spectral::{class_add, sorted_spectrum, OperatorJson};
use unires::{
    apply_stochastic, DensityOperator, DivergenceKind, HermitianOperator, SortedSpectrum,
};

fn probability(raw: Vec<f64>) -> SortedSpectrum {
    let total: f64 = raw.iter().sum();
    SortedSpectrum::from_unsorted(raw.into_iter().map(|x| x / total).collect()).unwrap()
}

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_a_class_invariant(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = hermitian(&mut rng, dim);
        let u = haar_unitary(&mut rng, dim);
        let before = sorted_spectrum(&a);
        let after = sorted_spectrum(&a.conjugate(&u).unwrap());
        for (x, y) in before.values().iter().zip(after.values()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_never_exceeds_divergence(seed in any::<u64>(), dim in 2usize..=4, rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = density(&mut rng, dim, rank.min(dim)).unwrap();
        let sigma = density(&mut rng, dim, dim).unwrap();
        for kind in DivergenceKind::all(0.5).into_iter().chain([DivergenceKind::PetzRenyi { alpha: 2.0 }]) {
            let d = kind.evaluate(&rho, &sigma).unwrap();
            let r = kind.residual_of(&rho, &sigma).unwrap();
            prop_assert!(r <= d + 1e-9 || d == f64::INFINITY, "{kind}: {r} > {d}");
        }
    }

    #[test]
    fn operator_json_round_trip(seed in any::<u64>(), dim in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let a = hermitian(&mut rng, dim);
        let text = serde_json::to_string(&a).unwrap();
        let back: HermitianOperator = serde_json::from_str(&text).unwrap();
        let wire: OperatorJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(wire.dim, dim);
        for (x, y) in a.matrix().iter().zip(back.matrix().iter()) {
            prop_assert!((x - y).norm() <= 1e-15);
        }
    }

    #[test]
    fn stochastic_maps_preserve_mass(seed in any::<u64>(), rows in 1usize..=5, raw in weights(4)) {
        let p = probability(raw);
        let mut rng = rng_from_seed(seed);
        let t = stochastic(&mut rng, rows, 4).unwrap();
        let out = apply_stochastic(&t, &p).unwrap();
        prop_assert_eq!(out.len(), rows);
        prop_assert!((out.sum() - 1.0).abs() < 1e-12);
        for w in out.values().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn sorted_sums_stay_sorted(a in weights(5), b in weights(5)) {
        let (a, b) = (probability(a), probability(b));
        let sum = class_add(&a, &b).unwrap();
        for w in sum.values().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn residual_metrics_are_bounded(a in weights(4), b in weights(4)) {
        let (p, q) = (probability(a), probability(b));
        let bures = residual_bures(&p, &q).unwrap();
        let trace = residual_trace(&p, &q).unwrap();
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&bures));
        prop_assert!((0.0..=1.0).contains(&trace));
        // Fuchs-van de Graaf on spectra: 1 - cos(bures) <= trace <= sin(bures).
        prop_assert!(1.0 - bures.cos() <= trace + 1e-12);
        prop_assert!(trace <= bures.sin() + 1e-12);
        prop_assert!(residual_kl(&p, &q).unwrap() >= 0.0);
    }

    #[test]
    fn conjugation_keeps_states_valid(seed in any::<u64>(), dim in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let rho = density(&mut rng, dim, dim).unwrap();
        let u = haar_unitary(&mut rng, dim);
        let moved: DensityOperator = rho.conjugate(&u).unwrap();
        prop_assert!((moved.operator().trace() - 1.0).abs() < 1e-12);
        prop_assert!((moved.purity() - rho.purity()).abs() < 1e-12);
    }
}
