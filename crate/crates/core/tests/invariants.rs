use proptest::prelude::*;
use qmcap_core::covariant::{simplex_entropy_integral, Welford};
use qmcap_core::encode::{conditional_outcome_dist, Ensemble, Kernel};
use qmcap_core::entropy::{harmonic_tail, shannon_of, subentropy_of_spectrum};
use qmcap_core::infocap::{
    blahut_arimoto, capacity_commutative, info_final, info_initial, info_initial_reverse, measurement_strength,
    BaConfig,
};
use qmcap_core::linalg::{eig_hermitian, polar_decompose, reassemble};
use qmcap_core::majorize::{is_majorized_by, random_majorization_pair};
use qmcap_core::measure::{
    concat, ipm_from_generator, mix, random_commutative_measurement, random_ipm_generator, random_measurement,
};
use qmcap_core::random::{ginibre, random_density, rng_for};
use qmcap_core::{ComplexMatrix, DensityOperator, ProbVector, SpectrumVector};

fn spectrum(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..=max_dim).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
    })
}

/// Q = −Σ_k λ_k^N ln λ_k / Π_{j≠k}(λ_k − λ_j), valid for distinct λ.
fn subentropy_direct(l: &[f64]) -> f64 {
    let n = l.len() as i32;
    -(0..l.len())
        .filter(|&k| l[k] > 0.0)
        .map(|k| {
            let den: f64 = (0..l.len()).filter(|&j| j != k).map(|j| l[k] - l[j]).product();
            l[k].powi(n) * l[k].ln() / den
        })
        .sum::<f64>()
}

fn well_separated(l: &[f64], gap: f64) -> bool {
    (0..l.len()).all(|a| ((a + 1)..l.len()).all(|b| (l[a] - l[b]).abs() > gap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..=5, seed: u64) {
        let a = ginibre(dim, &mut rng_for(seed, 0));
        let h = (&a + &a.adjoint()).scale(0.5);
        let (vals, vecs) = eig_hermitian(&h).unwrap();
        prop_assert!(reassemble(&vecs, vals.values()).distance(&h) < 1e-10);
        prop_assert!(vecs.unitarity_defect() < 1e-10);
        prop_assert!(vals.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn polar_parts_multiply_back(dim in 1usize..=5, seed: u64) {
        let omega = ginibre(dim, &mut rng_for(seed, 0));
        let (u, q) = polar_decompose(&omega);
        prop_assert!((&u * &q).distance(&omega) < 1e-10);
        prop_assert!(u.unitarity_defect() < 1e-10);
        prop_assert!(q.hermitian_defect() < 1e-12);
    }

    #[test]
    fn combinations_stay_complete(dim in 2usize..=4, k in 1usize..=4, bare: bool, seed: u64, p in 0.0f64..=1.0) {
        let a = random_measurement(dim, k, bare, seed).unwrap();
        let b = random_measurement(dim, k + 1, !bare, seed ^ 0x5a5a).unwrap();
        prop_assert!(a.validate().complete);
        prop_assert!(mix(&a, &b, p).unwrap().validate().complete);
        prop_assert!(concat(&a, &b).unwrap().validate().complete);
    }

    #[test]
    fn outcome_probabilities_normalize(dim in 2usize..=4, k in 1usize..=5, seed: u64) {
        let m = random_measurement(dim, k, false, seed).unwrap();
        let rho = random_density(dim, &mut rng_for(seed, 9));
        let p = m.probabilities(&rho).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!((m.unconditional_map(&rho).unwrap().matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn information_forms_agree_and_are_bounded(dim in 2usize..=4, k in 1usize..=5, seed: u64) {
        let m = random_measurement(dim, k, false, seed).unwrap();
        let mut rng = rng_for(seed, 3);
        let states: Vec<DensityOperator> = (0..3).map(|_| random_density(dim, &mut rng)).collect();
        let e = Ensemble::new(ProbVector::new(vec![0.5, 0.3, 0.2]).unwrap(), states).unwrap();
        let fwd = info_initial(&m, &e).unwrap();
        prop_assert!((fwd - info_initial_reverse(&m, &e).unwrap()).abs() < 1e-9);
        prop_assert!(fwd >= -1e-12 && fwd <= shannon_of(&[0.5, 0.3, 0.2]) + 1e-12);
        let fin = info_final(&m, &e.density()).unwrap();
        prop_assert!(fin >= -1e-9 && fin <= (dim as f64).ln() + 1e-9);
    }

    #[test]
    fn strength_bounded_by_log_dim(dim in 2usize..=4, k in 1usize..=5, seed: u64) {
        let m = random_measurement(dim, k, true, seed).unwrap();
        let s = measurement_strength(&m).unwrap();
        prop_assert!(s >= -1e-12 && s <= (dim as f64).ln() + 1e-9);
    }

    #[test]
    fn subentropy_bounds_and_symmetry(e in spectrum(6)) {
        let q = subentropy_of_spectrum(&e).unwrap();
        prop_assert!(q >= -1e-10 && q <= shannon_of(&e) + 1e-10);
        let mut rev = e.clone();
        rev.reverse();
        prop_assert!((q - subentropy_of_spectrum(&rev).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn subentropy_matches_distinct_formula(e in spectrum(4)) {
        prop_assume!(well_separated(&e, 0.05));
        let q = subentropy_of_spectrum(&e).unwrap();
        prop_assert!((q - subentropy_direct(&e)).abs() < 1e-9, "{q} vs {}", subentropy_direct(&e));
    }

    #[test]
    fn quadrature_matches_subentropy(e in spectrum(3)) {
        let n = e.len();
        let quad = simplex_entropy_integral(&SpectrumVector::probability(e.clone()).unwrap(), 200).unwrap();
        let closed = subentropy_of_spectrum(&e).unwrap() + harmonic_tail(n);
        let tol = if n == 2 { 1e-6 } else { 1e-4 };
        prop_assert!((quad - closed).abs() < tol);
    }

    #[test]
    fn majorization_pairs_are_ordered(n in 2usize..=6, seed: u64) {
        let (x, y) = random_majorization_pair(n, seed).unwrap();
        prop_assert!(is_majorized_by(&x, &y).unwrap());
        prop_assert!(is_majorized_by(&x, &x).unwrap());
    }

    #[test]
    fn classical_schur_concavity(dim in 2usize..=4, seed: u64) {
        let m = ipm_from_generator(&random_ipm_generator(dim, seed)).unwrap();
        let (x, y) = random_majorization_pair(dim, seed ^ 1).unwrap();
        let d = |v: &SpectrumVector| info_initial(&m, &Ensemble::diagonal(&ProbVector::new(v.values().to_vec()).unwrap())).unwrap();
        prop_assert!(d(&x) >= d(&y) - 1e-9);
    }

    #[test]
    fn commutative_capacity_bounded(dim in 2usize..=3, k in 2usize..=4, seed: u64) {
        let m = random_commutative_measurement(dim, k, seed).unwrap();
        let c = capacity_commutative(&m).unwrap();
        prop_assert!(c.value >= -1e-12 && c.value <= (dim.min(k) as f64).ln() + 1e-9);
        prop_assert!((info_initial(&m, c.achieving_encoding.as_ref().unwrap()).unwrap() - c.value).abs() < 1e-6);
    }

    #[test]
    fn welford_merge_matches_single_pass(xs in prop::collection::vec(-10.0f64..10.0, 2..200), split in 0usize..200) {
        let split = split.min(xs.len());
        let mut all = Welford::default();
        let (mut a, mut b) = (Welford::default(), Welford::default());
        for (i, &x) in xs.iter().enumerate() {
            all.push(x);
            if i < split { a.push(x) } else { b.push(x) }
        }
        let merged = a.merge(&b);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let se = (var / xs.len() as f64).sqrt();
        prop_assert!((merged.stderr() - se).abs() < 1e-9 * (1.0 + se));
        prop_assert!((all.stderr() - se).abs() < 1e-9 * (1.0 + se));
    }

    #[test]
    fn blahut_arimoto_binary_symmetric(eps in 0.0f64..0.5) {
        let k = Kernel::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap();
        let c = blahut_arimoto(&k, BaConfig::default()).unwrap();
        let expect = std::f64::consts::LN_2 - shannon_of(&[eps, 1.0 - eps]);
        prop_assert!((c.value - expect).abs() < 1e-9);
    }
}

#[test]
fn blahut_arimoto_z_channel() {
    let k = Kernel::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
    let c = blahut_arimoto(&k, BaConfig::default()).unwrap();
    assert!((c.value - 1.25f64.ln()).abs() < 1e-9);
}

#[test]
fn kernel_of_basis_ensemble_is_effect_diagonal() {
    let m = random_commutative_measurement(3, 4, 8).unwrap();
    let basis = Ensemble::uniform_basis(3, None).unwrap();
    let k = conditional_outcome_dist(&m, &basis).unwrap();
    for i in 0..3 {
        for (j, e) in m.effects().iter().enumerate() {
            let ket: Vec<_> = (0..3).map(|a| if a == i { 1.0.into() } else { 0.0.into() }).collect();
            assert!((k.q(j, i) - e.matrix().expectation(&ket)).abs() < 1e-12);
        }
    }
}

#[test]
fn complete_covariant_values() {
    let two = SpectrumVector::probability(vec![1.0, 0.0]).unwrap();
    assert!((simplex_entropy_integral(&two, 200).unwrap() - 0.5).abs() < 1e-6);
    let flat = |n: usize| (n as f64).ln() - harmonic_tail(n);
    assert!((flat(2) - 0.193147).abs() < 5e-7);
    assert!((flat(3) - 0.265279).abs() < 5e-7);
    let id = ComplexMatrix::identity(2);
    assert!(capacity_commutative(&ipm_from_generator(&id.scale(std::f64::consts::FRAC_1_SQRT_2)).unwrap())
        .unwrap()
        .value
        .abs()
        < 1e-12);
}
