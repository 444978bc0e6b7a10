//! Property tests for the numerical invariants of states, spectra, entropies
//! and the relations built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entropic_polygon::discrete::{
    haar_random_pure, haar_random_unitary, named_state, partial_trace, purify, random_density, spectrum,
    DensityMatrix, DimsLayout, NamedState, Spectrum,
};
use entropic_polygon::entropy::{
    entropy_discrete, entropy_gaussian, entropy_of_state, mode_entropy_fn, EntropySpec, StateRef,
};
use entropic_polygon::gaussian::{
    local_normal_form, random_cm_planted, random_symplectic, single_mode_eigenvalues, symplectic_spectrum,
    williamson, CmKind, CovarianceMatrix, ModePartition, SymplecticSpectrum,
};
use entropic_polygon::io::{decode_cm, decode_state, encode_cm, encode_density, encode_vector, DiscreteState};
use entropic_polygon::relations::{
    gaussian_marginal_check, lemma1_check, one_to_rest, polygon_check, purified_equivalence_demo,
    qubit_marginal_check, smallest_qubit_eigenvalues, subadditivity_check, weak_majorization, Bipartition,
    MonotoneTransform, PartyState,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn spec(s: &str) -> EntropySpec {
    s.parse().unwrap()
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

fn random_mixed(dims: &[usize], rng: &mut ChaCha8Rng) -> DensityMatrix {
    let layout = DimsLayout::new(dims.to_vec()).unwrap();
    let dim = layout.total_dim();
    let rank = rng.random_range(1..=dim);
    random_density(dim, rank, rng).unwrap().with_layout(layout).unwrap()
}

fn random_pure_cm(n: usize, rng: &mut ChaCha8Rng) -> CovarianceMatrix {
    let s = random_symplectic(n, 2.0, rng).unwrap();
    CovarianceMatrix::vacuum(n).transform(&s).unwrap()
}

fn random_mixed_cm(n: usize, rng: &mut ChaCha8Rng) -> CovarianceMatrix {
    random_cm_planted(n, CmKind::Mixed { s_max: 4.0 }, 2.0, rng).unwrap().0
}

fn probabilities(raw: &[f64]) -> Spectrum {
    let total: f64 = raw.iter().sum();
    Spectrum::new(raw.iter().map(|x| x / total).collect()).unwrap()
}

const FAMILIES: [&str; 8] = ["S", "R:p=1.5", "R:p=2", "R:p=3", "T:q=1.5", "T:q=2", "T:q=3", "S:b=e"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_keeps_trace_hermiticity_and_positivity(
        seed in any::<u64>(),
        dims in prop::collection::vec(2usize..=3, 2..=3),
        keep_mask in 1u8..7,
    ) {
        let mut r = rng(seed);
        let rho = random_mixed(&dims, &mut r);
        let keep: Vec<usize> = (0..dims.len()).filter(|k| keep_mask & (1 << k) != 0).collect();
        prop_assume!(!keep.is_empty());
        let red = partial_trace(&rho, &keep).unwrap();
        prop_assert!((red.trace() - 1.0).abs() < 1e-10);
        let m = red.entries();
        prop_assert!(max_norm(&(m - m.adjoint())) < 1e-10);
        prop_assert!(spectrum(&red).unwrap().values().iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn pure_bipartite_marginals_share_spectrum_and_entropy(
        seed in any::<u64>(),
        da in 2usize..=4,
        db in 2usize..=4,
    ) {
        let psi = haar_random_pure(&DimsLayout::new(vec![da, db]).unwrap(), &mut rng(seed));
        let a = psi.reduced(&[0]).unwrap();
        let b = psi.reduced(&[1]).unwrap();
        let (sa, sb) = (spectrum(&a).unwrap(), spectrum(&b).unwrap());
        let mut va: Vec<f64> = sa.values().to_vec();
        let mut vb: Vec<f64> = sb.values().to_vec();
        va.sort_by(|x, y| y.total_cmp(x));
        vb.sort_by(|x, y| y.total_cmp(x));
        let k = da.min(db);
        for i in 0..k {
            prop_assert!((va[i] - vb[i]).abs() < 1e-10);
        }
        for f in FAMILIES {
            let e = spec(f);
            let ea = entropy_of_state(StateRef::Discrete(&a), &e).unwrap();
            let eb = entropy_of_state(StateRef::Discrete(&b), &e).unwrap();
            prop_assert!((ea - eb).abs() < 1e-9, "{f}: {ea} vs {eb}");
        }
    }

    #[test]
    fn pure_gaussian_bipartite_marginals_share_entropy(seed in any::<u64>(), na in 1usize..=2, nb in 1usize..=2) {
        let sigma = random_pure_cm(na + nb, &mut rng(seed));
        let a = sigma.submatrix_modes(&(0..na).collect::<Vec<_>>());
        let b = sigma.submatrix_modes(&(na..na + nb).collect::<Vec<_>>());
        for f in FAMILIES {
            let e = spec(f);
            let ea = entropy_of_state(StateRef::Gaussian(&a), &e).unwrap();
            let eb = entropy_of_state(StateRef::Gaussian(&b), &e).unwrap();
            prop_assert!((ea - eb).abs() < 1e-9 * ea.abs().max(1.0), "{f}: {ea} vs {eb}");
        }
    }

    #[test]
    fn purify_then_trace_is_identity(seed in any::<u64>(), dims in prop::collection::vec(2usize..=3, 1..=2)) {
        let mut r = rng(seed);
        let dims = if dims.len() == 1 { vec![dims[0], 2] } else { dims };
        let rho = random_mixed(&dims, &mut r);
        let psi = purify(&rho).unwrap();
        let keep: Vec<usize> = (0..dims.len()).collect();
        let back = psi.reduced(&keep).unwrap();
        prop_assert!(max_norm(&(back.entries() - rho.entries())) < 1e-10);
    }

    #[test]
    fn entropies_are_unitarily_invariant(seed in any::<u64>(), dim in 2usize..=6) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=dim);
        let rho = random_density(dim, rank, &mut r).unwrap();
        let u = haar_random_unitary(dim, &mut r);
        let rotated = rho.conjugate(&u).unwrap();
        for f in FAMILIES {
            let e = spec(f);
            let a = entropy_of_state(StateRef::Discrete(&rho), &e).unwrap();
            let b = entropy_of_state(StateRef::Discrete(&rotated), &e).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{f}: {a} vs {b}");
        }
    }

    #[test]
    fn entropies_are_symplectically_invariant(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sigma = random_mixed_cm(n, &mut r);
        let s = random_symplectic(n, 1.0, &mut r).unwrap();
        let moved = sigma.transform(&s).unwrap();
        for f in FAMILIES {
            let e = spec(f);
            let a = entropy_of_state(StateRef::Gaussian(&sigma), &e).unwrap();
            let b = entropy_of_state(StateRef::Gaussian(&moved), &e).unwrap();
            prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{f}: {a} vs {b}");
        }
    }

    #[test]
    fn renyi_and_tsallis_recover_von_neumann(
        raw in prop::collection::vec(1e-3f64..1.0, 2..=8),
        modes in prop::collection::vec(1.0f64..4.0, 1..=4),
        single in 1.0f64..4.0,
    ) {
        let eps = 1e-4;
        let p = probabilities(&raw);
        let s = SymplecticSpectrum::new(modes).unwrap();
        let one = SymplecticSpectrum::new(vec![single]).unwrap();
        let (s2, s_nat) = (spec("S"), spec("S:b=e"));
        let r = EntropySpec::renyi(1.0 + eps).unwrap();
        let t = EntropySpec::tsallis(1.0 + eps).unwrap();
        prop_assert!((entropy_discrete(&p, &r) - entropy_discrete(&p, &s2)).abs() <= 1e-3);
        prop_assert!((entropy_discrete(&p, &t) - entropy_discrete(&p, &s_nat)).abs() <= 1e-3);
        prop_assert!((entropy_gaussian(&s, &r) - entropy_gaussian(&s, &s2)).abs() <= 1e-3);
        // Tsallis is pseudo-additive across modes, so the 1e-3 bound is asserted per mode
        prop_assert!((entropy_gaussian(&one, &t) - entropy_gaussian(&one, &s_nat)).abs() <= 1e-3);
    }

    #[test]
    fn tsallis_is_a_transform_of_renyi(
        raw in prop::collection::vec(1e-6f64..1.0, 2..=8),
        modes in prop::collection::vec(1.0f64..6.0, 1..=4),
        q in 1.01f64..5.0,
        base in prop::sample::select(vec![2.0, std::f64::consts::E, 10.0]),
    ) {
        let p = probabilities(&raw);
        let s = SymplecticSpectrum::new(modes).unwrap();
        let r = EntropySpec::renyi(q).unwrap().with_base(base).unwrap();
        let t = EntropySpec::tsallis(q).unwrap();
        let f = MonotoneTransform::TsallisFromRenyi { q, log_base: base };
        prop_assert!((f.apply(entropy_discrete(&p, &r)) - entropy_discrete(&p, &t)).abs() <= 1e-10);
        prop_assert!((f.apply(entropy_gaussian(&s, &r)) - entropy_gaussian(&s, &t)).abs() <= 1e-10);
    }

    #[test]
    fn exchange_formats_round_trip_bit_exactly(seed in any::<u64>(), dims in prop::collection::vec(2usize..=3, 1..=3), n in 1usize..=4) {
        let mut r = rng(seed);
        let layout = DimsLayout::new(dims.clone()).unwrap();
        let psi = haar_random_pure(&layout, &mut r);
        let text = serde_json::to_string(&encode_vector(&psi)).unwrap();
        match decode_state(&text).unwrap() {
            DiscreteState::Vector(v) => prop_assert_eq!(v.amplitudes(), psi.amplitudes()),
            DiscreteState::Density(_) => prop_assert!(false, "vector decoded as a density"),
        }
        let rho = random_mixed(&dims, &mut r);
        let text = serde_json::to_string(&encode_density(&rho)).unwrap();
        match decode_state(&text).unwrap() {
            DiscreteState::Density(d) => prop_assert_eq!(d.entries(), rho.entries()),
            DiscreteState::Vector(_) => prop_assert!(false, "density decoded as a vector"),
        }
        let sigma = random_mixed_cm(n, &mut r);
        let text = serde_json::to_string(&encode_cm(&sigma)).unwrap();
        let back = decode_cm(&text).unwrap();
        prop_assert_eq!(back.entries(), sigma.entries());
    }

    #[test]
    fn williamson_residuals_are_small(seed in any::<u64>(), n in 1usize..=4, pure in any::<bool>()) {
        let mut r = rng(seed);
        let kind = if pure { CmKind::Pure } else { CmKind::Mixed { s_max: 4.0 } };
        let (sigma, planted) = random_cm_planted(n, kind, 2.0, &mut r).unwrap();
        let w = williamson(&sigma).unwrap();
        prop_assert!(w.congruence_residual < 1e-7 && w.symplectic_residual < 1e-7);
        for (a, b) in w.spectrum.iter().zip(&planted) {
            prop_assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn purity_is_inverse_root_determinant(seed in any::<u64>(), n in 1usize..=4) {
        let sigma = random_mixed_cm(n, &mut rng(seed));
        let s = symplectic_spectrum(&sigma).unwrap();
        let det = sigma.entries().determinant();
        prop_assert!((s.purity() - 1.0 / det.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn local_diagonal_weakly_majorizes_global_spectrum(
        seed in any::<u64>(),
        sizes in prop::collection::vec(1usize..=2, 2..=3),
        pure in any::<bool>(),
    ) {
        let partition = ModePartition::new(sizes).unwrap();
        let n = partition.n_modes();
        prop_assume!(n <= 4);
        let mut r = rng(seed);
        let sigma = if pure { random_pure_cm(n, &mut r) } else { random_mixed_cm(n, &mut r) };
        let d = local_normal_form(&sigma, &partition).unwrap().diagonal_pairs();
        let s = symplectic_spectrum(&sigma).unwrap();
        let shifted: Vec<f64> = d.iter().map(|x| x + 1e-9).collect();
        prop_assert!(weak_majorization(&shifted, s.values()).unwrap(), "d = {d:?}, s = {:?}", s.values());
    }

    #[test]
    fn pure_gaussian_single_mode_marginals_form_a_polygon(seed in any::<u64>(), n in 2usize..=5) {
        let sigma = random_pure_cm(n, &mut rng(seed));
        let s = single_mode_eigenvalues(&sigma);
        prop_assert!(gaussian_marginal_check(&s, 1e-9).unwrap().holds);
    }

    #[test]
    fn pure_qubit_marginal_eigenvalues_form_a_polygon(seed in any::<u64>(), n in 2usize..=5) {
        let psi = haar_random_pure(&DimsLayout::qubits(n).unwrap(), &mut rng(seed));
        let l = smallest_qubit_eigenvalues(&psi).unwrap();
        prop_assert!(qubit_marginal_check(&l, 1e-9).unwrap().holds);
    }

    #[test]
    fn wclass_first_party_equality(rest in prop::collection::vec(0.05f64..1.0, 2..=4), share in 0.5f64..0.99) {
        // a₁² = share ≥ 1/2 and the remaining weight split in proportion to `rest`
        let total: f64 = rest.iter().sum();
        let mut amps = vec![share.sqrt()];
        amps.extend(rest.iter().map(|w| ((1.0 - share) * w / total).sqrt()));
        let psi = named_state(&NamedState::WClass(amps)).unwrap();
        let l = smallest_qubit_eigenvalues(&psi).unwrap();
        let others: f64 = l[1..].iter().sum();
        prop_assert!((l[0] - others).abs() < 1e-10, "{l:?}");
    }

    #[test]
    fn concave_sums_respect_weak_majorization(
        y in prop::collection::vec(1.0f64..6.0, 2..=5),
        weights in prop::collection::vec(0.0f64..1.0, 3),
        bumps in prop::collection::vec(0.0f64..0.5, 5),
        family in prop::sample::select(vec!["S", "R:p=1.5", "R:p=2", "R:p=3", "R:p=7"]),
    ) {
        // x = (doubly stochastic mix of y) + non-negative bumps weakly majorizes y
        let n = y.len();
        let w_total: f64 = weights.iter().sum::<f64>() + 1e-12;
        let mut x = vec![0.0; n];
        for (shift, w) in weights.iter().enumerate() {
            for i in 0..n {
                x[i] += w / w_total * y[(i + shift) % n];
            }
        }
        for i in 0..n {
            x[i] = x[i].max(1.0) + bumps[i];
        }
        prop_assert!(weak_majorization(&x, &y).unwrap());
        let e = spec(family);
        let gx: f64 = x.iter().map(|&v| mode_entropy_fn(v, &e).unwrap()).sum();
        let gy: f64 = y.iter().map(|&v| mode_entropy_fn(v, &e).unwrap()).sum();
        prop_assert!(gx >= gy - 1e-12, "{family}: {gx} < {gy}");
    }

    #[test]
    fn monotone_maps_transport_polygons(seed in any::<u64>(), n in 3usize..=5, q in 1.1f64..4.0) {
        let psi = haar_random_pure(&DimsLayout::qubits(n).unwrap(), &mut rng(seed));
        let v = one_to_rest(PartyState::Vector(&psi), &spec("S")).unwrap();
        let transforms: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|x: f64| x.sqrt()),
            Box::new(|x: f64| 1.0 - (-x).exp()),
            Box::new(|x: f64| x.min(0.7)),
            Box::new(move |x: f64| MonotoneTransform::TsallisFromRenyi { q, log_base: 2.0 }.apply(x)),
        ];
        for f in &transforms {
            prop_assert!(lemma1_check(f.as_ref(), &v.values, 1e-9).unwrap());
        }
    }

    #[test]
    fn polygon_holds_on_haar_qubits(seed in any::<u64>(), n in 3usize..=5) {
        let psi = haar_random_pure(&DimsLayout::qubits(n).unwrap(), &mut rng(seed));
        for f in ["S", "R:p=1.2", "R:p=1.5", "R:p=2", "T:q=1.5", "T:q=2", "T:q=3", "T:q=6"] {
            let v = one_to_rest(PartyState::Vector(&psi), &spec(f)).unwrap();
            prop_assert!(polygon_check(&v, 1e-9).unwrap().holds, "{f}: {:?}", v.values);
        }
    }

    #[test]
    fn polygon_holds_on_pure_gaussian_states(
        seed in any::<u64>(),
        sizes in prop::sample::select(vec![vec![1, 1], vec![1, 1, 1], vec![2, 1, 1], vec![1, 1, 1, 1], vec![2, 2, 1]]),
        p in 1.01f64..8.0,
    ) {
        let partition = ModePartition::new(sizes).unwrap();
        let sigma = random_pure_cm(partition.n_modes(), &mut rng(seed));
        for e in [spec("S"), EntropySpec::renyi(p).unwrap(), EntropySpec::tsallis(p).unwrap()] {
            let v = one_to_rest(PartyState::Gaussian(&sigma, &partition), &e).unwrap();
            prop_assert!(polygon_check(&v, 1e-9).unwrap().holds, "{e}: {:?}", v.values);
        }
    }

    #[test]
    fn subadditivity_holds_where_proven(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4, q in 1.01f64..5.0) {
        let mut r = rng(seed);
        let rho = random_mixed(&[da, db], &mut r);
        let bip = Bipartition::pair();
        for e in [spec("S"), EntropySpec::tsallis(q).unwrap()] {
            let rep = subadditivity_check(PartyState::Density(&rho), &bip, &e, 1e-9).unwrap();
            prop_assert!(rep.holds, "{e}: {}", rep.mutual_information);
        }
        let sigma = random_mixed_cm(2, &mut r);
        let partition = ModePartition::singletons(2).unwrap();
        for e in [spec("S"), EntropySpec::renyi(q).unwrap(), EntropySpec::tsallis(q).unwrap()] {
            let rep = subadditivity_check(PartyState::Gaussian(&sigma, &partition), &bip, &e, 1e-9).unwrap();
            prop_assert!(rep.holds, "{e}: {}", rep.mutual_information);
        }
    }

    #[test]
    fn subadditivity_slack_equals_purified_ancilla_slack(seed in any::<u64>(), family in prop::sample::select(FAMILIES.to_vec())) {
        let mut r = rng(seed);
        let e = spec(family);
        let rho = random_mixed(&[2, 2], &mut r);
        let rep = purified_equivalence_demo(PartyState::Density(&rho), &e, 1e-9).unwrap();
        prop_assert!(rep.discrepancy <= 1e-9, "discrete {family}: {}", rep.discrepancy);
        let sigma = random_mixed_cm(2, &mut r);
        let partition = ModePartition::singletons(2).unwrap();
        let rep = purified_equivalence_demo(PartyState::Gaussian(&sigma, &partition), &e, 1e-9).unwrap();
        prop_assert!(rep.discrepancy <= 1e-9, "Gaussian {family}: {}", rep.discrepancy);
    }
}

#[test]
fn haar_mean_marginal_purity_is_four_fifths() {
    // E[tr ρ_A²] = (d_A + d_B)/(d_A d_B + 1) = 4/5 for two qubits
    let layout = DimsLayout::qubits(2).unwrap();
    let mut r = rng(7);
    let n = 20_000;
    let mean: f64 = (0..n)
        .map(|_| haar_random_pure(&layout, &mut r).reduced(&[0]).unwrap().purity())
        .sum::<f64>()
        / n as f64;
    assert!((mean - 0.8).abs() < 0.01, "mean purity {mean}");
}

#[test]
fn wclass_equality_fails_below_one_half() {
    let psi = named_state(&NamedState::WClass(vec![0.4f64.sqrt(), 0.3f64.sqrt(), 0.3f64.sqrt()])).unwrap();
    let l = smallest_qubit_eigenvalues(&psi).unwrap();
    assert!((l[0] - (l[1] + l[2])).abs() > 0.1);
}

#[test]
fn purified_polygon_iterates_subadditivity() {
    // for a pure state E_i = E(Ā_i); iterated subadditivity bounds E(Ā_i) by Σ_{j≠i} E_j
    let mut r = rng(11);
    let layout = DimsLayout::new(vec![2, 2, 3]).unwrap();
    for _ in 0..200 {
        let psi = haar_random_pure(&layout, &mut r);
        for f in ["S", "T:q=2", "T:q=3"] {
            let v = one_to_rest(PartyState::Vector(&psi), &spec(f)).unwrap();
            let e = spec(f);
            for i in 0..3 {
                let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
                let joint = psi.reduced(&rest).unwrap();
                let e_rest = entropy_of_state(StateRef::Discrete(&joint), &e).unwrap();
                let sum: f64 = rest.iter().map(|&j| v.values[j]).sum();
                assert!((e_rest - v.values[i]).abs() < 1e-9);
                assert!(e_rest <= sum + 1e-9, "{f}");
            }
            assert!(polygon_check(&v, 1e-9).unwrap().holds, "{f}");
        }
    }
}
