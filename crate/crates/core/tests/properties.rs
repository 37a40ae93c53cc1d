use std::collections::BTreeMap;

use obstruction_forge::decompose::{self, BoundaryClass, RenormalizedKind};
use obstruction_forge::fixtures;
use obstruction_forge::model::{parse_model, serialize_model, validate_model, CoverModel};
use obstruction_forge::multicurve::{self, CurveSystem, Multicurve, DEFAULT_CAP};
use obstruction_forge::reduction;
use obstruction_forge::spectral::{self, NonnegMatrix};
use obstruction_forge::weights;
use obstruction_forge::Q;
use proptest::prelude::*;
use proptest::sample::Index;

const TOL: f64 = 1e-9;

fn entry() -> impl Strategy<Value = Q> {
    prop_oneof![
        2 => Just(Q::zero()),
        5 => (0i64..=24, 1i64..=12).prop_map(|(n, d)| Q::frac(n.min(2 * d), d)),
    ]
}

fn matrix(max: usize) -> impl Strategy<Value = NonnegMatrix> {
    (1..=max, 1i64..=8).prop_flat_map(|(n, s)| {
        prop::collection::vec(entry(), n * n).prop_map(move |es| {
            let scale = Q::frac(s, 4 * n as i64);
            NonnegMatrix::new(n, n, es.into_iter().map(|e| e * scale.clone()).collect()).unwrap()
        })
    })
}

fn strictly_upper(max: usize) -> impl Strategy<Value = NonnegMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(entry(), n * n).prop_map(move |es| {
            let es = es
                .into_iter()
                .enumerate()
                .map(|(k, e)| if k % n > k / n { e } else { Q::zero() })
                .collect();
            NonnegMatrix::new(n, n, es).unwrap()
        })
    })
}

fn chain() -> impl Strategy<Value = Vec<NonnegMatrix>> {
    prop::collection::vec(1usize..=5, 1..=4).prop_flat_map(|dims| {
        let k = dims.len();
        let blocks: Vec<_> = (0..k)
            .map(|i| {
                let (r, c) = (dims[i], dims[(i + 1) % k]);
                prop::collection::vec(entry(), r * c).prop_map(move |es| NonnegMatrix::new(r, c, es).unwrap())
            })
            .collect();
        blocks
    })
}

fn family_model() -> impl Strategy<Value = CoverModel> {
    let family = fixtures::two_ring_family();
    (0..family.len()).prop_map(move |i| family[i].build())
}

fn any_model() -> impl Strategy<Value = CoverModel> {
    prop_oneof![
        1 => Just(fixtures::shi()),
        1 => Just(fixtures::two_ring()),
        1 => Just(fixtures::two_ring_obstructed()),
        6 => family_model(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_and_estimated_contraction_agree(w in matrix(6)) {
        let exact = spectral::is_contracting(&w).unwrap();
        let est = spectral::power_lambda(&w, TOL).unwrap();
        if (est - 1.0).abs() >= 1e-6 {
            prop_assert_eq!(exact, est < 1.0);
        }
        if exact {
            let v = spectral::contraction_vector(&w).unwrap();
            let wv = w.mul_vec(&v);
            for (a, b) in wv.iter().zip(&v) {
                prop_assert_eq!(a.clone(), b.clone() - Q::one());
                prop_assert!(a < b);
            }
        } else {
            prop_assert!(spectral::contraction_vector(&w).is_err());
        }
    }

    #[test]
    fn nilpotent_matches_zero_spectrum(w in strictly_upper(6)) {
        prop_assert!(spectral::is_nilpotent(&w).unwrap());
        prop_assert!(spectral::power_lambda(&w, TOL).unwrap() <= TOL);
    }

    #[test]
    fn nilpotency_cross_check(w in matrix(5)) {
        let nil = spectral::is_nilpotent(&w).unwrap();
        let est = spectral::power_lambda(&w, 1e-12).unwrap();
        prop_assert_eq!(nil, est <= 1e-9);
    }

    #[test]
    fn cyclic_rotations_agree(blocks in chain()) {
        let r = spectral::cyclic_sp_invariance(&blocks, TOL).unwrap();
        prop_assert!(r.agree, "{:?}", r.estimates);
    }

    #[test]
    fn models_round_trip(m in any_model()) {
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_model(&back), text);
        prop_assert_eq!(validate_model(&m, DEFAULT_CAP), validate_model(&back, DEFAULT_CAP));
    }

    #[test]
    fn generated_layers_are_disjoint_and_closed(m in any_model()) {
        let layers = multicurve::gamma_layers(&m).unwrap();
        let total: usize = layers.iter().map(Vec::len).sum();
        let gamma = multicurve::generate_gamma(&m).unwrap();
        prop_assert_eq!(gamma.id_set().len(), total);
        prop_assert!(layers.len() <= m.interior_curves().len());
        prop_assert!(multicurve::is_stable(&m, &gamma));
        let system = CurveSystem::of_model(&m);
        let seed: Vec<usize> = gamma.ids().iter().map(|id| system.ids.iter().position(|x| x == id).unwrap()).collect();
        let closed: Vec<&str> = system.closure(&seed).into_iter().map(|k| system.ids[k].as_str()).collect();
        prop_assert_eq!(closed.into_iter().collect::<std::collections::BTreeSet<_>>(), gamma.id_set());
        prop_assert_eq!(multicurve::generate_gamma(&m).unwrap(), gamma);
    }

    #[test]
    fn permuting_a_multicurve_keeps_lambda(m in any_model(), picks in prop::collection::vec(any::<Index>(), 0..8)) {
        let stable = multicurve::enumerate_stable(&m, DEFAULT_CAP, TOL).unwrap();
        let c = &stable[picks.first().map_or(0, |i| i.index(stable.len()))].multicurve;
        let mut ids = c.ids().to_vec();
        for (k, p) in picks.iter().enumerate() {
            if !ids.is_empty() {
                let (i, j) = (k % ids.len(), p.index(ids.len()));
                ids.swap(i, j);
            }
        }
        let shuffled = Multicurve::from_ids(ids);
        let a = spectral::power_lambda(&multicurve::transition_matrix(&m, c).unwrap(), TOL).unwrap();
        let b = spectral::power_lambda(&multicurve::transition_matrix(&m, &shuffled).unwrap(), TOL).unwrap();
        prop_assert!((a - b).abs() <= 2.0 * TOL);
        let (_, report) = multicurve::essential_refinement(&m, c, TOL).unwrap();
        prop_assert!((report.lambda_before - report.lambda_after).abs() <= 2.0 * TOL);
    }

    #[test]
    fn piece_dynamics_invariants(m in any_model()) {
        let dynamics = decompose::piece_dynamics(&m).unwrap();
        for p in &m.pieces {
            let mut cur = p.id.as_str();
            let mut steps = 0;
            while !dynamics.is_periodic(cur) {
                cur = &dynamics.map[cur];
                steps += 1;
                prop_assert!(steps <= m.pieces.len());
            }
        }
        let d0 = |piece: &str| dynamics.boundary.iter().filter(|b| b.piece == piece && b.class == BoundaryClass::D0).count();
        for c in &dynamics.cycles {
            let k = d0(&c.members[0]);
            prop_assert!(c.members.iter().all(|p| d0(p) == k));
        }
        for t in &dynamics.tails {
            prop_assert_eq!(d0(&t.piece), 0);
        }
        let report = decompose::classify(&m).unwrap();
        prop_assert!(report.passed());
        for (i, r) in report.renormalizations.iter().enumerate() {
            let product: u64 = r.cycle.members.iter().map(|p| m.map_record(p).unwrap().parallel_degree).product();
            prop_assert_eq!(r.degree, product);
            prop_assert!(r.degree_consistent);
            prop_assert_eq!(&report.dynamics.cycles[i], &r.cycle);
        }
        if report.gamma_contracting {
            prop_assert!(report.renormalizations.iter().all(|r| r.kind != RenormalizedKind::Homeomorphism));
        }
    }

    #[test]
    fn reduction_holds_on_every_stable_multicurve(m in any_model(), pick in any::<Index>()) {
        let stable = multicurve::enumerate_stable(&m, DEFAULT_CAP, TOL).unwrap();
        let c = &stable[pick.index(stable.len())].multicurve;
        let r = reduction::verify_reduction_identity(&m, c, TOL).unwrap();
        prop_assert!(r.passed(), "{}", c);
        let split = &r.split;
        let parts = split.c_gamma.len() + split.c_s.len() + split.sigma.iter().map(|p| p.len()).sum::<usize>();
        prop_assert_eq!(parts, c.len());
    }

    #[test]
    fn combination_sides_agree(m in any_model()) {
        let r = reduction::check_combination(&m, DEFAULT_CAP, TOL).unwrap();
        prop_assert!(r.agree);
        prop_assert_eq!(r.lhs_witness.is_some(), r.lhs_obstructed);
    }

    #[test]
    fn weights_certify_above_threshold(m in any_model(), num in 1i64..64, den in 1i64..16) {
        let gamma = multicurve::generate_gamma(&m).unwrap();
        let w = multicurve::transition_matrix(&m, &gamma).unwrap();
        prop_assume!(spectral::is_contracting(&w).unwrap());
        let constants: BTreeMap<String, Q> = [("default".to_string(), Q::one())].into_iter().collect();
        let c = weights::certify(&m, &constants).unwrap();
        prop_assert!(c.rho.passed());
        for e in c.rho.entries.values() {
            prop_assert_eq!(&e.plus + &e.minus, Q::one());
        }
        let th = &c.threshold;
        prop_assert!(th.certified);
        let above = &th.t_star + &Q::frac(num, den);
        prop_assert!(th.inequalities.iter().all(|i| i.holds_at(&above)));
        if let Some(b) = th.binding {
            if th.t_star.is_positive() {
                let below = &th.t_star * &Q::frac(num.min(den * 4 - 1).max(1), den * 4);
                prop_assert!(!th.inequalities[b].holds_at(&below));
            }
        }
    }
}
