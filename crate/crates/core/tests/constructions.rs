use drf_core::drf::{parse, verify_document, DrfDocument};
use drf_core::families::{
    build_cff, build_dense_phf, build_phf, build_phf_small_d, build_shf, greedy_phf, greedy_size_bound,
    verify_cff, verify_phf, verify_phf_density, verify_shf, DEFAULT_GREEDY_BUDGET,
};
use drf_core::gvcode::{
    code_params, construct_code_traced, gv_condition, enumerate_codewords, estimator_feasible, min_weight_bruteforce,
    LinearCode, DEFAULT_WEIGHT_BUDGET,
};
use drf_core::hitter::{build_dense_hitting, build_hitting, max_column_agreement, verify_hitting, verify_hitting_density};
use drf_core::oracle::{oracle_check_document, oracle_min_distance};
use drf_core::{ConstraintBudget, SymbolMatrix};
use num_rational::Ratio;
use proptest::prelude::*;

fn budget() -> ConstraintBudget {
    ConstraintBudget::new(200_000_000)
}

#[test]
fn estimator_is_monotone_and_sound_on_a_grid() {
    for (q, h, n) in [(5u32, 2u32, 15u64), (7, 3, 20), (8, 3, 100), (9, 2, 100), (16, 3, 15), (17, 4, 20)] {
        let params = code_params(q, h, n).unwrap();
        let (code, report) = construct_code_traced(&params).unwrap();
        assert!(report.monotone, "q={q} h={h} n={n}");
        assert_eq!(report.final_bad, 0);
        assert!(!report.forced_increase());
        assert!(report.phi_final <= report.phi_initial);

        let normalized = min_weight_bruteforce(&code, DEFAULT_WEIGHT_BUDGET).unwrap();
        let full = oracle_min_distance(&code.columns, q as u64, code.field.modulus()).unwrap();
        assert_eq!(normalized.weight, full);
        assert!(full >= code.params.required_weight());
    }
}

#[test]
fn gv_condition_implies_estimator_feasibility() {
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        for k in 1..=3usize {
            for m in [4usize, 8, 16, 32, 64] {
                for (a, b) in [(1u64, 4u64), (1, 3), (1, 2), (2, 3)] {
                    let delta = Ratio::new(a, b);
                    let params = drf_core::CodeParams::explicit(q, m, k, delta).unwrap();
                    if gv_condition(&params) {
                        assert!(estimator_feasible(&params), "q={q} m={m} k={k} delta={delta}");
                    }
                }
            }
        }
    }
}

#[test]
fn scalar_multiples_keep_weight() {
    let code = drf_core::gvcode::construct_code(&code_params(7, 3, 20).unwrap()).unwrap();
    let words = enumerate_codewords(&code, 48).unwrap();
    for w in &words[..8] {
        for lambda in 1..7 {
            let scaled: Vec<u32> = w.iter().map(|&x| code.field.mul(code.field.element(lambda), code.field.element(x)).index()).collect();
            assert_eq!(LinearCode::weight(&scaled), LinearCode::weight(w));
        }
    }
    let mut sorted = words.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 48);
}

#[test]
fn hitting_sets_hit_at_desk_scale() {
    for q in [7u32, 17, 25] {
        for d in 1..=3usize {
            for n in [4usize, 7, 10] {
                let hs = build_hitting(n, d, q).unwrap();
                let (agree, _) = max_column_agreement(&hs.rows);
                assert!(agree * hs.h as usize <= hs.m(), "columns agree too often");
                assert_eq!(hs.m(), hs.closed_form_m);
                assert!(verify_hitting(&hs.rows, d, &mut budget()).unwrap().holds(), "n={n} d={d} q={q}");
            }
        }
    }
}

#[test]
fn dense_hitting_sets_at_desk_scale() {
    for eps in [Ratio::new(1u64, 2), Ratio::new(1, 4)] {
        for d in 1..=2usize {
            for n in [5usize, 10] {
                let hs = build_dense_hitting(n, d, 25, eps).unwrap();
                assert!(verify_hitting_density(&hs.rows, d, eps, &mut budget()).unwrap().holds());
            }
        }
    }
    let hs = build_dense_hitting(12, 2, 25, Ratio::new(1, 2)).unwrap();
    assert!(verify_hitting_density(&hs.rows, 2, Ratio::new(1, 2), &mut budget()).unwrap().holds());
}

#[test]
fn phf_size_regression_grid() {
    for (n, q, d) in [(30usize, 17u32, 3usize), (100, 17, 3), (50, 8, 4), (40, 13, 3), (60, 64, 4), (20, 5, 2)] {
        let f = build_phf(n, q, d).unwrap();
        let big_d = d * (d - 1) / 2;
        let h = (big_d + 1) as f64;
        let qp = f.field_order as f64;
        let expected = if qp > 4.0 * h {
            (h * (qp * (n as f64 + 1.0)).ln() / (qp / (std::f64::consts::E * h)).ln()).ceil() as usize
        } else {
            (4.0 * (qp - 1.0).powi(2) * h * (qp * (n as f64 + 1.0)).ln() / (qp - h).powi(2)).ceil() as usize
        };
        assert_eq!(f.size(), expected, "n={n} q={q} d={d}");
    }
}

#[test]
fn small_d_composition_is_sound() {
    let f = build_phf_small_d(24, 3, 3).unwrap();
    assert!(f.functions.max_symbol().unwrap() < 3);
    assert!(verify_phf(&f.functions, 3, &mut budget()).unwrap().holds());
    let g = greedy_phf(8, 3, 3, DEFAULT_GREEDY_BUDGET).unwrap();
    assert!(g.size() <= greedy_size_bound(8, 3, 3).unwrap());
    assert_eq!(build_phf_small_d(24, 3, 3).unwrap(), f);
}

#[test]
fn shf_generalizes_phf_and_cff() {
    let phf = build_phf(12, 7, 3).unwrap();
    assert!(verify_shf(&phf.functions, &[1, 1, 1], &mut budget()).unwrap().holds());
    let cff = build_cff(10, 1, 2, Ratio::from_integer(2)).unwrap();
    assert!(verify_shf(&cff.tests, &[2, 1], &mut budget()).unwrap().holds());
    let cff = build_cff(9, 2, 2, Ratio::from_integer(2)).unwrap();
    assert!(verify_cff(&cff.tests, 2, 2, &mut budget()).unwrap().holds());
    assert!(verify_shf(&cff.tests, &[2, 2], &mut budget()).unwrap().holds());
}

#[test]
fn cff_with_one_positive_is_a_group_testing_design() {
    for r in 1..=3usize {
        let c = build_cff(9, 1, r, Ratio::from_integer(2)).unwrap();
        for j in 0..9 {
            let others: Vec<usize> = (0..9).filter(|&x| x != j).collect();
            let mut idx: Vec<usize> = (0..r).collect();
            loop {
                let k: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
                assert!(c.tests.iter_rows().any(|t| t[j] == 1 && k.iter().all(|&x| t[x] == 0)));
                if !drf_core::combin::next_combination(&mut idx, others.len()) {
                    break;
                }
            }
        }
    }
}

#[test]
fn oracle_agrees_with_verifiers_on_constructions() {
    let docs = vec![
        DrfDocument::from_hitting(&build_hitting(8, 2, 5).unwrap()),
        DrfDocument::from_hitting(&build_dense_hitting(8, 1, 9, Ratio::new(1, 2)).unwrap()),
        DrfDocument::from_phf(&build_phf(15, 5, 2).unwrap()),
        DrfDocument::from_phf(&build_dense_phf(12, 9, 2, Ratio::new(1, 2)).unwrap()),
        DrfDocument::from_cff(&build_cff(8, 1, 2, Ratio::from_integer(2)).unwrap()),
        DrfDocument::from_shf(&build_shf(9, 5, &[1, 2]).unwrap()),
    ];
    for doc in docs {
        let doc = parse(&doc.to_string()).unwrap();
        let fast = verify_document(&doc, &mut budget()).unwrap();
        let slow = oracle_check_document(&doc, 100_000_000).unwrap();
        assert!(fast.holds() && slow.holds, "{}", doc.kind);
    }
}

#[test]
fn builders_are_deterministic() {
    assert_eq!(build_phf(40, 13, 3).unwrap(), build_phf(40, 13, 3).unwrap());
    assert_eq!(build_shf(20, 7, &[1, 1, 1]).unwrap(), build_shf(20, 7, &[1, 1, 1]).unwrap());
    let a = build_dense_phf(30, 9, 2, Ratio::new(1, 2)).unwrap();
    let b = build_dense_phf(30, 9, 2, Ratio::new(1, 2)).unwrap();
    assert_eq!(DrfDocument::from_phf(&a).to_string(), DrfDocument::from_phf(&b).to_string());
}

fn matrix(rows: usize, cols: usize, alphabet: u32) -> impl Strategy<Value = SymbolMatrix> {
    proptest::collection::vec(proptest::collection::vec(0..alphabet, cols), rows)
        .prop_map(move |r| SymbolMatrix::from_rows(cols, &r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phf_verifier_matches_oracle(m in matrix(3, 6, 4), d in 2usize..=3) {
        let f = drf_core::families::PerfectHashFamily {
            n: 6, q: 4, d, functions: m.clone(), dense_eps: None, field_order: 4, closed_form_size: None,
        };
        let doc = DrfDocument::from_phf(&f);
        let fast = verify_phf(&m, d, &mut budget()).unwrap().holds();
        prop_assert_eq!(fast, oracle_check_document(&doc, 1_000_000).unwrap().holds);
        let eps = Ratio::new(1, 2);
        let dense = verify_phf_density(&m, d, eps, &mut budget()).unwrap().holds();
        let mut doc = doc;
        doc.header.eps = Some((1, 2));
        prop_assert_eq!(dense, oracle_check_document(&doc, 1_000_000).unwrap().holds);
    }

    #[test]
    fn hitting_verifier_matches_oracle(m in matrix(4, 5, 3), degree in 1usize..=3) {
        let text = format!(
            "DRF 1\nkind hitting\nn 5\nq 3\nd {degree}\nm 4\nbody\n{}",
            m.iter_rows().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect::<String>()
        );
        let doc = parse(&text).unwrap();
        let fast = verify_hitting(&m, degree, &mut budget()).unwrap().holds();
        prop_assert_eq!(fast, oracle_check_document(&doc, 1_000_000).unwrap().holds);
    }

    #[test]
    fn cff_and_shf_verifiers_match_oracle(m in matrix(5, 6, 2)) {
        let cff = drf_core::families::CoverFreeFamily {
            n: 6, w: 1, r: 2, tests: m.clone(), field_order: None, closed_form_size: None,
        };
        let fast = verify_cff(&m, 1, 2, &mut budget()).unwrap().holds();
        prop_assert_eq!(fast, oracle_check_document(&DrfDocument::from_cff(&cff), 1_000_000).unwrap().holds);
        let shf = drf_core::families::SeparatingHashFamily {
            n: 6, q: 2, ds: vec![2, 1], functions: m.clone(), field_order: None, closed_form_size: None,
        };
        let fast = verify_shf(&m, &[2, 1], &mut budget()).unwrap().holds();
        prop_assert_eq!(fast, oracle_check_document(&DrfDocument::from_shf(&shf), 1_000_000).unwrap().holds);
    }
}
