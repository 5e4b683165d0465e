mod common;

use std::f64::consts::{PI, TAU};

use eqls_core::bench::benchmarks::{majority_target, toffoli_sign_target, toffoli_target};
use eqls_core::eval::{boolean_error, correctness, evaluate_batch, fitness, matrix_score, TableRow, CORRECTNESS_TOL};
use eqls_core::{evaluate, Catalog, Circuit, CostModel, FitnessMode, FitnessParams, Placed, TargetSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn digit(i: usize, w: usize) -> usize {
    i / 3usize.pow(2 - w as u32) % 3
}

/// Σ over Boolean inputs of (1 − P)², where P is the probability mass on
/// outputs whose wire 2 carries the majority bit.
fn majority_oracle(c: &Circuit) -> f64 {
    let m = common::oracle_matrix(c);
    (0..8)
        .map(|x| {
            let col = common::lift(x, 3);
            let want = ((x >> 2 & 1) + (x >> 1 & 1) + (x & 1) >= 2) as usize;
            let p: f64 = (0..27).filter(|&y| digit(y, 2) == want).map(|y| m[y][col].norm_sqr()).sum();
            (1.0 - p).powi(2)
        })
        .sum()
}

#[test]
fn partial_target_marginalises_free_wires() {
    let cat = Catalog::builtin();
    let pool = common::ternary_pool(&cat);
    let t = majority_target();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let c = common::random_circuit(&cat, &pool, 8, &mut rng);
        let e = boolean_error(&c, &t).unwrap();
        assert!((e - majority_oracle(&c)).abs() < 1e-9);
    }
}

#[test]
fn global_phase_does_not_change_the_score() {
    let cat = Catalog::builtin();
    let pool = common::ternary_pool(&cat);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for t in [toffoli_target(), toffoli_sign_target()] {
        for _ in 0..30 {
            let m = common::random_circuit(&cat, &pool, 6, &mut rng).matrix();
            let (e0, c0) = matrix_score(&m, &t, CORRECTNESS_TOL).unwrap();
            let random = rng.gen_range(0.0..TAU);
            for phi in [PI / 4.0, PI / 2.0, PI, random] {
                let (e1, c1) = matrix_score(&m.scale(C64::from_polar(1.0, phi)), &t, CORRECTNESS_TOL).unwrap();
                assert!((e0 - e1).abs() < 1e-9, "{e0} {e1}");
                assert_eq!(c0, c1);
            }
        }
    }
}

#[test]
fn exact_and_wrong_circuits() {
    let cat = Catalog::builtin();
    let t3 = cat.get("TOFFOLI3").unwrap();
    let c = Circuit::new(3, 3, vec![vec![Placed::new(t3.clone(), vec![0, 1, 2])]], cat.wire(3).unwrap()).unwrap();
    let p = FitnessParams::default();
    let e = evaluate(&c, &toffoli_target(), &p, &CostModel::default()).unwrap();
    assert_eq!((e.error, e.correctness), (0.0, 100.0));
    assert!(e.is_correct());
    let id = Circuit::identity(3, 3, cat.wire(3).unwrap()).unwrap();
    let e = evaluate(&id, &toffoli_target(), &p, &CostModel::default()).unwrap();
    // two rows fully wrong
    assert_eq!((e.error, e.correctness), (2.0, 75.0));
    assert_eq!(e.fitness, 1.0 / 3.0);
    let sign = evaluate(&id, &toffoli_sign_target(), &p, &CostModel::default()).unwrap();
    assert!(!sign.is_correct());
    let batch = evaluate_batch(&[c, id], &toffoli_target(), &p, &CostModel::default()).unwrap();
    assert_eq!(batch.len(), 2);
    assert!(batch[0].is_correct() && !batch[1].is_correct());
}

#[test]
fn fitness_formulas() {
    let f0 = FitnessParams::new(0.9, 0.1, FitnessMode::F0).unwrap();
    assert_eq!(fitness(0.0, 3, &f0).unwrap(), 1.0);
    assert_eq!(fitness(1.0, 3, &f0).unwrap(), 0.5);
    let f1 = FitnessParams::new(0.9, 0.1, FitnessMode::F1).unwrap();
    assert!(fitness(0.0, 0, &f1).is_err());
    assert_eq!(fitness(1.0, 4, &f1).unwrap(), 0.9 / 2.0 + 0.1 / 4.0);
    assert!(FitnessParams::new(0.5, 0.6, FitnessMode::F1).is_err());
    assert!(fitness(-1.0, 1, &f0).is_err());
}

#[test]
fn tables_parse_and_alternatives_take_the_best() {
    let t = TargetSpec::parse_table("# a b c\n000 00-\n001 00-\n010 01-\n011 11-\n", 3).unwrap();
    assert_eq!(t.table.len(), 4);
    assert_eq!(t.table[1].output, vec![Some(0), Some(0), None]);
    assert!(TargetSpec::parse_table("01 0x\n", 3).is_err());
    assert!(TargetSpec::parse_table("01 00\n011 000\n", 3).is_err());
    let rows = |swap: bool| -> Vec<TableRow> {
        (0..8u8)
            .map(|x| {
                let w = |v: u8| vec![v >> 2 & 1, v >> 1 & 1, v & 1];
                let y = if swap && x >= 6 { x ^ 1 } else { x };
                TableRow { input: w(x), output: w(y).into_iter().map(Some).collect() }
            })
            .collect()
    };
    let identity_or_toffoli = TargetSpec::truth_table(3, 3, rows(true))
        .unwrap()
        .with_alternative(TargetSpec::truth_table(3, 3, rows(false)).unwrap())
        .unwrap();
    let cat = Catalog::builtin();
    let id = Circuit::identity(3, 3, cat.wire(3).unwrap()).unwrap();
    assert_eq!(correctness(&id, &identity_or_toffoli, CORRECTNESS_TOL).unwrap(), 100.0);
}
