mod common;

use eqls_core::eval::circuit_cost;
use eqls_core::minimize::{cancel_adjacent_inverses, merge_adjacent, minimize_readonly, GenotypeAction};
use eqls_core::{minimize, Catalog, Circuit, CostModel, GateLexicon, LearningMode, Placed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build(cat: &Catalog, blocks: &[&[(&str, &[usize])]]) -> Circuit {
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(|(id, w)| Placed::new(cat.get(id).unwrap().clone(), w.to_vec())).collect())
        .collect();
    Circuit::new(3, 3, blocks, cat.wire(3).unwrap()).unwrap()
}

#[test]
fn preserves_function_and_is_idempotent() {
    let cat = Catalog::builtin();
    let pool = common::ternary_pool(&cat);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let model = CostModel::default();
    let mut merged_any = false;
    for _ in 0..200 {
        let c = common::random_circuit(&cat, &pool, 12, &mut rng);
        let mut lex = GateLexicon::new(&cat, 3, 3).unwrap();
        let once = minimize(&c, Some(&mut lex), LearningMode::Lamarckian);
        merged_any |= !once.events.is_empty();
        let d = common::max_diff(&common::oracle_matrix(&once.phenotype), &common::oracle_matrix(&c));
        assert!(d < 1e-9, "matrix changed by {d}");
        assert!(circuit_cost(&once.phenotype, &model) <= circuit_cost(&c, &model));
        let twice = minimize(&once.phenotype, Some(&mut lex), LearningMode::Lamarckian);
        assert!(twice.events.is_empty());
        assert_eq!(twice.phenotype, once.phenotype);
        assert_eq!(once.action, GenotypeAction::Replace);
    }
    assert!(merged_any);
}

#[test]
fn merge_events_hold_the_product() {
    let cat = Catalog::builtin();
    let c = build(&cat, &[&[("CH3", &[1, 2])], &[("CNOT3", &[2, 1])]]);
    let mut lex = GateLexicon::new(&cat, 3, 3).unwrap();
    let (out, events) = merge_adjacent(&c, Some(&mut lex));
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].sources, vec!["CH3".to_string(), "CNOT3".to_string()]);
    assert_eq!(out.gate_count(), 1);
    let d = common::max_diff(&common::oracle_matrix(&out), &common::oracle_matrix(&c));
    assert!(d < 1e-9);
    let line = events[0].dump_line();
    assert_eq!(line.split('\t').count(), 3);
    assert!(line.ends_with("\t1,2"));
}

#[test]
fn modes() {
    let cat = Catalog::builtin();
    let c = build(&cat, &[&[("H3", &[2])], &[("H3", &[2])], &[("CZ3", &[0, 1])]]);
    let off = minimize(&c, None, LearningMode::Off);
    assert_eq!((off.phenotype.clone(), off.action), (c.clone(), GenotypeAction::None));
    let b = minimize(&c, None, LearningMode::Baldwinian);
    assert_eq!(b.action, GenotypeAction::Keep);
    assert_eq!(b.phenotype.gate_count(), 1);
    let lex = GateLexicon::new(&cat, 3, 3).unwrap();
    assert_eq!(minimize_readonly(&c, &lex).phenotype, b.phenotype);
}

#[test]
fn cancellation_examples() {
    let cat = Catalog::builtin();
    assert_eq!(cancel_adjacent_inverses(&build(&cat, &[&[("H3", &[2])], &[("H3", &[2])]])).gate_count(), 0);
    assert_eq!(cancel_adjacent_inverses(&build(&cat, &[&[("CNOT3", &[0, 1])], &[("CNOT3", &[0, 1])]])).gate_count(), 0);
    let apart = build(&cat, &[&[("H3", &[2])], &[("H3", &[1])]]);
    assert_eq!(cancel_adjacent_inverses(&apart), apart);
    // CZ is symmetric, so the flipped placement still cancels
    let cz = build(&cat, &[&[("CZ3", &[0, 1])], &[("CZ3", &[0, 1])]]);
    assert_eq!(minimize(&cz, None, LearningMode::Baldwinian).phenotype.gate_count(), 0);
}

#[test]
fn readonly_merges_never_touch_the_lexicon() {
    let cat = Catalog::builtin();
    let lex = GateLexicon::new(&cat, 3, 3).unwrap();
    let before = lex.len();
    let c = build(&cat, &[&[("CH3", &[0, 1])], &[("CZ3", &[0, 1])]]);
    let m = minimize_readonly(&c, &lex);
    assert_eq!(m.phenotype.gate_count(), 1);
    assert!(m.phenotype.gates().next().unwrap().gate.id.starts_with('~'));
    assert_eq!(lex.len(), before);
}
