use eqls_core::bench::benchmarks::{identity_target, toffoli_target};
use eqls_core::bench::load_benchmark;
use eqls_core::engine::{Engine, GAConfig, GaMode};
use eqls_core::{decode, minimize, validate_restrictions, Catalog, LearningMode};

fn small(mode: GaMode, seed: u64) -> GAConfig {
    let b = load_benchmark("toffoli", false).unwrap();
    GAConfig { mode, population_size: 20, max_generations: 30, rng_seed: seed, restrictions: b.restrictions, ..GAConfig::default() }
}

#[test]
fn worker_count_does_not_change_the_run() {
    let cat = Catalog::builtin();
    let t = toffoli_target();
    for mode in [GaMode::Classical, GaMode::Baldwinian, GaMode::Lamarckian] {
        let run = |workers| {
            let cfg = GAConfig { workers, ..small(mode, 4) };
            Engine::new(&cfg, &t, &cat).unwrap().run().unwrap().to_text()
        };
        assert_eq!(run(1), run(8), "{mode}");
    }
}

#[test]
fn wire_only_identity_succeeds_immediately() {
    let cat = Catalog::builtin();
    let t = identity_target();
    let cfg = GAConfig { gate_set: vec!["WIRE".into()], population_size: 4, ..GAConfig::default() };
    let r = Engine::new(&cfg, &t, &cat).unwrap().run().unwrap();
    assert!(r.success);
    assert_eq!(r.generations_used, 0);
}

#[test]
fn final_population_respects_restrictions() {
    let cat = Catalog::builtin();
    let t = toffoli_target();
    for mode in [GaMode::Classical, GaMode::Lamarckian] {
        let mut e = Engine::new(&small(mode, 7), &t, &cat).unwrap();
        let (_, pop) = e.run_with_population().unwrap();
        for i in &pop {
            let c = decode(&i.genome, e.lexicon()).unwrap();
            assert!(validate_restrictions(&c, e.catalog()), "{mode}: {}", i.genome.text());
        }
    }
}

#[test]
fn lamarckian_survivors_are_already_minimal() {
    let cat = Catalog::builtin();
    let t = toffoli_target();
    let cfg = GAConfig { eigs_cap: 20, ..small(GaMode::Lamarckian, 9) };
    let mut e = Engine::new(&cfg, &t, &cat).unwrap();
    let (r, pop) = e.run_with_population().unwrap();
    assert!(r.eigs.len() <= 20);
    assert!(r.merged_gates <= 20 - cfg.gate_set.len());
    let mut lex = e.lexicon().clone();
    for i in &pop {
        let c = decode(&i.genome, &lex).unwrap();
        let m = minimize(&c, Some(&mut lex), LearningMode::Lamarckian);
        assert!(m.events.is_empty(), "{}", i.genome.text());
        assert_eq!(m.phenotype, c);
    }
}

#[test]
fn elitism_keeps_the_best_fitness() {
    let cat = Catalog::builtin();
    let t = toffoli_target();
    let mut last = 0.0;
    for gens in 0..12 {
        let cfg = GAConfig { max_generations: gens, ..small(GaMode::Classical, 2) };
        let r = Engine::new(&cfg, &t, &cat).unwrap().run().unwrap();
        assert!(r.best.eval.fitness >= last);
        last = r.best.eval.fitness;
    }
}

#[test]
fn classical_runs_never_merge() {
    let cat = Catalog::builtin();
    let t = toffoli_target();
    let r = Engine::new(&small(GaMode::Classical, 3), &t, &cat).unwrap().run().unwrap();
    assert_eq!(r.merged_gates, 0);
    assert!(r.eigs.is_empty());
}
