use eqls_core::bench::{load_benchmark, run_campaign, Aggregate};
use eqls_core::engine::{GAConfig, GaMode};
use eqls_core::Catalog;

fn configs() -> Vec<(String, GAConfig)> {
    let b = load_benchmark("toffoli", false).unwrap();
    [GaMode::Classical, GaMode::Baldwinian]
        .into_iter()
        .map(|mode| {
            let cfg = GAConfig { mode, population_size: 16, max_generations: 15, restrictions: b.restrictions.clone(), ..GAConfig::default() };
            (mode.to_string(), cfg)
        })
        .collect()
}

#[test]
fn aggregates_ignore_seed_order_and_schedule() {
    let b = load_benchmark("toffoli", false).unwrap();
    let cat = Catalog::builtin();
    let a = run_campaign(&b, &configs(), &[1, 2, 3, 4], &cat, 1).unwrap();
    let z = run_campaign(&b, &configs(), &[4, 2, 3, 1], &cat, 3).unwrap();
    assert_eq!(a.aggregates, z.aggregates);
    assert_eq!(a.records.len(), 8);
    assert!(a.records.iter().all(|r| r.error.is_none()));
    let mut left: Vec<String> = a.records.iter().map(|r| r.tsv_line()).collect();
    let mut right: Vec<String> = z.records.iter().map(|r| r.tsv_line()).collect();
    left.sort();
    right.sort();
    assert_eq!(left, right);
}

#[test]
fn aggregates_follow_from_records() {
    let b = load_benchmark("toffoli", false).unwrap();
    let cat = Catalog::builtin();
    let r = run_campaign(&b, &configs(), &[5, 6, 7], &cat, 0).unwrap();
    for a in &r.aggregates {
        let mine: Vec<_> = r.records.iter().filter(|x| x.config == a.config).cloned().collect();
        assert_eq!(&Aggregate::from_records(&a.config, &mine), a);
        let wins = mine.iter().filter(|x| x.success).count();
        assert_eq!(a.successes, wins);
        assert_eq!(a.success_rate, wins as f64 / 3.0);
        let corr: f64 = mine.iter().map(|x| x.correctness).sum::<f64>() / 3.0;
        assert!((a.mean_correctness - corr).abs() < 1e-9);
    }
    assert_eq!(r.runs_tsv().lines().count(), 1 + 6);
}

#[test]
fn empty_seed_list_is_rejected() {
    let b = load_benchmark("toffoli", false).unwrap();
    assert!(run_campaign(&b, &configs(), &[], &Catalog::builtin(), 1).is_err());
    assert!(load_benchmark("nonesuch", false).is_err());
}
