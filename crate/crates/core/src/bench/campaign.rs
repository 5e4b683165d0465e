//! Multi-run, multi-configuration experiments and their summary tables.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::engine::{GAConfig, RunReport};
use crate::engine::run::Engine;
use crate::error::{Error, Result};
use crate::gates::Catalog;

use super::benchmarks::Benchmark;

pub const DEFAULT_RUNS: usize = 10;

/// Outcome of one seeded run. `error` is set when the run could not
/// complete; the other fields are then meaningless.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub benchmark: String,
    pub config: String,
    pub seed: u64,
    pub success: bool,
    pub generations: usize,
    pub correctness: f64,
    pub cost_raw: u32,
    pub cost_merged: u32,
    pub best_circuit: String,
    pub error: Option<String>,
}

impl RunRecord {
    fn from_report(benchmark: &str, config: &str, r: &RunReport) -> Self {
        Self {
            benchmark: benchmark.into(),
            config: config.into(),
            seed: r.rng_seed,
            success: r.success,
            generations: r.generations_used,
            correctness: r.best.eval.correctness,
            cost_raw: r.cost_raw,
            cost_merged: r.cost_merged,
            best_circuit: r.best_circuit.clone(),
            error: None,
        }
    }

    fn failed(benchmark: &str, config: &str, seed: u64, e: &Error) -> Self {
        Self {
            benchmark: benchmark.into(),
            config: config.into(),
            seed,
            success: false,
            generations: 0,
            correctness: 0.0,
            cost_raw: 0,
            cost_merged: 0,
            best_circuit: String::new(),
            error: Some(e.to_string()),
        }
    }

    pub const TSV_HEADER: &'static str =
        "benchmark\tconfig\tseed\tsuccess\tgenerations\tcorrectness\tcost_raw\tcost_merged\terror\tbest_circuit";

    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\t{}",
            self.benchmark,
            self.config,
            self.seed,
            self.success,
            self.generations,
            self.correctness,
            self.cost_raw,
            self.cost_merged,
            self.error.as_deref().unwrap_or("-"),
            self.best_circuit
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub config: String,
    pub runs: usize,
    pub completed: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful runs only.
    pub mean_generations: Option<f64>,
    pub median_generations: Option<f64>,
    pub mean_correctness: f64,
    pub mean_cost_raw: f64,
    pub mean_cost_merged: f64,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

impl Aggregate {
    /// Summarises the records of one configuration. Failed runs count
    /// towards `runs` but not towards any mean.
    pub fn from_records(config: &str, records: &[RunRecord]) -> Self {
        let done: Vec<&RunRecord> = records.iter().filter(|r| r.error.is_none()).collect();
        let wins: Vec<f64> = done.iter().filter(|r| r.success).map(|r| r.generations as f64).collect();
        let field = |f: fn(&RunRecord) -> f64| mean(&done.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap_or(0.0);
        Self {
            config: config.into(),
            runs: records.len(),
            completed: done.len(),
            successes: wins.len(),
            success_rate: if done.is_empty() { 0.0 } else { wins.len() as f64 / done.len() as f64 },
            mean_generations: mean(&wins),
            median_generations: median(&wins),
            mean_correctness: field(|r| r.correctness),
            mean_cost_raw: field(|r| r.cost_raw as f64),
            mean_cost_merged: field(|r| r.cost_merged as f64),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub benchmark: String,
    /// Sorted by configuration order, then seed.
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub reports: Vec<RunReport>,
}

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.prec$}"))
}

impl CampaignResult {
    pub fn aggregate(&self, config: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.config == config)
    }

    pub fn table(&self) -> String {
        let mut s = format!("benchmark: {}\n", self.benchmark);
        s.push_str("config\truns\tdone\tsuccess\tmean_gen\tmedian_gen\tmean_corr\tmean_cost_raw\tmean_cost_merged\n");
        for a in &self.aggregates {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.1}%\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                a.config,
                a.runs,
                a.completed,
                100.0 * a.success_rate,
                opt(a.mean_generations, 1),
                opt(a.median_generations, 1),
                a.mean_correctness,
                a.mean_cost_raw,
                a.mean_cost_merged
            );
        }
        s
    }

    pub fn runs_tsv(&self) -> String {
        let mut s = String::from(RunRecord::TSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&r.tsv_line());
            s.push('\n');
        }
        s
    }
}

/// One row per benchmark, a `Gen/Corr` column pair per configuration
/// label (mean generations of successful runs, mean correctness).
pub fn comparison_table(results: &[CampaignResult]) -> String {
    let mut labels: Vec<&str> = Vec::new();
    for r in results {
        for a in &r.aggregates {
            if !labels.contains(&a.config.as_str()) {
                labels.push(&a.config);
            }
        }
    }
    let mut s = String::from("benchmark");
    for l in &labels {
        let _ = write!(s, "\t{l} Gen\t{l} Corr");
    }
    s.push('\n');
    for r in results {
        s.push_str(&r.benchmark);
        for l in &labels {
            match r.aggregate(l) {
                Some(a) => {
                    let _ = write!(s, "\t{}\t{:.2}", opt(a.mean_generations, 0), a.mean_correctness);
                }
                None => s.push_str("\t-\t-"),
            }
        }
        s.push('\n');
    }
    s
}

/// Runs every configuration once per seed. Runs execute concurrently on
/// `workers` threads (0 = rayon's default); each run is single-threaded
/// and fully determined by its seed, so results do not depend on the
/// schedule.
pub fn run_campaign(
    benchmark: &Benchmark,
    configs: &[(String, GAConfig)],
    seeds: &[u64],
    catalog: &Catalog,
    workers: usize,
) -> Result<CampaignResult> {
    if seeds.is_empty() {
        return Err(Error::Config("a campaign needs at least one run per configuration".into()));
    }
    let jobs: Vec<(usize, u64)> = (0..configs.len()).flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let name = benchmark.name.as_str();
    let outcomes: Vec<(RunRecord, Option<RunReport>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, seed)| {
                let (label, cfg) = &configs[ci];
                let mut cfg = cfg.clone();
                cfg.rng_seed = seed;
                cfg.workers = 1;
                let report = Engine::new(&cfg, &benchmark.target, catalog)
                    .and_then(|e| e.with_label(name).run());
                match report {
                    Ok(r) => (RunRecord::from_report(name, label, &r), Some(r)),
                    Err(e) => (RunRecord::failed(name, label, seed, &e), None),
                }
            })
            .collect()
    });
    let mut records = Vec::with_capacity(outcomes.len());
    let mut reports = Vec::new();
    for (rec, rep) in outcomes {
        records.push(rec);
        reports.extend(rep);
    }
    let aggregates = configs
        .iter()
        .map(|(label, _)| {
            let mine: Vec<RunRecord> = records.iter().filter(|r| &r.config == label).cloned().collect();
            Aggregate::from_records(label, &mine)
        })
        .collect();
    Ok(CampaignResult { benchmark: name.into(), records, aggregates, reports })
}
