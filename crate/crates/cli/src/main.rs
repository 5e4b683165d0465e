use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eqls_core::bench::{comparison_table, load_benchmark, render_checks, run_campaign, verify_constructions, BENCHMARKS};
use eqls_core::engine::config::{parse_restriction, DEFAULT_BINARY_GATES, DEFAULT_TERNARY_GATES};
use eqls_core::engine::{Engine, GAConfig, GaMode};
use eqls_core::{Catalog, Error, FitnessMode, Genome, Result, TargetSpec, WireRestriction};

#[derive(Parser)]
#[command(name = "eqls", version, about = "Evolutionary synthesis of qubit and qutrit circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-seed campaign on a benchmark (or `all`).
    Bench {
        name: String,
        #[command(flatten)]
        ga: GaArgs,
        /// Runs per configuration.
        #[arg(long, default_value_t = eqls_core::bench::DEFAULT_RUNS)]
        runs: usize,
        /// Also run every configuration without structural restrictions.
        #[arg(long)]
        compare_restrictions: bool,
        /// Directory for the summary, the per-run table and per-run reports.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the GA once and print its report.
    Run {
        /// Benchmark name, or a truth-table / matrix file.
        #[arg(long)]
        target: String,
        /// Radix of a file target.
        #[arg(long, default_value_t = 3)]
        radix: usize,
        #[command(flatten)]
        ga: GaArgs,
        /// File of genomes (`wires=N radix=R p…p` per line) for the initial population.
        #[arg(long)]
        seed_circuit: Option<PathBuf>,
        /// Write every merge performed to this file.
        #[arg(long)]
        dump_merges: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the hand-built reference circuits.
    Verify,
    /// Print the gate catalog.
    ListGates,
}

#[derive(Args, Clone)]
struct GaArgs {
    /// key=value file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated: classical, baldwinian, lamarckian.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated: f0, f1.
    #[arg(long)]
    fitness: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// `default`, `none`, or GATE=wires (repeatable).
    #[arg(long)]
    restrict: Vec<String>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    mutation_kind: Option<String>,
    /// Comma-separated gate ids.
    #[arg(long)]
    gates: Option<String>,
    /// Base seed; campaign runs use seed, seed+1, ...
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_elitism: bool,
    #[arg(long)]
    no_eigs: bool,
    /// Accept the 101/100 Toffoli variant as well.
    #[arg(long)]
    any_toffoli_variant: bool,
    #[arg(long, env = "EQLS_WORKERS", default_value_t = 0)]
    workers: usize,
}

enum Restrict {
    Default,
    None,
}

impl GaArgs {
    /// The base configuration plus the list of modes and fitness modes to sweep.
    fn resolve(&self, radix: usize) -> Result<(GAConfig, Vec<GaMode>, Vec<FitnessMode>, Restrict, Vec<(String, WireRestriction)>)> {
        let mut cfg = GAConfig::default();
        if radix == 2 {
            cfg.gate_set = DEFAULT_BINARY_GATES.iter().map(|s| s.to_string()).collect();
        } else {
            cfg.gate_set = DEFAULT_TERNARY_GATES.iter().map(|s| s.to_string()).collect();
        }
        if let Some(p) = &self.config {
            cfg.apply_file(&read(p)?)?;
        }
        let list = |s: &Option<String>| -> Vec<String> {
            s.as_deref().map(|s| s.split(',').map(|x| x.trim().to_string()).collect()).unwrap_or_default()
        };
        let mut modes = list(&self.mode).iter().map(|m| m.parse()).collect::<Result<Vec<GaMode>>>()?;
        if modes.is_empty() {
            modes.push(cfg.mode);
        }
        let mut fits = list(&self.fitness).iter().map(|m| m.parse()).collect::<Result<Vec<FitnessMode>>>()?;
        if fits.is_empty() {
            fits.push(cfg.fitness.mode);
        }
        if let Some(a) = self.alpha {
            cfg.fitness.alpha = a;
        }
        if let Some(b) = self.beta {
            cfg.fitness.beta = b;
        }
        if let Some(p) = self.pop {
            cfg.population_size = p;
        }
        if let Some(g) = self.gens {
            cfg.max_generations = g;
        }
        if let Some(r) = self.mutation_rate {
            cfg.mutation_rate = r;
        }
        if let Some(k) = &self.mutation_kind {
            cfg.mutation_kind = k.parse()?;
        }
        if let Some(g) = &self.gates {
            cfg.set("gates", g)?;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if self.no_elitism {
            cfg.elitism = 0;
        }
        if self.no_eigs {
            cfg.use_eigs = false;
        }
        cfg.workers = self.workers;
        let mut base = Restrict::Default;
        let mut extra = Vec::new();
        for r in &self.restrict {
            match r.as_str() {
                "default" => base = Restrict::Default,
                "none" => base = Restrict::None,
                _ => extra.push(parse_restriction(r)?),
            }
        }
        Ok((cfg, modes, fits, base, extra))
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<()> {
    fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn merged(mut base: Vec<(String, WireRestriction)>, extra: &[(String, WireRestriction)]) -> Vec<(String, WireRestriction)> {
    for (id, r) in extra {
        base.retain(|(g, _)| g != id);
        base.push((id.clone(), r.clone()));
    }
    base
}

/// Drops restrictions on gates outside the gate set; the catalog rejects
/// unknown ids, and restricting an unused gate changes nothing.
fn relevant(cfg: &GAConfig, rs: Vec<(String, WireRestriction)>) -> Vec<(String, WireRestriction)> {
    rs.into_iter().filter(|(g, _)| cfg.gate_set.contains(g)).collect()
}

fn bench(name: &str, ga: &GaArgs, runs: usize, compare: bool, report: Option<&Path>) -> Result<()> {
    let names: Vec<&str> = if name.eq_ignore_ascii_case("all") { BENCHMARKS.to_vec() } else { vec![name] };
    let catalog = Catalog::builtin();
    let mut results = Vec::new();
    for n in names {
        let b = load_benchmark(n, ga.any_toffoli_variant)?;
        let (cfg, modes, fits, base, extra) = ga.resolve(b.target.radix)?;
        let mut variants = vec![match base {
            Restrict::Default => ("restricted", merged(b.restrictions.clone(), &extra)),
            Restrict::None => ("unrestricted", extra.clone()),
        }];
        if compare && matches!(base, Restrict::Default) {
            variants.push(("unrestricted", extra.clone()));
        }
        let mut configs = Vec::new();
        for &m in &modes {
            for &f in &fits {
                for (tag, rs) in &variants {
                    let mut c = cfg.clone();
                    c.mode = m;
                    c.fitness.mode = f;
                    c.restrictions = relevant(&c, rs.clone());
                    let mut label = m.to_string();
                    if m == GaMode::Lamarckian && !c.use_eigs {
                        label.push_str("-noeigs");
                    }
                    if fits.len() > 1 {
                        label = format!("{label}/{f}");
                    }
                    if variants.len() > 1 {
                        label = format!("{label}/{tag}");
                    }
                    configs.push((label, c));
                }
            }
        }
        let seeds: Vec<u64> = (0..runs as u64).map(|k| cfg.rng_seed + k).collect();
        let r = run_campaign(&b, &configs, &seeds, &catalog, ga.workers)?;
        print!("{}", r.table());
        if let Some(dir) = report {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            write(&dir.join(format!("{}-summary.tsv", r.benchmark)), &r.table())?;
            write(&dir.join(format!("{}-runs.tsv", r.benchmark)), &r.runs_tsv())?;
            for (rec, rep) in r.records.iter().filter(|x| x.error.is_none()).zip(&r.reports) {
                let file = format!("{}-{}-{}.txt", r.benchmark, rec.config.replace('/', "_"), rec.seed);
                write(&dir.join(file), &rep.to_text())?;
            }
        }
        results.push(r);
    }
    println!();
    print!("{}", comparison_table(&results));
    Ok(())
}

fn run_once(
    target: &str,
    radix: usize,
    ga: &GaArgs,
    seed_circuit: Option<&Path>,
    dump: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let (label, spec, defaults) = if Path::new(target).is_file() {
        (target.to_string(), TargetSpec::load(Path::new(target), radix)?, Vec::new())
    } else {
        let b = load_benchmark(target, ga.any_toffoli_variant)?;
        (b.name, b.target, b.restrictions)
    };
    let (mut cfg, modes, fits, base, extra) = ga.resolve(spec.radix)?;
    cfg.mode = modes[0];
    cfg.fitness.mode = fits[0];
    let rs = match base {
        Restrict::Default => merged(defaults, &extra),
        Restrict::None => extra,
    };
    cfg.restrictions = relevant(&cfg, rs);
    let catalog = Catalog::builtin();
    let mut engine = Engine::new(&cfg, &spec, &catalog)?.with_label(label);
    if let Some(p) = seed_circuit {
        engine = engine.with_seed_genomes(Genome::parse_file(&read(p)?)?);
    }
    if dump.is_some() {
        engine = engine.collect_merges();
    }
    let r = engine.run()?;
    if let Some(p) = dump {
        let mut s = engine.merge_log().join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        write(p, &s)?;
    }
    match report {
        Some(p) => write(p, &r.to_text()),
        None => {
            print!("{}", r.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Bench { name, ga, runs, compare_restrictions, report } => {
            bench(name, ga, *runs, *compare_restrictions, report.as_deref())
        }
        Command::Run { target, radix, ga, seed_circuit, dump_merges, report } => {
            run_once(target, *radix, ga, seed_circuit.as_deref(), dump_merges.as_deref(), report.as_deref())
        }
        Command::Verify => verify_constructions().map(|checks| {
            print!("{}", render_checks(&checks));
            if checks.iter().any(|c| !c.passed) {
                std::process::exit(1);
            }
        }),
        Command::ListGates => {
            print!("{}", Catalog::builtin().listing());
            Ok(())
        }
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
