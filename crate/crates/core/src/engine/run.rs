use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{GAConfig, GaMode};
use super::eigs::Eigs;
use super::operators::{mutate_circuit, truncate_blocks, two_point_crossover, GateSource};
use super::selection::sus_select;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::eval::{circuit_cost, evaluate, Evaluation, TargetSpec};
use crate::gates::{Catalog, GateDef};
use crate::genome::{decode, encode_registering, random_genome, GateLexicon, GatePool, Genome};
use crate::minimize::{minimize, minimize_readonly, LearningMode};

#[derive(Clone, Debug)]
pub struct Individual {
    pub genome: Genome,
    pub eval: Evaluation,
    /// Generation the individual was created in.
    pub age: usize,
}

#[derive(Clone, Debug)]
pub struct EigsSnapshotEntry {
    pub token: String,
    pub gate: String,
    pub usage: u64,
    pub gfitness: f64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub label: String,
    pub config: GAConfig,
    pub success: bool,
    pub generations_used: usize,
    pub best: Individual,
    pub best_circuit: String,
    pub cost_raw: u32,
    pub cost_merged: u32,
    pub merged_gates: usize,
    pub suppressed_merges: usize,
    pub skipped_mutations: usize,
    pub eigs: Vec<EigsSnapshotEntry>,
    pub eigs_refused: usize,
    pub rng_seed: u64,
}

impl RunReport {
    /// Structured text with a fixed field order and float formatting.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let restrictions: Vec<String> = c.restrictions.iter().map(|(g, r)| format!("{g}={r}")).collect();
        let lines: Vec<(&str, String)> = vec![
            ("target", self.label.clone()),
            ("seed", self.rng_seed.to_string()),
            ("mode", c.mode.to_string()),
            ("eigs", c.use_eigs.to_string()),
            ("population", c.population_size.to_string()),
            ("max_generations", c.max_generations.to_string()),
            ("mutation_rate", format!("{:.6}", c.mutation_rate)),
            ("mutation_kind", c.mutation_kind.to_string()),
            ("crossover_rate", format!("{:.6}", c.crossover_rate)),
            ("fitness", c.fitness.mode.to_string()),
            ("alpha", format!("{:.6}", c.fitness.alpha)),
            ("beta", format!("{:.6}", c.fitness.beta)),
            ("gate_set", c.gate_set.join(",")),
            ("restrictions", if restrictions.is_empty() { "none".into() } else { restrictions.join(";") }),
            ("eigs_cap", c.eigs_cap.to_string()),
            ("init_blocks", format!("{}..{}", c.init_blocks.start(), c.init_blocks.end())),
            ("max_blocks", c.max_blocks.to_string()),
            ("elitism", c.elitism.to_string()),
            ("success", self.success.to_string()),
            ("generations", self.generations_used.to_string()),
            ("best_genome", self.best.genome.to_string()),
            ("best_circuit", self.best_circuit.clone()),
            ("best_error", format!("{:.12}", self.best.eval.error)),
            ("best_correctness", format!("{:.6}", self.best.eval.correctness)),
            ("best_fitness", format!("{:.12}", self.best.eval.fitness)),
            ("cost_raw", self.cost_raw.to_string()),
            ("cost_merged", self.cost_merged.to_string()),
            ("merged_gates", self.merged_gates.to_string()),
            ("suppressed_merges", self.suppressed_merges.to_string()),
            ("skipped_mutations", self.skipped_mutations.to_string()),
            ("eigs_entries", self.eigs.len().to_string()),
            ("eigs_refused", self.eigs_refused.to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(s, "{k}: {v}");
        }
        s.push_str("[eigs]\nrank\ttoken\tgate\tusage\tgfitness\n");
        for (i, e) in self.eigs.iter().enumerate() {
            let _ = writeln!(s, "{}\t{}\t{}\t{}\t{:.9}", i + 1, e.token, e.gate, e.usage, e.gfitness);
        }
        s
    }
}

/// Compact one-line rendering: blocks separated by `|`, wire fills omitted.
pub fn render_circuit(c: &Circuit) -> String {
    let blocks: Vec<String> = c
        .blocks()
        .iter()
        .map(|b| {
            let gates: Vec<String> = b
                .gates()
                .map(|p| {
                    let w: Vec<String> = p.wires.iter().map(|x| x.to_string()).collect();
                    format!("{}({})", p.gate.id, w.join(","))
                })
                .collect();
            if gates.is_empty() { "I".into() } else { gates.join(" ") }
        })
        .collect();
    blocks.join(" | ")
}

/// One GA run. Build with [`Engine::new`], then call [`Engine::run`].
pub struct Engine<'a> {
    cfg: GAConfig,
    target: &'a TargetSpec,
    label: String,
    seeds: Vec<Genome>,
    catalog: Catalog,
    lex: GateLexicon,
    primitives: Vec<Arc<GateDef>>,
    eigs: Eigs,
    merge_log: Option<Vec<String>>,
    suppressed: usize,
    skipped: usize,
}

impl<'a> Engine<'a> {
    /// Validates the configuration against the target and catalog.
    pub fn new(cfg: &GAConfig, target: &'a TargetSpec, catalog: &Catalog) -> Result<Self> {
        cfg.validate()?;
        let mut catalog = catalog.clone();
        for (id, r) in &cfg.restrictions {
            if let Some(w) = r.max_wire().filter(|&w| w >= target.n_wires) {
                return Err(Error::Config(format!("restriction {id}={r} names wire {w} of a {}-wire target", target.n_wires)));
            }
            catalog = catalog.with_restriction(id, r.clone())?;
        }
        let mut lex = GateLexicon::new(&catalog, target.n_wires, target.radix)?;
        if cfg.mode == GaMode::Lamarckian {
            lex.set_merge_capacity(Some(cfg.eigs_cap - cfg.gate_set.len()));
        }
        let primitives = cfg
            .gate_set
            .iter()
            .map(|id| {
                let g = catalog.require(id)?;
                if g.radix != target.radix {
                    return Err(Error::Config(format!("gate {id} has radix {}, target {}", g.radix, target.radix)));
                }
                lex.gate(id)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("gate {id} is wider than the target")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eigs: Eigs::new(cfg.eigs_cap),
            cfg: cfg.clone(),
            target,
            label: "custom".into(),
            seeds: Vec::new(),
            catalog,
            lex,
            primitives,
            merge_log: None,
            suppressed: 0,
            skipped: 0,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Genomes placed into the initial population ahead of random ones.
    pub fn with_seed_genomes(mut self, seeds: Vec<Genome>) -> Self {
        self.seeds = seeds;
        self
    }

    /// Keeps a dump line for every merge performed during the run.
    pub fn collect_merges(mut self) -> Self {
        self.merge_log = Some(Vec::new());
        self
    }

    pub fn merge_log(&self) -> &[String] {
        self.merge_log.as_deref().unwrap_or(&[])
    }

    pub fn lexicon(&self) -> &GateLexicon {
        &self.lex
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn run(&mut self) -> Result<RunReport> {
        Ok(self.run_with_population()?.0)
    }

    /// Runs to completion and also returns the final population.
    pub fn run_with_population(&mut self) -> Result<(RunReport, Vec<Individual>)> {
        if self.cfg.workers > 0 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.cfg.workers)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| self.evolve())
        } else {
            self.evolve()
        }
    }

    fn evolve(&mut self) -> Result<(RunReport, Vec<Individual>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        let pool = GatePool::new(self.primitives.clone(), self.target.n_wires);
        let mut genomes = Vec::with_capacity(self.cfg.population_size);
        for s in self.seeds.iter().take(self.cfg.population_size) {
            decode(s, &self.lex)?;
            genomes.push(s.clone());
        }
        while genomes.len() < self.cfg.population_size {
            genomes.push(random_genome(&self.lex, &pool, self.cfg.init_blocks.clone(), &mut rng)?);
        }
        let mut pop = self.evaluate_all(genomes, 0)?;
        let mut generation = 0;
        while !pop.iter().any(|i| i.eval.is_correct()) && generation < self.cfg.max_generations {
            generation += 1;
            pop = self.step(&pop, generation, &mut rng)?;
        }
        Ok((self.report(&pop, generation)?, pop))
    }

    fn step(&mut self, pop: &[Individual], generation: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Individual>> {
        let n_children = self.cfg.population_size - self.cfg.elitism;
        let fitness: Vec<f64> = pop.iter().map(|i| i.eval.fitness).collect();
        let mut parents = sus_select(&fitness, n_children, rng)?;
        parents.shuffle(rng);

        let mut children = Vec::with_capacity(n_children);
        for pair in parents.chunks(2) {
            let a = &pop[pair[0]].genome;
            let b = &pop[*pair.get(1).unwrap_or(&parents[0])].genome;
            let (c1, c2) = if rng.gen_bool(self.cfg.crossover_rate) {
                two_point_crossover(a, b, rng)?
            } else {
                (a.clone(), b.clone())
            };
            children.push(c1);
            if children.len() < n_children {
                children.push(c2);
            }
        }

        let merged: Vec<Arc<GateDef>>;
        let source = match (self.cfg.mode, self.cfg.use_eigs) {
            (GaMode::Lamarckian, true) => GateSource::Weighted { eigs: &self.eigs, fallback: &self.primitives },
            (GaMode::Lamarckian, false) => {
                merged = self.primitives.iter().chain(self.lex.merged_gates()).cloned().collect();
                GateSource::Uniform(&merged)
            }
            _ => GateSource::Uniform(&self.primitives),
        };
        let mut mutated = Vec::with_capacity(children.len());
        let mut pending = Vec::new();
        for child in children {
            let c = decode(&child, &self.lex)?;
            let m = mutate_circuit(&c, self.cfg.mutation_kind, self.cfg.mutation_rate, &source, rng, &mut self.skipped);
            if let Some(m) = m {
                pending.push((mutated.len(), m));
            }
            mutated.push(child);
        }
        for (i, m) in pending {
            mutated[i] = encode_registering(&m, &mut self.lex)?;
        }
        let mutated: Vec<Genome> = mutated.iter().map(|g| truncate_blocks(g, self.cfg.max_blocks)).collect();

        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&x, &y| pop[y].eval.fitness.total_cmp(&pop[x].eval.fitness).then(x.cmp(&y)));
        let mut next: Vec<Individual> = order[..self.cfg.elitism].iter().map(|&i| pop[i].clone()).collect();
        next.extend(self.evaluate_all(mutated, generation)?);
        Ok(next)
    }

    /// Evaluates genomes, minimizing first in the learning modes. Lamarckian
    /// minimization and EIGS updates run serially in index order; scoring
    /// runs in parallel.
    fn evaluate_all(&mut self, genomes: Vec<Genome>, generation: usize) -> Result<Vec<Individual>> {
        let (genomes, phenotypes): (Vec<Genome>, Vec<Circuit>) = match self.cfg.mode {
            GaMode::Lamarckian => {
                let mut gs = Vec::with_capacity(genomes.len());
                let mut ps = Vec::with_capacity(genomes.len());
                for g in genomes {
                    let c = decode(&g, &self.lex)?;
                    let m = minimize(&c, Some(&mut self.lex), LearningMode::Lamarckian);
                    self.suppressed += m.suppressed.len();
                    if let Some(log) = self.merge_log.as_mut() {
                        log.extend(m.events.iter().map(|e| e.dump_line()));
                    }
                    gs.push(encode_registering(&m.phenotype, &mut self.lex)?);
                    ps.push(m.phenotype);
                }
                (gs, ps)
            }
            GaMode::Baldwinian => {
                let lex = &self.lex;
                let ps = genomes
                    .par_iter()
                    .map(|g| decode(g, lex).map(|c| minimize_readonly(&c, lex).phenotype))
                    .collect::<Result<Vec<_>>>()?;
                (genomes, ps)
            }
            GaMode::Classical => {
                let lex = &self.lex;
                let ps = genomes.par_iter().map(|g| decode(g, lex)).collect::<Result<Vec<_>>>()?;
                (genomes, ps)
            }
        };
        let (target, cfg) = (self.target, &self.cfg);
        let evals = phenotypes
            .par_iter()
            .map(|c| evaluate(c, target, &cfg.fitness, &cfg.cost_model))
            .collect::<Result<Vec<_>>>()?;
        if self.cfg.mode == GaMode::Lamarckian && self.cfg.use_eigs {
            for (c, e) in phenotypes.iter().zip(&evals) {
                let lex = &self.lex;
                let used: Vec<(&Arc<GateDef>, String)> = c
                    .placements()
                    .map(|p| (&p.gate, lex.canonical_token(&p.gate.id).unwrap_or_else(|| p.gate.id.clone())))
                    .collect();
                self.eigs.update(used, e.fitness);
            }
        }
        Ok(genomes
            .into_iter()
            .zip(evals)
            .map(|(genome, eval)| Individual { genome, eval, age: generation })
            .collect())
    }

    fn report(&self, pop: &[Individual], generation: usize) -> Result<RunReport> {
        let better = |a: &&Individual, b: &&Individual| a.eval.fitness.total_cmp(&b.eval.fitness);
        // first maximum in population order
        let pick = |it: Vec<&'_ Individual>| it.into_iter().rev().max_by(better).cloned();
        let correct: Vec<&Individual> = pop.iter().filter(|i| i.eval.is_correct()).collect();
        let success = !correct.is_empty();
        let best = if success { pick(correct) } else { pick(pop.iter().collect()) }.expect("nonempty population");
        let circuit = decode(&best.genome, &self.lex)?;
        let phenotype = minimize_readonly(&circuit, &self.lex).phenotype;
        Ok(RunReport {
            label: self.label.clone(),
            config: self.cfg.clone(),
            success,
            generations_used: generation,
            best_circuit: render_circuit(&circuit),
            cost_raw: circuit_cost(&circuit, &self.cfg.cost_model),
            cost_merged: circuit_cost(&phenotype, &self.cfg.cost_model),
            best,
            merged_gates: self.lex.merged_count(),
            suppressed_merges: self.suppressed,
            skipped_mutations: self.skipped,
            eigs: self
                .eigs
                .entries()
                .iter()
                .map(|e| EigsSnapshotEntry {
                    token: e.token.clone(),
                    gate: e.gate.id.clone(),
                    usage: e.usage,
                    gfitness: e.gfitness,
                })
                .collect(),
            eigs_refused: self.eigs.refused().len(),
            rng_seed: self.cfg.rng_seed,
        })
    }
}

/// Convenience wrapper: one run with default labelling.
pub fn run(cfg: &GAConfig, target: &TargetSpec, catalog: &Catalog) -> Result<RunReport> {
    Engine::new(cfg, target, catalog)?.run()
}
