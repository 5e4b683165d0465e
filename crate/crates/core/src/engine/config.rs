use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{FitnessMode, FitnessParams};
use crate::gates::{CostModel, WireRestriction};
use crate::minimize::LearningMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GaMode {
    Classical,
    Baldwinian,
    Lamarckian,
}

impl GaMode {
    pub fn learning(self) -> LearningMode {
        match self {
            Self::Classical => LearningMode::Off,
            Self::Baldwinian => LearningMode::Baldwinian,
            Self::Lamarckian => LearningMode::Lamarckian,
        }
    }
}

impl fmt::Display for GaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Classical => "classical",
            Self::Baldwinian => "baldwinian",
            Self::Lamarckian => "lamarckian",
        })
    }
}

impl FromStr for GaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Self::Classical),
            "baldwinian" => Ok(Self::Baldwinian),
            "lamarckian" => Ok(Self::Lamarckian),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationKind {
    /// Swap a gate for another of the same arity on the same wires.
    StructurePreserving,
    /// Place any gate over the position, evicting whatever it overlaps.
    Free,
    /// Replace a whole block with a fresh random one.
    BlockReplace,
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StructurePreserving => "structure-preserving",
            Self::Free => "free",
            Self::BlockReplace => "block-replace",
        })
    }
}

impl FromStr for MutationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structure-preserving" => Ok(Self::StructurePreserving),
            "free" => Ok(Self::Free),
            "block-replace" => Ok(Self::BlockReplace),
            _ => Err(Error::Config(format!("unknown mutation kind {s:?}"))),
        }
    }
}

pub const DEFAULT_TERNARY_GATES: &[&str] = &["WIRE", "CNOT3", "CZ3", "P02", "P12", "CH3", "CP02", "CP01", "H3"];
pub const DEFAULT_BINARY_GATES: &[&str] = &["WIRE2", "CNOT", "CZ", "CH", "H", "X", "Z"];

#[derive(Clone, Debug, PartialEq)]
pub struct GAConfig {
    pub mode: GaMode,
    /// Lamarckian runs draw mutations from the ranked EIGS when set, and
    /// uniformly from the growing gate set otherwise.
    pub use_eigs: bool,
    pub population_size: usize,
    pub max_generations: usize,
    pub mutation_rate: f64,
    pub mutation_kind: MutationKind,
    pub crossover_rate: f64,
    pub fitness: FitnessParams,
    pub cost_model: CostModel,
    pub gate_set: Vec<String>,
    pub restrictions: Vec<(String, WireRestriction)>,
    pub eigs_cap: usize,
    pub init_blocks: RangeInclusive<usize>,
    pub max_blocks: usize,
    pub elitism: usize,
    pub rng_seed: u64,
    /// Evaluation threads; 0 uses the ambient pool. Never affects results.
    pub workers: usize,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            mode: GaMode::Classical,
            use_eigs: true,
            population_size: 50,
            max_generations: 10_000,
            mutation_rate: 0.05,
            mutation_kind: MutationKind::Free,
            crossover_rate: 0.7,
            fitness: FitnessParams::default(),
            cost_model: CostModel::default(),
            gate_set: DEFAULT_TERNARY_GATES.iter().map(|s| s.to_string()).collect(),
            restrictions: Vec::new(),
            eigs_cap: 50,
            init_blocks: 2..=8,
            max_blocks: 20,
            elitism: 1,
            rng_seed: 1,
            workers: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.population_size < 2 {
            return err("population size must be at least 2");
        }
        if self.elitism >= self.population_size {
            return err("elitism must leave room for offspring");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) || !(0.0..=1.0).contains(&self.crossover_rate) {
            return err("rates must lie in [0, 1]");
        }
        if self.init_blocks.is_empty() || *self.init_blocks.start() == 0 {
            return err("initial block range must be nonempty and start at 1 or more");
        }
        if *self.init_blocks.end() > self.max_blocks {
            return err("initial blocks exceed max_blocks");
        }
        if self.gate_set.is_empty() {
            return err("empty gate set");
        }
        if self.eigs_cap < self.gate_set.len() {
            return err("eigs_cap is smaller than the primitive gate set");
        }
        FitnessParams::new(self.fitness.alpha, self.fitness.beta, self.fitness.mode)?;
        Ok(())
    }

    /// Applies one `key=value` setting, as used by config files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn fmt::Display| Error::Config(format!("{key}={value}: {e}"));
        let num = |v: &str| v.parse::<f64>().map_err(|e| bad(&e));
        let int = |v: &str| v.parse::<usize>().map_err(|e| bad(&e));
        match key {
            "mode" => self.mode = value.parse()?,
            "eigs" => self.use_eigs = value.parse().map_err(|e| bad(&e))?,
            "pop" | "population" => self.population_size = int(value)?,
            "gens" | "max_generations" => self.max_generations = int(value)?,
            "mutation_rate" => self.mutation_rate = num(value)?,
            "mutation_kind" => self.mutation_kind = value.parse()?,
            "crossover_rate" => self.crossover_rate = num(value)?,
            "fitness" => self.fitness.mode = value.parse::<FitnessMode>()?,
            "alpha" => self.fitness.alpha = num(value)?,
            "beta" => self.fitness.beta = num(value)?,
            "gates" => self.gate_set = value.split(',').map(|s| s.trim().to_string()).collect(),
            "restrict" => {
                let (id, wires) = parse_restriction(value)?;
                self.restrictions.retain(|(g, _)| *g != id);
                self.restrictions.push((id, wires));
            }
            "eigs_cap" => self.eigs_cap = int(value)?,
            "init_blocks" => {
                let (a, b) = value.split_once("..").ok_or_else(|| bad(&"expected lo..hi"))?;
                self.init_blocks = int(a)?..=int(b)?;
            }
            "max_blocks" => self.max_blocks = int(value)?,
            "elitism" => self.elitism = int(value)?,
            "seed" => self.rng_seed = value.parse().map_err(|e| bad(&e))?,
            "workers" => self.workers = int(value)?,
            _ => return Err(Error::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, found {line:?}")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

/// `GATE=wires`, e.g. `H3=2` or `CNOT3=any`.
pub fn parse_restriction(s: &str) -> Result<(String, WireRestriction)> {
    let (id, wires) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("restriction {s:?} must look like GATE=wires")))?;
    Ok((id.trim().to_string(), wires.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GAConfig::default().validate().unwrap();
        assert_eq!(GAConfig::default().eigs_cap, 50);
        assert_eq!(GAConfig::default().max_generations, 10_000);
    }

    #[test]
    fn key_values() {
        let mut c = GAConfig::default();
        c.apply_file("mode=lamarckian\npop = 20 # small\nrestrict=H3=2\nfitness=f1\nalpha=0.8\nbeta=0.2\n").unwrap();
        assert_eq!(c.mode, GaMode::Lamarckian);
        assert_eq!(c.population_size, 20);
        assert_eq!(c.restrictions, vec![("H3".to_string(), WireRestriction::wires([2]).unwrap())]);
        assert_eq!(c.fitness.mode, FitnessMode::F1);
        c.validate().unwrap();
        assert!(c.set("bogus", "1").is_err());
        c.set("alpha", "0.5").unwrap();
        assert!(c.validate().is_err());
    }
}
