//! Scoring circuits against targets: Boolean error, correctness, cost and
//! fitness.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::circuit::{digits, index_of, Circuit};
use crate::error::{Error, Result};
use crate::gates::{gate_cost, CostModel};
use crate::tensor::{is_unitary, ComplexMatrix, Tolerance, C64, ONE, ZERO};

/// Probability deficit below which an output counts as correct.
pub const CORRECTNESS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    Unitary,
    TruthTable,
    Partial,
}

/// One truth-table line. `None` outputs are don't-cares.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub input: Vec<u8>,
    pub output: Vec<Option<u8>>,
}

#[derive(Clone, Debug)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub n_wires: usize,
    pub radix: usize,
    pub unitary: Option<ComplexMatrix>,
    pub table: Vec<TableRow>,
    /// Equally acceptable targets; a circuit is scored against the best one.
    pub alternatives: Vec<TargetSpec>,
    /// Per table row, the basis indices whose measurement counts as correct.
    accept: Vec<Vec<usize>>,
}

impl TargetSpec {
    /// A unitary target. `m` may span the whole radix^n space or only the
    /// 2^n Boolean subspace.
    pub fn unitary(n_wires: usize, radix: usize, m: ComplexMatrix) -> Result<Self> {
        let full = radix.pow(n_wires as u32);
        let boolean = 1usize << n_wires;
        if !m.is_square() || (m.rows() != full && m.rows() != boolean) {
            return Err(Error::Target(format!(
                "a {n_wires}-wire radix-{radix} unitary target must be {full}x{full} or {boolean}x{boolean}"
            )));
        }
        if !is_unitary(&m, Tolerance::default())? {
            return Err(Error::Target("target matrix is not unitary".into()));
        }
        Ok(Self {
            kind: TargetKind::Unitary,
            n_wires,
            radix,
            unitary: Some(m),
            table: Vec::new(),
            alternatives: Vec::new(),
            accept: Vec::new(),
        })
    }

    pub fn truth_table(n_wires: usize, radix: usize, table: Vec<TableRow>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::Target("empty truth table".into()));
        }
        let mut seen_in = HashSet::new();
        for row in &table {
            if row.input.len() != n_wires || row.output.len() != n_wires {
                return Err(Error::Target(format!("row {:?} does not span {n_wires} wires", row.input)));
            }
            let bad_digit = |d: u8| d as usize >= radix;
            if row.input.iter().any(|&d| bad_digit(d)) || row.output.iter().flatten().any(|&d| bad_digit(d)) {
                return Err(Error::Target(format!("row {:?} uses digits outside radix {radix}", row.input)));
            }
            if !seen_in.insert(row.input.clone()) {
                return Err(Error::Target(format!("input {:?} listed twice", row.input)));
            }
        }
        let full = table.iter().all(|r| r.output.iter().all(Option::is_some));
        if full {
            let mut seen_out = HashSet::new();
            if !table.iter().all(|r| seen_out.insert(r.output.clone())) {
                return Err(Error::Target("fully specified truth table is not reversible".into()));
            }
        }
        let kind = if full { TargetKind::TruthTable } else { TargetKind::Partial };
        let dim = radix.pow(n_wires as u32);
        let accept = table
            .iter()
            .map(|row| {
                (0..dim)
                    .filter(|&y| {
                        let word = digits(y, radix, n_wires);
                        row.output.iter().zip(&word).all(|(want, got)| want.is_none_or(|w| w == *got))
                    })
                    .collect()
            })
            .collect();
        Ok(Self { kind, n_wires, radix, unitary: None, table, alternatives: Vec::new(), accept })
    }

    /// Truth table over every Boolean input word.
    pub fn from_boolean_fn<F>(n_wires: usize, radix: usize, f: F) -> Result<Self>
    where
        F: Fn(&[u8]) -> Vec<Option<u8>>,
    {
        let rows = (0..1usize << n_wires)
            .map(|i| {
                let input = digits(i, 2, n_wires);
                let output = f(&input);
                TableRow { input, output }
            })
            .collect();
        Self::truth_table(n_wires, radix, rows)
    }

    /// Boolean permutation target given as the image of each Boolean word.
    pub fn from_permutation(n_wires: usize, radix: usize, perm: &[usize]) -> Result<Self> {
        if perm.len() != 1 << n_wires {
            return Err(Error::Target("permutation length must be 2^n".into()));
        }
        Self::from_boolean_fn(n_wires, radix, |w| {
            digits(perm[index_of(w, 2)], 2, n_wires).into_iter().map(Some).collect()
        })
    }

    pub fn with_alternative(mut self, other: TargetSpec) -> Result<Self> {
        if other.n_wires != self.n_wires || other.radix != self.radix {
            return Err(Error::Target("alternative target has a different width".into()));
        }
        self.alternatives.push(other);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.radix.pow(self.n_wires as u32)
    }

    /// Basis indices (in the circuit's space) the target is checked on.
    pub fn inputs(&self) -> Vec<usize> {
        match &self.unitary {
            Some(m) if m.rows() == self.dim() => (0..self.dim()).collect(),
            Some(m) => (0..m.rows()).map(|i| self.boolean_index(i)).collect(),
            None => self.table.iter().map(|r| index_of(&r.input, self.radix)).collect(),
        }
    }

    fn boolean_index(&self, i: usize) -> usize {
        index_of(&digits(i, 2, self.n_wires), self.radix)
    }

    /// Parses `input output` lines; `-` marks a don't-care output digit.
    pub fn parse_table(text: &str, radix: usize) -> Result<Self> {
        let mut rows = Vec::new();
        let mut width = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Target(format!("line {}: {msg}", ln + 1));
            let mut parts = line.split_whitespace();
            let (Some(i), Some(o), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected `input output`".into()));
            };
            let digit = |c: char| c.to_digit(10).map(|d| d as u8).ok_or_else(|| err(format!("bad digit {c:?}")));
            let input = i.chars().map(digit).collect::<Result<Vec<_>>>()?;
            let output = o
                .chars()
                .map(|c| if c == '-' { Ok(None) } else { digit(c).map(Some) })
                .collect::<Result<Vec<_>>>()?;
            if *width.get_or_insert(input.len()) != input.len() {
                return Err(err("inconsistent word length".into()));
            }
            rows.push(TableRow { input, output });
        }
        let n = width.ok_or_else(|| Error::Target("no truth-table rows".into()))?;
        Self::truth_table(n, radix, rows)
    }

    /// Loads a target file. Files ending in `.mat` hold a unitary in matrix
    /// fixture format; anything else is a truth table.
    pub fn load(path: &Path, radix: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "mat") {
            let m = ComplexMatrix::from_fixture(&text)?;
            let n_wires = wires_for_dim(m.rows(), radix)
                .ok_or_else(|| Error::Target(format!("dimension {} fits no wire count", m.rows())))?;
            Self::unitary(n_wires, radix, m)
        } else {
            Self::parse_table(&text, radix)
        }
    }
}

fn wires_for_dim(dim: usize, radix: usize) -> Option<usize> {
    (1..=12).find(|&n| radix.pow(n as u32) == dim || 1usize << n == dim)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitnessMode {
    F0,
    F1,
}

impl fmt::Display for FitnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::F0 => "f0",
            Self::F1 => "f1",
        })
    }
}

impl std::str::FromStr for FitnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f0" => Ok(Self::F0),
            "f1" => Ok(Self::F1),
            _ => Err(Error::Config(format!("unknown fitness {s:?}, expected f0 or f1"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitnessParams {
    pub alpha: f64,
    pub beta: f64,
    pub mode: FitnessMode,
}

impl Default for FitnessParams {
    fn default() -> Self {
        Self { alpha: 0.9, beta: 0.1, mode: FitnessMode::F0 }
    }
}

impl FitnessParams {
    pub fn new(alpha: f64, beta: f64, mode: FitnessMode) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) || (alpha + beta - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("alpha={alpha} beta={beta} must be nonnegative and sum to 1")));
        }
        Ok(Self { alpha, beta, mode })
    }
}

pub fn fitness(error: f64, cost: u32, p: &FitnessParams) -> Result<f64> {
    if !(error >= 0.0) {
        return Err(Error::Fitness(format!("error {error} is not a nonnegative number")));
    }
    match p.mode {
        FitnessMode::F0 => Ok(1.0 / (1.0 + error)),
        FitnessMode::F1 => {
            if cost == 0 {
                return Err(Error::Fitness("f1 needs a cost of at least 1".into()));
            }
            Ok(p.alpha / (1.0 + error) + p.beta / cost as f64)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub error: f64,
    /// Percentage of inputs mapped correctly.
    pub correctness: f64,
    /// Cost floored at 1, the value fitness sees.
    pub cost: u32,
    pub raw_cost: u32,
    pub fitness: f64,
}

impl Evaluation {
    pub fn is_correct(&self) -> bool {
        self.correctness >= 100.0
    }
}

/// Sum of gate costs, wire fills excluded.
pub fn circuit_cost(c: &Circuit, model: &CostModel) -> u32 {
    c.gates().map(|p| gate_cost(&p.gate, model)).sum()
}

/// Unitary of the whole circuit.
pub fn circuit_matrix(c: &Circuit) -> ComplexMatrix {
    c.matrix()
}

struct Score {
    error: f64,
    correct: usize,
    total: usize,
}

fn check_width(c_wires: usize, c_radix: usize, t: &TargetSpec) -> Result<()> {
    if c_wires != t.n_wires || c_radix != t.radix {
        return Err(Error::Target(format!(
            "target spans {} radix-{} wires, circuit spans {c_wires} radix-{c_radix}",
            t.n_wires, t.radix
        )));
    }
    Ok(())
}

/// Output columns of the circuit for each target input.
fn columns(c: &Circuit, t: &TargetSpec) -> Vec<Vec<C64>> {
    let dim = c.dim();
    let mut states: Vec<Vec<C64>> = t
        .inputs()
        .into_iter()
        .map(|i| {
            let mut s = vec![ZERO; dim];
            s[i] = ONE;
            s
        })
        .collect();
    c.apply_many(&mut states);
    states
}

fn matrix_columns(m: &ComplexMatrix, t: &TargetSpec) -> Vec<Vec<C64>> {
    t.inputs().into_iter().map(|i| m.column(i)).collect()
}

fn score(cols: &[Vec<C64>], t: &TargetSpec, tol: f64) -> Score {
    let mut best = score_one(cols, t, tol);
    for alt in &t.alternatives {
        let s = score_one(cols, alt, tol);
        if s.error < best.error {
            best = s;
        }
    }
    best
}

fn score_one(cols: &[Vec<C64>], t: &TargetSpec, tol: f64) -> Score {
    let deficits: Vec<f64> = match &t.unitary {
        Some(m) => unitary_deficits(cols, m, t),
        None => t
            .accept
            .iter()
            .zip(cols)
            .map(|(ok, col)| {
                let p: f64 = ok.iter().map(|&y| col[y].norm_sqr()).sum();
                (1.0 - p).max(0.0)
            })
            .collect(),
    };
    Score {
        error: deficits.iter().map(|d| d * d).sum(),
        correct: deficits.iter().filter(|&&d| d <= tol).count(),
        total: deficits.len(),
    }
}

/// Per-column infidelity `1 − Re(e^{−iφ}⟨t|c⟩)`, with the global phase φ
/// chosen to minimise the summed squares.
fn unitary_deficits(cols: &[Vec<C64>], m: &ComplexMatrix, t: &TargetSpec) -> Vec<f64> {
    let boolean = m.rows() != t.dim();
    let overlaps: Vec<C64> = cols
        .iter()
        .enumerate()
        .map(|(j, col)| {
            (0..m.rows())
                .map(|r| {
                    let row = if boolean { t.boolean_index(r) } else { r };
                    m.get(r, j).conj() * col[row]
                })
                .sum()
        })
        .collect();
    let phi = best_phase(&overlaps);
    let phase = C64::from_polar(1.0, phi);
    overlaps.iter().map(|o| (1.0 - (phase.conj() * o).re).max(0.0)).collect()
}

/// Minimiser of `E(φ) = Σ (1 − Re(e^{−iφ} o))²`. Expanding the square,
/// `E = const − 2 Re(e^{−iφ} T) + ½ Re(e^{−2iφ} Q)` with `T = Σ o` and
/// `Q = Σ o²`. The search starts from a reference angle that turns with
/// any global phase, so the result does too.
fn best_phase(overlaps: &[C64]) -> f64 {
    let t: C64 = overlaps.iter().sum();
    let q: C64 = overlaps.iter().map(|o| o * o).sum();
    let e = |phi: f64| {
        let z = C64::from_polar(1.0, -phi);
        -2.0 * (z * t).re + 0.5 * (z * z * q).re
    };
    let reference = if t.norm() > 1e-9 {
        t.arg()
    } else if q.norm() > 1e-9 {
        q.arg() / 2.0
    } else {
        return 0.0;
    };
    const STEPS: usize = 32;
    let mut best = (0..STEPS)
        .map(|k| reference + std::f64::consts::TAU * k as f64 / STEPS as f64)
        .min_by(|a, b| e(*a).total_cmp(&e(*b)))
        .unwrap_or(reference);
    for _ in 0..20 {
        let z = C64::from_polar(1.0, -best);
        let d1 = -2.0 * (z * t).im + (z * z * q).im;
        let d2 = 2.0 * (z * t).re - 2.0 * (z * z * q).re;
        if d2 <= 0.0 {
            break;
        }
        let next = best - d1 / d2;
        if e(next) > e(best) {
            break;
        }
        best = next;
    }
    best
}

pub fn boolean_error(c: &Circuit, t: &TargetSpec) -> Result<f64> {
    check_width(c.n_wires(), c.radix(), t)?;
    Ok(score(&columns(c, t), t, CORRECTNESS_TOL).error)
}

pub fn correctness(c: &Circuit, t: &TargetSpec, tol: f64) -> Result<f64> {
    check_width(c.n_wires(), c.radix(), t)?;
    let s = score(&columns(c, t), t, tol);
    Ok(100.0 * s.correct as f64 / s.total as f64)
}

/// Error and correctness of a raw matrix, as if it were a circuit.
pub fn matrix_score(m: &ComplexMatrix, t: &TargetSpec, tol: f64) -> Result<(f64, f64)> {
    if m.rows() != t.dim() || !m.is_square() {
        return Err(Error::Target(format!("matrix is {}x{}, target space is {}", m.rows(), m.cols(), t.dim())));
    }
    let s = score(&matrix_columns(m, t), t, tol);
    Ok((s.error, 100.0 * s.correct as f64 / s.total as f64))
}

pub fn evaluate(c: &Circuit, t: &TargetSpec, params: &FitnessParams, model: &CostModel) -> Result<Evaluation> {
    check_width(c.n_wires(), c.radix(), t)?;
    let s = score(&columns(c, t), t, CORRECTNESS_TOL);
    let raw_cost = circuit_cost(c, model);
    let cost = raw_cost.max(1);
    let correctness = if s.correct == s.total { 100.0 } else { 100.0 * s.correct as f64 / s.total as f64 };
    Ok(Evaluation { error: s.error, correctness, cost, raw_cost, fitness: fitness(s.error, cost, params)? })
}

/// Evaluates independent circuits concurrently; results keep input order.
pub fn evaluate_batch(
    circuits: &[Circuit],
    t: &TargetSpec,
    params: &FitnessParams,
    model: &CostModel,
) -> Result<Vec<Evaluation>> {
    circuits.par_iter().map(|c| evaluate(c, t, params, model)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Placed;
    use crate::gates::Catalog;

    fn circ(cat: &Catalog, blocks: &[&[(&str, &[usize])]]) -> Circuit {
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|(id, w)| Placed::new(cat.get(id).unwrap().clone(), w.to_vec())).collect())
            .collect();
        Circuit::new(3, 3, blocks, cat.wire(3).unwrap()).unwrap()
    }

    fn toffoli() -> TargetSpec {
        TargetSpec::from_permutation(3, 3, &[0, 1, 2, 3, 4, 5, 7, 6]).unwrap()
    }

    #[test]
    fn identity_against_toffoli() {
        let cat = Catalog::builtin();
        let id = Circuit::identity(3, 3, cat.wire(3).unwrap()).unwrap();
        assert_eq!(boolean_error(&id, &toffoli()).unwrap(), 2.0);
        assert_eq!(correctness(&id, &toffoli(), CORRECTNESS_TOL).unwrap(), 75.0);
    }

    #[test]
    fn fitness_formulas() {
        let p = FitnessParams::default();
        assert_eq!(fitness(0.0, 1, &p).unwrap(), 1.0);
        assert_eq!(fitness(1.0, 1, &p).unwrap(), 0.5);
        let p1 = FitnessParams::new(0.9, 0.1, FitnessMode::F1).unwrap();
        assert!((fitness(0.0, 10, &p1).unwrap() - 0.91).abs() < 1e-15);
        assert!(fitness(0.0, 0, &p1).is_err());
        assert!(FitnessParams::new(0.5, 0.6, FitnessMode::F1).is_err());
    }

    #[test]
    fn cost_floor() {
        let cat = Catalog::builtin();
        let c = circ(&cat, &[&[("H3", &[0])]]);
        let e = evaluate(&c, &toffoli(), &FitnessParams::default(), &CostModel::default()).unwrap();
        assert_eq!((e.raw_cost, e.cost), (0, 1));
        let c = circ(&cat, &[&[("CNOT3", &[0, 1])], &[("CNOT3", &[1, 2])], &[("CNOT3", &[0, 2])]]);
        assert_eq!(circuit_cost(&c, &CostModel::default()), 3);
    }

    #[test]
    fn partial_targets_marginalise() {
        let cat = Catalog::builtin();
        // H on wire 0 leaves wire 2 untouched
        let c = circ(&cat, &[&[("H3", &[0])]]);
        let t = TargetSpec::from_boolean_fn(3, 3, |w| vec![None, None, Some(w[2])]).unwrap();
        assert_eq!(t.kind, TargetKind::Partial);
        assert!(boolean_error(&c, &t).unwrap() < 1e-12);
        assert_eq!(correctness(&c, &t, CORRECTNESS_TOL).unwrap(), 100.0);
    }

    #[test]
    fn unitary_target_sees_relative_phase() {
        let cat = Catalog::builtin();
        let mut diag = vec![ONE; 8];
        diag[7] = -ONE;
        let ts = TargetSpec::unitary(3, 3, ComplexMatrix::diagonal(&diag)).unwrap();
        let id = Circuit::identity(3, 3, cat.wire(3).unwrap()).unwrap();
        assert!(boolean_error(&id, &ts).unwrap() > 0.1);
        let cz = circ(&cat, &[&[("CZ3", &[1, 2])]]);
        assert!(boolean_error(&cz, &ts).unwrap() > 0.1);
    }

    #[test]
    fn table_parsing() {
        let t = TargetSpec::parse_table("# majority\n000 --0\n011 --1\n", 3).unwrap();
        assert_eq!(t.n_wires, 3);
        assert_eq!(t.table[1].output, vec![None, None, Some(1)]);
        assert!(TargetSpec::parse_table("00 11\n000 111\n", 3).is_err());
        assert!(TargetSpec::parse_table("00 11\n01 11\n", 3).is_err());
    }

    #[test]
    fn width_mismatch() {
        let cat = Catalog::builtin();
        let c = Circuit::identity(2, 3, cat.wire(3).unwrap()).unwrap();
        assert!(matches!(boolean_error(&c, &toffoli()), Err(Error::Target(_))));
    }
}
