//! Gate cancellation and merging of adjacent gates on the same wires.
//!
//! Two gates are adjacent when they sit in consecutive blocks, ignoring
//! blocks that hold only wires. No commutation is attempted, so a gate
//! elsewhere in the block between them separates them even if it acts on
//! other wires. Blocks emptied by a rewrite are kept as wire-only blocks.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::circuit::{Circuit, Placed};
use crate::error::{Error, Result};
use crate::gates::{expand_matrix, gate_cost, wire_gate, CostModel, GateDef, GateOrigin, WireRestriction};
use crate::genome::GateLexicon;
use crate::tensor::{approx_equal, matmul, ComplexMatrix, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearningMode {
    Off,
    Baldwinian,
    Lamarckian,
}

impl fmt::Display for LearningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Off => "off",
            Self::Baldwinian => "baldwinian",
            Self::Lamarckian => "lamarckian",
        })
    }
}

/// What the caller should do with the genome that produced the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenotypeAction {
    None,
    Keep,
    Replace,
}

#[derive(Clone, Debug)]
pub struct MergeEvent {
    pub produced: Arc<GateDef>,
    pub produced_token: Option<String>,
    pub sources: Vec<String>,
    pub source_tokens: Vec<Option<String>>,
    /// Placement of the produced gate.
    pub wires: Vec<usize>,
}

impl MergeEvent {
    /// `produced<TAB>sources<TAB>wires`, tokens where known and gate ids
    /// otherwise.
    pub fn dump_line(&self) -> String {
        let produced = self.produced_token.clone().unwrap_or_else(|| self.produced.id.clone());
        let sources: Vec<String> = self
            .sources
            .iter()
            .zip(&self.source_tokens)
            .map(|(id, tok)| tok.clone().unwrap_or_else(|| id.clone()))
            .collect();
        let wires: Vec<String> = self.wires.iter().map(|w| w.to_string()).collect();
        format!("{produced}\t{}\t{}", sources.join(" "), wires.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub phenotype: Circuit,
    pub action: GenotypeAction,
    pub events: Vec<MergeEvent>,
    /// Pairs that cancelled to the identity.
    pub cancelled: usize,
    /// Merges skipped because the lexicon was full.
    pub suppressed: Vec<String>,
}

/// Where merged gates come from: nowhere (anonymous), a lexicon used for
/// lookups only, or a lexicon that also receives new gates.
enum Lex<'a> {
    None,
    Read(&'a GateLexicon),
    Write(&'a mut GateLexicon),
}

impl Lex<'_> {
    fn get(&self) -> Option<&GateLexicon> {
        match self {
            Lex::None => None,
            Lex::Read(l) => Some(l),
            Lex::Write(l) => Some(l),
        }
    }

    fn token(&self, p: &Placed) -> Option<String> {
        self.get().and_then(|l| l.token_for(&p.gate.id, &p.wires))
    }
}

/// Removes adjacent identical self-inverse gates until none remain.
pub fn cancel_adjacent_inverses(c: &Circuit) -> Circuit {
    let mut work = Work::from(c);
    while let Some((a, b)) = work.find_pair(|pa, pb| pa == pb && pa.gate.is_self_inverse(Tolerance::default())) {
        work.remove(b);
        work.remove(a);
    }
    work.build(c)
}

/// Multiplies adjacent gates on identical wire sets into single gates.
/// With a lexicon, new gates are registered there (subject to its merge
/// capacity); without one they are anonymous.
pub fn merge_adjacent(c: &Circuit, lexicon: Option<&mut GateLexicon>) -> (Circuit, Vec<MergeEvent>) {
    let lex = match lexicon {
        Some(l) => Lex::Write(l),
        None => Lex::None,
    };
    let m = run(c, lex);
    (m.phenotype, m.events)
}

/// Cancel and merge to a fixpoint. Lamarckian mode registers new gates in
/// the lexicon; Baldwinian mode only looks gates up and leaves the
/// lexicon untouched.
pub fn minimize(c: &Circuit, lexicon: Option<&mut GateLexicon>, mode: LearningMode) -> Minimized {
    match mode {
        LearningMode::Off => Minimized {
            phenotype: c.clone(),
            action: GenotypeAction::None,
            events: Vec::new(),
            cancelled: 0,
            suppressed: Vec::new(),
        },
        LearningMode::Baldwinian => {
            let lex = match lexicon {
                Some(l) => Lex::Read(l),
                None => Lex::None,
            };
            Minimized { action: GenotypeAction::Keep, ..run(c, lex) }
        }
        LearningMode::Lamarckian => {
            let lex = match lexicon {
                Some(l) => Lex::Write(l),
                None => Lex::None,
            };
            Minimized { action: GenotypeAction::Replace, ..run(c, lex) }
        }
    }
}

/// Baldwinian-style minimization against a shared, read-only lexicon.
pub fn minimize_readonly(c: &Circuit, lexicon: &GateLexicon) -> Minimized {
    Minimized { action: GenotypeAction::Keep, ..run(c, Lex::Read(lexicon)) }
}

fn run(c: &Circuit, mut lex: Lex<'_>) -> Minimized {
    let tol = Tolerance::default();
    let mut work = Work::from(c);
    let mut events = Vec::new();
    let mut cancelled = 0;
    let mut suppressed = Vec::new();
    let mut blocked: HashSet<(String, String, Vec<usize>, Vec<usize>)> = HashSet::new();

    while let Some((a, b)) = work.find_pair(|pa, pb| pa == pb && pa.gate.is_self_inverse(tol)) {
        work.remove(b);
        work.remove(a);
        cancelled += 1;
    }
    loop {
        let pair = work.find_pair(|pa, pb| {
            pa.same_wire_set(pb)
                && !blocked.contains(&(pa.gate.id.clone(), pb.gate.id.clone(), pa.wires.clone(), pb.wires.clone()))
        });
        let Some((a, b)) = pair else { break };
        let (pa, pb) = (work.get(a).clone(), work.get(b).clone());
        let mut sorted = pa.wires.clone();
        sorted.sort_unstable();
        let local = |p: &Placed| {
            let pos: Vec<usize> = p.wires.iter().map(|w| sorted.binary_search(w).unwrap()).collect();
            expand_matrix(&p.gate.matrix, c.radix(), &pos, sorted.len())
        };
        let product = matmul(&local(&pb), &local(&pa)).expect("equal local dimensions");
        if approx_equal(&product, &ComplexMatrix::identity(product.rows()), tol).unwrap_or(false) {
            work.remove(b);
            work.remove(a);
            cancelled += 1;
            continue;
        }
        let model = CostModel::default();
        let budget = gate_cost(&pa.gate, &model) + gate_cost(&pb.gate, &model);
        let known = lex
            .get()
            .and_then(|l| l.find_equivalent(&product, &sorted))
            .filter(|p| gate_cost(&p.gate, &model) <= budget);
        let produced = match known {
            Some(p) => p,
            None => match new_gate(&pa, &pb, product, &sorted, c.radix(), &mut lex) {
                Ok(p) => p,
                Err(reason) => {
                    suppressed.push(reason);
                    blocked.insert((pa.gate.id.clone(), pb.gate.id.clone(), pa.wires.clone(), pb.wires.clone()));
                    continue;
                }
            },
        };
        events.push(MergeEvent {
            produced_token: lex.token(&produced),
            produced: produced.gate.clone(),
            sources: vec![pa.gate.id.clone(), pb.gate.id.clone()],
            source_tokens: vec![lex.token(&pa), lex.token(&pb)],
            wires: produced.wires.clone(),
        });
        work.remove(b);
        work.replace(a, produced);
    }
    Minimized { phenotype: work.build(c), action: GenotypeAction::None, events, cancelled, suppressed }
}

fn new_gate(
    pa: &Placed,
    pb: &Placed,
    matrix: ComplexMatrix,
    sorted: &[usize],
    radix: usize,
    lex: &mut Lex<'_>,
) -> std::result::Result<Placed, String> {
    let arity = sorted.len();
    let cost = match arity {
        1 => 0,
        2 => 1,
        _ => pa.gate.cost.max(pb.gate.cost),
    };
    let restriction = if pa.gate.restriction.is_any() && pb.gate.restriction.is_any() {
        WireRestriction::Any
    } else {
        WireRestriction::Exact(sorted.to_vec())
    };
    let sources = vec![pa.gate.id.clone(), pb.gate.id.clone()];
    let make = |id: String| -> Result<GateDef> {
        let mut g = GateDef::with_cost(&id, &id, radix, arity, matrix.clone(), cost)?;
        g.restriction = restriction.clone();
        g.origin = GateOrigin::Merged { sources: sources.clone() };
        Ok(g)
    };
    let gate = match lex {
        Lex::Write(l) => {
            if !l.can_register_merged() {
                return Err(format!("capacity reached: {} x {} on {:?}", pa.gate.id, pb.gate.id, sorted));
            }
            let id = format!("M{}", l.merged_count() + 1);
            let g = make(id).map_err(|e| e.to_string())?;
            l.register_merged(g, sorted).map_err(|e| e.to_string())?
        }
        _ => Arc::new(make(anonymous_id(&matrix, sorted)).map_err(|e| e.to_string())?),
    };
    Ok(Placed::new(gate, sorted.to_vec()))
}

/// Ids for unregistered merged gates, stable for equal matrices.
fn anonymous_id(m: &ComplexMatrix, wires: &[usize]) -> String {
    let mut h = DefaultHasher::new();
    wires.hash(&mut h);
    for z in m.data() {
        ((z.re * 1e9).round() as i64).hash(&mut h);
        ((z.im * 1e9).round() as i64).hash(&mut h);
    }
    format!("~{:016x}", h.finish())
}

/// Non-wire gates per block, edited in place.
struct Work {
    blocks: Vec<Vec<Option<Placed>>>,
}

type Pos = (usize, usize);

impl Work {
    fn from(c: &Circuit) -> Self {
        Self { blocks: c.to_gate_lists().into_iter().map(|b| b.into_iter().map(Some).collect()).collect() }
    }

    fn get(&self, (b, i): Pos) -> &Placed {
        self.blocks[b][i].as_ref().expect("live gate")
    }

    fn remove(&mut self, (b, i): Pos) {
        self.blocks[b][i] = None;
    }

    fn replace(&mut self, (b, i): Pos, p: Placed) {
        self.blocks[b][i] = Some(p);
    }

    /// Live gate touching `wire` in the next block that still holds a
    /// gate. Wire-only blocks act as identity and do not separate gates.
    fn next_on(&self, wire: usize, from: usize) -> Option<Pos> {
        let b = (from + 1..self.blocks.len()).find(|&b| self.blocks[b].iter().any(Option::is_some))?;
        self.blocks[b].iter().position(|p| p.as_ref().is_some_and(|p| p.touches(wire))).map(|i| (b, i))
    }

    /// First adjacent pair (in circuit order) accepted by `ok`.
    fn find_pair(&self, ok: impl Fn(&Placed, &Placed) -> bool) -> Option<(Pos, Pos)> {
        for (b, block) in self.blocks.iter().enumerate() {
            for (i, slot) in block.iter().enumerate() {
                let Some(pa) = slot else { continue };
                let Some(nb) = self.next_on(pa.wires[0], b) else { continue };
                let pb = self.get(nb);
                if pa.wires.iter().all(|&w| self.next_on(w, b) == Some(nb)) && ok(pa, pb) {
                    return Some(((b, i), nb));
                }
            }
        }
        None
    }

    fn build(self, c: &Circuit) -> Circuit {
        let wire = c
            .placements()
            .find(|p| p.gate.is_wire())
            .map(|p| p.gate.clone())
            .unwrap_or_else(|| Arc::new(wire_gate(c.radix())));
        let mut blocks: Vec<Vec<Placed>> = self
            .blocks
            .into_iter()
            .map(|b| b.into_iter().flatten().collect::<Vec<_>>())
            .collect();
        if blocks.is_empty() {
            blocks.push(Vec::new());
        }
        Circuit::new(c.n_wires(), c.radix(), blocks, &wire).expect("rewrites keep blocks disjoint")
    }
}

/// Raw cost of a circuit next to the cost of its minimized form.
pub fn costs(c: &Circuit, model: &CostModel) -> (u32, u32) {
    let raw = crate::eval::circuit_cost(c, model);
    let merged = crate::eval::circuit_cost(&minimize(c, None, LearningMode::Baldwinian).phenotype, model);
    (raw, merged)
}

/// Checks that a minimized circuit still computes the same unitary.
pub fn check_preserved(before: &Circuit, after: &Circuit, tol: Tolerance) -> Result<()> {
    if approx_equal(&before.matrix(), &after.matrix(), tol)? {
        Ok(())
    } else {
        Err(Error::Structure("minimization changed the circuit's unitary".into()))
    }
}
