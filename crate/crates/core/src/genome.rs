//! Genome strings: 3-character gate tokens grouped into `p`-delimited blocks.
//!
//! A genome such as `p!!!#!!pp$!!p` holds two blocks. Consecutive delimiters
//! are just a boundary, so `pp` on its own is the identity circuit. Wires a
//! block does not mention are filled with the Wire gate when decoding.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, Placed};
use crate::error::{Error, Result};
use crate::gates::{expand_matrix, Catalog, GateDef};
use crate::tensor::{approx_equal, ComplexMatrix, Tolerance};

pub const DELIMITER: char = 'p';
pub const TOKEN_LEN: usize = 3;

/// Printable ASCII without the delimiter: 93 symbols.
const ALPHABET: &[u8] = b"!\"#$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_`abcdefghijklmnoqrstuvwxyz{|}~";

fn token_of(index: usize) -> Option<String> {
    let n = ALPHABET.len();
    if index >= n * n * n {
        return None;
    }
    // first character varies fastest: 0 → "!!!", 1 → "\"!!", 2 → "#!!"
    let chars = [index % n, (index / n) % n, index / (n * n)];
    Some(chars.iter().map(|&c| ALPHABET[c] as char).collect())
}

fn index_of_token(token: &str) -> Option<usize> {
    let n = ALPHABET.len();
    let b = token.as_bytes();
    if b.len() != TOKEN_LEN {
        return None;
    }
    let mut idx = 0;
    for &c in b.iter().rev() {
        let d = ALPHABET.iter().position(|&a| a == c)?;
        idx = idx * n + d;
    }
    Some(idx)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Genome {
    text: String,
    n_wires: usize,
    radix: usize,
}

impl Genome {
    pub fn new(text: impl Into<String>, n_wires: usize, radix: usize) -> Result<Self> {
        let text = text.into();
        check_grammar(&text)?;
        Ok(Self { text, n_wires, radix })
    }

    pub(crate) fn from_segments<S: AsRef<str>>(segments: &[S], n_wires: usize, radix: usize) -> Self {
        let mut text = String::new();
        for s in segments {
            text.push(DELIMITER);
            text.push_str(s.as_ref());
            text.push(DELIMITER);
        }
        if text.is_empty() {
            text.push_str("pp");
        }
        Self { text, n_wires, radix }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    /// Non-empty token runs between delimiters, i.e. the blocks.
    pub fn segments(&self) -> Vec<&str> {
        self.text.split(DELIMITER).filter(|s| !s.is_empty()).collect()
    }

    pub fn block_count(&self) -> usize {
        self.segments().len()
    }

    /// Tokens per block.
    pub fn block_shape(&self) -> Vec<usize> {
        self.segments().iter().map(|s| s.len() / TOKEN_LEN).collect()
    }

    /// Every token with its byte offset in the text.
    pub fn tokens(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for run in self.text.split(DELIMITER) {
            for i in (0..run.len()).step_by(TOKEN_LEN) {
                out.push((offset + i, &run[i..i + TOKEN_LEN]));
            }
            offset += run.len() + 1;
        }
        out
    }

    /// Parses `wires=<n> radix=<r> <text>`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let mut field = |key: &str| -> Result<usize> {
            let tok = parts.next().ok_or_else(|| Error::Grammar(format!("missing {key}=")))?;
            tok.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Grammar(format!("expected {key}=<n>, found {tok:?}")))
        };
        let n_wires = field("wires")?;
        let radix = field("radix")?;
        let text = parts.next().ok_or_else(|| Error::Grammar("missing genome text".into()))?;
        if parts.next().is_some() {
            return Err(Error::Grammar("trailing data after genome".into()));
        }
        Self::new(text, n_wires, radix)
    }

    /// Reads one genome per non-empty, non-comment line.
    pub fn parse_file(text: &str) -> Result<Vec<Self>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(Self::parse_line)
            .collect()
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wires={} radix={} {}", self.n_wires, self.radix, self.text)
    }
}

fn check_grammar(text: &str) -> Result<()> {
    if text.len() < 2 || !text.starts_with(DELIMITER) || !text.ends_with(DELIMITER) {
        return Err(Error::Grammar(format!("{text:?} must start and end with 'p'")));
    }
    let mut offset = 0;
    for run in text.split(DELIMITER) {
        if let Some(bad) = run.bytes().position(|b| !ALPHABET.contains(&b)) {
            return Err(Error::Grammar(format!("invalid character at offset {}", offset + bad)));
        }
        if run.len() % TOKEN_LEN != 0 {
            return Err(Error::Grammar(format!(
                "block at offset {offset} has {} characters, not a multiple of {TOKEN_LEN}",
                run.len()
            )));
        }
        offset += run.len() + 1;
    }
    Ok(())
}

/// Rounded matrix entries, used to recognise known gates among products.
#[derive(Clone, PartialEq, Eq, Hash)]
struct MatrixKey(Vec<i64>);

impl MatrixKey {
    fn of(m: &ComplexMatrix) -> Self {
        let q = |x: f64| {
            let v = (x * 1e6).round() as i64;
            if v == 0 { 0 } else { v }
        };
        Self(m.data().iter().flat_map(|z| [q(z.re), q(z.im)]).collect())
    }
}

/// Bijection between tokens and (gate, placement) pairs for one circuit
/// width and radix. Starts from every catalog gate on every ordered
/// placement; merged gates and extra placements are appended later, so an
/// existing token never changes meaning.
#[derive(Clone)]
pub struct GateLexicon {
    n_wires: usize,
    radix: usize,
    gates: Vec<Arc<GateDef>>,
    gate_index: HashMap<String, usize>,
    entries: Vec<(usize, Vec<usize>)>,
    by_entry: HashMap<(usize, Vec<usize>), usize>,
    by_matrix: HashMap<MatrixKey, Vec<(usize, Vec<usize>)>>,
    merged: usize,
    merge_capacity: Option<usize>,
    first_entry: HashMap<usize, usize>,
}

impl GateLexicon {
    pub fn new(catalog: &Catalog, n_wires: usize, radix: usize) -> Result<Self> {
        let mut lex = Self {
            n_wires,
            radix,
            gates: Vec::new(),
            gate_index: HashMap::new(),
            entries: Vec::new(),
            by_entry: HashMap::new(),
            by_matrix: HashMap::new(),
            merged: 0,
            merge_capacity: None,
            first_entry: HashMap::new(),
        };
        catalog.wire(radix)?;
        for g in catalog.of_radix(radix).filter(|g| g.arity <= n_wires) {
            let gi = lex.add_gate(g.clone())?;
            for placement in ordered_placements(n_wires, g.arity) {
                lex.push_entry(gi, placement)?;
            }
        }
        Ok(lex)
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn gates(&self) -> &[Arc<GateDef>] {
        &self.gates
    }

    pub fn gate(&self, id: &str) -> Option<&Arc<GateDef>> {
        self.gate_index.get(id).map(|&i| &self.gates[i])
    }

    pub fn wire(&self) -> &Arc<GateDef> {
        self.gates.iter().find(|g| g.is_wire()).expect("lexicon holds a wire gate")
    }

    /// Number of merged gates registered so far.
    pub fn merged_count(&self) -> usize {
        self.merged
    }

    /// Caps how many merged gates may be registered; `None` is unbounded.
    pub fn set_merge_capacity(&mut self, cap: Option<usize>) {
        self.merge_capacity = cap;
    }

    pub fn can_register_merged(&self) -> bool {
        self.merge_capacity.is_none_or(|cap| self.merged < cap)
    }

    /// Registered merged gates, oldest first.
    pub fn merged_gates(&self) -> impl Iterator<Item = &Arc<GateDef>> {
        self.gates.iter().filter(|g| g.is_merged())
    }

    pub fn lookup(&self, token: &str) -> Option<(&Arc<GateDef>, &[usize])> {
        let idx = index_of_token(token)?;
        let (gi, wires) = self.entries.get(idx)?;
        Some((&self.gates[*gi], wires))
    }

    pub fn token_for(&self, gate_id: &str, wires: &[usize]) -> Option<String> {
        let gi = *self.gate_index.get(gate_id)?;
        let idx = *self.by_entry.get(&(gi, wires.to_vec()))?;
        token_of(idx)
    }

    /// The gate's first registered token; names the gate as a whole.
    pub fn canonical_token(&self, gate_id: &str) -> Option<String> {
        let gi = self.gate_index.get(gate_id)?;
        token_of(*self.first_entry.get(gi)?)
    }

    /// Token for `gate` on `wires`, appending a new entry when the gate is
    /// known but this placement has not been used yet.
    pub fn register_placement(&mut self, gate_id: &str, wires: &[usize]) -> Result<String> {
        if let Some(t) = self.token_for(gate_id, wires) {
            return Ok(t);
        }
        let gi = *self
            .gate_index
            .get(gate_id)
            .ok_or_else(|| Error::Encoding(format!("gate {gate_id:?} is not registered")))?;
        crate::gates::check_placement(self.gates[gi].arity, wires, self.n_wires)?;
        let idx = self.push_entry(gi, wires.to_vec())?;
        Ok(token_of(idx).expect("pushed index has a token"))
    }

    /// Adds a merged gate. Its canonical placement (ascending wires) is
    /// registered immediately.
    pub fn register_merged(&mut self, gate: GateDef, wires: &[usize]) -> Result<Arc<GateDef>> {
        if self.gate_index.contains_key(&gate.id) {
            return Err(Error::Encoding(format!("gate id {} already registered", gate.id)));
        }
        let gate = Arc::new(gate);
        let gi = self.add_gate(gate.clone())?;
        self.merged += 1;
        self.push_entry(gi, wires.to_vec())?;
        Ok(gate)
    }

    /// A registered gate and placement on exactly `wires` (as a set) whose
    /// matrix equals `local`, where `local` is expressed with the wires in
    /// ascending order.
    pub fn find_equivalent(&self, local: &ComplexMatrix, sorted_wires: &[usize]) -> Option<Placed> {
        let candidates = self.by_matrix.get(&MatrixKey::of(local))?;
        for (gi, perm) in candidates {
            let g = &self.gates[*gi];
            let wires: Vec<usize> = perm.iter().map(|&i| sorted_wires[i]).collect();
            if !g.restriction.allows(&wires) {
                continue;
            }
            let m = expand_matrix(&g.matrix, self.radix, perm, perm.len());
            if approx_equal(&m, local, Tolerance::default()).unwrap_or(false) {
                return Some(Placed::new(g.clone(), wires));
            }
        }
        None
    }

    fn add_gate(&mut self, g: Arc<GateDef>) -> Result<usize> {
        if g.radix != self.radix {
            return Err(Error::Gate(format!("{} has the wrong radix for this lexicon", g.id)));
        }
        let gi = self.gates.len();
        self.gate_index.insert(g.id.clone(), gi);
        if !g.is_wire() {
            for perm in ordered_placements(g.arity, g.arity) {
                let m = expand_matrix(&g.matrix, self.radix, &perm, g.arity);
                self.by_matrix.entry(MatrixKey::of(&m)).or_default().push((gi, perm));
            }
        }
        self.gates.push(g);
        Ok(gi)
    }

    fn push_entry(&mut self, gi: usize, wires: Vec<usize>) -> Result<usize> {
        let idx = self.entries.len();
        if token_of(idx).is_none() {
            return Err(Error::Encoding("token space exhausted".into()));
        }
        self.by_entry.insert((gi, wires.clone()), idx);
        self.first_entry.entry(gi).or_insert(idx);
        self.entries.push((gi, wires));
        Ok(idx)
    }
}

impl fmt::Debug for GateLexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GateLexicon {{ wires: {}, radix: {}, gates: {}, tokens: {} }}",
            self.n_wires,
            self.radix,
            self.gates.len(),
            self.entries.len()
        )
    }
}

/// All ordered selections of `k` distinct wires out of `n`, lexicographic.
pub fn ordered_placements(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for w in 0..n {
            if !cur.contains(&w) {
                cur.push(w);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

pub fn decode(g: &Genome, lex: &GateLexicon) -> Result<Circuit> {
    if g.n_wires != lex.n_wires || g.radix != lex.radix {
        return Err(Error::Structure(format!(
            "genome spans {} radix-{} wires but the lexicon is for {} radix-{} wires",
            g.n_wires, g.radix, lex.n_wires, lex.radix
        )));
    }
    let mut blocks = Vec::new();
    let mut offset = 0;
    for run in g.text.split(DELIMITER) {
        if !run.is_empty() {
            let mut gates = Vec::with_capacity(run.len() / TOKEN_LEN);
            for i in (0..run.len()).step_by(TOKEN_LEN) {
                let tok = &run[i..i + TOKEN_LEN];
                let (gate, wires) = lex
                    .lookup(tok)
                    .ok_or_else(|| Error::UnknownToken { token: tok.to_string(), offset: offset + i })?;
                gates.push(Placed::new(gate.clone(), wires.to_vec()));
            }
            blocks.push(gates);
        }
        offset += run.len() + 1;
    }
    if blocks.is_empty() {
        blocks.push(Vec::new());
    }
    Circuit::new(g.n_wires, g.radix, blocks, lex.wire())
}

/// Canonical genome: every placement, wire fills included, in lowest-wire
/// order.
pub fn encode(c: &Circuit, lex: &GateLexicon) -> Result<Genome> {
    if c.n_wires() != lex.n_wires || c.radix() != lex.radix {
        return Err(Error::Encoding("circuit and lexicon widths differ".into()));
    }
    let mut segments = Vec::with_capacity(c.blocks().len());
    for block in c.blocks() {
        let mut s = String::new();
        for p in block.placements() {
            let tok = lex.token_for(&p.gate.id, &p.wires).ok_or_else(|| {
                Error::Encoding(format!("{} on {:?} has no token", p.gate.id, p.wires))
            })?;
            s.push_str(&tok);
        }
        segments.push(s);
    }
    Ok(Genome::from_segments(&segments, c.n_wires(), c.radix()))
}

/// Like [`encode`] but registers missing placements of known gates.
pub fn encode_registering(c: &Circuit, lex: &mut GateLexicon) -> Result<Genome> {
    for p in c.placements() {
        lex.register_placement(&p.gate.id, &p.wires)?;
    }
    encode(c, lex)
}

/// Every placement sits on wires its gate is allowed on. The catalog entry
/// wins over the restriction carried by the placed gate itself.
pub fn validate_restrictions(c: &Circuit, catalog: &Catalog) -> bool {
    c.placements().all(|p| {
        let restriction = catalog.get(&p.gate.id).map(|g| &g.restriction).unwrap_or(&p.gate.restriction);
        restriction.allows(&p.wires)
    })
}

/// The gates random circuits and mutations draw from, expanded to every
/// placement their restrictions admit.
#[derive(Clone, Debug)]
pub struct GatePool {
    gates: Vec<Arc<GateDef>>,
    admissible: Vec<Placed>,
}

impl GatePool {
    pub fn new(gates: Vec<Arc<GateDef>>, n_wires: usize) -> Self {
        let admissible = gates
            .iter()
            .filter(|g| g.arity <= n_wires)
            .flat_map(|g| {
                ordered_placements(n_wires, g.arity)
                    .into_iter()
                    .filter(|w| g.restriction.allows(w))
                    .map(|w| Placed::new(g.clone(), w))
            })
            .collect();
        Self { gates, admissible }
    }

    /// Resolves gate ids against a catalog (restrictions come from there).
    pub fn from_ids(catalog: &Catalog, ids: &[&str], n_wires: usize) -> Result<Self> {
        let gates = ids.iter().map(|id| catalog.require(id).cloned()).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(gates, n_wires))
    }

    pub fn gates(&self) -> &[Arc<GateDef>] {
        &self.gates
    }

    pub fn admissible(&self) -> &[Placed] {
        &self.admissible
    }

    /// Admissible placements lying inside `free` and covering `must`.
    pub fn fitting<'a>(&'a self, free: &'a [bool], must: usize) -> impl Iterator<Item = &'a Placed> + 'a {
        self.admissible
            .iter()
            .filter(move |p| p.touches(must) && p.wires.iter().all(|&w| free[w]))
    }

    /// Fills every `free` wire with randomly chosen admissible placements.
    pub fn fill<R: Rng + ?Sized>(&self, free: &mut [bool], rng: &mut R) -> Result<Vec<Placed>> {
        let mut out = Vec::new();
        while let Some(w) = free.iter().position(|&f| f) {
            let choices: Vec<&Placed> = self.fitting(free, w).collect();
            let pick = (*choices
                .choose(rng)
                .ok_or_else(|| Error::Generation(format!("no admissible gate can occupy wire {w}")))?)
            .clone();
            for &x in &pick.wires {
                free[x] = false;
            }
            out.push(pick);
        }
        Ok(out)
    }

    pub fn random_block<R: Rng + ?Sized>(&self, n_wires: usize, rng: &mut R) -> Result<Vec<Placed>> {
        self.fill(&mut vec![true; n_wires], rng)
    }
}

/// A random genome whose block count is drawn uniformly from
/// `block_count_range`.
pub fn random_genome<R: Rng + ?Sized>(
    lex: &GateLexicon,
    pool: &GatePool,
    block_count_range: RangeInclusive<usize>,
    rng: &mut R,
) -> Result<Genome> {
    if block_count_range.is_empty() || *block_count_range.start() == 0 {
        return Err(Error::Generation(format!("bad block count range {block_count_range:?}")));
    }
    let n = rng.gen_range(block_count_range);
    let blocks = (0..n).map(|_| pool.random_block(lex.n_wires, rng)).collect::<Result<Vec<_>>>()?;
    let circuit = Circuit::new(lex.n_wires, lex.radix, blocks, lex.wire())?;
    encode(&circuit, lex)
}
