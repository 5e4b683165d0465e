//! Primitive gate definitions, Boolean-to-ternary embedding, wire expansion
//! and the two-qudit cost model.
//!
//! Basis ordering is big-endian: wire 0 is the most significant digit, so the
//! state |abc⟩ of three qutrits has index `9a + 3b + c`. For controlled gates
//! the first wire of a placement is the control.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::{is_unitary, kron, ComplexMatrix, Tolerance, C64, ONE, ZERO};

/// Wires a gate may be placed on.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WireRestriction {
    #[default]
    Any,
    Wires(BTreeSet<usize>),
    /// Exactly this ordered placement.
    Exact(Vec<usize>),
}

impl WireRestriction {
    pub fn wires<I: IntoIterator<Item = usize>>(wires: I) -> Result<Self> {
        let set: BTreeSet<usize> = wires.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Config("a wire restriction must allow at least one wire".into()));
        }
        Ok(Self::Wires(set))
    }

    pub fn allows(&self, wires: &[usize]) -> bool {
        match self {
            Self::Any => true,
            Self::Wires(set) => wires.iter().all(|w| set.contains(w)),
            Self::Exact(p) => p == wires,
        }
    }

    /// Intersection of two restrictions; `None` when nothing remains.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (Self::Any, r) | (r, Self::Any) => Some(r.clone()),
            (Self::Wires(a), Self::Wires(b)) => {
                let set: BTreeSet<usize> = a.intersection(b).copied().collect();
                (!set.is_empty()).then_some(Self::Wires(set))
            }
            (Self::Exact(p), r) | (r, Self::Exact(p)) => r.allows(p).then(|| Self::Exact(p.clone())),
        }
    }

    pub fn is_any(&self) -> bool {
        matches!(self, Self::Any)
    }

    /// Highest wire named, if any.
    pub fn max_wire(&self) -> Option<usize> {
        match self {
            Self::Any => None,
            Self::Wires(set) => set.last().copied(),
            Self::Exact(p) => p.iter().max().copied(),
        }
    }
}

impl fmt::Display for WireRestriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Any => write!(f, "any"),
            Self::Wires(set) => {
                let parts: Vec<String> = set.iter().map(|w| w.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            Self::Exact(p) => {
                let parts: Vec<String> = p.iter().map(|w| w.to_string()).collect();
                write!(f, "={}", parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for WireRestriction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("any") {
            return Ok(Self::Any);
        }
        let (exact, s) = match s.strip_prefix('=') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let wires = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(format!("bad wire list {s:?}: {e}")))?;
        if exact {
            return Ok(Self::Exact(wires));
        }
        Self::wires(wires)
    }
}

/// Two-qudit gates cost one unit, single-qudit gates are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub two_wire_cost: u32,
    pub single_wire_cost: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { two_wire_cost: 1, single_wire_cost: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateOrigin {
    /// The identity fill for an otherwise unused wire.
    Wire,
    Primitive,
    /// Product of adjacent gates found by the minimizer.
    Merged { sources: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub id: String,
    pub name: String,
    pub radix: usize,
    pub arity: usize,
    pub matrix: ComplexMatrix,
    pub cost: u32,
    pub restriction: WireRestriction,
    pub origin: GateOrigin,
}

impl GateDef {
    pub fn new(id: &str, name: &str, radix: usize, arity: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_cost(id, name, radix, arity, matrix, default_cost(arity, &CostModel::default()))
    }

    pub fn with_cost(
        id: &str,
        name: &str,
        radix: usize,
        arity: usize,
        matrix: ComplexMatrix,
        cost: u32,
    ) -> Result<Self> {
        if !(radix == 2 || radix == 3) {
            return Err(Error::Gate(format!("{id}: radix {radix} is not supported")));
        }
        if arity == 0 {
            return Err(Error::Gate(format!("{id}: zero arity")));
        }
        let dim = radix.pow(arity as u32);
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Gate(format!(
                "{id}: matrix is {}x{}, expected {dim}x{dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !is_unitary(&matrix, Tolerance::default())? {
            return Err(Error::Gate(format!("{id}: matrix is not unitary")));
        }
        Ok(Self {
            id: id.to_string(),
            name: name.to_string(),
            radix,
            arity,
            matrix,
            cost,
            restriction: WireRestriction::Any,
            origin: GateOrigin::Primitive,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_wire(&self) -> bool {
        self.origin == GateOrigin::Wire
    }

    pub fn is_merged(&self) -> bool {
        matches!(self.origin, GateOrigin::Merged { .. })
    }

    /// `G·G ≈ I`.
    pub fn is_self_inverse(&self, tol: Tolerance) -> bool {
        let sq = crate::tensor::matmul(&self.matrix, &self.matrix).expect("square gate matrix");
        crate::tensor::approx_equal(&sq, &ComplexMatrix::identity(self.dim()), tol).unwrap_or(false)
    }

    fn restricted(mut self, restriction: WireRestriction) -> Self {
        self.restriction = restriction;
        self
    }
}

fn default_cost(arity: usize, model: &CostModel) -> u32 {
    match arity {
        1 => model.single_wire_cost,
        _ => model.two_wire_cost,
    }
}

/// Cost of a single gate. One- and two-wire gates follow `model`; wider gates
/// keep the cost they were declared with (macro cost of a catalog gate, or the
/// minimizer's rule for merged gates).
pub fn gate_cost(g: &GateDef, model: &CostModel) -> u32 {
    if g.is_wire() {
        return 0;
    }
    match g.arity {
        1 => model.single_wire_cost,
        2 => model.two_wire_cost,
        _ => g.cost,
    }
}

// ---------------------------------------------------------------------------
// Matrices

fn perm(p: &[usize]) -> ComplexMatrix {
    ComplexMatrix::permutation(p).expect("static permutation")
}

/// Single-qutrit permutation exchanging levels `a` and `b`.
pub fn level_swap(a: usize, b: usize) -> ComplexMatrix {
    let mut p = [0, 1, 2];
    p.swap(a, b);
    perm(&p)
}

fn hadamard() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

fn pauli_x() -> ComplexMatrix {
    perm(&[1, 0])
}

/// `Σ_v |v⟩⟨v| ⊗ (op if v == active else I)` for a control of dimension `d`.
pub fn controlled(d: usize, active: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let n = op.rows();
    let on = kron(&ComplexMatrix::ket_bra(d, active, active), op);
    let mut rest = ComplexMatrix::identity(d);
    rest.set(active, active, ZERO);
    on.add(&kron(&rest, &ComplexMatrix::identity(n))).unwrap()
}

/// Two-qudit SWAP of dimension d·d.
fn swap_matrix(d: usize) -> ComplexMatrix {
    let p: Vec<usize> = (0..d * d).map(|i| (i % d) * d + i / d).collect();
    perm(&p)
}

// ---------------------------------------------------------------------------
// Embedding and expansion

/// Lifts a qubit gate into qutrit space: it acts as `g` on Boolean basis
/// words and as the identity on every word that contains a |2⟩.
pub fn embed_boolean(g: &GateDef) -> Result<GateDef> {
    if g.radix != 2 {
        return Err(Error::Gate(format!("{}: only radix-2 gates can be embedded", g.id)));
    }
    if !is_unitary(&g.matrix, Tolerance::default())? {
        return Err(Error::Gate(format!("{}: matrix is not unitary", g.id)));
    }
    let k = g.arity;
    let dim3 = 3usize.pow(k as u32);
    let mut m = ComplexMatrix::zeros(dim3, dim3);
    let boolean: Vec<Option<usize>> = (0..dim3).map(|t| ternary_to_binary(t, k)).collect();
    for x in 0..dim3 {
        match boolean[x] {
            None => m.set(x, x, ONE),
            Some(bx) => {
                for y in 0..dim3 {
                    if let Some(by) = boolean[y] {
                        m.set(y, x, g.matrix.get(by, bx));
                    }
                }
            }
        }
    }
    let origin = if g.is_wire() { GateOrigin::Wire } else { g.origin.clone() };
    Ok(GateDef {
        id: format!("{}3", g.id),
        name: format!("{}³", g.name),
        radix: 3,
        arity: k,
        matrix: m,
        cost: g.cost,
        restriction: g.restriction.clone(),
        origin,
    })
}

/// Index of the Boolean word with the same digits as ternary index `t`, or
/// `None` when some digit is 2.
fn ternary_to_binary(mut t: usize, k: usize) -> Option<usize> {
    let mut out = 0;
    for i in 0..k {
        let d = t % 3;
        t /= 3;
        if d == 2 {
            return None;
        }
        out |= d << i;
    }
    Some(out)
}

pub(crate) fn check_placement(arity: usize, placement: &[usize], n_wires: usize) -> Result<()> {
    if placement.len() != arity {
        return Err(Error::Placement(format!(
            "{} wires given for an arity-{arity} gate",
            placement.len()
        )));
    }
    for (i, &w) in placement.iter().enumerate() {
        if w >= n_wires {
            return Err(Error::Placement(format!("wire {w} out of range for {n_wires} wires")));
        }
        if placement[..i].contains(&w) {
            return Err(Error::Placement(format!("wire {w} repeated in {placement:?}")));
        }
    }
    Ok(())
}

/// Matrix of `g` acting on `placement` inside an `n_wires` circuit, identity
/// on the other wires. Equivalent to summing `|u⟩⟨u| ⊗ g` over the basis
/// states `u` of the untouched wires, with the tensor factors permuted into
/// place.
pub fn expand_to_circuit_width(g: &GateDef, placement: &[usize], n_wires: usize) -> Result<ComplexMatrix> {
    check_placement(g.arity, placement, n_wires)?;
    Ok(expand_matrix(&g.matrix, g.radix, placement, n_wires))
}

pub(crate) fn expand_matrix(m: &ComplexMatrix, radix: usize, placement: &[usize], n_wires: usize) -> ComplexMatrix {
    let dim = radix.pow(n_wires as u32);
    let strides: Vec<usize> = placement.iter().map(|&w| radix.pow((n_wires - 1 - w) as u32)).collect();
    let local_dim = m.rows();
    let offsets = local_offsets(radix, &strides);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        // digits of x on the placed wires, in placement order
        let mut lx = 0;
        for &s in &strides {
            lx = lx * radix + (x / s) % radix;
        }
        let base = x - offsets[lx];
        for ly in 0..local_dim {
            let v = m.get(ly, lx);
            if v != ZERO {
                out.set(base + offsets[ly], x, v);
            }
        }
    }
    out
}

/// Global index offset of every local basis word, for the given wire strides.
pub(crate) fn local_offsets(radix: usize, strides: &[usize]) -> Vec<usize> {
    let k = strides.len();
    let n = radix.pow(k as u32);
    (0..n)
        .map(|l| {
            let mut rem = l;
            let mut off = 0;
            for i in (0..k).rev() {
                off += (rem % radix) * strides[i];
                rem /= radix;
            }
            off
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Catalog

fn gate(id: &str, name: &str, radix: usize, arity: usize, m: ComplexMatrix) -> GateDef {
    GateDef::new(id, name, radix, arity, m).expect("builtin gate")
}

fn macro_gate(id: &str, name: &str, radix: usize, arity: usize, m: ComplexMatrix, cost: u32) -> GateDef {
    GateDef::with_cost(id, name, radix, arity, m, cost).expect("builtin gate")
}

/// The identity fill gate for one wire.
pub fn wire_gate(radix: usize) -> GateDef {
    let id = if radix == 3 { "WIRE" } else { "WIRE2" };
    let mut g = gate(id, "Wire", radix, 1, ComplexMatrix::identity(radix));
    g.origin = GateOrigin::Wire;
    g
}

/// Every built-in gate, qubit gates first, then the ternary set.
///
/// Three-wire Boolean gates carry their best known two-qubit-gate cost
/// (Toffoli 5, Fredkin 7, Miller 9).
pub fn builtin_catalog() -> Vec<GateDef> {
    let x = gate("X", "X", 2, 1, pauli_x());
    let z = gate("Z", "Z", 2, 1, pauli_z());
    let h = gate("H", "Hadamard", 2, 1, hadamard());
    let cnot = gate("CNOT", "CNOT", 2, 2, controlled(2, 1, &pauli_x()));
    let cz = gate("CZ", "Controlled-Z", 2, 2, controlled(2, 1, &pauli_z()));
    let ch = gate("CH", "Controlled-H", 2, 2, controlled(2, 1, &hadamard()));
    let swap = gate("SWAP", "SWAP", 2, 2, swap_matrix(2));
    let toffoli = macro_gate("TOFFOLI", "Toffoli", 2, 3, controlled(2, 1, &cnot.matrix), 5);
    let fredkin = macro_gate("FREDKIN", "Fredkin", 2, 3, controlled(2, 1, &swap.matrix), 7);
    // |001⟩ ↔ |110⟩, all other words fixed.
    let miller = macro_gate("MILLER", "Miller", 2, 3, perm(&[0, 6, 2, 3, 4, 5, 1, 7]), 9);

    let embed = |g: &GateDef| embed_boolean(g).expect("builtin embedding");

    let p02 = gate("P02", "[0-2]", 3, 1, level_swap(0, 2));
    let p12 = gate("P12", "[1-2]", 3, 1, level_swap(1, 2));
    let p01 = gate("P01", "[0-1]", 3, 1, level_swap(0, 1));

    // S3: full two-qutrit exchange |ab⟩ → |ba⟩.
    let s3 = swap_matrix(3);
    // SW12: exchanges |12⟩ and |21⟩ only; the Boolean-restricted swap of the
    // shifted target pair.
    let mut sw12_perm: Vec<usize> = (0..9).collect();
    sw12_perm.swap(5, 7);
    let sw12 = perm(&sw12_perm);
    // Middle (control = |1⟩) block is unconstrained; the identity keeps it unitary.
    let cs12 = {
        let mut m = ComplexMatrix::identity(27);
        for r in 0..9 {
            for c in 0..9 {
                m.set(18 + r, 18 + c, sw12.get(r, c));
            }
        }
        m
    };
    // (|0⟩⟨0| + |2⟩⟨2|) ⊗ I3 + |1⟩⟨1| ⊗ X with X the
    // embedded NOT, i.e. [0-1].
    let c1x3 = controlled(3, 1, &level_swap(0, 1));

    let mut swap3 = embed(&swap);
    swap3.name = "SWAP³".into();

    vec![
        wire_gate(2),
        x,
        z.clone(),
        h.clone(),
        cnot.clone(),
        cz.clone(),
        ch.clone(),
        swap,
        toffoli.clone(),
        fredkin.clone(),
        miller.clone(),
        wire_gate(3),
        p02,
        p12,
        p01,
        embed(&h),
        embed(&z),
        embed(&cnot),
        embed(&cz),
        embed(&ch),
        gate("C1X3", "C1X³", 3, 2, c1x3),
        swap3,
        // Multi-valued controlled permutations fire on control |2⟩.
        gate("CP02", "Controlled-[0-2]", 3, 2, controlled(3, 2, &level_swap(0, 2))),
        gate("CP01", "Controlled-[0-1]", 3, 2, controlled(3, 2, &level_swap(0, 1))),
        gate("C1P12", "C1-[1-2]", 3, 2, controlled(3, 1, &level_swap(1, 2))),
        gate("S3", "S3", 3, 2, s3.clone()),
        macro_gate("CS12", "CS12", 3, 3, cs12, 5),
        macro_gate("C2S3", "Controlled-S3", 3, 3, controlled(3, 2, &s3), 5),
        embed(&toffoli),
        embed(&fredkin),
        embed(&miller),
    ]
}

/// Immutable, id-indexed gate collection with per-gate wire restrictions.
#[derive(Debug, Clone)]
pub struct Catalog {
    gates: Vec<Arc<GateDef>>,
    by_id: HashMap<String, usize>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::from_gates(builtin_catalog()).expect("builtin catalog is consistent")
    }

    pub fn from_gates(gates: Vec<GateDef>) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (i, g) in gates.iter().enumerate() {
            if by_id.insert(g.id.clone(), i).is_some() {
                return Err(Error::Gate(format!("duplicate gate id {}", g.id)));
            }
        }
        Ok(Self { gates: gates.into_iter().map(Arc::new).collect(), by_id })
    }

    pub fn get(&self, id: &str) -> Option<&Arc<GateDef>> {
        self.by_id.get(id).map(|&i| &self.gates[i])
    }

    pub fn require(&self, id: &str) -> Result<&Arc<GateDef>> {
        self.get(id).ok_or_else(|| Error::Gate(format!("unknown gate {id:?}")))
    }

    pub fn gates(&self) -> &[Arc<GateDef>] {
        &self.gates
    }

    pub fn of_radix(&self, radix: usize) -> impl Iterator<Item = &Arc<GateDef>> {
        self.gates.iter().filter(move |g| g.radix == radix)
    }

    /// The identity fill gate for `radix`.
    pub fn wire(&self, radix: usize) -> Result<&Arc<GateDef>> {
        self.of_radix(radix)
            .find(|g| g.is_wire())
            .ok_or_else(|| Error::Gate(format!("no wire gate for radix {radix}")))
    }

    /// A copy with `id` confined to `restriction`.
    pub fn with_restriction(&self, id: &str, restriction: WireRestriction) -> Result<Self> {
        let idx = *self.by_id.get(id).ok_or_else(|| Error::Gate(format!("unknown gate {id:?}")))?;
        let mut out = self.clone();
        out.gates[idx] = Arc::new((*self.gates[idx]).clone().restricted(restriction));
        Ok(out)
    }

    /// One line per gate: id, name, arity, radix, cost, restriction.
    pub fn listing(&self) -> String {
        let mut s = String::from("id\tname\tarity\tradix\tcost\trestriction\n");
        for g in &self.gates {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                g.id,
                g.name,
                g.arity,
                g.radix,
                gate_cost(g, &CostModel::default()),
                g.restriction
            ));
        }
        s
    }
}

/// Amplitude vector of basis state `index` in dimension `dim`.
pub fn basis_state(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}
