//! Circuits as serial blocks of parallel gates.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gates::{check_placement, expand_matrix, local_offsets, GateDef};
use crate::tensor::{matmul, ComplexMatrix, C64, ZERO};

/// A gate placed on an ordered list of wires (control first).
#[derive(Clone)]
pub struct Placed {
    pub gate: Arc<GateDef>,
    pub wires: Vec<usize>,
}

impl Placed {
    pub fn new(gate: Arc<GateDef>, wires: Vec<usize>) -> Self {
        Self { gate, wires }
    }

    pub fn min_wire(&self) -> usize {
        *self.wires.iter().min().expect("placement has wires")
    }

    /// Same wires regardless of order.
    pub fn same_wire_set(&self, other: &Placed) -> bool {
        self.wires.len() == other.wires.len() && self.wires.iter().all(|w| other.wires.contains(w))
    }

    pub fn touches(&self, wire: usize) -> bool {
        self.wires.contains(&wire)
    }
}

impl PartialEq for Placed {
    fn eq(&self, other: &Self) -> bool {
        self.gate.id == other.gate.id && self.wires == other.wires
    }
}

impl fmt::Debug for Placed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.gate.id, self.wires)
    }
}

/// One layer of the circuit. Inside a [`Circuit`] every wire is covered by
/// exactly one placement, uncovered wires carrying the Wire gate.
#[derive(Clone, PartialEq, Debug)]
pub struct Block {
    placements: Vec<Placed>,
}

impl Block {
    pub fn placements(&self) -> &[Placed] {
        &self.placements
    }

    /// Placements that are not identity fills.
    pub fn gates(&self) -> impl Iterator<Item = &Placed> {
        self.placements.iter().filter(|p| !p.gate.is_wire())
    }

    pub fn is_identity(&self) -> bool {
        self.placements.iter().all(|p| p.gate.is_wire())
    }

    /// Placement covering `wire`.
    pub fn on_wire(&self, wire: usize) -> Option<&Placed> {
        self.placements.iter().find(|p| p.touches(wire))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Circuit {
    n_wires: usize,
    radix: usize,
    blocks: Vec<Block>,
}

impl Circuit {
    /// Builds a circuit from raw gate lists. Each block's gates must cover
    /// disjoint wires; the remaining wires are filled with `wire`, and
    /// placements are ordered by their lowest wire.
    pub fn new(n_wires: usize, radix: usize, blocks: Vec<Vec<Placed>>, wire: &Arc<GateDef>) -> Result<Self> {
        if n_wires == 0 {
            return Err(Error::Structure("circuit needs at least one wire".into()));
        }
        if !wire.is_wire() || wire.radix != radix {
            return Err(Error::Structure(format!("{} is not a radix-{radix} wire gate", wire.id)));
        }
        let blocks = blocks
            .into_iter()
            .map(|b| normalize_block(n_wires, radix, b, wire))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_wires, radix, blocks })
    }

    pub fn identity(n_wires: usize, radix: usize, wire: &Arc<GateDef>) -> Result<Self> {
        Self::new(n_wires, radix, vec![vec![]], wire)
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn dim(&self) -> usize {
        self.radix.pow(self.n_wires as u32)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Non-wire placements in circuit order.
    pub fn gates(&self) -> impl Iterator<Item = &Placed> {
        self.blocks.iter().flat_map(|b| b.gates())
    }

    /// Every placement, wires included, in circuit order.
    pub fn placements(&self) -> impl Iterator<Item = &Placed> {
        self.blocks.iter().flat_map(|b| b.placements.iter())
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    /// Flattens to per-block gate lists without the wire fills.
    pub fn to_gate_lists(&self) -> Vec<Vec<Placed>> {
        self.blocks.iter().map(|b| b.gates().cloned().collect()).collect()
    }

    /// Unitary of the whole circuit; the first block acts first.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(self.dim());
        for block in &self.blocks {
            for p in block.gates() {
                let g = expand_matrix(&p.gate.matrix, self.radix, &p.wires, self.n_wires);
                acc = matmul(&g, &acc).expect("square matrices of equal size");
            }
        }
        acc
    }

    /// Evolves a state vector through the circuit.
    pub fn apply(&self, state: &mut [C64]) {
        assert_eq!(state.len(), self.dim(), "state dimension");
        let mut scratch = Vec::new();
        for p in self.gates() {
            GateKernel::new(p, self.radix, self.n_wires).apply(state, &mut scratch);
        }
    }
}

fn normalize_block(n_wires: usize, radix: usize, mut gates: Vec<Placed>, wire: &Arc<GateDef>) -> Result<Block> {
    let mut covered = vec![false; n_wires];
    for p in &gates {
        if p.gate.radix != radix {
            return Err(Error::Structure(format!(
                "{} has radix {} in a radix-{radix} circuit",
                p.gate.id, p.gate.radix
            )));
        }
        check_placement(p.gate.arity, &p.wires, n_wires)?;
        for &w in &p.wires {
            if covered[w] {
                return Err(Error::Structure(format!("wire {w} used twice in one block")));
            }
            covered[w] = true;
        }
    }
    for (w, c) in covered.iter().enumerate() {
        if !c {
            gates.push(Placed::new(wire.clone(), vec![w]));
        }
    }
    gates.sort_by_key(|p| p.min_wire());
    Ok(Block { placements: gates })
}

/// A placed gate prepared for repeated application to state vectors.
pub(crate) struct GateKernel<'a> {
    matrix: &'a ComplexMatrix,
    bases: Vec<usize>,
    offsets: Vec<usize>,
}

impl<'a> GateKernel<'a> {
    pub(crate) fn new(p: &'a Placed, radix: usize, n_wires: usize) -> Self {
        let strides: Vec<usize> = p.wires.iter().map(|&w| radix.pow((n_wires - 1 - w) as u32)).collect();
        let offsets = local_offsets(radix, &strides);
        let dim = radix.pow(n_wires as u32);
        // a base index has a zero digit on every placed wire
        let bases = (0..dim).filter(|&b| strides.iter().all(|&s| (b / s) % radix == 0)).collect();
        Self { matrix: &p.gate.matrix, bases, offsets }
    }

    pub(crate) fn apply(&self, state: &mut [C64], scratch: &mut Vec<C64>) {
        let local = self.offsets.len();
        scratch.resize(2 * local, ZERO);
        let (inp, out) = scratch.split_at_mut(local);
        for &base in &self.bases {
            for (l, &off) in self.offsets.iter().enumerate() {
                inp[l] = state[base + off];
            }
            if inp.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o = self.matrix.row(r).iter().zip(inp.iter()).map(|(a, b)| a * b).sum();
            }
            for (l, &off) in self.offsets.iter().enumerate() {
                state[base + off] = out[l];
            }
        }
    }
}

impl Circuit {
    /// Evolves several state vectors at once (each gate is prepared once).
    pub fn apply_many(&self, states: &mut [Vec<C64>]) {
        let mut scratch = Vec::new();
        for p in self.gates() {
            let k = GateKernel::new(p, self.radix, self.n_wires);
            for s in states.iter_mut() {
                assert_eq!(s.len(), self.dim(), "state dimension");
                k.apply(s, &mut scratch);
            }
        }
    }
}

/// Digits of basis index `index`, wire 0 first.
pub fn digits(mut index: usize, radix: usize, n_wires: usize) -> Vec<u8> {
    let mut d = vec![0u8; n_wires];
    for slot in d.iter_mut().rev() {
        *slot = (index % radix) as u8;
        index /= radix;
    }
    d
}

/// Basis index of a digit word, wire 0 first.
pub fn index_of(word: &[u8], radix: usize) -> usize {
    word.iter().fold(0, |acc, &d| acc * radix + d as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{basis_state, Catalog};
    use crate::tensor::{approx_equal, Tolerance};

    fn placed(c: &Catalog, id: &str, wires: &[usize]) -> Placed {
        Placed::new(c.get(id).unwrap().clone(), wires.to_vec())
    }

    #[test]
    fn wire_fill_and_ordering() {
        let c = Catalog::builtin();
        let wire = c.wire(3).unwrap();
        let circ = Circuit::new(3, 3, vec![vec![placed(&c, "H3", &[2]), placed(&c, "CNOT3", &[1, 0])]], wire).unwrap();
        let ids: Vec<&str> = circ.blocks()[0].placements().iter().map(|p| p.gate.id.as_str()).collect();
        assert_eq!(ids, vec!["CNOT3", "H3"]);
        let circ = Circuit::new(3, 3, vec![vec![placed(&c, "H3", &[1])]], wire).unwrap();
        let ids: Vec<&str> = circ.blocks()[0].placements().iter().map(|p| p.gate.id.as_str()).collect();
        assert_eq!(ids, vec!["WIRE", "H3", "WIRE"]);
    }

    #[test]
    fn overlapping_or_wrong_radix_rejected() {
        let c = Catalog::builtin();
        let wire = c.wire(3).unwrap();
        let overlap = vec![vec![placed(&c, "H3", &[1]), placed(&c, "CNOT3", &[1, 0])]];
        assert!(matches!(Circuit::new(3, 3, overlap, wire), Err(Error::Structure(_))));
        let radix2 = vec![vec![placed(&c, "H", &[0])]];
        assert!(Circuit::new(3, 3, radix2, wire).is_err());
    }

    #[test]
    fn state_evolution_matches_matrix_columns() {
        let c = Catalog::builtin();
        let wire = c.wire(3).unwrap();
        let circ = Circuit::new(
            3,
            3,
            vec![
                vec![placed(&c, "H3", &[2]), placed(&c, "CH3", &[1, 0])],
                vec![placed(&c, "CZ3", &[2, 0]), placed(&c, "P12", &[1])],
                vec![placed(&c, "CP02", &[0, 2])],
            ],
            wire,
        )
        .unwrap();
        let m = circ.matrix();
        for x in 0..27 {
            let mut s = basis_state(27, x);
            circ.apply(&mut s);
            let col = m.column(x);
            for (a, b) in s.iter().zip(&col) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!(crate::tensor::is_unitary(&m, Tolerance::default()).unwrap());
        let id = Circuit::identity(3, 3, wire).unwrap();
        assert!(approx_equal(&id.matrix(), &ComplexMatrix::identity(27), Tolerance::default()).unwrap());
    }

    #[test]
    fn digit_helpers() {
        assert_eq!(digits(5, 3, 3), vec![0, 1, 2]);
        assert_eq!(index_of(&[0, 1, 2], 3), 5);
        assert_eq!(digits(6, 2, 3), vec![1, 1, 0]);
    }
}
