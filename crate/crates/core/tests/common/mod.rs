#![allow(dead_code)]

use eqls_core::engine::config::DEFAULT_TERNARY_GATES;
use eqls_core::{Catalog, Circuit, ComplexMatrix, GatePool, C64};
use rand::Rng;

pub type Dense = Vec<Vec<C64>>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn digit(index: usize, wire: usize, n: usize, radix: usize) -> usize {
    index / radix.pow((n - 1 - wire) as u32) % radix
}

/// Circuit matrix by direct enumeration: each block's entry ⟨y|B|x⟩ is the
/// product over its placements of the gate entry picked out by the digits
/// of `y` and `x` on the placement's wires (first wire most significant).
pub fn oracle_matrix(circ: &Circuit) -> Dense {
    let (n, r) = (circ.n_wires(), circ.radix());
    let dim = r.pow(n as u32);
    let mut total = identity(dim);
    for block in circ.blocks() {
        let mut b = vec![vec![c(0.0, 0.0); dim]; dim];
        for (y, row) in b.iter_mut().enumerate() {
            for (x, cell) in row.iter_mut().enumerate() {
                let mut v = c(1.0, 0.0);
                for p in block.placements() {
                    let local = |i: usize| p.wires.iter().fold(0, |acc, &w| acc * r + digit(i, w, n, r));
                    v *= p.gate.matrix.get(local(y), local(x));
                }
                *cell = v;
            }
        }
        total = mul(&b, &total);
    }
    total
}

pub fn identity(dim: usize) -> Dense {
    (0..dim).map(|i| (0..dim).map(|j| c((i == j) as u8 as f64, 0.0)).collect()).collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = b[0].len();
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

pub fn dense(m: &ComplexMatrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Ternary index of a word given in binary digits.
pub fn lift(word: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, i| acc * 3 + ((word >> (n - 1 - i)) & 1))
}

/// Permutation matrix sending basis `x` to `perm[x]`.
pub fn perm_dense(perm: &[usize]) -> Dense {
    let mut m = vec![vec![c(0.0, 0.0); perm.len()]; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        m[y][x] = c(1.0, 0.0);
    }
    m
}

pub fn ternary_pool(cat: &Catalog) -> GatePool {
    let ids: Vec<&str> = DEFAULT_TERNARY_GATES.to_vec();
    GatePool::from_ids(cat, &ids, 3).unwrap()
}

/// Random 3-wire ternary circuit over the default primitive set.
pub fn random_circuit<R: Rng>(cat: &Catalog, pool: &GatePool, max_blocks: usize, rng: &mut R) -> Circuit {
    let k = rng.gen_range(1..=max_blocks);
    let blocks = (0..k).map(|_| pool.random_block(3, rng).unwrap()).collect();
    Circuit::new(3, 3, blocks, cat.wire(3).unwrap()).unwrap()
}
