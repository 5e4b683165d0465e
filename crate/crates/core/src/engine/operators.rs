//! Crossover and mutation.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::MutationKind;
use super::eigs::Eigs;
use crate::circuit::{Circuit, Placed};
use crate::error::{Error, Result};
use crate::gates::GateDef;
use crate::genome::{decode, encode_registering, ordered_placements, GateLexicon, Genome};

/// Where replacement gates come from.
#[derive(Clone, Copy)]
pub enum GateSource<'a> {
    Uniform(&'a [Arc<GateDef>]),
    /// Weighted draw from the EIGS; uniform over `fallback` while it is empty.
    Weighted { eigs: &'a Eigs, fallback: &'a [Arc<GateDef>] },
}

impl GateSource<'_> {
    pub fn pick<R, F>(&self, admissible: F, rng: &mut R) -> Option<Arc<GateDef>>
    where
        R: Rng + ?Sized,
        F: Fn(&GateDef) -> bool,
    {
        match self {
            GateSource::Weighted { eigs, .. } if !eigs.is_empty() => eigs.pick(admissible, rng).cloned(),
            GateSource::Weighted { fallback: gates, .. } | GateSource::Uniform(gates) => {
                let ok: Vec<&Arc<GateDef>> = gates.iter().filter(|g| admissible(g)).collect();
                ok.choose(rng).map(|g| (*g).clone())
            }
        }
    }
}

/// Two-point crossover on block boundaries. Each parent gets its own pair
/// of cut points and the interior spans are exchanged, so child lengths
/// may differ from the parents' while the total block count is kept.
/// Identical parents have nothing to exchange and are returned as is.
pub fn two_point_crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<(Genome, Genome)> {
    if a.n_wires() != b.n_wires() || a.radix() != b.radix() {
        return Err(Error::Structure("crossover parents differ in width".into()));
    }
    let (sa, sb) = (a.segments(), b.segments());
    if sa.is_empty() || sb.is_empty() {
        return Err(Error::Structure("crossover parent without blocks".into()));
    }
    if sa == sb {
        return Ok((a.clone(), b.clone()));
    }
    let mut cut = |s: &[&str]| {
        let (i, j) = (rng.gen_range(0..=s.len()), rng.gen_range(0..=s.len()));
        (i.min(j), i.max(j))
    };
    // Cuts that would leave a child without blocks are redrawn.
    let ((a1, a2), (b1, b2)) = (0..64)
        .map(|_| (cut(&sa), cut(&sb)))
        .find(|&((a1, a2), (b1, b2))| {
            let (da, db) = (a2 - a1, b2 - b1);
            sa.len() - da + db > 0 && sb.len() - db + da > 0
        })
        .unwrap_or(((0, 0), (0, 0)));
    let child = |x: &[&str], x1, x2, y: &[&str], y1, y2| -> Vec<String> {
        x[..x1].iter().chain(&y[y1..y2]).chain(&x[x2..]).map(|s| s.to_string()).collect()
    };
    let c1 = child(&sa, a1, a2, &sb, b1, b2);
    let c2 = child(&sb, b1, b2, &sa, a1, a2);
    Ok((
        Genome::from_segments(&c1, a.n_wires(), a.radix()),
        Genome::from_segments(&c2, a.n_wires(), a.radix()),
    ))
}

/// Keeps the first `max_blocks` blocks.
pub fn truncate_blocks(g: &Genome, max_blocks: usize) -> Genome {
    let s = g.segments();
    if s.len() <= max_blocks {
        return g.clone();
    }
    Genome::from_segments(&s[..max_blocks], g.n_wires(), g.radix())
}

fn wire_of(c: &Circuit) -> Arc<GateDef> {
    c.placements().find(|p| p.gate.is_wire()).map(|p| p.gate.clone()).unwrap_or_else(|| {
        Arc::new(crate::gates::wire_gate(c.radix()))
    })
}

/// Placements of `g` allowed by its restriction that cover `must` and use
/// only `free` wires.
fn free_placements(g: &GateDef, n_wires: usize, must: usize, free: &[bool]) -> Vec<Vec<usize>> {
    if g.arity > n_wires {
        return Vec::new();
    }
    ordered_placements(n_wires, g.arity)
        .into_iter()
        .filter(|w| w.contains(&must) && w.iter().all(|&x| free[x]) && g.restriction.allows(w))
        .collect()
}

/// Orderings of `wires` that `g` may occupy.
fn same_wire_placements(g: &GateDef, wires: &[usize]) -> Vec<Vec<usize>> {
    if g.arity != wires.len() {
        return Vec::new();
    }
    ordered_placements(wires.len(), wires.len())
        .into_iter()
        .map(|p| p.iter().map(|&i| wires[i]).collect::<Vec<_>>())
        .filter(|w| g.restriction.allows(w))
        .collect()
}

/// Replaces `old` inside `block`; false when no admissible gate exists.
fn replace_in_block<R: Rng + ?Sized>(
    block: &mut Vec<Placed>,
    old: &Placed,
    n_wires: usize,
    kind: MutationKind,
    source: &GateSource<'_>,
    rng: &mut R,
) -> bool {
    match kind {
        MutationKind::StructurePreserving => {
            let Some(g) = source.pick(|g| !same_wire_placements(g, &old.wires).is_empty(), rng) else {
                return false;
            };
            let wires = same_wire_placements(&g, &old.wires).choose(rng).cloned().expect("admissible");
            let slot = block.iter().position(|p| p == old).expect("live placement");
            block[slot] = Placed::new(g, wires);
        }
        MutationKind::Free | MutationKind::BlockReplace => {
            let must = *old.wires.choose(rng).expect("placement has wires");
            let all = vec![true; n_wires];
            let Some(g) = source.pick(|g| !free_placements(g, n_wires, must, &all).is_empty(), rng) else {
                return false;
            };
            let wires = free_placements(&g, n_wires, must, &all).choose(rng).cloned().expect("admissible");
            block.retain(|p| !p.wires.iter().any(|w| wires.contains(w)));
            block.push(Placed::new(g, wires));
        }
    }
    true
}

/// A fresh block covering every wire.
pub fn random_block<R: Rng + ?Sized>(n_wires: usize, source: &GateSource<'_>, rng: &mut R) -> Result<Vec<Placed>> {
    let mut free = vec![true; n_wires];
    let mut out = Vec::new();
    while let Some(w) = free.iter().position(|&f| f) {
        let g = source
            .pick(|g| !free_placements(g, n_wires, w, &free).is_empty(), rng)
            .ok_or_else(|| Error::Generation(format!("no admissible gate can occupy wire {w}")))?;
        let wires = free_placements(&g, n_wires, w, &free).choose(rng).cloned().expect("admissible");
        for &x in &wires {
            free[x] = false;
        }
        out.push(Placed::new(g, wires));
    }
    Ok(out)
}

/// Per-position Bernoulli mutation of a circuit. Returns `None` when
/// nothing changed; positions with no admissible replacement are counted
/// in `skipped`.
pub fn mutate_circuit<R: Rng + ?Sized>(
    c: &Circuit,
    kind: MutationKind,
    rate: f64,
    source: &GateSource<'_>,
    rng: &mut R,
    skipped: &mut usize,
) -> Option<Circuit> {
    if rate <= 0.0 {
        return None;
    }
    let n = c.n_wires();
    let mut blocks: Vec<Vec<Placed>> = c.blocks().iter().map(|b| b.placements().to_vec()).collect();
    let mut changed = false;
    for block in blocks.iter_mut() {
        if kind == MutationKind::BlockReplace {
            if rng.gen_bool(rate) {
                match random_block(n, source, rng) {
                    Ok(fresh) => {
                        *block = fresh;
                        changed = true;
                    }
                    Err(_) => *skipped += 1,
                }
            }
            continue;
        }
        let originals = block.clone();
        for old in &originals {
            if rng.gen_bool(rate) && block.contains(old) {
                if replace_in_block(block, old, n, kind, source, rng) {
                    changed = true;
                } else {
                    *skipped += 1;
                }
            }
        }
    }
    changed.then(|| Circuit::new(n, c.radix(), blocks, &wire_of(c)).expect("mutation keeps blocks disjoint"))
}

/// Decodes, mutates and re-encodes a genome; unchanged genomes are
/// returned as they were.
pub fn mutate<R: Rng + ?Sized>(
    g: &Genome,
    lex: &mut GateLexicon,
    kind: MutationKind,
    rate: f64,
    source: &GateSource<'_>,
    rng: &mut R,
) -> Result<Genome> {
    let c = decode(g, lex)?;
    match mutate_circuit(&c, kind, rate, source, rng, &mut 0) {
        Some(m) => encode_registering(&m, lex),
        None => Ok(g.clone()),
    }
}

/// Replaces one randomly chosen position with a gate drawn from the EIGS.
/// `Ok(None)` means no admissible gate existed and nothing was changed.
pub fn wgs_mutate<R: Rng + ?Sized>(
    g: &Genome,
    lex: &mut GateLexicon,
    eigs: &Eigs,
    fallback: &[Arc<GateDef>],
    kind: MutationKind,
    rng: &mut R,
) -> Result<Option<Genome>> {
    let c = decode(g, lex)?;
    let positions: Vec<(usize, &Placed)> =
        c.blocks().iter().enumerate().flat_map(|(b, blk)| blk.placements().iter().map(move |p| (b, p))).collect();
    let (b, old) = *positions.choose(rng).expect("circuits have placements");
    let source = GateSource::Weighted { eigs, fallback };
    let mut blocks: Vec<Vec<Placed>> = c.blocks().iter().map(|b| b.placements().to_vec()).collect();
    let kind = if kind == MutationKind::BlockReplace { MutationKind::Free } else { kind };
    if !replace_in_block(&mut blocks[b], old, c.n_wires(), kind, &source, rng) {
        return Ok(None);
    }
    let m = Circuit::new(c.n_wires(), c.radix(), blocks, &wire_of(&c))?;
    encode_registering(&m, lex).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{Catalog, WireRestriction};
    use crate::genome::{random_genome, validate_restrictions, GatePool};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const IDS: &[&str] = &["WIRE", "CNOT3", "CZ3", "P02", "P12", "CH3", "H3"];

    fn setup() -> (Catalog, GateLexicon, GatePool) {
        let cat = Catalog::builtin().with_restriction("H3", WireRestriction::wires([2]).unwrap()).unwrap();
        let lex = GateLexicon::new(&cat, 3, 3).unwrap();
        let pool = GatePool::from_ids(&cat, IDS, 3).unwrap();
        (cat, lex, pool)
    }

    #[test]
    fn crossover_of_identical_parents() {
        let (_, lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = random_genome(&lex, &pool, 1..=6, &mut rng).unwrap();
            let (c1, c2) = two_point_crossover(&g, &g, &mut rng).unwrap();
            assert_eq!((c1, c2), (g.clone(), g));
        }
    }

    #[test]
    fn crossover_conserves_blocks() {
        let (cat, lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut grew = false;
        for _ in 0..200 {
            let a = random_genome(&lex, &pool, 1..=6, &mut rng).unwrap();
            let b = random_genome(&lex, &pool, 1..=6, &mut rng).unwrap();
            let (c1, c2) = two_point_crossover(&a, &b, &mut rng).unwrap();
            assert_eq!(c1.block_count() + c2.block_count(), a.block_count() + b.block_count());
            grew |= c1.block_count().max(c2.block_count()) > a.block_count().max(b.block_count());
            for c in [c1, c2] {
                assert!(c.block_count() >= 1);
                assert!(validate_restrictions(&decode(&c, &lex).unwrap(), &cat));
            }
        }
        assert!(grew);
    }

    #[test]
    fn zero_rate_changes_nothing() {
        let (_, mut lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_genome(&lex, &pool, 3..=3, &mut rng).unwrap();
        let src = GateSource::Uniform(pool.gates());
        for kind in [MutationKind::Free, MutationKind::StructurePreserving, MutationKind::BlockReplace] {
            assert_eq!(mutate(&g, &mut lex, kind, 0.0, &src, &mut rng).unwrap(), g);
        }
    }

    #[test]
    fn structure_preserving_keeps_arity() {
        let (cat, mut lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let src = GateSource::Uniform(pool.gates());
        for _ in 0..200 {
            let g = random_genome(&lex, &pool, 2..=4, &mut rng).unwrap();
            let m = mutate(&g, &mut lex, MutationKind::StructurePreserving, 0.5, &src, &mut rng).unwrap();
            let (a, b) = (decode(&g, &lex).unwrap(), decode(&m, &lex).unwrap());
            for (ba, bb) in a.blocks().iter().zip(b.blocks()) {
                let shape = |blk: &crate::circuit::Block| {
                    let mut v: Vec<Vec<usize>> = blk
                        .placements()
                        .iter()
                        .map(|p| {
                            let mut w = p.wires.clone();
                            w.sort();
                            w
                        })
                        .collect();
                    v.sort();
                    v
                };
                assert_eq!(shape(ba), shape(bb));
            }
            assert!(validate_restrictions(&b, &cat));
        }
    }

    #[test]
    fn free_and_block_mutations_respect_restrictions() {
        let (cat, mut lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let src = GateSource::Uniform(pool.gates());
        for kind in [MutationKind::Free, MutationKind::BlockReplace] {
            for _ in 0..200 {
                let g = random_genome(&lex, &pool, 2..=4, &mut rng).unwrap();
                let m = mutate(&g, &mut lex, kind, 0.3, &src, &mut rng).unwrap();
                assert!(validate_restrictions(&decode(&m, &lex).unwrap(), &cat));
            }
        }
    }

    #[test]
    fn wgs_single_entry_and_restrictions() {
        let (cat, mut lex, pool) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let h3 = cat.get("H3").unwrap().clone();
        let mut eigs = Eigs::new(50);
        eigs.update([(&h3, "h".to_string())], 0.7);
        for _ in 0..200 {
            let g = random_genome(&lex, &pool, 2..=4, &mut rng).unwrap();
            match wgs_mutate(&g, &mut lex, &eigs, pool.gates(), MutationKind::Free, &mut rng).unwrap() {
                Some(m) => {
                    let c = decode(&m, &lex).unwrap();
                    assert!(validate_restrictions(&c, &cat));
                    assert!(c.gates().any(|p| p.gate.id == "H3" && p.wires == vec![2]));
                }
                None => {}
            }
        }
    }
}
