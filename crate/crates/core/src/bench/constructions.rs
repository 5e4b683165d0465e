//! Hand-built reference circuits, each checked numerically.

use std::fmt::Write as _;

use crate::circuit::{digits, index_of, Circuit, Placed};
use crate::error::Result;
use crate::eval::{boolean_error, circuit_cost, correctness, CORRECTNESS_TOL};
use crate::gates::{Catalog, CostModel};
use crate::genome::GateLexicon;
use crate::minimize::{minimize, LearningMode};
use crate::tensor::{approx_equal, ComplexMatrix, Tolerance, C64};

use super::benchmarks::{fredkin_target, full_adder_target, toffoli_target, toffoli_variant_target};

/// Builds a circuit from `(gate id, wires)` blocks.
pub fn build(cat: &Catalog, n: usize, radix: usize, blocks: &[&[(&str, &[usize])]]) -> Result<Circuit> {
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(|(id, w)| Ok(Placed::new(cat.require(id)?.clone(), w.to_vec()))).collect())
        .collect::<Result<Vec<Vec<Placed>>>>()?;
    Circuit::new(n, radix, blocks, cat.wire(radix)?)
}

/// Target-wire CZ between two Hadamards.
pub fn cnot_from_cz(cat: &Catalog, radix: usize) -> Result<Circuit> {
    let (h, cz) = if radix == 2 { ("H", "CZ") } else { ("H3", "CZ3") };
    build(cat, 2, radix, &[&[(h, &[1])], &[(cz, &[0, 1])], &[(h, &[1])]])
}

/// Sign flip on one Boolean minterm. `shift` is `P02` (minus on 101) or
/// `P12` (minus on 111); the controlled shift between the two CZ halves
/// matches it.
pub fn toffoli_sign(cat: &Catalog, shift: &str) -> Result<Circuit> {
    let ctrl = if shift == "P02" { "CNOT3" } else { "C1P12" };
    build(
        cat,
        3,
        3,
        &[&[(shift, &[2])], &[(ctrl, &[1, 2])], &[("CZ3", &[0, 2])], &[(ctrl, &[1, 2])], &[(shift, &[2])]],
    )
}

/// The sign circuit between Hadamards on the target wire.
pub fn toffoli_from_sign(cat: &Catalog, shift: &str) -> Result<Circuit> {
    let sign = toffoli_sign(cat, shift)?;
    let h = Placed::new(cat.require("H3")?.clone(), vec![2]);
    let mut blocks = vec![vec![h.clone()]];
    blocks.extend(sign.to_gate_lists());
    blocks.push(vec![h]);
    Circuit::new(3, 3, blocks, cat.wire(3)?)
}

/// Fredkin from a |2⟩-controlled qutrit swap framed by level shifts.
pub fn fredkin_controlled_s3(cat: &Catalog) -> Result<Circuit> {
    let frame: &[(&str, &[usize])] = &[("P12", &[0]), ("P02", &[1]), ("P02", &[2])];
    build(cat, 3, 3, &[frame, &[("C2S3", &[0, 1, 2])], frame])
}

pub fn swap_from_cnots(cat: &Catalog, radix: usize) -> Result<Circuit> {
    let cnot = if radix == 2 { "CNOT" } else { "CNOT3" };
    build(cat, 2, radix, &[&[(cnot, &[0, 1])], &[(cnot, &[1, 0])], &[(cnot, &[0, 1])]])
}

/// Full adder as four multi-controlled Toffoli gates on qubits `a b c 0`.
pub fn full_adder_mct(cat: &Catalog) -> Result<Circuit> {
    build(
        cat,
        4,
        2,
        &[
            &[("TOFFOLI", &[0, 1, 3])],
            &[("CNOT", &[0, 1])],
            &[("TOFFOLI", &[1, 2, 3])],
            &[("CNOT", &[1, 2])],
        ],
    )
}

/// Fredkin found by the GA, up to relative phase.
pub fn discovered_fredkin(cat: &Catalog) -> Result<Circuit> {
    build(
        cat,
        3,
        3,
        &[
            &[("CNOT3", &[2, 1])],
            &[("CH3", &[1, 2])],
            &[("CZ3", &[0, 2])],
            &[("CH3", &[1, 2])],
            &[("CNOT3", &[2, 1])],
        ],
    )
}

/// The circuit's action on the Boolean words: for each input, the phase
/// of its single output word, or `None` when the output is not a single
/// Boolean basis word.
pub fn boolean_action(c: &Circuit, tol: f64) -> Vec<Option<(usize, C64)>> {
    let n = c.n_wires();
    let dim = c.dim();
    (0..1usize << n)
        .map(|x| {
            let mut s = vec![C64::new(0.0, 0.0); dim];
            s[index_of(&digits(x, 2, n), c.radix())] = C64::new(1.0, 0.0);
            c.apply(&mut s);
            let hits: Vec<(usize, C64)> = s.iter().enumerate().filter(|(_, a)| a.norm() > tol).map(|(i, a)| (i, *a)).collect();
            match hits.as_slice() {
                [(i, a)] if (a.norm() - 1.0).abs() < tol => {
                    let word = digits(*i, c.radix(), n);
                    word.iter().all(|&d| d < 2).then(|| (index_of(&word, 2), *a))
                }
                _ => None,
            }
        })
        .collect()
}

/// Signs of a diagonal Boolean action, or `None` if it is not diagonal
/// with ±1 entries.
pub fn sign_pattern(c: &Circuit, tol: f64) -> Option<Vec<i8>> {
    boolean_action(c, tol)
        .into_iter()
        .enumerate()
        .map(|(x, a)| {
            let (y, z) = a?;
            if y != x || z.im.abs() > tol {
                return None;
            }
            if (z.re - 1.0).abs() < tol {
                Some(1)
            } else if (z.re + 1.0).abs() < tol {
                Some(-1)
            } else {
                None
            }
        })
        .collect()
}

/// Boolean permutation realised by the circuit, ignoring phases.
pub fn boolean_permutation(c: &Circuit, tol: f64) -> Option<Vec<usize>> {
    boolean_action(c, tol).into_iter().map(|a| a.map(|(y, _)| y)).collect()
}

#[derive(Clone, Debug)]
pub struct ConstructionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub cost: Option<u32>,
    pub expected_cost: Option<u32>,
}

fn check(name: &str, passed: bool, detail: String) -> ConstructionCheck {
    ConstructionCheck { name: name.into(), passed, detail, cost: None, expected_cost: None }
}

fn costed(mut c: ConstructionCheck, cost: u32, expected: u32) -> ConstructionCheck {
    c.passed &= cost == expected;
    c.cost = Some(cost);
    c.expected_cost = Some(expected);
    c
}

fn minus_at(word: usize) -> Vec<i8> {
    (0..8).map(|x| if x == word { -1 } else { 1 }).collect()
}

/// Searches mirror-symmetric circuits `g1 … gk … g1` of up to five single
/// gate blocks over CZ³, CH³ and CNOT³ (every orientation) for exact
/// Fredkin realisations on the Boolean inputs. Returns the hits.
pub fn fredkin_family_search(cat: &Catalog) -> Result<Vec<Circuit>> {
    let mut moves: Vec<(&str, Vec<usize>)> = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        moves.push(("CZ3", vec![a, b]));
        for g in ["CH3", "CNOT3"] {
            moves.push((g, vec![a, b]));
            moves.push((g, vec![b, a]));
        }
    }
    let want = fredkin_target();
    let mut hits = Vec::new();
    let mut seq: Vec<usize> = Vec::new();
    for half in 1..=3 {
        let total = moves.len().pow(half as u32);
        for code in 0..total {
            seq.clear();
            let mut k = code;
            for _ in 0..half {
                seq.push(k % moves.len());
                k /= moves.len();
            }
            let order: Vec<usize> = seq.iter().chain(seq[..half - 1].iter().rev()).copied().collect();
            let blocks: Vec<Vec<Placed>> = order
                .iter()
                .map(|&m| Ok(vec![Placed::new(cat.require(moves[m].0)?.clone(), moves[m].1.clone())]))
                .collect::<Result<_>>()?;
            let c = Circuit::new(3, 3, blocks, cat.wire(3)?)?;
            if boolean_error(&c, &want)? < 1e-12 {
                hits.push(c);
            }
        }
    }
    Ok(hits)
}

/// Runs every construction check.
pub fn verify_constructions() -> Result<Vec<ConstructionCheck>> {
    let cat = Catalog::builtin();
    let tol = Tolerance::default();
    let model = CostModel::default();
    let mut out = Vec::new();

    for radix in [2, 3] {
        let c = cnot_from_cz(&cat, radix)?;
        let cnot = cat.require(if radix == 2 { "CNOT" } else { "CNOT3" })?;
        let ok = approx_equal(&c.matrix(), &cnot.matrix, tol)?;
        out.push(check(&format!("cnot-from-cz-radix{radix}"), ok, "H·CZ·H on the target equals CNOT".into()));
    }

    for (shift, word, swapped, name) in
        [("P02", 0b101, toffoli_variant_target(), "[0-2]"), ("P12", 0b111, toffoli_target(), "[1-2]")]
    {
        let sign = toffoli_sign(&cat, shift)?;
        let ok = sign_pattern(&sign, tol.abs_eps) == Some(minus_at(word));
        out.push(costed(
            check(&format!("toffoli-sign-{name}"), ok, format!("minus sign on minterm {word:03b}")),
            circuit_cost(&sign, &model),
            3,
        ));
        let t = toffoli_from_sign(&cat, shift)?;
        let ok = boolean_error(&t, &swapped)? < 1e-12 && boolean_permutation(&t, tol.abs_eps).is_some();
        out.push(costed(
            check(&format!("toffoli-from-sign-{name}"), ok, "Hadamards on the target turn the sign into a swap".into()),
            circuit_cost(&t, &model),
            3,
        ));
    }

    let f = fredkin_controlled_s3(&cat)?;
    let ok = boolean_error(&f, &fredkin_target())? < 1e-12 && boolean_permutation(&f, tol.abs_eps).is_some();
    out.push(costed(
        check("fredkin-controlled-s3", ok, "Boolean inputs map to Fredkin outputs".into()),
        circuit_cost(&f, &model),
        5,
    ));

    for radix in [2, 3] {
        let c = swap_from_cnots(&cat, radix)?;
        let swap = cat.require(if radix == 2 { "SWAP" } else { "SWAP3" })?;
        let mut lex = GateLexicon::new(&cat, 2, radix)?;
        let m = minimize(&c, Some(&mut lex), LearningMode::Lamarckian);
        let ok = approx_equal(&c.matrix(), &swap.matrix, tol)?
            && m.phenotype.gate_count() == 1
            && approx_equal(&m.phenotype.matrix(), &c.matrix(), tol)?;
        out.push(check(&format!("swap-from-cnots-radix{radix}"), ok, "three CNOTs merge into one swap".into()));
    }

    let fa = full_adder_mct(&cat)?;
    let ok = correctness(&fa, &full_adder_target(2), CORRECTNESS_TOL)? == 100.0;
    out.push(costed(check("full-adder-mct", ok, "S on wire 2, carry on wire 3".into()), circuit_cost(&fa, &model), 12));

    let d = discovered_fredkin(&cat)?;
    let toffoli_cost = circuit_cost(&toffoli_from_sign(&cat, "P12")?, &model);
    let m = minimize(&d, None, LearningMode::Baldwinian);
    let ok = boolean_error(&d, &fredkin_target())? < 1e-12 && approx_equal(&m.phenotype.matrix(), &d.matrix(), tol)?;
    out.push(costed(
        check(
            "discovered-fredkin",
            ok,
            format!("raw cost {}, merged cost equals the Toffoli construction", circuit_cost(&d, &model)),
        ),
        circuit_cost(&m.phenotype, &model),
        toffoli_cost,
    ));

    let hits = fredkin_family_search(&cat)?;
    out.push(check(
        "discovered-fredkin-family",
        !hits.is_empty(),
        format!("{} mirror-symmetric circuits of up to 5 blocks realise Fredkin", hits.len()),
    ));
    Ok(out)
}

pub fn render_checks(checks: &[ConstructionCheck]) -> String {
    let mut s = String::new();
    for c in checks {
        let cost = match (c.cost, c.expected_cost) {
            (Some(a), Some(b)) => format!(" cost={a} expected={b}"),
            _ => String::new(),
        };
        let _ = writeln!(s, "{} {}{} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, cost, c.detail);
    }
    s
}

/// The Boolean-subspace block of a matrix (rows and columns of 0/1 words).
pub fn boolean_block(m: &ComplexMatrix, n: usize, radix: usize) -> ComplexMatrix {
    let idx: Vec<usize> = (0..1usize << n).map(|x| index_of(&digits(x, 2, n), radix)).collect();
    let mut out = ComplexMatrix::zeros(idx.len(), idx.len());
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out.set(r, c, m.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_constructions_pass() {
        let checks = verify_constructions().unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{}", render_checks(&checks));
    }

    #[test]
    fn inactive_control_leaves_fredkin_input() {
        let f = fredkin_controlled_s3(&Catalog::builtin()).unwrap();
        let perm = boolean_permutation(&f, 1e-9).unwrap();
        assert_eq!(perm[0b011], 0b011);
    }
}
