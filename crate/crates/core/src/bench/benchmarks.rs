use crate::error::{Error, Result};
use crate::eval::TargetSpec;
use crate::gates::WireRestriction;
use crate::tensor::{ComplexMatrix, ONE};

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub name: String,
    pub target: TargetSpec,
    /// Restrictions used by restricted runs.
    pub restrictions: Vec<(String, WireRestriction)>,
}

pub const BENCHMARKS: &[&str] = &["Toffoli", "Toffoli-Sign", "Fredkin", "Majority", "Miller", "SWAP3", "FullAdder"];

/// Single-qutrit shifts confined to the given wires.
fn shifts_on(wires: &[usize]) -> Vec<(String, WireRestriction)> {
    let r = WireRestriction::wires(wires.iter().copied()).expect("nonempty wire list");
    ["P02", "P12", "H3"].iter().map(|g| (g.to_string(), r.clone())).collect()
}

fn swap_words(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..1 << n).collect();
    p.swap(a, b);
    p
}

pub fn toffoli_target() -> TargetSpec {
    TargetSpec::from_permutation(3, 3, &swap_words(3, 0b110, 0b111)).expect("static table")
}

/// The variant exchanging 101 and 100.
pub fn toffoli_variant_target() -> TargetSpec {
    TargetSpec::from_permutation(3, 3, &swap_words(3, 0b101, 0b100)).expect("static table")
}

pub fn fredkin_target() -> TargetSpec {
    TargetSpec::from_permutation(3, 3, &swap_words(3, 0b101, 0b110)).expect("static table")
}

pub fn miller_target() -> TargetSpec {
    TargetSpec::from_permutation(3, 3, &[0, 6, 2, 3, 4, 5, 1, 7]).expect("static table")
}

pub fn toffoli_sign_target() -> TargetSpec {
    let mut d = vec![ONE; 8];
    d[7] = -ONE;
    TargetSpec::unitary(3, 3, ComplexMatrix::diagonal(&d)).expect("diagonal sign matrix is unitary")
}

/// Majority of the three inputs on wire 2; the other outputs are free.
pub fn majority_target() -> TargetSpec {
    TargetSpec::from_boolean_fn(3, 3, |w| {
        let (a, b, c) = (w[0], w[1], w[2]);
        vec![None, None, Some((a & b) | (b & c) | (a & c))]
    })
    .expect("static table")
}

pub fn swap3_target() -> TargetSpec {
    TargetSpec::from_permutation(2, 3, &[0, 2, 1, 3]).expect("static table")
}

/// Inputs `abc0`; sum on wire 2 and carry on wire 3.
pub fn full_adder_target(radix: usize) -> TargetSpec {
    let rows = (0..8)
        .map(|i| {
            let (a, b, c) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
            let s = a ^ b ^ c;
            let carry = (a & b) | (b & c) | (a & c);
            crate::eval::TableRow {
                input: vec![a as u8, b as u8, c as u8, 0],
                output: vec![None, None, Some(s as u8), Some(carry as u8)],
            }
        })
        .collect();
    TargetSpec::truth_table(4, radix, rows).expect("static table")
}

pub fn identity_target() -> TargetSpec {
    TargetSpec::from_permutation(3, 3, &(0..8).collect::<Vec<_>>()).expect("static table")
}

/// Looks a benchmark up by name (case-insensitive). `Identity` is also
/// accepted, as a trivial target for smoke tests.
pub fn load_benchmark(name: &str, any_toffoli_variant: bool) -> Result<Benchmark> {
    let key = name.to_ascii_lowercase().replace(['_', ' '], "-");
    let (name, target, restrictions) = match key.as_str() {
        "toffoli" => {
            let mut t = toffoli_target();
            if any_toffoli_variant {
                t = t.with_alternative(toffoli_variant_target())?;
            }
            ("Toffoli", t, shifts_on(&[2]))
        }
        "toffoli-sign" | "toffolisign" => ("Toffoli-Sign", toffoli_sign_target(), shifts_on(&[2])),
        "fredkin" => ("Fredkin", fredkin_target(), shifts_on(&[1, 2])),
        "majority" => ("Majority", majority_target(), shifts_on(&[2])),
        "miller" => ("Miller", miller_target(), Vec::new()),
        "swap3" => ("SWAP3", swap3_target(), Vec::new()),
        "fulladder" | "full-adder" => ("FullAdder", full_adder_target(3), shifts_on(&[2, 3])),
        "identity" => ("Identity", identity_target(), Vec::new()),
        _ => return Err(Error::UnknownBenchmark(name.to_string())),
    };
    Ok(Benchmark { name: name.to_string(), target, restrictions })
}
