//! Dense complex matrices.
//!
//! Every gate and every circuit unitary is a [`ComplexMatrix`]. Circuits over
//! three qutrits give 27×27 matrices, so a plain row-major `Vec` is all the
//! storage we need.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Entrywise absolute tolerance used for every matrix comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
}

impl Tolerance {
    pub fn new(abs_eps: f64) -> Result<Self> {
        if !(abs_eps >= 0.0) {
            return Err(Error::Shape(format!("tolerance must be nonnegative, got {abs_eps}")));
        }
        Ok(Self { abs_eps })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_eps: 1e-9 }
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries given for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Square matrix with `diag` on the diagonal.
    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Permutation matrix sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut m = Self::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            if i >= n || seen[i] {
                return Err(Error::Shape(format!("{perm:?} is not a permutation")));
            }
            seen[i] = true;
            m.data[i * n + j] = ONE;
        }
        Ok(m)
    }

    /// Outer product |i⟩⟨j| of dimension `n`.
    pub fn ket_bra(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_mismatch("add", self, other));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_mismatch("compare", self, other));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Writes the text fixture format: a "rows cols" header followed by one
    /// line per row of `re+imj` entries.
    pub fn to_fixture(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|z| format_entry(*z)).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_fixture(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Fixture { line: 0, msg: "empty fixture".into() })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Fixture { line: hline, msg: e.to_string() })?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Fixture { line: hline, msg: "header must be \"rows cols\"".into() });
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (ln, line) =
                lines.next().ok_or(Error::Fixture { line: hline, msg: "missing rows".into() })?;
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(parse_entry(tok).map_err(|msg| Error::Fixture { line: ln, msg })?);
            }
            if data.len() - before != cols {
                return Err(Error::Fixture {
                    line: ln,
                    msg: format!("expected {cols} entries, found {}", data.len() - before),
                });
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Fixture { line: ln, msg: "trailing data".into() });
        }
        Self::from_vec(rows, cols, data)
    }
}

fn shape_mismatch(op: &str, a: &ComplexMatrix, b: &ComplexMatrix) -> Error {
    Error::Shape(format!("{op}: {}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols))
}

fn format_entry(z: C64) -> String {
    // `{:?}` gives the shortest representation that round-trips exactly.
    let im = if z.im.is_sign_negative() { format!("{:?}", z.im) } else { format!("+{:?}", z.im) };
    format!("{:?}{im}j", z.re)
}

fn parse_entry(tok: &str) -> std::result::Result<C64, String> {
    let body = tok.strip_suffix('j').ok_or_else(|| format!("entry {tok:?} lacks the imaginary part"))?;
    // Split at the sign that starts the imaginary part; skip a leading sign
    // and signs that belong to an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| format!("entry {tok:?} is not of the form re+imj"))?;
    let re = f64::from_str(&body[..split]).map_err(|e| format!("{tok:?}: {e}"))?;
    let im = f64::from_str(&body[split..]).map_err(|e| format!("{tok:?}: {e}"))?;
    Ok(C64::new(re, im))
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Matrix product `a · b`.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(shape_mismatch("matmul", a, b));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for (r, out_row) in out.data.chunks_mut(b.cols).enumerate() {
        matmul_row(a, b, r, out_row);
    }
    Ok(out)
}

/// Matrix product with rows computed on the rayon pool. Each output row is
/// summed in the same order as [`matmul`], so results are bitwise identical.
pub fn par_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(shape_mismatch("matmul", a, b));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    out.data
        .par_chunks_mut(b.cols)
        .enumerate()
        .for_each(|(r, out_row)| matmul_row(a, b, r, out_row));
    Ok(out)
}

#[inline]
fn matmul_row(a: &ComplexMatrix, b: &ComplexMatrix, r: usize, out_row: &mut [C64]) {
    for (k, &aik) in a.row(r).iter().enumerate() {
        if aik == ZERO {
            continue;
        }
        for (o, &bkj) in out_row.iter_mut().zip(b.row(k)) {
            *o += aik * bkj;
        }
    }
}

/// Multiplies a batch of independent pairs concurrently.
pub fn batch_matmul(pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Result<Vec<ComplexMatrix>> {
    pairs.par_iter().map(|(a, b)| matmul(a, b)).collect()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.data[(i * b.rows + k) * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a, I>(mats: I) -> Option<ComplexMatrix>
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    mats.into_iter().fold(None, |acc, m| match acc {
        None => Some(m.clone()),
        Some(a) => Some(kron(&a, m)),
    })
}

/// `max |M†M − I| ≤ tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Shape(format!("is_unitary on non-square {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    for i in 0..n {
        for j in 0..n {
            // (M†M)[i,j] = Σ_k conj(M[k,i]) M[k,j]
            let mut s = ZERO;
            for k in 0..n {
                s += m.get(k, i).conj() * m.get(k, j);
            }
            let expected = if i == j { ONE } else { ZERO };
            if (s - expected).norm() > tol.abs_eps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn approx_equal(a: &ComplexMatrix, b: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    Ok(a.max_abs_diff(b)? <= tol.abs_eps)
}
