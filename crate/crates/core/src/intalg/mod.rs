//! Exact integer matrix algebra.
//!
//! Everything here works over arbitrary-precision integers. Matrices are
//! dense and row-major; they are small in every use this crate makes of them.

mod lift;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use lift::{sl_lift, DiagonalOrder};
pub use snf::{is_smith_form, smith_normal_form, SnfDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntAlgError {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },
    #[error("modulus must be at least 1, got {0}")]
    BadModulus(BigInt),
    #[error("determinant {det} is not congruent to 1 modulo {modulus}")]
    DetNotOne { det: BigInt, modulus: BigInt },
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(BigInt, BigInt),
    #[error("matrix is not in the order defined by diagonal {0:?}")]
    NotInOrder(Vec<BigInt>),
    #[error("lift verification failed: {0}")]
    LiftCheck(String),
}

pub type Result<T> = std::result::Result<T, IntAlgError>;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(IntAlgError::Dimension {
                op: "new",
                detail: format!("{} entries for a {rows}x{cols} matrix", entries.len()),
            });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone().into());
        }
        m
    }

    /// Builds a matrix from nested rows. All rows must have the same length;
    /// an empty outer vector gives a 0x0 matrix.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(IntAlgError::Dimension {
                op: "from_rows",
                detail: format!("row {bad} has {} entries, expected {c}", rows[bad].len()),
            });
        }
        let entries = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Self::new(r, c, entries)
    }

    /// Shorthand for tests and fixtures. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let owned: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&owned).expect("ragged matrix literal")
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

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Entries on the main diagonal, `min(rows, cols)` of them.
    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.same_shape(other, "add")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.same_shape(other, "sub")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    fn same_shape(&self, other: &IntMatrix, op: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(IntAlgError::Dimension {
                op,
                detail: format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Copies out the block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        let mut b = IntMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        b
    }

    /// Writes `b` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, b: &IntMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    // Elementary operations, used by the SNF and lifting routines.

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[source]
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(source, j) * k;
            self.entries[target * self.cols + j] += v;
        }
    }

    /// col[target] += k * col[source]
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, source) * k;
            self.entries[i * self.cols + target] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.entries[idx] = -std::mem::take(&mut self.entries[idx]);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        if self.rows == 0 && self.cols > 0 {
            write!(f, "0x{}", self.cols)?;
        }
        write!(f, "]")
    }
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(IntAlgError::Dimension {
            op: "mat_mul",
            detail: format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols),
        });
    }
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                out.entries[i * b.cols + j] += aik * b.get(k, j);
            }
        }
    }
    Ok(out)
}

/// Product of a chain of matrices. Panics on a dimension mismatch, so only
/// use it where shapes are already known to agree.
pub(crate) fn mul_all(ms: &[&IntMatrix]) -> IntMatrix {
    let mut it = ms.iter();
    let first = (*it.next().expect("empty product")).clone();
    it.fold(first, |acc, m| mat_mul(&acc, m).expect("shapes checked by caller"))
}

fn check_modulus(m: &BigInt) -> Result<()> {
    if *m < BigInt::one() {
        return Err(IntAlgError::BadModulus(m.clone()));
    }
    Ok(())
}

/// Entrywise reduction into `[0, m)`.
pub fn mat_mod(a: &IntMatrix, m: &BigInt) -> Result<IntMatrix> {
    check_modulus(m)?;
    Ok(IntMatrix { rows: a.rows, cols: a.cols, entries: a.entries.iter().map(|e| e.mod_floor(m)).collect() })
}

pub fn is_identity_mod(a: &IntMatrix, m: &BigInt) -> Result<bool> {
    check_modulus(m)?;
    if !a.is_square() {
        return Ok(false);
    }
    Ok((0..a.rows).all(|i| {
        (0..a.cols).all(|j| {
            let target = if i == j { BigInt::one() } else { BigInt::zero() };
            (a.get(i, j) - target).mod_floor(m).is_zero()
        })
    }))
}

pub fn congruent_mod(a: &IntMatrix, b: &IntMatrix, m: &BigInt) -> Result<bool> {
    check_modulus(m)?;
    a.same_shape(b, "congruent_mod")?;
    Ok(a.entries.iter().zip(&b.entries).all(|(x, y)| (x - y).mod_floor(m).is_zero()))
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(IntAlgError::Dimension {
            op: "determinant",
            detail: format!("{}x{} is not square", m.rows, m.cols),
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = a.get(k, k).clone();
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Classical adjugate, `adj(M) * M = det(M) * I`.
pub fn adjugate(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(IntAlgError::Dimension { op: "adjugate", detail: format!("{}x{} is not square", m.rows, m.cols) });
    }
    let n = m.rows;
    let mut adj = IntMatrix::zeros(n, n);
    if n == 0 {
        return Ok(adj);
    }
    if n == 1 {
        adj.set(0, 0, BigInt::one());
        return Ok(adj);
    }
    for i in 0..n {
        for j in 0..n {
            let minor = minor_matrix(m, i, j);
            let d = determinant(&minor)?;
            // adj[j][i] = (-1)^(i+j) * minor(i, j)
            adj.set(j, i, if (i + j) % 2 == 0 { d } else { -d });
        }
    }
    Ok(adj)
}

fn minor_matrix(m: &IntMatrix, skip_row: usize, skip_col: usize) -> IntMatrix {
    let n = m.rows;
    let entries = (0..n)
        .filter(|&i| i != skip_row)
        .flat_map(|i| (0..n).filter(move |&j| j != skip_col).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).clone())
        .collect();
    IntMatrix { rows: n - 1, cols: n - 1, entries }
}

/// Exact inverse of a matrix with determinant ±1.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let d = determinant(m)?;
    if d.abs() != BigInt::one() {
        return Err(IntAlgError::NotInvertible(d, BigInt::zero()));
    }
    Ok(adjugate(m)?.scale(&d))
}

/// Some integer matrix `B` with `B * M ≡ M * B ≡ I (mod m)`.
pub fn inverse_mod(a: &IntMatrix, m: &BigInt) -> Result<IntMatrix> {
    check_modulus(m)?;
    let d = determinant(a)?;
    let dinv = inv_mod(&d, m)?;
    mat_mod(&adjugate(a)?.scale(&dinv), m)
}

/// Inverse of `a` modulo `m`, as a representative in `[0, m)`.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    check_modulus(m)?;
    let r = a.mod_floor(m);
    let eg = r.extended_gcd(m);
    if !eg.gcd.is_one() {
        return Err(IntAlgError::NotInvertible(a.clone(), m.clone()));
    }
    Ok(eg.x.mod_floor(m))
}
