//! Lifting determinant-one matrices from residues to exact integers.
//!
//! The general routine works inside the order
//!
//! ```text
//! Λ(D) = { A ∈ M_n(ℤ) : D·A·D⁻¹ ∈ M_n(ℤ) },   D = diag(c_1, …, c_n), c_i ≠ 0
//! ```
//!
//! which is the ring of integer matrices whose `(i, j)` entry is divisible by
//! `q_ij = |c_j| / gcd(c_i, c_j)`. Congruence modulo `m` is taken in the
//! two-sided ideal `mΛ`, i.e. entry `(i, j)` modulo `m·q_ij`. With all
//! `c_i = 1` this is plain `M_n(ℤ)` with entrywise congruence.
//!
//! The input is brought to a diagonal of units modulo `mΛ` by elementary
//! transvections lying in `Λ`. Each transvection is recorded as an exact
//! integer matrix together with its inverse. The leftover diagonal is
//! absorbed by explicit determinant-one 2×2 blocks, and the inverses are
//! replayed around it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{determinant, mat_mul, mul_all, IntAlgError, IntMatrix, Result};

/// The order `Λ(D)` for a diagonal of nonzero integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalOrder {
    diag: Vec<BigInt>,
}

impl DiagonalOrder {
    pub fn new(diag: Vec<BigInt>) -> Result<Self> {
        if diag.iter().any(Zero::is_zero) {
            return Err(IntAlgError::NotInOrder(diag));
        }
        Ok(DiagonalOrder { diag: diag.into_iter().map(|c| c.abs()).collect() })
    }

    /// `M_n(ℤ)` itself.
    pub fn full(n: usize) -> Self {
        DiagonalOrder { diag: vec![BigInt::one(); n] }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Required divisor of entry `(i, j)`.
    pub fn entry_divisor(&self, i: usize, j: usize) -> BigInt {
        &self.diag[j] / self.diag[i].gcd(&self.diag[j])
    }

    pub fn contains(&self, a: &IntMatrix) -> bool {
        let n = self.size();
        a.rows() == n
            && a.cols() == n
            && (0..n).all(|i| (0..n).all(|j| a.get(i, j).is_multiple_of(&self.entry_divisor(i, j))))
    }

    /// `a ≡ b (mod mΛ)`.
    pub fn congruent(&self, a: &IntMatrix, b: &IntMatrix, m: &BigInt) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| (a.get(i, j) - b.get(i, j)).is_multiple_of(&(m * self.entry_divisor(i, j)))))
    }

    /// Canonical representative of `a` modulo `mΛ`.
    pub fn reduce(&self, a: &IntMatrix, m: &BigInt) -> IntMatrix {
        let n = self.size();
        let mut out = a.clone();
        for i in 0..n {
            for j in 0..n {
                let modulus = m * self.entry_divisor(i, j);
                out.set(i, j, a.get(i, j).mod_floor(&modulus));
            }
        }
        out
    }

    /// `D·A·D⁻¹`, exact. `a` must lie in the order.
    pub fn conjugate(&self, a: &IntMatrix) -> IntMatrix {
        let n = self.size();
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, a.get(i, j) * &self.diag[i] / &self.diag[j]);
            }
        }
        out
    }

    /// Returns `W ∈ Λ` with `det W = 1` and `W ≡ b (mod mΛ)`.
    ///
    /// Requires `b ∈ Λ` and `det b ≡ 1 (mod m)`. The result is checked
    /// against all three postconditions before it is returned.
    pub fn lift_sl(&self, b: &IntMatrix, m: &BigInt) -> Result<IntMatrix> {
        if *m < BigInt::one() {
            return Err(IntAlgError::BadModulus(m.clone()));
        }
        let n = self.size();
        if b.rows() != n || b.cols() != n {
            return Err(IntAlgError::Dimension {
                op: "lift_sl",
                detail: format!("{}x{} matrix for an order of size {n}", b.rows(), b.cols()),
            });
        }
        if !self.contains(b) {
            return Err(IntAlgError::NotInOrder(self.diag.clone()));
        }
        let det = determinant(b)?;
        if !(&det - BigInt::one()).is_multiple_of(m) {
            return Err(IntAlgError::DetNotOne { det, modulus: m.clone() });
        }

        let mut work = Reduction::new(self, self.reduce(b, m), m.clone());
        let mut units = Vec::with_capacity(n);
        for s in 0..n {
            units.push(work.eliminate_pivot(s)?);
        }

        // Absorb diag(u_0, …, u_{n-1}) with prod ≡ 1 by telescoping 2×2 blocks.
        let mut diag_lift = IntMatrix::identity(n);
        let mut running = BigInt::one();
        for (i, u) in units.iter().enumerate().take(n.saturating_sub(1)) {
            running = (running * u).mod_floor(m);
            if (&running - BigInt::one()).is_multiple_of(m) {
                continue;
            }
            let block = self.diagonal_block(i, &running, m)?;
            diag_lift = mat_mul(&diag_lift, &block)?;
        }

        let lifted = mul_all(&[&work.left_inv, &diag_lift, &work.right_inv]);
        self.verify_lift(b, &lifted, m)?;
        Ok(lifted)
    }

    fn verify_lift(&self, b: &IntMatrix, w: &IntMatrix, m: &BigInt) -> Result<()> {
        if !self.contains(w) {
            return Err(IntAlgError::LiftCheck(format!("{w} left the order")));
        }
        let d = determinant(w)?;
        if !d.is_one() {
            return Err(IntAlgError::LiftCheck(format!("det {d} != 1 for {w}")));
        }
        if !self.congruent(b, w, m) {
            return Err(IntAlgError::LiftCheck(format!("{w} is not congruent to {b} mod {m}")));
        }
        Ok(())
    }

    /// Identity except for the 2×2 block at `(i, i+1)`, which is
    /// `[[a, N·b], [L·m, d]]` with `a ≡ v`, `d ≡ v⁻¹`, `b ≡ 0 (mod m)` and
    /// `a·d − N·L·m·b = 1`. `N` and `L` are the order's entry divisors.
    fn diagonal_block(&self, i: usize, v: &BigInt, m: &BigInt) -> Result<IntMatrix> {
        let upper = self.entry_divisor(i, i + 1);
        let lower = self.entry_divisor(i + 1, i);
        let off = &upper * &lower * m;

        // a = v + m·k must be coprime to N·L·m. Taking k to be N·L stripped
        // of every prime it shares with v does it prime by prime.
        let mut k = &upper * &lower;
        loop {
            let g = k.gcd(v);
            if g.is_one() {
                break;
            }
            k /= g;
        }
        let a = v + m * &k;
        let eg = a.extended_gcd(&off);
        if !eg.gcd.is_one() {
            return Err(IntAlgError::LiftCheck(format!("{a} not coprime to {off}")));
        }
        // a·x + off·y = 1, so d = x and b = -y solves a·d - off·b = 1.
        // Shifting (d, b) by (j·off, j·a) keeps the determinant and d mod m;
        // pick j so that b ≡ 0 (mod m).
        let a_inv = super::inv_mod(&a, m)?;
        let b0 = -eg.y;
        let j = (-&b0 * a_inv).mod_floor(m);
        let d = eg.x + &j * &off;
        let b = b0 + &j * &a;

        let mut out = IntMatrix::identity(self.size());
        out.set(i, i, a);
        out.set(i, i + 1, upper * b);
        out.set(i + 1, i, lower * m);
        out.set(i + 1, i + 1, d);
        Ok(out)
    }
}

/// Returns `R` with `det R = 1` and `R ≡ a (mod m)` entrywise.
///
/// `a` is any square integer matrix (typically residues) with
/// `det a ≡ 1 (mod m)`. For `m = 1` the answer is the identity.
pub fn sl_lift(a: &IntMatrix, m: &BigInt) -> Result<IntMatrix> {
    if !a.is_square() {
        return Err(IntAlgError::Dimension {
            op: "sl_lift",
            detail: format!("{}x{} is not square", a.rows(), a.cols()),
        });
    }
    DiagonalOrder::full(a.rows()).lift_sl(a, m)
}

/// Working state: `left * B * right ≡ work (mod mΛ)`, where only the
/// inverses of `left` and `right` are kept.
struct Reduction<'a> {
    order: &'a DiagonalOrder,
    m: BigInt,
    work: IntMatrix,
    left_inv: IntMatrix,
    right_inv: IntMatrix,
}

impl<'a> Reduction<'a> {
    fn new(order: &'a DiagonalOrder, work: IntMatrix, m: BigInt) -> Self {
        let n = order.size();
        Reduction { order, m, work, left_inv: IntMatrix::identity(n), right_inv: IntMatrix::identity(n) }
    }

    /// row[target] += k·row[source], i.e. left multiplication by I + k·e_{target,source}.
    fn row_op(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        debug_assert!(k.is_multiple_of(&self.order.entry_divisor(target, source)));
        self.work.add_row_multiple(target, source, k);
        // left⁻¹ ← left⁻¹ · (I − k·e_{target,source})
        self.left_inv.add_col_multiple(source, target, &-k);
    }

    /// col[target] += k·col[source], i.e. right multiplication by I + k·e_{source,target}.
    fn col_op(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        debug_assert!(k.is_multiple_of(&self.order.entry_divisor(source, target)));
        self.work.add_col_multiple(target, source, k);
        // right⁻¹ ← (I − k·e_{source,target}) · right⁻¹
        self.right_inv.add_row_multiple(source, target, &-k);
    }

    /// Makes the pivot at `(s, s)` a unit mod m, clears its row and column
    /// modulo `mΛ`, and returns the pivot residue.
    fn eliminate_pivot(&mut self, s: usize) -> Result<BigInt> {
        let n = self.order.size();
        let m = self.m.clone();

        if !self.work.get(s, s).gcd(&m).is_one() {
            // Reachable pivot shifts: q_sk · work[k][s] via row ops from rows k > s.
            let shifts: Vec<BigInt> =
                (s + 1..n).map(|k| self.order.entry_divisor(s, k) * self.work.get(k, s)).collect();
            let (g, coeffs) = gcd_with_cofactors(&shifts);
            // x = m with all primes of the pivot removed, so pivot + x·g is a unit.
            let mut x = m.clone();
            loop {
                let d = x.gcd(self.work.get(s, s));
                if d.is_one() {
                    break;
                }
                x /= d;
            }
            if !(self.work.get(s, s) + &x * &g).gcd(&m).is_one() {
                return Err(IntAlgError::NotInvertible(determinant(&self.work)?, m));
            }
            for (offset, c) in coeffs.iter().enumerate() {
                let k = s + 1 + offset;
                let mult = &x * c * self.order.entry_divisor(s, k);
                self.row_op(s, k, &mult);
            }
        }

        let pivot = self.work.get(s, s).clone();
        let pivot_inv = super::inv_mod(&pivot, &m)?;

        for i in s + 1..n {
            let k = self.clearing_multiplier(i, s, &pivot_inv);
            self.row_op(i, s, &k);
        }
        for j in s + 1..n {
            let k = self.clearing_multiplier(s, j, &pivot_inv);
            self.col_op(j, s, &k);
        }
        self.work = self.order.reduce(&self.work, &m);
        Ok(pivot.mod_floor(&m))
    }

    /// Multiplier `k` such that adding `k` times the pivot's row (or column)
    /// makes entry `(i, j)` vanish modulo `m·q_ij`. `k` is itself a multiple
    /// of `q_ij`, so the operation stays inside the order.
    fn clearing_multiplier(&self, i: usize, j: usize, pivot_inv: &BigInt) -> BigInt {
        let q = self.order.entry_divisor(i, j);
        let reduced = self.work.get(i, j) / &q;
        q * (-(reduced * pivot_inv)).mod_floor(&self.m)
    }
}

/// `gcd(xs)` together with integer cofactors `c` such that `Σ c_i·x_i = gcd`.
fn gcd_with_cofactors(xs: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(xs.len());
    for x in xs {
        let eg = g.extended_gcd(x);
        for c in coeffs.iter_mut() {
            *c *= &eg.x;
        }
        coeffs.push(eg.y);
        g = eg.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
    }
    (g, coeffs)
}
