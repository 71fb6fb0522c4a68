use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `u * m * v == d` with `u`, `v` unimodular and `d` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// The diagonal of `d`; nonzero entries first, each dividing the next.
    pub fn diagonal(&self) -> Vec<BigInt> {
        self.d.diagonal_entries()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// True when `d` is diagonal, nonnegative, and its diagonal is a
/// divisibility chain (zeros, if any, trailing).
pub fn is_smith_form(d: &IntMatrix) -> bool {
    if !d.is_diagonal() {
        return false;
    }
    let diag = d.diagonal_entries();
    if diag.iter().any(Signed::is_negative) {
        return false;
    }
    diag.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) })
}

/// Smith normal form by elementary row and column operations.
///
/// The pivot is always the entry of least absolute value in the remaining
/// lower-right block, ties going to the lowest (row, col). Output is
/// therefore a deterministic function of the input.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for s in 0..rows.min(cols) {
        loop {
            let Some((pr, pc)) = least_pivot(&a, s) else {
                return SnfDecomposition { u, d: a, v };
            };
            a.swap_rows(s, pr);
            u.swap_rows(s, pr);
            a.swap_cols(s, pc);
            v.swap_cols(s, pc);

            let mut dirty = false;
            for i in s + 1..rows {
                let q = a.get(i, s).div_floor(a.get(s, s));
                if !q.is_zero() {
                    let k = -q;
                    a.add_row_multiple(i, s, &k);
                    u.add_row_multiple(i, s, &k);
                }
                dirty |= !a.get(i, s).is_zero();
            }
            for j in s + 1..cols {
                let q = a.get(s, j).div_floor(a.get(s, s));
                if !q.is_zero() {
                    let k = -q;
                    a.add_col_multiple(j, s, &k);
                    v.add_col_multiple(j, s, &k);
                }
                dirty |= !a.get(s, j).is_zero();
            }
            if dirty {
                continue;
            }

            // Row and column are clear; the pivot must also divide the rest.
            let p = a.get(s, s).clone();
            let offender = (s + 1..rows)
                .flat_map(|i| (s + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&p));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::from(1);
                    a.add_row_multiple(s, i, &one);
                    u.add_row_multiple(s, i, &one);
                }
                None => {
                    if p.is_negative() {
                        a.negate_row(s);
                        u.negate_row(s);
                    }
                    break;
                }
            }
        }
    }
    SnfDecomposition { u, d: a, v }
}

fn least_pivot(a: &IntMatrix, s: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in s..a.rows() {
        for j in s..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                best = Some((ax, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}
