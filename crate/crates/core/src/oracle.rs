//! Brute-force ground truth for unit groups and for determinant images of
//! commuting matrix pairs. Nothing here calls into the structural code
//! except to double-check witnesses.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::abgroup::FinAbGroup;
use crate::genus::{in_t_prime, MatrixPair};
use crate::intalg::IntMatrix;

/// Largest `t` for unit enumeration and largest group order for
/// [`brute_exponent`].
pub const ENUM_LIMIT: u64 = 1_000_000;
/// Largest number of matrices enumerated on either side of a pair search.
pub const BOX_LIMIT: u64 = 5_000_000;
pub const MAX_RANK: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("group is infinite")]
    Infinite,
    #[error("matrix entry {0} does not fit the enumeration arithmetic")]
    EntryTooLarge(BigInt),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Residues `u` in `[0, t)` with `gcd(u, t) = 1`. For `t = 1` this is `{0}`,
/// the single class.
pub fn enum_units(t: u64) -> Result<BTreeSet<u64>> {
    if t == 0 || t > ENUM_LIMIT {
        return Err(OracleError::Guard(format!("modulus {t} outside 1..={ENUM_LIMIT}")));
    }
    Ok((0..t).filter(|&u| gcd(u, t) == 1).collect())
}

/// Multiplicative order of `u` mod `t` by repeated multiplication.
pub fn brute_order(u: u64, t: u64) -> u64 {
    let mut x = u % t;
    let mut k = 1;
    while x != 1 % t {
        x = ((x as u128 * u as u128) % t as u128) as u64;
        k += 1;
    }
    k
}

/// Least common multiple of element orders in `ℤ*_t`.
pub fn brute_units_exponent(t: u64) -> Result<u64> {
    let mut e = 1u64;
    for u in enum_units(t)? {
        let o = brute_order(u, t);
        e = e / gcd(e, o) * o;
    }
    Ok(e)
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::lcm(a, b)
}

/// Exponent of a finite group given by invariant factors, by walking every
/// element and taking the lcm of element orders.
pub fn brute_exponent(g: &FinAbGroup) -> Result<BigInt> {
    if !g.is_finite() {
        return Err(OracleError::Infinite);
    }
    let order = g.order().expect("finite");
    if order > BigInt::from(ENUM_LIMIT) {
        return Err(OracleError::Guard(format!("group order {order} above {ENUM_LIMIT}")));
    }
    let factors: Vec<u64> = g.invariant_factors().iter().map(|f| f.to_u64().expect("bounded")).collect();
    let mut element = vec![0u64; factors.len()];
    let mut exp = BigInt::from(1);
    loop {
        // order of an element: smallest k ≥ 1 with k·x = 0
        let mut k = 1u64;
        let mut acc = element.clone();
        while acc.iter().any(|&a| a != 0) {
            for (a, (x, f)) in acc.iter_mut().zip(element.iter().zip(&factors)) {
                *a = (*a + x) % f;
            }
            k += 1;
        }
        exp = lcm_big(&exp, &BigInt::from(k));
        // odometer
        let mut i = 0;
        loop {
            if i == factors.len() {
                return Ok(exp);
            }
            element[i] += 1;
            if element[i] < factors[i] {
                break;
            }
            element[i] = 0;
            i += 1;
        }
    }
}

/// Invariant factors of a finite abelian group from the counts
/// `|{x : x^(p^j) = 1}|`, given the group's element list and operation.
fn structure_from_elements<T: Copy + Eq>(elements: &[T], one: T, mul: impl Fn(T, T) -> T) -> Vec<u64> {
    let n = elements.len() as u64;
    let pow = |x: T, mut e: u64| {
        let (mut r, mut b) = (one, x);
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    // per prime, multiplicities of cyclic factors of order ≥ p^j
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for &p in &primes {
        let mut exps = Vec::new();
        let mut prev = 1u64;
        let mut pj = p;
        loop {
            let count = elements.iter().filter(|&&x| pow(x, pj) == one).count() as u64;
            if count == prev {
                break;
            }
            let mut ratio = count / prev;
            let mut at_least = 0;
            while ratio > 1 {
                ratio /= p;
                at_least += 1;
            }
            exps.push(at_least);
            prev = count;
            pj *= p;
        }
        // exps[j] = number of factors with order ≥ p^(j+1); turn into p-parts
        let width = exps.first().copied().unwrap_or(0);
        let mut parts = vec![1u64; width];
        for &c in &exps {
            for part in parts.iter_mut().take(c) {
                *part *= p;
            }
        }
        parts.sort_unstable();
        per_prime.push(parts);
    }
    let width = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; width];
    for parts in per_prime {
        let offset = width - parts.len();
        for (i, part) in parts.into_iter().enumerate() {
            factors[offset + i] *= part;
        }
    }
    factors
}

/// Invariant factors of `ℤ*_t` by exhaustive enumeration.
pub fn brute_units_structure(t: u64) -> Result<Vec<u64>> {
    let units: Vec<u64> = enum_units(t)?.into_iter().collect();
    let one = 1 % t;
    Ok(structure_from_elements(&units, one, |a, b| ((a as u128 * b as u128) % t as u128) as u64))
}

/// Invariant factors of `ℤ*_t/±1` by enumerating the classes `{u, -u}`.
pub fn brute_units_pm1_structure(t: u64) -> Result<Vec<u64>> {
    let rep = |u: u64| u.min((t - u) % t);
    let classes: BTreeSet<u64> = enum_units(t)?.into_iter().map(rep).collect();
    let classes: Vec<u64> = classes.into_iter().collect();
    let one = rep(1 % t);
    Ok(structure_from_elements(&classes, one, |a, b| rep(((a as u128 * b as u128) % t as u128) as u64)))
}

/// Determinant residues found for the pairs `(A₁, A₂)` in a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub modulus: u64,
    pub degree: u32,
    pub box_bound: i64,
    /// Tuples of residues mod t̂: `(det A₁, det A₂)`, dropping a side whose
    /// rank is zero.
    pub found_pairs: BTreeSet<Vec<u64>>,
    pub witnesses: BTreeMap<Vec<u64>, MatrixPair>,
}

impl OracleReport {
    pub fn is_closed_under_products(&self) -> bool {
        let t = self.modulus;
        self.found_pairs.iter().all(|a| {
            self.found_pairs.iter().all(|b| {
                let prod: Vec<u64> = a.iter().zip(b).map(|(x, y)| x * y % t).collect();
                self.found_pairs.contains(&prod)
            })
        })
    }
}

fn det_i128(m: &[i128], n: usize) -> i128 {
    match n {
        0 => 1,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            // cofactor expansion along the first row
            let mut total = 0;
            for j in 0..n {
                let minor: Vec<i128> = (1..n)
                    .flat_map(|i| (0..n).filter(move |&k| k != j).map(move |k| (i, k)))
                    .map(|(i, k)| m[i * n + k])
                    .collect();
                let term = m[j] * det_i128(&minor, n - 1);
                total += if j % 2 == 0 { term } else { -term };
            }
            total
        }
    }
}

fn product(a: &[i128], ar: usize, ac: usize, b: &[i128], bc: usize) -> Vec<i128> {
    let mut out = vec![0; ar * bc];
    for i in 0..ar {
        for k in 0..ac {
            let x = a[i * ac + k];
            if x == 0 {
                continue;
            }
            for j in 0..bc {
                out[i * bc + j] += x * b[k * bc + j];
            }
        }
    }
    out
}

fn decode(mut index: u64, n: usize, bound: i64) -> Vec<i128> {
    let width = (2 * bound + 1) as u64;
    (0..n * n)
        .map(|_| {
            let digit = index % width;
            index /= width;
            digit as i128 - bound as i128
        })
        .collect()
}

fn to_matrix(entries: &[i128], n: usize) -> IntMatrix {
    IntMatrix::new(n, n, entries.iter().map(|&e| BigInt::from(e)).collect()).expect("square")
}

fn box_size(n: usize, bound: i64) -> Option<u64> {
    ((2 * bound + 1) as u64).checked_pow((n * n) as u32)
}

/// Enumerates every `A₁` (`rank_x × rank_x`) and `A₂` (`rank_y × rank_y`)
/// with entries in `[-bound, bound]`, keeps the pairs with `A₂·C = C·A₁`
/// exactly and determinants prime to `t_hat`, and records their
/// determinant residues with a witness for each.
///
/// The two sides are matched through the common value `C·A₁ = A₂·C`.
pub fn enum_det_pairs(
    c: &IntMatrix,
    rank_x: usize,
    rank_y: usize,
    t_hat: u64,
    bound: i64,
    degree: u32,
) -> Result<OracleReport> {
    if rank_x > MAX_RANK || rank_y > MAX_RANK {
        return Err(OracleError::Guard(format!("ranks ({rank_x}, {rank_y}) above {MAX_RANK}")));
    }
    if t_hat == 0 || t_hat > ENUM_LIMIT {
        return Err(OracleError::Guard(format!("modulus {t_hat} outside 1..={ENUM_LIMIT}")));
    }
    if bound < 0 {
        return Err(OracleError::Guard(format!("negative box bound {bound}")));
    }
    if c.rows() != rank_y || c.cols() != rank_x {
        return Err(OracleError::Dimension(format!("C is {}x{}, ranks need {rank_y}x{rank_x}", c.rows(), c.cols())));
    }
    let n1 = box_size(rank_x, bound).filter(|&s| s <= BOX_LIMIT);
    let n2 = box_size(rank_y, bound).filter(|&s| s <= BOX_LIMIT);
    let (Some(n1), Some(n2)) = (n1, n2) else {
        return Err(OracleError::Guard(format!(
            "box [-{bound}, {bound}] with ranks ({rank_x}, {rank_y}) exceeds {BOX_LIMIT} matrices per side"
        )));
    };
    let c_entries: Vec<i128> = c
        .entries()
        .iter()
        .map(|e| e.to_i64().map(i128::from).ok_or_else(|| OracleError::EntryTooLarge(e.clone())))
        .collect::<Result<_>>()?;
    let t = t_hat as i128;
    let unit = |d: i128| -> Option<u64> {
        let r = d.rem_euclid(t) as u64;
        (gcd(r, t_hat) == 1).then_some(r)
    };

    // C·A₁ ↦ (det A₁ residue ↦ first index)
    let mut left: HashMap<Vec<i128>, BTreeMap<u64, u64>> = HashMap::new();
    for index in 0..n1 {
        let a1 = decode(index, rank_x, bound);
        let Some(d) = unit(det_i128(&a1, rank_x)) else { continue };
        let key = product(&c_entries, rank_y, rank_x, &a1, rank_x);
        left.entry(key).or_default().entry(d).or_insert(index);
    }

    let mut found: BTreeMap<Vec<u64>, (u64, u64)> = BTreeMap::new();
    for index in 0..n2 {
        let a2 = decode(index, rank_y, bound);
        let Some(d2) = unit(det_i128(&a2, rank_y)) else { continue };
        let key = product(&a2, rank_y, rank_y, &c_entries, rank_x);
        let Some(dets) = left.get(&key) else { continue };
        for (&d1, &i1) in dets {
            let mut tuple = Vec::with_capacity(2);
            if rank_x > 0 {
                tuple.push(d1);
            }
            if rank_y > 0 {
                tuple.push(d2);
            }
            found.entry(tuple).or_insert((i1, index));
        }
    }

    let mut witnesses = BTreeMap::new();
    for (tuple, &(i1, i2)) in &found {
        let pair = MatrixPair {
            degree,
            a1: to_matrix(&decode(i1, rank_x, bound), rank_x),
            a2: to_matrix(&decode(i2, rank_y, bound), rank_y),
        };
        assert!(
            in_t_prime(&pair.a1, &pair.a2, c, &BigInt::from(t_hat)).expect("shapes checked"),
            "oracle witness fails membership"
        );
        witnesses.insert(tuple.clone(), pair);
    }
    Ok(OracleReport { modulus: t_hat, degree, box_bound: bound, found_pairs: found.into_keys().collect(), witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[&[u64]]) -> BTreeSet<Vec<u64>> {
        v.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn units_enumeration() {
        assert_eq!(enum_units(8).unwrap(), [1, 3, 5, 7].into());
        assert_eq!(enum_units(1).unwrap(), [0].into());
        assert!(enum_units(0).is_err());
        assert_eq!(brute_units_exponent(8).unwrap(), 2);
        assert_eq!(brute_units_exponent(15).unwrap(), 4);
    }

    #[test]
    fn exponent_by_walking() {
        let g = FinAbGroup::new(0, vec![BigInt::from(2), BigInt::from(12)]).unwrap();
        assert_eq!(brute_exponent(&g).unwrap(), BigInt::from(12));
        assert_eq!(brute_exponent(&FinAbGroup::trivial()).unwrap(), BigInt::from(1));
        assert_eq!(brute_exponent(&FinAbGroup::new(1, vec![]).unwrap()), Err(OracleError::Infinite));
    }

    #[test]
    fn structures_by_enumeration() {
        assert_eq!(brute_units_structure(8).unwrap(), vec![2, 2]);
        assert_eq!(brute_units_structure(15).unwrap(), vec![2, 4]);
        assert_eq!(brute_units_structure(7).unwrap(), vec![6]);
        assert_eq!(brute_units_structure(1).unwrap(), Vec::<u64>::new());
        assert_eq!(brute_units_structure(24).unwrap(), vec![2, 2, 2]);
        assert_eq!(brute_units_pm1_structure(8).unwrap(), vec![2]);
        assert_eq!(brute_units_pm1_structure(15).unwrap(), vec![4]);
        assert_eq!(brute_units_pm1_structure(2).unwrap(), Vec::<u64>::new());
        assert_eq!(brute_units_pm1_structure(24).unwrap(), vec![2, 2]);
    }

    #[test]
    fn iso_degree_pairs() {
        let r = enum_det_pairs(&IntMatrix::from_i64(&[&[1]]), 1, 1, 5, 6, 1).unwrap();
        assert_eq!(r.found_pairs, set(&[&[1, 1], &[2, 2], &[3, 3], &[4, 4]]));
        assert_eq!(r.witnesses.len(), 4);
    }

    #[test]
    fn zero_matrix_pairs() {
        let r = enum_det_pairs(&IntMatrix::zeros(1, 1), 1, 1, 3, 4, 1).unwrap();
        assert_eq!(r.found_pairs, set(&[&[1, 1], &[1, 2], &[2, 1], &[2, 2]]));
        assert!(r.is_closed_under_products());
    }

    #[test]
    fn one_sided_pairs() {
        let r = enum_det_pairs(&IntMatrix::zeros(0, 2), 2, 0, 7, 9, 4).unwrap();
        assert_eq!(r.found_pairs, set(&[&[1], &[2], &[3], &[4], &[5], &[6]]));
        let r = enum_det_pairs(&IntMatrix::zeros(0, 0), 0, 0, 7, 9, 4).unwrap();
        assert_eq!(r.found_pairs, set(&[&[]]));
    }

    #[test]
    fn box_growth_keeps_pairs() {
        let c = IntMatrix::from_i64(&[&[2, 0], &[0, 0]]);
        let small = enum_det_pairs(&c, 2, 2, 5, 1, 2).unwrap();
        let large = enum_det_pairs(&c, 2, 2, 5, 3, 2).unwrap();
        assert!(small.found_pairs.is_subset(&large.found_pairs));
    }

    #[test]
    fn guards() {
        let c = IntMatrix::zeros(3, 3);
        assert!(matches!(enum_det_pairs(&c, 3, 3, 5, 7, 1), Err(OracleError::Guard(_))));
        let c = IntMatrix::zeros(4, 4);
        assert!(matches!(enum_det_pairs(&c, 4, 4, 5, 1, 1), Err(OracleError::Guard(_))));
        assert!(matches!(enum_det_pairs(&IntMatrix::zeros(1, 1), 1, 1, 2_000_000, 1, 1), Err(OracleError::Guard(_))));
        assert!(matches!(enum_det_pairs(&IntMatrix::zeros(1, 2), 1, 1, 5, 1, 1), Err(OracleError::Dimension(_))));
    }

    #[test]
    fn cofactor_determinant() {
        assert_eq!(det_i128(&[2, 0, 1, 1, 3, 2, 1, 1, 4], 3), 18);
        assert_eq!(det_i128(&[], 0), 1);
    }
}
