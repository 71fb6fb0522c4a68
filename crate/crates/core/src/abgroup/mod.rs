//! Finitely generated abelian groups in invariant-factor form.
//!
//! An element of a [`FinAbGroup`] is a coordinate vector: one residue per
//! invariant factor (in order), followed by one integer per free summand.

mod units;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intalg::{mat_mul, smith_normal_form, IntAlgError, IntMatrix};

pub use units::{dlog, units_group, units_mod_pm1, UnitsModSign, UnitsPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbGroupError {
    #[error("group has free rank {0}, so its exponent is infinite")]
    InfiniteExponent(usize),
    #[error("element has {found} coordinates, group needs {expected}")]
    CoordinateLength { expected: usize, found: usize },
    #[error("invalid invariant factors {0:?}: each must be >= 2 and divide the next")]
    InvalidFactors(Vec<BigInt>),
    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: BigInt, modulus: u64 },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error(transparent)]
    IntAlg(#[from] IntAlgError),
}

pub type Result<T> = std::result::Result<T, AbGroupError>;

/// `ℤ^free_rank ⊕ ℤ/d_1 ⊕ … ⊕ ℤ/d_r` with `d_1 | d_2 | … | d_r`, `d_1 ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FinAbGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self> {
        let two = BigInt::from(2);
        let chain_ok = invariant_factors.iter().all(|d| *d >= two)
            && invariant_factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !chain_ok {
            return Err(AbGroupError::InvalidFactors(invariant_factors));
        }
        Ok(FinAbGroup { free_rank, invariant_factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup::default()
    }

    /// `ℤ/n`; trivial for `n = 1`, infinite cyclic for `n = 0`.
    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => FinAbGroup { free_rank: 1, invariant_factors: vec![] },
            1 => FinAbGroup::trivial(),
            _ => FinAbGroup { free_rank: 0, invariant_factors: vec![BigInt::from(n)] },
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Number of coordinates of an element.
    pub fn coord_count(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    /// Smallest `n ≥ 1` killing every element.
    pub fn exponent(&self) -> Result<BigInt> {
        if !self.is_finite() {
            return Err(AbGroupError::InfiniteExponent(self.free_rank));
        }
        Ok(self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one))
    }

    /// Canonical coordinates: torsion residues in `[0, d_i)`, free parts as is.
    pub fn reduce(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_len(x)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, v)| match self.invariant_factors.get(i) {
                Some(d) => v.mod_floor(d),
                None => v.clone(),
            })
            .collect())
    }

    pub fn is_identity(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.reduce(x)?.iter().all(Zero::is_zero))
    }

    /// `G^k`, normalized.
    pub fn power(&self, k: usize) -> FinAbGroup {
        let orders: Vec<BigInt> = (0..k).flat_map(|_| self.cyclic_orders()).collect();
        cyclic_sum(&orders).group
    }

    /// Orders of the coordinate summands; `0` for a free summand.
    fn cyclic_orders(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), self.free_rank)).collect()
    }

    fn check_len(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.coord_count() {
            return Err(AbGroupError::CoordinateLength { expected: self.coord_count(), found: x.len() });
        }
        Ok(())
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        parts.extend(std::iter::repeat_n("Z".to_string(), self.free_rank));
        write!(f, "{}", parts.join(" + "))
    }
}

/// A normalized group together with the change of coordinates from the
/// presentation's generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub group: FinAbGroup,
    /// `n_generators × group.coord_count()`; a generator-coordinate row vector
    /// times this matrix gives (unreduced) group coordinates.
    pub coord_map: IntMatrix,
}

impl Normalized {
    pub fn map_element(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.coord_map.rows() {
            return Err(AbGroupError::CoordinateLength { expected: self.coord_map.rows(), found: x.len() });
        }
        let row = IntMatrix::new(1, x.len(), x.to_vec())?;
        let image = mat_mul(&row, &self.coord_map)?;
        self.group.reduce(image.row(0))
    }
}

/// The group `ℤ^n / (row space of relations)`, with coordinate map.
pub fn normalize_with_map(relations: &IntMatrix, n_generators: usize) -> Result<Normalized> {
    if relations.cols() != n_generators {
        return Err(AbGroupError::CoordinateLength { expected: n_generators, found: relations.cols() });
    }
    let snf = smith_normal_form(relations);
    let diag = snf.diagonal();
    let mut torsion = Vec::new();
    let mut free = Vec::new();
    for j in 0..n_generators {
        let d = diag.get(j).map(|d| d.abs()).unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            free.push(j);
        } else if !d.is_one() {
            torsion.push((j, d));
        }
    }
    let kept: Vec<usize> = torsion.iter().map(|(j, _)| *j).chain(free.iter().copied()).collect();
    let mut coord_map = IntMatrix::zeros(n_generators, kept.len());
    for (new_col, &old_col) in kept.iter().enumerate() {
        for i in 0..n_generators {
            coord_map.set(i, new_col, snf.v.get(i, old_col).clone());
        }
    }
    let group = FinAbGroup::new(free.len(), torsion.into_iter().map(|(_, d)| d).collect())?;
    Ok(Normalized { group, coord_map })
}

pub fn normalize(relations: &IntMatrix, n_generators: usize) -> Result<FinAbGroup> {
    Ok(normalize_with_map(relations, n_generators)?.group)
}

/// `⊕ ℤ/n_i` for arbitrary orders (0 meaning ℤ), normalized.
pub fn cyclic_sum(orders: &[BigInt]) -> Normalized {
    let n = orders.len();
    let rows: Vec<usize> = (0..n).filter(|&i| !orders[i].is_zero()).collect();
    let mut rel = IntMatrix::zeros(rows.len(), n);
    for (r, &i) in rows.iter().enumerate() {
        rel.set(r, i, orders[i].clone());
    }
    normalize_with_map(&rel, n).expect("column count matches by construction")
}

/// `G / ⟨gens⟩` with the coordinate map from `G`'s coordinates.
pub fn quotient_by_with_map(g: &FinAbGroup, gens: &[Vec<BigInt>]) -> Result<Normalized> {
    let n = g.coord_count();
    for x in gens {
        g.check_len(x)?;
    }
    let t = g.invariant_factors.len();
    let mut rel = IntMatrix::zeros(t + gens.len(), n);
    for (i, d) in g.invariant_factors.iter().enumerate() {
        rel.set(i, i, d.clone());
    }
    for (r, x) in gens.iter().enumerate() {
        for (j, v) in x.iter().enumerate() {
            rel.set(t + r, j, v.clone());
        }
    }
    normalize_with_map(&rel, n)
}

pub fn quotient_by(g: &FinAbGroup, gens: &[Vec<BigInt>]) -> Result<FinAbGroup> {
    Ok(quotient_by_with_map(g, gens)?.group)
}

/// Exponent of a finite group.
pub fn exponent(g: &FinAbGroup) -> Result<BigInt> {
    g.exponent()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn finite(factors: &[i64]) -> FinAbGroup {
        FinAbGroup::new(0, ints(factors)).unwrap()
    }

    #[test]
    fn exponent_examples() {
        // Z/6 + Z/4 normalizes to Z/2 + Z/12
        let g = cyclic_sum(&ints(&[6, 4])).group;
        assert_eq!(g, finite(&[2, 12]));
        assert_eq!(exponent(&g).unwrap(), BigInt::from(12));
        assert_eq!(exponent(&FinAbGroup::trivial()).unwrap(), BigInt::from(1));
        assert_eq!(exponent(&finite(&[2, 2])).unwrap(), BigInt::from(2));
        assert!(matches!(exponent(&FinAbGroup::cyclic(0)), Err(AbGroupError::InfiniteExponent(1))));
    }

    #[test]
    fn invalid_factor_lists_rejected() {
        assert!(FinAbGroup::new(0, ints(&[4, 2])).is_err());
        assert!(FinAbGroup::new(0, ints(&[1, 2])).is_err());
        assert!(FinAbGroup::new(1, ints(&[3, 6])).is_ok());
    }

    #[test]
    fn normalize_examples() {
        let free = normalize(&IntMatrix::zeros(0, 2), 2).unwrap();
        assert_eq!(free.free_rank(), 2);
        assert!(free.invariant_factors().is_empty());
        assert_eq!(normalize(&IntMatrix::from_i64(&[&[2, 0], &[0, 4]]), 2).unwrap(), finite(&[2, 4]));
        assert_eq!(normalize(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]), 2).unwrap(), finite(&[2, 4]));
        assert!(normalize(&IntMatrix::zeros(1, 3), 2).is_err());
    }

    #[test]
    fn normalize_mixed_free_and_torsion() {
        // <a, b, c | 2a + 4b, 6b> : SNF gives (2, 6) on two columns, c free.
        let g = normalize(&IntMatrix::from_i64(&[&[2, 4, 0], &[0, 6, 0]]), 3).unwrap();
        assert_eq!(g, FinAbGroup::new(1, ints(&[2, 6])).unwrap());
        assert_eq!(g.to_string(), "Z/2 + Z/6 + Z");
        assert_eq!(g.order(), None);
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_by(&finite(&[4]), &[ints(&[2])]).unwrap(), finite(&[2]));
        // Z/4 + Z/2 in the (4, 2) coordinate order is not a chain, so go through cyclic_sum.
        let n = cyclic_sum(&ints(&[4, 2]));
        let gen = n.map_element(&ints(&[2, 1])).unwrap();
        assert_eq!(quotient_by(&n.group, &[gen]).unwrap(), finite(&[4]));
        let g = finite(&[2, 4]);
        assert_eq!(quotient_by(&g, &[]).unwrap(), g);
        assert!(matches!(
            quotient_by(&g, &[ints(&[1])]),
            Err(AbGroupError::CoordinateLength { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn quotient_by_all_generators_is_trivial() {
        let g = FinAbGroup::new(1, ints(&[3, 6])).unwrap();
        let gens = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])];
        assert!(quotient_by(&g, &gens).unwrap().is_trivial());
    }

    #[test]
    fn power_of_group() {
        assert_eq!(finite(&[2, 4]).power(2), finite(&[2, 2, 4, 4]));
        assert!(finite(&[5]).power(0).is_trivial());
    }
}
