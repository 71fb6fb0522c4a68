//! The genus group of a map, assembled as the cokernel of the determinant
//! image of self-equivalences inside `(ℤ*_t̂/±1)^k`.
//!
//! For each degree `n` with rational ranks `r_X`, `r_Y` and integer matrix
//! `C` (`r_Y × r_X`), the relevant monoid is
//!
//! ```text
//! T' = { (A₁, A₂) : A₂·C = C·A₁,  gcd(det A₁, t̂) = gcd(det A₂, t̂) = 1 }
//! ```
//!
//! and only the determinants of its elements modulo `t̂` matter.

mod claim;
mod sample;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{cyclic_sum, quotient_by, units_group, units_mod_pm1, AbGroupError, FinAbGroup};
use crate::intalg::{
    determinant, is_smith_form, mat_mul, smith_normal_form, unimodular_inverse, IntAlgError, IntMatrix,
};
use crate::model::{k_of, t_hat, DegreeKind, MapModel, ModelError};

pub use claim::{check_claim, claim_factor, ClaimFactors};
pub use sample::sample_admissible;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenusError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("the pair is not in T': {0}")]
    NotInTPrime(String),
    #[error("det {which} = {det} is not congruent to 1 modulo {modulus}")]
    DetNotOne { which: &'static str, det: BigInt, modulus: BigInt },
    #[error(
        "no unimodular solution exists: the shared diagonal block has determinant {det} mod {modulus}, \
         which is not ±1, while both sides have a free block"
    )]
    Obstruction { det: BigInt, modulus: BigInt },
    #[error("no admissible pair found in {0} draws")]
    SamplingExhausted(usize),
    #[error("claim postcondition failed: {0}")]
    Postcondition(String),
    #[error("self-map image {index}: expected {expected} coordinates, found {found}")]
    TupleLength { index: usize, expected: usize, found: usize },
    #[error("self-map image {index}, coordinate {coordinate}: {value} is not a unit modulo {modulus}")]
    NonUnit { index: usize, coordinate: usize, value: BigInt, modulus: u64 },
    #[error("t̂ = {0} is too large for the unit-group machinery")]
    ModulusTooLarge(BigUint),
    #[error(transparent)]
    IntAlg(#[from] IntAlgError),
    #[error(transparent)]
    AbGroup(#[from] AbGroupError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, GenusError>;

/// A candidate element `(A₁, A₂)` of `T'` in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPair {
    pub degree: u32,
    pub a1: IntMatrix,
    pub a2: IntMatrix,
}

impl MatrixPair {
    pub fn dets(&self) -> (BigInt, BigInt) {
        (determinant(&self.a1).expect("square"), determinant(&self.a2).expect("square"))
    }
}

fn check_pair_shapes(a1: &IntMatrix, a2: &IntMatrix, c: &IntMatrix) -> Result<()> {
    let ok = a1.is_square() && a2.is_square() && c.rows() == a2.rows() && c.cols() == a1.rows();
    if !ok {
        return Err(GenusError::Dimension(format!(
            "A1 {}x{}, A2 {}x{}, C {}x{}",
            a1.rows(),
            a1.cols(),
            a2.rows(),
            a2.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(())
}

/// `A₂·C = C·A₁` exactly and both determinants are prime to `t̂`.
pub fn in_t_prime(a1: &IntMatrix, a2: &IntMatrix, c: &IntMatrix, t_hat: &BigInt) -> Result<bool> {
    check_pair_shapes(a1, a2, c)?;
    if mat_mul(a2, c)? != mat_mul(c, a1)? {
        return Ok(false);
    }
    Ok(determinant(a1)?.gcd(t_hat).is_one() && determinant(a2)?.gcd(t_hat).is_one())
}

/// A unimodular change of bases making `C` diagonal.
///
/// `diagonal = u · C · v`. Pairs move by `(A₁, A₂) ↦ (v⁻¹A₁v, u·A₂·u⁻¹)`,
/// which is a determinant-preserving bijection between the two `T'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalization {
    pub diagonal: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl Diagonalization {
    pub fn is_trivial(&self) -> bool {
        self.u == IntMatrix::identity(self.u.rows()) && self.v == IntMatrix::identity(self.v.rows())
    }

    /// Nonzero diagonal entries of `diagonal`, which come first.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        self.diagonal.diagonal_entries().into_iter().take_while(|d| !num_traits::Zero::is_zero(d)).collect()
    }

    pub fn to_diagonal(&self, a1: &IntMatrix, a2: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
        Ok((mat_mul(&mat_mul(&self.v_inv, a1)?, &self.v)?, mat_mul(&mat_mul(&self.u, a2)?, &self.u_inv)?))
    }

    pub fn from_diagonal(&self, a1: &IntMatrix, a2: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
        Ok((mat_mul(&mat_mul(&self.v, a1)?, &self.v_inv)?, mat_mul(&mat_mul(&self.u_inv, a2)?, &self.u)?))
    }
}

/// Identity conjugators when `C` is already diagonal with its nonzero
/// entries leading (signs and divisibility are not required); Smith form
/// otherwise.
pub fn reduce_to_diagonal(c: &IntMatrix) -> Diagonalization {
    let diag = c.diagonal_entries();
    let leading = diag.iter().take_while(|d| !num_traits::Zero::is_zero(*d)).count();
    let prefix_form = c.is_diagonal() && diag[leading..].iter().all(num_traits::Zero::is_zero);
    if prefix_form || is_smith_form(c) {
        let (r, k) = (c.rows(), c.cols());
        return Diagonalization {
            diagonal: c.clone(),
            u: IntMatrix::identity(r),
            v: IntMatrix::identity(k),
            u_inv: IntMatrix::identity(r),
            v_inv: IntMatrix::identity(k),
        };
    }
    let snf = smith_normal_form(c);
    let u_inv = unimodular_inverse(&snf.u).expect("SNF transform is unimodular");
    let v_inv = unimodular_inverse(&snf.v).expect("SNF transform is unimodular");
    Diagonalization { diagonal: snf.d, u: snf.u, v: snf.v, u_inv, v_inv }
}

/// The subgroup `{(det A₁, det A₂) mod t̂ : (A₁, A₂) ∈ T'}` of `(ℤ*_t̂)^arity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetSubgroup {
    pub kind: DegreeKind,
    pub modulus: u64,
    /// Unit tuples mod t̂ generating the subgroup.
    pub generators: Vec<Vec<u64>>,
    pub as_group: FinAbGroup,
}

impl DetSubgroup {
    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// Membership of a determinant tuple (residues mod t̂).
    pub fn contains(&self, tuple: &[u64]) -> bool {
        let t = self.modulus;
        if tuple.len() != self.tuple_width() || tuple.iter().any(|&u| u.gcd(&t) != 1) {
            return false;
        }
        match self.kind {
            DegreeKind::Iso => tuple[0] % t == tuple[1] % t,
            _ => true,
        }
    }

    /// Tuple width as recorded in `T'`: two determinants for `Iso` even
    /// though they coincide.
    pub fn tuple_width(&self) -> usize {
        match self.kind {
            DegreeKind::Iso => 2,
            k => k.arity(),
        }
    }
}

/// Classifies `T'` for one degree and returns its determinant image.
///
/// `c` is `None` exactly when one of the ranks is zero.
pub fn realizable_det_subgroup(c: Option<&IntMatrix>, rank_x: usize, rank_y: usize, t_hat: u64) -> Result<DetSubgroup> {
    let kind = match (rank_x, rank_y, c) {
        (0, 0, None) => DegreeKind::Empty,
        (_, 0, None) => DegreeKind::SourceOnly,
        (0, _, None) => DegreeKind::TargetOnly,
        (_, _, Some(c)) if rank_x > 0 && rank_y > 0 => {
            if c.rows() != rank_y || c.cols() != rank_x {
                return Err(GenusError::Dimension(format!(
                    "C is {}x{}, ranks need {rank_y}x{rank_x}",
                    c.rows(),
                    c.cols()
                )));
            }
            if c.is_square() && !num_traits::Zero::is_zero(&determinant(c)?) {
                DegreeKind::Iso
            } else {
                DegreeKind::General
            }
        }
        _ => return Err(GenusError::Dimension(format!("matrix presence does not match ranks ({rank_x}, {rank_y})"))),
    };
    let units = units_group(t_hat)?;
    let gens = units.generators().to_vec();
    let one = 1 % t_hat;
    let (generators, as_group) = match kind {
        DegreeKind::Empty => (vec![], FinAbGroup::trivial()),
        DegreeKind::SourceOnly | DegreeKind::TargetOnly => {
            (gens.iter().map(|&g| vec![g]).collect(), units.group().clone())
        }
        DegreeKind::Iso => (gens.iter().map(|&g| vec![g, g]).collect(), units.group().clone()),
        DegreeKind::General => {
            let left = gens.iter().map(|&g| vec![g, one]);
            let right = gens.iter().map(|&g| vec![one, g]);
            (left.chain(right).collect(), units.group().power(2))
        }
    };
    Ok(DetSubgroup { kind, modulus: t_hat, generators, as_group })
}

/// Which determinant a coordinate of `(ℤ*_t̂/±1)^k` records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
    /// An iso degree: `det A₁ = det A₂`.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinate {
    pub degree: u32,
    pub side: Side,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::X => "X",
            Side::Y => "Y",
            Side::Shared => "X=Y",
        };
        write!(f, "deg {} {side}", self.degree)
    }
}

/// Coordinates of the upper bound group, ascending degree, X before Y,
/// one shared coordinate for an iso degree.
pub fn coordinates(m: &MapModel) -> Vec<Coordinate> {
    let mut out = Vec::new();
    for degree in m.degrees() {
        match m.kind(degree) {
            DegreeKind::Empty => {}
            DegreeKind::SourceOnly => out.push(Coordinate { degree, side: Side::X }),
            DegreeKind::TargetOnly => out.push(Coordinate { degree, side: Side::Y }),
            DegreeKind::Iso => out.push(Coordinate { degree, side: Side::Shared }),
            DegreeKind::General => {
                out.push(Coordinate { degree, side: Side::X });
                out.push(Coordinate { degree, side: Side::Y });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusReport {
    pub t_hat: BigUint,
    pub k: usize,
    pub coordinates: Vec<Coordinate>,
    /// `(ℤ*_t̂/±1)^k`.
    pub upper_bound: FinAbGroup,
    /// Self-map images in `upper_bound` coordinates.
    pub image_gens: Vec<Vec<BigInt>>,
    pub genus_group: FinAbGroup,
}

pub fn t_hat_u64(m: &MapModel) -> Result<u64> {
    let t = t_hat(m);
    t.to_u64().filter(|&v| v < (1 << 62)).ok_or(GenusError::ModulusTooLarge(t))
}

/// Computes the genus group presented by the exact sequence, given the
/// determinant images of the self-equivalences of `f`.
///
/// Each entry of `selfmap_images` has one unit per coordinate (see
/// [`coordinates`]). With no images the result is the upper bound itself.
pub fn genus_group(m: &MapModel, selfmap_images: &[Vec<BigInt>]) -> Result<GenusReport> {
    let t = t_hat_u64(m)?;
    let k = k_of(m);
    let coords = coordinates(m);
    debug_assert_eq!(coords.len(), k);

    let sign_quotient = units_mod_pm1(t)?;
    let block = sign_quotient.group().invariant_factors().to_vec();
    let orders: Vec<BigInt> = (0..k).flat_map(|_| block.iter().cloned()).collect();
    let upper = cyclic_sum(&orders);

    let mut image_gens = Vec::with_capacity(selfmap_images.len());
    for (index, tuple) in selfmap_images.iter().enumerate() {
        if tuple.len() != k {
            return Err(GenusError::TupleLength { index, expected: k, found: tuple.len() });
        }
        let mut product_coords = Vec::with_capacity(orders.len());
        for (coordinate, u) in tuple.iter().enumerate() {
            let projected = sign_quotient.project(u).map_err(|e| match e {
                AbGroupError::NotUnit { .. } => GenusError::NonUnit { index, coordinate, value: u.clone(), modulus: t },
                other => other.into(),
            })?;
            product_coords.extend(projected);
        }
        image_gens.push(upper.map_element(&product_coords)?);
    }
    let genus = quotient_by(&upper.group, &image_gens)?;
    Ok(GenusReport {
        t_hat: BigUint::from(t),
        k,
        coordinates: coords,
        upper_bound: upper.group,
        image_gens,
        genus_group: genus,
    })
}

/// Whether a tuple of residues has a unit in every slot.
pub fn all_units(tuple: &[BigInt], t: u64) -> bool {
    let m = BigInt::from(t);
    tuple.iter().all(|u| u.mod_floor(&m).gcd(&m).is_one())
}
