//! Graded algebraic models of spaces and maps, and the numerical invariants
//! read off them.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intalg::{determinant, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("degree {degree}: {field} must be at least 1")]
    BadExponent { degree: u32, field: &'static str },
    #[error("degree {degree}: listed twice in {side}")]
    DuplicateDegree { degree: u32, side: &'static str },
    #[error("flavors differ: X is {x:?}, Y is {y:?}")]
    FlavorMismatch { x: Flavor, y: Flavor },
    #[error("degree {degree}: C has shape {found_rows}x{found_cols}, expected rank_Y x rank_X = {rows}x{cols}")]
    MatrixShape { degree: u32, rows: usize, cols: usize, found_rows: usize, found_cols: usize },
    #[error("degree {degree}: no matrix C given but rank_X = {rank_x} and rank_Y = {rank_y} are both positive")]
    MissingMatrix { degree: u32, rank_x: usize, rank_y: usize },
    #[error("degree {degree}: a matrix C is given but rank_X = {rank_x}, rank_Y = {rank_y}")]
    UnexpectedMatrix { degree: u32, rank_x: usize, rank_y: usize },
}

/// Which side of the duality the inputs describe. Every formula is shared;
/// the flag only records how to read the data (homotopy vs. homology).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    H,
    #[serde(rename = "coH")]
    CoH,
}

/// Data of one space in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeData {
    pub rank: usize,
    /// Exponent of the kernel of the Hurewicz comparison map σ_n.
    pub ker_exp: BigUint,
    /// Exponent of the cokernel of σ_n.
    pub coker_exp: BigUint,
    /// Exponent of the torsion group entering s_n.
    pub torsion_exp: BigUint,
}

impl DegreeData {
    pub fn new(rank: usize, ker_exp: u64, coker_exp: u64, torsion_exp: u64) -> Self {
        DegreeData { rank, ker_exp: ker_exp.into(), coker_exp: coker_exp.into(), torsion_exp: torsion_exp.into() }
    }

    pub fn trivial() -> Self {
        DegreeData::new(0, 1, 1, 1)
    }

    fn validate(&self, degree: u32) -> Result<(), ModelError> {
        for (field, v) in
            [("ker_exp", &self.ker_exp), ("coker_exp", &self.coker_exp), ("torsion_exp", &self.torsion_exp)]
        {
            if v.is_zero() {
                return Err(ModelError::BadExponent { degree, field });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceModel {
    flavor: Flavor,
    degrees: BTreeMap<u32, DegreeData>,
}

impl SpaceModel {
    pub fn new(flavor: Flavor, degrees: BTreeMap<u32, DegreeData>) -> Result<Self, ModelError> {
        for (&n, d) in &degrees {
            if n == 0 {
                return Err(ModelError::ZeroDegree);
            }
            d.validate(n)?;
        }
        Ok(SpaceModel { flavor, degrees })
    }

    pub fn empty(flavor: Flavor) -> Self {
        SpaceModel { flavor, degrees: BTreeMap::new() }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn degrees(&self) -> &BTreeMap<u32, DegreeData> {
        &self.degrees
    }

    pub fn degree(&self, n: u32) -> DegreeData {
        self.degrees.get(&n).cloned().unwrap_or_else(DegreeData::trivial)
    }

    pub fn rank(&self, n: u32) -> usize {
        self.degrees.get(&n).map_or(0, |d| d.rank)
    }

    /// Largest degree present, 0 for an empty model.
    pub fn top_degree(&self) -> u32 {
        self.degrees.keys().next_back().copied().unwrap_or(0)
    }
}

pub fn t_n(s: &SpaceModel, n: u32) -> BigUint {
    s.degree(n + 1).coker_exp * s.degree(n).ker_exp
}

pub fn t_total(s: &SpaceModel) -> BigUint {
    (1..=s.top_degree()).map(|n| t_n(s, n)).product()
}

pub fn s_n(s: &SpaceModel, n: u32) -> BigUint {
    let d = s.degree(n);
    if d.rank > 0 {
        d.torsion_exp
    } else {
        BigUint::one()
    }
}

/// Number of degrees with nonzero rational rank.
pub fn l_count(s: &SpaceModel) -> usize {
    s.degrees.values().filter(|d| d.rank > 0).count()
}

/// How one degree of a map contributes determinant coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    /// Both ranks are zero.
    Empty,
    /// Only X has rational rank here.
    SourceOnly,
    /// Only Y has rational rank here.
    TargetOnly,
    /// `C` is square with nonzero determinant.
    Iso,
    /// Anything else: both determinants vary independently.
    General,
}

impl DegreeKind {
    pub fn arity(self) -> usize {
        match self {
            DegreeKind::Empty => 0,
            DegreeKind::SourceOnly | DegreeKind::TargetOnly | DegreeKind::Iso => 1,
            DegreeKind::General => 2,
        }
    }
}

/// A map `f: X → Y` given by one integer matrix per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapModel {
    x: SpaceModel,
    y: SpaceModel,
    c: BTreeMap<u32, IntMatrix>,
}

impl MapModel {
    pub fn new(x: SpaceModel, y: SpaceModel, c: BTreeMap<u32, IntMatrix>) -> Result<Self, ModelError> {
        if x.flavor != y.flavor {
            return Err(ModelError::FlavorMismatch { x: x.flavor, y: y.flavor });
        }
        for (&degree, m) in &c {
            let (rank_x, rank_y) = (x.rank(degree), y.rank(degree));
            if rank_x == 0 || rank_y == 0 {
                return Err(ModelError::UnexpectedMatrix { degree, rank_x, rank_y });
            }
            if m.rows() != rank_y || m.cols() != rank_x {
                return Err(ModelError::MatrixShape {
                    degree,
                    rows: rank_y,
                    cols: rank_x,
                    found_rows: m.rows(),
                    found_cols: m.cols(),
                });
            }
        }
        let model = MapModel { x, y, c };
        for degree in model.degrees() {
            let (rank_x, rank_y) = (model.x.rank(degree), model.y.rank(degree));
            if rank_x > 0 && rank_y > 0 && !model.c.contains_key(&degree) {
                return Err(ModelError::MissingMatrix { degree, rank_x, rank_y });
            }
        }
        Ok(model)
    }

    pub fn source(&self) -> &SpaceModel {
        &self.x
    }

    pub fn target(&self) -> &SpaceModel {
        &self.y
    }

    pub fn flavor(&self) -> Flavor {
        self.x.flavor
    }

    pub fn matrix(&self, n: u32) -> Option<&IntMatrix> {
        self.c.get(&n)
    }

    pub fn matrices(&self) -> &BTreeMap<u32, IntMatrix> {
        &self.c
    }

    /// Every degree present in X or Y, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.x.degrees.keys().chain(self.y.degrees.keys()).copied().collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn kind(&self, n: u32) -> DegreeKind {
        match (self.x.rank(n), self.y.rank(n)) {
            (0, 0) => DegreeKind::Empty,
            (_, 0) => DegreeKind::SourceOnly,
            (0, _) => DegreeKind::TargetOnly,
            _ => {
                let c = &self.c[&n];
                let iso = c.is_square() && !determinant(c).expect("square").is_zero();
                if iso {
                    DegreeKind::Iso
                } else {
                    DegreeKind::General
                }
            }
        }
    }
}

pub fn t_hat(m: &MapModel) -> BigUint {
    let top = m.x.top_degree().max(m.y.top_degree());
    let ty = t_total(&m.y);
    let s: BigUint = (1..=top).map(|n| s_n(&m.x, n) * s_n(&m.y, n)).product();
    t_total(&m.x) * &ty * &ty * s
}

/// Sum over degrees of the per-degree determinant arity.
pub fn k_of(m: &MapModel) -> usize {
    m.degrees().into_iter().map(|n| m.kind(n).arity()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(entries: &[(u32, DegreeData)]) -> SpaceModel {
        SpaceModel::new(Flavor::H, entries.iter().cloned().collect()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn t_n_examples() {
        let s = space(&[(3, DegreeData::new(1, 2, 1, 1)), (4, DegreeData::new(0, 1, 3, 1))]);
        assert_eq!(t_n(&s, 3), big(6));
        let e = SpaceModel::empty(Flavor::H);
        assert!((1..10).all(|n| t_n(&e, n) == big(1)));
        let s = space(&[(5, DegreeData::new(1, 4, 1, 1))]);
        assert_eq!(t_n(&s, 5), big(4));
    }

    #[test]
    fn t_total_examples() {
        let s = space(&[(3, DegreeData::new(1, 6, 1, 1))]);
        assert_eq!(t_total(&s), big(6));
        assert_eq!(t_total(&SpaceModel::empty(Flavor::CoH)), big(1));
        let s = space(&[(2, DegreeData::new(1, 2, 1, 1)), (3, DegreeData::new(1, 3, 1, 1))]);
        assert_eq!(t_total(&s), big(6));
        // coker at the top degree enters through t_{N-1}; the one at N+1 counts as 1
        let s = space(&[(2, DegreeData::new(1, 1, 5, 1))]);
        assert_eq!(t_total(&s), big(5));
        assert_eq!(t_n(&s, 2), big(1));
    }

    #[test]
    fn s_n_examples() {
        let s = space(&[(3, DegreeData::new(1, 1, 1, 4))]);
        assert_eq!(s_n(&s, 3), big(4));
        let s = space(&[(3, DegreeData::new(0, 1, 1, 4))]);
        assert_eq!(s_n(&s, 3), big(1));
        assert_eq!(s_n(&s, 7), big(1));
    }

    #[test]
    fn l_count_examples() {
        let s = space(&[(3, DegreeData::new(2, 1, 1, 1)), (7, DegreeData::new(1, 1, 1, 1))]);
        assert_eq!(l_count(&s), 2);
        assert_eq!(l_count(&SpaceModel::empty(Flavor::H)), 0);
        let s = space(&[(3, DegreeData::new(0, 2, 1, 1))]);
        assert_eq!(l_count(&s), 0);
    }

    fn single(c: &[&[i64]], rx: usize, ry: usize) -> MapModel {
        let x = space(&[(3, DegreeData::new(rx, 1, 1, 1))]);
        let y = space(&[(3, DegreeData::new(ry, 1, 1, 1))]);
        let mats = if rx > 0 && ry > 0 { [(3, IntMatrix::from_i64(c))].into() } else { BTreeMap::new() };
        MapModel::new(x, y, mats).unwrap()
    }

    #[test]
    fn t_hat_examples() {
        // t(X) = 2, t(Y) = 3, s-product 4 (2·2 in degree 1): 2·9·4
        let x = space(&[(1, DegreeData::new(1, 2, 1, 2))]);
        let y = space(&[(1, DegreeData::new(1, 3, 1, 2))]);
        let m = MapModel::new(x, y, [(1, IntMatrix::from_i64(&[&[1]]))].into()).unwrap();
        assert_eq!(t_hat(&m), big(72));
        assert_eq!(t_hat(&single(&[&[1]], 1, 1)), big(1));
        let x = space(&[(2, DegreeData::new(1, 1, 1, 1))]);
        let y = space(&[(2, DegreeData::new(0, 2, 1, 1))]);
        assert_eq!(t_hat(&MapModel::new(x, y, BTreeMap::new()).unwrap()), big(4));
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_of(&single(&[&[1]], 1, 1)), 1);
        assert_eq!(k_of(&single(&[&[0]], 1, 1)), 2);
        assert_eq!(k_of(&single(&[&[1, 0]], 2, 1)), 2);
        assert_eq!(k_of(&single(&[&[2, 0], &[0, 0]], 2, 2)), 2);
        assert_eq!(k_of(&single(&[], 1, 0)), 1);
        // degree 3 iso, degree 7 only in X
        let x = space(&[(3, DegreeData::new(1, 1, 1, 1)), (7, DegreeData::new(1, 1, 1, 1))]);
        let y = space(&[(3, DegreeData::new(1, 1, 1, 1))]);
        let m = MapModel::new(x, y, [(3, IntMatrix::from_i64(&[&[1]]))].into()).unwrap();
        assert_eq!(k_of(&m), 2);
        assert_eq!(m.kind(7), DegreeKind::SourceOnly);
    }

    #[test]
    fn map_validation() {
        let x = space(&[(3, DegreeData::new(2, 1, 1, 1))]);
        let y = space(&[(3, DegreeData::new(1, 1, 1, 1))]);
        let bad = MapModel::new(x.clone(), y.clone(), [(3, IntMatrix::from_i64(&[&[1], &[0]]))].into());
        assert!(matches!(bad, Err(ModelError::MatrixShape { degree: 3, .. })));
        let missing = MapModel::new(x.clone(), y.clone(), BTreeMap::new());
        assert!(matches!(missing, Err(ModelError::MissingMatrix { degree: 3, .. })));
        let extra = MapModel::new(x.clone(), y, [(5, IntMatrix::from_i64(&[&[1]]))].into());
        assert!(matches!(extra, Err(ModelError::UnexpectedMatrix { degree: 5, .. })));
        let coh = SpaceModel::empty(Flavor::CoH);
        assert!(matches!(MapModel::new(x, coh, BTreeMap::new()), Err(ModelError::FlavorMismatch { .. })));
        let zero = SpaceModel::new(Flavor::H, [(2, DegreeData::new(1, 0, 1, 1))].into());
        assert!(matches!(zero, Err(ModelError::BadExponent { degree: 2, field: "ker_exp" })));
        assert!(matches!(SpaceModel::new(Flavor::H, [(0, DegreeData::trivial())].into()), Err(ModelError::ZeroDegree)));
    }
}
