//! Inverting an element of `T'` modulo `t̂` by an element of `T'` made of
//! unimodular matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::{check_pair_shapes, in_t_prime, reduce_to_diagonal, GenusError, Result};
use crate::intalg::{
    adjugate, determinant, inv_mod, inverse_mod, is_identity_mod, mat_mul, sl_lift, unimodular_inverse, DiagonalOrder,
    IntMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimFactors {
    pub h1: IntMatrix,
    pub h2: IntMatrix,
}

/// Checks every requirement on `(H₁, H₂)`: both unimodular, the pair in
/// `T'`, and `G₁H₁ ≡ I`, `H₂G₂ ≡ I` modulo `t̂`.
pub fn check_claim(
    g1: &IntMatrix,
    g2: &IntMatrix,
    c: &IntMatrix,
    t_hat: &BigInt,
    h: &ClaimFactors,
) -> std::result::Result<(), String> {
    let err = |e: crate::intalg::IntAlgError| e.to_string();
    for (name, m) in [("H1", &h.h1), ("H2", &h.h2)] {
        if !m.is_square() {
            return Err(format!("{name} is not square"));
        }
        let det = determinant(m).map_err(err)?;
        if det.abs() != BigInt::one() {
            return Err(format!("det {name} = {det}, not ±1"));
        }
    }
    match in_t_prime(&h.h1, &h.h2, c, t_hat) {
        Ok(true) => {}
        Ok(false) => return Err("H2·C ≠ C·H1".into()),
        Err(e) => return Err(e.to_string()),
    }
    if !is_identity_mod(&mat_mul(g1, &h.h1).map_err(err)?, t_hat).map_err(err)? {
        return Err(format!("G1·H1 is not the identity mod {t_hat}"));
    }
    if !is_identity_mod(&mat_mul(&h.h2, g2).map_err(err)?, t_hat).map_err(err)? {
        return Err(format!("H2·G2 is not the identity mod {t_hat}"));
    }
    Ok(())
}

/// Given `(G₁, G₂) ∈ T'` with both determinants `≡ 1 (mod t̂)`, finds
/// unimodular `(H₁, H₂) ∈ T'` with `G₁H₁ ≡ I` and `H₂G₂ ≡ I` modulo `t̂`.
///
/// After diagonalising `C = diag(c₁..c_r, 0..)`, `G₁` is block lower
/// triangular `[[P, 0], [Q, R₁]]` and `G₂ = [[DPD⁻¹, S], [0, R₂]]`. The
/// leading blocks of `H₁` and `H₂` are tied together the same way, so
/// `det H₁ = ε·det Z₁` and `det H₂ = ε·det Z₂` with `ε ≡ det P⁻¹`. When `r`
/// is smaller than both ranks, `det P` may be any unit and a solution exists
/// only if it is `±1` modulo `t̂`; otherwise this returns
/// [`GenusError::Obstruction`].
pub fn claim_factor(g1: &IntMatrix, g2: &IntMatrix, c: &IntMatrix, t_hat: &BigInt) -> Result<ClaimFactors> {
    check_pair_shapes(g1, g2, c)?;
    if !t_hat.is_positive() {
        return Err(GenusError::Dimension(format!("modulus {t_hat} must be positive")));
    }
    if !in_t_prime(g1, g2, c, t_hat)? {
        return Err(GenusError::NotInTPrime("G2·C ≠ C·G1 or a determinant shares a factor with t̂".into()));
    }
    let d1 = determinant(g1)?;
    let d2 = determinant(g2)?;
    for (which, det) in [("G1", &d1), ("G2", &d2)] {
        if !(det - BigInt::one()).is_multiple_of(t_hat) {
            return Err(GenusError::DetNotOne { which, det: det.clone(), modulus: t_hat.clone() });
        }
    }

    let h = if d1.abs().is_one() && d2.abs().is_one() {
        ClaimFactors { h1: unimodular_inverse(g1)?, h2: unimodular_inverse(g2)? }
    } else {
        diagonal_solution(g1, g2, c, t_hat)?
    };
    check_claim(g1, g2, c, t_hat, &h).map_err(GenusError::Postcondition)?;
    Ok(h)
}

fn sign_diag(n: usize, eps: &BigInt) -> IntMatrix {
    let mut d = IntMatrix::identity(n);
    if n > 0 {
        d.set(0, 0, eps.clone());
    }
    d
}

/// Unimodular `Z` with `det Z = ε` and `Z ≡ R⁻¹ (mod t)`, given `det R ≡ ε`.
fn lift_inverse(r: &IntMatrix, eps: &BigInt, t: &BigInt) -> Result<IntMatrix> {
    let n = r.rows();
    if n == 0 {
        return Ok(IntMatrix::identity(0));
    }
    let s = sign_diag(n, eps);
    let target = mat_mul(&inverse_mod(r, t)?, &s)?;
    Ok(mat_mul(&sl_lift(&target, t)?, &s)?)
}

fn diagonal_solution(g1: &IntMatrix, g2: &IntMatrix, c: &IntMatrix, t: &BigInt) -> Result<ClaimFactors> {
    let diag = reduce_to_diagonal(c);
    let (g1d, g2d) = diag.to_diagonal(g1, g2)?;
    let nonzero = diag.nonzero_diagonal();
    let r = nonzero.len();
    let (n1, n2) = (g1.rows(), g2.rows());

    let p1 = g1d.block(0, r, 0, r);
    let q1 = g1d.block(r, n1, 0, r);
    let r1 = g1d.block(r, n1, r, n1);
    let s2 = g2d.block(0, r, r, n2);
    let r2 = g2d.block(r, n2, r, n2);

    let delta = determinant(&p1)?.mod_floor(t);
    let one = BigInt::one();
    let eps = if (&delta - &one).is_multiple_of(t) {
        one.clone()
    } else if (&delta + &one).is_multiple_of(t) {
        -one.clone()
    } else {
        return Err(GenusError::Obstruction { det: delta, modulus: t.clone() });
    };

    // X₁ ≡ P⁻¹ inside the order Λ(D), so that X₂ = D·X₁·D⁻¹ is integral.
    let order = DiagonalOrder::new(nonzero)?;
    let s = sign_diag(r, &eps);
    let p_inv = adjugate(&p1)?.scale(&inv_mod(&delta, t)?);
    let x1 = mat_mul(&order.lift_sl(&mat_mul(&p_inv, &s)?, t)?, &s)?;
    let x2 = order.conjugate(&x1);

    let z1 = lift_inverse(&r1, &eps, t)?;
    let z2 = lift_inverse(&r2, &eps, t)?;
    let y1 = mat_mul(&mat_mul(&z1, &q1)?, &x1)?.scale(&-&one);
    let t2 = mat_mul(&mat_mul(&x2, &s2)?, &z2)?.scale(&-&one);

    let mut h1d = IntMatrix::zeros(n1, n1);
    h1d.put_block(0, 0, &x1);
    h1d.put_block(r, 0, &y1);
    h1d.put_block(r, r, &z1);
    let mut h2d = IntMatrix::zeros(n2, n2);
    h2d.put_block(0, 0, &x2);
    h2d.put_block(0, r, &t2);
    h2d.put_block(r, r, &z2);

    let (h1, h2) = diag.from_diagonal(&h1d, &h2d)?;
    Ok(ClaimFactors { h1, h2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn unimodular_input_gets_exact_inverse() {
        let g = m(&[&[2, 1], &[1, 1]]);
        let c = IntMatrix::identity(2);
        let h = claim_factor(&g, &g, &c, &int(4)).unwrap();
        assert_eq!(h.h1, m(&[&[1, -1], &[-1, 2]]));
        assert_eq!(h.h2, h.h1);
    }

    #[test]
    fn scalar_iso_degree() {
        // G = 6 with det ≡ 1 mod 5: H = 1 works since 6 ≡ 1
        let c = m(&[&[3]]);
        let h = claim_factor(&m(&[&[6]]), &m(&[&[6]]), &c, &int(5)).unwrap();
        assert_eq!(h.h1, IntMatrix::identity(1));
    }

    #[test]
    fn order_lift_is_needed() {
        // C = diag(1, 4); G₁ = [[a, 4b], [e, d]], G₂ = D·G₁·D⁻¹.
        let c = m(&[&[1, 0], &[0, 4]]);
        let g1 = m(&[&[3, 4], &[2, 9]]);
        let g2 = m(&[&[3, 1], &[8, 9]]);
        let t = int(18);
        assert_eq!(determinant(&g1).unwrap(), int(19));
        let h = claim_factor(&g1, &g2, &c, &t).unwrap();
        check_claim(&g1, &g2, &c, &t, &h).unwrap();
    }

    #[test]
    fn non_diagonal_c() {
        let c = m(&[&[2, 4], &[6, 8]]);
        // G₁ ≡ I mod 8 = |det C| keeps G₂ = C·G₁·C⁻¹ integral
        let g1 = m(&[&[1, 8], &[0, 9]]);
        let g2 = m(&[&[37, -12], &[84, -27]]);
        assert_eq!(mat_mul(&g2, &c).unwrap(), mat_mul(&c, &g1).unwrap());
        let t = int(8);
        let h = claim_factor(&g1, &g2, &c, &t).unwrap();
        check_claim(&g1, &g2, &c, &t, &h).unwrap();
    }

    #[test]
    fn rank_deficient_with_unit_block() {
        // C = diag(2, 0) with P ≡ 1: solvable.
        let c = m(&[&[2, 0], &[0, 0]]);
        let g1 = m(&[&[6, 0], &[1, 6]]);
        let g2 = m(&[&[6, 3], &[0, 6]]);
        let t = int(5);
        assert!(in_t_prime(&g1, &g2, &c, &t).unwrap());
        let h = claim_factor(&g1, &g2, &c, &t).unwrap();
        check_claim(&g1, &g2, &c, &t, &h).unwrap();
        // P ≡ -1 also works, with det H = -1 in both blocks.
        let g1 = m(&[&[4, 0], &[0, 4]]);
        let h = claim_factor(&g1, &g1, &c, &t).unwrap();
        check_claim(&g1, &g1, &c, &t, &h).unwrap();
        assert_eq!(determinant(&h.h1).unwrap(), int(1));
    }

    #[test]
    fn obstruction_is_genuine() {
        // C = diag(2, 0), G₁ = G₂ = diag(2, 3), t̂ = 5: det = 6 ≡ 1.
        let c = m(&[&[2, 0], &[0, 0]]);
        let g = m(&[&[2, 0], &[0, 3]]);
        let t = int(5);
        assert!(in_t_prime(&g, &g, &c, &t).unwrap());
        let err = claim_factor(&g, &g, &c, &t).unwrap_err();
        assert!(matches!(err, GenusError::Obstruction { .. }), "{err}");

        // Any H₁ commuting with C this way has the shape [[x, 0], [y, z]],
        // so det H₁ = ±1 forces x = ±1, while 2x ≡ 1 (mod 5) needs x ≡ 3.
        for x in [-1i64, 1] {
            assert_ne!((2 * x).rem_euclid(5), 1);
        }
        for x in -10i64..=10 {
            for y in -3i64..=3 {
                for z in -10i64..=10 {
                    let h1 = m(&[&[x, 0], &[y, z]]);
                    let h2 = m(&[&[x, 0], &[0, z]]);
                    if mat_mul(&h2, &c).unwrap() != mat_mul(&c, &h1).unwrap() {
                        continue;
                    }
                    if (x * z).abs() != 1 {
                        continue;
                    }
                    assert!(!is_identity_mod(&mat_mul(&g, &h1).unwrap(), &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = m(&[&[1]]);
        assert!(matches!(
            claim_factor(&m(&[&[2]]), &m(&[&[2]]), &c, &int(5)),
            Err(GenusError::DetNotOne { which: "G1", .. })
        ));
        assert!(matches!(claim_factor(&m(&[&[6]]), &m(&[&[11]]), &c, &int(5)), Err(GenusError::NotInTPrime(_))));
        assert!(matches!(
            claim_factor(&m(&[&[6]]), &IntMatrix::identity(2), &c, &int(5)),
            Err(GenusError::Dimension(_))
        ));
    }
}
