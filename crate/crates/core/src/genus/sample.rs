//! Random elements of `T'` with both determinants `≡ 1 (mod t̂)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use super::{reduce_to_diagonal, GenusError, Result};
use crate::intalg::{determinant, DiagonalOrder, IntMatrix};

const MAX_ATTEMPTS: usize = 200_000;

fn random_block<R: Rng + ?Sized>(rows: usize, cols: usize, spread: i64, rng: &mut R) -> IntMatrix {
    let entries = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-spread..=spread))).collect();
    IntMatrix::new(rows, cols, entries).expect("sizes agree")
}

/// Draws `(G₁, G₂)` for the map matrix `c` (`rank_Y × rank_X`) by choosing
/// the free blocks of the diagonalised form at random, entries in
/// `[-spread, spread]` (scaled where the order requires), and rejecting
/// until both determinants are `1` modulo `t_hat`.
pub fn sample_admissible<R: Rng + ?Sized>(
    c: &IntMatrix,
    t_hat: &BigInt,
    spread: i64,
    rng: &mut R,
) -> Result<(IntMatrix, IntMatrix)> {
    let diag = reduce_to_diagonal(c);
    let nonzero = diag.nonzero_diagonal();
    let r = nonzero.len();
    let (n1, n2) = (c.cols(), c.rows());
    let order = DiagonalOrder::new(nonzero)?;
    let spread = spread.max(1);

    for _ in 0..MAX_ATTEMPTS {
        let mut p = random_block(r, r, spread, rng);
        for i in 0..r {
            for j in 0..r {
                let scaled = p.get(i, j) * order.entry_divisor(i, j);
                p.set(i, j, scaled);
            }
        }
        let mut g1 = IntMatrix::zeros(n1, n1);
        g1.put_block(0, 0, &p);
        g1.put_block(r, 0, &random_block(n1 - r, r, spread, rng));
        g1.put_block(r, r, &random_block(n1 - r, n1 - r, spread, rng));
        let mut g2 = IntMatrix::zeros(n2, n2);
        g2.put_block(0, 0, &order.conjugate(&p));
        g2.put_block(0, r, &random_block(r, n2 - r, spread, rng));
        g2.put_block(r, r, &random_block(n2 - r, n2 - r, spread, rng));

        let ok = |m: &IntMatrix| (determinant(m).expect("square") - BigInt::one()).is_multiple_of(t_hat);
        if ok(&g1) && ok(&g2) {
            return diag.from_diagonal(&g1, &g2);
        }
    }
    Err(GenusError::SamplingExhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::genus::in_t_prime;

    #[test]
    fn samples_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = BigInt::from(12);
        for c in [
            IntMatrix::from_i64(&[&[2, 0], &[0, 6]]),
            IntMatrix::from_i64(&[&[2, 4], &[6, 8]]),
            IntMatrix::from_i64(&[&[2, 0]]),
            IntMatrix::zeros(2, 1),
            IntMatrix::zeros(0, 2),
        ] {
            for _ in 0..5 {
                let (g1, g2) = sample_admissible(&c, &t, 12, &mut rng).unwrap();
                assert!(in_t_prime(&g1, &g2, &c, &t).unwrap());
                for g in [&g1, &g2] {
                    assert!((determinant(g).unwrap() - BigInt::one()).is_multiple_of(&t));
                }
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let c = IntMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let t = BigInt::from(15);
        let draw = |seed| sample_admissible(&c, &t, 15, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(draw(3), draw(3));
    }
}
