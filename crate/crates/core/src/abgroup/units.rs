//! The unit group `ℤ*_t` and its quotient by `±1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{quotient_by_with_map, AbGroupError, FinAbGroup, Normalized, Result};

/// `ℤ*_t` as invariant factors with one generator per factor.
///
/// Internally the group is also kept in its local form, one cyclic component
/// per odd prime power and `⟨−1⟩ × ⟨3⟩` for a power of two; discrete logs
/// are taken there and carried over to the invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct UnitsPresentation {
    modulus: u64,
    group: FinAbGroup,
    generators: Vec<u64>,
    locals: Vec<LocalPart>,
    parts: Vec<PrimePart>,
}

/// `ℤ*_{p^e}` for one prime power of the modulus.
#[derive(Clone, Debug)]
enum LocalPart {
    Trivial,
    /// Cyclic of order `order`, generated by `root` modulo `pe`.
    Cyclic {
        pe: u64,
        root: u64,
        order: u64,
        component: usize,
    },
    /// `ℤ*_{2^e}`: `sign_component` is `⟨−1⟩`; for `e ≥ 3`, `three_component`
    /// is `⟨3⟩` of order `2^{e−2}`.
    TwoPower {
        pe: u64,
        sign_component: usize,
        three_component: Option<(usize, u64)>,
    },
}

/// The `q`-primary piece of one cyclic component, and where it sits in the
/// invariant factors.
#[derive(Clone, Debug)]
struct PrimePart {
    component: usize,
    component_order: u64,
    prime_power: u64,
    factor: usize,
}

impl UnitsPresentation {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// `∏ g_i^{e_i} mod t`.
    pub fn evaluate(&self, exps: &[BigInt]) -> Result<u64> {
        self.group.check_len(exps)?;
        let mut acc = 1 % self.modulus;
        for ((g, e), d) in self.generators.iter().zip(exps).zip(&self.group.invariant_factors) {
            let e = e.mod_floor(d).to_u64().expect("exponent below modulus");
            acc = mul_mod(acc, pow_mod(*g, e, self.modulus), self.modulus);
        }
        Ok(acc)
    }

    /// Exponent vector of `u` in terms of the generators.
    pub fn dlog(&self, u: &BigInt) -> Result<Vec<BigInt>> {
        let t = self.modulus;
        let r = u.mod_floor(&BigInt::from(t)).to_u64().expect("residue fits");
        if gcd(r, t) != 1 {
            return Err(AbGroupError::NotUnit { value: u.clone(), modulus: t });
        }
        let n_components = self.parts.iter().map(|p| p.component + 1).max().unwrap_or(0);
        let mut comp_exp = vec![0u64; n_components];
        for local in &self.locals {
            match *local {
                LocalPart::Trivial => {}
                LocalPart::Cyclic { pe, root, order, component } => {
                    comp_exp[component] = search_log(root, r % pe, pe, order);
                }
                LocalPart::TwoPower { pe, sign_component, three_component } => {
                    let mut v = r % pe;
                    let negative = if pe == 4 { v == 3 } else { matches!(v % 8, 5 | 7) };
                    if negative {
                        comp_exp[sign_component] = 1;
                        v = pe - v;
                    }
                    if let Some((component, order)) = three_component {
                        comp_exp[component] = search_log(3, v, pe, order);
                    }
                }
            }
        }

        let mut out = vec![BigInt::zero(); self.group.coord_count()];
        for part in &self.parts {
            let q = part.prime_power;
            // component exponent x ↦ exponent of its q-part generator g^(n/q)
            let cofactor = part.component_order / q;
            let y = mul_mod(comp_exp[part.component] % q, inv_mod(cofactor % q, q), q);
            // q-part generator = g_factor^(d/q · w) with w = (d/q)^-1 mod q
            let d = self.group.invariant_factors[part.factor].to_u64().expect("factor fits");
            let df = d / q;
            let w = inv_mod(df % q, q);
            let coeff = (df as u128 * w as u128 % d as u128 * y as u128 % d as u128) as u64;
            out[part.factor] += coeff;
        }
        self.group.reduce(&out)
    }
}

/// Discrete log of `u` relative to the presentation's generators.
pub fn dlog(u: &BigInt, p: &UnitsPresentation) -> Result<Vec<BigInt>> {
    p.dlog(u)
}

/// Structure of `ℤ*_t` from the prime factorization of `t`.
pub fn units_group(t: u64) -> Result<UnitsPresentation> {
    if t == 0 {
        return Err(AbGroupError::ZeroModulus);
    }
    // Cyclic components: (generator mod t, order).
    let mut components: Vec<(u64, u64)> = Vec::new();
    let mut locals = Vec::new();
    for (p, e) in factorize(t) {
        let pe = p.pow(e);
        let lift = |g_local: u64| crt_lift(g_local, pe, t);
        if p == 2 {
            if e == 1 {
                locals.push(LocalPart::Trivial);
                continue;
            }
            let sign_component = components.len();
            components.push((lift(pe - 1), 2));
            let three_component = (e >= 3).then(|| {
                let order = pe / 4;
                components.push((lift(3), order));
                (components.len() - 1, order)
            });
            locals.push(LocalPart::TwoPower { pe, sign_component, three_component });
        } else {
            let order = pe / p * (p - 1);
            let root = primitive_root(p, pe, order);
            components.push((lift(root), order));
            locals.push(LocalPart::Cyclic { pe, root, order, component: components.len() - 1 });
        }
    }

    // Split each component into prime-power pieces and stack them into
    // invariant factors: per prime, pieces sorted by size, aligned to the end.
    let mut pieces: Vec<(u64, u64, usize, u64)> = Vec::new(); // (prime, prime power, component, element)
    for (idx, &(g, n)) in components.iter().enumerate() {
        for (q, a) in factorize(n) {
            let qa = q.pow(a);
            pieces.push((q, qa, idx, pow_mod(g, n / qa, t)));
        }
    }
    let mut primes: Vec<u64> = pieces.iter().map(|p| p.0).collect();
    primes.sort_unstable();
    primes.dedup();
    let rank = primes.iter().map(|&q| pieces.iter().filter(|p| p.0 == q).count()).max().unwrap_or(0);

    let mut factors = vec![1u64; rank];
    let mut generators = vec![1 % t; rank];
    let mut parts = Vec::new();
    for &q in &primes {
        let mut mine: Vec<&(u64, u64, usize, u64)> = pieces.iter().filter(|p| p.0 == q).collect();
        mine.sort_by_key(|p| p.1);
        let offset = rank - mine.len();
        for (j, piece) in mine.into_iter().enumerate() {
            let slot = offset + j;
            factors[slot] *= piece.1;
            generators[slot] = mul_mod(generators[slot], piece.3, t);
            parts.push(PrimePart {
                component: piece.2,
                component_order: components[piece.2].1,
                prime_power: piece.1,
                factor: slot,
            });
        }
    }
    let group = FinAbGroup::new(0, factors.into_iter().map(BigInt::from).collect())?;
    Ok(UnitsPresentation { modulus: t, group, generators, locals, parts })
}

/// `ℤ*_t / ⟨−1⟩` together with the projection from unit residues.
#[derive(Clone, Debug)]
pub struct UnitsModSign {
    units: UnitsPresentation,
    quotient: Normalized,
}

impl UnitsModSign {
    pub fn group(&self) -> &FinAbGroup {
        &self.quotient.group
    }

    pub fn units(&self) -> &UnitsPresentation {
        &self.units
    }

    /// Coordinates of the class of `u` in the quotient.
    pub fn project(&self, u: &BigInt) -> Result<Vec<BigInt>> {
        let x = self.units.dlog(u)?;
        self.quotient.map_element(&x)
    }
}

pub fn units_mod_pm1(t: u64) -> Result<UnitsModSign> {
    let units = units_group(t)?;
    let minus_one = units.dlog(&BigInt::from(t - 1))?;
    let quotient = quotient_by_with_map(units.group(), &[minus_one])?;
    Ok(UnitsModSign { units, quotient })
}

fn search_log(g: u64, target: u64, m: u64, order: u64) -> u64 {
    let mut acc = 1 % m;
    for x in 0..order {
        if acc == target % m {
            return x;
        }
        acc = mul_mod(acc, g, m);
    }
    unreachable!("{target} not a power of {g} modulo {m}")
}

/// Smallest primitive root of the cyclic group `ℤ*_{p^e}`, `p` odd.
fn primitive_root(_p: u64, pe: u64, order: u64) -> u64 {
    let prime_divisors: Vec<u64> = factorize(order).into_iter().map(|(q, _)| q).collect();
    (2..pe)
        .filter(|&g| gcd(g, pe) == 1)
        .find(|&g| prime_divisors.iter().all(|&q| pow_mod(g, order / q, pe) != 1))
        .unwrap_or(1)
}

/// The residue mod `t` that is `g` mod `pe` and `1` mod `t / pe`.
fn crt_lift(g: u64, pe: u64, t: u64) -> u64 {
    let rest = t / pe;
    if rest == 1 {
        return g % t;
    }
    // x = 1 + rest·k with rest·k ≡ g − 1 (mod pe)
    let k = mul_mod((g + pe - 1) % pe, inv_mod(rest % pe, pe), pe);
    (1 + rest as u128 * k as u128) as u64 % t
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let eg = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(eg.gcd, 1);
    eg.x.rem_euclid(m as i128) as u64
}
