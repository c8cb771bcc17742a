//! Dirichlet characters modulo an odd prime `q`, indexed by the exponent
//! `j` with `chi(g) = e(j / (q - 1))` for the smallest primitive root `g`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::phase::{is_odd_prime, mod_inverse};
use crate::error::{Error, Result};
use crate::special::ApComplex;

/// Largest modulus for which a discrete-log table is built.
pub const MAX_CHARACTER_MODULUS: u64 = 10_000_000;

struct LogTable {
    root: u64,
    /// `log[n]` for `1 <= n < q`; `log[0]` unused.
    log: Vec<u32>,
}

fn tables() -> &'static RwLock<HashMap<u64, Arc<LogTable>>> {
    static T: OnceLock<RwLock<HashMap<u64, Arc<LogTable>>>> = OnceLock::new();
    T.get_or_init(|| RwLock::new(HashMap::new()))
}

fn check_modulus(q: u64) -> Result<()> {
    if q > MAX_CHARACTER_MODULUS || !is_odd_prime(q as i64) {
        return Err(Error::NotOddPrime(q as i64));
    }
    Ok(())
}

fn find_primitive_root(q: u64) -> u64 {
    let phi = q - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            factors.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow = |b: u64, e: u64| Integer::from(b).pow_mod(&Integer::from(e), &Integer::from(q)).unwrap().to_u64().unwrap();
    (2..q).find(|&g| factors.iter().all(|&f| pow(g, phi / f) != 1)).expect("primes have primitive roots")
}

fn log_table(q: u64) -> Result<Arc<LogTable>> {
    check_modulus(q)?;
    if let Some(t) = tables().read().expect("log tables poisoned").get(&q) {
        return Ok(t.clone());
    }
    let mut w = tables().write().expect("log tables poisoned");
    if let Some(t) = w.get(&q) {
        return Ok(t.clone());
    }
    let root = find_primitive_root(q);
    let mut log = vec![0u32; q as usize];
    let mut x = 1u64;
    for e in 0..(q - 1) {
        log[x as usize] = e as u32;
        x = x * root % q;
    }
    let t = Arc::new(LogTable { root, log });
    w.insert(q, t.clone());
    Ok(t)
}

/// Smallest primitive root modulo the odd prime `q`.
pub fn primitive_root(q: u64) -> Result<u64> {
    Ok(log_table(q)?.root)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletCharacter {
    q: u64,
    index: u64,
}

impl DirichletCharacter {
    pub fn new(q: u64, index: u64) -> Result<Self> {
        check_modulus(q)?;
        if index >= q - 1 {
            return Err(Error::InvalidInput(format!("character index {index} out of range for modulus {q}")));
        }
        Ok(Self { q, index })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_primitive(&self) -> bool {
        self.index != 0
    }

    /// `chi(-1) = (-1)^index`.
    pub fn parity(&self) -> i64 {
        if self.index % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn conj(&self) -> Self {
        Self { q: self.q, index: (self.q - 1 - self.index) % (self.q - 1) }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::InvalidInput("characters have different moduli".into()));
        }
        Ok(Self { q: self.q, index: (self.index + other.index) % (self.q - 1) })
    }

    /// Exponent `e` in `[0, q-1)` with `chi(n) = e(e / (q - 1))`, or `None` if `q | n`.
    pub fn exponent(&self, n: i64) -> Option<u64> {
        let r = n.rem_euclid(self.q as i64) as usize;
        if r == 0 {
            return None;
        }
        let t = log_table(self.q).expect("modulus validated");
        Some(self.index * t.log[r] as u64 % (self.q - 1))
    }

    /// `chi(n)` at `digits` precision.
    pub fn value(&self, n: i64, digits: u32) -> ApComplex {
        match self.exponent(n) {
            None => ApComplex::zero(digits),
            Some(e) => ApComplex::unit_root(&Integer::from(e), &Integer::from(self.q - 1), digits),
        }
    }
}

/// All `q - 1` characters modulo `q`, principal first.
pub fn characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    check_modulus(q)?;
    Ok((0..q - 1).map(|index| DirichletCharacter { q, index }).collect())
}

/// `tau(chi) = sum_{n mod q} chi(n) e(n/q)`; each summand is the exact root
/// of unity `e((index log n q + n (q - 1)) / (q (q - 1)))`.
pub fn gauss_sum(chi: &DirichletCharacter, digits: u32) -> Result<ApComplex> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    Ok(gauss_sum_any(chi, digits))
}

fn gauss_sum_any(chi: &DirichletCharacter, digits: u32) -> ApComplex {
    let q = chi.q;
    let den = Integer::from(q) * (q - 1);
    let mut acc = ApComplex::zero(digits);
    for n in 1..q {
        let e = chi.exponent(n as i64).expect("n coprime to q");
        let num = Integer::from(e) * q + Integer::from(n) * (q - 1);
        acc += &ApComplex::unit_root(&num, &den, digits);
    }
    acc
}

/// `|(1/phi(q)) sum*_chi tau(chi) chi(m) - e(mbar/q) - 1/phi(q)|`.
pub fn gauss_orthogonality_residual(q: u64, m: i64, digits: u32) -> Result<f64> {
    check_modulus(q)?;
    if m.rem_euclid(q as i64) == 0 {
        return Err(Error::NotCoprime { a: m, b: q as i64 });
    }
    let phi = q - 1;
    let mut acc = ApComplex::zero(digits);
    for chi in characters(q)?.into_iter().filter(|c| c.is_primitive()) {
        acc += &(&gauss_sum(&chi, digits)? * &chi.value(m, digits));
    }
    let prec = acc.prec();
    let phi_f = Float::with_val(prec, phi);
    let lhs = acc.div_real(&phi_f);
    let mbar = mod_inverse(m, q as i64)?;
    let expected = ApComplex::unit_root_i64(mbar, q as i64, digits).add_real(&Float::with_val(prec, phi_f.recip_ref()));
    Ok((&lhs - &expected).abs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 30;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(23).unwrap(), 5);
        assert_eq!(primitive_root(41).unwrap(), 6);
        assert!(primitive_root(9).is_err());
        assert!(primitive_root(2).is_err());
    }

    #[test]
    fn quadratic_gauss_sum_mod_5() {
        let chi = DirichletCharacter::new(5, 2).unwrap();
        // direct five-term oracle with the Legendre symbol
        let legendre = [0i64, 1, -1, -1, 1];
        let mut direct = ApComplex::zero(P);
        for n in 0..5 {
            direct += &ApComplex::unit_root_i64(n, 5, P).scale_i64(legendre[n as usize]);
        }
        let tau = gauss_sum(&chi, P).unwrap();
        assert!(tau.dist_f64(&direct) < 1e-40);
        let sqrt5 = ApComplex::from_f64(5.0, P).sqrt();
        assert!(tau.dist_f64(&sqrt5) < 1e-40);
    }

    #[test]
    fn principal_character_rejected() {
        assert_eq!(gauss_sum(&DirichletCharacter::new(7, 0).unwrap(), P), Err(Error::NotPrimitive));
    }

    #[test]
    fn gauss_sum_identities() {
        for q in [3u64, 5, 7, 11, 13, 31] {
            for chi in characters(q).unwrap().iter().filter(|c| c.is_primitive()) {
                let tau = gauss_sum(chi, P).unwrap();
                let norm = tau.norm_sqr().to_f64();
                assert!((norm - q as f64).abs() < 10f64.powi(-(P as i32 - 5)));
                let lhs = gauss_sum(&chi.conj(), P).unwrap();
                let rhs = tau.conj().scale_i64(chi.parity());
                assert!(lhs.dist_f64(&rhs) < 10f64.powi(-(P as i32 - 5)));
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        for (q, m) in [(5u64, 2i64), (7, 3), (5, 1)] {
            assert!(gauss_orthogonality_residual(q, m, P).unwrap() < 1e-25);
        }
        assert!(gauss_orthogonality_residual(5, 10, P).is_err());
        assert!(gauss_orthogonality_residual(9, 2, P).is_err());
    }

    #[test]
    fn parity_matches_value_at_minus_one() {
        for chi in characters(13).unwrap() {
            let v = chi.value(-1, P);
            assert!(v.dist_f64(&ApComplex::from_i64(chi.parity(), P)) < 1e-45);
        }
    }

    #[test]
    fn column_orthogonality() {
        let q = 11u64;
        for m in 1..q as i64 {
            let mut acc = ApComplex::zero(P);
            for chi in characters(q).unwrap() {
                acc += &chi.value(m, P);
            }
            let expected = if m == 1 { (q - 1) as i64 } else { 0 };
            assert!(acc.dist_f64(&ApComplex::from_i64(expected, P)) < 1e-40, "m={m}");
        }
    }

    proptest! {
        #[test]
        fn characters_form_a_group(i in 0u64..12, j in 0u64..12, n in 1i64..13) {
            let a = DirichletCharacter::new(13, i).unwrap();
            let b = DirichletCharacter::new(13, j).unwrap();
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.index(), (i + j) % 12);
            let prod = &a.value(n, P) * &b.value(n, P);
            prop_assert!(prod.dist_f64(&ab.value(n, P)) < 1e-40);
            prop_assert_eq!(a.mul(&a.conj()).unwrap().index(), 0);
        }
    }
}
