use std::fmt;

use num_integer::Integer as _;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational phase `a/b` in lowest terms with `0 <= a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedPhase {
    a: i64,
    b: i64,
}

impl ReducedPhase {
    pub fn trivial() -> Self {
        Self { a: 0, b: 1 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `abar` with `a abar = 1 mod b` (0 for the trivial phase).
    pub fn a_inverse(&self) -> i64 {
        mod_inverse(self.a, self.b).expect("reduced phase is coprime")
    }

    /// The functional-equation partner `-abar / b`.
    pub fn dual(&self) -> Self {
        reduce_phase(-self.a_inverse(), self.b).expect("reduced phase is coprime")
    }

    /// `-a / b`, the phase of the complex-conjugate twist.
    pub fn negated(&self) -> Self {
        reduce_phase(-self.a, self.b).expect("reduced phase is coprime")
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from((self.a, self.b))
    }
}

impl fmt::Display for ReducedPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

/// Canonical representative of `a/b`; the inputs must already be coprime.
pub fn reduce_phase(a: i64, b: i64) -> Result<ReducedPhase> {
    if b == 0 {
        return Err(Error::InvalidInput("phase denominator must be nonzero".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::NotCoprime { a, b });
    }
    let (a, b) = if b < 0 { (-(a as i128), -(b as i128)) } else { (a as i128, b as i128) };
    Ok(ReducedPhase { a: a.rem_euclid(b) as i64, b: b as i64 })
}

/// `abar` in `[0, b)` with `a abar = 1 (mod b)`; `b = 1` gives 0.
pub fn mod_inverse(a: i64, b: i64) -> Result<i64> {
    if b < 1 {
        return Err(Error::InvalidInput(format!("modulus must be positive, got {b}")));
    }
    let g = (a as i128).extended_gcd(&(b as i128));
    if g.gcd != 1 {
        return Err(Error::NotCoprime { a, b });
    }
    Ok(g.x.rem_euclid(b as i128) as i64)
}

/// `n abar / b - (-n bbar / a + n / (a b))` reduced into `[0, 1)`, where
/// `abar` inverts `a` mod `|b|` and `bbar` inverts `b` mod `|a|`. Always 0.
pub fn additive_reciprocity_check(n: i64, a: i64, b: i64) -> Result<Rational> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("additive reciprocity needs nonzero a and b".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::NotCoprime { a, b });
    }
    let abar = mod_inverse(a, b.abs())?;
    let bbar = mod_inverse(b, a.abs())?;
    let n = Integer::from(n);
    let lhs = Rational::from((Integer::from(&n * abar), Integer::from(b)));
    let rhs = Rational::from((-Integer::from(&n * bbar), Integer::from(a)))
        + Rational::from((n, Integer::from(a) * b));
    let diff = lhs - rhs;
    let floor = Rational::from(diff.floor_ref());
    Ok(diff - floor)
}

pub fn is_prime(n: i64) -> bool {
    n >= 2 && Integer::from(n).is_probably_prime(40) != rug::integer::IsPrime::No
}

pub fn is_odd_prime(n: i64) -> bool {
    n > 2 && is_prime(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_phase(-14, 5).unwrap(), ReducedPhase { a: 1, b: 5 });
        assert_eq!(reduce_phase(0, 1).unwrap(), ReducedPhase::trivial());
        assert_eq!(reduce_phase(7, 3).unwrap(), ReducedPhase { a: 1, b: 3 });
        assert_eq!(reduce_phase(3, -7).unwrap(), ReducedPhase { a: 4, b: 7 });
        assert_eq!(reduce_phase(6, 4), Err(Error::NotCoprime { a: 6, b: 4 }));
        assert!(reduce_phase(1, 0).is_err());
        assert!(reduce_phase(0, 5).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 5).unwrap(), 2);
        assert_eq!(mod_inverse(5, 3).unwrap(), 2);
        assert_eq!(mod_inverse(1, 1).unwrap(), 0);
        assert_eq!(mod_inverse(-2, 7).unwrap(), 3);
        assert_eq!(mod_inverse(4, 6), Err(Error::NotCoprime { a: 4, b: 6 }));
    }

    #[test]
    fn dual_phase() {
        let p = reduce_phase(2, 5).unwrap();
        // 2 * 3 = 1 mod 5, so the dual is -3/5 = 2/5
        assert_eq!(p.dual(), reduce_phase(2, 5).unwrap());
        assert_eq!(reduce_phase(3, 7).unwrap().dual(), reduce_phase(2, 7).unwrap());
        assert_eq!(ReducedPhase::trivial().dual(), ReducedPhase::trivial());
    }

    #[test]
    fn reciprocity_examples() {
        assert_eq!(additive_reciprocity_check(1, 3, 5).unwrap(), 0);
        assert_eq!(additive_reciprocity_check(7, 5, 11).unwrap(), 0);
        assert_eq!(additive_reciprocity_check(3, -7, 5).unwrap(), 0);
        assert!(additive_reciprocity_check(1, 4, 6).is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<i64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(!is_odd_prime(2));
        assert!(!is_odd_prime(9));
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000) {
            prop_assume!(a.gcd(&b) == 1);
            let p = reduce_phase(a, b).unwrap();
            prop_assert!(0 <= p.a() && p.a() < p.b());
            prop_assert_eq!(reduce_phase(p.a(), p.b()).unwrap(), p);
        }

        #[test]
        fn inverse_is_inverse(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000) {
            prop_assume!(a.gcd(&b) == 1);
            let inv = mod_inverse(a, b).unwrap();
            prop_assert!((0..b).contains(&inv));
            prop_assert_eq!(((a as i128 * inv as i128).rem_euclid(b as i128)) as i64, 1 % b);
        }

        #[test]
        fn reciprocity_defect_vanishes(n in -1_000_000i64..1_000_000, a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            prop_assume!(a != 0 && b != 0 && a.gcd(&b) == 1);
            prop_assert_eq!(additive_reciprocity_check(n, a, b).unwrap(), 0);
        }
    }
}
