//! Complex Gamma function at arbitrary precision.
//!
//! Right half-plane values come from the Stirling series for `ln Gamma`
//! after an upward shift `z -> z + n` large enough that the smallest
//! Stirling term is below the working epsilon; the left half-plane uses the
//! reflection formula.

use std::sync::{OnceLock, RwLock};

use rug::{Float, Integer, Rational};

use super::complex::{bits_for, pi, two_pi, ApComplex};
use crate::error::{Error, Result};

fn bernoulli_cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1)]))
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`), cached and grown on demand.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    {
        let cache = bernoulli_cache().read().expect("bernoulli cache poisoned");
        if cache.len() > n {
            return cache[..=n].to_vec();
        }
    }
    let mut cache = bernoulli_cache().write().expect("bernoulli cache poisoned");
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, b) in cache.iter().enumerate() {
            acc += Rational::from(b * &binom);
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        let next = -acc / Rational::from(m as u64 + 1);
        cache.push(next);
    }
    cache[..=n].to_vec()
}

fn is_nonpositive_integer(z: &ApComplex) -> Option<i64> {
    if z.im().is_zero() && z.re().is_integer() && *z.re() <= 0 {
        z.re().to_integer().and_then(|n| n.to_i64())
    } else {
        None
    }
}

fn positive_integer(z: &ApComplex) -> Option<u32> {
    if z.im().is_zero() && z.re().is_integer() && *z.re() >= 1 && *z.re() <= 20_000 {
        z.re().to_integer().and_then(|n| n.to_u32())
    } else {
        None
    }
}

/// `Gamma(z)` at the precision tagged on `z`.
pub fn gamma(z: &ApComplex) -> Result<ApComplex> {
    if let Some(n) = is_nonpositive_integer(z) {
        return Err(Error::GammaPole(n));
    }
    let digits = z.digits();
    if let Some(n) = positive_integer(z) {
        let fact = Integer::from(Integer::factorial(n - 1));
        return Ok(ApComplex::from_integer(&fact, digits));
    }
    if *z.re() < 0.5 {
        // Gamma(z) = pi / (sin(pi z) Gamma(1 - z)); sin(pi z) near an integer
        // loses about log10|z| digits, which are recovered here.
        let extra = (z.abs_f64() + 2.0).log10().ceil() as u32 + 3;
        let wd = digits + extra;
        let zw = z.with_digits(wd);
        let p = pi(bits_for(wd));
        let one = ApComplex::one(wd);
        let reflected = gamma_right(&(&one - &zw))?;
        let sine = zw.scale(&p).sin();
        let denom = &sine * &reflected;
        let num = ApComplex::from_real(p, wd);
        return Ok(num.div(&denom).with_digits(digits));
    }
    Ok(gamma_right(z)?.with_digits(digits))
}

/// `ln Gamma(w)` by the Stirling series; requires `Re w >= 1/2` and `|w|`
/// large enough (see `gamma_right`). Returns the sum and the bound on the
/// first omitted term.
fn stirling_ln_gamma(w: &ApComplex, prec_bits: u32) -> ApComplex {
    let digits = w.digits();
    let prec = w.prec();
    let eps = (-(prec_bits as f64) * std::f64::consts::LN_2).exp();
    let (wr, wi) = w.to_f64_parts();
    let modulus = wr.hypot(wi);
    let cos_theta = wr / modulus;
    // |R_J| <= |T_{J+1}| sec^{2J+2}(theta/2), sec^2(theta/2) = 2 / (1 + cos theta)
    let sec2 = 2.0 / (1.0 + cos_theta);

    let half = Float::with_val(prec, 0.5);
    let ln_w = w.ln();
    let mut acc = &(w.add_real(&Float::with_val(prec, -&half))) * &ln_w;
    acc -= w;
    let ln2pi = Float::with_val(prec, two_pi(prec).ln());
    acc = acc.add_real(&Float::with_val(prec, &ln2pi * &half));

    let inv_w = w.recip();
    let inv_w2 = inv_w.square();
    let mut power = inv_w; // w^{-(2j-1)}
    let mut j = 1usize;
    loop {
        let bern = bernoulli_numbers(2 * j);
        let b2j = &bern[2 * j];
        let coeff = Rational::from(b2j / Rational::from((2 * j * (2 * j - 1)) as u64));
        let c = Float::with_val(prec, &coeff);
        let term = power.scale(&c);
        let bound = term.abs_f64() * sec2.powi(j as i32);
        acc += &term;
        if bound < eps || j > 2000 {
            break;
        }
        power = &power * &inv_w2;
        j += 1;
    }
    debug_assert_eq!(acc.digits(), digits);
    acc
}

/// Gamma in the half-plane `Re z >= 1/2`.
fn gamma_right(z: &ApComplex) -> Result<ApComplex> {
    if let Some(n) = positive_integer(z) {
        let fact = Integer::from(Integer::factorial(n - 1));
        return Ok(ApComplex::from_integer(&fact, z.digits()));
    }
    let digits = z.digits();
    let (zr, zi) = z.to_f64_parts();
    let modulus = zr.hypot(zi).max(1.0);
    // exp() amplifies the absolute error of ln Gamma, which is about |z ln z|
    let extra_bits = (modulus * modulus.ln().max(1.0) + 16.0).log2().ceil() as u32 + 8;
    let extra_digits = (extra_bits as f64 / std::f64::consts::LOG2_10).ceil() as u32;
    let wd = digits + extra_digits;
    let prec_bits = bits_for(wd);
    let target = 0.16 * prec_bits as f64 + 2.0;

    let zw = z.with_digits(wd);
    let mut shift = 0u32;
    while ((zr + shift as f64).hypot(zi)) < target {
        shift += 1;
    }
    let w = zw.add_real(&Float::with_val(prec_bits, shift));
    let ln_g = stirling_ln_gamma(&w, prec_bits);
    let mut g = ln_g.exp();
    if shift > 0 {
        let mut prod = zw.clone();
        for m in 1..shift {
            prod = &prod * &zw.add_real(&Float::with_val(prec_bits, m));
        }
        g = g.div(&prod);
    }
    Ok(g.with_digits(digits))
}

/// `Gamma(a) / Gamma(b)` evaluated as a quotient.
pub fn gamma_ratio(a: &ApComplex, b: &ApComplex) -> Result<ApComplex> {
    Ok(gamma(a)?.div(&gamma(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ApComplex {
        ApComplex::from_f64_parts(re, im, 30)
    }

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[12], Rational::from((-691, 2730)));
        assert_eq!(b[7], 0);
    }

    #[test]
    fn gamma_one_is_one() {
        assert_eq!(gamma(&c(1.0, 0.0)).unwrap(), ApComplex::one(30));
    }

    #[test]
    fn factorial_ratio() {
        let r = gamma(&c(7.0, 0.0)).unwrap().div(&gamma(&c(5.0, 0.0)).unwrap());
        assert!(r.dist_f64(&ApComplex::from_f64(30.0, 30)) < 1e-40);
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma(&c(0.5, 0.0)).unwrap();
        let sqrt_pi = pi(g.prec()).sqrt();
        let err = Float::with_val(g.prec(), g.re() - &sqrt_pi).abs().to_f64();
        assert!(err < 1e-25, "err {err}");
        assert!(g.im().to_f64().abs() < 1e-40);
    }

    #[test]
    fn poles_are_rejected() {
        assert_eq!(gamma(&c(0.0, 0.0)), Err(Error::GammaPole(0)));
        assert_eq!(gamma(&c(-3.0, 0.0)), Err(Error::GammaPole(-3)));
        assert!(gamma(&c(-3.0, 1e-10)).is_ok());
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Gamma(it)|^2 = pi / (t sinh(pi t))
        for &t in &[-50.0f64, 0.3, 7.5] {
            let g = gamma(&c(0.0, t)).unwrap();
            let prec = g.prec();
            let pt = Float::with_val(prec, pi(prec) * t);
            let expected = Float::with_val(prec, pi(prec) / (Float::with_val(prec, t) * pt.sinh()));
            let rel = Float::with_val(prec, (g.norm_sqr() - &expected) / &expected).abs().to_f64();
            assert!(rel < 1e-25, "t={t} rel={rel}");
        }
    }

    #[test]
    fn reference_value_complex() {
        // Gamma(1+i) = 0.498015668118356042713691117462... - 0.154949828301810685124955130484...i
        let g = gamma(&c(1.0, 1.0)).unwrap();
        let expected = ApComplex::parse(
            "0.4980156681183560427136911174621980919529629675876",
            "-0.1549498283018106851249551304838866051958796520793",
            30,
        )
        .unwrap();
        assert!(g.dist_f64(&expected) < 1e-28);
    }

    #[test]
    fn recurrence_across_strip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let lhs = gamma(&(&z + &ApComplex::one(30))).unwrap();
            let rhs = &z * &gamma(&z).unwrap();
            let rel = lhs.dist_f64(&rhs) / lhs.abs_f64();
            assert!(rel < 1e-25, "z={z} rel={rel}");
        }
    }
}
