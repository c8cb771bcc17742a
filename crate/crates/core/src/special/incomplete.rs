//! Upper incomplete Gamma function `Gamma(nu, x)` for complex `nu` and
//! real `x > 0`.
//!
//! Internally everything is expressed through the scaled kernel
//! `G(nu, x) = e^x x^{-nu} Gamma(nu, x)`, which is what the L-function
//! engine consumes: it is O(1/x) for large `x` and never over- or
//! underflows.
//!
//! Methods:
//! * `nu` a positive integer `m`: the finite sum
//!   `G = sum_{i=1}^{m} x^{-i} (m-1)!/(m-i)!`, exact up to rounding.
//! * `x < |nu| + 2`: `G = e^x x^{-nu} Gamma(nu) - sum_{m>=0} x^m / (nu)_{m+1}`.
//! * otherwise the Legendre continued fraction, evaluated by modified Lentz.

use rug::{Float, Integer};

use super::complex::{bits_for, ApComplex};
use super::gamma::gamma;
use crate::error::{Error, Result};

const MAX_CF_ITERS: usize = 100_000;
const SERIES_EXTRA_DIGITS: u32 = 30;

#[derive(Clone, Debug)]
enum Method {
    /// Coefficients `(m-1)!/(m-i)!` for `i = 1..=m`.
    Integer(Vec<Integer>),
    General { gamma_nu: Option<ApComplex> },
}

/// Precomputed data for repeated evaluation of `Gamma(nu, .)` at one `nu`.
#[derive(Clone, Debug)]
pub struct IncompleteGamma {
    nu: ApComplex,
    method: Method,
    abs_nu: f64,
}

fn as_positive_integer(nu: &ApComplex) -> Option<u32> {
    if nu.im().is_zero() && nu.re().is_integer() && *nu.re() >= 1 && *nu.re() <= 10_000 {
        nu.re().to_integer().and_then(|n| n.to_u32())
    } else {
        None
    }
}

impl IncompleteGamma {
    pub fn new(nu: &ApComplex) -> Result<Self> {
        let abs_nu = nu.abs_f64();
        let method = match as_positive_integer(nu) {
            Some(m) => {
                let mut coeffs = Vec::with_capacity(m as usize);
                let mut c = Integer::from(1);
                for i in 1..=m {
                    coeffs.push(c.clone());
                    c *= m - i;
                }
                Method::Integer(coeffs)
            }
            None => {
                // Gamma(nu) only enters the small-x series; a nonpositive
                // integer nu forces the continued fraction for every x.
                let high = nu.with_digits(nu.digits() + SERIES_EXTRA_DIGITS);
                let gamma_nu = match gamma(&high) {
                    Ok(g) => Some(g),
                    Err(Error::GammaPole(_)) => None,
                    Err(e) => return Err(e),
                };
                Method::General { gamma_nu }
            }
        };
        Ok(Self { nu: nu.clone(), method, abs_nu })
    }

    pub fn nu(&self) -> &ApComplex {
        &self.nu
    }

    /// Series/continued-fraction crossover in `x`.
    pub fn crossover(&self) -> f64 {
        self.abs_nu + 2.0
    }

    /// `G(nu, x) = e^x x^{-nu} Gamma(nu, x)`.
    pub fn scaled(&self, x: &Float) -> Result<ApComplex> {
        if *x <= 0 {
            return Err(Error::InvalidInput(format!("incomplete gamma needs x > 0, got {}", x.to_f64())));
        }
        let digits = self.nu.digits();
        match &self.method {
            Method::Integer(coeffs) => Ok(ApComplex::from_real(integer_kernel(coeffs, x, bits_for(digits)), digits)),
            Method::General { gamma_nu } => {
                if x.to_f64() < self.crossover() {
                    if let Some(g) = gamma_nu {
                        return self.series(g, x);
                    }
                }
                self.continued_fraction(x)
            }
        }
    }

    /// `Gamma(nu, x)`.
    pub fn value(&self, x: &Float) -> Result<ApComplex> {
        let g = self.scaled(x)?;
        let prec = g.prec();
        let xp = Float::with_val(prec, x);
        let damp = Float::with_val(prec, (-xp.clone()).exp());
        Ok((&ApComplex::real_pow(&xp, &self.nu.with_digits(g.digits())) * &g).scale(&damp))
    }

    fn series(&self, gamma_nu: &ApComplex, x: &Float) -> Result<ApComplex> {
        let digits = self.nu.digits();
        let wd = digits + SERIES_EXTRA_DIGITS;
        let prec = bits_for(wd);
        let nu = self.nu.with_digits(wd);
        let xp = Float::with_val(prec, x);
        let xf = xp.to_f64();

        // e^x x^{-nu} Gamma(nu)
        let mut lead = ApComplex::real_pow(&xp, &(-&nu));
        lead = lead.scale(&Float::with_val(prec, xp.exp_ref()));
        lead = &lead * gamma_nu;

        let eps = 10f64.powi(-(digits as i32 + 10));
        let mut term = nu.recip();
        let mut sum = term.clone();
        let mut m = 0u32;
        loop {
            m += 1;
            let denom = nu.add_real(&Float::with_val(prec, m));
            term = term.scale(&xp).div(&denom);
            sum += &term;
            let ratio = xf / denom.abs_f64();
            // once the term ratio is below 1/2 the tail is at most |term|
            if ratio <= 0.5 && term.abs_f64() <= eps * sum.abs_f64().max(1e-300) {
                break;
            }
            if m as usize > MAX_CF_ITERS {
                return Err(Error::TruncationUnsettled { achieved: term.abs_f64(), terms: m as usize });
            }
        }
        Ok((&lead - &sum).with_digits(digits))
    }

    fn continued_fraction(&self, x: &Float) -> Result<ApComplex> {
        let digits = self.nu.digits();
        let prec = bits_for(digits);
        let nu = &self.nu;
        let xp = Float::with_val(prec, x);
        let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) * 4));
        let tiny_c = ApComplex::from_real(tiny.clone(), digits);
        let eps = 10f64.powi(-(digits as i32 + 15));

        // b_0 = x + 1 - nu, a_i = -i (i - nu), b_i = b_{i-1} + 2
        let mut b = (-nu).add_real(&Float::with_val(prec, &xp + 1u32));
        let two = Float::with_val(prec, 2u32);
        let mut c = ApComplex::from_real(Float::with_val(prec, 1u32) / &tiny, digits);
        let mut d = if b.abs_f64() < tiny.to_f64() { tiny_c.clone() } else { b.clone() }.recip();
        let mut h = d.clone();
        for i in 1..=MAX_CF_ITERS {
            let fi = Float::with_val(prec, i as u64);
            let an = nu.add_real(&Float::with_val(prec, -&fi)).scale(&fi);
            b = b.add_real(&two);
            d = &(&an * &d) + &b;
            if d.is_zero() {
                d = tiny_c.clone();
            }
            c = &b + &an.div(&c);
            if c.is_zero() {
                c = tiny_c.clone();
            }
            d = d.recip();
            let delta = &d * &c;
            h = &h * &delta;
            let one = ApComplex::one(digits);
            if (&delta - &one).abs_f64() < eps {
                return Ok(h);
            }
        }
        Err(Error::TruncationUnsettled { achieved: f64::NAN, terms: MAX_CF_ITERS })
    }
}

/// `sum_{i=1}^{m} x^{-i} c_i` by Horner in `1/x`.
fn integer_kernel(coeffs: &[Integer], x: &Float, prec: u32) -> Float {
    let inv = Float::with_val(prec, x.recip_ref());
    let mut acc = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc += c;
        acc *= &inv;
    }
    acc
}

/// `Gamma(nu, x)` at the precision tagged on `nu`.
pub fn upper_incomplete_gamma(nu: &ApComplex, x: &Float) -> Result<ApComplex> {
    IncompleteGamma::new(nu)?.value(x)
}
