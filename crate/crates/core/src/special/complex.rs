//! Arbitrary-precision complex numbers tagged with a working precision.
//!
//! A value tagged with `digits = P` is stored with `P + GUARD_DIGITS`
//! decimal digits of mantissa. Binary operations produce a value tagged
//! with the smaller of the two operand precisions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Float, Integer, Rational};

/// Extra decimal digits carried beyond the requested precision.
pub const GUARD_DIGITS: u32 = 20;

/// Mantissa bits needed to hold `digits` requested digits plus guard digits.
pub fn bits_for(digits: u32) -> u32 {
    ((digits + GUARD_DIGITS) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 4
}

/// `pi` at the given mantissa precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2 pi` at the given mantissa precision.
pub fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

#[derive(Clone, Debug)]
pub struct ApComplex {
    re: Float,
    im: Float,
    digits: u32,
}

impl ApComplex {
    pub fn zero(digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::new(prec), im: Float::new(prec), digits }
    }

    pub fn one(digits: u32) -> Self {
        Self::from_f64(1.0, digits)
    }

    /// The imaginary unit.
    pub fn i(digits: u32) -> Self {
        Self::from_f64_parts(0.0, 1.0, digits)
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        Self::from_f64_parts(x, 0.0, digits)
    }

    pub fn from_f64_parts(re: f64, im: f64, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im), digits }
    }

    pub fn from_i64(n: i64, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::with_val(prec, n), im: Float::new(prec), digits }
    }

    pub fn from_integer(n: &Integer, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::with_val(prec, n), im: Float::new(prec), digits }
    }

    pub fn from_rational(q: &Rational, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::with_val(prec, q), im: Float::new(prec), digits }
    }

    /// Exact rational parts `re + i im`.
    pub fn from_rationals(re: &Rational, im: &Rational, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im), digits }
    }

    /// Wraps two floats; both are rounded to the precision implied by `digits`.
    pub fn from_floats(re: Float, im: Float, digits: u32) -> Self {
        let prec = bits_for(digits);
        let mut re = re;
        let mut im = im;
        re.set_prec(prec);
        im.set_prec(prec);
        Self { re, im, digits }
    }

    pub fn from_real(re: Float, digits: u32) -> Self {
        let prec = bits_for(digits);
        Self::from_floats(re, Float::new(prec), digits)
    }

    /// Parses decimal strings produced by [`ApComplex::re_string`].
    pub fn parse(re: &str, im: &str, digits: u32) -> Option<Self> {
        let prec = bits_for(digits);
        let re = Float::with_val(prec, Float::parse(re).ok()?);
        let im = Float::with_val(prec, Float::parse(im).ok()?);
        Some(Self { re, im, digits })
    }

    /// `i^k` computed exactly.
    pub fn i_pow(k: i64, digits: u32) -> Self {
        match k.rem_euclid(4) {
            0 => Self::from_f64_parts(1.0, 0.0, digits),
            1 => Self::from_f64_parts(0.0, 1.0, digits),
            2 => Self::from_f64_parts(-1.0, 0.0, digits),
            _ => Self::from_f64_parts(0.0, -1.0, digits),
        }
    }

    /// `e(num/den) = exp(2 pi i num/den)`, reducing the argument mod 1 exactly
    /// first. Quarter turns are returned exactly.
    pub fn unit_root(num: &Integer, den: &Integer, digits: u32) -> Self {
        assert!(*den != 0, "unit_root with zero denominator");
        let frac = Rational::from((num.clone(), den.clone()));
        let floor = frac.clone().floor();
        let frac = frac - floor;
        let four = Rational::from(frac.clone() * 4u32);
        if four.denom() == &1u32 {
            return Self::i_pow(four.numer().to_i64().unwrap_or(0), digits);
        }
        let prec = bits_for(digits);
        let angle = Float::with_val(prec, &frac) * two_pi(prec);
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self { re: c, im: s, digits }
    }

    /// `e(num/den)` for machine integers.
    pub fn unit_root_i64(num: i64, den: i64, digits: u32) -> Self {
        Self::unit_root(&Integer::from(num), &Integer::from(den), digits)
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Re-tags the value at a new precision, rounding or padding the mantissa.
    pub fn with_digits(&self, digits: u32) -> Self {
        Self::from_floats(self.re.clone(), self.im.clone(), digits)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_f64_parts(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im), digits: self.digits }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self { re: Float::with_val(self.prec(), -&self.im), im: self.re.clone(), digits: self.digits }
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re * factor),
            im: Float::with_val(prec, &self.im * factor),
            digits: self.digits,
        }
    }

    pub fn scale_i64(&self, factor: i64) -> Self {
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re * factor),
            im: Float::with_val(prec, &self.im * factor),
            digits: self.digits,
        }
    }

    pub fn div_real(&self, divisor: &Float) -> Self {
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re / divisor),
            im: Float::with_val(prec, &self.im / divisor),
            digits: self.digits,
        }
    }

    pub fn add_real(&self, x: &Float) -> Self {
        Self { re: Float::with_val(self.prec(), &self.re + x), im: self.im.clone(), digits: self.digits }
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let mut r = Float::with_val(prec, self.re.square_ref());
        r += Float::with_val(prec, self.im.square_ref());
        r
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re / &n),
            im: Float::with_val(prec, -(Float::with_val(prec, &self.im / &n))),
            digits: self.digits,
        }
    }

    pub fn div(&self, rhs: &ApComplex) -> Self {
        let digits = self.digits.min(rhs.digits);
        let prec = bits_for(digits);
        let n = rhs.norm_sqr();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re += Float::with_val(prec, &self.im * &rhs.im);
        re /= &n;
        let mut im = Float::with_val(prec, &self.im * &rhs.re);
        im -= Float::with_val(prec, &self.re * &rhs.im);
        im /= &n;
        Self { re, im, digits }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let m = Float::with_val(prec, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        Self { re: Float::with_val(prec, &m * &c), im: m * s, digits: self.digits }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let prec = self.prec();
        let modulus = self.abs();
        Self { re: modulus.ln(), im: Float::with_val(prec, self.im.atan2_ref(&self.re)), digits: self.digits }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec();
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation, then the
        // other part follows from im = 2 * a * b.
        let t = Float::with_val(prec, (Float::with_val(prec, &r + &*self.re.as_abs())) / 2u32).sqrt();
        let other = Float::with_val(prec, &self.im / &t) / 2u32;
        if self.re >= 0 {
            Self { re: t, im: other, digits: self.digits }
        } else if self.im >= 0 {
            Self { re: other, im: t, digits: self.digits }
        } else {
            Self { re: Float::with_val(prec, -other), im: Float::with_val(prec, -t), digits: self.digits }
        }
    }

    /// Principal power `self^w = exp(w ln self)`.
    pub fn powc(&self, w: &ApComplex) -> Self {
        (w * &self.ln()).exp()
    }

    /// `x^w` for a positive real base.
    pub fn real_pow(base: &Float, w: &ApComplex) -> Self {
        let ln = Float::with_val(w.prec(), base.ln_ref());
        w.scale(&ln).exp()
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Self {
        let mut result = ApComplex::one(self.digits);
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    pub fn sin(&self) -> Self {
        // sin(a+ib) = sin a cosh b + i cos a sinh b
        let prec = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(prec));
        Self { re: s * ch, im: c * sh, digits: self.digits }
    }

    pub fn cos(&self) -> Self {
        let prec = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(prec));
        Self { re: c * ch, im: Float::with_val(prec, -(s * sh)), digits: self.digits }
    }

    /// `|self - other|` as f64.
    pub fn dist_f64(&self, other: &ApComplex) -> f64 {
        (self - other).abs_f64()
    }

    /// Decimal rendering of the real part carrying every stored bit.
    pub fn re_string(&self) -> String {
        float_to_string(&self.re)
    }

    pub fn im_string(&self) -> String {
        float_to_string(&self.im)
    }

    /// Rendering with `n` significant digits per part.
    pub fn to_string_digits(&self, n: usize) -> String {
        let re = self.re.to_string_radix(10, Some(n));
        let im = self.im.to_string_radix(10, Some(n));
        if self.im.is_sign_negative() {
            format!("{re} - {}i", im.trim_start_matches('-'))
        } else {
            format!("{re} + {im}i")
        }
    }
}

/// Round-trip decimal string for a float: `1 + ceil(prec * log10 2)` digits
/// always recover the same binary value.
pub fn float_to_string(x: &Float) -> String {
    let n = 1 + (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize;
    x.to_string_radix(10, Some(n))
}

impl fmt::Display for ApComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(self.digits as usize))
    }
}

impl PartialEq for ApComplex {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl Add for &ApComplex {
    type Output = ApComplex;
    fn add(self, rhs: &ApComplex) -> ApComplex {
        let digits = self.digits.min(rhs.digits);
        let prec = bits_for(digits);
        ApComplex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
            digits,
        }
    }
}

impl Sub for &ApComplex {
    type Output = ApComplex;
    fn sub(self, rhs: &ApComplex) -> ApComplex {
        let digits = self.digits.min(rhs.digits);
        let prec = bits_for(digits);
        ApComplex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
            digits,
        }
    }
}

impl Mul for &ApComplex {
    type Output = ApComplex;
    fn mul(self, rhs: &ApComplex) -> ApComplex {
        let digits = self.digits.min(rhs.digits);
        let prec = bits_for(digits);
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re -= Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        im += Float::with_val(prec, &self.im * &rhs.re);
        ApComplex { re, im, digits }
    }
}

impl Neg for &ApComplex {
    type Output = ApComplex;
    fn neg(self) -> ApComplex {
        let prec = self.prec();
        ApComplex {
            re: Float::with_val(prec, -&self.re),
            im: Float::with_val(prec, -&self.im),
            digits: self.digits,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for ApComplex {
            type Output = ApComplex;
            fn $method(self, rhs: ApComplex) -> ApComplex {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ApComplex> for ApComplex {
            type Output = ApComplex;
            fn $method(self, rhs: &ApComplex) -> ApComplex {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::AddAssign<&ApComplex> for ApComplex {
    fn add_assign(&mut self, rhs: &ApComplex) {
        if rhs.digits < self.digits {
            *self = &*self + rhs;
        } else {
            self.re += &rhs.re;
            self.im += &rhs.im;
        }
    }
}

impl std::ops::SubAssign<&ApComplex> for ApComplex {
    fn sub_assign(&mut self, rhs: &ApComplex) {
        if rhs.digits < self.digits {
            *self = &*self - rhs;
        } else {
            self.re -= &rhs.re;
            self.im -= &rhs.im;
        }
    }
}

impl std::iter::Sum for ApComplex {
    fn sum<I: Iterator<Item = ApComplex>>(mut iter: I) -> ApComplex {
        let first = iter.next().expect("sum of an empty ApComplex iterator");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_carries_guard_digits() {
        let z = ApComplex::one(30);
        assert!(z.prec() as f64 >= 50.0 * std::f64::consts::LOG2_10);
        let w = ApComplex::one(10);
        assert_eq!((&z + &w).digits(), 10);
    }

    #[test]
    fn exp_ln_inverse() {
        let z = ApComplex::from_f64_parts(0.7, -2.3, 40);
        let back = z.ln().exp();
        assert!(back.dist_f64(&z) < 1e-45);
    }

    #[test]
    fn sqrt_branches() {
        for &(re, im) in &[(2.0, 0.0), (-4.0, 0.0), (-1.0, -3.0), (0.5, 2.0)] {
            let z = ApComplex::from_f64_parts(re, im, 30);
            let r = z.sqrt();
            assert!(r.square().dist_f64(&z) < 1e-40);
            assert!(r.re().to_f64() >= 0.0);
        }
        let r = ApComplex::from_f64(-4.0, 30).sqrt();
        assert!(r.dist_f64(&ApComplex::from_f64_parts(0.0, 2.0, 30)) < 1e-45);
    }

    #[test]
    fn unit_roots_exact_on_quarter_turns() {
        let z = ApComplex::unit_root_i64(-3, 4, 30);
        assert_eq!(z, ApComplex::i(30));
        let w = ApComplex::unit_root_i64(7, 5, 30);
        let v = ApComplex::unit_root_i64(2, 5, 30);
        assert_eq!(w, v);
        let cube = ApComplex::unit_root_i64(1, 3, 30).powi(3);
        assert!(cube.dist_f64(&ApComplex::one(30)) < 1e-45);
    }

    #[test]
    fn sin_cos_identity() {
        let z = ApComplex::from_f64_parts(1.3, 0.4, 30);
        let s = z.sin();
        let c = z.cos();
        let one = &s.square() + &c.square();
        assert!(one.dist_f64(&ApComplex::one(30)) < 1e-40);
    }

    #[test]
    fn string_round_trip_is_bit_exact() {
        let z = ApComplex::from_f64_parts(1.0, 3.0, 30).sqrt().exp();
        let back = ApComplex::parse(&z.re_string(), &z.im_string(), 30).unwrap();
        assert_eq!(back, z);
    }
}
