//! Stirling expansion of `Gamma(z + it)` in powers of `1/t`.
//!
//! With `u = 1/t`, writing `w = z + it = it (1 - i z u)` in the Stirling
//! series for `ln Gamma(w)` and removing the main term leaves
//!
//! ```text
//! phi(u) = -(z - 1/2) sum_{m>=1} (iz)^m u^m / m
//!          - i sum_{m>=1} (iz)^{m+1} u^m / (m + 1)
//!          + sum_{j>=1} B_{2j} / (2j (2j - 1)) (-iu)^{2j-1} (1 - izu)^{-(2j-1)}
//! ```
//!
//! and `1 + sum a_m(z) t^{-m}` is the power series of `exp(phi(u))`. The
//! coefficients are the same for both signs of `t`; the sign only enters the
//! main term.

use rug::{Float, Integer, Rational};

use super::complex::{pi, two_pi, ApComplex};
use super::gamma::{bernoulli_numbers, gamma};
use crate::error::{Error, Result};

/// `a_0 = 1, a_1(z), ..., a_M(z)`.
pub fn stirling_coefficients(z: &ApComplex, order: usize) -> Vec<ApComplex> {
    let digits = z.digits();
    let prec = z.prec();
    let iz = z.mul_i();
    let zero = ApComplex::zero(digits);
    let mut phi = vec![zero.clone(); order + 1];

    // (iz)^m for m = 0..=order+1
    let mut iz_pow = Vec::with_capacity(order + 2);
    iz_pow.push(ApComplex::one(digits));
    for m in 1..=order + 1 {
        let next = &iz_pow[m - 1] * &iz;
        iz_pow.push(next);
    }
    let z_half = z.add_real(&Float::with_val(prec, -0.5));
    for m in 1..=order {
        let a = (&z_half * &iz_pow[m]).scale_i64(-1).div_real(&Float::with_val(prec, m as u64));
        let b = iz_pow[m + 1].mul_i().scale_i64(-1).div_real(&Float::with_val(prec, (m + 1) as u64));
        phi[m] = &(&phi[m] + &a) + &b;
    }

    let bern = bernoulli_numbers(order + 2);
    let mut j = 1usize;
    while 2 * j - 1 <= order {
        let r = 2 * j - 1;
        let coeff = Rational::from(&bern[2 * j] / Rational::from((2 * j * (2 * j - 1)) as u64));
        // (-i)^r B_{2j}/(2j(2j-1))
        let lead = ApComplex::i_pow(-(r as i64), digits).scale(&Float::with_val(prec, &coeff));
        // (1 - y)^{-r} = sum_n C(r + n - 1, n) y^n, y = iz u
        for n in 0..=(order - r) {
            let binom = Integer::from(Integer::binomial_u(r as u32 + n as u32 - 1, n as u32));
            let term = (&lead * &iz_pow[n]).scale(&Float::with_val(prec, &binom));
            phi[r + n] += &term;
        }
        j += 1;
    }

    // e = exp(phi): e_n = (1/n) sum_{k=1}^{n} k phi_k e_{n-k}
    let mut e = Vec::with_capacity(order + 1);
    e.push(ApComplex::one(digits));
    for n in 1..=order {
        let mut acc = zero.clone();
        for k in 1..=n {
            acc += &(&phi[k] * &e[n - k]).scale_i64(k as i64);
        }
        e.push(acc.div_real(&Float::with_val(prec, n as u64)));
    }
    e
}

/// The leading factor
/// `sqrt(2 pi) e^{-i pi sgn(t)/4} |t|^{z-1/2} exp(-pi|t|/2 + i t ln|t| - i t + i z pi sgn(t)/2)`.
pub fn stirling_main_term(z: &ApComplex, t: f64) -> ApComplex {
    let digits = z.digits();
    let prec = z.prec();
    let sgn: i64 = if t >= 0.0 { 1 } else { -1 };
    let tf = Float::with_val(prec, t);
    let abs_t = Float::with_val(prec, tf.abs_ref());
    let ln_abs_t = Float::with_val(prec, abs_t.ln_ref());
    let p = pi(prec);

    let half = Float::with_val(prec, 0.5);
    let power = z.add_real(&Float::with_val(prec, -&half)).scale(&ln_abs_t);
    let mut phase_re = Float::with_val(prec, &p * &abs_t);
    phase_re *= &half;
    phase_re = -phase_re;
    let mut phase_im = Float::with_val(prec, &tf * &ln_abs_t);
    phase_im -= &tf;
    phase_im -= Float::with_val(prec, &p * sgn) / 4u32;
    let rot = z.mul_i().scale(&Float::with_val(prec, &p * sgn)).div_real(&Float::with_val(prec, 2u32));
    let exponent = &(&power + &ApComplex::from_floats(phase_re, phase_im, digits)) + &rot;
    let root = Float::with_val(prec, two_pi(prec).sqrt());
    exponent.exp().scale(&root)
}

/// Stirling approximation of order `order` with its observed deviation
/// `|approx - Gamma(z + it)| / |main term|`.
pub fn stirling_approx(z: &ApComplex, t: f64, order: usize) -> Result<(ApComplex, f64)> {
    if !(t.abs() > 0.5) {
        return Err(Error::InvalidInput(format!("Stirling expansion needs |t| > 1/2, got {t}")));
    }
    if *z.re() < 0 {
        return Err(Error::InvalidInput("Stirling expansion needs Re z >= 0".into()));
    }
    let digits = z.digits();
    let prec = z.prec();
    let coeffs = stirling_coefficients(z, order);
    let inv_t = Float::with_val(prec, t).recip();
    let mut factor = ApComplex::zero(digits);
    for a in coeffs.iter().rev() {
        factor = &factor.scale(&inv_t) + a;
    }
    let main = stirling_main_term(z, t);
    let approx = &main * &factor;
    let exact = gamma(&(z + &ApComplex::from_f64_parts(0.0, t, digits)))?;
    // magnitudes underflow f64 for large |t|, so divide before converting
    let deviation = Float::with_val(prec, (&approx - &exact).abs() / main.abs()).to_f64();
    Ok((approx, deviation))
}

/// Least-squares slope of `ln(deviation)` against `ln|t|`.
pub fn stirling_decay_slope(z: &ApComplex, ts: &[f64], order: usize) -> Result<f64> {
    let mut pts = Vec::with_capacity(ts.len());
    for &t in ts {
        let (_, dev) = stirling_approx(z, t, order)?;
        pts.push((t.abs().ln(), dev.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 40;

    #[test]
    fn first_coefficient_at_half() {
        let a = stirling_coefficients(&ApComplex::from_f64(0.5, P), 3);
        let expected = ApComplex::from_rationals(&Rational::new(), &Rational::from((1, 24)), P);
        assert!(a[1].dist_f64(&expected) < 1e-40);
    }

    #[test]
    fn order_zero_at_half() {
        let (_, dev) = stirling_approx(&ApComplex::from_f64(0.5, P), 50.0, 0).unwrap();
        assert!(dev <= 1.0 / 50.0, "dev {dev}");
    }

    #[test]
    fn both_signs_of_t() {
        let z = ApComplex::from_f64_parts(0.8, 0.3, P);
        for &t in &[-120.0, 120.0] {
            let (_, dev) = stirling_approx(&z, t, 3).unwrap();
            assert!(dev < 10.0 * 120f64.powi(-4), "t={t} dev={dev}");
        }
    }

    #[test]
    fn small_t_rejected() {
        assert!(stirling_approx(&ApComplex::from_f64(1.0, P), 0.5, 1).is_err());
        assert!(stirling_approx(&ApComplex::from_f64(1.0, P), -0.2, 1).is_err());
    }

    #[test]
    fn decay_slopes() {
        let ts = [50.0, 100.0, 200.0, 400.0, 800.0];
        for order in 0..4 {
            let slope = stirling_decay_slope(&ApComplex::from_f64_parts(0.3, 0.0, P), &ts, order).unwrap();
            assert!(slope <= -(order as f64 + 1.0) + 0.2, "order {order} slope {slope}");
        }
    }

    #[test]
    fn doubling_t_at_order_two() {
        let z = ApComplex::from_f64(0.5, P);
        let (_, d1) = stirling_approx(&z, 100.0, 2).unwrap();
        let (_, d2) = stirling_approx(&z, 200.0, 2).unwrap();
        let ratio = d2 / d1;
        assert!((ratio - 0.125).abs() <= 0.5 * 0.125, "ratio {ratio}");
    }
}
