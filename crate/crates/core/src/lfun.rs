//! Additively twisted L-values `L(1/2 + s, f (x) e(a/b))`.
//!
//! Splitting the period integral of `f(a/b + iy)` at `y = 1/b` and applying
//! `f(a/b + iy) = (iby)^{-k} f(-abar/b + i/(b^2 y))` on the lower piece gives,
//! with `nu = k/2 + s` and `x_n = 2 pi n / b`,
//!
//! ```text
//! L(1/2 + s) = (2pi/b)^nu / Gamma(nu) * sum_n a(n) e^{-x_n}
//!              [ e(na/b) G(nu, x_n) + i^k e(-n abar/b) G(k - nu, x_n) ]
//! ```
//!
//! where `G(mu, x) = e^x x^{-mu} Gamma(mu, x)`.

use rayon::prelude::*;
use rug::{Float, Integer};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::hecke::HeckeEigenform;
use crate::modarith::ReducedPhase;
use crate::special::complex::{bits_for, two_pi, GUARD_DIGITS};
use crate::special::{gamma, ApComplex, IncompleteGamma};

/// Terms beyond this are refused rather than computed.
pub const MAX_TERMS: usize = 2_000_000;
const CHUNK: usize = 256;

#[derive(Clone, Debug)]
pub struct LQuery {
    pub form: HeckeEigenform,
    pub phase: ReducedPhase,
    /// Shift; the evaluation point is `1/2 + s`.
    pub s: ApComplex,
    pub digits: u32,
}

#[derive(Clone, Debug)]
pub struct LValue {
    pub value: ApComplex,
    /// Certified truncation bound plus a rounding estimate.
    pub error_bound: f64,
    pub terms: usize,
    pub working_digits: u32,
}

impl LQuery {
    pub fn new(form: &HeckeEigenform, phase: ReducedPhase, s: ApComplex, digits: u32) -> Self {
        Self { form: form.clone(), phase, s, digits }
    }

    pub fn at_real(form: &HeckeEigenform, phase: ReducedPhase, s: i64, digits: u32) -> Self {
        Self::new(form, phase, ApComplex::from_i64(s, digits), digits)
    }
}

/// Largest admissible `|Re s|`.
pub fn strip_limit(weight: u32) -> f64 {
    weight as f64 / 2.0 - 1.0
}

fn validate(q: &LQuery) -> Result<()> {
    if q.digits < 10 {
        return Err(Error::InvalidInput(format!("precision must be at least 10 digits, got {}", q.digits)));
    }
    let limit = strip_limit(q.form.weight());
    let (re, im) = q.s.to_f64_parts();
    if !(re.abs() <= limit) || !im.is_finite() {
        return Err(Error::OutsideStrip { s_re: re, s_im: im, limit });
    }
    Ok(())
}

/// `ln` of the bound `2 n^{k/2} e^{-x_n} / (x_n - max(sigma - 1, 0))` on the
/// `n`-th term of one sum, or `None` when `x_n` is not yet past `sigma - 1`.
fn ln_term_bound(k: u32, b: f64, sigma: f64, n: f64) -> Option<f64> {
    let x = std::f64::consts::TAU * n / b;
    let c = (sigma - 1.0).max(0.0);
    if x <= c {
        return None;
    }
    Some(std::f64::consts::LN_2 + (k as f64 / 2.0) * n.ln() - x - (x - c).ln())
}

/// `ln` of an upper bound for `|G(mu, x)|`, `Re mu = sigma > 0`: the smaller
/// of `1/(x - max(sigma - 1, 0))` and `e^x x^{-sigma} Gamma(sigma)`.
fn ln_kernel_bound(sigma: f64, x: f64) -> f64 {
    let c = (sigma - 1.0).max(0.0);
    let small = x - sigma * x.ln() + ln_gamma(sigma);
    if x > c {
        small.min(-(x - c).ln())
    } else {
        small
    }
}

/// Bound on `sum_{n > N}` of the term bounds, by a geometric majorant.
fn ln_tail_bound(k: u32, b: f64, sigma: f64, n_terms: usize) -> f64 {
    let n1 = (n_terms + 1) as f64;
    let ratio = (-std::f64::consts::TAU / b + (k as f64 / 2.0) * (1.0 / n1).ln_1p()).exp();
    match ln_term_bound(k, b, sigma, n1) {
        Some(t) if ratio < 1.0 => t - (1.0 - ratio).ln(),
        _ => f64::INFINITY,
    }
}

fn ln_sum(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((a - m).exp() + (b - m).exp()).ln()
    }
}

/// Truncation point from `N = (b/2pi)((P+15) ln 10 + (k/2) ln N)`.
pub fn nominal_terms(weight: u32, b: i64, digits: u32) -> usize {
    let scale = b as f64 / std::f64::consts::TAU;
    let base = (digits as f64 + 15.0) * std::f64::consts::LN_10;
    let mut n = (scale * base).ceil().max(1.0);
    for _ in 0..50 {
        let next = (scale * (base + weight as f64 / 2.0 * n.ln())).ceil().max(1.0);
        if next == n {
            break;
        }
        n = next;
    }
    n as usize
}

pub fn evaluate(q: &LQuery) -> Result<ApComplex> {
    Ok(evaluate_detailed(q)?.value)
}

pub fn evaluate_detailed(q: &LQuery) -> Result<LValue> {
    validate(q)?;
    let k = q.form.weight();
    let b = q.phase.b();
    let bf = b as f64;
    let digits = q.digits;
    let s = q.s.with_digits(digits);
    let half_k = ApComplex::from_i64(k as i64 / 2, digits);
    let nu = &half_k + &s;
    let sigma1 = nu.re().to_f64();
    let sigma2 = k as f64 - sigma1;

    // ln |(2pi/b)^nu / Gamma(nu)|
    let gamma_lo = gamma(&nu)?;
    let ln_two_pi_b = (std::f64::consts::TAU / bf).ln();
    let ln_pref = sigma1 * ln_two_pi_b - Float::with_val(gamma_lo.prec(), gamma_lo.abs().ln()).to_f64();

    let target = -((digits + 10) as f64) * std::f64::consts::LN_10;
    let mut n_terms = nominal_terms(k, b, digits);
    let ln_tail = |n: usize| ln_pref + ln_sum(ln_tail_bound(k, bf, sigma1, n), ln_tail_bound(k, bf, sigma2, n));
    while ln_tail(n_terms) > target {
        n_terms = n_terms + n_terms / 8 + 1;
        if n_terms > MAX_TERMS {
            return Err(Error::TruncationUnsettled { achieved: ln_tail(MAX_TERMS).exp(), terms: MAX_TERMS });
        }
    }
    let tail = ln_tail(n_terms).exp();

    // dynamic range of the summands relative to the result scale
    let ln_max = (1..=n_terms)
        .map(|n| {
            let n = n as f64;
            let x = std::f64::consts::TAU * n / bf;
            let g = ln_kernel_bound(sigma1, x).max(ln_kernel_bound(sigma2, x));
            std::f64::consts::LN_2 + (k as f64 / 2.0) * n.ln() - x + g
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_scale = ln_pref + ln_max + (n_terms as f64).ln();
    let extra = (ln_scale / std::f64::consts::LN_10).ceil().max(0.0) as u32 + 2;
    let wd = digits + extra;
    let rounding = (ln_scale - ((wd + GUARD_DIGITS) as f64) * std::f64::consts::LN_10).exp();

    let value = sum_terms(q, &s.with_digits(wd), n_terms, wd)?;
    Ok(LValue { value: value.with_digits(digits), error_bound: tail + rounding, terms: n_terms, working_digits: wd })
}

fn sum_terms(q: &LQuery, s: &ApComplex, n_terms: usize, wd: u32) -> Result<ApComplex> {
    let k = q.form.weight();
    let b = q.phase.b();
    let a = q.phase.a();
    let abar = q.phase.a_inverse();
    let prec = bits_for(wd);
    let coeffs = q.form.coeffs_up_to(n_terms)?;

    let nu = &ApComplex::from_i64(k as i64 / 2, wd) + s;
    let mu = &ApComplex::from_i64(k as i64, wd) - &nu;
    let k1 = IncompleteGamma::new(&nu)?;
    let k2 = IncompleteGamma::new(&mu)?;
    let roots: Vec<ApComplex> = (0..b).map(|j| ApComplex::unit_root_i64(j, b, wd)).collect();
    let step = Float::with_val(prec, two_pi(prec) / b);

    let indices: Vec<usize> = (1..=n_terms).collect();
    let partials: Vec<Result<(ApComplex, ApComplex)>> = indices
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s1 = ApComplex::zero(wd);
            let mut s2 = ApComplex::zero(wd);
            for &n in chunk {
                let an: &Integer = &coeffs[n];
                if *an == 0 {
                    continue;
                }
                let x = Float::with_val(prec, &step * n as u64);
                let mut w = Float::with_val(prec, (-x.clone()).exp());
                w *= an;
                let nb = n as i64 % b;
                let r1 = &roots[(nb * a).rem_euclid(b) as usize];
                let r2 = &roots[(-nb * abar).rem_euclid(b) as usize];
                let g1 = k1.scaled(&x)?;
                let g2 = k2.scaled(&x)?;
                s1 += &(r1 * &g1.scale(&w));
                s2 += &(r2 * &g2.scale(&w));
            }
            Ok((s1, s2))
        })
        .collect();

    let mut s1 = ApComplex::zero(wd);
    let mut s2 = ApComplex::zero(wd);
    for p in partials {
        let (a1, a2) = p?;
        s1 += &a1;
        s2 += &a2;
    }
    let bracket = &s1 + &(&ApComplex::i_pow(k as i64, wd) * &s2);
    let two_pi_b = Float::with_val(prec, two_pi(prec) / b);
    let pref = ApComplex::real_pow(&two_pi_b, &nu).div(&gamma(&nu)?);
    Ok(&pref * &bracket)
}

/// `Lambda(s; a/b) = (b/2pi)^s Gamma(k/2 + s) L(1/2 + s, f (x) e(a/b))`.
pub fn completed(q: &LQuery) -> Result<ApComplex> {
    let l = evaluate(q)?;
    Ok(completion_factor(q)? * l)
}

fn completion_factor(q: &LQuery) -> Result<ApComplex> {
    let digits = q.digits;
    let prec = bits_for(digits);
    let s = q.s.with_digits(digits);
    let b_over = Float::with_val(prec, Float::with_val(prec, q.phase.b()) / two_pi(prec));
    let nu = &ApComplex::from_i64(q.form.weight() as i64 / 2, digits) + &s;
    Ok(&ApComplex::real_pow(&b_over, &s) * &gamma(&nu)?)
}

/// `|Lambda(s; -abar/b) - i^k Lambda(-s; a/b)|`.
pub fn fe_residual(form: &HeckeEigenform, phase: ReducedPhase, s: &ApComplex, digits: u32) -> Result<f64> {
    let lhs = completed(&LQuery::new(form, phase.dual(), s.clone(), digits))?;
    let rhs = completed(&LQuery::new(form, phase, -s, digits))?;
    let rhs = &ApComplex::i_pow(form.weight() as i64, digits) * &rhs;
    Ok((&lhs - &rhs).abs_f64())
}

/// One functional-equation test point.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeCase {
    pub weight: u32,
    pub a: i64,
    pub b: i64,
    pub s_re: f64,
    pub s_im: f64,
}

/// `count` reproducible cases with `b <= max_b`, `|Re s| <= 2`, `|Im s| <= 1`.
pub fn random_fe_cases(count: usize, max_b: i64, seed: u64) -> Vec<FeCase> {
    use num_integer::Integer as _;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let weight = crate::hecke::SUPPORTED_WEIGHTS[rng.gen_range(0..crate::hecke::SUPPORTED_WEIGHTS.len())];
            let b = rng.gen_range(1..=max_b.max(1));
            let a = loop {
                let a = rng.gen_range(0..b);
                if a.gcd(&b) == 1 {
                    break a;
                }
            };
            // quantized so the cases print and parse back exactly
            let s_re = (rng.gen_range(-2.0..=2.0f64) * 1024.0).round() / 1024.0;
            let s_im = (rng.gen_range(-1.0..=1.0f64) * 1024.0).round() / 1024.0;
            FeCase { weight, a, b, s_re, s_im }
        })
        .collect()
}

pub fn fe_case_residual(case: &FeCase, digits: u32) -> Result<f64> {
    let form = crate::hecke::build_form(case.weight, 1)?;
    let phase = crate::modarith::reduce_phase(case.a, case.b)?;
    fe_residual(&form, phase, &ApComplex::from_f64_parts(case.s_re, case.s_im, digits), digits)
}

/// `f(tau) = sum_{n <= N} a(n) e(n tau)` for `tau = x + iy`, `y > 0`, with
/// `N` chosen so the omitted terms are below `10^{-(digits + 10)}`.
pub fn q_expansion(form: &HeckeEigenform, x: &Float, y: &Float, digits: u32) -> Result<ApComplex> {
    let k = form.weight() as f64;
    let yf = y.to_f64();
    if yf <= 0.0 {
        return Err(Error::InvalidInput("q-expansion needs Im tau > 0".into()));
    }
    let decay = std::f64::consts::TAU * yf;
    let target = (digits as f64 + 12.0) * std::f64::consts::LN_10;
    let mut n = 1usize;
    while (k / 2.0) * (n as f64).ln() + std::f64::consts::LN_2 - decay * n as f64 > -target || (n as f64) < k / decay {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::TruncationUnsettled { achieved: f64::NAN, terms: n });
        }
    }
    let prec = bits_for(digits);
    let coeffs = form.coeffs_up_to(n)?;
    let tp = two_pi(prec);
    let mut acc = ApComplex::zero(digits);
    for (m, c) in coeffs.iter().enumerate().take(n + 1).skip(1) {
        let phase = Float::with_val(prec, &tp * x) * m as u64;
        let damp = Float::with_val(prec, -(Float::with_val(prec, &tp * y) * m as u64)).exp();
        let (sn, cs) = phase.sin_cos(Float::new(prec));
        let mag = Float::with_val(prec, c * &damp);
        acc += &ApComplex::from_floats(Float::with_val(prec, &mag * &cs), mag * sn, digits);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{build_form, divisor_counts};
    use crate::modarith::reduce_phase;

    const P: u32 = 30;

    fn tol(p: u32) -> f64 {
        10f64.powi(-(p as i32 - 10))
    }

    #[test]
    fn modularity_at_sample_points() {
        // f(a/b + iy) = (iby)^{-k} f(-abar/b + i/(b^2 y))
        let prec = bits_for(P);
        for (k, a, b) in [(12u32, 1i64, 1i64), (12, 2, 5), (16, 3, 4), (18, 1, 3), (26, 2, 5)] {
            let form = build_form(k, 10).unwrap();
            let phase = reduce_phase(a, b).unwrap();
            let y = Float::with_val(prec, 0.3);
            let x1 = Float::with_val(prec, Float::with_val(prec, a) / b);
            let lhs = q_expansion(&form, &x1, &y, P).unwrap();
            let x2 = Float::with_val(prec, Float::with_val(prec, -phase.a_inverse()) / b);
            let y2 = Float::with_val(prec, Float::with_val(prec, b * b) * &y).recip();
            let rhs = q_expansion(&form, &x2, &y2, P).unwrap();
            let iby = ApComplex::from_floats(Float::new(prec), Float::with_val(prec, &y * b), P);
            let factor = iby.powi(-(k as i64));
            let rhs = &factor * &rhs;
            let rel = lhs.dist_f64(&rhs) / lhs.abs_f64();
            assert!(rel < 1e-25, "k={k} a/b={a}/{b} rel={rel}");
        }
    }

    #[test]
    fn odd_sign_forces_vanishing() {
        for k in [18u32, 22, 26] {
            let form = build_form(k, 10).unwrap();
            let v = evaluate(&LQuery::at_real(&form, ReducedPhase::trivial(), 0, P)).unwrap();
            assert!(v.abs_f64() < 10f64.powi(-(P as i32 - 5)), "k={k} {v}");
        }
    }

    #[test]
    fn fe_examples() {
        let cases: [(u32, i64, i64, (f64, f64)); 3] =
            [(12, 3, 5, (0.25, 0.0)), (22, 2, 7, (-0.4, 0.2)), (12, 0, 1, (1.0, 0.0))];
        for (k, a, b, (sr, si)) in cases {
            let form = build_form(k, 10).unwrap();
            let s = ApComplex::from_f64_parts(sr, si, P);
            let r = fe_residual(&form, reduce_phase(a, b).unwrap(), &s, P).unwrap();
            assert!(r < 1e-20, "k={k} {a}/{b} residual {r}");
        }
    }

    #[test]
    fn completed_symmetries() {
        let f12 = build_form(12, 10).unwrap();
        let s = ApComplex::from_f64_parts(0.3, 0.1, P);
        let triv = ReducedPhase::trivial();
        let l = completed(&LQuery::new(&f12, triv, s.clone(), P)).unwrap();
        let r = completed(&LQuery::new(&f12, triv, -&s, P)).unwrap();
        assert!(l.dist_f64(&r) < tol(P));

        let f16 = build_form(16, 10).unwrap();
        let ph = reduce_phase(3, 7).unwrap();
        let t = ApComplex::from_f64_parts(0.0, 0.7, P);
        let l = completed(&LQuery::new(&f16, ph, t.clone(), P)).unwrap();
        let r = completed(&LQuery::new(&f16, ph.dual(), -&t, P)).unwrap();
        assert!((l.abs_f64() - r.abs_f64()).abs() < tol(P));
    }

    #[test]
    fn strip_is_enforced() {
        let form = build_form(12, 10).unwrap();
        let q = LQuery::new(&form, ReducedPhase::trivial(), ApComplex::from_f64(5.5, P), P);
        assert!(matches!(evaluate(&q), Err(Error::OutsideStrip { .. })));
        let q = LQuery::new(&form, ReducedPhase::trivial(), ApComplex::from_f64(5.0, P), P);
        assert!(evaluate(&q).is_ok());
        let q = LQuery::new(&form, ReducedPhase::trivial(), ApComplex::zero(5), 5);
        assert!(evaluate(&q).is_err());
    }

    /// `sum_{n <= n0} lambda(n) e(n a/b) n^{-(1/2 + s)}` with the
    /// Deligne-majorant tail bound `2 sigma (ln N + 1) / ((sigma - 1) N^{sigma - 1})`
    /// for the exponent `sigma = 1/2 + Re s` (partial summation with
    /// `sum_{n <= x} d(n) <= x (ln x + 1)`).
    fn direct_series(form: &HeckeEigenform, a: i64, b: i64, s: f64, n0: usize) -> (ApComplex, f64) {
        let digits = 25;
        let prec = bits_for(digits);
        let k = form.weight();
        let coeffs = form.coeffs_up_to(n0).unwrap();
        let exponent = Float::with_val(prec, s + 0.5 + (k as f64 - 1.0) / 2.0);
        let mut acc = ApComplex::zero(digits);
        for n in 1..=n0 {
            let mag = Float::with_val(prec, &coeffs[n]) / Float::with_val(prec, Float::with_val(prec, n as u64).ln() * &exponent).exp();
            acc += &ApComplex::unit_root_i64(n as i64 * a, b, digits).scale(&mag);
        }
        let sigma = s + 0.5;
        let nf = n0 as f64;
        let tail = sigma * ((nf.ln() + 1.0) / ((sigma - 1.0) * nf.powf(sigma - 1.0)) + 1.0 / ((sigma - 1.0).powi(2) * nf.powf(sigma - 1.0)));
        (acc, tail)
    }

    #[test]
    fn direct_series_weight_12_third_half() {
        let form = build_form(12, 10_000).unwrap();
        let (direct, tail) = direct_series(&form, 1, 5, 1.5, 10_000);
        let v = evaluate(&LQuery::new(&form, reduce_phase(1, 5).unwrap(), ApComplex::from_f64(1.5, P), P)).unwrap();
        let diff = v.dist_f64(&direct);
        assert!(tail < 5e-3);
        assert!(diff <= tail, "diff {diff} tail {tail}");
    }

    #[test]
    fn direct_series_deep_in_convergence() {
        use rand::{Rng, SeedableRng};
        let form = build_form(12, 400).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 20 {
            let b: i64 = rng.gen_range(1..=30);
            let a: i64 = rng.gen_range(0..b);
            let Ok(phase) = reduce_phase(a, b) else { continue };
            let (direct, tail) = direct_series(&form, phase.a(), phase.b(), 4.5, 400);
            assert!(tail < 1e-8);
            let v = evaluate(&LQuery::new(&form, phase, ApComplex::from_f64(4.5, P), P)).unwrap();
            assert!(v.dist_f64(&direct) < 1e-8, "phase {phase}");
            checked += 1;
        }
    }

    #[test]
    fn precision_monotonicity() {
        let form = build_form(16, 10).unwrap();
        let ph = reduce_phase(4, 9).unwrap();
        let s = ApComplex::from_f64_parts(0.6, -0.9, 60);
        let lo = evaluate(&LQuery::new(&form, ph, s.with_digits(30), 30)).unwrap();
        let hi = evaluate(&LQuery::new(&form, ph, s, 60)).unwrap();
        assert!(lo.dist_f64(&hi) < 1e-25);
    }

    #[test]
    fn conjugation_symmetry() {
        let form = build_form(20, 10).unwrap();
        let ph = reduce_phase(5, 12).unwrap();
        let s = ApComplex::from_f64_parts(0.4, 1.3, P);
        let v = evaluate(&LQuery::new(&form, ph, s.clone(), P)).unwrap();
        let w = evaluate(&LQuery::new(&form, ph.negated(), s.conj(), P)).unwrap();
        assert!(v.conj().dist_f64(&w) < tol(P));
    }

    #[test]
    fn error_bound_is_reported() {
        let form = build_form(12, 10).unwrap();
        let lv = evaluate_detailed(&LQuery::at_real(&form, reduce_phase(2, 5).unwrap(), 0, P)).unwrap();
        assert!(lv.error_bound < 10f64.powi(-(P as i32 + 5)));
        assert!(lv.terms >= nominal_terms(12, 5, P));
        let _ = divisor_counts(2);
    }
}
