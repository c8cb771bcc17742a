//! Gauss-Legendre quadrature along vertical lines and circles.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::complex::{bits_for, pi, two_pi};
use crate::special::{gamma, ApComplex};

const MAX_NODES: usize = 512;
const MAX_PANELS: usize = 20_000;
const BATCH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrandId {
    /// `Gamma(w) e^{i pi w/2} (2 pi x)^{-w}`.
    MellinExp,
    /// `Gamma(w) e^{i pi w/2} x^w Gamma(k/2 - s - w) / Gamma(k/2 + s + w)`.
    IIntegrand,
    /// The `I` integrand at `s = 0`.
    JIntegrand,
    /// The `I` integrand on a line to the right of the poles at `0, -1`.
    Q0Integrand,
}

/// How the part of the line below `c - iT` is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerTail {
    /// Drop it and report the power-law tail estimate.
    Truncate,
    /// Continue from `c - iT` along a ray at 45 degrees off the line, turning
    /// to the side where the integrand decays faster than any exponential.
    /// No poles lie below `Im w = -T` when `T > |Im s| + 1`.
    Ray,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub truncation: f64,
    pub nodes_per_unit: usize,
    pub integrand: IntegrandId,
    pub lower_tail: LowerTail,
}

impl ContourSpec {
    pub fn new(integrand: IntegrandId, abscissa: f64, truncation: f64) -> Self {
        Self { abscissa, truncation, nodes_per_unit: 16, integrand, lower_tail: LowerTail::Truncate }
    }

    pub fn with_ray(mut self) -> Self {
        self.lower_tail = LowerTail::Ray;
        self
    }
}

/// Parameters shared by the integrands; `s` and `weight` are ignored by
/// [`IntegrandId::MellinExp`].
#[derive(Clone, Debug)]
pub struct IntegrandParams {
    pub x: Float,
    pub s: ApComplex,
    pub weight: u32,
    pub digits: u32,
}

impl IntegrandParams {
    pub fn new(x: f64, s: ApComplex, weight: u32, digits: u32) -> Self {
        Self { x: Float::with_val(bits_for(digits), x), s: s.with_digits(digits), weight, digits }
    }

    pub fn mellin(x: f64, digits: u32) -> Self {
        Self::new(x, ApComplex::zero(digits), 12, digits)
    }
}

#[derive(Clone, Debug)]
pub struct Integral {
    /// `(1/2 pi i)` times the contour integral.
    pub value: ApComplex,
    pub tail: f64,
    pub quad_error: f64,
    pub evaluations: usize,
}

/// Exponent `e` with `|integrand(c + it)| ~ |t|^e` as `t -> -infinity`,
/// from the leading Stirling modulus `|Gamma(c + it)| ~ sqrt(2 pi) |t|^{c - 1/2} e^{-pi |t|/2}`.
/// As `t -> +infinity` every integrand carries an extra `e^{-pi t}`.
pub fn decay_exponent(id: IntegrandId, abscissa: f64, s_re: f64) -> f64 {
    match id {
        IntegrandId::MellinExp => abscissa - 0.5,
        _ => -abscissa - 0.5 - 2.0 * s_re,
    }
}

pub fn evaluate_integrand(id: IntegrandId, p: &IntegrandParams, w: &ApComplex) -> Result<ApComplex> {
    let prec = bits_for(p.digits);
    let half_pi = Float::with_val(prec, pi(prec) / 2u32);
    let rot = w.mul_i().scale(&half_pi).exp();
    let g = gamma(w)?;
    match id {
        IntegrandId::MellinExp => {
            let base = Float::with_val(prec, two_pi(prec) * &p.x);
            Ok(&(&g * &rot) * &ApComplex::real_pow(&base, &-w))
        }
        _ => {
            let half = ApComplex::from_i64(p.weight as i64 / 2, p.digits);
            let num = gamma(&(&(&half - &p.s) - w))?;
            let den = gamma(&(&(&half + &p.s) + w))?;
            let xw = ApComplex::real_pow(&p.x, w);
            Ok(&(&(&g * &rot) * &xw) * &num.div(&den))
        }
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for j in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * j - 1) as u32;
        let p2 = (a - Float::with_val(prec, &p0 * (j - 1) as u32)) / j as u32;
        p0 = p1;
        p1 = p2;
    }
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
    let d = (p0 - Float::with_val(prec, x * &p1)) * n as u32 / one_minus;
    (p1, d)
}

/// Gauss-Legendre nodes and weights at `prec` bits: the f64 rule from
/// `gauss_quad`, polished by Newton steps on `P_n`.
fn rule(n: usize, prec: u32) -> Arc<Vec<(Float, Float)>> {
    type Rules = HashMap<(usize, u32), Arc<Vec<(Float, Float)>>>;
    static RULES: OnceLock<Mutex<Rules>> = OnceLock::new();
    let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(n, prec)) {
        return r.clone();
    }
    let base = GaussLegendre::new(NonZeroUsize::new(n).expect("n > 0"));
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8));
    let pairs: Vec<(Float, Float)> = base
        .as_node_weight_pairs()
        .par_iter()
        .map(|&(x0, _)| {
            let mut x = Float::with_val(prec, x0);
            for _ in 0..8 {
                let (p, d) = legendre(n, &x);
                let step = p / &d;
                x -= &step;
                if step.abs() < eps {
                    break;
                }
            }
            let (_, d) = legendre(n, &x);
            let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
            let w = Float::with_val(prec, 2) / (one_minus * d.square());
            (x, w)
        })
        .collect();
    let r = Arc::new(pairs);
    cache.lock().expect("rule cache poisoned").insert((n, prec), r.clone());
    r
}

/// A straight segment `w0 -> w1` in the `w` plane.
#[derive(Clone, Copy, Debug)]
struct Segment {
    w0: (f64, f64),
    w1: (f64, f64),
}

struct PanelResult {
    value: ApComplex,
    error: f64,
    end_abs: f64,
    evaluations: usize,
}

fn gl_segment<F>(f: &F, seg: Segment, n: usize, digits: u32) -> Result<ApComplex>
where
    F: Fn(&ApComplex) -> Result<ApComplex>,
{
    let prec = bits_for(digits);
    let w0 = ApComplex::from_f64_parts(seg.w0.0, seg.w0.1, digits);
    let half = ApComplex::from_f64_parts(0.5 * (seg.w1.0 - seg.w0.0), 0.5 * (seg.w1.1 - seg.w0.1), digits);
    let mid = &w0 + &half;
    let mut acc = ApComplex::zero(digits);
    for (xi, wt) in rule(n, prec).iter() {
        let w = &mid + &half.scale(xi);
        acc += &f(&w)?.scale(wt);
    }
    Ok(&acc * &half)
}

/// Doubles the node count until two successive rules agree to `panel_tol`.
fn panel<F>(f: &F, seg: Segment, n0: usize, panel_tol: f64, digits: u32) -> Result<PanelResult>
where
    F: Fn(&ApComplex) -> Result<ApComplex>,
{
    let mut n = n0.max(2);
    let mut coarse = gl_segment(f, seg, n, digits)?;
    let mut evaluations = n;
    loop {
        let fine = gl_segment(f, seg, 2 * n, digits)?;
        evaluations += 2 * n;
        let error = fine.dist_f64(&coarse);
        if error <= panel_tol || 2 * n >= MAX_NODES {
            let end = ApComplex::from_f64_parts(seg.w1.0, seg.w1.1, digits);
            let end_abs = f(&end)?.abs_f64();
            return Ok(PanelResult { value: fine, error, end_abs, evaluations: evaluations + 1 });
        }
        coarse = fine;
        n *= 2;
    }
}

fn run_panels<F>(f: &F, segs: &[Segment], n0: usize, panel_tol: f64, digits: u32) -> Result<Vec<PanelResult>>
where
    F: Fn(&ApComplex) -> Result<ApComplex> + Sync,
{
    segs.par_iter().map(|&s| panel(f, s, n0, panel_tol, digits)).collect()
}

struct Accum {
    value: ApComplex,
    error: f64,
    evaluations: usize,
}

impl Accum {
    fn push(&mut self, r: &PanelResult, reversed: bool) {
        if reversed {
            self.value -= &r.value;
        } else {
            self.value += &r.value;
        }
        self.error += r.error;
        self.evaluations += r.evaluations;
    }
}

/// Marches unit panels along `start + u * dir` until the integrand modulus at
/// a panel end, times `scale`, drops below `stop`. Returns that final estimate.
/// With `reversed` the contour runs inwards along the ray.
#[allow(clippy::too_many_arguments)]
fn march<F>(f: &F, start: (f64, f64), dir: (f64, f64), reversed: bool, n0: usize, panel_tol: f64, stop: f64, scale: f64, acc: &mut Accum, digits: u32) -> Result<f64>
where
    F: Fn(&ApComplex) -> Result<ApComplex> + Sync,
{
    let mut u = 0.0;
    let mut done = 0;
    while done < MAX_PANELS {
        let segs: Vec<Segment> = (0..BATCH)
            .map(|j| {
                let a = u + j as f64;
                Segment {
                    w0: (start.0 + a * dir.0, start.1 + a * dir.1),
                    w1: (start.0 + (a + 1.0) * dir.0, start.1 + (a + 1.0) * dir.1),
                }
            })
            .collect();
        for r in run_panels(f, &segs, n0, panel_tol, digits)? {
            acc.push(&r, reversed);
            done += 1;
            let est = r.end_abs * scale;
            if est < stop && done >= 2 {
                return Ok(est);
            }
        }
        u += BATCH as f64;
    }
    Err(Error::ToleranceUnachievable {
        tol: stop,
        tail: f64::INFINITY,
        quad: acc.error,
        reason: format!("integrand did not decay within {MAX_PANELS} panels"),
    })
}

/// `(1/2 pi i) int_{(c)} integrand dw` over `-T <= Im w`, the part above the
/// real axis being marched until the `e^{-pi t}` decay makes it negligible.
pub fn vertical_line_integral(spec: &ContourSpec, params: &IntegrandParams, tol: f64) -> Result<Integral> {
    let f = |w: &ApComplex| evaluate_integrand(spec.integrand, params, w);
    let exponent = decay_exponent(spec.integrand, spec.abscissa, params.s.re().to_f64());
    line_integral(&f, spec, Decay::Power(exponent), params.digits, tol)
}

/// Model for `|f(c + it)|` as `t -> -infinity`, used for the truncation tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `|t|^e`
    Power(f64),
    /// `e^{-rate |t|}`
    Exponential(f64),
}

/// [`vertical_line_integral`] for an arbitrary integrand; the ray direction
/// still follows `spec.integrand`.
pub fn line_integral<F>(f: &F, spec: &ContourSpec, decay: Decay, digits: u32, tol: f64) -> Result<Integral>
where
    F: Fn(&ApComplex) -> Result<ApComplex> + Sync,
{
    let c = spec.abscissa;
    match decay {
        Decay::Power(exponent) if !(exponent < -1.0) => return Err(Error::NonconvergentAbscissa { abscissa: c, exponent }),
        Decay::Exponential(rate) if !(rate > 0.0) => {
            return Err(Error::InvalidInput(format!("exponential decay rate must be positive, got {rate}")))
        }
        _ => {}
    }
    if !(tol > 0.0) || !(spec.truncation >= 1.0) {
        return Err(Error::InvalidInput("quadrature needs tol > 0 and T >= 1".into()));
    }
    let two_pi = std::f64::consts::TAU;
    let panel_tol = tol * 1e-4;
    let n0 = spec.nodes_per_unit;
    let mut acc = Accum { value: ApComplex::zero(digits), error: 0.0, evaluations: 0 };

    // above the axis: |f| decays at least like e^{-pi t / 2}
    let upper = march(f, (c, 0.0), (0.0, 1.0), false, n0, panel_tol, tol * 1e-3, 2.0 / (std::f64::consts::PI * two_pi), &mut acc, digits)?;

    let t = spec.truncation;
    let whole = t.floor() as usize;
    let mut segs: Vec<Segment> = (0..whole).map(|j| Segment { w0: (c, -(j as f64) - 1.0), w1: (c, -(j as f64)) }).collect();
    if t > whole as f64 {
        segs.push(Segment { w0: (c, -t), w1: (c, -(whole as f64)) });
    }
    for r in run_panels(f, &segs, n0, panel_tol, digits)? {
        acc.push(&r, false);
    }
    let end_abs = f(&ApComplex::from_f64_parts(c, -t, digits))?.abs_f64();
    let lower = match spec.lower_tail {
        // int_T^inf |f(-T)| (u/T)^e du = |f(-T)| T / (-e - 1), doubled for safety
        LowerTail::Truncate => match decay {
            Decay::Power(e) => 2.0 * end_abs * t / (-e - 1.0) / two_pi,
            Decay::Exponential(rate) => 2.0 * end_abs / rate / two_pi,
        },
        LowerTail::Ray => {
            let side = match spec.integrand {
                IntegrandId::MellinExp => -1.0,
                _ => 1.0,
            };
            let r = std::f64::consts::FRAC_1_SQRT_2;
            march(f, (c, -t), (side * r, -r), true, n0, panel_tol, tol * 1e-4, 1.0 / two_pi, &mut acc, digits)?
        }
    };
    let tail = upper + lower;
    let quad = acc.error / two_pi;
    if tail + quad > tol {
        return Err(Error::ToleranceUnachievable {
            tol,
            tail,
            quad,
            reason: format!("line Re w = {c} truncated at T = {t}"),
        });
    }
    Ok(Integral { value: acc.value.div(&ApComplex::i(digits).scale(&Float::with_val(bits_for(digits), two_pi))), tail, quad_error: quad, evaluations: acc.evaluations })
}

/// `(1/2 pi i) oint f dw` on the circle `|w - center| = radius` by the
/// `nodes`-point trapezoidal rule.
pub fn circle_integral<F>(f: &F, center: &ApComplex, radius: f64, nodes: usize, digits: u32) -> Result<ApComplex>
where
    F: Fn(&ApComplex) -> Result<ApComplex> + Sync,
{
    if nodes == 0 || !(radius > 0.0) {
        return Err(Error::InvalidInput("circle quadrature needs nodes > 0 and radius > 0".into()));
    }
    let prec = bits_for(digits);
    let r = Float::with_val(prec, radius);
    let terms: Vec<ApComplex> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let dw = ApComplex::unit_root_i64(j as i64, nodes as i64, digits).scale(&r);
            Ok(&f(&(center + &dw))? * &dw)
        })
        .collect::<Result<_>>()?;
    let sum: ApComplex = terms.iter().fold(ApComplex::zero(digits), |a, b| &a + b);
    Ok(sum.div_real(&Float::with_val(prec, nodes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: u32 = 20;

    #[test]
    fn gamma_mellin_pair() {
        // (1/2 pi i) int_{(2)} Gamma(w) x^{-w} dw = e^{-x}
        let spec = ContourSpec::new(IntegrandId::MellinExp, 2.0, 40.0);
        for x in [1.0f64, 5.0] {
            let p = IntegrandParams::mellin(x, D);
            let f = |w: &ApComplex| {
                let g = gamma(w)?;
                Ok(&g * &ApComplex::real_pow(&p.x, &-w))
            };
            let got = line_integral(&f, &spec, Decay::Exponential(std::f64::consts::FRAC_PI_2), D, 1e-10);
            let got = match got {
                Ok(v) => v.value,
                Err(e) => panic!("x = {x}: {e}"),
            };
            let expected = (-x).exp();
            assert!(got.dist_f64(&ApComplex::from_f64(expected, D)) < 1e-10, "x = {x}: {} vs {expected}", got.to_string_digits(15));
        }
    }

    #[test]
    fn polished_rule_integrates_polynomials() {
        // int_{-1}^1 x^{2m} dx = 2/(2m+1), exact for 2m <= 2n - 1
        let prec = bits_for(40);
        let r = rule(12, prec);
        for m in 0..12u32 {
            let mut acc = Float::with_val(prec, 0);
            for (x, w) in r.iter() {
                let mut xp = Float::with_val(prec, 1);
                for _ in 0..2 * m {
                    xp *= x;
                }
                acc += xp * w;
            }
            let exact = Float::with_val(prec, 2) / (2 * m + 1);
            assert!(Float::with_val(prec, acc - exact).abs().to_f64() < 1e-55, "m={m}");
        }
    }

    #[test]
    fn zero_integrand() {
        let spec = ContourSpec::new(IntegrandId::JIntegrand, 3.0, 5.0);
        let f = |_: &ApComplex| Ok(ApComplex::zero(D));
        let v = line_integral(&f, &spec, Decay::Power(-3.0), D, 1e-10).unwrap();
        assert!(v.value.is_zero());
    }

    #[test]
    fn divergent_abscissa_rejected() {
        let p = IntegrandParams::mellin(1.0, D);
        let spec = ContourSpec::new(IntegrandId::MellinExp, -0.25, 10.0);
        assert!(matches!(vertical_line_integral(&spec, &p, 1e-8), Err(Error::NonconvergentAbscissa { .. })));
        let p = IntegrandParams::new(1.0, ApComplex::from_f64(1.0, D), 12, D);
        let spec = ContourSpec::new(IntegrandId::IIntegrand, -15.0 / 8.0, 10.0);
        match vertical_line_integral(&spec, &p, 1e-8) {
            Err(Error::NonconvergentAbscissa { exponent, .. }) => assert!((exponent + 0.625).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn circle_recovers_residue() {
        // Res_{w=-2} Gamma(w) = 1/2
        let f = |w: &ApComplex| gamma(w);
        let v = circle_integral(&f, &ApComplex::from_i64(-2, D), 0.25, 64, D).unwrap();
        assert!(v.dist_f64(&ApComplex::from_f64(0.5, D)) < 1e-20);
    }
}
