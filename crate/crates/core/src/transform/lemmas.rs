//! Closed forms and their quadrature counterparts.

use num_integer::Integer as _;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::quadrature::{circle_integral, vertical_line_integral, ContourSpec, Integral, IntegrandId, IntegrandParams};
use crate::error::{Error, Result};
use crate::hecke::{check_weight, HeckeEigenform};
use crate::lfun::{evaluate, LQuery};
use crate::modarith::ReducedPhase;
use crate::special::complex::{bits_for, pi, two_pi};
use crate::special::{gamma, ApComplex};

/// Nodes and radius of the circle used to cross-check residues.
pub const RESIDUE_NODES: usize = 64;
pub const RESIDUE_RADIUS: f64 = 0.25;

/// One lemma check: two independently computed sides and their distance.
#[derive(Clone, Debug)]
pub struct TransformCheck {
    pub case: String,
    pub lhs: ApComplex,
    pub rhs: ApComplex,
    pub residual: f64,
    pub tolerance: f64,
}

impl TransformCheck {
    fn new(case: String, lhs: ApComplex, rhs: ApComplex, tolerance: f64) -> Self {
        let residual = lhs.dist_f64(&rhs);
        Self { case, lhs, rhs, residual, tolerance }
    }

    pub fn passes(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn x_float(x: f64, digits: u32) -> Result<Float> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be positive and finite, got {x}")));
    }
    Ok(Float::with_val(bits_for(digits), x))
}

/// Lower truncation point past which the rays decay: beyond `|Im w| = x`
/// (the stationary point of the `I` integrand) with some room.
fn ray_start(x: f64) -> f64 {
    2.0 * x + 10.0
}

/// `e(x) - sum_{n <= N} (2 pi i x)^n / n!` against the line integral at
/// `Re w = -N - 1/2`. Moving the line of the exponential Mellin pair left
/// across the poles of `Gamma(w)` at `0, -1, ..., -N` collects exactly the
/// subtracted Taylor terms.
pub fn mellin_exp_residual(x: f64, n: u32, tol: f64, digits: u32) -> Result<TransformCheck> {
    if n < 1 {
        return Err(Error::InvalidInput("shift depth N must be at least 1".into()));
    }
    let xf = x_float(x, digits)?;
    let prec = bits_for(digits);
    let z = ApComplex::from_floats(Float::new(prec), Float::with_val(prec, two_pi(prec) * &xf), digits);
    let mut lhs = z.exp();
    let mut term = ApComplex::one(digits);
    for m in 0..=n {
        if m > 0 {
            term = (&term * &z).div_real(&Float::with_val(prec, m));
        }
        lhs -= &term;
    }
    let c = -(n as f64) - 0.5;
    let spec = ContourSpec::new(IntegrandId::MellinExp, c, 2.0 * std::f64::consts::TAU * x + 8.0).with_ray();
    let rhs = vertical_line_integral(&spec, &IntegrandParams::mellin(x, digits), tol / 10.0)?;
    Ok(TransformCheck::new(format!("mellin x={x} N={n}"), lhs, rhs.value, tol))
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `i^n / n! x^{-n} L(1/2 + s - n, f (x) e(alpha))`.
pub fn residue_value(n: u32, x: &Float, s: &ApComplex, form: &HeckeEigenform, phase: ReducedPhase, digits: u32) -> Result<ApComplex> {
    let shift = s - &ApComplex::from_i64(n as i64, digits);
    let l = evaluate(&LQuery::new(form, phase, shift, digits))?;
    let prec = bits_for(digits);
    let mut denom = Float::with_val(prec, factorial(n));
    for _ in 0..n {
        denom *= x;
    }
    Ok((&ApComplex::i_pow(n as i64, digits) * &l).div_real(&denom))
}

/// The same residue from a circle of radius 1/4 around `w = -n`.
pub fn residue_by_circle(n: u32, x: &Float, s: &ApComplex, form: &HeckeEigenform, phase: ReducedPhase, digits: u32) -> Result<ApComplex> {
    let prec = bits_for(digits);
    let half_pi = Float::with_val(prec, pi(prec) / 2u32);
    let x = Float::with_val(prec, x);
    let f = |w: &ApComplex| {
        let l = evaluate(&LQuery::new(form, phase, s + w, digits))?;
        let rot = w.mul_i().scale(&half_pi).exp();
        Ok(&(&(&gamma(w)? * &rot) * &ApComplex::real_pow(&x, w)) * &l)
    };
    circle_integral(&f, &ApComplex::from_i64(-(n as i64), digits), RESIDUE_RADIUS, RESIDUE_NODES, digits)
}

/// `(k/2 - 1 + j)! / (j! (k/2 - 1 - j)!)`.
fn j_coefficient(k: u32, j: u32) -> Integer {
    let h = k / 2;
    factorial(h - 1 + j) / (factorial(j) * factorial(h - 1 - j))
}

/// `sum_{j=1}^{k/2-1} (ix)^{-j} C_j ((-1)^j + i^k e)` where `e = e^{-ix}`
/// is supplied by the caller so that rational phases stay exact.
fn j_sum_from(x: &Float, k: u32, e: &ApComplex, from: u32, digits: u32) -> ApComplex {
    let ix = ApComplex::from_floats(Float::new(x.prec()), x.clone(), digits);
    let inv = ix.recip();
    let ike = &ApComplex::i_pow(k as i64, digits) * e;
    let mut pow = inv.powi(from as i64);
    let mut acc = ApComplex::zero(digits);
    for j in from..k / 2 {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let bracket = ike.add_real(&Float::with_val(x.prec(), sign));
        let c = ApComplex::from_integer(&j_coefficient(k, j), digits);
        acc += &(&(&pow * &c) * &bracket);
        pow = &pow * &inv;
    }
    acc
}

fn exp_minus_i(x: &Float, digits: u32) -> ApComplex {
    let (s, c) = Float::with_val(x.prec(), -x).sin_cos(Float::new(x.prec()));
    ApComplex::from_floats(c, s, digits)
}

/// `J(x)` as the finite sum over `0 <= j < k/2`.
pub fn j_closed_form(x: &Float, k: u32, digits: u32) -> Result<ApComplex> {
    check_weight(k)?;
    if *x <= 0 {
        return Err(Error::InvalidInput("J needs x > 0".into()));
    }
    let x = Float::with_val(bits_for(digits), x);
    Ok(j_sum_from(&x, k, &exp_minus_i(&x, digits), 0, digits))
}

/// `J(x)` by quadrature on `Re w = abscissa`. Any `1/2 < abscissa < k/2`
/// gives the same value: `Gamma(w)` has no poles with `Re w > 0` and
/// `Gamma(k/2 - w)` none with `Re w < k/2`, while `1/2` is where the
/// `|t|^{-abscissa - 1/2}` decay stops being integrable.
pub fn j_numeric_on(x: f64, k: u32, spec: ContourSpec, tol: f64, digits: u32) -> Result<Integral> {
    check_weight(k)?;
    x_float(x, digits)?;
    let c = spec.abscissa;
    if !(c > 0.5 && c < k as f64 / 2.0) {
        return Err(Error::InvalidInput(format!("J abscissa {c} must lie in (1/2, {})", k / 2)));
    }
    let spec = ContourSpec { integrand: IntegrandId::JIntegrand, ..spec };
    vertical_line_integral(&spec, &IntegrandParams::new(x, ApComplex::zero(digits), k, digits), tol)
}

/// `J(x)` by quadrature on `Re w = k/2 - 1`, where the integrand decays like
/// `|t|^{-(k-1)/2}`.
pub fn j_numeric(x: f64, k: u32, tol: f64, digits: u32) -> Result<Integral> {
    let spec = ContourSpec::new(IntegrandId::JIntegrand, k as f64 / 2.0 - 1.0, ray_start(x)).with_ray();
    j_numeric_on(x, k, spec, tol, digits)
}

fn in_s1(s: &ApComplex) -> bool {
    let (re, im) = s.to_f64_parts();
    re > 19.0 / 16.0 && re < 11.0 / 8.0 && im.abs() < 1.0
}

/// `I(x, s)` on `Re w = -15/8`; only defined by the integral for `s` in
/// `19/16 < Re s < 11/8`, `|Im s| < 1`.
pub fn i_numeric(x: f64, s: &ApComplex, k: u32, tol: f64, digits: u32) -> Result<Integral> {
    check_weight(k)?;
    x_float(x, digits)?;
    let c = -15.0 / 8.0;
    let (re, im) = s.to_f64_parts();
    if re <= 19.0 / 16.0 {
        let exponent = super::quadrature::decay_exponent(IntegrandId::IIntegrand, c, re);
        return Err(Error::NonconvergentAbscissa { abscissa: c, exponent });
    }
    if !in_s1(s) {
        return Err(Error::InvalidInput(format!("s = {re}+{im}i is outside 19/16 < Re s < 11/8, |Im s| < 1")));
    }
    let spec = ContourSpec::new(IntegrandId::IIntegrand, c, ray_start(x)).with_ray();
    vertical_line_integral(&spec, &IntegrandParams::new(x, s.clone(), k, digits), tol)
}

/// `i^k x^{-2s} e^{-ix}`.
pub fn i_main_term(x: f64, s: &ApComplex, k: u32, digits: u32) -> Result<ApComplex> {
    let xf = x_float(x, digits)?;
    let two_s = s.with_digits(digits).scale_i64(-2);
    Ok(&(&ApComplex::i_pow(k as i64, digits) * &ApComplex::real_pow(&xf, &two_s)) * &exp_minus_i(&xf, digits))
}

/// `Q(x, s)` from the line `Re w = 3/4`: the `I` contour moved right across
/// the poles of `Gamma(w)` at `w = -1` (residue `i x^{-1} Gamma(k/2 - s + 1) / Gamma(k/2 + s - 1)`)
/// and `w = 0` (residue `Gamma(k/2 - s) / Gamma(k/2 + s)`), minus the main
/// term. Valid for `-1/8 < Re s`, where the line integral converges.
pub fn q_shifted(x: f64, s: &ApComplex, k: u32, tol: f64, digits: u32) -> Result<ApComplex> {
    check_weight(k)?;
    let xf = x_float(x, digits)?;
    let s = s.with_digits(digits);
    let spec = ContourSpec::new(IntegrandId::Q0Integrand, 0.75, ray_start(x)).with_ray();
    let line = vertical_line_integral(&spec, &IntegrandParams::new(x, s.clone(), k, digits), tol)?.value;
    let h = ApComplex::from_i64(k as i64 / 2, digits);
    let one = ApComplex::one(digits);
    let r1 = gamma(&(&(&h - &s) + &one))?.div(&gamma(&(&(&h + &s) - &one))?);
    let r1 = r1.mul_i().div_real(&xf);
    let r0 = gamma(&(&h - &s))?.div(&gamma(&(&h + &s))?);
    let main = i_main_term(x, &s, k, digits)?;
    Ok(&(&(&line - &r1) - &r0) - &main)
}

fn validate_quadruple(n: i64, p: i64, q: i64, r: i64) -> Result<()> {
    if n < 1 || p < 1 || q < 1 || r < 1 {
        return Err(Error::InvalidInput("n, p, q, r must be positive".into()));
    }
    for (a, b) in [(p, q), (p, r), (q, r)] {
        if a.gcd(&b) != 1 {
            return Err(Error::NotCoprime { a, b });
        }
    }
    Ok(())
}

/// `x = 2 pi n q / (p r)` and the exact `e(-qn/(pr)) = e^{-ix}`.
fn q_argument(n: i64, p: i64, q: i64, r: i64, digits: u32) -> (Float, ApComplex) {
    let prec = bits_for(digits);
    let x = Float::with_val(prec, two_pi(prec) * Integer::from(n * q)) / Integer::from(p * r);
    let e = ApComplex::unit_root(&Integer::from(-(n * q)), &Integer::from(p * r), digits);
    (x, e)
}

/// `-i (pr / (2 pi q n)) Gamma(k/2 + 1) / Gamma(k/2 - 1) + sum_{j >= 1} ...`
pub fn q_closed_form(n: i64, p: i64, q: i64, r: i64, k: u32, digits: u32) -> Result<ApComplex> {
    check_weight(k)?;
    validate_quadruple(n, p, q, r)?;
    let (x, e) = q_argument(n, p, q, r, digits);
    let h = k as i64 / 2;
    let ratio = Float::with_val(x.prec(), h * (h - 1));
    let first = ApComplex::from_floats(Float::new(x.prec()), -(ratio / &x), digits);
    Ok(&first + &j_sum_from(&x, k, &e, 1, digits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JPath {
    Numeric,
    Closed,
}

/// `Q(x, 0) = J(x) + (pr / (2 pi i n q)) Gamma(k/2 + 1) / Gamma(k/2 - 1) - 1 - i^k e(-qn/(pr))`.
pub fn q_via_q0_identity(n: i64, p: i64, q: i64, r: i64, k: u32, path: JPath, tol: f64, digits: u32) -> Result<ApComplex> {
    check_weight(k)?;
    validate_quadruple(n, p, q, r)?;
    let (x, e) = q_argument(n, p, q, r, digits);
    let j = match path {
        JPath::Closed => j_closed_form(&x, k, digits)?,
        JPath::Numeric => j_numeric(x.to_f64(), k, tol, digits)?.value,
    };
    let h = k as i64 / 2;
    let ratio = ApComplex::from_i64(h * (h - 1), digits);
    let pole = ratio.div(&ApComplex::from_floats(Float::new(x.prec()), x.clone(), digits));
    let ike = &ApComplex::i_pow(k as i64, digits) * &e;
    Ok(&(&(&j + &pole) - &ApComplex::one(digits)) - &ike)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Mellin,
    Residue,
    I,
    J,
    Q,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mellin" => Ok(Self::Mellin),
            "residue" => Ok(Self::Residue),
            "I" | "i" => Ok(Self::I),
            "J" | "j" => Ok(Self::J),
            "Q" | "q" => Ok(Self::Q),
            _ => Err(Error::InvalidInput(format!("unknown transform {s:?}; expected mellin, residue, I, J or Q"))),
        }
    }
}

pub const J_GRID_X: [f64; 6] = [0.5, 1.0, 2.0, 3.7, 10.0, 25.0];
pub const J_GRID_K: [u32; 3] = [12, 16, 22];
/// `x` values for the `I` leading-term check at `k = 12`, `s = 5/4`.
pub const I_GRID_X: [f64; 6] = [5.0, 10.0, 20.0, 50.0, 100.0, 200.0];

/// `Q(x, s) (x^{-2 Re s - 1} + x^{-15/8})^{-1}`, the quantity whose
/// boundedness is the decay claim.
pub fn q_decay_ratio(x: f64, s_re: f64, q_abs: f64) -> f64 {
    q_abs / (x.powf(-2.0 * s_re - 1.0) + x.powf(-15.0 / 8.0))
}

/// Deterministic case set for one transform; the `I` cases compare against
/// the main term with tolerance `c_fit (x^{-2s-1} + x^{-15/8})`.
pub fn transform_cases(kind: TransformKind, tol: f64, digits: u32) -> Result<Vec<TransformCheck>> {
    use rand::{Rng, SeedableRng};
    let mut out = Vec::new();
    match kind {
        TransformKind::Mellin => {
            let mut cases = vec![(0.3, 4), (1.7, 6)];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6d656c6c);
            for _ in 0..20 {
                cases.push((rng.gen_range(0.01..=5.0), rng.gen_range(2..=8)));
            }
            for (x, n) in cases {
                out.push(mellin_exp_residual(x, n, tol, digits)?);
            }
        }
        TransformKind::Residue => {
            let form = crate::hecke::build_form(12, 64)?;
            let phase = crate::modarith::reduce_phase(1, 3)?;
            let x = Float::with_val(bits_for(digits), 3);
            let s = ApComplex::from_f64(0.2, digits);
            for n in 0..=2 {
                let closed = residue_value(n, &x, &s, &form, phase, digits)?;
                let circle = residue_by_circle(n, &x, &s, &form, phase, digits)?;
                out.push(TransformCheck::new(format!("residue n={n} x=3 s=0.2 k=12 phase=1/3"), closed, circle, tol.min(1e-10)));
            }
        }
        TransformKind::J => {
            let mut grid: Vec<(f64, u32)> = J_GRID_K.iter().flat_map(|&k| J_GRID_X.iter().map(move |&x| (x, k))).collect();
            grid.push((3.7, 20));
            for (x, k) in grid {
                let closed = j_closed_form(&Float::with_val(bits_for(digits), x), k, digits)?;
                let numeric = j_numeric(x, k, tol / 10.0, digits)?.value;
                out.push(TransformCheck::new(format!("J x={x} k={k}"), closed, numeric, tol));
            }
        }
        TransformKind::Q => {
            for (n, p, q, r, k) in [(1, 3, 7, 5, 12), (4, 5, 11, 3, 16)] {
                let closed = q_closed_form(n, p, q, r, k, digits)?;
                let via = q_via_q0_identity(n, p, q, r, k, JPath::Numeric, tol / 10.0, digits)?;
                out.push(TransformCheck::new(format!("Q n={n} p={p} q={q} r={r} k={k}"), closed, via, tol));
            }
        }
        TransformKind::I => {
            let s = ApComplex::from_f64(1.25, digits);
            for x in I_SMALL_X {
                let i = i_numeric(x, &s, 12, tol, digits)?.value;
                out.push(TransformCheck::new(format!("I x={x} s=1.25 k=12 bounded"), i, ApComplex::zero(digits), I_SMALL_X_BOUND));
            }
            for x in I_GRID_X {
                let i = i_numeric(x, &s, 12, tol, digits)?.value;
                let main = i_main_term(x, &s, 12, digits)?;
                let bound = I_FIT_CONSTANT * (x.powf(-3.5) + x.powf(-15.0 / 8.0));
                out.push(TransformCheck::new(format!("I x={x} s=1.25 k=12"), i, main, bound));
            }
        }
    }
    Ok(out)
}

/// Fitted constant in `|I(x, 5/4) - i^12 x^{-5/2} e^{-ix}| <= C (x^{-7/2} + x^{-15/8})`;
/// the observed ratio peaks near 4.4 around `x = 20` and falls slowly after.
pub const I_FIT_CONSTANT: f64 = 5.0;
/// Bound on `|I(x, 5/4)|` for `0 < x <= 2` (observed at most 0.86).
pub const I_SMALL_X_BOUND: f64 = 2.0;
pub const I_SMALL_X: [f64; 3] = [0.5, 1.0, 2.0];
