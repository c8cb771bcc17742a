//! Twisted moments and the reciprocity identities between them.
//!
//! `M_f(s, x, y; q)` is evaluated either as the modular symbol
//! `L(1/2 + s, f (x) e(xbar y / q))` or through the primitive-character sum
//! with Gauss-sum weights; the reciprocity relation compares three modular
//! symbols with a finite sum of L-values at `1/2 + j`.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::HeckeEigenform;
use crate::lfun::{evaluate_detailed, LQuery};
use crate::modarith::{characters, gauss_sum, is_odd_prime, mod_inverse, reduce_phase, ReducedPhase};
use crate::special::complex::{bits_for, pi};
use crate::special::ApComplex;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest modulus accepted by the character-sum path.
pub const MAX_CHARACTER_PATH_MODULUS: u64 = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTriple {
    pub p: i64,
    pub q: i64,
    /// `1` in corollary mode.
    pub r: i64,
}

impl PrimeTriple {
    pub fn new(p: i64, q: i64, r: i64) -> Result<Self> {
        for x in [p, q, r] {
            if !is_odd_prime(x) {
                return Err(Error::NotOddPrime(x));
            }
        }
        if p == q || q == r || p == r {
            return Err(Error::InvalidInput(format!("primes must be distinct, got ({p}, {q}, {r})")));
        }
        Ok(Self { p, q, r })
    }

    /// The `r = 1` case.
    pub fn corollary(p: i64, q: i64) -> Result<Self> {
        for x in [p, q] {
            if !is_odd_prime(x) {
                return Err(Error::NotOddPrime(x));
            }
        }
        if p == q {
            return Err(Error::InvalidInput(format!("primes must be distinct, got ({p}, {q})")));
        }
        Ok(Self { p, q, r: 1 })
    }

    pub fn is_corollary(&self) -> bool {
        self.r == 1
    }
}

/// The phase `xbar y / q` of `M_f(x, y; q)`; `q = 1` gives the trivial phase.
pub fn moment_phase(x: i64, y: i64, q: i64) -> Result<ReducedPhase> {
    if q < 1 {
        return Err(Error::InvalidInput(format!("modulus must be positive, got {q}")));
    }
    if q == 1 {
        return Ok(ReducedPhase::trivial());
    }
    let xbar = mod_inverse(x, q)?;
    if y.rem_euclid(q) == 0 {
        return Err(Error::NotCoprime { a: y, b: q });
    }
    let num = (xbar as i128 * y as i128).rem_euclid(q as i128) as i64;
    reduce_phase(num, q)
}

/// `c_f(s, q) = lambda_f(q) q^{1/2 - s} - q^{-2s} - 1`.
pub fn c_f(s: &ApComplex, q: i64, form: &HeckeEigenform) -> Result<ApComplex> {
    if !is_odd_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    let digits = s.digits();
    let prec = s.prec();
    let lambda = form.lambda(q as usize, digits)?;
    let qf = Float::with_val(prec, q);
    let half = ApComplex::from_f64(0.5, digits);
    let first = &lambda * &ApComplex::real_pow(&qf, &(&half - s));
    let second = ApComplex::real_pow(&qf, &s.scale_i64(-2));
    Ok(&(&first - &second) - &ApComplex::one(digits))
}

/// `M_f(s, x, y; q)` as the modular symbol `L(1/2 + s, f (x) e(xbar y / q))`.
pub fn modular_symbol_moment(form: &HeckeEigenform, x: i64, y: i64, q: i64, s: &ApComplex, digits: u32) -> Result<ApComplex> {
    let phase = moment_phase(x, y, q)?;
    Ok(evaluate_detailed(&LQuery::new(form, phase, s.with_digits(digits), digits))?.value)
}

/// `M_f(s, p, r; q)` through the character sum
/// `(1/phi(q)) [sum*_chi tau(chi) L(1/2 + s, f (x) chibar) chi(p) chibar(r) + c_f(s, q) L(1/2 + s, f)]`,
/// with `L(., f (x) chibar) = tau(chi)^{-1} sum_m chi(m) L(., f (x) e(m/q))`.
pub fn moment_via_characters(form: &HeckeEigenform, p: i64, r: i64, q: i64, s: &ApComplex, digits: u32) -> Result<ApComplex> {
    if !is_odd_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    let qu = q as u64;
    if qu > MAX_CHARACTER_PATH_MODULUS {
        return Err(Error::ModulusTooLarge { q: qu, cost: (qu - 1) * (qu - 1) });
    }
    for x in [p, r] {
        if x.rem_euclid(q) == 0 {
            return Err(Error::NotCoprime { a: x, b: q });
        }
    }
    let s = s.with_digits(digits);
    let additive: Vec<ApComplex> = (1..q)
        .into_par_iter()
        .map(|m| evaluate_detailed(&LQuery::new(form, reduce_phase(m, q)?, s.clone(), digits)).map(|v| v.value))
        .collect::<Result<_>>()?;
    let untwisted = evaluate_detailed(&LQuery::new(form, ReducedPhase::trivial(), s.clone(), digits))?.value;

    let mut acc = ApComplex::zero(digits);
    for chi in characters(qu)?.into_iter().filter(|c| c.is_primitive()) {
        let tau = gauss_sum(&chi, digits)?;
        let mut inversion = ApComplex::zero(digits);
        for (i, l) in additive.iter().enumerate() {
            inversion += &(&chi.value(i as i64 + 1, digits) * l);
        }
        let l_chibar = inversion.div(&tau);
        let weight = &chi.value(p, digits) * &chi.conj().value(r, digits);
        acc += &(&(&tau * &l_chibar) * &weight);
    }
    acc += &(&c_f(&s, q, form)? * &untwisted);
    let phi = Float::with_val(bits_for(digits), q - 1);
    Ok(acc.div_real(&phi))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRepr {
    pub re: String,
    pub im: String,
}

impl ComplexRepr {
    pub fn from_ap(z: &ApComplex) -> Self {
        Self { re: z.re_string(), im: z.im_string() }
    }

    pub fn to_ap(&self, digits: u32) -> Result<ApComplex> {
        ApComplex::parse(&self.re, &self.im, digits).ok_or_else(|| Error::Parse(format!("bad complex value ({}, {})", self.re, self.im)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub j: u32,
    pub value: ComplexRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentRepr {
    pub label: String,
    pub phase: String,
    pub value: ComplexRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub identity: String,
    pub weight: u32,
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub digits: u32,
}

/// One identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub inputs: ReportInputs,
    pub lhs: ComplexRepr,
    pub rhs: ComplexRepr,
    /// Left-hand side constituents.
    pub moments: Vec<MomentRepr>,
    /// `j`-th summand of the right-hand side.
    pub terms: Vec<TermRepr>,
    pub residual: String,
    /// Sum of the certified L-value bounds weighted by their coefficients.
    pub error_budget: f64,
    /// Per-stage wall-clock milliseconds; only filled on request so that
    /// reports are otherwise reproducible byte for byte.
    pub wall_ms: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    pub stage_ms: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn digits(&self) -> u32 {
        self.inputs.digits
    }

    /// `|lhs - rhs|` from the stored sides.
    pub fn recompute_residual(&self) -> Result<Float> {
        let d = self.digits();
        let lhs = self.lhs.to_ap(d)?;
        let rhs = self.rhs.to_ap(d)?;
        Ok((&lhs - &rhs).abs())
    }

    pub fn residual_f64(&self) -> f64 {
        self.residual.parse::<f64>().unwrap_or(f64::INFINITY)
    }

    /// Contract `residual < 10^{-(P-10)}`.
    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.digits() as i32 - 10))
    }

    pub fn passes(&self) -> bool {
        self.residual_f64() < self.tolerance()
    }

    pub fn with_timings(mut self) -> Self {
        self.wall_ms = Some(self.stage_ms.clone());
        self
    }
}

/// Signs applied to the three left-hand phases `pbar r/q`, `-qbar r/p`,
/// `-pbar q/r`; `[1, 1, 1]` is the identity.
pub type PhaseSigns = [i64; 3];
pub const CORRECT_SIGNS: PhaseSigns = [1, 1, 1];

struct Job {
    phase: ReducedPhase,
    s: i64,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn theorem1_sides(form: &HeckeEigenform, p: i64, q: i64, r: i64, digits: u32) -> Result<VerificationReport> {
    let triple = PrimeTriple::new(p, q, r)?;
    reciprocity_report(form, triple, CORRECT_SIGNS, digits)
}

pub fn corollary_sides(form: &HeckeEigenform, p: i64, q: i64, digits: u32) -> Result<VerificationReport> {
    let triple = PrimeTriple::corollary(p, q)?;
    reciprocity_report(form, triple, CORRECT_SIGNS, digits)
}

/// The reciprocity check with the left-hand twist signs replaced by `signs`.
pub fn theorem1_with_signs(form: &HeckeEigenform, p: i64, q: i64, r: i64, signs: PhaseSigns, digits: u32) -> Result<VerificationReport> {
    let triple = PrimeTriple::new(p, q, r)?;
    reciprocity_report(form, triple, signs, digits)
}

/// Both sides of
/// `M(p, r; q) - M(-q, r; p) - M(-p, q; r) = sum_{j=1}^{k/2-1} c_j (L(1/2+j, e(-pbar q/r)) + (-1)^j i^k L(1/2+j, e(q rbar/p)))`
/// with `c_j = Gamma(k/2+j) / (j! Gamma(k/2-j)) (2 pi i q/(p r))^{-j}`. With `r = 1`
/// the third moment is `L(1/2, f)`.
pub fn reciprocity_report(form: &HeckeEigenform, t: PrimeTriple, signs: PhaseSigns, digits: u32) -> Result<VerificationReport> {
    let k = form.weight();
    let (p, q, r) = (t.p, t.q, t.r);
    let start = Instant::now();

    let lhs_phases = [
        (format!("M({p},{r};{q})"), moment_phase(p, signs[0] * r, q)?),
        (format!("M(-{q},{r};{p})"), moment_phase(-q, signs[1] * r, p)?),
        (format!("M(-{p},{q};{r})"), moment_phase(-p, signs[2] * q, r)?),
    ];
    let rhs_first = moment_phase(-p, q, r)?; // -pbar q / r
    let rhs_second = reduce_phase((q as i128 * mod_inverse(r, p)? as i128).rem_euclid(p as i128) as i64, p)?; // q rbar / p

    let half = k as i64 / 2;
    let mut jobs: Vec<Job> = lhs_phases.iter().map(|(_, ph)| Job { phase: *ph, s: 0 }).collect();
    for j in 1..half {
        jobs.push(Job { phase: rhs_first, s: j });
        jobs.push(Job { phase: rhs_second, s: j });
    }
    let values = jobs
        .par_iter()
        .map(|job| evaluate_detailed(&LQuery::at_real(form, job.phase, job.s, digits)))
        .collect::<Result<Vec<_>>>()?;
    let l_ms = ms_since(start);

    let lhs = &(&values[0].value - &values[1].value) - &values[2].value;
    let mut budget = values[0].error_bound + values[1].error_bound + values[2].error_bound;

    let prec = bits_for(digits);
    let ik = ApComplex::i_pow(k as i64, digits);
    // (2 pi i q / (p r))^{-1} = -i p r / (2 pi q)
    let base = Float::with_val(prec, Float::with_val(prec, p * r) / (Float::with_val(prec, 2 * q) * pi(prec)));
    let step = ApComplex::from_real(base, digits).mul_i().scale_i64(-1);
    let mut power = ApComplex::one(digits);
    let mut rhs = ApComplex::zero(digits);
    let mut terms = Vec::new();
    for j in 1..half {
        power = &power * &step;
        // Gamma(k/2 + j) / (j! Gamma(k/2 - j)) = (k/2 + j - 1)! / (j! (k/2 - j - 1)!)
        let num = Integer::from(Integer::factorial((half + j - 1) as u32));
        let den = Integer::from(Integer::factorial(j as u32)) * Integer::from(Integer::factorial((half - j - 1) as u32));
        let ratio = Float::with_val(prec, num) / Float::with_val(prec, den);
        let coeff = power.scale(&ratio);
        let idx = 3 + 2 * (j as usize - 1);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let inner = &values[idx].value + &(&ik * &values[idx + 1].value).scale_i64(sign);
        let term = &coeff * &inner;
        budget += coeff.abs_f64() * (values[idx].error_bound + values[idx + 1].error_bound);
        rhs += &term;
        terms.push(TermRepr { j: j as u32, value: ComplexRepr::from_ap(&term) });
    }
    let residual = (&lhs - &rhs).abs();
    let mut stage_ms = BTreeMap::new();
    stage_ms.insert("l_values".to_string(), l_ms);
    stage_ms.insert("total".to_string(), ms_since(start));

    let identity = if t.is_corollary() { "corollary" } else if signs == CORRECT_SIGNS { "theorem1" } else { "theorem1_mutated" };
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        inputs: ReportInputs { identity: identity.to_string(), weight: k, p, q, r, digits },
        lhs: ComplexRepr::from_ap(&lhs),
        rhs: ComplexRepr::from_ap(&rhs),
        moments: lhs_phases
            .iter()
            .zip(&values)
            .map(|((label, ph), v)| MomentRepr { label: label.clone(), phase: ph.to_string(), value: ComplexRepr::from_ap(&v.value) })
            .collect(),
        terms,
        residual: crate::special::complex::float_to_string(&residual),
        error_budget: budget,
        wall_ms: None,
        stage_ms,
    })
}

/// `|modular_symbol_moment - moment_via_characters|` for `M_f(s, p, r; q)`.
pub fn lemma1_residual(form: &HeckeEigenform, p: i64, r: i64, q: i64, s: &ApComplex, digits: u32) -> Result<(ApComplex, ApComplex, f64)> {
    let a = modular_symbol_moment(form, p, r, q, s, digits)?;
    let b = moment_via_characters(form, p, r, q, s, digits)?;
    let d = a.dist_f64(&b);
    Ok((a, b, d))
}
