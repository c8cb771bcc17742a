//! Level-1 Hecke eigenforms of weights 12, 16, 18, 20, 22, 26.
//!
//! `Delta = q prod (1 - q^n)^24` is built as `q (eta^3)^8` where
//! `eta^3 = sum_m (-1)^m (2m + 1) q^{m(m+1)/2}` (Jacobi), and the other
//! weights multiply `Delta` by a monomial in `E4` and `E6`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::complex::bits_for;
use crate::special::ApComplex;

pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Environment variable naming the coefficient cache directory.
pub const CACHE_DIR_ENV: &str = "TWISTREC_CACHE_DIR";

pub fn check_weight(weight: u32) -> Result<()> {
    if SUPPORTED_WEIGHTS.contains(&weight) {
        Ok(())
    } else {
        Err(Error::UnsupportedWeight { weight })
    }
}

/// Exponents `(a, b)` with `f = Delta E4^a E6^b`.
fn eisenstein_monomial(weight: u32) -> (u32, u32) {
    match weight {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => unreachable!("weight checked by caller"),
    }
}

/// `sigma_r(n)` for `0 <= n < len` (entry 0 unused).
pub fn divisor_power_sums(r: u32, len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for d in 1..len {
        let p = Integer::from(Integer::u_pow_u(d as u32, r));
        let mut m = d;
        while m < len {
            out[m] += &p;
            m += d;
        }
    }
    out
}

/// Number of divisors `d(n)` for `0 <= n < len`.
pub fn divisor_counts(len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in 1..len {
        let mut m = d;
        while m < len {
            out[m] += 1;
            m += d;
        }
    }
    out
}

/// `1 + c sum_{n>=1} sigma_r(n) q^n` truncated to `len` terms.
pub fn eisenstein(r: u32, c: i64, len: usize) -> Vec<Integer> {
    let mut e = divisor_power_sums(r, len);
    for v in e.iter_mut() {
        *v *= c;
    }
    if len > 0 {
        e[0] = Integer::from(1);
    }
    e
}

/// Truncated product of two dense series.
pub fn mul_series(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Truncated product of a dense series with a sparse one given as `(exponent, coefficient)`.
fn mul_sparse(a: &[Integer], sparse: &[(usize, i64)], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for &(e, c) in sparse {
        if e >= len {
            break;
        }
        for (i, x) in a.iter().enumerate().take(len - e) {
            out[i + e] += Integer::from(x * c);
        }
    }
    out
}

/// `q prod_{n>=1} (1 - q^n)^24` truncated to `len` terms (index = power of q).
pub fn delta_series(len: usize) -> Vec<Integer> {
    if len == 0 {
        return Vec::new();
    }
    let mut eta3 = Vec::new();
    let mut m = 0usize;
    loop {
        let e = m * (m + 1) / 2;
        if e >= len {
            break;
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        eta3.push((e, sign * (2 * m as i64 + 1)));
        m += 1;
    }
    // series for prod (1 - q^n)^24 needs len - 1 terms, then shift by q
    let inner = len - 1;
    let mut acc = vec![Integer::new(); inner.max(1)];
    acc[0] = Integer::from(1);
    if inner > 0 {
        for _ in 0..8 {
            acc = mul_sparse(&acc, &eta3, inner);
        }
    }
    let mut out = vec![Integer::new(); len];
    for (i, v) in acc.into_iter().enumerate().take(inner) {
        out[i + 1] = v;
    }
    out
}

/// `q`-expansion coefficients `index -> a_f(index)` for `index < len`.
pub fn eigenform_series(weight: u32, len: usize) -> Result<Vec<Integer>> {
    check_weight(weight)?;
    let (a, b) = eisenstein_monomial(weight);
    let mut f = delta_series(len);
    if a + b == 0 {
        return Ok(f);
    }
    // reduce the Eisenstein monomial first; its coefficients stay small
    let e4 = eisenstein(3, 240, len);
    let e6 = eisenstein(5, -504, len);
    let mut monomial: Option<Vec<Integer>> = None;
    for _ in 0..a {
        monomial = Some(match monomial {
            None => e4.clone(),
            Some(m) => mul_series(&m, &e4, len),
        });
    }
    for _ in 0..b {
        monomial = Some(match monomial {
            None => e6.clone(),
            Some(m) => mul_series(&m, &e6, len),
        });
    }
    if let Some(m) = monomial {
        f = mul_series(&f, &m, len);
    }
    Ok(f)
}

struct FormCache {
    weight: u32,
    /// `coeffs[n] = a_f(n)`, `coeffs[0] = 0`.
    coeffs: RwLock<Arc<Vec<Integer>>>,
    extend: std::sync::Mutex<()>,
}

/// Handle to the normalized eigenform of one weight. Handles of the same
/// weight share a process-wide coefficient cache; extension is
/// single-writer and readers always see a complete prefix.
#[derive(Clone)]
pub struct HeckeEigenform {
    inner: Arc<FormCache>,
}

impl std::fmt::Debug for HeckeEigenform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeckeEigenform").field("weight", &self.weight()).field("cache_len", &self.cache_len()).finish()
    }
}

fn registry() -> &'static RwLock<HashMap<u32, HeckeEigenform>> {
    static REG: OnceLock<RwLock<HashMap<u32, HeckeEigenform>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The normalized eigenform of `weight` with at least `n` cached coefficients.
pub fn build_form(weight: u32, n: usize) -> Result<HeckeEigenform> {
    check_weight(weight)?;
    if n == 0 {
        return Err(Error::InvalidInput("coefficient count must be at least 1".into()));
    }
    let form = {
        let reg = registry().read().expect("form registry poisoned");
        reg.get(&weight).cloned()
    };
    let form = match form {
        Some(f) => f,
        None => {
            let mut reg = registry().write().expect("form registry poisoned");
            reg.entry(weight)
                .or_insert_with(|| HeckeEigenform {
                    inner: Arc::new(FormCache {
                        weight,
                        coeffs: RwLock::new(Arc::new(vec![Integer::new()])),
                        extend: std::sync::Mutex::new(()),
                    }),
                })
                .clone()
        }
    };
    form.ensure(n)?;
    Ok(form)
}

impl HeckeEigenform {
    pub fn weight(&self) -> u32 {
        self.inner.weight
    }

    /// Number of cached coefficients `a_f(1..=cache_len)`.
    pub fn cache_len(&self) -> usize {
        self.snapshot().len() - 1
    }

    /// Current coefficient table, `t[n] = a_f(n)` with `t[0] = 0`.
    pub fn snapshot(&self) -> Arc<Vec<Integer>> {
        self.inner.coeffs.read().expect("coefficient cache poisoned").clone()
    }

    /// Grow the cache so that `a_f(1..=n)` are available.
    pub fn ensure(&self, n: usize) -> Result<()> {
        if self.cache_len() >= n {
            return Ok(());
        }
        let _guard = self.inner.extend.lock().expect("extension lock poisoned");
        let current = self.cache_len();
        if current >= n {
            return Ok(());
        }
        let target = n.max(2 * current).max(64);
        let fresh = eigenform_series(self.weight(), target + 1)?;
        let mut slot = self.inner.coeffs.write().expect("coefficient cache poisoned");
        *slot = Arc::new(fresh);
        Ok(())
    }

    /// Snapshot holding at least `a_f(1..=n)`.
    pub fn coeffs_up_to(&self, n: usize) -> Result<Arc<Vec<Integer>>> {
        self.ensure(n)?;
        Ok(self.snapshot())
    }

    pub fn coeff(&self, n: usize) -> Result<Integer> {
        if n == 0 {
            return Err(Error::InvalidInput("coefficients are indexed from n = 1".into()));
        }
        Ok(self.coeffs_up_to(n)?[n].clone())
    }

    /// `a_f(1..=n)` as a vector.
    pub fn coeffs(&self, n: usize) -> Result<Vec<Integer>> {
        Ok(self.coeffs_up_to(n)?[1..=n].to_vec())
    }

    /// `lambda_f(n) = a_f(n) n^{-(k-1)/2}`.
    pub fn lambda(&self, n: usize, digits: u32) -> Result<ApComplex> {
        let a = self.coeff(n)?;
        let prec = bits_for(digits);
        let nf = Float::with_val(prec, n as u64);
        let mut denom = Float::with_val(prec, nf.sqrt_ref());
        denom *= Float::with_val(prec, Float::u_pow_u(n as u32, self.weight() / 2 - 1));
        let v = Float::with_val(prec, &a) / denom;
        Ok(ApComplex::from_real(v, digits))
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    weight: u32,
    n: usize,
    coeffs: Vec<String>,
}

pub fn cache_file_name(weight: u32, n: usize) -> String {
    format!("coeffs_w{weight}_n{n}.json")
}

/// Directory from `TWISTREC_CACHE_DIR`, if set.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)
}

/// Write `a_f(1..=n)` to `<dir>/coeffs_w{k}_n{n}.json` atomically.
pub fn write_cache(dir: &Path, form: &HeckeEigenform, n: usize) -> Result<PathBuf> {
    let coeffs = form.coeffs(n)?;
    let file = CacheFile { weight: form.weight(), n, coeffs: coeffs.iter().map(|c| c.to_string()).collect() };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(cache_file_name(form.weight(), n));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer(&mut tmp, &file)?;
    tmp.persist(&path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(path)
}

/// Read a cache file, checking that it is keyed by `(weight, n)`.
pub fn read_cache(dir: &Path, weight: u32, n: usize) -> Result<Option<Vec<Integer>>> {
    let path = dir.join(cache_file_name(weight, n));
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path)?;
    let file: CacheFile = serde_json::from_str(&text)?;
    if file.weight != weight || file.n != n || file.coeffs.len() != n {
        return Err(Error::Parse(format!("cache file {} does not match key ({weight}, {n})", path.display())));
    }
    file.coeffs
        .iter()
        .map(|s| s.parse::<Integer>().map_err(|e| Error::Parse(format!("bad coefficient {s:?}: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct expansion of `q prod_{n<len} (1 - q^n)^24`, one factor at a time.
    fn naive_delta(len: usize) -> Vec<Integer> {
        let mut p = vec![Integer::new(); len];
        p[0] = Integer::from(1);
        for n in 1..len {
            for _ in 0..24 {
                for i in (n..len).rev() {
                    let t = p[i - n].clone();
                    p[i] -= t;
                }
            }
        }
        let mut out = vec![Integer::new(); len];
        for i in 1..len {
            out[i] = p[i - 1].clone();
        }
        out
    }

    #[test]
    fn delta_matches_naive_product() {
        assert_eq!(delta_series(200), naive_delta(200));
    }

    #[test]
    fn ramanujan_tau_first_ten() {
        let f = build_form(12, 10).unwrap();
        let expected: Vec<i64> = vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        let got: Vec<i64> = f.coeffs(10).unwrap().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(got, expected);
        assert_eq!(build_form(12, 1).unwrap().coeffs(1).unwrap(), vec![Integer::from(1)]);
    }

    #[test]
    fn e4_squared_is_e8() {
        let n = 60;
        let e4 = eisenstein(3, 240, n);
        assert_eq!(mul_series(&e4, &e4, n), eisenstein(7, 480, n));
        let e6 = eisenstein(5, -504, n);
        assert_eq!(mul_series(&e4, &e6, n), eisenstein(9, -264, n));
    }

    #[test]
    fn known_weight_16_coefficients() {
        // Delta E4: 1, 216, -3348, 13888, 52110
        let f = build_form(16, 5).unwrap();
        let got: Vec<i64> = f.coeffs(5).unwrap().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(got, vec![1, 216, -3348, 13888, 52110]);
        let a = f.coeffs(6).unwrap();
        assert_eq!(a[5].clone(), Integer::from(&a[1] * &a[2]));
    }

    #[test]
    fn unsupported_weights_rejected() {
        for w in [0, 10, 14, 24, 28, 13] {
            assert_eq!(build_form(w, 5).unwrap_err(), Error::UnsupportedWeight { weight: w });
        }
        assert!(build_form(12, 0).is_err());
    }

    #[test]
    fn lambda_normalization() {
        let f = build_form(12, 4).unwrap();
        assert_eq!(f.lambda(1, 30).unwrap(), ApComplex::one(30));
        let l2 = f.lambda(2, 30).unwrap();
        let two = Float::with_val(bits_for(30), 2);
        let expected = Float::with_val(bits_for(30), -24) / Float::with_val(bits_for(30), two.sqrt() * 32u32);
        assert!(Float::with_val(bits_for(30), l2.re() - &expected).abs().to_f64() < 1e-45);
        // lambda(4) = lambda(2)^2 - 1
        let l4 = f.lambda(4, 30).unwrap();
        let rhs = &l2.square() - &ApComplex::one(30);
        assert!(l4.dist_f64(&rhs) < 1e-45);
        assert!(f.lambda(0, 30).is_err());
    }

    #[test]
    fn extension_preserves_prefix() {
        let f = build_form(18, 50).unwrap();
        let before = f.coeffs(50).unwrap();
        f.ensure(500).unwrap();
        assert_eq!(f.coeffs(50).unwrap(), before);
    }

    #[test]
    fn cache_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = build_form(20, 30).unwrap();
        write_cache(dir.path(), &f, 30).unwrap();
        let back = read_cache(dir.path(), 20, 30).unwrap().unwrap();
        assert_eq!(back, f.coeffs(30).unwrap());
        assert!(read_cache(dir.path(), 20, 31).unwrap().is_none());
    }
}
