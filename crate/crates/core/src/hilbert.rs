//! Exact Hilbert class polynomials with certified integer rounding.
//!
//! `H_Δ(z) = ∏ (z − x_i)` over the singular moduli of `Δ` is expanded in ball
//! arithmetic; a coefficient is accepted only when its enclosure has radius
//! below 1/4 and the nearest integer lies inside the ball, so a successful
//! rounding is a proof of the integer value. Computed polynomials can be
//! persisted to a checksummed text cache, one file per discriminant.

use std::fmt;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use rug::Integer;
use sha2::{Digest, Sha256};

use crate::ball::{ComplexBall, RealBall};
use crate::modular::all_singular_moduli;
use crate::quadforms::{class_number, is_discriminant, reduced_forms};
use crate::{Error, Result};

/// A monic integer polynomial `H_Δ`, coefficients stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertPoly {
    discriminant: i64,
    coefficients: Vec<Integer>,
}

impl HilbertPoly {
    /// Assembles a polynomial from raw parts, validating the invariants
    /// (valid discriminant, monic, degree ≥ 1).
    pub fn from_parts(discriminant: i64, coefficients: Vec<Integer>) -> Result<Self> {
        if !is_discriminant(discriminant) {
            return Err(Error::InvalidDiscriminant(discriminant));
        }
        if coefficients.len() < 2 {
            return Err(Error::Malformed(
                "class polynomial must have degree ≥ 1".into(),
            ));
        }
        if *coefficients.last().unwrap() != 1 {
            return Err(Error::Malformed("class polynomial must be monic".into()));
        }
        Ok(HilbertPoly {
            discriminant,
            coefficients,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficients from the constant term up to the (monic) leading term.
    pub fn coefficients(&self) -> &[Integer] {
        &self.coefficients
    }

    /// Coefficient of `z^k`.
    pub fn coefficient(&self, k: usize) -> &Integer {
        &self.coefficients[k]
    }

    /// Horner evaluation over complex balls at the precision of `z`.
    pub fn eval_complex(&self, z: &ComplexBall) -> ComplexBall {
        let prec = z.prec();
        let mut acc = ComplexBall::zero(prec);
        for c in self.coefficients.iter().rev() {
            acc = acc
                .mul(z)
                .add(&ComplexBall::from_real(RealBall::from_integer(prec, c)));
        }
        acc
    }
}

impl fmt::Display for HilbertPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.degree();
        let mut first = true;
        for k in (0..=deg).rev() {
            let c = &self.coefficients[k];
            if *c == 0 {
                continue;
            }
            let mag = Integer::from(c.abs_ref());
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag == 1 && k > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}z", if unit_coeff { "" } else { "*" })?,
                _ => write!(f, "{}z^{k}", if unit_coeff { "" } else { "*" })?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Starting working precision (bits) for expanding `H_Δ`:
/// `(π·|Δ|^{1/2}/ln 2)·Σ 1/a + 12·h(Δ) + 64`, rounded up with one spare bit.
pub fn required_precision(delta: i64) -> Result<u32> {
    let forms = reduced_forms(delta)?;
    let inv_a: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let bits = std::f64::consts::PI * (-delta as f64).sqrt() / std::f64::consts::LN_2 * inv_a
        + 12.0 * forms.len() as f64
        + 64.0;
    Ok(bits.ceil() as u32 + 1)
}

/// Single-shot expansion of `H_Δ` at a fixed precision (no retries). Fails
/// with [`Error::Indeterminate`] when a coefficient cannot be rounded.
pub fn hilbert_class_poly_with_precision(delta: i64, precision: u32) -> Result<HilbertPoly> {
    let moduli = all_singular_moduli(delta, precision)?;
    let wp = moduli
        .iter()
        .map(|m| m.value().prec())
        .max()
        .expect("at least one reduced form");
    let mut coeffs = vec![ComplexBall::from_i64(wp, 1)];
    for m in &moduli {
        let x = m.value();
        let mut next = vec![ComplexBall::zero(wp); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] = next[j + 1].add(c);
            next[j] = next[j].sub(&c.mul(x));
        }
        coeffs = next;
    }
    let mut rounded = Vec::with_capacity(coeffs.len());
    for (k, ball) in coeffs.iter().enumerate() {
        if !ball.im.contains_zero() || !(ball.im.rad().to_f64() < 0.25) {
            return Err(Error::Indeterminate(format!(
                "imaginary part of coefficient {k} of H_{delta} not certified zero at {precision} bits"
            )));
        }
        match ball.re.round_to_integer_certified() {
            Some(n) => rounded.push(n),
            None => {
                return Err(Error::Indeterminate(format!(
                    "coefficient {k} of H_{delta} has rounding margin ≥ 1/4 at {precision} bits"
                )))
            }
        }
    }
    debug_assert_eq!(rounded.len() as u64 - 1, class_number(delta)?);
    HilbertPoly::from_parts(delta, rounded)
}

/// The Hilbert class polynomial of `Δ`, with exact integer coefficients.
/// Starts at [`required_precision`] and doubles on rounding failure (at most
/// four retries).
pub fn hilbert_class_poly(delta: i64) -> Result<HilbertPoly> {
    let mut prec = required_precision(delta)?;
    for _ in 0..=4 {
        match hilbert_class_poly_with_precision(delta, prec) {
            Ok(p) => return Ok(p),
            Err(Error::Indeterminate(_)) | Err(Error::PrecisionExhausted(_)) => {}
            Err(e) => return Err(e),
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted(format!(
        "H_{delta} did not round after retries up to {} bits",
        prec / 2
    )))
}

fn cache_path(dir: &Path, delta: i64) -> PathBuf {
    dir.join(format!("H_{}.txt", delta.unsigned_abs()))
}

fn render_cache_body(poly: &HilbertPoly) -> String {
    let mut body = String::new();
    body.push_str(&format!("Δ {}\n", poly.discriminant));
    body.push_str(&format!("deg {}\n", poly.degree()));
    for c in &poly.coefficients {
        body.push_str(&format!("{c}\n"));
    }
    body
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes a polynomial to the cache directory, atomically (temp file +
/// rename), under the name `H_<|Δ|>.txt`.
pub fn cache_put(dir: &Path, poly: &HilbertPoly) -> Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    fs::create_dir_all(dir)?;
    let body = render_cache_body(poly);
    let full = format!("{body}sha256 {}\n", sha256_hex(body.as_bytes()));
    let tmp = dir.join(format!(
        "H_{}.txt.tmp-{}-{}",
        poly.discriminant.unsigned_abs(),
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, full)?;
    match fs::rename(&tmp, cache_path(dir, poly.discriminant)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e.into())
        }
    }
}

fn parse_cache_file(content: &str, delta: i64) -> std::result::Result<HilbertPoly, String> {
    let sha_pos = content
        .rfind("sha256 ")
        .ok_or("missing sha256 trailer line")?;
    let (body, trailer) = content.split_at(sha_pos);
    let stored = trailer
        .trim_end()
        .strip_prefix("sha256 ")
        .ok_or("malformed sha256 trailer")?;
    if stored != sha256_hex(body.as_bytes()) {
        return Err("checksum mismatch".into());
    }
    let mut lines = body.lines();
    let head = lines.next().ok_or("empty file")?;
    let file_delta: i64 = head
        .strip_prefix("Δ ")
        .ok_or("first line must be `Δ <value>`")?
        .trim()
        .parse()
        .map_err(|e| format!("bad discriminant: {e}"))?;
    if file_delta != delta {
        return Err(format!("file is for Δ = {file_delta}, not {delta}"));
    }
    let deg: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("deg "))
        .ok_or("second line must be `deg <h>`")?
        .trim()
        .parse()
        .map_err(|e| format!("bad degree: {e}"))?;
    let coeffs: Vec<Integer> = lines
        .map(|l| {
            l.trim()
                .parse::<Integer>()
                .map_err(|e| format!("bad coefficient `{l}`: {e}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if coeffs.len() != deg + 1 {
        return Err(format!(
            "degree header says {deg} but {} coefficients present",
            coeffs.len()
        ));
    }
    HilbertPoly::from_parts(delta, coeffs).map_err(|e| e.to_string())
}

/// Fetches a polynomial from the cache. Absent files are a silent miss;
/// malformed or checksum-failing files are reported to stderr and treated as
/// a miss (so the caller recomputes and overwrites).
pub fn cache_get(dir: &Path, delta: i64) -> Result<Option<HilbertPoly>> {
    let path = cache_path(dir, delta);
    let content = match fs::read_to_string(&path) {
        Ok(c) => c,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    match parse_cache_file(&content, delta) {
        Ok(p) => Ok(Some(p)),
        Err(msg) => {
            eprintln!(
                "warning: discarding cache entry {}: {msg}",
                path.display()
            );
            Ok(None)
        }
    }
}

/// Cache-backed class polynomial: hit returns the stored value, miss computes
/// and persists it.
pub fn hilbert_class_poly_cached(dir: &Path, delta: i64) -> Result<HilbertPoly> {
    if let Some(p) = cache_get(dir, delta)? {
        return Ok(p);
    }
    let p = hilbert_class_poly(delta)?;
    cache_put(dir, &p)?;
    Ok(p)
}
