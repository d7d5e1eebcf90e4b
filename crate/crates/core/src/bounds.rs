//! Explicit bound functions and constants used throughout the project: class
//! number lower bounds (Tatuzawa-style and unconditional genus-theoretic),
//! upper bounds, discriminant caps as functions of the number of singular
//! moduli involved, the large Step-4/auxiliary-constant growth functions, and
//! a Stirling-type factorial majorant. Everything evaluates in ball
//! arithmetic with outward rounding, so "value ≤ bound" conclusions drawn
//! from certified endpoints are conservative.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::arith::{factorize, isqrt_u64};
use crate::ball::RealBall;
use crate::quadforms::{is_discriminant, is_fundamental_discriminant};
use crate::{Error, Result};

/// The fixed epsilon parameter of the class-number lower bound: 1/12.
pub fn epsilon_star() -> Rational {
    Rational::from((1, 12))
}

/// `x^{p/q}` for a certified-positive ball, via `exp((p/q)·ln x)`.
fn pow_rational(x: &RealBall, p: i64, q: i64) -> Result<RealBall> {
    let prec = x.prec();
    let e = x
        .ln()?
        .mul(&RealBall::from_i64(prec, p))
        .div(&RealBall::from_i64(prec, q))?;
    Ok(e.exp())
}

/// Class-number lower bound `(37/50000)·|Δ|^{5/12}`, valid outside a single
/// possible exceptional imaginary quadratic field.
pub fn tatuzawa_lower(delta: i64, prec: u32) -> Result<RealBall> {
    if !is_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let n = RealBall::from_i64(prec, delta.abs());
    let pw = pow_rational(&n, 5, 12)?;
    Ok(pw.mul(&RealBall::from_rational(prec, &Rational::from((37, 50000)))))
}

/// The `|Δ|` at which `tatuzawa_lower` reaches the value `n`:
/// `(50000·n/37)^{12/5}`.
pub fn tatuzawa_equality_point(n: u64, prec: u32) -> Result<RealBall> {
    let v = RealBall::from_rational(prec, &Rational::from((50000u64 * n, 37u64)));
    pow_rational(&v, 12, 5)
}

/// Unconditional class-number lower bound `√(log|D| / 42000)` for
/// fundamental discriminants.
pub fn ggz_lower(d: i64, prec: u32) -> Result<RealBall> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::OutOfRange(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    let n = RealBall::from_i64(prec, d.abs());
    n.ln()?
        .div(&RealBall::from_i64(prec, 42000))
        .map(|q| q.sqrt_clamped())
}

/// The genus-theoretic product `F(D) = ∏ (1 − ⌊2√p⌋/(p+1))` over the primes
/// dividing `D`, excluding the largest one (empty product = 1).
pub fn f_factor(d: i64) -> Result<Rational> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::OutOfRange(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    let primes: Vec<u64> = factorize(d.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
    let mut out = Rational::from(1);
    for &p in primes.iter().take(primes.len().saturating_sub(1)) {
        let t = isqrt_u64(4 * p); // ⌊2√p⌋ = ⌊√(4p)⌋
        out *= Rational::from((p + 1 - t, p + 1));
    }
    Ok(out)
}

/// The exact `|Δ|` cap `⌈4k⁴·e^{42000·k²}⌉` below which every discriminant
/// with class number ≤ k must lie. The result has on the order of
/// `18240·k²` decimal digits; callers should display it in scientific
/// notation.
pub fn class_floor_disc_cap(k: u32) -> Integer {
    let k = k.max(1);
    let mut prec: u32 = 60_600u32.saturating_mul(k * k).saturating_add(64);
    for _ in 0..5 {
        let b = RealBall::from_i64(prec, 42_000 * (k as i64) * (k as i64))
            .exp()
            .mul_i64(4 * (k as i64).pow(4));
        let up = Float::with_val(prec, b.upper().ceil_ref());
        let lo = Float::with_val(prec, b.lower().ceil_ref());
        if up == lo {
            return up.to_integer().expect("finite ceiling");
        }
        prec *= 2;
    }
    unreachable!("ceiling certification failed to converge");
}

/// Class-number upper bound `(1/π)·|Δ|^{1/2}·(2 + log|Δ|)`.
pub fn paulin_upper(delta: i64, prec: u32) -> Result<RealBall> {
    if !is_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let n = RealBall::from_i64(prec, delta.abs());
    let two_plus_log = n.ln()?.add(&RealBall::from_i64(prec, 2));
    n.sqrt_clamped()
        .mul(&two_plus_log)
        .div(&RealBall::pi(prec))
}

/// The coarser class-number upper bound `|Δ|^{2/3}`.
pub fn class_upper(delta: i64, prec: u32) -> Result<RealBall> {
    if !is_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    pow_rational(&RealBall::from_i64(prec, delta.abs()), 2, 3)
}

///`(1/π)·((2n+3)·log(n+1) − 2n + 4)`: the `|Δ|^{1/2}` cap for n pairwise
/// equal-field singular moduli in the equal-coefficients theorem.
pub fn thm_equal_bound(n: u64, prec: u32) -> Result<RealBall> {
    let n = n as i64;
    let log_term = RealBall::from_i64(prec, n + 1).ln()?;
    log_term
        .mul_i64(2 * n + 3)
        .add(&RealBall::from_i64(prec, -2 * n + 4))
        .div(&RealBall::pi(prec))
}

/// `(1/π)·((4n+3)·log(2n+1) − 4n + 4)`: the `|Δ|^{1/2}` cap in the
/// same-field variant.
pub fn thm_field_bound(n: u64, prec: u32) -> Result<RealBall> {
    let n = n as i64;
    let log_term = RealBall::from_i64(prec, 2 * n + 1).ln()?;
    log_term
        .mul_i64(4 * n + 3)
        .add(&RealBall::from_i64(prec, -4 * n + 4))
        .div(&RealBall::pi(prec))
}

/// Converts a certified `|Δ|^{1/2}` cap into an integer `|Δ|` cap: the
/// ceiling of the square of the certified upper endpoint (conservative).
pub fn disc_cap_from_sqrt_bound(bound: &RealBall) -> Integer {
    let up = bound.upper();
    let sq = Float::with_val_round(bound.prec(), &up * &up, rug::float::Round::Up).0;
    Float::with_val(bound.prec(), sq.ceil_ref())
        .to_integer()
        .expect("finite cap")
}

/// Integer `|Δ|` cap from `thm_equal_bound(n)`.
pub fn thm_equal_disc_cap(n: u64, prec: u32) -> Result<Integer> {
    Ok(disc_cap_from_sqrt_bound(&thm_equal_bound(n, prec)?))
}

/// Integer `|Δ|` cap from `thm_field_bound(n)`.
pub fn thm_field_disc_cap(n: u64, prec: u32) -> Result<Integer> {
    Ok(disc_cap_from_sqrt_bound(&thm_field_bound(n, prec)?))
}

/// Exact value of the Step-4 `|Δ|^{1/2}` cap
/// `(3.8·10¹⁰)·(2.1·10⁴)ⁿ·(n+1)^{4n+6}`.
pub fn step4_bound(n: u32) -> Integer {
    Integer::from(38_000_000_000u64)
        * Integer::from(21_000u32).pow(n)
        * Integer::from(n + 1).pow(4 * n + 6)
}

/// Natural logarithm of `g(n) = (2n·step4(n)^{4n/3})²` as a certified ball.
pub fn g_bound_ln(n: u32, prec: u32) -> Result<RealBall> {
    let n = n.max(1);
    let step4 = RealBall::from_integer(prec, &step4_bound(n));
    let inner = RealBall::from_i64(prec, 2 * n as i64).ln()?.add(
        &step4
            .ln()?
            .mul_i64(4 * n as i64)
            .div(&RealBall::from_i64(prec, 3))?,
    );
    Ok(inner.mul_i64(2))
}

/// Natural logarithm of the auxiliary constant `c₂(n) = 2·g(n)·e^{21000·g(n)}`,
/// i.e. `log 2 + log g(n) + 21000·g(n)`. Only the logarithm is exposed: the
/// constant itself is far beyond any floating-point exponent range already
/// for n = 1.
pub fn c2_bound_ln(n: u32, prec: u32) -> Result<RealBall> {
    let g_ln = g_bound_ln(n, prec)?;
    let g = g_ln.exp();
    Ok(RealBall::from_i64(prec, 2)
        .ln()?
        .add(&g_ln)
        .add(&g.mul_i64(21_000)))
}

/// Stirling-type factorial majorant `√(2π)·exp((k+1/2)·log k − k + 1/12)`.
pub fn stirling_upper(k: u64, prec: u32) -> Result<RealBall> {
    let kb = RealBall::from_i64(prec, k as i64);
    let expo = kb
        .ln()?
        .mul(&RealBall::from_rational(
            prec,
            &Rational::from((2 * k + 1, 2)),
        ))
        .add(&RealBall::from_rational(
            prec,
            &Rational::from((1i64 - 12 * k as i64, 12)),
        ));
    let two_pi = RealBall::pi(prec).mul_i64(2);
    Ok(two_pi.sqrt_clamped().mul(&expo.exp()))
}

/// A named scalar bound evaluated at an integer parameter, for tabulation.
pub struct BoundProfile {
    pub name: &'static str,
    /// the meaning of the parameter column ("n" or "k")
    pub parameter: &'static str,
    /// whether the function must be increasing in its parameter
    pub monotone_increasing: bool,
    pub eval: fn(u32) -> String,
}

fn fmt_ball(b: &RealBall) -> String {
    let mid = b.mid().to_f64();
    if mid.abs() < 1e15 {
        format!("{mid:.6}")
    } else {
        format!("{mid:e}")
    }
}

fn fmt_big_from_ln(ln_val: &RealBall) -> String {
    // mantissa·10^e from a natural-log ball, printable at any magnitude
    let prec = ln_val.prec();
    let log10 = ln_val
        .div(&RealBall::from_i64(prec, 10).ln().unwrap())
        .unwrap();
    let e = log10.mid().to_f64().floor();
    let frac = log10.sub(&RealBall::from_parts(
        Float::with_val(prec, e),
        Float::with_val(crate::ball::RADIUS_PREC, 0),
    ));
    let mantissa = frac
        .mul(&RealBall::from_i64(prec, 10).ln().unwrap())
        .exp();
    format!("{:.4}e{}", mantissa.mid().to_f64(), e as i64)
}

/// The tabulated bound functions, as printed by the CLI bounds table.
pub fn profiles() -> Vec<BoundProfile> {
    const P: u32 = 192;
    vec![
        BoundProfile {
            name: "thm_equal_sqrt_cap",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| fmt_ball(&thm_equal_bound(n as u64, P).unwrap()),
        },
        BoundProfile {
            name: "thm_equal_disc_cap",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| thm_equal_disc_cap(n as u64, P).unwrap().to_string(),
        },
        BoundProfile {
            name: "thm_field_sqrt_cap",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| fmt_ball(&thm_field_bound(n as u64, P).unwrap()),
        },
        BoundProfile {
            name: "thm_field_disc_cap",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| thm_field_disc_cap(n as u64, P).unwrap().to_string(),
        },
        BoundProfile {
            name: "tatuzawa_equality_point",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| fmt_ball(&tatuzawa_equality_point(n as u64, P).unwrap()),
        },
        BoundProfile {
            name: "step4_sqrt_cap",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| {
                let v = step4_bound(n);
                fmt_big_from_ln(&RealBall::from_integer(P, &v).ln().unwrap())
            },
        },
        BoundProfile {
            name: "g_ln",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| fmt_ball(&g_bound_ln(n, P).unwrap()),
        },
        BoundProfile {
            name: "c2_ln",
            parameter: "n",
            monotone_increasing: true,
            eval: |n| fmt_ball(&c2_bound_ln(n, P).unwrap()),
        },
        BoundProfile {
            name: "class_floor_disc_cap",
            parameter: "k",
            monotone_increasing: true,
            eval: |k| {
                // display-only scientific form of the exact integer
                let ln_val = RealBall::from_i64(P, 42_000 * (k as i64) * (k as i64)).add(
                    &RealBall::from_i64(P, 4 * (k as i64).pow(4)).ln().unwrap(),
                );
                fmt_big_from_ln(&ln_val)
            },
        },
        BoundProfile {
            name: "stirling_upper",
            parameter: "k",
            monotone_increasing: true,
            eval: |k| fmt_ball(&stirling_upper(k as u64, P).unwrap()),
        },
    ]
}

/// CSV text of every profile for parameters 1..=n_max (header included).
pub fn table_csv(n_max: u32) -> String {
    let profs = profiles();
    let mut out = String::from("n");
    for p in &profs {
        out.push(',');
        out.push_str(p.name);
    }
    out.push('\n');
    for n in 1..=n_max {
        out.push_str(&n.to_string());
        for p in &profs {
            out.push(',');
            out.push_str(&(p.eval)(n));
        }
        out.push('\n');
    }
    out
}
