//! Certified evaluation of the modular j-function at CM points.
//!
//! `j` is computed as `E₄(q)³ / (q·∏(1−qⁿ)²⁴)` with `q = exp(2πiτ)`. Both
//! series truncations carry explicit tail bounds — `σ₃(n) ≤ n⁴` gives a
//! geometric majorant for the Eisenstein tail, and `−log(1−y) ≤ 2y` bounds
//! the eta-product tail — so every returned enclosure is certified. On the
//! fundamental-domain points used here `|q| ≤ e^{−π√3} < 1/229`, which makes
//! both majorants converge rapidly.

use rug::float::Round;
use rug::{Float, Integer};

use crate::ball::{radd, rdiv, rmul, rpow_up, rsub_down, ComplexBall, RealBall, RADIUS_PREC};
use crate::quadforms::{is_discriminant, reduced_forms, Discriminant, QuadForm};
use crate::{Error, Result};

/// σ₃(1..=n) by a divisor sieve. Values fit u64 comfortably for the series
/// lengths that arise (σ₃(n) < n⁴).
fn sigma3_table(n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n + 1];
    for d in 1..=n as u64 {
        let cube = d * d * d;
        let mut m = d as usize;
        while m <= n {
            s[m] += cube;
            m += d as usize;
        }
    }
    s
}

/// One evaluation pass at a fixed working precision; returns the enclosure
/// regardless of how wide it came out (the caller decides whether to retry).
fn j_eval_once(tau: &ComplexBall, wp: u32) -> Result<ComplexBall> {
    // q = exp(2πiτ); 2πiτ = 2π(−Im τ + i·Re τ)
    let two_pi = RealBall::pi(wp).mul_i64(2);
    let q = ComplexBall::new(two_pi.mul(&tau.im).neg(), two_pi.mul(&tau.re)).exp();

    let x = q.abs().abs_upper(); // certified |q| upper bound
    if !(x.clone() - Float::with_val(RADIUS_PREC, 0.01) < 0) {
        return Err(Error::OutOfRange(
            "|q| too large: τ outside the fundamental-domain strip".into(),
        ));
    }

    // series length: x^{N+1} ≲ 2^{−wp−80}
    let ln_x = x.to_f64().ln(); // negative
    let n_terms = (((wp as f64 + 80.0) * std::f64::consts::LN_2 / -ln_x).ceil() as usize + 8)
        .min(200_000);

    let sigma3 = sigma3_table(n_terms);
    let one = ComplexBall::from_i64(wp, 1);
    let mut e4 = one.clone();
    let mut eta_part = one.clone();
    let mut q_pow = one.clone();
    for (n, &s3) in sigma3.iter().enumerate().skip(1) {
        q_pow = q_pow.mul(&q);
        let coeff = RealBall::from_integer(wp, &(Integer::from(240u32) * Integer::from(s3)));
        e4 = e4.add(&q_pow.mul_real(&coeff));
        eta_part = eta_part.mul(&one.sub(&q_pow));
        let _ = n;
    }

    // Eisenstein tail: |Σ_{n>N} 240σ₃(n)qⁿ| ≤ 240(N+1)⁴·x^{N+1}/(1−16x),
    // using σ₃(n) ≤ n⁴ and n⁴xⁿ ≤ (N+1)⁴x^{N+1}(16x)^{n−N−1}.
    let xn1 = rpow_up(&x, n_terms as u64 + 1);
    let n1_4 = rpow_up(&Float::with_val(RADIUS_PREC, n_terms as u64 + 1), 4);
    let one_r = Float::with_val(RADIUS_PREC, 1);
    let denom_e = rsub_down(&one_r, &rmul(&Float::with_val(RADIUS_PREC, 16), &x));
    let tail_e = rdiv(
        &rmul(&Float::with_val(RADIUS_PREC, 240), &rmul(&n1_4, &xn1)),
        &denom_e,
    );
    let tail_ball = |t: &Float, prec: u32| {
        ComplexBall::new(
            RealBall::from_parts(Float::with_val(prec, 0), t.clone()),
            RealBall::from_parts(Float::with_val(prec, 0), t.clone()),
        )
    };
    let e4 = e4.add(&tail_ball(&tail_e, wp));

    // eta-product tail: ∏_{n>N}(1−qⁿ) = 1 + δ with |δ| ≤ 4x^{N+1}/(1−x)
    // (valid once 2x^{N+1}/(1−x) ≤ log 2, which holds by a wide margin).
    let l_bound = rdiv(
        &rmul(&Float::with_val(RADIUS_PREC, 2), &xn1),
        &rsub_down(&one_r, &x),
    );
    if !(l_bound.to_f64() <= 0.5) {
        return Err(Error::PrecisionTooLow(
            "eta tail bound out of its validity range".into(),
        ));
    }
    let tail_p = radd(&l_bound, &l_bound);
    let eta_full = eta_part.mul(&one.add(&tail_ball(&tail_p, wp)));

    let denom = q.mul(&eta_full.pow_u64(24));
    e4.pow_u64(3).div(&denom)
}

/// Certified enclosure of `j(τ)` for `Im τ ≥ √3/2`, with radius at most
/// `2^{−precision}·max(1, |j(τ)|)`. Retries internally with doubled working
/// precision before giving up.
pub fn j_eval(tau: &ComplexBall, precision: u32) -> Result<ComplexBall> {
    let im_mid = tau.im.mid().to_f64();
    if !(im_mid > 0.866025) {
        return Err(Error::OutOfRange(format!(
            "Im τ = {im_mid} below the √3/2 fundamental-domain floor"
        )));
    }
    // guard grows with the magnitude of 1/q = e^{2π Im τ}
    let guard = (2.0 * std::f64::consts::PI * im_mid / std::f64::consts::LN_2).ceil() as u32;
    let mut wp = precision + 64 + guard;
    let mut last_err = None;
    for _ in 0..=4 {
        match j_eval_once(tau, wp) {
            Ok(j) => {
                let abs_lower = j.abs().abs_lower();
                let scale = if abs_lower > 1 {
                    abs_lower
                } else {
                    Float::with_val(RADIUS_PREC, 1)
                };
                let thresh = Float::with_val_round(
                    RADIUS_PREC,
                    &scale * &Float::with_val(RADIUS_PREC, Float::i_exp(1, -(precision as i32))),
                    Round::Down,
                )
                .0;
                if j.rad_upper() <= thresh {
                    return Ok(j);
                }
                last_err = Some(Error::PrecisionExhausted(format!(
                    "enclosure radius {:.3e} exceeds target at {wp} working bits",
                    j.rad_upper().to_f64()
                )));
            }
            Err(e) => last_err = Some(e),
        }
        wp *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::PrecisionExhausted("j_eval".into())))
}

/// The CM point `τ = (−b + i·√|Δ|) / (2a)` of a form, as a complex ball.
pub fn cm_point(form: &QuadForm, prec: u32) -> ComplexBall {
    let delta = form.discriminant();
    let sqrt_disc = RealBall::from_i64(prec, -delta).sqrt_clamped();
    let two_a = RealBall::from_i64(prec, 2 * form.a);
    ComplexBall::new(
        RealBall::from_i64(prec, -form.b).div(&two_a).unwrap(),
        sqrt_disc.div(&two_a).unwrap(),
    )
}

/// A singular modulus: the value of `j` at the CM point of a reduced form.
#[derive(Clone, Debug)]
pub struct SingularModulus {
    form: QuadForm,
    discriminant: Discriminant,
    value: ComplexBall,
    precision: u32,
}

impl SingularModulus {
    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant.value()
    }

    pub fn value(&self) -> &ComplexBall {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }
}

/// Evaluates the singular modulus of a reduced form to the given precision.
pub fn singular_modulus(form: &QuadForm, precision: u32) -> Result<SingularModulus> {
    if !form.is_reduced() {
        return Err(Error::OutOfRange(format!("form {form} is not reduced")));
    }
    let discriminant = Discriminant::new(form.discriminant())?;
    let im_guard =
        (std::f64::consts::PI * (-discriminant.value() as f64).sqrt() / (form.a as f64)
            / std::f64::consts::LN_2)
            .ceil() as u32;
    let tau = cm_point(form, precision + im_guard + 128);
    let value = j_eval(&tau, precision)?;
    Ok(SingularModulus {
        form: form.clone(),
        discriminant,
        value,
        precision,
    })
}

/// All singular moduli of a discriminant (one per reduced form, in form
/// order), at a common precision.
pub fn all_singular_moduli(delta: i64, precision: u32) -> Result<Vec<SingularModulus>> {
    reduced_forms(delta)?
        .iter()
        .map(|f| singular_modulus(f, precision))
        .collect()
}

/// Absolute-accuracy target (bits) that makes the enclosure of a modulus of
/// the given form accurate to ~2^{−32} in absolute terms, accounting for the
/// `e^{π√|Δ|/a}` magnitude.
fn absolute_target(delta: i64, a: i64) -> u32 {
    (std::f64::consts::PI * (-delta as f64).sqrt() / a as f64 / std::f64::consts::LN_2).ceil()
        as u32
        + 32
}

/// Maximum over all reduced forms of `Δ` of the certified upper bound of
/// `| |j(τ)| − exp(2π·Im τ) |`. The returned value is ≤ 2079 for every
/// discriminant (a certified check of the deviation inequality).
pub fn bmz_deviation(delta: i64) -> Result<Float> {
    if !is_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let mut worst = Float::with_val(RADIUS_PREC, 0);
    for form in reduced_forms(delta)? {
        let target = absolute_target(delta, form.a);
        let sm = singular_modulus(&form, target)?;
        let prec = sm.value().prec();
        // exp(π√|Δ|/a) = exp(2π Im τ)
        let growth = RealBall::pi(prec)
            .mul(&RealBall::from_i64(prec, -delta).sqrt_clamped())
            .div(&RealBall::from_i64(prec, form.a))?
            .exp();
        let dev = sm.value().abs().sub(&growth).abs().abs_upper();
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

/// Certifies that every pair of distinct singular moduli drawn from the two
/// discriminants is separated by at least `800·max(|Δ₁|, |Δ₂|)^{−4}`.
pub fn separation_check(delta1: i64, delta2: i64, precision: u32) -> Result<bool> {
    let m1 = all_singular_moduli(delta1, precision)?;
    let m2 = all_singular_moduli(delta2, precision)?;
    let prec = precision.max(64);
    let max_abs = delta1.abs().max(delta2.abs());
    let bound = RealBall::from_i64(prec, 800)
        .div(&RealBall::from_i64(prec, max_abs).pow_u64(4))?;
    for (i, x) in m1.iter().enumerate() {
        for (j, y) in m2.iter().enumerate() {
            if delta1 == delta2 && i == j {
                continue;
            }
            let gap = x.value().sub(y.value()).abs();
            if gap.gt_certified(&bound) {
                continue;
            }
            if gap.lt_certified(&bound) {
                return Ok(false);
            }
            return Err(Error::Indeterminate(format!(
                "separation of {delta1}/{delta2} undecided at {precision} bits"
            )));
        }
    }
    Ok(true)
}
