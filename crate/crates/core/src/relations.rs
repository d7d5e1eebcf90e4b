//! Integer-relation detection and certification for singular moduli: exact
//! lattice reduction, a scaled relation lattice with a free constant term,
//! norm-based zero certificates, conjugate-matrix rank analysis, and the
//! per-triple decision procedure together with its five admissible relation
//! shapes.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};

use crate::ball::{ComplexBall, RealBall};
use crate::classgroup::{galois_orbit_triples, FormClass};
use crate::hilbert::{hilbert_class_poly, HilbertPoly};
use crate::modular::all_singular_moduli;
use crate::quadforms::{class_number, fundamental_decomposition, is_discriminant, QuadForm};
use crate::{Error, Result};

/// Verification state of a relation candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateStatus {
    Unverified,
    CertifiedZero,
    CertifiedNonzero,
}

impl CandidateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateStatus::Unverified => "unverified",
            CandidateStatus::CertifiedZero => "certified-zero",
            CandidateStatus::CertifiedNonzero => "certified-nonzero",
        }
    }
}

/// An integer vector `(n₀, n₁, ..., n_r)` proposed as a relation
/// `n₀·1 + n₁v₁ + ... + n_r v_r = 0` for a value list `(1, v₁, ..., v_r)`.
/// Stored with coefficient gcd 1 and the first nonzero entry among
/// `n₁, ..., n_r` positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCandidate {
    coefficients: Vec<Integer>,
    status: CandidateStatus,
}

impl RelationCandidate {
    pub fn new(coefficients: Vec<Integer>) -> Result<Self> {
        if coefficients.iter().all(|c| c.is_zero()) {
            return Err(Error::Malformed(
                "relation candidate must not be identically zero".into(),
            ));
        }
        let mut g = Integer::new();
        for c in &coefficients {
            g = g.gcd(c);
        }
        let mut coefficients: Vec<Integer> =
            coefficients.into_iter().map(|c| c / &g).collect();
        let flip = coefficients
            .iter()
            .skip(1)
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or_else(|| coefficients[0].is_negative());
        if flip {
            for c in &mut coefficients {
                *c = -c.clone();
            }
        }
        Ok(Self {
            coefficients,
            status: CandidateStatus::Unverified,
        })
    }

    pub fn coefficients(&self) -> &[Integer] {
        &self.coefficients
    }

    pub fn status(&self) -> CandidateStatus {
        self.status
    }

    pub fn with_status(mut self, status: CandidateStatus) -> Self {
        self.status = status;
        self
    }

    fn norm_sq(&self) -> Integer {
        self.coefficients
            .iter()
            .map(|c| Integer::from(c * c))
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Lattice reduction
// ---------------------------------------------------------------------------

/// Lattice basis reduction with factor `δ = 0.99`, in the classical
/// all-integer formulation: the Gram determinants `d_i` and the scaled
/// Gram–Schmidt coefficients `λ_{ij} = μ_{ij} d_{j+1}` stay integral
/// throughout. Rows must be linearly independent.
pub fn lll_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::Malformed("empty basis".into()));
    }
    let width = basis[0].len();
    if basis.iter().any(|row| row.len() != width) || width < n {
        return Err(Error::Malformed(
            "basis rows must share a width at least the row count".into(),
        ));
    }
    let mut b: Vec<Vec<Integer>> = basis.to_vec();
    // 1-indexed bookkeeping: d[0] = 1, d[k] = Gram determinant of rows 1..=k.
    let mut d: Vec<Integer> = vec![Integer::from(1); n + 1];
    let mut lam: Vec<Vec<Integer>> = vec![vec![Integer::new(); n + 1]; n + 1];

    let dot = |x: &[Integer], y: &[Integer]| -> Integer {
        x.iter().zip(y).map(|(a, c)| Integer::from(a * c)).sum()
    };

    // Size-reduces row k against row l (both 1-indexed).
    fn red(
        b: &mut [Vec<Integer>],
        lam: &mut [Vec<Integer>],
        d: &[Integer],
        k: usize,
        l: usize,
    ) {
        if Integer::from(2 * &lam[k][l]).abs() <= d[l] {
            return;
        }
        let (q, _) = lam[k][l].clone().div_rem_round(d[l].clone());
        let bl = b[l - 1].clone();
        for (x, y) in b[k - 1].iter_mut().zip(&bl) {
            *x -= Integer::from(&q * y);
        }
        lam[k][l] -= Integer::from(&q * &d[l]);
        for i in 1..l {
            let t = Integer::from(&q * &lam[l][i]);
            lam[k][i] -= t;
        }
    }

    let mut kmax = 1usize;
    d[1] = dot(&b[0], &b[0]);
    if d[1].is_zero() {
        return Err(Error::Malformed("dependent basis rows".into()));
    }
    let mut k = 2usize;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (Integer::from(&d[i] * &u) - Integer::from(&lam[k][i] * &lam[j][i]))
                        / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                    if d[k] <= 0 {
                        return Err(Error::Malformed("dependent basis rows".into()));
                    }
                }
            }
        }
        loop {
            red(&mut b, &mut lam, &d, k, k - 1);
            // Exchange condition with δ = 99/100:
            // swap when 100·d_k·d_{k−2} < 99·d_{k−1}² − 100·λ_{k,k−1}².
            let lhs = Integer::from(&d[k] * &d[k - 2]) * 100u32;
            let rhs = Integer::from(&d[k - 1] * &d[k - 1]) * 99u32
                - Integer::from(&lam[k][k - 1] * &lam[k][k - 1]) * 100u32;
            if lhs >= rhs {
                break;
            }
            b.swap(k - 1, k - 2);
            for j in 1..=k.saturating_sub(2) {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let lbar = lam[k][k - 1].clone();
            let bnew =
                (Integer::from(&d[k - 2] * &d[k]) + Integer::from(&lbar * &lbar)) / &d[k - 1];
            for i in (k + 1)..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (Integer::from(&d[k] * &lam[i][k - 1]) - Integer::from(&lbar * &t))
                    / &d[k - 1];
                lam[i][k - 1] =
                    (Integer::from(&bnew * &t) + Integer::from(&lbar * &lam[i][k])) / &d[k];
            }
            d[k - 1] = bnew;
            if k > 2 {
                k -= 1;
            }
        }
        for l in (1..=k.saturating_sub(2)).rev() {
            red(&mut b, &mut lam, &d, k, l);
        }
        k += 1;
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// Relation search
// ---------------------------------------------------------------------------

/// Outcome of a lattice search over one value list: every residual-consistent
/// candidate within the coefficient bound (sorted by norm, then
/// lexicographically), plus a lower bound (as log₂) on the Euclidean norm of
/// the coefficients `(n₁, ..., n_r)` of any exact integer relation — a
/// relation below the floor would have produced a shorter reduced vector.
#[derive(Clone, Debug)]
pub struct RelationSearch {
    pub candidates: Vec<RelationCandidate>,
    pub norm_floor_log2: f64,
    pub scale_bits: u32,
}

/// Single-candidate view of [`relation_search`].
#[derive(Clone, Debug)]
pub enum FindRelationOutcome {
    Found(RelationCandidate),
    NotFound { norm_floor_log2: f64 },
}

fn require_unit_head(values: &[ComplexBall]) -> Result<()> {
    let head = &values[0];
    if !(head.is_real_exactly() && head.re.mid() == &1 && head.re.rad().is_zero()) {
        return Err(Error::Malformed(
            "value list must start with the exact constant 1".into(),
        ));
    }
    Ok(())
}

fn magnitude_exponent(values: &[ComplexBall]) -> i64 {
    let mut mag: i64 = 0;
    for v in values {
        for part in [&v.re, &v.im] {
            if let Some(e) = part.abs_upper().get_exp() {
                mag = mag.max(e as i64);
            }
        }
    }
    mag
}

/// Exact linear combination `Σ nᵢ vᵢ` of value balls with integer weights.
pub fn combo_ball(values: &[ComplexBall], coefficients: &[Integer]) -> ComplexBall {
    let mut prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let coeff_bits = coefficients
        .iter()
        .map(|c| c.significant_bits())
        .max()
        .unwrap_or(1);
    prec = prec.max(coeff_bits + 64);
    let mut acc = ComplexBall::zero(prec);
    for (v, c) in values.iter().zip(coefficients) {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&v.mul_real(&RealBall::from_integer(prec, c)));
    }
    acc
}

/// Searches for integer relations `n₀ + n₁v₁ + ... + n_r v_r = 0` among
/// `values = (1, v₁, ..., v_r)` with `|nᵢ| ≤ coeff_bound` for `i ≥ 1` and the
/// constant coefficient `n₀` unconstrained. Real and imaginary parts are
/// embedded as two scaled columns accompanied by rows carrying the scale
/// alone, which makes the columns periodic: a relation whose rational part
/// is astronomically large still maps to a short lattice vector, and the
/// constant is recovered exactly afterwards. Every returned candidate's
/// residual ball lies below the lattice-consistency threshold; certification
/// is the caller's separate step.
pub fn relation_search(
    values: &[ComplexBall],
    coeff_bound: &Integer,
    precision: u32,
) -> Result<RelationSearch> {
    if values.len() < 2 {
        return Err(Error::OutOfRange(
            "relation search needs the constant plus at least one value".into(),
        ));
    }
    if coeff_bound <= &0 {
        return Err(Error::OutOfRange("coefficient bound must be positive".into()));
    }
    require_unit_head(values)?;
    let m = values.len() - 1;
    let dim = m + 2;
    let mag = magnitude_exponent(values);
    for v in values.iter().skip(1) {
        if let Some(re) = v.rad_upper().get_exp() {
            if (re as i64) > mag - precision as i64 + 8 {
                return Err(Error::PrecisionTooLow(format!(
                    "value radius 2^{re} too wide for the stated {precision}-bit precision"
                )));
            }
        }
    }
    let bound_bits = coeff_bound.significant_bits() as i64;
    let needed = ((dim as i64 + 1) * (bound_bits + 2)) / 2 + 64;
    let avail = precision as i64 - mag - 66;
    if avail < needed {
        return Err(Error::PrecisionTooLow(format!(
            "need {needed} scaled bits for coefficient bound 2^{bound_bits} in dimension \
             {dim}, have {avail} at {precision} bits"
        )));
    }
    let s = (needed + 128).min(avail).min(u32::MAX as i64) as u32;
    let scale = Integer::from(1) << s;
    let wp = precision + 96;

    // Full rounded columns recover the constant; residues centered modulo
    // the scale keep the identity rows short.
    let column = |part: &RealBall| -> (Integer, Integer) {
        let shifted = Float::with_val(wp, part.mid() << s);
        let full = shifted.to_integer().unwrap_or_default();
        let (_, centered) = full.clone().div_rem_round(scale.clone());
        (full, centered)
    };
    let re_cols: Vec<(Integer, Integer)> =
        values.iter().skip(1).map(|v| column(&v.re)).collect();
    let im_cols: Vec<(Integer, Integer)> =
        values.iter().skip(1).map(|v| column(&v.im)).collect();

    let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(dim);
    for i in 0..m {
        let mut row = vec![Integer::new(); dim];
        row[i] = Integer::from(1);
        row[m] = re_cols[i].1.clone();
        row[m + 1] = im_cols[i].1.clone();
        rows.push(row);
    }
    let mut row_const = vec![Integer::new(); dim];
    row_const[m] = scale.clone();
    rows.push(row_const);
    let mut row_imag = vec![Integer::new(); dim];
    row_imag[m + 1] = scale.clone();
    rows.push(row_imag);

    let reduced = lll_reduce(&rows)?;

    let first_norm_sq: Integer = reduced[0].iter().map(|x| Integer::from(x * x)).sum();
    let norm_floor_log2 = 0.5 * (first_norm_sq.significant_bits() as f64 - 1.0)
        - (dim as f64 - 1.0) / 2.0
        - 0.5 * (1.0 + m as f64 / 2.0).log2();

    let tau_base = Float::with_val(64, Float::i_exp(1, 1 - s as i32));
    let mut candidates: Vec<RelationCandidate> = Vec::new();
    for w in &reduced {
        let n = &w[0..m];
        if n.iter().all(|x| x.is_zero()) {
            continue;
        }
        if n.iter().any(|x| Integer::from(x.abs_ref()) > *coeff_bound) {
            continue;
        }
        // The centered rows displace the residual column by a multiple of
        // the scale; recovering the constant against the full columns
        // removes that displacement exactly: w[m] − Σ nᵢ·cᵢ = S·n₀.
        let mut numer = w[m].clone();
        for (ni, col) in n.iter().zip(&re_cols) {
            numer -= Integer::from(ni * &col.0);
        }
        let (n0, rem) = numer.div_rem(scale.clone());
        if !rem.is_zero() {
            continue;
        }
        let mut coeffs = Vec::with_capacity(m + 1);
        coeffs.push(n0);
        coeffs.extend(n.iter().cloned());
        let l1: Integer = coeffs
            .iter()
            .skip(1)
            .map(|x| Integer::from(x.abs_ref()))
            .sum();
        let theta = combo_ball(values, &coeffs);
        let tau = Float::with_val(64, Integer::from(&l1 + 2u32)) * &tau_base;
        if theta.abs().upper() > tau {
            continue;
        }
        let cand = RelationCandidate::new(coeffs)?;
        if !candidates.contains(&cand) {
            candidates.push(cand);
        }
    }
    candidates.sort_by(|p, q| {
        p.norm_sq()
            .cmp(&q.norm_sq())
            .then_with(|| p.coefficients.cmp(&q.coefficients))
    });
    Ok(RelationSearch {
        candidates,
        norm_floor_log2,
        scale_bits: s,
    })
}

/// First candidate of [`relation_search`], or the detection floor when no
/// integer relation within the bound is visible at this precision.
pub fn find_relation(
    values: &[ComplexBall],
    coeff_bound: &Integer,
    precision: u32,
) -> Result<FindRelationOutcome> {
    let search = relation_search(values, coeff_bound, precision)?;
    Ok(match search.candidates.into_iter().next() {
        Some(c) => FindRelationOutcome::Found(c),
        None => FindRelationOutcome::NotFound {
            norm_floor_log2: search.norm_floor_log2,
        },
    })
}

// ---------------------------------------------------------------------------
// Norm certificates
// ---------------------------------------------------------------------------

fn lcm_i64(a: i64, b: i64) -> i64 {
    let g = Integer::from(a).gcd(&Integer::from(b)).to_i64().unwrap_or(1);
    (a / g) * b
}

/// Degree over `Q` of one Galois field containing every conjugate of every
/// listed singular modulus, available when the discriminants share one
/// fundamental discriminant: the ring class field of the least common
/// conductor, of degree twice its class number. Mixed fields return `None`.
fn family_degree(discs: &[i64]) -> Result<Option<u64>> {
    let mut fund: Option<i64> = None;
    let mut l: i64 = 1;
    for &d in discs {
        let (f0, f) = fundamental_decomposition(d)?;
        match fund {
            None => fund = Some(f0),
            Some(x) if x == f0 => {}
            _ => return Ok(None),
        }
        l = lcm_i64(l, f);
    }
    let base = fund.ok_or_else(|| Error::Malformed("empty discriminant list".into()))?;
    Ok(Some(2 * class_number(base * l * l)?))
}

/// Upper bound `e^{π√|Δ|} + 2079` on the absolute value of every conjugate of
/// a singular modulus of discriminant `Δ`, as a ball.
pub fn house_bound(delta: i64, prec: u32) -> Result<RealBall> {
    if !is_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let sqrt = RealBall::from_i64(prec, -delta).sqrt_clamped();
    Ok(RealBall::pi(prec)
        .mul(&sqrt)
        .exp()
        .add(&RealBall::from_i64(prec, 2079)))
}

/// Certifies a candidate against a list of algebraic-integer values: the
/// combination `θ = Σ nᵢvᵢ` is an algebraic integer of degree at most
/// `degree_bound` whose conjugates are bounded by `S = Σ |nᵢ| Mᵢ`; a nonzero
/// algebraic integer has absolute norm at least 1, so
/// `|θ| < S^{−(degree_bound−1)}` forces `θ = 0`. A residual ball excluding
/// zero certifies nonvanishing instead.
pub fn liouville_certify(
    cand: &RelationCandidate,
    values: &[ComplexBall],
    houses: &[RealBall],
    degree_bound: u64,
) -> Result<CandidateStatus> {
    if values.len() != cand.coefficients.len() || houses.len() != values.len() {
        return Err(Error::Malformed(
            "candidate, value, and house lists must have equal length".into(),
        ));
    }
    if degree_bound == 0 {
        return Err(Error::OutOfRange("degree bound must be positive".into()));
    }
    let theta = combo_ball(values, &cand.coefficients);
    if !theta.contains_zero() {
        return Ok(CandidateStatus::CertifiedNonzero);
    }
    let prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut sum = RealBall::zero(prec);
    for (c, house) in cand.coefficients.iter().zip(houses) {
        if c.is_zero() {
            continue;
        }
        let c_abs = Integer::from(c.abs_ref());
        sum = sum.add(&house.mul(&RealBall::from_integer(prec, &c_abs)));
    }
    let threshold = sum.pow_u64(degree_bound - 1).recip()?;
    if theta.abs().upper() < threshold.lower() {
        return Ok(CandidateStatus::CertifiedZero);
    }
    Ok(CandidateStatus::Unverified)
}

// ---------------------------------------------------------------------------
// Conjugate-matrix rank analysis
// ---------------------------------------------------------------------------

/// Verdict of the 4×4-determinant sweep over simultaneous conjugate rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank4Outcome {
    /// Some 4×4 determinant is certified nonzero: no linear relation, not
    /// even one with vanishing coefficients, fits all conjugate rows.
    NoRelation,
    /// Every inspected 4×4 determinant ball contains zero with a radius
    /// consistent with exact vanishing (reported, not concluded).
    AllMinorsVanish,
    /// Some determinant ball contains zero but is too wide to be meaningful.
    Indeterminate,
}

fn det2(m: &[[&ComplexBall; 2]; 2]) -> ComplexBall {
    m[0][0].mul(m[1][1]).sub(&m[0][1].mul(m[1][0]))
}

fn det3(m: &[[&ComplexBall; 3]; 3]) -> ComplexBall {
    let mut acc = ComplexBall::zero(m[0][0].prec());
    for (j, sign) in [(0usize, 1i64), (1, -1), (2, 1)] {
        let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
        let minor = det2(&[
            [m[1][cols[0]], m[1][cols[1]]],
            [m[2][cols[0]], m[2][cols[1]]],
        ]);
        acc = acc.add(&m[0][j].mul(&minor).mul_i64(sign));
    }
    acc
}

fn det4(rows: [&[ComplexBall; 4]; 4]) -> ComplexBall {
    let mut acc = ComplexBall::zero(rows[0][0].prec());
    for (j, sign) in [(0usize, 1i64), (1, -1), (2, 1), (3, -1)] {
        let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
        let minor = det3(&[
            [&rows[1][cols[0]], &rows[1][cols[1]], &rows[1][cols[2]]],
            [&rows[2][cols[0]], &rows[2][cols[1]], &rows[2][cols[2]]],
            [&rows[3][cols[0]], &rows[3][cols[1]], &rows[3][cols[2]]],
        ]);
        acc = acc.add(&rows[0][j].mul(&minor).mul_i64(sign));
    }
    acc
}

/// Whether a determinant ball containing zero is tight enough to be
/// consistent with exact vanishing: its radius must sit far below the
/// entry-magnitude scale.
fn zero_consistent(det: &ComplexBall, rows: &[&[ComplexBall; 4]], prec: u32) -> bool {
    let mut scale = Float::with_val(64, 24);
    for row in rows {
        let mut row_max = Float::with_val(64, 1);
        for e in row.iter() {
            let a = e.abs().upper();
            if a > row_max {
                row_max = a;
            }
        }
        scale *= row_max;
    }
    let cutoff = scale * Float::with_val(64, Float::i_exp(1, -((prec / 2) as i32)));
    det.rad_upper() < cutoff
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

const MAX_SWEEP_ROWS: usize = 20;

/// Sweeps the 4×4 determinants of at least four simultaneous conjugate rows
/// `(1, xᵢ, yᵢ, zᵢ)`. A certified nonzero determinant refutes every linear
/// relation; universal consistency with zero is reported but not concluded.
pub fn rank4_certify(rows: &[[ComplexBall; 4]]) -> Result<Rank4Outcome> {
    if rows.len() < 4 {
        return Err(Error::OutOfRange(format!(
            "need at least 4 conjugate rows, got {}",
            rows.len()
        )));
    }
    let prec = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|b| b.prec())
        .min()
        .unwrap();
    let take = rows.len().min(MAX_SWEEP_ROWS);
    let mut all_vanish = true;
    for combo in combinations(take, 4) {
        let sel = [
            &rows[combo[0]],
            &rows[combo[1]],
            &rows[combo[2]],
            &rows[combo[3]],
        ];
        let det = det4(sel);
        if !det.contains_zero() {
            return Ok(Rank4Outcome::NoRelation);
        }
        if !zero_consistent(&det, &sel, prec) {
            all_vanish = false;
        }
    }
    Ok(if all_vanish {
        Rank4Outcome::AllMinorsVanish
    } else {
        Rank4Outcome::Indeterminate
    })
}

/// Largest `t` with a certified-nonzero `t×t` minor, plus whether any
/// top-size minor ball containing zero was too wide to treat as consistent
/// with vanishing.
fn minor_rank_lower_bound(rows: &[[ComplexBall; 4]], prec: u32) -> (usize, bool) {
    let take = rows.len().min(MAX_SWEEP_ROWS);
    let mut widest = false;
    for t in (1..=take.min(4)).rev() {
        let row_sets = combinations(take, t);
        let col_sets = combinations(4, t);
        for rs in &row_sets {
            for cs in &col_sets {
                let det = match t {
                    1 => rows[rs[0]][cs[0]].clone(),
                    2 => det2(&[
                        [&rows[rs[0]][cs[0]], &rows[rs[0]][cs[1]]],
                        [&rows[rs[1]][cs[0]], &rows[rs[1]][cs[1]]],
                    ]),
                    3 => det3(&[
                        [
                            &rows[rs[0]][cs[0]],
                            &rows[rs[0]][cs[1]],
                            &rows[rs[0]][cs[2]],
                        ],
                        [
                            &rows[rs[1]][cs[0]],
                            &rows[rs[1]][cs[1]],
                            &rows[rs[1]][cs[2]],
                        ],
                        [
                            &rows[rs[2]][cs[0]],
                            &rows[rs[2]][cs[1]],
                            &rows[rs[2]][cs[2]],
                        ],
                    ]),
                    _ => det4([&rows[rs[0]], &rows[rs[1]], &rows[rs[2]], &rows[rs[3]]]),
                };
                if !det.contains_zero() {
                    return (t, widest);
                }
                if t == 4 {
                    let sel = [&rows[rs[0]], &rows[rs[1]], &rows[rs[2]], &rows[rs[3]]];
                    if !zero_consistent(&det, &sel, prec) {
                        widest = true;
                    }
                }
            }
        }
    }
    (0, widest)
}

// ---------------------------------------------------------------------------
// Null-space combinatorics over the rationals
// ---------------------------------------------------------------------------

/// Greedy extraction of a linearly independent subset (exact integer rank).
fn independent_subset(vectors: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut kept: Vec<Vec<Integer>> = Vec::new();
    for v in vectors {
        let mut r: Vec<Rational> = v.iter().map(Rational::from).collect();
        for pivot in &rows {
            let j = pivot.iter().position(|x| *x != 0).unwrap();
            if r[j] != 0 {
                let factor = Rational::from(&r[j] / &pivot[j]);
                for (a, b) in r.iter_mut().zip(pivot) {
                    *a -= Rational::from(&factor * b);
                }
            }
        }
        if r.iter().any(|x| *x != 0) {
            rows.push(r);
            kept.push(v.clone());
        }
    }
    kept
}

/// Whether the rational span of `basis` contains a vector whose coordinates
/// at `positions` are all nonzero. This holds exactly when, for each
/// position, some basis vector is nonzero there: a vector space over an
/// infinite field is never a finite union of proper subspaces.
fn span_has_all_nonzero(basis: &[Vec<Integer>], positions: &[usize]) -> bool {
    !basis.is_empty()
        && positions
            .iter()
            .all(|&p| basis.iter().any(|v| !v[p].is_zero()))
}

/// Explicit small integer combination of `basis` with all `positions`
/// nonzero, minimizing the value-coefficient norm, then the constant, then
/// lexicographic order. With weights in `{−4, ..., 4}` a qualifying
/// combination always exists when [`span_has_all_nonzero`] holds: each
/// position excludes at most one ninth of the weight grid.
fn qualifying_combination(basis: &[Vec<Integer>], positions: &[usize]) -> Option<Vec<Integer>> {
    if !span_has_all_nonzero(basis, positions) {
        return None;
    }
    let width = basis[0].len();
    let range: Vec<i64> = vec![0, 1, -1, 2, -2, 3, -3, 4, -4];
    let mut best: Option<(Integer, Integer, Vec<Integer>)> = None;
    let mut weights = vec![0usize; basis.len()];
    loop {
        let mut v = vec![Integer::new(); width];
        for (w, base) in weights.iter().zip(basis) {
            let t = range[*w];
            if t != 0 {
                for (a, b) in v.iter_mut().zip(base) {
                    *a += Integer::from(b * t);
                }
            }
        }
        if positions.iter().all(|&p| !v[p].is_zero()) {
            let tail: Integer = v[1..].iter().map(|x| Integer::from(x * x)).sum();
            let head = Integer::from(&v[0] * &v[0]);
            let better = match &best {
                None => true,
                Some((bt, bh, bv)) => (&tail, &head, &v) < (bt, bh, bv),
            };
            if better {
                best = Some((tail, head, v));
            }
        }
        let mut i = 0;
        loop {
            if i == weights.len() {
                return best.map(|(_, _, v)| v);
            }
            weights[i] += 1;
            if weights[i] < range.len() {
                break;
            }
            weights[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Triple checking
// ---------------------------------------------------------------------------

/// Search and certification parameters.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub bits: u32,
    pub coeff_bound: Integer,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            bits: 4096,
            coeff_bound: Integer::from(1) << 128u32,
        }
    }
}

/// Aggregate verdict for one discriminant triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleStatus {
    RelationFoundCertified,
    EliminatedCertified,
    EliminatedHeuristic,
    Indeterminate,
}

impl TripleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TripleStatus::RelationFoundCertified => "relation-found-certified",
            TripleStatus::EliminatedCertified => "eliminated-certified",
            TripleStatus::EliminatedHeuristic => "eliminated-heuristic",
            TripleStatus::Indeterminate => "indeterminate",
        }
    }
}

/// A certified relation for one root triple: coefficients `(n₀, A, B, C)`
/// for the values `(1, x, y, z)` — that is, `Ax + By + Cz = −n₀` — plus the
/// admissible shape (1–5) it matches, if any.
#[derive(Clone, Debug)]
pub struct Witness {
    pub coefficients: Vec<Integer>,
    pub case_shape: Option<u8>,
}

/// Per-root-triple (or per-orbit) verdict kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootOutcomeKind {
    EliminatedRank,
    EliminatedNullSpace,
    RelationFound,
    EliminatedHeuristic,
    Indeterminate,
}

impl RootOutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RootOutcomeKind::EliminatedRank => "eliminated-certified-rank",
            RootOutcomeKind::EliminatedNullSpace => "eliminated-certified-nullspace",
            RootOutcomeKind::RelationFound => "relation-found",
            RootOutcomeKind::EliminatedHeuristic => "eliminated-heuristic",
            RootOutcomeKind::Indeterminate => "indeterminate",
        }
    }
}

/// Verdict for one root triple, identified by the three reduced forms.
#[derive(Clone, Debug)]
pub struct RootOutcome {
    pub forms: [QuadForm; 3],
    pub orbit_size: usize,
    pub kind: RootOutcomeKind,
    pub witness: Option<Witness>,
    pub rank_lower_bound: usize,
    pub certified_zero_count: usize,
    pub norm_floor_log2: Option<f64>,
}

/// Full report for one discriminant triple.
#[derive(Clone, Debug)]
pub struct TripleReport {
    pub triple: [i64; 3],
    pub status: TripleStatus,
    pub witnesses: Vec<Witness>,
    pub bits: u32,
    pub coeff_bound: Integer,
    pub per_root_outcomes: Vec<RootOutcome>,
    pub seconds: f64,
}

fn form_json(f: &QuadForm) -> Value {
    json!([f.a, f.b, f.c])
}

fn witness_json(w: &Witness) -> Value {
    json!({
        "coefficients": w.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "case_shape": w.case_shape,
    })
}

impl TripleReport {
    pub fn to_json(&self) -> Value {
        json!({
            "triple": self.triple,
            "status": self.status.as_str(),
            "witnesses": self.witnesses.iter().map(witness_json).collect::<Vec<_>>(),
            "parameters": {
                "bits": self.bits,
                "coeff_bound": self.coeff_bound.to_string(),
            },
            "per_root_outcomes": self
                .per_root_outcomes
                .iter()
                .map(|o| {
                    json!({
                        "forms": o.forms.iter().map(form_json).collect::<Vec<_>>(),
                        "orbit_size": o.orbit_size,
                        "outcome": o.kind.as_str(),
                        "witness": o.witness.as_ref().map(witness_json),
                        "rank_lower_bound": o.rank_lower_bound,
                        "certified_zero_count": o.certified_zero_count,
                        "norm_floor_log2": o.norm_floor_log2,
                    })
                })
                .collect::<Vec<_>>(),
            "seconds": self.seconds,
        })
    }
}

struct TripleContext {
    discs: [i64; 3],
    class_numbers: [u64; 3],
    degree_bound: u64,
    houses: [RealBall; 3],
    moduli: BTreeMap<i64, Vec<(QuadForm, ComplexBall)>>,
    cfg: CheckConfig,
}

impl TripleContext {
    fn value_of(&self, disc: i64, form: &QuadForm) -> &ComplexBall {
        self.moduli[&disc]
            .iter()
            .find(|(f, _)| f == form)
            .map(|(_, v)| v)
            .expect("form of a cached discriminant")
    }

    fn row_for(&self, forms: &[&QuadForm; 3]) -> [ComplexBall; 4] {
        let one = ComplexBall::from_i64(self.cfg.bits, 1);
        [
            one,
            self.value_of(self.discs[0], forms[0]).clone(),
            self.value_of(self.discs[1], forms[1]).clone(),
            self.value_of(self.discs[2], forms[2]).clone(),
        ]
    }
}

fn decide_root_triple(
    ctx: &TripleContext,
    rep_forms: [QuadForm; 3],
    rows: Vec<[ComplexBall; 4]>,
) -> Result<RootOutcome> {
    let values = ctx.row_for(&[&rep_forms[0], &rep_forms[1], &rep_forms[2]]);
    let orbit_size = rows.len();
    let (rank_lb, minors_inconclusive) = minor_rank_lower_bound(&rows, ctx.cfg.bits);
    if rank_lb == 4 {
        return Ok(RootOutcome {
            forms: rep_forms,
            orbit_size,
            kind: RootOutcomeKind::EliminatedRank,
            witness: None,
            rank_lower_bound: 4,
            certified_zero_count: 0,
            norm_floor_log2: None,
        });
    }

    let search = relation_search(&values, &ctx.cfg.coeff_bound, ctx.cfg.bits)?;
    let houses = [
        RealBall::from_i64(ctx.cfg.bits, 1),
        ctx.houses[0].clone(),
        ctx.houses[1].clone(),
        ctx.houses[2].clone(),
    ];
    let mut zeros: Vec<Vec<Integer>> = Vec::new();
    let mut any_unverified = false;
    for cand in &search.candidates {
        match liouville_certify(cand, &values, &houses, ctx.degree_bound)? {
            CandidateStatus::CertifiedZero => zeros.push(cand.coefficients().to_vec()),
            CandidateStatus::CertifiedNonzero => {}
            CandidateStatus::Unverified => any_unverified = true,
        }
    }
    let span = independent_subset(&zeros);

    if span_has_all_nonzero(&span, &[1, 2, 3]) {
        let Some(combo) = qualifying_combination(&span, &[1, 2, 3]) else {
            // unreachable given the span test; stay conservative
            return Ok(RootOutcome {
                forms: rep_forms,
                orbit_size,
                kind: RootOutcomeKind::Indeterminate,
                witness: None,
                rank_lower_bound: rank_lb,
                certified_zero_count: span.len(),
                norm_floor_log2: Some(search.norm_floor_log2),
            });
        };
        let witness_cand =
            RelationCandidate::new(combo)?.with_status(CandidateStatus::CertifiedZero);
        let theta = combo_ball(&values, witness_cand.coefficients());
        let small = Float::with_val(64, Float::i_exp(1, -67));
        if theta.rad_upper() >= small || !theta.contains_zero() {
            return Ok(RootOutcome {
                forms: rep_forms,
                orbit_size,
                kind: RootOutcomeKind::Indeterminate,
                witness: None,
                rank_lower_bound: rank_lb,
                certified_zero_count: span.len(),
                norm_floor_log2: Some(search.norm_floor_log2),
            });
        }
        let shape = classify_shape(ctx, &rep_forms, witness_cand.coefficients());
        return Ok(RootOutcome {
            forms: rep_forms,
            orbit_size,
            kind: RootOutcomeKind::RelationFound,
            witness: Some(Witness {
                coefficients: witness_cand.coefficients().to_vec(),
                case_shape: shape,
            }),
            rank_lower_bound: rank_lb,
            certified_zero_count: span.len(),
            norm_floor_log2: Some(search.norm_floor_log2),
        });
    }

    if rank_lb + span.len() == 4 {
        // The rational null space of the conjugate matrix is exactly the
        // certified span, and that span misses one of the three coordinate
        // conditions: no admissible relation exists for this root triple.
        return Ok(RootOutcome {
            forms: rep_forms,
            orbit_size,
            kind: RootOutcomeKind::EliminatedNullSpace,
            witness: None,
            rank_lower_bound: rank_lb,
            certified_zero_count: span.len(),
            norm_floor_log2: Some(search.norm_floor_log2),
        });
    }

    if minors_inconclusive || any_unverified {
        return Ok(RootOutcome {
            forms: rep_forms,
            orbit_size,
            kind: RootOutcomeKind::Indeterminate,
            witness: None,
            rank_lower_bound: rank_lb,
            certified_zero_count: span.len(),
            norm_floor_log2: Some(search.norm_floor_log2),
        });
    }

    Ok(RootOutcome {
        forms: rep_forms,
        orbit_size,
        kind: RootOutcomeKind::EliminatedHeuristic,
        witness: None,
        rank_lower_bound: rank_lb,
        certified_zero_count: span.len(),
        norm_floor_log2: Some(search.norm_floor_log2),
    })
}

/// Discriminant of the quadratic `z² + pz + q` attached to a class-number-2
/// discriminant's minimal polynomial (positive: the field is real).
fn quadratic_poly_disc(delta: i64) -> Result<Integer> {
    let poly = hilbert_class_poly(delta)?;
    if poly.degree() != 2 {
        return Err(Error::OutOfRange(format!(
            "discriminant {delta} does not have class number 2"
        )));
    }
    let q = poly.coefficient(0).clone();
    let p = poly.coefficient(1).clone();
    Ok(Integer::from(&p * &p) - 4u32 * q)
}

/// Whether two class-number-2 singular moduli generate the same real
/// quadratic field: the product of their minimal-polynomial discriminants
/// must be a perfect square.
fn same_quadratic_field(d1: i64, d2: i64) -> Result<bool> {
    if d1 == d2 {
        return Ok(true);
    }
    let product = quadratic_poly_disc(d1)? * quadratic_poly_disc(d2)?;
    Ok(product.is_perfect_square())
}

/// The conjugate partners of a root inside one discriminant's root list.
fn other_roots<'a>(ctx: &'a TripleContext, disc: i64, form: &QuadForm) -> Vec<&'a ComplexBall> {
    ctx.moduli[&disc]
        .iter()
        .filter(|(f, _)| f != form)
        .map(|(_, v)| v)
        .collect()
}

fn certify_zero_combo(ctx: &TripleContext, parts: &[(Integer, ComplexBall, RealBall)]) -> bool {
    let prec = ctx.cfg.bits;
    let one = ComplexBall::from_i64(prec, 1);
    let mut values = vec![one];
    let mut coeffs = vec![Integer::new()];
    let mut houses = vec![RealBall::from_i64(prec, 1)];
    for (c, v, h) in parts {
        coeffs.push(c.clone());
        values.push(v.clone());
        houses.push(h.clone());
    }
    let Ok(cand) = RelationCandidate::new(coeffs) else {
        return true; // identically zero combination
    };
    matches!(
        liouville_certify(&cand, &values, &houses, ctx.degree_bound),
        Ok(CandidateStatus::CertifiedZero)
    )
}

/// Matches a certified relation `(n₀, A, B, C)` on `(1, x, y, z)` against the
/// five admissible shapes, positionally up to permutation. Returns the shape
/// number, or `None` for a relation outside the classification.
fn classify_shape(ctx: &TripleContext, forms: &[QuadForm; 3], coeffs: &[Integer]) -> Option<u8> {
    let h = ctx.class_numbers;
    let d = ctx.discs;
    let a = [&coeffs[1], &coeffs[2], &coeffs[3]];
    let vals: Vec<&ComplexBall> = (0..3).map(|i| ctx.value_of(d[i], &forms[i])).collect();

    if h == [1, 1, 1] {
        return Some(1);
    }
    if h == [3, 3, 3] && d[0] == d[1] && d[1] == d[2] && a[0] == a[1] && a[1] == a[2] {
        return Some(4);
    }
    // Shape 2: one rational coordinate, two degree-2 coordinates in one
    // field, with B(y − y′) + C(z − z′) = 0.
    if let Some(p0) = (0..3).find(|&i| h[i] == 1) {
        let rest: Vec<usize> = (0..3).filter(|&i| i != p0).collect();
        let (py, pz) = (rest[0], rest[1]);
        if h[py] == 2 && h[pz] == 2 && same_quadratic_field(d[py], d[pz]).ok()? {
            let y_other = other_roots(ctx, d[py], &forms[py])[0].clone();
            let z_other = other_roots(ctx, d[pz], &forms[pz])[0].clone();
            let ok = certify_zero_combo(
                ctx,
                &[
                    (
                        a[py].clone(),
                        vals[py].sub(&y_other),
                        ctx.houses[py].add(&ctx.houses[py]),
                    ),
                    (
                        a[pz].clone(),
                        vals[pz].sub(&z_other),
                        ctx.houses[pz].add(&ctx.houses[pz]),
                    ),
                ],
            );
            if ok {
                return Some(2);
            }
        }
    }
    // Shape 3: three degree-2 coordinates in one field, with
    // A(x − x′) + B(y − y′) + C(z − z′) = 0.
    if h == [2, 2, 2] {
        let same =
            same_quadratic_field(d[0], d[1]).ok()? && same_quadratic_field(d[0], d[2]).ok()?;
        if same {
            let parts: Vec<(Integer, ComplexBall, RealBall)> = (0..3)
                .map(|i| {
                    let other = other_roots(ctx, d[i], &forms[i])[0].clone();
                    (
                        a[i].clone(),
                        vals[i].sub(&other),
                        ctx.houses[i].add(&ctx.houses[i]),
                    )
                })
                .collect();
            if certify_zero_combo(ctx, &parts) {
                return Some(3);
            }
        }
    }
    // Shape 5: a degree-2 coordinate x and a conjugate degree-4 pair y, z of
    // one discriminant, with B = C and A(x − x′) + B((y+z) − (v+w)) = 0.
    if let Some(p0) = (0..3).find(|&i| h[i] == 2) {
        let rest: Vec<usize> = (0..3).filter(|&i| i != p0).collect();
        let (py, pz) = (rest[0], rest[1]);
        if h[py] == 4 && h[pz] == 4 && d[py] == d[pz] && a[py] == a[pz] {
            let x_other = other_roots(ctx, d[p0], &forms[p0])[0].clone();
            let others: Vec<&ComplexBall> = ctx.moduli[&d[py]]
                .iter()
                .filter(|(f, _)| f != &forms[py] && f != &forms[pz])
                .map(|(_, v)| v)
                .collect();
            if others.len() == 2 {
                let pair_sum = vals[py].add(vals[pz]).sub(&others[0].add(others[1]));
                let house2 = ctx.houses[py].add(&ctx.houses[py]);
                let ok = certify_zero_combo(
                    ctx,
                    &[
                        (
                            a[p0].clone(),
                            vals[p0].sub(&x_other),
                            ctx.houses[p0].add(&ctx.houses[p0]),
                        ),
                        (a[py].clone(), pair_sum, house2.add(&house2)),
                    ],
                );
                if ok {
                    return Some(5);
                }
            }
        }
    }
    None
}

/// Decides whether some rational relation `Ax + By + Cz ∈ Q` with
/// `A, B, C ≠ 0` holds for pairwise-distinct roots `x, y, z` of the three
/// discriminants, iterating over admissible root triples. Triples whose
/// discriminants share one fundamental discriminant are grouped into
/// simultaneous conjugation orbits and decided through determinant rank
/// analysis plus certified null-space reconstruction; mixed-field triples
/// pin the coordinate of maximal class number to its dominant root (the
/// verdict is conjugation-invariant) and rely on the lattice search, with
/// eliminations labeled heuristic at the configured bound and precision.
pub fn check_triple(
    delta_x: i64,
    delta_y: i64,
    delta_z: i64,
    cfg: &CheckConfig,
) -> Result<TripleReport> {
    let start = Instant::now();
    let discs = [delta_x, delta_y, delta_z];
    for &d in &discs {
        if !is_discriminant(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
    }
    let class_numbers = [
        class_number(delta_x)?,
        class_number(delta_y)?,
        class_number(delta_z)?,
    ];
    // A containing Galois field: the common ring class field for one family,
    // otherwise the compositum of the three fields (degree at most the
    // product, doubled for the quadratic base).
    let degree_bound = match family_degree(&discs)? {
        Some(d) => d,
        None => 2 * class_numbers.iter().product::<u64>(),
    };
    let mut moduli = BTreeMap::new();
    for &d in &discs {
        if let std::collections::btree_map::Entry::Vacant(e) = moduli.entry(d) {
            let list: Vec<(QuadForm, ComplexBall)> = all_singular_moduli(d, cfg.bits)?
                .into_iter()
                .map(|sm| (sm.form().clone(), sm.value().clone()))
                .collect();
            e.insert(list);
        }
    }
    let houses = [
        house_bound(delta_x, cfg.bits)?,
        house_bound(delta_y, cfg.bits)?,
        house_bound(delta_z, cfg.bits)?,
    ];
    let ctx = TripleContext {
        discs,
        class_numbers,
        degree_bound,
        houses,
        moduli,
        cfg: cfg.clone(),
    };

    let fund: Result<Vec<i64>> = discs
        .iter()
        .map(|&d| Ok(fundamental_decomposition(d)?.0))
        .collect();
    let fund = fund?;
    let same_field_family = fund[0] == fund[1] && fund[1] == fund[2];

    // Job list: representative forms plus the conjugate rows they share.
    let mut jobs: Vec<([QuadForm; 3], Vec<[ComplexBall; 4]>)> = Vec::new();
    let forms: Vec<Vec<QuadForm>> = discs
        .iter()
        .map(|&d| ctx.moduli[&d].iter().map(|(f, _)| f.clone()).collect())
        .collect();
    let coordinate_clash =
        |fx: &QuadForm, fy: &QuadForm, i: usize, j: usize| discs[i] == discs[j] && fx == fy;

    if same_field_family {
        let mut seen: std::collections::BTreeSet<[QuadForm; 3]> =
            std::collections::BTreeSet::new();
        for fx in &forms[0] {
            for fy in &forms[1] {
                if coordinate_clash(fx, fy, 0, 1) {
                    continue;
                }
                for fz in &forms[2] {
                    if coordinate_clash(fx, fz, 0, 2) || coordinate_clash(fy, fz, 1, 2) {
                        continue;
                    }
                    let key = [fx.clone(), fy.clone(), fz.clone()];
                    if seen.contains(&key) {
                        continue;
                    }
                    let base = (
                        FormClass::from_form(discs[0], fx.clone())?,
                        FormClass::from_form(discs[1], fy.clone())?,
                        FormClass::from_form(discs[2], fz.clone())?,
                    );
                    let orbit = galois_orbit_triples(&base)?;
                    let mut rows = Vec::with_capacity(orbit.len());
                    for (cx, cy, cz) in &orbit {
                        let triple = [
                            cx.representative().clone(),
                            cy.representative().clone(),
                            cz.representative().clone(),
                        ];
                        rows.push(ctx.row_for(&[&triple[0], &triple[1], &triple[2]]));
                        seen.insert(triple);
                    }
                    let rep = [
                        orbit[0].0.representative().clone(),
                        orbit[0].1.representative().clone(),
                        orbit[0].2.representative().clone(),
                    ];
                    jobs.push((rep, rows));
                }
            }
        }
    } else {
        // Pin the coordinate of maximal class number to its dominant root.
        let pinned = (0..3)
            .max_by_key(|&i| (class_numbers[i], std::cmp::Reverse(i)))
            .unwrap();
        let choices: Vec<Vec<QuadForm>> = (0..3)
            .map(|i| {
                if i == pinned {
                    vec![forms[i][0].clone()]
                } else {
                    forms[i].clone()
                }
            })
            .collect();
        for fx in &choices[0] {
            for fy in &choices[1] {
                if coordinate_clash(fx, fy, 0, 1) {
                    continue;
                }
                for fz in &choices[2] {
                    if coordinate_clash(fx, fz, 0, 2) || coordinate_clash(fy, fz, 1, 2) {
                        continue;
                    }
                    let rep = [fx.clone(), fy.clone(), fz.clone()];
                    let rows = vec![ctx.row_for(&[fx, fy, fz])];
                    jobs.push((rep, rows));
                }
            }
        }
    }

    let mut outcomes: Vec<RootOutcome> = jobs
        .into_par_iter()
        .map(|(rep, rows)| decide_root_triple(&ctx, rep, rows))
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by(|p, q| {
        (&p.forms[0], &p.forms[1], &p.forms[2]).cmp(&(&q.forms[0], &q.forms[1], &q.forms[2]))
    });

    let witnesses: Vec<Witness> = outcomes.iter().filter_map(|o| o.witness.clone()).collect();
    let status = if outcomes
        .iter()
        .any(|o| o.kind == RootOutcomeKind::RelationFound)
    {
        TripleStatus::RelationFoundCertified
    } else if outcomes
        .iter()
        .any(|o| o.kind == RootOutcomeKind::Indeterminate)
    {
        TripleStatus::Indeterminate
    } else if outcomes
        .iter()
        .any(|o| o.kind == RootOutcomeKind::EliminatedHeuristic)
    {
        TripleStatus::EliminatedHeuristic
    } else {
        TripleStatus::EliminatedCertified
    };

    Ok(TripleReport {
        triple: discs,
        status,
        witnesses,
        bits: cfg.bits,
        coeff_bound: cfg.coeff_bound.clone(),
        per_root_outcomes: outcomes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Field membership
// ---------------------------------------------------------------------------

/// Result of the power-basis expansion search.
#[derive(Clone, Debug)]
pub enum MembershipOutcome {
    /// Certified coefficients `c₀, ..., c_{h−1}` with `x = Σ c_k y^k`.
    Expansion(Vec<Rational>),
    /// The degree of `x` does not divide the degree of `y`.
    DegreeObstruction,
    /// No expansion within the bound is visible at this precision.
    NotDetected { norm_floor_log2: f64 },
}

/// Searches for a certified expansion of `x` in powers `1, y, ..., y^{h−1}`
/// of a degree-`h` value `y`, given house bounds on the two values.
pub fn membership(
    x: &ComplexBall,
    y: &ComplexBall,
    deg_x: u64,
    deg_y: u64,
    house_x: &RealBall,
    house_y: &RealBall,
    cfg: &CheckConfig,
) -> Result<MembershipOutcome> {
    if deg_x == 0 || deg_y == 0 {
        return Err(Error::OutOfRange("degrees must be positive".into()));
    }
    if deg_y % deg_x != 0 {
        return Ok(MembershipOutcome::DegreeObstruction);
    }
    let h = deg_y as usize;
    let prec = cfg.bits;
    let mut values = Vec::with_capacity(h + 1);
    values.push(ComplexBall::from_i64(prec, 1));
    values.push(x.clone());
    let mut houses = Vec::with_capacity(h + 1);
    houses.push(RealBall::from_i64(prec, 1));
    houses.push(house_x.clone());
    for k in 1..h {
        values.push(y.pow_u64(k as u64));
        houses.push(house_y.pow_u64(k as u64));
    }
    // The combination lives in the compositum of the two fields.
    let degree_bound = deg_x * deg_y;
    let search = relation_search(&values, &cfg.coeff_bound, prec)?;
    for cand in &search.candidates {
        if cand.coefficients()[1].is_zero() {
            continue;
        }
        match liouville_certify(cand, &values, &houses, degree_bound)? {
            CandidateStatus::CertifiedZero => {
                let nx = cand.coefficients()[1].clone();
                // x = −(n₀ + Σ_{k≥1} n_{k+1} y^k) / n₁
                let mut expansion = Vec::with_capacity(h);
                expansion.push(Rational::from((-cand.coefficients()[0].clone(), nx.clone())));
                for k in 1..h {
                    expansion.push(Rational::from((
                        -cand.coefficients()[k + 1].clone(),
                        nx.clone(),
                    )));
                }
                return Ok(MembershipOutcome::Expansion(expansion));
            }
            CandidateStatus::CertifiedNonzero => continue,
            CandidateStatus::Unverified => {
                return Err(Error::Indeterminate(format!(
                    "membership candidate for degrees {deg_x}|{deg_y} did not certify at \
                     {prec} bits"
                )));
            }
        }
    }
    Ok(MembershipOutcome::NotDetected {
        norm_floor_log2: search.norm_floor_log2,
    })
}

// ---------------------------------------------------------------------------
// Power sums
// ---------------------------------------------------------------------------

/// Exact `m`-th power sum of the roots of a monic integer polynomial, by the
/// classical recurrence between power sums and elementary symmetric
/// functions.
pub fn newton_power_sums(poly: &HilbertPoly, m: u64) -> Result<Integer> {
    if m == 0 {
        return Err(Error::OutOfRange("power-sum index must be positive".into()));
    }
    let deg = poly.degree();
    let coeffs = poly.coefficients();
    // e_k = (−1)^k · a_{deg−k} for the monic polynomial Σ a_i z^i.
    let e = |k: usize| -> Integer {
        let v = coeffs[deg - k].clone();
        if k % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let m = m as usize;
    // p_k = Σ_{1≤i<k} (−1)^{i−1} e_i p_{k−i} + (−1)^{k−1} k e_k.
    let mut p: Vec<Integer> = vec![Integer::new(); m + 1];
    for k in 1..=m {
        let mut acc = Integer::new();
        for i in 1..=(k - 1).min(deg) {
            let term = e(i) * &p[k - i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        if k <= deg {
            let term = e(k) * Integer::from(k as u64);
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p[k] = acc;
    }
    Ok(p[m].clone())
}

/// Report of the power-sum experiment for one discriminant.
#[derive(Clone, Debug)]
pub struct PowerExperimentReport {
    pub discriminant: i64,
    pub n: usize,
    pub m: u64,
    pub power_sum: Integer,
    pub full_sum_certified: bool,
    /// Proper nonempty subsets of the first `n` moduli, with whether a
    /// certified rational relation with all coefficients nonzero was found
    /// among their `m`-th powers.
    pub subset_relations: Vec<(Vec<usize>, bool)>,
    pub bits: u32,
}

/// Checks that the exact `m`-th power sum matches the certified ball sum over
/// all singular moduli of `Δ`, then searches the proper subsets of the first
/// `n` moduli for rational relations among their `m`-th powers.
pub fn power_relation_experiment(
    delta: i64,
    n: usize,
    m: u64,
    cfg: &CheckConfig,
) -> Result<PowerExperimentReport> {
    let h = class_number(delta)? as usize;
    if n == 0 || n > h {
        return Err(Error::OutOfRange(format!(
            "subset size {n} outside 1..={h} for discriminant {delta}"
        )));
    }
    if n > 12 {
        return Err(Error::OutOfRange(
            "subset enumeration capped at 12 moduli".into(),
        ));
    }
    let poly = hilbert_class_poly(delta)?;
    let power_sum = newton_power_sums(&poly, m)?;
    let moduli = all_singular_moduli(delta, cfg.bits)?;
    let powers: Vec<ComplexBall> = moduli.iter().map(|s| s.value().pow_u64(m)).collect();
    let mut total = ComplexBall::zero(cfg.bits);
    for p in &powers {
        total = total.add(p);
    }
    let full_sum_certified = total.im.contains_zero()
        && total
            .re
            .round_to_integer_certified()
            .map(|v| v == power_sum)
            .unwrap_or(false);

    let house = house_bound(delta, cfg.bits)?.pow_u64(m);
    let degree_bound = 2 * h as u64;
    let mut subset_relations = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize == n {
            continue; // proper subsets only
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut values = vec![ComplexBall::from_i64(cfg.bits, 1)];
        let mut houses = vec![RealBall::from_i64(cfg.bits, 1)];
        for &i in &idx {
            values.push(powers[i].clone());
            houses.push(house.clone());
        }
        let search = relation_search(&values, &cfg.coeff_bound, cfg.bits)?;
        let mut found = false;
        for cand in &search.candidates {
            if cand.coefficients()[1..].iter().any(|c| c.is_zero()) {
                continue;
            }
            if liouville_certify(cand, &values, &houses, degree_bound)?
                == CandidateStatus::CertifiedZero
            {
                found = true;
                break;
            }
        }
        subset_relations.push((idx, found));
    }
    Ok(PowerExperimentReport {
        discriminant: delta,
        n,
        m,
        power_sum,
        full_sum_certified,
        subset_relations,
        bits: cfg.bits,
    })
}

// ---------------------------------------------------------------------------
// Constructing the admissible relations
// ---------------------------------------------------------------------------

/// Inputs for the three constructive shapes.
#[derive(Clone, Debug)]
pub enum CaseInput {
    /// Shape 2: rational `x`, coordinates `y, z` of class number 2 in one
    /// real quadratic field.
    Two { x_disc: i64, y_disc: i64, z_disc: i64 },
    /// Shape 3: all of class number 2 in one field, with `B, C` given.
    Three {
        x_disc: i64,
        y_disc: i64,
        z_disc: i64,
        b: Rational,
        c: Rational,
    },
    /// Shape 5: `x` of class number 2 inside the quartic field of a
    /// conjugate pair `y, z` of one class-number-4 discriminant.
    Five { x_disc: i64, yz_disc: i64 },
}

/// A constructed relation `Ax + By + Cz = rhs` with its certified
/// cleared-denominator witness on `(1, x, y, z)`.
#[derive(Clone, Debug)]
pub struct CaseRelation {
    pub case: u8,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub rhs: Rational,
    pub forms: [QuadForm; 3],
    pub witness: RelationCandidate,
}

fn moduli_list(delta: i64, bits: u32) -> Result<Vec<(QuadForm, ComplexBall)>> {
    Ok(all_singular_moduli(delta, bits)?
        .into_iter()
        .map(|sm| (sm.form().clone(), sm.value().clone()))
        .collect())
}

/// Recognizes a certified rational `p/q` (with `q > 0`) from the ratio
/// `numer/denom` of two nonzero algebraic-integer balls, by a two-value
/// lattice search followed by certification of `q·numer − p·denom = 0`.
fn rationalize_ratio(
    numer: &ComplexBall,
    denom: &ComplexBall,
    houses: (&RealBall, &RealBall),
    degree_bound: u64,
    cfg: &CheckConfig,
) -> Result<Option<(Integer, Integer)>> {
    let prec = cfg.bits;
    let values = vec![
        ComplexBall::from_i64(prec, 1),
        numer.clone(),
        denom.clone(),
    ];
    let houses = vec![
        RealBall::from_i64(prec, 1),
        houses.0.clone(),
        houses.1.clone(),
    ];
    let search = relation_search(&values, &cfg.coeff_bound, prec)?;
    for cand in &search.candidates {
        let c = cand.coefficients();
        if !c[0].is_zero() || c[1].is_zero() || c[2].is_zero() {
            continue;
        }
        if liouville_certify(cand, &values, &houses, degree_bound)?
            == CandidateStatus::CertifiedZero
        {
            // c₁·numer + c₂·denom = 0 ⟹ numer/denom = −c₂/c₁.
            let mut p = -c[2].clone();
            let mut q = c[1].clone();
            if q.is_negative() {
                p = -p;
                q = -q;
            }
            return Ok(Some((p, q)));
        }
    }
    Ok(None)
}

/// Certified integer value of a combination ball, re-certifying the final
/// identity `combination − value = 0` through the norm bound.
fn certified_integer(
    value: &ComplexBall,
    witness_values: &[ComplexBall],
    witness_coeffs: Vec<Integer>,
    houses: &[RealBall],
    degree_bound: u64,
) -> Result<Integer> {
    let t = value
        .re
        .round_to_integer_certified()
        .filter(|_| value.im.contains_zero())
        .ok_or_else(|| {
            Error::Indeterminate("rational part of the relation did not certify".into())
        })?;
    let mut coeffs = witness_coeffs;
    coeffs[0] -= &t;
    let cand = RelationCandidate::new(coeffs)?;
    match liouville_certify(&cand, witness_values, houses, degree_bound)? {
        CandidateStatus::CertifiedZero => Ok(t),
        _ => Err(Error::Indeterminate(
            "constructed relation failed its final certification".into(),
        )),
    }
}

/// Builds the relation attached to one of the constructive shapes (2, 3, 5),
/// certifying rationality of the coefficient ratios and the final identity.
pub fn build_case_relation(input: &CaseInput, cfg: &CheckConfig) -> Result<CaseRelation> {
    let prec = cfg.bits;
    let one = ComplexBall::from_i64(prec, 1);
    let one_house = RealBall::from_i64(prec, 1);
    match input {
        CaseInput::Two {
            x_disc,
            y_disc,
            z_disc,
        } => {
            if class_number(*x_disc)? != 1 {
                return Err(Error::OutOfRange(format!(
                    "x-discriminant {x_disc} must have class number 1"
                )));
            }
            if class_number(*y_disc)? != 2 || class_number(*z_disc)? != 2 {
                return Err(Error::OutOfRange(
                    "y- and z-discriminants must have class number 2".into(),
                ));
            }
            if !same_quadratic_field(*y_disc, *z_disc)? {
                return Err(Error::OutOfRange(
                    "y and z must generate one quadratic field".into(),
                ));
            }
            let xs = moduli_list(*x_disc, prec)?;
            let ys = moduli_list(*y_disc, prec)?;
            let zs = moduli_list(*z_disc, prec)?;
            let (fx, x) = &xs[0];
            // For equal discriminants take the two distinct roots; the
            // conjugate of each is then the other.
            let (yi, zi) = if y_disc == z_disc { (0usize, 1usize) } else { (0, 0) };
            let (fy, y) = &ys[yi];
            let (fz, z) = &zs[zi];
            let y_other = &ys[1 - yi].1;
            let z_other = if y_disc == z_disc { &ys[yi].1 } else { &zs[1].1 };
            let dy = y.sub(y_other);
            let dz = z.sub(z_other);
            let hy = house_bound(*y_disc, prec)?;
            let hz = house_bound(*z_disc, prec)?;
            let h2y = hy.add(&hy);
            let h2z = hz.add(&hz);
            let Some((p, q)) = rationalize_ratio(&dy, &dz, (&h2y, &h2z), 8, cfg)? else {
                return Err(Error::Indeterminate(
                    "conjugate-difference ratio did not certify as rational".into(),
                ));
            };
            // dy/dz = p/q, so B(y−y′) + C(z−z′) = 0 for (B, C) = (q, −p).
            let b_int = q.clone();
            let c_int = -p.clone();
            let hx = house_bound(*x_disc, prec)?;
            let witness_values = vec![one.clone(), x.clone(), y.clone(), z.clone()];
            let houses = vec![one_house.clone(), hx, hy, hz];
            let combo = x
                .add(&y.mul_real(&RealBall::from_integer(prec, &b_int)))
                .add(&z.mul_real(&RealBall::from_integer(prec, &c_int)));
            let rhs_int = certified_integer(
                &combo,
                &witness_values,
                vec![
                    Integer::new(),
                    Integer::from(1),
                    b_int.clone(),
                    c_int.clone(),
                ],
                &houses,
                16,
            )?;
            let witness = RelationCandidate::new(vec![
                -rhs_int.clone(),
                Integer::from(1),
                b_int.clone(),
                c_int.clone(),
            ])?
            .with_status(CandidateStatus::CertifiedZero);
            Ok(CaseRelation {
                case: 2,
                a: Rational::from(1),
                b: Rational::from(b_int),
                c: Rational::from(c_int),
                rhs: Rational::from(rhs_int),
                forms: [fx.clone(), fy.clone(), fz.clone()],
                witness,
            })
        }
        CaseInput::Three {
            x_disc,
            y_disc,
            z_disc,
            b,
            c,
        } => {
            for d in [x_disc, y_disc, z_disc] {
                if class_number(*d)? != 2 {
                    return Err(Error::OutOfRange(format!(
                        "discriminant {d} must have class number 2"
                    )));
                }
            }
            if !(same_quadratic_field(*x_disc, *y_disc)?
                && same_quadratic_field(*x_disc, *z_disc)?)
            {
                return Err(Error::OutOfRange(
                    "all three values must generate one quadratic field".into(),
                ));
            }
            if *b == 0 || *c == 0 {
                return Err(Error::OutOfRange("B and C must be nonzero".into()));
            }
            if x_disc == y_disc && y_disc == z_disc {
                return Err(Error::OutOfRange(
                    "three equal discriminants admit only two distinct roots".into(),
                ));
            }
            // Canonical pairwise-distinct roots even when discriminants repeat.
            let xs = moduli_list(*x_disc, prec)?;
            let ys = moduli_list(*y_disc, prec)?;
            let zs = moduli_list(*z_disc, prec)?;
            let xi = 0usize;
            let yi = if y_disc == x_disc { 1 } else { 0 };
            let zi = if z_disc == x_disc || z_disc == y_disc { 1 } else { 0 };
            let (fx, x) = &xs[xi];
            let (fy, y) = &ys[yi];
            let (fz, z) = &zs[zi];
            let dx = x.sub(&xs[1 - xi].1);
            let dy = y.sub(&ys[1 - yi].1);
            let dz = z.sub(&zs[1 - zi].1);
            let hx = house_bound(*x_disc, prec)?;
            let hy = house_bound(*y_disc, prec)?;
            let hz = house_bound(*z_disc, prec)?;
            // numer = B(y−y′) + C(z−z′), scaled to integer coefficients.
            let denom_bc = Integer::from(b.denom().lcm_ref(c.denom()));
            let b_sc = Integer::from(b.numer() * &(denom_bc.clone() / b.denom()));
            let c_sc = Integer::from(c.numer() * &(denom_bc.clone() / c.denom()));
            let numer = dy
                .mul_real(&RealBall::from_integer(prec, &b_sc))
                .add(&dz.mul_real(&RealBall::from_integer(prec, &c_sc)));
            let numer_house = hy
                .add(&hy)
                .mul(&RealBall::from_integer(prec, &Integer::from(b_sc.abs_ref())))
                .add(
                    &hz.add(&hz)
                        .mul(&RealBall::from_integer(prec, &Integer::from(c_sc.abs_ref()))),
                );
            let Some((p, q)) =
                rationalize_ratio(&numer, &dx, (&numer_house, &hx.add(&hx)), 16, cfg)?
            else {
                return Err(Error::Indeterminate(
                    "coefficient ratio did not certify as rational".into(),
                ));
            };
            // numer + A·denom_bc·dx = 0 with numer/dx = p/q: A = −p/(q·denom_bc).
            let a = -Rational::from((p, Integer::from(&q * &denom_bc)));
            // rhs = Ax + By + Cz: clear denominators and certify integrality.
            let l = Integer::from(a.denom().lcm_ref(&denom_bc));
            let a_sc = Integer::from(a.numer() * &(l.clone() / a.denom()));
            let b_l = Integer::from(b.numer() * &(l.clone() / b.denom()));
            let c_l = Integer::from(c.numer() * &(l.clone() / c.denom()));
            let combo = x
                .mul_real(&RealBall::from_integer(prec, &a_sc))
                .add(&y.mul_real(&RealBall::from_integer(prec, &b_l)))
                .add(&z.mul_real(&RealBall::from_integer(prec, &c_l)));
            let witness_values = vec![one.clone(), x.clone(), y.clone(), z.clone()];
            let houses = vec![one_house.clone(), hx, hy, hz];
            let scaled_rhs = certified_integer(
                &combo,
                &witness_values,
                vec![Integer::new(), a_sc.clone(), b_l.clone(), c_l.clone()],
                &houses,
                16,
            )?;
            let rhs = Rational::from((scaled_rhs.clone(), l.clone()));
            let witness = RelationCandidate::new(vec![-scaled_rhs, a_sc, b_l, c_l])?
                .with_status(CandidateStatus::CertifiedZero);
            Ok(CaseRelation {
                case: 3,
                a,
                b: b.clone(),
                c: c.clone(),
                rhs,
                forms: [fx.clone(), fy.clone(), fz.clone()],
                witness,
            })
        }
        CaseInput::Five { x_disc, yz_disc } => {
            if class_number(*x_disc)? != 2 {
                return Err(Error::OutOfRange(format!(
                    "x-discriminant {x_disc} must have class number 2"
                )));
            }
            if class_number(*yz_disc)? != 4 {
                return Err(Error::OutOfRange(format!(
                    "y/z-discriminant {yz_disc} must have class number 4"
                )));
            }
            let xs = moduli_list(*x_disc, prec)?;
            let rs = moduli_list(*yz_disc, prec)?;
            let (fx, x) = &xs[0];
            let dx = x.sub(&xs[1].1);
            let hx = house_bound(*x_disc, prec)?;
            let hr = house_bound(*yz_disc, prec)?;
            let h2x = hx.add(&hx);
            let h4r = hr.add(&hr).add(&hr.add(&hr));
            // Tower instances live in the quartic ring class field; mixed
            // fundamental discriminants fall back to the compositum bound.
            let degree_bound = family_degree(&[*x_disc, *yz_disc])?.unwrap_or(32);
            for (iy, iz) in [(0usize, 1usize), (0, 2), (0, 3)] {
                let rest: Vec<usize> = (0..4).filter(|&i| i != iy && i != iz).collect();
                let pair_sum = rs[iy]
                    .1
                    .add(&rs[iz].1)
                    .sub(&rs[rest[0]].1.add(&rs[rest[1]].1));
                let Some((p, q)) =
                    rationalize_ratio(&pair_sum, &dx, (&h4r, &h2x), degree_bound, cfg)?
                else {
                    continue;
                };
                // ((y+z)−(v+w))/(x−x′) = p/q and A/B = −p/q: A = −p, B = C = q.
                let a_int = -p.clone();
                let b_int = q.clone();
                if a_int.is_zero() {
                    continue;
                }
                let (fy, y) = &rs[iy];
                let (fz, z) = &rs[iz];
                let combo = x
                    .mul_real(&RealBall::from_integer(prec, &a_int))
                    .add(&y.add(z).mul_real(&RealBall::from_integer(prec, &b_int)));
                let witness_values = vec![one.clone(), x.clone(), y.clone(), z.clone()];
                let houses = vec![one_house.clone(), hx.clone(), hr.clone(), hr.clone()];
                let rhs_int = certified_integer(
                    &combo,
                    &witness_values,
                    vec![Integer::new(), a_int.clone(), b_int.clone(), b_int.clone()],
                    &houses,
                    degree_bound,
                )?;
                let witness = RelationCandidate::new(vec![
                    -rhs_int.clone(),
                    a_int.clone(),
                    b_int.clone(),
                    b_int.clone(),
                ])?
                .with_status(CandidateStatus::CertifiedZero);
                return Ok(CaseRelation {
                    case: 5,
                    a: Rational::from(a_int),
                    b: Rational::from(b_int.clone()),
                    c: Rational::from(b_int),
                    rhs: Rational::from(rhs_int),
                    forms: [fx.clone(), fy.clone(), fz.clone()],
                    witness,
                });
            }
            Err(Error::Indeterminate(format!(
                "no conjugate pairing of {yz_disc} gives a rational ratio against {x_disc}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::singular_modulus;
    use crate::quadforms::reduced_forms;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::ops::Pow;

    fn test_cfg(bits: u32) -> CheckConfig {
        CheckConfig {
            bits,
            coeff_bound: Integer::from(1) << 64u32,
        }
    }

    fn dominant_value(delta: i64, bits: u32) -> ComplexBall {
        let forms = reduced_forms(delta).unwrap();
        singular_modulus(&forms[0], bits).unwrap().value().clone()
    }

    #[test]
    fn lll_small_examples() {
        let id: Vec<Vec<Integer>> = (0..3)
            .map(|i| (0..3).map(|j| Integer::from((i == j) as i64)).collect())
            .collect();
        assert_eq!(lll_reduce(&id).unwrap(), id);

        let skew = vec![
            vec![Integer::from(1), Integer::from(1_000_000)],
            vec![Integer::from(0), Integer::from(1)],
        ];
        let red = lll_reduce(&skew).unwrap();
        let norm_sq: Integer = red[0].iter().map(|x| Integer::from(x * x)).sum();
        assert!(norm_sq <= 2);

        let gauss = vec![
            vec![Integer::from(2), Integer::from(0)],
            vec![Integer::from(1), Integer::from(2)],
        ];
        let red = lll_reduce(&gauss).unwrap();
        let norm_sq: Integer = red[0].iter().map(|x| Integer::from(x * x)).sum();
        // brute-force shortest nonzero vector over small coefficients
        let mut best = Integer::from(u64::MAX);
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                if a == 0 && b == 0 {
                    continue;
                }
                let v0 = 2 * a + b;
                let v1 = 2 * b;
                let n = Integer::from(v0 * v0 + v1 * v1);
                if n < best {
                    best = n;
                }
            }
        }
        assert_eq!(best, 4);
        assert_eq!(norm_sq, best);
    }

    fn rational_det(m: &[Vec<Integer>]) -> Rational {
        let n = m.len();
        let mut a: Vec<Vec<Rational>> = m
            .iter()
            .map(|row| row.iter().map(Rational::from).collect())
            .collect();
        let mut det = Rational::from(1);
        for i in 0..n {
            let Some(p) = (i..n).find(|&r| a[r][i] != 0) else {
                return Rational::new();
            };
            if p != i {
                a.swap(p, i);
                det = -det;
            }
            det *= a[i][i].clone();
            let inv = Rational::from(1) / a[i][i].clone();
            for r in i + 1..n {
                let f = Rational::from(&a[r][i] * &inv);
                for c in i..n {
                    let t = Rational::from(&f * &a[i][c]);
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    fn solve_rational(basis: &[Vec<Integer>], target: &[Integer]) -> Vec<Rational> {
        // Solve x·basis = target by elimination on the transpose.
        let n = basis.len();
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|c| {
                let mut row: Vec<Rational> =
                    (0..n).map(|r| Rational::from(&basis[r][c])).collect();
                row.push(Rational::from(&target[c]));
                row
            })
            .collect();
        for i in 0..n {
            let p = (i..n).find(|&r| a[r][i] != 0).expect("invertible");
            a.swap(p, i);
            let inv = Rational::from(1) / a[i][i].clone();
            for c in i..=n {
                let t = Rational::from(&a[i][c] * &inv);
                a[i][c] = t;
            }
            for r in 0..n {
                if r != i && a[r][i] != 0 {
                    let f = a[r][i].clone();
                    for c in i..=n {
                        let t = Rational::from(&f * &a[i][c]);
                        a[r][c] -= t;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n].clone()).collect()
    }

    #[test]
    fn lll_preserves_random_lattices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 3, 4] {
            for _ in 0..6 {
                let basis: Vec<Vec<Integer>> = (0..dim)
                    .map(|_| {
                        (0..dim)
                            .map(|_| Integer::from(rng.gen_range(-50i64..=50)))
                            .collect()
                    })
                    .collect();
                let det = rational_det(&basis);
                if det == 0 {
                    continue;
                }
                let red = lll_reduce(&basis).unwrap();
                assert_eq!(rational_det(&red).abs(), det.clone().abs());
                // each reduced row has integer coordinates in the input basis
                for row in &red {
                    let sol = solve_rational(&basis, row);
                    assert!(sol.iter().all(|x| x.is_integer()));
                }
            }
        }
    }

    #[test]
    fn find_relation_examples() {
        let bits = 768;
        let one = ComplexBall::from_i64(bits, 1);
        let j_i = dominant_value(-4, bits);
        match find_relation(&[one.clone(), j_i], &Integer::from(1u64 << 32), bits).unwrap() {
            FindRelationOutcome::Found(c) => {
                assert_eq!(c.coefficients(), &[Integer::from(-1728), Integer::from(1)]);
            }
            other => panic!("expected a relation, got {other:?}"),
        }

        let x15 = dominant_value(-15, bits);
        match find_relation(&[one.clone(), x15], &Integer::from(1_000_000), bits).unwrap() {
            FindRelationOutcome::NotFound { norm_floor_log2 } => {
                assert!(norm_floor_log2 > 20.0, "floor {norm_floor_log2}");
            }
            other => panic!("expected no relation, got {other:?}"),
        }

        let zero = ComplexBall::zero(bits);
        match find_relation(&[one, zero], &Integer::from(100), bits).unwrap() {
            FindRelationOutcome::Found(c) => {
                assert_eq!(c.coefficients(), &[Integer::new(), Integer::from(1)]);
            }
            other => panic!("expected the trivial relation, got {other:?}"),
        }
    }

    #[test]
    fn liouville_examples() {
        let bits = 512;
        let x = dominant_value(-7, bits);
        let one = ComplexBall::from_i64(bits, 1);
        let houses = [RealBall::from_i64(bits, 1), house_bound(-7, bits).unwrap()];
        let zero_cand =
            RelationCandidate::new(vec![Integer::from(3375), Integer::from(1)]).unwrap();
        assert_eq!(
            liouville_certify(&zero_cand, &[one.clone(), x.clone()], &houses, 1).unwrap(),
            CandidateStatus::CertifiedZero
        );
        let nonzero =
            RelationCandidate::new(vec![Integer::from(-1728), Integer::from(1)]).unwrap();
        assert_eq!(
            liouville_certify(&nonzero, &[one, x], &houses, 1).unwrap(),
            CandidateStatus::CertifiedNonzero
        );
        assert!(RelationCandidate::new(vec![Integer::new(), Integer::new()]).is_err());
    }

    fn orbit_rows(
        base: (i64, &QuadForm, i64, &QuadForm, i64, &QuadForm),
        bits: u32,
    ) -> Vec<[ComplexBall; 4]> {
        let (dx, fx, dy, fy, dz, fz) = base;
        let orbit = galois_orbit_triples(&(
            FormClass::from_form(dx, fx.clone()).unwrap(),
            FormClass::from_form(dy, fy.clone()).unwrap(),
            FormClass::from_form(dz, fz.clone()).unwrap(),
        ))
        .unwrap();
        orbit
            .iter()
            .map(|(cx, cy, cz)| {
                [
                    ComplexBall::from_i64(bits, 1),
                    singular_modulus(cx.representative(), bits)
                        .unwrap()
                        .value()
                        .clone(),
                    singular_modulus(cy.representative(), bits)
                        .unwrap()
                        .value()
                        .clone(),
                    singular_modulus(cz.representative(), bits)
                        .unwrap()
                        .value()
                        .clone(),
                ]
            })
            .collect()
    }

    #[test]
    fn rank4_examples() {
        let bits = 320;
        // Mixed discriminants in one field family: the conjugate matrix has
        // full rank, certifying that no relation exists.
        let f23 = reduced_forms(-23).unwrap();
        let f92 = reduced_forms(-92).unwrap();
        let rows = orbit_rows((-23, &f23[0], -92, &f92[1], -92, &f92[2]), bits);
        assert!(rows.len() >= 4, "orbit size {}", rows.len());
        assert_eq!(rank4_certify(&rows).unwrap(), Rank4Outcome::NoRelation);

        // Duplicated rows are consistent with vanishing everywhere.
        let dup = vec![
            rows[0].clone(),
            rows[0].clone(),
            rows[0].clone(),
            rows[0].clone(),
        ];
        assert_eq!(rank4_certify(&dup).unwrap(), Rank4Outcome::AllMinorsVanish);

        // Every row of the full conjugate orbit of one class-number-3
        // discriminant lists the same three roots, so the trace relation
        // x + y + z = p₁ makes every 4×4 determinant vanish.
        let rel_rows = orbit_rows((-23, &f23[0], -23, &f23[1], -23, &f23[2]), bits);
        assert!(rel_rows.len() >= 4);
        assert_eq!(
            rank4_certify(&rel_rows).unwrap(),
            Rank4Outcome::AllMinorsVanish
        );
    }

    #[test]
    fn check_triple_positive_controls() {
        let cfg = CheckConfig {
            bits: 2048,
            coeff_bound: Integer::from(1) << 96u32,
        };
        let report = check_triple(-4, -15, -15, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::RelationFoundCertified);
        let w = &report.witnesses[0];
        assert_eq!(
            w.coefficients,
            vec![
                Integer::from(189297),
                Integer::from(1),
                Integer::from(1),
                Integer::from(1)
            ]
        );
        assert_eq!(w.case_shape, Some(2));

        let report = check_triple(-23, -23, -23, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::RelationFoundCertified);
        let w = &report.witnesses[0];
        assert_eq!(w.coefficients[1], w.coefficients[2]);
        assert_eq!(w.coefficients[2], w.coefficients[3]);
        assert_eq!(w.coefficients[0], Integer::from(3491750));
        assert_eq!(w.case_shape, Some(4));
    }

    #[test]
    fn check_triple_case_one_and_three() {
        let cfg = test_cfg(1024);
        let report = check_triple(-3, -12, -27, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::RelationFoundCertified);
        assert_eq!(report.witnesses[0].case_shape, Some(1));

        let report = check_triple(-15, -60, -60, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::RelationFoundCertified);
        assert_eq!(report.witnesses[0].case_shape, Some(3));
    }

    #[test]
    fn check_triple_eliminations() {
        let cfg = test_cfg(1024);
        let report = check_triple(-15, -15, -23, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::EliminatedHeuristic);
        assert!(report.witnesses.is_empty());
        assert!(report
            .per_root_outcomes
            .iter()
            .all(|o| o.norm_floor_log2.is_some()));

        let report = check_triple(-23, -92, -92, &cfg).unwrap();
        assert_eq!(report.status, TripleStatus::EliminatedCertified);
        assert!(report
            .per_root_outcomes
            .iter()
            .all(|o| o.kind == RootOutcomeKind::EliminatedRank));

        let json = report.to_json();
        assert_eq!(json["status"], "eliminated-certified");
        assert_eq!(json["triple"][2], -92);
        assert!(json["parameters"]["coeff_bound"].is_string());
        assert!(json["seconds"].is_number());
    }

    #[test]
    fn membership_examples() {
        let cfg = CheckConfig {
            bits: 2560,
            coeff_bound: Integer::from(1) << 96u32,
        };
        for (dx, dy) in [(-23i64, -92i64), (-31, -124)] {
            let x = dominant_value(dx, cfg.bits);
            let y = dominant_value(dy, cfg.bits);
            let hx = house_bound(dx, cfg.bits).unwrap();
            let hy = house_bound(dy, cfg.bits).unwrap();
            match membership(&x, &y, 3, 3, &hx, &hy, &cfg).unwrap() {
                MembershipOutcome::Expansion(c) => {
                    assert_eq!(c.len(), 3, "expansion length for {dx} in {dy}");
                }
                other => panic!("expected an expansion for ({dx}, {dy}), got {other:?}"),
            }
        }
        let x = dominant_value(-15, cfg.bits);
        let y = dominant_value(-23, cfg.bits);
        let hx = house_bound(-15, cfg.bits).unwrap();
        let hy = house_bound(-23, cfg.bits).unwrap();
        match membership(&x, &y, 2, 3, &hx, &hy, &cfg).unwrap() {
            MembershipOutcome::DegreeObstruction => {}
            other => panic!("expected the degree obstruction, got {other:?}"),
        }
    }

    #[test]
    fn newton_power_sum_examples() {
        let h23 = hilbert_class_poly(-23).unwrap();
        assert_eq!(newton_power_sums(&h23, 1).unwrap(), Integer::from(-3491750));
        let h15 = hilbert_class_poly(-15).unwrap();
        assert_eq!(newton_power_sums(&h15, 1).unwrap(), Integer::from(-191025));
        let h4 = hilbert_class_poly(-4).unwrap();
        for m in 1u64..=4 {
            assert_eq!(
                newton_power_sums(&h4, m).unwrap(),
                Integer::from(1728).pow(m as u32)
            );
        }
        // certified numeric agreement on a small sweep
        let bits = 320;
        for delta in [-23i64, -47, -84, -95] {
            let poly = hilbert_class_poly(delta).unwrap();
            let moduli = all_singular_moduli(delta, bits).unwrap();
            for m in 1u64..=5 {
                let exact = newton_power_sums(&poly, m).unwrap();
                let mut total = ComplexBall::zero(bits);
                for s in &moduli {
                    total = total.add(&s.value().pow_u64(m));
                }
                assert!(total.im.contains_zero());
                assert_eq!(
                    total.re.round_to_integer_certified().unwrap(),
                    exact,
                    "Δ = {delta}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn power_experiment_examples() {
        let cfg = test_cfg(768);
        for m in [1u64, 2] {
            let rep = power_relation_experiment(-15, 2, m, &cfg).unwrap();
            assert!(rep.full_sum_certified, "m = {m}");
            assert_eq!(rep.subset_relations.len(), 2);
            assert!(rep.subset_relations.iter().all(|(_, found)| !found));
        }
        let rep = power_relation_experiment(-23, 3, 1, &cfg).unwrap();
        assert!(rep.full_sum_certified);
        assert_eq!(rep.subset_relations.len(), 6);
        assert!(rep.subset_relations.iter().all(|(_, found)| !found));
    }

    #[test]
    fn build_case_two_and_three() {
        let cfg = test_cfg(1024);
        let rel = build_case_relation(
            &CaseInput::Two {
                x_disc: -4,
                y_disc: -15,
                z_disc: -15,
            },
            &cfg,
        )
        .unwrap();
        assert_eq!(rel.case, 2);
        assert_eq!(rel.a, Rational::from(1));
        assert_eq!(rel.b, Rational::from(1));
        assert_eq!(rel.c, Rational::from(1));
        assert_eq!(rel.rhs, Rational::from(-189297));

        let rel = build_case_relation(
            &CaseInput::Three {
                x_disc: -15,
                y_disc: -15,
                z_disc: -20,
                b: Rational::from(1),
                c: Rational::from(1),
            },
            &cfg,
        )
        .unwrap();
        assert_eq!(rel.case, 3);
        assert_eq!(rel.witness.status(), CandidateStatus::CertifiedZero);
        // Independent check of A: with x, y the two roots of one
        // discriminant taken with B = C = 1, the coefficient satisfies
        // A = 1 ∓ (z − z′)/(x − x′), and the square of the difference ratio
        // is the quotient of the two minimal-polynomial discriminants.
        let d15 = quadratic_poly_disc(-15).unwrap();
        let d20 = quadratic_poly_disc(-20).unwrap();
        let prod = d15.clone() * &d20;
        assert!(prod.is_perfect_square());
        let ratio = Rational::from((prod.sqrt(), d15));
        let expected = [
            Rational::from(1) - ratio.clone(),
            Rational::from(1) + ratio,
        ];
        assert!(
            expected.contains(&rel.a),
            "A = {}, expected one of {expected:?}",
            rel.a
        );
    }

    #[test]
    fn build_case_five_instance() {
        let cfg = test_cfg(1024);
        // search small class-number-4 discriminants for a quartic field
        // containing the quadratic field of a class-number-2 discriminant
        let h4: Vec<i64> = (3..160)
            .map(|n| -n)
            .filter(|&d| is_discriminant(d) && class_number(d).unwrap() == 4)
            .collect();
        let h2: Vec<i64> = (3..80)
            .map(|n| -n)
            .filter(|&d| is_discriminant(d) && class_number(d).unwrap() == 2)
            .collect();
        let mut found = None;
        'outer: for &dy in &h4 {
            for &dx in &h2 {
                if let Ok(rel) =
                    build_case_relation(&CaseInput::Five { x_disc: dx, yz_disc: dy }, &cfg)
                {
                    found = Some((dx, dy, rel));
                    break 'outer;
                }
            }
        }
        let (dx, dy, rel) = found.expect("a small quartic instance exists");
        assert_eq!(rel.case, 5);
        // matching pair coefficients hold by construction
        assert_eq!(rel.b, rel.c);
        assert_ne!(rel.a, 0);
        assert_eq!(rel.witness.status(), CandidateStatus::CertifiedZero);
        assert!(dx < 0 && dy < 0);
    }

    // ----- independent same-field oracle --------------------------------

    /// Certified disks around the roots of the exact minimal polynomial:
    /// plain Newton refinement from coarse seeds, then the classical
    /// `deg·|H(s)/H′(s)|` inclusion disk evaluated with exact coefficients;
    /// pairwise disjointness pins exactly one root per disk.
    fn oracle_roots(delta: i64, bits: u32) -> Vec<ComplexBall> {
        let poly = hilbert_class_poly(delta).unwrap();
        let deg = poly.degree();
        let coarse = all_singular_moduli(delta, 64).unwrap();
        let mut disks = Vec::with_capacity(deg);
        for seed in &coarse {
            let mut re = Float::with_val(bits, seed.value().re.mid());
            let mut im = Float::with_val(bits, seed.value().im.mid());
            for _ in 0..64 {
                let z = ComplexBall::new(
                    RealBall::from_parts(re.clone(), Float::with_val(32, 0)),
                    RealBall::from_parts(im.clone(), Float::with_val(32, 0)),
                );
                let (val, der) = eval_with_derivative(&poly, &z);
                let step = val.div(&der).unwrap();
                let sr = Float::with_val(bits, step.re.mid());
                let si = Float::with_val(bits, step.im.mid());
                let tiny = Float::with_val(32, Float::i_exp(1, -(bits as i32) + 8));
                let done = sr.clone().abs() < tiny && si.clone().abs() < tiny;
                re -= sr;
                im -= si;
                if done {
                    break;
                }
            }
            let z = ComplexBall::new(
                RealBall::from_parts(re.clone(), Float::with_val(32, 0)),
                RealBall::from_parts(im.clone(), Float::with_val(32, 0)),
            );
            let (val, der) = eval_with_derivative(&poly, &z);
            let rho = val
                .abs()
                .mul(&RealBall::from_i64(bits, deg as i64))
                .div(&der.abs())
                .unwrap()
                .upper();
            disks.push(ComplexBall::new(
                RealBall::from_parts(re, rho.clone()),
                RealBall::from_parts(im, rho),
            ));
        }
        for i in 0..disks.len() {
            for j in 0..i {
                let gap = disks[i].sub(&disks[j]).abs();
                assert!(gap.lower() > 0, "oracle disks for {delta} must be disjoint");
            }
        }
        disks
    }

    fn eval_with_derivative(poly: &HilbertPoly, z: &ComplexBall) -> (ComplexBall, ComplexBall) {
        let prec = z.prec();
        let mut val = ComplexBall::zero(prec);
        let mut der = ComplexBall::zero(prec);
        for k in (0..=poly.degree()).rev() {
            let c = ComplexBall::new(
                RealBall::from_integer(prec, poly.coefficient(k)),
                RealBall::zero(prec),
            );
            der = der.mul(z).add(&val);
            val = val.mul(z).add(&c);
        }
        (val, der)
    }

    #[test]
    fn same_field_verdicts_match_polynomial_oracle() {
        let bits = 1024;
        let cfg = test_cfg(bits);
        for (dx, dy, dz) in [(-23i64, -23i64, -23i64), (-23, -92, -92)] {
            let report = check_triple(dx, dy, dz, &cfg).unwrap();
            let oracle: BTreeMap<i64, Vec<ComplexBall>> = [dx, dy, dz]
                .iter()
                .map(|&d| (d, oracle_roots(d, 3300)))
                .collect();
            let path: BTreeMap<i64, Vec<(QuadForm, ComplexBall)>> = [dx, dy, dz]
                .iter()
                .map(|&d| {
                    let list = all_singular_moduli(d, bits)
                        .unwrap()
                        .into_iter()
                        .map(|s| (s.form().clone(), s.value().clone()))
                        .collect();
                    (d, list)
                })
                .collect();
            let matched = |d: i64, form: &QuadForm| -> ComplexBall {
                let target = &path[&d].iter().find(|(f, _)| f == form).unwrap().1;
                oracle[&d]
                    .iter()
                    .find(|o| {
                        let gap = o.sub(target).abs();
                        !(gap.lower() > 0)
                    })
                    .expect("each value matches one oracle disk")
                    .clone()
            };
            for outcome in &report.per_root_outcomes {
                let orbit = galois_orbit_triples(&(
                    FormClass::from_form(dx, outcome.forms[0].clone()).unwrap(),
                    FormClass::from_form(dy, outcome.forms[1].clone()).unwrap(),
                    FormClass::from_form(dz, outcome.forms[2].clone()).unwrap(),
                ))
                .unwrap();
                let rows: Vec<[ComplexBall; 4]> = orbit
                    .iter()
                    .map(|(cx, cy, cz)| {
                        [
                            ComplexBall::from_i64(bits, 1),
                            matched(dx, cx.representative()),
                            matched(dy, cy.representative()),
                            matched(dz, cz.representative()),
                        ]
                    })
                    .collect();
                match outcome.kind {
                    RootOutcomeKind::EliminatedRank => {
                        assert_eq!(
                            rank4_certify(&rows).unwrap(),
                            Rank4Outcome::NoRelation,
                            "oracle must confirm rank elimination for {dx},{dy},{dz}"
                        );
                    }
                    RootOutcomeKind::RelationFound => {
                        assert_eq!(
                            rank4_certify(&rows).unwrap(),
                            Rank4Outcome::AllMinorsVanish,
                            "oracle must see the vanishing minors for {dx},{dy},{dz}"
                        );
                        let w = outcome.witness.as_ref().unwrap();
                        for row in &rows {
                            let theta = combo_ball(row, &w.coefficients);
                            assert!(theta.contains_zero());
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}
