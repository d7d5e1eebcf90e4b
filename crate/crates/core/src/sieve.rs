//! Finite discriminant sieves: enumeration caps for small class numbers,
//! emptiness checks for the shaded cells of the reference grid, the list of
//! index-2 field-containment pairs with certified membership witnesses, and
//! the candidate lists of discriminant triples that feed the elimination run.
//!
//! Everything in this module is exact integer arithmetic except the
//! membership witnesses, which pair genus-character expansions with the
//! certified Liouville machinery of [`crate::relations`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;
use serde_json::json;

use crate::arith::{gcd_i64, kronecker, perfect_sqrt_u64, squarefree_decomposition};
use crate::ball::{ComplexBall, RealBall};
use crate::modular::all_singular_moduli;
use crate::quadforms::{
    class_number, class_number_table, fundamental_decomposition, is_discriminant,
    positive_splittings, rho2, QuadForm,
};
use crate::relations::{
    house_bound, liouville_certify, CandidateStatus, CheckConfig, RelationCandidate,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Enumeration caps
// ---------------------------------------------------------------------------

/// Largest `|Δ| ≤ cap` with `h(Δ) ≤ k`, or `0` if no discriminant below the
/// cap has so small a class number. One batch form count covers the whole
/// range, so the scan is cheap even at `cap ≈ 1.7·10⁵`.
pub fn max_disc_with_class_at_most(k: u64, cap: u64) -> Result<u64> {
    if cap < 3 {
        return Err(Error::OutOfRange(format!(
            "cap {cap} admits no discriminant at all"
        )));
    }
    let table = class_number_table(cap);
    for n in (3..=cap).rev() {
        let h = table[n as usize];
        if h != 0 && u64::from(h) <= k {
            return Ok(n);
        }
    }
    Ok(0)
}

/// Exhaustive check of the two small-discriminant facts used throughout:
/// every discriminant with `|Δ| < 15` has class number 1 (its singular
/// modulus is rational), and every discriminant with `|Δ| < 39` has class
/// number at most 3.
pub fn lemma21_check() -> Result<bool> {
    for n in 3..15i64 {
        if is_discriminant(-n) && class_number(-n)? != 1 {
            return Ok(false);
        }
    }
    for n in 3..39i64 {
        if is_discriminant(-n) && class_number(-n)? > 3 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The conductor-ratio grid on which per-cell caps are tabulated.
const RATIO_GRID: [(i64, i64); 4] = [(3, 2), (2, 1), (3, 1), (4, 1)];

/// Emptiness check for one shaded cell of the reference grid: `true` iff no
/// discriminant satisfies `h(Δ) ≥ k`, `|Δ| ≤ bound`, and — when the
/// conductor ratio `l` is `3/2` — the congruence `Δ ≡ 0, 4 (mod 16)`.
pub fn grey_cell_check(l: (i64, i64), k: u32, bound: u64) -> Result<bool> {
    if !RATIO_GRID.contains(&l) {
        return Err(Error::OutOfRange(format!(
            "conductor ratio {}/{} outside the grid",
            l.0, l.1
        )));
    }
    if bound < 3 {
        return Ok(true);
    }
    let table = class_number_table(bound);
    for n in 3..=bound as i64 {
        let delta = -n;
        if !is_discriminant(delta) {
            continue;
        }
        if l == (3, 2) && ![0, 4].contains(&delta.rem_euclid(16)) {
            continue;
        }
        if u64::from(table[n as usize]) >= u64::from(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Index-2 field containment across different fundamental discriminants
// ---------------------------------------------------------------------------

/// Scan ceiling for every class-group-structure enumeration here: by the
/// small-class caps, `h(Δ) ≤ 32` already forces `|Δ| ≤ 166147`.
pub const PAIR_SCAN_CAP: u64 = 166147;

/// A pair of discriminants with different fundamental discriminants whose
/// singular moduli generate nested fields `Q(x) ⊂ Q(y)` of index 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FieldPair {
    pub dx: i64,
    pub dy: i64,
    pub hx: u64,
    pub hy: u64,
}

/// Square classes `{kernel(d) : d ∈ D⁺(Δ)}` of the positive splittings, as a
/// set of squarefree integers. The positive splittings form a group modulo
/// squares, so the set is closed under products and containment of two such
/// sets is containment of subgroups of `Q^×/(Q^×)²`. For a 2-elementary `Δ`
/// the set cuts out `Q(x)` exactly; for an almost 2-elementary `Δ` it cuts
/// out the maximal multiquadratic subfield of `Q(x)`, which is all that
/// containment questions from a multiquadratic side can see.
fn kernel_classes(delta: i64) -> Result<BTreeSet<i64>> {
    Ok(positive_splittings(delta)?
        .into_iter()
        .map(|d| squarefree_decomposition(d as u64).0 as i64)
        .collect())
}

/// One side of the pair enumeration.
struct FieldSide {
    delta: i64,
    h: u64,
    fund: i64,
    classes: BTreeSet<i64>,
}

fn field_side(delta: i64, h: u64) -> Result<FieldSide> {
    Ok(FieldSide {
        delta,
        h,
        fund: fundamental_decomposition(delta)?.0,
        classes: kernel_classes(delta)?,
    })
}

/// All 2-elementary discriminants with `h_floor ≤ h(Δ) ≤ h_cap` and
/// `|Δ| ≤ PAIR_SCAN_CAP`, with their square classes.
fn two_elementary_sides(h_cap: u64, h_floor: u64) -> Result<Vec<FieldSide>> {
    let table = class_number_table(PAIR_SCAN_CAP);
    let mut out = Vec::new();
    for n in 3..=PAIR_SCAN_CAP {
        let h = u64::from(table[n as usize]);
        if h < h_floor || h > h_cap {
            continue;
        }
        let delta = -(n as i64);
        let r = rho2(delta)?;
        if r < 63 && h == 1u64 << r {
            out.push(field_side(delta, h)?);
        }
    }
    Ok(out)
}

/// All almost-2-elementary discriminants with `h(Δ) ≤ h_cap`,
/// `|Δ| ≤ PAIR_SCAN_CAP`, and `h(Δ)` in the given set.
fn almost_two_elementary_sides(h_cap: u64, wanted: &BTreeSet<u64>) -> Result<Vec<FieldSide>> {
    let table = class_number_table(PAIR_SCAN_CAP);
    let mut out = Vec::new();
    for n in 3..=PAIR_SCAN_CAP {
        let h = u64::from(table[n as usize]);
        if h == 0 || h > h_cap || !wanted.contains(&h) {
            continue;
        }
        let delta = -(n as i64);
        let r = rho2(delta)?;
        if r + 1 < 63 && (1u64 << (r + 1)) % h == 0 {
            out.push(field_side(delta, h)?);
        }
    }
    Ok(out)
}

fn pairs_with_floor(h_floor: u64) -> Result<Vec<FieldPair>> {
    let xs = two_elementary_sides(16, h_floor)?;
    let wanted: BTreeSet<u64> = xs.iter().map(|x| 2 * x.h).collect();
    let ys = almost_two_elementary_sides(32, &wanted)?;
    let mut by_h: BTreeMap<u64, Vec<&FieldSide>> = BTreeMap::new();
    for y in &ys {
        by_h.entry(y.h).or_default().push(y);
    }
    let mut pairs = Vec::new();
    for x in &xs {
        let Some(partners) = by_h.get(&(2 * x.h)) else {
            continue;
        };
        for y in partners {
            if y.fund != x.fund && x.classes.is_subset(&y.classes) {
                pairs.push(FieldPair {
                    dx: x.delta,
                    dy: y.delta,
                    hx: x.h,
                    hy: y.h,
                });
            }
        }
    }
    pairs.sort_unstable_by_key(|p| (p.dx.abs(), p.dy.abs()));
    Ok(pairs)
}

/// All pairs `(Δx, Δy)` for which a singular modulus `x` of `Δx` generates
/// an index-2 subfield of the field of a singular modulus `y` of `Δy`, with
/// the two fundamental discriminants distinct, `cl(Δx)` 2-elementary with
/// `h(Δx) ≤ 16`, and `cl(Δy)` almost 2-elementary with `h(Δy) ≤ 32` (both
/// `|Δ| ≤ 166147`, which the class-number caps force anyway).
///
/// The decision is exact: `Q(x)` is the multiquadratic field cut out by the
/// positive splittings of `Δx`, the maximal multiquadratic subfield of
/// `Q(y)` is cut out by those of `Δy`, and an index-2 containment amounts to
/// `h(Δy) = 2·h(Δx)` together with square-class containment. Certified
/// numeric witnesses for the accepted pairs come from [`pair_witness`].
pub fn difffundsub_pairs() -> Result<Vec<FieldPair>> {
    pairs_with_floor(1)
}

// ---------------------------------------------------------------------------
// Certified membership witnesses
// ---------------------------------------------------------------------------

/// One radical of the expansion basis matched inside the larger field:
/// `radical · partner` is a perfect square (with its exact root recorded),
/// where `partner` is a positive splitting of `Δy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RadicalEmbedding {
    pub radical: i64,
    pub partner: i64,
    pub root: i64,
}

/// Certification state of one membership witness. Indeterminate witnesses
/// are returned to the caller with their reason, never silently dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessState {
    Certified,
    Indeterminate(String),
}

/// A membership witness for one accepted pair: the expansion of the dominant
/// modulus `x` of `Δx` over the radical basis `{1, √d : d ∈ D⁺(Δx)}` of its
/// own field, as a certified-zero integer relation, plus the exact
/// square-root identities embedding each radical among the positive
/// splittings of `Δy`.
#[derive(Clone, Debug)]
pub struct ContainmentWitness {
    pub pair: FieldPair,
    /// Nontrivial positive splittings of `Δx`, ascending: the value list of
    /// the expansion relation is `(1, x, √d₁, ..., √d_{h−1})`.
    pub radicals: Vec<i64>,
    /// Certified-zero relation `n₀ + n₁x + Σ n_i √dᵢ = 0` with `n₁ ≠ 0`.
    pub expansion: Option<RelationCandidate>,
    pub embeddings: Vec<RadicalEmbedding>,
    pub state: WitnessState,
    /// Working precision actually used (at least the configured floor).
    pub bits: u32,
}

impl ContainmentWitness {
    pub fn is_certified(&self) -> bool {
        matches!(self.state, WitnessState::Certified)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "pair": { "dx": self.pair.dx, "dy": self.pair.dy,
                      "hx": self.pair.hx, "hy": self.pair.hy },
            "radicals": self.radicals,
            "expansion": self.expansion.as_ref().map(|c| {
                c.coefficients().iter().map(|n| n.to_string()).collect::<Vec<_>>()
            }),
            "embeddings": self.embeddings,
            "state": match &self.state {
                WitnessState::Certified => "certified".to_string(),
                WitnessState::Indeterminate(why) => format!("indeterminate: {why}"),
            },
            "bits": self.bits,
        })
    }
}

/// Genus character of a form class attached to a splitting `d` of its
/// discriminant: the Kronecker symbol `(d | m)` at any value `m` represented
/// by the form and coprime to `2Δ`. Genus theory makes the symbol
/// independent of the choice of `m`, constant on the class, and equal to the
/// action sign of the corresponding Galois element on `√d`.
fn genus_character(form: &QuadForm, d: i64) -> Result<i32> {
    let modulus = 2 * form.discriminant().abs();
    for u in -8..=8i64 {
        for v in -8..=8i64 {
            if (u, v) == (0, 0) {
                continue;
            }
            let m = form.a * u * u + form.b * u * v + form.c * v * v;
            if gcd_i64(modulus, m) == 1 {
                return Ok(kronecker(d, m));
            }
        }
    }
    Err(Error::Malformed(format!(
        "no value represented by {form} near the origin is coprime to 2Δ"
    )))
}

/// `⌈π√|Δ| / ln 2⌉`: the bit size of the dominant singular modulus.
fn magnitude_bits(delta: i64) -> u32 {
    (std::f64::consts::PI * (-delta as f64).sqrt() / std::f64::consts::LN_2).ceil() as u32 + 8
}

/// Builds the certified membership witness for one accepted pair.
///
/// The expansion coefficients are exact character sums: with `χ_d` the genus
/// character of the splitting `d` and `x^σ` running over the conjugates of
/// `x`, orthogonality gives `h·x = Σ_d (Σ_σ χ_d(σ) x^σ)`, where the inner
/// sum is an integer multiple of `√d` (of a half-integer one when
/// `d ≡ 0 mod 4`). Each inner sum is rounded to its exact integer through a
/// certified ball and the resulting relation is then certified zero by the
/// Liouville gap at degree `h(Δx)`. Certification failure is reported as
/// [`WitnessState::Indeterminate`]; the configured precision acts as a
/// floor, raised automatically when the Liouville threshold demands more.
pub fn pair_witness(pair: &FieldPair, cfg: &CheckConfig) -> Result<ContainmentWitness> {
    let dplus = positive_splittings(pair.dx)?;
    let h = pair.hx;
    if dplus.len() as u64 != h {
        return Err(Error::Malformed(format!(
            "{} is not 2-elementary: {} positive splittings for class number {}",
            pair.dx,
            dplus.len(),
            h
        )));
    }
    let radicals: Vec<i64> = dplus.iter().copied().filter(|&d| d != 1).collect();

    // Liouville needs |θ| < S^{−(h−1)} with S ≈ (h+2)·2·e^{π√|Δx|}; round the
    // budget up generously — evaluation cost grows only linearly in it.
    let mag = magnitude_bits(pair.dx);
    let s_bits = mag + 16;
    let need = (h as u32 - 1).saturating_mul(s_bits) + mag + 256;
    let bits = cfg.bits.max(need);

    let moduli = all_singular_moduli(pair.dx, bits)?;
    let x = moduli
        .iter()
        .find(|m| m.form().is_dominant())
        .ok_or_else(|| Error::Malformed(format!("no dominant form for {}", pair.dx)))?
        .value()
        .clone();

    let fail = |why: String, bits: u32, embeddings: Vec<RadicalEmbedding>| ContainmentWitness {
        pair: *pair,
        radicals: radicals.clone(),
        expansion: None,
        embeddings,
        state: WitnessState::Indeterminate(why),
        bits,
    };

    let embeddings = radical_embeddings(pair, &radicals)?;

    // Trace term: Σ_σ x^σ, certified to an exact integer.
    let mut trace = ComplexBall::zero(bits);
    for m in &moduli {
        trace = trace.add(m.value());
    }
    let Some(two_t1) = trace.re.mul_i64(2).round_to_integer_certified() else {
        return Ok(fail("trace ball too wide to round".into(), bits, embeddings));
    };

    // Character terms: Σ_σ χ_d(σ) x^σ = m_d √d with 2·m_d ∈ Z.
    let mut coeffs = Vec::with_capacity(radicals.len() + 2);
    coeffs.push(-two_t1);
    coeffs.push(Integer::from(2 * h));
    let mut values = Vec::with_capacity(radicals.len() + 2);
    values.push(ComplexBall::from_i64(bits, 1));
    values.push(x);
    let mut houses = Vec::with_capacity(radicals.len() + 2);
    houses.push(RealBall::from_i64(bits, 1));
    houses.push(house_bound(pair.dx, bits)?);
    for &d in &radicals {
        let mut t = ComplexBall::zero(bits);
        for m in &moduli {
            if genus_character(m.form(), d)? >= 0 {
                t = t.add(m.value());
            } else {
                t = t.sub(m.value());
            }
        }
        if !t.im.contains_zero() {
            return Ok(fail(
                format!("character sum for √{d} has nonreal enclosure"),
                bits,
                embeddings,
            ));
        }
        let sqrt_d = RealBall::from_i64(bits, d).sqrt_clamped();
        let Some(two_m) = t
            .re
            .mul_i64(2)
            .div(&sqrt_d)
            .ok()
            .and_then(|b| b.round_to_integer_certified())
        else {
            return Ok(fail(
                format!("character sum for √{d} too wide to round"),
                bits,
                embeddings,
            ));
        };
        coeffs.push(-two_m);
        values.push(ComplexBall::from_real(sqrt_d.clone()));
        houses.push(sqrt_d);
    }

    let cand = RelationCandidate::new(coeffs)?;
    match liouville_certify(&cand, &values, &houses, h)? {
        CandidateStatus::CertifiedZero => Ok(ContainmentWitness {
            pair: *pair,
            radicals,
            expansion: Some(cand.with_status(CandidateStatus::CertifiedZero)),
            embeddings,
            state: WitnessState::Certified,
            bits,
        }),
        status => Ok(fail(
            format!(
                "expansion relation not certified at {bits} bits ({})",
                status.as_str()
            ),
            bits,
            embeddings,
        )),
    }
}

/// Matches each radical of `Δx` with a positive splitting of `Δy` in the
/// same square class and records the exact root of their product.
fn radical_embeddings(pair: &FieldPair, radicals: &[i64]) -> Result<Vec<RadicalEmbedding>> {
    let dplus_y = positive_splittings(pair.dy)?;
    let mut by_kernel = BTreeMap::new();
    for &e in &dplus_y {
        by_kernel.insert(squarefree_decomposition(e as u64).0 as i64, e);
    }
    radicals
        .iter()
        .map(|&d| {
            let kernel = squarefree_decomposition(d as u64).0 as i64;
            let partner = *by_kernel.get(&kernel).ok_or_else(|| {
                Error::Malformed(format!(
                    "square class of {d} missing among the splittings of {}",
                    pair.dy
                ))
            })?;
            let root = perfect_sqrt_u64((d * partner) as u64).ok_or_else(|| {
                Error::Malformed(format!("{d}·{partner} is not a perfect square"))
            })?;
            Ok(RadicalEmbedding {
                radical: d,
                partner,
                root: root as i64,
            })
        })
        .collect()
}

/// Witnesses for a batch of pairs, in input order.
pub fn difffundsub_witnesses(
    pairs: &[FieldPair],
    cfg: &CheckConfig,
) -> Result<Vec<ContainmentWitness>> {
    pairs
        .par_iter()
        .map(|p| pair_witness(p, cfg))
        .collect::<Result<Vec<_>>>()
}

// ---------------------------------------------------------------------------
// Equal-field table (user-supplied, regenerable)
// ---------------------------------------------------------------------------

/// One row of the equal-field table: two discriminants with different
/// fundamental discriminants whose singular moduli generate one and the same
/// field, labeled by that field's canonical radical generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Abm15Row {
    pub dx: i64,
    pub dy: i64,
    pub label: String,
}

/// The equal-field pair table consumed by the candidate lists. The published
/// version of this table is external data the repository does not ship;
/// [`Abm15Table::load`] validates a user-supplied CSV
/// (columns `dx,dy,label`), and [`Abm15Table::generate`] recomputes an
/// equivalent list from genus theory: all pairs of 2-elementary
/// discriminants (`h ≤ 16`, `|Δ| ≤ 166147`) with different fundamental
/// discriminants and identical square-class groups.
#[derive(Clone, Debug, Default)]
pub struct Abm15Table {
    pub rows: Vec<Abm15Row>,
}

/// Canonical label of a multiquadratic field given its full square-class
/// set: a greedy minimal generator list over ascending kernels.
fn field_label(classes: &BTreeSet<i64>) -> String {
    let mut spanned: BTreeSet<i64> = BTreeSet::new();
    spanned.insert(1);
    let mut gens = Vec::new();
    for &k in classes {
        if k == 1 || spanned.contains(&k) {
            continue;
        }
        let closure: Vec<i64> = spanned
            .iter()
            .map(|&s| squarefree_decomposition((s * k) as u64).0 as i64)
            .collect();
        spanned.extend(closure);
        gens.push(k);
    }
    if gens.is_empty() {
        "Q".to_string()
    } else {
        let parts: Vec<String> = gens.iter().map(|g| format!("sqrt{g}")).collect();
        format!("Q({})", parts.join("+"))
    }
}

impl Abm15Table {
    /// Recomputes the table contents: every unordered pair of 2-elementary
    /// discriminants with equal square-class groups of rank ≥ 1 and
    /// different fundamental discriminants, one row per pair, ordered by
    /// label and then by the pair.
    pub fn generate() -> Result<Self> {
        let sides = two_elementary_sides(16, 2)?;
        let mut groups: BTreeMap<Vec<i64>, Vec<&FieldSide>> = BTreeMap::new();
        for side in &sides {
            groups
                .entry(side.classes.iter().copied().collect())
                .or_default()
                .push(side);
        }
        let mut rows = Vec::new();
        for (key, members) in &groups {
            if members.len() < 2 {
                continue;
            }
            let label = field_label(&key.iter().copied().collect());
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let (a, b) = (members[i], members[j]);
                    if a.fund == b.fund {
                        continue;
                    }
                    rows.push(Abm15Row {
                        dx: a.delta,
                        dy: b.delta,
                        label: label.clone(),
                    });
                }
            }
        }
        rows.sort_by(|r, s| (&r.label, r.dx.abs(), r.dy.abs()).cmp(&(&s.label, s.dx.abs(), s.dy.abs())));
        Ok(Self { rows })
    }

    /// Loads and validates a user-supplied CSV. Every row must consist of
    /// two valid discriminants with 2-elementary class groups, identical
    /// square-class sets, and different fundamental discriminants; rows
    /// sharing a label must agree on the square-class set.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingTable(path.display().to_string()));
        }
        let text = fs::read_to_string(path)?;
        let mut rows = Vec::new();
        let mut label_classes: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line.eq_ignore_ascii_case("dx,dy,label")) {
                continue;
            }
            let bad = |why: &str| {
                Error::Malformed(format!("equal-field table line {}: {why}", idx + 1))
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(bad("expected `dx,dy,label`"));
            }
            let dx: i64 = fields[0].trim().parse().map_err(|_| bad("bad dx"))?;
            let dy: i64 = fields[1].trim().parse().map_err(|_| bad("bad dy"))?;
            let label = fields[2].trim().to_string();
            if label.is_empty() {
                return Err(bad("empty label"));
            }
            if !is_discriminant(dx) || !is_discriminant(dy) {
                return Err(bad("not a discriminant"));
            }
            for d in [dx, dy] {
                let r = rho2(d)?;
                if r >= 63 || class_number(d)? != 1u64 << r {
                    return Err(bad("class group is not 2-elementary"));
                }
            }
            let cx = kernel_classes(dx)?;
            if cx != kernel_classes(dy)? {
                return Err(bad("square-class sets differ: not one field"));
            }
            if fundamental_decomposition(dx)?.0 == fundamental_decomposition(dy)?.0 {
                return Err(bad("fundamental discriminants coincide"));
            }
            match label_classes.get(&label) {
                Some(known) if *known != cx => {
                    return Err(bad("label reused for a different field"));
                }
                None => {
                    label_classes.insert(label.clone(), cx);
                }
                _ => {}
            }
            rows.push(Abm15Row { dx, dy, label });
        }
        Ok(Self { rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dx,dy,label\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.dx, r.dy, r.label));
        }
        out
    }

    /// Discriminants of each field, keyed by label, sorted by `|Δ|` and
    /// deduplicated.
    pub fn field_groups(&self) -> BTreeMap<String, Vec<i64>> {
        let mut groups: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        for r in &self.rows {
            let list = groups.entry(r.label.clone()).or_default();
            list.push(r.dx);
            list.push(r.dy);
        }
        for list in groups.values_mut() {
            list.sort_unstable_by_key(|d| d.abs());
            list.dedup();
        }
        groups
    }
}

// ---------------------------------------------------------------------------
// Candidate triples
// ---------------------------------------------------------------------------

/// Which congruence/containment family produced a candidate triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    #[serde(rename = "1a")]
    C1a,
    #[serde(rename = "1b")]
    C1b,
    #[serde(rename = "1c")]
    C1c,
    #[serde(rename = "2a")]
    C2a,
    #[serde(rename = "2b")]
    C2b,
    #[serde(rename = "2c")]
    C2c,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::C1a => "1a",
            CaseTag::C1b => "1b",
            CaseTag::C1c => "1c",
            CaseTag::C2a => "2a",
            CaseTag::C2b => "2b",
            CaseTag::C2c => "2c",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1a" => Some(CaseTag::C1a),
            "1b" => Some(CaseTag::C1b),
            "1c" => Some(CaseTag::C1c),
            "2a" => Some(CaseTag::C2a),
            "2b" => Some(CaseTag::C2b),
            "2c" => Some(CaseTag::C2c),
            _ => None,
        }
    }
}

/// One candidate discriminant triple, tagged with its family. The relation
/// predicate checked downstream is symmetric in the three coordinates, so a
/// triple stands for its whole permutation orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CandidateTriple {
    pub dx: i64,
    pub dy: i64,
    pub dz: i64,
    pub tag: CaseTag,
}

impl CandidateTriple {
    /// The triple as a sorted multiset, the canonical deduplication key.
    pub fn key(&self) -> [i64; 3] {
        let mut k = [self.dx, self.dy, self.dz];
        k.sort_unstable();
        k
    }
}

/// Upper bound on `|Δ|` for `h(Δ) ≤ 6`, quoted from the small-class caps and
/// reverified by [`max_disc_with_class_at_most`] in the test suite.
const H6_CAP: u64 = 4075;

/// The finite list of candidate triples: the congruence families
/// `(4Δ, Δ, Δ)` and `(4Δ, 4Δ, Δ)` over `Δ ≡ 1 (mod 8)`, the conductor-ratio
/// families `9Δx = 4Δy` and `4Δx = Δy` with their per-class-number caps, the
/// equal-field triples drawn from the supplied table, and the index-2
/// containment pairs. Deterministic, duplicate-free (as unordered triples),
/// grouped by tag in the order 1a, 1b, 1c, 2a, 2b, 2c.
pub fn case_lists(table: &Abm15Table) -> Result<Vec<CandidateTriple>> {
    let h_of = class_number_table(H6_CAP.max(5879));
    let mut out: Vec<CandidateTriple> = Vec::new();

    // (4Δ, Δ, Δ) and (4Δ, 4Δ, Δ) with Δ ≡ 1 (mod 8).
    for n in 3..=H6_CAP {
        let delta = -(n as i64);
        if !is_discriminant(delta) || delta.rem_euclid(8) != 1 {
            continue;
        }
        let h = u64::from(h_of[n as usize]);
        if h == 0 {
            continue;
        }
        if h <= 6 {
            out.push(CandidateTriple {
                dx: 4 * delta,
                dy: delta,
                dz: delta,
                tag: CaseTag::C1a,
            });
        }
        if h <= 5 {
            out.push(CandidateTriple {
                dx: 4 * delta,
                dy: 4 * delta,
                dz: delta,
                tag: CaseTag::C1b,
            });
        }
    }

    // Equal-field triples: all unordered triples (with at least two distinct
    // members) drawn from one field group of degree ≥ 3.
    for (_, discs) in table.field_groups() {
        let degree = positive_splittings(discs[0])?.len() as u64;
        if degree < 3 {
            continue;
        }
        for i in 0..discs.len() {
            for j in i..discs.len() {
                for k in j..discs.len() {
                    if i == j && j == k {
                        continue;
                    }
                    out.push(CandidateTriple {
                        dx: discs[i],
                        dy: discs[j],
                        dz: discs[k],
                        tag: CaseTag::C1c,
                    });
                }
            }
        }
    }

    // 9Δx = 4Δy with Δx ≡ 0, 4 (mod 16) and the per-class-number caps.
    for n in (4..=5879u64).step_by(4) {
        let delta = -(n as i64);
        if !is_discriminant(delta) || ![0, 4].contains(&delta.rem_euclid(16)) {
            continue;
        }
        let h = u64::from(h_of[n as usize]);
        if h == 0 {
            continue;
        }
        let admitted = (h <= 6 && n <= H6_CAP)
            || ((7..=8).contains(&h) && n <= 5879)
            || ((9..=10).contains(&h) && n <= 1557)
            || ((11..=14).contains(&h) && n <= 790);
        if !admitted {
            continue;
        }
        let dy = 9 * delta / 4;
        if !is_discriminant(dy) {
            continue;
        }
        out.push(CandidateTriple {
            dx: delta,
            dy,
            dz: dy,
            tag: CaseTag::C2a,
        });
    }

    // 4Δx = Δy with the per-class-number caps.
    for n in 3..=H6_CAP {
        let delta = -(n as i64);
        if !is_discriminant(delta) {
            continue;
        }
        let h = u64::from(h_of[n as usize]);
        if h == 0 {
            continue;
        }
        if (h <= 4 && n <= H6_CAP) || ((5..=6).contains(&h) && n <= 304) {
            out.push(CandidateTriple {
                dx: delta,
                dy: 4 * delta,
                dz: 4 * delta,
                tag: CaseTag::C2b,
            });
        }
    }

    // Index-2 containment pairs (Δx, Δy, Δy).
    for pair in difffundsub_pairs()? {
        out.push(CandidateTriple {
            dx: pair.dx,
            dy: pair.dy,
            dz: pair.dy,
            tag: CaseTag::C2c,
        });
    }

    // Stable per-tag order, then global dedup as unordered triples.
    out.sort_by_key(|t| (t.tag, t.dx.abs(), t.dy.abs(), t.dz.abs(), t.dx, t.dy, t.dz));
    let mut seen: BTreeSet<[i64; 3]> = BTreeSet::new();
    out.retain(|t| seen.insert(t.key()));
    Ok(out)
}

/// CSV rendering of a candidate list (`case,dx,dy,dz`).
pub fn triples_csv(list: &[CandidateTriple]) -> String {
    let mut out = String::from("case,dx,dy,dz\n");
    for t in list {
        out.push_str(&format!("{},{},{},{}\n", t.tag.as_str(), t.dx, t.dy, t.dz));
    }
    out
}

/// CSV rendering of the containment pairs (`dx,dy,hx,hy`).
pub fn pairs_csv(pairs: &[FieldPair]) -> String {
    let mut out = String::from("dx,dy,hx,hy\n");
    for p in pairs {
        out.push_str(&format!("{},{},{},{}\n", p.dx, p.dy, p.hx, p.hy));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::{is_almost_two_elementary, is_two_elementary};

    #[test]
    fn max_disc_matches_direct_scan_for_class_number_one() {
        for n in 164..=200i64 {
            if is_discriminant(-n) {
                assert!(class_number(-n).unwrap() >= 2, "h(-{n}) should exceed 1");
            }
        }
        assert_eq!(class_number(-163).unwrap(), 1);
        assert_eq!(max_disc_with_class_at_most(1, 200).unwrap(), 163);
        assert_eq!(max_disc_with_class_at_most(1, 163).unwrap(), 163);
        assert!(max_disc_with_class_at_most(1, 2).is_err());
    }

    #[test]
    fn max_disc_small_class_caps() {
        assert_eq!(max_disc_with_class_at_most(6, 5000).unwrap(), 4075);
        assert_eq!(max_disc_with_class_at_most(32, 170_000).unwrap(), 166_147);
    }

    #[test]
    fn small_discriminants_have_small_class_numbers() {
        assert!(lemma21_check().unwrap());
        // both cutoffs are sharp
        assert_eq!(class_number(-15).unwrap(), 2);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-39).unwrap(), 4);
    }

    #[test]
    fn grey_cells_hold() {
        assert!(grey_cell_check((3, 1), 3, 2).unwrap());
        assert!(grey_cell_check((4, 1), 3, 0).unwrap());
        assert!(grey_cell_check((2, 1), 7, 49).unwrap());
        assert!(grey_cell_check((3, 2), 15, 515).unwrap());
        assert!(grey_cell_check((9, 9), 3, 2).is_err());
    }

    #[test]
    fn grey_cell_rejects_nonempty_cells() {
        // h(−47) = 5, so the cell (2/1, k = 5) is inhabited at bound 304.
        assert_eq!(class_number(-47).unwrap(), 5);
        assert!(!grey_cell_check((2, 1), 5, 304).unwrap());
        // First Δ ≡ 0, 4 (mod 16) with h ≥ 8 inhabits the (3/2, k = 8) cell.
        let mut witness = None;
        for n in (4..=5879i64).step_by(4) {
            if is_discriminant(-n)
                && [0, 4].contains(&(-n).rem_euclid(16))
                && class_number(-n).unwrap() >= 8
            {
                witness = Some(n as u64);
                break;
            }
        }
        let bound = witness.expect("some admissible discriminant has h ≥ 8");
        assert!(!grey_cell_check((3, 2), 8, bound).unwrap());
    }

    #[test]
    fn containment_pairs_count_and_invariants() {
        let pairs = difffundsub_pairs().unwrap();
        assert_eq!(pairs.len(), 873);
        let mut seen = BTreeSet::new();
        for p in &pairs {
            assert_eq!(p.hy, 2 * p.hx);
            assert_eq!(class_number(p.dx).unwrap(), p.hx);
            assert_eq!(class_number(p.dy).unwrap(), p.hy);
            assert!(is_two_elementary(p.dx).unwrap());
            assert!(is_almost_two_elementary(p.dy).unwrap());
            assert_ne!(
                fundamental_decomposition(p.dx).unwrap().0,
                fundamental_decomposition(p.dy).unwrap().0
            );
            assert!(kernel_classes(p.dx)
                .unwrap()
                .is_subset(&kernel_classes(p.dy).unwrap()));
            assert!(seen.insert((p.dx, p.dy)), "duplicate pair");
        }
        let find = |dx: i64, dy: i64| pairs.iter().any(|p| p.dx == dx && p.dy == dy);
        // Q ⊂ Q(√5) and Q(√5) ⊂ Q(√2, √5)
        assert!(find(-3, -15));
        assert!(find(-15, -120));
        // equal fundamental discriminants are excluded even when the degree
        // doubles and the square classes nest
        assert!(!find(-15, -240));
        // equal fields (degree not doubled) are not containment pairs
        assert!(!find(-15, -20));
    }

    #[test]
    fn witnesses_certify_and_embed() {
        let pairs = difffundsub_pairs().unwrap();
        let cfg = CheckConfig::default();
        // one representative pair per occurring contained degree
        let mut sample = Vec::new();
        for h in [1u64, 2, 4, 8, 16] {
            if let Some(p) = pairs.iter().find(|p| p.hx == h) {
                sample.push(*p);
            }
        }
        assert!(sample.len() >= 3);
        for p in &sample {
            let w = pair_witness(p, &cfg).unwrap();
            assert!(
                w.is_certified(),
                "pair ({}, {}) uncertified: {:?}",
                p.dx,
                p.dy,
                w.state
            );
            let cand = w.expansion.as_ref().unwrap();
            assert!(matches!(cand.status(), CandidateStatus::CertifiedZero));
            assert_eq!(cand.coefficients().len(), w.radicals.len() + 2);
            assert!(cand.coefficients()[1] != 0);
            assert_eq!(w.embeddings.len(), w.radicals.len());
            let dplus_y = positive_splittings(p.dy).unwrap();
            for e in &w.embeddings {
                assert_eq!(
                    i128::from(e.root) * i128::from(e.root),
                    i128::from(e.radical) * i128::from(e.partner)
                );
                assert!(dplus_y.contains(&e.partner));
            }
        }
        // determinism of the frozen expansion
        let p = sample[1];
        let a = pair_witness(&p, &cfg).unwrap().expansion.unwrap();
        let b = pair_witness(&p, &cfg).unwrap().expansion.unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
    }

    #[test]
    fn known_expansion_of_smallest_quadratic_case() {
        // The dominant modulus of −15 expands as 2x + 191025 + 85995√5 = 0
        // over (1, x, √5); its trace term equals the degree-1 coefficient of
        // the class polynomial of −15.
        let p = FieldPair {
            dx: -15,
            dy: -120,
            hx: 2,
            hy: 4,
        };
        let w = pair_witness(&p, &CheckConfig::default()).unwrap();
        assert!(w.is_certified());
        assert_eq!(w.radicals, vec![5]);
        let coeffs = w.expansion.unwrap();
        let expect: Vec<Integer> = [191025, 2, 85995].map(Integer::from).to_vec();
        assert_eq!(coeffs.coefficients(), &expect[..]);
        let hcp = crate::hilbert::hilbert_class_poly(-15).unwrap();
        assert_eq!(*hcp.coefficient(1), expect[0]);
        assert_eq!(
            w.embeddings,
            vec![RadicalEmbedding {
                radical: 5,
                partner: 5,
                root: 5
            }]
        );
    }

    #[test]
    fn equal_field_table_roundtrip() {
        let table = Abm15Table::generate().unwrap();
        assert!(!table.rows.is_empty());
        let row = table
            .rows
            .iter()
            .find(|r| {
                (r.dx, r.dy) == (-15, -20) || (r.dx, r.dy) == (-20, -15)
            })
            .expect("the Q(√5) pair is present");
        let groups = table.field_groups();
        let g5 = groups.get(&row.label).unwrap();
        for d in [-15, -20, -35] {
            assert!(g5.contains(&d), "{d} missing from the Q(√5) group");
        }
        assert!(groups
            .values()
            .any(|g| [-96, -192, -288].iter().all(|d| g.contains(d))));
        for r in &table.rows {
            assert_ne!(
                fundamental_decomposition(r.dx).unwrap().0,
                fundamental_decomposition(r.dy).unwrap().0
            );
            assert_eq!(kernel_classes(r.dx).unwrap(), kernel_classes(r.dy).unwrap());
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abm15_table2.csv");
        fs::write(&path, table.to_csv()).unwrap();
        let loaded = Abm15Table::load(&path).unwrap();
        assert_eq!(loaded.rows, table.rows);
    }

    #[test]
    fn equal_field_table_validation_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Abm15Table::load(&dir.path().join("nope.csv")),
            Err(Error::MissingTable(_))
        ));
        let bad = dir.path().join("bad.csv");
        let cases = [
            "dx,dy,label\n-15,-16,Q(sqrt5)\n",          // different fields
            "dx,dy,label\n-15,-60,Q(sqrt5)\n",          // same fundamental
            "dx,dy,label\n-23,-92,cubic\n",             // not 2-elementary
            "dx,dy,label\n-15,-20,F\n-96,-192,F\n",     // label reused
            "dx,dy,label\n-15,-20\n",                   // short row
            "dx,dy,label\n-15,x,Q(sqrt5)\n",            // unparsable
        ];
        for text in cases {
            fs::write(&bad, text).unwrap();
            assert!(
                matches!(Abm15Table::load(&bad), Err(Error::Malformed(_))),
                "accepted: {text:?}"
            );
        }
        fs::write(&bad, "dx,dy,label\n-15,-20,Q(sqrt5)\n").unwrap();
        assert_eq!(Abm15Table::load(&bad).unwrap().rows.len(), 1);
    }

    #[test]
    fn candidate_lists_cover_known_examples() {
        let table = Abm15Table::generate().unwrap();
        let list = case_lists(&table).unwrap();
        let has = |dx: i64, dy: i64, dz: i64, tag: CaseTag| {
            list.iter()
                .any(|t| (t.dx, t.dy, t.dz, t.tag) == (dx, dy, dz, tag))
        };
        assert!(has(-28, -7, -7, CaseTag::C1a));
        assert!(has(-60, -60, -15, CaseTag::C1b));
        assert!(list
            .iter()
            .any(|t| t.tag == CaseTag::C1c && t.key() == [-288, -192, -96]));
        for t in list.iter().filter(|t| t.tag == CaseTag::C2a) {
            assert!([0, 4].contains(&t.dx.rem_euclid(16)));
            assert_eq!(9 * t.dx, 4 * t.dy);
            assert_eq!(t.dy, t.dz);
        }
        for t in list.iter().filter(|t| t.tag == CaseTag::C2b) {
            assert_eq!(4 * t.dx, t.dy);
            assert_eq!(t.dy, t.dz);
        }
        assert!(has(-15, -120, -120, CaseTag::C2c));
        // pairwise distinct as unordered multisets, and deterministic
        let mut keys = BTreeSet::new();
        for t in &list {
            assert!(keys.insert(t.key()), "duplicate multiset {:?}", t.key());
        }
        assert_eq!(case_lists(&table).unwrap(), list);
    }

    #[test]
    fn csv_outputs_are_stable() {
        let pairs = vec![FieldPair {
            dx: -3,
            dy: -15,
            hx: 1,
            hy: 2,
        }];
        assert_eq!(pairs_csv(&pairs), "dx,dy,hx,hy\n-3,-15,1,2\n");
        let trips = vec![CandidateTriple {
            dx: -28,
            dy: -7,
            dz: -7,
            tag: CaseTag::C1a,
        }];
        assert_eq!(triples_csv(&trips), "case,dx,dy,dz\n1a,-28,-7,-7\n");
        assert_eq!(CaseTag::parse("2c"), Some(CaseTag::C2c));
        assert_eq!(CaseTag::parse("3a"), None);
        assert_eq!(CaseTag::C1b.as_str(), "1b");
    }
}
