//! Form class groups: Gaussian composition, inversion, two-torsion counting,
//! projection between orders with the same fundamental discriminant, and the
//! simultaneous Galois orbits of form-class triples.

use std::collections::BTreeSet;

use crate::arith::{crt, ext_gcd, gcd_i64, mod_inverse};
use crate::quadforms::{
    class_number, dominant_form, fundamental_decomposition, reduce, reduced_forms, Discriminant,
    QuadForm,
};
use crate::{Error, Result};

/// An equivalence class of primitive positive-definite forms, stored through
/// its unique reduced representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormClass {
    representative: QuadForm,
    discriminant: Discriminant,
}

impl FormClass {
    /// Class of an arbitrary form of discriminant `delta` (reduces it first).
    pub fn from_form(delta: i64, form: QuadForm) -> Result<Self> {
        if form.discriminant() != delta {
            return Err(Error::DiscriminantMismatch(form.discriminant(), delta));
        }
        let discriminant = Discriminant::new(delta)?;
        Ok(Self {
            representative: reduce(form.a as i128, form.b as i128, form.c as i128),
            discriminant,
        })
    }

    /// The identity class (dominant form).
    pub fn identity(delta: i64) -> Result<Self> {
        let discriminant = Discriminant::new(delta)?;
        Ok(Self {
            representative: dominant_form(delta)?,
            discriminant,
        })
    }

    pub fn representative(&self) -> &QuadForm {
        &self.representative
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant.value()
    }

    pub fn is_identity(&self) -> bool {
        self.representative.a == 1
    }
}

/// The full class group of a discriminant, with its element list.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    discriminant: Discriminant,
    elements: Vec<FormClass>,
    identity: FormClass,
}

impl ClassGroup {
    pub fn new(delta: i64) -> Result<Self> {
        let discriminant = Discriminant::new(delta)?;
        let elements = reduced_forms(delta)?
            .into_iter()
            .map(|f| FormClass {
                representative: f,
                discriminant,
            })
            .collect::<Vec<_>>();
        let identity = FormClass::identity(delta)?;
        Ok(Self {
            discriminant,
            elements,
            identity,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant.value()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[FormClass] {
        &self.elements
    }

    pub fn identity(&self) -> &FormClass {
        &self.identity
    }

    pub fn index_of(&self, class: &FormClass) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.representative == class.representative)
    }
}

/// Finds a form equivalent to `form` whose leading coefficient is coprime to
/// `m` (and positive), by searching small coprime vectors (x, y) and
/// completing them to a unimodular change of variables.
fn equivalent_with_leading_coprime_to(form: &QuadForm, m: i64) -> Result<QuadForm> {
    let (a, b, c) = (form.a as i128, form.b as i128, form.c as i128);
    let m = m.unsigned_abs().max(1) as i128;
    let limit = 2 * m + 2;
    for n in 1..=limit {
        for x in -n..=n {
            for y in -n..=n {
                if x.abs().max(y.abs()) != n {
                    continue; // only the new ring of the square
                }
                let g = ext_gcd(x, y).0;
                if g != 1 {
                    continue;
                }
                let v = a * x * x + b * x * y + c * y * y;
                if v == 0 || ext_gcd(v, m).0 != 1 {
                    continue;
                }
                // complete (x, y) to a determinant-1 matrix [[x, u], [y, w]]
                let (_, s, t) = ext_gcd(x, y);
                let (u, w) = (-t, s); // x·w − y·u = x·s + y·t = 1
                let new_a = v;
                let new_b = 2 * (a * x * u + c * y * w) + b * (x * w + y * u);
                let new_c = a * u * u + b * u * w + c * w * w;
                debug_assert_eq!(
                    new_b * new_b - 4 * new_a * new_c,
                    (form.discriminant()) as i128
                );
                return Ok(QuadForm::new(new_a as i64, new_b as i64, new_c as i64));
            }
        }
    }
    Err(Error::Malformed(format!(
        "no equivalent form with leading coefficient coprime to {m} found for {form}"
    )))
}

/// Gaussian (Dirichlet) composition of two classes of the same discriminant.
pub fn compose(f: &FormClass, g: &FormClass) -> Result<FormClass> {
    if f.discriminant() != g.discriminant() {
        return Err(Error::DiscriminantMismatch(
            f.discriminant(),
            g.discriminant(),
        ));
    }
    let delta = f.discriminant();
    let f1 = f.representative();
    if f1.a == 1 {
        return Ok(g.clone());
    }
    let g1 = g.representative();
    if g1.a == 1 {
        return Ok(f.clone());
    }
    // replace g by an equivalent form whose leading coefficient is coprime
    // to a₁, then glue along a common middle coefficient B modulo 2a₁a₂
    let g2 = equivalent_with_leading_coprime_to(g1, f1.a)?;
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2) = (g2.a as i128, g2.b as i128);
    // gcd(2a₁, 2a₂) = 2 and b₁ ≡ b₂ ≡ Δ (mod 2), so the system is solvable
    let (bb, _) = crt(b1, 2 * a1, b2, 2 * a2).ok_or_else(|| {
        Error::Malformed(format!(
            "inconsistent congruences composing {f1} and {g1} at discriminant {delta}"
        ))
    })?;
    let a3 = a1 * a2;
    let c3_num = bb * bb - delta as i128;
    debug_assert_eq!(c3_num % (4 * a3), 0);
    let composed = reduce(a3, bb, c3_num / (4 * a3));
    Ok(FormClass {
        representative: composed,
        discriminant: Discriminant::new(delta)?,
    })
}

/// Class inverse: the class of (a, −b, c).
pub fn inverse(f: &FormClass) -> FormClass {
    let r = f.representative();
    FormClass {
        representative: reduce(r.a as i128, -(r.b as i128), r.c as i128),
        discriminant: f.discriminant,
    }
}

/// Number of classes of order dividing 2 in the class group of `delta`,
/// found by composing each class with itself.
pub fn two_torsion_count(delta: i64) -> Result<u64> {
    let group = ClassGroup::new(delta)?;
    let mut count = 0u64;
    for e in group.elements() {
        if compose(e, e)?.is_identity() {
            count += 1;
        }
    }
    Ok(count)
}

/// Projects a class of discriminant f²D to the order of discriminant f'²D
/// (f' | f): chooses a representative (A, B, C) with gcd(A, 2f) = 1, then
/// solves t·B' ≡ B (mod 2A) with B' of the parity of the target discriminant,
/// where t = f / f'.
pub fn project(f: &FormClass, target: i64) -> Result<FormClass> {
    let source = f.discriminant();
    let (d_src, f_src) = fundamental_decomposition(source)?;
    let (d_tgt, f_tgt) = fundamental_decomposition(target)?;
    if d_src != d_tgt || f_src % f_tgt != 0 {
        return Err(Error::IncompatibleProjection(source, target));
    }
    if source == target {
        return Ok(f.clone());
    }
    let t = (f_src / f_tgt) as i128;
    let rep = equivalent_with_leading_coprime_to(f.representative(), 2 * f_src)?;
    let (a, b) = (rep.a as i128, rep.b as i128);
    debug_assert!(a % 2 != 0 && ext_gcd(a, t).0 == 1);
    let two_a = 2 * a;
    let b_new = if t % 2 != 0 {
        // t invertible modulo 2A; parity of the solution is automatic
        let t_inv = mod_inverse(t.rem_euclid(two_a), two_a).ok_or_else(|| {
            Error::Malformed(format!("projection inverse failed for {source}->{target}"))
        })?;
        (t_inv * b.rem_euclid(two_a)).rem_euclid(two_a)
    } else {
        // t even forces B even; solve (t/2)·B' ≡ B/2 (mod A), then pick the
        // lift modulo 2A with the parity of the target discriminant
        debug_assert_eq!(b % 2, 0);
        let half_t = (t / 2).rem_euclid(a);
        let inv = mod_inverse(half_t, a).ok_or_else(|| {
            Error::Malformed(format!("projection inverse failed for {source}->{target}"))
        })?;
        let b0 = (inv * (b / 2).rem_euclid(a)).rem_euclid(a);
        if (b0 - target as i128).rem_euclid(2) == 0 {
            b0
        } else {
            b0 + a
        }
    };
    debug_assert_eq!((b_new * b_new - target as i128).rem_euclid(4 * a), 0);
    let c_new = (b_new * b_new - target as i128) / (4 * a);
    Ok(FormClass {
        representative: reduce(a, b_new, c_new),
        discriminant: Discriminant::new(target)?,
    })
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    a / gcd_i64(a, b) * b
}

/// The orbit of a base triple of form classes under the class group of the
/// common overlying order, acting through the three projections, closed under
/// simultaneous inversion. The three discriminants must share a fundamental
/// discriminant.
pub fn galois_orbit_triples(
    base: &(FormClass, FormClass, FormClass),
) -> Result<Vec<(FormClass, FormClass, FormClass)>> {
    let (bx, by, bz) = base;
    let (dx, fx) = fundamental_decomposition(bx.discriminant())?;
    let (dy, fy) = fundamental_decomposition(by.discriminant())?;
    let (dz, fz) = fundamental_decomposition(bz.discriminant())?;
    if dx != dy {
        return Err(Error::DiscriminantMismatch(dx, dy));
    }
    if dx != dz {
        return Err(Error::DiscriminantMismatch(dx, dz));
    }
    let l = lcm_i64(lcm_i64(fx, fy), fz);
    let ambient = l * l * dx;
    let group = ClassGroup::new(ambient)?;
    let mut orbit: BTreeSet<(QuadForm, QuadForm, QuadForm)> = BTreeSet::new();
    let mut triples: Vec<(FormClass, FormClass, FormClass)> = Vec::new();
    let push = |t: (FormClass, FormClass, FormClass),
                    orbit: &mut BTreeSet<(QuadForm, QuadForm, QuadForm)>,
                    triples: &mut Vec<(FormClass, FormClass, FormClass)>| {
        let key = (
            t.0.representative().clone(),
            t.1.representative().clone(),
            t.2.representative().clone(),
        );
        if orbit.insert(key) {
            triples.push(t);
        }
    };
    for g in group.elements() {
        let tx = compose(&project(g, bx.discriminant())?, bx)?;
        let ty = compose(&project(g, by.discriminant())?, by)?;
        let tz = compose(&project(g, bz.discriminant())?, bz)?;
        let conj = (inverse(&tx), inverse(&ty), inverse(&tz));
        push((tx, ty, tz), &mut orbit, &mut triples);
        push(conj, &mut orbit, &mut triples);
    }
    triples.sort_by(|p, q| {
        (
            p.0.representative(),
            p.1.representative(),
            p.2.representative(),
        )
            .cmp(&(
                q.0.representative(),
                q.1.representative(),
                q.2.representative(),
            ))
    });
    // multiplicity invariant: coordinate i covers each class of Δi equally often
    debug_assert!({
        let n = triples.len() as u64;
        [bx, by, bz].iter().enumerate().all(|(i, b)| {
            let h = class_number(b.discriminant()).unwrap();
            n % h == 0 && {
                let mut counts = std::collections::BTreeMap::new();
                for t in &triples {
                    let rep = match i {
                        0 => t.0.representative(),
                        1 => t.1.representative(),
                        _ => t.2.representative(),
                    };
                    *counts.entry(rep.clone()).or_insert(0u64) += 1;
                }
                counts.values().all(|&c| c == n / h)
            }
        })
    });
    Ok(triples)
}
