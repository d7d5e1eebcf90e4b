//! Exact integer helpers shared across the crate: gcds, integer square roots,
//! factorization by trial division, divisor enumeration, squarefree
//! decomposition, Kronecker symbols, and small modular-arithmetic utilities.
//!
//! Everything here is exact. Inputs stay well below `2^63` for all uses in
//! this crate (discriminants are bounded by a few multiples of `10^5`), so
//! trial division is both fast enough and free of probabilistic caveats.

use rug::Integer;

/// Nonnegative greatest common divisor of two signed integers.
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Nonnegative gcd of three signed integers.
pub fn gcd3_i64(a: i64, b: i64, c: i64) -> i64 {
    gcd_i64(gcd_i64(a, b), c)
}

/// Floor of the square root of `n`.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // f64 sqrt gives an estimate correct to within one; fix up exactly.
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// `Some(r)` with `r² = n` if `n` is a perfect square, else `None`.
pub fn perfect_sqrt_u64(n: u64) -> Option<u64> {
    let r = isqrt_u64(n);
    (r * r == n).then_some(r)
}

/// Prime factorization of `n ≥ 1` by trial division, as `(prime, exponent)`
/// pairs in increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n ≥ 1`, sorted increasingly.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Squarefree decomposition `n = q · s²` with `q` squarefree; returns `(q, s)`.
pub fn squarefree_decomposition(n: u64) -> (u64, u64) {
    let mut q = 1u64;
    let mut s = 1u64;
    for (p, e) in factorize(n) {
        if e % 2 == 1 {
            q *= p;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
    }
    (q, s)
}

/// Kronecker symbol `(a / n)` (the fully extended Jacobi symbol).
pub fn kronecker(a: i64, n: i64) -> i32 {
    Integer::from(a).kronecker(&Integer::from(n))
}

/// Whether `n` is prime (exact, by trial division; intended for `n` up to
/// around `10^12`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Extended gcd: returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Inverse of `a` modulo `m > 0`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Chinese remainder: the unique `x mod lcm(m1, m2)` with `x ≡ r1 (mod m1)`
/// and `x ≡ r2 (mod m2)`, or `None` if the congruences are incompatible.
/// Moduli need not be coprime.
pub fn crt(r1: i128, m1: i128, r2: i128, m2: i128) -> Option<(i128, i128)> {
    assert!(m1 > 0 && m2 > 0);
    let (g, s, _) = ext_gcd(m1, m2);
    let diff = r2 - r1;
    if diff % g != 0 {
        return None;
    }
    let lcm = m1 / g * m2;
    // x = r1 + m1 · s · (diff / g) solves both congruences.
    let step = (diff / g).rem_euclid(m2 / g);
    let x = (r1 + m1 * ((s.rem_euclid(m2 / g) * step).rem_euclid(m2 / g))).rem_euclid(lcm);
    Some((x, lcm))
}
