//! Integer primitives: sieving, factorization, modular square roots, CRT and
//! continued fractions of quadratic irrationals.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use std::collections::HashMap;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce_signed(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    if n == 0 {
        return false;
    }
    factorize(n, None).factors.iter().all(|&(_, e)| e == 1)
}

/// Smallest-prime-factor table for `2 ≤ k ≤ limit`, built by a linear sieve.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    table: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Self {
        assert!(limit < u32::MAX as u64, "SPF table limit must fit in 32 bits");
        let n = limit as usize;
        let mut table = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if table[i] == 0 {
                table[i] = i as u32;
                primes.push(i as u32);
            }
            let spf_i = table[i];
            for &p in &primes {
                let k = i * p as usize;
                if p > spf_i || k > n {
                    break;
                }
                table[k] = p;
            }
        }
        SpfTable { limit, table, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn spf(&self, k: u64) -> u64 {
        self.table[k as usize] as u64
    }

    pub fn is_prime(&self, k: u64) -> bool {
        k >= 2 && self.spf(k) == k
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

fn push_factor(factors: &mut Vec<(u64, u32)>, p: u64) {
    match factors.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += 1,
        None => factors.push((p, 1)),
    }
}

fn pollard_brent(n: u64, seed: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
    let (mut y, m) = (seed.wrapping_mul(0x9e37_79b9) % n, 128u64);
    let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let r = n.sqrt();
    if r * r == n {
        split_large(r, out);
        split_large(r, out);
        return;
    }
    let mut seed = 1;
    loop {
        let d = pollard_brent(n, seed);
        if d != n && d != 1 {
            split_large(d, out);
            split_large(n / d, out);
            return;
        }
        seed += 1;
    }
}

/// Prime factorization; uses the SPF table when it covers `n`.
pub fn factorize(n: u64, spf: Option<&SpfTable>) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    if let Some(t) = spf.filter(|t| n <= t.limit()) {
        while rest > 1 {
            let p = t.spf(rest);
            rest /= p;
            push_factor(&mut factors, p);
        }
        return Factorization { value: n, factors };
    }
    for p in [2u64, 3, 5] {
        while rest % p == 0 {
            rest /= p;
            push_factor(&mut factors, p);
        }
    }
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p <= 1 << 16 && p * p <= rest {
        while rest % p == 0 {
            rest /= p;
            push_factor(&mut factors, p);
        }
        p += wheel[i];
        i = (i + 1) % 8;
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_large(rest, &mut big);
        for q in big {
            push_factor(&mut factors, q);
        }
    }
    factors.sort_unstable();
    Factorization { value: n, factors }
}

/// Tonelli–Shanks square root of `a` modulo an odd prime `p`.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Square roots of a unit `u` modulo `p^e` (`p ∤ u`).
fn unit_sqrt_prime_power(u: u64, p: u64, e: u32, pe: u64) -> Vec<u64> {
    if p == 2 {
        return match e {
            1 => vec![1],
            2 => {
                if u % 4 == 1 {
                    vec![1, 3]
                } else {
                    vec![]
                }
            }
            _ => {
                if u % 8 != 1 {
                    return vec![];
                }
                // r is a root mod 2^k; fix it up to a root mod 2^(k+1).
                let mut r: u64 = 1;
                for k in 3..e {
                    let m = 1u64 << (k + 1);
                    if mul_mod(r, r, m) != u % m {
                        r += 1 << (k - 1);
                    }
                }
                let half = pe / 2;
                let mut v = vec![r % pe, (pe - r) % pe, (r + half) % pe, (pe - r + half) % pe];
                v.sort_unstable();
                v.dedup();
                v
            }
        };
    }
    let Some(mut r) = sqrt_mod_prime(u, p) else {
        return vec![];
    };
    let mut pk = p;
    for _ in 1..e {
        let next = pk * p;
        let f = (mul_mod(r, r, next) + next - u % next) % next;
        let inv = inv_mod(mul_mod(2, r, next), next).expect("2r is a unit");
        r = (r + next - mul_mod(f, inv, next)) % next;
        pk = next;
    }
    let mut v = vec![r, (pe - r) % pe];
    v.sort_unstable();
    v.dedup();
    v
}

/// All `x mod p^e` with `x² ≡ D (mod p^e)`, sorted ascending.
pub fn sqrt_mod_prime_power(d: i64, p: u64, e: u32) -> Vec<u64> {
    assert!(e >= 1);
    let pe = p.checked_pow(e).expect("prime power overflows u64");
    let dm = reduce_signed(d as i128, pe);
    if dm == 0 {
        let step = p.pow(e.div_ceil(2));
        return (0..pe / step).map(|k| k * step).collect();
    }
    let mut v = 0u32;
    let mut u = dm;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return vec![];
    }
    let e_unit = e - v;
    let pe_unit = p.pow(e_unit);
    let unit_roots = unit_sqrt_prime_power(u % pe_unit, p, e_unit, pe_unit);
    let scale = p.pow(v / 2);
    let lifts = p.pow(v / 2);
    let mut out = Vec::with_capacity(unit_roots.len() * lifts as usize);
    for &r in &unit_roots {
        for k in 0..lifts {
            out.push(mul_mod(scale, r + k * pe_unit, pe));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Combines residue lists modulo pairwise coprime moduli into the full sorted
/// list modulo their product.
pub fn crt_combine(parts: &[(Vec<u64>, u64)]) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![0];
    let mut modulus: u64 = 1;
    for (residues, m) in parts {
        let m = *m;
        let inv = inv_mod(modulus % m, m).expect("moduli must be pairwise coprime");
        let mut next = Vec::with_capacity(acc.len() * residues.len());
        let big = modulus * m;
        for &a in &acc {
            for &r in residues {
                let diff = (r + m - a % m) % m;
                let t = mul_mod(diff, inv, m);
                next.push((a + modulus * t) % big);
            }
        }
        acc = next;
        modulus = big;
    }
    acc.sort_unstable();
    acc
}

/// Continued fraction of √D together with the convergents of its first period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFExpansion {
    pub d: u64,
    pub a0: u64,
    pub period: Vec<u64>,
    /// `(p_k, q_k)` for `k = 0..=period.len()`, starting from `a0/1`.
    pub convergents: Vec<(BigInt, BigInt)>,
}

impl CFExpansion {
    /// Fundamental solution of `x² − D y² = ±1`, taken from the convergent at
    /// the end of the first period.
    pub fn fundamental_solution(&self) -> (BigInt, BigInt, i32) {
        let (p, q) = self.convergents[self.period.len() - 1].clone();
        let sign = if self.period.len() % 2 == 0 { 1 } else { -1 };
        (p, q, sign)
    }
}

pub fn cf_sqrt(d: u64) -> Result<CFExpansion> {
    let a0 = d.sqrt();
    if d < 2 || a0 * a0 == d {
        return Err(Error::InvalidInput(format!("{d} must be a non-square > 1")));
    }
    let (mut m, mut q, mut a) = (0u64, 1u64, a0);
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    let mut period = Vec::new();
    let mut states = Vec::new();
    loop {
        m = q * a - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        if let Some(&start) = seen.get(&(m, q)) {
            period = period.split_off(start);
            break;
        }
        seen.insert((m, q), states.len());
        states.push((m, q));
        period.push(a);
    }
    let mut convergents = Vec::with_capacity(period.len() + 1);
    let (mut p_prev, mut p) = (BigInt::from(1), BigInt::from(a0));
    let (mut q_prev, mut qq) = (BigInt::from(0), BigInt::from(1));
    convergents.push((p.clone(), qq.clone()));
    for &ak in &period {
        let ak = BigInt::from(ak);
        let p_next = &ak * &p + &p_prev;
        let q_next = &ak * &qq + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut qq, q_next);
        convergents.push((p.clone(), qq.clone()));
    }
    Ok(CFExpansion { d, a0, period, convergents })
}

/// Complete quotient `(P + √D)/Q` of a quadratic irrational, with `Q | D − P²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CfState {
    pub p: i64,
    pub q: i64,
    pub a: i64,
}

/// Eventually periodic expansion of `(P0 + √D)/Q0`.
#[derive(Debug, Clone)]
pub struct QuadraticCf {
    pub d: i64,
    pub preperiod: Vec<CfState>,
    pub period: Vec<CfState>,
}

fn floor_quadratic(p: i64, q: i64, s: i64) -> i64 {
    if q > 0 {
        (p + s).div_euclid(q)
    } else {
        -((p + s).div_euclid(-q) + 1)
    }
}

pub fn quadratic_cf(d: i64, p0: i64, q0: i64) -> Result<QuadraticCf> {
    let s = (d as u64).sqrt() as i64;
    if d < 2 || s * s == d || q0 == 0 || (d - p0 * p0) % q0 != 0 {
        return Err(Error::InvalidInput(format!(
            "({p0} + √{d})/{q0} is not a normalized quadratic irrational"
        )));
    }
    let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
    let mut states = Vec::new();
    let (mut p, mut q) = (p0, q0);
    loop {
        if let Some(&start) = seen.get(&(p, q)) {
            let period = states.split_off(start);
            return Ok(QuadraticCf { d, preperiod: states, period });
        }
        let a = floor_quadratic(p, q, s);
        seen.insert((p, q), states.len());
        states.push(CfState { p, q, a });
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        p = p_next;
        q = q_next;
    }
}
