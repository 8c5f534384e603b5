//! The roots of `μ² ≡ D (mod m)` ordered by modulus, and their order classes.

use rayon::prelude::*;
use std::fmt;

use crate::arith::{crt_combine, factorize, reduce_signed, sqrt_mod_prime_power, SpfTable};
use crate::error::{Error, Result};
use crate::orders::{check_discriminant, OrderTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub m: u64,
    pub mu: u64,
    pub order_class: OrderTag,
    /// Parity of `(D − μ²)/m` when `m` is even (`true` for odd).
    pub cofactor_odd: Option<bool>,
}

impl Root {
    pub fn new(d: i64, m: u64, mu: u64) -> Self {
        let cofactor_odd = (m % 2 == 0).then(|| cofactor(d, m, mu) % 2 != 0);
        Root { m, mu, order_class: classify_root(d, m, mu), cofactor_odd }
    }

    pub fn x(&self) -> f64 {
        self.mu as f64 / self.m as f64
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.mu, self.m)
    }
}

fn cofactor(d: i64, m: u64, mu: u64) -> i128 {
    let mu = mu as i128;
    (d as i128 - mu * mu) / m as i128
}

/// Accepts roots with `m ≡ 0 (mod n)` and `μ ≡ ν (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootFilter {
    pub n: u64,
    pub nu: u64,
}

impl RootFilter {
    pub fn trivial() -> Self {
        RootFilter { n: 1, nu: 0 }
    }

    pub fn new(d: i64, n: u64, nu: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        let nu = reduce_signed(nu as i128, n);
        if reduce_signed((nu as i128) * (nu as i128) - d as i128, n) != 0 {
            return Err(Error::InvalidInput(format!("ν = {nu} does not satisfy ν² ≡ {d} mod {n}")));
        }
        Ok(RootFilter { n, nu })
    }

    pub fn accepts(&self, m: u64, mu: u64) -> bool {
        m % self.n == 0 && mu % self.n == self.nu
    }
}

pub fn roots_mod_m(d: i64, m: u64) -> Vec<u64> {
    roots_with(d, m, None)
}

fn roots_with(d: i64, m: u64, spf: Option<&SpfTable>) -> Vec<u64> {
    assert!(m >= 1);
    let f = factorize(m, spf);
    let mut parts = Vec::with_capacity(f.factors.len());
    for &(p, e) in &f.factors {
        let local = sqrt_mod_prime_power(d, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        parts.push((local, p.pow(e)));
    }
    crt_combine(&parts)
}

/// `O₁` exactly when `m` is odd or `(D − μ²)/m` is odd.
pub fn classify_root(d: i64, m: u64, mu: u64) -> OrderTag {
    if m % 2 == 1 || cofactor(d, m, mu % m) % 2 != 0 {
        OrderTag::O1
    } else {
        OrderTag::O2
    }
}

#[derive(Clone, Debug)]
pub struct RootSequence {
    pub d: i64,
    pub filter: RootFilter,
    pub roots: Vec<Root>,
}

impl RootSequence {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn points(&self) -> Vec<f64> {
        self.roots.iter().map(Root::x).collect()
    }

    pub fn restrict(&self, class: OrderTag) -> RootSequence {
        RootSequence {
            d: self.d,
            filter: self.filter,
            roots: self.roots.iter().copied().filter(|r| r.order_class == class).collect(),
        }
    }
}

pub const DEFAULT_SEGMENT: u64 = 1 << 20;

/// All roots with `m ≤ M` passing the filter, ordered by `m` and then `μ`.
pub fn sieve_roots(d: i64, big_m: u64, filter: RootFilter) -> Result<RootSequence> {
    sieve_roots_segmented(d, big_m, filter, DEFAULT_SEGMENT)
}

pub fn sieve_roots_segmented(d: i64, big_m: u64, filter: RootFilter, segment: u64) -> Result<RootSequence> {
    check_discriminant(d)?;
    if segment == 0 {
        return Err(Error::InvalidInput("segment size must be positive".into()));
    }
    let spf = (big_m >= 2 && big_m < u32::MAX as u64).then(|| SpfTable::new(big_m));
    let segments: Vec<(u64, u64)> = (0..big_m.div_ceil(segment))
        .map(|s| (s * segment + 1, ((s + 1) * segment).min(big_m)))
        .collect();
    let n = filter.n;
    let chunks: Vec<Vec<Root>> = segments
        .par_iter()
        .map(|&(lo, hi)| {
            let mut out = Vec::new();
            let first = lo.div_ceil(n) * n;
            let mut m = first.max(n);
            while m <= hi {
                for mu in roots_with(d, m, spf.as_ref()) {
                    if mu % n == filter.nu {
                        out.push(Root::new(d, m, mu));
                    }
                }
                m += n;
            }
            out
        })
        .collect();
    let roots = chunks.into_iter().flatten().collect();
    Ok(RootSequence { d, filter, roots })
}

/// The first `count` roots of the filtered sequence, optionally restricted to
/// one order class.
pub fn take_roots(d: i64, filter: RootFilter, count: usize, class: Option<OrderTag>) -> Result<Vec<Root>> {
    if count == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if let Some(c) = class {
        if !crate::orders::filter_admits(d, c, filter.n, filter.nu)? {
            return Err(Error::SequenceExhausted);
        }
    }
    let mut big_m = (count as u64).max(16) * filter.n;
    loop {
        let seq = sieve_roots(d, big_m, filter)?;
        let mut roots: Vec<Root> = match class {
            Some(c) => seq.roots.into_iter().filter(|r| r.order_class == c).collect(),
            None => seq.roots,
        };
        if roots.len() >= count {
            roots.truncate(count);
            return Ok(roots);
        }
        let have = roots.len().max(1) as f64;
        let grow = (1.1 * count as f64 / have).clamp(1.25, 16.0);
        big_m = ((big_m as f64) * grow).ceil() as u64;
        if big_m > 1 << 34 {
            return Err(Error::SequenceExhausted);
        }
    }
}

/// The first `count` normalized points `μ/m ∈ [0, 1)`.
pub fn take_n(d: i64, filter: RootFilter, count: usize) -> Result<Vec<f64>> {
    Ok(take_roots(d, filter, count, None)?.iter().map(Root::x).collect())
}

/// Direct scan of all residues; the reference for the sieve.
pub fn brute_force_roots(d: i64, big_m: u64, filter: RootFilter) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 1..=big_m {
        if m % filter.n != 0 {
            continue;
        }
        for mu in 0..m {
            if reduce_signed((mu as i128) * (mu as i128) - d as i128, m) == 0 && filter.accepts(m, mu) {
                out.push((m, mu));
            }
        }
    }
    out
}
