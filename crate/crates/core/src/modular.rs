//! SL(2, Z), its reduction modulo n, the projective line P¹(Z/n) and the
//! congruence subgroups Γ₀(n).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;

use crate::arith::{factorize, reduce_signed};
use crate::error::{Error, Result};

/// An element `(a b; c d)` of SL(2, Z).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GammaElement {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl GammaElement {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let g = GammaElement { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if !g.det().is_one() {
            return Err(Error::InvalidInput(format!("determinant of {g} is not 1")));
        }
        Ok(g)
    }

    pub(crate) fn from_i128(a: i128, b: i128, c: i128, d: i128) -> Self {
        let g = GammaElement { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        debug_assert!(g.det().is_one());
        g
    }

    pub fn identity() -> Self {
        Self::from_i128(1, 0, 0, 1)
    }

    pub fn s() -> Self {
        Self::from_i128(0, -1, 1, 0)
    }

    pub fn t_pow(k: i128) -> Self {
        Self::from_i128(1, k, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn inverse(&self) -> Self {
        GammaElement { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn neg(&self) -> Self {
        GammaElement { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn to_mod(&self, n: u64) -> ModMat {
        let r = |x: &BigInt| x.mod_floor(&BigInt::from(n)).to_u64().unwrap_or(0);
        ModMat { a: r(&self.a), b: r(&self.b), c: r(&self.c), d: r(&self.d), n }
    }

    pub fn is_in_gamma0(&self, n: u64) -> bool {
        (&self.c % BigInt::from(n)).is_zero()
    }

    /// Largest absolute entry, as a rough size measure.
    pub fn height(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.abs()).max().unwrap()
    }

    pub fn entries_i128(&self) -> Option<[i128; 4]> {
        Some([self.a.to_i128()?, self.b.to_i128()?, self.c.to_i128()?, self.d.to_i128()?])
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl<'a> Mul<&'a GammaElement> for &'a GammaElement {
    type Output = GammaElement;
    fn mul(self, r: &GammaElement) -> GammaElement {
        GammaElement {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl Mul for GammaElement {
    type Output = GammaElement;
    fn mul(self, r: GammaElement) -> GammaElement {
        &self * &r
    }
}

/// A 2×2 matrix with entries reduced modulo `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModMat {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub n: u64,
}

impl ModMat {
    pub fn identity(n: u64) -> Self {
        ModMat { a: 1 % n, b: 0, c: 0, d: 1 % n, n }
    }

    pub fn from_i128(a: i128, b: i128, c: i128, d: i128, n: u64) -> Self {
        ModMat {
            a: reduce_signed(a, n),
            b: reduce_signed(b, n),
            c: reduce_signed(c, n),
            d: reduce_signed(d, n),
            n,
        }
    }

    fn mm(x: u64, y: u64, n: u64) -> u64 {
        ((x as u128 * y as u128) % n as u128) as u64
    }

    pub fn mul(&self, r: &ModMat) -> ModMat {
        let n = self.n;
        let f = |p: u64, q: u64, s: u64, t: u64| (Self::mm(p, q, n) + Self::mm(s, t, n)) % n;
        ModMat {
            a: f(self.a, r.a, self.b, r.c),
            b: f(self.a, r.b, self.b, r.d),
            c: f(self.c, r.a, self.d, r.c),
            d: f(self.c, r.b, self.d, r.d),
            n,
        }
    }

    /// `S·T^k·self`, the update applied when descending one level of an orbit tree.
    pub fn s_t_left(&self, k: i128) -> ModMat {
        let n = self.n;
        let k = reduce_signed(k, n);
        ModMat {
            a: (n - self.c) % n,
            b: (n - self.d) % n,
            c: (self.a + Self::mm(k, self.c, n)) % n,
            d: (self.b + Self::mm(k, self.d, n)) % n,
            n,
        }
    }

    pub fn bottom_row(&self) -> (u64, u64) {
        (self.c, self.d)
    }
}

/// Index of Γ₀(n) in SL(2, Z): `n ∏_{p | n} (1 + 1/p)`.
pub fn gamma0_index(n: u64) -> u64 {
    let f = factorize(n, None);
    f.factors.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1))
}

/// The projective line over Z/n, indexing the right cosets Γ₀(n)\SL(2, Z)
/// through bottom rows.
#[derive(Debug, Clone)]
pub struct P1 {
    n: u64,
    units: Vec<u64>,
    dense: Option<Vec<u32>>,
    reps: Vec<(u64, u64)>,
    lookup: HashMap<(u64, u64), u32>,
}

const DENSE_LIMIT: u64 = 1024;

impl P1 {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let units: Vec<u64> = (1..=n.max(1)).filter(|&u| u.gcd(&n) == 1).map(|u| u % n).collect();
        let mut p1 = P1 { n, units, dense: None, reps: Vec::new(), lookup: HashMap::new() };
        for c in 0..n {
            for d in 0..n {
                if c.gcd(&d).gcd(&n) != 1 && n > 1 {
                    continue;
                }
                let key = p1.canonical(c, d);
                if !p1.lookup.contains_key(&key) {
                    p1.lookup.insert(key, p1.reps.len() as u32);
                    p1.reps.push(key);
                }
            }
        }
        if n == 1 && p1.reps.is_empty() {
            p1.lookup.insert((0, 0), 0);
            p1.reps.push((0, 0));
        }
        if n <= DENSE_LIMIT {
            let mut table = vec![u32::MAX; (n * n) as usize];
            for c in 0..n {
                for d in 0..n {
                    if let Some(&i) = p1.lookup.get(&p1.canonical(c, d)) {
                        if n == 1 || c.gcd(&d).gcd(&n) == 1 {
                            table[(c * n + d) as usize] = i;
                        }
                    }
                }
            }
            p1.dense = Some(table);
        }
        p1
    }

    fn canonical(&self, c: u64, d: u64) -> (u64, u64) {
        let n = self.n;
        self.units
            .iter()
            .map(|&u| ((u as u128 * c as u128 % n as u128) as u64, (u as u128 * d as u128 % n as u128) as u64))
            .min()
            .unwrap_or((0, 0))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (u64, u64) {
        self.reps[i]
    }

    pub fn index(&self, c: u64, d: u64) -> usize {
        let n = self.n;
        let (c, d) = (c % n, d % n);
        if let Some(t) = &self.dense {
            let i = t[(c * n + d) as usize];
            assert!(i != u32::MAX, "row ({c}, {d}) is not primitive mod {n}");
            return i as usize;
        }
        self.lookup[&self.canonical(c, d)] as usize
    }

    pub fn index_of_row(&self, g: &ModMat) -> usize {
        self.index(g.c, g.d)
    }

    /// Right action of a matrix on row vectors: `(c, d) ↦ (c, d)·g`.
    pub fn act(&self, i: usize, g: &ModMat) -> usize {
        let (c, d) = self.reps[i];
        let n = self.n;
        let mm = |x: u64, y: u64| (x as u128 * y as u128 % n as u128) as u64;
        self.index((mm(c, g.a) + mm(d, g.c)) % n, (mm(c, g.b) + mm(d, g.d)) % n)
    }

    /// Orbit labels of the cyclic group generated by right multiplication by `g`.
    pub fn orbits_under(&self, g: &ModMat) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let mut i = start;
            while label[i] == usize::MAX {
                label[i] = next;
                i = self.act(i, g);
            }
            next += 1;
        }
        label
    }
}

/// Coset data for Γ₀(n): a spanning tree of the coset graph on P¹(Z/n) plus
/// the Schreier generators it induces.
#[derive(Debug, Clone)]
pub struct Gamma0 {
    pub n: u64,
    pub p1: P1,
    coset_reps: Vec<GammaElement>,
    generators: Vec<GammaElement>,
}

impl Gamma0 {
    pub fn new(n: u64) -> Self {
        let p1 = P1::new(n);
        let moves = [GammaElement::s(), GammaElement::t_pow(1)];
        let moves_mod: Vec<ModMat> = moves.iter().map(|g| g.to_mod(n)).collect();
        let mut reps: Vec<Option<GammaElement>> = vec![None; p1.len()];
        let start = p1.index(0, 1 % n.max(1));
        reps[start] = Some(GammaElement::identity());
        let mut queue = VecDeque::from([start]);
        let mut generators = Vec::new();
        let mut seen_gen = std::collections::HashSet::new();
        while let Some(x) = queue.pop_front() {
            let wx = reps[x].clone().unwrap();
            for (mv, mvm) in moves.iter().zip(&moves_mod) {
                let y = p1.act(x, mvm);
                let wxs = &wx * mv;
                match &reps[y] {
                    None => {
                        reps[y] = Some(wxs);
                        queue.push_back(y);
                    }
                    Some(wy) => {
                        let g = &wxs * &wy.inverse();
                        if g != GammaElement::identity() && seen_gen.insert(g.clone()) {
                            generators.push(g);
                        }
                    }
                }
            }
        }
        let coset_reps = reps.into_iter().map(|r| r.expect("coset graph is connected")).collect();
        Gamma0 { n, p1, coset_reps, generators }
    }

    /// Representatives `w_x` with bottom row in the class `x`, so that
    /// SL(2, Z) is the disjoint union of the cosets `Γ₀(n)·w_x`.
    pub fn coset_reps(&self) -> &[GammaElement] {
        &self.coset_reps
    }

    pub fn generators(&self) -> &[GammaElement] {
        &self.generators
    }

    /// Random element of Γ₀(n): a random word in S, T^{±1} of the given
    /// length, corrected by its coset representative.
    pub fn random_element<R: Rng>(&self, rng: &mut R, word_len: usize) -> GammaElement {
        let mut g = GammaElement::identity();
        for _ in 0..word_len {
            let step = match rng.gen_range(0..3) {
                0 => GammaElement::s(),
                1 => GammaElement::t_pow(1),
                _ => GammaElement::t_pow(-1),
            };
            g = &g * &step;
        }
        let x = self.p1.index_of_row(&g.to_mod(self.n));
        let h = &g * &self.coset_reps[x].inverse();
        debug_assert!(h.is_in_gamma0(self.n));
        h
    }
}

/// Deterministic representatives of Γ₀(big)\Γ₀(small) for `small | big`:
/// for each coset, the first matrix found scanning bottom rows `(c, d)` with
/// `c ∈ small·{0, 1, −1, 2, −2, …}` and `d ∈ {1, −1, 2, −2, …}`.
/// An optional predicate on the bottom row selects among candidates.
pub fn coset_reps_between(
    big: u64,
    small: u64,
    accept: impl Fn(i128, i128) -> bool,
) -> Result<Vec<GammaElement>> {
    if small == 0 || big % small != 0 {
        return Err(Error::InvalidInput(format!("{small} must divide {big}")));
    }
    let p1 = P1::new(big);
    let want = (gamma0_index(big) / gamma0_index(small)) as usize;
    let mut found: Vec<(usize, GammaElement)> = Vec::new();
    let signed = |k: i128| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) };
    let bound = 64 * big as i128;
    for kc in 0..bound {
        let c = small as i128 * signed(kc);
        for kd in 1..bound {
            let d = signed(kd);
            if c.gcd(&d) != 1 || !accept(c, d) {
                continue;
            }
            let idx = p1.index(reduce_signed(c, big), reduce_signed(d, big));
            if found.iter().any(|(i, _)| *i == idx) {
                continue;
            }
            let e = c.extended_gcd(&d);
            // a·d − b·c = 1 with a = e.y, b = −e.x
            let g = GammaElement::from_i128(e.y, -e.x, c, d);
            found.push((idx, g));
            if found.len() == want {
                break;
            }
        }
        if found.len() == want {
            break;
        }
    }
    if found.len() != want {
        return Err(Error::Internal(format!(
            "found {} of {want} coset representatives of Γ₀({big}) in Γ₀({small})",
            found.len()
        )));
    }
    Ok(found.into_iter().map(|(_, g)| g).collect())
}
