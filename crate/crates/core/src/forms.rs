//! Integral binary quadratic forms `Ax² + Bxy + Cy²`, the left action of
//! SL(2, Z), and reduction theory for both signs of the discriminant.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::modular::GammaElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl BinaryForm {
    pub const fn new(a: i128, b: i128, c: i128) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i128 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// `γ·f = f∘γ⁻¹`, so that the roots of `γ·f` are the images of the roots of `f`.
    pub fn act(&self, g: &GammaElement) -> Result<BinaryForm> {
        let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
        let fa = BigInt::from(self.a);
        let fb = BigInt::from(self.b);
        let fc = BigInt::from(self.c);
        let na = &fa * d * d - &fb * d * c + &fc * c * c;
        let nb = -(BigInt::from(2) * &fa * d * b) + &fb * (a * d + b * c) - BigInt::from(2) * &fc * c * a;
        let nc = &fa * b * b - &fb * a * b + &fc * a * a;
        let conv = |x: BigInt| x.to_i128().ok_or(Error::Overflow("form action"));
        Ok(BinaryForm { a: conv(na)?, b: conv(nb)?, c: conv(nc)? })
    }

    /// `T^k·f`.
    pub fn translate(&self, k: i128) -> BinaryForm {
        BinaryForm { a: self.a, b: self.b - 2 * k * self.a, c: self.a * k * k - self.b * k + self.c }
    }

    /// `S·f`.
    pub fn s_image(&self) -> BinaryForm {
        BinaryForm { a: self.c, b: -self.b, c: self.a }
    }

    /// `B` lies in `(−|A|, |A|]` for `A > 0` and in `[−|A|, |A|)` for `A < 0`.
    pub fn is_centered(&self) -> bool {
        let aa = self.a.abs();
        if self.a > 0 {
            -aa < self.b && self.b <= aa
        } else {
            -aa <= self.b && self.b < aa
        }
    }

    /// The unique translate `T^k·f` that is centered, together with `k`.
    pub fn center(&self) -> (BinaryForm, i128) {
        assert!(self.a != 0);
        let k = if self.a > 0 {
            Integer::div_floor(&(self.b + self.a - 1), &(2 * self.a))
        } else {
            let aa = -self.a;
            Integer::div_floor(&(aa - self.b - 1), &(2 * aa))
        };
        let g = self.translate(k);
        debug_assert!(g.is_centered(), "{self} -> {g}");
        (g, k)
    }

    /// Elementary reduction step `ρ(f) = δ·f` with `δ = (t 1; −1 0)`; returns `(ρ(f), t)`.
    pub fn rho(&self) -> (BinaryForm, i128) {
        let disc = self.disc();
        let s = disc.sqrt();
        let c2 = 2 * self.c.abs();
        let nb = -self.b;
        let r = if self.c.abs() > s {
            let mut r = nb.mod_floor(&c2);
            if r > self.c.abs() {
                r -= c2;
            }
            r
        } else {
            s - (s - nb).mod_floor(&c2)
        };
        let t = (r - nb) / (2 * self.c);
        let g = BinaryForm { a: self.c, b: r, c: (r * r - disc) / (4 * self.c) };
        (g, t)
    }

    pub fn is_reduced_indefinite(&self) -> bool {
        let s = self.disc().sqrt();
        let aa = self.a.abs();
        0 < self.b && self.b <= s && 2 * aa + self.b > s && 2 * aa - self.b <= s
    }

    /// Reduces an indefinite form; returns the reduced form and `g` with `g·f = reduced`.
    pub fn reduce_indefinite(&self) -> Result<(BinaryForm, GammaElement)> {
        if self.disc() <= 0 {
            return Err(Error::InvalidInput(format!("{self} is not indefinite")));
        }
        let mut f = *self;
        let mut g = GammaElement::identity();
        let mut steps = 0usize;
        while !f.is_reduced_indefinite() {
            let (nf, t) = f.rho();
            g = &GammaElement::from_i128(t, 1, -1, 0) * &g;
            f = nf;
            steps += 1;
            if steps > 10_000 {
                return Err(Error::Internal(format!("reduction of {self} did not terminate")));
            }
        }
        Ok((f, g))
    }

    pub fn is_reduced_definite(&self) -> bool {
        self.a > 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Reduces a positive definite form; returns the reduced form and `g` with `g·f = reduced`.
    pub fn reduce_definite(&self) -> Result<(BinaryForm, GammaElement)> {
        if self.disc() >= 0 || self.a <= 0 {
            return Err(Error::InvalidInput(format!("{self} is not positive definite")));
        }
        let mut f = *self;
        let mut g = GammaElement::identity();
        loop {
            let (h, k) = f.center();
            f = h;
            g = &GammaElement::t_pow(k) * &g;
            if f.c < f.a || (f.c == f.a && f.b < 0) {
                f = f.s_image();
                g = &GammaElement::s() * &g;
                continue;
            }
            break;
        }
        debug_assert!(f.is_reduced_definite());
        Ok((f, g))
    }

    /// Proper automorph attached to a solution of `t² − Δu² = 4`.
    pub fn automorph(&self, t: &BigInt, u: &BigInt) -> GammaElement {
        let fa = BigInt::from(self.a);
        let fb = BigInt::from(self.b);
        let fc = BigInt::from(self.c);
        let two = BigInt::from(2);
        GammaElement {
            a: (t - &fb * u) / &two,
            b: -(&fc * u),
            c: &fa * u,
            d: (t + &fb * u) / &two,
        }
    }
}

/// All primitive reduced indefinite forms of a positive non-square discriminant.
pub fn reduced_indefinite_forms(disc: i128) -> Vec<BinaryForm> {
    let s = disc.sqrt();
    let mut out = Vec::new();
    for b in 1..=s {
        if (b * b - disc) % 4 != 0 {
            continue;
        }
        let ac = (b * b - disc) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let f = BinaryForm::new(sa, b, ac / sa);
                if f.is_reduced_indefinite() && f.is_primitive() {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out
}

/// All primitive reduced positive definite forms of a negative discriminant.
pub fn reduced_definite_forms(disc: i128) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    let amax = (-disc / 3).sqrt() + 1;
    for a in 1..=amax {
        for b in -a..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = BinaryForm::new(a, b, num / (4 * a));
            if f.is_reduced_definite() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// Proper equivalence classes of primitive forms of one discriminant, stored as
/// reduction cycles (indefinite) or reduced representatives (definite).
#[derive(Debug, Clone)]
pub struct FormClasses {
    disc: i128,
    cycles: Vec<Vec<BinaryForm>>,
    steps: Vec<Vec<i128>>,
    index: HashMap<BinaryForm, (usize, usize)>,
}

impl FormClasses {
    pub fn new(disc: i128) -> Result<Self> {
        let s = disc.abs().sqrt();
        if disc == 0 || (disc > 0 && s * s == disc) || disc.rem_euclid(4) > 1 {
            return Err(Error::InvalidInput(format!("{disc} is not a non-square discriminant")));
        }
        let mut cycles = Vec::new();
        let mut steps = Vec::new();
        let mut index = HashMap::new();
        if disc > 0 {
            for f in reduced_indefinite_forms(disc) {
                if index.contains_key(&f) {
                    continue;
                }
                let id = cycles.len();
                let mut cyc = Vec::new();
                let mut ts = Vec::new();
                let mut g = f;
                loop {
                    index.insert(g, (id, cyc.len()));
                    cyc.push(g);
                    let (h, t) = g.rho();
                    ts.push(t);
                    g = h;
                    if g == f {
                        break;
                    }
                }
                cycles.push(cyc);
                steps.push(ts);
            }
        } else {
            for f in reduced_definite_forms(disc) {
                index.insert(f, (cycles.len(), 0));
                cycles.push(vec![f]);
                steps.push(Vec::new());
            }
        }
        Ok(FormClasses { disc, cycles, steps, index })
    }

    pub fn disc(&self) -> i128 {
        self.disc
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Vec<BinaryForm>] {
        &self.cycles
    }

    fn reduce(&self, f: &BinaryForm) -> Result<(BinaryForm, GammaElement)> {
        if f.disc() != self.disc {
            return Err(Error::InvalidInput(format!("{f} has discriminant {} not {}", f.disc(), self.disc)));
        }
        if self.disc > 0 {
            f.reduce_indefinite()
        } else {
            f.reduce_definite()
        }
    }

    pub fn class_of(&self, f: &BinaryForm) -> Result<usize> {
        let (r, _) = self.reduce(f)?;
        self.index
            .get(&r)
            .map(|&(c, _)| c)
            .ok_or_else(|| Error::InvalidInput(format!("{f} is not primitive")))
    }

    /// A matrix `g ∈ SL(2, Z)` with `g·f = h`, or `None` if the forms are not
    /// properly equivalent.
    pub fn equivalence(&self, f: &BinaryForm, h: &BinaryForm) -> Result<Option<GammaElement>> {
        let (rf, gf) = self.reduce(f)?;
        let (rh, gh) = self.reduce(h)?;
        let (Some(&(cf, pf)), Some(&(ch, ph))) = (self.index.get(&rf), self.index.get(&rh)) else {
            return Err(Error::InvalidInput(format!("{f} or {h} is not primitive")));
        };
        if cf != ch {
            return Ok(None);
        }
        let len = self.cycles[cf].len();
        let mut walk = GammaElement::identity();
        let mut p = pf;
        while p != ph {
            walk = &GammaElement::from_i128(self.steps[cf][p], 1, -1, 0) * &walk;
            p = (p + 1) % len;
        }
        let g = &(&gh.inverse() * &walk) * &gf;
        debug_assert_eq!(f.act(&g).ok(), Some(*h));
        Ok(Some(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_matches_generators() {
        let f = BinaryForm::new(3, 5, -7);
        assert_eq!(f.act(&GammaElement::t_pow(1)).unwrap(), BinaryForm::new(3, -1, -9));
        assert_eq!(f.act(&GammaElement::s()).unwrap(), BinaryForm::new(-7, -5, 3));
        assert_eq!(f.act(&GammaElement::identity().neg()).unwrap(), f);
        let g = GammaElement::from_i128(2, 3, 1, 2);
        let h = GammaElement::from_i128(1, -4, 1, -3);
        let lhs = f.act(&(&g * &h)).unwrap();
        let rhs = f.act(&h).unwrap().act(&g).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rho_is_a_matrix_step() {
        let f = BinaryForm::new(1, 0, -5);
        let (g, t) = f.rho();
        assert_eq!(f.act(&GammaElement::from_i128(t, 1, -1, 0)).unwrap(), g);
        assert!(g.disc() == 20);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(FormClasses::new(20).unwrap().count(), 1);
        assert_eq!(FormClasses::new(5).unwrap().count(), 1);
        assert_eq!(FormClasses::new(17).unwrap().count(), 1);
        assert_eq!(FormClasses::new(65).unwrap().count(), 2);
        assert_eq!(FormClasses::new(-12).unwrap().count(), 1);
        assert_eq!(FormClasses::new(-15).unwrap().count(), 2);
        assert_eq!(FormClasses::new(-60).unwrap().count(), 2);
    }

    #[test]
    fn equivalence_matrix() {
        let fc = FormClasses::new(20).unwrap();
        let f = BinaryForm::new(1, 0, -5);
        let h = BinaryForm::new(11, -8, 1);
        let g = fc.equivalence(&f, &h).unwrap().unwrap();
        assert_eq!(f.act(&g).unwrap(), h);
        let fd = FormClasses::new(-15).unwrap();
        let a = BinaryForm::new(1, 1, 4);
        let b = BinaryForm::new(2, 1, 2);
        assert!(fd.equivalence(&a, &b).unwrap().is_none());
        let a2 = a.act(&GammaElement::from_i128(5, 2, 2, 1)).unwrap();
        let g = fd.equivalence(&a, &a2).unwrap().unwrap();
        assert_eq!(a.act(&g).unwrap(), a2);
    }

    #[test]
    fn centering() {
        for f in [BinaryForm::new(3, 17, 2), BinaryForm::new(-4, 9, 1), BinaryForm::new(-4, -4, 1), BinaryForm::new(5, -5, 1)] {
            let (g, k) = f.center();
            assert!(g.is_centered());
            assert_eq!(f.translate(k), g);
        }
    }
}
