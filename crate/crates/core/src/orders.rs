//! The orders `O₁ = Z[√D]` and `O₂ = Z[(1+√D)/2]`: ideals in Hermite normal
//! form, totally positive units and narrow class groups.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::One;
use std::fmt;

use crate::arith::{is_squarefree, quadratic_cf, cf_sqrt};
use crate::error::{Error, Result};
use crate::forms::{BinaryForm, FormClasses};
use crate::quad::QuadNum;
use crate::roots::{classify_root, roots_mod_m};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderTag {
    O1,
    O2,
}

impl fmt::Display for OrderTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderTag::O1 => "O1",
            OrderTag::O2 => "O2",
        })
    }
}

impl OrderTag {
    /// Discriminant of the order: `4D` for `O₁`, `D` for `O₂`.
    pub fn discriminant(self, d: i64) -> i128 {
        match self {
            OrderTag::O1 => 4 * d as i128,
            OrderTag::O2 => d as i128,
        }
    }
}

pub(crate) fn check_discriminant(d: i64) -> Result<()> {
    if d.rem_euclid(4) != 1 || d == 1 || !is_squarefree(d) {
        return Err(Error::InvalidInput(format!("D = {d} must be squarefree, ≠ 1 and ≡ 1 mod 4")));
    }
    Ok(())
}

/// `scalar · (m, μ + √D)` in `O₁`, or `scalar · ½(m, μ + √D)` in `O₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealHNF {
    pub d: i64,
    pub order: OrderTag,
    pub scalar: Ratio<u64>,
    pub m: u64,
    pub mu: u64,
}

impl fmt::Display for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = if self.order == OrderTag::O2 { "½" } else { "" };
        if self.scalar.is_one() {
            write!(f, "{half}({}, {} + √{})", self.m, self.mu, self.d)
        } else {
            write!(f, "{}·{half}({}, {} + √{})", self.scalar, self.m, self.mu, self.d)
        }
    }
}

fn o2_parity_ok(d: i64, m: u64, mu: u64) -> bool {
    let cof = (d as i128 - (mu as i128) * (mu as i128)) / m as i128;
    m % 2 == 0 && cof % 2 == 0
}

fn is_root(d: i64, m: u64, mu: u64) -> bool {
    ((mu as i128) * (mu as i128) - d as i128).rem_euclid(m as i128) == 0
}

pub fn ideal_from_root(d: i64, m: u64, mu: u64, order: OrderTag) -> Result<IdealHNF> {
    if m == 0 || !is_root(d, m, mu % m) {
        return Err(Error::InvalidInput(format!("{mu}² ≢ {d} mod {m}")));
    }
    let mu = mu % m;
    if order == OrderTag::O2 && !o2_parity_ok(d, m, mu) {
        return Err(Error::OrderMismatch { m, mu });
    }
    Ok(IdealHNF { d, order, scalar: Ratio::one(), m, mu })
}

impl IdealHNF {
    pub fn unit(d: i64, order: OrderTag) -> Self {
        match order {
            OrderTag::O1 => IdealHNF { d, order, scalar: Ratio::one(), m: 1, mu: 0 },
            OrderTag::O2 => IdealHNF { d, order, scalar: Ratio::one(), m: 2, mu: 1 },
        }
    }

    pub fn root(&self) -> (u64, u64) {
        (self.m, self.mu)
    }

    /// Norm of the primitive part.
    pub fn primitive_norm(&self) -> u64 {
        match self.order {
            OrderTag::O1 => self.m,
            OrderTag::O2 => self.m / 2,
        }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.scalar.is_one() && *self == IdealHNF::unit(self.d, self.order)
    }

    /// Basis rows of the primitive part, over `(√D, 1)` for `O₁` and `(ω, 1)` for `O₂`.
    pub fn basis_rows(&self) -> [(i128, i128); 2] {
        match self.order {
            OrderTag::O1 => [(1, self.mu as i128), (0, self.m as i128)],
            OrderTag::O2 => [(1, (self.mu as i128 - 1) / 2), (0, self.m as i128 / 2)],
        }
    }

    /// The binary form `N(xβ₁ + yβ₂)/N(I)` of the primitive part: `(m, −2μ, (μ²−D)/m)`
    /// for `O₁` and `(m/2, −μ, (μ²−D)/(2m))` for `O₂`.
    pub fn form(&self) -> BinaryForm {
        let (m, mu, d) = (self.m as i128, self.mu as i128, self.d as i128);
        match self.order {
            OrderTag::O1 => BinaryForm::new(m, -2 * mu, (mu * mu - d) / m),
            OrderTag::O2 => BinaryForm::new(m / 2, -mu, (mu * mu - d) / (2 * m)),
        }
    }

    pub fn from_form(d: i64, f: &BinaryForm) -> Result<Self> {
        if f.a <= 0 {
            return Err(Error::NegativeOrientation { m: f.a });
        }
        let disc = f.disc();
        if disc == 4 * d as i128 && f.b % 2 == 0 {
            let m = f.a as u64;
            let mu = (-f.b / 2).rem_euclid(f.a) as u64;
            ideal_from_root(d, m, mu, OrderTag::O1)
        } else if disc == d as i128 {
            let m = 2 * f.a as u64;
            let mu = (-f.b).rem_euclid(2 * f.a) as u64;
            ideal_from_root(d, m, mu, OrderTag::O2)
        } else {
            Err(Error::InvalidInput(format!("{f} has discriminant {disc}, expected {} or {d}", 4 * d)))
        }
    }
}

pub fn root_from_ideal(i: &IdealHNF) -> (u64, u64) {
    i.root()
}

/// `I` is invertible in `O₁` exactly when `m` is odd or `(D−μ²)/m` is odd.
pub fn is_invertible(d: i64, m: u64, mu: u64) -> bool {
    classify_root(d, m, mu) == OrderTag::O1
}

pub fn ideal_conjugate(a: &IdealHNF) -> IdealHNF {
    let mu = (a.m - a.mu % a.m) % a.m;
    IdealHNF { mu, ..a.clone() }
}

/// Row-style Hermite normal form `[(b1, b2), (0, b3)]` of the lattice spanned by
/// integer vectors `(x, y)`, with `b1, b3 > 0` and `0 ≤ b2 < b3`.
fn hnf2(vectors: &[(i128, i128)]) -> Result<(i128, i128, i128)> {
    let mut rows: Vec<(i128, i128)> = vectors.to_vec();
    let mut b1 = 0i128;
    let mut top = (0i128, 0i128);
    for v in rows.iter_mut() {
        if v.0 == 0 {
            continue;
        }
        if b1 == 0 {
            top = *v;
            b1 = v.0;
            *v = (0, 0);
            continue;
        }
        let e = top.0.extended_gcd(&v.0);
        let g = e.gcd;
        let new_top = (g, e.x * top.1 + e.y * v.1);
        let (p, q) = (top.0 / g, v.0 / g);
        let residual = (0, q * top.1 - p * v.1);
        top = new_top;
        b1 = g;
        *v = residual;
    }
    if b1 == 0 {
        return Err(Error::InvalidInput("degenerate lattice".into()));
    }
    let mut b3 = 0i128;
    for v in &rows {
        b3 = b3.gcd(&v.1);
    }
    if top.0 < 0 {
        top = (-top.0, -top.1);
    }
    if b3 == 0 {
        return Err(Error::InvalidInput("lattice has rank 1".into()));
    }
    let b2 = top.1.rem_euclid(b3);
    Ok((top.0, b2, b3))
}

pub fn ideal_mul(x: &IdealHNF, y: &IdealHNF) -> Result<IdealHNF> {
    if x.order != y.order || x.d != y.d {
        return Err(Error::InvalidInput(format!("cannot multiply {x} and {y}")));
    }
    let d = x.d as i128;
    let mut prods = Vec::with_capacity(4);
    for &(x1, y1) in &x.basis_rows() {
        for &(x2, y2) in &y.basis_rows() {
            let v = match x.order {
                OrderTag::O1 => (x1 * y2 + x2 * y1, x1 * x2 * d + y1 * y2),
                OrderTag::O2 => (x1 * x2 + x1 * y2 + x2 * y1, x1 * x2 * ((d - 1) / 4) + y1 * y2),
            };
            prods.push(v);
        }
    }
    let (b1, b2, b3) = hnf2(&prods)?;
    if b2 % b1 != 0 || b3 % b1 != 0 {
        return Err(Error::Internal(format!("product {x}·{y} is not an ideal lattice")));
    }
    let s = b1 as u64;
    let (m, mu) = match x.order {
        OrderTag::O1 => ((b3 / b1) as u64, (b2 / b1) as u64),
        OrderTag::O2 => ((2 * b3 / b1) as u64, (2 * b2 / b1 + 1) as u64),
    };
    let scalar = x.scalar * y.scalar * Ratio::from_integer(s);
    let out = IdealHNF { d: x.d, order: x.order, scalar, m, mu: mu % m };
    if !is_root(out.d, out.m, out.mu) {
        return Err(Error::Internal(format!("product {x}·{y} gave non-root {out}")));
    }
    Ok(out)
}

/// Smallest totally positive unit `ε > 1` of norm 1 in the given order.
pub fn totally_positive_fundamental_unit(d: i64, order: OrderTag) -> Result<QuadNum> {
    if d < 2 || (d as u64).sqrt().pow(2) == d as u64 {
        return Err(Error::InvalidInput(format!("{d} must be a positive non-square")));
    }
    let eps = match order {
        OrderTag::O1 => {
            let (x, y, _) = cf_sqrt(d as u64)?.fundamental_solution();
            QuadNum::new(x, y, 1, d)
        }
        OrderTag::O2 => {
            if d.rem_euclid(4) != 1 {
                return Err(Error::Unsupported(format!("O2 requires D ≡ 1 mod 4, got {d}")));
            }
            let cf = quadratic_cf(d, 1, 2)?;
            cf.period.iter().fold(QuadNum::one(d), |acc, st| &acc * &QuadNum::new(st.p, 1, st.q, d))
        }
    };
    let eps = if eps.signum() < 0 { -eps } else { eps };
    let eps = if eps.norm().is_one() { eps } else { &eps * &eps };
    debug_assert!(eps.is_totally_positive() && eps.norm().is_one());
    Ok(eps)
}

/// `t + u√Δ` halved: the pair `(t, u)` with `ε = (t + u√Δ)/2` for the order's discriminant `Δ`.
pub fn unit_trace_coords(eps: &QuadNum, order: OrderTag) -> (BigInt, BigInt) {
    let two = BigInt::from(2);
    let t: BigInt = (eps.rational_part() * Ratio::from_integer(two.clone())).to_integer();
    let u = match order {
        OrderTag::O1 => eps.irrational_part().to_integer(),
        OrderTag::O2 => (eps.irrational_part() * Ratio::from_integer(two)).to_integer(),
    };
    (t, u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitRelation {
    Equal,
    Cube,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitData {
    pub eps1: QuadNum,
    pub eps2: QuadNum,
    pub relation: UnitRelation,
}

impl UnitData {
    pub fn eps(&self, order: OrderTag) -> &QuadNum {
        match order {
            OrderTag::O1 => &self.eps1,
            OrderTag::O2 => &self.eps2,
        }
    }
}

pub fn unit_relation(d: i64) -> Result<UnitData> {
    check_discriminant(d)?;
    if d < 0 {
        return Err(Error::Unsupported("unit relation needs D > 0".into()));
    }
    let eps1 = totally_positive_fundamental_unit(d, OrderTag::O1)?;
    let eps2 = totally_positive_fundamental_unit(d, OrderTag::O2)?;
    let relation = if eps1 == eps2 {
        UnitRelation::Equal
    } else if eps2.pow(3) == eps1 {
        UnitRelation::Cube
    } else {
        return Err(Error::Internal(format!("ε₁ = {eps1} is neither ε₂ nor ε₂³ for ε₂ = {eps2}")));
    };
    if relation == UnitRelation::Cube && d.rem_euclid(8) != 5 {
        return Err(Error::Internal(format!("ε₁ = ε₂³ for D = {d} ≢ 5 mod 8")));
    }
    Ok(UnitData { eps1, eps2, relation })
}

/// Narrow ideal classes of one order, realized through proper equivalence of forms.
#[derive(Clone, Debug)]
pub struct NarrowClassGroup {
    pub d: i64,
    pub order: OrderTag,
    pub reps: Vec<IdealHNF>,
    pub h_plus: usize,
    classes: FormClasses,
    slot: Vec<usize>,
}

impl NarrowClassGroup {
    pub fn forms(&self) -> &FormClasses {
        &self.classes
    }

    /// Index of the class of an invertible ideal of this order.
    pub fn class_of(&self, i: &IdealHNF) -> Result<usize> {
        if i.order != self.order || i.d != self.d {
            return Err(Error::InvalidInput(format!("{i} is not an ideal of this order")));
        }
        if i.order == OrderTag::O1 && !is_invertible(i.d, i.m, i.mu) {
            return Err(Error::InvalidInput(format!("{i} is not invertible in O1")));
        }
        self.class_of_form(&i.form())
    }

    pub fn class_of_form(&self, f: &BinaryForm) -> Result<usize> {
        Ok(self.slot[self.classes.class_of(f)?])
    }

    /// Reference form of class `k`, namely the form of `reps[k]`.
    pub fn reference_form(&self, k: usize) -> BinaryForm {
        self.reps[k].form()
    }
}

pub fn narrow_class_group(d: i64, order: OrderTag) -> Result<NarrowClassGroup> {
    check_discriminant(d)?;
    if d.abs() > 1_000_000 {
        return Err(Error::Unsupported(format!("|D| = {} is beyond desk scale", d.abs())));
    }
    let classes = FormClasses::new(order.discriminant(d))?;
    let h = classes.count();
    let mut reps: Vec<Option<IdealHNF>> = vec![None; h];
    let mut found = 0;
    let mut m = 1u64;
    while found < h {
        for mu in roots_mod_m(d, m) {
            if classify_root(d, m, mu) != order {
                continue;
            }
            let ideal = ideal_from_root(d, m, mu, order)?;
            let f = ideal.form();
            if !f.is_primitive() {
                continue;
            }
            let k = classes.class_of(&f)?;
            if reps[k].is_none() {
                reps[k] = Some(ideal);
                found += 1;
            }
        }
        m += 1;
        if m > 1 << 40 {
            return Err(Error::Internal("class representative search did not terminate".into()));
        }
    }
    let mut reps: Vec<IdealHNF> = reps.into_iter().map(Option::unwrap).collect();
    reps.sort_by_key(|i| (i.m, i.mu));
    let unit = IdealHNF::unit(d, order);
    if reps[0] != unit {
        return Err(Error::Internal(format!("first class representative {} is not the unit ideal", reps[0])));
    }
    let mut slot = vec![0; h];
    for (k, r) in reps.iter().enumerate() {
        slot[classes.class_of(&r.form())?] = k;
    }
    Ok(NarrowClassGroup { d, order, h_plus: reps.len(), reps, classes, slot })
}

fn valuation2(x: i128) -> u32 {
    if x == 0 {
        u32::MAX
    } else {
        x.trailing_zeros()
    }
}

/// An ideal `(n', ν')` of the order with `n | n'` and `ν' ≡ ν (mod n)`, so that
/// products with ideals of norm coprime to `n` satisfy the filter. `None` when
/// no root of this order class can satisfy it.
fn congruence_ideal(d: i64, order: OrderTag, n: u64, nu: u64) -> Result<Option<IdealHNF>> {
    let (nn, dd) = (n as i128, d as i128);
    let nu = nu % n;
    let cof_parity_odd = |m: i128, mu: i128| ((dd - mu * mu) / m) % 2 != 0;
    match order {
        OrderTag::O1 => {
            if n % 2 == 1 || cof_parity_odd(nn, nu as i128) {
                return Ok(Some(ideal_from_root(d, n, nu, OrderTag::O1)?));
            }
            for s in 1..=64u32 {
                let n2 = nn << s;
                if n2 > u32::MAX as i128 {
                    break;
                }
                for t in 0..(1i128 << s) {
                    let nu2 = nu as i128 + t * nn;
                    let diff = dd - nu2 * nu2;
                    if diff % n2 == 0 && valuation2(diff) == valuation2(n2) {
                        return Ok(Some(ideal_from_root(d, n2 as u64, nu2 as u64, OrderTag::O1)?));
                    }
                }
            }
            Err(Error::Internal(format!("no O1 lift of ({n}, {nu}) found")))
        }
        OrderTag::O2 => {
            if n % 2 == 0 {
                if cof_parity_odd(nn, nu as i128) {
                    return Ok(None);
                }
                Ok(Some(ideal_from_root(d, n, nu, OrderTag::O2)?))
            } else {
                let nu_odd = if nu % 2 == 1 { nu } else { nu + n };
                Ok(Some(ideal_from_root(d, 2 * n, nu_odd, OrderTag::O2)?))
            }
        }
    }
}

/// Whether some root of the given order class satisfies the filter `(n, ν)`.
pub fn filter_admits(d: i64, order: OrderTag, n: u64, nu: u64) -> Result<bool> {
    Ok(congruence_ideal(d, order, n, nu)?.is_some())
}

pub fn class_shift_search_bound(d: i64) -> u64 {
    (50.0 * (d.abs() as f64).sqrt()).ceil() as u64
}

/// A representative of the narrow class of `rep` whose root `(m̃, μ̃)` satisfies
/// `m̃ ≡ 0 (mod n)` and `μ̃ ≡ ν (mod n)`, using auxiliary norms up to
/// `50·√D`.
pub fn class_shift_representative(
    group: &NarrowClassGroup,
    rep: &IdealHNF,
    n: u64,
    nu: u64,
) -> Result<IdealHNF> {
    class_shift_representative_bounded(group, rep, n, nu, class_shift_search_bound(group.d))
}

pub fn class_shift_representative_bounded(
    group: &NarrowClassGroup,
    rep: &IdealHNF,
    n: u64,
    nu: u64,
    bound: u64,
) -> Result<IdealHNF> {
    let d = group.d;
    let order = group.order;
    if n == 0 || !is_root(d, n, nu % n) {
        return Err(Error::InvalidInput(format!("ν = {nu} is not a root of D = {d} mod {n}")));
    }
    let nu = nu % n;
    let Some(cong) = congruence_ideal(d, order, n, nu)? else {
        return Err(Error::InvalidInput(format!(
            "no {order} root satisfies m ≡ 0 mod {n}, μ ≡ {nu} mod {n}"
        )));
    };
    let target = group.class_of(&primitive_part(&ideal_mul(rep, &ideal_conjugate(&cong))?))?;
    let filter_ok = |i: &IdealHNF| {
        i.m % n == 0 && i.mu % n == nu && classify_root(d, i.m, i.mu) == order && i.form().is_primitive()
    };
    for norm in 1..=bound {
        if norm.gcd(&n) != 1 {
            continue;
        }
        let m0 = match order {
            OrderTag::O1 => norm,
            OrderTag::O2 => 2 * norm,
        };
        for mu0 in roots_mod_m(d, m0) {
            if classify_root(d, m0, mu0) != order {
                continue;
            }
            let aux = ideal_from_root(d, m0, mu0, order)?;
            if group.class_of(&aux)? != target {
                continue;
            }
            let prod = primitive_part(&ideal_mul(&cong, &aux)?);
            if filter_ok(&prod) && group.class_of(&prod)? == group.class_of(rep)? {
                return Ok(prod);
            }
        }
    }
    Err(Error::SearchExhausted { bound })
}

fn primitive_part(i: &IdealHNF) -> IdealHNF {
    IdealHNF { scalar: Ratio::one(), ..i.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_examples() {
        let i = ideal_from_root(5, 11, 4, OrderTag::O1).unwrap();
        assert_eq!(i.basis_rows(), [(1, 4), (0, 11)]);
        let j = ideal_from_root(5, 2, 1, OrderTag::O2).unwrap();
        assert_eq!(j.basis_rows(), [(1, 0), (0, 1)]);
        assert!(ideal_from_root(5, 1, 0, OrderTag::O1).unwrap().is_unit_ideal());
        assert_eq!(ideal_from_root(5, 10, 5, OrderTag::O2).map(|i| i.m), Ok(10));
        assert!(matches!(ideal_from_root(5, 4, 1, OrderTag::O2), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn products() {
        let i = ideal_from_root(5, 11, 4, OrderTag::O1).unwrap();
        let ic = ideal_conjugate(&i);
        assert_eq!(ic.mu, 7);
        let p = ideal_mul(&i, &ic).unwrap();
        assert_eq!((p.scalar, p.m, p.mu), (Ratio::from_integer(11), 1, 0));
        let i0 = ideal_from_root(5, 2, 1, OrderTag::O1).unwrap();
        let sq = ideal_mul(&i0, &i0).unwrap();
        assert_eq!((sq.scalar, sq.m, sq.mu), (Ratio::from_integer(2), 2, 1));
        let u = IdealHNF::unit(5, OrderTag::O1);
        assert_eq!(ideal_mul(&i, &u).unwrap(), i);
        let u2 = IdealHNF::unit(5, OrderTag::O2);
        let j = ideal_from_root(5, 10, 5, OrderTag::O2).unwrap();
        assert_eq!(ideal_mul(&j, &u2).unwrap(), j);
    }

    #[test]
    fn units() {
        let u = unit_relation(5).unwrap();
        assert_eq!(u.eps1, QuadNum::new(9, 4, 1, 5));
        assert_eq!(u.eps2, QuadNum::new(3, 1, 2, 5));
        assert_eq!(u.relation, UnitRelation::Cube);
        let u = unit_relation(17).unwrap();
        assert_eq!(u.eps2, QuadNum::new(33, 8, 1, 17));
        assert_eq!(u.relation, UnitRelation::Equal);
        assert_eq!(unit_trace_coords(&u.eps2, OrderTag::O2), (BigInt::from(66), BigInt::from(16)));
    }

    #[test]
    fn class_groups() {
        assert_eq!(narrow_class_group(5, OrderTag::O1).unwrap().h_plus, 1);
        assert_eq!(narrow_class_group(17, OrderTag::O2).unwrap().h_plus, 1);
        let g = narrow_class_group(65, OrderTag::O2).unwrap();
        assert_eq!(g.h_plus, 2);
        assert!(g.reps[0].is_unit_ideal());
    }

    #[test]
    fn class_shift_examples() {
        let g1 = narrow_class_group(5, OrderTag::O1).unwrap();
        let r = class_shift_representative(&g1, &g1.reps[0], 1, 0).unwrap();
        assert_eq!(r.root(), (1, 0));
        let r = class_shift_representative(&g1, &g1.reps[0], 4, 1).unwrap();
        assert!(r.m % 4 == 0 && r.mu % 4 == 1 && is_invertible(5, r.m, r.mu));
        let g2 = narrow_class_group(5, OrderTag::O2).unwrap();
        let r = class_shift_representative(&g2, &g2.reps[0], 2, 1).unwrap();
        assert!(r.m % 2 == 0 && r.mu % 2 == 1 && classify_root(5, r.m, r.mu) == OrderTag::O2);
    }
}
