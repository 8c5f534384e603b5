//! Geodesics in the upper half plane with exact endpoints, their tops, and the
//! Γ₀(n)-orbits of the base geodesics attached to ideal classes.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::arith::reduce_signed;
use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::modular::{coset_reps_between, GammaElement, ModMat, P1};
use crate::orders::{
    class_shift_representative_bounded, class_shift_search_bound, filter_admits, narrow_class_group,
    unit_relation, unit_trace_coords, IdealHNF, NarrowClassGroup, OrderTag, UnitData, UnitRelation,
};
use crate::quad::QuadNum;
use crate::roots::RootFilter;

/// A boundary point of the upper half plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Finite(QuadNum),
    Infinity,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&QuadNum> {
        match self {
            Endpoint::Finite(q) => Some(q),
            Endpoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Endpoint::Infinity)
    }

    /// Möbius image `(az + b)/(cz + d)`.
    pub fn act(&self, g: &GammaElement, d: i64) -> Endpoint {
        let q = |x: &BigInt| QuadNum::from_int(x.clone(), d);
        match self {
            Endpoint::Infinity => {
                if g.c.is_zero() {
                    Endpoint::Infinity
                } else {
                    Endpoint::Finite(&q(&g.a) / &q(&g.c))
                }
            }
            Endpoint::Finite(z) => {
                let den = &(&q(&g.c) * z) + &q(&g.d);
                if den.is_zero() {
                    Endpoint::Infinity
                } else {
                    Endpoint::Finite(&(&(&q(&g.a) * z) + &q(&g.b)) / &den)
                }
            }
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Finite(q) => write!(f, "{q}"),
            Endpoint::Infinity => f.write_str("∞"),
        }
    }
}

/// An oriented geodesic from `minus` to `plus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Geodesic {
    pub d: i64,
    pub minus: Endpoint,
    pub plus: Endpoint,
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} → {}]", self.minus, self.plus)
    }
}

impl Geodesic {
    pub fn new(d: i64, minus: Endpoint, plus: Endpoint) -> Result<Self> {
        if minus == plus {
            return Err(Error::InvalidInput("geodesic endpoints must differ".into()));
        }
        Ok(Geodesic { d, minus, plus })
    }

    pub fn is_positively_oriented(&self) -> bool {
        match (&self.minus, &self.plus) {
            (Endpoint::Finite(a), Endpoint::Finite(b)) => a < b,
            _ => false,
        }
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic { d: self.d, minus: self.plus.clone(), plus: self.minus.clone() }
    }
}

/// The geodesic with endpoints `(μ ∓ √D)/m`.
pub fn geodesic_from_root(d: i64, m: u64, mu: u64) -> Result<Geodesic> {
    if m == 0 || reduce_signed((mu as i128) * (mu as i128) - d as i128, m) != 0 {
        return Err(Error::InvalidInput(format!("{mu}² ≢ {d} mod {m}")));
    }
    let minus = QuadNum::new(mu, -1, m, d);
    let plus = QuadNum::new(mu, 1, m, d);
    Geodesic::new(d, Endpoint::Finite(minus), Endpoint::Finite(plus))
}

/// The geodesic joining the roots of `f(x, 1)`, oriented from `(−B − √Δ)/(2A)`
/// to `(−B + √Δ)/(2A)`, where `Δ = k²D`.
pub fn geodesic_from_form(d: i64, f: &BinaryForm) -> Result<Geodesic> {
    let disc = f.disc();
    let ratio = disc / d as i128;
    let k = ratio.sqrt();
    if disc % d as i128 != 0 || k * k != ratio || f.a == 0 {
        return Err(Error::InvalidInput(format!("{f} is not attached to Q(√{d})")));
    }
    let minus = QuadNum::new(-f.b, -k, 2 * f.a, d);
    let plus = QuadNum::new(-f.b, k, 2 * f.a, d);
    Geodesic::new(d, Endpoint::Finite(minus), Endpoint::Finite(plus))
}

pub fn apply_gamma(g: &GammaElement, c: &Geodesic) -> Geodesic {
    Geodesic { d: c.d, minus: c.minus.act(g, c.d), plus: c.plus.act(g, c.d) }
}

/// The highest point `x + i·√D/m` of a positively oriented geodesic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TopPoint {
    pub x: BigRational,
    pub m: u64,
}

impl TopPoint {
    /// The root `(m, μ mod m)` with `x ≡ μ/m` modulo translations.
    pub fn root(&self) -> (u64, u64) {
        let mu = (&self.x * BigRational::from_integer(BigInt::from(self.m))).to_integer();
        (self.m, reduce_signed(mu.to_i128().unwrap_or(0), self.m))
    }
}

pub fn top_of(c: &Geodesic) -> Result<Option<TopPoint>> {
    if !c.is_positively_oriented() {
        return Ok(None);
    }
    let (a, b) = (c.minus.finite().unwrap(), c.plus.finite().unwrap());
    let two = QuadNum::from_int(2, c.d);
    let mid = &(a + b) / &two;
    let half = &(b - a) / &two;
    if !mid.is_rational() || !half.rational_part().is_zero() {
        return Err(Error::NotRootGeodesic);
    }
    let w = half.irrational_part();
    let m_ratio = w.recip();
    if !m_ratio.is_integer() {
        return Err(Error::NotRootGeodesic);
    }
    let m = m_ratio.to_integer().to_u64().ok_or(Error::NotRootGeodesic)?;
    let x = mid.rational_part();
    if !(&x * BigRational::from_integer(BigInt::from(m))).is_integer() {
        return Err(Error::NotRootGeodesic);
    }
    Ok(Some(TopPoint { x, m }))
}

/// `𝔅·diag(ε, ε')·𝔅⁻¹` for the basis `𝔅 = (β₁ β₁'; β₂ β₂')` of an ideal,
/// which fixes the ideal's geodesic and translates along it.
pub fn conjugated_unit_matrix(ideal: &IdealHNF, eps: &QuadNum) -> Result<GammaElement> {
    let d = ideal.d;
    let (m, mu) = (ideal.m as i64, ideal.mu as i64);
    let (b1, b2) = match ideal.order {
        OrderTag::O1 => (QuadNum::new(mu, 1, 1, d), QuadNum::from_int(m, d)),
        OrderTag::O2 => (QuadNum::new(mu, 1, 2, d), QuadNum::new(m, 0, 2, d)),
    };
    let (c1, c2) = (b1.conj(), b2.conj());
    let e = eps.clone();
    let ec = eps.conj();
    let det = &(&b1 * &c2) - &(&c1 * &b2);
    // 𝔅⁻¹ = (1/det)·(β₂' −β₁'; −β₂ β₁)
    let m11 = &(&(&(&b1 * &e) * &c2) - &(&(&c1 * &ec) * &b2)) / &det;
    let m12 = &(&(&(&c1 * &ec) * &b1) - &(&(&b1 * &e) * &c1)) / &det;
    let m21 = &(&(&(&b2 * &e) * &c2) - &(&(&c2 * &ec) * &b2)) / &det;
    let m22 = &(&(&(&c2 * &ec) * &b1) - &(&(&b2 * &e) * &c1)) / &det;
    let int = |x: &QuadNum| -> Result<BigInt> {
        if x.is_integer() {
            Ok(x.a().clone())
        } else {
            Err(Error::IntegralityFailure(format!("entry {x} of the conjugated unit matrix")))
        }
    };
    GammaElement::new(int(&m11)?, int(&m12)?, int(&m21)?, int(&m22)?)
}

/// The automorph of a form for the unit `ε^j` of the given order.
fn automorph_power(f: &BinaryForm, eps: &QuadNum, order: OrderTag, j: u32) -> Result<GammaElement> {
    if f.disc() != order.discriminant(eps.d()) {
        return Err(Error::InvalidInput(format!("{f} does not match the order {order}")));
    }
    let (t, u) = unit_trace_coords(&eps.pow(j), order);
    let fb = BigInt::from(f.b);
    if !(&t - &fb * &u).is_even() {
        return Err(Error::IntegralityFailure(format!("automorph of {f} for ε^{j}")));
    }
    Ok(f.automorph(&t, &u))
}

/// Generator of the stabilizer in Γ₀(n) of the geodesic of `f` (discriminant
/// of the order), as the automorph of the smallest power `ε^j` lying in Γ₀(n).
pub fn stabilizer_generator(f: &BinaryForm, eps: &QuadNum, order: OrderTag, n: u64) -> Result<(GammaElement, u32)> {
    for j in 1..=12u32 {
        let g = automorph_power(f, eps, order, j)?;
        if g.is_in_gamma0(n) {
            return Ok((g, j));
        }
    }
    Err(Error::Internal(format!("no power ε^j, j ≤ 12, stabilizes {f} inside Γ₀({n})")))
}

/// Generator of the SL(2, Z) stabilizer of a form, up to sign.
pub fn form_stabilizer(f: &BinaryForm, d: i64, order: OrderTag) -> Result<GammaElement> {
    if d > 0 {
        let eps = crate::orders::totally_positive_fundamental_unit(d, order)?;
        return automorph_power(f, &eps, order, 1);
    }
    let disc = f.disc();
    if disc == -3 {
        return Ok(f.automorph(&BigInt::one(), &BigInt::one()));
    }
    if disc == -4 {
        return Ok(f.automorph(&BigInt::zero(), &BigInt::one()));
    }
    Ok(GammaElement::identity())
}

/// Number of copies into which each O₂ class splits at level `n`.
pub fn expected_splitting(n: u64, relation: UnitRelation) -> usize {
    if n % 2 == 1 {
        1
    } else if n % 4 == 0 {
        2
    } else {
        match relation {
            UnitRelation::Equal => 3,
            UnitRelation::Cube => 1,
        }
    }
}

/// Γ₀(n)-orbit labels for one proper equivalence class of forms.
#[derive(Clone, Debug)]
pub struct OrbitContext {
    pub d: i64,
    pub order: OrderTag,
    pub class: usize,
    pub disc: i128,
    pub reference: BinaryForm,
    pub n: u64,
    p1: P1,
    labels: Vec<usize>,
    terminals: Vec<(BinaryForm, ModMat)>,
}

/// A node of an orbit tree: a centered form `γ·f_ref` and `γ mod n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitNode {
    pub form: BinaryForm,
    pub gamma: ModMat,
}

/// Centered forms with `|C| ≥ |A|`: the roots of the orbit trees.
pub fn terminal_forms(disc: i128) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    let amax = if disc > 0 { disc.sqrt() / 2 + 1 } else { (-disc / 3).sqrt() + 1 };
    for a in -amax..=amax {
        if a == 0 || (disc < 0 && a < 0) {
            continue;
        }
        let aa: i128 = a.abs();
        for b in -aa..=aa {
            let f0 = BinaryForm::new(a, b, 0);
            if !f0.is_centered() || (b * b - disc) % (4 * a) != 0 {
                continue;
            }
            let f = BinaryForm::new(a, b, (b * b - disc) / (4 * a));
            if f.c.abs() >= aa && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out
}

impl OrbitContext {
    pub fn new(group: &NarrowClassGroup, class: usize, n: u64) -> Result<Self> {
        let d = group.d;
        let disc = group.order.discriminant(d);
        let reference = group.reference_form(class);
        let sigma = form_stabilizer(&reference, d, group.order)?;
        let p1 = P1::new(n);
        let labels = p1.orbits_under(&sigma.to_mod(n));
        let mut terminals = Vec::new();
        for t in terminal_forms(disc) {
            if group.class_of_form(&t)? != class {
                continue;
            }
            let g = group
                .forms()
                .equivalence(&reference, &t)?
                .ok_or_else(|| Error::Internal(format!("{t} is not equivalent to {reference}")))?;
            terminals.push((t, g.to_mod(n)));
        }
        Ok(OrbitContext { d, order: group.order, class, disc, reference, n, p1, labels, terminals })
    }

    pub fn orbit_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |x| x + 1)
    }

    pub fn orbit_id(&self, g: &ModMat) -> usize {
        self.labels[self.p1.index_of_row(g)]
    }

    pub fn orbit_id_of(&self, g: &GammaElement) -> usize {
        self.orbit_id(&g.to_mod(self.n))
    }

    /// All centered forms of the class with `|A| ≤ abound`, each exactly once.
    pub fn nodes(&self, abound: i128, budget: usize) -> Result<Vec<OrbitNode>> {
        let count = AtomicUsize::new(0);
        let disc = self.disc;
        let parts: Vec<Result<Vec<OrbitNode>>> = self
            .terminals
            .par_iter()
            .filter(|(t, _)| t.a.abs() <= abound)
            .map(|&(t, g)| {
                let mut out = Vec::new();
                let mut stack = vec![OrbitNode { form: t, gamma: g }];
                while let Some(node) = stack.pop() {
                    if count.fetch_add(1, Ordering::Relaxed) >= budget {
                        return Err(Error::BudgetExceeded { budget });
                    }
                    let f = node.form;
                    let aa = f.a.abs();
                    let h = f.b as f64 / (2.0 * f.a as f64);
                    let spread = ((abound as f64 + disc.abs() as f64 / (4.0 * aa as f64)) / aa as f64).sqrt() + 1.0;
                    let (klo, khi) = ((h - spread).floor() as i128, (h + spread).ceil() as i128);
                    for k in klo..=khi {
                        let fk = f.a * k * k - f.b * k + f.c;
                        if fk.abs() <= aa || fk.abs() > abound {
                            continue;
                        }
                        let child = BinaryForm::new(fk, 2 * f.a * k - f.b, f.a);
                        if child.is_centered() {
                            stack.push(OrbitNode { form: child, gamma: node.gamma.s_t_left(k) });
                        }
                    }
                    out.push(node);
                }
                Ok(out)
            })
            .collect();
        let mut all = Vec::new();
        for p in parts {
            all.extend(p?);
        }
        Ok(all)
    }
}

/// One geodesic of the base set.
#[derive(Clone, Debug)]
pub struct BaseGeodesic {
    pub order: OrderTag,
    pub class: usize,
    pub copy: usize,
    pub ideal: IdealHNF,
    pub form: BinaryForm,
    pub geodesic: Geodesic,
    /// `γ` with `γ·f_ref = form`, where `f_ref` is the class reference form.
    pub conjugator: GammaElement,
    pub stabilizer: GammaElement,
    pub j: u32,
    pub length: f64,
    pub orbit_id: usize,
}

#[derive(Clone, Debug)]
pub struct BaseGeodesicSet {
    pub d: i64,
    pub n: u64,
    pub nu: u64,
    pub units: UnitData,
    pub geodesics: Vec<BaseGeodesic>,
    pub h1: usize,
    pub h2: usize,
    pub s: usize,
    groups: HashMap<OrderTag, NarrowClassGroup>,
}

impl BaseGeodesicSet {
    pub fn group(&self, order: OrderTag) -> &NarrowClassGroup {
        &self.groups[&order]
    }

    pub fn filter(&self) -> RootFilter {
        RootFilter { n: self.n, nu: self.nu }
    }

    pub fn total_length(&self) -> f64 {
        self.geodesics.iter().map(|g| g.length).sum()
    }

    pub fn of_order(&self, order: OrderTag) -> impl Iterator<Item = &BaseGeodesic> {
        self.geodesics.iter().filter(move |g| g.order == order)
    }
}

fn shift_with_retries(group: &NarrowClassGroup, rep: &IdealHNF, n: u64, nu: u64) -> Result<IdealHNF> {
    let mut bound = class_shift_search_bound(group.d);
    let mut last = Error::SearchExhausted { bound };
    for _ in 0..4 {
        match class_shift_representative_bounded(group, rep, n, nu, bound) {
            Ok(i) => return Ok(i),
            Err(e @ Error::SearchExhausted { .. }) => last = e,
            Err(e) => return Err(e),
        }
        bound *= 4;
    }
    Err(last)
}

fn bottom_row_matrix(c: i128, d: i128) -> GammaElement {
    let e = c.extended_gcd(&d);
    debug_assert_eq!(e.gcd, 1);
    GammaElement::from_i128(e.y, -e.x, c, d)
}

fn base_for_class(
    group: &NarrowClassGroup,
    units: &UnitData,
    class: usize,
    filter: RootFilter,
) -> Result<Vec<BaseGeodesic>> {
    let d = group.d;
    let order = group.order;
    let (n, nu) = (filter.n, filter.nu);
    let eps = units.eps(order);
    let ctx = OrbitContext::new(group, class, n)?;
    let shifted = shift_with_retries(group, &group.reps[class], n, nu)?;
    let f = shifted.form();
    let reference = group.reference_form(class);
    let beta = group
        .forms()
        .equivalence(&reference, &f)?
        .ok_or_else(|| Error::Internal(format!("class shift of class {class} left the class")))?;
    let make = |form: BinaryForm, conj: GammaElement, copy: usize| -> Result<BaseGeodesic> {
        let ideal = IdealHNF::from_form(d, &form)?;
        if !filter.accepts(ideal.m, ideal.mu) {
            return Err(Error::Internal(format!("base geodesic top {} misses the filter", ideal)));
        }
        let (stab, j) = stabilizer_generator(&form, eps, order, n)?;
        Ok(BaseGeodesic {
            order,
            class,
            copy,
            geodesic: geodesic_from_form(d, &form)?,
            form,
            orbit_id: ctx.orbit_id_of(&conj),
            conjugator: conj,
            stabilizer: stab,
            j,
            length: 2.0 * j as f64 * eps.to_f64().ln(),
            ideal,
        })
    };
    if order == OrderTag::O1 || n % 2 == 1 {
        return Ok(vec![make(f, beta, 0)?]);
    }
    let half = n / 2;
    let reps = coset_reps_between(n, half, |_, _| true)?;
    let mut wanted: Vec<usize> = reps.iter().map(|delta| ctx.orbit_id_of(&(delta * &beta))).collect();
    wanted.sort_unstable();
    wanted.dedup();
    let mut found: Vec<(usize, GammaElement)> = Vec::new();
    let signed = |k: i128| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) };
    let scan = 64 * n as i128;
    'outer: for kc in 0..scan {
        let c = half as i128 * signed(kc);
        for kd in 1..scan {
            let dd = signed(kd);
            if c.gcd(&dd) != 1 || f.eval(dd, -c) <= 0 {
                continue;
            }
            let delta = bottom_row_matrix(c, dd);
            let conj = &delta * &beta;
            let id = ctx.orbit_id_of(&conj);
            if found.iter().any(|(i, _)| *i == id) {
                continue;
            }
            found.push((id, conj));
            if found.len() == wanted.len() {
                break 'outer;
            }
        }
    }
    if found.len() != wanted.len() {
        return Err(Error::Internal(format!(
            "found {} of {} positively oriented O2 copies for class {class}",
            found.len(),
            wanted.len()
        )));
    }
    found.sort_by_key(|(id, _)| *id);
    found
        .into_iter()
        .enumerate()
        .map(|(copy, (_, conj))| make(reference.act(&conj)?, conj, copy))
        .collect()
}

/// The base geodesics `c₁, …, c_h` for the filter `(n, ν)`.
pub fn base_geodesic_set(d: i64, n: u64, nu: i64) -> Result<BaseGeodesicSet> {
    if d < 0 {
        return Err(Error::Unsupported("base geodesics need D > 0".into()));
    }
    let filter = RootFilter::new(d, n, nu)?;
    let units = unit_relation(d)?;
    let mut geodesics = Vec::new();
    let mut groups = HashMap::new();
    let (mut h1, mut h2) = (0, 0);
    let mut splits = Vec::new();
    for order in [OrderTag::O1, OrderTag::O2] {
        let group = narrow_class_group(d, order)?;
        if filter_admits(d, order, filter.n, filter.nu)? {
            let per_class: Vec<Vec<BaseGeodesic>> = (0..group.h_plus)
                .into_par_iter()
                .map(|k| base_for_class(&group, &units, k, filter))
                .collect::<Result<_>>()?;
            for v in per_class {
                if order == OrderTag::O2 {
                    splits.push(v.len());
                }
                geodesics.extend(v);
            }
            match order {
                OrderTag::O1 => h1 = group.h_plus,
                OrderTag::O2 => h2 = group.h_plus,
            }
        }
        groups.insert(order, group);
    }
    let s = splits.first().copied().unwrap_or(0);
    if splits.iter().any(|&x| x != s) {
        return Err(Error::Internal(format!("O2 classes split unevenly: {splits:?}")));
    }
    if h2 > 0 && s != expected_splitting(filter.n, units.relation) {
        return Err(Error::Internal(format!(
            "splitting number {s} differs from the case table value {}",
            expected_splitting(filter.n, units.relation)
        )));
    }
    Ok(BaseGeodesicSet { d, n: filter.n, nu: filter.nu, units, geodesics, h1, h2, s, groups })
}

/// Result of walking the orbits of the base geodesics.
#[derive(Clone, Debug, Default)]
pub struct TopsReport {
    pub roots: BTreeSet<(u64, u64)>,
    /// Tops produced, counted once per matching base geodesic.
    pub produced: usize,
    /// Tops in accepted orbits that violate the filter.
    pub stray: usize,
    pub nodes_visited: usize,
}

impl TopsReport {
    pub fn duplicates(&self) -> usize {
        self.produced - self.roots.len()
    }
}

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Tops `(m, μ)` with `m ≤ M` of all Γ₀(n)-images of the base geodesics.
pub fn enumerate_tops(base: &BaseGeodesicSet, big_m: u64) -> Result<TopsReport> {
    enumerate_tops_with_budget(base, big_m, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_tops_with_budget(base: &BaseGeodesicSet, big_m: u64, budget: usize) -> Result<TopsReport> {
    let mut report = TopsReport::default();
    let filter = base.filter();
    let mut by_class: Vec<((OrderTag, usize), Vec<usize>)> = Vec::new();
    for g in &base.geodesics {
        match by_class.iter_mut().find(|(k, _)| *k == (g.order, g.class)) {
            Some((_, ids)) => ids.push(g.orbit_id),
            None => by_class.push(((g.order, g.class), vec![g.orbit_id])),
        }
    }
    for ((order, class), ids) in by_class {
        let group = base.group(order);
        let ctx = OrbitContext::new(group, class, base.n)?;
        let abound = match order {
            OrderTag::O1 => big_m as i128,
            OrderTag::O2 => (big_m / 2) as i128,
        };
        let nodes = ctx.nodes(abound, budget)?;
        report.nodes_visited += nodes.len();
        for node in nodes {
            if node.form.a <= 0 {
                continue;
            }
            let hits = ids.iter().filter(|&&i| i == ctx.orbit_id(&node.gamma)).count();
            if hits == 0 {
                continue;
            }
            let ideal = IdealHNF::from_form(base.d, &node.form)?;
            if !filter.accepts(ideal.m, ideal.mu) {
                report.stray += 1;
                continue;
            }
            report.produced += hits;
            report.roots.insert(ideal.root());
        }
    }
    Ok(report)
}

/// Coefficients `a_ij + b_ij√D = s·β_i'β_j/N(I)` of an ideal class representative,
/// with `s = 1` for `O₁` and `s = 2` for `O₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetData {
    pub a: [[BigInt; 2]; 2],
    pub b: [[BigInt; 2]; 2],
}

pub fn coset_data(ideal: &IdealHNF) -> Result<CosetData> {
    let d = ideal.d;
    let (m, mu) = (ideal.m as i64, ideal.mu as i64);
    let (beta, s, norm) = match ideal.order {
        OrderTag::O1 => ([QuadNum::new(mu, 1, 1, d), QuadNum::from_int(m, d)], 1, m),
        OrderTag::O2 => ([QuadNum::new(mu, 1, 2, d), QuadNum::new(m, 0, 2, d)], 2, m / 2),
    };
    let scale = QuadNum::new(s, 0, norm, d);
    let mut a: [[BigInt; 2]; 2] = Default::default();
    let mut b: [[BigInt; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let x = &(&beta[i].conj() * &beta[j]) * &scale;
            if !x.c().is_one() {
                return Err(Error::IntegralityFailure(format!("coefficient {x} of {ideal}")));
            }
            a[i][j] = x.a().clone();
            b[i][j] = x.b().clone();
        }
    }
    Ok(CosetData { a, b })
}

/// `(μ, m)` of the top of `γ·c_I`, before reducing `μ` modulo `m`.
pub fn coset_parametrization(g: &GammaElement, data: &CosetData) -> Result<(BigInt, BigInt)> {
    let row1 = [&g.a, &g.b];
    let row2 = [&g.c, &g.d];
    let mut m = BigInt::zero();
    let mut mu = BigInt::zero();
    for i in 0..2 {
        for j in 0..2 {
            m += row2[i] * row2[j] * &data.a[i][j];
            mu += row1[i] * row2[j] * &data.a[j][i];
        }
    }
    if !m.is_positive() {
        return Err(Error::NegativeOrientation { m: m.to_i128().unwrap_or(i128::MIN) });
    }
    Ok((mu, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_tops() {
        let c = geodesic_from_root(5, 11, 4).unwrap();
        assert_eq!(c.minus, Endpoint::Finite(QuadNum::new(4, -1, 11, 5)));
        let t = top_of(&c).unwrap().unwrap();
        assert_eq!(t.root(), (11, 4));
        assert_eq!(top_of(&c.reversed()).unwrap(), None);
        let v = Geodesic::new(5, Endpoint::Finite(QuadNum::zero(5)), Endpoint::Infinity).unwrap();
        assert_eq!(top_of(&v).unwrap(), None);
        let c1 = geodesic_from_root(5, 1, 0).unwrap();
        let s = apply_gamma(&GammaElement::s(), &c1);
        assert_eq!(s.minus, Endpoint::Finite(QuadNum::new(0, 1, 5, 5)));
        assert_eq!(s.plus, Endpoint::Finite(QuadNum::new(0, -1, 5, 5)));
        let rational = Geodesic::new(5, Endpoint::Finite(QuadNum::zero(5)), Endpoint::Finite(QuadNum::one(5))).unwrap();
        assert_eq!(
            apply_gamma(&GammaElement::t_pow(1), &rational).plus,
            Endpoint::Finite(QuadNum::from_int(2, 5))
        );
        assert_eq!(top_of(&rational), Err(Error::NotRootGeodesic));
    }

    #[test]
    fn form_and_endpoint_actions_agree() {
        let f = BinaryForm::new(11, -8, 1);
        let g = GammaElement::from_i128(3, 2, 7, 5);
        let lhs = geodesic_from_form(5, &f.act(&g).unwrap()).unwrap();
        let rhs = apply_gamma(&g, &geodesic_from_form(5, &f).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn stabilizers() {
        let u = unit_relation(5).unwrap();
        let unit = IdealHNF::unit(5, OrderTag::O1);
        let (g, j) = stabilizer_generator(&unit.form(), &u.eps1, OrderTag::O1, 1).unwrap();
        assert_eq!((j, g.trace()), (1, BigInt::from(18)));
        assert_eq!(g, GammaElement::from_i128(9, 20, 4, 9));
        assert_eq!(conjugated_unit_matrix(&unit, &u.eps1).unwrap(), g);
        let c = geodesic_from_form(5, &unit.form()).unwrap();
        assert_eq!(apply_gamma(&g, &c), c);
        let u17 = unit_relation(17).unwrap();
        let (g, j) = stabilizer_generator(&IdealHNF::unit(17, OrderTag::O2).form(), &u17.eps2, OrderTag::O2, 1).unwrap();
        assert_eq!((j, g.trace()), (1, BigInt::from(66)));
        let f2 = BinaryForm::new(1, -1, -1);
        let (_, j) = stabilizer_generator(&f2, &u.eps2, OrderTag::O2, 2).unwrap();
        assert_eq!(j, 3);
    }

    #[test]
    fn parametrization_examples() {
        let data = coset_data(&IdealHNF::unit(5, OrderTag::O1)).unwrap();
        let (mu, m) = coset_parametrization(&GammaElement::identity(), &data).unwrap();
        assert_eq!((mu, m), (BigInt::from(0), BigInt::from(1)));
        let (mu, m) = coset_parametrization(&GammaElement::t_pow(1), &data).unwrap();
        assert_eq!((mu, m), (BigInt::from(1), BigInt::from(1)));
        let st3 = &GammaElement::s() * &GammaElement::t_pow(3);
        let (mu, m) = coset_parametrization(&st3, &data).unwrap();
        assert_eq!((mu, m), (BigInt::from(-3), BigInt::from(4)));
    }

    #[test]
    fn small_base_sets() {
        let b = base_geodesic_set(5, 1, 0).unwrap();
        assert_eq!((b.h1, b.h2, b.s, b.geodesics.len()), (1, 1, 1, 2));
        let b = base_geodesic_set(17, 1, 0).unwrap();
        assert_eq!(b.geodesics.len(), 2);
        let b = base_geodesic_set(5, 4, 1).unwrap();
        assert_eq!((b.h1, b.h2), (1, 0));
        let r = enumerate_tops(&base_geodesic_set(5, 1, 0).unwrap(), 11).unwrap();
        let want: BTreeSet<(u64, u64)> =
            [(1, 0), (2, 1), (4, 1), (4, 3), (5, 0), (10, 5), (11, 4), (11, 7)].into_iter().collect();
        assert_eq!(r.roots, want);
        assert_eq!(r.duplicates(), 0);
    }
}
