//! The limiting pair correlation density `ω(v)` as a truncated sum over
//! double cosets `Γ_{c_k}\Γ₀(n)/Γ_{c_l}`.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::geodesics::{BaseGeodesicSet, Endpoint, Geodesic, OrbitContext, DEFAULT_NODE_BUDGET};
use crate::modular::gamma0_index;
use crate::orders::OrderTag;
use crate::quad::QuadNum;

/// `y(q, v) = √(v² + q² − 1)`.
pub fn y_qv(q: f64, v: f64) -> Result<f64> {
    let r = v * v + q * q - 1.0;
    if r < 0.0 {
        return Err(Error::DomainError { q, v });
    }
    Ok(r.sqrt())
}

/// `h_q(s) = log((s + q)/(1 − s²))`.
pub fn h_q(q: f64, s: f64) -> f64 {
    ((s + q) / ((1.0 - s) * (1.0 + s))).ln()
}

/// `s₁ = (−q + y)/(v + 1)`, evaluated through `(v − 1)/(y + q)` when that avoids cancellation.
pub fn s1(q: f64, v: f64) -> Result<f64> {
    let y = y_qv(q, v)?;
    if q > 0.0 {
        Ok((v - 1.0) / (y + q))
    } else if v + 1.0 != 0.0 {
        Ok((y - q) / (v + 1.0))
    } else {
        Err(Error::DomainError { q, v })
    }
}

/// `s₂ = v − q − y`, with `v − y` rewritten as `(1 − q²)/(v + y)` for `v > 0`.
pub fn s2(q: f64, v: f64) -> Result<f64> {
    let y = y_qv(q, v)?;
    if v > 0.0 {
        Ok((1.0 - q * q) / (v + y) - q)
    } else {
        Ok(v - q - y)
    }
}

/// The loci where the piecewise definitions switch: `|q| = 1`, and
/// `|v| = √(2 − 2q)` on the pieces that use it.
fn on_boundary(q: f64, v: f64, plus: bool) -> bool {
    let t = threshold(q);
    if q.abs() == 1.0 {
        return true;
    }
    if q.abs() < 1.0 {
        return if plus { v == t } else { v == -t };
    }
    q < -1.0 && !plus && v.abs() == t
}

fn threshold(q: f64) -> f64 {
    (2.0 - 2.0 * q).max(0.0).sqrt()
}

/// `H₊` from `h_q`, `s₁`, `s₂` piece by piece.
pub fn h_raw_plus(q: f64, v: f64) -> Result<f64> {
    let t = threshold(q);
    if on_boundary(q, v, true) {
        return Err(Error::DomainError { q, v });
    }
    if q < -1.0 {
        Ok(0.0)
    } else if q.abs() < 1.0 {
        if v < t {
            Ok(0.0)
        } else {
            Ok(h_q(q, s1(q, v)?) - h_q(q, s2(q, v)?))
        }
    } else {
        let r = -1.0 / (q + (q * q - 1.0).sqrt());
        Ok(h_q(q, s1(q, v)?) - h_q(q, r))
    }
}

/// `H₋` from `h_q`, `s₁`, `s₂` piece by piece.
pub fn h_raw_minus(q: f64, v: f64) -> Result<f64> {
    let t = threshold(q);
    if on_boundary(q, v, false) {
        return Err(Error::DomainError { q, v });
    }
    if q < -1.0 {
        if v.abs() < t {
            Ok(0.0)
        } else {
            Ok(h_q(q, s1(q, v)?) - h_q(q, s2(q, v)?))
        }
    } else if q.abs() < 1.0 {
        if v > -t {
            Ok(0.0)
        } else {
            Ok(h_q(q, s1(q, v)?) - h_q(q, s2(q, v)?))
        }
    } else {
        let r = -q - (q * q - 1.0).sqrt();
        Ok(h_q(q, r) - h_q(q, s2(q, v)?))
    }
}

fn far_term(q: f64, v: f64) -> f64 {
    let s = (q * q - 1.0).sqrt();
    let y = (v * v + q * q - 1.0).sqrt();
    (v * v / ((q + s) * (y + s))).ln_1p()
}

/// Closed form `log((q + y)(q − √(q² − 1)))` for `q > 1`, shared by both signs.
fn far_closed(q: f64, v: f64) -> f64 {
    let s = (q * q - 1.0).sqrt();
    ((q + (v * v + q * q - 1.0).sqrt()) * (q - s)).ln()
}

pub fn h_simplified_plus(q: f64, v: f64) -> Result<f64> {
    let t = threshold(q);
    if on_boundary(q, v, true) {
        return Err(Error::DomainError { q, v });
    }
    Ok(if q < -1.0 {
        0.0
    } else if q.abs() < 1.0 {
        if v < t {
            0.0
        } else {
            2.0 * (q + y_qv(q, v)?).ln()
        }
    } else {
        far_closed(q, v)
    })
}

pub fn h_simplified_minus(q: f64, v: f64) -> Result<f64> {
    let t = threshold(q);
    if on_boundary(q, v, false) {
        return Err(Error::DomainError { q, v });
    }
    Ok(if q < -1.0 {
        if v.abs() < t {
            0.0
        } else {
            2.0 * (q + y_qv(q, v)?).ln()
        }
    } else if q.abs() < 1.0 {
        if v > -t {
            0.0
        } else {
            2.0 * (q + y_qv(q, v)?).ln()
        }
    } else {
        far_closed(q, v)
    })
}

/// Largest `|H_raw − H_simplified|` over both signs on the grid
/// `q ∈ [−q_lim, q_lim]`, `v ∈ [−v_lim, v_lim]` with spacing `step`, skipping
/// points within `exclusion` of a boundary locus. Returns the defect and the
/// number of grid points used.
pub fn simplification_defect(q_lim: f64, v_lim: f64, step: f64, exclusion: f64) -> (f64, usize) {
    let nq = (q_lim / step).round() as i64;
    let nv = (v_lim / step).round() as i64;
    (-nq..=nq)
        .into_par_iter()
        .map(|qi| {
            let q = qi as f64 * step;
            let t = threshold(q);
            let mut worst: f64 = 0.0;
            let mut used = 0usize;
            for vi in -nv..=nv {
                let v = vi as f64 * step;
                if (q.abs() - 1.0).abs() < exclusion || (v.abs() - t).abs() < exclusion {
                    continue;
                }
                for (raw, simple) in [(h_raw_plus(q, v), h_simplified_plus(q, v)), (h_raw_minus(q, v), h_simplified_minus(q, v))] {
                    if let (Ok(a), Ok(b)) = (raw, simple) {
                        worst = worst.max((a - b).abs());
                    }
                }
                used += 1;
            }
            (worst, used)
        })
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1))
}

/// Total version of `H₊`: boundary points take the value of the adjacent
/// piece, and `q > 1` uses a cancellation-free `log1p`.
pub fn h_plus(q: f64, v: f64) -> f64 {
    if q < -1.0 {
        0.0
    } else if q <= 1.0 {
        if v <= threshold(q) {
            0.0
        } else {
            2.0 * (q + (v * v + q * q - 1.0).max(0.0).sqrt()).ln()
        }
    } else {
        far_term(q, v)
    }
}

pub fn h_minus(q: f64, v: f64) -> f64 {
    let t = threshold(q);
    if q < -1.0 {
        if v.abs() <= t {
            0.0
        } else {
            2.0 * (q + (v * v + q * q - 1.0).sqrt()).ln()
        }
    } else if q <= 1.0 {
        if v >= -t {
            0.0
        } else {
            2.0 * (q + (v * v + q * q - 1.0).max(0.0).sqrt()).ln()
        }
    } else {
        far_term(q, v)
    }
}

pub fn h_signed(sign: i32, q: f64, v: f64) -> f64 {
    if sign > 0 {
        h_plus(q, v)
    } else {
        h_minus(q, v)
    }
}

/// Orientation-preserving `g⁻¹` sending `c` to `(0, ∞)`, evaluated at `z`.
/// Returns `None` at the pole.
fn normalize_point(c: &Geodesic, z: &Endpoint) -> Option<Endpoint> {
    let d = c.d;
    match (&c.minus, &c.plus, z) {
        (_, _, zz) if zz == &c.plus => Some(Endpoint::Infinity),
        (Endpoint::Finite(m), Endpoint::Finite(p), Endpoint::Finite(z)) => {
            let den = p - z;
            let num = z - m;
            let s = if p > m { 1 } else { -1 };
            let v = &num / &den;
            Some(Endpoint::Finite(if s > 0 { v } else { -v }))
        }
        (Endpoint::Finite(_), Endpoint::Finite(_), Endpoint::Infinity) => {
            Some(Endpoint::Finite(QuadNum::from_int(if c.is_positively_oriented() { -1 } else { 1 }, d)))
        }
        (Endpoint::Finite(m), Endpoint::Infinity, Endpoint::Finite(z)) => Some(Endpoint::Finite(z - m)),
        (Endpoint::Finite(_), Endpoint::Infinity, Endpoint::Infinity) => None,
        (Endpoint::Infinity, Endpoint::Finite(p), Endpoint::Finite(z)) => {
            Some(Endpoint::Finite((&(p - z)).recip()?))
        }
        (Endpoint::Infinity, Endpoint::Finite(_), Endpoint::Infinity) => Some(Endpoint::Finite(QuadNum::zero(d))),
        (Endpoint::Infinity, Endpoint::Infinity, _) => None,
    }
}

/// `q = (r + 1)/(r − 1)` for the cross-ratio `r` of two geodesics, and the
/// sign of `c₂⁻` after `c₁` is moved to `(0, ∞)`.
pub fn cross_ratio_q(c1: &Geodesic, c2: &Geodesic) -> Result<(QuadNum, i32)> {
    let ends1 = [&c1.minus, &c1.plus];
    if ends1.contains(&&c2.minus) || ends1.contains(&&c2.plus) {
        return Err(Error::SharedEndpoint);
    }
    if c1.d != c2.d {
        return Err(Error::InvalidInput("geodesics from different fields".into()));
    }
    let d = c1.d;
    let a = normalize_point(c1, &c2.minus).ok_or(Error::SharedEndpoint)?;
    let b = normalize_point(c1, &c2.plus).ok_or(Error::SharedEndpoint)?;
    // With c₁ = (0, ∞): q = (a + b)/(b − a), or its limit when one end is ∞.
    let q = match (&a, &b) {
        (Endpoint::Finite(a), Endpoint::Finite(b)) => &(a + b) / &(b - a),
        (Endpoint::Infinity, Endpoint::Finite(_)) => QuadNum::from_int(-1, d),
        (Endpoint::Finite(_), Endpoint::Infinity) => QuadNum::one(d),
        (Endpoint::Infinity, Endpoint::Infinity) => return Err(Error::SharedEndpoint),
    };
    let sign = match &a {
        Endpoint::Finite(x) => x.signum(),
        Endpoint::Infinity => 0,
    };
    if sign == 0 {
        return Err(Error::SharedEndpoint);
    }
    Ok((q, sign))
}

/// Which base geodesics enter a (partial) density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassMask {
    Total,
    Order(OrderTag),
}

impl ClassMask {
    pub fn selects(&self, order: OrderTag) -> bool {
        match self {
            ClassMask::Total => true,
            ClassMask::Order(o) => *o == order,
        }
    }

    fn indices(&self, base: &BaseGeodesicSet) -> Vec<usize> {
        (0..base.geodesics.len()).filter(|&i| self.selects(base.geodesics[i].order)).collect()
    }
}

impl std::fmt::Display for ClassMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassMask::Total => f.write_str("total"),
            ClassMask::Order(o) => write!(f, "{o}"),
        }
    }
}

/// `κ = (Σ lengths)/(2π·vol)` over the selected geodesics and `vol = (π/3)·[SL₂(Z) : Γ₀(n)]`.
pub fn kappa_and_vol(base: &BaseGeodesicSet, mask: ClassMask) -> (f64, f64) {
    let vol = PI / 3.0 * gamma0_index(base.n) as f64;
    let total: f64 = base.geodesics.iter().filter(|g| mask.selects(g.order)).map(|g| g.length).sum();
    (total / (2.0 * PI * vol), vol)
}

/// One double coset `Γ_{c_k} γ Γ_{c_l}` with its exact `q = q_num/q_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CosetTerm {
    pub k: usize,
    pub l: usize,
    /// The form of the representative image `γ·c_l`.
    pub form: BinaryForm,
    pub q_num: i128,
    pub q_den: i128,
    pub sign: i32,
}

impl CosetTerm {
    pub fn q(&self) -> f64 {
        self.q_num as f64 / self.q_den as f64
    }
}

#[derive(Clone, Debug)]
pub struct TermSet {
    pub q_max: f64,
    pub terms: Vec<CosetTerm>,
    /// Images sharing the axis of `c_k` (the excluded cosets).
    pub skipped_shared: usize,
    pub nodes_visited: usize,
}

struct Axis {
    form: BinaryForm,
    minus: QuadNum,
    plus: QuadNum,
    minus_f: f64,
    plus_f: f64,
    lo: QuadNum,
    hi: QuadNum,
    lo_f: f64,
    hi_f: f64,
    radius: f64,
    half_length: f64,
}

fn root_scale(disc: i128, d: i64) -> i128 {
    if disc == 4 * d as i128 {
        2
    } else {
        1
    }
}

fn endpoints(f: &BinaryForm, d: i64) -> (QuadNum, QuadNum) {
    let k = root_scale(f.disc(), d);
    (QuadNum::new(-f.b, -k, 2 * f.a, d), QuadNum::new(-f.b, k, 2 * f.a, d))
}

fn endpoints_f64(f: &BinaryForm) -> (f64, f64) {
    let s = (f.disc() as f64).sqrt();
    let (a, b) = (f.a as f64, f.b as f64);
    // Product of the roots is C/A; take the larger-magnitude root first.
    let big = if b >= 0.0 { (-b - s) / (2.0 * a) } else { (-b + s) / (2.0 * a) };
    let small = f.c as f64 / (a * big);
    if b >= 0.0 {
        (big, small)
    } else {
        (small, big)
    }
}

fn isqrt_exact(x: i128) -> Option<i128> {
    let r = (x as f64).sqrt().round() as i128;
    (r - 2..=r + 2).find(|&t| t >= 0 && t * t == x)
}

pub fn enumerate_coset_terms(base: &BaseGeodesicSet, q_max: f64, mask: ClassMask) -> Result<TermSet> {
    enumerate_coset_terms_with_budget(base, q_max, mask, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_coset_terms_with_budget(
    base: &BaseGeodesicSet,
    q_max: f64,
    mask: ClassMask,
    budget: usize,
) -> Result<TermSet> {
    if !(q_max > 1.0) || !q_max.is_finite() {
        return Err(Error::InvalidInput(format!("q_max must exceed 1, got {q_max}")));
    }
    let d = base.d;
    let sel = mask.indices(base);
    let axes: Vec<Axis> = sel
        .iter()
        .map(|&k| {
            let g = &base.geodesics[k];
            let (minus, plus) = endpoints(&g.form, d);
            let (minus_f, plus_f) = endpoints_f64(&g.form);
            let eps = base.units.eps(g.order);
            let lam = eps.pow(2 * g.j);
            let lo = lam.recip().expect("unit is nonzero");
            Axis {
                form: g.form,
                minus,
                plus,
                minus_f,
                plus_f,
                lo_f: lo.to_f64(),
                hi_f: lam.to_f64(),
                lo,
                hi: lam,
                radius: (g.form.disc() as f64).sqrt() / (2.0 * g.form.a as f64),
                half_length: g.length / 2.0,
            }
        })
        .collect();
    let reach = q_max.acosh() + 1e-6;
    let mut terms = Vec::new();
    let mut skipped_shared = 0usize;
    let mut nodes_visited = 0usize;
    for &l in &sel {
        let gl = &base.geodesics[l];
        let ctx = OrbitContext::new(base.group(gl.order), gl.class, base.n)?;
        let disc_l = gl.form.disc();
        let abound = axes
            .iter()
            .map(|ax| {
                let ymin = ax.radius * (-(ax.half_length + reach)).exp();
                (disc_l as f64).sqrt() / (2.0 * ymin)
            })
            .fold(0.0, f64::max)
            .ceil() as i128
            + 1;
        let nodes = ctx.nodes(abound, budget)?;
        nodes_visited += nodes.len();
        let nodes: Vec<BinaryForm> =
            nodes.into_iter().filter(|nd| ctx.orbit_id(&nd.gamma) == gl.orbit_id).map(|nd| nd.form).collect();
        for (ai, &k) in sel.iter().enumerate() {
            let ax = &axes[ai];
            let disc_k = ax.form.disc();
            let s = isqrt_exact(disc_k * disc_l)
                .ok_or_else(|| Error::Internal("product of discriminants is not a square".into()))?;
            let qbound = q_max * s as f64;
            let found: Vec<(Vec<CosetTerm>, usize)> = nodes
                .par_iter()
                .map(|f2| scan_node(ax, f2, d, k, l, s, qbound))
                .collect::<Result<Vec<_>>>()?;
            for (t, sh) in found {
                terms.extend(t);
                skipped_shared += sh;
            }
        }
    }
    terms.sort();
    Ok(TermSet { q_max, terms, skipped_shared, nodes_visited })
}

fn scan_node(
    ax: &Axis,
    f2: &BinaryForm,
    d: i64,
    k: usize,
    l: usize,
    s: i128,
    qbound: f64,
) -> Result<(Vec<CosetTerm>, usize)> {
    let f1 = &ax.form;
    let pa = -2 * f1.a * f2.a;
    let pb = 2 * (f1.a * f2.b - f2.a * f1.b);
    let pc = f1.b * f2.b - 2 * f1.a * f2.c - 2 * f2.a * f1.c;
    let p = |t: i128| -> Option<i128> { pa.checked_mul(t)?.checked_mul(t)?.checked_add(pb.checked_mul(t)?)?.checked_add(pc) };
    // P(t) = α(t − t₀)² + P(t₀)
    let alpha = pa as f64;
    let t0 = -(pb as f64) / (2.0 * alpha);
    let pv = pc as f64 - (pb as f64) * (pb as f64) / (4.0 * alpha);
    let (u1, u2) = ((-qbound - pv) / alpha, (qbound - pv) / alpha);
    let (umin, umax) = (u1.min(u2).max(0.0), u1.max(u2));
    let mut out = Vec::new();
    let mut shared = 0;
    if umax < 0.0 {
        return Ok((out, 0));
    }
    let (rin, rout) = (umin.sqrt(), umax.sqrt());
    let mut ranges = vec![((t0 - rout).floor() as i128 - 1, (t0 - rin).ceil() as i128 + 1)];
    let right = ((t0 + rin).floor() as i128 - 1, (t0 + rout).ceil() as i128 + 1);
    if right.0 > ranges[0].1 {
        ranges.push(right);
    } else {
        ranges[0].1 = right.1;
    }
    for (lo, hi) in ranges {
        for t in lo..=hi {
            let pt = p(t).ok_or(Error::Overflow("cross-ratio polynomial"))?;
            if (pt.abs() as f64) > qbound {
                continue;
            }
            let g = f2.translate(t);
            if g == *f1 || (g.a == -f1.a && g.b == -f1.b && g.c == -f1.c) {
                shared += 1;
                continue;
            }
            if let Some(sign) = window_sign(ax, &g, d)? {
                let gg = num_integer::Integer::gcd(&pt, &s);
                let gg = if gg == 0 { 1 } else { gg };
                out.push(CosetTerm { k, l, form: g, q_num: pt / gg, q_den: s / gg, sign });
            }
        }
    }
    Ok((out, shared))
}

/// Whether the image lies in the fundamental window of the stabilizer of
/// `c_k`, and if so the sign of its normalized minus endpoint.
fn window_sign(ax: &Axis, g: &BinaryForm, d: i64) -> Result<Option<i32>> {
    let (a2f, b2f) = endpoints_f64(g);
    let gaps = [a2f - ax.minus_f, ax.plus_f - a2f, b2f - ax.plus_f, ax.minus_f - b2f];
    let scale = 1.0 + ax.minus_f.abs().max(ax.plus_f.abs()).max(a2f.abs());
    if gaps.iter().all(|x| x.abs() > 1e-7 * scale) {
        let x = gaps[0] / gaps[1];
        let xbar = gaps[2] / gaps[3];
        let kk = (x / xbar).abs();
        let margin = 1e-8;
        if kk.is_finite() {
            if kk < ax.lo_f * (1.0 - margin) || kk > ax.hi_f * (1.0 + margin) {
                return Ok(None);
            }
            if kk > ax.lo_f * (1.0 + margin) && kk < ax.hi_f * (1.0 - margin) {
                return Ok(Some(if x > 0.0 { 1 } else { -1 }));
            }
        }
    }
    let (a2, _) = endpoints(g, d);
    let num = &a2 - &ax.minus;
    let den = &ax.plus - &a2;
    if num.is_zero() || den.is_zero() {
        return Err(Error::SharedEndpoint);
    }
    let x = &num / &den;
    let kk = (&x / &x.conj()).abs();
    if kk < ax.lo || kk >= ax.hi {
        return Ok(None);
    }
    Ok(Some(x.signum()))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// `ω(v)` for each `v` of the grid from a fixed term set.
pub fn omega_from_terms(terms: &[CosetTerm], kappa: f64, vol: f64, grid: &[f64]) -> Vec<f64> {
    let qs: Vec<(f64, i32)> = terms.iter().map(|t| (t.q(), t.sign)).collect();
    grid.par_iter()
        .map(|&v| {
            let w = v / kappa;
            let sum: f64 = qs.iter().map(|&(q, s)| h_signed(s, q, w)).sum();
            sum / (2.0 * PI * vol * v * v)
        })
        .collect()
}

/// Averages of `ω` over the bins `[lo + iΔ, lo + (i+1)Δ)`.
pub fn omega_bin_averages(terms: &[CosetTerm], kappa: f64, vol: f64, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let w = (hi - lo) / bins as f64;
    let nodes: Vec<f64> = (0..bins)
        .flat_map(|i| {
            let c = lo + (i as f64 + 0.5) * w;
            GL4.iter().map(move |&(x, _)| c + 0.5 * w * x)
        })
        .collect();
    let vals = omega_from_terms(terms, kappa, vol, &nodes);
    vals.chunks(4).map(|ch| ch.iter().zip(GL4.iter()).map(|(v, (_, wt))| 0.5 * wt * v).sum()).collect()
}

/// The default grid `[−5, 5]` in steps of `0.01` without `|v| < 0.01`.
pub fn default_grid() -> Vec<f64> {
    (-500..=500).filter(|&i| i != 0).map(|i| i as f64 / 100.0).collect()
}

#[derive(Clone, Debug)]
pub struct DensityTable {
    pub grid: Vec<f64>,
    pub omega: Vec<f64>,
    pub kappa: f64,
    pub vol: f64,
    pub q_max: f64,
    pub terms_used: usize,
    pub skipped_shared: usize,
    /// Estimated contribution of the terms with `q > q_max`.
    pub tail_estimate: f64,
    pub class_mask: ClassMask,
}

impl DensityTable {
    /// `|ω(v) − ω(−v)|` maximized over grid points whose mirror is also on the grid.
    pub fn evenness_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let n = self.grid.len();
        for i in 0..n {
            let j = n - 1 - i;
            if (self.grid[i] + self.grid[j]).abs() < 1e-12 {
                worst = worst.max((self.omega[i] - self.omega[j]).abs());
            }
        }
        worst
    }

    pub fn value_at(&self, v: f64) -> Option<f64> {
        self.grid.iter().position(|&g| (g - v).abs() < 1e-12).map(|i| self.omega[i])
    }
}

/// Term density per unit `q` on `(q_max/2, q_max]` fed into `H ≈ v²/(4q²)`.
pub fn tail_estimate(terms: &[CosetTerm], q_max: f64, kappa: f64, vol: f64) -> f64 {
    let upper = terms.iter().filter(|t| t.q() > q_max / 2.0).count() as f64;
    let per_q = upper / (q_max / 2.0);
    per_q / (8.0 * PI * vol * kappa * kappa * q_max)
}

pub fn omega(base: &BaseGeodesicSet, grid: &[f64], q_max: f64, mask: ClassMask) -> Result<DensityTable> {
    if base.n != 1 && base.geodesics.iter().any(|g| (g.length - base.geodesics[0].length).abs() > 1e-9) {
        return Err(Error::Unsupported("base geodesics of unequal length".into()));
    }
    if let Some(&v) = grid.iter().find(|v| v.abs() < 1e-3 || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("grid point {v} too close to 0")));
    }
    if mask.indices(base).is_empty() {
        return Err(Error::SequenceExhausted);
    }
    let (kappa, vol) = kappa_and_vol(base, mask);
    let ts = enumerate_coset_terms(base, q_max, mask)?;
    let omega = omega_from_terms(&ts.terms, kappa, vol, grid);
    Ok(DensityTable {
        grid: grid.to_vec(),
        omega,
        kappa,
        vol,
        q_max,
        terms_used: ts.terms.len(),
        skipped_shared: ts.skipped_shared,
        tail_estimate: tail_estimate(&ts.terms, q_max, kappa, vol),
        class_mask: mask,
    })
}

/// `true` when every term's stored form is primitive with the discriminant of
/// its source geodesic.
pub fn terms_consistent(base: &BaseGeodesicSet, ts: &TermSet) -> bool {
    ts.terms.iter().all(|t| {
        let src = &base.geodesics[t.l].form;
        t.form.is_primitive() && t.form.disc() == src.disc() && t.q_den > 0 && t.q_num.abs() as f64 <= ts.q_max * t.q_den as f64
    })
}
