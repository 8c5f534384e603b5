//! Imaginary quadratic analogue: roots of `μ² ≡ D (mod m)` for `D < 0` arise
//! as the points `μ/m + i√|D|/m` in `Γ₀(n)`-orbits of class representatives.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::forms::reduced_definite_forms;
use crate::geodesics::{OrbitContext, DEFAULT_NODE_BUDGET};
use crate::orders::{narrow_class_group, IdealHNF, OrderTag};
use crate::roots::{sieve_roots, RootFilter, RootSequence};

/// A point `x + i√|D|/m` with `x = μ/m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitPoint {
    pub mu: u64,
    pub m: u64,
}

impl OrbitPoint {
    pub fn x(&self) -> f64 {
        self.mu as f64 / self.m as f64
    }

    pub fn height(&self, d: i64) -> f64 {
        (d.unsigned_abs() as f64).sqrt() / self.m as f64
    }
}

fn check_negative(d: i64) -> Result<()> {
    if d >= 0 {
        return Err(Error::InvalidInput(format!("D = {d} must be negative")));
    }
    Ok(())
}

pub fn sieve_roots_neg(d: i64, big_m: u64, filter: RootFilter) -> Result<RootSequence> {
    check_negative(d)?;
    sieve_roots(d, big_m, filter)
}

/// Number of reduced positive definite primitive forms of discriminant `disc`.
pub fn class_number_imaginary(disc: i128) -> usize {
    reduced_definite_forms(disc).len()
}

#[derive(Clone, Debug, Default)]
pub struct OrbitPointsReport {
    pub points: BTreeSet<OrbitPoint>,
    pub produced: usize,
    pub orbits_used: usize,
    pub nodes_visited: usize,
}

impl OrbitPointsReport {
    pub fn roots(&self) -> BTreeSet<(u64, u64)> {
        self.points.iter().map(|p| (p.m, p.mu)).collect()
    }
}

/// The points `μ/m + i√|D|/m` with `m ≤ M` modulo `Γ∞` over all `Γ₀(n)`-orbits
/// of class representatives whose roots satisfy `(n, ν)`.
pub fn enumerate_orbit_points(d: i64, n: u64, nu: i64, big_m: u64) -> Result<OrbitPointsReport> {
    enumerate_orbit_points_with_budget(d, n, nu, big_m, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_orbit_points_with_budget(
    d: i64,
    n: u64,
    nu: i64,
    big_m: u64,
    budget: usize,
) -> Result<OrbitPointsReport> {
    check_negative(d)?;
    let filter = RootFilter::new(d, n, nu)?;
    let mut report = OrbitPointsReport::default();
    for order in [OrderTag::O1, OrderTag::O2] {
        let group = narrow_class_group(d, order)?;
        let abound = match order {
            OrderTag::O1 => big_m as i128,
            OrderTag::O2 => (big_m / 2) as i128,
        };
        for class in 0..group.h_plus {
            let ctx = OrbitContext::new(&group, class, n)?;
            let nodes = ctx.nodes(abound, budget)?;
            report.nodes_visited += nodes.len();
            let mut orbits: BTreeMap<usize, (Vec<OrbitPoint>, usize)> = BTreeMap::new();
            for node in nodes {
                let ideal = IdealHNF::from_form(d, &node.form)?;
                let entry = orbits.entry(ctx.orbit_id(&node.gamma)).or_default();
                if filter.accepts(ideal.m, ideal.mu) {
                    entry.0.push(OrbitPoint { mu: ideal.mu, m: ideal.m });
                } else {
                    entry.1 += 1;
                }
            }
            for (id, (hits, misses)) in orbits {
                if !hits.is_empty() && misses > 0 {
                    return Err(Error::Internal(format!(
                        "orbit {id} of class {class} ({order}) mixes roots inside and outside the filter"
                    )));
                }
                if hits.is_empty() {
                    continue;
                }
                report.orbits_used += 1;
                report.produced += hits.len();
                report.points.extend(hits);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve_set(d: i64, n: u64, nu: i64, m: u64) -> BTreeSet<(u64, u64)> {
        let f = RootFilter::new(d, n, nu).unwrap();
        sieve_roots_neg(d, m, f).unwrap().roots.iter().map(|r| (r.m, r.mu)).collect()
    }

    #[test]
    fn small_examples() {
        let r = enumerate_orbit_points(-3, 1, 0, 1).unwrap();
        assert_eq!(r.roots(), BTreeSet::from([(1, 0)]));
        let r = enumerate_orbit_points(-3, 1, 0, 7).unwrap();
        assert_eq!(r.roots(), sieve_set(-3, 1, 0, 7));
        assert!(r.roots().contains(&(7, 2)) && r.roots().contains(&(4, 3)));
        let r = enumerate_orbit_points(-15, 1, 0, 20).unwrap();
        assert_eq!(r.roots(), sieve_set(-15, 1, 0, 20));
        assert_eq!(r.produced, r.points.len());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number_imaginary(-3), 1);
        assert_eq!(class_number_imaginary(-15), 2);
        assert_eq!(class_number_imaginary(-23), 3);
        assert_eq!(class_number_imaginary(-60), 2);
    }

    #[test]
    fn rejects_positive() {
        assert!(sieve_roots_neg(5, 10, RootFilter::trivial()).is_err());
        assert!(enumerate_orbit_points(5, 1, 0, 10).is_err());
    }
}
