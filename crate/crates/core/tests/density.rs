use georoots::density::*;
use georoots::geodesics::{apply_gamma, base_geodesic_set, geodesic_from_form};
use georoots::modular::Gamma0;
use georoots::{Error, OrderTag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn near_boundary(q: f64, v: f64) -> bool {
    let t = (2.0 - 2.0 * q).max(0.0).sqrt();
    (q.abs() - 1.0).abs() < 1e-6 || (v.abs() - t).abs() < 1e-6
}

#[test]
fn raw_and_simplified_agree_on_grid() {
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for qi in -500..=500 {
        let q = qi as f64 / 100.0;
        for vi in -1000..=1000 {
            let v = vi as f64 / 100.0;
            if near_boundary(q, v) {
                continue;
            }
            let pairs = [
                (h_raw_plus(q, v).unwrap(), h_simplified_plus(q, v).unwrap()),
                (h_raw_minus(q, v).unwrap(), h_simplified_minus(q, v).unwrap()),
            ];
            for (a, b) in pairs {
                worst = worst.max((a - b).abs());
            }
            checked += 1;
        }
    }
    assert!(checked > 1_900_000);
    assert!(worst < 1e-12, "max deviation {worst:e}");
}

#[test]
fn branch_evenness() {
    for qi in -300..=300 {
        let q = qi as f64 / 37.0 + 1e-4;
        for vi in 1..400 {
            let v = vi as f64 / 40.0;
            if q.abs() > 1.0 {
                assert!((h_plus(q, v) - h_plus(q, -v)).abs() < 1e-13);
                assert!((h_minus(q, v) - h_minus(q, -v)).abs() < 1e-13);
            } else {
                let s = h_plus(q, v) + h_minus(q, v);
                assert!((s - h_plus(q, -v) - h_minus(q, -v)).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn boundary_loci_raise() {
    assert!(matches!(h_raw_plus(1.0, 2.0), Err(Error::DomainError { .. })));
    assert!(matches!(h_simplified_minus(-3.0, 8f64.sqrt()), Err(Error::DomainError { .. })));
    assert!(matches!(h_simplified_minus(0.5, -1.0), Err(Error::DomainError { .. })));
    assert_eq!(h_plus(0.5, 1.0), 0.0);
}

#[test]
fn cross_ratio_invariance() {
    let base = base_geodesic_set(5, 1, 0).unwrap();
    let ts = enumerate_coset_terms(&base, 5.0, ClassMask::Total).unwrap();
    let g1 = Gamma0::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let t = &ts.terms[i % ts.terms.len()];
        let c1 = &base.geodesics[t.k].geodesic;
        let c2 = geodesic_from_form(5, &t.form).unwrap();
        let before = cross_ratio_q(c1, &c2).unwrap();
        let g = g1.random_element(&mut rng, 12);
        let after = cross_ratio_q(&apply_gamma(&g, c1), &apply_gamma(&g, &c2)).unwrap();
        assert_eq!(before, after);
    }
}

#[test]
fn density_is_even_and_normalized() {
    let base = base_geodesic_set(5, 1, 0).unwrap();
    let table = omega(&base, &default_grid(), 50.0, ClassMask::Total).unwrap();
    assert!(table.evenness_defect() < 1e-9);
    assert!(table.omega.iter().all(|&w| w >= 0.0));
    let (k, vol) = kappa_and_vol(&base, ClassMask::Total);
    let ts = enumerate_coset_terms(&base, 50.0, ClassMask::Total).unwrap();
    let mean = omega_bin_averages(&ts.terms, k, vol, 0.0, 5.0, 200).iter().sum::<f64>() / 200.0;
    assert!((mean - 1.0).abs() < 0.1, "mean {mean}");
    assert!(table.tail_estimate > 0.0 && table.tail_estimate < 0.1);
}

#[test]
fn terms_stable_under_budget_doubling() {
    let base = base_geodesic_set(5, 1, 0).unwrap();
    let a = enumerate_coset_terms_with_budget(&base, 50.0, ClassMask::Total, 1 << 20).unwrap();
    let b = enumerate_coset_terms_with_budget(&base, 50.0, ClassMask::Total, 1 << 21).unwrap();
    assert_eq!(a.terms, b.terms);
    assert!(matches!(
        enumerate_coset_terms_with_budget(&base, 50.0, ClassMask::Total, 10),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn partial_masks_split_the_base() {
    let base = base_geodesic_set(17, 1, 0).unwrap();
    let (kt, _) = kappa_and_vol(&base, ClassMask::Total);
    let (k1, _) = kappa_and_vol(&base, ClassMask::Order(OrderTag::O1));
    let (k2, _) = kappa_and_vol(&base, ClassMask::Order(OrderTag::O2));
    assert!((kt - k1 - k2).abs() < 1e-12);
    let t1 = enumerate_coset_terms(&base, 10.0, ClassMask::Order(OrderTag::O1)).unwrap();
    assert!(t1.terms.iter().all(|t| base.geodesics[t.k].order == OrderTag::O1 && base.geodesics[t.l].order == OrderTag::O1));
}

#[test]
fn nearest_terms_exclude_identity() {
    let base = base_geodesic_set(5, 1, 0).unwrap();
    let ts = enumerate_coset_terms(&base, 1.0 + 1e-9, ClassMask::Total).unwrap();
    assert!(ts.skipped_shared >= 2);
    for t in &ts.terms {
        assert!(t.q().abs() <= 1.0 + 1e-9);
        assert_ne!(t.form, base.geodesics[t.k].form);
    }
    assert!(enumerate_coset_terms(&base, 1.0, ClassMask::Total).is_err());
}
