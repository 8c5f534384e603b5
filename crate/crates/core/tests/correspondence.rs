use std::collections::BTreeSet;

use georoots::geodesics::{apply_gamma, base_geodesic_set, coset_data, coset_parametrization, enumerate_tops, top_of};
use georoots::modular::Gamma0;
use georoots::roots::{sieve_roots, RootFilter};
use georoots::{GammaElement, OrderTag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sieve_set(d: i64, n: u64, nu: i64, big_m: u64) -> BTreeSet<(u64, u64)> {
    let f = RootFilter::new(d, n, nu).unwrap();
    sieve_roots(d, big_m, f).unwrap().roots.iter().map(|r| (r.m, r.mu)).collect()
}

#[test]
fn orbit_tops_equal_sieve() {
    for (d, n, nu) in [(5i64, 1u64, 0i64), (17, 1, 0), (13, 1, 0), (21, 1, 0), (5, 4, 1), (65, 1, 1)] {
        let base = base_geodesic_set(d, n, nu).unwrap();
        let report = enumerate_tops(&base, 2000).unwrap();
        assert_eq!(report.duplicates(), 0, "D={d} n={n}");
        assert_eq!(report.stray, 0, "D={d} n={n}");
        assert_eq!(report.roots, sieve_set(d, n, nu, 2000), "D={d} n={n} ν={nu}");
    }
}

#[test]
fn orbit_tops_equal_sieve_at_higher_level() {
    for (d, n, nu) in [(5i64, 2u64, 1i64), (17, 2, 1), (17, 4, 1), (17, 8, 1), (13, 3, 1), (5, 11, 4), (13, 6, 1), (21, 10, 1), (17, 16, 7), (65, 4, 1)] {
        let base = base_geodesic_set(d, n, nu).unwrap();
        let report = enumerate_tops(&base, 1500).unwrap();
        assert_eq!(report.duplicates(), 0, "D={d} n={n}");
        assert_eq!(report.roots, sieve_set(d, n, nu, 1500), "D={d} n={n} ν={nu}");
    }
}

#[test]
fn splitting_numbers() {
    assert_eq!(base_geodesic_set(17, 2, 1).unwrap().s, 3);
    assert_eq!(base_geodesic_set(17, 4, 1).unwrap().s, 2);
    assert_eq!(base_geodesic_set(5, 2, 1).unwrap().s, 1);
    assert_eq!(base_geodesic_set(13, 6, 1).unwrap().s, 1);
    assert_eq!(base_geodesic_set(17, 1, 0).unwrap().s, 1);
}

#[test]
fn base_lengths_match_units() {
    let base = base_geodesic_set(5, 2, 1).unwrap();
    let o2: Vec<_> = base.of_order(OrderTag::O2).collect();
    assert_eq!(o2.len(), 1);
    assert_eq!(o2[0].j, 3);
    for g in &base.geodesics {
        assert!(g.stabilizer.is_in_gamma0(2));
        assert_eq!(apply_gamma(&g.stabilizer, &g.geodesic), g.geodesic);
    }
}

#[test]
fn gamma0_images_keep_the_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (d, n, nu) in [(5i64, 4u64, 1i64), (17, 2, 1), (13, 3, 1)] {
        let base = base_geodesic_set(d, n, nu).unwrap();
        let g0 = Gamma0::new(n);
        let filter = base.filter();
        let mut checked = 0;
        while checked < 1000 {
            let g = g0.random_element(&mut rng, 20);
            let c = &base.geodesics[rng.gen_range(0..base.geodesics.len())].geodesic;
            if let Some(t) = top_of(&apply_gamma(&g, c)).unwrap() {
                let (m, mu) = t.root();
                assert!(filter.accepts(m, mu), "D={d} n={n}: {m},{mu}");
                checked += 1;
            }
        }
    }
}

#[test]
fn parametrization_matches_geometric_top() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [5i64, 17, 65] {
        let base = base_geodesic_set(d, 1, if d == 65 { 1 } else { 0 }).unwrap();
        for g in &base.geodesics {
            let data = coset_data(&g.ideal).unwrap();
            let mut done = 0;
            while done < 1000 {
                let (c, dd) = (rng.gen_range(-50i128..=50), rng.gen_range(-50i128..=50));
                let e = num_integer::Integer::extended_gcd(&c, &dd);
                if e.gcd != 1 {
                    continue;
                }
                let k = rng.gen_range(-5i128..=5);
                let gam = &GammaElement::t_pow(k) * &GammaElement::new(e.y, -e.x, c, dd).unwrap();
                let image = apply_gamma(&gam, &g.geodesic);
                match coset_parametrization(&gam, &data) {
                    Ok((mu, m)) => {
                        let top = top_of(&image).unwrap().unwrap();
                        let mm: u64 = m.try_into().unwrap();
                        let mu_red = mu.mod_floor_u(mm);
                        assert_eq!(top.root(), (mm, mu_red));
                    }
                    Err(_) => assert!(top_of(&image).unwrap().is_none()),
                }
                done += 1;
            }
        }
    }
}

trait ModFloorU {
    fn mod_floor_u(&self, m: u64) -> u64;
}

impl ModFloorU for num_bigint::BigInt {
    fn mod_floor_u(&self, m: u64) -> u64 {
        let r = num_integer::Integer::mod_floor(self, &num_bigint::BigInt::from(m));
        r.try_into().unwrap()
    }
}
