use georoots::arith::{reduce_signed, sqrt_mod_prime_power};
use georoots::density::cross_ratio_q;
use georoots::forms::FormClasses;
use georoots::geodesics::{apply_gamma, geodesic_from_form, geodesic_from_root};
use georoots::modular::Gamma0;
use georoots::roots::{brute_force_roots, roots_mod_m, sieve_roots_segmented, RootFilter};
use georoots::statistics::{counting_function, pair_correlation, pair_correlation_brute};
use georoots::{BinaryForm, GammaElement, QuadNum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gamma(seed: u64, len: usize) -> GammaElement {
    Gamma0::new(1).random_element(&mut ChaCha8Rng::seed_from_u64(seed), len)
}

fn small_d() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![5i64, 13, 17, 21, 29, 33, 65, -3, -7, -15, -23])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn form_action_is_a_left_action(a in -30i128..30, b in -30i128..30, c in -30i128..30, s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = BinaryForm::new(a, b, c);
        let (g, h) = (gamma(s1, 6), gamma(s2, 6));
        let lhs = f.act(&(&g * &h)).unwrap();
        let rhs = f.act(&h).unwrap().act(&g).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(lhs.disc(), f.disc());
    }

    #[test]
    fn form_action_moves_endpoints(k in 0usize..4, s in any::<u64>()) {
        let f = [BinaryForm::new(1, 0, -5), BinaryForm::new(1, 1, -1), BinaryForm::new(5, 5, 1), BinaryForm::new(-1, 1, 1)][k];
        let g = gamma(s, 8);
        let image = f.act(&g).unwrap();
        prop_assume!(image.a != 0);
        let a = apply_gamma(&g, &geodesic_from_form(5, &f).unwrap());
        let b = geodesic_from_form(5, &image).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn equivalence_witness_is_exact(s in any::<u64>(), which in 0usize..3) {
        let classes = FormClasses::new(65).unwrap();
        let f = classes.cycles()[which % classes.count()][0];
        let h = f.act(&gamma(s, 10)).unwrap();
        let g = classes.equivalence(&f, &h).unwrap().unwrap();
        prop_assert_eq!(f.act(&g).unwrap(), h);
        prop_assert_eq!(classes.class_of(&f).unwrap(), classes.class_of(&h).unwrap());
    }

    #[test]
    fn quadnum_field_laws(a in -50i64..50, b in -50i64..50, c in 1i64..20, x in -50i64..50, y in -50i64..50, z in 1i64..20, d in small_d()) {
        let p = QuadNum::new(a, b, c, d);
        let q = QuadNum::new(x, y, z, d);
        prop_assert_eq!(&(&p + &q) - &q, p.clone());
        prop_assert_eq!((&p * &q).norm(), p.norm() * q.norm());
        if !q.is_zero() {
            prop_assert_eq!(&(&p / &q) * &q, p.clone());
        }
        if d > 0 {
            prop_assert_eq!(p < q, p.to_f64() < q.to_f64() || (p.to_f64() == q.to_f64() && p < q));
        }
    }

    #[test]
    fn roots_solve_the_congruence(m in 1u64..5000, d in small_d()) {
        let rs = roots_mod_m(d, m);
        let brute: Vec<u64> = (0..m).filter(|&mu| reduce_signed((mu as i128).pow(2) - d as i128, m) == 0).collect();
        prop_assert_eq!(rs, brute);
    }

    #[test]
    fn prime_power_roots(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), e in 1u32..6, d in small_d()) {
        let m = p.pow(e);
        let rs = sqrt_mod_prime_power(d, p, e);
        for &r in &rs {
            prop_assert_eq!(reduce_signed((r as i128).pow(2) - d as i128, m), 0);
        }
        let count = (0..m).filter(|&mu| reduce_signed((mu as i128).pow(2) - d as i128, m) == 0).count();
        prop_assert_eq!(rs.len(), count);
    }

    #[test]
    fn segmented_sieve_is_segment_independent(seg in 1u64..400, d in small_d()) {
        let f = RootFilter::trivial();
        let got: Vec<(u64, u64)> = sieve_roots_segmented(d, 700, f, seg).unwrap().roots.iter().map(|r| (r.m, r.mu)).collect();
        prop_assert_eq!(got, brute_force_roots(d, 700, f));
    }

    #[test]
    fn cross_ratio_is_invariant(s in any::<u64>(), r1 in 0usize..40, r2 in 0usize..40) {
        let roots = brute_force_roots(5, 40, RootFilter::trivial());
        let (m1, u1) = roots[r1 % roots.len()];
        let (m2, u2) = roots[r2 % roots.len()];
        let c1 = geodesic_from_root(5, m1, u1).unwrap();
        let c2 = geodesic_from_root(5, m2, u2).unwrap();
        prop_assume!(c1 != c2 && c1 != c2.reversed());
        let g = gamma(s, 10);
        let before = cross_ratio_q(&c1, &c2).unwrap();
        let after = cross_ratio_q(&apply_gamma(&g, &c1), &apply_gamma(&g, &c2)).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn pair_counts_match_brute_force(pts in prop::collection::vec(0.0f64..1.0, 2..80), lo in -6.0f64..0.0, w in 0.1f64..6.0) {
        let a = pair_correlation(&pts, lo, lo + w, 7).unwrap();
        let b = pair_correlation_brute(&pts, lo, lo + w, 7).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn counting_is_periodic(pts in prop::collection::vec(0.0f64..1.0, 1..60), x in 0.0f64..1.0, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let n = pts.len();
        let c0 = counting_function(&pts, x, n, a, a + b);
        prop_assert_eq!(c0, counting_function(&pts, x + 1.0, n, a, a + b));
        prop_assert_eq!(counting_function(&pts, x, n, 0.0, n as f64), n);
    }
}
