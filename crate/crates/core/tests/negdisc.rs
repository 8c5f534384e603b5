use std::collections::{BTreeSet, HashMap};

use georoots::arith::is_squarefree;
use georoots::negdisc::{class_number_imaginary, enumerate_orbit_points, sieve_roots_neg};
use georoots::roots::{brute_force_roots, RootFilter};

fn sieve_set(d: i64, n: u64, nu: i64, m: u64) -> BTreeSet<(u64, u64)> {
    let f = RootFilter::new(d, n, nu).unwrap();
    sieve_roots_neg(d, m, f).unwrap().roots.iter().map(|r| (r.m, r.mu)).collect()
}

#[test]
fn point_orbits_equal_sieve() {
    for d in [-3i64, -7, -15] {
        let r = enumerate_orbit_points(d, 1, 0, 500).unwrap();
        assert_eq!(r.produced, r.points.len(), "D={d}");
        assert_eq!(r.roots(), sieve_set(d, 1, 0, 500), "D={d}");
    }
}

#[test]
fn point_orbits_at_higher_level() {
    for (d, n, nu) in [(-15i64, 2u64, 1i64), (-7, 4, 1), (-3, 7, 2), (-15, 4, 1), (-23, 3, 1)] {
        let r = enumerate_orbit_points(d, n, nu, 400).unwrap();
        assert_eq!(r.roots(), sieve_set(d, n, nu, 400), "D={d} n={n}");
    }
}

#[test]
fn negative_sieve_examples() {
    let f = RootFilter::trivial();
    let pick = |m| sieve_roots_neg(-3, m, f).unwrap().roots.iter().filter(|r| r.m == m).map(|r| r.mu).collect::<Vec<_>>();
    assert_eq!(pick(7), vec![2, 5]);
    assert_eq!(pick(2), vec![1]);
    assert!(pick(5).is_empty());
    let seq: Vec<(u64, u64)> = sieve_roots_neg(-7, 300, f).unwrap().roots.iter().map(|r| (r.m, r.mu)).collect();
    assert_eq!(seq, brute_force_roots(-7, 300, f));
}

fn find(p: &mut Vec<usize>, x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let nx = p[y];
        p[y] = r;
        y = nx;
    }
    r
}

/// Components of primitive forms with coefficients in a box under `S` and `T^{±1}`.
fn classes_by_search(disc: i64) -> usize {
    let k = disc.abs() / 2 + 2;
    let mut id: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut forms = Vec::new();
    for a in 1..=k {
        for b in -k..=k {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c > k || num_integer::gcd(num_integer::gcd(a, b), c) != 1 {
                continue;
            }
            id.insert((a, b, c), forms.len());
            forms.push((a, b, c));
        }
    }
    let mut parent: Vec<usize> = (0..forms.len()).collect();
    for (i, &(a, b, c)) in forms.iter().enumerate() {
        let neighbours = [(c, -b, a), (a, b + 2 * a, a + b + c), (a, b - 2 * a, a - b + c)];
        for nb in neighbours {
            if let Some(&j) = id.get(&nb) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut roots = BTreeSet::new();
    for i in 0..forms.len() {
        roots.insert(find(&mut parent, i));
    }
    roots.len()
}

#[test]
fn imaginary_class_numbers_match_search() {
    let mut checked = 0;
    for d in (-200i64..0).filter(|d| d.rem_euclid(4) == 1 && is_squarefree(*d)) {
        for disc in [d, 4 * d] {
            assert_eq!(class_number_imaginary(disc as i128), classes_by_search(disc), "Δ={disc}");
            checked += 1;
        }
    }
    assert!(checked > 70);
}
