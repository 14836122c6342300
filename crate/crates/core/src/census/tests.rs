use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gf::{Elem, FieldCtx, ScalarMatrix, Subspace};
use crate::smith::pencil_invariant_factors;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn f2() -> FieldCtx {
    FieldCtx::prime(2).unwrap()
}

fn tuple(ring: &PolyRing, s: &str) -> InvariantFactors {
    InvariantFactors::parse(ring, s).unwrap()
}

fn all_matrices(
    field: &FieldCtx,
    rows: usize,
    cols: usize,
) -> impl Iterator<Item = ScalarMatrix> + '_ {
    let q = field.order() as u64;
    (0..q.pow((rows * cols) as u32)).map(move |mut idx| {
        let mut e = vec![Elem::ZERO; rows * cols];
        for slot in e.iter_mut() {
            *slot = field.elem((idx % q) as i64).unwrap();
            idx /= q;
        }
        ScalarMatrix::from_entries(rows, cols, e).unwrap()
    })
}

// Independent tally of pencils by invariant-factor key, straight from SNF.
fn brute_tally(field: &FieldCtx, n: usize, k: usize) -> BTreeMap<String, u64> {
    let ring = PolyRing::new(field);
    let mut tally = BTreeMap::new();
    for b in all_matrices(field, n, k) {
        let key = pencil_invariant_factors(field, &b).unwrap().key(&ring);
        *tally.entry(key).or_insert(0) += 1;
    }
    tally
}

#[test]
fn c_f_examples() {
    assert_eq!(c_f(&Partition::new(vec![1, 1]), 1, 2), big(6));
    assert_eq!(c_f(&Partition::new(vec![2]), 1, 2), big(2));
    assert_eq!(c_f(&Partition::empty(), 3, 5), big(1));
    // (1): single factor q^d - 1
    assert_eq!(c_f(&Partition::new(vec![1]), 2, 2), big(3));
}

#[test]
fn gl_order_examples() {
    assert_eq!(gl_order(0, 7), big(1));
    assert_eq!(gl_order(1, 5), big(4));
    let brute = all_matrices(&f2(), 2, 2)
        .filter(|m| m.rank(&f2()) == 2)
        .count();
    assert_eq!(gl_order(2, 2), big(brute as u64));
    assert_eq!(brute, 6);
}

#[test]
fn q_binomial_examples() {
    assert_eq!(q_binomial(2, 1, 2), big(3));
    assert_eq!(q_binomial(5, 0, 3), big(1));
    assert_eq!(q_binomial(4, 2, 2), big(35));
    assert_eq!(q_binomial(2, 3, 2), big(0));
}

#[test]
fn q_binomial_counts_subspaces() {
    for (p, m, k) in [(2u64, 1u32, 4usize), (3, 1, 3), (2, 2, 3), (5, 1, 2)] {
        let f = FieldCtx::new(p, m).unwrap();
        for d in 0..=k {
            let listed = Subspace::enumerate(&f, k, d).len() as u64;
            assert_eq!(
                q_binomial(k, d, f.order() as u64),
                big(listed),
                "q={} k={k} d={d}",
                f.order()
            );
        }
    }
    assert_eq!(Subspace::enumerate(&f2(), 4, 2).len(), 35);
}

#[test]
fn phi_profile_examples() {
    let f = f2();
    let r = PolyRing::new(&f);
    let p = |s| r.parse(s).unwrap();
    let prof = phi_profile(&r, &tuple(&r, "x|x"));
    assert_eq!(prof, BTreeMap::from([(p("x"), Partition::new(vec![1, 1]))]));
    let prof = phi_profile(&r, &tuple(&r, "1|x^2"));
    assert_eq!(prof, BTreeMap::from([(p("x"), Partition::new(vec![2]))]));
    let prof = phi_profile(&r, &tuple(&r, "1|x^2+x"));
    assert_eq!(
        prof,
        BTreeMap::from([
            (p("x"), Partition::new(vec![1])),
            (p("x+1"), Partition::new(vec![1]))
        ])
    );
    let prof = phi_profile(&r, &tuple(&r, "x|x^2+x|x^3+x^2"));
    assert_eq!(
        prof,
        BTreeMap::from([
            (p("x"), Partition::new(vec![2, 1, 1])),
            (p("x+1"), Partition::new(vec![1, 1]))
        ])
    );
}

#[test]
fn conjugacy_class_examples() {
    let f = f2();
    let r = PolyRing::new(&f);
    let brute = brute_tally(&f, 2, 2);
    assert_eq!(
        count_conjugacy_class(&r, &tuple(&r, "x|x")).unwrap(),
        big(1)
    );
    assert_eq!(
        count_conjugacy_class(&r, &tuple(&r, "1|x^2")).unwrap(),
        big(3)
    );
    assert_eq!(brute["1|x^2"], 3);
    assert_eq!(
        count_conjugacy_class(&r, &tuple(&r, "1|x^2+x+1")).unwrap(),
        big(2)
    );
    assert_eq!(brute["1|x^2+x+1"], 2);
    assert_eq!(
        count_conjugacy_class(&r, &tuple(&r, "1|x")).unwrap(),
        big(0)
    );
}

#[test]
fn conjugacy_classes_match_enumeration() {
    for (p, m, n) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)] {
        let f = FieldCtx::new(p, m).unwrap();
        let r = PolyRing::new(&f);
        let brute = brute_tally(&f, n, n);
        for (key, count) in &brute {
            let inv = tuple(&r, key);
            assert_eq!(
                count_conjugacy_class(&r, &inv).unwrap(),
                big(*count),
                "{key}"
            );
        }
    }
}

#[test]
fn count_with_subspace_examples() {
    let f = f2();
    let r = PolyRing::new(&f);
    // d = 0
    assert_eq!(
        count_with_subspace(&r, 3, 2, 0, &tuple(&r, "1|1")).unwrap(),
        big((8 - 2) * (8 - 4))
    );
    // k = n = d reduces to the class size
    let t = tuple(&r, "1|x^2+x+1");
    assert_eq!(
        count_with_subspace(&r, 2, 2, 2, &t).unwrap(),
        count_conjugacy_class(&r, &t).unwrap()
    );
    assert_eq!(
        count_with_subspace(&r, 3, 2, 1, &tuple(&r, "1|x")).unwrap(),
        big(4)
    );
    assert_eq!(
        count_with_subspace(&r, 3, 2, 2, &tuple(&r, "1|x")),
        Err(CensusError::DegreeMismatch {
            expected: 2,
            actual: 1
        })
    );
    assert!(count_with_subspace(&r, 3, 3, 1, &tuple(&r, "1|x")).is_err());
}

#[test]
fn count_invariant_factors_examples() {
    let f = FieldCtx::prime(3).unwrap();
    let r = PolyRing::new(&f);
    assert_eq!(
        count_invariant_factors(&r, 4, 3, &tuple(&r, "1|1|1")).unwrap(),
        big((81 - 3) * (81 - 9) * (81 - 27))
    );
    let t = tuple(&r, "x+1|x+1");
    assert_eq!(
        count_invariant_factors(&r, 2, 2, &t).unwrap(),
        count_conjugacy_class(&r, &t).unwrap()
    );
    assert_eq!(
        count_invariant_factors(&r, 3, 2, &tuple(&r, "1|x^3")).unwrap(),
        big(0)
    );
}

#[test]
fn pencil_census_sums_to_space_size() {
    for (p, m, n, k) in [
        (2, 1, 3, 2),
        (2, 1, 4, 3),
        (3, 1, 3, 2),
        (2, 2, 3, 2),
        (2, 1, 5, 2),
        (5, 1, 3, 1),
    ] {
        let f = FieldCtx::new(p, m).unwrap();
        let r = PolyRing::new(&f);
        let report = pencil_census(&r, n, k).unwrap();
        let q = f.order() as u64;
        assert_eq!(
            report.total(),
            BigUint::from(q).pow((n * k) as u32),
            "q={q} n={n} k={k}"
        );
    }
    let f = f2();
    let r = PolyRing::new(&f);
    assert_eq!(pencil_census(&r, 3, 2).unwrap().total(), big(64));
}

#[test]
fn pencil_census_matches_enumeration() {
    for (p, m, n, k) in [(2, 1, 3, 2), (3, 1, 2, 1), (2, 2, 2, 1), (2, 1, 3, 3)] {
        let f = FieldCtx::new(p, m).unwrap();
        let r = PolyRing::new(&f);
        let closed: BTreeMap<String, BigUint> = pencil_census(&r, n, k).unwrap().entries;
        let brute: BTreeMap<String, BigUint> = brute_tally(&f, n, k)
            .into_iter()
            .map(|(k, v)| (k, big(v)))
            .collect();
        assert_eq!(closed, brute);
    }
}

#[test]
fn consistency_and_marginals() {
    for (p, n, k) in [(2u64, 3usize, 2usize), (2, 4, 3), (3, 3, 2), (2, 3, 3)] {
        let f = FieldCtx::prime(p).unwrap();
        let r = PolyRing::new(&f);
        let q = f.order() as u64;
        let mut by_degree = vec![BigUint::zero(); k + 1];
        for inv in all_invariant_factor_tuples(&r, k) {
            let d = inv.degree();
            let with_u = count_with_subspace(&r, n, k, d, &inv).unwrap();
            assert_eq!(
                count_invariant_factors(&r, n, k, &inv).unwrap(),
                q_binomial(k, d, q) * &with_u
            );
            by_degree[d] += with_u;
        }
        for (d, total) in by_degree.iter().enumerate() {
            assert_eq!(
                *total,
                count_given_u(n, k, d, q).unwrap(),
                "n={n} k={k} d={d}"
            );
        }
    }
}

#[test]
fn given_u_examples() {
    assert_eq!(count_given_u(2, 2, 2, 3).unwrap(), big(3u64.pow(4)));
    assert_eq!(count_given_u(3, 2, 0, 2).unwrap(), big(6 * 4));
    assert_eq!(count_given_u(3, 2, 1, 2).unwrap(), big(8));
    assert!(count_given_u(3, 2, 3, 2).is_err());
}

#[test]
fn reachability_examples() {
    assert_eq!(count_reachability(3, 5, 3, 2).unwrap(), big(30 * 28 * 24));
    assert_eq!(count_reachability(1, 2, 0, 2).unwrap(), big(2));
    assert!(count_reachability(2, 2, 1, 2).is_err());
    assert!(count_reachability(2, 3, 3, 2).is_err());
    for (k, n, q) in [(1, 2, 2), (2, 3, 2), (3, 5, 2), (2, 3, 3), (2, 4, 5)] {
        let total: BigUint = (0..=k)
            .map(|r| count_reachability(k, n, r, q).unwrap())
            .sum();
        assert_eq!(total, BigUint::from(q).pow((k * n) as u32));
    }
}

#[test]
fn char_poly_square_examples() {
    let f = f2();
    let r = PolyRing::new(&f);
    let p = |s| r.parse(s).unwrap();
    assert_eq!(count_char_poly_square(&r, &p("x^2")).unwrap(), big(4));
    assert_eq!(count_char_poly_square(&r, &p("x^3")).unwrap(), big(64));
    assert_eq!(count_char_poly_square(&r, &p("x^2+x+1")).unwrap(), big(2));
    let f3 = FieldCtx::prime(3).unwrap();
    let r3 = PolyRing::new(&f3);
    assert_eq!(
        count_char_poly_square(&r3, &r3.parse("2*x^2").unwrap()),
        Err(CensusError::NonMonic("2*x^2".into()))
    );
}

#[test]
fn gerstenhaber_reiner_totals() {
    for (p, m, n) in [
        (2, 1, 2),
        (2, 1, 3),
        (2, 1, 4),
        (3, 1, 3),
        (2, 2, 2),
        (5, 1, 2),
    ] {
        let f = FieldCtx::new(p, m).unwrap();
        let r = PolyRing::new(&f);
        let q = f.order() as u64;
        let total: BigUint = r
            .monic_of_degree(n)
            .map(|g| count_char_poly_square(&r, &g).unwrap())
            .sum();
        assert_eq!(total, BigUint::from(q).pow((n * n) as u32));
        let xn = Poly::monomial(Elem::ONE, n);
        assert_eq!(
            count_char_poly_square(&r, &xn).unwrap(),
            BigUint::from(q).pow((n * n - n) as u32)
        );
    }
}

#[test]
fn char_poly_rect_examples() {
    let f = f2();
    let r = PolyRing::new(&f);
    let p = |s| r.parse(s).unwrap();
    assert_eq!(count_char_poly_rect(&r, &p("1"), 3, 2).unwrap(), big(6 * 4));
    assert_eq!(
        count_char_poly_rect(&r, &p("x^2+x+1"), 2, 2).unwrap(),
        count_char_poly_square(&r, &p("x^2+x+1")).unwrap()
    );
    assert_eq!(count_char_poly_rect(&r, &p("x"), 3, 2).unwrap(), big(12));
    assert_eq!(
        count_char_poly_rect(&r, &p("x^3"), 3, 2),
        Err(CensusError::DegreeTooLarge { degree: 3, k: 2 })
    );
}

#[test]
fn fibers_are_sums_over_chains() {
    for (p, n, k) in [(2u64, 3usize, 2usize), (2, 4, 3), (3, 3, 2)] {
        let f = FieldCtx::prime(p).unwrap();
        let r = PolyRing::new(&f);
        for g in r.monic_up_to(k) {
            let sum: BigUint = chains_with_product(&r, &g, k)
                .unwrap()
                .iter()
                .map(|inv| count_invariant_factors(&r, n, k, inv).unwrap())
                .sum();
            assert_eq!(
                sum,
                count_char_poly_rect(&r, &g, n, k).unwrap(),
                "{}",
                r.format(&g)
            );
        }
    }
}

#[test]
fn chains_example() {
    let f = f2();
    let r = PolyRing::new(&f);
    let chains = chains_with_product(&r, &r.parse("x^3+x^2").unwrap(), 2).unwrap();
    let keys: Vec<String> = chains.iter().map(|c| c.key(&r)).collect();
    assert_eq!(keys, ["1|x^3+x^2", "x|x^2+x"]);
}

#[test]
fn nilpotent_extendable_examples() {
    assert_eq!(
        count_nilpotent_extendable(3, 3, 2).unwrap(),
        big(2u64.pow(6))
    );
    assert_eq!(count_nilpotent_extendable(1, 2, 2).unwrap(), big(3));
    assert_eq!(count_nilpotent_extendable(2, 3, 2).unwrap(), big(40));
    assert!(count_nilpotent_extendable(3, 2, 2).is_err());
    for (p, m) in [(2, 1), (3, 1), (2, 2)] {
        let f = FieldCtx::new(p, m).unwrap();
        let r = PolyRing::new(&f);
        let q = f.order() as u64;
        for n in 1..=4 {
            for k in 1..=n {
                assert_eq!(
                    nilpotent_extendable_via_fibers(&r, k, n).unwrap(),
                    count_nilpotent_extendable(k, n, q).unwrap()
                );
            }
        }
    }
}

#[test]
fn q_identity_small_cases() {
    assert!(check_q_identity(0, 2, &BigInt::from(17)));
    for y in -5..=5 {
        assert!(check_q_identity(1, 3, &BigInt::from(y)));
    }
}

#[test]
fn q_identity_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 0..=8 {
        for q in [2u64, 3, 5] {
            for _ in 0..100 {
                let y = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
                assert!(check_q_identity(d, q, &y), "d={d} q={q} y={y}");
            }
        }
    }
}

#[test]
fn q_identity_detects_wrong_values() {
    // sanity check that the comparison is not vacuous: perturb q
    let y = BigInt::from(10);
    let lhs = y.pow(3);
    let rhs_with_wrong_q: BigInt = (0..=3usize)
        .map(|j| {
            let qi = |i: usize| BigInt::from(3u64.pow(i as u32));
            let prod = (j + 1..=3).fold(BigInt::from(1), |acc, i| acc * (&y - qi(i)));
            qi(j * j) * prod * BigInt::from(q_binomial(3, j, 2))
        })
        .sum();
    assert_ne!(lhs, rhs_with_wrong_q);
}
