//! End-to-end agreement between closed-form counts and brute-force
//! enumeration. Prints one PASS/FAIL line per criterion and exits nonzero if
//! any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use pencilcount::census::{self, EXTENDABLE_KEY};
use pencilcount::oracle::{self, EnumConfig};
use pencilcount::smith::{det_divisor, snf};
use pencilcount::{
    CensusKind, FieldCtx, InvariantFactors, PolyMatrix, PolyRing, ScalarMatrix, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

/// Name, check and wall-clock limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

const PENCIL_GRID: [(u64, usize, usize); 8] = [
    (2, 2, 1),
    (2, 2, 2),
    (2, 3, 2),
    (2, 4, 3),
    (3, 2, 2),
    (3, 3, 2),
    (4, 3, 2),
    (5, 2, 2),
];

fn field(q: u64) -> FieldCtx {
    FieldCtx::from_spec(&q.to_string()).expect("valid field")
}

fn pow(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// `∏_{i=1}^{k} (q^n - q^i)`, computed directly.
fn reachable_product(q: u64, n: usize, k: usize) -> BigUint {
    (1..=k).fold(BigUint::from(1u32), |acc, i| acc * (pow(q, n) - pow(q, i)))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(cfg: &EnumConfig) -> Result<pencilcount::CensusReport, String> {
    oracle::enumerate(cfg).map_err(|e| e.to_string())
}

fn agree(cfg: &EnumConfig) -> Result<pencilcount::CensusReport, String> {
    let observed = run(cfg)?;
    let expected = oracle::closed_form(cfg).map_err(|e| e.to_string())?;
    let diff = oracle::verify(&expected, &observed).map_err(|e| e.to_string())?;
    ensure(diff.verdict, || {
        let bad: Vec<_> = diff.mismatches().map(|e| e.key.clone()).collect();
        format!(
            "{:?} q={} n={} k={}: mismatched keys {bad:?}",
            cfg.mode,
            cfg.field.order(),
            cfg.n,
            cfg.k
        )
    })?;
    Ok(observed)
}

fn pencil_census_equivalence() -> Outcome {
    for (q, n, k) in PENCIL_GRID {
        let cfg = EnumConfig::new(field(q), CensusKind::Pencil, n, k);
        let observed = agree(&cfg)?;
        let ring = PolyRing::new(&cfg.field);
        for (key, count) in &observed.entries {
            let inv = InvariantFactors::parse(&ring, key).map_err(|e| e.to_string())?;
            ensure(inv.degree() <= k, || format!("{key}: degree exceeds k"))?;
            let formula =
                census::count_invariant_factors(&ring, n, k, &inv).map_err(|e| e.to_string())?;
            ensure(&formula == count, || {
                format!("q={q} n={n} k={k} {key}: {formula} vs {count}")
            })?;
        }
        ensure(observed.total() == pow(q, n * k), || {
            format!("q={q} n={n} k={k}: total {}", observed.total())
        })?;
    }
    Ok(())
}

fn conjugacy_class_sizes() -> Outcome {
    for q in [2, 3] {
        for n in [2, 3] {
            let cfg = EnumConfig::new(field(q), CensusKind::Pencil, n, n);
            let observed = run(&cfg)?;
            let ring = PolyRing::new(&cfg.field);
            let mut sum = BigUint::zero();
            for inv in census::all_invariant_factor_tuples(&ring, n) {
                let size = census::count_conjugacy_class(&ring, &inv).map_err(|e| e.to_string())?;
                let seen = observed
                    .entries
                    .get(&inv.key(&ring))
                    .cloned()
                    .unwrap_or_default();
                ensure(size == seen, || {
                    format!("q={q} n={n} {}: {size} vs {seen}", inv.key(&ring))
                })?;
                sum += size;
            }
            ensure(sum == pow(q, n * n), || {
                format!("q={q} n={n}: classes sum to {sum}")
            })?;
        }
    }
    Ok(())
}

fn fixed_subspace_counts() -> Outcome {
    let f = field(2);
    for (n, k) in [(3, 2), (4, 3)] {
        for d in 0..=k {
            let given_u = census::count_given_u(n, k, d, 2).map_err(|e| e.to_string())?;
            for u in Subspace::enumerate(&f, k, d) {
                let cfg = EnumConfig::new(f.clone(), CensusKind::Subspace, n, k).with_subspace(u);
                let observed = agree(&cfg)?;
                ensure(observed.total() == given_u, || {
                    format!("n={n} k={k} d={d}: total {} vs {given_u}", observed.total())
                })?;
            }
        }
    }
    Ok(())
}

fn reachability_distribution() -> Outcome {
    for (q, k, n) in [(2, 1, 2), (2, 2, 3), (2, 3, 5), (3, 1, 2), (3, 2, 3)] {
        let cfg = EnumConfig::new(field(q), CensusKind::Pair, n, k);
        let observed = agree(&cfg)?;
        ensure(observed.total() == pow(q, k * n), || {
            format!("q={q} k={k} n={n}: total")
        })?;
        let full = observed
            .entries
            .get(&k.to_string())
            .cloned()
            .unwrap_or_default();
        ensure(full == reachable_product(q, n, k), || {
            format!("q={q} k={k} n={n}: r=k count {full}")
        })?;
    }
    Ok(())
}

fn gerstenhaber_reiner() -> Outcome {
    let f = field(2);
    let ring = PolyRing::new(&f);
    for (n, want) in [(2, 4u64), (3, 64), (4, 4096)] {
        let cfg = EnumConfig::new(f.clone(), CensusKind::Fiber, n, n);
        let observed = run(&cfg)?;
        let mut covered = 0;
        for g in ring.monic_of_degree(n) {
            let key = ring.format(&g);
            let formula = census::count_char_poly_square(&ring, &g).map_err(|e| e.to_string())?;
            let seen = observed.entries.get(&key).cloned().unwrap_or_default();
            ensure(formula == seen, || {
                format!("n={n} {key}: {formula} vs {seen}")
            })?;
            covered += usize::from(!seen.is_zero());
        }
        ensure(covered == observed.entries.len(), || {
            format!("n={n}: unexpected fiber keys")
        })?;
        let xn = observed
            .entries
            .get(&format!("x^{n}"))
            .cloned()
            .unwrap_or_default();
        ensure(xn == BigUint::from(want), || {
            format!("n={n}: x^n fiber {xn}")
        })?;
    }
    Ok(())
}

fn extended_fiber_formula() -> Outcome {
    let f = field(2);
    let ring = PolyRing::new(&f);
    for (n, k) in [(3, 2), (4, 3)] {
        let observed = agree(&EnumConfig::new(f.clone(), CensusKind::Fiber, n, k))?;
        for g in ring.monic_up_to(k) {
            let key = ring.format(&g);
            let formula =
                census::count_char_poly_rect(&ring, &g, n, k).map_err(|e| e.to_string())?;
            let seen = observed.entries.get(&key).cloned().unwrap_or_default();
            ensure(formula == seen, || {
                format!("n={n} k={k} {key}: {formula} vs {seen}")
            })?;
        }
        let pairs = run(&EnumConfig::new(f.clone(), CensusKind::Pair, n, k))?;
        let reachable = pairs
            .entries
            .get(&k.to_string())
            .cloned()
            .unwrap_or_default();
        let unit_fiber = observed.entries.get("1").cloned().unwrap_or_default();
        ensure(
            unit_fiber == reachable && reachable == reachable_product(2, n, k),
            || format!("n={n} k={k}: f=1 fiber {unit_fiber}, reachable pairs {reachable}"),
        )?;
    }
    Ok(())
}

fn nilpotent_extendability() -> Outcome {
    let f = field(2);
    let ring = PolyRing::new(&f);
    for ((n, k), want) in [((2, 1), 3u64), ((2, 2), 4), ((3, 2), 40)] {
        let cfg = EnumConfig::new(f.clone(), CensusKind::Nilext, n, k);
        let search = oracle::enumerate_nilpotent_extendable(&cfg).map_err(|e| e.to_string())?;
        let closed = census::count_nilpotent_extendable(k, n, 2).map_err(|e| e.to_string())?;
        let fibers =
            census::nilpotent_extendable_via_fibers(&ring, k, n).map_err(|e| e.to_string())?;
        let report = agree(&cfg)?;
        let want = BigUint::from(want);
        ensure(
            search == want
                && closed == want
                && fibers == want
                && report.entries[EXTENDABLE_KEY] == want,
            || format!("n={n} k={k}: search {search}, closed {closed}, fibers {fibers}"),
        )?;
    }
    Ok(())
}

fn q_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
    for d in 0..=8 {
        for q in [2, 3, 5] {
            for _ in 0..100 {
                let y = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
                ensure(census::check_q_identity(d, q, &y), || {
                    format!("d={d} q={q} y={y}")
                })?;
            }
        }
    }
    Ok(())
}

fn check_snf(ring: &PolyRing, b: &ScalarMatrix) -> Outcome {
    let pencil = PolyMatrix::pencil(ring.field(), b);
    let res = snf(ring, &pencil);
    let k = b.cols();
    ensure(res.rank == k, || {
        format!("rank {} for a pencil with {k} columns", res.rank)
    })?;
    let mut prev = pencilcount::Poly::one();
    for i in 0..k {
        let p = &res.diagonal[i];
        ensure(p.is_monic(), || {
            format!("p_{} = {} not monic", i + 1, ring.format(p))
        })?;
        if i > 0 {
            ensure(ring.divides(&res.diagonal[i - 1], p), || {
                "divisibility chain broken".to_string()
            })?;
        }
        let delta = det_divisor(ring, &pencil, i + 1).map_err(|e| e.to_string())?;
        let (quot, rem) = ring.divmod(&delta, &prev).map_err(|e| e.to_string())?;
        ensure(rem.is_zero() && &quot == p, || {
            format!(
                "{:?}: p_{} = {}, δ quotient {}",
                b.to_rows(),
                i + 1,
                ring.format(p),
                ring.format(&quot)
            )
        })?;
        prev = delta;
    }
    Ok(())
}

fn snf_internal_oracle() -> Outcome {
    let mut configs: Vec<(u64, usize, usize)> = PENCIL_GRID.to_vec();
    configs.extend([
        (2, 5, 4),
        (3, 4, 3),
        (9, 3, 3),
        (7, 3, 2),
        (2, 6, 5),
        (8, 4, 4),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51f);
    for (q, n, k) in configs {
        let f = field(q);
        let ring = PolyRing::new(&f);
        let space = (q as f64).powi((n * k) as i32);
        if space <= 4096.0 {
            for idx in 0..space as u64 {
                check_snf(&ring, &oracle::decode_matrix(&f, n, k, idx))?;
            }
        }
        for _ in 0..1000 {
            let entries = (0..n * k)
                .map(|_| f.elem(rng.gen_range(0..q as i64)).expect("in range"))
                .collect();
            check_snf(
                &ring,
                &ScalarMatrix::from_entries(n, k, entries).expect("shape"),
            )?;
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    for (q, n, k) in PENCIL_GRID {
        let base = EnumConfig::new(field(q), CensusKind::Pencil, n, k);
        let one = run(&base)?.to_json();
        let mut four = base.with_workers(4);
        four.chunk_size = 97;
        let four = run(&four)?.to_json();
        ensure(one == four, || {
            format!("q={q} n={n} k={k}: JSON differs between 1 and 4 workers")
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pencil census equivalence", pencil_census_equivalence, 30),
        ("conjugacy class sizes", conjugacy_class_sizes, 10),
        ("fixed-subspace counts", fixed_subspace_counts, 20),
        ("reachability distribution", reachability_distribution, 30),
        (
            "characteristic polynomial fibers (square)",
            gerstenhaber_reiner,
            60,
        ),
        (
            "characteristic polynomial fibers (rectangular)",
            extended_fiber_formula,
            30,
        ),
        ("nilpotent extendability", nilpotent_extendability, 20),
        ("q-identity", q_identity, 1),
        ("SNF vs determinantal divisors", snf_internal_oracle, 30),
        ("determinism across worker counts", determinism, 60),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > Duration::from_secs(*limit) {
            outcome = Err(format!("took {elapsed:.2?}, limit {limit}s"));
        }
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", criteria.len());
        ExitCode::FAILURE
    }
}
