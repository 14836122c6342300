//! Randomized invariant checks over small fields, driven by a seed.

use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use num_bigint::{BigInt, BigUint};
use pencilcount::census;
use pencilcount::oracle::{self, EnumConfig};
use pencilcount::smith::{det_divisor, snf};
use pencilcount::{CensusKind, FieldCtx, Poly, PolyMatrix, PolyRing, ScalarMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random cases per check.
    #[arg(long, default_value_t = 200)]
    cases: usize,
}

const FIELDS: [&str; 7] = ["2", "3", "2^2", "5", "7", "2^3", "3^2"];

type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

fn random_field(rng: &mut ChaCha8Rng, choices: &[&str]) -> FieldCtx {
    FieldCtx::from_spec(choices.choose(rng).expect("nonempty")).expect("valid")
}

fn random_matrix(rng: &mut ChaCha8Rng, f: &FieldCtx, rows: usize, cols: usize) -> ScalarMatrix {
    let q = f.order() as i64;
    let e = (0..rows * cols)
        .map(|_| f.elem(rng.gen_range(0..q)).expect("in range"))
        .collect();
    ScalarMatrix::from_entries(rows, cols, e).expect("shape")
}

fn snf_matches_divisors(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(rng, &FIELDS);
    let ring = PolyRing::new(&f);
    let k = rng.gen_range(1..=4);
    let n = rng.gen_range(k..=5);
    let pencil = PolyMatrix::pencil(&f, &random_matrix(rng, &f, n, k));
    let res = snf(&ring, &pencil);
    let mut prev = Poly::one();
    for (i, p) in res.diagonal.iter().enumerate() {
        let delta = det_divisor(&ring, &pencil, i + 1).map_err(|e| e.to_string())?;
        if ring.mul(&prev, p) != delta {
            return Err(format!(
                "F_{} {n}x{k}: p_{} = {}",
                f.order(),
                i + 1,
                ring.format(p)
            ));
        }
        prev = delta;
    }
    Ok(())
}

fn factorization_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(rng, &FIELDS);
    let ring = PolyRing::new(&f);
    let q = f.order() as i64;
    let deg = rng.gen_range(1..=8);
    let mut coeffs: Vec<_> = (0..=deg)
        .map(|_| f.elem(rng.gen_range(0..q)).expect("in range"))
        .collect();
    coeffs[deg] = f.elem(rng.gen_range(1..q)).expect("in range");
    let g = Poly::from_coeffs(coeffs);
    let fact = ring.factorize(&g).map_err(|e| e.to_string())?;
    if ring.reconstruct(&fact) != g
        || !fact
            .factors
            .iter()
            .all(|(p, _)| ring.is_irreducible(p) && p.is_monic())
    {
        return Err(format!("F_{}: {}", f.order(), ring.format(&g)));
    }
    let text = ring.format(&g);
    match ring.parse(&text) {
        Ok(back) if back == g => Ok(()),
        _ => Err(format!("F_{}: {text} does not reparse", f.order())),
    }
}

fn census_totals(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(rng, &FIELDS[..3]);
    let ring = PolyRing::new(&f);
    let q = f.order() as u64;
    let n = rng.gen_range(2..=4);
    let k = rng.gen_range(1..n);
    let space = BigUint::from(q).pow((n * k) as u32);
    let pencils = census::pencil_census(&ring, n, k).map_err(|e| e.to_string())?;
    let fibers = census::fiber_census(&ring, n, k).map_err(|e| e.to_string())?;
    let pairs = census::pair_census(&ring, k, n).map_err(|e| e.to_string())?;
    if pencils.total() != space || fibers.total() != space || pairs.total() != space {
        return Err(format!("q={q} n={n} k={k}: totals differ from q^(nk)"));
    }
    Ok(())
}

fn oracle_agrees(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(rng, &FIELDS[..3]);
    let q = f.order() as u64;
    let mode = *[CensusKind::Pencil, CensusKind::Fiber, CensusKind::Pair]
        .choose(rng)
        .expect("nonempty");
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    if q.pow((n * k) as u32) > 4096 {
        return Ok(());
    }
    let cfg = EnumConfig::new(f, mode, n, k);
    let observed = oracle::enumerate(&cfg).map_err(|e| e.to_string())?;
    let expected = oracle::closed_form(&cfg).map_err(|e| e.to_string())?;
    match oracle::verify(&expected, &observed) {
        Ok(d) if d.verdict => Ok(()),
        Ok(d) => Err(format!("{mode:?} q={q} n={n} k={k}: {}", d.summary())),
        Err(e) => Err(e.to_string()),
    }
}

fn q_identity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = rng.gen_range(0..=10);
    let q = rng.gen_range(2..=9);
    let y = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
    if census::check_q_identity(d, q, &y) {
        Ok(())
    } else {
        Err(format!("d={d} q={q} y={y}"))
    }
}

/// Runs every check `args.cases` times; returns the report and overall verdict.
pub fn run(args: &SelftestArgs) -> Result<(String, bool)> {
    let checks: [(&str, Check); 5] = [
        ("snf matches determinantal divisors", snf_matches_divisors),
        ("factorization round trip", factorization_round_trip),
        ("census totals", census_totals),
        ("oracle agrees with closed forms", oracle_agrees),
        ("q-identity", q_identity),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = String::new();
    let mut all_ok = true;
    for (name, check) in checks {
        let failure = (0..args.cases).find_map(|_| check(&mut rng).err());
        match failure {
            None => writeln!(out, "PASS  {name} ({} cases)", args.cases)?,
            Some(why) => {
                all_ok = false;
                writeln!(out, "FAIL  {name}: {why}")?;
            }
        }
    }
    writeln!(out, "seed {}", args.seed)?;
    Ok((out, all_ok))
}
