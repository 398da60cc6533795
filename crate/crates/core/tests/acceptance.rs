//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linked_ideals::ideal::{enumerate_members, ideal_genfun_vec, walk_genfun_matrix, walk_product, Digraph};
use linked_ideals::multisum::{eval_h, verify_recurrence_numeric, Beta};
use linked_ideals::partition::{oracle_genfun, Partition};
use linked_ideals::prover::{
    assemble_system, check_certificate, FactorizationCheck, HCache, DEFAULT_MAX_EXPANSIONS,
};
use linked_ideals::qdiff::{f_from_g, solve, QDiffSystem};
use linked_ideals::series::{Monomial, Series};

use common::{group_key, ideal, profile, system, SYSTEMS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.1?}, limit {limit:?}"))
}

fn sum(v: &[Series]) -> Series {
    v[1..].iter().fold(v[0].clone(), |acc, s| &acc + s)
}

fn pick(g: &[Series], idx: &[usize]) -> Series {
    let v: Vec<Series> = idx.iter().map(|&i| g[i - 1].clone()).collect();
    sum(&v)
}

fn rr_triple() -> Outcome {
    let start = Instant::now();
    let q = 30;
    let rr = ideal("rr.json");
    let oracle = oracle_genfun(|p| p.satisfies_gap(2, 1), q);
    let members = enumerate_members(&rr, q).total();
    let walks = sum(&ideal_genfun_vec(&rr, q, q));
    let h = eval_h(&profile("ex1_profile.json"), &Beta::from([1]), q, q).map_err(|e| e.to_string())?;
    ensure(oracle == members, "oracle and member enumeration differ")?;
    ensure(oracle == walks, "oracle and chain walks differ")?;
    ensure(oracle == h, "oracle and H(1) differ")?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("{} terms to q^{q}", oracle.len()))
}

fn smallest_part() -> Outcome {
    let start = Instant::now();
    let q = 25;
    let rr = ideal_genfun_vec(&ideal("rr.json"), q, q);
    let kr = ideal_genfun_vec(&ideal("kr_i1.json"), q, q);
    let ex1 = profile("ex1_profile.json");
    let krp = profile("kr_profile.json");
    let h = |p, b: Beta| eval_h(p, &b, q, q).map_err(|e| e.to_string());
    ensure(pick(&rr, &[1, 3]) == h(&ex1, Beta::from([2]))?, "RR G1+G3 != H(2)")?;
    ensure(pick(&kr, &[1, 5, 6, 7]) == h(&krp, Beta::from([2, 6]))?, "KR G1+G5+G6+G7 != H(2,6)")?;
    ensure(pick(&kr, &[1, 6, 7]) == h(&krp, Beta::from([3, 6]))?, "KR G1+G6+G7 != H(3,6)")?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("three refinements to q^{q}"))
}

fn kr_oracle() -> Outcome {
    let q = 25;
    let oracle = oracle_genfun(Partition::kr_i1, q);
    let h = eval_h(&profile("kr_profile.json"), &Beta::from([1, 3]), q, q).map_err(|e| e.to_string())?;
    ensure(oracle == h, "brute force != H(1,3)")?;
    Ok(format!("{} terms to q^{q}", oracle.len()))
}

fn qdiff_uniqueness() -> Outcome {
    let q = 25;
    for name in ["rr.json", "kr_i1.json"] {
        let id = ideal(name);
        let sys = QDiffSystem::from_ideal(&id).map_err(|e| e.to_string())?;
        let f = solve(&sys, q, q);
        let g = ideal_genfun_vec(&id, q, q);
        ensure(f == f_from_g(sys.adjacency(), &g), format!("{name}: solve != A.G"))?;
    }
    Ok(format!("RR and KR to q^{q}"))
}

fn recurrence_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let q = 20;
    let mut checked = 0;
    for name in ["ex1_profile.json", "kr_profile.json", "ex3_profile.json"] {
        let p = profile(name);
        for _ in 0..50 {
            let beta = Beta((0..p.rank()).map(|_| rng.gen_range(1..=8)).collect());
            for r in 0..p.rank() {
                let ok = verify_recurrence_numeric(&p, &beta, r, q, q).map_err(|e| e.to_string())?;
                ensure(ok, format!("{name}: fails at {beta}, coordinate {}", r + 1))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (β, r) pairs at q^{q}"))
}

fn certificates() -> Outcome {
    let start = Instant::now();
    let mut trees = 0;
    for name in SYSTEMS {
        let spec = system(name);
        let sys = assemble_system(&spec.profile, spec.shift, &spec.betas, DEFAULT_MAX_EXPANSIONS)
            .map_err(|e| format!("{name}: {e}"))?;
        let (u, v) = (spec.u.unwrap(), spec.v.unwrap());
        ensure(
            group_key(&sys.profile, sys.shift, &sys.betas, &sys.u, &sys.v)
                == group_key(&spec.profile, spec.shift, &spec.betas, &u, &v),
            format!("{name}: (U, V) differs from the reference beyond column permutation"),
        )?;
        let mut cache = HCache::new(&sys.profile, 15, 15);
        for t in &sys.certificates {
            let c = check_certificate(&mut cache, t).map_err(|e| e.to_string())?;
            ensure(c.passed(), format!("{name}: certificate for {} is unsound", t.beta))?;
            trees += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{trees} certificates sound, matrices match"))
}

fn verify_fixtures() -> Outcome {
    let q = 25;
    for name in SYSTEMS {
        let spec = system(name);
        let check = FactorizationCheck::new(&spec.profile, spec.shift, &spec.betas, q, q).map_err(|e| e.to_string())?;
        ensure(check.holds(spec.u.as_ref().unwrap(), spec.v.as_ref().unwrap()), format!("{name} fails"))?;
    }
    Ok(format!("three systems at q^{q}"))
}

fn random_digraph(rng: &mut ChaCha8Rng, k: usize) -> Digraph {
    let adjacency = (0..k).map(|_| (0..k).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let weights = (0..k).map(|_| Monomial::new(rng.gen_range(0..=2), rng.gen_range(0..=3))).collect();
    Digraph { adjacency, weights }
}

fn mat_pow(a: &[Vec<bool>], m: u32) -> Vec<Vec<BigInt>> {
    let k = a.len();
    let mut p: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for _ in 0..m {
        p = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).filter(|&l| a[l][j]).map(|l| p[i][l].clone()).sum())
                    .collect()
            })
            .collect();
    }
    p
}

/// Σ over walks `i = v_0 → ⋯ → v_M = j` of `∏_t W_{v_t}(x q^{tS})`.
fn walk_sum(g: &Digraph, i: usize, j: usize, m: u32, shift: u32, x: u32, q: u32) -> Series {
    let mut walks = vec![(i, Series::one(x, q))];
    for t in 0..=m {
        let mut next = Vec::new();
        for (at, acc) in walks {
            let w = g.weights[at];
            let acc = acc.mul_monomial(Monomial::new(w.x, w.q + t * shift * w.x));
            if t == m {
                next.push((at, acc));
            } else {
                next.extend((0..g.len()).filter(|&v| g.adjacency[at][v]).map(|v| (v, acc.clone())));
            }
        }
        walks = next;
    }
    walks
        .into_iter()
        .filter(|(at, _)| *at == j)
        .fold(Series::zero(x, q), |acc, (_, s)| &acc + &s)
}

fn walk_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        let k = rng.gen_range(1..=6);
        let m = rng.gen_range(0..=5);
        let g = random_digraph(&mut rng, k);
        let at_one = walk_product(&g, m, 2, &BigInt::one());
        ensure(at_one == mat_pow(&g.adjacency, m), format!("trial {trial}: K={k}, M={m} differs from A^M"))?;
    }
    for trial in 0..20 {
        let k = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=3);
        let shift = rng.gen_range(1..=3);
        let g = random_digraph(&mut rng, k);
        let sym = walk_genfun_matrix(&g, m, shift, 12, 30);
        for (i, row) in sym.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                ensure(
                    *entry == walk_sum(&g, i, j, m, shift, 12, 30),
                    format!("trial {trial}: entry ({}, {}) differs from walk enumeration", i + 1, j + 1),
                )?;
            }
        }
    }
    Ok("20 numeric and 20 symbolic digraphs".into())
}

fn mutations() -> Outcome {
    let q = 15;
    let mut caught = 0;
    for name in SYSTEMS {
        let spec = system(name);
        let (u, v) = (spec.u.unwrap(), spec.v.unwrap());
        let check = FactorizationCheck::new(&spec.profile, spec.shift, &spec.betas, q, q).map_err(|e| e.to_string())?;
        ensure(check.holds(&u, &v), format!("{name}: unmutated system fails"))?;
        for k in 0..u.len() {
            for j in 0..u.len() {
                let mut row = u[k].clone();
                row[j] ^= 1;
                ensure(!check.row_holds(k, &row, &v), format!("{name}: flipping U[{}][{}] goes unnoticed", k + 1, j + 1))?;
                caught += 1;
            }
        }
        for j in 0..v.len() {
            for (dx, dq) in [(1, 0), (0, 1)] {
                let mut w = v.clone();
                w[j] = Monomial::new(v[j].x + dx, v[j].q + dq);
                ensure(!check.holds(&u, &w), format!("{name}: perturbing V[{}] goes unnoticed", j + 1))?;
                caught += 1;
            }
        }
    }
    Ok(format!("{caught} mutants rejected"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gap-two triple agreement", rr_triple),
        ("smallest-part refinements", smallest_part),
        ("I1 predicate oracle", kr_oracle),
        ("q-difference uniqueness", qdiff_uniqueness),
        ("recurrence on random parameters", recurrence_property),
        ("certificate reproduction", certificates),
        ("numeric verification of fixture systems", verify_fixtures),
        ("walk counts", walk_counts),
        ("mutation sensitivity", mutations),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({t:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({t:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
