//! Acceptance run: one PASS/FAIL line per criterion, exact equality throughout.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tetra_core::network::resolve_convention;
use tetra_core::symfunc::{loop_elementary, BlockSpec};
use tetra_core::verify::{self, grids, CheckReport};
use tetra_core::{LayerEngine, PartitionSpec, Poly, Var};

struct Outcome {
    pass: bool,
    note: String,
}

fn from_reports(reports: Vec<CheckReport>) -> Outcome {
    let total = reports.len();
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    let note = match failed.first() {
        None => format!("{total} checks"),
        Some(r) => format!("{} of {total} failed, first: {r}", failed.len()),
    };
    Outcome { pass: failed.is_empty() && total > 0, note }
}

fn within(o: Outcome, took: Duration, limit: Duration) -> Outcome {
    if took <= limit {
        o
    } else {
        Outcome { pass: false, note: format!("{} (took {took:?}, limit {limit:?})", o.note) }
    }
}

fn p(s: &str) -> Poly {
    s.parse().expect("literal")
}

fn criterion1() -> Outcome {
    let conv = match resolve_convention(4) {
        Ok(c) => c,
        Err(e) => return Outcome { pass: false, note: e.to_string() },
    };
    let engine = LayerEngine::new(conv);
    let cases = [
        (PartitionSpec::scalar(4, &[1, 2, 3, 3, 4]), p("z1 z2^2 z3^3 z4^3 z5^4"), 1),
        (PartitionSpec::scalar(4, &[3, 3, 1]), p("z1^3 z2^2 z3^2 + z1^3 z2^3 z3 + z1^2 z2^3 z3^2"), 3),
    ];
    for (spec, want, count) in cases {
        let got: Poly = engine.vev(&spec).expect("vev");
        let confs = engine.configurations(&spec).expect("configurations").len();
        if got != want || confs != count {
            return Outcome { pass: false, note: format!("labels {:?}: got {got} with {confs} configurations", spec.labels()) };
        }
    }
    Outcome { pass: true, note: format!("unique convention {conv}") }
}

fn criterion3(engine: &LayerEngine) -> Outcome {
    let jobs: Vec<(u32, u32, u32)> =
        (2..=4).flat_map(|n| (0..=n).flat_map(move |i| (0..=n).map(move |j| (n, i, j)))).collect();
    from_reports(
        jobs.par_iter().map(|&(n, i, j)| verify::check_zf(engine, n, (i, j), 4, (Var::Z(1), Var::Z(2)))).collect(),
    )
}

fn schur_grid() -> Vec<(u32, Vec<u32>, Vec<usize>)> {
    (2..=4u32).flat_map(|n| grids::schur(n, 4, 2, 5).into_iter().map(move |(l, m)| (n, l, m))).collect()
}

fn criterion4(engine: &LayerEngine) -> Outcome {
    from_reports(schur_grid().par_iter().map(|(n, l, m)| verify::check_schur_correspondence(engine, *n, l, m)).collect())
}

fn criterion5(engine: &LayerEngine) -> Outcome {
    let jobs: Vec<(u32, Vec<u32>)> =
        (2..=4u32).flat_map(|n| grids::weakly_increasing(n, 5).into_iter().map(move |l| (n, l))).collect();
    from_reports(jobs.par_iter().map(|(n, l)| verify::check_increasing_monomial(engine, *n, l)).collect())
}

fn criterion6(engine: &LayerEngine) -> Outcome {
    let mut reports: Vec<CheckReport> =
        schur_grid().par_iter().map(|(n, l, m)| verify::check_counting(engine, *n, l, m)).collect();
    reports.extend((1..=3).map(|l| verify::check_average_number(engine, 4, l)));
    from_reports(reports)
}

fn criterion7(engine: &LayerEngine) -> Outcome {
    let labels: Vec<Vec<u32>> =
        grids::schur(4, 4, 1, 4).into_iter().filter(|(l, _)| l.len() == 4).map(|(l, _)| l).collect();
    from_reports(labels.par_iter().map(|l| verify::check_hat(engine, 4, l, &[1, 0, 0, 0])).collect())
}

fn criterion8(engine: &LayerEngine) -> Outcome {
    let mut jobs: Vec<(u32, Vec<usize>)> = Vec::new();
    for n in [3u32, 4] {
        for last in 1..=3 {
            let mut m = vec![1; n as usize - 1];
            m.push(last);
            jobs.push((n, m));
        }
    }
    for m in [[1usize, 1, 1], [2, 1, 1], [1, 2, 2]] {
        jobs.push((3, m.to_vec()));
    }
    from_reports(jobs.par_iter().map(|(n, m)| verify::check_inhomogeneous(engine, *n, m)).collect())
}

fn criterion9(engine: &LayerEngine) -> Outcome {
    let mut reports = Vec::new();
    for k in 1..=4usize {
        for l in 0..=4 - k {
            for n in l.max(1)..=5 {
                reports.push(verify::check_column_auxiliary(k, l, n));
            }
        }
    }
    for k in 1..=3 {
        for n in k..=5 {
            reports.push(verify::check_column_fundamental(k, n));
        }
        for n in 2..=5 {
            reports.push(verify::check_column_decomposition(k, n));
        }
    }
    for n in [3, 4] {
        for extra in 0..=1 {
            reports.push(verify::check_reduction(engine, n, extra));
        }
    }
    from_reports(reports)
}

fn random_blocks(rng: &mut ChaCha8Rng) -> BlockSpec {
    loop {
        let vars = rng.gen_range(1..=4);
        let mut parts: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=8)).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        if parts.iter().sum::<u32>() > 8 {
            continue;
        }
        let mut blocks: Vec<(u32, usize)> = Vec::new();
        for p in parts {
            match blocks.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => blocks.push((p, 1)),
            }
        }
        return BlockSpec::new(&blocks).expect("sorted");
    }
}

fn criterion10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let specs: Vec<BlockSpec> = (0..50).map(|_| random_blocks(&mut rng)).collect();
    let mut reports: Vec<CheckReport> = specs.par_iter().map(verify::check_schur_routes).collect();
    reports.push(verify::check_q_limit(4));
    let routes = from_reports(reports);
    if !routes.pass {
        return routes;
    }
    for trial in 0..50 {
        let k = rng.gen_range(1..=4usize);
        let n = rng.gen_range(k..=6usize);
        let coeffs: Vec<Vec<i64>> = (0..=n).map(|_| (0..=k).map(|_| rng.gen_range(1..=5)).collect()).collect();
        let table =
            |j: usize, i: usize| Poly::var(Var::site(j as u32, i as u32, 1)).scale(&BigInt::from(coeffs[j][i]));
        let whole = loop_elementary(k, table, n);
        let mut split = loop_elementary(k, table, n - 1);
        split += &(&table(n, k) * &loop_elementary(k - 1, table, n - 1));
        if whole != split {
            return Outcome { pass: false, note: format!("recursion fails at trial {trial}: k={k} n={n}") };
        }
    }
    Outcome { pass: true, note: format!("{} route checks, 50 recursion instances", specs.len() + 1) }
}

fn main() -> ExitCode {
    let engine = match LayerEngine::resolved() {
        Ok(e) => e,
        Err(e) => {
            println!("FAIL convention resolution: {e}");
            return ExitCode::FAILURE;
        }
    };
    let minute = Duration::from_secs(60);
    type Crit<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Crit> = vec![
        ("1 convention and worked examples", minute, Box::new(criterion1)),
        ("2 tetrahedron equation, cutoff 4", minute, Box::new(|| from_reports(vec![verify::check_tetrahedron(4)]))),
        ("3 exchange relations, n = 2..4", 5 * minute, Box::new(|| criterion3(&engine))),
        ("4 Schur correspondence grid", 10 * minute, Box::new(|| criterion4(&engine))),
        ("5 weakly increasing labels", 10 * minute, Box::new(|| criterion5(&engine))),
        ("6 counting and average number", 10 * minute, Box::new(|| criterion6(&engine))),
        ("7 derivative corollaries", 10 * minute, Box::new(|| criterion7(&engine))),
        ("8 inhomogeneous theorems", 10 * minute, Box::new(|| criterion8(&engine))),
        ("9 one-column lemmas", 10 * minute, Box::new(|| criterion9(&engine))),
        ("10 oracle cross-checks", 10 * minute, Box::new(criterion10)),
    ];
    let mut all = true;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let took_outcome = f();
        let took = start.elapsed();
        let o = within(took_outcome, took, limit);
        all &= o.pass;
        println!("{} criterion {name}: {} ({:.2?})", if o.pass { "PASS" } else { "FAIL" }, o.note, took);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
