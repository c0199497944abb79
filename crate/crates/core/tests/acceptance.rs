//! Acceptance gate. Run with
//! `cargo test -p qgen --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Pow;
use rayon::prelude::*;

use qgen::diagrams::{enumerate, gram_matrix, loop_count, Diagram, DiagramFamily};
use qgen::exact_linalg::dim_span;
use qgen::fixed_spaces::{
    fixed_space, identity_component_kernel, lie_kernel_oracle, GroupFamily, GroupSpec,
};
use qgen::gencheck::{
    run_generation_check, run_paper_suite, CheckOptions, GenerationTask, Overall, SuiteConfig,
    SuiteInstance, WordFilter,
};
use qgen::realize::realize_diagram;
use qgen::{ColoredWord, Dimension, Limits};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    check(
        elapsed < budget,
        format!("took {elapsed:?}, budget {budget:?}"),
    )
}

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn word(s: &str) -> ColoredWord {
    s.parse().unwrap()
}

fn words_up_to(max_len: usize) -> Vec<ColoredWord> {
    (0..=max_len).flat_map(ColoredWord::all_of_length).collect()
}

fn catalan(k: u64) -> u64 {
    // C_k = binom(2k, k) / (k + 1), built up incrementally.
    (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn double_factorial_odd(k: u64) -> u64 {
    (1..=k).map(|i| 2 * i - 1).product()
}

/// Number of connected components of the graph on points whose edges join
/// consecutive members of each block of `p` and of `q`, by repeated label
/// propagation rather than union-find.
fn join_components(p: &Diagram, q: &Diagram) -> usize {
    let k = p.word().len();
    let mut label: Vec<usize> = (0..k).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for d in [p, q] {
            for block in d.blocks() {
                let m = block.iter().map(|&i| label[i]).min().unwrap();
                for &i in block {
                    if label[i] != m {
                        label[i] = m;
                        changed = true;
                    }
                }
            }
        }
    }
    let mut roots = label.clone();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Dense tensor of a diagram: every multi-index in `[N]^k`, 1 when constant
/// on each block.
fn dense_realization(d: &Diagram, n: u32) -> Vec<i64> {
    let k = d.word().len();
    let total = (n as usize).pow(k as u32);
    let mut out = vec![0; total];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut digits = vec![0; k];
        let mut x = flat;
        for i in (0..k).rev() {
            digits[i] = x % n as usize;
            x /= n as usize;
        }
        let constant = d
            .blocks()
            .iter()
            .all(|b| b.iter().all(|&i| digits[i] == digits[b[0]]));
        *slot = constant as i64;
    }
    out
}

fn criterion_counting() -> Outcome {
    let start = Instant::now();
    let limits = Limits {
        max_word_len: 16,
        ..Limits::default()
    };
    let expected_catalan = [1u64, 2, 5, 14, 42, 132, 429, 1430];
    for k in 1..=8u64 {
        check(
            catalan(k) == expected_catalan[k as usize - 1],
            "catalan oracle",
        )?;
        let w = ColoredWord::uncolored(2 * k as usize);
        let nc = enumerate(DiagramFamily::NCPairings, &w, &limits).map_err(|e| e.to_string())?;
        check(
            nc.len() as u64 == catalan(k),
            format!(
                "NCPairings({}) = {}, expected {}",
                2 * k,
                nc.len(),
                catalan(k)
            ),
        )?;
        let ncp = enumerate(
            DiagramFamily::NCPartitions,
            &ColoredWord::uncolored(k as usize),
            &limits,
        )
        .map_err(|e| e.to_string())?;
        check(
            ncp.len() as u64 == catalan(k),
            format!("NCPartitions({k}) = {}, expected {}", ncp.len(), catalan(k)),
        )?;
        if k <= 6 {
            let all =
                enumerate(DiagramFamily::AllPairings, &w, &limits).map_err(|e| e.to_string())?;
            check(
                all.len() as u64 == double_factorial_odd(k),
                format!(
                    "AllPairings({}) = {}, expected {}",
                    2 * k,
                    all.len(),
                    double_factorial_odd(k)
                ),
            )?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("Catalan k<=8, (2k-1)!! k<=6, in {elapsed:?}"))
}

fn criterion_independence() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let words = words_up_to(8);
    let failures: Vec<String> = words
        .par_iter()
        .flat_map_iter(|w| {
            let ds = enumerate(DiagramFamily::NCMatchedPairings, w, &limits).unwrap();
            [2u32, 3]
                .into_iter()
                .filter_map(|n| {
                    let rank = gram_matrix(&ds, dim(n)).unwrap().rank();
                    (rank != ds.len()).then(|| format!("{w} N={n}: rank {rank} vs {}", ds.len()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    check(failures.is_empty(), failures.join("; "))?;

    let four = ColoredWord::uncolored(4);
    let ds = enumerate(DiagramFamily::NCPairings, &four, &limits).map_err(|e| e.to_string())?;
    check(ds.len() == 2, "two NC pairings of 4 points")?;
    let rank = gram_matrix(&ds, dim(1)).map_err(|e| e.to_string())?.rank();
    check(rank == 1, format!("N=1 rank {rank}, expected 1"))?;

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{} words x N in {{2,3}} full rank, N=1 degenerate, in {elapsed:?}",
        words.len()
    ))
}

fn criterion_realization() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let words = words_up_to(6);
    let jobs: Vec<(DiagramFamily, &ColoredWord, u32)> = DiagramFamily::ALL
        .iter()
        .flat_map(|&f| {
            let words = &words;
            words
                .iter()
                .flat_map(move |w| (1..=3).map(move |n| (f, w, n)))
        })
        .collect();
    let pairs: usize = jobs
        .par_iter()
        .map(|&(family, w, n)| -> Result<usize, String> {
            let ds = enumerate(family, w, &limits).map_err(|e| e.to_string())?;
            let sparse: Vec<_> = ds
                .iter()
                .map(|d| realize_diagram(d, dim(n), &limits).unwrap())
                .collect();
            let dense: Vec<_> = ds.iter().map(|d| dense_realization(d, n)).collect();
            for (i, p) in ds.iter().enumerate() {
                for (j, q) in ds.iter().enumerate() {
                    let loops = loop_count(p, q).map_err(|e| e.to_string())?;
                    let oracle_loops = join_components(p, q);
                    let expected = BigInt::from(n).pow(loops as u32);
                    let ip = sparse[i].inner_product(&sparse[j]).unwrap();
                    let dense_ip: i64 = dense[i].iter().zip(&dense[j]).map(|(a, b)| a * b).sum();
                    if loops != oracle_loops || ip != expected || ip != BigInt::from(dense_ip) {
                        return Err(format!(
                            "{} on {w} N={n}: <{p},{q}> = {ip}, dense {dense_ip}, loops {loops}/{oracle_loops}",
                            family.name()
                        ));
                    }
                }
            }
            Ok(ds.len() * ds.len())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{pairs} pairs, 6 families, len<=6, N<=3, in {elapsed:?}"
    ))
}

fn criterion_lie_kernel() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let words = words_up_to(5);
    let jobs: Vec<(GroupFamily, u32, &ColoredWord)> = [
        GroupFamily::ClassicalU,
        GroupFamily::ClassicalO,
        GroupFamily::TorusAbelian,
    ]
    .iter()
    .flat_map(|&g| {
        let words = &words;
        [2u32, 3]
            .into_iter()
            .flat_map(move |n| words.iter().map(move |w| (g, n, w)))
    })
    .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(g, n, w)| {
            let spec = GroupSpec::new(g, dim(n)).unwrap();
            let a = dim_span(&fixed_space(&spec, w, &limits).unwrap());
            let b = dim_span(&lie_kernel_oracle(&spec, w, &limits).unwrap());
            (a != b).then(|| format!("{} N={n} {w}: {a} vs oracle {b}", g.name()))
        })
        .collect();
    check(failures.is_empty(), failures.join("; "))?;

    let o3 = GroupSpec::new(GroupFamily::ClassicalO, dim(3)).map_err(|e| e.to_string())?;
    let uuu = word("uuu");
    let so3 = dim_span(&identity_component_kernel(&o3, &uuu, &limits).map_err(|e| e.to_string())?);
    let fixed = dim_span(&fixed_space(&o3, &uuu, &limits).map_err(|e| e.to_string())?);
    check(
        so3 == 1,
        format!("SO_3 kernel on uuu has dim {so3}, expected 1"),
    )?;
    check(
        fixed == 0,
        format!("O_3 fixed space on uuu has dim {fixed}, expected 0"),
    )?;

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "{} (group, N, word) cases agree, SO_3/O_3 regression holds, in {elapsed:?}",
        jobs.len()
    ))
}

fn suite_check(
    instance: SuiteInstance,
    target: GroupFamily,
    subgroups: &[GroupFamily],
    n: u32,
    max_len: usize,
    filter: WordFilter,
) -> Result<(), String> {
    let task = GenerationTask::new(target, subgroups, dim(n), max_len, filter)
        .map_err(|e| e.to_string())?;
    let report =
        run_generation_check(&task, &CheckOptions::default()).map_err(|e| e.to_string())?;
    check(
        report.overall == Overall::Pass,
        format!(
            "{} at N={n}: {} (counterexample {:?})",
            instance.name(),
            report.overall,
            report.counterexample.map(|w| w.to_string())
        ),
    )?;
    check(
        report.certified_level == Some(max_len),
        format!(
            "{} certified to {:?}",
            instance.name(),
            report.certified_level
        ),
    )
}

fn criterion_generation() -> Outcome {
    use GroupFamily::*;
    let start = Instant::now();
    suite_check(
        SuiteInstance::LowerRank,
        FreeU,
        &[ClassicalU, EmbeddedFreeULower],
        3,
        6,
        WordFilter::AllColorings,
    )?;
    for n in [2, 3] {
        suite_check(
            SuiteInstance::UnitaryTorus,
            FreeU,
            &[ClassicalU, TorusFreeGroup],
            n,
            6,
            WordFilter::AllColorings,
        )?;
    }
    suite_check(
        SuiteInstance::UnitaryOrthogonalTorus,
        FreeU,
        &[ClassicalO, TorusFreeGroup],
        3,
        6,
        WordFilter::AllColorings,
    )?;
    suite_check(
        SuiteInstance::OrthogonalTorus,
        FreeO,
        &[ClassicalO, TorusFreeZ2],
        3,
        8,
        WordFilter::UncoloredOnly,
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!("all four statements certified, in {elapsed:?}"))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgen"))
        .args(args)
        .output()
        .expect("qgen binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn criterion_negative_controls() -> Outcome {
    for (subgroup, expected) in [("classical-u", 2u64), ("torus-free-group", 4)] {
        let (code, stdout) = run_cli(&[
            "gencheck",
            "--target",
            "free-u",
            "--subgroups",
            subgroup,
            "--N",
            "2",
            "--max-len",
            "4",
        ]);
        check(
            code == 1,
            format!("{subgroup}: exit code {code}, expected 1"),
        )?;
        let report: serde_json::Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
        check(
            report["overall"] == "fail",
            format!("{subgroup}: overall {}", report["overall"]),
        )?;
        let rec = report["words"]
            .as_array()
            .and_then(|ws| ws.iter().find(|r| r["word"] == "uuUU"))
            .ok_or("no uuUU record")?;
        check(
            rec["verdict"] == "fail"
                && rec["intersection"].as_u64() == Some(expected)
                && rec["target"].as_u64() == Some(1),
            format!("{subgroup} on uuUU: {rec}"),
        )?;
    }
    Ok("classical-only fails 2 vs 1, torus-only fails 4 vs 1 on uuUU, exit 1".into())
}

fn criterion_determinism() -> Outcome {
    let config = SuiteConfig::default();
    let a = run_paper_suite(&config, &CheckOptions::default()).map_err(|e| e.to_string())?;
    let b = run_paper_suite(
        &config,
        &CheckOptions {
            workers: 1,
            ..CheckOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    check(a.all_as_expected, "suite not as expected")?;
    check(a.suite_hash == b.suite_hash, "suite hashes differ")?;
    let per_entry = |r: &qgen::gencheck::SuiteReport| -> Vec<String> {
        r.entries
            .iter()
            .map(|e| e.report.report_hash.clone())
            .collect()
    };
    check(per_entry(&a) == per_entry(&b), "entry hashes differ")?;
    for e in &a.entries {
        check(
            e.report.canonical_hash() == e.report.report_hash,
            "stored hash is stale",
        )?;
    }

    let (c1, o1) = run_cli(&["paper-suite"]);
    let (c2, o2) = run_cli(&["paper-suite"]);
    check(
        c1 == 0 && c2 == 0,
        format!("paper-suite exit codes {c1}, {c2}"),
    )?;
    let hash = |s: &str| -> Result<String, String> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Ok(v["suite_hash"].as_str().unwrap_or_default().to_string())
    };
    let (h1, h2) = (hash(&o1)?, hash(&o2)?);
    check(h1 == h2 && h1 == a.suite_hash, "CLI suite hashes differ")?;
    Ok(format!("suite hash {}", &h1[..16]))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("1 counting", criterion_counting),
        ("2 independence", criterion_independence),
        ("3 realization consistency", criterion_realization),
        ("4 lie-kernel agreement", criterion_lie_kernel),
        ("5 generation statements", criterion_generation),
        ("6 negative controls", criterion_negative_controls),
        ("7 determinism", criterion_determinism),
    ];
    let mut results = BTreeMap::new();
    for (name, f) in criteria {
        let outcome = f();
        match &outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => println!("FAIL  {name}: {why}"),
        }
        results.insert(name, outcome.is_ok());
    }
    let failed: Vec<_> = results
        .iter()
        .filter(|(_, ok)| !**ok)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
