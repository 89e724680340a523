//! The acceptance suite. Runs without the libtest harness so every
//! criterion prints one `ACCEPTANCE <n> <name>: pass|fail` line.

mod common;

use std::cell::Cell;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{
    fixture, foreign_event, interleave, oracle_serializable, own_events, random_fragments,
    random_history, reference_awar, reference_raw, scratch, seeded, ALL_TMS,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tmlab::analysis::{analyze, find_awar, find_raw};
use tmlab::harness::scenarios::{disjoint_fragments, run_scenario, ScenarioKind, ScenarioParams};
use tmlab::model::trace::parse_history;
use tmlab::model::{Event, TxnId};
use tmlab::serializability::{check_strict_serializability, SearchBound};
use tmlab::tms::TmKind;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tmlab(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_tmlab"))
        .args(args)
        .output()
        .unwrap();
    let took = start.elapsed();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        took,
    )
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `key=<n>` out of a whitespace separated line.
fn field(line: &str, key: &str) -> usize {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(key))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {key} in `{line}`"))
}

fn version_growth() -> Outcome {
    let mut slowest = Duration::ZERO;
    for c in [2usize, 4, 8, 16] {
        for l in [2usize, 4] {
            let (cs, ls) = (c.to_string(), l.to_string());
            let tag = format!("c={c} L={l}");
            let (code, out, took) = tmlab(&[
                "run",
                "--tm",
                "mv-invisible",
                "--scenario",
                "theorem1",
                "--phases",
                &cs,
                "--objects",
                &ls,
            ]);
            slowest = slowest.max(took);
            ensure(code == 0, || format!("{tag}: exit {code}\n{out}"))?;
            let distinct: Vec<&str> = out.lines().filter(|x| x.starts_with("DISTINCT ")).collect();
            ensure(distinct.len() == l, || {
                format!("{tag}: {} DISTINCT lines", distinct.len())
            })?;
            for d in &distinct {
                ensure(d.ends_with(&format!(" {c}")), || format!("{tag}: {d}"))?;
            }
            for v in out.lines().filter(|x| x.starts_with("VERSIONS ")) {
                let n: usize = v.rsplit(' ').next().unwrap().parse().unwrap();
                ensure(n >= c, || format!("{tag}: {v}"))?;
            }
            ensure(!out.contains("INVIS-VIOLATION"), || {
                format!("{tag}: invisible-reads scan not empty")
            })?;
            ensure(out.contains("CHECK serializable pass"), || {
                format!("{tag}: serializability")
            })?;
            ensure(took < Duration::from_secs(5), || {
                format!("{tag}: took {took:?}")
            })?;
        }
    }
    Ok(format!("8 configurations, slowest {slowest:.2?}"))
}

fn dap_adversary() -> Outcome {
    let (code, out, took) = tmlab(&[
        "run",
        "--tm",
        "strict-dap-attempt",
        "--scenario",
        "theorem2",
    ]);
    ensure(code == 0, || format!("exit {code}\n{out}"))?;
    let fired: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("DISJUNCT ") && l.ends_with(" fired"))
        .collect();
    ensure(fired.len() == 1, || format!("fired: {fired:?}"))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    for (name, want_code, want) in [
        ("adversary_strict_dap.history", 3, false),
        ("adversary_writer_first.history", 0, true),
    ] {
        let (code, _, _) = tmlab(&["check", "--history", path(&fixture(name))]);
        ensure(code == want_code, || format!("{name}: exit {code}"))?;
        let h = parse_history(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        ensure(oracle_serializable(&h) == want, || {
            format!("{name}: oracle disagrees")
        })?;
    }
    Ok(format!("{} in {took:.2?}; fixtures exit 3 and 0", fired[0]))
}

fn read_patterns() -> Outcome {
    let mut detail = Vec::new();
    for m in [4usize, 8, 16] {
        let ms = m.to_string();
        let (code, out, took) = tmlab(&[
            "run",
            "--tm",
            "visible-read",
            "--scenario",
            "theorem3",
            "--reads",
            &ms,
        ]);
        ensure(code == 0, || format!("m={m}: exit {code}"))?;
        let totals: Vec<usize> = out
            .lines()
            .filter(|l| l.starts_with("PATTERNS T0 "))
            .map(|l| field(l, "raw=") + field(l, "awar="))
            .collect();
        ensure(totals.len() == 2 * (m - 1), || {
            format!("m={m}: {} runs", totals.len())
        })?;
        let min = *totals.iter().min().unwrap();
        ensure(min >= m - 1, || {
            format!("m={m}: T0 has only {min} patterns")
        })?;
        for s in out.lines().filter(|l| l.starts_with("SWEPT ")) {
            ensure(field(s, "patterns=") >= 1, || format!("m={m}: {s}"))?;
        }
        ensure(!out.contains("VERDICT not-serializable"), || {
            format!("m={m}: a sweep is not serializable")
        })?;
        ensure(m != 16 || took < Duration::from_secs(10), || {
            format!("m=16 took {took:?}")
        })?;
        detail.push(format!("m={m} min={min} {took:.2?}"));
    }
    let (code, _, _) = tmlab(&[
        "check",
        "--history",
        path(&fixture("split_read_cycle.history")),
    ]);
    ensure(code == 3, || format!("split-read fixture: exit {code}"))?;
    Ok(detail.join(", "))
}

fn weak_dap_versus_invisibility() -> Outcome {
    let p = ScenarioParams::default();
    let mv = run_scenario(ScenarioKind::VersionGrowth, TmKind::MvInvisible, &p)
        .map_err(|e| e.to_string())?;
    let mv_wdap: usize = mv
        .runs
        .iter()
        .map(|r| analyze(r).weak_dap.map_or(0, |v| v.len()))
        .sum();
    ensure(mv_wdap > 0, || {
        "mv-invisible is weak-DAP clean on the version-growth run".into()
    })?;
    let (mut runs, mut invisible) = (0, 0);
    for kind in ScenarioKind::ALL {
        let r = run_scenario(kind, TmKind::VisibleRead, &p).map_err(|e| e.to_string())?;
        for run in &r.runs {
            let s = analyze(run);
            ensure(s.weak_dap.as_ref().is_some_and(Vec::is_empty), || {
                format!("visible-read violates weak DAP in {kind}/{}", run.name)
            })?;
            invisible += s.invisible.len();
            runs += 1;
        }
    }
    ensure(invisible > 0, || "visible-read reads are invisible".into())?;
    Ok(format!(
        "mv wdap={mv_wdap}; visible-read invis={invisible} wdap=0 over {runs} runs"
    ))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(2024);
    let (mut yes, mut no) = (0, 0);
    for k in 0..1000 {
        let h = random_history(&mut rng, 5, 4, 3);
        let checker = check_strict_serializability(&h, &SearchBound::default());
        let oracle = oracle_serializable(&h);
        ensure(checker.is_serializable() == oracle, || {
            format!("history #{k} disagrees: {h:?}")
        })?;
        if oracle {
            yes += 1;
        } else {
            no += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!(
        "1000 histories ({yes} serializable, {no} not) in {took:.2?}"
    ))
}

/// Some read of T0 has an earlier write to another base that is cut off by
/// a write to the read base in between.
fn has_blocker(events: &[Event]) -> bool {
    let rmws: Vec<_> = events
        .iter()
        .filter_map(Event::as_rmw)
        .filter(|r| r.txn == TxnId(0))
        .collect();
    (0..rmws.len()).any(|j| {
        rmws[j].prim.reads_base()
            && (0..j).any(|i| {
                !rmws[i].is_trivial()
                    && rmws[i].base != rmws[j].base
                    && (i + 1..j).any(|k| !rmws[k].is_trivial() && rmws[k].base == rmws[j].base)
            })
    })
}

/// A write followed by a read of the same base.
fn has_same_base_pair(events: &[Event]) -> bool {
    let rmws: Vec<_> = events
        .iter()
        .filter_map(Event::as_rmw)
        .filter(|r| r.txn == TxnId(0))
        .collect();
    (0..rmws.len()).any(|j| {
        rmws[j].prim.reads_base()
            && (0..j).any(|i| !rmws[i].is_trivial() && rmws[i].base == rmws[j].base)
    })
}

fn detector_properties() -> Outcome {
    let blockers = Cell::new(0);
    let same_base = Cell::new(0);
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        own_events(),
        prop::collection::vec((0usize..15, foreign_event()), 0..10),
    );
    runner
        .run(&strategy, |(own, foreign)| {
            blockers.set(blockers.get() + has_blocker(&own) as usize);
            same_base.set(same_base.get() + has_same_base_pair(&own) as usize);
            let (merged, at) = interleave(&own, &foreign);
            for events in [&own, &merged] {
                let raw: Vec<(usize, usize)> = find_raw(events, TxnId(0))
                    .iter()
                    .map(|p| (p.i, p.j))
                    .collect();
                prop_assert_eq!(&raw, &reference_raw(events, TxnId(0)));
                let awar: Vec<usize> = find_awar(events, TxnId(0)).iter().map(|a| a.i).collect();
                prop_assert_eq!(awar, reference_awar(events, TxnId(0)));
            }
            let own_raw: Vec<(usize, usize)> = find_raw(&own, TxnId(0))
                .iter()
                .map(|p| (at[p.i], at[p.j]))
                .collect();
            let merged_raw: Vec<(usize, usize)> = find_raw(&merged, TxnId(0))
                .iter()
                .map(|p| (p.i, p.j))
                .collect();
            prop_assert_eq!(own_raw, merged_raw);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(blockers.get() > 0 && same_base.get() > 0, || {
        format!(
            "coverage: blockers={} same-base={}",
            blockers.get(),
            same_base.get()
        )
    })?;
    Ok(format!(
        "200 cases, {} with blockers, {} with same-base pairs",
        blockers.get(),
        same_base.get()
    ))
}

fn disjoint_fragments_suite() -> Outcome {
    let mut rng = seeded(1);
    let mut events = 0;
    for k in 0..50 {
        let setup = random_fragments(&mut rng);
        let r = disjoint_fragments(TmKind::VisibleRead, &setup, &ScenarioParams::default())
            .map_err(|e| e.to_string())?;
        ensure(r.check_named("premise").is_some_and(|c| c.passed), || {
            format!("run {k}: premise fails")
        })?;
        ensure(r.lines_with("CROSS-CONTENTION").is_empty(), || {
            format!("run {k}:\n{}", r.render())
        })?;
        events += r.runs[0].execution.len();
    }
    Ok(format!(
        "50 runs, {events} events, 0 cross-fragment contentions"
    ))
}

fn replay_determinism() -> Outcome {
    let (a, b) = (
        scratch("acceptance_replay_a"),
        scratch("acceptance_replay_b"),
    );
    let mut files = 0;
    for kind in ScenarioKind::ALL {
        for tm in ALL_TMS {
            let (s, t) = (kind.name(), tm.name());
            let mut reports = Vec::new();
            for dir in [&a, &b] {
                let trace = dir.join(format!("{s}-{t}.trace"));
                let report = dir.join(format!("{s}-{t}.report"));
                tmlab(&[
                    "run",
                    "--scenario",
                    s,
                    "--tm",
                    t,
                    "--trace-out",
                    path(&trace),
                    "--report",
                    path(&report),
                ]);
                reports.push(std::fs::read(report).unwrap());
            }
            ensure(reports[0] == reports[1], || {
                format!("{s}/{t}: reports differ")
            })?;
        }
    }
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        let left = std::fs::read(a.join(&name)).unwrap();
        let right =
            std::fs::read(b.join(&name)).map_err(|_| format!("{name:?} missing on re-run"))?;
        ensure(left == right, || format!("{name:?} differs"))?;
        files += 1;
    }
    Ok(format!("{files} artifacts byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("version growth on mv-invisible", version_growth),
        ("DAP adversary on strict-dap-attempt", dap_adversary),
        ("read patterns on visible-read", read_patterns),
        (
            "weak DAP versus invisible reads",
            weak_dap_versus_invisibility,
        ),
        ("checker agrees with oracle", oracle_agreement),
        ("RAW/AWAR detector properties", detector_properties),
        ("disjoint fragments never contend", disjoint_fragments_suite),
        ("replay determinism", replay_determinism),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("ACCEPTANCE {} {name}: pass ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("ACCEPTANCE {} {name}: fail ({why})", n + 1);
            }
        }
    }
    println!(
        "ACCEPTANCE summary: {} of {} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
