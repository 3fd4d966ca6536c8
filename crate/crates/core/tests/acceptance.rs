//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use schemaforge::agents::{
    run_pipeline, PipelineConfig, PipelineResult, Role, Script, ScriptedBackend, Status, Visibility,
};
use schemaforge::corpus::{bundled_corpus, bundled_script};
use schemaforge::ddl::{emit_ddl, verify_executable};
use schemaforge::eval::{evaluate, names_match, MatcherConfig};
use schemaforge::fd::{
    candidate_keys, closure, is_3nf, is_dependency_preserving, is_lossless, project, synthesize_3nf, AttrSet, Fd, FdSet,
};
use schemaforge::{DataType, Schema, SchemaBuilder};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---- independent FD oracles -------------------------------------------

fn naive_closure(x: &AttrSet, fds: &[Fd]) -> AttrSet {
    let mut c = x.clone();
    loop {
        let before = c.len();
        for fd in fds {
            if fd.lhs.is_subset(&c) {
                c.extend(fd.rhs.iter().cloned());
            }
        }
        if c.len() == before {
            return c;
        }
    }
}

fn subsets(u: &AttrSet) -> Vec<AttrSet> {
    let items: Vec<&String> = u.iter().collect();
    (0..1u32 << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| (*a).clone()).collect())
        .collect()
}

/// Minimal superkeys by exhaustive search, sorted like the library output.
fn naive_keys(u: &AttrSet, fds: &[Fd]) -> Vec<AttrSet> {
    let supers: Vec<AttrSet> = subsets(u).into_iter().filter(|s| &naive_closure(s, fds) == u).collect();
    let mut keys: Vec<AttrSet> =
        supers.iter().filter(|s| !supers.iter().any(|t| t.len() < s.len() && t.is_subset(s))).cloned().collect();
    keys.sort();
    keys
}

/// 3NF by definition: every non-trivial X -> A over the fragment, with X
/// not a superkey of it, has A in some key of the fragment.
fn naive_is_3nf(frag: &AttrSet, fds: &[Fd]) -> bool {
    let proj: Vec<Fd> = subsets(frag)
        .into_iter()
        .map(|x| {
            let rhs: AttrSet = naive_closure(&x, fds).intersection(frag).cloned().collect();
            Fd { lhs: x, rhs }
        })
        .collect();
    let keys = naive_keys(frag, &proj);
    let prime: AttrSet = keys.iter().flatten().cloned().collect();
    proj.iter().all(|fd| {
        naive_closure(&fd.lhs, &proj).is_superset(frag)
            || fd.rhs.iter().all(|a| fd.lhs.contains(a) || prime.contains(a))
    })
}

/// Tableau chase.
fn naive_lossless(u: &AttrSet, frags: &[AttrSet], fds: &[Fd]) -> bool {
    let cols: Vec<&String> = u.iter().collect();
    // 0 is the distinguished symbol; row r column c otherwise holds 1 + r*n + c.
    let n = cols.len();
    let mut t: Vec<Vec<usize>> = frags
        .iter()
        .enumerate()
        .map(|(r, f)| cols.iter().enumerate().map(|(c, a)| if f.contains(*a) { 0 } else { 1 + r * n + c }).collect())
        .collect();
    let idx = |a: &String| cols.iter().position(|c| *c == a).unwrap();
    loop {
        let mut changed = false;
        for fd in fds {
            let lhs: Vec<usize> = fd.lhs.iter().map(idx).collect();
            for i in 0..t.len() {
                for j in 0..t.len() {
                    if i == j || !lhs.iter().all(|&c| t[i][c] == t[j][c]) {
                        continue;
                    }
                    for a in &fd.rhs {
                        let c = idx(a);
                        let (x, y) = (t[i][c], t[j][c]);
                        if x != y {
                            let (keep, drop) = (x.min(y), x.max(y));
                            for row in t.iter_mut() {
                                if row[c] == drop {
                                    row[c] = keep;
                                }
                            }
                            changed = true;
                        }
                    }
                }
            }
        }
        if t.iter().any(|row| row.iter().all(|&v| v == 0)) {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

fn naive_preserving(frags: &[AttrSet], fds: &[Fd]) -> bool {
    fds.iter().all(|fd| {
        let mut z = fd.lhs.clone();
        loop {
            let before = z.len();
            for r in frags {
                let inside: AttrSet = z.intersection(r).cloned().collect();
                let add: AttrSet = naive_closure(&inside, fds).intersection(r).cloned().collect();
                z.extend(add);
            }
            if z.len() == before {
                break;
            }
        }
        fd.rhs.is_subset(&z)
    })
}

const NAMES: [&str; 7] = ["A", "B", "C", "D", "E", "F", "G"];

fn random_fd_sets(count: usize) -> Vec<FdSet> {
    let strat = (1usize..=7).prop_flat_map(|n| {
        let full = (1u32 << n) - 1;
        (Just(n), prop::collection::vec((1..=full, 1..=full), 0..9))
    });
    let set_of =
        |n: usize, m: u32| -> AttrSet { (0..n).filter(|i| m >> i & 1 == 1).map(|i| NAMES[i].to_string()).collect() };
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| {
            let (n, pairs) = strat.new_tree(&mut runner).unwrap().current();
            let fds = pairs.into_iter().map(|(l, r)| Fd { lhs: set_of(n, l), rhs: set_of(n, r) });
            FdSet::new(set_of(n, (1 << n) - 1), fds).unwrap()
        })
        .collect()
}

// ---- criteria -----------------------------------------------------------

fn fd_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let sets = random_fd_sets(300);
    let mut closures = 0;
    for f in &sets {
        let keys = candidate_keys(f).map_err(|e| e.to_string())?;
        check(keys == naive_keys(f.universe(), f.fds()), format!("candidate keys differ on\n{f}"))?;
        for x in subsets(f.universe()) {
            let c = closure(&x, f).map_err(|e| e.to_string())?;
            check(c == naive_closure(&x, f.fds()), format!("closure of {x:?} differs on\n{f}"))?;
            closures += 1;
        }
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(30), format!("took {took:?}"))?;
    Ok(format!("{} FD sets, {closures} closures, {took:.2?}", sets.len()))
}

fn synthesis_soundness() -> Outcome {
    let sets = random_fd_sets(300);
    for f in &sets {
        let d = synthesize_3nf(f).map_err(|e| e.to_string())?;
        let frags = d.attr_sets();
        for r in &frags {
            let lib = is_3nf(&project(f, r).map_err(|e| e.to_string())?).is_3nf();
            check(lib && naive_is_3nf(r, f.fds()), format!("fragment {r:?} not in 3NF for\n{f}"))?;
        }
        let lossless = is_lossless(f, &frags).map_err(|e| e.to_string())?;
        check(lossless && naive_lossless(f.universe(), &frags, f.fds()), format!("lossy on\n{f}"))?;
        let preserving = is_dependency_preserving(f, &frags).map_err(|e| e.to_string())?;
        check(preserving && naive_preserving(&frags, f.fds()), format!("not preserving on\n{f}"))?;
    }
    Ok(format!("{} inputs, 0 failures", sets.len()))
}

fn table(b: &mut SchemaBuilder, name: &str, cols: &[&str]) {
    let t = b.add_relation(name);
    let ids: Vec<_> = cols.iter().map(|c| b.add_attribute(&t, *c, DataType::Text)).collect();
    b.set_primary_key(&t, [ids[0].clone()]);
}

fn schema_of(tables: &[(&str, &[&str])]) -> Schema {
    let mut b = SchemaBuilder::default();
    for (name, cols) in tables {
        table(&mut b, name, cols);
    }
    b.build()
}

fn f1(p: f64, r: f64) -> f64 {
    2.0 * p * r / (p + r)
}

fn metric_fidelity() -> Outcome {
    let cfg = MatcherConfig::string_only();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;

    // Tables: 1 of 1 predicted is right (P = 1), 1 of 2 gold found (R = 0.5).
    let gold = schema_of(&[("student", &["sid", "name"]), ("course", &["cid", "title"])]);
    let pred = schema_of(&[("student", &["sid", "name"])]);
    let r = evaluate(&gold, &pred, &cfg);
    check(close(r.table_f1, 2.0 / 3.0) && close(r.table_f1, f1(1.0, 0.5)), format!("table F1 {}", r.table_f1))?;
    check(r.table_acc == 0.0, "table Acc should be 0")?;

    // Attributes: 4 of 5 on each side match (P = R = 0.8).
    let gold = schema_of(&[("loan", &["loan_id", "amount", "rate", "start", "borrower"])]);
    let pred = schema_of(&[("loan", &["loan_id", "amount", "rate", "start", "colour"])]);
    let r = evaluate(&gold, &pred, &cfg);
    check(close(r.attr_f1, 0.8) && close(r.attr_f1, f1(0.8, 0.8)), format!("attribute F1 {}", r.attr_f1))?;
    check(
        r.attr_acc == 0.0 && r.table_acc == 1.0 && close(r.table_f1, 1.0),
        "Acc/F1 pairing on the attribute fixture",
    )?;

    // Acc = 1 exactly when F1 = 1, over the bundled gold cross product.
    let corpus = bundled_corpus();
    let mut pairs = 0;
    for g in &corpus {
        for p in &corpus {
            let r = evaluate(&g.schema, &p.schema, &MatcherConfig::default());
            check((r.table_acc == 1.0) == (r.table_f1 == 1.0), format!("{} vs {}: table", g.id, p.id))?;
            check((r.attr_acc == 1.0) == (r.attr_f1 == 1.0), format!("{} vs {}: attribute", g.id, p.id))?;
            pairs += 1;
        }
    }
    for s in &corpus {
        let r = evaluate(&s.schema, &s.schema, &MatcherConfig::default());
        check(r.values().iter().all(|v| *v == 1.0), format!("self-evaluation of {}: {r:?}", s.id))?;
    }
    Ok(format!(
        "F1 2/3 and 0.8 fixtures exact, Acc<=>F1 over {pairs} pairs, {} gold self-evaluations = 1",
        corpus.len()
    ))
}

fn threshold_behavior() -> Outcome {
    let d = MatcherConfig::default();
    check(d.delta0 == 0.6 && d.delta1 == 0.75, format!("defaults {} / {}", d.delta0, d.delta1))?;
    check(names_match("user", "users", &MatcherConfig::string_only()), "user/users should match at 0.75")?;
    check(
        !names_match("user", "users", &MatcherConfig::string_only().with_delta1(0.85)),
        "user/users should fail at 0.85",
    )?;
    Ok("user/users: match at 0.75, no match at 0.85; defaults 0.6/0.75".into())
}

fn warehouse_script() -> Script {
    bundled_script("warehouse").expect("bundled warehouse script")
}

fn run(script: Script) -> PipelineResult {
    run_pipeline(
        "A warehouse stores cargo; tasks move cargo.",
        &ScriptedBackend::new(script),
        &PipelineConfig::default(),
    )
    .expect("pipeline starts")
}

fn calls_of(r: &PipelineResult, role: Role) -> Vec<u32> {
    r.prompts.iter().filter(|p| p.role == role).map(|p| p.attempt).collect()
}

fn protocol() -> Outcome {
    // (a) TE never says TERMINAL and keeps routing back to LMD.
    let mut s = warehouse_script();
    s.defaults.insert("TE".into(), "Case 4 fails.\n{\"next_speaker\": \"LogicalDesignerAgent\"}".into());
    let r = run(s);
    check(r.status == Status::RoundCap && r.rounds == 15, format!("(a) status {:?}, rounds {}", r.status, r.rounds))?;
    check(r.transcript.entries.iter().all(|e| e.round <= 15), "(a) a message past round 15")?;

    // (b) one rejection, one regeneration.
    let mut s = warehouse_script();
    s.entries.push(schemaforge::agents::ScriptEntry {
        role: "CMR".into(),
        round: None,
        turn: Some(1),
        attempt: None,
        text: r#"{"approved": false, "issues": ["zz-nested-marker: Task needs a declared key"], "next_speaker": "ConceptualDesignerAgent"}"#.into(),
    });
    let rb = run(s);
    let cmd = calls_of(&rb, Role::ConceptualDesigner);
    check(rb.converged(), format!("(b) status {:?}", rb.status))?;
    check(
        cmd == [1, 1] && rb.nested_iterations == [2],
        format!("(b) CMD turns {cmd:?}, nested {:?}", rb.nested_iterations),
    )?;

    // (c) nested bodies never reach other roles' prompts.
    let mut leaks = 0;
    let mut checked = 0;
    for r in [&r, &rb] {
        let nested: Vec<&str> = r
            .transcript
            .entries
            .iter()
            .filter(|e| e.visibility == Visibility::Nested)
            .map(|e| e.body.as_str())
            .collect();
        for p in r.prompts.iter().filter(|p| !p.role.is_nested()) {
            checked += 1;
            leaks += nested.iter().filter(|b| p.text.contains(*b)).count();
            leaks += usize::from(p.text.contains("zz-nested-marker"));
        }
    }
    check(leaks == 0, format!("(c) {leaks} nested leaks"))?;

    // (d) PM names a role that is not its candidate: forward order applies.
    let mut s = warehouse_script();
    let pm = s.defaults["PM"].clone();
    s.defaults.insert("PM".into(), format!("{pm}\n{{\"next_speaker\": \"TestExecutorAgent\"}}"));
    let rd = run(s);
    let order: Vec<&str> =
        rd.transcript.entries.iter().map(|e| e.sender.as_str()).filter(|s| !s.starts_with("tool:")).take(3).collect();
    check(order == ["USER", "PM", "CMD"] && rd.converged(), format!("(d) order {order:?}, {:?}", rd.status))?;
    // Control: a valid hint is followed.
    let mut s = warehouse_script();
    s.defaults.insert("PM".into(), format!("{pm}\n{{\"next_speaker\": \"LogicalDesignerAgent\"}}"));
    let rc = run(s);
    let hint_of = |r: &PipelineResult| r.transcript.entries[1].next_speaker.clone();
    check(hint_of(&rd).is_none(), "(d) invalid hint was recorded")?;
    check(
        hint_of(&rc).as_deref() == Some("LogicalDesignerAgent")
            && rc.transcript.entries[2].sender == "tool:candidate_keys",
        "(d) valid PM hint not followed",
    )?;

    // (e) an unusable reply is retried, then the run fails.
    let mut s = warehouse_script();
    s.defaults.insert("CMD".into(), "hello".into());
    let re = run(s);
    let cmd = calls_of(&re, Role::ConceptualDesigner);
    check(
        matches!(re.status, Status::Failed(_)) && cmd == [1, 2, 3],
        format!("(e) status {:?}, attempts {cmd:?}", re.status),
    )?;
    check(re.backend_calls == 4, format!("(e) {} backend calls", re.backend_calls))?;

    Ok(format!("(a) halted at round 15 (b) 1 regeneration (c) 0 leaks in {checked} prompts (d) PM -> CMD (e) failed after 3 attempts"))
}

fn warehouse_golden() -> Outcome {
    let s = bundled_corpus().into_iter().find(|s| s.id == "warehouse").ok_or("no warehouse sample")?;
    let r = run_pipeline(&s.requirement, &ScriptedBackend::new(warehouse_script()), &PipelineConfig::default())
        .map_err(|e| e.to_string())?;
    check(r.converged(), format!("status {:?}", r.status))?;
    let design = r.design.as_ref().ok_or("no design")?;
    let schema = &design.schema;
    let task = schema.relation_by_name("task").ok_or("no task table")?;
    let key: BTreeSet<&str> = schema
        .primary_key(&task.id)
        .ok_or("task has no primary key")?
        .attrs
        .iter()
        .map(|a| schema.attribute(a).unwrap().name.as_str())
        .collect();
    check(key == BTreeSet::from(["warehouse_no", "cargo_no"]), format!("task key {key:?}"))?;
    check(schema.attribute_by_name(&task.id, "cargo_name").is_none(), "cargo_name still in task")?;
    let home = schema
        .relations()
        .iter()
        .find(|t| schema.attribute_by_name(&t.id, "cargo_name").is_some())
        .ok_or("cargo_name dropped")?;
    for t in schema.relations() {
        let f = design.table_fds(&t.id).map_err(|e| e.to_string())?;
        check(is_3nf(&f).is_3nf(), format!("{} is not in 3NF", t.name))?;
    }
    Ok(format!("task key (warehouse_no, cargo_no); cargo_name moved to `{}`; all tables 3NF", home.name))
}

fn ddl_executability() -> Outcome {
    let start = Instant::now();
    let corpus = bundled_corpus();
    let mut tables = 0;
    for s in &corpus {
        let d = emit_ddl(&s.schema).map_err(|e| format!("{}: {e}", s.id))?;
        let v = verify_executable(&d).map_err(|e| format!("{}: {e}", s.id))?;
        check(v.ok, format!("{}: {:?}", s.id, v.diagnostics))?;
        tables += d.statements.len();
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(10), format!("took {took:?}"))?;
    Ok(format!("{}/{} schemas ({tables} tables) executable, {took:.2?}", corpus.len(), corpus.len()))
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_schemaforge");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for (i, workers) in ["1", "4"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let gen = Command::new(bin)
            .args(["generate", "--corpus", "bundled", "--workers", workers, "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        check(gen.status.success(), format!("generate exited {:?}", gen.status.code()))?;
        let ev = Command::new(bin)
            .args(["evaluate", "--corpus", "bundled", "--workers", workers, "--predictions"])
            .arg(out.join("predictions"))
            .arg("--out")
            .arg(out.join("eval"))
            .output()
            .map_err(|e| e.to_string())?;
        check(ev.status.success(), format!("evaluate exited {:?}", ev.status.code()))?;
        trees.push(read_tree(&out));
    }
    let (a, b) = (&trees[0], &trees[1]);
    check(a.keys().eq(b.keys()), "different file sets")?;
    let differing: Vec<&String> = a.keys().filter(|k| a[*k] != b[*k]).collect();
    check(differing.is_empty(), format!("differing files: {differing:?}"))?;
    let count = |prefix: &str| a.keys().filter(|k| k.starts_with(prefix)).count();
    check(count("predictions") == 10 && count("transcripts") == 10, "expected 10 schemas and 10 transcripts")?;
    Ok(format!(
        "{} files identical ({} schemas, {} transcripts, 2 reports)",
        a.len(),
        count("predictions"),
        count("transcripts")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("fd-engine oracle equivalence", fd_oracle_equivalence),
        ("3NF synthesis soundness", synthesis_soundness),
        ("metric fidelity", metric_fidelity),
        ("name threshold behavior", threshold_behavior),
        ("orchestrator protocol", protocol),
        ("warehouse golden case", warehouse_golden),
        ("DDL executability", ddl_executability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
