//! One line per acceptance criterion. The target fails if any criterion does.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

use sessioncheck_core::check::{check_file, check_file_without, CheckResult, Code, Severity};
use sessioncheck_core::model::{overlapping, RoleId};
use sessioncheck_core::sim::{run_trace, Limits, RunReport, Status};
use sessioncheck_core::syntax::{parse, parse_trace, print, quote, SourceFile};
use sessioncheck_testkit::ast_gen::source_file;
use sessioncheck_testkit::oracle::{derive, FinalPath, FlatIndex};
use sessioncheck_testkit::overlap::{all_lists, is_subsequence_brute};
use sessioncheck_testkit::protocols::{call_free_protocol, step_count, MAX_STEPS, ROLES};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus(name: &str) -> String {
    fs::read_to_string(common::corpus_dir().join(name)).unwrap()
}

fn parsed(name: &str) -> SourceFile {
    parse(&corpus(name))
        .map_err(|e| format!("{name}: {e:?}"))
        .unwrap()
}

fn simulate(file: &str, trace: &str) -> RunReport {
    run_trace(
        &parsed(file),
        &parse_trace(trace).unwrap(),
        Limits::default(),
    )
    .unwrap()
}

fn violated(report: &RunReport, var: &str) -> bool {
    matches!(&report.status, Status::RefinementViolated { var: v, .. } if v.as_str() == var)
}

/// Draws `n` values from `strategy` with a fixed seed.
fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        proptest::test_runner::TestRng::deterministic_rng(Default::default()),
    );
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}

fn corpus_positive() -> Outcome {
    let start = Instant::now();
    let out = common::run(&[
        "check",
        "--format",
        "json",
        "tcp.ssn",
        "server.ssn",
        "hoppy.ssn",
    ]);
    let elapsed = start.elapsed();
    if out.code != 0 || out.stdout.trim() != "[]" {
        return Err(format!("exit {}: {}{}", out.code, out.stdout, out.stderr));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("3 files, 0 diagnostics, {elapsed:.0?}"))
}

fn corpus_negative() -> Outcome {
    let src = corpus("charlie.ssn");
    let result = check_file(&parse(&src).unwrap());
    let [d] = result.diagnostics.as_slice() else {
        return Err(format!("{} diagnostics", result.diagnostics.len()));
    };
    if (d.code, d.severity) != (Code::E004, Severity::Error) {
        return Err(format!("got {} {}", d.severity, d.code));
    }
    let covered = &src[d.span.start..d.span.end];
    let stmt_start = src.find("dep m3").ok_or("no dependent statement")?;
    let stmt_end =
        stmt_start + src[stmt_start..].find("by Charlie").ok_or("no creator")? + "by Charlie".len();
    if (d.span.start, d.span.end) != (stmt_start, stmt_end) {
        return Err(format!("span covers {covered:?}"));
    }
    Ok(format!("one E004 at {}:{}", d.span.line, d.span.col))
}

fn rule_mutations() -> Outcome {
    let obligations = [
        Code::E002,
        Code::E003,
        Code::E004,
        Code::E005,
        Code::E006,
        Code::E007,
        Code::E008,
        Code::E010,
        Code::E011,
    ];
    for code in obligations {
        let name = format!("rules/{}.ssn", code.as_str().to_lowercase());
        let file = parsed(&name);
        let detected = check_file(&file).error_codes();
        if detected != [code] {
            return Err(format!("{name}: detected {detected:?}"));
        }
        let mutant = check_file_without(&file, &[code]);
        if mutant.has_errors() {
            return Err(format!(
                "{name}: still rejected without the check: {:?}",
                mutant.error_codes()
            ));
        }
    }
    Ok(format!(
        "{} witnesses detected, each accepted once its check is removed",
        obligations.len()
    ))
}

fn checker_finals(result: &CheckResult) -> Vec<FinalPath> {
    result
        .final_indices
        .iter()
        .map(|(label, index)| FinalPath {
            arms: label.arms.clone(),
            terminator: label.terminator.clone(),
            index: index
                .items()
                .iter()
                .map(|item| (item.var.clone(), item.ty.clone(), item.knowers().to_vec()))
                .collect::<FlatIndex>(),
        })
        .collect()
}

fn knowledge_oracle() -> Outcome {
    const CASES: usize = 1_000;
    let files = sample(call_free_protocol(), CASES);
    let start = Instant::now();
    let mut accepted = 0;
    for file in &files {
        let body = &file.protocols().next().unwrap().body;
        if step_count(body) > MAX_STEPS || file.roles().count() > ROLES.len() {
            return Err(format!("generator out of bounds:\n{}", print(file)));
        }
        let result = check_file(file);
        let expected = derive(file);
        let codes: std::collections::BTreeSet<Code> = result.error_codes().into_iter().collect();
        if codes != expected.errors {
            return Err(format!(
                "checker {codes:?}, oracle {:?}:\n{}",
                expected.errors,
                print(file)
            ));
        }
        if expected.accepted() {
            accepted += 1;
            if checker_finals(&result) != expected.finals {
                return Err(format!("final indices differ:\n{}", print(file)));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{CASES}/{CASES} agree ({accepted} accepted), {elapsed:.0?}"
    ))
}

fn monotonicity_and_frame() -> Outcome {
    const CASES: usize = 10_000;
    let mut sends = 0;
    for file in sample(call_free_protocol(), CASES) {
        let result = check_file(&file);
        for step in &result.steps {
            for item in step.before.items() {
                let Some(after) = step.after.get(&item.var) else {
                    return Err(format!("`{}` dropped:\n{}", item.var, print(&file)));
                };
                if !item.knowers().iter().all(|r| after.is_known_by(r)) {
                    return Err(format!(
                        "knowers of `{}` shrank:\n{}",
                        item.var,
                        print(&file)
                    ));
                }
            }
            // `send m Sender -> Receiver`
            let words: Vec<&str> = step.summary.split_whitespace().collect();
            let ["send", var, _, "->", receiver] = words.as_slice() else {
                continue;
            };
            sends += 1;
            let receiver = RoleId::new(*receiver);
            let framed = step.before.len() == step.after.len()
                && step.after.items().iter().all(|a| {
                    let mut expected = step.before.get(&a.var).unwrap().knowers().to_vec();
                    if a.var.as_str() == *var && !expected.contains(&receiver) {
                        expected.push(receiver.clone());
                    }
                    a.knowers() == expected.as_slice()
                });
            if !framed {
                return Err(format!(
                    "`{}` changed more than its receiver:\n{}",
                    step.summary,
                    print(&file)
                ));
            }
        }
    }
    Ok(format!(
        "{CASES} protocols, {sends} sends, 0 counterexamples"
    ))
}

fn refinement_fidelity() -> Outcome {
    let good = "m1 = (SYN, 100)\nm2 = (SYNACK, 101, 200)\nm3 = (ACK, 101, 201)\n";
    let report = simulate("tcp.ssn", good);
    if report.status != Status::Completed {
        return Err(format!("good trace: {}", report.status));
    }
    let m2 = simulate("tcp.ssn", &good.replace("101, 200", "102, 200"));
    if !violated(&m2, "m2") {
        return Err(format!("101->102: {}", m2.status));
    }
    let m3 = simulate("tcp.ssn", &good.replace("101, 201", "101, 202"));
    if !violated(&m3, "m3") {
        return Err(format!("201->202: {}", m3.status));
    }
    Ok("good trace completes, 101->102 violates m2, 201->202 violates m3".into())
}

fn echo_trace(welcome: &str, req: &str, reply: &str) -> String {
    format!(
        "cmd = Echo\nwelcome = {}\nreq = {}\nreply = {}\ncmd = Quit\n",
        quote(welcome),
        quote(req),
        quote(reply)
    )
}

fn echo_literal_law() -> Outcome {
    const CASES: usize = 100;
    for s in sample("\\PC{0,16}", CASES) {
        let same = simulate("server.ssn", &echo_trace("Hello", &s, &s));
        if same.status != Status::Completed {
            return Err(format!("reply = {s:?}: {}", same.status));
        }
        let other = simulate("server.ssn", &echo_trace("Hello", &s, &format!("{s}x")));
        if !violated(&other, "reply") {
            return Err(format!("reply = {s:?} + x: {}", other.status));
        }
        if s != "Hello"
            && !violated(
                &simulate("server.ssn", &echo_trace(&s, "a", "a")),
                "welcome",
            )
        {
            return Err(format!("welcome = {s:?} accepted"));
        }
    }
    for near in ["hello", "Hello ", "Hell", ""] {
        if !violated(
            &simulate("server.ssn", &echo_trace(near, "a", "a")),
            "welcome",
        ) {
            return Err(format!("welcome = {near:?} accepted"));
        }
    }
    Ok(format!(
        "{CASES} strings echo exactly, welcome must be exactly \"Hello\""
    ))
}

fn overlapping_brute_force() -> Outcome {
    let alphabet: Vec<RoleId> = ["A", "B", "C"].iter().map(|r| RoleId::new(*r)).collect();
    let lists = all_lists(&alphabet, 5);
    for sub in &lists {
        for sup in &lists {
            if overlapping(sub, sup) != is_subsequence_brute(sub, sup) {
                return Err(format!("{sub:?} in {sup:?}"));
            }
        }
    }
    Ok(format!("{} pairs agree", lists.len() * lists.len()))
}

fn round_trip() -> Outcome {
    const CASES: usize = 1_000;
    for file in sample(source_file(), CASES) {
        let text = print(&file);
        match parse(&text) {
            Ok(back) if back == file => {}
            Ok(_) => return Err(format!("reparse differs:\n{text}")),
            Err(e) => return Err(format!("{e:?}:\n{text}")),
        }
    }
    let mut files = 0;
    for entry in walk(&common::corpus_dir()) {
        if entry.extension().is_some_and(|e| e == "ssn") {
            let src = fs::read_to_string(&entry).unwrap();
            let once = print(&parse(&src).unwrap());
            if once != src || print(&parse(&once).unwrap()) != once {
                return Err(format!("{} is not a fixed point of fmt", entry.display()));
            }
            files += 1;
        }
    }
    Ok(format!(
        "{CASES} ASTs round-trip, fmt fixes all {files} corpus files"
    ))
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

fn cli_contract() -> Outcome {
    common::check_goldens().map(|n| format!("{n} golden invocations match, JSON validated"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("corpus positive", corpus_positive),
        ("corpus negative", corpus_negative),
        ("rule mutations", rule_mutations),
        ("knowledge index oracle", knowledge_oracle),
        ("monotonicity and frame", monotonicity_and_frame),
        ("refinement fidelity", refinement_fidelity),
        ("echo literal law", echo_literal_law),
        ("overlapping brute force", overlapping_brute_force),
        ("round trip", round_trip),
        ("cli contract", cli_contract),
    ];
    let mut failed = Vec::new();
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
