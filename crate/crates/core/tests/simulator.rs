use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;
use proptest::prelude::*;

use sessioncheck_core::check::check_file;
use sessioncheck_core::model::VarId;
use sessioncheck_core::sim::{run_trace, Event, Limits, RunReport, Status};
use sessioncheck_core::syntax::{
    parse, parse_trace, quote, walk_stmts, SessionExpr, SourceFile, Trace,
};
use sessioncheck_core::Value;

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(file: &str, trace: &str) -> RunReport {
    let file = parse(&corpus(file)).unwrap();
    run_trace(&file, &parse_trace(trace).unwrap(), Limits::default()).unwrap()
}

fn verdicts(report: &RunReport) -> Vec<(String, bool)> {
    report
        .events
        .iter()
        .filter_map(|e| match e {
            Event::RefinementChecked { var, verdict, .. } => Some((var.to_string(), *verdict)),
            _ => None,
        })
        .collect()
}

fn violated(var: &str) -> impl Fn(&Status) -> bool + '_ {
    move |s| matches!(s, Status::RefinementViolated { var: v, .. } if v.as_str() == var)
}

const TCP_GOOD: &str = "m1 = (SYN, 100)\nm2 = (SYNACK, 101, 200)\nm3 = (ACK, 101, 201)\n";

#[test]
fn handshake_completes() {
    let report = run("tcp.ssn", TCP_GOOD);
    assert_eq!(report.status, Status::Completed);
    assert_eq!(
        verdicts(&report),
        [("m2".to_string(), true), ("m3".to_string(), true)]
    );
}

#[test]
fn handshake_sequence_mutations_are_caught() {
    let m2 = run("tcp.ssn", &TCP_GOOD.replace("101, 200", "102, 200"));
    assert!(violated("m2")(&m2.status), "{:?}", m2.status);
    let m3 = run("tcp.ssn", &TCP_GOOD.replace("101, 201", "101, 202"));
    assert!(violated("m3")(&m3.status), "{:?}", m3.status);
}

#[test]
fn violation_span_is_the_creation() {
    let src = corpus("tcp.ssn");
    let report = run("tcp.ssn", &TCP_GOOD.replace("101, 200", "102, 200"));
    let Status::RefinementViolated { span, .. } = report.status else {
        panic!("{:?}", report.status)
    };
    assert!(src[span.start..span.end].starts_with("dep m2"));
}

#[test]
fn server_quits() {
    let report = run("server.ssn", "cmd = Quit");
    assert_eq!(report.status, Status::Completed);
    assert!(matches!(
        &report.events[report.events.len() - 2],
        Event::CaseTaken { pattern, .. } if pattern.to_string() == "Quit"
    ));
}

fn echo(welcome: &str, req: &str, reply: &str) -> String {
    format!(
        "cmd = Echo\nwelcome = {}\nreq = {}\nreply = {}\ncmd = Quit\n",
        quote(welcome),
        quote(req),
        quote(reply)
    )
}

#[test]
fn echo_repeats_the_request() {
    assert_eq!(
        run("server.ssn", &echo("Hello", "hi", "hi")).status,
        Status::Completed
    );
    assert!(violated("reply")(
        &run("server.ssn", &echo("Hello", "hi", "ho")).status
    ));
    assert!(violated("welcome")(
        &run("server.ssn", &echo("hello", "hi", "hi")).status
    ));
}

#[test]
fn maths_results() {
    let trace =
        |op: &str, r: i64| format!("cmd = Math\nop = {op}\nargs = (6, 4)\nr = {r}\ncmd = Quit\n");
    for (op, r) in [("Add", 10), ("Sub", 2), ("Mul", 24)] {
        assert_eq!(
            run("server.ssn", &trace(op, r)).status,
            Status::Completed,
            "{op}"
        );
        assert!(
            violated("r")(&run("server.ssn", &trace(op, r + 1)).status),
            "{op}"
        );
    }
}

#[test]
fn higher_order_body_runs_after_accept() {
    let accepted = run("hoppy.ssn", &corpus("hoppy_accept.trace"));
    assert_eq!(accepted.status, Status::Completed);
    let called: Vec<&str> = accepted
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Called { protocol } => Some(protocol.as_str()),
            _ => None,
        })
        .collect();
    assert_eq!(called, ["Hoppy<body=Greeting>", "Greeting"]);
    let rejected = run("hoppy.ssn", "creds = \"guess\"\ndecision = Reject\n");
    assert_eq!(rejected.status, Status::Completed);
    assert_eq!(rejected.consumed(), 2);
}

#[test]
fn corpus_traces_complete() {
    for (file, trace) in [
        ("tcp.ssn", "tcp_good.trace"),
        ("server.ssn", "server_session.trace"),
        ("server.ssn", "server_quit.trace"),
        ("hoppy.ssn", "hoppy_accept.trace"),
    ] {
        let report = run(file, &corpus(trace));
        assert_eq!(report.status, Status::Completed, "{file} {trace}");
        assert!(report.leftover.is_empty());
    }
}

#[test]
fn loops_stop_at_the_step_budget() {
    let file = parse(&corpus("server.ssn")).unwrap();
    let round = [
        ("cmd", Value::con("Echo", None)),
        ("welcome", Value::Str("Hello".into())),
        ("req", Value::Str("a".into())),
        ("reply", Value::Str("a".into())),
    ];
    let trace =
        Trace::new((0..1_000).flat_map(|_| round.iter().map(|(k, v)| (VarId::new(*k), v.clone()))));
    let report = run_trace(&file, &trace, Limits { max_steps: 100 }).unwrap();
    assert!(
        matches!(report.status, Status::TraceExhausted { var: None, .. }),
        "{:?}",
        report.status
    );
    assert_eq!(report.steps, 100);
}

fn dependent_vars(file: &SourceFile) -> HashSet<VarId> {
    let mut out = HashSet::new();
    for p in file.protocols() {
        walk_stmts(&p.body, &mut |s| {
            if let SessionExpr::NewDepMsg { var, .. } = &s.expr {
                out.insert(var.node.clone());
            }
        });
    }
    out
}

/// Checks every simulator invariant that does not depend on the verdict.
fn assert_invariants(file: &SourceFile, trace: &Trace) -> RunReport {
    let report = run_trace(file, trace, Limits::default()).unwrap();
    assert_eq!(run_trace(file, trace, Limits::default()).unwrap(), report);

    let checked = check_file(file);
    for event in &report.events {
        if let Event::Sent {
            index,
            protocol,
            span,
            ..
        } = event
        {
            let step = checked
                .steps
                .iter()
                .find(|s| &s.protocol == protocol && s.span.start == span.start)
                .expect("every send was checked");
            assert_eq!(&step.after, index);
        }
    }

    let deps = dependent_vars(file);
    let created_deps = report
        .events
        .iter()
        .filter(|e| matches!(e, Event::MsgCreated { var, .. } if deps.contains(var)))
        .count();
    assert_eq!(verdicts(&report).len(), created_deps);

    if matches!(
        report.status,
        Status::Completed | Status::RefinementViolated { .. }
    ) {
        assert_eq!(
            report.consumed() + report.leftover.len(),
            trace.bindings.len()
        );
    }
    report
}

#[test]
fn invariants_on_corpus_traces() {
    for (file, trace) in [
        ("tcp.ssn", "tcp_good.trace"),
        ("tcp.ssn", "tcp_bad.trace"),
        ("server.ssn", "server_session.trace"),
        ("hoppy.ssn", "hoppy_accept.trace"),
    ] {
        let file = parse(&corpus(file)).unwrap();
        assert_invariants(&file, &parse_trace(&corpus(trace)).unwrap());
    }
}

proptest! {
    #[test]
    fn literal_law(s in "[ -~]{0,8}") {
        let file = parse(&corpus("server.ssn")).unwrap();
        let trace = parse_trace(&echo(&s, "q", "q")).unwrap();
        let report = assert_invariants(&file, &trace);
        prop_assert_eq!(report.status == Status::Completed, s == "Hello");
    }

    #[test]
    fn maths_refinement(a in any::<i64>(), b in any::<i64>(), op in 0usize..3, off in -2i64..3) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let (name, r) = match op {
            0 => ("Add", &a + &b),
            1 => ("Sub", &a - &b),
            _ => ("Mul", &a * &b),
        };
        let r = r + off;
        let trace = format!("cmd = Math\nop = {name}\nargs = ({a}, {b})\nr = {r}\ncmd = Quit\n");
        let file = parse(&corpus("server.ssn")).unwrap();
        let report = assert_invariants(&file, &parse_trace(&trace).unwrap());
        prop_assert_eq!(report.status == Status::Completed, off == 0);
    }

    #[test]
    fn handshake_accepts_exactly_incremented_numbers(seq in any::<i64>(), ack in any::<i64>(), d2 in -1i64..2, d3 in -1i64..2) {
        let seq = BigInt::from(seq);
        let ack = BigInt::from(ack);
        let n2 = &seq + 1 + d2;
        let trace = format!(
            "m1 = (SYN, {seq})\nm2 = (SYNACK, {n2}, {ack})\nm3 = (ACK, {n2}, {})\n",
            &ack + 1 + d3
        );
        let file = parse(&corpus("tcp.ssn")).unwrap();
        let report = assert_invariants(&file, &parse_trace(&trace).unwrap());
        let expected_ok = d2 == 0 && d3 == 0;
        prop_assert_eq!(report.status == Status::Completed, expected_ok);
        if d2 != 0 {
            prop_assert!(violated("m2")(&report.status));
        } else if d3 != 0 {
            prop_assert!(violated("m3")(&report.status));
        }
    }
}
