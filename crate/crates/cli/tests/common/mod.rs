#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary with the corpus as working directory.
pub fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_sessioncheck"))
        .args(args)
        .current_dir(dir)
        .env_remove("NO_COLOR")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Run {
    run_in(&corpus_dir(), args)
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Diagnostics,
    Report,
    Explain,
    Text,
}

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
    pub schema: Schema,
}

const fn case(
    name: &'static str,
    args: &'static [&'static str],
    exit: i32,
    schema: Schema,
) -> Case {
    Case {
        name,
        args,
        exit,
        schema,
    }
}

/// Every corpus file under every command that accepts it.
pub const CASES: &[Case] = &[
    case("check_tcp.txt", &["check", "tcp.ssn"], 0, Schema::Text),
    case(
        "check_server.txt",
        &["check", "server.ssn"],
        0,
        Schema::Text,
    ),
    case("check_hoppy.txt", &["check", "hoppy.ssn"], 0, Schema::Text),
    case(
        "check_charlie.txt",
        &["check", "charlie.ssn"],
        1,
        Schema::Text,
    ),
    case(
        "check_tcp.json",
        &["check", "--format", "json", "tcp.ssn"],
        0,
        Schema::Diagnostics,
    ),
    case(
        "check_server.json",
        &["check", "--format", "json", "server.ssn"],
        0,
        Schema::Diagnostics,
    ),
    case(
        "check_hoppy.json",
        &["check", "--format", "json", "hoppy.ssn"],
        0,
        Schema::Diagnostics,
    ),
    case(
        "check_charlie.json",
        &["check", "--format", "json", "charlie.ssn"],
        1,
        Schema::Diagnostics,
    ),
    case(
        "check_all.json",
        &[
            "check",
            "--format",
            "json",
            "tcp.ssn",
            "charlie.ssn",
            "server.ssn",
            "hoppy.ssn",
        ],
        1,
        Schema::Diagnostics,
    ),
    case(
        "check_rules.json",
        &[
            "check",
            "--format",
            "json",
            "rules/e001.ssn",
            "rules/e002.ssn",
            "rules/e003.ssn",
            "rules/e004.ssn",
            "rules/e005.ssn",
            "rules/e006.ssn",
            "rules/e007.ssn",
            "rules/e008.ssn",
            "rules/e009.ssn",
            "rules/e010.ssn",
            "rules/e011.ssn",
            "rules/e012.ssn",
        ],
        1,
        Schema::Diagnostics,
    ),
    case(
        "simulate_tcp_good.txt",
        &["simulate", "tcp.ssn", "--trace", "tcp_good.trace"],
        0,
        Schema::Text,
    ),
    case(
        "simulate_tcp_bad.txt",
        &["simulate", "tcp.ssn", "--trace", "tcp_bad.trace"],
        1,
        Schema::Text,
    ),
    case(
        "simulate_tcp_good.json",
        &[
            "simulate",
            "--format",
            "json",
            "tcp.ssn",
            "--trace",
            "tcp_good.trace",
        ],
        0,
        Schema::Report,
    ),
    case(
        "simulate_tcp_bad.json",
        &[
            "simulate",
            "--format",
            "json",
            "tcp.ssn",
            "--trace",
            "tcp_bad.trace",
        ],
        1,
        Schema::Report,
    ),
    case(
        "simulate_server_session.json",
        &[
            "simulate",
            "--format",
            "json",
            "server.ssn",
            "--trace",
            "server_session.trace",
        ],
        0,
        Schema::Report,
    ),
    case(
        "simulate_server_quit.json",
        &[
            "simulate",
            "--format",
            "json",
            "server.ssn",
            "--trace",
            "server_quit.trace",
        ],
        0,
        Schema::Report,
    ),
    case(
        "simulate_hoppy_accept.json",
        &[
            "simulate",
            "--format",
            "json",
            "hoppy.ssn",
            "--trace",
            "hoppy_accept.trace",
        ],
        0,
        Schema::Report,
    ),
    case(
        "simulate_charlie.txt",
        &["simulate", "charlie.ssn", "--trace", "tcp_good.trace"],
        2,
        Schema::Text,
    ),
    case("explain_tcp.txt", &["explain", "tcp.ssn"], 0, Schema::Text),
    case(
        "explain_server.txt",
        &["explain", "server.ssn"],
        0,
        Schema::Text,
    ),
    case(
        "explain_hoppy.txt",
        &["explain", "hoppy.ssn"],
        0,
        Schema::Text,
    ),
    case(
        "explain_tcp.json",
        &["explain", "--format", "json", "tcp.ssn"],
        0,
        Schema::Explain,
    ),
    case(
        "explain_server.json",
        &["explain", "--format", "json", "server.ssn"],
        0,
        Schema::Explain,
    ),
    case(
        "explain_hoppy.json",
        &["explain", "--format", "json", "hoppy.ssn"],
        0,
        Schema::Explain,
    ),
    case(
        "explain_charlie.txt",
        &["explain", "charlie.ssn"],
        1,
        Schema::Text,
    ),
    case(
        "fmt_check.txt",
        &[
            "fmt",
            "--check",
            "tcp.ssn",
            "charlie.ssn",
            "server.ssn",
            "hoppy.ssn",
        ],
        0,
        Schema::Text,
    ),
];

/// Stdout followed by stderr, as stored in a golden file.
pub fn transcript(run: &Run) -> String {
    if run.stderr.is_empty() {
        run.stdout.clone()
    } else {
        format!("{}--- stderr\n{}", run.stdout, run.stderr)
    }
}

/// Runs every case against its golden file and schema. With `BLESS` set
/// in the environment the golden files are rewritten instead.
pub fn check_goldens() -> Result<usize, String> {
    let bless = std::env::var_os("BLESS").is_some();
    for c in CASES {
        let run = run(c.args);
        if run.code != c.exit {
            return Err(format!(
                "{}: exit {} (expected {})",
                c.name, run.code, c.exit
            ));
        }
        let path = golden_dir().join(c.name);
        let actual = transcript(&run);
        if bless {
            fs::write(&path, &actual).unwrap();
        } else {
            let expected =
                fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            if expected != actual {
                return Err(format!("{}: output differs from golden\n{actual}", c.name));
            }
        }
        if c.schema != Schema::Text {
            let value: Value =
                serde_json::from_str(&run.stdout).map_err(|e| format!("{}: {e}", c.name))?;
            validate(c.schema, &value).map_err(|e| format!("{}: {e}", c.name))?;
        }
    }
    Ok(CASES.len())
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, String> {
    obj.get(key)
        .ok_or_else(|| format!("missing `{key}` in {obj}"))
}

fn string(obj: &Value, key: &str) -> Result<(), String> {
    field(obj, key)?
        .as_str()
        .map(|_| ())
        .ok_or_else(|| format!("`{key}` is not a string"))
}

fn uint(obj: &Value, key: &str) -> Result<(), String> {
    field(obj, key)?
        .as_u64()
        .map(|_| ())
        .ok_or_else(|| format!("`{key}` is not a count"))
}

fn array<'a>(obj: &'a Value, key: &str) -> Result<&'a Vec<Value>, String> {
    field(obj, key)?
        .as_array()
        .ok_or_else(|| format!("`{key}` is not an array"))
}

fn keys(obj: &Value, allowed: &[&str]) -> Result<(), String> {
    let map = obj
        .as_object()
        .ok_or_else(|| format!("{obj} is not an object"))?;
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(format!("unexpected `{k}`")),
        None => Ok(()),
    }
}

fn diagnostic(d: &Value) -> Result<(), String> {
    keys(
        d,
        &[
            "code", "severity", "file", "line", "col", "len", "message", "related",
        ],
    )?;
    let code = field(d, "code")?.as_str().unwrap_or("");
    let numbered =
        code.len() == 4 && code.starts_with('E') && code[1..].chars().all(|c| c.is_ascii_digit());
    if !numbered {
        return Err(format!("bad code {code:?}"));
    }
    match field(d, "severity")?.as_str() {
        Some("error" | "warning") => {}
        other => return Err(format!("bad severity {other:?}")),
    }
    string(d, "file")?;
    string(d, "message")?;
    for k in ["line", "col", "len"] {
        uint(d, k)?;
    }
    if let Some(rel) = d.get("related") {
        keys(rel, &["line", "col", "len", "message"])?;
        for k in ["line", "col", "len"] {
            uint(rel, k)?;
        }
        string(rel, "message")?;
    }
    Ok(())
}

fn index(items: &[Value]) -> Result<(), String> {
    for item in items {
        keys(item, &["var", "type", "knowers"])?;
        string(item, "var")?;
        string(item, "type")?;
        if !array(item, "knowers")?.iter().all(Value::is_string) {
            return Err("knowers must be role names".into());
        }
    }
    Ok(())
}

fn report(r: &Value) -> Result<(), String> {
    keys(
        r,
        &["file", "trace", "status", "events", "leftover", "steps"],
    )?;
    string(r, "file")?;
    string(r, "trace")?;
    uint(r, "steps")?;
    let status = field(r, "status")?;
    match field(status, "kind")?.as_str() {
        Some("completed" | "refinement_violated" | "trace_exhausted" | "trace_mismatch") => {}
        other => return Err(format!("bad status {other:?}")),
    }
    for e in array(r, "events")? {
        match field(e, "kind")?.as_str() {
            Some("msg_created") => {
                string(e, "var")?;
                string(e, "creator")?;
                field(e, "value")?;
            }
            Some("refinement_checked") => {
                string(e, "var")?;
                string(e, "predicate")?;
                field(e, "verdict")?
                    .as_bool()
                    .ok_or("verdict is not a bool")?;
            }
            Some("sent") => {
                for k in ["var", "sender", "receiver", "protocol"] {
                    string(e, k)?;
                }
                uint(e, "line")?;
                index(array(e, "index")?)?;
            }
            Some("case_taken") => {
                string(e, "var")?;
                string(e, "pattern")?;
            }
            Some("recursed" | "called" | "ended") => string(e, "protocol")?,
            other => return Err(format!("bad event {other:?}")),
        }
    }
    if !array(r, "leftover")?.iter().all(Value::is_string) {
        return Err("leftover must be names".into());
    }
    Ok(())
}

fn explain(files: &Value) -> Result<(), String> {
    for f in files.as_array().ok_or("not an array")? {
        keys(f, &["file", "steps", "final"])?;
        string(f, "file")?;
        for s in array(f, "steps")? {
            keys(s, &["protocol", "arms", "line", "statement", "index"])?;
            string(s, "protocol")?;
            string(s, "statement")?;
            uint(s, "line")?;
            array(s, "arms")?;
            index(array(s, "index")?)?;
        }
        for p in array(f, "final")? {
            keys(p, &["path", "index"])?;
            string(p, "path")?;
            index(array(p, "index")?)?;
        }
    }
    Ok(())
}

pub fn validate(schema: Schema, value: &Value) -> Result<(), String> {
    match schema {
        Schema::Diagnostics => value
            .as_array()
            .ok_or_else(|| "diagnostics must be an array".to_string())?
            .iter()
            .try_for_each(diagnostic),
        Schema::Report => report(value),
        Schema::Explain => explain(value),
        Schema::Text => Ok(()),
    }
}
