use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use sessioncheck_core::check::{check_file, Diagnostic, Severity};
use sessioncheck_core::sim::{run_trace, Limits, SimError, Status};
use sessioncheck_core::syntax::{parse, parse_trace, print, ParseError};

mod explain;

#[derive(Parser)]
#[command(
    name = "sessioncheck",
    version,
    about = "Check and simulate value-dependent session descriptions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report diagnostics for each file.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Run a protocol against a trace of concrete values.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = Limits::default().max_steps as u64, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Show the knowledge index after every step.
    Explain {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Rewrite files in canonical layout.
    Fmt {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Report files that would change instead of rewriting them.
        #[arg(long)]
        check: bool,
    },
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text, alias = "report")]
    format: Format,
    #[arg(long, value_enum, default_value_t = Color::Auto)]
    color: Color,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Color {
    Auto,
    Always,
    Never,
}

impl Output {
    fn color(&self) -> bool {
        match self.color {
            Color::Always => true,
            Color::Never => false,
            Color::Auto => std::env::var_os("NO_COLOR").is_none() && io::stdout().is_terminal(),
        }
    }
}

const OK: u8 = 0;
const FAIL: u8 = 1;
const BROKEN: u8 = 2;

/// Buffered result for one input file.
struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
    json: Vec<serde_json::Value>,
}

impl Outcome {
    fn new(code: u8) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: String::new(),
            json: Vec::new(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { files, out } => per_file(&files, &out, check_one),
        Command::Explain { files, out } => per_file(&files, &out, explain_one),
        Command::Simulate {
            file,
            trace,
            max_steps,
            out,
        } => simulate(&file, &trace, max_steps as usize, &out),
        Command::Fmt { files, check } => fmt(&files, check),
    };
    ExitCode::from(code)
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|err| {
        let mut o = Outcome::new(BROKEN);
        o.stderr = format!("{}: cannot read file: {err}\n", display(path));
        o
    })
}

fn parse_failure(name: &str, errors: &[ParseError]) -> Outcome {
    let mut o = Outcome::new(BROKEN);
    for err in errors {
        o.stderr.push_str(&format!(
            "{name}:{}:{}: parse error: {}\n",
            err.span.line, err.span.col, err.message
        ));
    }
    o
}

fn paint(text: &str, ansi: &str, color: bool) -> String {
    if color {
        format!("\x1b[{ansi}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn render_diagnostic(d: &Diagnostic, name: &str, color: bool) -> String {
    let rendered = d.render(name);
    if !color {
        return rendered;
    }
    let label = format!("{}[{}]", d.severity, d.code);
    let ansi = match d.severity {
        Severity::Error => "1;31",
        Severity::Warning => "1;33",
    };
    rendered.replacen(&label, &paint(&label, ansi, true), 1)
}

fn per_file(files: &[PathBuf], out: &Output, run: fn(&Path, &Output) -> Outcome) -> u8 {
    let outcomes: Vec<Outcome> = files.par_iter().map(|f| run(f, out)).collect();
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let mut code = OK;
    let mut json = Vec::new();
    for o in outcomes {
        code = code.max(o.code);
        eprint!("{}", o.stderr);
        let _ = stdout.write_all(o.stdout.as_bytes());
        json.extend(o.json);
    }
    if out.format == Format::Json {
        let _ = writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&json).expect("valid JSON")
        );
    }
    code
}

fn check_one(path: &Path, out: &Output) -> Outcome {
    let name = display(path);
    let src = match read(path) {
        Ok(src) => src,
        Err(o) => return o,
    };
    let file = match parse(&src) {
        Ok(file) => file,
        Err(errors) => return parse_failure(&name, &errors),
    };
    let result = check_file(&file);
    let mut o = Outcome::new(if result.has_errors() { FAIL } else { OK });
    match out.format {
        Format::Json => {
            o.json = result
                .diagnostics
                .iter()
                .map(|d| d.to_json(&name))
                .collect()
        }
        Format::Text => {
            let color = out.color();
            for d in &result.diagnostics {
                o.stdout.push_str(&render_diagnostic(d, &name, color));
                o.stdout.push('\n');
            }
        }
    }
    o
}

fn explain_one(path: &Path, out: &Output) -> Outcome {
    let name = display(path);
    let src = match read(path) {
        Ok(src) => src,
        Err(o) => return o,
    };
    let file = match parse(&src) {
        Ok(file) => file,
        Err(errors) => return parse_failure(&name, &errors),
    };
    let result = check_file(&file);
    if result.has_errors() {
        let mut o = Outcome::new(FAIL);
        let color = out.color();
        for d in result.errors() {
            o.stderr.push_str(&render_diagnostic(d, &name, color));
            o.stderr.push('\n');
        }
        return o;
    }
    let mut o = Outcome::new(OK);
    match out.format {
        Format::Json => o.json.push(explain::to_json(&name, &result)),
        Format::Text => o.stdout = explain::render(&name, &result),
    }
    o
}

fn simulate(path: &Path, trace_path: &Path, max_steps: usize, out: &Output) -> u8 {
    let o = simulate_one(path, trace_path, max_steps, out);
    eprint!("{}", o.stderr);
    print!("{}", o.stdout);
    o.code
}

fn simulate_one(path: &Path, trace_path: &Path, max_steps: usize, out: &Output) -> Outcome {
    let name = display(path);
    let src = match read(path) {
        Ok(src) => src,
        Err(o) => return o,
    };
    let file = match parse(&src) {
        Ok(file) => file,
        Err(errors) => return parse_failure(&name, &errors),
    };
    let trace_src = match read(trace_path) {
        Ok(src) => src,
        Err(o) => return o,
    };
    let trace = match parse_trace(&trace_src) {
        Ok(trace) => trace,
        Err(err) => return parse_failure(&display(trace_path), &[err]),
    };
    let report = match run_trace(&file, &trace, Limits { max_steps }) {
        Ok(report) => report,
        Err(SimError::Rejected(diags)) => {
            let mut o = Outcome::new(BROKEN);
            let color = out.color();
            for d in &diags {
                o.stderr.push_str(&render_diagnostic(d, &name, color));
                o.stderr.push('\n');
            }
            o.stderr.push_str(&format!(
                "{name}: not simulated because the checker rejects it\n"
            ));
            return o;
        }
    };
    let mut o = Outcome::new(match report.status {
        Status::Completed => OK,
        _ => FAIL,
    });
    o.stdout = match out.format {
        Format::Json => {
            let mut j = report.to_json();
            j["file"] = json!(name);
            j["trace"] = json!(display(trace_path));
            format!(
                "{}\n",
                serde_json::to_string_pretty(&j).expect("valid JSON")
            )
        }
        Format::Text => report.render(),
    };
    o
}

fn fmt(files: &[PathBuf], check: bool) -> u8 {
    let outcomes: Vec<Outcome> = files.par_iter().map(|f| fmt_one(f, check)).collect();
    let mut code = OK;
    for o in outcomes {
        code = code.max(o.code);
        eprint!("{}", o.stderr);
        print!("{}", o.stdout);
    }
    code
}

fn fmt_one(path: &Path, check: bool) -> Outcome {
    let name = display(path);
    let src = match read(path) {
        Ok(src) => src,
        Err(o) => return o,
    };
    let file = match parse(&src) {
        Ok(file) => file,
        Err(errors) => return parse_failure(&name, &errors),
    };
    let canonical = print(&file);
    if canonical == src {
        return Outcome::new(OK);
    }
    if check {
        let mut o = Outcome::new(FAIL);
        o.stdout = format!("{name}: not formatted\n");
        return o;
    }
    match fs::write(path, canonical) {
        Ok(()) => {
            let mut o = Outcome::new(OK);
            o.stdout = format!("{name}: formatted\n");
            o
        }
        Err(err) => {
            let mut o = Outcome::new(BROKEN);
            o.stderr = format!("{name}: cannot write file: {err}\n");
            o
        }
    }
}
