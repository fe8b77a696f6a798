//! Command-line front end: argument parsing, job dispatch and report
//! rendering. `run` is the whole program minus process I/O.

pub mod args;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::Parser;
use rayon::prelude::*;

use args::{Cli, Format, GlobalOpts};
use report::{Context, Outcome, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn wants_json(args: &[OsString]) -> bool {
    let a: Vec<String> = args.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    a.iter().any(|s| s == "--json" || s == "--format=json")
        || a.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
}

fn mode_name(opts: &GlobalOpts) -> &'static str {
    match opts.mode {
        critforge::Mode::Q => "q",
        critforge::Mode::CFormal => "c-formal",
    }
}

fn render(command: &str, opts: &GlobalOpts, json: bool, outcome: &Outcome) -> String {
    let ctx = Context { command, order: opts.order, cap: opts.cap, mode: mode_name(opts) };
    if json {
        report::to_json(&report::envelope(&ctx, outcome)) + "\n"
    } else {
        report::to_human(&ctx, outcome)
    }
}

struct Job {
    outcome: Outcome,
    text: String,
    help: Option<String>,
}

/// Parses and runs one command line; `args[0]` is the program name.
fn job(args: &[OsString]) -> Job {
    let json = wants_json(args);
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let text = e.to_string();
                return Job { outcome: Outcome::ok(serde_json::Value::Null), text: String::new(), help: Some(text) };
            }
            let outcome = Outcome::usage("usage", e.render().to_string().trim_end());
            let opts = Cli::try_parse_from(["critforge"]).expect("defaults parse").opts;
            let text = render("usage", &opts, json, &outcome);
            return Job { outcome, text, help: None };
        }
    };
    let json = cli.opts.format() == Format::Json;
    if cli.batch.is_some() {
        let outcome = Outcome::usage("usage", "--batch cannot be combined with a command");
        let text = render("usage", &cli.opts, json, &outcome);
        return Job { outcome, text, help: None };
    }
    let Some(command) = &cli.command else {
        let outcome = Outcome::usage("usage", "no command given; see --help");
        let text = render("usage", &cli.opts, json, &outcome);
        return Job { outcome, text, help: None };
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| commands::execute(command, &cli.opts))).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "internal failure".into());
        Outcome {
            status: Status::ContractViolation,
            body: serde_json::json!({ "code": "internal", "message": msg }),
        }
    });
    let text = render(command.name(), &cli.opts, json, &outcome);
    Job { outcome, text, help: None }
}

/// Runs the program on `args` (including the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let batch_pos = args.iter().position(|a| a == "--batch" || a.to_string_lossy().starts_with("--batch="));
    if batch_pos.is_some() {
        if let Ok(cli) = Cli::try_parse_from(&args) {
            if let (Some(path), None) = (&cli.batch, &cli.command) {
                return run_batch(&args, path);
            }
        }
    }
    let j = job(&args);
    if let Some(help) = j.help {
        return Output { code: 0, stdout: help, stderr: String::new() };
    }
    let code = j.outcome.status.exit_code();
    let json = wants_json(&args);
    // Human-mode usage errors go to stderr; everything else is a report.
    if code == 1 && !json && j.outcome.body.get("code").and_then(|c| c.as_str()) == Some("usage") {
        return Output { code, stdout: String::new(), stderr: j.text };
    }
    Output { code, stdout: j.text, stderr: String::new() }
}

/// Flags of the outer invocation other than `--batch`, prefixed to every
/// batch line so they act as defaults.
fn inherited(args: &[OsString]) -> Vec<OsString> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--batch" {
            it.next();
        } else if !a.to_string_lossy().starts_with("--batch=") {
            out.push(a.clone());
        }
    }
    out
}

fn run_batch(args: &[OsString], path: &std::path::Path) -> Output {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return Output { code: 1, stdout: String::new(), stderr: format!("cannot read {}: {e}\n", path.display()) }
        }
    };
    let prefix = inherited(args);
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let jobs: Vec<(usize, Job)> = lines
        .par_iter()
        .map(|&(lineno, line)| {
            let mut argv: Vec<OsString> = vec!["critforge".into()];
            argv.extend(prefix.iter().cloned());
            match shlex::split(line) {
                Some(tokens) => {
                    argv.extend(tokens.into_iter().map(OsString::from));
                    (lineno, job(&argv))
                }
                None => {
                    let outcome = Outcome::usage("usage", "unbalanced quotes");
                    let opts = Cli::try_parse_from(["critforge"]).expect("defaults parse").opts;
                    let text = render("usage", &opts, wants_json(&argv), &outcome);
                    (lineno, Job { outcome, text, help: None })
                }
            }
        })
        .collect();
    let json = wants_json(args);
    let mut stdout = String::new();
    let mut worst = Status::Ok;
    for (lineno, j) in jobs {
        if j.outcome.status.severity() > worst.severity() {
            worst = j.outcome.status;
        }
        if json {
            let mut v: serde_json::Value = serde_json::from_str(&j.text).unwrap_or(serde_json::Value::Null);
            v["line"] = serde_json::json!(lineno);
            stdout.push_str(&report::to_json(&v));
            stdout.push('\n');
        } else {
            stdout.push_str(&format!("# line {lineno}\n"));
            stdout.push_str(j.help.as_deref().unwrap_or(&j.text));
        }
    }
    Output { code: worst.exit_code(), stdout, stderr: String::new() }
}
