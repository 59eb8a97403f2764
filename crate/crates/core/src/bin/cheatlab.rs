//! Command-line front end. Exit codes: 0 success, 1 a check failed,
//! 2 usage or input error, 3 solver failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cheatlab::builders::{restrict_and_solve, ModelId};
use cheatlab::catalog::catalog;
use cheatlab::report::{parse_candidate, render_text, reproduce, write_reports, Suite, CERTIFY_TOL};
use cheatlab::sdp::{canonicalize, export_sdpa, facial_reduce};
use cheatlab::solver::{certify, solve, verify_candidate, Backend, SolverOptions, Status};
use cheatlab::Error;

#[derive(Parser)]
#[command(name = "cheatlab", version, about = "Optimal cheating probabilities of two-party quantum protocols")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Sdpa,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List protocols and cheating models with their variable sizes.
    List,
    /// Solve one model and print the result as JSON.
    Solve {
        model: String,
        #[arg(long, default_value = "ipm")]
        backend: Backend,
        #[arg(long)]
        tol: Option<f64>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Facial reduction before solving (the default).
        #[arg(long, overrides_with = "no_reduce")]
        reduce: bool,
        #[arg(long)]
        no_reduce: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every model against the manifest of expected values.
    Reproduce {
        #[arg(long, default_value = "paper")]
        suite: Suite,
        #[arg(long, default_value = "ipm")]
        backend: Backend,
        /// JSON report path; the text table goes next to it with extension `txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a candidate first message (or a full assignment) for a model.
    Verify { model: String, file: PathBuf },
    /// Write the canonical problem of a model.
    Export {
        model: String,
        format: ExportFormat,
        path: PathBuf,
        #[arg(long)]
        no_reduce: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn options(backend: Backend, tol: Option<f64>, time_limit: Option<f64>) -> SolverOptions {
    let mut opts = SolverOptions::for_backend(backend);
    opts.time_limit = time_limit;
    match tol {
        Some(t) => opts.with_tolerance(t),
        None => opts,
    }
}

fn emit(value: &serde_json::Value, out: Option<&PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn list() -> Result<u8, Error> {
    println!("protocols:");
    for spec in catalog() {
        println!("  {:<16} {}", spec.id.to_string(), spec.title);
    }
    println!("models:");
    for m in ModelId::all() {
        let p = m.build()?;
        let vars: Vec<String> = p.variables().iter().map(|v| format!("{}[{}]", v.name, v.space.dim())).collect();
        println!("  {:<24} {}", m.name(), vars.join(" "));
    }
    Ok(0)
}

fn solve_cmd(model: &str, opts: &SolverOptions, reduce: bool, out: Option<&PathBuf>) -> Result<u8, Error> {
    let model: ModelId = model.parse()?;
    let problem = model.build()?;
    let sol = match solve(&problem, opts, reduce) {
        Ok(s) => s,
        Err(e @ Error::Solver(_)) => {
            emit(&json!({"model": model.name(), "backend": opts.backend.to_string(), "status": "failed", "error": e.to_string()}), out)?;
            return Ok(3);
        }
        Err(e) => return Err(e),
    };
    let mut report = sol.result.to_json();
    report["reduced"] = json!(sol.result.reduced);
    if sol.result.status == Status::Optimal {
        let cert = certify(&sol.result, &sol.canonical, CERTIFY_TOL)?;
        report["certificate"] = serde_json::to_value(&cert)?;
        emit(&report, out)?;
        Ok(if cert.passed { 0 } else { 1 })
    } else {
        emit(&report, out)?;
        Ok(3)
    }
}

fn reproduce_cmd(suite: Suite, backend: Backend, out: Option<&PathBuf>) -> Result<u8, Error> {
    let rows = reproduce(suite, &SolverOptions::for_backend(backend))?;
    print!("{}", render_text(&rows));
    if let Some(p) = out {
        write_reports(&rows, p)?;
    }
    Ok(if rows.iter().all(|r| r.passed) {
        0
    } else if rows.iter().any(|r| !r.passed && r.solver_failed()) {
        3
    } else {
        1
    })
}

fn verify_cmd(model: &str, file: &PathBuf) -> Result<u8, Error> {
    let model: ModelId = model.parse()?;
    let candidate = parse_candidate(&model, &std::fs::read_to_string(file)?)?;
    let problem = model.build()?;
    let message_only = candidate.len() == 1 && problem.first_message.as_ref().is_some_and(|v| candidate.contains_key(v));
    if !message_only {
        let rep = verify_candidate(&problem, &candidate, 1e-7)?;
        emit(&json!({"model": model.name(), "mode": "assignment", "report": serde_json::to_value(&rep)?}), None)?;
        return Ok(if rep.feasible { 0 } else { 1 });
    }
    let message = candidate.into_values().next().expect("one entry");
    let min_eig = message.min_eigenvalue();
    let trace = message.trace().re;
    let base = json!({"model": model.name(), "mode": "first_message", "trace": trace, "min_eigenvalue": min_eig});
    if !message.is_density(1e-6) {
        let mut r = base;
        r["feasible"] = json!(false);
        r["reason"] = json!("not a density operator");
        emit(&r, None)?;
        return Ok(1);
    }
    let sol = restrict_and_solve(&model, &message, &SolverOptions::ipm(), true)?;
    let mut r = base;
    r["status"] = json!(sol.result.status.to_string());
    r["feasible"] = json!(sol.result.status == Status::Optimal);
    r["achieved"] = json!(sol.result.value);
    emit(&r, None)?;
    Ok(if sol.result.status == Status::Optimal { 0 } else { 3 })
}

fn export_cmd(model: &str, format: ExportFormat, path: &PathBuf, reduce: bool) -> Result<u8, Error> {
    let model: ModelId = model.parse()?;
    let problem = model.build()?;
    let target = if reduce { facial_reduce(&problem)?.problem } else { problem.clone() };
    let canonical = canonicalize(&target)?;
    let text = match format {
        ExportFormat::Sdpa => export_sdpa(&canonical, &model.name()),
        ExportFormat::Json => serde_json::to_string_pretty(&json!({
            "model": model.name(),
            "reduced": reduce,
            "problem": target.to_json(),
            "canonical": {
                "blocks": canonical.blocks.iter().map(|b| json!({"variable": b.variable, "size": b.size})).collect::<Vec<_>>(),
                "rows": canonical.num_rows(),
                "dropped_rows": canonical.dropped_rows,
                "complex": canonical.complex,
            },
        }))?,
    };
    std::fs::write(path, text)?;
    Ok(0)
}

fn configure_threads() {
    if let Some(n) = std::env::var("CHEATLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => list(),
        Command::Solve { model, backend, tol, time_limit, reduce: _, no_reduce, out } => {
            solve_cmd(model, &options(*backend, *tol, *time_limit), !no_reduce, out.as_ref())
        }
        Command::Reproduce { suite, backend, out } => reproduce_cmd(*suite, *backend, out.as_ref()),
        Command::Verify { model, file } => verify_cmd(model, file),
        Command::Export { model, format, path, no_reduce } => export_cmd(model, *format, path, !no_reduce),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
