//! `kepler`: generate packings, decompose, score, bound and verify.
//!
//! Exit status: 0 when everything passes, 2 when a check fails (the failures are
//! listed in the output and on stderr), 1 on usage or I/O errors.

mod args;
mod commands;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use kepler_core::report::{to_json, Manifest};

use args::{Cli, Command};
use commands::{Body, Outcome, Table};

const THREADS_VAR: &str = "KEPLER_THREADS";

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(s) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = s.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("{THREADS_VAR} must be a positive integer, got {s:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    configure_threads()?;
    let out = match &cli.command {
        Command::Gen(a) => commands::gen(a)?,
        Command::Decompose(a) => commands::decompose(a)?,
        Command::Score(a) => commands::score(a)?,
        Command::Bound(a) => commands::bound(a)?,
        Command::Verify(a) => commands::verify(a)?,
        Command::Report(a) => commands::report(a)?,
    };
    let text = render(&out, cli.out.csv)?;
    match &cli.out.output {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    let code = if out.failures.is_empty() { 0 } else { 2 };
    for f in &out.failures {
        eprintln!("{f}");
    }
    write_manifest(cli, &out, code)?;
    Ok(code)
}

fn render(out: &Outcome, csv: bool) -> Result<String> {
    if csv {
        return render_csv(&out.table);
    }
    Ok(match &out.body {
        Body::Json(v) => to_json(v)? + "\n",
        Body::Raw(s) => s.clone() + "\n",
    })
}

fn render_csv(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing csv")?)?)
}

fn manifest_path(cli: &Cli) -> PathBuf {
    if let Some(m) = &cli.out.manifest {
        return m.clone();
    }
    match &cli.out.output {
        Some(o) => {
            let stem = o.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
            o.with_file_name(format!("{stem}.manifest.json"))
        }
        None => Path::new("manifest.json").to_path_buf(),
    }
}

fn write_manifest(cli: &Cli, out: &Outcome, code: u8) -> Result<()> {
    let mut config = serde_json::to_value(cli)?;
    if let Some(obj) = config.as_object_mut() {
        obj.insert("resolved".into(), out.resolved.clone());
    }
    let command = config["command"]["command"].as_str().unwrap_or_default().to_string();
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        args: std::env::args().skip(1).collect(),
        config,
        seeds: out.seeds.clone(),
        threads: rayon::current_num_threads(),
        inputs: out.inputs.iter().map(|p| p.display().to_string()).collect(),
        outputs: cli.out.output.iter().map(|p| p.display().to_string()).collect(),
        exit_code: code.into(),
    };
    let path = manifest_path(cli);
    fs::write(&path, to_json(&m)? + "\n").with_context(|| format!("writing manifest {}", path.display()))
}
