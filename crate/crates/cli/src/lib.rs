//! Command-line experiments for Fisher-Rao geodesics.
//!
//! Each subcommand is an [`experiment::Experiment`] from the static registry.
//! Configuration comes from an optional flat `key = value` file, then
//! `--set key=value` overrides, then `--out` and `--format`. Exit codes: 0 on
//! success, 2 for configuration errors, 3 for domain errors (printed as JSON),
//! 1 for I/O failures.

pub mod config;
pub mod experiment;
pub mod experiments;
pub mod export;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, Command};

use config::{parse_entries, parse_override, Config, ConfigError, COMMON_KEYS};
use experiment::{lookup, registry, Experiment, RunError};
use export::{write_all, Format};

fn key_help(exp: &dyn Experiment) -> String {
    let mut s = String::from("Config keys:\n");
    for k in COMMON_KEYS.iter().chain(exp.keys()) {
        let default = k.default.map(|d| format!(" [default: {d}]")).unwrap_or_default();
        s.push_str(&format!("  {:<16}{}{}\n", k.name, k.help, default));
    }
    s
}

pub fn command() -> Command {
    let mut cmd = Command::new("frg")
        .about("Fisher-Rao geodesics of probability densities")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for exp in registry() {
        cmd = cmd.subcommand(
            Command::new(exp.name())
                .about(exp.about())
                .after_help(key_help(*exp))
                .arg(Arg::new("config").long("config").value_name("PATH").help("flat key = value file"))
                .arg(Arg::new("out").long("out").value_name("DIR").help("output directory"))
                .arg(
                    Arg::new("format")
                        .long("format")
                        .value_name("FORMAT")
                        .value_parser(["csv", "json"]),
                )
                .arg(
                    Arg::new("set")
                        .long("set")
                        .value_name("KEY=VALUE")
                        .action(ArgAction::Append)
                        .help("override one config key"),
                ),
        );
    }
    cmd
}

/// Caps the global rayon pool from `FRG_THREADS`.
fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("FRG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| ConfigError::new("FRG_THREADS", format!("`{raw}` is not a positive integer")))?;
    // A pool built earlier in this process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Resolves the configuration and runs one experiment, writing its files.
pub fn execute(exp: &dyn Experiment, entries: &[(String, String)]) -> Result<Vec<PathBuf>, RunError> {
    configure_threads()?;
    let cfg = Config::resolve(exp.keys(), entries)?;
    let raw = cfg.string("format")?;
    let format =
        Format::parse(&raw).ok_or_else(|| ConfigError::new("format", format!("`{raw}` is not csv or json")))?;
    let artifacts = exp.run(&cfg, format)?;
    write_all(Path::new(&cfg.string("out")?), &artifacts)
}

fn entries_from_matches(m: &clap::ArgMatches) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries = Vec::new();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {path}: {e}")))?;
        entries.extend(parse_entries(&text, path)?);
    }
    for s in m.get_many::<String>("set").into_iter().flatten() {
        entries.push(parse_override(s)?);
    }
    for k in ["out", "format"] {
        if let Some(v) = m.get_one::<String>(k) {
            entries.push((k.to_string(), v.clone()));
        }
    }
    Ok(entries)
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let exp = lookup(name).expect("subcommands come from the registry");
    let result = entries_from_matches(sub)
        .map_err(RunError::from)
        .and_then(|entries| execute(exp, &entries));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
