//! The `agv` command line: parsing, linting, verification, consistency and
//! realizability checks, and dumps of the intermediate encodings.
//!
//! Exit codes: 0 when every requested check passed, 1 when one failed, 2 on
//! usage or load errors and 3 when a check is unknown and none failed.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use agv_core::analyses::{check_component_consistency, check_component_realizability, ObligationResult, Status};
use agv_core::engine::{dump_smt, split_command, DEFAULT_SOLVER, SOLVER_ENV};
use agv_core::lang::{file_to_string, parse_file};
use agv_core::ts::{compile_layer, consistency_query, layer_obligations, realizability_query};
use agv_core::{instantiate, load_system, render_report, verify_all, CheckConfig, Library, Report, ReportFormat};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_PASSED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "agv", version, about = "Compositional assume-guarantee verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse files and print them back in canonical form.
    Parse(Files),
    /// Typecheck files and report warnings.
    Lint(Files),
    /// Verify every implementation layer below a root.
    Verify(Target),
    /// Search for a run satisfying a component contract.
    Consistency(Target),
    /// Search for an input sequence no implementation can answer.
    Realizability(Target),
    /// Print the transition system of one layer.
    DumpTs(Target),
    /// Print the SMT-LIB queries of one layer.
    DumpSmt(Target),
}

#[derive(Debug, Args)]
pub struct Files {
    /// System description files or directories of `.agv` files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Args)]
pub struct Target {
    #[command(flatten)]
    pub files: Files,
    /// Root implementation (or component type) of the system.
    #[arg(long)]
    pub root: Option<String>,
    /// Component type or implementation to check.
    #[arg(long)]
    pub component: Option<String>,
    /// Solver command line.
    #[arg(long, env = SOLVER_ENV, default_value = DEFAULT_SOLVER)]
    pub solver: String,
    /// Largest induction depth.
    #[arg(long, default_value_t = 10)]
    pub max_k: usize,
    /// Depth of the counterexample search.
    #[arg(long, default_value_t = 20)]
    pub bmc_depth: usize,
    /// Seconds allowed per obligation.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// Obligations checked in parallel (defaults to the number of CPUs).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Bound of consistency and realizability checks, or the unrolling
    /// length of dump-smt.
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
}

impl Target {
    pub fn config(&self) -> Result<CheckConfig, String> {
        let defaults = CheckConfig::default();
        let cfg = CheckConfig {
            max_k: self.max_k,
            bmc_depth: self.bmc_depth,
            timeout: Duration::from_secs(self.timeout),
            solver: split_command(&self.solver),
            jobs: self.jobs.unwrap_or(defaults.jobs),
        };
        cfg.validate()?;
        if self.depth == 0 {
            return Err("the depth must be positive".into());
        }
        Ok(cfg)
    }

    fn report_format(&self) -> ReportFormat {
        match self.format {
            Format::Human => ReportFormat::Human,
            Format::Json => ReportFormat::Json,
        }
    }
}

/// Exit code of a finished report.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Passed => EXIT_PASSED,
        Status::Failed => EXIT_FAILED,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

/// Runs the command line `args` (program name first) against the process
/// streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], writing the report to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASSED };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "{message}");
            EXIT_USAGE
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Parse(f) => parse(f, out, err),
        Command::Lint(f) => {
            let lib = load(&f.files)?;
            for w in &lib.warnings {
                let _ = writeln!(err, "{w}");
            }
            let _ = writeln!(
                out,
                "{} component types, {} implementations, {} warnings",
                lib.types.len(),
                lib.impls.len(),
                lib.warnings.len()
            );
            Ok(EXIT_PASSED)
        }
        Command::Verify(t) => {
            let cfg = t.config()?;
            let lib = load(&t.files.files)?;
            let root = root_name(&lib, t)?;
            let system = instantiate(&lib, &root)?;
            let report = verify_all(&system, &cfg);
            emit(&report, t, out)
        }
        Command::Consistency(t) | Command::Realizability(t) => {
            let cfg = t.config()?;
            let lib = load(&t.files.files)?;
            let components = checked_components(&lib, t)?;
            let consistency = matches!(command, Command::Consistency(_));
            let checks: Vec<ObligationResult> = components
                .iter()
                .map(|c| {
                    if consistency {
                        check_component_consistency(&lib, c, t.depth, &cfg)
                    } else {
                        check_component_realizability(&lib, c, t.depth, &cfg)
                    }
                })
                .collect();
            let report = Report {
                root: None,
                layers: Vec::new(),
                checks,
                lints: lib.warnings.clone(),
            };
            emit(&report, t, out)
        }
        Command::DumpTs(t) => {
            let lib = load(&t.files.files)?;
            let layer = target_layer(&lib, t)?;
            let _ = write!(out, "{}", layer.ts.dump());
            Ok(EXIT_PASSED)
        }
        Command::DumpSmt(t) => {
            let lib = load(&t.files.files)?;
            let layer = target_layer(&lib, t)?;
            let obligations = match &t.component {
                Some(_) => vec![consistency_query(layer.clone(), t.depth), realizability_query(layer, t.depth)],
                None => layer_obligations(layer),
            };
            for ob in &obligations {
                let _ = writeln!(out, "{}", dump_smt(ob, t.depth));
            }
            Ok(EXIT_PASSED)
        }
    }
}

fn emit(report: &Report, t: &Target, out: &mut dyn Write) -> Result<i32, String> {
    out.write_all(render_report(report, t.report_format()).as_bytes())
        .map_err(|e| format!("cannot write report: {e}"))?;
    Ok(exit_code(report.status()))
}

fn load(files: &[PathBuf]) -> Result<Library, String> {
    load_system(files).map_err(|e| e.to_string())
}

fn root_name(lib: &Library, t: &Target) -> Result<String, String> {
    match (&t.root, &t.component) {
        (Some(r), _) | (None, Some(r)) => Ok(r.clone()),
        (None, None) => lib.default_root(),
    }
}

/// The component named by `--component` (or `--root`), or every component
/// type of the library.
fn checked_components(lib: &Library, t: &Target) -> Result<Vec<String>, String> {
    match t.component.as_ref().or(t.root.as_ref()) {
        Some(c) if lib.types.contains_key(c) || lib.impls.contains_key(c) => Ok(vec![c.clone()]),
        Some(c) => Err(format!("unknown component '{c}'")),
        None => Ok(lib.types.keys().cloned().collect()),
    }
}

/// The layer of `--component` (contract only) or of the root
/// implementation.
fn target_layer(lib: &Library, t: &Target) -> Result<agv_core::ts::Layer, String> {
    if let Some(c) = &t.component {
        let ty = match lib.impls.get(c) {
            Some(i) => i.type_name.clone(),
            None if lib.types.contains_key(c) => c.clone(),
            None => return Err(format!("unknown component '{c}'")),
        };
        return compile_layer(lib, &ty, None);
    }
    let root = root_name(lib, t)?;
    match lib.impls.get(&root) {
        Some(i) => compile_layer(lib, &i.type_name, Some(&root)),
        None if lib.types.contains_key(&root) => compile_layer(lib, &root, None),
        None => Err(format!("unknown root '{root}'")),
    }
}

/// `.agv` files named by `paths`, with directories expanded in name order.
fn source_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| format!("{}: cannot read: {e}", p.display()))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "agv"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn parse(f: &Files, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let mut failed = false;
    for (i, path) in source_files(&f.files)?.into_iter().enumerate() {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{name}: cannot read: {e}"))?;
        let (file, diags) = parse_file(&text);
        for d in &diags {
            let _ = writeln!(err, "{}", d.clone().in_file(&name));
        }
        failed |= !diags.is_empty();
        if i > 0 {
            let _ = writeln!(out);
        }
        let _ = write!(out, "{}", file_to_string(&file));
    }
    Ok(if failed { EXIT_USAGE } else { EXIT_PASSED })
}
