//! `fahp`: evaluate fuzzy AHP projects from the command line.

mod args;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use fahp_core::hierarchy::{self, consistency_reports, HierarchyError, ValidationReport};
use fahp_core::project::{load_project_path, ProjectError, ProjectFile};
use fahp_core::report::{export_csv, export_sensitivity_csv, render_report};
use fahp_core::sensitivity::{run_scenarios, SensitivityError};
use fahp_core::{DecisionResult, EvalOptions, Execution, Hierarchy};
use thiserror::Error;

use args::{Cli, Command, Common, ExportFormat, Format};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("invalid project:\n{0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ProjectError> for CliError {
    fn from(e: ProjectError) -> Self {
        match e {
            ProjectError::Io { .. } => CliError::Io(e.to_string()),
            ProjectError::Invalid(r) => CliError::Invalid(r),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<HierarchyError> for CliError {
    fn from(e: HierarchyError) -> Self {
        match e {
            HierarchyError::Inconsistent { .. } => CliError::Failed(format!(
                "{e}\nrevise the matrix (see `fahp validate`) or pass --override"
            )),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<SensitivityError> for CliError {
    fn from(e: SensitivityError) -> Self {
        match e {
            SensitivityError::InvalidFactor(_) => CliError::Usage(e.to_string()),
            SensitivityError::Hierarchy(h) => h.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// A loaded project with command-line overrides applied.
struct Loaded {
    project: ProjectFile,
    hierarchy: Hierarchy,
    opts: EvalOptions,
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    if let Some(t) = common.threshold {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!(
                "--threshold must be positive, got {t}"
            )));
        }
    }
    let mut project = load_project_path(&common.project)?;
    if let Some(m) = common.method {
        project.settings.method = m.into();
    }
    if let Some(d) = common.defuzz {
        project.settings.defuzz = d.into();
    }
    if let Some(t) = common.threshold {
        project.settings.cr_threshold = t;
    }
    let hierarchy = project.to_hierarchy().map_err(CliError::Invalid)?;
    let exec = if common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let opts = project
        .settings
        .eval_options(common.allow_inconsistent, exec);
    Ok(Loaded {
        project,
        hierarchy,
        opts,
    })
}

fn evaluate(l: &Loaded) -> Result<DecisionResult, CliError> {
    Ok(hierarchy::evaluate(&l.hierarchy, &l.opts)?)
}

fn factor(l: &Loaded, flag: Option<f64>) -> Result<f64, CliError> {
    let f = flag.unwrap_or(l.project.settings.sensitivity_factor);
    if f.is_finite() && f > 0.0 {
        Ok(f)
    } else {
        Err(CliError::Usage(format!(
            "--factor must be positive, got {f}"
        )))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { common, format } => {
            let l = match load(&common) {
                Ok(l) => l,
                Err(CliError::Invalid(report)) => {
                    write_out(None, &output::validation(&report, None, format))?;
                    return Err(CliError::Failed("project is not valid".into()));
                }
                Err(e) => return Err(e),
            };
            let s = &l.project.settings;
            let reports = consistency_reports(&l.hierarchy, s.defuzz, s.cr_threshold, l.opts.exec)?;
            write_out(
                None,
                &output::validation(&Default::default(), Some(&reports), format),
            )?;
            let failing: Vec<&str> = reports
                .iter()
                .filter(|(_, r)| !r.acceptable)
                .map(|(n, _)| n.as_str())
                .collect();
            if failing.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "consistency ratio at or above {} for: {}",
                    s.cr_threshold,
                    failing.join(", ")
                )))
            }
        }
        Command::Weights {
            common,
            node,
            format,
        } => {
            let l = load(&common)?;
            let r = evaluate(&l)?;
            if let Some(n) = &node {
                if !r.local_weights.contains_key(n) {
                    return Err(CliError::Usage(format!("unknown node {n:?}")));
                }
            }
            write_out(
                None,
                &output::weights(&l.hierarchy, &r, node.as_deref(), format),
            )
        }
        Command::Rank { common, format } => {
            let l = load(&common)?;
            let r = evaluate(&l)?;
            write_out(None, &output::ranking(&l.hierarchy, &r, format))
        }
        Command::Sensitivity {
            common,
            factor: f,
            format,
        } => {
            let l = load(&common)?;
            let f = factor(&l, f)?;
            let r = evaluate(&l)?;
            let rep = run_scenarios(&l.hierarchy, &r, f, l.opts.exec)?;
            write_out(None, &output::sensitivity(&rep, format))
        }
        Command::Report {
            common,
            factor: f,
            output,
        } => {
            let l = load(&common)?;
            let f = factor(&l, f)?;
            let r = evaluate(&l)?;
            let s = &l.project.settings;
            // An infeasible factor drops the section rather than the report.
            let rep = match run_scenarios(&l.hierarchy, &r, f, l.opts.exec) {
                Ok(rep) => Some(rep),
                Err(SensitivityError::Infeasible { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let cr = consistency_reports(&l.hierarchy, s.defuzz, s.cr_threshold, l.opts.exec)?;
            write_out(
                output.as_deref(),
                &render_report(&l.hierarchy, &r, rep.as_ref(), &cr),
            )
        }
        Command::Export {
            common,
            factor: f,
            scenarios,
            format,
            output,
        } => {
            let l = load(&common)?;
            let r = evaluate(&l)?;
            let text = if scenarios {
                let f = factor(&l, f)?;
                let rep = run_scenarios(&l.hierarchy, &r, f, l.opts.exec)?;
                match format {
                    ExportFormat::Csv => export_sensitivity_csv(&rep),
                    ExportFormat::Json => output::sensitivity(&rep, Format::Json),
                }
            } else {
                match format {
                    ExportFormat::Csv => export_csv(&r),
                    ExportFormat::Json => output::ranking(&l.hierarchy, &r, Format::Json),
                }
            };
            write_out(output.as_deref(), &text)
        }
        Command::Serve { common, port, host } => serve(&common, &host, port),
    }
}

fn serve(common: &Common, host: &str, port: u16) -> Result<(), CliError> {
    let l = load(common)?;
    let session = fahp_service::Session::new(l.project, Some(PathBuf::from(&common.project)))
        .map_err(|e| CliError::Failed(e.to_string()))?
        .with_execution(l.opts.exec);
    let rt = tokio::runtime::Runtime::new()
        .map_err(|e| CliError::Io(format!("cannot start runtime: {e}")))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::Io(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::Io(e.to_string()))?;
        eprintln!("listening on http://{addr}");
        fahp_service::serve(listener, fahp_service::state(session))
            .await
            .map_err(|e| CliError::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // --help and --version print to stdout and succeed.
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            if !e.render().to_string().contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
