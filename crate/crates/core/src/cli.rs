//! Command-line front end.
//!
//! ```text
//! shockfv run|flag|compare --config <path> --out <dir> [--force]
//! shockfv cases-list
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O error. Configuration is validated in full before the output
//! directory is touched, so a configuration error leaves no artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::cases::{build_case, CaseDefinition, CASE_NAMES, DEFAULT_GRID};
use crate::config::{limiting_label, Settings};
use crate::diagnostics::{
    flagged_by_shock_side, l2_linf_window_report, monotonicity_report, shock_windows, LineProfile,
};
use crate::error::{Error, Result};
use crate::indicator::{indicator_values, mask_from_values};
use crate::output::{
    write_compare, write_field, write_flag_summary, write_line_profile, write_mask, write_report,
    write_residual_history, write_unsteady_log, write_vtk_density, ArtifactHeader, CompareRow,
    FlagSummaryRow, ReportRow,
};
use crate::solver::{run, run_from_first_order, solve_first_order, Limiting, Mode, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "shockfv",
    version,
    about = "2D Euler finite-volume solver with troubled-cell limiting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one case and write history, field, mask and report files.
    Run(RunArgs),
    /// Solve first order once and write one mask per threshold in `k_list`.
    Flag(RunArgs),
    /// Run every setting in `compare` from a shared first-order solution.
    Compare(RunArgs),
    /// List the built-in cases.
    CasesList,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Write into an existing non-empty directory.
    #[arg(long)]
    pub force: bool,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Window { .. } => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::CasesList => {
            print!("{}", cases_listing()?);
            Ok(())
        }
        Command::Run(a) => with_prepared(a, cmd_run, |_| Ok(())),
        Command::Flag(a) => with_prepared(a, cmd_flag, |s| s.flag_thresholds().map(|_| ())),
        Command::Compare(a) => with_prepared(a, cmd_compare, |s| {
            s.require_compare()?;
            if s.mode != Mode::Steady {
                return Err(Error::Config("compare needs a steady case".into()));
            }
            Ok(())
        }),
    }
}

/// One line per built-in case at the default grid.
pub fn cases_listing() -> Result<String> {
    let mut s = String::new();
    for name in CASE_NAMES {
        let case: CaseDefinition<f64> = build_case(name, DEFAULT_GRID, DEFAULT_GRID, None)?;
        s += &case.summary();
        s.push('\n');
    }
    Ok(s)
}

/// Loads and validates everything, then prepares the output directory and
/// runs `body`.
fn with_prepared(
    args: &RunArgs,
    body: impl FnOnce(&Settings, &CaseDefinition<f64>, &Path) -> Result<()>,
    extra_checks: impl FnOnce(&Settings) -> Result<()>,
) -> Result<()> {
    let settings = Settings::from_file(&args.config)?;
    extra_checks(&settings)?;
    let case = settings.build_case()?;
    check_windows(&settings, &case)?;
    prepare_out_dir(&args.out, args.force)?;
    let t = Instant::now();
    body(&settings, &case, &args.out)?;
    println!("done in {:.2} s", t.elapsed().as_secs_f64());
    Ok(())
}

/// The shock windows must fit on the sampling row; checked on the exact
/// solution before any solve.
fn check_windows(settings: &Settings, case: &CaseDefinition<f64>) -> Result<()> {
    if case.exact.is_none() {
        return Ok(());
    }
    let exact_field = case.initial_field();
    let profile = LineProfile::from_case(case, &exact_field)?;
    shock_windows(&profile, settings.window)
        .map_err(|e| Error::Config(format!("window = {}: {e}", settings.window)))?;
    Ok(())
}

fn prepare_out_dir(out: &Path, force: bool) -> Result<()> {
    if out.exists() {
        if !out.is_dir() {
            return Err(Error::Config(format!(
                "{} exists and is not a directory",
                out.display()
            )));
        }
        let non_empty = std::fs::read_dir(out)?.next().is_some();
        if non_empty && !force {
            return Err(Error::Config(format!(
                "{} is not empty; pass --force to write into it",
                out.display()
            )));
        }
    } else {
        std::fs::create_dir_all(out)?;
    }
    Ok(())
}

fn header(settings: &Settings, limiting: &str, k: Option<f64>) -> ArtifactHeader {
    ArtifactHeader {
        config_hash: settings.hash.clone(),
        case: settings.case.clone(),
        mode: settings.mode_name().to_string(),
        limiting: limiting.to_string(),
        k,
        nx: settings.nx,
        ny: settings.ny,
    }
}

/// File-name friendly form of a limiting label.
fn file_tag(l: &Limiting<f64>) -> String {
    match l {
        Limiting::Restricted(k) => format!("restricted_K{k}"),
        other => other.name().to_string(),
    }
}

fn cmd_run(settings: &Settings, case: &CaseDefinition<f64>, out: &Path) -> Result<()> {
    let config = settings.run_config(settings.limiting, settings.mode);
    let result = run(&config, case)?;
    let hdr = header(
        settings,
        &limiting_label(&settings.limiting),
        Some(result.k_threshold),
    );
    write_residual_history(&out.join("residual_history.csv"), &hdr, &result.history)?;
    write_field(&out.join("field.csv"), &hdr, &result.field, &case.gas)?;
    write_mask(&out.join("mask.csv"), &hdr, &result.mask, &result.indicator)?;
    let rows = match report_row(settings, case, &result, settings.mode_name())? {
        Some((row, profile)) => {
            if settings.line_profile {
                write_line_profile(&out.join("line_profile.csv"), &hdr, &profile)?;
            }
            vec![row]
        }
        None => Vec::new(),
    };
    write_report(&out.join("report.csv"), &hdr, &rows)?;
    if settings.vtk {
        write_vtk_density(&out.join("density.vtk"), &hdr, &result.field)?;
    }
    if settings.mode == Mode::Unsteady {
        write_unsteady_log(
            &out.join("unsteady_steps.csv"),
            &hdr,
            &result.unsteady_steps,
        )?;
    }
    print_run_summary(&limiting_label(&settings.limiting), &result);
    Ok(())
}

fn print_run_summary(label: &str, r: &RunOutput<f64>) {
    println!(
        "{label}: {} iterations, final RN {:e}, converged {}, flagged cells {}",
        r.history.iterations_used(),
        r.history.last().unwrap_or(f64::NAN),
        r.history.converged,
        r.mask.count()
    );
}

fn report_row(
    settings: &Settings,
    case: &CaseDefinition<f64>,
    result: &RunOutput<f64>,
    mode_label: &str,
) -> Result<Option<(ReportRow<f64>, LineProfile<f64>)>> {
    if case.exact.is_none() {
        return Ok(None);
    }
    let profile = LineProfile::from_case(case, &result.field)?;
    let report = monotonicity_report(&profile, settings.window)?;
    let (window_l2, _) = l2_linf_window_report(&profile, settings.window)?;
    Ok(Some((
        ReportRow {
            case: case.name.clone(),
            mode: mode_label.to_string(),
            k: settings.limiting.threshold(),
            report,
            window_l2,
        },
        profile,
    )))
}

fn cmd_flag(settings: &Settings, case: &CaseDefinition<f64>, out: &Path) -> Result<()> {
    let ks = settings.flag_thresholds()?;
    let field = match settings.mode {
        Mode::Steady => {
            solve_first_order(
                &settings.run_config(Limiting::FirstOrder, Mode::Steady),
                case,
            )?
            .field
        }
        Mode::Unsteady => {
            run(
                &settings.run_config(Limiting::FirstOrder, Mode::Unsteady),
                case,
            )?
            .field
        }
    };
    let (nx, ny) = (case.mesh.nx(), case.mesh.ny());
    let values = indicator_values(&field, settings.formula)?;
    let mut rows = Vec::new();
    for &k in &ks {
        let mask = mask_from_values(nx, ny, &values, k);
        let hdr = header(settings, "first_order", Some(k));
        write_mask(&out.join(format!("mask_K{k}.csv")), &hdr, &mask, &values)?;
        let sides = flagged_by_shock_side(case, &mask);
        println!(
            "K = {k}: {} flagged{}",
            mask.count(),
            sides.map_or(String::new(), |(a, b)| format!(
                " ({a} pre-shock, {b} post-shock)"
            ))
        );
        rows.push(FlagSummaryRow {
            k,
            flagged: mask.count(),
            sides,
        });
    }
    write_flag_summary(
        &out.join("flag_summary.csv"),
        &header(settings, "first_order", None),
        &rows,
    )?;
    Ok(())
}

fn cmd_compare(settings: &Settings, case: &CaseDefinition<f64>, out: &Path) -> Result<()> {
    let first = solve_first_order(
        &settings.run_config(Limiting::FirstOrder, Mode::Steady),
        case,
    )?;
    let mut compare_rows = Vec::new();
    let mut report_rows = Vec::new();
    for entry in &settings.compare {
        let config = settings.run_config(entry.limiting, Mode::Steady);
        let result = run_from_first_order(&config, case, &first)?;
        let label = entry.label();
        let tag = file_tag(&entry.limiting);
        let hdr = header(settings, &label, Some(result.k_threshold));
        write_residual_history(
            &out.join(format!("residual_history_{tag}.csv")),
            &hdr,
            &result.history,
        )?;
        write_field(
            &out.join(format!("field_{tag}.csv")),
            &hdr,
            &result.field,
            &case.gas,
        )?;
        write_mask(
            &out.join(format!("mask_{tag}.csv")),
            &hdr,
            &result.mask,
            &result.indicator,
        )?;
        let profile = LineProfile::from_case(case, &result.field)?;
        write_line_profile(&out.join(format!("line_profile_{tag}.csv")), &hdr, &profile)?;
        if settings.vtk {
            write_vtk_density(&out.join(format!("density_{tag}.vtk")), &hdr, &result.field)?;
        }
        let report = monotonicity_report(&profile, settings.window)?;
        let (window_l2, window_linf) = l2_linf_window_report(&profile, settings.window)?;
        print_run_summary(&label, &result);
        compare_rows.push(CompareRow {
            setting: label.clone(),
            k: entry.limiting.threshold(),
            flagged_cells: result.mask.count(),
            iterations: result.history.iterations_used(),
            final_rn: result.history.last().unwrap_or(f64::NAN),
            min_rn: result.history.min().unwrap_or(f64::NAN),
            converged: result.history.converged,
            stalled: result.history.stalled,
            window_l2,
            window_linf,
            report,
        });
        report_rows.push(ReportRow {
            case: case.name.clone(),
            mode: label,
            k: entry.limiting.threshold(),
            report,
            window_l2,
        });
    }
    let hdr = header(settings, "compare", None);
    write_compare(&out.join("compare.csv"), &hdr, &compare_rows)?;
    write_report(&out.join("report.csv"), &hdr, &report_rows)?;
    Ok(())
}
