use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chern_gap::cech::{self, LevelCohomology};
use chern_gap::invariants::{
    self, InvariantError, InvariantReport, SweepConfig, SweepOutcome, SweepSummary, EXIT_BOUNDS,
    EXIT_INPUT, EXIT_OK,
};
use chern_gap::laurent::BundleData;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Local Chern-class invariants of rank-2 bundles on the blown-up plane.
#[derive(Parser, Debug)]
#[command(name = "chern-gap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute l(Q), l(R¹) and the gap for one transition polynomial.
    Compute {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the pipeline over seeded random polynomials in the normal-form window.
    Sweep {
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        coeff_min: i64,
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        coeff_max: i64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the h⁰/h¹ tower over the infinitesimal neighbourhoods.
    Profile {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Highest level; defaults to 2j + 2 + u-degree of p.
        #[arg(long)]
        levels: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include per-stage timings in JSON output.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Invariant(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
        Err(Failure::Io(e)) => {
            eprintln!("error[Io]: {e}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code as u8)
}

enum Failure {
    Invariant(InvariantError),
    Io(io::Error),
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        Self::Invariant(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Compute { j, p, output } => {
            let report = invariants::compute_text(j, &p)?;
            let report = strip(report, output.timings);
            let text = match output.format {
                Format::Json => pretty(&report),
                Format::Csv => csv_text(std::slice::from_ref(&report)),
                Format::Table => table_text(std::slice::from_ref(&report)),
            };
            emit(&output, &text)?;
            Ok(if report.bounds_ok {
                EXIT_OK
            } else {
                EXIT_BOUNDS
            })
        }
        Command::Sweep {
            j,
            samples,
            seed,
            coeff_min,
            coeff_max,
            density,
            jobs,
            output,
        } => {
            let cfg = SweepConfig {
                j,
                samples,
                coeff_min,
                coeff_max,
                seed,
                density,
            };
            let mut outcome = invariants::sweep(&cfg, jobs)?;
            outcome.reports = outcome
                .reports
                .into_iter()
                .map(|r| strip(r, output.timings))
                .collect();
            let text = match output.format {
                Format::Json => sweep_json(&cfg, &outcome),
                Format::Csv => csv_text(&outcome.reports),
                Format::Table => table_text(&outcome.reports),
            };
            emit(&output, &text)?;
            if let Some((index, e)) = outcome.failure {
                eprintln!("error[{}]: sample {index}: {e}", e.code());
                return Ok(e.exit_code());
            }
            let ok = outcome.reports.iter().all(|r| r.bounds_ok);
            Ok(if ok { EXIT_OK } else { EXIT_BOUNDS })
        }
        Command::Profile {
            j,
            p,
            levels,
            output,
        } => {
            let poly = invariants::parse_p(&p)?;
            let bundle = BundleData::new(j, poly).map_err(InvariantError::from)?;
            let top = levels.unwrap_or(2 * j + 2 + bundle.p().u_degree());
            let profile = cech::cohomology_profile(&bundle, top).map_err(InvariantError::from)?;
            let text = match output.format {
                Format::Json => pretty(&ProfileDocument {
                    j,
                    p: bundle.p().to_string(),
                    levels: &profile,
                }),
                Format::Csv => profile_csv(&profile),
                Format::Table => profile_table(&profile),
            };
            emit(&output, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn strip(report: InvariantReport, keep_timings: bool) -> InvariantReport {
    if keep_timings {
        report
    } else {
        report.without_timings()
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ProfileDocument<'a> {
    j: u32,
    p: String,
    levels: &'a [LevelCohomology],
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    config: &'a SweepConfig,
    reports: &'a [InvariantReport],
    summary: SweepSummary,
    failure: Option<FailureDocument>,
}

#[derive(Serialize)]
struct FailureDocument {
    index: usize,
    code: &'static str,
    message: String,
}

fn sweep_json(cfg: &SweepConfig, outcome: &SweepOutcome) -> String {
    pretty(&SweepDocument {
        config: cfg,
        reports: &outcome.reports,
        summary: outcome.summary(),
        failure: outcome.failure.as_ref().map(|(index, e)| FailureDocument {
            index: *index,
            code: e.code(),
            message: e.to_string(),
        }),
    })
}

fn csv_text(reports: &[InvariantReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "p", "lQ", "lR1", "gap", "bounds_ok"])
        .expect("in-memory write");
    for r in reports {
        w.write_record([
            r.j.to_string(),
            r.p.clone(),
            r.l_q.to_string(),
            r.l_r1.to_string(),
            r.gap.to_string(),
            r.bounds_ok.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn table_text(reports: &[InvariantReport]) -> String {
    let header = ["j", "p", "lQ", "lR1", "gap", "bounds", "window", "N", "m"];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.j.to_string(),
                r.p.clone(),
                r.l_q.to_string(),
                r.l_r1.to_string(),
                r.gap.to_string(),
                if r.bounds_ok { "ok" } else { "VIOLATED" }.to_string(),
                format!(
                    "[{}, {}]",
                    r.certificates.cech_window[0], r.certificates.cech_window[1]
                ),
                r.certificates.sections_n.to_string(),
                r.certificates.colength_m.to_string(),
            ]
        })
        .collect();
    render_table(&header, &rows)
}

fn profile_csv(profile: &[LevelCohomology]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "h0",
        "h1",
        "ker_restriction",
        "image",
        "window_lo",
        "window_hi",
    ])
    .expect("in-memory write");
    for l in profile {
        w.write_record([
            l.n.to_string(),
            l.h0.to_string(),
            l.h1.to_string(),
            opt(l.ker_restriction_dim),
            opt(l.image_dim),
            l.window.lo.to_string(),
            l.window.hi.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn profile_table(profile: &[LevelCohomology]) -> String {
    let header = ["n", "h0", "h1", "ker", "image", "window"];
    let rows: Vec<Vec<String>> = profile
        .iter()
        .map(|l| {
            vec![
                l.n.to_string(),
                l.h0.to_string(),
                l.h1.to_string(),
                opt(l.ker_restriction_dim),
                opt(l.image_dim),
                format!("[{}, {}]", l.window.lo, l.window.hi),
            ]
        })
        .collect();
    render_table(&header, &rows)
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out += &line(rule.iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn emit(output: &OutputArgs, text: &str) -> io::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
