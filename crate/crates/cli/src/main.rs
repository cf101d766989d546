//! `entcont`: reproducible entanglement-continuity experiments.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 bad input or usage, 3 size cap
//! exceeded, 4 not certified.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use entcont::continuity::{
    ball_scan_with, border_scan_2x2, border_scan_2xn, unit_grid, BallSpec, ExtremaMode, StandardSurrogates,
    CORRIDOR_SLACK,
};
use entcont::eof_search::{eof_upper_general, EofSearch};
use entcont::linalg::{hermitian_eigen, DensityMatrix, PureState, DEFAULT_SIZE_CAP};
use entcont::measures::{self, MeasureKind, MeasureValue};
use entcont::mixing::{tail_mass_scan, verify_mixing_bound_with, MixtureSpec, BOUND_SLACK};
use entcont::protocols::{catalytic_rate, concentration_curve, eta_continuity_scan, log_spaced};
use entcont::state_file::read_state;
use entcont::states::{Isotropic2x3Path, Segment, StatePath, WernerPath};
use entcont::Error;

use output::{cell, emit, json_document, with_suffix, Audit, Table};

#[derive(Parser, Debug)]
#[command(name = "entcont", version, about = "Entanglement measure continuity experiments")]
struct Cli {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest matrix side any command may build.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
    /// Slack added to bound checks (default 1e-9).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Output file (ball-scan: file stem). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasureName {
    EntropyOfEntanglement,
    LogNegativity,
    Concurrence,
    Eof2x2,
    EofUpper,
    EdLower,
    EcUpper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum System {
    #[value(name = "2x2")]
    TwoByTwo,
    #[value(name = "2x3")]
    TwoByThree,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Werner,
    Isotropic,
    Segment,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Sampled,
    Conservative,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one measure on a state file.
    Measure {
        state: PathBuf,
        #[arg(value_enum)]
        measure: MeasureName,
        /// Load the state even if it fails validation.
        #[arg(long)]
        force: bool,
        /// Gradient iterations for eof-upper.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Compare ρ_p^{⊗n} with its binomially truncated mixture.
    MixingVerify {
        rho: PathBuf,
        sigma: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        /// Window half-width (default n^{2/3}).
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Binomial tail mass outside the default window, no matrices.
    TailScan {
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Sample a trace-distance ball and check the continuity corridor.
    BallScan {
        center: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Surface directions used for the mixing family.
        #[arg(long, default_value_t = 4)]
        surface: usize,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        p_points: u64,
        #[arg(long, value_enum, default_value_t = Mode::Sampled)]
        mode: Mode,
    },
    /// Measures along a path that crosses the separable border.
    BorderScan {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, value_enum)]
        family: Family,
        /// Number of evenly spaced parameters on [0, 1].
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        grid: u64,
        #[arg(long, required_if_eq("family", "segment"))]
        from: Option<PathBuf>,
        #[arg(long, required_if_eq("family", "segment"))]
        to: Option<PathBuf>,
        /// Also search an entanglement-of-formation upper bound (2x3 only).
        #[arg(long)]
        eof_budget: Option<usize>,
    },
    /// Pure-state concentration yields for growing n.
    Concentration {
        /// Schmidt weights, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Certified distillation yield of (1 − ε)Φ+ + εξ over an ε grid.
    EtaScan {
        /// Noise state ξ (default: maximally mixed two-qubit state).
        #[arg(long)]
        xi: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Parameters of the catalytic conversion chain.
    Catalytic {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        ec: f64,
        #[arg(long)]
        ed: f64,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SizeCap { .. } => 3,
            Error::BallNotCertified { .. } | Error::NotCertified(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

struct Context {
    audit: Audit,
    cap: usize,
    slack: Option<f64>,
    out: Option<PathBuf>,
    format: Format,
}

impl Context {
    fn write<T: Serialize>(&self, command: &str, result: &T, table: &Table) -> Result<(), Failure> {
        let text = match self.format {
            Format::Csv => table.render(&self.audit),
            Format::Json => json_document(&self.audit, command, result),
        };
        emit(self.out.as_deref(), &text)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Context {
        audit: Audit { invocation: std::env::args().skip(1).collect(), seed: cli.seed },
        cap: cli.cap,
        slack: cli.tolerance,
        out: cli.out.clone(),
        format: cli.format,
    };
    if let Some(t) = ctx.slack {
        if !t.is_finite() || t < 0.0 {
            eprintln!("error: --tolerance must be a non-negative number");
            return ExitCode::from(2);
        }
    }
    match run(&ctx, cli.seed, &cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path, force: bool, cap: usize) -> Result<DensityMatrix, Failure> {
    let rho = read_state(path, force).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if rho.dim() > cap {
        return Err(Error::SizeCap { side: rho.dim(), cap }.into());
    }
    Ok(rho)
}

/// Returns whether every check in the command passed.
fn run(ctx: &Context, seed: u64, command: &Command) -> Result<bool, Failure> {
    match command {
        Command::Measure { state, measure, force, budget } => {
            let rho = load(state, *force, ctx.cap)?;
            let value = evaluate_measure(&rho, *measure, &EofSearch { k: None, budget: *budget, seed })?;
            let mut table = Table::new(&["value", "kind", "method"]);
            table.row(vec![cell(value.value), kind_name(value.kind).into(), value.method.clone()]);
            ctx.write("measure", &value, &table)?;
            Ok(true)
        }
        Command::MixingVerify { rho, sigma, p, n, half_width } => {
            let rho = load(rho, false, ctx.cap)?;
            let sigma = load(sigma, false, ctx.cap)?;
            let spec = MixtureSpec::new(rho, sigma, *p, *n, *half_width)?.size_cap(ctx.cap);
            let report = verify_mixing_bound_with(&spec, ctx.slack.unwrap_or(BOUND_SLACK))?;
            let mut table =
                Table::new(&["n", "p", "window_lo", "window_hi", "trace_distance", "tail_mass", "slack", "pass"]);
            table.row(vec![
                cell(report.n),
                cell(report.p),
                cell(report.window.lo),
                cell(report.window.hi),
                cell(report.trace_distance),
                cell(report.tail_mass),
                cell(report.slack),
                cell(report.pass),
            ]);
            ctx.write("mixing-verify", &report, &table)?;
            Ok(report.pass)
        }
        Command::TailScan { p, n } => {
            let rows = tail_mass_scan(*p, n)?;
            let mut table = Table::new(&["n", "window_lo", "window_hi", "tail_mass", "hoeffding_bound"]);
            for r in &rows {
                table.row(vec![
                    cell(r.n),
                    cell(r.window_lo),
                    cell(r.window_hi),
                    cell(r.tail_mass),
                    cell(r.hoeffding_bound),
                ]);
            }
            ctx.write("tail-scan", &rows, &table)?;
            Ok(rows.iter().all(|r| r.tail_mass <= r.hoeffding_bound))
        }
        Command::BallScan { center, epsilon, samples, surface, p_points, mode } => {
            ball_scan_command(ctx, seed, center, *epsilon, *samples as usize, *surface, *p_points as usize, *mode)
        }
        Command::BorderScan { system, family, grid, from, to, eof_budget } => {
            let path: Box<dyn StatePath> = match family {
                Family::Werner => Box::new(WernerPath),
                Family::Isotropic => Box::new(Isotropic2x3Path),
                Family::Segment => {
                    let from = load(from.as_deref().expect("required by clap"), false, ctx.cap)?;
                    let to = load(to.as_deref().expect("required by clap"), false, ctx.cap)?;
                    from.same_shape(&to)?;
                    Box::new(Segment { from, to })
                }
            };
            let grid = unit_grid(*grid as usize);
            match system {
                System::TwoByTwo => {
                    let rows = border_scan_2x2(path.as_ref(), &grid)?;
                    let mut table = Table::new(&["param", "eof", "log_neg", "ppt_margin"]);
                    for r in &rows {
                        table.row(vec![cell(r.param), cell(r.eof), cell(r.log_neg), cell(r.ppt_margin)]);
                    }
                    ctx.write("border-scan", &rows, &table)?;
                }
                System::TwoByThree => {
                    if path.dims() != (2, 3) {
                        let (a, b) = path.dims();
                        return Err(usage(format!("family yields {a}x{b} states, expected 2x3")));
                    }
                    let search = eof_budget.map(|budget| EofSearch { k: None, budget, seed });
                    let rows = border_scan_2xn(path.as_ref(), &grid, search.as_ref())?;
                    let mut table = Table::new(&["param", "log_neg", "ppt_margin", "eof_upper"]);
                    for r in &rows {
                        let eof = r.eof_upper.map(cell).unwrap_or_default();
                        table.row(vec![cell(r.param), cell(r.log_neg), cell(r.ppt_margin), eof]);
                    }
                    ctx.write("border-scan", &rows, &table)?;
                }
            }
            Ok(true)
        }
        Command::Concentration { lambda, n } => {
            let curve = concentration_curve(lambda, n)?;
            let mut table = Table::new(&["n", "yield_per_copy"]);
            table.note("protocol", &curve.protocol);
            table.note("asymptote", curve.asymptote);
            for pt in &curve.points {
                table.row(vec![cell(pt.n), cell(pt.yield_per_copy)]);
            }
            ctx.write("concentration", &curve, &table)?;
            Ok(true)
        }
        Command::EtaScan { xi, eps_min, eps_max, points } => {
            if *points == 0 || !(*eps_min > 0.0 && eps_min <= eps_max && *eps_max <= 1.0) {
                return Err(usage("need 0 < eps-min <= eps-max <= 1 and at least one point"));
            }
            let xi = match xi {
                Some(path) => load(path, false, ctx.cap)?,
                None => DensityMatrix::maximally_mixed(2, 2),
            };
            let scan = eta_continuity_scan(&xi, &log_spaced(*eps_min, *eps_max, *points))?;
            let mut table = Table::new(&["epsilon", "certified_yield"]);
            table.note("lipschitz", scan.lipschitz);
            for r in &scan.rows {
                table.row(vec![cell(r.epsilon), cell(r.certified_yield)]);
            }
            ctx.write("eta-scan", &scan, &table)?;
            Ok(true)
        }
        Command::Catalytic { delta, ec, ed } => {
            let rate = catalytic_rate(*delta, *ec, *ed)?;
            let mut table = Table::new(&["delta", "ec_sigma", "ed_rho_p", "p", "k", "factor"]);
            table.row(vec![
                cell(rate.delta),
                cell(rate.ec_sigma),
                cell(rate.ed_rho_p),
                cell(rate.p),
                cell(rate.k),
                cell(rate.factor),
            ]);
            ctx.write("catalytic", &rate, &table)?;
            Ok(true)
        }
    }
}

fn kind_name(kind: MeasureKind) -> &'static str {
    match kind {
        MeasureKind::Exact => "exact",
        MeasureKind::LowerBound => "lower_bound",
        MeasureKind::UpperBound => "upper_bound",
    }
}

fn evaluate_measure(rho: &DensityMatrix, name: MeasureName, search: &EofSearch) -> Result<MeasureValue, Failure> {
    let two_qubits = || {
        if (rho.dim_a(), rho.dim_b()) == (2, 2) {
            Ok(())
        } else {
            Err(usage(format!("measure needs a 2x2 state, got {}x{}", rho.dim_a(), rho.dim_b())))
        }
    };
    Ok(match name {
        MeasureName::EntropyOfEntanglement => measures::entropy_of_entanglement(&as_pure(rho)?),
        MeasureName::LogNegativity => measures::log_negativity(rho),
        MeasureName::Concurrence => {
            two_qubits()?;
            MeasureValue::new(measures::concurrence_2x2(rho)?, MeasureKind::Exact, "wootters_concurrence")
        }
        MeasureName::Eof2x2 => {
            two_qubits()?;
            measures::eof_2x2(rho)?
        }
        MeasureName::EofUpper => eof_upper_general(rho, search)?,
        MeasureName::EdLower => measures::ed_lower(rho),
        MeasureName::EcUpper => measures::ec_upper_with(rho, search),
    })
}

/// The state vector of a rank-one density matrix.
fn as_pure(rho: &DensityMatrix) -> Result<PureState, Failure> {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let top = *values.last().expect("non-empty");
    if (top - 1.0).abs() > 1e-9 {
        return Err(usage(format!("entropy of entanglement needs a pure state (largest eigenvalue {top})")));
    }
    Ok(PureState::normalized(rho.dim_a(), rho.dim_b(), vectors.column(values.len() - 1).into_owned())?)
}

#[allow(clippy::too_many_arguments)]
fn ball_scan_command(
    ctx: &Context,
    seed: u64,
    center: &Path,
    epsilon: f64,
    samples: usize,
    surface: usize,
    p_points: usize,
    mode: Mode,
) -> Result<bool, Failure> {
    let center = load(center, false, ctx.cap)?;
    let mut spec = BallSpec::new(center, epsilon, samples, seed)?;
    spec.surface_count = surface;
    let mode = match mode {
        Mode::Sampled => ExtremaMode::Sampled,
        Mode::Conservative => ExtremaMode::Conservative,
    };
    let surrogates = StandardSurrogates { eof_search: EofSearch { seed, ..Default::default() } };
    let report = ball_scan_with(&surrogates, &spec, p_points, mode, ctx.slack.unwrap_or(CORRIDOR_SLACK))?;

    let c = &report.constants;
    let mut corridor = Table::new(&[
        "surface_index",
        "p",
        "kappa",
        "distance",
        "forth_lhs",
        "forth_rhs",
        "back_lhs",
        "back_rhs",
        "back_state_exists",
        "lipschitz_bound",
        "pass",
    ]);
    corridor.note("epsilon", report.epsilon);
    corridor.note("mode", format!("{:?}", c.mode).to_lowercase());
    corridor.note("ed_min_lower", format!("{} ({})", c.ed_min_lower, c.ed_method));
    corridor.note("ec_max_upper", format!("{} ({})", c.ec_max_upper, c.ec_method));
    corridor.note("r", c.r);
    corridor.note("delta", c.delta);
    corridor.note("reversible", c.reversible);
    for (i, report) in report.corridors.iter().enumerate() {
        for row in &report.rows {
            corridor.row(vec![
                cell(i),
                cell(row.p),
                cell(row.kappa),
                cell(row.distance),
                cell(row.forth_lhs),
                cell(row.forth_rhs),
                cell(row.back_lhs),
                cell(row.back_rhs),
                cell(row.back_state_exists),
                cell(row.lipschitz_bound),
                cell(row.forth_pass && row.back_pass),
            ]);
        }
    }
    let mut samples_table = Table::new(&["index", "on_surface", "distance", "ed_lower", "ec_upper", "lipschitz_bound"]);
    for s in &report.samples {
        samples_table.row(vec![
            cell(s.index),
            cell(s.on_surface),
            cell(s.distance),
            cell(s.ed_lower),
            cell(s.ec_upper),
            cell(s.lipschitz_bound),
        ]);
    }

    match &ctx.out {
        // a stem: the corridor table, the per-sample table and the full report
        Some(stem) => {
            output::write_atomic(&with_suffix(stem, ".csv"), &corridor.render(&ctx.audit))?;
            output::write_atomic(&with_suffix(stem, ".samples.csv"), &samples_table.render(&ctx.audit))?;
            output::write_atomic(&with_suffix(stem, ".json"), &json_document(&ctx.audit, "ball-scan", &report))?;
        }
        None => {
            let text = match ctx.format {
                Format::Csv => corridor.render(&ctx.audit),
                Format::Json => json_document(&ctx.audit, "ball-scan", &report),
            };
            emit(None, &text)?;
        }
    }
    Ok(report.pass)
}
