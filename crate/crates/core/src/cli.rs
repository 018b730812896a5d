//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE`, a TOML file whose keys are the
//! long flag names (`t-final = 0.1`, `g-pairing = "main"`, ...). Flags given
//! on the command line override the file. Exit codes: 0 on success, 2 for
//! invalid input, 3 when the numerics fail.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::{
    convergence_order, dt_study, h_study, report_rows, run_experiment, run_method, test1_mesh_sizes,
    test1_time_steps, write_report_csv, write_report_json, write_solution_csv, ExperimentPreset, Method, MethodOptions,
    PresetId, ReferenceKind, StudyPoint,
};
use crate::mesh_fem::{DirichletBC, InitialCondition, Mesh1D, NodalField, Problem, ProjectionRule, Source, TimeGrid, VelocityField};
use crate::offline_table::{generate_table, load_table, save_table, Interpolation, KernelTable, TableGrid, TableProvider, FORMAT_VERSION};
use crate::spectral_kernels::{Family, TruncationPolicy};
use crate::vms_feasible::{DirectProvider, GPairing, KernelProvider};
use crate::vms_full::InitialSubgrid;
use crate::{Result, SvmsError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "svms", version, about = "Spectral VMS solvers for 1D transient advection-diffusion")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate and save an offline kernel table.
    Offline(OfflineArgs),
    /// Solve one problem with one method.
    Solve(SolveArgs),
    /// Run every method of a preset and report the errors.
    Compare(CompareArgs),
    /// Mesh- and time-refinement study of Test 1.
    Convergence(ConvergenceArgs),
    /// Print the header of a table file.
    TableInfo(TableInfoArgs),
}

macro_rules! merge_config {
    ($args:ident, $cfg:ident: $($field:ident),+) => {
        $( if $args.$field.is_none() { $args.$field = $cfg.$field.take(); } )+
    };
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| SvmsError::invalid(format!("config {}: {e}", path.display())))
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct OfflineArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Grid step Δ.
    #[arg(long)]
    delta: Option<f64>,
    /// Points per axis M.
    #[arg(long)]
    m: Option<usize>,
    /// Series cut-off ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Largest mode index.
    #[arg(long)]
    jmax: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SolveArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// galerkin | spectral-full | spectral-feasible | stab-1d | stab-codina | stab-hauke | stab-franca
    #[arg(long)]
    method: Option<String>,
    /// Advection velocity.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Diffusion coefficient.
    #[arg(long)]
    mu: Option<f64>,
    /// Element size on (0, 1).
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, conflicts_with = "t_final")]
    steps: Option<usize>,
    #[arg(long)]
    t_final: Option<f64>,
    /// hat | exp | file
    #[arg(long)]
    ic: Option<String>,
    /// Nodal initial values (one number per node, separated by whitespace or commas).
    #[arg(long)]
    ic_file: Option<PathBuf>,
    /// homogeneous | test1
    #[arg(long)]
    bc: Option<String>,
    /// Spectral truncation J of the full method.
    #[arg(long)]
    modes: Option<usize>,
    /// Project u₀ − I_h u₀ onto the modes (full method).
    #[arg(long)]
    project_ic: Option<bool>,
    /// direct | table
    #[arg(long)]
    provider: Option<String>,
    #[arg(long)]
    table: Option<PathBuf>,
    /// plain | beta1-scaled
    #[arg(long)]
    interpolation: Option<String>,
    /// main | appendix
    #[arg(long)]
    g_pairing: Option<String>,
    #[arg(long)]
    franca_pbar: Option<f64>,
    /// Solution CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct CompareArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Error report CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// All solution histories as CSV.
    #[arg(long)]
    solutions: Option<PathBuf>,
    #[arg(long)]
    provider: Option<String>,
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    interpolation: Option<String>,
    #[arg(long)]
    g_pairing: Option<String>,
    #[arg(long)]
    franca_pbar: Option<f64>,
    /// Refinement factor of the Galerkin reference (default 64).
    #[arg(long)]
    reference_refinement: Option<usize>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ConvergenceArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// spectral-full (default) or any other method id.
    #[arg(long)]
    method: Option<String>,
    /// Study CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct TableInfoArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    table: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default()).filter_level(level).try_init();
    let out = match cli.command {
        Command::Offline(a) => offline(a),
        Command::Solve(a) => solve(a),
        Command::Compare(a) => compare(a),
        Command::Convergence(a) => convergence(a),
        Command::TableInfo(a) => table_info(a),
    };
    match out {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse<T: FromStr<Err = SvmsError>>(value: Option<&str>, default: &str) -> Result<T> {
    value.unwrap_or(default).parse()
}

fn interpolation(value: Option<&str>) -> Result<Interpolation> {
    match value.unwrap_or("beta1-scaled") {
        "plain" => Ok(Interpolation::Plain),
        "beta1-scaled" => Ok(Interpolation::Beta1Scaled),
        other => Err(SvmsError::invalid(format!("unknown interpolation `{other}` (plain|beta1-scaled)"))),
    }
}

/// Kernel provider chosen on the command line; owns a loaded table.
enum ProviderChoice {
    Direct(DirectProvider),
    Table(KernelTable, Interpolation),
}

impl ProviderChoice {
    fn new(kind: Option<&str>, table: Option<&Path>, interp: Option<&str>) -> Result<Self> {
        match kind.unwrap_or("direct") {
            "direct" => Ok(ProviderChoice::Direct(DirectProvider::default())),
            "table" => {
                let path = table.ok_or_else(|| SvmsError::invalid("--provider table needs --table PATH"))?;
                Ok(ProviderChoice::Table(load_table(path)?, interpolation(interp)?))
            }
            other => Err(SvmsError::invalid(format!("unknown provider `{other}` (direct|table)"))),
        }
    }

    fn with<R>(&self, f: impl FnOnce(&dyn KernelProvider) -> Result<R>) -> Result<R> {
        match self {
            ProviderChoice::Direct(d) => f(d),
            ProviderChoice::Table(t, mode) => {
                let p = TableProvider::new(t, *mode);
                let r = f(&p)?;
                if p.clamped_lookups() > 0 {
                    log::warn!("{} kernel lookups were outside the table and extrapolated", p.clamped_lookups());
                }
                Ok(r)
            }
        }
    }
}

fn offline(mut args: OfflineArgs) -> Result<()> {
    let mut cfg: OfflineArgs = read_config(args.config.as_deref())?;
    merge_config!(args, cfg: delta, m, epsilon, jmax, out);
    let defaults = TableGrid::default();
    let grid = TableGrid::new(args.delta.unwrap_or(defaults.delta), args.m.unwrap_or(defaults.m))?;
    let base = TruncationPolicy::default();
    let policy = TruncationPolicy::new(args.epsilon.unwrap_or(base.epsilon), args.jmax.unwrap_or(base.j_max));
    if !(policy.epsilon >= 0.0) || policy.j_max == 0 {
        return Err(SvmsError::invalid("need epsilon >= 0 and jmax >= 1"));
    }
    let out = args.out.ok_or_else(|| SvmsError::invalid("offline needs --out PATH"))?;
    let table = generate_table(grid, &policy)?;
    save_table(&table, &out)?;
    println!(
        "wrote {}: delta = {}, M = {}, {} cells, {} reached jmax",
        out.display(),
        grid.delta,
        grid.m,
        grid.n_cells(),
        table.overflow_cells().len()
    );
    Ok(())
}

fn read_nodal_file(path: &Path) -> Result<NodalField> {
    let text = std::fs::read_to_string(path)?;
    let values = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| SvmsError::invalid(format!("{}: `{s}`: {e}", path.display()))))
        .collect::<Result<Vec<_>>>()?;
    Ok(NodalField::new(values))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| SvmsError::invalid(format!("solve needs --{flag}")))
}

fn solve(mut args: SolveArgs) -> Result<()> {
    let mut cfg: SolveArgs = read_config(args.config.as_deref())?;
    merge_config!(args, cfg: method, a, mu, h, dt, steps, t_final, ic, ic_file, bc, modes, project_ic, provider, table,
        interpolation, g_pairing, franca_pbar, out);
    if args.steps.is_some() && args.t_final.is_some() {
        return Err(SvmsError::invalid("give either steps or t-final, not both"));
    }
    let method: Method = required(args.method.as_deref(), "method")?.parse()?;
    let (a, mu, h, dt) = (
        required(args.a, "a")?,
        required(args.mu, "mu")?,
        required(args.h, "h")?,
        required(args.dt, "dt")?,
    );
    if !(dt > 0.0) || !a.is_finite() {
        return Err(SvmsError::invalid("need dt > 0 and a finite a"));
    }
    let steps = match (args.steps, args.t_final) {
        (Some(n), _) => n,
        (None, Some(t)) => {
            let n = (t / dt).round();
            if !(n >= 1.0) || (n * dt - t).abs() > 1e-9 * t.abs() {
                return Err(SvmsError::invalid(format!("t-final {t} is not a whole number of steps of {dt}")));
            }
            n as usize
        }
        (None, None) => return Err(SvmsError::invalid("solve needs --steps or --t-final")),
    };
    let mesh = Mesh1D::with_step(0.0, 1.0, h)?;
    if (mesh.h(0) - h).abs() > 1e-9 * h {
        return Err(SvmsError::invalid(format!("h = {h} does not divide (0, 1)")));
    }
    let initial = match args.ic.as_deref().unwrap_or("hat") {
        "hat" => InitialCondition::Hat,
        "exp" => InitialCondition::Exponential,
        "file" => InitialCondition::Nodal(read_nodal_file(&required(args.ic_file, "ic-file")?)?),
        other => return Err(SvmsError::invalid(format!("unknown ic `{other}` (hat|exp|file)"))),
    };
    let bc = match args.bc.as_deref().unwrap_or("homogeneous") {
        "homogeneous" => DirichletBC::homogeneous(),
        "test1" => DirichletBC::exponential(a, mu),
        other => return Err(SvmsError::invalid(format!("unknown bc `{other}` (homogeneous|test1)"))),
    };
    let problem = Problem {
        mesh,
        mu,
        velocity: VelocityField::Constant(a),
        projection: ProjectionRule::Midpoint,
        source: Source::Zero,
        bc,
        time: TimeGrid::from_step(dt, steps)?,
        initial,
    };
    problem.validate()?;
    let provider = ProviderChoice::new(args.provider.as_deref(), args.table.as_deref(), args.interpolation.as_deref())?;
    let g_pairing: GPairing = parse(args.g_pairing.as_deref(), "appendix")?;
    let history = provider.with(|p| {
        let opts = MethodOptions {
            modes: args.modes.unwrap_or(10),
            initial_subgrid: if args.project_ic.unwrap_or(false) {
                InitialSubgrid::Projection
            } else {
                InitialSubgrid::Zero
            },
            g_pairing,
            franca_threshold: args.franca_pbar.unwrap_or(1.0),
            ..MethodOptions::new(p)
        };
        run_method(method, &problem, &opts)
    })?;
    let mut w = output(args.out.as_deref())?;
    write_solution_csv(&mut w, &problem.mesh, &problem.time, method.id(), &history, true)?;
    w.flush()?;
    Ok(())
}

fn compare(mut args: CompareArgs) -> Result<()> {
    let mut cfg: CompareArgs = read_config(args.config.as_deref())?;
    merge_config!(args, cfg: preset, out, json, solutions, provider, table, interpolation, g_pairing, franca_pbar,
        reference_refinement);
    let id: PresetId = required(args.preset.as_deref(), "preset")?.parse()?;
    let mut preset = ExperimentPreset::get(id);
    if let Some(factor) = args.reference_refinement {
        match preset.reference {
            ReferenceKind::RefinedGalerkin { .. } if factor >= 2 => preset.reference = ReferenceKind::RefinedGalerkin { factor },
            ReferenceKind::RefinedGalerkin { .. } => return Err(SvmsError::invalid("reference-refinement must be >= 2")),
            ReferenceKind::Exact => return Err(SvmsError::invalid(format!("{id} is measured against the exact solution"))),
        }
    }
    let provider = ProviderChoice::new(args.provider.as_deref(), args.table.as_deref(), args.interpolation.as_deref())?;
    let g_pairing: GPairing = parse(args.g_pairing.as_deref(), "appendix")?;
    let franca = args.franca_pbar.unwrap_or(1.0);
    let report = provider.with(|p| {
        let opts = MethodOptions {
            g_pairing,
            franca_threshold: franca,
            ..MethodOptions::for_preset(&preset, p)
        };
        run_experiment(&preset, &opts)
    })?;
    let mut w = output(args.out.as_deref())?;
    write_report_csv(&mut w, &report_rows(&report))?;
    w.flush()?;
    if let Some(path) = &args.json {
        let mut j = BufWriter::new(File::create(path)?);
        write_report_json(&mut j, &report)?;
        j.flush()?;
    }
    if let Some(path) = &args.solutions {
        let problem = preset.problem()?;
        let mut s = BufWriter::new(File::create(path)?);
        write_solution_csv(&mut s, &problem.mesh, &problem.time, "reference", &report.reference, true)?;
        for run in &report.runs {
            write_solution_csv(&mut s, &problem.mesh, &problem.time, run.method.id(), &run.history, false)?;
        }
        s.flush()?;
    }
    Ok(())
}

fn write_study(w: &mut impl Write, kind: &str, points: &[StudyPoint]) -> Result<()> {
    for p in points {
        writeln!(w, "{kind},{:.16e},{:.16e},{:.16e},{:.16e}", p.h, p.dt, p.errors.linf_l2, p.errors.l2_h1)?;
    }
    Ok(())
}

fn convergence(mut args: ConvergenceArgs) -> Result<()> {
    let mut cfg: ConvergenceArgs = read_config(args.config.as_deref())?;
    merge_config!(args, cfg: preset, method, out);
    let id: PresetId = args.preset.as_deref().unwrap_or("test1").parse()?;
    if id != PresetId::Test1 {
        return Err(SvmsError::invalid(format!("convergence studies are defined for test1, not {id}")));
    }
    let method: Method = parse(args.method.as_deref(), "spectral-full")?;
    let preset = ExperimentPreset::get(id);
    let direct = DirectProvider::default();
    let opts = MethodOptions::for_preset(&preset, &direct);
    let hs = h_study(&preset, method, &test1_mesh_sizes(), &opts)?;
    let finest = *test1_mesh_sizes().first().expect("non-empty");
    let dts = dt_study(&preset, method, finest, &test1_time_steps(), &opts)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "study,h,dt,linf_l2,l2_h1")?;
    write_study(&mut w, "h", &hs)?;
    write_study(&mut w, "dt", &dts)?;
    w.flush()?;
    let steps: Vec<f64> = dts.iter().map(|p| p.dt).collect();
    let slope_l2 = convergence_order(&dts.iter().map(|p| p.errors.linf_l2).collect::<Vec<_>>(), &steps)?;
    let slope_h1 = convergence_order(&dts.iter().map(|p| p.errors.l2_h1).collect::<Vec<_>>(), &steps)?;
    let spread = |f: fn(&StudyPoint) -> f64| {
        let v: Vec<f64> = hs.iter().map(f).collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        (hi - lo) / lo
    };
    eprintln!(
        "{method}: time slopes l∞(L²) {slope_l2:.3}, l²(H¹) {slope_h1:.3}; relative spread over h: {:.2e}, {:.2e}",
        spread(|p| p.errors.linf_l2),
        spread(|p| p.errors.l2_h1)
    );
    Ok(())
}

fn table_info(mut args: TableInfoArgs) -> Result<()> {
    let mut cfg: TableInfoArgs = read_config(args.config.as_deref())?;
    merge_config!(args, cfg: table);
    let path = args.table.ok_or_else(|| SvmsError::invalid("table-info needs --table PATH"))?;
    let t = load_table(&path)?;
    let mut w = io::stdout().lock();
    writeln!(w, "file: {}", path.display())?;
    writeln!(w, "format version: {FORMAT_VERSION}")?;
    writeln!(w, "delta: {}", t.grid.delta)?;
    writeln!(w, "M: {}", t.grid.m)?;
    writeln!(w, "range: [{}, {}]^2", t.grid.node(1), t.grid.max_coord())?;
    writeln!(w, "epsilon: {:e}", t.epsilon)?;
    writeln!(w, "j_max: {}", t.j_max)?;
    let fams: Vec<String> = Family::ALL.iter().map(|f| format!("{f}[{}]", f.n_entries())).collect();
    writeln!(w, "families ({}): {}", Family::ALL.len(), fams.join(" "))?;
    Ok(())
}
