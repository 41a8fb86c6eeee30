//! Command-line front end: one subcommand per study, deterministic file
//! outputs with a metadata record alongside every dataset.
//!
//! Frequencies on the command line are ordinary frequencies in kHz (the
//! units hardware people quote); conversion to angular units happens exactly
//! once, at this boundary. Exit codes: 0 success, 1 runtime/numerical
//! failure, 2 usage/validation error.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use geogate::dynamics::{evolve_lindblad_trajectory, propagate_unitary, NoiseParams, SimConfig};
use geogate::experiments::{
    build_sequence, dephasing_curve_and_fit, infidelity_crossing, linspace, robustness_table,
    run_sweep, scheme_comparison, ErrorKind, Gate, SweepSpec, SCHEMES,
};
use geogate::qubit::{gate_equivalence, state_fidelity, DensityMatrix};
use geogate::report::{
    chi_json, comparison_csv, dephasing_csv, dynamics_trajectory_csv, fit_json,
    robustness_table_csv, sweep_csv, table_json, trajectory_csv, twoion_csv, RunMetadata,
};
use geogate::schemes::{
    bloch_trajectory, dynamical_phase, geometric_phase, AuxiliaryPath, NngqcParams, SchemeTag,
};
use geogate::tomography::{
    chi_from_outputs, chi_ideal, process_fidelity, qpt_outputs, spam_apply, MeasureMode,
    ShotConfig, SpamModel,
};
use geogate::twoion::{compare_full_effective, zeno_trapping, TwoIonParams};

#[derive(Parser)]
#[command(
    name = "geogate",
    version,
    about = "Simulate geometric single-qubit gate schemes under realistic noise"
)]
struct Cli {
    /// JSON config file mirroring the flags; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for file-producing subcommands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for sampled runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Rabi frequency Omega_0/2pi in kHz.
    #[arg(long, global = true)]
    omega0_khz: Option<f64>,

    /// Dephasing rate Gamma in kHz (ordinary rate, 1e3/s).
    #[arg(long, global = true)]
    gamma_khz: Option<f64>,

    /// Ground-state preparation fidelity p.
    #[arg(long, global = true)]
    spam_p: Option<f64>,

    /// Shots per measurement setting (sampled tomography).
    #[arg(long, global = true)]
    shots: Option<u64>,

    /// Force exact expectation values (no shot sampling).
    #[arg(long, global = true, default_value_t = false)]
    exact: bool,

    /// File format for tabular outputs.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Nngqc,
    Ngqc,
    Dqc,
}

impl From<SchemeArg> for SchemeTag {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Nngqc => SchemeTag::Nngqc,
            SchemeArg::Ngqc => SchemeTag::Ngqc,
            SchemeArg::Dqc => SchemeTag::Dqc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    U1,
    Hadamard,
}

impl From<GateArg> for Gate {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::U1 => Gate::U1,
            GateArg::Hadamard => Gate::Hadamard,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Rabi,
    Detuning,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pulse table and diagnostics for one scheme/gate pair.
    Gate(GateCmd),
    /// Systematic-error sweep of the output-state fidelity for all schemes.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepCmd),
    /// Dephasing-infidelity curve, optionally with the exponential fit.
    Dephasing(DephasingCmd),
    /// Gaussian-averaged robustness table.
    Table1,
    /// Three-scheme process-tomography comparison, raw and calibrated.
    Compare,
    /// Process tomography of one scheme/gate pair.
    Tomo(TomoCmd),
    /// Two-ion full-vs-effective model comparison and Zeno trapping check.
    Twoqubit(TwoqubitCmd),
}

#[derive(Args)]
struct GateCmd {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    gate: GateArg,
    /// Also write the nominal Bloch trajectory and open-system observables.
    #[arg(long, default_value_t = false)]
    trajectory: bool,
}

#[derive(Args)]
struct SweepCmd {
    #[arg(long, value_enum)]
    error_kind: SweepKind,
    #[arg(long, value_enum, default_value = "u1")]
    gate: GateArg,
    /// Grid minimum (fractional for rabi, kHz for detuning).
    #[arg(long)]
    grid_min: f64,
    /// Grid maximum.
    #[arg(long)]
    grid_max: f64,
    #[arg(long, default_value_t = 21)]
    grid_points: usize,
}

#[derive(Args)]
struct DephasingCmd {
    /// Fit eps = a (exp(-b Gamma/Omega_0) - 1) and report the parameters.
    #[arg(long, default_value_t = false)]
    fit: bool,
    #[arg(long, default_value_t = 0.05)]
    max_ratio: f64,
    #[arg(long, default_value_t = 51)]
    points: usize,
}

#[derive(Args)]
struct TomoCmd {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    gate: GateArg,
}

#[derive(Args)]
struct TwoqubitCmd {
    /// g / Omega_tilde.
    #[arg(long, default_value_t = 50.0)]
    g_ratio: f64,
    /// Delta / Omega_tilde.
    #[arg(long, default_value_t = 10.0)]
    delta_ratio: f64,
    #[arg(long, default_value_t = 3)]
    nmax: usize,
}

/// Flag defaults, optionally overridden by a JSON config file, overridden in
/// turn by explicit flags.
#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    seed: Option<u64>,
    omega0_khz: Option<f64>,
    gamma_khz: Option<f64>,
    spam_p: Option<f64>,
    shots: Option<u64>,
    exact: Option<bool>,
    format: Option<FormatArg>,
}

struct Settings {
    out: PathBuf,
    seed: u64,
    omega0_khz: f64,
    gamma_khz: f64,
    spam_p: f64,
    shots: u64,
    exact: bool,
    format: FormatArg,
}

fn resolve_settings(cli: &Cli) -> Result<Settings, String> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config: {e}"))?
        }
        None => FileConfig::default(),
    };
    let spam_p = cli.spam_p.or(file.spam_p).unwrap_or(0.9628);
    if spam_p.is_nan() || spam_p <= 0.0 || spam_p > 1.0 {
        return Err(format!("spam-p must be in (0, 1], got {spam_p}"));
    }
    let shots = cli.shots.or(file.shots).unwrap_or(20_000);
    if shots == 0 {
        return Err("shots must be >= 1".into());
    }
    let omega0_khz = cli.omega0_khz.or(file.omega0_khz).unwrap_or(67.9);
    if omega0_khz.is_nan() || omega0_khz <= 0.0 {
        return Err(format!("omega0-khz must be positive, got {omega0_khz}"));
    }
    let gamma_khz = cli.gamma_khz.or(file.gamma_khz).unwrap_or(0.81);
    if gamma_khz < 0.0 {
        return Err(format!("gamma-khz must be >= 0, got {gamma_khz}"));
    }
    Ok(Settings {
        out: cli
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("out")),
        seed: cli.seed.or(file.seed).unwrap_or(1),
        omega0_khz,
        gamma_khz,
        spam_p,
        shots,
        exact: cli.exact || file.exact.unwrap_or(false),
        format: cli.format.or(file.format).unwrap_or(FormatArg::Csv),
    })
}

fn omega0_rad(s: &Settings) -> f64 {
    2.0 * PI * s.omega0_khz * 1e3
}

/// Gamma as an ordinary rate in 1/s (the convention recorded in metadata).
fn gamma_rate(s: &Settings) -> f64 {
    s.gamma_khz * 1e3
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

/// Writes tabular data as `<base>.csv` or `<base>.json` per `--format`.
fn write_table(dir: &Path, base: &str, csv: &str, format: FormatArg) -> Result<PathBuf, String> {
    match format {
        FormatArg::Csv => write_output(dir, &format!("{base}.csv"), csv),
        FormatArg::Json => {
            let json = table_json(csv).map_err(|e| e.to_string())?;
            write_output(dir, &format!("{base}.json"), &json)
        }
    }
}

fn write_metadata(dir: &Path, name: &str, meta: &RunMetadata) -> Result<(), String> {
    let json = meta.to_json().map_err(|e| e.to_string())?;
    write_output(dir, name, &json)?;
    Ok(())
}

fn measure_mode(s: &Settings) -> MeasureMode {
    if s.exact {
        MeasureMode::Exact
    } else {
        MeasureMode::Shots(ShotConfig {
            n_shots: s.shots,
            seed: s.seed,
        })
    }
}

fn base_metadata(command: &str, s: &Settings) -> RunMetadata {
    let mut meta = RunMetadata::new(command, s.omega0_khz);
    meta.gamma_khz = Some(s.gamma_khz);
    meta.spam_p = Some(s.spam_p);
    meta.seed = Some(s.seed);
    meta.exact = s.exact;
    if !s.exact {
        meta.shots = Some(s.shots);
    }
    meta
}

fn run(cli: &Cli) -> Result<(), (u8, String)> {
    let s = resolve_settings(cli).map_err(|e| (2u8, e))?;
    match &cli.command {
        Command::Gate(cmd) => cmd_gate(cmd, &s),
        Command::Sweep(cmd) => cmd_sweep(cmd, &s),
        Command::Dephasing(cmd) => cmd_dephasing(cmd, &s),
        Command::Table1 => cmd_table1(&s),
        Command::Compare => cmd_compare(&s),
        Command::Tomo(cmd) => cmd_tomo(cmd, &s),
        Command::Twoqubit(cmd) => cmd_twoqubit(cmd, &s),
    }
}

fn fail(e: impl std::fmt::Display) -> (u8, String) {
    (1u8, e.to_string())
}

fn cmd_gate(cmd: &GateCmd, s: &Settings) -> Result<(), (u8, String)> {
    let omega0 = omega0_rad(s);
    let scheme: SchemeTag = cmd.scheme.into();
    let gate: Gate = cmd.gate.into();
    let seq = build_sequence(scheme, gate, omega0).map_err(fail)?;

    println!("scheme {}  gate {}", scheme.name(), gate.name());
    println!("segment  duration_us  rabi_khz  phase_rad");
    for (k, seg) in seq.segments.iter().enumerate() {
        println!(
            "{:>7}  {:>11.4}  {:>8.3}  {:>9.4}",
            k + 1,
            seg.duration * 1e6,
            seg.rabi / (2.0 * PI * 1e3),
            seg.phase
        );
    }
    println!("total duration: {:.3} us", seq.total_duration() * 1e6);
    println!("total pulse area: {:.4} pi", seq.total_area() / PI);

    let u = propagate_unitary(&seq, &NoiseParams::none()).map_err(fail)?;
    let eq = gate_equivalence(&u, &seq.target).map_err(fail)?;
    println!("nominal propagator (rows):");
    for i in 0..2 {
        println!(
            "  [{:+.6}{:+.6}i, {:+.6}{:+.6}i]",
            u.matrix()[(i, 0)].re,
            u.matrix()[(i, 0)].im,
            u.matrix()[(i, 1)].re,
            u.matrix()[(i, 1)].im
        );
    }
    println!("gate equivalence to target: {:.12}", eq);

    if scheme == SchemeTag::Nngqc {
        let params = match gate {
            Gate::U1 => NngqcParams::u1(omega0),
            Gate::Hadamard => NngqcParams::hadamard(omega0),
        };
        let path = AuxiliaryPath::from_nngqc(&params, 2000).map_err(fail)?;
        let g = geometric_phase(&path).map_err(fail)?;
        let d = dynamical_phase(&seq, &path).map_err(fail)?;
        println!("geometric phase: {:.9} rad ({:.6} pi)", g, g / PI);
        println!("dynamical phase: {:.3e} rad", d);
    } else {
        println!(
            "geometric/dynamical phase diagnostics: n/a for {}",
            scheme.name()
        );
    }

    if cmd.trajectory {
        let init = DensityMatrix::pure_g();
        let traj = bloch_trajectory(&seq, &init, 501).map_err(fail)?;
        write_table(&s.out, "gate_trajectory", &trajectory_csv(&traj), s.format)
            .map_err(|e| (1u8, e))?;

        let gamma = gamma_rate(s);
        let noise = NoiseParams::dephasing(gamma).map_err(fail)?;
        let cfg = SimConfig::for_sequence(&seq).map_err(fail)?;
        let (_, states) =
            evolve_lindblad_trajectory(&init, &seq, &noise, &cfg, 501).map_err(fail)?;
        let mut rows = Vec::with_capacity(states.len());
        for (t, rho) in &states {
            let ideal = geogate::schemes::partial_propagator(&seq, *t)
                .conjugate_density(&init)
                .map_err(fail)?;
            let f = state_fidelity(rho, &ideal).map_err(fail)?;
            let ge = rho.off_diagonal(0, 1);
            rows.push((*t, rho.population(1), ge.re, ge.im, f));
        }
        write_table(
            &s.out,
            "gate_observables",
            &dynamics_trajectory_csv(&rows),
            s.format,
        )
        .map_err(|e| (1u8, e))?;

        let meta = base_metadata(
            &format!(
                "gate --scheme {} --gate {} --trajectory",
                scheme.name(),
                gate.name()
            ),
            s,
        );
        write_metadata(&s.out, "gate_trajectory.meta.json", &meta).map_err(|e| (1u8, e))?;
        println!(
            "wrote gate_trajectory and gate_observables under {}",
            s.out.display()
        );
    }
    Ok(())
}

fn cmd_sweep(cmd: &SweepCmd, s: &Settings) -> Result<(), (u8, String)> {
    if cmd.grid_points < 2 {
        return Err((2, "grid-points must be >= 2".into()));
    }
    if cmd.grid_max.is_nan() || cmd.grid_min.is_nan() || cmd.grid_max <= cmd.grid_min {
        return Err((2, "grid-max must exceed grid-min".into()));
    }
    let omega0 = omega0_rad(s);
    let (kind, grid) = match cmd.error_kind {
        SweepKind::Rabi => (
            ErrorKind::Rabi,
            linspace(cmd.grid_min, cmd.grid_max, cmd.grid_points),
        ),
        SweepKind::Detuning => (
            ErrorKind::Detuning,
            linspace(
                2.0 * PI * cmd.grid_min * 1e3,
                2.0 * PI * cmd.grid_max * 1e3,
                cmd.grid_points,
            ),
        ),
    };
    let mut per_scheme = Vec::new();
    for scheme in SCHEMES {
        let spec = SweepSpec {
            scheme,
            gate: cmd.gate.into(),
            error_kind: kind,
            grid: grid.clone(),
            input: DensityMatrix::pure_g(),
            omega0,
            gamma: 0.0,
            spam: None,
            shots: None,
        };
        per_scheme.push(run_sweep(&spec).map_err(fail)?);
    }
    let csv = sweep_csv(&grid, &per_scheme[0], &per_scheme[1], &per_scheme[2]).map_err(fail)?;
    let path = write_table(&s.out, "sweep", &csv, s.format).map_err(|e| (1u8, e))?;
    let meta = base_metadata(
        &format!(
            "sweep --error-kind {} --grid-min {} --grid-max {} --grid-points {}",
            kind.name(),
            cmd.grid_min,
            cmd.grid_max,
            cmd.grid_points
        ),
        s,
    );
    write_metadata(&s.out, "sweep.meta.json", &meta).map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_dephasing(cmd: &DephasingCmd, s: &Settings) -> Result<(), (u8, String)> {
    if cmd.points < 3 {
        return Err((2, "points must be >= 3".into()));
    }
    if cmd.max_ratio.is_nan() || cmd.max_ratio <= 0.0 || cmd.max_ratio > 0.1 {
        return Err((2, "max-ratio must be in (0, 0.1]".into()));
    }
    let grid = linspace(0.0, cmd.max_ratio, cmd.points);
    let (curve, fit) = dephasing_curve_and_fit(&grid, omega0_rad(s)).map_err(fail)?;
    let path =
        write_output(&s.out, "dephasing.csv", &dephasing_csv(&curve)).map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    if cmd.fit {
        let json = fit_json(&fit, &grid).map_err(fail)?;
        let path = write_output(&s.out, "dephasing_fit.json", &json).map_err(|e| (1u8, e))?;
        let crossing = infidelity_crossing(&fit, 1e-2).map_err(fail)?;
        println!(
            "fit: a = {:.4}, b = {:.4}, residual = {:.3e}",
            fit.a, fit.b, fit.residual
        );
        println!(
            "infidelity reaches 1e-2 at Gamma/Omega_0 = {:.4e}",
            crossing
        );
        println!("wrote {}", path.display());
    }
    let meta = base_metadata(
        &format!(
            "dephasing --max-ratio {} --points {}",
            cmd.max_ratio, cmd.points
        ),
        s,
    );
    write_metadata(&s.out, "dephasing.meta.json", &meta).map_err(|e| (1u8, e))?;
    Ok(())
}

fn cmd_table1(s: &Settings) -> Result<(), (u8, String)> {
    let table = robustness_table(omega0_rad(s), 21, 4.0).map_err(fail)?;
    let csv = robustness_table_csv(&table);
    print!("{csv}");
    let path = write_table(&s.out, "table1", &csv, s.format).map_err(|e| (1u8, e))?;
    write_metadata(&s.out, "table1.meta.json", &base_metadata("table1", s))
        .map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_compare(s: &Settings) -> Result<(), (u8, String)> {
    let spam = SpamModel::new(s.spam_p).map_err(|e| (2u8, e.to_string()))?;
    let mode = measure_mode(s);
    let res = scheme_comparison(&spam, gamma_rate(s), omega0_rad(s), &mode).map_err(fail)?;
    let csv = comparison_csv(&res.raw, &res.calibrated);
    print!("{csv}");
    let path = write_table(&s.out, "compare", &csv, s.format).map_err(|e| (1u8, e))?;
    write_metadata(&s.out, "compare.meta.json", &base_metadata("compare", s))
        .map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_tomo(cmd: &TomoCmd, s: &Settings) -> Result<(), (u8, String)> {
    let omega0 = omega0_rad(s);
    let scheme: SchemeTag = cmd.scheme.into();
    let gate: Gate = cmd.gate.into();
    let seq = build_sequence(scheme, gate, omega0).map_err(fail)?;
    let spam = SpamModel::new(s.spam_p).map_err(|e| (2u8, e.to_string()))?;
    let gamma = gamma_rate(s);
    let noise = NoiseParams::dephasing(gamma).map_err(fail)?;
    let channel = |rho: &DensityMatrix| -> geogate::Result<DensityMatrix> {
        let prepared = spam_apply(rho, &spam)?;
        if gamma == 0.0 {
            propagate_unitary(&seq, &noise)?.conjugate_density(&prepared)
        } else {
            let cfg = SimConfig::for_sequence(&seq)?;
            geogate::dynamics::evolve_lindblad(&prepared, &seq, &noise, &cfg)
        }
    };
    let mode = measure_mode(s);
    let outputs = qpt_outputs(channel, &mode, 0).map_err(fail)?;
    let chi = chi_from_outputs(&outputs);
    let chi_target = chi_ideal(&seq.target).map_err(fail)?;
    let f = process_fidelity(&chi, &chi_target).map_err(fail)?;
    println!(
        "process fidelity ({} {}): {:.4}",
        scheme.name(),
        gate.name(),
        f
    );
    let json = chi_json(&chi).map_err(fail)?;
    let name = format!("chi_{}_{}.json", scheme.name(), gate.name());
    let path = write_output(&s.out, &name, &json).map_err(|e| (1u8, e))?;
    write_metadata(
        &s.out,
        &format!("chi_{}_{}.meta.json", scheme.name(), gate.name()),
        &base_metadata(
            &format!("tomo --scheme {} --gate {}", scheme.name(), gate.name()),
            s,
        ),
    )
    .map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_twoqubit(cmd: &TwoqubitCmd, s: &Settings) -> Result<(), (u8, String)> {
    let p = TwoIonParams::new(1.0, cmd.g_ratio, cmd.delta_ratio, 0.0, 0.0, cmd.nmax)
        .map_err(|e| (2u8, e.to_string()))?;
    let period = p.transfer_period();
    let trace = compare_full_effective(&p, period, period / 2000.0).map_err(fail)?;
    let zeno = zeno_trapping(&p, period, period / 2000.0).map_err(fail)?;
    let (g_ratio, d_ratio) = p.hierarchy_report();
    println!("hierarchy: g/Omega = {g_ratio}, Delta/Omega = {d_ratio}");
    println!(
        "max |P_full(ge0) - P_eff(psi3)| = {:.4}",
        trace.max_deviation
    );
    println!(
        "ee0 trapping: min survival {:.4}, final survival {:.4}",
        zeno.min_survival, zeno.final_survival
    );
    let path =
        write_table(&s.out, "twoqubit", &twoion_csv(&trace), s.format).map_err(|e| (1u8, e))?;
    let meta = base_metadata(
        &format!(
            "twoqubit --g-ratio {} --delta-ratio {} --nmax {}",
            cmd.g_ratio, cmd.delta_ratio, cmd.nmax
        ),
        s,
    );
    write_metadata(&s.out, "twoqubit.meta.json", &meta).map_err(|e| (1u8, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
