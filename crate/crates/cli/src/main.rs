//! Batch front-end: generate initial data, certify the construction,
//! tabulate energies, and probe the weak formulation. Output is plain
//! text or CSV with `#` comment lines; exit codes are a stable
//! contract: 0 success / all checks pass, 1 verification failure,
//! 2 usage error, 3 I/O error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use subsol_core::energy::{bump, energy_profile, kinetic_energy, pointwise_energy_samples};
use subsol_core::error::CoreError;
use subsol_core::fields_io::{
    generate_detailed, load_field, save_field_with_provenance, GeneratorKind, GeneratorSpec,
};
use subsol_core::subsolution::{limit_data, make_snapshot};
use subsol_core::transform::{inverse_tensor_oversampled, inverse_transform, inverse_transform_oversampled};
use subsol_core::verifier::{
    full_report, observed_orders, weak_form_refinement, CandidateFlow, SteadyFlow,
    SubsolutionFlow, TestFunction, TimeWindow, VerifierConfig, ZeroFlow,
};
use subsol_core::{FourierVectorField, SpectralGrid};

const EXIT_OK: i32 = 0;
const EXIT_VERIFICATION: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;

#[derive(Parser)]
#[command(name = "subsol", version, about = "Spectral relaxed-flow construction and certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an initial-data field and write it to a container file.
    Generate(GenerateArgs),
    /// Run every admissibility check and optionally write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate kinetic energy and the profile integral along a time grid (CSV).
    EnergyProfile(EnergyProfileArgs),
    /// Weak-formulation residuals under time-quadrature refinement.
    Weakform(WeakformArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// random | shear | taylor_green_2d | single_mode
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spatial dimension d >= 2.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Modes per axis (even, >= 4).
    #[arg(long, default_value_t = 32)]
    modes: usize,
    /// Spectral decay exponent of the random kind.
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
    /// Spectral support radius; 0 means modes/2 - 1.
    #[arg(long, default_value_t = 0)]
    kmax: usize,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// single_mode wavenumber, e.g. "1,0".
    #[arg(long)]
    mode_k: Option<String>,
    /// single_mode polarization, e.g. "0,1".
    #[arg(long)]
    mode_a: Option<String>,
    /// Output container path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Input field container.
    #[arg(long = "in")]
    input: PathBuf,
    /// Snapshot times, comma-separated, positive, increasing.
    #[arg(long, default_value = "0.1,1,10")]
    times: String,
    #[arg(long, default_value_t = 2)]
    oversample: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol_algebraic: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_quadrature: f64,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyProfileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    t_start: f64,
    #[arg(long, default_value_t = 10.0)]
    t_end: f64,
    #[arg(long, default_value_t = 20)]
    t_count: usize,
    /// Geometric instead of linear spacing (needs t_start > 0).
    #[arg(long, default_value_t = false)]
    log_spacing: bool,
    #[arg(long, default_value_t = 2)]
    oversample: usize,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeakformArgs {
    /// shear | zero | subsolution
    #[arg(long)]
    candidate: String,
    /// Field container; required for the subsolution candidate.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 16)]
    modes: usize,
    /// Test-function wavenumber, e.g. "0,1".
    #[arg(long, default_value = "0,1")]
    phi_k: String,
    /// Test-function polarization, e.g. "1,0".
    #[arg(long, default_value = "1,0")]
    phi_a: String,
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,
    /// Base Simpson interval count; doubled per level.
    #[arg(long, default_value_t = 16)]
    steps: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// interior | initial temporal window.
    #[arg(long, default_value = "interior")]
    window: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::EnergyProfile(args) => cmd_energy_profile(args),
        Command::Weakform(args) => cmd_weakform(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}

fn classify(err: &CoreError) -> i32 {
    match err {
        CoreError::Io(_)
        | CoreError::BadMagic
        | CoreError::VersionMismatch { .. }
        | CoreError::HeaderPayloadMismatch { .. }
        | CoreError::Truncated { .. }
        | CoreError::NormalizationMismatch { .. } => EXIT_IO,
        CoreError::InvalidGrid { .. }
        | CoreError::GridMismatch { .. }
        | CoreError::InvalidTimes { .. }
        | CoreError::InvalidGenerator { .. }
        | CoreError::AxisOutOfRange { .. }
        | CoreError::PolarizationNotOrthogonal { .. }
        | CoreError::InvalidTestFunction { .. }
        | CoreError::SampleShape { .. } => EXIT_USAGE,
        _ => EXIT_VERIFICATION,
    }
}

fn usage(reason: impl Into<String>) -> CoreError {
    CoreError::InvalidGenerator { reason: reason.into() }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CoreError> {
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|_| usage(format!("bad {what}: {tok:?}"))))
        .collect()
}

fn parse_i64_list(s: &str, what: &str) -> Result<Vec<i64>, CoreError> {
    s.split(',')
        .map(|tok| tok.trim().parse::<i64>().map_err(|_| usage(format!("bad {what}: {tok:?}"))))
        .collect()
}

/// All numeric output carries 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_generate(args: GenerateArgs) -> Result<i32, CoreError> {
    let kind = GeneratorKind::parse(&args.kind)?;
    let grid = Arc::new(SpectralGrid::new(args.dim, args.modes)?);
    let mut spec = GeneratorSpec::new(kind, args.seed);
    spec.decay_exponent = args.decay;
    spec.kmax = args.kmax;
    spec.amplitude = args.amplitude;
    if let Some(ks) = &args.mode_k {
        spec.mode_k = Some(parse_i64_list(ks, "--mode-k")?);
    }
    if let Some(avals) = &args.mode_a {
        spec.mode_a = Some(parse_f64_list(avals, "--mode-a")?);
    }
    let generated = generate_detailed(&spec, &grid)?;
    if generated.polarization_projected {
        eprintln!("# advisory: polarization projected onto the plane orthogonal to its wavenumber");
    }
    // The analytic kinds draw nothing; only the random one records its
    // RNG algorithm. The header field holds 16 bytes.
    let provenance = match kind {
        GeneratorKind::Random => "random/chacha12".to_string(),
        other => other.name().to_string(),
    };
    save_field_with_provenance(&generated.field, &args.out, &provenance)?;
    println!(
        "generated kind={} d={} n={} l2_norm_sq={}",
        kind.name(),
        args.dim,
        args.modes,
        num(generated.field.l2_norm_sq())
    );
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CoreError> {
    let (field, header) = load_field(&args.input)?;
    let times = parse_f64_list(&args.times, "--times")?;
    if times.is_empty() || times.iter().any(|&t| t <= 0.0) || times.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(CoreError::InvalidTimes {
            reason: "--times must be positive and strictly increasing".into(),
        });
    }
    let cfg = VerifierConfig {
        tol_algebraic: args.tol_algebraic,
        tol_quadrature: args.tol_quadrature,
        oversample: args.oversample.max(1),
        ..VerifierConfig::default()
    };
    let report = full_report(&field, &times, &cfg)?;
    println!("# subsol verify {}", args.input.display());
    println!("# header: d={} n={} solenoidal_claim={}", header.d, header.n, header.solenoidal);
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    println!(
        "linear_system      {}  residual_max={}",
        verdict(report.passes.linear_system),
        num(report.residual_max)
    );
    println!(
        "range              {}  trace_max={} asym_max={}",
        verdict(report.passes.range),
        num(report.trace_max),
        num(report.asym_max)
    );
    println!(
        "strict_inequality  {}  min_margin={}",
        verdict(report.passes.strict_inequality),
        num(report.min_margin)
    );
    println!(
        "energy_bounds      {}  energy_v={} bound={} stress_l1={} bound={}",
        verdict(report.passes.energy_bounds),
        num(report.energy_v),
        num(report.energy_v_bound),
        num(report.stress_l1),
        num(report.stress_l1_bound)
    );
    println!("decay              {}", verdict(report.passes.decay));
    println!(
        "continuity_at_zero {}  lipschitz={}",
        verdict(report.passes.continuity_at_zero),
        num(report.lipschitz_estimate)
    );
    println!(
        "initial_jump       {}  jump={}",
        verdict(report.passes.initial_jump),
        num(report.initial_jump)
    );
    println!("conclusion: {}", report.conclusion);
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json())?;
    }
    Ok(if report.passes.all() { EXIT_OK } else { EXIT_VERIFICATION })
}

fn cmd_energy_profile(args: EnergyProfileArgs) -> Result<i32, CoreError> {
    if args.log_spacing && args.t_start <= 0.0 {
        return Err(CoreError::InvalidTimes {
            reason: "--log-spacing needs --t-start > 0".into(),
        });
    }
    if args.t_start < 0.0 || args.t_end < args.t_start || args.t_count == 0 {
        return Err(CoreError::InvalidTimes {
            reason: "need 0 <= t_start <= t_end and t_count >= 1".into(),
        });
    }
    let (field, _) = load_field(&args.input)?;
    let times: Vec<f64> = if args.t_count == 1 {
        vec![args.t_start]
    } else if args.log_spacing {
        let ratio = (args.t_end / args.t_start).powf(1.0 / (args.t_count - 1) as f64);
        (0..args.t_count).map(|i| args.t_start * ratio.powi(i as i32)).collect()
    } else {
        let step = (args.t_end - args.t_start) / (args.t_count - 1) as f64;
        (0..args.t_count).map(|i| args.t_start + step * i as f64).collect()
    };
    let os = args.oversample.max(1);
    let mut lines = Vec::new();
    lines.push(format!("# subsol energy-profile {}", args.input.display()));
    lines.push("t,E_vbar,int_e_dx,bump,int_ebar_dx".to_string());
    let mut e_v = Vec::new();
    let mut totals = Vec::new();
    for &t in &times {
        let (energy, base_integral) = if t == 0.0 {
            let (v0, u0) = limit_data(&field)?;
            let v = inverse_transform_oversampled(&v0, os)?;
            let u = inverse_tensor_oversampled(&u0, os)?;
            let e = pointwise_energy_samples(&v, &u)?;
            (kinetic_energy(&v0), e.iter().sum::<f64>() / e.len() as f64)
        } else {
            let snapshot = make_snapshot(&field, t)?;
            let profile = energy_profile(&snapshot, os)?;
            (kinetic_energy(snapshot.vbar()), profile.mean_base())
        };
        let b = bump(t);
        e_v.push(energy);
        totals.push((t, base_integral + b));
        lines.push(format!(
            "{},{},{},{},{}",
            num(t),
            num(energy),
            num(base_integral),
            num(b),
            num(base_integral + b)
        ));
    }
    let nonincreasing = e_v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-15));
    lines.push(format!("# E_vbar nonincreasing: {nonincreasing}"));
    let after_one: Vec<f64> =
        totals.iter().filter(|(t, _)| *t >= 1.0).map(|&(_, v)| v).collect();
    if after_one.len() >= 2 {
        let decreasing = after_one.windows(2).all(|w| w[1] < w[0]);
        lines.push(format!("# int_ebar_dx strictly decreasing for t >= 1: {decreasing}"));
    }
    write_lines(&args.out, &lines)?;
    Ok(EXIT_OK)
}

fn cmd_weakform(args: WeakformArgs) -> Result<i32, CoreError> {
    let phi_k = parse_i64_list(&args.phi_k, "--phi-k")?;
    let phi_a = parse_f64_list(&args.phi_a, "--phi-a")?;
    let window = match args.window.as_str() {
        "interior" => TimeWindow::interior(args.horizon),
        "initial" => TimeWindow::initial(args.horizon),
        other => return Err(usage(format!("unknown window {other:?}"))),
    };
    let phi = TestFunction::new(phi_k, phi_a, window)?;
    let loaded: Option<FourierVectorField> = match &args.input {
        Some(path) => Some(load_field(path)?.0),
        None => None,
    };
    let (candidate, v0_samples): (Box<dyn CandidateFlow>, _) = match args.candidate.as_str() {
        "zero" => {
            let (d, n) = match &loaded {
                Some(f) => (f.dim(), f.grid().modes_per_axis()),
                None => (args.dim, args.modes),
            };
            let zeros = subsol_core::PhysicalVectorField::zeros(d, n);
            (Box::new(ZeroFlow { d, n_phys: n }), zeros)
        }
        "shear" => {
            let (d, n) = match &loaded {
                Some(f) => (f.dim(), f.grid().modes_per_axis()),
                None => (args.dim, args.modes),
            };
            let grid = Arc::new(SpectralGrid::new(d, n)?);
            let shear = subsol_core::fields_io::generate(
                &GeneratorSpec::new(GeneratorKind::Shear, 0),
                &grid,
            )?;
            let samples = inverse_transform(&shear)?;
            (Box::new(SteadyFlow(samples.clone())), samples)
        }
        "subsolution" => {
            let field = loaded
                .ok_or_else(|| usage("--candidate subsolution requires --in <field>"))?;
            let samples = inverse_transform(&field)?;
            (Box::new(SubsolutionFlow::new(field)), samples)
        }
        other => return Err(usage(format!("unknown candidate {other:?}"))),
    };
    let levels: Vec<usize> = (0..args.levels.max(1)).map(|i| args.steps << i).collect();
    let ladder = weak_form_refinement(candidate.as_ref(), &v0_samples, &phi, &levels)?;
    let orders = observed_orders(&ladder);
    let mut lines = Vec::new();
    lines.push(format!(
        "# subsol weakform candidate={} window={} horizon={}",
        args.candidate,
        args.window,
        num(args.horizon)
    ));
    lines.push("steps,residual,order".to_string());
    for (i, (steps, residual)) in ladder.iter().enumerate() {
        let order = if i == 0 { String::new() } else { num(orders[i - 1]) };
        lines.push(format!("{},{},{}", steps, num(*residual), order));
    }
    write_lines(&args.out, &lines)?;
    Ok(EXIT_OK)
}

fn write_lines(out: &Option<PathBuf>, lines: &[String]) -> Result<(), CoreError> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            for line in lines {
                writeln!(file, "{line}")?;
            }
        }
        None => {
            for line in lines {
                println!("{line}");
            }
        }
    }
    Ok(())
}
