//! The `factor` command-line tool.

pub mod error;
pub mod output;
pub mod presets;
pub mod schemes;
pub mod settings;
mod verify;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use gauss_factor::analysis::Scheme;
use gauss_factor::gauss_core::{continuous_s, quadratic_s, reciprocal_a, truncated_a, LinearSign, UniformSumSpec, Weights};
use gauss_factor::Complex64;

use error::{CliError, Result, EXIT_CONTRADICTION, EXIT_OK, EXIT_VALIDATION};
use schemes::{System, RunOutput};
use settings::{parse_real, read_config_file, Settings, Source};

#[derive(Parser)]
#[command(name = "factor", version, about = "Factor integers with simulated chirped-pulse Gauss sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Integer to factor
    #[arg(long)]
    n: Option<String>,
    /// Continuous scan `lo:hi:density`
    #[arg(long)]
    scan: Option<String>,
    /// Trial factors, `a..b` or a comma list
    #[arg(long)]
    ells: Option<String>,
    /// peak, zero, line or unit
    #[arg(long)]
    detector: Option<String>,
    /// continuous or discrete
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    tau_peak: Option<String>,
    #[arg(long)]
    tau_zero: Option<String>,
    #[arg(long)]
    tau_line: Option<String>,
    #[arg(long)]
    tau_unit: Option<String>,
    /// Named parameter set
    #[arg(long)]
    preset: Option<String>,
    /// Key-value file with the same keys as the long flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Also write an SVG plot
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct TptArgs {
    #[command(flatten)]
    common: Common,
    /// Two-photon detuning delta
    #[arg(long)]
    delta: Option<String>,
    /// Level spacing Delta
    #[arg(long)]
    spacing: Option<String>,
    /// Spectral width Delta omega
    #[arg(long)]
    bandwidth: Option<String>,
    /// Dimensionless dispersion a = phi'' Delta omega^2 / 2
    #[arg(long)]
    dispersion: Option<String>,
    /// Quadratic spectral phase phi''
    #[arg(long)]
    phi2: Option<String>,
    /// Symmetric half-width of the intermediate manifold
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    m_lower: Option<String>,
    #[arg(long)]
    m_upper: Option<String>,
    /// Constant Rabi product
    #[arg(long)]
    rabi: Option<String>,
}

#[derive(Args)]
struct FloquetArgs {
    #[command(flatten)]
    common: Common,
    /// Detuning delta
    #[arg(long)]
    delta: Option<String>,
    /// Modulation frequency Delta
    #[arg(long)]
    spacing: Option<String>,
    /// Spectral width Delta omega
    #[arg(long)]
    bandwidth: Option<String>,
    /// Sideband width Delta n = Delta omega / Delta
    #[arg(long)]
    delta_n: Option<String>,
    /// Modulation index
    #[arg(long)]
    kappa: Option<String>,
    /// Sets kappa = 2 pi s + pi/4
    #[arg(long)]
    parity_s: Option<String>,
    /// Modulation phase
    #[arg(long)]
    phi: Option<String>,
    /// Sideband window half-width
    #[arg(long)]
    n_range: Option<String>,
}

#[derive(Args)]
struct PulseTrainArgs {
    #[command(flatten)]
    common: Common,
    /// Detuning delta
    #[arg(long)]
    delta: Option<String>,
    /// Pulse period T
    #[arg(long)]
    period: Option<String>,
    /// Number of pulses 2M + 1
    #[arg(long)]
    pulses: Option<String>,
    /// Half-width M
    #[arg(long)]
    m: Option<String>,
    /// Pulse strength Omega_ge
    #[arg(long)]
    omega_ge: Option<String>,
}

#[derive(Args)]
struct GaussSumArgs {
    /// A, truncated, S or continuous
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: u64,
    /// Half-width of the summation range
    #[arg(long)]
    m: u64,
    /// Integer argument
    #[arg(long)]
    ell: Option<u64>,
    /// Real argument
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Sign of the linear term of the continuous sum
    #[arg(long, default_value = "minus")]
    sign: String,
}

#[derive(Args)]
struct EncodeArgs {
    /// tpt, floquet or pulsetrain
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    period: Option<String>,
    /// xi range for the chirp summary, `lo:hi`
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    ells: Option<String>,
}

#[derive(Args)]
pub(crate) struct VerifyArgs {
    #[command(flatten)]
    pub system: VerifySystem,
    /// Chirps at which the amplitude is compared
    #[arg(long)]
    pub xis: Option<String>,
    /// Number of random drives compared against the ODE solver
    #[arg(long, default_value_t = 8)]
    pub samples: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Integration span in pulse durations
    #[arg(long, default_value_t = 8.0)]
    pub widths: f64,
}

/// Floquet parameters of the verified configuration; read through the
/// argument matches like the run flags.
#[derive(Args)]
#[allow(dead_code)]
pub(crate) struct VerifySystem {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    delta_n: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    parity_s: Option<String>,
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Two-photon transition through an equidistant ladder
    Tpt(TptArgs),
    /// One-photon transition into a modulated level
    Floquet(FloquetArgs),
    /// Train of delta pulses on a swept two-level system
    Pulsetrain(PulseTrainArgs),
    /// Evaluate a single Gauss sum
    GaussSum(GaussSumArgs),
    /// Print the physical parameters that encode N
    Encode(EncodeArgs),
    /// Cross-check closed forms against quadrature and ODE integration
    VerifyOracle(VerifyArgs),
    /// List the named parameter sets
    Presets,
}

/// Runs the tool and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_VALIDATION
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return EXIT_VALIDATION;
        }
    };
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match dispatch(cli.command, sub, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, matches: &ArgMatches, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Tpt(a) => run_scheme(Scheme::Tpt, &a.common, matches, out),
        Command::Floquet(a) => run_scheme(Scheme::Floquet, &a.common, matches, out),
        Command::Pulsetrain(a) => run_scheme(Scheme::PulseTrain, &a.common, matches, out),
        Command::GaussSum(a) => gauss_sum(&a, out),
        Command::Encode(a) => encode(&a, matches, out),
        Command::VerifyOracle(a) => verify::run(&a, matches, out),
        Command::Presets => {
            for p in presets::PRESETS {
                let _ = writeln!(out, "{:<16} {:<10} {}", p.name, p.scheme, p.summary);
            }
            Ok(EXIT_OK)
        }
    }
}

/// String-valued flags given on the command line, keyed by long name.
pub(crate) fn flag_values(matches: &ArgMatches, skip: &[&str]) -> Vec<(String, String)> {
    let mut v = Vec::new();
    for id in matches.ids() {
        let id = id.as_str();
        if skip.contains(&id) || matches.value_source(id) != Some(clap::parser::ValueSource::CommandLine) {
            continue;
        }
        if let Ok(Some(value)) = matches.try_get_one::<String>(id) {
            v.push((id.replace('_', "-"), value.clone()));
        }
    }
    v
}

fn collect_settings(scheme: Scheme, common: &Common, matches: &ArgMatches) -> Result<Settings> {
    let mut s = Settings::new();
    if let Some(name) = &common.preset {
        let p = presets::find(name).ok_or_else(|| {
            let known: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
            CliError::invalid("preset", format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })?;
        if p.scheme != scheme.name() {
            return Err(CliError::invalid(
                "preset",
                format!("`{name}` belongs to the {} scheme, not {}", p.scheme, scheme.name()),
            ));
        }
        for (k, v) in p.values {
            s.set(k, *v, Source::Preset);
        }
    }
    if let Some(path) = &common.config {
        for (k, v) in read_config_file(path)? {
            s.set(&k, v, Source::File);
        }
    }
    for (k, v) in flag_values(matches, &["preset", "config"]) {
        s.set(&k, v, Source::Flag);
    }
    if common.plot {
        s.set("plot", "true", Source::Flag);
    }
    Ok(s)
}

fn run_scheme(scheme: Scheme, common: &Common, matches: &ArgMatches, out: &mut dyn Write) -> Result<i32> {
    let mut s = collect_settings(scheme, common, matches)?;
    let result: RunOutput = schemes::run(scheme, &mut s)?;
    let dir = PathBuf::from(s.raw("out").unwrap_or("."));
    let stem = format!("{}-n{}", scheme.name(), result.n);
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    output::write_file(&csv, &output::trace_csv(&result))?;
    output::write_file(&json, &output::report_json(&result))?;
    let _ = write!(out, "{}", output::summary_text(&result));
    let _ = writeln!(out, "trace: {}", csv.display());
    let _ = writeln!(out, "report: {}", json.display());
    if s.bool("plot")? {
        let svg = dir.join(format!("{stem}.svg"));
        output::write_file(&svg, &output::trace_svg(&result))?;
        let _ = writeln!(out, "plot: {}", svg.display());
    }
    if !result.report.contradictions.is_empty() {
        return Ok(EXIT_CONTRADICTION);
    }
    Ok(EXIT_OK)
}

pub fn format_complex(z: Complex64) -> String {
    // adding zero clears the sign of -0
    let re = z.re + 0.0;
    let im = z.im + 0.0;
    if im < 0.0 {
        format!("{re} - {}i", -im)
    } else {
        format!("{re} + {im}i")
    }
}

fn gauss_sum(a: &GaussSumArgs, out: &mut dyn Write) -> Result<i32> {
    let need_ell = || a.ell.ok_or_else(|| CliError::invalid("ell", "this kind needs `--ell`"));
    let uniform = || -> Result<Weights> { Ok(Weights::uniform(-(a.m as i64), a.m as i64, Complex64::new(1.0, 0.0))?) };
    let value = match a.kind.as_str() {
        "A" | "a" | "reciprocal" => {
            let spec = UniformSumSpec::new(a.m, a.n)?;
            let xi = match (&a.xi, a.ell) {
                (Some(x), None) => parse_real("xi", x)?,
                (None, Some(l)) => l as f64,
                (None, None) => return Err(CliError::invalid("ell", "give `--ell` or `--xi`")),
                (Some(_), Some(_)) => return Err(CliError::invalid("xi", "conflicts with `--ell`")),
            };
            reciprocal_a(&spec, xi)?
        }
        "truncated" => truncated_a(a.n, a.m, need_ell()?)?,
        "S" | "s" | "quadratic" => quadratic_s(a.n, &uniform()?, need_ell()?)?,
        "continuous" => {
            let xi = match (&a.xi, a.ell) {
                (Some(x), _) => parse_real("xi", x)?,
                (None, Some(l)) => l as f64,
                (None, None) => return Err(CliError::invalid("xi", "this kind needs `--xi`")),
            };
            let sign = match a.sign.as_str() {
                "minus" | "-" => LinearSign::Minus,
                "plus" | "+" => LinearSign::Plus,
                other => return Err(CliError::invalid("sign", format!("`{other}`; use plus or minus"))),
            };
            continuous_s(a.n, &uniform()?, sign, xi)?
        }
        other => {
            return Err(CliError::invalid(
                "kind",
                format!("unknown kind `{other}`; use A, truncated, S or continuous"),
            ))
        }
    };
    let _ = writeln!(out, "{}", format_complex(value));
    Ok(EXIT_OK)
}

fn encode(a: &EncodeArgs, matches: &ArgMatches, out: &mut dyn Write) -> Result<i32> {
    let scheme = schemes::scheme_from_name(&a.scheme)?;
    let mut s = Settings::new();
    for (k, v) in flag_values(matches, &["scheme", "range", "ells"]) {
        s.set(&k, v, Source::Flag);
    }
    if !s.contains("n") {
        return Err(CliError::invalid("n", "encode needs `--n`"));
    }
    let system = System::build(scheme, &mut s)?;
    let n = system.model().number();
    let (lo, hi) = match &a.range {
        Some(r) => {
            let (lo, hi) = r
                .split_once(':')
                .ok_or_else(|| CliError::invalid("range", format!("`{r}` is not lo:hi")))?;
            (parse_real("range", lo)?, parse_real("range", hi)?)
        }
        None => (0.0, (n as f64).sqrt() + 0.5),
    };
    let _ = writeln!(out, "# {} encoding of N = {n}", scheme.name());
    for (k, v, _) in s.iter() {
        let _ = writeln!(out, "{k} = {v}");
    }
    match &system {
        System::Tpt(t) => {
            let per_xi = PI / (t.delta() * t.spacing());
            let _ = writeln!(out, "# xi = delta * spacing * phi2 / pi");
            let _ = writeln!(out, "# phi2 for xi in [{lo}, {hi}]: [{}, {}]", lo * per_xi, hi * per_xi);
            let _ = writeln!(out, "# pulse duration {}", t.pulse().duration());
        }
        System::Floquet(f) => {
            let per_xi = PI / (f.delta() * f.spacing());
            let _ = writeln!(out, "# kappa = {}, delta omega = {}", f.kappa(), f.pulse().delta_omega());
            let _ = writeln!(out, "# modulation amplitude Omega_ee = kappa * spacing = {}", f.kappa() * f.spacing());
            let _ = writeln!(out, "# phi2 for xi in [{lo}, {hi}]: [{}, {}]", lo * per_xi, hi * per_xi);
        }
        System::PulseTrain(p) => {
            let ells = match &a.ells {
                Some(e) => settings::parse_ells(e)?,
                None => vec![2, (n as f64).sqrt().floor().max(2.0) as u64],
            };
            let _ = writeln!(out, "# delta * period = 2 pi N = {}", p.delta() * p.period());
            let (first, last) = (ells[0], ells[ells.len() - 1]);
            let _ = writeln!(
                out,
                "# Omega_ee = 2 delta / ell for ell in [{first}, {last}]: [{}, {}]",
                2.0 * p.delta() / first as f64,
                2.0 * p.delta() / last as f64
            );
        }
    }
    Ok(EXIT_OK)
}
