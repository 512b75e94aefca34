//! Building the physical systems from settings and running a readout.

use std::f64::consts::PI;

use gauss_factor::analysis::{
    assemble_factorization, default_candidates, detect_line_origin, detect_peaks, detect_unit_modulus, detect_zeros,
    scan, scan_parallel, DetectorConfig, PrimePower, ReadoutRule, Scheme, SignalModel, TraceSample,
};
use gauss_factor::floquet::{encode_n_floquet, KappaForm};
use gauss_factor::pulsetrain::encode_n_pt;
use gauss_factor::tpt::{encode_n, RabiProduct};
use gauss_factor::{ChirpedPulse, Complex64, FactorReport, FloquetSystem, PulseTrainSystem, TptSystem};

use crate::error::{CliError, Result};
use crate::settings::{parse_ells, parse_scan, Settings};

pub const COMMON_KEYS: &[&str] = &[
    "n", "scan", "ells", "detector", "mode", "window", "tau-peak", "tau-zero", "tau-line", "tau-unit", "out",
    "threads", "seed", "plot",
];
pub const TPT_KEYS: &[&str] = &[
    "delta", "spacing", "bandwidth", "dispersion", "phi2", "m", "m-lower", "m-upper", "rabi",
];
pub const FLOQUET_KEYS: &[&str] = &[
    "delta", "spacing", "bandwidth", "delta-n", "kappa", "parity-s", "phi", "n-range",
];
pub const PULSETRAIN_KEYS: &[&str] = &["delta", "period", "pulses", "m", "omega-ge"];

pub const DEFAULT_SPACING: f64 = 0.003;
pub const DEFAULT_TPT_BANDWIDTH: f64 = 0.1525;
pub const DEFAULT_TPT_DISPERSION: f64 = -10824.0;
pub const DEFAULT_DELTA_N: f64 = 12.71;
pub const DEFAULT_PARITY_S: u64 = 100;
pub const DEFAULT_PERIOD: f64 = 1.0;
pub const DEFAULT_PULSES: u64 = 21;
pub const DEFAULT_DENSITY: f64 = 200.0;

pub fn scheme_from_name(name: &str) -> Result<Scheme> {
    match name {
        "tpt" => Ok(Scheme::Tpt),
        "floquet" => Ok(Scheme::Floquet),
        "pulsetrain" => Ok(Scheme::PulseTrain),
        _ => Err(CliError::invalid("scheme", format!("unknown scheme `{name}`"))),
    }
}

pub fn allowed_keys(scheme: Scheme) -> Vec<&'static str> {
    let extra = match scheme {
        Scheme::Tpt => TPT_KEYS,
        Scheme::Floquet => FLOQUET_KEYS,
        Scheme::PulseTrain => PULSETRAIN_KEYS,
    };
    COMMON_KEYS.iter().chain(extra).copied().collect()
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn exclusive(s: &Settings, a: &str, b: &str) -> Result<()> {
    if s.contains(a) && s.contains(b) {
        return Err(CliError::invalid(b, format!("conflicts with `{a}`; give only one")));
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(field, format!("{v} must be positive")))
    }
}

fn check_n(s: &Settings, encoded: u64, how: &str) -> Result<u64> {
    if let Some(n) = s.u64("n")? {
        if n != encoded {
            return Err(CliError::invalid("n", format!("N = {n} but {how} encodes {encoded}")));
        }
    }
    if encoded < 2 {
        return Err(CliError::invalid("n", format!("N = {encoded}; at least 2 is needed")));
    }
    Ok(encoded)
}

fn given_n(s: &Settings, what: &str) -> Result<u64> {
    let n = s
        .u64("n")?
        .ok_or_else(|| CliError::invalid("n", format!("give `n` or `{what}`")))?;
    if n < 2 {
        return Err(CliError::invalid("n", format!("N = {n}; at least 2 is needed")));
    }
    Ok(n)
}

/// Default manifold bounds: M' = floor(N/2) + 1 and M = M' when the
/// dimension stays within 2N.
pub fn default_manifold(n: u64) -> (u64, u64) {
    let lower = n / 2 + 1;
    if 2 * lower < 2 * n {
        (lower, lower)
    } else {
        (lower, (2 * n - 1 - lower).max(1))
    }
}

pub fn build_tpt(s: &mut Settings) -> Result<TptSystem> {
    exclusive(s, "dispersion", "phi2")?;
    exclusive(s, "m", "m-lower")?;
    exclusive(s, "m", "m-upper")?;
    s.default_value("spacing", fmt(DEFAULT_SPACING));
    let spacing = positive("spacing", s.required_f64("spacing")?)?;
    let delta = match s.f64("delta")? {
        Some(d) => d,
        None => {
            let n = given_n(s, "delta")?;
            let d = 0.5 * n as f64 * spacing;
            s.default_value("delta", fmt(d));
            d
        }
    };
    let n = check_n(s, encode_n(delta, spacing)?, "2 delta / spacing")?;
    s.default_value("n", n.to_string());
    s.default_value("bandwidth", fmt(DEFAULT_TPT_BANDWIDTH));
    let bandwidth = positive("bandwidth", s.required_f64("bandwidth")?)?;
    let pulse = match s.f64("phi2")? {
        Some(phi2) => ChirpedPulse::with_bandwidth(bandwidth, phi2)?,
        None => {
            s.default_value("dispersion", fmt(DEFAULT_TPT_DISPERSION));
            ChirpedPulse::from_dispersion(bandwidth, s.required_f64("dispersion")?)?
        }
    };
    let (def_lower, def_upper) = default_manifold(n);
    let (lower, upper) = match s.u64("m")? {
        Some(m) => (m, m),
        None => (
            s.u64("m-lower")?.unwrap_or(def_lower),
            s.u64("m-upper")?.unwrap_or(def_upper),
        ),
    };
    if !s.contains("m") {
        s.default_value("m-lower", lower.to_string());
        s.default_value("m-upper", upper.to_string());
    }
    s.default_value("rabi", "1");
    let rabi = s.required_f64("rabi")?;
    Ok(TptSystem::new(
        delta,
        spacing,
        lower,
        upper,
        RabiProduct::Constant(Complex64::new(rabi, 0.0)),
        pulse,
    )?)
}

pub fn build_floquet(s: &mut Settings) -> Result<FloquetSystem> {
    exclusive(s, "kappa", "parity-s")?;
    exclusive(s, "bandwidth", "delta-n")?;
    s.default_value("spacing", fmt(DEFAULT_SPACING));
    let spacing = positive("spacing", s.required_f64("spacing")?)?;
    let delta = match s.f64("delta")? {
        Some(d) => d,
        None => {
            let n = given_n(s, "delta")?;
            let d = n as f64 * spacing;
            s.default_value("delta", fmt(d));
            d
        }
    };
    let n = check_n(s, encode_n_floquet(delta, spacing)?, "delta / spacing")?;
    s.default_value("n", n.to_string());
    let kappa = match s.f64("kappa")? {
        Some(k) => k,
        None => {
            s.default_value("parity-s", DEFAULT_PARITY_S.to_string());
            gauss_factor::floquet::kappa_for_parity(s.required_u64("parity-s")?)
        }
    };
    s.default_value("phi", "pi/2");
    let phi = s.required_f64("phi")?;
    let sys = match s.f64("bandwidth")? {
        Some(bw) => FloquetSystem::new(delta, spacing, kappa, phi, ChirpedPulse::with_bandwidth(bw, 0.0)?)?,
        None => {
            s.default_value("delta-n", fmt(DEFAULT_DELTA_N));
            FloquetSystem::from_sideband_width(delta, spacing, kappa, phi, s.required_f64("delta-n")?)?
        }
    };
    match s.u64("n-range")? {
        Some(r) => Ok(sys.with_n_range(r)?),
        None => Ok(sys),
    }
}

pub fn build_pulsetrain(s: &mut Settings) -> Result<PulseTrainSystem> {
    exclusive(s, "pulses", "m")?;
    s.default_value("period", fmt(DEFAULT_PERIOD));
    let period = positive("period", s.required_f64("period")?)?;
    let delta = match s.f64("delta")? {
        Some(d) => d,
        None => {
            let n = given_n(s, "delta")?;
            let d = 2.0 * PI * n as f64 / period;
            s.default_value("delta", fmt(d));
            d
        }
    };
    let n = check_n(s, encode_n_pt(delta, period)?, "delta T / (2 pi)")?;
    s.default_value("n", n.to_string());
    let m = match s.u64("m")? {
        Some(m) => m,
        None => {
            s.default_value("pulses", DEFAULT_PULSES.to_string());
            let p = s.required_u64("pulses")?;
            if p < 3 || p % 2 == 0 {
                return Err(CliError::invalid("pulses", format!("{p} must be odd and at least 3 (2M + 1)")));
            }
            (p - 1) / 2
        }
    };
    s.default_value("omega-ge", "1");
    let omega_ge = s.required_f64("omega-ge")?;
    // the sweep rate is set per trial factor; start at xi = 1
    Ok(PulseTrainSystem::new(delta, period, 2.0 * delta, m, omega_ge)?)
}

pub enum System {
    Tpt(TptSystem),
    Floquet(FloquetSystem),
    PulseTrain(PulseTrainSystem),
}

impl System {
    pub fn build(scheme: Scheme, s: &mut Settings) -> Result<Self> {
        s.check_keys(&allowed_keys(scheme), scheme.name())?;
        Ok(match scheme {
            Scheme::Tpt => System::Tpt(build_tpt(s)?),
            Scheme::Floquet => System::Floquet(build_floquet(s)?),
            Scheme::PulseTrain => System::PulseTrain(build_pulsetrain(s)?),
        })
    }

    pub fn model(&self) -> &dyn SignalModel {
        match self {
            System::Tpt(x) => x,
            System::Floquet(x) => x,
            System::PulseTrain(x) => x,
        }
    }

    /// Quantities implied by the settings, for the trace header.
    pub fn derived(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        match self {
            System::Tpt(t) => {
                v.push(("dispersion-a".into(), fmt(t.pulse().dispersion_a())));
                v.push(("phi2".into(), fmt(t.pulse().phi2())));
                v.push(("levels".into(), (t.m_lower() + t.m_upper() + 1).to_string()));
            }
            System::Floquet(f) => {
                v.push(("kappa".into(), fmt(f.kappa())));
                v.push(("delta-n".into(), fmt(f.delta_n())));
                v.push(("bandwidth".into(), fmt(f.pulse().delta_omega())));
                v.push(("n-range".into(), f.n_range().to_string()));
                v.push(("retained-bessel-power".into(), fmt(f.retained_bessel_power())));
                if let KappaForm::Mismatch { nearest_s, offset } = f.kappa_form() {
                    v.push(("kappa-mismatch".into(), format!("nearest s = {nearest_s}, offset {offset}")));
                }
            }
            System::PulseTrain(p) => {
                v.push(("half-width-m".into(), p.m().to_string()));
                v.push(("delta".into(), fmt(p.delta())));
            }
        }
        v
    }

    /// Scale that maps |amplitude| onto the unit-modulus score.
    fn unit_scale(&self) -> f64 {
        match self {
            System::PulseTrain(p) => p.omega_ge().abs(),
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Continuous,
    Discrete,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Continuous => "continuous",
            Mode::Discrete => "discrete",
        }
    }
}

pub fn rule_from_name(name: &str) -> Result<ReadoutRule> {
    match name {
        "peak" => Ok(ReadoutRule::Peak),
        "zero" => Ok(ReadoutRule::Zero),
        "line" | "line-origin" => Ok(ReadoutRule::LineOrigin),
        "unit" | "unit-modulus" => Ok(ReadoutRule::UnitModulus),
        _ => Err(CliError::invalid(
            "detector",
            format!("unknown detector `{name}`; use peak, zero, line or unit"),
        )),
    }
}

pub fn detector_config(s: &Settings) -> Result<DetectorConfig> {
    let d = DetectorConfig::default();
    let cfg = DetectorConfig {
        window: s.f64("window")?.unwrap_or(d.window),
        tau_peak: s.f64("tau-peak")?.unwrap_or(d.tau_peak),
        tau_zero: s.f64("tau-zero")?.unwrap_or(d.tau_zero),
        tau_line: s.f64("tau-line")?.unwrap_or(d.tau_line),
        tau_unit: s.f64("tau-unit")?.unwrap_or(d.tau_unit),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub struct RunOutput {
    pub scheme: Scheme,
    pub n: u64,
    pub mode: Mode,
    pub normalized: bool,
    pub samples: Vec<TraceSample>,
    pub report: FactorReport,
    pub factorization: std::result::Result<Vec<PrimePower>, String>,
    pub parameters: Vec<(String, String)>,
    pub derived: Vec<(String, String)>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Keys recorded in output headers; run plumbing is left out so that the
/// files do not depend on where or how fast they were produced.
fn recorded(key: &str) -> bool {
    !matches!(key, "out" | "threads" | "plot")
}

pub fn run(scheme: Scheme, s: &mut Settings) -> Result<RunOutput> {
    let system = System::build(scheme, s)?;
    let model = system.model();
    let n = model.number();
    let default_rule = match scheme {
        Scheme::PulseTrain => "unit",
        _ => "peak",
    };
    s.default_value("detector", default_rule);
    let rule = rule_from_name(s.raw("detector").unwrap_or(default_rule))?;
    let default_mode = match rule {
        ReadoutRule::Peak | ReadoutRule::Zero => Mode::Continuous,
        _ => Mode::Discrete,
    };
    let mode = match s.raw("mode") {
        None => default_mode,
        Some("continuous") => Mode::Continuous,
        Some("discrete") => Mode::Discrete,
        Some(v) => return Err(CliError::invalid("mode", format!("`{v}`; use continuous or discrete"))),
    };
    s.default_value("mode", mode.name());
    if mode != default_mode {
        return Err(CliError::invalid(
            "detector",
            format!("the {} rule needs a {} scan", rule.name(), default_mode.name()),
        ));
    }
    if mode == Mode::Discrete && s.contains("scan") {
        return Err(CliError::invalid("scan", "a discrete run takes `ells` only; drop `scan`"));
    }
    let cfg = detector_config(s)?;
    let ells = match s.raw("ells") {
        Some(v) => parse_ells(v)?,
        None => {
            let v = match mode {
                Mode::Continuous => default_candidates(n),
                Mode::Discrete => (2..=isqrt(n).max(2)).collect(),
            };
            let v = if v.is_empty() { vec![2] } else { v };
            s.default_value("ells", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
            v
        }
    };
    let threads = s.u64("threads")?.unwrap_or(1);
    if threads == 0 {
        return Err(CliError::invalid("threads", "at least one worker is needed"));
    }
    let (samples, normalized, report) = match mode {
        Mode::Continuous => {
            let lo_default = if scheme == Scheme::PulseTrain { 1.0 } else { 0.0 };
            let hi_default = (n as f64).sqrt() + 0.5;
            s.default_value("scan", format!("{lo_default}:{hi_default}:{DEFAULT_DENSITY}"));
            let (lo, hi, density) = parse_scan(s.raw("scan").expect("set above"))?;
            let trace = if threads == 1 {
                scan(model, lo, hi, density)?
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads as usize)
                    .build()
                    .map_err(|e| CliError::invalid("threads", e.to_string()))?;
                pool.install(|| scan_parallel(model, lo, hi, density))?
            };
            let report = match rule {
                ReadoutRule::Peak => detect_peaks(&trace, &ells, &cfg)?,
                _ => detect_zeros(&trace, &ells, &cfg)?,
            };
            (trace.samples().to_vec(), trace.is_normalized(), report)
        }
        Mode::Discrete => {
            let samples = ells
                .iter()
                .map(|&l| {
                    let xi = l as f64;
                    model
                        .amplitude(xi)
                        .map(|amplitude| TraceSample { xi, amplitude })
                        .map_err(|e| gauss_factor::Error::Evaluation { xi, source: Box::new(e) })
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let report = match rule {
                ReadoutRule::LineOrigin => {
                    let pts: Vec<(u64, f64)> = ells.iter().zip(&samples).map(|(&l, p)| (l, p.value())).collect();
                    detect_line_origin(n, &pts, &cfg)?
                }
                _ => {
                    let scale = system.unit_scale();
                    if scale == 0.0 {
                        return Err(CliError::invalid("omega-ge", "unit-modulus readout needs a nonzero drive"));
                    }
                    let pts: Vec<(u64, f64)> =
                        ells.iter().zip(&samples).map(|(&l, p)| (l, p.amplitude.norm() / scale)).collect();
                    detect_unit_modulus(n, &pts, &cfg)?
                }
            };
            (samples, false, report)
        }
    };
    let factorization = assemble_factorization(n, &report.factors_found, rule).map_err(|e| e.to_string());
    let parameters = s
        .iter()
        .filter(|(k, _, _)| recorded(k))
        .map(|(k, v, _)| (k.to_string(), v.to_string()))
        .collect();
    Ok(RunOutput {
        scheme,
        n,
        mode,
        normalized,
        samples,
        report,
        factorization,
        parameters,
        derived: system.derived(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::Source;

    #[test]
    fn manifold_defaults_satisfy_bounds() {
        for n in 2..200u64 {
            let (lo, hi) = default_manifold(n);
            let d = lo + hi + 1;
            assert!(d >= n && d <= 2 * n && 2 * lo > n && hi >= 1, "N={n}");
        }
        assert_eq!(default_manifold(15), (8, 8));
        assert_eq!(default_manifold(2), (2, 1));
    }

    #[test]
    fn n_and_delta_must_agree() {
        let mut s = Settings::new();
        s.set("n", "15", Source::Flag);
        s.set("delta", "0.0255", Source::Flag);
        let e = build_tpt(&mut s).err().unwrap();
        assert!(e.to_string().contains("`n`"), "{e}");
    }

    #[test]
    fn unknown_key_is_named() {
        let mut s = Settings::new();
        s.set("n", "15", Source::Flag);
        s.set("kappa", "3", Source::Flag);
        let e = System::build(Scheme::Tpt, &mut s).err().unwrap();
        assert!(e.to_string().contains("`kappa`"));
        assert_eq!(e.exit_code(), 2);
    }
}
