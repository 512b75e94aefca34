use serde::{Deserialize, Serialize};

use super::factorize::gcd;
use super::trace::SignalTrace;
use crate::error::invalid;
use crate::{Error, Result};

/// Readout rule that turned a trace into verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutRule {
    Peak,
    Zero,
    LineOrigin,
    UnitModulus,
}

impl ReadoutRule {
    pub fn name(self) -> &'static str {
        match self {
            ReadoutRule::Peak => "peak",
            ReadoutRule::Zero => "zero",
            ReadoutRule::LineOrigin => "line-origin",
            ReadoutRule::UnitModulus => "unit-modulus",
        }
    }
}

impl std::fmt::Display for ReadoutRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Factor,
    NonFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub ell: u64,
    pub score: f64,
    pub verdict: Verdict,
}

/// Thresholds of the readout rules. The defaults were calibrated on the
/// N = 15, 21, 105 and 1911 scenarios; they are not universal constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Half-width of the window around each integer, in units of xi.
    pub window: f64,
    /// Peak: window maximum relative to the best candidate.
    pub tau_peak: f64,
    /// Zero: window minimum relative to the trace median.
    pub tau_zero: f64,
    /// Line: allowed relative deviation from the fitted line.
    pub tau_line: f64,
    /// Unit modulus: allowed shortfall from one.
    pub tau_unit: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window: 0.05,
            tau_peak: 0.4,
            tau_zero: 0.1,
            tau_line: 0.2,
            tau_unit: 1e-6,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window <= 0.5) {
            return Err(invalid("window", format!("{} outside (0, 0.5]", self.window)));
        }
        for (field, v) in [
            ("tau_peak", self.tau_peak),
            ("tau_zero", self.tau_zero),
            ("tau_line", self.tau_line),
            ("tau_unit", self.tau_unit),
        ] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(invalid(field, format!("{v} outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// A candidate that could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateError {
    pub ell: u64,
    pub message: String,
}

/// Trial factors whose scores match that of a smaller factor they are a
/// multiple of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipleGroup {
    pub base: u64,
    pub members: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub n: u64,
    pub rule: ReadoutRule,
    pub trials: Vec<Trial>,
    /// Positive verdicts confirmed to divide N.
    pub factors_found: Vec<u64>,
    /// Positive verdicts sharing a factor with N without dividing it.
    pub multiples: Vec<u64>,
    /// Positive verdicts coprime to N.
    pub contradictions: Vec<u64>,
    pub candidate_errors: Vec<CandidateError>,
    pub multiple_groups: Vec<MultipleGroup>,
    /// Slope of the fitted line (line-origin rule only).
    pub line_slope: Option<f64>,
    pub config: DetectorConfig,
}

impl FactorReport {
    fn build(n: u64, rule: ReadoutRule, trials: Vec<Trial>, config: DetectorConfig) -> Self {
        let mut factors_found = Vec::new();
        let mut multiples = Vec::new();
        let mut contradictions = Vec::new();
        for t in trials.iter().filter(|t| t.verdict == Verdict::Factor) {
            if n.is_multiple_of(t.ell) {
                factors_found.push(t.ell);
            } else if gcd(n, t.ell) > 1 {
                multiples.push(t.ell);
            } else {
                contradictions.push(t.ell);
            }
        }
        Self {
            n,
            rule,
            trials,
            factors_found,
            multiples,
            contradictions,
            candidate_errors: Vec::new(),
            multiple_groups: Vec::new(),
            line_slope: None,
            config,
        }
    }

    /// Positive verdicts in trial order, before the divisibility check.
    pub fn positives(&self) -> Vec<u64> {
        self.trials
            .iter()
            .filter(|t| t.verdict == Verdict::Factor)
            .map(|t| t.ell)
            .collect()
    }

    pub fn score(&self, ell: u64) -> Option<f64> {
        self.trials.iter().find(|t| t.ell == ell).map(|t| t.score)
    }

    /// Fails when the readout flagged a trial factor coprime to N.
    pub fn check_divisibility(&self) -> Result<()> {
        match self.contradictions.first() {
            Some(&value) => Err(Error::Contradiction {
                rule: self.rule.name().to_string(),
                value,
                n: self.n,
            }),
            None => Ok(()),
        }
    }
}

enum WindowStat {
    Max,
    Min,
}

fn window_scores(
    trace: &SignalTrace,
    candidates: &[u64],
    config: &DetectorConfig,
    stat: WindowStat,
) -> Result<(Vec<(u64, f64, bool)>, Vec<CandidateError>)> {
    config.validate()?;
    let values = trace.values();
    let samples = trace.samples();
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (a.xi, b.xi),
        _ => return Err(invalid("trace", "trace has no samples")),
    };
    let mut scored = Vec::new();
    let mut errors = Vec::new();
    for &ell in candidates {
        let x = ell as f64;
        let r = trace.window(x - config.window, x + config.window);
        if x < first || x > last || r.is_empty() {
            errors.push(CandidateError {
                ell,
                message: format!("xi = {ell} outside the trace range [{first}, {last}]"),
            });
            continue;
        }
        let slice = &values[r.clone()];
        let (k, v) = match stat {
            WindowStat::Max => slice
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc }),
            WindowStat::Min => slice
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc }),
        };
        // a genuine extremum lies strictly inside the window
        let i = r.start + k;
        let interior = k > 0 && k + 1 < slice.len() && i > 0 && i + 1 < values.len();
        let local = interior
            && match stat {
                WindowStat::Max => values[i - 1] <= v && values[i + 1] <= v,
                WindowStat::Min => values[i - 1] >= v && values[i + 1] >= v,
            };
        scored.push((ell, v, local));
    }
    Ok((scored, errors))
}

/// Peak rule: ell is flagged when the trace has a local maximum within the
/// window around ell that reaches tau_peak times the best candidate score.
pub fn detect_peaks(trace: &SignalTrace, candidates: &[u64], config: &DetectorConfig) -> Result<FactorReport> {
    let (scored, errors) = window_scores(trace, candidates, config, WindowStat::Max)?;
    let best = scored.iter().map(|s| s.1).fold(0.0, f64::max);
    let trials = scored
        .iter()
        .map(|&(ell, score, local)| Trial {
            ell,
            score,
            verdict: if best > 0.0 && local && score >= config.tau_peak * best {
                Verdict::Factor
            } else {
                Verdict::NonFactor
            },
        })
        .collect();
    let mut report = FactorReport::build(trace.n(), ReadoutRule::Peak, trials, *config);
    report.candidate_errors = errors;
    Ok(report)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Zero rule: ell is flagged when the window minimum falls below tau_zero
/// times the median of the whole trace.
pub fn detect_zeros(trace: &SignalTrace, candidates: &[u64], config: &DetectorConfig) -> Result<FactorReport> {
    let (scored, errors) = window_scores(trace, candidates, config, WindowStat::Min)?;
    let threshold = config.tau_zero * median(&trace.values());
    let trials = scored
        .iter()
        .map(|&(ell, score, _)| Trial {
            ell,
            score,
            verdict: if score < threshold {
                Verdict::Factor
            } else {
                Verdict::NonFactor
            },
        })
        .collect();
    let mut report = FactorReport::build(trace.n(), ReadoutRule::Zero, trials, *config);
    report.candidate_errors = errors;
    Ok(report)
}

fn check_points(points: &[(u64, f64)]) -> Result<()> {
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("points", "trial factors must be strictly increasing"));
    }
    if points.iter().any(|p| p.0 == 0 || !p.1.is_finite() || p.1 < 0.0) {
        return Err(Error::InconsistentInput(
            "scores must be finite and nonnegative at positive ell".into(),
        ));
    }
    Ok(())
}

/// Line rule: fits score = c * ell through the origin to the upper envelope
/// of the points and flags every point within tau_line of the line.
pub fn detect_line_origin(n: u64, points: &[(u64, f64)], config: &DetectorConfig) -> Result<FactorReport> {
    config.validate()?;
    if points.len() < 3 {
        return Err(Error::NoFit(format!("{} points; at least 3 are needed", points.len())));
    }
    check_points(points)?;
    if points.iter().all(|p| p.1 == 0.0) {
        return Err(Error::NoFit("all scores are zero".into()));
    }
    let tau = config.tau_line;
    let mut accepted: Vec<(f64, f64)> = points.iter().map(|&(l, s)| (l as f64, s)).filter(|p| p.1 > 0.0).collect();
    let fit = |set: &[(f64, f64)]| {
        let num: f64 = set.iter().map(|p| p.0 * p.1).sum();
        let den: f64 = set.iter().map(|p| p.0 * p.0).sum();
        num / den
    };
    let mut c = fit(&accepted);
    loop {
        let before = accepted.len();
        accepted.retain(|p| p.1 >= (1.0 - tau) * c * p.0);
        if accepted.len() == before {
            break;
        }
        c = fit(&accepted);
    }
    let trials: Vec<Trial> = points
        .iter()
        .map(|&(ell, score)| {
            let line = c * ell as f64;
            Trial {
                ell,
                score,
                verdict: if (score - line).abs() <= tau * line {
                    Verdict::Factor
                } else {
                    Verdict::NonFactor
                },
            }
        })
        .collect();
    let mut report = FactorReport::build(n, ReadoutRule::LineOrigin, trials, *config);
    report.line_slope = Some(c);
    for base in report.positives() {
        let s = report.score(base).unwrap_or(0.0);
        let members: Vec<u64> = points
            .iter()
            .filter(|p| p.0 != base && p.0 % base == 0 && (p.1 - s).abs() <= tau * s)
            .map(|p| p.0)
            .collect();
        if !members.is_empty() {
            report.multiple_groups.push(MultipleGroup { base, members });
        }
    }
    Ok(report)
}

/// Unit-modulus rule: flags every ell with |A_N(ell)| >= 1 - tau_unit.
pub fn detect_unit_modulus(n: u64, points: &[(u64, f64)], config: &DetectorConfig) -> Result<FactorReport> {
    config.validate()?;
    check_points(points)?;
    if let Some(p) = points.iter().find(|p| p.1 > 1.0 + 1e-9) {
        return Err(Error::InconsistentInput(format!(
            "score {} at ell = {} exceeds one",
            p.1, p.0
        )));
    }
    let trials = points
        .iter()
        .map(|&(ell, score)| Trial {
            ell,
            score,
            verdict: if score >= 1.0 - config.tau_unit {
                Verdict::Factor
            } else {
                Verdict::NonFactor
            },
        })
        .collect();
    Ok(FactorReport::build(n, ReadoutRule::UnitModulus, trials, *config))
}
