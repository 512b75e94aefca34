use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Tpt,
    Floquet,
    #[serde(rename = "pulsetrain")]
    PulseTrain,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tpt => "tpt",
            Scheme::Floquet => "floquet",
            Scheme::PulseTrain => "pulsetrain",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Anything that yields an excitation amplitude as a function of the scan
/// variable xi.
pub trait SignalModel: Sync {
    fn scheme(&self) -> Scheme;
    /// The integer encoded by the physical parameters.
    fn number(&self) -> u64;
    fn amplitude(&self, xi: f64) -> Result<Complex64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub xi: f64,
    pub amplitude: Complex64,
}

impl TraceSample {
    /// Excitation probability |c|^2.
    pub fn value(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// Sampled excitation probability versus xi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalTrace {
    scheme: Scheme,
    n: u64,
    samples: Vec<TraceSample>,
    normalized: bool,
}

impl SignalTrace {
    pub fn new(scheme: Scheme, n: u64, samples: Vec<TraceSample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[0].xi < w[1].xi)) {
            return Err(invalid("samples", "abscissae must be strictly increasing"));
        }
        if samples
            .iter()
            .any(|s| !(s.xi.is_finite() && s.amplitude.re.is_finite() && s.amplitude.im.is_finite()))
        {
            return Err(invalid("samples", "samples must be finite"));
        }
        Ok(Self {
            scheme,
            n,
            samples,
            normalized: false,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(TraceSample::value).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().map(TraceSample::value).fold(0.0, f64::max)
    }

    /// Scales amplitudes so that the largest |c|^2 is one. An all-zero trace
    /// is left unnormalized.
    pub fn normalized(mut self) -> Self {
        let max = self.max_value();
        if max > 0.0 {
            let s = 1.0 / max.sqrt();
            for v in &mut self.samples {
                v.amplitude *= s;
            }
            // the scaled maximum can miss one by an ulp
            if let Some(top) = self
                .samples
                .iter_mut()
                .max_by(|a, b| a.value().total_cmp(&b.value()))
            {
                let r = top.value();
                if r != 1.0 {
                    top.amplitude /= r.sqrt();
                }
            }
            self.normalized = true;
        }
        self
    }

    /// Copy with every abscissa mapped through `f` and a new encoded number.
    pub(crate) fn rescaled(&self, n: u64, f: impl Fn(f64) -> f64) -> Self {
        Self {
            scheme: self.scheme,
            n,
            samples: self
                .samples
                .iter()
                .map(|s| TraceSample {
                    xi: f(s.xi),
                    amplitude: s.amplitude,
                })
                .collect(),
            normalized: self.normalized,
        }
    }

    /// Index range of samples with xi in [lo, hi].
    pub fn window(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.samples.partition_point(|s| s.xi < lo);
        let b = self.samples.partition_point(|s| s.xi <= hi);
        a..b.max(a)
    }
}

/// Abscissae xi_min + i / samples_per_unit up to xi_max.
pub fn sample_grid(xi_min: f64, xi_max: f64, samples_per_unit: f64) -> Result<Vec<f64>> {
    if !(xi_min.is_finite() && xi_max.is_finite()) {
        return Err(invalid("scan", "range must be finite"));
    }
    if xi_max < xi_min {
        return Err(invalid("scan", format!("empty range [{xi_min}, {xi_max}]")));
    }
    if !(samples_per_unit.is_finite() && samples_per_unit >= 10.0) {
        return Err(invalid("scan", "density must be at least 10 samples per unit"));
    }
    let count = ((xi_max - xi_min) * samples_per_unit + 1e-9).floor() as usize + 1;
    if count > 50_000_000 {
        return Err(invalid("scan", format!("{count} samples requested")));
    }
    Ok((0..count).map(|i| xi_min + i as f64 / samples_per_unit).collect())
}

fn evaluate(model: &dyn SignalModel, xi: f64) -> Result<TraceSample> {
    model
        .amplitude(xi)
        .map(|amplitude| TraceSample { xi, amplitude })
        .map_err(|e| Error::Evaluation {
            xi,
            source: Box::new(e),
        })
}

/// Uniformly sampled, normalized trace.
pub fn scan(model: &dyn SignalModel, xi_min: f64, xi_max: f64, samples_per_unit: f64) -> Result<SignalTrace> {
    let grid = sample_grid(xi_min, xi_max, samples_per_unit)?;
    let samples = grid.into_iter().map(|x| evaluate(model, x)).collect::<Result<Vec<_>>>()?;
    Ok(SignalTrace::new(model.scheme(), model.number(), samples)?.normalized())
}

/// [`scan`] with the samples evaluated on the current rayon pool. The result
/// is identical to the sequential scan.
pub fn scan_parallel(
    model: &dyn SignalModel,
    xi_min: f64,
    xi_max: f64,
    samples_per_unit: f64,
) -> Result<SignalTrace> {
    let grid = sample_grid(xi_min, xi_max, samples_per_unit)?;
    let samples = grid
        .into_par_iter()
        .map(|x| evaluate(model, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignalTrace::new(model.scheme(), model.number(), samples)?.normalized())
}
