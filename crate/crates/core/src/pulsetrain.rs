//! Two-level system whose excited-state energy is swept linearly in time and
//! which is driven by 2M+1 delta pulses separated by T.
//!
//! With N = delta T / (2 pi) and xi = 2 delta / Omega_ee the excitation
//! amplitude after the train is i Omega_ge A_N(xi) up to a phase, where
//! A_N(xi) = (1/(2M+1)) Sum_n exp(-2 pi i n^2 N / xi).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{Scheme, SignalModel};
use crate::error::invalid;
use crate::gauss_core::{pairwise_sum, reciprocal_a, UniformSumSpec};
use crate::tpt::integer_ratio;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrainSystem {
    delta: f64,
    period: f64,
    omega_ee: f64,
    m: u64,
    omega_ge: f64,
    n: u64,
}

/// N = delta T / (2 pi).
pub fn encode_n_pt(delta: f64, period: f64) -> Result<u64> {
    if !(period.is_finite() && period > 0.0) {
        return Err(invalid("T", "pulse separation must be positive"));
    }
    integer_ratio(delta * period / (2.0 * PI), "delta T / (2 pi)")
}

/// xi = 2 delta / Omega_ee.
pub fn xi_pt(delta: f64, omega_ee: f64) -> Result<f64> {
    if !(omega_ee.is_finite() && omega_ee > 0.0) {
        return Err(invalid("Omega_ee", "sweep rate must be positive"));
    }
    Ok(2.0 * delta / omega_ee)
}

// Scan points that are integers up to a few ulps are treated as integers so
// that the exact lattice path applies.
fn snap(xi: f64) -> f64 {
    let k = xi.round();
    if (xi - k).abs() <= 8.0 * f64::EPSILON * xi.abs() {
        k
    } else {
        xi
    }
}

impl PulseTrainSystem {
    pub fn new(delta: f64, period: f64, omega_ee: f64, m: u64, omega_ge: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", "detuning must be positive"));
        }
        let n = encode_n_pt(delta, period)?;
        xi_pt(delta, omega_ee)?;
        if m < 1 {
            return Err(invalid("M", "the train needs at least 3 pulses"));
        }
        if !omega_ge.is_finite() {
            return Err(invalid("Omega_ge", "must be finite"));
        }
        Ok(Self {
            delta,
            period,
            omega_ee,
            m,
            omega_ge,
            n,
        })
    }

    /// Unit drive, sweep tuned to xi.
    pub fn for_number(n: u64, period: f64, m: u64, xi: f64) -> Result<Self> {
        let delta = 2.0 * PI * n as f64 / period;
        if !(xi.is_finite() && xi > 0.0) {
            return Err(invalid("xi", "must be positive"));
        }
        Self::new(delta, period, 2.0 * delta / xi, m, 1.0)
    }

    /// Same train with the sweep set so that xi = 2 delta / Omega_ee.
    pub fn tuned_to(&self, xi: f64) -> Result<Self> {
        if !(xi.is_finite() && xi > 0.0) {
            return Err(invalid("xi", "must be positive"));
        }
        Self::new(self.delta, self.period, 2.0 * self.delta / xi, self.m, self.omega_ge)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega_ee(&self) -> f64 {
        self.omega_ee
    }

    pub fn omega_ge(&self) -> f64 {
        self.omega_ge
    }

    /// Half-width M; the train has 2M+1 pulses.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn xi(&self) -> f64 {
        2.0 * self.delta / self.omega_ee
    }

    fn sum_spec(&self) -> UniformSumSpec {
        UniformSumSpec::new(self.m, self.n).expect("validated at construction")
    }

    fn amplitude_at(&self, xi: f64) -> Result<Complex64> {
        Ok(self.omega_ge * reciprocal_a(&self.sum_spec(), snap(xi))?)
    }
}

/// Omega_ge A_N(xi) for the sweep of `sys`, global phase dropped.
pub fn pt_amplitude(sys: &PulseTrainSystem) -> Result<Complex64> {
    sys.amplitude_at(sys.xi())
}

/// The same amplitude from the per-pulse phases delta T n - Omega_ee T n^2 / 2
/// summed directly in radians.
pub fn pt_direct_sum(sys: &PulseTrainSystem) -> Complex64 {
    let m = sys.m as i64;
    let terms: Vec<Complex64> = (-m..=m)
        .map(|k| {
            let t = k as f64 * sys.period;
            Complex64::from_polar(1.0, sys.delta * t - 0.5 * sys.omega_ee * t * t / sys.period)
        })
        .collect();
    sys.omega_ge * pairwise_sum(&terms) / (2 * m + 1) as f64
}

/// |A_N(ell)| for each trial factor, tuning the sweep to Omega_ee = 2 delta / ell.
pub fn pt_discrete_scan(template: &PulseTrainSystem, ells: &[u64]) -> Result<Vec<f64>> {
    let spec = template.sum_spec();
    ells.iter()
        .map(|&l| {
            if l == 0 {
                return Err(invalid("ell", "trial factors start at 1"));
            }
            Ok(reciprocal_a(&spec, l as f64)?.norm())
        })
        .collect()
}

impl SignalModel for PulseTrainSystem {
    fn scheme(&self) -> Scheme {
        Scheme::PulseTrain
    }

    fn number(&self) -> u64 {
        self.n
    }

    fn amplitude(&self, xi: f64) -> Result<Complex64> {
        self.amplitude_at(xi)
    }
}
