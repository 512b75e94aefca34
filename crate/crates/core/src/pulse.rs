//! Gaussian laser pulses with a quadratic spectral phase.
//!
//! Units are femtoseconds and fs^-1. The field is
//! E(t) = E0 f(t) exp(-i omega_L t) (plus c.c.), with complex envelope
//! f(t) = f0 exp[-(dw f0 t)^2 / 2] and f0 = sqrt((1 + i a)/(1 + a^2)).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpedPulse {
    omega_l: f64,
    delta_omega: f64,
    phi2: f64,
    e0: f64,
}

impl ChirpedPulse {
    pub fn new(omega_l: f64, delta_omega: f64, phi2: f64, e0: f64) -> Result<Self> {
        if !omega_l.is_finite() {
            return Err(invalid("omega_L", "must be finite"));
        }
        if !(delta_omega.is_finite() && delta_omega > 0.0) {
            return Err(invalid("delta_omega", "bandwidth must be positive"));
        }
        if !(e0.is_finite() && e0 > 0.0) {
            return Err(invalid("E0", "field amplitude must be positive"));
        }
        let a = delta_omega * delta_omega * phi2;
        if !(phi2.is_finite() && a.is_finite()) {
            return Err(invalid("phi2", "dispersion must be finite"));
        }
        Ok(Self {
            omega_l,
            delta_omega,
            phi2,
            e0,
        })
    }

    /// Unit-amplitude pulse at zero carrier (rotating frame).
    pub fn with_bandwidth(delta_omega: f64, phi2: f64) -> Result<Self> {
        Self::new(0.0, delta_omega, phi2, 1.0)
    }

    /// Pulse whose dimensionless dispersion equals `a`.
    pub fn from_dispersion(delta_omega: f64, a: f64) -> Result<Self> {
        if !(delta_omega.is_finite() && delta_omega > 0.0) {
            return Err(invalid("delta_omega", "bandwidth must be positive"));
        }
        Self::with_bandwidth(delta_omega, a / (delta_omega * delta_omega))
    }

    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    /// Copy with a different quadratic spectral phase.
    pub fn with_phi2(&self, phi2: f64) -> Result<Self> {
        Self::new(self.omega_l, self.delta_omega, phi2, self.e0)
    }

    pub fn dispersion_a(&self) -> f64 {
        dispersion_a(self)
    }

    /// Temporal 1/e half-width of |f|^2 scaled: sqrt(1 + a^2)/dw.
    pub fn duration(&self) -> f64 {
        let a = self.dispersion_a();
        a.hypot(1.0) / self.delta_omega
    }
}

/// a = dw^2 phi''.
pub fn dispersion_a(p: &ChirpedPulse) -> f64 {
    p.delta_omega * p.delta_omega * p.phi2
}

/// f0 = sqrt((1 + i a)/(1 + a^2)), principal branch.
pub fn f0(p: &ChirpedPulse) -> Complex64 {
    f0_of(dispersion_a(p))
}

pub(crate) fn f0_of(a: f64) -> Complex64 {
    // (1 + i a)/(1 + a^2) = 1/(1 - i a)
    (Complex64::new(1.0, -a).inv()).sqrt()
}

/// Complex envelope f(t).
pub fn envelope(p: &ChirpedPulse, t: f64) -> Complex64 {
    let a = dispersion_a(p);
    let f = f0_of(a);
    // (dw f0 t)^2 = dw^2 t^2 (1 + i a)/(1 + a^2)
    let g = p.delta_omega * t;
    let s = 1.0 + a * a;
    let arg = Complex64::new(-0.5 * g * g / s, -0.5 * a * g * g / s);
    f * arg.exp()
}

/// nu(t) = a dw^2 t / (1 + a^2), the time derivative of -arg f(t).
pub fn instantaneous_frequency(p: &ChirpedPulse, t: f64) -> f64 {
    let a = dispersion_a(p);
    a * p.delta_omega * p.delta_omega * t / (1.0 + a * a)
}
