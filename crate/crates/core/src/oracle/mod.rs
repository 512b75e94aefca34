//! Numerical evaluation of the first-order excitation amplitude, independent
//! of the Gauss-sum closed forms.
//!
//! In the rotating frame the excited-state amplitude obeys
//!
//!   i dc/dt = -Omega_ee(t) c - Omega_ge h(t) exp(i delta t),    c(t0) = 0,
//!
//! whose solution is c(t1) = i Omega_ge exp(i beta(t1)) Int exp(-i beta) exp(i delta t) h dt
//! with beta' = Omega_ee(t). Both the integral (by adaptive quadrature) and
//! the differential equation (by adaptive Runge-Kutta) are provided.

pub mod ode;
pub mod quad;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::floquet::FloquetSystem;
use crate::pulse::{envelope, instantaneous_frequency, ChirpedPulse};
use crate::{Error, Result};

/// Time dependence of the excited-state energy shift Omega_ee(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Modulation {
    /// Omega_ee(t) = 0.
    None,
    /// Omega_ee(t) = amplitude cos(frequency t + phase).
    Sinusoidal { amplitude: f64, frequency: f64, phase: f64 },
    /// Omega_ee(t) = rate t / period.
    Linear { rate: f64, period: f64 },
}

impl Modulation {
    /// beta(t) = Int_0^t Omega_ee.
    pub fn beta(&self, t: f64) -> f64 {
        match *self {
            Modulation::None => 0.0,
            Modulation::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => amplitude / frequency * (frequency * t + phase).sin(),
            Modulation::Linear { rate, period } => 0.5 * rate / period * t * t,
        }
    }

    /// Omega_ee(t).
    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Modulation::None => 0.0,
            Modulation::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).cos(),
            Modulation::Linear { rate, period } => rate * t / period,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Modulation::None => Ok(()),
            Modulation::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => {
                if !(amplitude.is_finite() && phase.is_finite() && frequency.is_finite() && frequency > 0.0) {
                    return Err(invalid("modulation", "sinusoidal modulation needs a positive frequency"));
                }
                Ok(())
            }
            Modulation::Linear { rate, period } => {
                if !(rate.is_finite() && period.is_finite() && period > 0.0) {
                    return Err(invalid("modulation", "linear modulation needs a positive period"));
                }
                Ok(())
            }
        }
    }
}

/// Temporal shape h(t) of the drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    Chirped(ChirpedPulse),
    /// 2M+1 delta pulses at t = nT. Only usable by the closed forms.
    Train { m: u64, period: f64 },
    /// Normalized Gaussian of unit area times `area`, a smooth stand-in for
    /// one delta pulse.
    Gaussian { center: f64, width: f64, area: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> Complex64 {
        match *self {
            Envelope::Chirped(p) => envelope(&p, t),
            Envelope::Train { .. } => Complex64::new(0.0, 0.0),
            Envelope::Gaussian { center, width, area } => {
                let x = (t - center) / width;
                Complex64::new(area / ((2.0 * PI).sqrt() * width) * (-0.5 * x * x).exp(), 0.0)
            }
        }
    }

    /// -d/dt arg h(t).
    fn frequency(&self, t: f64) -> f64 {
        match *self {
            Envelope::Chirped(p) => instantaneous_frequency(&p, t),
            _ => 0.0,
        }
    }

    /// Shortest time scale of the envelope.
    fn time_scale(&self) -> f64 {
        match *self {
            Envelope::Chirped(p) => 1.0 / p.delta_omega(),
            Envelope::Train { period, .. } => period,
            Envelope::Gaussian { width, .. } => width,
        }
    }

    /// Center and standard deviation of |h(t)|.
    fn extent(&self) -> (f64, f64) {
        match *self {
            Envelope::Chirped(p) => (0.0, p.duration()),
            Envelope::Train { m, period } => (0.0, (m as f64 + 0.5) * period),
            Envelope::Gaussian { center, width, .. } => (center, width),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub modulation: Modulation,
    pub envelope: Envelope,
    pub delta: f64,
    pub t0: f64,
    pub t1: f64,
}

impl DriveSpec {
    pub fn new(modulation: Modulation, envelope: Envelope, delta: f64, t0: f64, t1: f64) -> Result<Self> {
        let s = Self {
            modulation,
            envelope,
            delta,
            t0,
            t1,
        };
        s.validate()?;
        Ok(s)
    }

    /// Window of +-`widths` pulse widths around a chirped pulse.
    pub fn chirped(modulation: Modulation, pulse: ChirpedPulse, delta: f64, widths: f64) -> Result<Self> {
        let w = widths * pulse.duration();
        Self::new(modulation, Envelope::Chirped(pulse), delta, -w, w)
    }

    fn validate(&self) -> Result<()> {
        self.modulation.validate()?;
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return Err(invalid("t1", "integration window needs t0 < t1"));
        }
        if !self.delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        let (c, s) = self.envelope.extent();
        let covered = match self.envelope {
            Envelope::Train { .. } => self.t0 <= c - s && self.t1 >= c + s,
            _ => self.t0 <= c - 3.0 * s && self.t1 >= c + 3.0 * s,
        };
        if !covered {
            return Err(invalid("t0", "window must cover six pulse widths or the whole train"));
        }
        Ok(())
    }

    /// Phase derivative of the integrand exp(-i beta) exp(i delta t) h(t).
    fn phase_rate(&self, t: f64) -> f64 {
        -self.modulation.rate(t) + self.delta - self.envelope.frequency(t)
    }
}

/// Breakpoints: panels of about one oscillation, refined around the
/// stationary points of the integrand phase.
fn panels(spec: &DriveSpec) -> Vec<f64> {
    let (t0, t1) = (spec.t0, spec.t1);
    let probe = 4096;
    let mut max_rate: f64 = 0.0;
    for i in 0..=probe {
        let t = t0 + (t1 - t0) * i as f64 / probe as f64;
        max_rate = max_rate.max(spec.phase_rate(t).abs());
    }
    let scale = spec.envelope.time_scale();
    let width = if max_rate > 0.0 {
        (2.0 * PI / max_rate).min(scale)
    } else {
        scale
    };
    let count = (((t1 - t0) / width).ceil() as usize).clamp(8, 2_000_000);
    let mut pts: Vec<f64> = (0..=count).map(|i| t0 + (t1 - t0) * i as f64 / count as f64).collect();
    let h = (t1 - t0) / count as f64;
    // stationary phase points located by bisection between sign changes
    let mut extra = Vec::new();
    for w in pts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (spec.phase_rate(a), spec.phase_rate(b));
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let fm = spec.phase_rate(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let s = 0.5 * (a + b);
        extra.extend([s - 0.25 * h, s, s + 0.25 * h]);
    }
    pts.extend(extra.into_iter().filter(|&x| x > t0 && x < t1));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * h);
    pts
}

const ABS_TOL: f64 = 1e-10;
const REL_TOL: f64 = 1e-12;

/// Int_{t0}^{t1} exp(-i beta(t)) exp(i delta t) h(t) dt.
pub fn excitation_integral(spec: &DriveSpec) -> Result<quad::QuadResult> {
    spec.validate()?;
    if let Envelope::Train { .. } = spec.envelope {
        return Err(invalid("envelope", "delta-pulse trains are evaluated analytically"));
    }
    let f = |t: f64| {
        let phase = -spec.modulation.beta(t) + spec.delta * t;
        spec.envelope.value(t) * Complex64::from_polar(1.0, phase)
    };
    let pts = panels(spec);
    let budget = 4 * pts.len() + 10_000;
    quad::integrate(&f, &pts, ABS_TOL, REL_TOL, budget)
}

/// c_e(t1) per unit Omega_ge from the quadrature of the first-order integral.
pub fn quadrature_amplitude(spec: &DriveSpec) -> Result<Complex64> {
    let r = excitation_integral(spec)?;
    if r.error > 1e-8 {
        return Err(Error::Accuracy {
            what: "excitation integral".into(),
            achieved: r.error,
        });
    }
    Ok(Complex64::i() * Complex64::from_polar(1.0, spec.modulation.beta(spec.t1)) * r.value)
}

/// h_n = Int exp(i delta_n t) f(t) dt over |t| <= 8 sqrt(1 + a^2)/dw for the
/// pulse of `sys`.
pub fn quadrature_hn(sys: &FloquetSystem, n: i64) -> Result<Complex64> {
    let delta_n = sys.delta() - n as f64 * sys.spacing();
    let spec = DriveSpec::chirped(Modulation::None, *sys.pulse(), delta_n, 8.0)?;
    let r = excitation_integral(&spec)?;
    if r.error > 1e-8 {
        return Err(Error::Accuracy {
            what: format!("sideband integral n = {n}"),
            achieved: r.error,
        });
    }
    Ok(r.value)
}

/// Drive of the modulated system of `sys` at chirp xi, over +-`widths` pulse
/// widths.
pub fn floquet_drive(sys: &FloquetSystem, xi: f64, widths: f64) -> Result<DriveSpec> {
    let s = sys.with_xi(xi)?;
    let modulation = Modulation::Sinusoidal {
        amplitude: s.kappa() * s.spacing(),
        frequency: s.spacing(),
        phase: s.phi(),
    };
    DriveSpec::chirped(modulation, *s.pulse(), s.delta(), widths)
}

/// c_e(t1) from time-stepping the rotating-frame equation with c_e(t0) = 0.
pub fn ode_amplitude(spec: &DriveSpec, rabi_ge: f64) -> Result<Complex64> {
    spec.validate()?;
    if let Envelope::Train { .. } = spec.envelope {
        return Err(invalid("envelope", "delta-pulse trains are evaluated analytically"));
    }
    if rabi_ge == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let i = Complex64::i();
    let f = |t: f64, c: Complex64| {
        i * spec.modulation.rate(t) * c + i * rabi_ge * spec.envelope.value(t) * Complex64::from_polar(1.0, spec.delta * t)
    };
    let (t0, t1) = (spec.t0, spec.t1);
    let mut max_rate: f64 = 0.0;
    for k in 0..=2048 {
        let t = t0 + (t1 - t0) * k as f64 / 2048.0;
        max_rate = max_rate.max(spec.modulation.rate(t).abs()).max(spec.delta.abs());
    }
    let mut max_step = 0.25 * spec.envelope.time_scale();
    if max_rate > 0.0 {
        max_step = max_step.min(1.0 / max_rate);
    }
    let opts = ode::OdeOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-13 * rabi_ge.abs(),
        max_step,
        max_steps: 20_000_000,
    };
    ode::integrate(&f, t0, t1, Complex64::new(0.0, 0.0), &opts)
}

/// Nested two-photon time integral
///
///   I = Int dt f(t) exp(-i d t) Int_{-inf}^{t} dt' f(t') exp(i d t')
///
/// for the envelope f of `pulse` and intermediate detuning d, over
/// +-`widths` pulse widths, by time-stepping both integrals together.
pub fn two_photon_integral(pulse: &ChirpedPulse, detuning: f64, widths: f64) -> Result<Complex64> {
    if !(widths.is_finite() && widths >= 3.0) {
        return Err(invalid("widths", "window must cover at least 3 pulse widths"));
    }
    if !detuning.is_finite() {
        return Err(invalid("detuning", "must be finite"));
    }
    let half = widths * pulse.duration();
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let f = envelope(pulse, t);
        dy[0] = f * Complex64::from_polar(1.0, detuning * t);
        dy[1] = f * Complex64::from_polar(1.0, -detuning * t) * y[0];
    };
    let max_rate = instantaneous_frequency(pulse, half).abs() + detuning.abs();
    let mut max_step = 0.25 * pulse.duration();
    if max_rate > 0.0 {
        max_step = max_step.min(1.0 / max_rate);
    }
    let scale = PI / (pulse.delta_omega() * pulse.delta_omega());
    let opts = ode::OdeOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-14 * scale,
        max_step,
        max_steps: 50_000_000,
    };
    let zero = Complex64::new(0.0, 0.0);
    let y = ode::integrate_system(&rhs, -half, half, &[zero, zero], &opts)?;
    Ok(y[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{floquet_amplitude, kappa_for_parity, sideband_integral_hn};

    #[test]
    fn zero_envelope_gives_zero() {
        let spec = DriveSpec::new(
            Modulation::None,
            Envelope::Gaussian {
                center: 0.0,
                width: 1.0,
                area: 0.0,
            },
            0.3,
            -10.0,
            10.0,
        )
        .unwrap();
        assert_eq!(quadrature_amplitude(&spec).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(ode_amplitude(&spec, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unmodulated_drive_is_single_sideband() {
        let sys = FloquetSystem::from_sideband_width(0.063, 0.003, kappa_for_parity(10), 0.3, 12.71)
            .unwrap()
            .with_xi(2.5)
            .unwrap();
        let spec = DriveSpec::chirped(Modulation::None, *sys.pulse(), 0.05, 8.0).unwrap();
        let q = quadrature_amplitude(&spec).unwrap();
        let dw = sys.pulse().delta_omega();
        let x = 0.05 / dw;
        let want = Complex64::i()
            * Complex64::from_polar((2.0 * PI).sqrt() / dw * (-0.5 * x * x).exp(), 0.5 * 0.05 * 0.05 * sys.pulse().phi2());
        assert!((q - want).norm() < 1e-8);
    }

    #[test]
    fn two_photon_integral_matches_erfc_form() {
        use crate::specfun::erfc_complex;
        let pulse = ChirpedPulse::from_dispersion(0.15, -6.0).unwrap();
        let dw = pulse.delta_omega();
        for &d in &[0.0, 0.05, -0.12, 0.3] {
            let u = d / dw;
            let z = Complex64::i() * u * Complex64::new(1.0, 6.0).sqrt();
            let want = PI / (dw * dw) * (-u * u).exp() * erfc_complex(z).unwrap().norm();
            let got = two_photon_integral(&pulse, d, 10.0).unwrap().norm();
            assert!((got - want).abs() < 1e-7 * want, "d={d} got={got} want={want}");
        }
    }

    #[test]
    fn resonant_sideband_integral() {
        let sys = FloquetSystem::from_sideband_width(0.063, 0.003, kappa_for_parity(10), 0.0, 12.71).unwrap();
        let h = quadrature_hn(&sys, 21).unwrap();
        let dw = sys.pulse().delta_omega();
        assert!((h - Complex64::new((2.0 * PI).sqrt() / dw, 0.0)).norm() < 1e-8);
        let h = quadrature_hn(&sys, 30).unwrap();
        assert!(h.im.abs() < 1e-10);
        assert!((h - sideband_integral_hn(&sys, 30)).norm() < 1e-8);
    }

    #[test]
    fn small_modulated_system_matches_gauss_sum() {
        // few sidebands so that the test stays fast
        let sys = FloquetSystem::from_sideband_width(0.05, 0.01, 3.3, 0.4, 1.5).unwrap();
        for &xi in &[1.0, 2.0, 3.5] {
            let spec = floquet_drive(&sys, xi, 9.0).unwrap();
            let q = quadrature_amplitude(&spec).unwrap().norm() * sys.spacing() / (2.0 * PI);
            let a = floquet_amplitude(&sys, xi).norm();
            assert!((q - a).abs() < 1e-7 * a, "xi={xi} q={q} a={a}");
        }
    }

    #[test]
    fn ode_matches_quadrature() {
        let sys = FloquetSystem::from_sideband_width(0.05, 0.01, 3.3, 0.4, 1.5).unwrap();
        let spec = floquet_drive(&sys, 1.7, 9.0).unwrap();
        let q = quadrature_amplitude(&spec).unwrap();
        let o = ode_amplitude(&spec, 1.0).unwrap();
        assert!((q - o).norm() < 1e-6 * q.norm(), "q={q} o={o}");
    }

    #[test]
    fn trains_are_rejected() {
        let spec = DriveSpec::new(
            Modulation::Linear { rate: 1.0, period: 1.0 },
            Envelope::Train { m: 2, period: 1.0 },
            1.0,
            -3.0,
            3.0,
        )
        .unwrap();
        assert!(quadrature_amplitude(&spec).is_err());
        assert!(ode_amplitude(&spec, 1.0).is_err());
    }
}
