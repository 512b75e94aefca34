//! Chirped one-photon excitation of a level whose energy is modulated as
//! Omega_ee cos(Delta t + phi).
//!
//! The modulation dresses the excited state with sidebands n at detunings
//! delta_n = delta - n Delta, weighted by J_n(kappa) with kappa =
//! Omega_ee/Delta. For a Gaussian pulse of bandwidth dw = dn * Delta and
//! chirp xi = delta Delta phi'' / pi the excitation amplitude is
//!
//!   Sum_n w_n exp[-i pi (n - n^2/(2N)) xi],
//!   w_n = exp[-((n - N)/dn)^2 / 2] J_n(kappa) exp(-i n phi) / (sqrt(2 pi) dn),
//!
//! with N = delta/Delta, up to a prefactor of modulus 2 pi |Omega_ge| / Delta.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{Scheme, SignalModel};
use crate::error::invalid;
use crate::gauss_core::{pairwise_sum, phasor, Weights, WeightedGaussSumSpec};
use crate::pulse::ChirpedPulse;
use crate::specfun::bessel_j_orders;
use crate::tpt::integer_ratio;
use crate::{Error, Result};

/// One dressed sideband of the modulated level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandTerm {
    pub n: i64,
    pub delta_n: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSystem {
    delta: f64,
    spacing: f64,
    kappa: f64,
    phi: f64,
    pulse: ChirpedPulse,
    n_range: u64,
    n: u64,
    // J_n(kappa) times the modulation phase, for every retained sideband
    bessel: Weights,
    weights: WeightedGaussSumSpec,
    reduced: WeightedGaussSumSpec,
}

/// Where kappa sits relative to the odd-sideband suppressing values
/// 2 pi s + pi/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KappaForm {
    Matched { s: u64 },
    Mismatch { nearest_s: i64, offset: f64 },
}

/// kappa = 2 pi s + pi/4.
pub fn kappa_for_parity(s: u64) -> f64 {
    2.0 * PI * s as f64 + 0.25 * PI
}

/// N = delta / Delta.
pub fn encode_n_floquet(delta: f64, spacing: f64) -> Result<u64> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(invalid("Delta", "modulation frequency must be positive"));
    }
    integer_ratio(delta / spacing, "delta / Delta")
}

/// Smallest symmetric sideband window covering both the Gaussian and the
/// Bessel support. The Bessel transition region |n| ~ kappa widens like
/// kappa^(1/3), hence the extra margin.
pub fn default_n_range(n: u64, delta_n: f64, kappa: f64) -> u64 {
    let gauss = (n as f64 + 8.0 * delta_n).ceil();
    let k = kappa.abs();
    let bessel = k.ceil() + 40.0 + (10.0 * k.cbrt()).ceil();
    gauss.max(bessel) as u64
}

// The Gaussian factor underflows beyond this many standard deviations.
const GAUSS_CUTOFF: f64 = 38.5;

/// Largest modulation index accepted; the recurrence table grows with kappa.
pub const MAX_KAPPA: f64 = 1e7;

impl FloquetSystem {
    pub fn new(delta: f64, spacing: f64, kappa: f64, phi: f64, pulse: ChirpedPulse) -> Result<Self> {
        let n = encode_n_floquet(delta, spacing)?;
        let delta_n = pulse.delta_omega() / spacing;
        Self::build(delta, spacing, kappa, phi, pulse, default_n_range(n, delta_n, kappa))
    }

    /// System whose pulse bandwidth is dn * Delta and whose chirp is zero.
    pub fn from_sideband_width(delta: f64, spacing: f64, kappa: f64, phi: f64, delta_n: f64) -> Result<Self> {
        if !(delta_n.is_finite() && delta_n > 0.0) {
            return Err(invalid("delta_n", "sideband width must be positive"));
        }
        let pulse = ChirpedPulse::with_bandwidth(delta_n * spacing, 0.0)?;
        Self::new(delta, spacing, kappa, phi, pulse)
    }

    /// Same system with an explicit sideband half-width.
    pub fn with_n_range(&self, n_range: u64) -> Result<Self> {
        Self::build(self.delta, self.spacing, self.kappa, self.phi, self.pulse, n_range)
    }

    /// Same system with the pulse chirp set to the value belonging to xi.
    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        let mut s = self.clone();
        s.pulse = self.pulse.with_phi2(PI * xi / (self.delta * self.spacing))?;
        Ok(s)
    }

    fn build(delta: f64, spacing: f64, kappa: f64, phi: f64, pulse: ChirpedPulse, n_range: u64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", "detuning must be positive"));
        }
        let n = encode_n_floquet(delta, spacing)?;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", "modulation index must be positive"));
        }
        if kappa > MAX_KAPPA {
            return Err(Error::Range(format!(
                "kappa = {kappa:e}: the Bessel recurrence needs about kappa terms (limit {MAX_KAPPA:e})"
            )));
        }
        if !phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        let delta_n = pulse.delta_omega() / spacing;
        if !(delta_n.is_finite() && delta_n > 0.0) {
            return Err(invalid("delta_n", "sideband width must be positive"));
        }
        if (n_range as f64) < n as f64 + 8.0 * delta_n {
            return Err(invalid(
                "n_range",
                format!("{n_range} is below N + 8 dn = {}", n as f64 + 8.0 * delta_n),
            ));
        }
        let range = n_range as i64;
        let lo = (n as f64 - GAUSS_CUTOFF * delta_n).floor().max(-(range as f64)) as i64;
        let hi = (n as f64 + GAUSS_CUTOFF * delta_n).ceil().min(range as f64) as i64;
        let max_order = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
        let table = bessel_j_orders(max_order, kappa);
        let j = |k: i64| {
            let v = table[k.unsigned_abs() as usize];
            if k < 0 && k % 2 != 0 {
                -v
            } else {
                v
            }
        };
        let norm = 1.0 / ((2.0 * PI).sqrt() * delta_n);
        let mut bessel = Vec::new();
        let mut weights = Vec::new();
        for k in lo..=hi {
            let x = (k as f64 - n as f64) / delta_n;
            let g = (-0.5 * x * x).exp();
            if g == 0.0 {
                continue;
            }
            let b = j(k) * Complex64::from_polar(1.0, -(k as f64) * phi);
            bessel.push((k, b));
            weights.push((k, norm * g * b));
        }
        let weights = WeightedGaussSumSpec::new(Weights::new(weights)?, -2.0, 4.0 * n as f64)?;

        // even-sideband reduction n = 2m
        let rnorm = 1.0 / (PI * delta_n * kappa.sqrt());
        let mut reduced = Vec::new();
        for m in (lo.div_euclid(2))..=(hi.div_euclid(2) + 1) {
            if (2 * m).abs() > range {
                continue;
            }
            let x = (m as f64 - 0.5 * n as f64) / delta_n;
            let g = (-2.0 * x * x).exp();
            if g == 0.0 {
                continue;
            }
            reduced.push((m, rnorm * g * Complex64::from_polar(1.0, m as f64 * (PI - 2.0 * phi))));
        }
        let reduced = WeightedGaussSumSpec::new(Weights::new(reduced)?, -1.0, n as f64)?;

        Ok(Self {
            delta,
            spacing,
            kappa,
            phi,
            pulse,
            n_range,
            n,
            bessel: Weights::new(bessel)?,
            weights,
            reduced,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn pulse(&self) -> &ChirpedPulse {
        &self.pulse
    }

    pub fn n_range(&self) -> u64 {
        self.n_range
    }

    /// dn = dw / Delta.
    pub fn delta_n(&self) -> f64 {
        self.pulse.delta_omega() / self.spacing
    }

    /// xi belonging to the current pulse chirp.
    pub fn xi(&self) -> f64 {
        self.delta * self.spacing * self.pulse.phi2() / PI
    }

    /// Sidebands with a representable weight.
    pub fn weights(&self) -> &Weights {
        self.weights.weights()
    }

    pub fn sidebands(&self) -> Vec<SidebandTerm> {
        self.weights()
            .iter()
            .map(|&(n, weight)| SidebandTerm {
                n,
                delta_n: self.delta - n as f64 * self.spacing,
                weight,
            })
            .collect()
    }

    /// Weights of the reduced even-sideband sum, indexed by m = n/2.
    pub fn reduced_weights(&self) -> &Weights {
        self.reduced.weights()
    }

    /// Sum of J_n(kappa)^2 over the sideband window |n| <= n_range.
    pub fn retained_bessel_power(&self) -> f64 {
        let table = bessel_j_orders(self.n_range as usize, self.kappa);
        let mut v: Vec<f64> = table.iter().skip(1).map(|j| 2.0 * j * j).collect();
        v.push(table[0] * table[0]);
        v.sort_by(|a, b| a.total_cmp(b));
        v.iter().sum()
    }

    /// Copy in which every odd-index weight is set to zero.
    pub fn even_sidebands_only(&self) -> Self {
        let mut s = self.clone();
        let keep = |k: i64| k % 2 == 0;
        s.bessel = self.bessel.filtered(keep);
        s.weights = WeightedGaussSumSpec::new(self.weights().filtered(keep), -2.0, 4.0 * self.n as f64)
            .expect("divisors unchanged");
        s
    }

    /// Even-index weights relabeled by m = n/2.
    pub fn even_weights_by_half_index(&self) -> Weights {
        let v = self
            .weights()
            .iter()
            .filter(|t| t.0 % 2 == 0)
            .map(|&(k, w)| (k / 2, w))
            .collect();
        Weights::new(v).expect("halving preserves order")
    }

    pub fn kappa_form(&self) -> KappaForm {
        let s = (self.kappa - 0.25 * PI) / (2.0 * PI);
        let nearest = s.round();
        let offset = self.kappa - (2.0 * PI * nearest + 0.25 * PI);
        if offset.abs() <= 1e-9 * self.kappa && nearest >= 10.0 {
            KappaForm::Matched { s: nearest as u64 }
        } else {
            KappaForm::Mismatch {
                nearest_s: nearest as i64,
                offset,
            }
        }
    }

    /// Warning text when kappa is not of the form 2 pi s + pi/4 with s >= 10.
    pub fn kappa_diagnostic(&self) -> Option<String> {
        match self.kappa_form() {
            KappaForm::Matched { .. } => None,
            KappaForm::Mismatch { nearest_s, offset } => Some(format!(
                "kappa = {} is not 2 pi s + pi/4 with s >= 10 (nearest s = {nearest_s}, offset {offset:e}); \
                 odd sidebands are not suppressed and the reduced sum is only approximate",
                self.kappa
            )),
        }
    }
}

/// h_n = (sqrt(2 pi)/dw) exp[-(delta_n/dw)^2/2] exp(i delta_n^2 phi''/2), the
/// long-time limit of the sideband integral for the current pulse.
pub fn sideband_integral_hn(sys: &FloquetSystem, n: i64) -> Complex64 {
    let dw = sys.pulse.delta_omega();
    let dn = sys.delta - n as f64 * sys.spacing;
    let x = dn / dw;
    let mag = (2.0 * PI).sqrt() / dw * (-0.5 * x * x).exp();
    Complex64::from_polar(mag, 0.5 * dn * dn * sys.pulse.phi2())
}

/// Weight of sideband n in the Gauss-sum form of the amplitude.
pub fn floquet_weight(sys: &FloquetSystem, n: i64) -> Result<Complex64> {
    if n.unsigned_abs() > sys.n_range {
        return Err(invalid("n", format!("sideband {n} outside +-{}", sys.n_range)));
    }
    Ok(sys.weights().get(n).unwrap_or(Complex64::new(0.0, 0.0)))
}

/// Excitation amplitude at chirp xi with the prefactor dropped.
pub fn floquet_amplitude(sys: &FloquetSystem, xi: f64) -> Complex64 {
    sys.weights.evaluate(xi)
}

/// Sum_n J_n(kappa) exp(-i n phi) h_n evaluated with the pulse chirp of xi;
/// equals (2 pi / Delta) floquet_amplitude up to the phase exp(i delta^2 phi''/2).
pub fn sideband_sum(sys: &FloquetSystem, xi: f64) -> Result<Complex64> {
    let s = sys.with_xi(xi)?;
    let terms: Vec<Complex64> = s
        .bessel
        .iter()
        .map(|&(k, b)| b * sideband_integral_hn(&s, k))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Global phase exp(i delta^2 phi''/2) relating [`sideband_sum`] to the
/// Gauss-sum form.
pub fn sideband_sum_phase(sys: &FloquetSystem, xi: f64) -> Complex64 {
    // delta^2 phi''/2 = pi N xi / 2
    let turns = 0.25 * sys.n as f64 * xi;
    phasor(turns - turns.floor())
}

/// Reduced even-sideband sum Sum_m w_m exp[-2 pi i (m - m^2/N) xi].
pub fn reduced_amplitude(sys: &FloquetSystem, xi: f64) -> Complex64 {
    sys.reduced.evaluate(xi)
}

/// |floquet_amplitude|^2 at each integer chirp.
pub fn discrete_signal(sys: &FloquetSystem, ells: &[u64]) -> Result<Vec<f64>> {
    ells.iter()
        .map(|&l| {
            if l == 0 {
                Err(invalid("ell", "trial factors start at 1"))
            } else {
                Ok(floquet_amplitude(sys, l as f64).norm_sqr())
            }
        })
        .collect()
}

impl SignalModel for FloquetSystem {
    fn scheme(&self) -> Scheme {
        Scheme::Floquet
    }

    fn number(&self) -> u64 {
        self.n
    }

    fn amplitude(&self, xi: f64) -> Result<Complex64> {
        Ok(floquet_amplitude(self, xi))
    }
}

/// The reduced even-sideband sum viewed as a signal model.
#[derive(Debug, Clone, Copy)]
pub struct ReducedFloquet<'a>(pub &'a FloquetSystem);

impl SignalModel for ReducedFloquet<'_> {
    fn scheme(&self) -> Scheme {
        Scheme::Floquet
    }

    fn number(&self) -> u64 {
        self.0.n
    }

    fn amplitude(&self, xi: f64) -> Result<Complex64> {
        Ok(reduced_amplitude(self.0, xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    fn fig21(phi: f64) -> FloquetSystem {
        FloquetSystem::from_sideband_width(0.063, 0.003, kappa_for_parity(100), phi, 12.71).unwrap()
    }

    #[test]
    fn encodes_n() {
        assert_eq!(encode_n_floquet(0.063, 0.003).unwrap(), 21);
        assert!(encode_n_floquet(0.064, 0.003).is_err());
        assert_eq!(fig21(0.0).n(), 21);
    }

    #[test]
    fn default_window() {
        let s = fig21(0.0);
        assert_eq!(s.n_range(), default_n_range(21, 12.71, kappa_for_parity(100)));
        assert_eq!(s.n_range(), 630 + 40 + 86);
        assert!(s.with_n_range(100).is_err());
        assert!(s.with_n_range(130).is_ok());
    }

    #[test]
    fn hn_examples() {
        // delta_n = 0 at n = N
        let s = fig21(0.0).with_xi(1.3).unwrap();
        let h = sideband_integral_hn(&s, 21);
        let dw = s.pulse().delta_omega();
        assert!((h - Complex64::new((2.0 * PI).sqrt() / dw, 0.0)).norm() < 1e-12);
        let s = fig21(0.0);
        let h = sideband_integral_hn(&s, 25);
        assert_eq!(h.im, 0.0);
    }

    #[test]
    fn weight_at_gaussian_peak() {
        let s = fig21(0.0);
        let w = floquet_weight(&s, 21).unwrap();
        let want = bessel_j(21, s.kappa()) / ((2.0 * PI).sqrt() * 12.71);
        assert!((w.re - want).abs() < 1e-14 && w.im.abs() < 1e-14);
        assert!(floquet_weight(&s, 10_000).is_err());
    }

    #[test]
    fn amplitude_at_zero_is_weight_sum() {
        let s = fig21(PI / 2.0);
        assert!((floquet_amplitude(&s, 0.0) - s.weights().total()).norm() < 1e-15);
        assert!((reduced_amplitude(&s, 0.0) - s.reduced_weights().total()).norm() < 1e-15);
    }

    #[test]
    fn sideband_route_matches_gauss_form() {
        let s = fig21(PI / 2.0);
        for &xi in &[0.7, 2.0, 3.0, 5.5] {
            let a = sideband_sum(&s, xi).unwrap();
            let b = floquet_amplitude(&s, xi) * (2.0 * PI / s.spacing()) * sideband_sum_phase(&s, xi);
            assert!((a - b).norm() < 1e-9 * b.norm(), "xi={xi}");
        }
    }

    #[test]
    fn even_only_at_n_matches_zero() {
        let s = fig21(PI / 2.0).even_sidebands_only();
        let v0 = floquet_amplitude(&s, 0.0).norm();
        let vn = floquet_amplitude(&s, 21.0).norm();
        assert!((v0 - vn).abs() < 1e-12 * v0);
    }

    #[test]
    fn kappa_form_detection() {
        assert_eq!(fig21(0.0).kappa_form(), KappaForm::Matched { s: 100 });
        let s = FloquetSystem::from_sideband_width(0.063, 0.003, 600.0, 0.0, 12.71).unwrap();
        assert!(s.kappa_diagnostic().is_some());
    }

    #[test]
    fn empty_ells() {
        assert!(discrete_signal(&fig21(0.0), &[]).unwrap().is_empty());
        assert!(discrete_signal(&fig21(0.0), &[0]).is_err());
    }
}
