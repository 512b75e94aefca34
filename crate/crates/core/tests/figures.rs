use std::f64::consts::PI;

use gauss_factor::analysis::{
    assemble_factorization, detect_line_origin, detect_peaks, detect_unit_modulus, detect_zeros, scan, DetectorConfig,
    PrimePower, ReadoutRule,
};
use gauss_factor::floquet::{discrete_signal, floquet_amplitude, kappa_for_parity, sideband_integral_hn};
use gauss_factor::oracle::{floquet_drive, quadrature_amplitude, quadrature_hn, two_photon_integral};
use gauss_factor::pulsetrain::pt_discrete_scan;
use gauss_factor::tpt::{rescale_trace, tpt_weight};
use gauss_factor::{ChirpedPulse, Complex64, FloquetSystem, PulseTrainSystem, TptSystem};

fn tpt_n15() -> TptSystem {
    let pulse = ChirpedPulse::from_dispersion(0.1525, -10824.0).unwrap();
    TptSystem::symmetric(0.0225, 0.003, 11, Complex64::new(1.0, 0.0), pulse).unwrap()
}

fn floquet_n21(phi: f64) -> FloquetSystem {
    FloquetSystem::from_sideband_width(0.063, 0.003, kappa_for_parity(100), phi, 12.71).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn n15_two_photon_peaks_at_three_and_five() {
    let trace = scan(&tpt_n15(), 0.0, 8.0, 200.0).unwrap();
    let cfg = DetectorConfig {
        window: 0.25,
        tau_peak: 0.55,
        ..DetectorConfig::default()
    };
    let r = detect_peaks(&trace, &[2, 3, 4, 5, 6, 7], &cfg).unwrap();
    assert_eq!(r.factors_found, vec![3, 5]);
    assert!(r.contradictions.is_empty() && r.multiples.is_empty());
    let lowest_factor = r.score(3).unwrap().min(r.score(5).unwrap());
    for ell in [2, 4, 6, 7] {
        assert!(r.score(ell).unwrap() < lowest_factor, "ell={ell}");
    }
}

#[test]
fn n15_central_weight_matches_time_integral() {
    let sys = tpt_n15();
    let w0 = tpt_weight(0, &sys).unwrap();
    // |w_m| = |Omega_em Omega_mg| / 2 * |I(delta_m)|
    let integral = two_photon_integral(sys.pulse(), sys.offset(0), 7.0).unwrap();
    let rel = (0.5 * integral.norm() - w0.norm()).abs() / w0.norm();
    assert!(rel < 1e-5, "rel={rel}");
}

#[test]
fn n15_rescaled_to_21() {
    let trace = scan(&tpt_n15(), 0.0, 8.0, 200.0).unwrap();
    let r21 = rescale_trace(&trace, 15, 21).unwrap();
    let r = detect_peaks(&r21, &[2, 3, 4, 5, 6, 7, 8, 9, 10], &DetectorConfig::default()).unwrap();
    assert_eq!(r.factors_found, vec![3, 7]);
    assert!(r.contradictions.is_empty());
}

#[test]
fn n21_floquet_peaks() {
    let sys = floquet_n21(0.5 * PI);
    let trace = scan(&sys, 0.0, 8.0, 200.0).unwrap();
    let r = detect_peaks(&trace, &[2, 3, 4, 5, 6, 7], &DetectorConfig::default()).unwrap();
    assert_eq!(r.factors_found, vec![3, 7]);
    assert!(r.contradictions.is_empty());
}

#[test]
fn n21_floquet_zeros() {
    let sys = floquet_n21(0.0);
    let trace = scan(&sys, 0.0, 8.0, 200.0).unwrap();
    let r = detect_zeros(&trace, &[2, 3, 4, 5, 6, 7], &DetectorConfig::default()).unwrap();
    assert_eq!(r.factors_found, vec![3, 7]);
    assert!(r.contradictions.is_empty());
    for ell in [3, 7] {
        assert!(r.score(ell).unwrap() < 1e-2);
    }
}

#[test]
fn n105_line_through_origin() {
    let sys = FloquetSystem::from_sideband_width(0.315, 0.003, kappa_for_parity(100_000), 0.5 * PI, 90.0).unwrap();
    let ells: Vec<u64> = (2..=35).collect();
    let values = discrete_signal(&sys, &ells).unwrap();
    let points: Vec<(u64, f64)> = ells.iter().copied().zip(values).collect();
    let r = detect_line_origin(105, &points, &DetectorConfig::default()).unwrap();
    for f in [3, 5, 7, 15, 21, 35] {
        assert!(r.factors_found.contains(&f), "missing {f}: {:?}", r.factors_found);
    }
    assert!(r.contradictions.is_empty());
    for t in &r.trials {
        if gcd(t.ell, 105) == 1 {
            assert!(!r.positives().contains(&t.ell));
        }
    }
}

#[test]
fn n1911_pulse_train_unit_modulus() {
    let sys = PulseTrainSystem::for_number(1911, 1.0, 10, 1.0).unwrap();
    let ells: Vec<u64> = (2..=44).collect();
    let values = pt_discrete_scan(&sys, &ells).unwrap();
    for (&l, &v) in ells.iter().zip(&values) {
        if 1911 % l == 0 {
            assert!((v - 1.0).abs() < 1e-12, "ell={l} |A|={v}");
        } else {
            assert!(v <= 1.0 - 1e-6, "ell={l} |A|={v}");
        }
    }
    let points: Vec<(u64, f64)> = ells.iter().copied().zip(values).collect();
    let r = detect_unit_modulus(1911, &points, &DetectorConfig::default()).unwrap();
    assert_eq!(r.factors_found, vec![3, 7, 13, 21, 39]);
    let f = assemble_factorization(1911, &r.factors_found, ReadoutRule::UnitModulus).unwrap();
    assert_eq!(
        f,
        vec![
            PrimePower { prime: 3, exponent: 1 },
            PrimePower { prime: 7, exponent: 2 },
            PrimePower { prime: 13, exponent: 1 },
        ]
    );
}

#[test]
fn n21_sideband_integrals_match_quadrature() {
    let sys = floquet_n21(0.0);
    let half = (4.0 * sys.delta_n()).ceil() as i64;
    let n = sys.n() as i64;
    for k in n - half..=n + half {
        let q = quadrature_hn(&sys, k).unwrap();
        let c = sideband_integral_hn(&sys, k);
        assert!((q - c).norm() < 1e-6 * c.norm(), "n={k}");
    }
}

#[test]
fn n21_amplitude_matches_quadrature() {
    let sys = floquet_n21(0.5 * PI);
    let xis = [2.0, 3.0, 5.0, 7.0];
    let q: Vec<f64> = xis
        .iter()
        .map(|&x| quadrature_amplitude(&floquet_drive(&sys, x, 8.0).unwrap()).unwrap().norm())
        .collect();
    let g: Vec<f64> = xis.iter().map(|&x| floquet_amplitude(&sys, x).norm()).collect();
    let qm = q.iter().cloned().fold(0.0, f64::max);
    let gm = g.iter().cloned().fold(0.0, f64::max);
    for k in 0..xis.len() {
        let (a, b) = (q[k] / qm, g[k] / gm);
        assert!((a - b).abs() < 1e-5 * b, "xi={} {a} {b}", xis[k]);
    }
}
