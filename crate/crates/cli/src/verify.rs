//! `factor verify-oracle`: closed forms against the numerical oracles.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use clap::ArgMatches;
use gauss_factor::floquet::{floquet_amplitude, sideband_integral_hn};
use gauss_factor::oracle::{floquet_drive, ode_amplitude, quadrature_amplitude, quadrature_hn, DriveSpec, Modulation};
use gauss_factor::ChirpedPulse;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, EXIT_COMPUTATION, EXIT_OK};
use crate::schemes::{build_floquet, FLOQUET_KEYS};
use crate::settings::{parse_real, Settings, Source};
use crate::VerifyArgs;

const HN_TOL: f64 = 1e-6;
const AMPLITUDE_TOL: f64 = 1e-5;
const ODE_TOL: f64 = 1e-6;

pub(crate) fn run(args: &VerifyArgs, matches: &ArgMatches, out: &mut dyn Write) -> Result<i32> {
    let mut s = Settings::new();
    for (k, v) in crate::flag_values(matches, &["xis", "samples", "seed", "widths"]) {
        s.set(&k, v, Source::Flag);
    }
    if !s.contains("n") && !s.contains("delta") {
        s.default_value("n", "21");
    }
    s.check_keys(FLOQUET_KEYS.iter().copied().chain(["n"]).collect::<Vec<_>>().as_slice(), "verify-oracle")?;
    let sys = build_floquet(&mut s)?;
    let mut ok = true;
    let _ = writeln!(
        out,
        "floquet N = {}, delta n = {}, kappa = {}, phi = {}",
        sys.n(),
        sys.delta_n(),
        sys.kappa(),
        sys.phi()
    );

    let t = Instant::now();
    let half = (4.0 * sys.delta_n()).ceil() as i64;
    let n = sys.n() as i64;
    let mut worst: f64 = 0.0;
    for k in (n - half).max(1)..=n + half {
        let c = sideband_integral_hn(&sys, k);
        let q = quadrature_hn(&sys, k)?;
        worst = worst.max((q - c).norm() / c.norm());
    }
    ok &= report(out, "sideband integrals h_n", worst, HN_TOL, t);

    let t = Instant::now();
    let xis = match &args.xis {
        Some(text) => text.split(',').map(|x| parse_real("xis", x)).collect::<Result<Vec<_>>>()?,
        None => vec![2.0, 3.0, 5.0, 7.0],
    };
    let mut q = Vec::new();
    let mut g = Vec::new();
    for &x in &xis {
        q.push(quadrature_amplitude(&floquet_drive(&sys, x, args.widths)?)?.norm());
        g.push(floquet_amplitude(&sys, x).norm());
    }
    let qm = q.iter().cloned().fold(0.0, f64::max);
    let gm = g.iter().cloned().fold(0.0, f64::max);
    let worst = q
        .iter()
        .zip(&g)
        .map(|(a, b)| (a / qm - b / gm).abs() / (b / gm).max(1e-12))
        .fold(0.0, f64::max);
    ok &= report(out, "normalized amplitudes", worst, AMPLITUDE_TOL, t);

    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..args.samples {
        let pulse = ChirpedPulse::from_dispersion(rng.gen_range(0.1..0.5), rng.gen_range(-5.0..5.0))?;
        let modulation = Modulation::Sinusoidal {
            amplitude: rng.gen_range(0.01..0.3),
            frequency: rng.gen_range(0.05..0.5),
            phase: rng.gen_range(-PI..PI),
        };
        let spec = DriveSpec::chirped(modulation, pulse, rng.gen_range(-0.5..0.5), 8.0)?;
        let a = quadrature_amplitude(&spec)?;
        let b = ode_amplitude(&spec, 1.0)?;
        worst = worst.max((a - b).norm() / a.norm().max(1e-3));
    }
    ok &= report(out, &format!("ode vs quadrature ({} drives, seed {})", args.samples, args.seed), worst, ODE_TOL, t);

    Ok(if ok { EXIT_OK } else { EXIT_COMPUTATION })
}

fn report(out: &mut dyn Write, what: &str, worst: f64, tol: f64, start: Instant) -> bool {
    let pass = worst < tol;
    let _ = writeln!(
        out,
        "{} {what}: max relative error {worst:.3e} (tolerance {tol:e}, {:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    pass
}
