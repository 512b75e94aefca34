//! Dormand-Prince 5(4) integration of complex ODEs.

use num_complex::Complex64;

use crate::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights equal the last row of A; these are the differences to
// the embedded fourth-order solution
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size, e.g. a fraction of the shortest time
    /// scale of the drive so that narrow features are not stepped over.
    pub max_step: f64,
    pub max_steps: usize,
}

/// Integrates y' = f(t, y) from t0 to t1 and returns y(t1).
pub fn integrate(
    f: &dyn Fn(f64, Complex64) -> Complex64,
    t0: f64,
    t1: f64,
    y0: Complex64,
    opts: &OdeOptions,
) -> Result<Complex64> {
    let g = |t: f64, y: &[Complex64], dy: &mut [Complex64]| dy[0] = f(t, y[0]);
    Ok(integrate_system(&g, t0, t1, &[y0], opts)?[0])
}

/// Vector form of [`integrate`]: f(t, y, dy) writes y' into dy. The error
/// norm is the maximum over components.
pub fn integrate_system(
    f: &dyn Fn(f64, &[Complex64], &mut [Complex64]),
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    opts: &OdeOptions,
) -> Result<Vec<Complex64>> {
    if !(t0 < t1) {
        return Err(Error::InvalidParameter {
            field: "t1",
            reason: "integration window must have t0 < t1".into(),
        });
    }
    let dim = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.max_step.min(t1 - t0) * 0.1;
    let mut k = vec![vec![zero; dim]; 7];
    let mut stage = vec![zero; dim];
    let mut y_new = vec![zero; dim];
    f(t, &y, &mut k[0]);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::Accuracy {
                what: format!("ODE integration exceeded {} steps at t = {t}", opts.max_steps),
                achieved: h,
            });
        }
        steps += 1;
        h = h.min(t1 - t).min(opts.max_step);
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Accuracy {
                what: format!("ODE step size underflow at t = {t}"),
                achieved: h,
            });
        }
        for s in 1..7 {
            for d in 0..dim {
                let mut acc = y[d];
                for j in 0..s {
                    acc += k[j][d] * (h * A[s][j]);
                }
                stage[d] = acc;
            }
            let (_, rest) = k.split_at_mut(s);
            f(t + C[s] * h, &stage, &mut rest[0]);
        }
        let mut ratio: f64 = 0.0;
        for d in 0..dim {
            let mut yn = y[d];
            let mut err = zero;
            for j in 0..7 {
                if j < 6 {
                    yn += k[j][d] * (h * A[6][j]);
                }
                err += k[j][d] * (h * E[j]);
            }
            y_new[d] = yn;
            let scale = opts.abs_tol + opts.rel_tol * y[d].norm().max(yn.norm());
            ratio = ratio.max(err.norm() / scale);
        }
        if ratio <= 1.0 {
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(y)
}
