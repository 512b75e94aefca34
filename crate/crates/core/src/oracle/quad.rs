//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (and the center).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).norm(),
    }
}

/// Integrates f over the union of the panels [p_i, p_{i+1}] given by the
/// sorted breakpoints, bisecting the panel with the largest error estimate
/// until the total estimate drops below max(abs_tol, rel_tol * |I|).
pub fn integrate(
    f: &dyn Fn(f64) -> Complex64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            field: "breakpoints",
            reason: "need at least two strictly increasing points".into(),
        });
    }
    let mut heap: BinaryHeap<Panel> = breakpoints.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
    let mut evaluations = 15 * heap.len();
    // running totals; recomputed exactly before convergence is declared
    let mut total: Complex64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if err <= abs_tol.max(rel_tol * total.norm()) {
            let mut v: Vec<Complex64> = heap.iter().map(|p| p.value).collect();
            v.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
            total = v.iter().sum();
            err = heap.iter().map(|p| p.error).sum();
            if err <= abs_tol.max(rel_tol * total.norm()) {
                return Ok(QuadResult {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
        }
        if heap.len() >= max_panels {
            return Err(Error::Accuracy {
                what: format!("quadrature did not converge within {max_panels} panels"),
                achieved: err,
            });
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            return Err(Error::Accuracy {
                what: "quadrature panel width underflow".into(),
                achieved: err,
            });
        }
        let left = gk15(f, worst.a, m);
        let right = gk15(f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let f = |x: f64| Complex64::new(x.powi(20), -3.0 * x.powi(7));
        let r = integrate(&f, &[0.0, 1.0], 1e-14, 1e-14, 10).unwrap();
        assert!((r.value - Complex64::new(1.0 / 21.0, -3.0 / 8.0)).norm() < 1e-14);
    }

    #[test]
    fn gaussian_fourier_transform() {
        // int exp(-t^2/2) exp(i k t) dt = sqrt(2 pi) exp(-k^2/2)
        let k = 3.0;
        let f = |t: f64| Complex64::from_polar((-0.5 * t * t).exp(), k * t);
        let pts: Vec<f64> = (0..=40).map(|i| -10.0 + i as f64 * 0.5).collect();
        let r = integrate(&f, &pts, 1e-13, 1e-13, 1000).unwrap();
        let want = (2.0 * PI).sqrt() * (-0.5 * k * k).exp();
        assert!((r.value - Complex64::new(want, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = |t: f64| Complex64::from_polar(1.0, 1e6 * t * t);
        match integrate(&f, &[0.0, 10.0], 1e-12, 1e-12, 16) {
            Err(Error::Accuracy { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
