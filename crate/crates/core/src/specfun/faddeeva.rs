use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

// Number of terms of the rational expansion used inside the disc |z| <= RATIONAL_RADIUS.
const WEIDEMAN_N: usize = 40;
const RATIONAL_RADIUS: f64 = 8.0;
// Largest argument of exp() that does not overflow.
const LN_MAX: f64 = 709.0;

struct Rational {
    l: f64,
    coeffs: Vec<f64>,
}

fn rational() -> &'static Rational {
    static TABLE: OnceLock<Rational> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let len = 2 * m;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        let mut f = vec![0.0; len];
        for (slot, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (0.5 * theta).tan();
            f[slot + 1] = (-t * t).exp() * (l * l + t * t);
        }
        // fftshift followed by the real part of a length-2M DFT
        let shifted: Vec<f64> = (0..len).map(|i| f[(i + m) % len]).collect();
        let coeffs = (1..=n)
            .map(|j| {
                let s: f64 = shifted
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (2.0 * PI * ((j * i) % len) as f64 / len as f64).cos())
                    .sum();
                s / len as f64
            })
            .collect();
        Rational { l, coeffs }
    })
}

fn w_rational(z: Complex64) -> Complex64 {
    let r = rational();
    let iz = Complex64::i() * z;
    let denom = r.l - iz;
    let zz = (r.l + iz) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for c in r.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn w_continued_fraction(z: Complex64) -> Complex64 {
    let a = z.norm();
    let terms = if a > 1e4 { 2 } else if a > 100.0 { 8 } else { 24 };
    let mut r = z;
    for k in (1..=terms).rev() {
        r = z - (0.5 * k as f64) / r;
    }
    Complex64::i() * FRAC_1_SQRT_PI / r
}

fn w_upper(z: Complex64) -> Complex64 {
    let mut w = if z.norm() <= RATIONAL_RADIUS {
        w_rational(z)
    } else {
        w_continued_fraction(z)
    };
    if z.im == 0.0 {
        w.re = (-z.re * z.re).exp();
    }
    w
}

/// exp(e) * w without intermediate overflow; errors when the product itself
/// is not representable.
fn scaled_product(e: Complex64, w: Complex64, what: &str) -> Result<Complex64> {
    if e.re < 600.0 {
        return Ok(e.exp() * w);
    }
    let log_mag = e.re + w.norm().ln();
    if log_mag > LN_MAX {
        return Err(Error::Range(format!("{what} overflows double precision")));
    }
    Ok(Complex64::from_polar(log_mag.exp(), e.im + w.arg()))
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Accurate to roughly 1e-13 relative in the upper half plane. In the lower
/// half plane the reflection w(z) = 2 exp(-z^2) - w(-z) is used, which
/// overflows for large |Im z|; that case is reported as a range error.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("non-finite argument to w(z)".into()));
    }
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    let w = w_upper(-z);
    let e = -z * z;
    if e.re < 600.0 {
        return Ok(2.0 * e.exp() - w);
    }
    // the exponential dominates completely
    scaled_product(e, Complex64::new(2.0, 0.0), "w(z)")
}

/// Scaled complementary error function exp(z^2) erfc(z) = w(iz).
pub fn erfcx_complex(z: Complex64) -> Result<Complex64> {
    faddeeva(Complex64::i() * z)
}

/// Complementary error function of complex argument.
///
/// Computed in the first quadrant as exp(-z^2) w(iz); conjugate symmetry
/// and erfc(-z) = 2 - erfc(z) extend it to the plane. Results that overflow
/// (large |Im z| near the imaginary axis or in the left half plane) are
/// reported as [`Error::Range`].
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("non-finite argument to erfc".into()));
    }
    if z.re < 0.0 {
        return erfc_complex(-z).map(|v| Complex64::new(2.0, 0.0) - v);
    }
    if z.im < 0.0 {
        return erfc_complex(z.conj()).map(|v| v.conj());
    }
    let w = w_upper(Complex64::i() * z);
    let mut v = scaled_product(-z * z, w, "erfc(z)")?;
    if z.im == 0.0 {
        v.im = 0.0;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Maclaurin series of erf, used as an independent oracle for small |z|.
    fn erf_series(z: Complex64) -> Complex64 {
        let mut term = z;
        let mut sum = z;
        let z2 = z * z;
        for k in 1..200 {
            term = -term * z2 / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        sum * 2.0 * FRAC_1_SQRT_PI
    }

    #[test]
    fn erfc_at_zero_is_one() {
        assert_eq!(erfc_complex(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn erfc_of_one() {
        let v = erfc_complex(c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
        let v = erfc_complex(c(-1.0, 0.0)).unwrap();
        assert!((v.re - 1.842_700_792_949_715).abs() < 1e-14);
    }

    #[test]
    fn erfc_matches_series_in_small_disc() {
        for &(x, y) in &[(0.3, 0.2), (1.2, -0.7), (-2.0, 1.5), (0.1, 2.5), (2.5, 0.05), (-0.4, -3.0)] {
            let z = c(x, y);
            let want = c(1.0, 0.0) - erf_series(z);
            let got = erfc_complex(z).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "z={z} got={got} want={want}");
        }
    }

    #[test]
    fn faddeeva_reference_values() {
        // w(i) = erfcx(1); w(1) from tabulated Dawson integral
        let v = faddeeva(c(0.0, 1.0)).unwrap();
        assert!((v.re - 0.427_583_576_155_807).abs() < 1e-14 && v.im.abs() < 1e-15);
        let v = faddeeva(c(1.0, 0.0)).unwrap();
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v.im - 0.607_157_705_841_393_7).abs() < 1e-13);
    }

    #[test]
    fn rational_and_continued_fraction_agree_on_the_seam() {
        for k in 0..32 {
            let th = PI * k as f64 / 31.0;
            let z = Complex64::from_polar(RATIONAL_RADIUS, th);
            let a = w_rational(z);
            let b = w_continued_fraction(z);
            assert!((a - b).norm() < 1e-13 * a.norm(), "theta={th}");
        }
    }

    #[test]
    fn lower_half_plane_reflection() {
        let z = c(1.5, -0.8);
        let w = faddeeva(z).unwrap();
        let want = (-z * z).exp() * (c(1.0, 0.0) - erf_series(-Complex64::i() * z));
        assert!((w - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn overflow_is_a_range_error() {
        assert!(matches!(erfc_complex(c(0.0, 40.0)), Err(Error::Range(_))));
        assert!(matches!(faddeeva(c(0.0, -40.0)), Err(Error::Range(_))));
        assert!(erfc_complex(c(-30.0, 0.0)).unwrap().re == 2.0);
    }

    #[test]
    fn large_arguments_stay_finite() {
        for &(x, y) in &[(30.0, 30.0), (1e6, 1.0), (-25.0, 20.0), (20.0, -20.0)] {
            let v = erfc_complex(c(x, y)).unwrap();
            assert!(v.re.is_finite() && v.im.is_finite());
        }
    }
}
