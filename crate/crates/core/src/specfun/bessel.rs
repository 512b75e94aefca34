use std::f64::consts::PI;

// Below this magnitude J_n(x) is reported as zero.
const LN_TINY: f64 = -690.0;
const SERIES_LIMIT: f64 = 0.5;
const RESCALE: f64 = 1e100;

fn ln_factorial(n: u64) -> f64 {
    if n < 32 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Gamma(x)
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

fn negligible(n: u64, x: f64) -> bool {
    // (x/2)^n / n! bounds |J_n(x)| from above
    n > 0 && (n as f64) * (0.5 * x).ln() - ln_factorial(n) < LN_TINY
}

fn series(n: u64, x: f64) -> f64 {
    let lead = ((n as f64) * (0.5 * x).ln() - ln_factorial(n)).exp();
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40u64 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Runs the normalized downward recurrence and returns J_k(x) for
/// k = 0..=n_max. Requires x > 0.
fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let top = (n_max as f64).max(x.ceil()) + 20.0 + 10.0 * x.cbrt().ceil();
    let mut start = top as usize;
    start += start % 2;
    let mut out = vec![0.0; n_max + 1];
    let mut above = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    let mut sum_even = 0.0;
    let mut k = start;
    loop {
        if k <= n_max {
            out[k] = cur;
        }
        if k == 0 {
            sum_sq += cur * cur;
            sum_even += cur;
            break;
        }
        sum_sq += 2.0 * cur * cur;
        if k.is_multiple_of(2) {
            sum_even += 2.0 * cur;
        }
        let next = (2.0 * k as f64 / x) * cur - above;
        above = cur;
        cur = next;
        k -= 1;
        if cur.abs() > RESCALE {
            let s = 1.0 / RESCALE;
            cur *= s;
            above *= s;
            sum_sq *= s * s;
            sum_even *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    let scale = sum_even.signum() / sum_sq.sqrt();
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// J_0(x), ..., J_{n_max}(x) at a single argument.
///
/// Orders whose value lies below roughly 1e-300 are returned as zero.
pub fn bessel_j_orders(n_max: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = if ax == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        v
    } else if ax <= SERIES_LIMIT {
        (0..=n_max as u64)
            .map(|n| if negligible(n, ax) { 0.0 } else { series(n, ax) })
            .collect()
    } else {
        // skip recurrence work for orders that are certainly zero
        let mut hi = n_max;
        let mut lo = (ax.ceil() as usize).min(n_max);
        if negligible(hi as u64, ax) && !negligible(lo as u64, ax) {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if negligible(mid as u64, ax) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        let mut v = miller(hi, ax);
        v.resize(n_max + 1, 0.0);
        for (k, e) in v.iter_mut().enumerate() {
            if negligible(k as u64, ax) {
                *e = 0.0;
            }
        }
        v
    };
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            *v *= parity(k as i64);
        }
    }
    out
}

/// Bessel function of the first kind J_n(x) of integer order.
///
/// Negative orders and arguments follow from J_{-n}(x) = (-1)^n J_n(x) and
/// J_n(-x) = (-1)^n J_n(x).
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let m = n.unsigned_abs();
    let mut sign = if n < 0 { parity(n) } else { 1.0 };
    if x < 0.0 {
        sign *= parity(n);
    }
    let ax = x.abs();
    if ax == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if negligible(m, ax) {
        return 0.0;
    }
    let v = if ax <= SERIES_LIMIT {
        series(m, ax)
    } else {
        miller(m as usize, ax)[m as usize]
    };
    sign * v
}

/// Leading large-argument form sqrt(2/(pi x)) cos(x - n pi/2 - pi/4).
pub fn bessel_j_asymptotic(n: i64, x: f64) -> f64 {
    let amp = (2.0 / (PI * x)).sqrt();
    let y = x - 0.25 * PI;
    let v = match n.rem_euclid(4) {
        0 => y.cos(),
        1 => y.sin(),
        2 => -y.cos(),
        _ => -y.sin(),
    };
    amp * v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_oracle(n: u64, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
        let mut sum = term;
        for k in 1..120u64 {
            term *= -0.25 * x * x / (k * (n + k)) as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(-3, 0.0), 0.0);
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_power_series() {
        for &x in &[0.2, 0.5, 0.7, 1.0, 3.3, 7.5, 12.0] {
            for n in [0u64, 1, 2, 5, 9, 17] {
                let want = series_oracle(n, x);
                let got = bessel_j(n as i64, x);
                // the alternating series itself loses about e^x / 10^16
                let tol = 1e-13 * want.abs() + 1e-15 * x.exp();
                assert!((got - want).abs() < tol, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn table_matches_single_order() {
        let t = bessel_j_orders(30, 17.3);
        for (k, v) in t.iter().enumerate() {
            assert!((v - bessel_j(k as i64, 17.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn large_argument_reference_values() {
        let x = 200.0 * PI + 0.25 * PI;
        let t = bessel_j_orders(21, x);
        let want = [
            (0, 0.031_811_107_230_540_966),
            (1, 1.896_214_367_897_782e-5),
            (2, -0.031_811_046_947_516_78),
            (3, -2.212_247_301_109_636_4e-4),
            (10, -0.031_713_189_667_032_377),
            (21, 0.010_920_920_264_439_237),
        ];
        for (n, v) in want {
            assert!((t[n] - v).abs() < 1e-12, "n={n} got={} want={v}", t[n]);
        }
        let x = 2e5 * PI + 0.25 * PI;
        assert!((bessel_j(0, x) - 0.001_006_583_612_975).abs() < 1e-12);
        assert!((bessel_j(1, x) - 6.006_606_361_766_993e-10).abs() < 1e-12);
    }

    #[test]
    fn negative_order_and_argument() {
        assert_eq!(bessel_j(-3, 4.0), -bessel_j(3, 4.0));
        assert_eq!(bessel_j(-4, 4.0), bessel_j(4, 4.0));
        assert_eq!(bessel_j(3, -4.0), -bessel_j(3, 4.0));
    }

    #[test]
    fn far_above_argument_is_zero() {
        assert_eq!(bessel_j(1000, 1.0), 0.0);
        assert_eq!(bessel_j(1_000_000, 10.0), 0.0);
        assert!(bessel_j(60, 10.0) > 0.0);
    }

    #[test]
    fn asymptotic_form() {
        let x = 200.0 * PI + 0.25 * PI;
        let a0 = bessel_j_asymptotic(0, x);
        assert!((a0 - (2.0 / (PI * x)).sqrt()).abs() < 1e-15);
        assert!((a0 - 0.031_811_8).abs() < 1e-6);
        assert!((a0 - bessel_j(0, x)).abs() < 1e-3 * a0);
        assert!(bessel_j_asymptotic(1, x).abs() < 1e-12);
        assert!((bessel_j_asymptotic(2, x) + a0).abs() < 1e-15);
    }
}
