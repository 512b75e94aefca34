//! Gauss-sum kernels evaluated term by term.
//!
//! Phases are tracked in turns (units of 2 pi). Whenever the divisors are
//! integers, the integer part of the argument is reduced modulo the divisor
//! exactly, so huge products such as m^2 N never lose phase fidelity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{Error, Result};

const EXACT_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

/// exp(2 pi i t), exact at multiples of a quarter turn.
pub fn phasor(turns: f64) -> Complex64 {
    let q = (4.0 * turns).round();
    let r = turns - 0.25 * q;
    let (s, c) = (2.0 * std::f64::consts::PI * r).sin_cos();
    match (q as i64).rem_euclid(4) {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// Fractional part of q*f for an integer-valued q, using an error-free
/// product so the result is accurate to about one ulp of a turn.
fn fract_product(q: f64, f: f64) -> f64 {
    let p = q * f;
    let e = q.mul_add(f, -p);
    (p - p.floor()) + e
}

fn is_exact_integer(v: f64) -> bool {
    v.is_finite() && v.fract() == 0.0 && v.abs() < EXACT_LIMIT
}

/// Turns of (m * xi / d) modulo one for an integer divisor d.
fn turns_over_int(m: i128, xi: f64, d: i128) -> f64 {
    let k = xi.floor();
    let f = xi - k;
    let ki = k as i128;
    let q = m.div_euclid(d);
    let r = m.rem_euclid(d);
    let whole = (m.rem_euclid(d) * ki.rem_euclid(d)).rem_euclid(d) as f64 / d as f64;
    let part = if f == 0.0 {
        0.0
    } else {
        fract_product(q as f64, f) + r as f64 * f / d as f64
    };
    whole + part
}

/// Turns of m * c modulo one for an arbitrary real c.
fn turns_real(m: i128, c: f64) -> f64 {
    fract_product(m as f64, c)
}

/// Tree summation; leaves are summed in order in blocks of eight.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    if terms.len() <= 8 {
        return terms.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let (a, b) = terms.split_at(terms.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Ordered list of (index, weight) pairs with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    terms: Vec<(i64, Complex64)>,
}

impl Weights {
    pub fn new(terms: Vec<(i64, Complex64)>) -> Result<Self> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(invalid("weights", "indices must be strictly increasing"));
        }
        if terms.iter().any(|(_, w)| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(invalid("weights", "weights must be finite"));
        }
        Ok(Self { terms })
    }

    /// Weights for indices first, first+1, ...
    pub fn contiguous(first: i64, values: Vec<Complex64>) -> Result<Self> {
        Self::new(values.into_iter().enumerate().map(|(k, w)| (first + k as i64, w)).collect())
    }

    /// The same weight on every index of lo..=hi.
    pub fn uniform(lo: i64, hi: i64, value: Complex64) -> Result<Self> {
        if hi < lo {
            return Err(invalid("weights", format!("empty index range {lo}..={hi}")));
        }
        Self::contiguous(lo, vec![value; (hi - lo + 1) as usize])
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(i64, Complex64)> {
        self.terms.iter()
    }

    pub fn as_slice(&self) -> &[(i64, Complex64)] {
        &self.terms
    }

    pub fn get(&self, index: i64) -> Option<Complex64> {
        self.terms
            .binary_search_by_key(&index, |t| t.0)
            .ok()
            .map(|k| self.terms[k].1)
    }

    pub fn total(&self) -> Complex64 {
        let v: Vec<Complex64> = self.terms.iter().map(|t| t.1).collect();
        pairwise_sum(&v)
    }

    /// Keeps only the terms for which `keep(index)` holds.
    pub fn filtered(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            terms: self.terms.iter().copied().filter(|t| keep(t.0)).collect(),
        }
    }
}

/// Weighted sum of exp[2 pi i (m/A + m^2/B) xi].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGaussSumSpec {
    weights: Weights,
    linear_divisor: f64,
    quadratic_divisor: f64,
}

impl WeightedGaussSumSpec {
    pub fn new(weights: Weights, linear_divisor: f64, quadratic_divisor: f64) -> Result<Self> {
        if !(linear_divisor.is_finite() && linear_divisor != 0.0) {
            return Err(invalid("A", "linear divisor must be finite and nonzero"));
        }
        if !(quadratic_divisor.is_finite() && quadratic_divisor != 0.0) {
            return Err(invalid("B", "quadratic divisor must be finite and nonzero"));
        }
        Ok(Self {
            weights,
            linear_divisor,
            quadratic_divisor,
        })
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn linear_divisor(&self) -> f64 {
        self.linear_divisor
    }

    pub fn quadratic_divisor(&self) -> f64 {
        self.quadratic_divisor
    }

    /// Phase of term m at xi, in turns.
    fn turns(&self, m: i64, xi: f64) -> f64 {
        let (a, b) = (self.linear_divisor, self.quadratic_divisor);
        let m = m as i128;
        let m2 = m * m;
        if is_exact_integer(a) && is_exact_integer(b) && xi.abs() < EXACT_LIMIT && (m2 as f64) < EXACT_LIMIT {
            turns_over_int(m, xi, a as i128) + turns_over_int(m2, xi, b as i128)
        } else {
            turns_real(m, xi / a) + turns_real(m2, xi / b)
        }
    }

    pub fn evaluate(&self, xi: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .weights
            .iter()
            .map(|&(m, w)| w * phasor(self.turns(m, xi)))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Sum_m w_m exp[2 pi i (m/A + m^2/B) xi].
pub fn generic_sum(spec: &WeightedGaussSumSpec, xi: f64) -> Complex64 {
    spec.evaluate(xi)
}

/// Sign of the linear phase term of the continuous Gauss sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearSign {
    Plus,
    Minus,
}

impl LinearSign {
    pub fn value(self) -> f64 {
        match self {
            LinearSign::Plus => 1.0,
            LinearSign::Minus => -1.0,
        }
    }
}

/// Sum_m w_m exp[2 pi i (sign m + m^2/N) xi].
pub fn continuous_s(n: u64, weights: &Weights, sign: LinearSign, xi: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(invalid("N", "must be positive"));
    }
    let spec = WeightedGaussSumSpec::new(weights.clone(), sign.value(), n as f64)?;
    Ok(spec.evaluate(xi))
}

/// Sum_m w_m exp[2 pi i m^2 ell / N].
pub fn quadratic_s(n: u64, weights: &Weights, ell: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(invalid("N", "must be positive"));
    }
    let n = n as i128;
    let terms: Vec<Complex64> = weights
        .iter()
        .map(|&(m, w)| {
            let m = m as i128;
            let r = (m * m % n * (ell as i128 % n)).rem_euclid(n);
            w * phasor(r as f64 / n as f64)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Parameters of the normalized uniform sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformSumSpec {
    pub half_width: u64,
    pub n: u64,
}

impl UniformSumSpec {
    pub fn new(half_width: u64, n: u64) -> Result<Self> {
        if half_width < 1 {
            return Err(invalid("M", "half-width must be at least 1"));
        }
        if n == 0 {
            return Err(invalid("N", "must be positive"));
        }
        Ok(Self { half_width, n })
    }
}

/// (1/(2M+1)) Sum_{n=-M}^{M} exp(-2 pi i n^2 N / xi).
pub fn reciprocal_a(spec: &UniformSumSpec, xi: f64) -> Result<Complex64> {
    if xi == 0.0 {
        return Err(Error::Domain("reciprocal Gauss sum has a pole at xi = 0".into()));
    }
    if !xi.is_finite() {
        return Err(invalid("xi", "must be finite"));
    }
    let m = spec.half_width as i128;
    let big_n = spec.n as i128;
    let exact = is_exact_integer(xi);
    let ratio = spec.n as f64 / xi;
    let terms: Vec<Complex64> = (-m..=m)
        .map(|k| {
            let k2 = k * k;
            let t = if exact {
                let l = xi as i128;
                let r = (k2 % l.abs() * (big_n % l.abs())).rem_euclid(l.abs());
                r as f64 / l as f64
            } else {
                turns_real(k2, ratio)
            };
            phasor(-t)
        })
        .collect();
    Ok(pairwise_sum(&terms) / (2 * m + 1) as f64)
}

/// (1/(M+1)) Sum_{m=0}^{M} exp(-2 pi i m^2 N / ell).
pub fn truncated_a(n: u64, m: u64, ell: u64) -> Result<Complex64> {
    if ell == 0 {
        return Err(invalid("ell", "must be at least 1"));
    }
    let (n, l) = (n as i128, ell as i128);
    let terms: Vec<Complex64> = (0..=m as i128)
        .map(|k| {
            let r = (k * k % l * (n % l)) % l;
            phasor(-(r as f64) / l as f64)
        })
        .collect();
    Ok(pairwise_sum(&terms) / (m + 1) as f64)
}
