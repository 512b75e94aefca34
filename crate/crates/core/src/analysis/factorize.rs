use serde::{Deserialize, Serialize};

use super::detect::ReadoutRule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn trial_factor(mut n: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push(PrimePower { prime: p, exponent: e });
        }
        p += if p == 2 { 1 } else { 2 };
        if n > 1 && is_prime(n) {
            break;
        }
    }
    if n > 1 {
        out.push(PrimePower { prime: n, exponent: 1 });
    }
    out
}

/// All positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Primes and prime powers in [2, sqrt N].
pub fn default_candidates(n: u64) -> Vec<u64> {
    let root = (n as f64).sqrt().floor() as u64;
    (2..=root)
        .filter(|&k| {
            let f = trial_factor(k);
            f.len() == 1
        })
        .collect()
}

/// Splits a set of integers into pairwise coprime parts with the same
/// prime support.
fn coprime_base(mut v: Vec<u64>) -> Vec<u64> {
    v.retain(|&x| x > 1);
    v.sort_unstable();
    v.dedup();
    'outer: loop {
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let g = gcd(v[i], v[j]);
                if g > 1 {
                    let (a, b) = (v[i] / g, v[j] / g);
                    v.swap_remove(j);
                    v.swap_remove(i);
                    v.extend([g, a, b].into_iter().filter(|&x| x > 1));
                    v.sort_unstable();
                    v.dedup();
                    continue 'outer;
                }
            }
        }
        return v;
    }
}

/// Prime factorization of N built from the factors a readout found.
///
/// Every found factor must divide N, otherwise the readout is refuted and a
/// [`Error::Contradiction`] names the rule. The found factors are refined
/// into coprime parts, N is divided by them, and whatever cofactor remains
/// is checked classically.
pub fn assemble_factorization(n: u64, factors_found: &[u64], rule: ReadoutRule) -> Result<Vec<PrimePower>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            field: "N",
            reason: "must be positive".into(),
        });
    }
    for &f in factors_found {
        if f == 0 || !n.is_multiple_of(f) {
            return Err(Error::Contradiction {
                rule: rule.name().to_string(),
                value: f,
                n,
            });
        }
    }
    let mut rem = n;
    let mut out: Vec<PrimePower> = Vec::new();
    for b in coprime_base(factors_found.to_vec()) {
        for pp in trial_factor(b) {
            if out.iter().any(|q| q.prime == pp.prime) {
                continue;
            }
            let mut e = 0;
            while rem.is_multiple_of(pp.prime) {
                rem /= pp.prime;
                e += 1;
            }
            if e > 0 {
                out.push(PrimePower {
                    prime: pp.prime,
                    exponent: e,
                });
            }
        }
    }
    if rem > 1 {
        if is_prime(rem) {
            out.push(PrimePower { prime: rem, exponent: 1 });
        } else {
            out.extend(trial_factor(rem));
        }
    }
    out.sort_by_key(|p| p.prime);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(v: &[(u64, u32)]) -> Vec<PrimePower> {
        v.iter().map(|&(prime, exponent)| PrimePower { prime, exponent }).collect()
    }

    #[test]
    fn assembly_examples() {
        let r = ReadoutRule::Peak;
        assert_eq!(assemble_factorization(15, &[3, 5], r).unwrap(), pp(&[(3, 1), (5, 1)]));
        assert_eq!(
            assemble_factorization(1911, &[3, 7, 13, 21, 39], ReadoutRule::UnitModulus).unwrap(),
            pp(&[(3, 1), (7, 2), (13, 1)])
        );
        assert_eq!(assemble_factorization(13, &[], r).unwrap(), pp(&[(13, 1)]));
        assert_eq!(assemble_factorization(105, &[15], r).unwrap(), pp(&[(3, 1), (5, 1), (7, 1)]));
        assert_eq!(assemble_factorization(1, &[], r).unwrap(), vec![]);
    }

    #[test]
    fn non_divisor_is_a_contradiction() {
        match assemble_factorization(15, &[3, 4], ReadoutRule::Zero) {
            Err(Error::Contradiction { rule, value, n }) => {
                assert_eq!((rule.as_str(), value, n), ("zero", 4, 15));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&k| is_prime(k)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn candidate_defaults() {
        assert_eq!(default_candidates(105), vec![2, 3, 4, 5, 7, 8, 9]);
        assert_eq!(default_candidates(3), Vec::<u64>::new());
    }

    #[test]
    fn coprime_refinement() {
        assert_eq!(coprime_base(vec![21, 39, 3]), vec![3, 7, 13]);
        assert_eq!(coprime_base(vec![12, 18]), vec![2, 3]);
    }
}
