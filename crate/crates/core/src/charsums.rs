//! Exact evaluation of the quadratic character sums behind the existence
//! results, at sizes where every term can be computed.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, mod_inverse, PrimeModulus};
use crate::error::{Error, Result};
use crate::hyperbola::HyperbolaParams;
use crate::poly::Poly;
use crate::search::{check_run_args, run_range};

/// Below this modulus a complete sum reads symbols from a table of squares.
const TABLE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharSumResult {
    pub value: i64,
    pub distinct_roots: usize,
    /// `(m - 1) * sqrt(p)`.
    pub weil_bound: f64,
    /// `f` is not a constant times a square, so the bound applies.
    pub weil_applicable: bool,
}

impl CharSumResult {
    pub fn within_bound(&self) -> bool {
        !self.weil_applicable || (self.value.unsigned_abs() as f64) <= self.weil_bound
    }
}

/// `residue_table(p)[a]` is the Legendre symbol of `a`.
fn residue_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..=p / 2 {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// `sum_{x in F_p} (f(x) / p)` together with its Weil bound.
pub fn complete_char_sum(f: &Poly) -> Result<CharSumResult> {
    let p = f.modulus();
    let m = p.get();
    if m <= f.degree() as u64 {
        return Err(Error::InvalidPolynomial(format!(
            "modulus {m} must exceed the degree {}",
            f.degree()
        )));
    }
    let value: i64 = if m <= TABLE_LIMIT {
        let table = residue_table(m);
        (0..m).map(|x| table[f.eval(x) as usize] as i64).sum()
    } else {
        (0..m).map(|x| legendre(f.eval(x), p) as i64).sum()
    };
    let distinct_roots = f.distinct_root_count();
    Ok(CharSumResult {
        value,
        distinct_roots,
        weil_bound: (distinct_roots as f64 - 1.0) * (m as f64).sqrt(),
        weil_applicable: !f.is_scaled_square(),
    })
}

/// Number of `c` in `(L/4, p - L/4)` for which every factor of
/// `prod_k (1 - ((k - 4c)/p))/2 * prod_l (1 - ((l + 4c)/p))/2` is one.
pub fn sigma_count(p: PrimeModulus, l: u64) -> Result<u64> {
    check_run_args(p, l)?;
    let (lo, hi) = run_range(p.get(), l);
    let indicator = |a: i128| u64::from(legendre(a, p) == -1);
    let total = (lo..=hi)
        .map(|c| {
            let four_c = 4 * c as i128;
            let minus: u64 = (1..=l as i128).map(|k| indicator(k - four_c)).product();
            let plus: u64 = (1..=l as i128).map(|j| indicator(j + four_c)).product();
            minus * plus
        })
        .sum();
    Ok(total)
}

/// The sets `A`, `Z0`, `Z1` and the hyperbola they are tested against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSumConfig {
    pub params: HyperbolaParams,
    pub a: Vec<u64>,
    pub z0: Vec<u64>,
    pub z1: Vec<u64>,
}

impl TripleSumConfig {
    pub fn new(params: HyperbolaParams, a: Vec<u64>, z0: Vec<u64>, z1: Vec<u64>) -> Result<Self> {
        let p = params.p();
        if let Some(bad) = a.iter().chain(&z0).chain(&z1).find(|&&v| v % p == 0) {
            return Err(Error::InvalidSet(format!("{bad} is not invertible modulo {p}")));
        }
        Ok(TripleSumConfig { params, a, z0, z1 })
    }

    fn four_c(&self) -> u64 {
        self.params.modulus().mul(4, self.params.c())
    }

    /// `4c * (h z1)^{-1}` for every `(h, z1)`.
    fn shifts(&self) -> impl Iterator<Item = u64> + '_ {
        let p = self.params.modulus();
        let four_c = self.four_c();
        self.a.iter().flat_map(move |&h| {
            self.z1.iter().map(move |&z| {
                let inv = mod_inverse(p.mul(h, z), p).expect("validated invertible");
                p.mul(four_c, inv)
            })
        })
    }
}

/// `w(n) = #{(h, z1) in A x Z1 : h z1 n = 4c (mod p)}`, nonzero entries only.
pub fn weight_w(config: &TripleSumConfig) -> BTreeMap<u64, u64> {
    let mut w = BTreeMap::new();
    for n in config.shifts() {
        *w.entry(n).or_insert(0) += 1;
    }
    w
}

/// `#{(h1, h2, z1, z2) : h1 z1 = h2 z2 (mod p)}`, from the multiplicities
/// of the products `h z1`.
pub fn second_moment_w(config: &TripleSumConfig) -> u64 {
    let p = config.params.modulus();
    let mut products: Vec<u64> = config
        .a
        .iter()
        .flat_map(|&h| config.z1.iter().map(move |&z| p.mul(h, z)))
        .collect();
    products.sort_unstable();
    products
        .chunk_by(|x, y| x == y)
        .map(|run| (run.len() as u64).pow(2))
        .sum()
}

/// `S = sum over h in A, z0 in Z0, z1 in Z1 of ((z0 - 4c (h z1)^{-1}) / p)`.
pub fn triple_sum_s(config: &TripleSumConfig) -> i64 {
    let p = config.params.modulus();
    config
        .shifts()
        .map(|n| {
            config
                .z0
                .iter()
                .map(|&z0| legendre(p.sub(z0, n), p) as i64)
                .sum::<i64>()
        })
        .sum()
}

/// The same sum regrouped by `n`: `sum_n w(n) sum_{z0} ((z0 - n) / p)`.
pub fn triple_sum_via_weights(config: &TripleSumConfig) -> i64 {
    let p = config.params.modulus();
    weight_w(config)
        .into_iter()
        .map(|(n, w)| {
            let inner: i64 = config
                .z0
                .iter()
                .map(|&z0| legendre(z0 as i128 - n as i128, p) as i64)
                .sum();
            w as i64 * inner
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleSumReport {
    /// `sum_{x in I} |sum_{y in S} ((y + x) / p)|`.
    pub total: u64,
    /// The inner sums, one per `x` in `I`.
    pub inner: Vec<i64>,
    pub interval_len: u64,
    pub set_len: u64,
}

impl DoubleSumReport {
    /// `|I| * |S|`, the trivial bound.
    pub fn trivial_bound(&self) -> u64 {
        self.interval_len * self.set_len
    }
}

pub fn double_sum(p: PrimeModulus, interval: RangeInclusive<u64>, set: &[u64]) -> Result<DoubleSumReport> {
    let m = p.get();
    let (lo, hi) = (*interval.start(), *interval.end());
    if lo == 0 || hi > m || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if let Some(&bad) = set.iter().find(|&&y| y == 0 || y > m) {
        return Err(Error::InvalidSet(format!("{bad} lies outside [1, {m}]")));
    }
    let inner: Vec<i64> = interval
        .map(|x| set.iter().map(|&y| legendre(y + x, p) as i64).sum())
        .collect();
    Ok(DoubleSumReport {
        total: inner.iter().map(|v| v.unsigned_abs()).sum(),
        interval_len: inner.len() as u64,
        set_len: set.len() as u64,
        inner,
    })
}

/// Which admissibility condition on `(alpha, beta)` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentRegime {
    /// `alpha, beta > eps` and `alpha + 2 beta > 1 + eps`.
    Karatsuba,
    /// `eps < beta <= 1/k` and
    /// `(1 - 2/(3k)) alpha + (2/3)(1 + 2/k) beta > 1/2 + 1/(3k) + eps`.
    Chang,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentCheck {
    pub holds: bool,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// Decides an exponent condition in exact rational arithmetic.
pub fn exponent_condition(
    alpha: &BigRational,
    beta: &BigRational,
    k: u64,
    epsilon: &BigRational,
    regime: ExponentRegime,
) -> Result<ExponentCheck> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let unit = |v: &BigRational| *v > zero && *v < one;
    if !unit(alpha) || !unit(beta) {
        return Err(Error::InvalidExponent("alpha and beta must lie in (0, 1)".into()));
    }
    if *epsilon < zero {
        return Err(Error::InvalidExponent("epsilon must be nonnegative".into()));
    }
    let frac = |n: i64, d: u64| BigRational::new(BigInt::from(n), BigInt::from(d));
    Ok(match regime {
        ExponentRegime::Karatsuba => {
            let lhs = alpha + beta * frac(2, 1);
            let rhs = &one + epsilon;
            ExponentCheck {
                holds: alpha > epsilon && beta > epsilon && lhs > rhs,
                lhs,
                rhs,
            }
        }
        ExponentRegime::Chang => {
            if k == 0 {
                return Err(Error::InvalidExponent("k must be positive".into()));
            }
            let a_coeff = &one - frac(2, 3 * k);
            let b_coeff = frac(2, 3) * (&one + frac(2, k));
            let lhs = a_coeff * alpha + b_coeff * beta;
            let rhs = frac(1, 2) + frac(1, 3 * k) + epsilon;
            ExponentCheck {
                holds: beta > epsilon && *beta <= frac(1, k) && lhs > rhs,
                lhs,
                rhs,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, primes_up_to};

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn poly(p: u64, c: &[i64]) -> Poly {
        Poly::new(pm(p), c).unwrap()
    }

    fn config(p: u64, c: u64, a: &[u64], z0: &[u64], z1: &[u64]) -> TripleSumConfig {
        TripleSumConfig::new(
            HyperbolaParams::from_raw(p, c).unwrap(),
            a.to_vec(),
            z0.to_vec(),
            z1.to_vec(),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Ordered factorizations of `n` into three positive integers.
    fn ordered_factorizations3(n: u64) -> u64 {
        fn divisor_count(n: u64) -> u64 {
            (1..)
                .take_while(|d| d * d <= n)
                .filter(|d| n.is_multiple_of(*d))
                .map(|d| if d * d == n { 1 } else { 2 })
                .sum()
        }
        (1..)
            .take_while(|d| d * d <= n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| {
                let e = n / d;
                if d == e {
                    divisor_count(e)
                } else {
                    divisor_count(e) + divisor_count(d)
                }
            })
            .sum()
    }

    #[test]
    fn complete_sum_examples() {
        let r = complete_char_sum(&poly(7, &[0, -3, 1])).unwrap();
        assert_eq!((r.value, r.distinct_roots), (-1, 2));
        assert!((r.weil_bound - 7f64.sqrt()).abs() < 1e-12);
        assert!(r.weil_applicable && r.within_bound());

        let r = complete_char_sum(&poly(7, &[0, 0, 1])).unwrap();
        assert_eq!(r.value, 6);
        assert!(!r.weil_applicable);

        let r = complete_char_sum(&poly(7, &[0, 1])).unwrap();
        assert_eq!(r.value, 0);

        assert!(complete_char_sum(&poly(3, &[1, 0, 0, 1])).is_err());
    }

    #[test]
    fn complete_sum_matches_symbol_by_symbol() {
        // the table path against direct Legendre evaluation
        let f = poly(1009, &[17, -4, 0, 3, 1]);
        let direct: i64 = (0..1009).map(|x| legendre(f.eval(x), pm(1009)) as i64).sum();
        assert_eq!(complete_char_sum(&f).unwrap().value, direct);
    }

    #[test]
    fn nondegenerate_quadratics_sum_to_minus_one() {
        for p in primes_up_to(61).into_iter().skip(1) {
            for b in 0..p {
                for c in 0..p {
                    let disc = (b * b + 4 * p * p - 4 * c) % p;
                    let v = complete_char_sum(&poly(p, &[c as i64, b as i64, 1])).unwrap().value;
                    if disc == 0 {
                        assert_eq!(v, p as i64 - 1);
                    } else {
                        assert_eq!(v, -1, "p={p} b={b} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_count(pm(13), 1).unwrap(), 2);
        assert_eq!(sigma_count(pm(13), 0).unwrap(), 12);
        assert_eq!(sigma_count(pm(5), 1).unwrap(), 0);
        assert_eq!(sigma_count(pm(7), 1), Err(Error::NotOneModFour(7)));
    }

    #[test]
    fn sigma_is_monotone() {
        for p in primes_up_to(2000).into_iter().filter(|p| p % 4 == 1) {
            let counts: Vec<u64> = (0..10)
                .filter(|l| 2 * l < p)
                .map(|l| sigma_count(pm(p), l).unwrap())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] >= w[1]), "p={p}: {counts:?}");
        }
    }

    #[test]
    fn weight_examples() {
        let w = weight_w(&config(7, 1, &[1, 2], &[], &[1]));
        assert_eq!(w, BTreeMap::from([(2, 1), (4, 1)]));
        let w = weight_w(&config(7, 1, &[1], &[], &[1]));
        assert_eq!(w, BTreeMap::from([(4, 1)]));
        assert!(TripleSumConfig::new(HyperbolaParams::from_raw(7, 1).unwrap(), vec![7], vec![], vec![]).is_err());
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(second_moment_w(&config(7, 1, &[1, 2], &[], &[1, 2])), 6);
        assert_eq!(second_moment_w(&config(7, 1, &[3], &[], &[5])), 1);
        assert_eq!(second_moment_w(&config(7, 1, &[1, 2], &[], &[1])), 2);
    }

    #[test]
    fn triple_sum_examples() {
        assert_eq!(triple_sum_s(&config(7, 1, &[1], &[1], &[1])), 1);
        assert_eq!(triple_sum_s(&config(7, 1, &[1, 2], &[1], &[1])), 0);
        assert_eq!(triple_sum_s(&config(7, 1, &[1, 2], &[], &[1])), 0);
    }

    #[test]
    fn d3_by_enumeration() {
        for n in 1..300u64 {
            let brute = (1..=n)
                .flat_map(|a| (1..=n).map(move |b| (a, b)))
                .filter(|&(a, b)| n % (a * b) == 0)
                .count() as u64;
            assert_eq!(ordered_factorizations3(n), brute, "n={n}");
        }
    }

    /// When no `(h, z0 z1)` satisfies `(k/p)((k - 4c h^{-1})/p) = 1` and Z0
    /// is all residues or all non-residues, every term of S equals
    /// `-(z0/p)` except where `h z0 z1 = 4c`, so
    /// `|S| >= |A||Z0||Z1| - 2 d3(4c mod p)`.
    #[test]
    fn triple_sum_lower_bound_when_criterion_fails() {
        let mut qualifying = 0;
        for p in primes_up_to(400).into_iter().filter(|&p| p > 30) {
            let m = pm(p);
            for c in 1..p {
                let params = HyperbolaParams::from_raw(p, c).unwrap();
                for z0_sign in [1i8, -1] {
                    let z0: Vec<u64> = (1..=4u64).filter(|&z| legendre(z, m) == z0_sign).collect();
                    let a: Vec<u64> = vec![1, 2];
                    let z1: Vec<u64> = vec![1, 3];
                    if z0.is_empty() || 2 * 4 * 3 >= p {
                        continue;
                    }
                    let fails = a.iter().all(|&h| {
                        z0.iter().all(|&x| {
                            z1.iter().all(|&y| {
                                let k = x * y;
                                let hinv = mod_inverse(h, m).unwrap();
                                let shifted = m.sub(k, m.mul(m.mul(4, c), hinv));
                                legendre(k, m) * legendre(shifted, m) != 1
                            })
                        })
                    });
                    if !fails {
                        continue;
                    }
                    qualifying += 1;
                    let cfg = TripleSumConfig::new(params, a.clone(), z0.clone(), z1.clone()).unwrap();
                    let s = triple_sum_s(&cfg).unsigned_abs();
                    let size = (a.len() * z0.len() * z1.len()) as u64;
                    let r = m.mul(4, c);
                    assert!(s + 2 * ordered_factorizations3(r) >= size, "p={p} c={c}");
                }
            }
        }
        assert!(qualifying > 0);
    }

    #[test]
    fn double_sum_examples() {
        let r = double_sum(pm(7), 1..=2, &[1, 2]).unwrap();
        assert_eq!((r.total, r.inner.clone()), (0, vec![0, 0]));
        assert_eq!(r.trivial_bound(), 4);
        assert_eq!(double_sum(pm(7), 1..=1, &[1, 2, 3]).unwrap().total, 1);
        let r = double_sum(pm(7), 1..=7, &[3]).unwrap();
        assert_eq!(r.total, 6);
        assert!(double_sum(pm(7), 0..=3, &[1]).is_err());
        assert!(double_sum(pm(7), 1..=3, &[8]).is_err());
    }

    #[test]
    fn exponent_examples() {
        let eps = rat(1, 1_000_000);
        let a = rat(11, 34) + &eps;
        let tiny = rat(1, 10_000_000);
        assert!(exponent_condition(&a, &a, 3, &tiny, ExponentRegime::Chang).unwrap().holds);

        let a = rat(11, 34);
        let check = exponent_condition(&a, &a, 3, &BigRational::zero(), ExponentRegime::Chang).unwrap();
        assert!(!check.holds);
        assert_eq!(check.lhs, rat(11, 18));
        assert_eq!(check.rhs, rat(11, 18));

        let check = exponent_condition(&rat(2, 5), &rat(2, 5), 1, &rat(1, 10), ExponentRegime::Karatsuba).unwrap();
        assert!(check.holds);
        assert_eq!((check.lhs, check.rhs), (rat(6, 5), rat(11, 10)));

        assert!(exponent_condition(&rat(3, 2), &a, 3, &eps, ExponentRegime::Chang).is_err());
        assert!(exponent_condition(&a, &a, 0, &eps, ExponentRegime::Chang).is_err());
        // beta above 1/k
        assert!(!exponent_condition(&rat(9, 10), &rat(1, 2), 3, &eps, ExponentRegime::Chang).unwrap().holds);
    }

    #[test]
    fn weil_bound_small_primes() {
        for p in [5u64, 7, 11, 13] {
            assert!(is_prime(p));
            for c0 in 0..p {
                for c1 in 0..p {
                    for c2 in 0..p {
                        let r = complete_char_sum(&poly(p, &[c0 as i64, c1 as i64, c2 as i64, 1])).unwrap();
                        assert!(r.within_bound(), "p={p} {c0},{c1},{c2}: {r:?}");
                    }
                }
            }
        }
    }
}
