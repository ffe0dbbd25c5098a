//! Allowed "distance" sets for the offsets `h` and `k`.
//!
//! Conventions: `1` is squarefree and `y`-smooth (the conditions hold
//! vacuously), `1` is not prime, and `1` belongs to a multiplicative closure
//! only when it is listed as a generator (which validation forbids).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, isqrt, primes_in_range, primes_up_to};
use crate::error::{Error, Result};

/// Default ceiling on sieve memory, in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 30;

const SEGMENT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistanceSetSpec {
    All,
    Primes,
    Squarefree,
    /// Integers whose prime factors are all `<= y`.
    Smooth(u64),
    /// Products of one or more of the generators.
    MultClosure(Vec<u64>),
    /// `q * r` with `q < r` both prime.
    SemiprimeDistinct,
    /// A finite, strictly increasing list.
    Explicit(Vec<u64>),
}

impl DistanceSetSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DistanceSetSpec::Smooth(y) if *y < 2 => {
                Err(Error::InvalidSet(format!("smoothness bound {y} must be at least 2")))
            }
            DistanceSetSpec::MultClosure(gens) if gens.is_empty() => {
                Err(Error::InvalidSet("multiplicative closure needs generators".into()))
            }
            DistanceSetSpec::MultClosure(gens) if gens.iter().any(|&g| g < 2) => {
                Err(Error::InvalidSet("generators must be at least 2".into()))
            }
            DistanceSetSpec::Explicit(list) if list.first() == Some(&0) => {
                Err(Error::InvalidSet("explicit entries must be positive".into()))
            }
            DistanceSetSpec::Explicit(list) if list.windows(2).any(|w| w[0] >= w[1]) => Err(
                Error::InvalidSet("explicit list must be strictly increasing".into()),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DistanceSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(v: &[u64]) -> String {
            v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            DistanceSetSpec::All => f.write_str("all"),
            DistanceSetSpec::Primes => f.write_str("primes"),
            DistanceSetSpec::Squarefree => f.write_str("squarefree"),
            DistanceSetSpec::Smooth(y) => write!(f, "smooth:{y}"),
            DistanceSetSpec::MultClosure(g) => write!(f, "multclosed:{}", join(g)),
            DistanceSetSpec::SemiprimeDistinct => f.write_str("semiprime2"),
            DistanceSetSpec::Explicit(l) => write!(f, "list:{}", join(l)),
        }
    }
}

impl FromStr for DistanceSetSpec {
    type Err = Error;

    /// Parses `all`, `primes`, `squarefree`, `smooth:Y`, `multclosed:a,b,..`,
    /// `semiprime2` and `list:n1,n2,..`.
    fn from_str(s: &str) -> Result<Self> {
        fn numbers(s: &str) -> Result<Vec<u64>> {
            if s.trim().is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::InvalidSet(format!("bad number {t:?}")))
                })
                .collect()
        }
        let s = s.trim();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let spec = match (head.to_ascii_lowercase().as_str(), tail) {
            ("all", None) => DistanceSetSpec::All,
            ("primes", None) => DistanceSetSpec::Primes,
            ("squarefree", None) => DistanceSetSpec::Squarefree,
            ("semiprime2", None) => DistanceSetSpec::SemiprimeDistinct,
            ("smooth", Some(y)) => DistanceSetSpec::Smooth(
                y.trim()
                    .parse()
                    .map_err(|_| Error::InvalidSet(format!("bad smoothness bound {y:?}")))?,
            ),
            ("multclosed", Some(g)) => DistanceSetSpec::MultClosure(numbers(g)?),
            ("list", Some(l)) => DistanceSetSpec::Explicit(numbers(l)?),
            _ => return Err(Error::InvalidSet(format!("unknown set {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for DistanceSetSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistanceSetSpec> for String {
    fn from(s: DistanceSetSpec) -> String {
        s.to_string()
    }
}

/// Counts of a set on `[1, X]` and on the dyadic block `[X, 2X]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub x: u64,
    pub count: u64,
    pub ratio: Ratio<u64>,
    pub dyadic_count: u64,
}

/// Members of `spec` in `[lo, hi]`, ascending.
pub fn members(spec: &DistanceSetSpec, lo: u64, hi: u64) -> Result<Vec<u64>> {
    members_with_budget(spec, lo, hi, DEFAULT_SIEVE_BUDGET)
}

pub fn members_with_budget(
    spec: &DistanceSetSpec,
    lo: u64,
    hi: u64,
    budget: u64,
) -> Result<Vec<u64>> {
    spec.validate()?;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let check = |needed: u64| {
        if needed > budget {
            Err(Error::MemoryBudget {
                lo,
                hi,
                needed,
                budget,
            })
        } else {
            Ok(())
        }
    };
    let width = hi - lo + 1;
    match spec {
        DistanceSetSpec::Explicit(list) => {
            let start = list.partition_point(|&n| n < lo);
            let end = list.partition_point(|&n| n <= hi);
            Ok(list[start..end].to_vec())
        }
        DistanceSetSpec::MultClosure(gens) => mult_closure(gens, lo, hi, budget / 8)
            .ok_or(Error::MemoryBudget {
                lo,
                hi,
                needed: budget.saturating_add(1),
                budget,
            }),
        DistanceSetSpec::All => {
            check(width.saturating_mul(8))?;
            Ok((lo..=hi).collect())
        }
        DistanceSetSpec::Primes => {
            check(width.saturating_mul(9))?;
            Ok(primes_in_range(lo, hi))
        }
        DistanceSetSpec::Squarefree => {
            check(width.saturating_mul(9))?;
            Ok(sieve_filter(lo, hi, |s| s.squarefree))
        }
        DistanceSetSpec::SemiprimeDistinct => {
            check(width.saturating_mul(18))?;
            Ok(sieve_filter(lo, hi, |s| s.squarefree && s.omega == 2))
        }
        DistanceSetSpec::Smooth(y) => {
            // the trial primes up to y also count against the budget
            let y = (*y).min(hi);
            check(width.saturating_mul(18).saturating_add(y))?;
            Ok(smooth_sieve(lo, hi, y))
        }
    }
}

pub fn is_member(spec: &DistanceSetSpec, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    match spec {
        DistanceSetSpec::All => true,
        DistanceSetSpec::Primes => is_prime(n),
        DistanceSetSpec::Explicit(list) => list.binary_search(&n).is_ok(),
        DistanceSetSpec::MultClosure(gens) => in_closure(gens, n, &mut HashMap::new()),
        DistanceSetSpec::Squarefree => factorize(n).iter().all(|&(_, e)| e == 1),
        DistanceSetSpec::SemiprimeDistinct => {
            let f = factorize(n);
            f.len() == 2 && f.iter().all(|&(_, e)| e == 1)
        }
        DistanceSetSpec::Smooth(y) => factorize(n).last().is_none_or(|&(q, _)| q <= *y),
    }
}

pub fn density_report(spec: &DistanceSetSpec, x: u64) -> Result<DensityReport> {
    if x == 0 {
        return Err(Error::InvalidRange { lo: 1, hi: x });
    }
    let count = members(spec, 1, x)?.len() as u64;
    let dyadic_count = members(spec, x, x.saturating_mul(2))?.len() as u64;
    Ok(DensityReport {
        x,
        count,
        ratio: Ratio::new(count, x),
        dyadic_count,
    })
}

#[derive(Clone, Copy)]
struct FactorSummary {
    squarefree: bool,
    omega: u8,
}

/// Sieve `[lo, hi]` segment by segment and keep the `n` whose factor
/// summary passes `keep`.
fn sieve_filter(lo: u64, hi: u64, keep: impl Fn(FactorSummary) -> bool) -> Vec<u64> {
    let base = primes_up_to(isqrt(hi));
    let mut out = Vec::new();
    let mut start = lo;
    loop {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let len = (end - start + 1) as usize;
        let mut rem: Vec<u64> = (start..=end).collect();
        let mut info = vec![
            FactorSummary {
                squarefree: true,
                omega: 0,
            };
            len
        ];
        for &q in &base {
            let first = start.div_ceil(q) * q;
            let mut m = first;
            while m <= end {
                let i = (m - start) as usize;
                info[i].omega += 1;
                rem[i] /= q;
                if rem[i].is_multiple_of(q) {
                    info[i].squarefree = false;
                    while rem[i].is_multiple_of(q) {
                        rem[i] /= q;
                    }
                }
                m += q;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                info[i].omega += 1;
            }
            if keep(info[i]) {
                out.push(start + i as u64);
            }
        }
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

fn smooth_sieve(lo: u64, hi: u64, y: u64) -> Vec<u64> {
    let trial = primes_up_to(y);
    let mut out = Vec::new();
    let mut start = lo;
    loop {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut rem: Vec<u64> = (start..=end).collect();
        for &q in &trial {
            if q > end {
                break;
            }
            let mut m = start.div_ceil(q) * q;
            while m <= end {
                let r = &mut rem[(m - start) as usize];
                while (*r).is_multiple_of(q) {
                    *r /= q;
                }
                m += q;
            }
        }
        out.extend(
            rem.iter()
                .enumerate()
                .filter(|(_, &r)| r == 1)
                .map(|(i, _)| start + i as u64),
        );
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

/// Ordered enumeration of generator products with a min-heap. `None` when
/// more than `max_items` values would have to be held.
fn mult_closure(gens: &[u64], lo: u64, hi: u64, max_items: u64) -> Option<Vec<u64>> {
    let mut gens = gens.to_vec();
    gens.sort_unstable();
    gens.dedup();
    let mut heap: BinaryHeap<Reverse<u64>> = gens.iter().copied().filter(|&g| g <= hi).map(Reverse).collect();
    let mut out = Vec::new();
    let mut last = 0;
    while let Some(Reverse(m)) = heap.pop() {
        if m == last {
            continue;
        }
        last = m;
        if m >= lo {
            out.push(m);
        }
        for &g in &gens {
            match m.checked_mul(g) {
                Some(next) if next <= hi => heap.push(Reverse(next)),
                _ => break,
            }
        }
        if (heap.len() + out.len()) as u64 > max_items {
            return None;
        }
    }
    Some(out)
}

fn in_closure(gens: &[u64], n: u64, memo: &mut HashMap<u64, bool>) -> bool {
    if let Some(&known) = memo.get(&n) {
        return known;
    }
    let found = gens.iter().any(|&g| {
        n == g || (n.is_multiple_of(g) && n / g >= 2 && in_closure(gens, n / g, memo))
    });
    memo.insert(n, found);
    found
}

/// Prime factorization by trial division, ascending.
///
/// Stops as soon as the cofactor is prime, so the cost is governed by the
/// second-largest prime factor.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let take = |n: &mut u64, q: u64, out: &mut Vec<(u64, u32)>| {
        let mut e = 0;
        while (*n).is_multiple_of(q) {
            *n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
    };
    take(&mut n, 2, &mut out);
    take(&mut n, 3, &mut out);
    let mut d = 5u64;
    while n > 1 {
        if is_prime(n) {
            out.push((n, 1));
            break;
        }
        if d.checked_mul(d).is_none_or(|sq| sq > n) {
            out.push((n, 1));
            break;
        }
        take(&mut n, d, &mut out);
        take(&mut n, d + 2, &mut out);
        d += 6;
    }
    out
}
