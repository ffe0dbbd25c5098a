//! Searches for close point pairs: smallest offsets under distance-set
//! restrictions, the run-of-non-residues witness behind the lower bound,
//! and parallel censuses over ranges of primes.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{isqrt, legendre, least_nonresidue, primes_in_range, PrimeModulus};
use crate::error::{Error, Result};
use crate::hyperbola::{box_pair_exists, criterion_unchecked, recover_pairs, HyperbolaParams, PairWitness};
use crate::sets::{is_member, members, DistanceSetSpec};

/// Which offsets a search may use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairConstraint {
    pub h_set: DistanceSetSpec,
    pub k_set: DistanceSetSpec,
    pub h_max: u64,
    pub k_max: u64,
}

impl PairConstraint {
    pub fn new(h_set: DistanceSetSpec, k_set: DistanceSetSpec, h_max: u64, k_max: u64) -> Self {
        PairConstraint {
            h_set,
            k_set,
            h_max,
            k_max,
        }
    }

    /// Both offsets drawn from `set`, up to `p - 1`.
    pub fn full(params: &HyperbolaParams, set: DistanceSetSpec) -> Self {
        let max = params.p() - 1;
        PairConstraint::new(set.clone(), set, max, max)
    }

    fn validate(&self, p: u64) -> Result<()> {
        self.h_set.validate()?;
        self.k_set.validate()?;
        if self.h_max == 0 || self.k_max == 0 || self.h_max >= p || self.k_max >= p {
            return Err(Error::InvalidConstraint {
                h_max: self.h_max,
                k_max: self.k_max,
                p,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub params: HyperbolaParams,
    pub constraint: PairConstraint,
    pub found: Option<PairWitness>,
    /// Criterion value at the found offset (`0` or `1`).
    pub symbol: Option<i8>,
    /// Set only by [`minimal_positive_offset`].
    pub minimal_h: Option<u64>,
    pub tested_pairs: u64,
    pub elapsed: Duration,
}

impl SearchReport {
    /// Whether the witness (if any) passes every check a reader could make
    /// independently: both points on the hyperbola and offsets in their sets
    /// and bounds.
    pub fn verify(&self) -> bool {
        let Some(w) = self.found else {
            return true;
        };
        let c = &self.constraint;
        let within = match self.minimal_h {
            Some(m) => w.h <= m && w.k <= m && w.h.max(w.k) == m,
            None => w.h <= c.h_max && w.k <= c.k_max,
        };
        w.verify(&self.params) && within && is_member(&c.h_set, w.h) && is_member(&c.k_set, w.k)
    }
}

/// Members of a set, extended on demand in doubling chunks so that a search
/// ending early never sieves its whole bound.
struct LazyMembers<'a> {
    spec: &'a DistanceSetSpec,
    list: Vec<u64>,
    covered: u64,
    cap: u64,
}

impl<'a> LazyMembers<'a> {
    fn new(spec: &'a DistanceSetSpec, cap: u64) -> Self {
        LazyMembers {
            spec,
            list: Vec::new(),
            covered: 0,
            cap,
        }
    }

    fn ensure(&mut self, n: u64) -> Result<()> {
        let n = n.min(self.cap);
        while self.covered < n {
            let next = (self.covered.saturating_mul(2)).max(256).max(n).min(self.cap);
            self.list.extend(members(self.spec, self.covered + 1, next)?);
            self.covered = next;
        }
        Ok(())
    }

    /// Members `<= n`.
    fn up_to(&mut self, n: u64) -> Result<&[u64]> {
        self.ensure(n)?;
        let end = self.list.partition_point(|&m| m <= n);
        Ok(&self.list[..end])
    }

    fn contains(&mut self, n: u64) -> Result<bool> {
        self.ensure(n)?;
        Ok(self.list.binary_search(&n).is_ok())
    }

    fn get(&mut self, i: usize) -> Result<Option<u64>> {
        while i >= self.list.len() && self.covered < self.cap {
            let want = self.covered.saturating_mul(2).max(256);
            self.ensure(want)?;
        }
        Ok(self.list.get(i).copied())
    }
}

fn witness_at(params: &HyperbolaParams, h: u64, k: u64) -> PairWitness {
    recover_pairs(params, h, k)
        .expect("offsets are nonzero")
        .into_iter()
        .next()
        .expect("criterion >= 0 guarantees a pair")
}

/// The least `H` such that some `h` in `h_set ∩ [1, H]` and `k` in
/// `k_set ∩ [1, H]` give a point pair, searched up to `min(h_max, k_max)`.
///
/// Ties at the minimal `H` go to the smallest `h`, then the smallest `k`;
/// the witness is the pair with the smaller first coordinate.
pub fn minimal_positive_offset(
    params: &HyperbolaParams,
    constraint: &PairConstraint,
) -> Result<SearchReport> {
    let start = Instant::now();
    constraint.validate(params.p())?;
    let bound = constraint.h_max.min(constraint.k_max);
    let mut hs = LazyMembers::new(&constraint.h_set, bound);
    let mut ks = LazyMembers::new(&constraint.k_set, bound);
    let mut tested = 0u64;
    let mut hit = None;

    'levels: for level in 1..=bound {
        let k_at_level = ks.contains(level)?;
        let h_candidates = hs.up_to(level)?.to_vec();
        for h in h_candidates {
            if h < level {
                if !k_at_level {
                    continue;
                }
                tested += 1;
                if criterion_unchecked(params, h, level) >= 0 {
                    hit = Some((level, h, level));
                    break 'levels;
                }
            } else {
                for &k in ks.up_to(level)? {
                    tested += 1;
                    if criterion_unchecked(params, h, k) >= 0 {
                        hit = Some((level, h, k));
                        break 'levels;
                    }
                }
            }
        }
    }

    let (found, symbol, minimal_h) = match hit {
        Some((level, h, k)) => (
            Some(witness_at(params, h, k)),
            Some(criterion_unchecked(params, h, k)),
            Some(level),
        ),
        None => (None, None, None),
    };
    Ok(SearchReport {
        params: *params,
        constraint: constraint.clone(),
        found,
        symbol,
        minimal_h,
        tested_pairs: tested,
        elapsed: start.elapsed(),
    })
}

/// First pair found scanning `k` ascending, then `h` ascending, with the
/// two bounds allowed to differ.
pub fn restricted_pair_search(
    params: &HyperbolaParams,
    constraint: &PairConstraint,
) -> Result<SearchReport> {
    let start = Instant::now();
    constraint.validate(params.p())?;
    let mut hs = LazyMembers::new(&constraint.h_set, constraint.h_max);
    let mut ks = LazyMembers::new(&constraint.k_set, constraint.k_max);
    let mut tested = 0u64;
    let mut hit = None;

    let mut ki = 0;
    'outer: while let Some(k) = ks.get(ki)? {
        let mut hi = 0;
        while let Some(h) = hs.get(hi)? {
            tested += 1;
            if criterion_unchecked(params, h, k) >= 0 {
                hit = Some((h, k));
                break 'outer;
            }
            hi += 1;
        }
        ki += 1;
    }

    Ok(SearchReport {
        params: *params,
        constraint: constraint.clone(),
        found: hit.map(|(h, k)| witness_at(params, h, k)),
        symbol: hit.map(|(h, k)| criterion_unchecked(params, h, k)),
        minimal_h: None,
        tested_pairs: tested,
        elapsed: start.elapsed(),
    })
}

/// Which counting argument a parameter schedule follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// Multiplicatively closed sets: `K = H * T`.
    MultClosed,
    /// Squarefree offsets: `K = 2 * H * T`.
    Squarefree,
}

/// Theoretical offset bounds `(H, T, K)` for a given `p` and `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterSchedule {
    pub h: f64,
    pub t: f64,
    pub k: f64,
}

impl ParameterSchedule {
    pub fn new(p: u64, epsilon: f64, kind: ScheduleKind) -> Self {
        let log_p = (p as f64).ln();
        let grow = log_p.powf(0.5 + epsilon);
        let h = (p as f64).powf(0.25) * (0.5 * grow).exp();
        let t = (0.25 * grow).exp() * log_p.powf(0.5 - epsilon);
        let k = match kind {
            ScheduleKind::MultClosed => h * t,
            ScheduleKind::Squarefree => 2.0 * h * t,
        };
        ParameterSchedule { h, t, k }
    }

    /// `(h_max, k_max)` rounded up and clamped into `[1, p - 1]`.
    pub fn bounds(&self, p: u64) -> (u64, u64) {
        let clamp = |v: f64| (v.ceil() as u64).clamp(1, p - 1);
        (clamp(self.h), clamp(self.k))
    }
}

/// Starting bound `ceil(p^(11/34 + epsilon))` for almost-dense sets.
pub fn almost_dense_bound(p: u64, epsilon: f64) -> u64 {
    ((p as f64).powf(11.0 / 34.0 + epsilon).ceil() as u64).clamp(1, p - 1)
}

/// Restricted search over a single almost-dense set, starting at
/// [`almost_dense_bound`] and doubling the bound until a pair turns up or
/// `[1, p - 1]` is exhausted. The report's constraint holds the final bound.
pub fn widening_search(
    params: &HyperbolaParams,
    set: &DistanceSetSpec,
    epsilon: f64,
) -> Result<SearchReport> {
    let top = params.p() - 1;
    let mut bound = almost_dense_bound(params.p(), epsilon);
    let mut tested = 0;
    loop {
        let constraint = PairConstraint::new(set.clone(), set.clone(), bound, bound);
        let mut report = restricted_pair_search(params, &constraint)?;
        tested += report.tested_pairs;
        if report.found.is_some() || bound == top {
            report.tested_pairs = tested;
            return Ok(report);
        }
        bound = bound.saturating_mul(2).min(top);
    }
}

/// A residue `c` for which `l - 4c` and `l + 4c` are non-residues for every
/// `1 <= l <= L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Witness {
    pub p: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub c: u64,
    pub verified: bool,
}

/// `floor(0.1 * ln p)`.
pub fn default_run_length(p: u64) -> u64 {
    (0.1 * (p as f64).ln()).floor() as u64
}

/// The admissible range `L/4 < c < p - L/4`, as inclusive integer bounds.
pub(crate) fn run_range(p: u64, l: u64) -> (u64, u64) {
    (l / 4 + 1, (4 * p - l - 1) / 4)
}

pub(crate) fn check_run_args(p: PrimeModulus, l: u64) -> Result<()> {
    if p.get() % 4 != 1 {
        return Err(Error::NotOneModFour(p.get()));
    }
    if 2 * l >= p.get() {
        return Err(Error::RunTooLong { l, p: p.get() });
    }
    Ok(())
}

/// Whether every `l - 4c` and `l + 4c` with `1 <= l <= L` is a non-residue.
#[inline]
pub(crate) fn run_condition(p: PrimeModulus, l: u64, c: u64) -> bool {
    let four_c = p.mul(4, c);
    (1..=l).all(|i| legendre(p.sub(i, four_c), p) == -1 && legendre(p.add(i, four_c), p) == -1)
}

/// Smallest `c` in `(L/4, p - L/4)` satisfying the non-residue run
/// condition, verified against all squares of side `floor(sqrt(L))`.
pub fn theorem1_witness_search(p: PrimeModulus, l: u64) -> Result<Option<Theorem1Witness>> {
    check_run_args(p, l)?;
    let (lo, hi) = run_range(p.get(), l);
    let Some(c) = (lo..=hi).find(|&c| run_condition(p, l, c)) else {
        return Ok(None);
    };
    let mut witness = Theorem1Witness {
        p: p.get(),
        l,
        c,
        verified: false,
    };
    witness.verified = verify_theorem1_claim(&witness)?;
    Ok(Some(witness))
}

/// True when no square of side `floor(sqrt(L))` holds two points of
/// `xy = c`. Rejects inputs that are not witnesses.
pub fn verify_theorem1_claim(witness: &Theorem1Witness) -> Result<bool> {
    let p = PrimeModulus::new(witness.p)?;
    check_run_args(p, witness.l)?;
    let (lo, hi) = run_range(p.get(), witness.l);
    if !(lo..=hi).contains(&witness.c) {
        return Err(Error::InvalidWitness(format!(
            "c = {} lies outside ({}/4, p - {}/4)",
            witness.c, witness.l, witness.l
        )));
    }
    if !run_condition(p, witness.l, witness.c) {
        return Err(Error::InvalidWitness(format!(
            "c = {} violates the non-residue run for L = {}",
            witness.c, witness.l
        )));
    }
    let params = HyperbolaParams::new(p, witness.c)?;
    Ok(!box_pair_exists(&params, isqrt(witness.l))?)
}

/// Which values of `c` to try for each prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CSelection {
    Fixed(u64),
    All,
    /// `n` distinct values from `[1, p - 1]`, drawn with a generator seeded
    /// from `(seed, p)`, listed ascending.
    Sample { n: usize, seed: u64 },
}

impl CSelection {
    pub fn values(&self, p: u64) -> Vec<u64> {
        match *self {
            CSelection::Fixed(c) => vec![c],
            CSelection::All => (1..p).collect(),
            CSelection::Sample { n, seed } => {
                let pool = (p - 1) as usize;
                if n >= pool {
                    return (1..p).collect();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut cs: Vec<u64> = sample(&mut rng, pool, n)
                    .into_iter()
                    .map(|i| i as u64 + 1)
                    .collect();
                cs.sort_unstable();
                cs
            }
        }
    }
}

/// Run length for the witness census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunLength {
    Fixed(u64),
    /// `floor(0.1 * ln p)` for each prime.
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanTask {
    MinimalOffset {
        c: CSelection,
        h_set: DistanceSetSpec,
        k_set: DistanceSetSpec,
    },
    Theorem1Census {
        l: RunLength,
    },
    LeastNonresidue,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanRow {
    Minimal(SearchReport),
    Theorem1 {
        p: u64,
        l: u64,
        witness: Option<Theorem1Witness>,
    },
    LeastNonresidue {
        p: u64,
        np: u64,
    },
    /// A per-prime failure; the scan carries on.
    Failed {
        p: u64,
        c: Option<u64>,
        message: String,
    },
}

impl ScanRow {
    pub fn p(&self) -> u64 {
        match self {
            ScanRow::Minimal(r) => r.params.p(),
            ScanRow::Theorem1 { p, .. }
            | ScanRow::LeastNonresidue { p, .. }
            | ScanRow::Failed { p, .. } => *p,
        }
    }
}

fn scan_one(p: u64, task: &ScanTask) -> Vec<ScanRow> {
    let modulus = match PrimeModulus::new(p) {
        Ok(m) => m,
        Err(e) => {
            return vec![ScanRow::Failed {
                p,
                c: None,
                message: e.to_string(),
            }]
        }
    };
    match task {
        ScanTask::LeastNonresidue => vec![ScanRow::LeastNonresidue {
            p,
            np: least_nonresidue(modulus),
        }],
        ScanTask::Theorem1Census { l } => {
            let l = match *l {
                RunLength::Fixed(l) => l,
                RunLength::Default => default_run_length(p),
            };
            match theorem1_witness_search(modulus, l) {
                Ok(witness) => vec![ScanRow::Theorem1 { p, l, witness }],
                Err(e) => vec![ScanRow::Failed {
                    p,
                    c: None,
                    message: e.to_string(),
                }],
            }
        }
        ScanTask::MinimalOffset { c, h_set, k_set } => c
            .values(p)
            .into_iter()
            .map(|c| {
                HyperbolaParams::new(modulus, c)
                    .and_then(|params| {
                        let constraint = PairConstraint::new(h_set.clone(), k_set.clone(), p - 1, p - 1);
                        minimal_positive_offset(&params, &constraint)
                    })
                    .map(ScanRow::Minimal)
                    .unwrap_or_else(|e| ScanRow::Failed {
                        p,
                        c: Some(c),
                        message: e.to_string(),
                    })
            })
            .collect(),
    }
}

/// Primes a scan over `[lo, hi]` visits: odd primes, restricted to
/// `p = 1 (mod 4)` for the witness census.
pub fn scan_primes_list(lo: u64, hi: u64, task: &ScanTask) -> Vec<u64> {
    let census = matches!(task, ScanTask::Theorem1Census { .. });
    primes_in_range(lo, hi)
        .into_iter()
        .filter(|&p| p > 2 && (!census || p % 4 == 1))
        .collect()
}

/// Number of primes handed to the pool at a time; rows are emitted after
/// each batch in ascending `p`.
const SCAN_BATCH: usize = 4096;

/// Run `task` for every prime in `[lo, hi]` on `workers` threads, feeding
/// rows to `sink` in ascending `p` (and ascending `c` within a prime).
/// The row sequence does not depend on `workers`.
pub fn scan_primes<F>(lo: u64, hi: u64, task: &ScanTask, workers: usize, mut sink: F) -> Result<()>
where
    F: FnMut(ScanRow),
{
    if lo > hi {
        return Ok(());
    }
    let primes = scan_primes_list(lo, hi, task);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    for batch in primes.chunks(SCAN_BATCH) {
        let rows: Vec<Vec<ScanRow>> = pool.install(|| batch.par_iter().map(|&p| scan_one(p, task)).collect());
        rows.into_iter().flatten().for_each(&mut sink);
    }
    Ok(())
}
