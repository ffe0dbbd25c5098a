//! The `modhyp` command-line tool as a library: parse a [`RunConfig`], then
//! hand it to [`run`] with the output streams.

pub mod config;
pub mod output;

use std::io::{self, Write};

use modhyp::{
    complete_char_sum, double_sum, exponent_condition, least_nonresidue, members,
    minimal_positive_offset, restricted_pair_search, scan_primes, second_moment_w, sigma_count,
    theorem1_witness_search, triple_sum_s, triple_sum_via_weights, weight_w, widening_search,
    HyperbolaParams, PairConstraint, ParameterSchedule, Poly, PrimeModulus, RunLength, ScanRow,
    ScanTask, SearchReport, TripleSumConfig,
};
use modhyp::search::default_run_length;
use modhyp::sets::density_report;

pub use config::{Command, Format, RunConfig};
use config::*;
use output::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Args(#[from] modhyp::Error),
    #[error("{0}")]
    Usage(String),
    #[error("self-check failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) | CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Executes one command, writing records to `out` and per-row diagnostics
/// to `err`. Self-check failures suppress the offending record; the run
/// finishes and then reports [`CliError::Verification`].
pub fn run<W: Write, E: Write>(config: &RunConfig, out: W, mut err: E) -> Result<(), CliError> {
    let mut em = Emitter::new(config.format, out);
    let mut failures = Vec::new();
    let seed = config.seed;
    match &config.command {
        Command::MinimalH(a) => {
            let p = PrimeModulus::new(a.p)?;
            let bound = a.bound.unwrap_or(a.p - 1);
            em.header::<MinimalRecord>()?;
            for c in c_values(p, a.c, seed)? {
                let params = HyperbolaParams::new(p, c)?;
                let constraint = PairConstraint::new(a.h_set.clone(), a.k_set.clone(), bound, bound);
                let report = minimal_positive_offset(&params, &constraint)?;
                match check_report(&report) {
                    Ok(()) => em.emit(&minimal_record(&report))?,
                    Err(msg) => failures.push(msg),
                }
            }
        }
        Command::Pairs(a) => {
            let p = PrimeModulus::new(a.p)?;
            em.header::<PairRecord>()?;
            for c in c_values(p, a.c, seed)? {
                let params = HyperbolaParams::new(p, c)?;
                let report = if a.widen {
                    widening_search(&params, &a.h_set, a.epsilon)?
                } else {
                    let (h_max, k_max) = match a.schedule {
                        Some(kind) => ParameterSchedule::new(a.p, a.epsilon, kind.into()).bounds(a.p),
                        None => (a.h_max.unwrap_or(a.p - 1), a.k_max.unwrap_or(a.p - 1)),
                    };
                    let constraint = PairConstraint::new(a.h_set.clone(), a.k_set.clone(), h_max, k_max);
                    restricted_pair_search(&params, &constraint)?
                };
                match check_report(&report) {
                    Ok(()) => em.emit(&pair_record(&report))?,
                    Err(msg) => failures.push(msg),
                }
            }
        }
        Command::Theorem1(a) => {
            let p = PrimeModulus::new(a.p)?;
            let l = a.l.unwrap_or_else(|| default_run_length(a.p));
            em.header::<Theorem1Record>()?;
            let witness = theorem1_witness_search(p, l)?;
            match theorem1_record(a.p, l, witness) {
                Ok(r) => em.emit(&r)?,
                Err(msg) => failures.push(msg),
            }
        }
        Command::Sigma(a) => {
            let p = PrimeModulus::new(a.p)?;
            let l = a.l.unwrap_or_else(|| default_run_length(a.p));
            em.header::<SigmaRecord>()?;
            em.emit(&SigmaRecord { p: a.p, l, sigma: sigma_count(p, l)? })?;
        }
        Command::Np(a) => {
            let p = PrimeModulus::new(a.p)?;
            let np = least_nonresidue(p);
            if config.format == Format::Text {
                em.emit(&Bare { np })?;
            } else {
                em.header::<NpRecord>()?;
                em.emit(&NpRecord { p: a.p, np })?;
            }
        }
        Command::Charsum(a) => {
            let p = PrimeModulus::new(a.p)?;
            let f = Poly::new(p, &a.poly)?;
            let r = complete_char_sum(&f)?;
            em.header::<CharsumRecord>()?;
            if r.weil_applicable && !r.within_bound() {
                failures.push(format!(
                    "|{}| exceeds the Weil bound {:.3} for {f}",
                    r.value, r.weil_bound
                ));
            } else {
                em.emit(&CharsumRecord {
                    p: a.p,
                    degree: f.degree(),
                    value: r.value,
                    distinct_roots: r.distinct_roots,
                    weil_bound: r.weil_bound,
                    weil_applicable: r.weil_applicable,
                })?;
            }
        }
        Command::Doublesum(a) => {
            let p = PrimeModulus::new(a.p)?;
            let set = members(&a.set, a.set_lo, a.set_hi.unwrap_or(a.p))?;
            let r = double_sum(p, a.from..=a.to, &set)?;
            em.header::<DoublesumRecord>()?;
            em.emit(&DoublesumRecord {
                p: a.p,
                from: a.from,
                to: a.to,
                interval_len: r.interval_len,
                set_len: r.set_len,
                total: r.total,
                trivial_bound: r.trivial_bound(),
            })?;
        }
        Command::Triplesum(a) => {
            let params = HyperbolaParams::from_raw(a.p, a.c)?;
            let config = TripleSumConfig::new(
                params,
                members(&a.a, 1, a.hi)?,
                members(&a.z0, 1, a.hi)?,
                members(&a.z1, 1, a.hi)?,
            )?;
            let s = triple_sum_s(&config);
            let s_regrouped = triple_sum_via_weights(&config);
            let weights = weight_w(&config);
            let sum_w: u64 = weights.values().sum();
            let w = second_moment_w(&config);
            let w_check: u64 = weights.values().map(|v| v * v).sum();
            let expected = (config.a.len() * config.z1.len()) as u64;
            em.header::<TriplesumRecord>()?;
            if s != s_regrouped || w != w_check || sum_w != expected {
                failures.push(format!(
                    "S = {s} vs {s_regrouped} regrouped, W = {w} vs {w_check}, sum w = {sum_w} vs {expected}"
                ));
            } else {
                em.emit(&TriplesumRecord {
                    p: a.p,
                    c: params.c(),
                    a_len: config.a.len(),
                    z0_len: config.z0.len(),
                    z1_len: config.z1.len(),
                    s,
                    s_regrouped,
                    sum_w,
                    w,
                })?;
            }
        }
        Command::Scan(a) => scan(a, seed, &mut em, &mut err, &mut failures)?,
        Command::Sets(a) => {
            a.spec.validate()?;
            if let Some(x) = a.density {
                let r = density_report(&a.spec, x)?;
                em.header::<DensityRecord>()?;
                em.emit(&DensityRecord {
                    spec: a.spec.to_string(),
                    x: r.x,
                    count: r.count,
                    ratio: format!("{}/{}", r.ratio.numer(), r.ratio.denom()),
                    dyadic_count: r.dyadic_count,
                })?;
            } else {
                let hi = a.hi.ok_or_else(|| CliError::Usage("--hi is required".into()))?;
                em.header::<MemberRecord>()?;
                for n in members(&a.spec, a.lo, hi)? {
                    em.emit(&MemberRecord { n })?;
                }
            }
        }
        Command::CheckExponents(a) => {
            let r = exponent_condition(&a.alpha.0, &a.beta.0, a.k, &a.epsilon.0, a.which.into())?;
            em.header::<ExponentRecord>()?;
            em.emit(&ExponentRecord {
                which: format!("{:?}", a.which).to_lowercase(),
                alpha: a.alpha.to_string(),
                beta: a.beta.to_string(),
                k: a.k,
                epsilon: a.epsilon.to_string(),
                lhs: Rational(r.lhs).to_string(),
                rhs: Rational(r.rhs).to_string(),
                holds: r.holds,
            })?;
        }
    }
    em.flush()?;
    for msg in &failures {
        writeln!(err, "self-check failed: {msg}")?;
    }
    match failures.len() {
        0 => Ok(()),
        n => Err(CliError::Verification(format!("{n} record(s) failed verification"))),
    }
}

fn c_values(p: PrimeModulus, c: CArg, seed: u64) -> Result<Vec<u64>, CliError> {
    if let CArg::Sample(0) = c {
        return Err(CliError::Usage("sample size must be positive".into()));
    }
    Ok(c.selection(seed).values(p.get()))
}

fn check_report(report: &SearchReport) -> Result<(), String> {
    if report.verify() {
        Ok(())
    } else {
        Err(format!(
            "witness {:?} does not lie on xy = {} (mod {})",
            report.found,
            report.params.c(),
            report.params.p()
        ))
    }
}

fn minimal_record(r: &SearchReport) -> MinimalRecord {
    let w = r.found.as_ref();
    MinimalRecord {
        p: r.params.p(),
        c: r.params.c(),
        minimal_h: r.minimal_h,
        h: w.map(|w| w.h),
        k: w.map(|w| w.k),
        x: w.map(|w| w.first.x),
        y: w.map(|w| w.first.y),
    }
}

fn pair_record(r: &SearchReport) -> PairRecord {
    let w = r.found.as_ref();
    PairRecord {
        p: r.params.p(),
        c: r.params.c(),
        h: w.map(|w| w.h),
        k: w.map(|w| w.k),
        x: w.map(|w| w.first.x),
        y: w.map(|w| w.first.y),
        h_max: r.constraint.h_max,
        k_max: r.constraint.k_max,
        tested_pairs: r.tested_pairs,
    }
}

fn theorem1_record(
    p: u64,
    l: u64,
    witness: Option<modhyp::Theorem1Witness>,
) -> Result<Theorem1Record, String> {
    match witness {
        Some(w) if !w.verified => Err(format!(
            "c = {} for p = {p}, L = {l} has two points in a square of side floor(sqrt(L))",
            w.c
        )),
        Some(w) => Ok(Theorem1Record { p, l, c: Some(w.c), verified: Some(true) }),
        None => Ok(Theorem1Record { p, l, c: None, verified: None }),
    }
}

fn scan<W: Write, E: Write>(
    a: &ScanArgs,
    seed: u64,
    em: &mut Emitter<W>,
    err: &mut E,
    failures: &mut Vec<String>,
) -> Result<(), CliError> {
    if a.from > a.to {
        return Err(modhyp::Error::InvalidRange { lo: a.from, hi: a.to }.into());
    }
    if let CArg::Sample(0) = a.c {
        return Err(CliError::Usage("sample size must be positive".into()));
    }
    a.h_set.validate()?;
    a.k_set.validate()?;
    let task = match a.task {
        ScanTaskArg::Minimal => {
            em.header::<MinimalRecord>()?;
            ScanTask::MinimalOffset {
                c: a.c.selection(seed),
                h_set: a.h_set.clone(),
                k_set: a.k_set.clone(),
            }
        }
        ScanTaskArg::Theorem1 => {
            em.header::<Theorem1Record>()?;
            ScanTask::Theorem1Census {
                l: a.l.map_or(RunLength::Default, RunLength::Fixed),
            }
        }
        ScanTaskArg::Np => {
            em.header::<NpRecord>()?;
            ScanTask::LeastNonresidue
        }
    };
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let csv = em.format() == Format::Csv;
    let mut io_result = Ok(());
    scan_primes(a.from, a.to, &task, workers, |row| {
        if io_result.is_err() {
            return;
        }
        io_result = (|| -> io::Result<()> {
            match row {
                ScanRow::Minimal(report) => match check_report(&report) {
                    Ok(()) => em.emit(&minimal_record(&report))?,
                    Err(msg) => failures.push(msg),
                },
                ScanRow::Theorem1 { p, l, witness } => match theorem1_record(p, l, witness) {
                    Ok(r) => em.emit(&r)?,
                    Err(msg) => failures.push(msg),
                },
                ScanRow::LeastNonresidue { p, np } => em.emit(&NpRecord { p, np })?,
                ScanRow::Failed { p, c, message } => {
                    let r = FailedRecord { p, c, error: message };
                    if csv {
                        writeln!(err, "p={} c={:?}: {}", r.p, r.c, r.error)?;
                    } else {
                        em.emit(&r)?;
                    }
                }
            }
            Ok(())
        })();
    })?;
    Ok(io_result?)
}

