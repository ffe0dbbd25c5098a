//! Command-line configuration. The same structures parse from flags and
//! serialize to JSON, so a run can be recorded and replayed.

use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modhyp::{CSelection, DistanceSetSpec, ExponentRegime, ScheduleKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

const AFTER_HELP: &str = "\
Output is newline-delimited JSON by default. CSV columns per subcommand:
  minimal-h, scan --task minimal  p,c,minimal_H,h,k,x,y
  pairs                           p,c,h,k,x,y,h_max,k_max,tested_pairs
  theorem1, scan --task theorem1  p,L,c,verified
  sigma                           p,L,sigma
  np, scan --task np              p,np
  charsum                         p,degree,value,distinct_roots,weil_bound,weil_applicable
  doublesum                       p,from,to,interval_len,set_len,total,trivial_bound
  triplesum                       p,c,a_len,z0_len,z1_len,S,S_regrouped,sum_w,W
  sets                            n          (with --density: spec,X,count,ratio,dyadic_count)
  check-exponents                 which,alpha,beta,k,epsilon,lhs,rhs,holds

Exit codes: 0 ok, 2 bad arguments, 3 a self-check caught an inconsistency.";

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "modhyp", version, about = "Close point pairs on modular hyperbolas xy = c (mod p)", after_help = AFTER_HELP)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for `--c sample:N`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Smallest H with h, k in [1, H] drawn from the given sets.
    MinimalH(MinimalArgs),
    /// First pair with h, k in their sets and bounds (k ascending, then h).
    Pairs(PairsArgs),
    /// Smallest c whose non-residue run of length L blocks close pairs.
    Theorem1(RunArgs),
    /// Number of c satisfying the non-residue run condition.
    Sigma(RunArgs),
    /// Least quadratic non-residue modulo p.
    Np(PrimeArg),
    /// Complete character sum of a polynomial with its Weil bound.
    Charsum(CharsumArgs),
    /// sum over x in [from, to] of |sum over y in S of ((y + x)/p)|.
    Doublesum(DoublesumArgs),
    /// The triple sum S, weights w(n) and second moment W.
    Triplesum(TriplesumArgs),
    /// Run a task for every prime in a range.
    Scan(ScanArgs),
    /// List members of a distance set, or report its density.
    Sets(SetsArgs),
    /// Check the double-sum exponent conditions in exact arithmetic.
    CheckExponents(ExponentArgs),
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct PrimeArg {
    #[arg(long)]
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct MinimalArgs {
    #[arg(long)]
    pub p: u64,
    /// An integer, `all`, or `sample:N`.
    #[arg(long, default_value = "1")]
    pub c: CArg,
    #[arg(long, default_value = "all")]
    pub h_set: DistanceSetSpec,
    #[arg(long, default_value = "all")]
    pub k_set: DistanceSetSpec,
    /// Largest H to try (default p - 1).
    #[arg(long)]
    pub bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PairsArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value = "1")]
    pub c: CArg,
    #[arg(long, default_value = "all")]
    pub h_set: DistanceSetSpec,
    #[arg(long, default_value = "all")]
    pub k_set: DistanceSetSpec,
    #[arg(long)]
    pub h_max: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Take h_max, k_max from the (H, K) schedule for this kind of set.
    #[arg(long, value_enum, conflicts_with_all = ["h_max", "k_max", "widen"])]
    pub schedule: Option<ScheduleArg>,
    /// Start at ceil(p^(11/34 + epsilon)) and double until a pair is found.
    /// Both h and k come from --h-set.
    #[arg(long, conflicts_with = "k_set")]
    pub widen: bool,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleArg {
    Multclosed,
    Squarefree,
}

impl From<ScheduleArg> for ScheduleKind {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Multclosed => ScheduleKind::MultClosed,
            ScheduleArg::Squarefree => ScheduleKind::Squarefree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long)]
    pub p: u64,
    /// Run length (default floor(0.1 ln p)).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct CharsumArgs {
    #[arg(long)]
    pub p: u64,
    /// Coefficients c0,c1,..., constant term first; may be negative.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub poly: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct DoublesumArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    /// The inner set S, as a distance set restricted to [set-lo, set-hi].
    #[arg(long)]
    pub set: DistanceSetSpec,
    #[arg(long, default_value_t = 1)]
    pub set_lo: u64,
    /// Defaults to p.
    #[arg(long)]
    pub set_hi: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct TriplesumArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub c: u64,
    #[arg(long)]
    pub a: DistanceSetSpec,
    #[arg(long)]
    pub z0: DistanceSetSpec,
    #[arg(long)]
    pub z1: DistanceSetSpec,
    /// Each set is taken within [1, hi].
    #[arg(long)]
    pub hi: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanTaskArg {
    Minimal,
    Theorem1,
    Np,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub task: ScanTaskArg,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    /// Run length for the theorem1 task (default floor(0.1 ln p) per prime).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<u64>,
    #[arg(long, default_value = "1")]
    pub c: CArg,
    #[arg(long, default_value = "all")]
    pub h_set: DistanceSetSpec,
    #[arg(long, default_value = "all")]
    pub k_set: DistanceSetSpec,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct SetsArgs {
    #[arg(long)]
    pub spec: DistanceSetSpec,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long, required_unless_present = "density")]
    pub hi: Option<u64>,
    /// Report counts on [1, X] and [X, 2X] instead of listing members.
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    pub density: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Karatsuba,
    Chang,
}

impl From<RegimeArg> for ExponentRegime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Karatsuba => ExponentRegime::Karatsuba,
            RegimeArg::Chang => ExponentRegime::Chang,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct ExponentArgs {
    /// Exact rational: terms like `11/34`, `0.4` or `1e-6` joined by `+`.
    #[arg(long)]
    pub alpha: Rational,
    #[arg(long)]
    pub beta: Rational,
    #[arg(long, default_value_t = 3)]
    pub k: u64,
    #[arg(long, default_value = "0")]
    pub epsilon: Rational,
    #[arg(long, value_enum, default_value_t = RegimeArg::Chang)]
    pub which: RegimeArg,
}

/// How to choose `c`: a single value, all of `[1, p - 1]`, or a seeded sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CArg {
    Value(u64),
    All,
    Sample(usize),
}

impl CArg {
    pub fn selection(self, seed: u64) -> CSelection {
        match self {
            CArg::Value(c) => CSelection::Fixed(c),
            CArg::All => CSelection::All,
            CArg::Sample(n) => CSelection::Sample { n, seed },
        }
    }
}

impl FromStr for CArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(CArg::All);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            return n
                .parse()
                .map(CArg::Sample)
                .map_err(|_| format!("bad sample size {n:?}"));
        }
        s.parse()
            .map(CArg::Value)
            .map_err(|_| format!("expected an integer, `all` or `sample:N`, got {s:?}"))
    }
}

impl fmt::Display for CArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CArg::Value(c) => write!(f, "{c}"),
            CArg::All => f.write_str("all"),
            CArg::Sample(n) => write!(f, "sample:{n}"),
        }
    }
}

impl TryFrom<String> for CArg {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<CArg> for String {
    fn from(c: CArg) -> String {
        c.to_string()
    }
}

/// An exact rational parsed from sums of fractions and decimals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Rational(pub BigRational);

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut total = BigRational::zero();
        for term in s.split('+') {
            total += parse_term(term.trim()).ok_or_else(|| format!("bad rational term {term:?}"))?;
        }
        Ok(Rational(total))
    }
}

fn parse_term(t: &str) -> Option<BigRational> {
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        return (!d.is_zero()).then(|| n / d);
    }
    parse_decimal(t)
}

/// `[-]digits[.digits][e[-]digits]`, exactly.
fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(digits);
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if neg {
        value = -value;
    }
    Some(value)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl TryFrom<String> for Rational {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}
