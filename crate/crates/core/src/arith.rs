//! Exact modular arithmetic over odd prime moduli.
//!
//! Every product goes through a `u128` intermediate, so any odd prime that
//! fits in a `u64` is a valid modulus.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime `p`, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduce any supported integer into `[0, p)`.
    #[inline]
    pub fn reduce<T: IntoResidue>(self, a: T) -> u64 {
        a.reduce_mod(self.0)
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.0)
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.0 as u128) as u64
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.0, b % self.0);
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        let a = a % self.0;
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn pow(self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.0)
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A value in `[0, p)` carried together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: PrimeModulus,
}

impl Residue {
    pub fn new<T: IntoResidue>(a: T, modulus: PrimeModulus) -> Self {
        Residue {
            value: modulus.reduce(a),
            modulus,
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Integers that can be reduced modulo a `u64` modulus, signed ones included.
pub trait IntoResidue: Copy {
    fn reduce_mod(self, m: u64) -> u64;
}

macro_rules! unsigned_residue {
    ($($t:ty),*) => {$(
        impl IntoResidue for $t {
            #[inline]
            fn reduce_mod(self, m: u64) -> u64 {
                (self as u128 % m as u128) as u64
            }
        }
    )*};
}

macro_rules! signed_residue {
    ($($t:ty),*) => {$(
        impl IntoResidue for $t {
            #[inline]
            fn reduce_mod(self, m: u64) -> u64 {
                (self as i128).rem_euclid(m as i128) as u64
            }
        }
    )*};
}

unsigned_residue!(u8, u16, u32, u64, usize);
signed_residue!(i8, i16, i32, i64, i128, isize);

impl IntoResidue for Residue {
    #[inline]
    fn reduce_mod(self, m: u64) -> u64 {
        self.value % m
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Witnesses that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &SMALL_PRIMES {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let a = a % n;
        if a == 0 {
            continue;
        }
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

/// Jacobi symbol `(a/n)` for odd `n`, by the binary algorithm.
pub(crate) fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        // reciprocity
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol `(a/p)`; `a` may be any integer, negative ones included.
#[inline]
pub fn legendre<T: IntoResidue>(a: T, p: PrimeModulus) -> i8 {
    jacobi(p.reduce(a), p.get())
}

/// The inverse of `n` modulo `p`, in `(0, p)`.
pub fn mod_inverse<T: IntoResidue>(n: T, p: PrimeModulus) -> Result<u64> {
    let a = p.reduce(n);
    if a == 0 {
        return Err(Error::NotInvertible { p: p.get() });
    }
    let (mut old_r, mut r) = (a as i128, p.get() as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    Ok(old_s.rem_euclid(p.get() as i128) as u64)
}

/// All square roots of `a` modulo `p`, ascending.
///
/// Two roots when `a` is a nonzero square, `[0]` when `p | a`, none otherwise.
pub fn sqrt_mod<T: IntoResidue>(a: T, p: PrimeModulus) -> Vec<u64> {
    let a = p.reduce(a);
    if a == 0 {
        return vec![0];
    }
    if legendre(a, p) != 1 {
        return Vec::new();
    }
    let m = p.get();
    let r = if m % 4 == 3 {
        pow_mod(a, (m + 1) / 4, m)
    } else {
        tonelli_shanks(a, p)
    };
    debug_assert_eq!(mul_mod(r, r, m), a);
    let (lo, hi) = if r <= m - r { (r, m - r) } else { (m - r, r) };
    vec![lo, hi]
}

/// Tonelli-Shanks for a known nonzero square `a`, using the least
/// non-residue as the auxiliary non-square.
fn tonelli_shanks(a: u64, p: PrimeModulus) -> u64 {
    let m = p.get();
    let mut q = m - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = least_nonresidue(p);
    let mut big_m = s;
    let mut c = pow_mod(z, q, m);
    let mut t = pow_mod(a, q, m);
    let mut r = pow_mod(a, q.div_ceil(2), m);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, m);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(big_m - i - 1) {
            b = mul_mod(b, b, m);
        }
        big_m = i;
        c = mul_mod(b, b, m);
        t = mul_mod(t, c, m);
        r = mul_mod(r, b, m);
    }
    r
}

/// The least positive quadratic non-residue `n_p`.
pub fn least_nonresidue(p: PrimeModulus) -> u64 {
    // n_p is prime, so composite candidates can be skipped.
    (2..)
        .filter(|&n| is_prime(n))
        .find(|&n| legendre(n, p) == -1)
        .expect("every odd prime has a non-residue below p")
}

/// All primes `<= n`, ascending, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = usize::try_from(n).expect("sieve bound exceeds address space");
    // odd-only sieve: index i stands for 2i + 1
    let half = n / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let step = 2 * i + 1;
            let mut j = (step * step) / 2;
            while j < half {
                composite[j] = true;
                j += step;
            }
        }
        i += 1;
    }
    let mut out = vec![2u64];
    out.extend(
        (1..half)
            .filter(|&i| !composite[i] && 2 * i < n)
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

/// Primes in `[lo, hi]`, ascending, via a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_up_to(isqrt(hi));
    let mut out = Vec::new();
    const SEGMENT: u64 = 1 << 18;
    let mut start = lo;
    loop {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut composite = vec![false; (end - start + 1) as usize];
        for &q in &base {
            if q * q > end {
                break;
            }
            let first = (q * q).max(start.div_ceil(q) * q);
            let mut m = first;
            while m <= end {
                composite[(m - start) as usize] = true;
                m += q;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| start + i as u64),
        );
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}
