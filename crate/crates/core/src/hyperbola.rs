//! The modular hyperbola `xy = c (mod p)` and pairs of its points.
//!
//! Two points `(x, y)` and `(x + h, y + k)` lie on the hyperbola together
//! exactly when `k x^2 + h k x + h c = 0 (mod p)`. Completing the square
//! turns that into `(2kx + hk)^2 = hk (hk - 4c)`, so the number of such `x`
//! is `1 + (hk(hk - 4c) / p)`. [`criterion`] evaluates the symbol and
//! [`recover_pairs`] runs the derivation backwards to produce the points.

use serde::Serialize;

use crate::arith::{legendre, mod_inverse, sqrt_mod, IntoResidue, PrimeModulus};
use crate::error::{Error, Result};

/// The pair `(p, c)` with `c` invertible modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct HyperbolaParams {
    p: PrimeModulus,
    c: u64,
}

impl HyperbolaParams {
    pub fn new<T: IntoResidue>(p: PrimeModulus, c: T) -> Result<Self> {
        let c = p.reduce(c);
        if c == 0 {
            return Err(Error::DegenerateHyperbola { p: p.get(), c });
        }
        Ok(HyperbolaParams { p, c })
    }

    /// Convenience constructor from raw integers.
    pub fn from_raw(p: u64, c: u64) -> Result<Self> {
        let modulus = PrimeModulus::new(p)?;
        if c.is_multiple_of(p) {
            return Err(Error::DegenerateHyperbola { p, c });
        }
        Self::new(modulus, c)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p.get()
    }

    #[inline]
    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn contains(&self, point: (u64, u64)) -> bool {
        let p = self.p;
        point.0 < p.get() && point.1 < p.get() && p.mul(point.0, point.1) == self.c
    }

    /// The point with first coordinate `x`, if `x` is nonzero mod p.
    pub fn point_at<T: IntoResidue>(&self, x: T) -> Option<HyperbolaPoint> {
        let x = self.p.reduce(x);
        let inv = mod_inverse(x, self.p).ok()?;
        Some(HyperbolaPoint {
            x,
            y: self.p.mul(self.c, inv),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HyperbolaPoint {
    pub x: u64,
    pub y: u64,
}

/// Two hyperbola points at offset `(h, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PairWitness {
    pub h: u64,
    pub k: u64,
    pub first: HyperbolaPoint,
    pub second: HyperbolaPoint,
}

impl PairWitness {
    /// Re-check every invariant from scratch: both points on the hyperbola,
    /// nonzero offsets, and `second = first + (h, k)` modulo p.
    pub fn verify(&self, params: &HyperbolaParams) -> bool {
        let p = params.modulus();
        let (h, k) = (p.reduce(self.h), p.reduce(self.k));
        h != 0
            && k != 0
            && params.contains((self.first.x, self.first.y))
            && params.contains((self.second.x, self.second.y))
            && self.second.x == p.add(self.first.x, h)
            && self.second.y == p.add(self.first.y, k)
    }
}

/// The square `B_{X,Y}(H)`: residues `X + i`, `Y + j` for `0 <= i, j <= H`,
/// wrapping modulo p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Square {
    pub x0: u64,
    pub y0: u64,
    pub side: u64,
}

/// All `p - 1` points, ordered by `x`.
pub fn enumerate_points(params: &HyperbolaParams) -> Vec<HyperbolaPoint> {
    (1..params.p())
        .map(|x| params.point_at(x).expect("x is nonzero"))
        .collect()
}

fn offsets<H: IntoResidue, K: IntoResidue>(
    params: &HyperbolaParams,
    h: H,
    k: K,
) -> Result<(u64, u64)> {
    let p = params.modulus();
    let (h, k) = (p.reduce(h), p.reduce(k));
    if h == 0 || k == 0 {
        return Err(Error::ZeroOffset);
    }
    Ok((h, k))
}

#[inline]
fn discriminant(params: &HyperbolaParams, h: u64, k: u64) -> u64 {
    let p = params.modulus();
    let hk = p.mul(h, k);
    let four_c = p.mul(4, params.c());
    p.mul(hk, p.sub(hk, four_c))
}

/// The symbol `(hk(hk - 4c) / p)`.
///
/// `1` means two point pairs sit at offset `(h, k)`, `0` means exactly one
/// (the double root at `hk = 4c`), `-1` means none. Offsets may be given as
/// signed integers; they are reduced modulo p.
pub fn criterion<H: IntoResidue, K: IntoResidue>(
    params: &HyperbolaParams,
    h: H,
    k: K,
) -> Result<i8> {
    let (h, k) = offsets(params, h, k)?;
    Ok(criterion_unchecked(params, h, k))
}

/// [`criterion`] for offsets already known to be in `[1, p)`.
#[inline]
pub(crate) fn criterion_unchecked(params: &HyperbolaParams, h: u64, k: u64) -> i8 {
    legendre(discriminant(params, h, k), params.modulus())
}

/// Every pair of points at offset `(h, k)`, ordered by the first point's `x`.
pub fn recover_pairs<H: IntoResidue, K: IntoResidue>(
    params: &HyperbolaParams,
    h: H,
    k: K,
) -> Result<Vec<PairWitness>> {
    let (h, k) = offsets(params, h, k)?;
    let p = params.modulus();
    let hk = p.mul(h, k);
    let inv_2k = mod_inverse(p.mul(2, k), p)?;
    let mut out: Vec<PairWitness> = sqrt_mod(discriminant(params, h, k), p)
        .into_iter()
        .map(|s| {
            let x = p.mul(p.sub(s, hk), inv_2k);
            let first = params.point_at(x).expect("root x is nonzero");
            let second = params.point_at(p.add(x, h)).expect("x + h is nonzero");
            PairWitness {
                h,
                k,
                first,
                second,
            }
        })
        .collect();
    out.sort_by_key(|w| w.first.x);
    Ok(out)
}

/// Number of hyperbola points inside `square`.
pub fn box_count(params: &HyperbolaParams, square: &Square) -> u64 {
    let p = params.modulus();
    let m = p.get();
    if square.side >= m - 1 {
        // the square covers every residue on both axes
        return m - 1;
    }
    let (x0, y0) = (p.reduce(square.x0), p.reduce(square.y0));
    (0..=square.side)
        .filter_map(|i| params.point_at(p.add(x0, i)))
        .filter(|pt| p.sub(pt.y, y0) <= square.side)
        .count() as u64
}

/// Whether some square of the given side holds at least two points.
///
/// Decided without touching squares: two points in one square differ by
/// `h` in `[1, side]` once ordered by `x`, and by a signed `k` with
/// `1 <= |k| <= side`.
pub fn box_pair_exists(params: &HyperbolaParams, side: u64) -> Result<bool> {
    let m = params.p();
    if side >= m {
        return Err(Error::SideTooLarge { side, p: m });
    }
    for h in 1..=side {
        for k in 1..=side {
            if criterion_unchecked(params, h, k) >= 0 || criterion_unchecked(params, h, m - k) >= 0
            {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
