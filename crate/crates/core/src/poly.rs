//! Dense univariate polynomials over `F_p`, coefficients stored low degree
//! first.

use std::fmt;

use crate::arith::{legendre, mod_inverse, sqrt_mod, IntoResidue, PrimeModulus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    modulus: PrimeModulus,
    coeffs: Vec<u64>,
}

impl Poly {
    /// Builds `c0 + c1 x + c2 x^2 + ...`; trailing zero coefficients are
    /// dropped. The result must have degree at least 1.
    pub fn new<T: IntoResidue>(modulus: PrimeModulus, coeffs: &[T]) -> Result<Self> {
        let mut coeffs: Vec<u64> = coeffs.iter().map(|&c| modulus.reduce(c)).collect();
        trim(&mut coeffs);
        if coeffs.len() < 2 {
            return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
        }
        Ok(Poly { modulus, coeffs })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().expect("nonempty")
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: u64) -> u64 {
        let p = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| p.add(p.mul(acc, x), c))
    }

    /// Degree of `f / gcd(f, f')`, the number of distinct roots over the
    /// algebraic closure. Requires `p > deg f` so that `f' != 0`.
    pub fn distinct_root_count(&self) -> usize {
        let p = self.modulus;
        let d = derivative(&self.coeffs, p);
        let g = gcd(self.coeffs.clone(), d, p);
        self.degree() - (g.len() - 1)
    }

    /// Whether `f = a g^2` for a constant `a` and polynomial `g`.
    pub fn is_scaled_square(&self) -> bool {
        let p = self.modulus;
        let inv = mod_inverse(self.leading(), p).expect("leading coefficient is nonzero");
        let monic: Vec<u64> = self.coeffs.iter().map(|&c| p.mul(c, inv)).collect();
        is_square(&monic, p)
    }

    /// Whether `f = g^2` exactly.
    pub fn is_square(&self) -> bool {
        is_square(&self.coeffs, self.modulus)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}x"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{} (mod {})", terms.join(" + "), self.modulus)
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn derivative(f: &[u64], p: PrimeModulus) -> Vec<u64> {
    let mut d: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| p.mul(p.reduce(i as u64), c))
        .collect();
    trim(&mut d);
    d
}

/// Remainder of `a` modulo nonzero `b`.
fn rem(mut a: Vec<u64>, b: &[u64], p: PrimeModulus) -> Vec<u64> {
    let lead_inv = mod_inverse(*b.last().expect("divisor is nonzero"), p).expect("nonzero lead");
    trim(&mut a);
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let q = p.mul(*a.last().expect("nonempty"), lead_inv);
        for (i, &bc) in b.iter().enumerate() {
            a[shift + i] = p.sub(a[shift + i], p.mul(q, bc));
        }
        trim(&mut a);
    }
    a
}

/// Monic gcd; an empty `b` returns `a` made monic.
fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: PrimeModulus) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = mod_inverse(lead, p).expect("nonzero lead");
        for c in &mut a {
            *c = p.mul(*c, inv);
        }
    }
    a
}

fn square(g: &[u64], p: PrimeModulus) -> Vec<u64> {
    let mut out = vec![0u64; 2 * g.len() - 1];
    for (i, &a) in g.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = p.add(out[i + j], p.mul(a, b));
        }
    }
    out
}

/// Extract a square root coefficient by coefficient from the top, then
/// check it squares back to `f`.
fn is_square(f: &[u64], p: PrimeModulus) -> bool {
    let deg = f.len() - 1;
    if deg % 2 == 1 {
        return false;
    }
    let lead = f[deg];
    if legendre(lead, p) != 1 {
        return false;
    }
    let n = deg / 2;
    let mut g = vec![0u64; n + 1];
    g[n] = sqrt_mod(lead, p)[0];
    let two_gn_inv = mod_inverse(p.mul(2, g[n]), p).expect("p is odd and g_n is nonzero");
    for i in 1..=n {
        // coefficient of x^(2n - i) in g^2, ignoring the unknown g[n - i]
        let target = 2 * n - i;
        let mut known = 0u64;
        for j in (n - i + 1)..=n {
            let l = target - j;
            if l > n - i && l <= n {
                known = p.add(known, p.mul(g[j], g[l]));
            }
        }
        g[n - i] = p.mul(p.sub(f[target], known), two_gn_inv);
    }
    square(&g, p) == f
}
