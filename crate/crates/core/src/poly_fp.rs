//! Dense univariate polynomials over a prime field `F_p` (`p < 2^63`) and
//! their complete factorization: square-free split, distinct-degree split,
//! then Cantor–Zassenhaus equal-degree splitting.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce_i128(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

/// A polynomial over `F_p`, coefficients low to high with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(p={}, {:?})", self.p, self.coeffs)
    }
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the constant term upward.
impl Ord for FpPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = FpPoly { p, coeffs };
        poly.trim();
        poly
    }

    /// Reduce an integer polynomial (low to high) modulo `p`.
    pub fn from_ints(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| reduce_i128(c as i128, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    /// The monomial `X`.
    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, self.p), c, self.p))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, k, self.p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                add_mod(a, b, self.p)
            })
            .collect();
        Self::new(self.p, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                sub_mod(a, b, self.p)
            })
            .collect();
        Self::new(self.p, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, acc.into_iter().map(|c| c as u64).collect())
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let inv_lead = inv_mod(divisor.lead(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = mul_mod(rem[k + dd], inv_lead, p);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = sub_mod(rem[k + j], mul_mod(c, d, p), p);
            }
        }
        rem.truncate(dd);
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn mul_rem(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus)
    }

    /// `self^exp mod modulus`, exponent given as a `u128`.
    pub fn pow_rem(&self, mut exp: u128, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(self.p).rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_rem(&base, modulus);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_rem(&base, modulus);
            }
        }
        acc
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p))
            .collect();
        Self::new(self.p, coeffs)
    }

    /// Given `g(X)^p`, recover `g` (valid when the derivative vanishes).
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        // a^p = a in F_p, so only the exponents need dividing.
        let coeffs = self.coeffs.iter().step_by(p).copied().collect();
        Self::new(self.p, coeffs)
    }

    /// Square-free decomposition: pairs `(g, m)` with `self = c * prod g^m`,
    /// each `g` square-free, monic and pairwise coprime.
    pub fn square_free_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        self.monic().sfd_into(1, &mut out);
        out
    }

    fn sfd_into(&self, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
        if self.degree().unwrap_or(0) == 0 {
            return;
        }
        let dp = self.derivative();
        if dp.is_zero() {
            self.pth_root().sfd_into(scale * self.p as u32, out);
            return;
        }
        let mut c = self.gcd(&dp);
        let mut w = self.div_rem(&c).0;
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_rem(&y).0;
            if !fac.is_one() {
                out.push((fac.monic(), i * scale));
            }
            w = y;
            c = c.div_rem(&w).0;
            i += 1;
        }
        if !c.is_one() {
            // Remaining part is a p-th power.
            c.pth_root().sfd_into(scale * self.p as u32, out);
        }
    }

    /// Distinct-degree split of a monic square-free polynomial: pairs
    /// `(d, h)` where `h` is the product of all irreducible factors of degree `d`.
    pub fn distinct_degree(&self) -> Vec<(usize, FpPoly)> {
        let mut out = Vec::new();
        let mut rest = self.monic();
        let x = Self::x(self.p);
        let mut frob = x.clone();
        let mut d = 0usize;
        while rest.degree().unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > rest.degree().unwrap() {
                let deg = rest.degree().unwrap();
                out.push((deg, rest));
                break;
            }
            frob = frob.pow_rem(self.p as u128, &rest);
            let g = frob.sub(&x).gcd(&rest);
            if !g.is_one() {
                rest = rest.div_rem(&g).0;
                frob = frob.rem(&rest);
                out.push((d, g));
            }
        }
        out
    }

    /// Split a monic product of distinct irreducibles all of degree `d`.
    pub fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        if n == d {
            return vec![self.monic()];
        }
        let p = self.p;
        loop {
            let a = Self::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let candidate = if p == 2 {
                // Trace map: a + a^2 + ... + a^(2^(d-1)).
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = t.mul_rem(&t, self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                // (p^d - 1)/2 = (1 + p + ... + p^(d-1)) * (p - 1)/2
                let mut conj = a.clone();
                let mut norm = a.clone();
                for _ in 1..d {
                    conj = conj.pow_rem(p as u128, self);
                    norm = norm.mul_rem(&conj, self);
                }
                norm.pow_rem(((p - 1) / 2) as u128, self).sub(&Self::one(p))
            };
            let g = candidate.gcd(self);
            if !g.is_one() && g.degree() != self.degree() {
                let h = self.div_rem(&g).0.monic();
                let mut out = g.equal_degree(d, rng);
                out.extend(h.equal_degree(d, rng));
                return out;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by (degree, coefficients). Deterministic: the equal-degree
    /// step draws from a generator seeded by `p`.
    pub fn factor(&self) -> Vec<(FpPoly, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.p);
        let mut out = Vec::new();
        for (sf, mult) in self.square_free_decomposition() {
            for (d, block) in sf.distinct_degree() {
                for g in block.equal_degree(d, &mut rng) {
                    out.push((g, mult));
                }
            }
        }
        out.sort();
        out
    }

    /// `a^(p^k) mod self`.
    pub fn frobenius_power(&self, a: &Self, k: usize) -> Self {
        (0..k).fold(a.rem(self), |acc, _| acc.pow_rem(self.p as u128, self))
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Some(0) | None => return false,
            Some(n) => n,
        };
        let f = self.monic();
        let x = Self::x(self.p);
        if f.frobenius_power(&x, n) != x.rem(&f) {
            return false;
        }
        let mut prime_divisors = Vec::new();
        let mut m = n;
        let mut q = 2;
        while q * q <= m {
            if m % q == 0 {
                prime_divisors.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            prime_divisors.push(m);
        }
        prime_divisors.into_iter().all(|r| {
            let h = f.frobenius_power(&x, n / r);
            h.sub(&x).gcd(&f).is_one()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    fn product(factors: &[(FpPoly, u32)], p: u64) -> FpPoly {
        factors.iter().fold(FpPoly::one(p), |acc, (g, m)| {
            (0..*m).fold(acc, |a, _| a.mul(g))
        })
    }

    #[test]
    fn cubic_splitting_types() {
        // X^3 - X - 1
        let f = |p| FpPoly::from_ints(p, &[-1, -1, 0, 1]);
        assert_eq!(f(2).factor(), vec![(f(2), 1)]);
        assert_eq!(
            f(5).factor(),
            vec![(poly(5, &[3, 1]), 1), (poly(5, &[3, 2, 1]), 1)]
        );
        assert_eq!(
            f(23).factor(),
            vec![(poly(23, &[13, 1]), 2), (poly(23, &[20, 1]), 1)]
        );
    }

    #[test]
    fn inseparable_input() {
        // (X^2 + X + 1)^2 * X^3 over F_2, derivative has a p-th power part
        let g = poly(2, &[1, 1, 1]);
        let f = g.mul(&g).mul(&poly(2, &[0, 0, 0, 1]));
        let fac = f.factor();
        assert_eq!(fac, vec![(poly(2, &[0, 1]), 3), (g, 2)]);
    }

    #[test]
    fn reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u64, 3, 5, 7, 101, 65537, 1_000_003] {
            for _ in 0..40 {
                let deg = rng.gen_range(1..9);
                let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
                c.push(1);
                let f = FpPoly::new(p, c);
                let fac = f.factor();
                assert_eq!(product(&fac, p), f);
                for (g, _) in &fac {
                    assert!(g.is_irreducible(), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn rabin_counts_match_necklace() {
        // irreducible monic quartics over F_2: (16 - 4)/4 = 3
        let count = (0..16u64)
            .filter(|&bits| {
                let mut c: Vec<u64> = (0..4).map(|i| (bits >> i) & 1).collect();
                c.push(1);
                FpPoly::new(2, c).is_irreducible()
            })
            .count();
        assert_eq!(count, 3);
    }
}
