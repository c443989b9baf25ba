//! Prime ideals of `Z[θ]` by norm, via factorization of `f` modulo rational
//! primes, plus the rational-prime utilities that feed it.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly_fp::FpPoly;

/// Rational primes per enumeration block.
pub const BLOCK_PRIMES: usize = 1 << 16;

/// All primes `≤ limit`, by the sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = crate::poly_fp::pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `li(x) = ∫_0^x dt / log t` (principal value), Ramanujan's series.
pub fn li(x: f64) -> f64 {
    assert!(x > 1.0, "li is evaluated for x > 1 only");
    let l = x.ln();
    let mut sum = 0.0;
    let mut term = 1.0; // (log x)^n / (n! 2^(n-1)), built incrementally
    let mut inner = 0.0;
    for n in 1..200 {
        term *= l / n as f64;
        if n > 1 {
            term /= 2.0;
        }
        if (n - 1) % 2 == 0 {
            inner += 1.0 / (n as f64);
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let add = sign * term * inner;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() && n > 2 * l as usize {
            break;
        }
    }
    EULER_GAMMA + l.ln() + x.sqrt() * sum
}

/// Offset logarithmic integral `Li(x) = li(x) - li(2)`.
pub fn offset_li(x: f64) -> f64 {
    li(x) - li(2.0)
}

/// A prime ideal `(p, g(θ))` of `Z[θ]` where `g` is a monic irreducible
/// factor of `f` modulo `p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdealRec {
    pub p: u64,
    /// Monic factor `g` mod `p`, constant term first.
    pub factor: Vec<u64>,
    pub res_degree: u32,
    pub multiplicity: u32,
    pub norm: u64,
    pub ramified: bool,
}

impl fmt::Debug for PrimeIdealRec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Prime(N={}, p={}, {}, e={})",
            self.norm,
            self.p,
            self.label(),
            self.multiplicity
        )
    }
}

impl PrimeIdealRec {
    /// The residue root `r` with `θ ≡ r`, for degree-one primes.
    pub fn root(&self) -> Option<u64> {
        (self.res_degree == 1).then(|| (self.p - self.factor[0]) % self.p)
    }

    pub fn factor_poly(&self) -> FpPoly {
        FpPoly::new(self.p, self.factor.clone())
    }

    /// CSV `root` cell: the root for degree one, otherwise the factor's
    /// coefficients (constant first) joined by `;`.
    pub fn label(&self) -> String {
        match self.root() {
            Some(r) => r.to_string(),
            None => self.factor.iter().join(";"),
        }
    }

    /// Recover the record identity from `(p, label)` within `field`.
    pub fn from_label(field: &FieldSpec, p: u64, label: &str) -> Result<Self> {
        let factor: Vec<u64> = if label.contains(';') {
            label
                .split(';')
                .map(|t| t.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("factor label {label:?}: {e}")))?
        } else {
            let r: u64 = label
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("root label {label:?}: {e}")))?;
            vec![(p - r % p) % p, 1]
        };
        let target = FpPoly::new(p, factor);
        factor_poly_mod_p(field, p)?
            .into_iter()
            .find(|(g, _)| *g == target)
            .map(|(g, m)| record(p, &g, m))
            .ok_or_else(|| Error::Parse(format!("no prime over {p} with label {label:?}")))
    }

    fn sort_key(&self) -> (u64, u64, u32, &[u64]) {
        (self.norm, self.p, self.res_degree, &self.factor)
    }
}

impl PartialOrd for PrimeIdealRec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `(norm, p, r)`; factors of higher degree compare by coefficients.
impl Ord for PrimeIdealRec {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.sort_key();
        let b = other.sort_key();
        (a.0, a.1, a.2)
            .cmp(&(b.0, b.1, b.2))
            .then_with(|| match (self.root(), other.root()) {
                (Some(x), Some(y)) => x.cmp(&y),
                _ => a.3.cmp(b.3),
            })
    }
}

fn record(p: u64, g: &FpPoly, mult: u32) -> PrimeIdealRec {
    let d = g.degree().expect("nonzero factor") as u32;
    PrimeIdealRec {
        p,
        factor: g.coeffs().to_vec(),
        res_degree: d,
        multiplicity: mult,
        norm: p.checked_pow(d).unwrap_or(u64::MAX),
        ramified: mult > 1,
    }
}

/// Factor the defining polynomial modulo a prime `p`.
pub fn factor_poly_mod_p(field: &FieldSpec, p: u64) -> Result<Vec<(FpPoly, u32)>> {
    if !is_prime_u64(p) || p > (1 << 63) {
        return Err(Error::ParamViolation(format!("{p} is not a prime below 2^63")));
    }
    Ok(FpPoly::from_ints(p, field.poly()).factor())
}

/// All prime ideals above `p`, ordered by the record order.
pub fn primes_above(field: &FieldSpec, p: u64) -> Result<Vec<PrimeIdealRec>> {
    let mut out: Vec<_> = factor_poly_mod_p(field, p)?
        .iter()
        .map(|(g, m)| record(p, g, *m))
        .collect();
    out.sort();
    Ok(out)
}

/// Every prime ideal of norm `≤ max_norm`, ascending in `(norm, p, r)`.
pub fn enumerate_prime_ideals(field: &FieldSpec, max_norm: u64) -> Vec<PrimeIdealRec> {
    let rational = sieve(max_norm);
    let blocks: Vec<Vec<PrimeIdealRec>> = rational
        .par_chunks(BLOCK_PRIMES)
        .map(|chunk| {
            let mut block: Vec<PrimeIdealRec> = chunk
                .iter()
                .flat_map(|&p| {
                    FpPoly::from_ints(p, field.poly())
                        .factor()
                        .into_iter()
                        .map(move |(g, m)| record(p, &g, m))
                })
                .filter(|rec| rec.norm <= max_norm)
                .collect();
            block.sort();
            block
        })
        .collect();
    blocks.into_iter().kmerge().collect()
}

/// `π_K(x)` against `Li(x)`, the prime ideal theorem check.
pub fn prime_ideal_theorem_ratio(field: &FieldSpec, x: u64) -> f64 {
    enumerate_prime_ideals(field, x).len() as f64 / offset_li(x as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bundled;

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = sieve(20_000);
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), primes.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn li_values() {
        // li(10^6) = 78627.5491594622...
        assert!((li(1e6) - 78_627.549_159_462_2).abs() < 1e-6);
        assert!((li(2.0) - 1.045_163_780_117_492_8).abs() < 1e-12);
    }

    #[test]
    fn cubic_small_primes() {
        let k = bundled::cubic23();
        let recs = enumerate_prime_ideals(&k, 30);
        let norms: Vec<u64> = recs.iter().map(|r| r.norm).collect();
        assert_eq!(norms, vec![5, 7, 8, 11, 17, 19, 23, 23, 25, 27]);
        let at23: Vec<_> = recs.iter().filter(|r| r.p == 23).collect();
        assert_eq!(at23.len(), 2);
        assert_eq!(at23.iter().filter(|r| r.ramified).count(), 1);
        assert_eq!(at23[0].root(), Some(3));
        assert_eq!(at23[1].root(), Some(10));
        assert!(at23[1].ramified);
    }

    #[test]
    fn cubic_splitting_by_prime() {
        let k = bundled::cubic23();
        let two = primes_above(&k, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!((two[0].norm, two[0].res_degree), (8, 3));
        let five = primes_above(&k, 5).unwrap();
        assert_eq!(five.iter().map(|r| r.norm).collect::<Vec<_>>(), vec![5, 25]);
        assert_eq!(five[0].root(), Some(2));
        assert_eq!(five[1].factor, vec![3, 2, 1]);
        assert!(factor_poly_mod_p(&k, 9).is_err());
    }

    #[test]
    fn gaussian_two() {
        let k = bundled::gaussian();
        let recs = enumerate_prime_ideals(&k, 2);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].p, 2);
        assert_eq!(recs[0].root(), Some(1));
        assert!(recs[0].ramified);
    }

    #[test]
    fn degree_sum_and_reconstruction() {
        for k in bundled::all() {
            for p in sieve(3000) {
                let fac = factor_poly_mod_p(&k, p).unwrap();
                let total: u32 = fac
                    .iter()
                    .map(|(g, m)| g.degree().unwrap() as u32 * m)
                    .sum();
                assert_eq!(total as usize, k.degree());
                let prod = fac.iter().fold(FpPoly::one(p), |acc, (g, m)| {
                    (0..*m).fold(acc, |a, _| a.mul(g))
                });
                assert_eq!(prod, FpPoly::from_ints(p, k.poly()));
                let ramified = fac.iter().any(|(_, m)| *m > 1);
                assert_eq!(ramified, k.discriminant() % p as i128 == 0, "p = {p}");
            }
        }
    }

    #[test]
    fn ordering_is_strict() {
        let k = bundled::cubic23();
        let recs = enumerate_prime_ideals(&k, 50_000);
        for w in recs.windows(2) {
            assert!(w[0] < w[1]);
            assert!(w[0].norm <= w[1].norm);
        }
    }

    #[test]
    fn labels_roundtrip() {
        let k = bundled::cubic23();
        for rec in enumerate_prime_ideals(&k, 2000) {
            let back = PrimeIdealRec::from_label(&k, rec.p, &rec.label()).unwrap();
            assert_eq!(back, rec);
        }
    }

    #[test]
    fn block_merge_is_independent_of_threads() {
        let k = bundled::cubic23();
        let a = enumerate_prime_ideals(&k, 200_000);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| enumerate_prime_ideals(&k, 200_000));
        assert_eq!(a, b);
    }
}
