//! Exact arithmetic in `Z[θ]` for a monic irreducible `f` and numerical
//! embeddings into the Archimedean completions.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly_fp::FpPoly;

/// An element of `Z[θ]` in the power basis `1, θ, …, θ^(n-1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgElem(Vec<i64>);

impl fmt::Debug for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for AlgElem {
    /// Coordinates joined by `;`, the CSV cell format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl AlgElem {
    pub fn new(coords: Vec<i64>) -> Self {
        AlgElem(coords)
    }

    pub fn zero(n: usize) -> Self {
        AlgElem(vec![0; n])
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    pub fn constant(n: usize, c: i64) -> Self {
        let mut v = vec![0; n];
        v[0] = c;
        AlgElem(v)
    }

    /// `θ` itself (requires `n ≥ 2`).
    pub fn theta(n: usize) -> Self {
        let mut v = vec![0; n];
        v[1] = 1;
        AlgElem(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        AlgElem(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgElem(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        AlgElem(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Parse the `;`-separated CSV form.
    pub fn parse(s: &str) -> Result<Self> {
        s.split(';')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("element coordinate {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(AlgElem)
    }
}

/// On-disk field description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldConfig {
    pub name: String,
    /// Monic defining polynomial, constant term first.
    pub poly: Vec<i64>,
    /// Fundamental units in the power basis.
    #[serde(default)]
    pub units: Vec<Vec<i64>>,
    /// Generator of the roots of unity; defaults to `-1` of order 2.
    #[serde(default)]
    pub torsion: Option<TorsionConfig>,
    /// Explicit assertion that `Z[θ]` is maximal with class number one.
    #[serde(default)]
    pub class_number_one: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionConfig {
    pub order: u32,
    pub generator: Vec<i64>,
}

/// Values of an element at the stored roots: real places first, then one
/// representative per pair of complex places.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub real: Vec<f64>,
    pub complex: Vec<Complex64>,
}

/// A validated monogenic number field.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    name: String,
    poly: Vec<i64>,
    real_roots: Vec<f64>,
    complex_roots: Vec<Complex64>,
    units: Vec<AlgElem>,
    torsion_order: u32,
    torsion_generator: AlgElem,
    discriminant: i128,
    class_number_one: bool,
}

const ROOT_RESIDUAL: f64 = 1e-12;

impl FieldSpec {
    pub fn from_config(cfg: &FieldConfig) -> Result<Self> {
        let poly = cfg.poly.clone();
        if poly.len() < 3 {
            return Err(Error::InvalidField("degree must be at least 2".into()));
        }
        if *poly.last().unwrap() != 1 {
            return Err(Error::InvalidField("defining polynomial must be monic".into()));
        }
        let n = poly.len() - 1;
        if !is_irreducible_over_q(&poly) {
            return Err(Error::InvalidField(format!(
                "{:?} could not be certified irreducible",
                poly
            )));
        }
        let (real_roots, complex_roots) = split_roots(&poly)?;

        let mut field = FieldSpec {
            name: cfg.name.clone(),
            poly,
            real_roots,
            complex_roots,
            units: Vec::new(),
            torsion_order: 2,
            torsion_generator: AlgElem::constant(n, -1),
            discriminant: 0,
            class_number_one: cfg.class_number_one,
        };
        field.discriminant = field.compute_discriminant();

        for (index, coords) in cfg.units.iter().enumerate() {
            if coords.len() != n {
                return Err(Error::InvalidField(format!(
                    "unit #{index} has {} coordinates, expected {n}",
                    coords.len()
                )));
            }
            let u = AlgElem::new(coords.clone());
            let norm = field.norm(&u);
            if norm.abs() != 1 {
                return Err(Error::NonUnit { index, norm });
            }
            field.units.push(u);
        }
        if field.units.len() != field.unit_rank() {
            return Err(Error::InvalidField(format!(
                "expected {} fundamental units, got {}",
                field.unit_rank(),
                field.units.len()
            )));
        }

        if let Some(t) = &cfg.torsion {
            if t.generator.len() != n || t.order == 0 {
                return Err(Error::InvalidField("malformed torsion generator".into()));
            }
            let g = AlgElem::new(t.generator.clone());
            if field.pow(&g, t.order as u64) != AlgElem::one(n) {
                return Err(Error::InvalidField(format!(
                    "torsion generator does not have order dividing {}",
                    t.order
                )));
            }
            for q in prime_factors(t.order as u64) {
                if field.pow(&g, t.order as u64 / q) == AlgElem::one(n) {
                    return Err(Error::InvalidField(format!(
                        "torsion generator has order smaller than {}",
                        t.order
                    )));
                }
            }
            field.torsion_order = t.order;
            field.torsion_generator = g;
        }
        Ok(field)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: FieldConfig = serde_json::from_str(text)?;
        Self::from_config(&cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly(&self) -> &[i64] {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn r1(&self) -> usize {
        self.real_roots.len()
    }

    pub fn r2(&self) -> usize {
        self.complex_roots.len()
    }

    pub fn unit_rank(&self) -> usize {
        self.r1() + self.r2() - 1
    }

    pub fn real_roots(&self) -> &[f64] {
        &self.real_roots
    }

    pub fn complex_roots(&self) -> &[Complex64] {
        &self.complex_roots
    }

    pub fn units(&self) -> &[AlgElem] {
        &self.units
    }

    pub fn torsion_order(&self) -> u32 {
        self.torsion_order
    }

    pub fn torsion_generator(&self) -> &AlgElem {
        &self.torsion_generator
    }

    pub fn discriminant(&self) -> i128 {
        self.discriminant
    }

    pub fn class_number_one(&self) -> bool {
        self.class_number_one
    }

    fn reduce(&self, mut acc: Vec<i128>) -> Vec<i128> {
        let n = self.degree();
        for k in (n..acc.len()).rev() {
            let c = acc[k];
            if c == 0 {
                continue;
            }
            acc[k] = 0;
            for i in 0..n {
                acc[k - n + i] -= c * self.poly[i] as i128;
            }
        }
        acc.truncate(n);
        acc
    }

    /// Product reduced modulo `f`, or `None` when a coordinate leaves `i64`.
    pub fn checked_mul(&self, a: &AlgElem, b: &AlgElem) -> Option<AlgElem> {
        let n = self.degree();
        let mut acc = vec![0i128; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                acc[i + j] = acc[i + j].checked_add(x as i128 * y as i128)?;
            }
        }
        self.reduce(acc)
            .into_iter()
            .map(|c| i64::try_from(c).ok())
            .collect::<Option<Vec<_>>>()
            .map(AlgElem)
    }

    /// Exact product reduced modulo `f`. Panics if a coordinate overflows `i64`.
    pub fn mul(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        self.checked_mul(a, b)
            .expect("algebraic integer coordinate overflow")
    }

    pub fn pow(&self, a: &AlgElem, mut exp: u64) -> AlgElem {
        let mut base = a.clone();
        let mut acc = AlgElem::one(self.degree());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Matrix of multiplication by `a`: column `j` holds `a·θ^j`.
    pub fn mul_matrix(&self, a: &AlgElem) -> Vec<Vec<i128>> {
        let n = self.degree();
        let mut m = vec![vec![0i128; n]; n];
        let mut col: Vec<i128> = a.0.iter().map(|&c| c as i128).collect();
        for j in 0..n {
            for i in 0..n {
                m[i][j] = col[i];
            }
            let mut shifted = vec![0i128; n + 1];
            shifted[1..].copy_from_slice(&col);
            col = self.reduce(shifted);
        }
        m
    }

    /// Field norm `N(a) = Res(f, a) = det(mul_matrix(a))`.
    pub fn norm(&self, a: &AlgElem) -> i128 {
        let m = self.mul_matrix(a);
        match bareiss_det_i128(m.clone()) {
            Some(d) => d,
            None => {
                let big = bareiss_det_big(
                    m.into_iter()
                        .map(|r| r.into_iter().map(BigInt::from).collect())
                        .collect(),
                );
                big.to_i128().expect("norm exceeds i128")
            }
        }
    }

    /// Inverse of a unit, exact. `None` when `a` is not a unit.
    pub fn unit_inverse(&self, a: &AlgElem) -> Option<AlgElem> {
        let norm = self.norm(a);
        if norm.abs() != 1 {
            return None;
        }
        // Solve M x = e_0 by Cramer's rule; det(M) = ±1 keeps it integral.
        let m = self.mul_matrix(a);
        let n = self.degree();
        let mut coords = Vec::with_capacity(n);
        for j in 0..n {
            let mut mj = m.clone();
            for (i, row) in mj.iter_mut().enumerate() {
                row[j] = if i == 0 { 1 } else { 0 };
            }
            let dj = bareiss_det_i128(mj)?;
            coords.push(i64::try_from(dj * norm).ok()?);
        }
        Some(AlgElem(coords))
    }

    /// `u^k` for a unit and any signed exponent.
    pub fn unit_pow(&self, u: &AlgElem, k: i64) -> AlgElem {
        if k >= 0 {
            self.pow(u, k as u64)
        } else {
            let inv = self.unit_inverse(u).expect("unit_pow called on a non-unit");
            self.pow(&inv, k.unsigned_abs())
        }
    }

    fn compute_discriminant(&self) -> i128 {
        let n = self.degree();
        let deriv: Vec<i64> = (1..=n).map(|i| i as i64 * self.poly[i]).collect();
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        sign * self.norm(&AlgElem(deriv))
    }

    /// Values of `a` at every stored root.
    pub fn embed(&self, a: &AlgElem) -> Embedding {
        let real = self
            .real_roots
            .iter()
            .map(|&r| a.0.iter().rev().fold(0.0, |acc, &c| acc * r + c as f64))
            .collect();
        let complex = self
            .complex_roots
            .iter()
            .map(|&z| {
                a.0.iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
            })
            .collect();
        Embedding { real, complex }
    }

    /// Minkowski embedding into `R^n` (complex places contribute `√2·Re`,
    /// `√2·Im`), so the squared length is the trace form `T2`.
    pub fn minkowski(&self, a: &AlgElem) -> Vec<f64> {
        let e = self.embed(a);
        let s = std::f64::consts::SQRT_2;
        let mut v = e.real;
        for z in e.complex {
            v.push(s * z.re);
            v.push(s * z.im);
        }
        v
    }
}

/// Fraction-free determinant; `None` on `i128` overflow.
fn bareiss_det_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0);
            match swap {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

fn bareiss_det_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            out.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Certifies irreducibility over `Q` from factorization patterns modulo
/// small primes: any rational factor of degree `d` forces a subset of the
/// mod-`p` factor degrees to sum to `d` at every prime of good reduction.
pub fn is_irreducible_over_q(poly: &[i64]) -> bool {
    let n = poly.len() - 1;
    if n <= 1 {
        return true;
    }
    let mut possible = vec![true; n + 1];
    let mut good = 0;
    for p in crate::primes::sieve(2000) {
        let f = FpPoly::from_ints(p, poly);
        if f.degree() != Some(n) || !f.gcd(&f.derivative()).is_one() {
            continue;
        }
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for (g, _) in f.factor() {
            let d = g.degree().unwrap();
            for s in (d..=n).rev() {
                if sums[s - d] {
                    sums[s] = true;
                }
            }
        }
        for d in 1..n {
            possible[d] &= sums[d];
        }
        if (1..n).all(|d| !possible[d]) {
            return true;
        }
        good += 1;
        if good >= 60 {
            break;
        }
    }
    false
}

fn eval_complex(poly: &[i64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        der = der * z + val;
        val = val * z + c as f64;
    }
    (val, der)
}

fn residual_scale(poly: &[i64], r: f64) -> f64 {
    poly.iter()
        .enumerate()
        .map(|(i, &c)| (c as f64).abs() * r.powi(i as i32))
        .sum()
}

/// All complex roots by Aberth iteration followed by Newton polishing.
fn all_roots(poly: &[i64]) -> Vec<Complex64> {
    let n = poly.len() - 1;
    let bound = 1.0
        + poly[..n]
            .iter()
            .map(|&c| (c as f64).abs())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, t)
        })
        .collect();
    for _ in 0..1000 {
        let mut delta_max: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval_complex(poly, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            delta_max = delta_max.max(w.norm() / z[i].norm().max(1.0));
        }
        if delta_max < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (v, d) = eval_complex(poly, *zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= v / d;
        }
    }
    z
}

fn split_roots(poly: &[i64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let n = poly.len() - 1;
    let roots = all_roots(poly);
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for z in roots {
        if z.im.abs() <= 1e-9 * z.norm().max(1.0) {
            let mut r = z.re;
            for _ in 0..4 {
                let (v, d) = eval_complex(poly, Complex64::new(r, 0.0));
                if d.re == 0.0 {
                    break;
                }
                r -= v.re / d.re;
            }
            real.push(r);
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower || real.len() + 2 * upper.len() != n {
        return Err(Error::InvalidField("root finder failed to separate places".into()));
    }
    real.sort_by(|a, b| b.total_cmp(a));
    upper.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    for &r in &real {
        let (v, _) = eval_complex(poly, Complex64::new(r, 0.0));
        if v.norm() > ROOT_RESIDUAL * residual_scale(poly, r.abs()) {
            return Err(Error::InvalidField(format!("real root {r} residual too large")));
        }
    }
    for &z in &upper {
        let (v, _) = eval_complex(poly, z);
        if v.norm() > ROOT_RESIDUAL * residual_scale(poly, z.norm()) {
            return Err(Error::InvalidField(format!("complex root {z} residual too large")));
        }
    }
    Ok((real, upper))
}

/// The fields shipped with the crate.
pub mod bundled {
    pub const CUBIC23: &str = include_str!("../data/cubic23.json");
    pub const GAUSSIAN: &str = include_str!("../data/gaussian.json");
    pub const SQRT2: &str = include_str!("../data/sqrt2.json");

    use super::FieldSpec;

    pub fn cubic23() -> FieldSpec {
        FieldSpec::from_json(CUBIC23).expect("bundled cubic field")
    }

    pub fn gaussian() -> FieldSpec {
        FieldSpec::from_json(GAUSSIAN).expect("bundled gaussian field")
    }

    pub fn sqrt2() -> FieldSpec {
        FieldSpec::from_json(SQRT2).expect("bundled real quadratic field")
    }

    pub fn all() -> Vec<FieldSpec> {
        vec![cubic23(), gaussian(), sqrt2()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(c: &[i64]) -> AlgElem {
        AlgElem::new(c.to_vec())
    }

    /// Sylvester-matrix resultant over the rationals, independent of the
    /// multiplication-matrix route used by `norm`.
    fn sylvester_resultant(f: &[i64], g: &[i64]) -> i128 {
        let mut g = g.to_vec();
        while g.len() > 1 && *g.last().unwrap() == 0 {
            g.pop();
        }
        let m = f.len() - 1;
        let k = g.len() - 1;
        let size = m + k;
        if size == 0 {
            return 1;
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..k {
            let mut r = vec![0.0; size];
            for (j, &c) in f.iter().rev().enumerate() {
                r[i + j] = c as f64;
            }
            rows.push(r);
        }
        for i in 0..m {
            let mut r = vec![0.0; size];
            for (j, &c) in g.iter().rev().enumerate() {
                r[i + j] = c as f64;
            }
            rows.push(r);
        }
        let mut det = 1.0;
        for col in 0..size {
            let piv = (col..size)
                .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
                .unwrap();
            if rows[piv][col] == 0.0 {
                return 0;
            }
            if piv != col {
                rows.swap(piv, col);
                det = -det;
            }
            det *= rows[col][col];
            for r in col + 1..size {
                let factor = rows[r][col] / rows[col][col];
                for c in col..size {
                    rows[r][c] -= factor * rows[col][c];
                }
            }
        }
        det.round() as i128
    }

    #[test]
    fn cubic_multiplication() {
        let k = bundled::cubic23();
        assert_eq!(k.mul(&el(&[0, 1, 0]), &el(&[0, 0, 1])), el(&[1, 1, 0]));
        let a = el(&[4, -3, 2]);
        assert_eq!(k.mul(&a, &AlgElem::one(3)), a);
    }

    #[test]
    fn cubic_norms() {
        let k = bundled::cubic23();
        assert_eq!(k.norm(&el(&[-2, 1, 0])), -5);
        assert_eq!(k.norm(&AlgElem::one(3)), 1);
        assert_eq!(k.norm(&el(&[-2, 0, 1])), -1);
        let a = el(&[-2, 1, 0]);
        let b = el(&[3, 2, 1]);
        let ab = k.mul(&a, &b);
        let oracle = sylvester_resultant(k.poly(), ab.coords());
        assert_eq!(k.norm(&ab), oracle);
        assert_eq!(k.norm(&ab), k.norm(&a) * k.norm(&b));
        // -5 * 25
        assert_eq!(oracle, -125);
    }

    #[test]
    fn discriminants() {
        assert_eq!(bundled::cubic23().discriminant(), -23);
        assert_eq!(bundled::gaussian().discriminant(), -4);
        assert_eq!(bundled::sqrt2().discriminant(), 8);
    }

    #[test]
    fn cubic_embeddings() {
        let k = bundled::cubic23();
        assert_eq!(k.r1(), 1);
        assert_eq!(k.r2(), 1);
        let e = k.embed(&AlgElem::theta(3));
        assert!((e.real[0] - 1.324_717_957_244_746).abs() < 1e-14);
        assert!((e.complex[0].re + 0.662_358_978_622_373).abs() < 1e-12);
        assert!((e.complex[0].im - 0.562_279_512_062_301).abs() < 1e-12);
        assert!((e.complex[0].norm() - 1.0 / e.real[0].sqrt()).abs() < 1e-14);
        let one = k.embed(&AlgElem::one(3));
        assert_eq!(one.real, vec![1.0]);
        assert_eq!(one.complex[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let k = bundled::cubic23();
        let t = AlgElem::theta(3);
        let inv = k.unit_inverse(&t).unwrap();
        assert_eq!(inv, el(&[-1, 0, 1]));
        assert_eq!(k.mul(&t, &inv), AlgElem::one(3));
        assert!(k.unit_inverse(&el(&[2, 0, 0])).is_none());
        assert_eq!(k.mul(&k.unit_pow(&t, -5), &k.unit_pow(&t, 5)), AlgElem::one(3));
    }

    #[test]
    fn rejects_bad_configs() {
        let reducible = r#"{"name":"x","poly":[-1,0,1],"units":[],"class_number_one":true}"#;
        assert!(matches!(FieldSpec::from_json(reducible), Err(Error::InvalidField(_))));
        let not_monic = r#"{"name":"x","poly":[1,0,2],"units":[]}"#;
        assert!(FieldSpec::from_json(not_monic).is_err());
        let non_unit = r#"{"name":"x","poly":[-1,-1,0,1],"units":[[2,1,0]]}"#;
        assert!(matches!(FieldSpec::from_json(non_unit), Err(Error::NonUnit { .. })));
        let missing = r#"{"name":"x","poly":[-2,0,1],"units":[]}"#;
        assert!(FieldSpec::from_json(missing).is_err());
        // x^4 + 4 = (x^2+2x+2)(x^2-2x+2) has no rational root
        let quartic = r#"{"name":"x","poly":[4,0,0,0,1],"units":[[1,0,0,0]]}"#;
        assert!(FieldSpec::from_json(quartic).is_err());
        assert!(!is_irreducible_over_q(&[4, 0, 0, 0, 1]));
        assert!(is_irreducible_over_q(&[-2, 0, 0, 0, 1]));
    }

    #[test]
    fn configured_units_are_units() {
        for k in bundled::all() {
            for u in k.units() {
                assert_eq!(k.norm(u).abs(), 1);
            }
        }
    }

    fn small_elem() -> impl Strategy<Value = AlgElem> {
        proptest::collection::vec(-5i64..=5, 3).prop_map(AlgElem::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn norm_is_multiplicative(a in small_elem(), b in small_elem()) {
            let k = bundled::cubic23();
            prop_assert_eq!(k.norm(&k.mul(&a, &b)), k.norm(&a) * k.norm(&b));
        }

        #[test]
        fn multiplication_commutes_and_associates(a in small_elem(), b in small_elem(), c in small_elem()) {
            let k = bundled::cubic23();
            prop_assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        }

        #[test]
        fn norm_matches_embeddings(a in small_elem()) {
            let k = bundled::cubic23();
            let norm = k.norm(&a);
            let e = k.embed(&a);
            let prod = e.real.iter().map(|x| x.abs()).product::<f64>()
                * e.complex.iter().map(|z| z.norm_sqr()).product::<f64>();
            let exact = norm.abs() as f64;
            prop_assert!((prod - exact).abs() <= 1e-8 * exact.max(1.0));
        }
    }
}
