//! Monic irreducibles over `F_q`, their residue classes modulo `m(T)`, and
//! Frobenius classes in a constant field extension.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Table-driven `F_q` for prime `q` and `q ∈ {4, 8, 9}`.
#[derive(Clone, Debug)]
pub struct Fq {
    q: usize,
    p: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn is_small_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl Fq {
    pub fn new(q: usize) -> Result<Self> {
        // defining polynomial over F_p, constant term first, monic
        let (p, modulus): (usize, Vec<usize>) = match q {
            4 => (2, vec![1, 1, 1]),
            8 => (2, vec![1, 1, 0, 1]),
            9 => (3, vec![1, 0, 1]),
            _ if is_small_prime(q) && q < 256 => (q, vec![0, 1]),
            _ => {
                return Err(Error::ParamViolation(format!(
                    "q = {q}: only primes below 256 and 4, 8, 9 are supported"
                )))
            }
        };
        let k = modulus.len() - 1;
        let digits = |mut e: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = e % p;
                    e /= p;
                    d
                })
                .collect()
        };
        let undigits = |d: &[usize]| d.iter().rev().fold(0, |acc, &x| acc * p + x);
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s) as u8;
                let mut prod = vec![0usize; 2 * k];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for d in (k..2 * k).rev() {
                    let c = prod[d];
                    if c != 0 {
                        for (i, m) in modulus.iter().enumerate() {
                            prod[d - k + i] = (prod[d - k + i] + (p - c) * m) % p;
                        }
                    }
                }
                mul[a * q + b] = undigits(&prod[..k]) as u8;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8
                }
            })
            .collect();
        Ok(Fq {
            q,
            p,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }
}

/// Polynomial over `F_q`, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyFq {
    coeffs: Vec<u8>,
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<u8>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn parse(s: &str, fq: &Fq) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                let v: usize = t
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))?;
                if v >= fq.q() {
                    return Err(Error::Parse(format!("coefficient {v} not below q = {}", fq.q())));
                }
                Ok(v as u8)
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self::new(coeffs))
    }

    /// The monic polynomial of degree `n` whose lower coefficients are the
    /// base-`q` digits of `index`.
    pub fn monic_from_index(q: usize, n: usize, mut index: usize) -> Self {
        let mut c = Vec::with_capacity(n + 1);
        for _ in 0..n {
            c.push((index % q) as u8);
            index /= q;
        }
        c.push(1);
        PolyFq { coeffs: c }
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn x() -> Self {
        PolyFq { coeffs: vec![0, 1] }
    }

    pub fn one() -> Self {
        PolyFq { coeffs: vec![1] }
    }

    pub fn add(&self, o: &Self, fq: &Fq) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[u8], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(
            (0..n)
                .map(|i| fq.add(get(&self.coeffs, i), get(&o.coeffs, i)))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self, fq: &Fq) -> Self {
        self.add(&Self::new(o.coeffs.iter().map(|&c| fq.neg(c)).collect()), fq)
    }

    pub fn mul(&self, o: &Self, fq: &Fq) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(vec![]);
        }
        let mut r = vec![0u8; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = fq.add(r[i + j], fq.mul(a, b));
            }
        }
        Self::new(r)
    }

    pub fn div_rem(&self, m: &Self, fq: &Fq) -> (Self, Self) {
        let dm = m.degree().expect("division by zero polynomial");
        let lead_inv = fq.inv(m.coeffs[dm]).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dm {
            return (Self::new(vec![]), self.clone());
        }
        let mut quo = vec![0u8; r.len() - dm];
        for d in (dm..r.len()).rev() {
            let c = fq.mul(r[d], lead_inv);
            if c == 0 {
                continue;
            }
            quo[d - dm] = c;
            for (i, &mc) in m.coeffs.iter().enumerate() {
                let k = d - dm + i;
                r[k] = fq.sub(r[k], fq.mul(c, mc));
            }
        }
        r.truncate(dm);
        (Self::new(quo), Self::new(r))
    }

    pub fn rem(&self, m: &Self, fq: &Fq) -> Self {
        self.div_rem(m, fq).1
    }

    pub fn monic(&self, fq: &Fq) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&l) => {
                let li = fq.inv(l).unwrap();
                Self::new(self.coeffs.iter().map(|&c| fq.mul(c, li)).collect())
            }
        }
    }

    pub fn gcd(&self, o: &Self, fq: &Fq) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, fq);
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    /// `self^q mod m`.
    pub fn pow_q_mod(&self, m: &Self, fq: &Fq) -> Self {
        let mut result = Self::one();
        let mut base = self.rem(m, fq);
        let mut e = fq.q();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, fq).rem(m, fq);
            }
            base = base.mul(&base, fq).rem(m, fq);
            e >>= 1;
        }
        result
    }

    /// Irreducibility via `gcd(f, T^{q^i} - T) = 1` for `i ≤ n/2`.
    pub fn is_irreducible(&self, fq: &Fq) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let f = self.monic(fq);
        let x = Self::x();
        let mut t = x.clone();
        for _ in 1..=n / 2 {
            t = t.pow_q_mod(&f, fq);
            if f.gcd(&t.sub(&x, fq), fq).degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Coefficients joined by `;`, constant first.
    pub fn label(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// `(1/n) Σ_{d | n} μ(d) q^{n/d}`.
pub fn necklace_count(q: u64, n: u32) -> u64 {
    let n64 = n as u64;
    let total: i128 = (1..=n64)
        .filter(|d| n64 % d == 0)
        .map(|d| mobius(d) as i128 * (q as i128).pow((n64 / d) as u32))
        .sum();
    (total / n as i128) as u64
}

/// Monic irreducibles of degree `n` in index order, by sieving out all
/// products `f·g` with `f` irreducible of degree `≤ n/2`.
pub fn irreducibles(fq: &Fq, n: usize) -> Vec<PolyFq> {
    let q = fq.q();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return (0..q).map(|i| PolyFq::monic_from_index(q, 1, i)).collect();
    }
    let size = q.pow(n as u32);
    let mut reducible = vec![false; size];
    let mut g = vec![0u8; n + 1];
    let mut prod = vec![0u8; n + 1];
    for d in 1..=n / 2 {
        let e = n - d;
        for f in irreducibles(fq, d) {
            let fc = f.coeffs();
            g.iter_mut().for_each(|c| *c = 0);
            g[e] = 1;
            for _ in 0..q.pow(e as u32) {
                prod.iter_mut().for_each(|c| *c = 0);
                for (i, &a) in fc.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (j, &b) in g[..=e].iter().enumerate() {
                        prod[i + j] = fq.add(prod[i + j], fq.mul(a, b));
                    }
                }
                let idx = prod[..n].iter().rev().fold(0usize, |acc, &c| acc * q + c as usize);
                reducible[idx] = true;
                // odometer over the lower coefficients of g
                for c in g[..e].iter_mut() {
                    *c += 1;
                    if (*c as usize) < q {
                        break;
                    }
                    *c = 0;
                }
            }
        }
    }
    reducible
        .iter()
        .enumerate()
        .filter(|(_, r)| !**r)
        .map(|(i, _)| PolyFq::monic_from_index(q, n, i))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassRow {
    pub n: u32,
    pub total: u64,
    pub necklace: u64,
    /// Irreducibles dividing the modulus, outside every class.
    pub excluded: u64,
    pub counts: Vec<u64>,
    pub predicted: f64,
    pub residuals: Vec<f64>,
    /// `residual / q^{n/2}`.
    pub normalized: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCountReport {
    pub q: usize,
    pub modulus: PolyFq,
    /// Residues coprime to the modulus, in index order.
    pub classes: Vec<PolyFq>,
    pub rows: Vec<ClassRow>,
}

impl ClassCountReport {
    pub fn phi(&self) -> usize {
        self.classes.len()
    }

    pub fn max_normalized(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.normalized.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row_sums_match(&self) -> bool {
        self.rows.iter().all(|r| {
            r.counts.iter().sum::<u64>() + r.excluded == r.necklace && r.total == r.necklace
        })
    }
}

fn residue_index(r: &PolyFq, q: usize) -> usize {
    r.coeffs().iter().rev().fold(0, |acc, &c| acc * q + c as usize)
}

struct ClassTable {
    modulus: PolyFq,
    dm: usize,
    class_of: Vec<Option<usize>>,
    classes: Vec<PolyFq>,
}

impl ClassTable {
    fn new(modulus: &PolyFq, fq: &Fq) -> Result<Self> {
        let q = fq.q();
        let m = modulus.monic(fq);
        let dm = m
            .degree()
            .ok_or_else(|| Error::ParamViolation("modulus must be nonzero".into()))?;
        let all_residues = q.pow(dm as u32);
        let mut class_of = vec![None; all_residues];
        let mut classes = Vec::new();
        for idx in 0..all_residues {
            let mut c = Vec::with_capacity(dm);
            let mut t = idx;
            for _ in 0..dm {
                c.push((t % q) as u8);
                t /= q;
            }
            let r = PolyFq::new(c);
            let unit = dm == 0 || (!r.is_zero() && r.gcd(&m, fq).degree() == Some(0));
            if unit {
                class_of[idx] = Some(classes.len());
                classes.push(r);
            }
        }
        Ok(ClassTable {
            modulus: m,
            dm,
            class_of,
            classes,
        })
    }

    fn row(&self, fq: &Fq, n: u32, irr: &[PolyFq]) -> ClassRow {
        let q = fq.q();
        let phi = self.classes.len();
        let mut counts = vec![0u64; phi];
        let mut excluded = 0;
        for f in irr {
            let idx = if self.dm == 0 {
                0
            } else {
                residue_index(&f.rem(&self.modulus, fq), q)
            };
            match self.class_of[idx] {
                Some(c) => counts[c] += 1,
                None => excluded += 1,
            }
        }
        let predicted = (q as f64).powi(n as i32) / (n as f64 * phi as f64);
        let scale = (q as f64).powf(n as f64 / 2.0);
        let residuals: Vec<f64> = counts.iter().map(|&c| c as f64 - predicted).collect();
        ClassRow {
            n,
            total: irr.len() as u64,
            necklace: necklace_count(q as u64, n),
            excluded,
            normalized: residuals.iter().map(|r| r / scale).collect(),
            counts,
            predicted,
            residuals,
        }
    }
}

/// Counts of monic irreducibles of each degree `1..=n_max` by residue
/// class modulo `m`.
pub fn class_counts(q: usize, modulus: &PolyFq, n_max: u32) -> Result<ClassCountReport> {
    Ok(class_counts_many(q, std::slice::from_ref(modulus), n_max)?
        .pop()
        .expect("one report per modulus"))
}

/// [`class_counts`] for several moduli, sieving each degree once.
pub fn class_counts_many(
    q: usize,
    moduli: &[PolyFq],
    n_max: u32,
) -> Result<Vec<ClassCountReport>> {
    let fq = Fq::new(q)?;
    let tables = moduli
        .iter()
        .map(|m| ClassTable::new(m, &fq))
        .collect::<Result<Vec<_>>>()?;
    let by_degree: Vec<Vec<ClassRow>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let irr = irreducibles(&fq, n as usize);
            tables.iter().map(|t| t.row(&fq, n, &irr)).collect()
        })
        .collect();
    let mut reports: Vec<ClassCountReport> = tables
        .into_iter()
        .map(|t| ClassCountReport {
            q,
            modulus: t.modulus,
            classes: t.classes,
            rows: Vec::with_capacity(n_max as usize),
        })
        .collect();
    for rows in by_degree {
        for (r, row) in reports.iter_mut().zip(rows) {
            r.rows.push(row);
        }
    }
    Ok(reports)
}

/// Monic polynomials of degree `1..=d` over `F_q`, in index order.
pub fn monic_moduli(q: usize, d: usize) -> Vec<PolyFq> {
    (1..=d)
        .flat_map(|n| (0..q.pow(n as u32)).map(move |i| PolyFq::monic_from_index(q, n, i)))
        .collect()
}

/// One cell `(n, g)` of `Z × Gal(F_{q^m}/F_q)`, with `g` the exponent of
/// the `q`-power Frobenius.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobCell {
    pub n: u32,
    pub g: u32,
    pub in_gamma: bool,
    pub count: u64,
    pub predicted: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NongeometricReport {
    pub q: usize,
    pub m_const: u32,
    /// Defining polynomial of `F_{q^m}` over `F_q`.
    pub h: PolyFq,
    pub cells: Vec<FrobCell>,
}

impl NongeometricReport {
    pub fn outside_gamma_total(&self) -> u64 {
        self.cells.iter().filter(|c| !c.in_gamma).map(|c| c.count).sum()
    }

    pub fn max_normalized_in_gamma(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.in_gamma)
            .fold(0.0, |m, c| m.max(c.normalized.abs()))
    }
}

/// The `j ∈ Z/m` with `α^{q^n} = α^{q^j}` for a root `α` of `h`: the
/// Frobenius at a prime of degree `n` acting on the constant field.
pub fn constant_frobenius(fq: &Fq, h: &PolyFq, n: u32) -> u32 {
    let m = h.degree().unwrap_or(0) as u32;
    if m <= 1 {
        return 0;
    }
    let alpha = PolyFq::x();
    let mut beta = alpha.clone();
    for _ in 0..n {
        beta = beta.pow_q_mod(h, fq);
    }
    let mut conj = alpha;
    for j in 0..m {
        if conj == beta {
            return j;
        }
        conj = conj.pow_q_mod(h, fq);
    }
    unreachable!("Frobenius image not among the conjugates")
}

/// Tabulate `(deg 𝔭, σ(𝔭))` for the constant field extension of degree
/// `m_const`; `Γ` is the set of cells with `g ≡ n (mod m_const)`.
pub fn nongeometric_image(q: usize, m_const: u32, n_max: u32) -> Result<NongeometricReport> {
    if m_const == 0 {
        return Err(Error::ParamViolation("constant extension degree must be >= 1".into()));
    }
    let fq = Fq::new(q)?;
    let h = if m_const == 1 {
        PolyFq::x()
    } else {
        irreducibles(&fq, m_const as usize)
            .into_iter()
            .next()
            .expect("irreducibles exist in every degree")
    };
    let cells = (1..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut counts = vec![0u64; m_const as usize];
            for _f in irreducibles(&fq, n as usize) {
                counts[constant_frobenius(&fq, &h, n) as usize] += 1;
            }
            let scale = (q as f64).powf(n as f64 / 2.0);
            let predicted = (q as f64).powi(n as i32) / n as f64;
            counts
                .into_iter()
                .enumerate()
                .map(move |(g, count)| {
                    let in_gamma = g as u32 == n % m_const;
                    let pred = if in_gamma { predicted } else { 0.0 };
                    FrobCell {
                        n,
                        g: g as u32,
                        in_gamma,
                        count,
                        predicted: pred,
                        normalized: (count as f64 - pred) / scale,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(NongeometricReport {
        q,
        m_const,
        h,
        cells,
    })
}
