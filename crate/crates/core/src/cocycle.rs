//! Truncated product spaces `Π (Z₊, μ_𝔭)`, the Radon–Nikodym and
//! product-type cocycles on the tail relation, and the partial
//! transformation assembled from disjoint cylinder blocks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ratio::PairWitness;
use crate::torus::TorusPoint;

pub const DEFAULT_LEVEL: u32 = 8;
pub const SAMPLE_CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Coord {
    pub label: String,
    pub norm: u64,
    /// Truncation level: values `0..level` carry `μ(j)`, `level` the tail.
    pub level: u32,
    pub rho: Option<TorusPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpaceCfg {
    coords: Vec<Coord>,
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ProductSpaceCfg {
    pub fn new(coords: Vec<Coord>) -> Result<Self> {
        for (i, c) in coords.iter().enumerate() {
            if c.norm < 2 || c.level == 0 {
                return Err(Error::ParamViolation(format!(
                    "coordinate {i}: need norm >= 2 and level >= 1"
                )));
            }
        }
        Ok(ProductSpaceCfg { coords })
    }

    /// Coordinates `𝔭₁, 𝔮₁, 𝔭₂, 𝔮₂, …` of a witness, in pair order.
    pub fn from_witness(w: &PairWitness, level: u32) -> Result<Self> {
        let coords = w
            .pairs
            .iter()
            .flat_map(|pr| {
                [(&pr.p, &pr.rho_p), (&pr.q, &pr.rho_q)].map(|(id, rho)| Coord {
                    label: format!("{}:{}", id.p, id.label()),
                    norm: id.norm,
                    level,
                    rho: Some(rho.clone()),
                })
            })
            .collect();
        Self::new(coords)
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn coord(&self, i: usize) -> Result<&Coord> {
        self.coords
            .get(i)
            .ok_or_else(|| Error::NotEquivalent(format!("coordinate {i} is outside the space")))
    }

    /// `μ(j) = N^{-j}(1 - N^{-1})` below the level, `N^{-level}` at it.
    pub fn mass(&self, i: usize, j: u32) -> Result<BigRational> {
        let c = self.coord(i)?;
        let n = rat(c.norm);
        let pow = num_traits::pow(n.clone(), j.min(c.level) as usize).recip();
        Ok(match j.cmp(&c.level) {
            std::cmp::Ordering::Less => pow * (BigRational::one() - n.recip()),
            std::cmp::Ordering::Equal => pow,
            std::cmp::Ordering::Greater => BigRational::zero(),
        })
    }

    pub fn masses(&self, i: usize) -> Result<Vec<BigRational>> {
        let level = self.coord(i)?.level;
        (0..=level).map(|j| self.mass(i, j)).collect()
    }
}

/// Finitely supported point of `Π Z₊`; absent coordinates are 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TailPoint(BTreeMap<usize, u32>);

impl TailPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(it: I) -> Self {
        let mut t = Self::new();
        for (i, v) in it {
            t.set(i, v);
        }
        t
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, v: u32) {
        if v == 0 {
            self.0.remove(&i);
        } else {
            self.0.insert(i, v);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(i, v)| (*i, *v))
    }

    /// Coordinates where the two points differ.
    pub fn differing(&self, other: &Self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.0.keys().chain(other.0.keys()).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx.retain(|&i| self.get(i) != other.get(i));
        idx
    }
}

fn differing_checked(x: &TailPoint, y: &TailPoint, cfg: &ProductSpaceCfg) -> Result<Vec<usize>> {
    let diff = x.differing(y);
    for &i in &diff {
        let level = cfg.coord(i)?.level;
        for v in [x.get(i), y.get(i)] {
            if v >= level {
                return Err(Error::TailLevel { coord: i, level });
            }
        }
    }
    Ok(diff)
}

fn int_pow_ratio(norm: u64, e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(norm), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// `c_μ(x, y) = Π N^{x_i - y_i}` over the differing coordinates.
pub fn rn_cocycle(x: &TailPoint, y: &TailPoint, cfg: &ProductSpaceCfg) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for i in differing_checked(x, y, cfg)? {
        let e = x.get(i) as i64 - y.get(i) as i64;
        acc *= int_pow_ratio(cfg.coords[i].norm, e);
    }
    Ok(acc)
}

/// `Π μ_i(y_i)/μ_i(x_i)` straight from the mass tables.
pub fn rn_cocycle_from_measures(
    x: &TailPoint,
    y: &TailPoint,
    cfg: &ProductSpaceCfg,
) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for i in differing_checked(x, y, cfg)? {
        acc *= cfg.mass(i, y.get(i))? / cfg.mass(i, x.get(i))?;
    }
    Ok(acc)
}

/// Element of `R*₊ × Γ` with exact ratio part.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleValue {
    pub ratio: BigRational,
    pub angle: TorusPoint,
}

impl CocycleValue {
    pub fn identity(dim: usize) -> Self {
        CocycleValue {
            ratio: BigRational::one(),
            angle: TorusPoint::zero(dim),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        CocycleValue {
            ratio: &self.ratio * &other.ratio,
            angle: self.angle.add(&other.angle),
        }
    }

    pub fn inverse(&self) -> Self {
        CocycleValue {
            ratio: self.ratio.recip(),
            angle: self.angle.neg(),
        }
    }

    /// `p(x, γ) = x^{-1}`.
    pub fn project(&self) -> BigRational {
        self.ratio.recip()
    }
}

/// `(Π N^{y_i - x_i}, Σ (y_i - x_i)ρ_i)`.
pub fn product_cocycle(
    x: &TailPoint,
    y: &TailPoint,
    cfg: &ProductSpaceCfg,
    dim: usize,
) -> Result<CocycleValue> {
    let mut v = CocycleValue::identity(dim);
    for i in differing_checked(x, y, cfg)? {
        let c = &cfg.coords[i];
        let e = y.get(i) as i64 - x.get(i) as i64;
        let rho = c.rho.as_ref().ok_or_else(|| {
            Error::ParamViolation(format!("coordinate {i} ({}) has no angle", c.label))
        })?;
        v.ratio *= int_pow_ratio(c.norm, e);
        v.angle = v.angle.add(&rho.scale(e));
    }
    Ok(v)
}

/// A block `(I, K, L)` with the bijection `K[j] ↦ L[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TBlock {
    pub coords: Vec<usize>,
    pub from: Vec<Vec<u32>>,
    pub to: Vec<Vec<u32>>,
}

impl TBlock {
    fn pattern(&self, x: &TailPoint) -> Vec<u32> {
        self.coords.iter().map(|&i| x.get(i)).collect()
    }

    fn rewrite(&self, x: &TailPoint, target: &[u32]) -> TailPoint {
        let mut y = x.clone();
        for (&i, &v) in self.coords.iter().zip(target) {
            y.set(i, v);
        }
        y
    }
}

/// The partial map `T` of the first-eligible construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TMap {
    blocks: Vec<TBlock>,
    owner: BTreeMap<usize, usize>,
    /// Some block has the all-zero pattern in `K` or `L`, so blocks away
    /// from the support of a point can still be eligible.
    zero_pattern: bool,
}

impl TMap {
    pub fn build(blocks: Vec<TBlock>, cfg: &ProductSpaceCfg) -> Result<Self> {
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (n, b) in blocks.iter().enumerate() {
            for &i in &b.coords {
                cfg.coord(i)?;
                if let Some(&m) = owner.get(&i) {
                    return Err(Error::Overlap {
                        first: m,
                        second: n,
                        coord: i,
                    });
                }
                owner.insert(i, n);
            }
            if b.from.len() != b.to.len() {
                return Err(Error::ParamViolation(format!(
                    "block {n}: K and L differ in size"
                )));
            }
            let mut seen = std::collections::BTreeSet::new();
            for pat in b.from.iter().chain(&b.to) {
                if pat.len() != b.coords.len() {
                    return Err(Error::ParamViolation(format!(
                        "block {n}: pattern length differs from |I|"
                    )));
                }
                for (&i, &v) in b.coords.iter().zip(pat) {
                    let level = cfg.coords[i].level;
                    if v >= level {
                        return Err(Error::TailLevel { coord: i, level });
                    }
                }
                if !seen.insert(pat.clone()) {
                    return Err(Error::ParamViolation(format!(
                        "block {n}: K and L must be distinct disjoint patterns"
                    )));
                }
            }
        }
        let zero_pattern = blocks
            .iter()
            .any(|b| b.from.iter().chain(&b.to).any(|p| p.iter().all(|&v| v == 0)));
        Ok(TMap {
            blocks,
            owner,
            zero_pattern,
        })
    }

    /// Blocks to scan for `x`, in order.
    fn candidates(&self, x: &TailPoint) -> Vec<usize> {
        if self.zero_pattern {
            return (0..self.blocks.len()).collect();
        }
        let mut c: Vec<usize> = x.support().filter_map(|(i, _)| self.owner.get(&i).copied()).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Blocks `I = {𝔭ₙ, 𝔮ₙ}`, `K = {(1,0)}`, `L = {(0,1)}` over
    /// [`ProductSpaceCfg::from_witness`].
    pub fn from_witness(w: &PairWitness, cfg: &ProductSpaceCfg) -> Result<Self> {
        Self::pair_blocks(w.pairs.len(), cfg)
    }

    /// `npairs` blocks over coordinates laid out as `𝔭₁, 𝔮₁, 𝔭₂, 𝔮₂, …`.
    pub fn pair_blocks(npairs: usize, cfg: &ProductSpaceCfg) -> Result<Self> {
        let blocks = (0..npairs)
            .map(|n| TBlock {
                coords: vec![2 * n, 2 * n + 1],
                from: vec![vec![1, 0]],
                to: vec![vec![0, 1]],
            })
            .collect();
        Self::build(blocks, cfg)
    }

    pub fn blocks(&self) -> &[TBlock] {
        &self.blocks
    }

    /// The block that applies to `x`, if `x` is in the domain.
    pub fn block_of(&self, x: &TailPoint) -> Option<usize> {
        for n in self.candidates(x) {
            let b = &self.blocks[n];
            let pat = b.pattern(x);
            if b.from.contains(&pat) {
                return Some(n);
            }
            if b.to.contains(&pat) {
                return None;
            }
        }
        None
    }

    pub fn apply(&self, x: &TailPoint) -> Option<TailPoint> {
        let n = self.block_of(x)?;
        let b = &self.blocks[n];
        let pat = b.pattern(x);
        let j = b.from.iter().position(|p| *p == pat)?;
        Some(b.rewrite(x, &b.to[j]))
    }

    /// The block whose image contains `y`, if `y` is in the range.
    pub fn image_block_of(&self, y: &TailPoint) -> Option<usize> {
        for n in self.candidates(y) {
            let b = &self.blocks[n];
            let pat = b.pattern(y);
            if b.to.contains(&pat) {
                return Some(n);
            }
            if b.from.contains(&pat) {
                return None;
            }
        }
        None
    }

    pub fn inverse(&self, y: &TailPoint) -> Option<TailPoint> {
        let n = self.image_block_of(y)?;
        let b = &self.blocks[n];
        let pat = b.pattern(y);
        let j = b.to.iter().position(|p| *p == pat)?;
        Some(b.rewrite(y, &b.from[j]))
    }

    fn cylinder_mass(b: &TBlock, pats: &[Vec<u32>], cfg: &ProductSpaceCfg) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for pat in pats {
            let mut m = BigRational::one();
            for (&i, &v) in b.coords.iter().zip(pat) {
                m *= cfg.mass(i, v)?;
            }
            total += m;
        }
        Ok(total)
    }

    /// Exact `μ(A'_n)` and `μ(T A'_n)`, where `A'_n` is the part of `A_n`
    /// outside every earlier `A_m ∪ B_m`.
    pub fn block_measures(&self, cfg: &ProductSpaceCfg) -> Result<Vec<(BigRational, BigRational)>> {
        let mut free = BigRational::one();
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let a = Self::cylinder_mass(b, &b.from, cfg)?;
            let bm = Self::cylinder_mass(b, &b.to, cfg)?;
            out.push((&free * &a, &free * &bm));
            free *= BigRational::one() - a - bm;
        }
        Ok(out)
    }
}

/// `count` i.i.d. draws from the truncated product measure. Chunk `c` of
/// [`SAMPLE_CHUNK`] draws uses stream `c` of the seeded generator, so the
/// output does not depend on the worker count.
pub fn sample(cfg: &ProductSpaceCfg, seed: u64, count: usize) -> Vec<TailPoint> {
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let tables: Vec<Vec<f64>> = cfg
        .coords
        .iter()
        .map(|c| (0..=c.level).map(|m| (c.norm as f64).powi(-(m as i32))).collect())
        .collect();
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let tables = &tables;
            (0..len)
                .map(move |_| {
                    TailPoint::from_pairs(tables.iter().enumerate().map(|(i, t)| {
                        let u = 1.0 - rng.gen::<f64>();
                        // largest m with u ≤ N^{-m}
                        let j = t.iter().rposition(|&b| u <= b).unwrap_or(0);
                        (i, j as u32)
                    }))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Tally of `c(x, Tx)` against the window `[s, t] × U`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WindowReport {
    pub samples: usize,
    pub in_domain: usize,
    pub inside: usize,
    pub ratio_failures: usize,
    pub angle_failures: usize,
    pub identity_failures: usize,
}

impl WindowReport {
    pub fn all_inside(&self) -> bool {
        self.inside == self.in_domain && self.identity_failures == 0
    }
}

/// For each in-domain sample check `ratio ∈ [s, t]`, `angle ∈ U`, and
/// `p∘c = c_μ` on the pair `(x, Tx)`.
pub fn window_check<F>(
    tmap: &TMap,
    cfg: &ProductSpaceCfg,
    dim: usize,
    samples: &[TailPoint],
    s: &BigRational,
    t: &BigRational,
    in_u: F,
) -> Result<WindowReport>
where
    F: Fn(&TorusPoint) -> bool,
{
    let mut r = WindowReport {
        samples: samples.len(),
        ..Default::default()
    };
    for x in samples {
        let Some(tx) = tmap.apply(x) else { continue };
        r.in_domain += 1;
        let c = product_cocycle(x, &tx, cfg, dim)?;
        let ratio_ok = &c.ratio >= s && &c.ratio <= t;
        let angle_ok = in_u(&c.angle);
        if c.project() != rn_cocycle(x, &tx, cfg)? {
            r.identity_failures += 1;
        }
        r.ratio_failures += usize::from(!ratio_ok);
        r.angle_failures += usize::from(!angle_ok);
        r.inside += usize::from(ratio_ok && angle_ok);
    }
    Ok(r)
}

/// Per block: samples whose preimage under `T` exists through that block,
/// against `N·μ(T A'_n)` and its binomial standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportRow {
    pub block: usize,
    pub observed: u64,
    pub expected: f64,
    pub std_err: f64,
}

impl TransportRow {
    pub fn z_score(&self) -> f64 {
        if self.std_err == 0.0 {
            if self.observed as f64 == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.observed as f64 - self.expected) / self.std_err
        }
    }
}

/// `μ(T A'_n)` predicted as `μ(A'_n)·c_μ` on the block, which must agree
/// with the direct cylinder mass; compared with sampled frequencies.
pub fn measure_transport(
    tmap: &TMap,
    cfg: &ProductSpaceCfg,
    samples: &[TailPoint],
) -> Result<Vec<TransportRow>> {
    let measures = tmap.block_measures(cfg)?;
    let mut observed = vec![0u64; measures.len()];
    for y in samples {
        if let Some(n) = tmap.image_block_of(y) {
            observed[n] += 1;
        }
    }
    let total = samples.len() as f64;
    let mut rows = Vec::with_capacity(measures.len());
    for (n, (a, b)) in measures.iter().enumerate() {
        let blk = &tmap.blocks[n];
        let weighted = if blk.from.len() == 1 {
            let x = blk.rewrite(&TailPoint::new(), &blk.from[0]);
            let y = blk.rewrite(&TailPoint::new(), &blk.to[0]);
            a * rn_cocycle(&x, &y, cfg)?
        } else {
            b.clone()
        };
        if &weighted != b {
            return Err(Error::ParamViolation(format!(
                "block {n}: transported mass disagrees with cylinder mass"
            )));
        }
        let p = num_traits::ToPrimitive::to_f64(b).unwrap_or(0.0);
        rows.push(TransportRow {
            block: n,
            observed: observed[n],
            expected: total * p,
            std_err: (total * p * (1.0 - p)).sqrt(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(norms: &[u64]) -> ProductSpaceCfg {
        ProductSpaceCfg::new(
            norms
                .iter()
                .enumerate()
                .map(|(i, &n)| Coord {
                    label: format!("c{i}"),
                    norm: n,
                    level: DEFAULT_LEVEL,
                    rho: Some(TorusPoint::new(vec![0.1 * i as f64 + 0.05, 0.37])),
                })
                .collect(),
        )
        .unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn masses_sum_to_one() {
        let c = cfg(&[2, 5, 23, 125]);
        for i in 0..c.len() {
            let total: BigRational = c.masses(i).unwrap().into_iter().sum();
            assert_eq!(total, BigRational::one());
        }
        assert_eq!(c.mass(0, 0).unwrap(), q(1, 2));
        assert_eq!(c.mass(0, 1).unwrap(), q(1, 4));
        assert_eq!(c.mass(0, 8).unwrap(), q(1, 256));
    }

    #[test]
    fn single_step_values() {
        let c = cfg(&[5]);
        let x = TailPoint::new();
        let y = TailPoint::from_pairs([(0, 1)]);
        assert_eq!(rn_cocycle(&x, &y, &c).unwrap(), q(1, 5));
        assert_eq!(rn_cocycle(&x, &x, &c).unwrap(), BigRational::one());
        let v = product_cocycle(&x, &y, &c, 2).unwrap();
        assert_eq!(v.ratio, q(5, 1));
        assert!(v.angle.distance(&TorusPoint::new(vec![0.05, 0.37])) < 1e-15);
        let id = product_cocycle(&x, &x, &c, 2).unwrap();
        assert_eq!(id, CocycleValue::identity(2));
    }

    #[test]
    fn tail_level_refused() {
        let c = cfg(&[3]);
        let x = TailPoint::new();
        let y = TailPoint::from_pairs([(0, DEFAULT_LEVEL)]);
        assert!(matches!(rn_cocycle(&x, &y, &c), Err(Error::TailLevel { .. })));
        let far = TailPoint::from_pairs([(4, 1)]);
        assert!(matches!(rn_cocycle(&x, &far, &c), Err(Error::NotEquivalent(_))));
    }

    fn point_strategy(dim: usize) -> impl Strategy<Value = TailPoint> {
        proptest::collection::vec(0u32..DEFAULT_LEVEL, dim)
            .prop_map(|v| TailPoint::from_pairs(v.into_iter().enumerate()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn cocycle_identity(x in point_strategy(6), y in point_strategy(6), z in point_strategy(6)) {
            let c = cfg(&[2, 3, 5, 7, 11, 13]);
            let xy = rn_cocycle(&x, &y, &c).unwrap();
            let yz = rn_cocycle(&y, &z, &c).unwrap();
            prop_assert_eq!(&xy * &yz, rn_cocycle(&x, &z, &c).unwrap());
            prop_assert_eq!(rn_cocycle_from_measures(&x, &y, &c).unwrap(), xy.clone());
            let pc = product_cocycle(&x, &y, &c, 2).unwrap();
            prop_assert_eq!(pc.project(), xy);
            let composed = pc.compose(&product_cocycle(&y, &z, &c, 2).unwrap());
            let direct = product_cocycle(&x, &z, &c, 2).unwrap();
            prop_assert_eq!(&composed.ratio, &direct.ratio);
            prop_assert!(composed.angle.distance(&direct.angle) < 1e-9);
            prop_assert_eq!(pc.compose(&pc.inverse()).ratio, BigRational::one());
        }
    }

    #[test]
    fn tmap_rules() {
        let c = cfg(&[2, 3, 5, 7]);
        let blocks = vec![
            TBlock {
                coords: vec![0, 1],
                from: vec![vec![1, 0]],
                to: vec![vec![0, 1]],
            },
            TBlock {
                coords: vec![2, 3],
                from: vec![vec![1, 0]],
                to: vec![vec![0, 1]],
            },
        ];
        let t = TMap::build(blocks.clone(), &c).unwrap();
        let x = TailPoint::from_pairs([(0, 1), (2, 1)]);
        let tx = t.apply(&x).unwrap();
        assert_eq!(tx, TailPoint::from_pairs([(1, 1), (2, 1)]));
        assert_eq!(t.inverse(&tx).unwrap(), x);
        // in B_0 first, so block 1 is not eligible
        assert_eq!(t.apply(&TailPoint::from_pairs([(1, 1), (2, 1)])), None);
        assert_eq!(t.block_of(&TailPoint::from_pairs([(2, 1)])), Some(1));
        assert_eq!(t.apply(&TailPoint::new()), None);

        let empty = TMap::build(vec![], &c).unwrap();
        assert_eq!(empty.apply(&x), None);

        let mut overlapping = blocks;
        overlapping[1].coords = vec![1, 2];
        assert!(matches!(
            TMap::build(overlapping, &c),
            Err(Error::Overlap { first: 0, second: 1, coord: 1 })
        ));
    }

    #[test]
    fn sampling_law_and_determinism() {
        let c = cfg(&[2, 7]);
        let a = sample(&c, 42, 10_000);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample(&c, 42, 10_000));
        assert_eq!(a, b);
        assert_ne!(a, sample(&c, 43, 10_000));

        let n = 1_000_000;
        let draws = sample(&cfg(&[2]), 7, n);
        let zeros = draws.iter().filter(|x| x.get(0) == 0).count() as f64;
        let ones = draws.iter().filter(|x| x.get(0) == 1).count() as f64;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((zeros - 0.5 * n as f64).abs() < 3.0 * sd);
        let sd1 = (n as f64 * 0.25 * 0.75).sqrt();
        assert!((ones - 0.25 * n as f64).abs() < 3.0 * sd1);
    }

    #[test]
    fn transport_matches_weights() {
        let c = cfg(&[2, 3, 3, 5, 5, 7]);
        let blocks = (0..3)
            .map(|n| TBlock {
                coords: vec![2 * n, 2 * n + 1],
                from: vec![vec![1, 0]],
                to: vec![vec![0, 1]],
            })
            .collect();
        let t = TMap::build(blocks, &c).unwrap();
        let m = t.block_measures(&c).unwrap();
        // μ(A_0) = 1/4 · 2/3, μ(B_0) = 1/2 · 2/9
        assert_eq!(m[0], (q(1, 6), q(1, 9)));
        let xs = sample(&c, 11, 100_000);
        for row in measure_transport(&t, &c, &xs).unwrap() {
            assert!(row.z_score().abs() < 3.0, "{row:?}");
        }
    }
}
