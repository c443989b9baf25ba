//! Finite witnesses for membership of `(x₀, y₀)` in the asymptotic ratio
//! set: blocks of primes in short multiplicative windows with angles in a
//! box, and the rank pairing between consecutive blocks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::equidist::BoxSpec;
use crate::error::{Error, Result};
use crate::primes::PrimeIdealRec;
use crate::torus::{circle_diff, TorusPoint};

/// The exact rational with the shortest decimal expansion that rounds to
/// `x`, so that `0.2` means `1/5`.
pub fn decimal_rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::ParamViolation(format!("{x} is not finite")));
    }
    let s = format!("{x}");
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}")
        .parse()
        .map_err(|e| Error::Parse(format!("{x}: {e}")))?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Ok(if neg { -r } else { r })
}

#[derive(Clone, Debug)]
pub struct RatioParams {
    pub x0: f64,
    pub y0: TorusPoint,
    pub eps: f64,
    pub delta: f64,
    pub v: BoxSpec,
    pub max_norm: u64,
}

impl RatioParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ParamViolation(m.to_string()));
        if !(self.x0 > 1.0) {
            return bad("x0 must exceed 1");
        }
        if !(self.delta > 0.0) || !(self.eps > 0.0) {
            return bad("delta and eps must be positive");
        }
        let x0 = decimal_rational(self.x0)?;
        let delta = decimal_rational(self.delta)?;
        let eps = decimal_rational(self.eps)?;
        if BigRational::one() + &delta >= x0 {
            return bad("need 1 + delta < x0");
        }
        if &delta * &x0 >= eps {
            return bad("need delta * x0 < eps");
        }
        if self.v.dim() != self.y0.dim() {
            return bad("y0 and V differ in dimension");
        }
        if !(self.v.measure() > 0.0) {
            return bad("V must have positive measure");
        }
        Ok(())
    }
}

/// One index `n` of the block sequence: primes with
/// `x₀ⁿ < N(𝔭) ≤ (1+δ)x₀ⁿ` and angle in `V` (even `n`) or `y₀ + V` (odd `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub n: u32,
    pub lower: BigRational,
    pub upper: BigRational,
    pub members: Vec<(PrimeIdealRec, TorusPoint)>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_norm(&self, norm: u64) -> bool {
        let n = BigRational::from_integer(BigInt::from(norm));
        n > self.lower && n <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSizes {
    pub k: u32,
    pub b_even: usize,
    pub b_odd: usize,
    /// `|C₂ₖ₊₁|`, zero for `k < k₀`.
    pub c_odd: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub k: u32,
    pub p: PrimeIdealRec,
    pub rho_p: TorusPoint,
    pub q: PrimeIdealRec,
    pub rho_q: TorusPoint,
}

impl Pair {
    pub fn ratio(&self) -> f64 {
        self.q.norm as f64 / self.p.norm as f64
    }

    pub fn angle_increment(&self) -> TorusPoint {
        self.rho_q.sub(&self.rho_p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairWitness {
    pub params: RatioParams,
    pub blocks: Vec<Block>,
    pub sizes: Vec<BlockSizes>,
    /// `None` when no `k` satisfies the size condition below `X_max`.
    pub k0: Option<u32>,
    pub pairs: Vec<Pair>,
    /// `Σ_{i ≤ n} 1/N(𝔭ᵢ)` in floating point, one per pair.
    pub harmonic_partial: Vec<f64>,
    pub harmonic: HarmonicCheck,
}

impl PartialEq for RatioParams {
    fn eq(&self, o: &Self) -> bool {
        self.x0 == o.x0
            && self.y0 == o.y0
            && self.eps == o.eps
            && self.delta == o.delta
            && self.v == o.v
            && self.max_norm == o.max_norm
    }
}

/// Exact comparison of the harmonic sum over the `𝔭ₙ` with
/// `Σ_{k ≥ k₀} |B₂ₖ| / ((1+δ)x₀^{2k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCheck {
    pub sum: BigRational,
    pub lower_bound: BigRational,
    /// Per included `k`: cumulative sum is at least the cumulative bound.
    pub cumulative_ok: Vec<bool>,
}

impl HarmonicCheck {
    pub fn holds(&self) -> bool {
        self.sum >= self.lower_bound && self.cumulative_ok.iter().all(|b| *b)
    }

    pub fn sum_f64(&self) -> f64 {
        self.sum.to_f64().unwrap_or(f64::NAN)
    }

    pub fn lower_bound_f64(&self) -> f64 {
        self.lower_bound.to_f64().unwrap_or(f64::NAN)
    }
}

impl PairWitness {
    pub fn is_empty_witness(&self) -> bool {
        self.k0.is_none() || self.pairs.is_empty()
    }
}

/// `Σ 1/nᵢ` as an unreduced fraction, by pairwise merging.
fn reciprocal_sum(norms: &[u64]) -> (BigInt, BigInt) {
    match norms.len() {
        0 => (BigInt::zero(), BigInt::one()),
        1 => (BigInt::one(), BigInt::from(norms[0])),
        n => {
            let (a, b) = reciprocal_sum(&norms[..n / 2]);
            let (c, d) = reciprocal_sum(&norms[n / 2..]);
            (&a * &d + &c * &b, b * d)
        }
    }
}

fn in_box_shifted(v: &BoxSpec, y0: &TorusPoint, t: &TorusPoint) -> bool {
    v.contains(&t.sub(y0))
}

/// Build the blocks, `k₀`, the rank pairing and the harmonic check from an
/// ascending-norm stream of `(prime, angle)`.
pub fn build_pairs<'a, I>(params: &RatioParams, angles: I) -> Result<PairWitness>
where
    I: IntoIterator<Item = (&'a PrimeIdealRec, &'a TorusPoint)>,
{
    params.validate()?;
    let x0 = decimal_rational(params.x0)?;
    let one_delta = BigRational::one() + decimal_rational(params.delta)?;
    let x_max = BigRational::from_integer(BigInt::from(params.max_norm));

    let mut blocks: Vec<Block> = Vec::new();
    let mut power = BigRational::one();
    let mut n = 0u32;
    loop {
        let upper = &power * &one_delta;
        // an even block is kept only if its odd partner fits below X_max
        if n % 2 == 0 && &upper * &x0 > x_max {
            break;
        }
        blocks.push(Block {
            n,
            lower: power.clone(),
            upper,
            members: Vec::new(),
        });
        power = &power * &x0;
        n += 1;
    }
    let bounds: Vec<(f64, f64)> = blocks
        .iter()
        .map(|b| {
            (
                b.lower.to_f64().unwrap_or(f64::INFINITY),
                b.upper.to_f64().unwrap_or(f64::INFINITY),
            )
        })
        .collect();

    let mut idx = 0;
    for (ideal, point) in angles {
        let nf = ideal.norm as f64;
        while idx < blocks.len() && nf > bounds[idx].1 * (1.0 + 1e-12) {
            idx += 1;
        }
        if idx == blocks.len() {
            break;
        }
        let b = &mut blocks[idx];
        if !b.contains_norm(ideal.norm) {
            continue;
        }
        let in_v = if b.n % 2 == 0 {
            params.v.contains(point)
        } else {
            in_box_shifted(&params.v, &params.y0, point)
        };
        if in_v {
            b.members.push((ideal.clone(), point.clone()));
        }
    }

    let kmax = blocks.len() / 2;
    let sizes_raw: Vec<(usize, usize)> = (0..kmax)
        .map(|k| (blocks[2 * k].len(), blocks[2 * k + 1].len()))
        .collect();
    let mut k0 = None;
    for k in (0..kmax).rev() {
        if sizes_raw[k].1 >= sizes_raw[k].0 {
            k0 = Some(k as u32);
        } else {
            break;
        }
    }

    let mut sizes = Vec::with_capacity(kmax);
    let mut pairs = Vec::new();
    for (k, &(be, bo)) in sizes_raw.iter().enumerate() {
        let included = k0.is_some_and(|k0| k as u32 >= k0);
        sizes.push(BlockSizes {
            k: k as u32,
            b_even: be,
            b_odd: bo,
            c_odd: if included { be } else { 0 },
        });
        if included {
            let even = &blocks[2 * k].members;
            let odd = &blocks[2 * k + 1].members[..be];
            for ((p, rp), (q, rq)) in even.iter().zip(odd) {
                pairs.push(Pair {
                    k: k as u32,
                    p: p.clone(),
                    rho_p: rp.clone(),
                    q: q.clone(),
                    rho_q: rq.clone(),
                });
            }
        }
    }

    let mut harmonic_partial = Vec::with_capacity(pairs.len());
    let mut acc = 0.0;
    for pr in &pairs {
        acc += 1.0 / pr.p.norm as f64;
        harmonic_partial.push(acc);
    }
    let harmonic = harmonic_check(&blocks, &sizes, &pairs, k0);

    Ok(PairWitness {
        params: params.clone(),
        blocks,
        sizes,
        k0,
        pairs,
        harmonic_partial,
        harmonic,
    })
}

fn harmonic_check(
    blocks: &[Block],
    sizes: &[BlockSizes],
    pairs: &[Pair],
    k0: Option<u32>,
) -> HarmonicCheck {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut bound = BigRational::zero();
    let mut cumulative_ok = Vec::new();
    if let Some(k0) = k0 {
        for s in sizes.iter().filter(|s| s.k >= k0) {
            let norms: Vec<u64> = pairs
                .iter()
                .filter(|p| p.k == s.k)
                .map(|p| p.p.norm)
                .collect();
            let (a, b) = reciprocal_sum(&norms);
            num = &num * &b + &a * &den;
            den *= b;
            bound += BigRational::from_integer(BigInt::from(s.b_even))
                / &blocks[2 * s.k as usize].upper;
            // num/den >= bound  ⇔  num·bound.den >= bound.num·den
            let lhs = &num * bound.denom();
            let rhs = bound.numer() * &den;
            cumulative_ok.push(lhs >= rhs);
        }
    }
    HarmonicCheck {
        sum: BigRational::new(num, den),
        lower_bound: bound,
        cumulative_ok,
    }
}

/// `d ∈ y₀ + V − V`: each coordinate within the open box width of `y₀`.
pub fn in_difference_window(v: &BoxSpec, y0: &TorusPoint, d: &TorusPoint) -> bool {
    v.widths()
        .iter()
        .zip(d.coords())
        .zip(y0.coords())
        .all(|((w, t), y)| *w >= 1.0 || circle_diff(*t, *y).abs() < *w)
}

/// Outcome of the independent witness check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WitnessVerdict {
    pub pairs_checked: usize,
    pub ratio_failures: Vec<usize>,
    pub angle_failures: Vec<usize>,
    pub alignment_failures: Vec<usize>,
    pub blocks_disjoint: bool,
    pub pairing_monotone: bool,
}

impl WitnessVerdict {
    pub fn all_pass(&self) -> bool {
        self.ratio_failures.is_empty()
            && self.angle_failures.is_empty()
            && self.alignment_failures.is_empty()
            && self.blocks_disjoint
            && self.pairing_monotone
    }
}

/// Re-check a witness from its parameters alone: ratios, angle increments
/// in `y₀ + V − V`, block alignment and disjointness.
pub fn verify_witness(w: &PairWitness) -> Result<WitnessVerdict> {
    let prm = &w.params;
    let x0 = decimal_rational(prm.x0)?;
    let eps = decimal_rational(prm.eps)?;
    let one_delta = BigRational::one() + decimal_rational(prm.delta)?;
    let lo = &x0 - &eps;
    let hi = &x0 + &eps;
    let mut v = WitnessVerdict {
        pairs_checked: w.pairs.len(),
        blocks_disjoint: true,
        pairing_monotone: true,
        ..Default::default()
    };
    for (i, pr) in w.pairs.iter().enumerate() {
        let r = BigRational::new(BigInt::from(pr.q.norm), BigInt::from(pr.p.norm));
        if !(r > lo && r < hi) {
            v.ratio_failures.push(i);
        }
        if !in_difference_window(&prm.v, &prm.y0, &pr.angle_increment()) {
            v.angle_failures.push(i);
        }
        let pow_even = num_traits::pow(x0.clone(), 2 * pr.k as usize);
        let pow_odd = &pow_even * &x0;
        let pn = BigRational::from_integer(BigInt::from(pr.p.norm));
        let qn = BigRational::from_integer(BigInt::from(pr.q.norm));
        let p_in = pn > pow_even && pn <= &pow_even * &one_delta;
        let q_in = qn > pow_odd && qn <= &pow_odd * &one_delta;
        if !(p_in && q_in) {
            v.alignment_failures.push(i);
        }
    }
    for pair in w.pairs.windows(2) {
        if pair[1].p < pair[0].p || pair[1].q < pair[0].q {
            v.pairing_monotone = false;
        }
    }
    for pair in w.blocks.windows(2) {
        if pair[0].upper >= pair[1].lower {
            v.blocks_disjoint = false;
        }
    }
    Ok(v)
}

/// `λ(V)·δ·x₀ⁿ / (n log x₀)`.
pub fn expected_block_size(params: &RatioParams, n: u32) -> f64 {
    params.v.measure() * params.delta * params.x0.powi(n as i32)
        / (n as f64 * params.x0.ln())
}

/// Measured bounds `[s, t]` of `N(𝔮ₙ)/N(𝔭ₙ)` over the witness.
pub fn ratio_bounds(w: &PairWitness) -> Option<(BigRational, BigRational)> {
    norm_ratio_bounds(w.pairs.iter().map(|p| (p.p.norm, p.q.norm)))
}

/// Exact min and max of `q/p` over `(p, q)` norm pairs.
pub fn norm_ratio_bounds<I>(norms: I) -> Option<(BigRational, BigRational)>
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let mut it = norms
        .into_iter()
        .map(|(p, q)| BigRational::new(BigInt::from(q), BigInt::from(p)));
    let first = it.next()?;
    Some(it.fold((first.clone(), first), |(s, t), r| {
        (
            if r < s { r.clone() } else { s },
            if r > t { r } else { t },
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::compute_angles;
    use crate::field::bundled;
    use crate::torus::AngleTorus;

    fn params(v: BoxSpec, y0: Vec<f64>, max_norm: u64) -> RatioParams {
        RatioParams {
            x0: 2.0,
            y0: TorusPoint::new(y0),
            eps: 0.5,
            delta: 0.2,
            v,
            max_norm,
        }
    }

    #[test]
    fn decimal_rationals() {
        assert_eq!(
            decimal_rational(0.2).unwrap(),
            BigRational::new(1.into(), 5.into())
        );
        assert_eq!(
            decimal_rational(-2.5).unwrap(),
            BigRational::new((-5).into(), 2.into())
        );
        assert_eq!(decimal_rational(3.0).unwrap(), BigRational::from_integer(3.into()));
    }

    #[test]
    fn constraint_violations() {
        let full = BoxSpec::full(2);
        let mut p = params(full.clone(), vec![0.0, 0.0], 1000);
        p.delta = 1.0;
        assert!(matches!(p.validate(), Err(Error::ParamViolation(_))));
        let mut p = params(full.clone(), vec![0.0, 0.0], 1000);
        p.eps = 0.4;
        assert!(p.validate().is_err());
        let mut p = params(full, vec![0.0, 0.0], 1000);
        p.x0 = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn reciprocal_sum_exact() {
        let (a, b) = reciprocal_sum(&[2, 3, 7]);
        assert_eq!(BigRational::new(a, b), BigRational::new(41.into(), 42.into()));
    }

    #[test]
    fn full_torus_witness_on_cubic() {
        let k = bundled::cubic23();
        let t = AngleTorus::build(&k).unwrap();
        let recs = compute_angles(&t, 100_000).unwrap();
        let p = params(BoxSpec::full(2), vec![0.0, 0.0], 100_000);
        let w = build_pairs(&p, recs.iter().map(|r| (&r.ideal, &r.point))).unwrap();
        assert!(w.k0.is_some());
        assert!(!w.pairs.is_empty());
        let verdict = verify_witness(&w).unwrap();
        assert!(verdict.all_pass(), "{verdict:?}");
        assert!(w.harmonic.holds());
        // 2^{2k+1}·1.2 ≤ 10^5 up to k = 7
        assert_eq!(w.sizes.len(), 8);
        for s in &w.sizes {
            assert_eq!(s.b_even, w.blocks[2 * s.k as usize].len());
        }
        let (s, t) = ratio_bounds(&w).unwrap();
        assert!(s > decimal_rational(1.5).unwrap() && t < decimal_rational(2.5).unwrap());
    }

    #[test]
    fn box_witness_and_independent_rejection() {
        let k = bundled::cubic23();
        let t = AngleTorus::build(&k).unwrap();
        let recs = compute_angles(&t, 60_000).unwrap();
        let v = BoxSpec::parse("0,0:0.5,0.5").unwrap();
        let p = params(v, vec![0.3, 0.7], 60_000);
        let mut w = build_pairs(&p, recs.iter().map(|r| (&r.ideal, &r.point))).unwrap();
        assert!(verify_witness(&w).unwrap().all_pass());
        for pr in &w.pairs {
            assert!(p.v.contains(&pr.rho_p));
        }
        // a tampered pair is caught by the checker
        let last = w.pairs.len() - 1;
        w.pairs[last].rho_q = w.pairs[last].rho_p.add(&TorusPoint::new(vec![0.8, 0.2]));
        let verdict = verify_witness(&w).unwrap();
        assert_eq!(verdict.angle_failures, vec![last]);
    }

    #[test]
    fn empty_stream_gives_empty_witness() {
        let p = params(BoxSpec::full(2), vec![0.0, 0.0], 10_000);
        let w = build_pairs(&p, std::iter::empty()).unwrap();
        assert!(w.is_empty_witness());
        assert!(w.pairs.is_empty());
        assert!(w.harmonic.holds());
    }
}
