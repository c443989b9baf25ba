//! Empirical equidistribution of prime angles: Weyl sums of characters,
//! box counts against Haar measure, and short-window counts.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primes::offset_li;
use crate::torus::{character_value, frac, TorusPoint};

/// Decade checkpoints used when none are given.
pub const DEFAULT_CHECKPOINTS: [u64; 3] = [10_000, 100_000, 1_000_000];

/// Axis-aligned box on the torus, half-open per coordinate, wrapping
/// around 1. Equal endpoints denote the full circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::ParamViolation("box corners differ in dimension".into()));
        }
        if lo.iter().chain(&hi).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::ParamViolation("box corners must lie in [0, 1]".into()));
        }
        Ok(BoxSpec { lo, hi })
    }

    pub fn full(dim: usize) -> Self {
        BoxSpec {
            lo: vec![0.0; dim],
            hi: vec![0.0; dim],
        }
    }

    /// Parse `lo1,lo2:hi1,hi2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("box {s:?} lacks ':'")))?;
        Self::new(parse_vec(a)?, parse_vec(b)?)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let w = (h - l).rem_euclid(1.0);
                if w == 0.0 {
                    1.0
                } else {
                    w
                }
            })
            .collect()
    }

    /// Normalized Haar measure.
    pub fn measure(&self) -> f64 {
        self.widths().iter().product()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.lo
            .iter()
            .zip(self.widths())
            .zip(p.coords())
            .all(|((l, w), t)| w >= 1.0 || (t - l).rem_euclid(1.0) < w)
    }

    /// The box translated by `y`.
    pub fn shifted(&self, y: &TorusPoint) -> Self {
        let widths = self.widths();
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(y.coords())
            .map(|(l, t)| frac(l + t))
            .collect();
        let hi = lo
            .iter()
            .zip(&widths)
            .map(|(l, w)| if *w >= 1.0 { *l } else { frac(l + w) })
            .collect();
        BoxSpec { lo, hi }
    }

    /// `{a - b : a, b ∈ self}` contains `d` (open box of half-width = width).
    pub fn difference_contains(&self, d: &TorusPoint) -> bool {
        self.widths()
            .iter()
            .zip(d.coords())
            .all(|(w, t)| *w >= 0.5 || crate::torus::circle_diff(*t, 0.0).abs() < *w)
    }

    /// The `g^dim` boxes of a uniform grid, row-major.
    pub fn grid(dim: usize, g: usize) -> Vec<Self> {
        let cells = g.pow(dim as u32);
        (0..cells)
            .map(|mut idx| {
                let mut lo = vec![0.0; dim];
                let mut hi = vec![0.0; dim];
                for d in (0..dim).rev() {
                    let i = idx % g;
                    idx /= g;
                    lo[d] = i as f64 / g as f64;
                    hi[d] = if i + 1 == g { 0.0 } else { (i + 1) as f64 / g as f64 };
                }
                if g == 1 {
                    return BoxSpec::full(dim);
                }
                BoxSpec { lo, hi }
            })
            .collect()
    }
}

pub fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("number {t:?}: {e}")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylCheckpoint {
    pub x: u64,
    pub count: u64,
    pub sum: Complex64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylReport {
    pub k: Vec<i64>,
    pub checkpoints: Vec<WeylCheckpoint>,
}

impl WeylReport {
    /// Normalized magnitudes strictly decrease across checkpoints.
    pub fn strictly_decreasing(&self) -> bool {
        self.checkpoints
            .windows(2)
            .all(|w| w[1].normalized < w[0].normalized)
    }
}

/// Accumulate `Σ χ_k(ρ(𝔭))` over an ascending-norm stream, recording the
/// running count and sum at each checkpoint `X` (primes with norm `≤ X`).
pub fn weyl_sum<'a, I>(k: &[i64], angles: I, checkpoints: &[u64]) -> WeylReport
where
    I: IntoIterator<Item = (u64, &'a TorusPoint)>,
{
    let mut cps: Vec<u64> = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let mut out = Vec::with_capacity(cps.len());
    let mut next = 0;
    let mut count = 0u64;
    let mut sum = Complex64::new(0.0, 0.0);
    let record = |x: u64, count: u64, sum: Complex64, out: &mut Vec<WeylCheckpoint>| {
        let normalized = if count == 0 { 0.0 } else { sum.norm() / count as f64 };
        out.push(WeylCheckpoint {
            x,
            count,
            sum,
            normalized,
        });
    };
    for (norm, point) in angles {
        while next < cps.len() && norm > cps[next] {
            record(cps[next], count, sum, &mut out);
            next += 1;
        }
        if next == cps.len() {
            break;
        }
        count += 1;
        sum += character_value(k, point);
    }
    while next < cps.len() {
        record(cps[next], count, sum, &mut out);
        next += 1;
    }
    WeylReport {
        k: k.to_vec(),
        checkpoints: out,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxCount {
    pub x: u64,
    pub count: u64,
    /// `π_K(X)`.
    pub total: u64,
    pub measure: f64,
    /// `λ(box)·π_K(X)`.
    pub expected: f64,
    /// `λ(box)·Li(X)`.
    pub expected_li: f64,
    /// `λ(box)·X/log X`.
    pub expected_x_log: f64,
    /// `count - expected`.
    pub deviation: f64,
}

impl BoxCount {
    pub fn frequency(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64
        }
    }
}

pub fn box_count<'a, I>(bx: &BoxSpec, angles: I, x: u64) -> BoxCount
where
    I: IntoIterator<Item = (u64, &'a TorusPoint)>,
{
    let mut count = 0;
    let mut total = 0;
    for (norm, p) in angles {
        if norm > x {
            break;
        }
        total += 1;
        if bx.contains(p) {
            count += 1;
        }
    }
    let measure = bx.measure();
    let xf = x as f64;
    let expected = measure * total as f64;
    BoxCount {
        x,
        count,
        total,
        measure,
        expected,
        expected_li: if x >= 3 { measure * offset_li(xf) } else { 0.0 },
        expected_x_log: if x >= 2 { measure * xf / xf.ln() } else { 0.0 },
        deviation: count as f64 - expected,
    }
}

/// Counts for every cell of a `g^dim` grid in a single pass.
pub fn grid_counts<'a, I>(dim: usize, g: usize, angles: I, x: u64) -> Vec<BoxCount>
where
    I: IntoIterator<Item = (u64, &'a TorusPoint)> + Clone,
{
    BoxSpec::grid(dim, g)
        .iter()
        .map(|b| box_count(b, angles.clone(), x))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowCount {
    pub x: f64,
    pub delta: f64,
    pub count: u64,
    /// `λ(box)·δ·x/log x`.
    pub predicted: f64,
    /// `λ(box)·(Li((1+δ)x) - Li(x))`.
    pub predicted_li: f64,
}

/// Primes with `x < N(𝔭) ≤ (1+δ)x` and angle in the box.
pub fn window_count<'a, I>(bx: &BoxSpec, delta: f64, x: f64, angles: I) -> Result<WindowCount>
where
    I: IntoIterator<Item = (u64, &'a TorusPoint)>,
{
    if !(delta > 0.0) || !(x > 1.0) {
        return Err(Error::ParamViolation("window needs δ > 0 and x > 1".into()));
    }
    let upper = (1.0 + delta) * x;
    let count = angles
        .into_iter()
        .take_while(|(n, _)| (*n as f64) <= upper)
        .filter(|(n, p)| (*n as f64) > x && bx.contains(p))
        .count() as u64;
    let lambda = bx.measure();
    let predicted_li = if x >= 2.0 {
        lambda * (offset_li(upper) - offset_li(x))
    } else {
        f64::NAN
    };
    Ok(WindowCount {
        x,
        delta,
        count,
        predicted: lambda * delta * x / x.ln(),
        predicted_li,
    })
}

/// Per-ray-class counts. For modulus `(1)` and class number one the ray
/// class group is trivial, so every prime lands in class 0.
pub fn ray_class_counts<'a, I>(angles: I, x: u64) -> Vec<u64>
where
    I: IntoIterator<Item = (u64, &'a TorusPoint)>,
{
    let class_of = |_p: &TorusPoint| 0usize;
    let mut counts = vec![0u64; 1];
    for (norm, p) in angles {
        if norm > x {
            break;
        }
        counts[class_of(p)] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream() -> Vec<(u64, TorusPoint)> {
        (0..500u64)
            .map(|i| {
                let t = frac(i as f64 * 0.618_033_988_749_894_8);
                let s = frac(i as f64 * 0.414_213_562_373_095);
                (10 + i * 3, TorusPoint::new(vec![t, s]))
            })
            .collect()
    }

    fn refs(v: &[(u64, TorusPoint)]) -> impl Iterator<Item = (u64, &TorusPoint)> + Clone {
        v.iter().map(|(n, p)| (*n, p))
    }

    #[test]
    fn trivial_character_is_one() {
        let s = stream();
        let r = weyl_sum(&[0, 0], refs(&s), &[100, 1000, 2000]);
        for cp in &r.checkpoints {
            assert!((cp.normalized - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.checkpoints[0].count, 31);
        assert_eq!(r.checkpoints[2].count, 500);
    }

    #[test]
    fn full_box_and_complement() {
        let s = stream();
        let full = box_count(&BoxSpec::full(2), refs(&s), 1000);
        assert_eq!(full.count, full.total);
        assert_eq!(full.deviation, 0.0);
        let a = BoxSpec::new(vec![0.2, 0.0], vec![0.7, 0.0]).unwrap();
        let ac = BoxSpec::new(vec![0.7, 0.0], vec![0.2, 0.0]).unwrap();
        assert!((a.measure() + ac.measure() - 1.0).abs() < 1e-12);
        let ca = box_count(&a, refs(&s), 1000).count;
        let cc = box_count(&ac, refs(&s), 1000).count;
        assert_eq!(ca + cc, full.total);
    }

    #[test]
    fn grid_partitions_the_torus() {
        let s = stream();
        let cells = grid_counts(2, 4, refs(&s), 1200);
        assert_eq!(cells.len(), 16);
        let total: u64 = cells.iter().map(|c| c.count).sum();
        assert_eq!(total, cells[0].total);
        for c in &cells {
            assert!((c.measure - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn windows() {
        let s = stream();
        let full = BoxSpec::full(2);
        // norms are 10, 13, 16, ...: (100, 101] holds none
        assert_eq!(window_count(&full, 0.01, 100.0, refs(&s)).unwrap().count, 0);
        let (d1, d2) = (0.3, 0.45);
        let x = 200.0;
        let whole = window_count(&full, d1 + d2 + d1 * d2, x, refs(&s)).unwrap().count;
        let a = window_count(&full, d1, x, refs(&s)).unwrap().count;
        let b = window_count(&full, d2, x * (1.0 + d1), refs(&s)).unwrap().count;
        assert_eq!(whole, a + b);
        assert!(window_count(&full, 0.0, x, refs(&s)).is_err());
    }

    #[test]
    fn shifted_and_difference_boxes() {
        let v = BoxSpec::parse("0,0:0.25,0.25").unwrap();
        assert!((v.measure() - 0.0625).abs() < 1e-15);
        let y = TorusPoint::new(vec![0.9, 0.3]);
        let sv = v.shifted(&y);
        assert!(sv.contains(&TorusPoint::new(vec![0.95, 0.4])));
        assert!(sv.contains(&TorusPoint::new(vec![0.1, 0.54])));
        assert!(!sv.contains(&TorusPoint::new(vec![0.16, 0.4])));
        assert!(v.difference_contains(&TorusPoint::new(vec![0.8, 0.2])));
        assert!(!v.difference_contains(&TorusPoint::new(vec![0.7, 0.2])));
    }

    #[test]
    fn gaussian_hecke_character_brute_force() {
        use crate::angles::compute_angles;
        use crate::field::bundled;
        use crate::torus::AngleTorus;
        let t = AngleTorus::build(&bundled::gaussian()).unwrap();
        let recs = compute_angles(&t, 100_000).unwrap();
        let r = weyl_sum(&[1], recs.iter().map(|a| (a.norm(), &a.point)), &[10_000, 100_000]);
        // Σ e^{-4i arg α} over Gaussian prime ideals, listed by brute force
        let want = [(1232, -2.627_450_017_549_32), (9601, 2.663_693_989_069_93)];
        for (cp, (count, re)) in r.checkpoints.iter().zip(want) {
            assert_eq!(cp.count, count);
            assert!((cp.sum.re - re).abs() < 1e-9, "{cp:?}");
            assert!(cp.sum.im.abs() < 1e-9);
        }
        assert!(r.strictly_decreasing());
    }

    #[test]
    fn cubic_weyl_sums_brute_force() {
        use crate::angles::compute_angles;
        use crate::field::bundled;
        use crate::torus::AngleTorus;
        let t = AngleTorus::build(&bundled::cubic23()).unwrap();
        let recs = compute_angles(&t, 10_000).unwrap();
        // generators found by exhaustive search over a coefficient box
        let want = [
            ([1, 0], -12.058_594_334_892_84, -15.966_802_449_238_205),
            ([0, 1], 4.566_707_865_210_028, 5.340_603_293_299_607_5),
            ([1, 1], 2.815_823_305_330_225, -3.680_614_026_103_804_3),
        ];
        for (k, re, im) in want {
            let r = weyl_sum(&k, recs.iter().map(|a| (a.norm(), &a.point)), &[10_000]);
            let cp = &r.checkpoints[0];
            assert_eq!(cp.count, 1225);
            assert!((cp.sum.re - re).abs() < 1e-9 && (cp.sum.im - im).abs() < 1e-9, "{cp:?}");
        }
    }

    #[test]
    fn single_ray_class() {
        let s = stream();
        let counts = ray_class_counts(refs(&s), 500);
        let total = box_count(&BoxSpec::full(2), refs(&s), 500).total;
        assert_eq!(counts, vec![total]);
    }
}
