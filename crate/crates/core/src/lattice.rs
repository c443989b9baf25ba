//! LLL reduction and Fincke–Pohst enumeration for small-rank lattices given
//! by integer coordinate rows together with a linear real embedding.

/// Gram–Schmidt data: `mu[i][j]` for `j < i` and squared lengths `b_star`.
struct GramSchmidt {
    mu: Vec<Vec<f64>>,
    b_star: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(vectors: &[Vec<f64>]) -> GramSchmidt {
    let n = vectors.len();
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut b_star = vec![0.0; n];
    for i in 0..n {
        let mut v = vectors[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&vectors[i], &ortho[j]) / b_star[j];
            for (vk, ok) in v.iter_mut().zip(&ortho[j]) {
                *vk -= mu[i][j] * ok;
            }
        }
        b_star[i] = dot(&v, &v);
        ortho.push(v);
    }
    GramSchmidt { mu, b_star }
}

/// A reduced basis: integer rows and their embedded images.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub rows: Vec<Vec<i64>>,
    pub vectors: Vec<Vec<f64>>,
}

/// LLL with parameter `delta`. `embed` must be linear in the row; images
/// are recomputed from the integer rows after every update so no rounding
/// error accumulates.
pub fn lll<E>(rows: Vec<Vec<i64>>, embed: E, delta: f64) -> ReducedBasis
where
    E: Fn(&[i64]) -> Vec<f64>,
{
    let n = rows.len();
    let mut rows = rows;
    let mut vectors: Vec<Vec<f64>> = rows.iter().map(|r| embed(r)).collect();
    if n < 2 {
        return ReducedBasis { rows, vectors };
    }
    let mut gs = gram_schmidt(&vectors);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 1_000_000, "LLL failed to terminate");
        for j in (0..k).rev() {
            let q = gs.mu[k][j].round();
            if q != 0.0 {
                let q = q as i64;
                let (head, tail) = rows.split_at_mut(k);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= q * b;
                }
                vectors[k] = embed(&rows[k]);
                gs = gram_schmidt(&vectors);
            }
        }
        let lovasz = (delta - gs.mu[k][k - 1].powi(2)) * gs.b_star[k - 1];
        if gs.b_star[k] >= lovasz {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            vectors.swap(k, k - 1);
            gs = gram_schmidt(&vectors);
            k = (k - 1).max(1);
        }
    }
    ReducedBasis { rows, vectors }
}

/// A lattice vector found by enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortVector {
    pub sq_len: f64,
    /// Integer combination of the basis rows.
    pub combo: Vec<i64>,
    /// The resulting integer row.
    pub row: Vec<i64>,
}

/// All nonzero lattice vectors of squared length `≤ radius_sq`, sorted by
/// length and then by row so the order is reproducible.
pub fn enumerate_short(basis: &ReducedBasis, radius_sq: f64) -> Vec<ShortVector> {
    let n = basis.rows.len();
    let gs = gram_schmidt(&basis.vectors);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    search(&gs, radius_sq, n, 0.0, &mut x, &mut out, basis);
    out.sort_by(|a, b| a.sq_len.total_cmp(&b.sq_len).then_with(|| a.row.cmp(&b.row)));
    out
}

fn search(
    gs: &GramSchmidt,
    radius_sq: f64,
    level: usize,
    partial: f64,
    x: &mut Vec<i64>,
    out: &mut Vec<ShortVector>,
    basis: &ReducedBasis,
) {
    if level == 0 {
        if x.iter().all(|&c| c == 0) {
            return;
        }
        let dim = basis.rows[0].len();
        let mut row = vec![0i64; dim];
        for (c, r) in x.iter().zip(&basis.rows) {
            for (acc, v) in row.iter_mut().zip(r) {
                *acc += c * v;
            }
        }
        out.push(ShortVector {
            sq_len: partial,
            combo: x.clone(),
            row,
        });
        return;
    }
    let i = level - 1;
    let n = x.len();
    let center: f64 = -(i + 1..n).map(|j| gs.mu[j][i] * x[j] as f64).sum::<f64>();
    let slack = (radius_sq - partial).max(0.0);
    let width = (slack / gs.b_star[i]).sqrt();
    let lo = (center - width - 1e-9).ceil() as i64;
    let hi = (center + width + 1e-9).floor() as i64;
    for xi in lo..=hi {
        let d = xi as f64 - center;
        let next = partial + d * d * gs.b_star[i];
        if next > radius_sq * (1.0 + 1e-12) {
            continue;
        }
        x[i] = xi;
        search(gs, radius_sq, i, next, x, out, basis);
    }
    x[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_embed(r: &[i64]) -> Vec<f64> {
        r.iter().map(|&c| c as f64).collect()
    }

    #[test]
    fn reduces_skewed_basis() {
        let rows = vec![vec![1, 0, 0], vec![4, 1, 0], vec![17, 9, 1]];
        let red = lll(rows, identity_embed, 0.99);
        for r in &red.rows {
            assert!(r.iter().map(|c| c * c).sum::<i64>() == 1, "{:?}", red.rows);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let rows = vec![vec![3, 1], vec![1, 4]];
        let embed = |r: &[i64]| vec![r[0] as f64 + 0.5 * r[1] as f64, 1.3 * r[1] as f64];
        let red = lll(rows.clone(), embed, 0.99);
        let radius = 40.0;
        let found = enumerate_short(&red, radius);
        let mut brute = Vec::new();
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                if a == 0 && b == 0 {
                    continue;
                }
                let row = vec![3 * a + b, a + 4 * b];
                let v = embed(&row);
                let l = v[0] * v[0] + v[1] * v[1];
                if l <= radius {
                    brute.push(row);
                }
            }
        }
        let mut got: Vec<_> = found.iter().map(|s| s.row.clone()).collect();
        got.sort();
        brute.sort();
        assert_eq!(got, brute);
        for w in found.windows(2) {
            assert!(w[0].sq_len <= w[1].sq_len);
        }
    }
}
