//! Generators of prime ideals in class-number-one fields and their canonical
//! normalization modulo units.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{AlgElem, FieldSpec};
use crate::lattice::{enumerate_short, lll};
use crate::poly_fp::FpPoly;
use crate::primes::PrimeIdealRec;
use crate::torus::{log_vector, AngleTorus};

const LLL_DELTA: f64 = 0.99;
const CELL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorRec {
    pub ideal: PrimeIdealRec,
    pub alpha: AlgElem,
    pub normalized: bool,
}

/// Z-basis of the ideal `(p, g(θ))`: `g·θ^j` for `j < n - d` and `p·θ^i`
/// for `i < d`, a triangular basis of determinant `p^d`.
pub fn ideal_basis(field: &FieldSpec, ideal: &PrimeIdealRec) -> Vec<Vec<i64>> {
    let n = field.degree();
    let d = ideal.res_degree as usize;
    let mut rows = Vec::with_capacity(n);
    for i in 0..d {
        let mut r = vec![0i64; n];
        r[i] = ideal.p as i64;
        rows.push(r);
    }
    for j in 0..n - d {
        let mut r = vec![0i64; n];
        for (i, &c) in ideal.factor.iter().enumerate() {
            r[i + j] = c as i64;
        }
        rows.push(r);
    }
    rows
}

/// `alpha` lies in the prime: it vanishes in `F_p[X]/(g)`.
pub fn in_ideal(alpha: &AlgElem, ideal: &PrimeIdealRec) -> bool {
    FpPoly::from_ints(ideal.p, alpha.coords())
        .rem(&ideal.factor_poly())
        .is_zero()
}

/// Both generator invariants: exact norm and membership.
pub fn verify_generator(field: &FieldSpec, ideal: &PrimeIdealRec, alpha: &AlgElem) -> bool {
    field.norm(alpha).unsigned_abs() == ideal.norm as u128 && in_ideal(alpha, ideal)
}

/// Squared-length ceiling `4·n·N^(2/n)·|disc|^(1/n)` for the search.
pub fn search_bound(field: &FieldSpec, norm: u64) -> f64 {
    let n = field.degree() as f64;
    4.0 * n * (norm as f64).powf(2.0 / n) * (field.discriminant().abs() as f64).powf(1.0 / n)
}

/// Find `α` with `(α) = ideal` by reducing the ideal lattice under the
/// Minkowski embedding and scanning short vectors in order of length.
pub fn find_generator(field: &FieldSpec, ideal: &PrimeIdealRec) -> Result<GeneratorRec> {
    if !field.class_number_one() {
        return Err(Error::NotClassNumberOne);
    }
    let n = field.degree() as f64;
    let scale = (ideal.norm as f64).powf(-1.0 / n);
    let embed = |row: &[i64]| -> Vec<f64> {
        field
            .minkowski(&AlgElem::new(row.to_vec()))
            .into_iter()
            .map(|x| x * scale)
            .collect()
    };
    let reduced = lll(ideal_basis(field, ideal), embed, LLL_DELTA);
    // Lengths below are in units of N^(2/n); T2 ≥ n·N^(2/n) for any element.
    let bound = search_bound(field, ideal.norm) * scale * scale;
    let mut radius = 1.5 * n;
    loop {
        let radius_now = radius.min(bound);
        for sv in enumerate_short(&reduced, radius_now) {
            let alpha = AlgElem::new(sv.row);
            if field.norm(&alpha).unsigned_abs() == ideal.norm as u128 {
                debug_assert!(in_ideal(&alpha, ideal));
                return Ok(GeneratorRec {
                    ideal: ideal.clone(),
                    alpha,
                    normalized: false,
                });
            }
        }
        if radius_now >= bound {
            return Err(Error::GeneratorNotFound {
                norm: ideal.norm,
                p: ideal.p,
                bound: bound / (scale * scale),
            });
        }
        radius *= 2.0;
    }
}

/// Canonical generator: totally positive (so the first real embedding is
/// positive), unit-log coefficients in `[0, 1)`, and for fields without
/// real places the first argument reduced into `[0, 2π/w)`.
pub fn normalize_generator(torus: &AngleTorus, g: &GeneratorRec) -> GeneratorRec {
    GeneratorRec {
        ideal: g.ideal.clone(),
        alpha: normalize_element(torus, &g.alpha),
        normalized: true,
    }
}

/// Just the sign step: `alpha` times the unit matching its real signs.
pub fn positive_generator(torus: &AngleTorus, alpha: &AlgElem) -> AlgElem {
    torus.make_positive(alpha)
}

pub fn normalize_element(torus: &AngleTorus, alpha: &AlgElem) -> AlgElem {
    let field = torus.field();
    let mut a = torus.make_positive(alpha);
    let lattice = torus.lattice();
    let units = lattice.unit_generators();
    for _ in 0..4 {
        let x = log_vector(field, &a).expect("generator is nonzero");
        let coeffs = lattice.pairings(&x);
        let mut moved = false;
        for (u, c) in units.iter().zip(&coeffs) {
            let k = (c + CELL_TOL).floor() as i64;
            if k != 0 {
                a = field.mul(&a, &field.unit_pow(u, -k));
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    if field.r1() == 0 {
        let w = field.torsion_order() as f64;
        let z = field.embed(&a).complex[0];
        let arg = z.im.atan2(z.re).rem_euclid(2.0 * PI);
        let j = ((arg * w / (2.0 * PI) + CELL_TOL).floor() as i64).rem_euclid(w as i64);
        if j != 0 {
            let zeta = field.torsion_generator();
            let inv = field.pow(zeta, (w as u64) - j as u64);
            a = field.mul(&a, &inv);
        }
    }
    a
}

/// Find and normalize in one step.
pub fn canonical_generator(torus: &AngleTorus, ideal: &PrimeIdealRec) -> Result<GeneratorRec> {
    let g = find_generator(torus.field(), ideal)?;
    Ok(normalize_generator(torus, &g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bundled;
    use crate::primes::{enumerate_prime_ideals, primes_above};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn el(c: &[i64]) -> AlgElem {
        AlgElem::new(c.to_vec())
    }

    /// Brute-force oracle: all elements with coordinates in `[-b, b]` of the
    /// given absolute norm.
    fn brute_generators(field: &FieldSpec, norm: u64, b: i64) -> Vec<AlgElem> {
        let n = field.degree();
        let mut out = Vec::new();
        let total = (2 * b + 1).pow(n as u32);
        for mut idx in 0..total {
            let mut c = vec![0; n];
            for ci in c.iter_mut() {
                *ci = idx % (2 * b + 1) - b;
                idx /= 2 * b + 1;
            }
            let a = AlgElem::new(c);
            if field.norm(&a).unsigned_abs() == norm as u128 {
                out.push(a);
            }
        }
        out
    }

    fn is_associate(field: &FieldSpec, a: &AlgElem, b: &AlgElem) -> bool {
        // equal norms up to sign and an integral quotient a/b
        let na = field.norm(a);
        let nb = field.norm(b);
        if na.abs() != nb.abs() {
            return false;
        }
        let m = field.mul_matrix(b);
        let n = field.degree();
        let target: Vec<f64> = a.coords().iter().map(|&c| c as f64).collect();
        let mm: nalgebra::DMatrix<f64> =
            nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j] as f64);
        let sol = mm.lu().solve(&nalgebra::DVector::from_vec(target)).unwrap();
        sol.iter().all(|x| (x - x.round()).abs() < 1e-6)
    }

    #[test]
    fn cubic_norm_five_and_seven() {
        let k = bundled::cubic23();
        let p5 = &primes_above(&k, 5).unwrap()[0];
        let g5 = find_generator(&k, p5).unwrap();
        assert!(verify_generator(&k, p5, &g5.alpha));
        assert!(is_associate(&k, &g5.alpha, &el(&[-2, 1, 0])));

        let p7 = &primes_above(&k, 7).unwrap()[0];
        assert_eq!(p7.root(), Some(5));
        let g7 = find_generator(&k, p7).unwrap();
        assert!(is_associate(&k, &g7.alpha, &el(&[2, 1, 0])));
        // brute force agrees that θ + 2 is a generator of the right norm
        assert!(brute_generators(&k, 7, 2).contains(&el(&[2, 1, 0])));
    }

    #[test]
    fn gaussian_norm_five() {
        let k = bundled::gaussian();
        let above = primes_above(&k, 5).unwrap();
        assert_eq!(above[0].root(), Some(2));
        let g = find_generator(&k, &above[0]).unwrap();
        let candidates: Vec<AlgElem> = brute_generators(&k, 5, 3)
            .into_iter()
            .filter(|a| in_ideal(a, &above[0]))
            .collect();
        assert!(candidates.contains(&g.alpha));
        // i ≡ 2 mod this prime, so it is (i - 2) = (1 + 2i); 2 + i lies over r = 3.
        assert!(is_associate(&k, &g.alpha, &el(&[1, 2])));
        assert!(!is_associate(&k, &g.alpha, &el(&[2, 1])));
        let other = find_generator(&k, &above[1]).unwrap();
        assert_eq!(above[1].root(), Some(3));
        assert!(is_associate(&k, &other.alpha, &el(&[2, 1])));
    }

    #[test]
    fn sign_step_and_idempotence() {
        let k = bundled::cubic23();
        let t = AngleTorus::build(&k).unwrap();
        assert_eq!(positive_generator(&t, &el(&[-2, 1, 0])), el(&[2, -1, 0]));
        let a = normalize_element(&t, &el(&[-2, 1, 0]));
        assert_eq!(normalize_element(&t, &a), a);
        assert_eq!(normalize_element(&t, &el(&[2, -1, 0])), a);
        assert!(k.embed(&a).real[0] > 0.0);
    }

    #[test]
    fn soundness_small_norms() {
        for k in bundled::all() {
            let t = AngleTorus::build(&k).unwrap();
            for ideal in enumerate_prime_ideals(&k, 2000) {
                let g = canonical_generator(&t, &ideal).unwrap();
                assert!(verify_generator(&k, &ideal, &g.alpha), "{ideal:?}");
                assert!(g.normalized);
            }
        }
    }

    #[test]
    fn canonical_under_units() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in bundled::all() {
            let t = AngleTorus::build(&k).unwrap();
            let ideals = enumerate_prime_ideals(&k, 5000);
            let n = k.degree();
            for _ in 0..100 {
                let ideal = &ideals[rng.gen_range(0..ideals.len())];
                let g = find_generator(&k, ideal).unwrap();
                let canon = normalize_element(&t, &g.alpha);
                let mut u = if rng.gen_bool(0.5) {
                    AlgElem::one(n)
                } else {
                    AlgElem::constant(n, -1)
                };
                for f in k.units() {
                    u = k.mul(&u, &k.unit_pow(f, rng.gen_range(-2..=2)));
                }
                let z = k.pow(k.torsion_generator(), rng.gen_range(0..k.torsion_order()) as u64);
                u = k.mul(&u, &z);
                let moved = k.mul(&g.alpha, &u);
                assert_eq!(normalize_element(&t, &moved), canon, "{}", k.name());
            }
        }
    }

    #[test]
    fn not_class_number_one_is_refused() {
        let cfg = r#"{"name":"x","poly":[-1,-1,0,1],"units":[[0,1,0]]}"#;
        let k = FieldSpec::from_json(cfg).unwrap();
        let ideal = &primes_above(&k, 5).unwrap()[0];
        assert!(matches!(find_generator(&k, ideal), Err(Error::NotClassNumberOne)));
    }

    #[test]
    fn q_sqrt_minus_5_has_no_generator_for_nonprincipal_prime() {
        // Z[√-5] has class number 2; the prime over 2 is not principal.
        let cfg = r#"{"name":"x","poly":[5,0,1],"units":[],"class_number_one":true}"#;
        let k = FieldSpec::from_json(cfg).unwrap();
        let ideal = &primes_above(&k, 2).unwrap()[0];
        match find_generator(&k, ideal) {
            Err(Error::GeneratorNotFound { norm, bound, .. }) => {
                assert_eq!(norm, 2);
                assert!(bound > 0.0);
            }
            other => panic!("expected GeneratorNotFound, got {other:?}"),
        }
    }
}
