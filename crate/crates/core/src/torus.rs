//! The angle torus `Γ₁ = V/Λ` for modulus `(1)`: logarithm map, unit
//! lattice with its dual basis, torus coordinates of ideals, normalized
//! Grössencharacters, and the projection that forgets signs at real places.
//!
//! Ambient coordinates list `log|α_v|` for each real place, then the pair
//! `(log|α_v|, arg α_v)` for each complex place. The norm direction has
//! `1` on every log coordinate and `0` on arguments.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{AlgElem, FieldSpec};

const TAU: f64 = 2.0 * PI;

/// A point of the torus in lattice coordinates, each in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint(Vec<f64>);

/// Reduce into `[0, 1)`; values that round up to `1.0` wrap to `0.0`.
pub fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed distance from `a` to `b` on the circle, in `[-1/2, 1/2)`.
pub fn circle_diff(b: f64, a: f64) -> f64 {
    frac(b - a + 0.5) - 0.5
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        TorusPoint(coords.into_iter().map(frac).collect())
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.0.iter().map(|a| a * k as f64).collect())
    }

    /// Largest coordinatewise circular distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| circle_diff(*a, *b).abs())
            .fold(0.0, f64::max)
    }
}

/// The logarithm of `α` at every Archimedean place; args in `[0, 2π)`.
pub fn log_vector(field: &FieldSpec, alpha: &AlgElem) -> Result<Vec<f64>> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let e = field.embed(alpha);
    let mut x = Vec::with_capacity(field.degree());
    x.extend(e.real.iter().map(|v| v.abs().ln()));
    for z in &e.complex {
        x.push(z.norm().ln());
        x.push(z.im.atan2(z.re).rem_euclid(TAU));
    }
    Ok(x)
}

/// Ambient direction of `s(t) = (t^(1/n), …)`.
pub fn norm_direction(field: &FieldSpec) -> Vec<f64> {
    let mut d = vec![1.0; field.r1()];
    for _ in 0..field.r2() {
        d.push(1.0);
        d.push(0.0);
    }
    d
}

fn arg_index(field: &FieldSpec, place: usize) -> usize {
    field.r1() + 2 * place + 1
}

fn sign_mask(field: &FieldSpec, a: &AlgElem) -> u64 {
    field
        .embed(a)
        .real
        .iter()
        .enumerate()
        .fold(0, |m, (i, v)| if *v < 0.0 { m | (1 << i) } else { m })
}

/// Row basis of the integer lattice spanned by `gens`, by column-wise
/// Euclidean elimination.
fn integer_row_basis(mut gens: Vec<Vec<i64>>, dim: usize) -> Vec<Vec<i64>> {
    let mut basis = Vec::new();
    for col in 0..dim {
        loop {
            let nz: Vec<usize> = (0..gens.len()).filter(|&i| gens[i][col] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| gens[i][col].abs()).unwrap();
            if nz.len() == 1 {
                let mut row = gens.swap_remove(piv);
                if row[col] < 0 {
                    row.iter_mut().for_each(|c| *c = -*c);
                }
                basis.push(row);
                break;
            }
            let pivot_row = gens[piv].clone();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = gens[i][col].div_euclid(pivot_row[col]);
                for (a, b) in gens[i].iter_mut().zip(&pivot_row) {
                    *a -= q * b;
                }
            }
        }
        gens.retain(|g| g.iter().any(|&c| c != 0));
    }
    basis
}

/// Lattice of log vectors together with its dual basis in the subspace
/// orthogonal to the norm direction.
#[derive(Clone, Debug)]
pub struct LogLattice {
    basis: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
    /// Elements whose log vectors are the first `unit_rank` basis vectors.
    units: Vec<AlgElem>,
}

impl LogLattice {
    /// Lattice from the log vectors of `units` (free part) plus a sublattice
    /// of the argument coordinates spanned by `(2π/w)·arg_rows`.
    fn assemble(
        field: &FieldSpec,
        units: Vec<AlgElem>,
        arg_rows: Vec<Vec<i64>>,
        w: u32,
    ) -> Result<Self> {
        let dim = field.degree();
        let mut basis = Vec::with_capacity(dim - 1);
        for u in &units {
            basis.push(log_vector(field, u)?);
        }
        for row in arg_rows {
            let mut v = vec![0.0; dim];
            for (j, &c) in row.iter().enumerate() {
                v[arg_index(field, j)] = TAU * c as f64 / w as f64;
            }
            basis.push(v);
        }
        if basis.len() != dim - 1 {
            return Err(Error::SingularLattice { pivot: 0.0 });
        }
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for (i, v) in basis.iter().enumerate() {
            for (j, &x) in v.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        for (j, &x) in norm_direction(field).iter().enumerate() {
            m[(dim - 1, j)] = x;
        }
        let scale: f64 = m
            .row_iter()
            .map(|r| r.norm())
            .product::<f64>()
            .max(f64::MIN_POSITIVE);
        let rel_det = m.determinant().abs() / scale;
        if rel_det < 1e-9 {
            return Err(Error::SingularLattice { pivot: rel_det });
        }
        let inv = m
            .try_inverse()
            .ok_or(Error::SingularLattice { pivot: rel_det })?;
        // Rows of (M^{-1})^T are dual to the rows of M.
        let dual = (0..dim - 1)
            .map(|i| (0..dim).map(|j| inv[(j, i)]).collect())
            .collect();
        Ok(LogLattice { basis, dual, units })
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn dual(&self) -> &[Vec<f64>] {
        &self.dual
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Elements generating the free part, in basis order.
    pub fn unit_generators(&self) -> &[AlgElem] {
        &self.units
    }

    /// Raw pairings `⟨w_i, x⟩` (not reduced mod 1).
    pub fn pairings(&self, x: &[f64]) -> Vec<f64> {
        self.dual
            .iter()
            .map(|w| w.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn point(&self, x: &[f64]) -> TorusPoint {
        TorusPoint::new(self.pairings(x))
    }

    /// Ambient vector `Σ t_i v_i` for torus coordinates `t`.
    pub fn lift(&self, point: &TorusPoint) -> Vec<f64> {
        let dim = self.basis.first().map_or(0, |b| b.len());
        let mut x = vec![0.0; dim];
        for (t, v) in point.coords().iter().zip(&self.basis) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += t * vi;
            }
        }
        x
    }
}

/// Units and lattices attached to a field: `Λ` from totally positive units
/// (all units when there are no real places) and the coarser `Λ_θ` from the
/// absolute values of every unit.
#[derive(Clone, Debug)]
pub struct AngleTorus {
    field: FieldSpec,
    lattice: LogLattice,
    theta_lattice: LogLattice,
    /// For each sign pattern at the real places, a unit with that pattern.
    sign_units: Vec<AlgElem>,
}

impl AngleTorus {
    pub fn build(field: &FieldSpec) -> Result<Self> {
        let r1 = field.r1();
        let r2 = field.r2();
        let rank = field.unit_rank();
        let n = field.degree();
        let w = field.torsion_order();

        // Arguments of the torsion generator in units of 2π/w.
        let torsion_args: Vec<i64> = field
            .embed(field.torsion_generator())
            .complex
            .iter()
            .map(|z| {
                let a = z.im.atan2(z.re).rem_euclid(TAU) * w as f64 / TAU;
                (a.round() as i64).rem_euclid(w as i64)
            })
            .collect();
        let mut torsion_gens: Vec<Vec<i64>> = (0..r2)
            .map(|j| {
                let mut e = vec![0; r2];
                e[j] = w as i64;
                e
            })
            .collect();
        torsion_gens.push(torsion_args);
        let torsion_rows = integer_row_basis(torsion_gens, r2);

        let theta_lattice =
            LogLattice::assemble(field, field.units().to_vec(), torsion_rows.clone(), w)?;

        // Sign table over products of -1 and the fundamental units.
        let mut sign_units: Vec<Option<AlgElem>> = vec![None; 1 << r1];
        let mut gens = vec![AlgElem::constant(n, -1)];
        gens.extend(field.units().iter().cloned());
        for subset in 0u64..(1 << gens.len()) {
            let mut u = AlgElem::one(n);
            for (i, g) in gens.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    u = field.mul(&u, g);
                }
            }
            let mask = sign_mask(field, &u) as usize;
            if sign_units[mask].is_none() {
                sign_units[mask] = Some(u);
            }
        }
        let sign_units: Vec<AlgElem> = sign_units
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                Error::InvalidField(
                    "units do not realize every sign pattern: the angle group is disconnected"
                        .into(),
                )
            })?;

        let lattice = if r1 == 0 {
            LogLattice::assemble(field, field.units().to_vec(), torsion_rows, w)?
        } else {
            // Exponent vectors a with sign(prod u_i^a_i) in {all +, all -}.
            let signs: Vec<u64> = field.units().iter().map(|u| sign_mask(field, u)).collect();
            let all = (1u64 << r1) - 1;
            let mut gens: Vec<Vec<i64>> = (0..rank)
                .map(|i| {
                    let mut e = vec![0; rank];
                    e[i] = 2;
                    e
                })
                .collect();
            for bits in 0u64..(1 << rank) {
                let s = (0..rank)
                    .filter(|i| bits >> i & 1 == 1)
                    .fold(0, |m, i| m ^ signs[i]);
                if s == 0 || s == all {
                    gens.push((0..rank).map(|i| (bits >> i & 1) as i64).collect());
                }
            }
            let exps = integer_row_basis(gens, rank);
            let positive: Vec<AlgElem> = exps
                .iter()
                .map(|a| {
                    let mut u = AlgElem::one(n);
                    for (i, &k) in a.iter().enumerate() {
                        u = field.mul(&u, &field.unit_pow(&field.units()[i], k));
                    }
                    if sign_mask(field, &u) != 0 {
                        u = u.neg();
                    }
                    u
                })
                .collect();
            let ambiguity = (0..r2)
                .map(|j| {
                    let mut e = vec![0; r2];
                    e[j] = 1;
                    e
                })
                .collect();
            LogLattice::assemble(field, positive, ambiguity, 1)?
        };

        Ok(AngleTorus {
            field: field.clone(),
            lattice,
            theta_lattice,
            sign_units,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn lattice(&self) -> &LogLattice {
        &self.lattice
    }

    pub fn theta_lattice(&self) -> &LogLattice {
        &self.theta_lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// A unit with the same signs as `alpha` at every real place, so that
    /// the product is totally positive.
    pub fn sign_unit(&self, alpha: &AlgElem) -> &AlgElem {
        &self.sign_units[sign_mask(&self.field, alpha) as usize]
    }

    /// `alpha` times the unit that makes it totally positive.
    pub fn make_positive(&self, alpha: &AlgElem) -> AlgElem {
        self.field.mul(alpha, self.sign_unit(alpha))
    }

    /// Torus point of the principal ideal `(alpha)`, for any generator.
    pub fn rho_of_generator(&self, alpha: &AlgElem) -> Result<TorusPoint> {
        let x = log_vector(&self.field, &self.make_positive(alpha))?;
        Ok(self.lattice.point(&x))
    }

    /// Torus point from a log vector of a totally positive generator.
    pub fn rho_of_log(&self, x: &[f64]) -> TorusPoint {
        self.lattice.point(x)
    }

    /// `χ_k(𝔞) = exp(-2πi Σ k_i t_i)` from torus coordinates.
    pub fn grossencharacter(&self, k: &[i64], point: &TorusPoint) -> Complex64 {
        character_value(k, point)
    }

    /// `χ_k` evaluated straight from a log vector, without reducing mod 1.
    pub fn grossencharacter_from_log(&self, k: &[i64], x: &[f64]) -> Complex64 {
        let phase: f64 = self
            .lattice
            .pairings(x)
            .iter()
            .zip(k)
            .map(|(t, &ki)| t * ki as f64)
            .sum();
        Complex64::from_polar(1.0, -TAU * phase)
    }

    /// Image of a torus point under the map that replaces each real
    /// coordinate by its absolute value, in `Λ_θ` coordinates.
    pub fn theta_projection(&self, point: &TorusPoint) -> TorusPoint {
        self.theta_lattice.point(&self.lattice.lift(point))
    }

    /// The projected point computed from any generator, signs ignored.
    pub fn theta_point_of_generator(&self, alpha: &AlgElem) -> Result<TorusPoint> {
        Ok(self.theta_lattice.point(&log_vector(&self.field, alpha)?))
    }
}

/// `exp(-2πi ⟨k, t⟩)`.
pub fn character_value(k: &[i64], point: &TorusPoint) -> Complex64 {
    let phase: f64 = point
        .coords()
        .iter()
        .zip(k)
        .map(|(t, &ki)| t * ki as f64)
        .sum();
    Complex64::from_polar(1.0, -TAU * phase)
}

/// Signed logarithmic datum of an element of `K_∞^*`: signs at real places
/// plus the log vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedLog {
    pub negative: Vec<bool>,
    pub log: Vec<f64>,
}

impl SignedLog {
    pub fn of(field: &FieldSpec, alpha: &AlgElem) -> Result<Self> {
        let negative = field.embed(alpha).real.iter().map(|v| *v < 0.0).collect();
        Ok(SignedLog {
            negative,
            log: log_vector(field, alpha)?,
        })
    }

    /// Replace every real coordinate by its absolute value.
    pub fn theta(&self) -> Self {
        SignedLog {
            negative: vec![false; self.negative.len()],
            log: self.log.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bundled;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn dual_basis_identity_all_fields() {
        for k in bundled::all() {
            let t = AngleTorus::build(&k).unwrap();
            for lat in [t.lattice(), t.theta_lattice()] {
                let d = norm_direction(&k);
                for (i, w) in lat.dual().iter().enumerate() {
                    let wd: f64 = w.iter().zip(&d).map(|(a, b)| a * b).sum();
                    assert!(wd.abs() < 1e-9);
                    for (j, v) in lat.basis().iter().enumerate() {
                        let p: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                        assert!(close(p, if i == j { 1.0 } else { 0.0 }), "{}", k.name());
                    }
                }
                // basis lies in the norm-one hyperplane
                for v in lat.basis() {
                    let mut s = 0.0;
                    for i in 0..k.r1() {
                        s += v[i];
                    }
                    for j in 0..k.r2() {
                        s += 2.0 * v[k.r1() + 2 * j];
                    }
                    assert!(s.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn log_vector_edge_cases() {
        let k = bundled::cubic23();
        assert_eq!(log_vector(&k, &AlgElem::one(3)).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(matches!(log_vector(&k, &AlgElem::zero(3)), Err(Error::ZeroElement)));
        let t = AngleTorus::build(&k).unwrap();
        let v1 = log_vector(&k, &AlgElem::theta(3)).unwrap();
        assert_eq!(t.lattice().basis()[0], v1);
    }

    #[test]
    fn gaussian_lattice_absorbs_roots_of_unity() {
        let k = bundled::gaussian();
        let t = AngleTorus::build(&k).unwrap();
        let b = &t.lattice().basis()[0];
        assert!(close(b[0], 0.0) && close(b[1], PI / 2.0));
        let i = AlgElem::new(vec![0, 1]);
        let alpha = AlgElem::new(vec![2, 1]);
        let r = t.rho_of_generator(&alpha).unwrap();
        let mut beta = alpha.clone();
        for _ in 0..4 {
            beta = k.mul(&beta, &i);
            assert!(t.rho_of_generator(&beta).unwrap().distance(&r) < 1e-12);
        }
        // t = 4·arg/(2π)
        let expected = frac(4.0 * (1.0f64).atan2(2.0) / TAU);
        assert!(close(r.coords()[0], expected));
    }

    #[test]
    fn sqrt2_uses_totally_positive_units() {
        let k = bundled::sqrt2();
        let t = AngleTorus::build(&k).unwrap();
        assert_eq!(t.lattice().unit_generators(), &[AlgElem::new(vec![3, 2])]);
        assert_eq!(t.theta_lattice().unit_generators(), &[AlgElem::new(vec![1, 1])]);
    }

    #[test]
    fn theta_projection_identities() {
        let k = bundled::gaussian();
        let t = AngleTorus::build(&k).unwrap();
        let p = TorusPoint::new(vec![0.3]);
        assert!(t.theta_projection(&p).distance(&p) < 1e-12);

        let k = bundled::sqrt2();
        let t = AngleTorus::build(&k).unwrap();
        let eps = AlgElem::new(vec![1, 1]);
        let alpha = AlgElem::new(vec![3, 1]); // norm 7
        let a = t.rho_of_generator(&alpha).unwrap();
        let b = t.rho_of_generator(&k.mul(&alpha, &eps)).unwrap();
        assert!(a.distance(&b) < 1e-9);
        // Without sign normalization the generators alpha and eps·alpha
        // sit half a period apart; the projection collapses them.
        let raw_a = t.lattice().point(&log_vector(&k, &alpha).unwrap());
        let raw_b = t.lattice().point(&log_vector(&k, &k.mul(&alpha, &eps)).unwrap());
        assert!((raw_a.distance(&raw_b) - 0.5).abs() < 1e-9);
        let pa = t.theta_projection(&raw_a);
        assert!(pa.distance(&t.theta_projection(&raw_b)) < 1e-9);
        assert!(pa.distance(&t.theta_point_of_generator(&alpha.neg()).unwrap()) < 1e-9);

        let s = SignedLog::of(&k, &alpha.neg()).unwrap();
        assert_eq!(s.theta().theta(), s.theta());
        assert_eq!(s.theta().log, s.log);
    }

    #[test]
    fn torus_group_law() {
        let a = TorusPoint::new(vec![0.75, 0.1]);
        let b = TorusPoint::new(vec![0.5, 0.95]);
        let s = a.add(&b);
        assert!(s.distance(&TorusPoint::new(vec![0.25, 0.05])) < 1e-12);
        assert!(s.sub(&b).distance(&a) < 1e-12);
        assert!(a.add(&a.neg()).distance(&TorusPoint::zero(2)) < 1e-12);
        assert_eq!(frac(-1e-18), 0.0);
    }
}
