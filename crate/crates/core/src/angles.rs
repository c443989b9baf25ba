//! The stream of prime ideals with their canonical generators and torus
//! points, in ascending norm order, and `ρ` on products of primes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{AlgElem, FieldSpec};
use crate::generator::canonical_generator;
use crate::primes::{enumerate_prime_ideals, PrimeIdealRec};
use crate::torus::{log_vector, AngleTorus, TorusPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct AngleRec {
    pub ideal: PrimeIdealRec,
    pub alpha: AlgElem,
    pub point: TorusPoint,
}

impl AngleRec {
    pub fn norm(&self) -> u64 {
        self.ideal.norm
    }
}

/// Prime ideals of norm `≤ max_norm` with canonical generators and angles.
/// Parallel over ideals; output order is the enumeration order.
pub fn compute_angles(torus: &AngleTorus, max_norm: u64) -> Result<Vec<AngleRec>> {
    let ideals = enumerate_prime_ideals(torus.field(), max_norm);
    ideals
        .into_par_iter()
        .map(|ideal| angle_of(torus, ideal))
        .collect()
}

pub fn angle_of(torus: &AngleTorus, ideal: PrimeIdealRec) -> Result<AngleRec> {
    let g = canonical_generator(torus, &ideal)?;
    let point = torus.rho_of_generator(&g.alpha)?;
    Ok(AngleRec {
        ideal,
        alpha: g.alpha,
        point,
    })
}

/// `ρ(Π 𝔭_i^{e_i}) = Σ e_i ρ(𝔭_i)`.
pub fn rho_ideal(torus: &AngleTorus, factors: &[(PrimeIdealRec, i64)]) -> Result<TorusPoint> {
    let mut acc = TorusPoint::zero(torus.dim());
    for (ideal, e) in factors {
        let rec = angle_of(torus, ideal.clone())?;
        acc = acc.add(&rec.point.scale(*e));
    }
    Ok(acc)
}

/// `ρ` of an integral product, through the exact product of generators.
pub fn rho_integral_product(
    torus: &AngleTorus,
    factors: &[(PrimeIdealRec, u32)],
) -> Result<TorusPoint> {
    let field: &FieldSpec = torus.field();
    let mut alpha = AlgElem::one(field.degree());
    for (ideal, e) in factors {
        let g = canonical_generator(torus, ideal)?;
        for _ in 0..*e {
            alpha = field
                .checked_mul(&alpha, &g.alpha)
                .ok_or_else(|| Error::ParamViolation("generator product overflows".into()))?;
        }
    }
    let x = log_vector(field, &torus.make_positive(&alpha))?;
    Ok(torus.rho_of_log(&x))
}
