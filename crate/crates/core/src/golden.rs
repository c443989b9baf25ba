//! Closed forms for the torus of `x³ - x - 1` compared with the computed
//! lattice and dual basis.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::torus::AngleTorus;

pub const CUBIC_POLY: [i64; 4] = [-1, -1, 0, 1];
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenRow {
    pub name: &'static str,
    pub computed: Vec<f64>,
    pub closed_form: Vec<f64>,
}

impl GoldenRow {
    pub fn residual(&self) -> f64 {
        self.computed
            .iter()
            .zip(&self.closed_form)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenReport {
    pub theta: f64,
    pub phi: f64,
    pub rows: Vec<GoldenRow>,
}

impl GoldenReport {
    pub fn theta_matches(&self) -> bool {
        format!("{:.4}", self.theta) == "1.3247"
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(GoldenRow::residual).fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.theta_matches() && self.max_residual() < TOLERANCE
    }
}

/// `v₁ = (log θ, -½ log θ, 2πφ)`, `v₂ = (0, 0, 2π)` and their duals
/// `w₁ = (2, -2, 0)/(3 log θ)`, `w₂ = (-2φ/(3 log θ), 2φ/(3 log θ), 1/2π)`.
pub fn verify_cubic(field: &FieldSpec) -> Result<GoldenReport> {
    if field.poly() != CUBIC_POLY {
        return Err(Error::ParamViolation(format!(
            "golden constants are defined for x^3 - x - 1 only, got {:?}",
            field.poly()
        )));
    }
    let torus = AngleTorus::build(field)?;
    let theta = field.real_roots()[0];
    let phi = field.complex_roots()[0].arg().rem_euclid(TAU) / TAU;
    let l = theta.ln();
    let lat = torus.lattice();
    let closed = [
        ("v1", vec![l, -l / 2.0, TAU * phi]),
        ("v2", vec![0.0, 0.0, TAU]),
        ("w1", vec![2.0 / (3.0 * l), -2.0 / (3.0 * l), 0.0]),
        (
            "w2",
            vec![-2.0 * phi / (3.0 * l), 2.0 * phi / (3.0 * l), 1.0 / TAU],
        ),
    ];
    let computed = [
        lat.basis()[0].clone(),
        lat.basis()[1].clone(),
        lat.dual()[0].clone(),
        lat.dual()[1].clone(),
    ];
    let rows = closed
        .into_iter()
        .zip(computed)
        .map(|((name, closed_form), computed)| GoldenRow {
            name,
            computed,
            closed_form,
        })
        .collect();
    Ok(GoldenReport { theta, phi, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bundled;

    #[test]
    fn cubic_constants() {
        let r = verify_cubic(&bundled::cubic23()).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!((r.phi - 0.387_977_564_421_472_4).abs() < 1e-12);
        assert!((r.theta - 1.324_717_957_244_746).abs() < 1e-14);
    }

    #[test]
    fn other_fields_refused() {
        assert!(verify_cubic(&bundled::gaussian()).is_err());
    }
}
