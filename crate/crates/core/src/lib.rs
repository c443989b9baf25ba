//! Generalized angles of prime ideals in a number field, their
//! equidistribution on the angle torus, and the finite constructions built
//! on top of them: asymptotic-ratio-set witnesses, product-type cocycles on
//! tail-equivalence relations, and Chebotarev counts over `F_q[T]`.

pub mod angles;
pub mod cocycle;
pub mod equidist;
pub mod error;
pub mod field;
pub mod function_field;
pub mod generator;
pub mod golden;
pub mod lattice;
pub mod poly_fp;
pub mod primes;
pub mod ratio;
pub mod torus;

pub use error::{Error, Result};
pub use field::{AlgElem, FieldSpec};
pub use primes::PrimeIdealRec;
