//! Newton polyhedra at infinity and optimality conditions at infinity for
//! polynomial optimization problems.

pub mod error;
pub mod analysis;
pub mod cli;
pub mod conditions;
pub mod geometry;
mod kkt;
pub mod lp;
pub mod numeric;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/newton-polyhedra.md")]
    mod newton_polyhedra {}
    #[doc = include_str!("../../../book/src/face-polynomials.md")]
    mod face_polynomials {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/infimum.md")]
    mod infimum {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
