//! Heegaard Floer homology of integer surgeries on knots, computed from a
//! finite presentation of the knot Floer complex via the mapping-cone formula.
//!
//! Pipeline: a [`knotcx::KnotComplex`] is truncated into the regions
//! `A⁺_s = C{max(i, j−s) ≥ 0}` and `B⁺ = C{i ≥ 0}` ([`regions`]), the maps
//! `v_s`, `h_s` are assembled into a mapping cone ([`cone`]), whose homology
//! is computed by exact F₂-linear algebra ([`homalg`]) and decomposed into
//! U-towers and finite cyclic pieces. Absolute gradings come from the
//! lens-space correction terms ([`gradings`]).

pub mod cone;
pub mod error;
pub mod gradings;
pub mod homalg;
pub mod knotcx;
pub mod oracles;
pub mod regions;
pub mod report;

pub use error::Error;
pub use gradings::{d_lens, Rational};
pub use homalg::{GradedModule, Piece};
pub use knotcx::{
    builtin_borromean, builtin_staircase, builtin_t34, builtin_unknot, parse_complex,
    serialize_complex, KnotComplex,
};
