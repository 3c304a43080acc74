//! Finite fields GF(p^k), dense polynomials over them and the number-theoretic
//! helpers (orders, valuations, irreducible enumeration) the cycle-count
//! formulas rely on.

mod field;
pub mod json;
mod parse;
mod poly;

pub use field::{is_prime, Elem, Field, FieldElement, FieldOp, FieldSpec};
pub use parse::parse_poly;
pub use poly::{
    enumerate_irreducibles, expand_factors, factor_monic, factor_u64, monic_polys, poly_order,
    q_adic_valuation, Poly,
};
