//! Exact finite-field toolkit for cycle types of affine permutations and for
//! constructing coset-wise affine complete mappings with prescribed cycle types.
//!
//! Layout:
//! - [`gf`]: prime and extension fields, dense polynomials, factorization, orders.
//! - [`linalg`]: matrices, companion forms and the primary rational canonical form.
//! - [`cycletype`]: the cycle-type monomial algebra (products, blow-ups, `⋇`).
//! - [`affine_ct`]: cycle types of affine permutations and the `Γ` sets.
//! - [`cgl`]: matrices without eigenvalue `-1` and factorizations into them.
//! - [`cwaffine`]: coset-wise affine maps, wreath products and the constructors.
//! - [`oracle`]: brute-force ground truth and Lagrange interpolation.
//! - [`cli`]: the `cosetmap` command-line front end.

pub mod affine_ct;
pub mod cgl;
pub mod cli;
pub mod cwaffine;
pub mod cycletype;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod oracle;

pub use cycletype::CycleType;
pub use error::{Error, Result};
pub use gf::{Elem, Field, FieldElement, Poly};
pub use linalg::{AffineMap, Matrix, Vector};
