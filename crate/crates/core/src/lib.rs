//! Upper bounds on the distance of q-ary quantum CSS and stabilizer codes.
//!
//! The distance search ([`distance`]) is a randomized information-set
//! algorithm: random column permutations followed by Gauss elimination over
//! GF(q) ([`gf`], [`linalg`]). Codes are validated in [`codes`], and matrices
//! move in and out through the MTXE dialect of Matrix Market files ([`mtxe`]).

pub mod cli;
pub mod codes;
pub mod distance;
pub mod gf;
pub mod linalg;
pub mod mtxe;

pub use codes::{AnyCode, CssCode, Sector, StabCode, SympVec};
pub use distance::{DistanceResult, ExactBudget, IsParams};
pub use gf::{make_field, FFElem, FieldSpec};
pub use linalg::{MatrixGF, Perm, RowSpace, WeightKind};
