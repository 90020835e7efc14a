pub mod additive;
pub mod error;
pub mod field;
pub mod freiman;
pub mod json;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod parse;
pub mod places;
pub mod poly;
pub mod ratfunc;
pub mod reports;
pub mod riemann_roch;
pub mod subspace;

pub use error::{Error, Result};
pub use field::{BaseField, Scalar};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use model::{CurveModel, FFElem, Frame};
pub use places::PlaceId;
pub use subspace::{KSubspace, KxSubspace};
pub use riemann_roch::Divisor;
