pub mod bounds;
pub mod corpus;
pub mod error;
pub mod form;
pub(crate) mod json;

pub use error::{Error, Result};
pub mod real;
pub mod reduction;
pub mod resolvent;
pub mod solver;
pub mod suite;
pub mod verify;
pub use form::{BinaryForm, CubicForm, GCovariant, QuadraticForm, UnimodularMatrix};
