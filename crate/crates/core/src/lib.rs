pub mod connection;
pub mod error;
pub mod harness;
pub mod io;
pub mod kaehler;
pub mod mink3;
pub mod polygon;
pub mod tangent;
pub mod tol;

pub use error::{Error, Result};
