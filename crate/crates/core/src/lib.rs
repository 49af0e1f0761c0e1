//! Linear factorisation of differential polynomials over Puiseux series and
//! the formal Jordan decomposition `D = S + N` of differential operators
//! `d + A` with `d = t d/dt`.

pub mod cli;
pub mod diffop;
pub mod error;
pub mod factor;
pub mod orepoly;
pub mod scalars;
pub mod series;

pub use error::{Error, Result};
