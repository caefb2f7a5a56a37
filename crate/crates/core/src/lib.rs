//! Exact modular forms for `Gamma_0(p)` with the quadratic character, their
//! vector-valued counterparts for the Weil representation of a prime
//! discriminant form, and Borcherds products on Hilbert modular surfaces.

pub mod borcherds;
pub mod character;
pub mod error;
pub mod gamma0;
pub mod quadfield;
pub mod rational;
pub mod series;
pub mod verify;
pub mod weil;

pub use error::{Error, Result};
pub use series::{Exponent, FracQSeries};
