//! Free-probability limit moments, exact finite-N expectations and Monte
//! Carlo estimates for words in random permutation, Gaussian and Wishart
//! matrices, with the machinery to cross-check all three.

pub mod error;
pub mod exact;
pub mod harness;
pub mod limit;
pub mod monomial;
pub mod perm;
pub mod poly;
pub mod sim;
pub mod words;

pub use error::{Error, Result};
pub use monomial::{Canonical, Factor, Monomial};
pub use perm::Perm;
pub use poly::CPolynomial;
pub use words::FreeWord;
