//! Exact combinatorics of line bundles on the iterated blow-up `Y` of `P^d`
//! over a finite field in all of its rational linear subvarieties.

pub mod blowup;
pub mod building;
pub mod divisor;
pub mod engine;
pub mod error;
pub mod field;
pub mod linalg;
pub mod logforms;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod qcomb;
pub mod weights;

pub use error::{Error, Result};
pub use field::{Elem, Field};
