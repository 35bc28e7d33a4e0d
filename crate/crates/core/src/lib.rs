//! Finite left braces, their matched products, and the set-theoretic
//! solutions of the Yang–Baxter equation they induce.

pub mod brace;
pub mod cycle;
pub mod error;
pub mod filters;
pub mod hegedus;
pub mod ideals;
pub mod matched;
pub mod report;
pub mod residue;
pub mod spec;
pub mod ybe;
mod sweep;

pub use brace::{AdditiveShape, Element, FormulaBrace, LeftBrace, SharedBrace, TableBrace, TrivialBrace};
pub use error::{BraceError, Result};
pub use report::{Check, Mode, Report, VerifyConfig};
pub use residue::{Modulus, QuadraticForm, ResidueMatrix, ResidueVector};

/// Schema tag written into every exported file.
pub const FORMAT: &str = "bracekit/1";
