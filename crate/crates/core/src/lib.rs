//! Large-N asymptotics of even Hermitian one-matrix models: phase
//! structure, recurrence-coefficient expansions, critical points and
//! their Painlevé hierarchy equations, with a finite-N oracle.

pub mod algebra;
pub mod diffpoly;
pub mod error;
pub mod onecut;
pub mod oracle;
pub mod painleve;
pub mod phase;
pub mod twocut;

pub use error::{Error, Result};
