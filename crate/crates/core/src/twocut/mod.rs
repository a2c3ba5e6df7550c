//! Two-cut phase: regular expansions of the recurrence coefficients and the
//! merging of the two cuts.

pub mod jet;
pub mod merging;
pub mod regular;
pub mod symmetric;

pub use jet::Jet;
pub use merging::{build_f, find_merging, merging_model, FFunction, MergingPoint};
pub use regular::{expand_two_cut_regular, TwoCutExpansion};
pub use symmetric::{symmetric_scaled_series, SymmetricSeries, Table};
