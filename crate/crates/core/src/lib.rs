//! Exact tree coefficients of the Magnus expansion, their generating-function
//! asymptotics, closed-form truncation bounds, and a small-matrix numerical
//! harness that checks the bounds against computed Magnus terms.

pub mod bounds;
pub mod cli;
pub mod coefficients;
pub mod exact;
pub mod numeric;
pub mod series;
pub mod trees;
