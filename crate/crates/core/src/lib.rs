//! Parameterized arithmetic circuits over exact rational arithmetic.

pub mod algebra;
pub mod circuit;
pub mod semantics;
pub mod transforms;
pub mod cost;
pub mod family;
pub mod lowerbound;
pub mod approx;
pub mod cli;
