//! Exact max-plus tools for the polytope of ultrametrics nearest to a
//! dissimilarity map in the l-infinity norm.

pub mod cone;
pub mod datasets;
pub mod enumerate;
pub mod error;
pub mod extend;
pub mod hypergraph;
pub mod io;
pub mod metric;
pub mod nearest;
pub mod rational;
pub mod sliding;
pub mod trop;

pub use error::{Error, Result};
pub use rational::Rational;
