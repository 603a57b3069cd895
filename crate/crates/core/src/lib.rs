//! Relatively hyperbolic groups with abelian parabolics: cusped spaces,
//! hyperbolicity constants, the boundary connectivity checker and
//! budgeted splitting searches.

pub mod bm;
pub mod cli;
pub mod cusped;
pub mod error;
pub mod exec;
pub mod graph;
pub mod horoball;
pub mod presentations;
pub mod splittings;

pub use error::{Error, Result};
