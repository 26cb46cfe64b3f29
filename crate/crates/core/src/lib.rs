//! Product two-action games: construction, enumeration of equilibrium
//! candidates, classification by increment maps, and an independent
//! support-enumeration Nash solver used as an oracle.

pub mod candidates;
pub mod combinatorics;
pub mod error;
pub mod game;
pub mod io;
pub mod solver;

pub use error::{Error, Result};
