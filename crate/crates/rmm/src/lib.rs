//! Finite-volume rezoning moving-mesh solver on structured quadrilateral
//! meshes with evolved geometric moments.

pub mod bench;
pub mod boundary;
pub mod driver;
pub mod equations;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod grid;
pub mod reconstruction;
pub mod remap;
pub mod time;

pub use error::{Error, Location, Result};
