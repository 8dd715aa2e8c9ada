//! Perverse sheaves on arithmetic curves, computed through gluing data.

pub mod error;
pub mod linalg;
pub mod module;
pub mod poly;
pub mod group;
pub mod rep;
pub mod local;
pub mod curve;
pub mod weights;
pub mod heart;
pub mod glued;
pub mod doc;
pub mod examples;

pub use error::{Error, Result};
