//! Computads for strict omega-categories: globular sets, pasting diagrams,
//! free n-categories, slices of operads and pullback experiments.

pub mod computads;
pub mod error;
pub mod freecat;
pub mod globular;
pub mod limitlab;
pub mod operads;
pub mod pasting;
pub mod report;
mod text;

pub use error::{Error, Result};
