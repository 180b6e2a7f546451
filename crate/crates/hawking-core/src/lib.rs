//! Numerics for massive Klein-Gordon fields outside a star collapsing to a
//! Schwarzschild-de Sitter black hole.

pub mod background;
pub mod charts;
pub mod evolution;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod parametrix;
pub mod spectral;

pub use error::{LabError, Result};
