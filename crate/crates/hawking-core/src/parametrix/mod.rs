//! Reflection off the star near the crossing time: the toy model, the WKB parametrix and their
//! comparison with the wave equation.

pub mod profile;
pub mod reflection;
pub mod toy;
pub mod wkb;

pub use profile::ReflectionProfile;
pub use reflection::{compare_reflection, ReflectionReport, ReflectionSettings};
pub use toy::ToyModel;
pub use wkb::WkbApprox;
