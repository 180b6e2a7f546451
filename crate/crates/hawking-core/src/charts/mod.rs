//! Foliation, reflected-ray coordinate and collapsing-star charts.

pub mod foliation;
pub mod star;

pub use foliation::{build_foliation, FoliationChart, FoliationSettings};
pub use star::{build_star, StarModel};
