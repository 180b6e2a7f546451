//! Geometry, foliation and star bundled for the canonical experiments.

use crate::charts::{build_foliation, build_star, FoliationChart, FoliationSettings, StarModel};
use crate::error::Result;
use crate::geometry::{SdSGeometry, SdSParams};

#[derive(Debug, Clone)]
pub struct Background {
    pub geom: SdSGeometry,
    pub chart: FoliationChart,
    pub star: StarModel,
}

impl Background {
    pub fn new(params: SdSParams, k: (f64, f64), a0: f64, settings: FoliationSettings) -> Result<Self> {
        let geom = SdSGeometry::new(params)?;
        let chart = build_foliation(&geom, k, settings)?;
        let star = build_star(&chart, a0)?;
        Ok(Self { geom, chart, star })
    }

    /// M = 1, Λ = 0.04, m = 0.5, K = [3, 6.5], A₀ = 1.
    pub fn canonical() -> Result<Self> {
        Self::new(SdSParams::new(1.0, 0.04, 0.5)?, (3.0, 6.5), 1.0, FoliationSettings::default())
    }
}
