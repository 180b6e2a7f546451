//! Mode evolution: fixed-domain, moving-wall and characteristic solvers.

pub mod asymp;
pub mod blueshift;
pub mod data;
pub mod decay;
pub mod free;
pub mod grid;
pub mod moving;
pub mod norms;
pub mod null;
pub mod probe;
pub mod radiation;
pub mod wedge;

pub use free::{evolve_free, FreeOptions, FreeSolver, TimeScheme};
pub use grid::{Grid1D, ModeState, Stretching};
pub use moving::{evolve_with_star, BoundaryPath, CoMovingSolver, FrozenWall, UniformWall};
pub use null::{NullMarcher, NullRow, RowSpec};
