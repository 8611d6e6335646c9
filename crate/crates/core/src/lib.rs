//! Exact computations for the four-dimensional Sklyanin algebra and its
//! cocycle twist by the Klein four-group.

pub mod cli;
pub mod geometry;
pub mod linalg;
pub mod ncalg;
pub mod pointscheme;
pub mod repmodules;
pub mod scalars;
pub mod sklyanin;
pub mod twist;
