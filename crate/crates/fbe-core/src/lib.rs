//! Attractors, fast basins, fractal continuations and branched fractal
//! manifolds of iterated function systems.
//!
//! * [`symbolic`]: signed-digit addresses, shifts, `d_𝕀`, the symbolic IFS.
//! * [`ifs_core`]: affine and Möbius systems, attractor clouds, coding map.
//! * [`basin`]: continuations, fast-basin rasters, membership search.
//! * [`manifold`]: the branched fractal manifold and its metric.
//! * [`cli_io`]: spec files, cloud caches, the verify suite.
//! * [`systems`]: the standard example systems.

pub mod basin;
pub mod cli_io;
pub mod ifs_core;
pub mod manifold;
pub mod symbolic;
pub mod systems;
