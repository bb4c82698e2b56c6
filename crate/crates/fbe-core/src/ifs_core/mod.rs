//! Map families, word composition, attractor clouds, the coding map and
//! Hausdorff distance.

pub mod attractor;
pub mod coding;
pub mod geometry;
pub mod hausdorff;
pub mod index;
pub mod maps;
pub mod system;

pub use attractor::{
    attractor, attractor_default, chaos_game, dedup_grid, AttractorCloud, AttractorError, CloudMeta, CloudSource,
};
pub use coding::{coding_map, verify_semiconjugacy, CodingError, SemiconjugacyReport};
pub use geometry::{Point, Region, Space};
pub use hausdorff::{hausdorff_brute_force, hausdorff_distance, HausdorffError};
pub use maps::{Affine, MapSpec, Moebius};
pub use system::{IfsError, IfsSystem, LipschitzBound};
