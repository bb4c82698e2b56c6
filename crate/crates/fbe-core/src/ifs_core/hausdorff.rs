//! Hausdorff distance between finite point sets.
//!
//! The directed part `sup_{a∈A} inf_{b∈B} d(a,b)` is computed exactly with a
//! 3-d tree over the embedded coordinates of `B`, in parallel over `A`. The
//! maximum is order-independent, so serial and parallel runs agree bit for
//! bit.

use rayon::prelude::*;
use thiserror::Error;

use super::geometry::{embedded_distance, Point, Space};
use super::index::KdTree;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HausdorffError {
    #[error("Hausdorff distance needs two nonempty sets")]
    EmptySet,
}

pub fn directed_hausdorff_embedded(a: &[[f64; 3]], b: &KdTree) -> f64 {
    a.par_iter()
        .map(|p| b.nearest(p).map_or(f64::INFINITY, |(_, d)| d))
        .reduce(|| 0.0, f64::max)
}

pub fn hausdorff_embedded(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64, HausdorffError> {
    if a.is_empty() || b.is_empty() {
        return Err(HausdorffError::EmptySet);
    }
    let ta = KdTree::new(a.to_vec());
    let tb = KdTree::new(b.to_vec());
    Ok(directed_hausdorff_embedded(a, &tb).max(directed_hausdorff_embedded(b, &ta)))
}

pub fn hausdorff_distance(space: Space, a: &[Point], b: &[Point]) -> Result<f64, HausdorffError> {
    let ea: Vec<[f64; 3]> = a.iter().map(|&p| space.embed(p)).collect();
    let eb: Vec<[f64; 3]> = b.iter().map(|&p| space.embed(p)).collect();
    hausdorff_embedded(&ea, &eb)
}

/// Quadratic reference implementation.
pub fn hausdorff_brute_force(space: Space, a: &[Point], b: &[Point]) -> Result<f64, HausdorffError> {
    if a.is_empty() || b.is_empty() {
        return Err(HausdorffError::EmptySet);
    }
    let ea: Vec<[f64; 3]> = a.iter().map(|&p| space.embed(p)).collect();
    let eb: Vec<[f64; 3]> = b.iter().map(|&p| space.embed(p)).collect();
    let directed = |x: &[[f64; 3]], y: &[[f64; 3]]| {
        x.iter()
            .map(|p| y.iter().map(|q| embedded_distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(&ea, &eb).max(directed(&eb, &ea)))
}
