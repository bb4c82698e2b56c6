//! Finite ε-clouds approximating attractors.
//!
//! The resolution of a cloud `S` comes from the collage bound
//! `d_H(S, A) ≤ d_H(S, F(S)) / (1 − λ)`, evaluated on the returned points, so
//! it accounts for both truncation of the iteration and dedup drift. For
//! Möbius systems `λ` is the largest chordal derivative of the maps over the
//! cloud and is flagged as an estimate.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::geometry::{Point, Space};
use super::hausdorff::{directed_hausdorff_embedded, hausdorff_embedded};
use super::index::KdTree;
use super::maps::MapSpec;
use super::system::IfsSystem;

/// Smallest resolution ever recorded; keeps `ε > 0` for exact fixed points.
const MIN_RESOLUTION: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttractorError {
    #[error("seed set is empty")]
    EmptySeed,
    #[error("cell size must be positive and finite, got {0}")]
    BadCell(f64),
    #[error("no convergence after {depth} iterations (last residual {residual})")]
    NoConvergence { depth: usize, residual: f64 },
    #[error("chaos game needs n > burn_in (n = {n}, burn_in = {burn_in})")]
    BadOrbitLength { n: usize, burn_in: usize },
    #[error("a cloud needs at least one point")]
    EmptyCloud,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CloudSource {
    Hutchinson,
    ChaosGame { n: usize, burn_in: usize, seed: u64 },
    Cache,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudMeta {
    pub ifs_hash: String,
    /// Hutchinson iterations performed.
    pub depth: usize,
    /// Dedup cell size.
    pub cell: f64,
    /// Contraction factor used for the resolution.
    pub contraction: f64,
    pub contraction_estimated: bool,
    pub contractive: bool,
    pub source: CloudSource,
}

/// Finite point set with `d_H(points, A) ≤ resolution`.
#[derive(Debug, Clone)]
pub struct AttractorCloud {
    space: Space,
    points: Vec<Point>,
    tree: KdTree,
    resolution: f64,
    meta: CloudMeta,
}

impl AttractorCloud {
    pub fn from_parts(
        space: Space,
        points: Vec<Point>,
        resolution: f64,
        meta: CloudMeta,
    ) -> Result<Self, AttractorError> {
        if points.is_empty() {
            return Err(AttractorError::EmptyCloud);
        }
        let tree = KdTree::new(points.iter().map(|&p| space.embed(p)).collect());
        Ok(AttractorCloud {
            space,
            points,
            tree,
            resolution,
            meta,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// ε.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// τ_A = 3ε, the default "∈ A" tolerance.
    pub fn tau(&self) -> f64 {
        3.0 * self.resolution
    }

    pub fn meta(&self) -> &CloudMeta {
        &self.meta
    }

    pub fn tree(&self) -> &KdTree {
        &self.tree
    }

    pub fn embedded(&self) -> Vec<[f64; 3]> {
        (0..self.tree.len()).map(|i| *self.tree.point(i)).collect()
    }

    /// Index of and distance to the nearest cloud point.
    pub fn nearest(&self, p: Point) -> (usize, f64) {
        self.tree.nearest(&self.space.embed(p)).expect("nonempty cloud")
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.nearest(p).1
    }

    /// Indices of cloud points within `r` of `p`.
    pub fn within(&self, p: Point, r: f64) -> Vec<usize> {
        self.tree.within(&self.space.embed(p), r)
    }

    /// `d_H(F(cloud), cloud)`.
    pub fn invariance_residual(&self, ifs: &IfsSystem) -> f64 {
        let image = hutchinson_par(ifs, &self.points);
        let e: Vec<[f64; 3]> = image.iter().map(|&p| self.space.embed(p)).collect();
        let t = KdTree::new(e.clone());
        directed_hausdorff_embedded(&e, &self.tree).max(directed_hausdorff_embedded(&self.embedded(), &t))
    }
}

fn hutchinson_par(ifs: &IfsSystem, points: &[Point]) -> Vec<Point> {
    let mut out = Vec::with_capacity(points.len() * ifs.n_maps());
    for m in ifs.maps() {
        let img: Vec<Point> = points.par_iter().map(|&p| m.apply(p)).collect();
        out.extend(img);
    }
    out
}

/// Keep the first point of every grid cell of side `cell`, with cells centred
/// on multiples of `cell` in embedded coordinates.
pub fn dedup_grid(space: Space, points: &[Point], cell: f64) -> Vec<Point> {
    let mut seen = HashSet::with_capacity(points.len());
    let mut out = Vec::new();
    for &p in points {
        let e = space.embed(p);
        let key = (
            (e[0] / cell).round() as i64,
            (e[1] / cell).round() as i64,
            (e[2] / cell).round() as i64,
        );
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// `(λ, estimated)` for the resolution bound.
fn contraction_for(ifs: &IfsSystem, points: &[Point]) -> (f64, bool) {
    if let Some(l) = ifs.contractivity() {
        return (l, false);
    }
    if let Some(l) = ifs.affine_contraction() {
        return (l, false);
    }
    let l = ifs
        .maps()
        .iter()
        .map(|m| match m {
            MapSpec::Moebius(mb) => points
                .par_iter()
                .map(|&p| mb.chordal_derivative(p))
                .reduce(|| 0.0, f64::max),
            MapSpec::Affine(a) => a.operator_norm(),
        })
        .fold(0.0, f64::max);
    (l, true)
}

fn finish(
    ifs: &IfsSystem,
    points: Vec<Point>,
    depth: usize,
    cell: f64,
    source: CloudSource,
) -> Result<AttractorCloud, AttractorError> {
    let space = ifs.space();
    let (lambda, estimated) = contraction_for(ifs, &points);
    let contractive = lambda < 1.0;
    let meta = CloudMeta {
        ifs_hash: ifs.hash(),
        depth,
        cell,
        contraction: lambda,
        contraction_estimated: estimated,
        contractive,
        source,
    };
    let mut cloud = AttractorCloud::from_parts(space, points, 0.0, meta)?;
    let collage = cloud.invariance_residual(ifs);
    let eps = if contractive { collage / (1.0 - lambda) } else { collage };
    cloud.resolution = eps.max(MIN_RESOLUTION);
    Ok(cloud)
}

/// Hutchinson iteration from `seed` with grid dedup at `cell`, stopping when
/// successive clouds are within `cell` in Hausdorff distance.
pub fn attractor(ifs: &IfsSystem, seed: &[Point], depth: usize, cell: f64) -> Result<AttractorCloud, AttractorError> {
    if seed.is_empty() {
        return Err(AttractorError::EmptySeed);
    }
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(AttractorError::BadCell(cell));
    }
    let space = ifs.space();
    let mut cur = dedup_grid(space, seed, cell);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < depth {
        let next = dedup_grid(space, &hutchinson_par(ifs, &cur), cell);
        let ea: Vec<[f64; 3]> = cur.iter().map(|&p| space.embed(p)).collect();
        let eb: Vec<[f64; 3]> = next.iter().map(|&p| space.embed(p)).collect();
        residual = hausdorff_embedded(&ea, &eb).map_err(|_| AttractorError::EmptySeed)?;
        cur = next;
        iterations += 1;
        if residual <= cell {
            break;
        }
    }
    let cloud = finish(ifs, cur, iterations, cell, CloudSource::Hutchinson)?;
    if residual > cell && !cloud.meta.contractive {
        return Err(AttractorError::NoConvergence { depth, residual });
    }
    Ok(cloud)
}

/// [`attractor`] seeded with the maps' attracting fixed points.
pub fn attractor_default(ifs: &IfsSystem, cell: f64) -> Result<AttractorCloud, AttractorError> {
    attractor(ifs, &ifs.default_seed(), 10_000, cell)
}

/// Random orbit from the first map's fixed point, uniform map choice drawn
/// from ChaCha8 seeded with `rng_seed`; the first `burn_in` points are
/// dropped.
pub fn chaos_game(ifs: &IfsSystem, n: usize, burn_in: usize, rng_seed: u64) -> Result<AttractorCloud, AttractorError> {
    if n <= burn_in {
        return Err(AttractorError::BadOrbitLength { n, burn_in });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut x = ifs.fixed_points()[0];
    let mut points = Vec::with_capacity(n - burn_in);
    for k in 0..n {
        let i = rng.gen_range(0..ifs.n_maps());
        x = ifs.maps()[i].apply(x);
        if k >= burn_in {
            points.push(x);
        }
    }
    finish(
        ifs,
        points,
        0,
        0.0,
        CloudSource::ChaosGame {
            n,
            burn_in,
            seed: rng_seed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_map_collapses_to_its_fixed_point() {
        let ifs = IfsSystem::line(&[(0.5, 0.0)]).unwrap();
        let cloud = attractor(&ifs, &[Point::on_line(1.0)], 200, 1e-6).unwrap();
        assert!(cloud.points().iter().all(|p| p.x.abs() <= 2e-6));
        assert!(cloud.resolution() <= 1e-5);
    }

    #[test]
    fn dedup_keeps_first_in_cell() {
        let pts = [
            Point::on_line(0.0),
            Point::on_line(0.3),
            Point::on_line(0.6),
            Point::on_line(1.0),
        ];
        let out = dedup_grid(Space::R1, &pts, 1.0);
        assert_eq!(out, vec![Point::on_line(0.0), Point::on_line(0.6)]);
    }

    #[test]
    fn errors() {
        let ifs = IfsSystem::line(&[(0.5, 0.0)]).unwrap();
        assert_eq!(attractor(&ifs, &[], 5, 0.1).unwrap_err(), AttractorError::EmptySeed);
        assert_eq!(
            attractor(&ifs, &[Point::on_line(0.0)], 5, 0.0).unwrap_err(),
            AttractorError::BadCell(0.0)
        );
        assert!(matches!(
            chaos_game(&ifs, 10, 10, 1),
            Err(AttractorError::BadOrbitLength { .. })
        ));
        let expanding = IfsSystem::line(&[(2.0, 0.0), (2.0, 1.0)]).unwrap();
        assert!(matches!(
            attractor(&expanding, &[Point::on_line(0.5)], 4, 1e-3),
            Err(AttractorError::NoConvergence { .. })
        ));
    }
}
