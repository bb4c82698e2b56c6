//! The branched fractal manifold `𝕃` as quotient representatives.
//!
//! A point is stored as its integer part `θ` (a word over the negative
//! digits) and its fractional projection `x ∈ A`; the projection into the
//! ambient space is `f_θ(x)`. Membership in `A` is decided against the cloud
//! at `τ_A`, and distances in the band `(τ_A, 2τ_A)` are refused as
//! ambiguous.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ifs_core::coding::random_eventually_positive;
use crate::ifs_core::hausdorff::directed_hausdorff_embedded;
use crate::ifs_core::index::KdTree;
use crate::ifs_core::{coding_map, AttractorCloud, CodingError, IfsSystem, Point, Space};
use crate::symbolic::{self, inverse_word, next_positive_word, Address, Digit, SymbolicError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("{0} is not a fast-basin address (negatives, then an eventually periodic positive tail)")]
    NotFastBasin(String),
    #[error("integer part {0} has a non-negative digit")]
    NotNegative(String),
    #[error("sheet {0} must be an infinite negative word")]
    NotSheet(String),
    #[error("fractional part is {distance} from the attractor (tolerance {tau})")]
    OffAttractor { distance: f64, tau: f64 },
    #[error("fractional part is within {distance} of f_{index}(A), outside the leaf (tolerance {tau})")]
    LeafCondition { index: usize, distance: f64, tau: f64 },
    #[error("ambiguous membership at shift {k}: distance {distance} lies in ({tau}, {})", 2.0 * tau)]
    Ambiguous { k: usize, distance: f64, tau: f64 },
    #[error("sigma_{digit} maps integer part {theta} out of the fast-basin addresses")]
    LeavesFastBasin { digit: i32, theta: String },
    #[error("leaf {0} is empty")]
    EmptyLeaf(String),
}

fn word_text(w: &[Digit]) -> String {
    Address::finite(w.to_vec()).to_string()
}

fn check_negative(w: &[Digit]) -> Result<(), ManifoldError> {
    if w.iter().all(|d| d.is_negative()) {
        Ok(())
    } else {
        Err(ManifoldError::NotNegative(word_text(w)))
    }
}

/// A finite word over the negative digits naming a leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafId(Vec<Digit>);

impl LeafId {
    pub fn new(theta: Vec<Digit>) -> Result<Self, ManifoldError> {
        check_negative(&theta)?;
        Ok(LeafId(theta))
    }

    pub fn theta(&self) -> &[Digit] {
        &self.0
    }

    /// Index `i` of the last digit `−i`, if any.
    pub fn last_index(&self) -> Option<usize> {
        self.0.last().map(|d| d.index())
    }
}

impl fmt::Display for LeafId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", word_text(&self.0))
        }
    }
}

/// An infinite word over the negative digits naming a sheet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SheetId(Address);

impl SheetId {
    pub fn new(theta: Address) -> Result<Self, ManifoldError> {
        let negative = theta.preperiod().iter().chain(theta.period()).all(|d| d.is_negative());
        if theta.is_finite() || !negative {
            return Err(ManifoldError::NotSheet(theta.to_string()));
        }
        Ok(SheetId(theta))
    }

    pub fn theta(&self) -> &Address {
        &self.0
    }

    /// Whether the leaf lies on this sheet, i.e. is a prefix of it.
    pub fn contains(&self, leaf: &LeafId) -> bool {
        self.0.prefix(leaf.0.len()) == leaf.0
    }
}

/// Quotient representative `(θ, x)` with cached projection `f_θ(x)`.
#[derive(Debug, Clone)]
pub struct ManifoldPoint {
    theta: Vec<Digit>,
    x: Point,
    proj: Point,
}

impl ManifoldPoint {
    pub fn theta(&self) -> &[Digit] {
        &self.theta
    }

    pub fn x(&self) -> Point {
        self.x
    }

    pub fn proj(&self) -> Point {
        self.proj
    }

    pub fn leaf(&self) -> LeafId {
        LeafId(self.theta.clone())
    }
}

impl fmt::Display for ManifoldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?})", self.leaf(), (self.x.x, self.x.y))
    }
}

/// Longest common prefix of the integer parts.
pub fn common_prefix(a: &ManifoldPoint, b: &ManifoldPoint) -> Vec<Digit> {
    a.theta
        .iter()
        .zip(&b.theta)
        .take_while(|(p, q)| p == q)
        .map(|(p, _)| *p)
        .collect()
}

/// Words over the negative digits of length `≤ depth`, by length, then by
/// digit magnitude.
pub fn enumerate_leaves(n_maps: usize, depth: usize) -> Vec<LeafId> {
    let mut out = vec![LeafId(Vec::new())];
    if n_maps == 0 {
        return out;
    }
    for len in 1..=depth {
        let mut w = vec![1i32; len];
        loop {
            out.push(LeafId(w.iter().map(|&v| Digit::new(-v).unwrap()).collect()));
            if !next_positive_word(&mut w, n_maps) {
                break;
            }
        }
    }
    out
}

/// `d_𝕃` with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldDistance {
    pub d_l: f64,
    /// Ambient distance between the projections.
    pub d_x: f64,
    pub common_prefix: Vec<Digit>,
    /// `2·Lip(f_{[α,β]})·ε`.
    pub error_bound: f64,
    /// The minimizing point of `f_{[α,β]}(cloud)`.
    pub via: Point,
}

/// A point where at least two leaf closures of one panicle chain meet.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    /// Representative in the leaf nearest the root.
    pub point: ManifoldPoint,
    /// Number of distinct leaves whose closures contain the point.
    pub incidence: usize,
    pub leaves: Vec<LeafId>,
}

/// Leaves whose pulled-back projections coincide up to the threshold.
#[derive(Debug, Clone)]
pub struct LeafShape {
    /// `f_θ⁻¹(leaf_projection(θ))` for the first member.
    pub points: Vec<Point>,
    pub leaves: Vec<LeafId>,
}

/// An attractor cloud together with the clouds of `f_i(A)`.
pub struct Manifold<'a> {
    ifs: &'a IfsSystem,
    cloud: &'a AttractorCloud,
    images: Vec<KdTree>,
}

impl<'a> Manifold<'a> {
    pub fn new(ifs: &'a IfsSystem, cloud: &'a AttractorCloud) -> Self {
        let space = ifs.space();
        let images = ifs
            .positive_digits()
            .iter()
            .map(|&d| {
                KdTree::new(
                    cloud
                        .points()
                        .iter()
                        .map(|&p| space.embed(ifs.apply_digit(d, p)))
                        .collect(),
                )
            })
            .collect();
        Manifold { ifs, cloud, images }
    }

    pub fn ifs(&self) -> &IfsSystem {
        self.ifs
    }

    pub fn cloud(&self) -> &AttractorCloud {
        self.cloud
    }

    pub fn tau(&self) -> f64 {
        self.cloud.tau()
    }

    fn space(&self) -> Space {
        self.ifs.space()
    }

    /// Distance from `p` to `f_i(cloud)`, `i` 1-based.
    fn image_distance(&self, i: usize, p: Point) -> f64 {
        self.images[i - 1]
            .nearest(&self.space().embed(p))
            .map_or(f64::INFINITY, |(_, d)| d)
    }

    /// Validated point `(θ, x)`.
    pub fn point(&self, theta: Vec<Digit>, x: Point) -> Result<ManifoldPoint, ManifoldError> {
        check_negative(&theta)?;
        self.ifs.check_word(&theta).map_err(|_| SymbolicError::InvalidDigit {
            digit: theta.iter().map(|d| d.value()).min().unwrap_or(0),
            n_maps: self.ifs.n_maps(),
        })?;
        let tau = self.tau();
        let d = self.cloud.distance_to(x);
        if d > tau {
            return Err(ManifoldError::OffAttractor { distance: d, tau });
        }
        if let Some(last) = theta.last() {
            let i = last.index();
            let d = self.image_distance(i, x);
            if d <= tau {
                return Err(ManifoldError::LeafCondition {
                    index: i,
                    distance: d,
                    tau,
                });
            }
        }
        Ok(self.unchecked(theta, x))
    }

    fn unchecked(&self, theta: Vec<Digit>, x: Point) -> ManifoldPoint {
        let proj = self.ifs.apply_word(&theta, x);
        ManifoldPoint { theta, x, proj }
    }

    /// Least `k` with `π(S^k ι)` in the attractor; `θ = ι|k`,
    /// `x = π(S^k ι)`.
    pub fn canonicalize(&self, addr: &Address, tol: f64) -> Result<ManifoldPoint, ManifoldError> {
        let class = symbolic::validate(addr, self.ifs.n_maps())?;
        let k_max = addr.positive_tail_start();
        let k_max = match k_max {
            Some(k) if class.fast_basin => k,
            _ => return Err(ManifoldError::NotFastBasin(addr.to_string())),
        };
        let tau = self.tau();
        for k in 0..=k_max {
            let x = coding_map(self.ifs, &addr.tail(k), tol)?;
            let d = self.cloud.distance_to(x);
            if d <= tau {
                return self.point(addr.prefix(k), x);
            }
            if d < 2.0 * tau {
                return Err(ManifoldError::Ambiguous { k, distance: d, tau });
            }
        }
        // the positive tail always codes a point of A
        let x = coding_map(self.ifs, &addr.tail(k_max), tol)?;
        Err(ManifoldError::OffAttractor {
            distance: self.cloud.distance_to(x),
            tau,
        })
    }

    /// `count` canonical points from random fast-basin addresses with up to
    /// `max_theta` leading negative digits; ambiguous addresses are redrawn.
    pub fn random_points(&self, count: usize, max_theta: usize, seed: u64) -> Vec<ManifoldPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.ifs.n_maps() as i32;
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let len = rng.gen_range(0..=max_theta);
            let head: Vec<Digit> = (0..len).map(|_| Digit::new(-rng.gen_range(1..=n)).unwrap()).collect();
            let tail = loop {
                let t = random_eventually_positive(&mut rng, self.ifs.n_maps(), 4, 3);
                if t.preperiod().iter().all(|d| d.is_positive()) {
                    break t;
                }
            };
            let addr = tail.prepend(&head);
            if !addr.is_reduced() {
                continue;
            }
            if let Ok(p) = self.canonicalize(&addr, 1e-12) {
                out.push(p);
            }
        }
        out
    }

    /// `d_𝕃(a,b) = min_{x ∈ f_{[a,b]}(cloud)} d(π̂a, x) + d(x, π̂b)`.
    pub fn distance(&self, a: &ManifoldPoint, b: &ManifoldPoint) -> ManifoldDistance {
        let space = self.space();
        let prefix = common_prefix(a, b);
        let (d_l, via) = self
            .cloud
            .points()
            .iter()
            .map(|&p| {
                let x = self.ifs.apply_word(&prefix, p);
                (space.distance(a.proj, x) + space.distance(x, b.proj), x)
            })
            .fold(
                (f64::INFINITY, Point::INFINITY),
                |acc, v| {
                    if v.0 < acc.0 {
                        v
                    } else {
                        acc
                    }
                },
            );
        ManifoldDistance {
            d_l,
            d_x: space.distance(a.proj, b.proj),
            error_bound: 2.0 * self.ifs.word_lipschitz(&prefix) * self.cloud.resolution(),
            common_prefix: prefix,
            via,
        }
    }

    /// Batch [`Manifold::distance`] in parallel.
    pub fn distances(&self, pairs: &[(ManifoldPoint, ManifoldPoint)]) -> Vec<ManifoldDistance> {
        pairs.par_iter().map(|(a, b)| self.distance(a, b)).collect()
    }

    /// Same quotient point: equal integer parts and fractional parts within
    /// `τ_A`.
    pub fn same_point(&self, a: &ManifoldPoint, b: &ManifoldPoint) -> bool {
        a.theta == b.theta && self.space().distance(a.x, b.x) <= self.tau()
    }

    /// `σ̃_n`: the class of `σ_n` applied to any representative address.
    pub fn sigma_tilde(&self, n: Digit, a: &ManifoldPoint) -> Result<ManifoldPoint, ManifoldError> {
        self.ifs.check_word(&[n]).map_err(|_| SymbolicError::InvalidDigit {
            digit: n.value(),
            n_maps: self.ifs.n_maps(),
        })?;
        let i = n.index();
        if n.is_negative() {
            if a.theta.is_empty() {
                let y = self.ifs.apply_digit(n, a.x);
                let tau = self.tau();
                let d = self.cloud.distance_to(y);
                if d <= tau {
                    return self.point(Vec::new(), y);
                }
                if d < 2.0 * tau {
                    return Err(ManifoldError::Ambiguous { k: 0, distance: d, tau });
                }
                return self.point(vec![n], a.x);
            }
            let mut theta = vec![n];
            theta.extend_from_slice(&a.theta);
            return Ok(self.unchecked(theta, a.x));
        }
        match a.theta.first() {
            None => Ok(self.unchecked(Vec::new(), self.ifs.apply_digit(n, a.x))),
            Some(&d) if d == n.neg() => Ok(self.unchecked(a.theta[1..].to_vec(), a.x)),
            Some(_) => Err(ManifoldError::LeavesFastBasin {
                digit: i as i32,
                theta: word_text(&a.theta),
            }),
        }
    }

    /// `f_θ⁻¹` of the leaf projection: the cloud, or the cloud points farther
    /// than `τ_A` from `f_i(cloud)` where `−i` ends `θ`.
    pub fn leaf_shape(&self, leaf: &LeafId) -> Vec<Point> {
        match leaf.last_index() {
            None => self.cloud.points().to_vec(),
            Some(i) => self.shape_for(i),
        }
    }

    fn shape_for(&self, i: usize) -> Vec<Point> {
        let tau = self.tau();
        self.cloud
            .points()
            .par_iter()
            .copied()
            .filter(|&p| self.image_distance(i, p) > tau)
            .collect()
    }

    /// `π̂(l(θ)) = f_θ(A ∖ f_i(A))`, or `A` for the root leaf.
    pub fn leaf_projection(&self, leaf: &LeafId) -> Result<Vec<Point>, ManifoldError> {
        let pts: Vec<Point> = self
            .leaf_shape(leaf)
            .into_iter()
            .map(|p| self.ifs.apply_word(leaf.theta(), p))
            .collect();
        if pts.is_empty() {
            return Err(ManifoldError::EmptyLeaf(leaf.to_string()));
        }
        Ok(pts)
    }

    /// Cluster leaves of length `≤ depth` by the Hausdorff distance between
    /// their pulled-back projections `f_θ⁻¹(π̂(l(θ)))`.
    pub fn classify_leaves(&self, depth: usize, threshold: f64) -> Result<Vec<LeafShape>, ManifoldError> {
        let space = self.space();
        let n = self.ifs.n_maps();
        let mut base: Vec<Option<Vec<Point>>> = vec![None; n + 1];
        let mut shapes: Vec<(LeafShape, KdTree)> = Vec::new();
        for leaf in enumerate_leaves(n, depth) {
            let slot = leaf.last_index().unwrap_or(0);
            let shape = base[slot].get_or_insert_with(|| self.leaf_shape(&leaf));
            if shape.is_empty() {
                return Err(ManifoldError::EmptyLeaf(leaf.to_string()));
            }
            let back = inverse_word(leaf.theta());
            let pulled: Vec<Point> = shape
                .par_iter()
                .map(|&p| self.ifs.apply_word(&back, self.ifs.apply_word(leaf.theta(), p)))
                .collect();
            let embedded: Vec<[f64; 3]> = pulled.iter().map(|&p| space.embed(p)).collect();
            let tree = KdTree::new(embedded.clone());
            let found = shapes.iter_mut().find(|(s, t)| {
                directed_hausdorff_embedded(&embedded, t) <= threshold
                    && s.points
                        .par_iter()
                        .all(|&p| tree.nearest(&space.embed(p)).is_some_and(|(_, d)| d <= threshold))
            });
            match found {
                Some((s, _)) => s.leaves.push(leaf),
                None => shapes.push((
                    LeafShape {
                        points: pulled,
                        leaves: vec![leaf],
                    },
                    tree,
                )),
            }
        }
        Ok(shapes.into_iter().map(|(s, _)| s).collect())
    }

    /// Points `π(u·overline(p))` with `|u| ≤ 3` and `|p| ≤ 2`, used to
    /// refine detected contacts.
    fn snap_candidates(&self) -> Vec<Point> {
        let n = self.ifs.n_maps();
        let mut heads: Vec<Vec<i32>> = vec![Vec::new()];
        let mut periods: Vec<Vec<i32>> = Vec::new();
        for len in 1..=3 {
            let mut w = vec![1i32; len];
            loop {
                heads.push(w.clone());
                if len <= 2 {
                    periods.push(w.clone());
                }
                if !next_positive_word(&mut w, n) {
                    break;
                }
            }
        }
        let mut seen = HashSet::new();
        let addrs: Vec<Address> = heads
            .iter()
            .flat_map(|u| periods.iter().map(move |p| Address::from_ints(u, p)))
            .filter(|a| seen.insert(a.clone()))
            .collect();
        addrs
            .par_iter()
            .filter_map(|a| coding_map(self.ifs, a, 1e-13).ok())
            .collect()
    }

    /// Points where the closure of a leaf meets the closure of one of its
    /// ancestors within `tol`, for leaves of length `≤ depth`.
    ///
    /// Each pair is compared in the frame of the longer leaf `θ' = θψ`: the
    /// shape of `θ'` against `f_ψ⁻¹` of the shape of `θ`. Contacts are
    /// snapped to nearby points of `A` with short periodic codes, then
    /// grouped by owning leaf and projection.
    pub fn branch_points(&self, depth: usize, tol: f64) -> Vec<BranchPoint> {
        if depth == 0 {
            return Vec::new();
        }
        let space = self.space();
        let n = self.ifs.n_maps();
        let root = self.cloud.points().to_vec();
        let shapes: Vec<Vec<Point>> = (1..=n).map(|i| self.shape_for(i)).collect();
        let snaps = self.snap_candidates();
        let snap_tree = KdTree::new(snaps.iter().map(|&p| space.embed(p)).collect());
        let snap = |m: Point| -> Point {
            match snap_tree.nearest(&space.embed(m)) {
                Some((i, d)) if d <= tol => snaps[i],
                _ => m,
            }
        };

        let leaves: Vec<LeafId> = enumerate_leaves(n, depth).into_iter().skip(1).collect();
        // (owner, incoming, contact in the incoming frame)
        let contacts: Vec<(Vec<Digit>, Vec<Digit>, Point)> = leaves
            .par_iter()
            .flat_map_iter(|leaf| {
                let full = leaf.theta();
                let mine = &shapes[leaf.last_index().unwrap() - 1];
                let mut found = Vec::new();
                for j in 0..full.len() {
                    let (owner, psi) = full.split_at(j);
                    let base = match owner.last() {
                        None => &root,
                        Some(d) => &shapes[d.index() - 1],
                    };
                    let back = inverse_word(psi);
                    let other: Vec<Point> = base.iter().map(|&p| self.ifs.apply_word(&back, p)).collect();
                    let tree = KdTree::new(other.iter().map(|&p| space.embed(p)).collect());
                    let mut reps: Vec<Point> = Vec::new();
                    for &p in mine {
                        if let Some((k, d)) = tree.nearest(&space.embed(p)) {
                            if d <= tol {
                                let m = midpoint(space, p, other[k]);
                                let s = snap(m);
                                if !reps.iter().any(|&r| space.distance(r, s) <= tol) {
                                    reps.push(s);
                                }
                            }
                        }
                    }
                    for s in reps {
                        found.push((owner.to_vec(), full.to_vec(), s));
                    }
                }
                found
            })
            .collect();

        struct Group {
            owner: Vec<Digit>,
            x: Point,
            proj: Point,
            leaves: BTreeSet<Vec<Digit>>,
        }
        let mut groups: Vec<Group> = Vec::new();
        for (owner, incoming, s) in contacts {
            let proj = self.ifs.apply_word(&incoming, s);
            let psi = &incoming[owner.len()..];
            let x = self.ifs.apply_word(psi, s);
            match groups
                .iter_mut()
                .find(|g| g.owner == owner && space.distance(g.proj, proj) <= tol)
            {
                Some(g) => {
                    g.leaves.insert(incoming);
                }
                None => {
                    let mut leaves = BTreeSet::new();
                    leaves.insert(owner.clone());
                    leaves.insert(incoming);
                    groups.push(Group { owner, x, proj, leaves });
                }
            }
        }
        groups.sort_by(|a, b| {
            a.owner
                .len()
                .cmp(&b.owner.len())
                .then_with(|| cmp_word(&a.owner, &b.owner))
                .then_with(|| a.proj.x.total_cmp(&b.proj.x))
                .then_with(|| a.proj.y.total_cmp(&b.proj.y))
        });
        groups
            .into_iter()
            .map(|g| BranchPoint {
                point: ManifoldPoint {
                    theta: g.owner,
                    x: g.x,
                    proj: g.proj,
                },
                incidence: g.leaves.len(),
                leaves: g.leaves.into_iter().map(LeafId).collect(),
            })
            .collect()
    }
}

fn cmp_word(a: &[Digit], b: &[Digit]) -> std::cmp::Ordering {
    a.iter().map(|d| d.index()).cmp(b.iter().map(|d| d.index()))
}

fn midpoint(space: Space, p: Point, q: Point) -> Point {
    match space {
        Space::Sphere => space.unembed({
            let (a, b) = (space.embed(p), space.embed(q));
            let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0];
            let r = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            if r == 0.0 {
                a
            } else {
                [m[0] / r, m[1] / r, m[2] / r]
            }
        }),
        _ => Point::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs_core::attractor_default;
    use crate::symbolic::word;
    use crate::systems;

    fn interval() -> (IfsSystem, AttractorCloud) {
        let ifs = systems::interval();
        let cloud = attractor_default(&ifs, 2f64.powi(-10)).unwrap();
        (ifs, cloud)
    }

    #[test]
    fn enumerates_leaves_by_length_then_magnitude() {
        let names: Vec<String> = enumerate_leaves(2, 2).iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["∅", "-1", "-2", "-1.-1", "-1.-2", "-2.-1", "-2.-2"]);
        assert_eq!(enumerate_leaves(2, 0).len(), 1);
        assert_eq!(enumerate_leaves(3, 2).len(), 13);
    }

    #[test]
    fn common_prefix_examples() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        let a = m.point(word(&[-1]), Point::on_line(0.75)).unwrap();
        let b = m.point(word(&[-2, -1]), Point::on_line(0.625)).unwrap();
        assert!(common_prefix(&a, &b).is_empty());
        assert_eq!(common_prefix(&a, &a), word(&[-1]));
        let c = m.point(word(&[-1, -2]), Point::on_line(0.25)).unwrap();
        let d = m.point(word(&[-1, -1]), Point::on_line(0.75)).unwrap();
        assert_eq!(common_prefix(&c, &d), word(&[-1]));
    }

    #[test]
    fn canonicalize_examples() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        let p = m.canonicalize(&Address::from_ints(&[-1, -1, -1], &[2]), 1e-12).unwrap();
        assert_eq!(p.theta(), word(&[-1, -1, -1]).as_slice());
        assert!((p.x().x - 1.0).abs() < 1e-12);
        assert!((p.proj().x - 8.0).abs() < 1e-12);
        let q = m
            .canonicalize(&Address::from_ints(&[-1, -1, -2, 1], &[2]), 1e-12)
            .unwrap();
        assert!(q.theta().is_empty());
        assert!(q.x().x.abs() < 1e-12);
        let r = m.canonicalize(&Address::from_ints(&[], &[2]), 1e-12).unwrap();
        assert!(r.theta().is_empty());
        assert!((r.x().x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_validation() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        assert!(matches!(
            m.point(word(&[-1]), Point::on_line(0.25)),
            Err(ManifoldError::LeafCondition { index: 1, .. })
        ));
        assert!(matches!(
            m.point(Vec::new(), Point::on_line(1.5)),
            Err(ManifoldError::OffAttractor { .. })
        ));
        assert!(matches!(
            m.point(word(&[1]), Point::on_line(0.75)),
            Err(ManifoldError::NotNegative(_))
        ));
    }

    #[test]
    fn distance_across_a_branch() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        let a = m.point(word(&[-1]), Point::on_line(0.75)).unwrap();
        let b = m.point(word(&[-2, -1]), Point::on_line(0.625)).unwrap();
        assert_eq!(a.proj().x, 1.5);
        assert_eq!(b.proj().x, 1.5);
        let d = m.distance(&a, &b);
        assert!((d.d_l - 1.0).abs() <= d.error_bound);
        assert_eq!(d.d_x, 0.0);
        assert_eq!(m.distance(&a, &a).d_l, 0.0);
    }

    #[test]
    fn sigma_tilde_examples() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        let one = m.point(Vec::new(), Point::on_line(1.0)).unwrap();
        let up = m.sigma_tilde(Digit::new(-1).unwrap(), &one).unwrap();
        assert_eq!(up.theta(), word(&[-1]).as_slice());
        assert_eq!(up.proj().x, 2.0);
        let back = m.sigma_tilde(Digit::new(1).unwrap(), &up).unwrap();
        assert!(back.theta().is_empty());
        assert_eq!(back.x().x, 1.0);
        assert!(matches!(
            m.sigma_tilde(Digit::new(2).unwrap(), &up),
            Err(ManifoldError::LeavesFastBasin { .. })
        ));
        // f₁⁻¹(0.25) = 0.5 stays in A
        let q = m.point(Vec::new(), Point::on_line(0.25)).unwrap();
        let r = m.sigma_tilde(Digit::new(-1).unwrap(), &q).unwrap();
        assert!(r.theta().is_empty());
        assert_eq!(r.x().x, 0.5);
    }

    #[test]
    fn leaf_projection_examples() {
        let (ifs, cloud) = interval();
        let m = Manifold::new(&ifs, &cloud);
        let p = m.leaf_projection(&LeafId::new(word(&[-1])).unwrap()).unwrap();
        let lo = p.iter().map(|q| q.x).fold(f64::INFINITY, f64::min);
        let hi = p.iter().map(|q| q.x).fold(f64::NEG_INFINITY, f64::max);
        assert!(lo > 1.0 && lo < 1.0 + 10.0 * cloud.resolution());
        assert_eq!(hi, 2.0);
        assert_eq!(
            m.leaf_projection(&LeafId::new(Vec::new()).unwrap()).unwrap().len(),
            cloud.len()
        );
    }

    #[test]
    fn sheet_ids() {
        assert!(SheetId::new(Address::from_ints(&[-2], &[-1])).is_ok());
        assert!(SheetId::new(Address::from_ints(&[-2], &[])).is_err());
        let s = SheetId::new(Address::from_ints(&[], &[-1])).unwrap();
        assert!(s.contains(&LeafId::new(word(&[-1, -1])).unwrap()));
        assert!(!s.contains(&LeafId::new(word(&[-2])).unwrap()));
    }
}
