//! Fractal continuations, fast-basin rasters and membership search.
//!
//! Membership is decided in the pre-image frame: `x` reaches `A` along the
//! positive word `w` when `x` lies within `tol` of `f_w⁻¹(cloud)`. The
//! search computes `y = f_w(x)`, gathers cloud points within
//! `Lip(f_w)·tol` of `y`, and pulls each candidate back through the inverse
//! word for the exact test. The same frame defines raster hits, so rasters
//! and membership agree cell for cell. For contractive words the
//! forward distance `d(f_w(x), cloud)` is then also at most `tol`.

pub mod raster;

use rayon::prelude::*;
use thiserror::Error;

use crate::ifs_core::{coding_map, AttractorCloud, CodingError, IfsSystem, Point, Region, Space};
use crate::symbolic::{self, inverse_word, negate_word, next_positive_word, Address, Digit, SymbolicError};

pub use raster::Raster;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasinError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("continuation word {0} is not all-positive")]
    NotPositive(String),
    #[error("depth {k} exceeds the {available} available digits")]
    Depth { k: usize, available: usize },
    #[error("margin {margin} is below the resolution floor {needed}")]
    Resolution { margin: f64, needed: f64 },
    #[error("tolerance {tol} is below the attractor tolerance {tau}")]
    Tolerance { tol: f64, tau: f64 },
    #[error("period must be nonempty")]
    EmptyPeriod,
}

/// `f_{−θ|k}(cloud)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationCloud {
    pub theta_prefix: Vec<Digit>,
    pub k: usize,
    pub points: Vec<Point>,
}

/// Image of the cloud under `f_{θ₁}⁻¹ ∘ … ∘ f_{θ_k}⁻¹`.
pub fn continuation_of_word(ifs: &IfsSystem, cloud: &AttractorCloud, theta: &[Digit]) -> ContinuationCloud {
    let w = negate_word(theta);
    let points = cloud.points().par_iter().map(|&p| ifs.apply_word(&w, p)).collect();
    ContinuationCloud {
        theta_prefix: theta.to_vec(),
        k: theta.len(),
        points,
    }
}

/// `B_{θ|k}` for a positive address `θ`.
pub fn finite_continuation(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    theta: &Address,
    k: usize,
) -> Result<ContinuationCloud, BasinError> {
    let class = symbolic::validate(theta, ifs.n_maps())?;
    if !class.positive {
        return Err(BasinError::NotPositive(theta.to_string()));
    }
    if let Some(len) = theta.len() {
        if k > len {
            return Err(BasinError::Depth { k, available: len });
        }
    }
    Ok(continuation_of_word(ifs, cloud, &theta.prefix(k)))
}

fn mark_points(raster: &mut Raster, space: Space, points: &[Point], depth: u32, tau: f64) {
    for &p in points {
        let t = if space == Space::Sphere {
            tau * space.planar_scale(p)
        } else {
            tau
        };
        raster.mark_with(p, depth, t);
    }
}

/// Fast-basin raster at hit tolerance `tau`: cells hit by `f_w⁻¹(cloud)` over
/// all positive words with `|w| ≤ depth`, built by prepending one inverse map
/// per level.
pub fn fast_basin_raster_with_tau(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    region: Region,
    nx: usize,
    ny: usize,
    depth: usize,
    tau: f64,
) -> Raster {
    let space = ifs.space();
    let mut base = Raster::new(space, region, nx, ny, tau);
    mark_points(&mut base, space, cloud.points(), 0, tau);
    if depth == 0 {
        return base;
    }
    let blank = base.blank();
    let branches: Vec<Raster> = ifs
        .positive_digits()
        .par_iter()
        .map(|&d| {
            let mut r = blank.clone();
            let pts: Vec<Point> = cloud.points().iter().map(|&p| ifs.apply_digit(d.neg(), p)).collect();
            descend(ifs, &mut r, &pts, 1, depth, tau);
            r
        })
        .collect();
    for b in &branches {
        base.merge(b);
    }
    base
}

fn descend(ifs: &IfsSystem, raster: &mut Raster, points: &[Point], k: usize, depth: usize, tau: f64) {
    mark_points(raster, ifs.space(), points, k as u32, tau);
    if k == depth {
        return;
    }
    for d in ifs.positive_digits() {
        let next: Vec<Point> = points.iter().map(|&p| ifs.apply_digit(d.neg(), p)).collect();
        descend(ifs, raster, &next, k + 1, depth, tau);
    }
}

/// Fast-basin raster at the attractor tolerance `τ_A`.
pub fn fast_basin_raster(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    region: Region,
    nx: usize,
    ny: usize,
    depth: usize,
) -> Raster {
    fast_basin_raster_with_tau(ifs, cloud, region, nx, ny, depth, cloud.tau())
}

/// All positive words of length `≤ depth`, length then lexicographic order.
pub fn positive_words(n_maps: usize, depth: usize) -> Vec<Vec<Digit>> {
    let mut out = vec![Vec::new()];
    for len in 1..=depth {
        let mut w = vec![1i32; len];
        loop {
            out.push(symbolic::word(&w));
            if !next_positive_word(&mut w, n_maps) {
                break;
            }
        }
    }
    out
}

/// The union of all finite continuations `B_θ`, `|θ| ≤ depth`, each computed
/// independently with [`continuation_of_word`].
pub fn continuation_union_raster(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    region: Region,
    nx: usize,
    ny: usize,
    depth: usize,
    tau: f64,
) -> Raster {
    let space = ifs.space();
    let blank = Raster::new(space, region, nx, ny, tau);
    positive_words(ifs.n_maps(), depth)
        .par_iter()
        .map(|theta| {
            let mut r = blank.clone();
            let c = continuation_of_word(ifs, cloud, theta);
            mark_points(&mut r, space, &c.points, theta.len() as u32, tau);
            r
        })
        .reduce(
            || blank.clone(),
            |mut a, b| {
                a.merge(&b);
                a
            },
        )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    Yes,
    NoUpToDepth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult {
    pub status: MembershipStatus,
    /// Shortest, then lexicographically least, positive word reaching `A`.
    pub witness: Option<Vec<Digit>>,
    pub depth_searched: usize,
    pub tolerance: f64,
}

impl MembershipResult {
    pub fn is_yes(&self) -> bool {
        self.status == MembershipStatus::Yes
    }
}

/// True when `x` lies within `tol` of `f_w⁻¹(cloud)`.
pub fn reaches_along(ifs: &IfsSystem, cloud: &AttractorCloud, x: Point, w: &[Digit], tol: f64) -> bool {
    let space = ifs.space();
    let y = ifs.apply_word(w, x);
    let lip = ifs.word_lipschitz(w);
    let radius = lip * tol * (1.0 + 1e-9) + 1e-12;
    let back = inverse_word(w);
    cloud
        .within(y, radius)
        .into_iter()
        .any(|i| space.distance(x, ifs.apply_word(&back, cloud.points()[i])) <= tol)
}

fn check_tolerance(cloud: &AttractorCloud, tol: f64) -> Result<(), BasinError> {
    if tol < cloud.tau() {
        Err(BasinError::Tolerance { tol, tau: cloud.tau() })
    } else {
        Ok(())
    }
}

/// Breadth-first search over positive words for the first one carrying `x`
/// into the attractor.
pub fn membership(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    x: Point,
    depth: usize,
    tol: f64,
) -> Result<MembershipResult, BasinError> {
    check_tolerance(cloud, tol)?;
    for len in 0..=depth {
        let mut w = vec![1i32; len];
        loop {
            let word = symbolic::word(&w);
            if reaches_along(ifs, cloud, x, &word, tol) {
                return Ok(MembershipResult {
                    status: MembershipStatus::Yes,
                    witness: Some(word),
                    depth_searched: len,
                    tolerance: tol,
                });
            }
            if !next_positive_word(&mut w, ifs.n_maps()) {
                break;
            }
        }
    }
    Ok(MembershipResult {
        status: MembershipStatus::NoUpToDepth,
        witness: None,
        depth_searched: depth,
        tolerance: tol,
    })
}

/// Membership restricted to `B_θ`: tests the words `θ_k ⋯ θ₁` for
/// `k = 0..=depth`, i.e. `x ∈ f_{−θ|k}(A)`.
pub fn membership_along(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    x: Point,
    theta: &Address,
    depth: usize,
    tol: f64,
) -> Result<MembershipResult, BasinError> {
    check_tolerance(cloud, tol)?;
    let class = symbolic::validate(theta, ifs.n_maps())?;
    if !class.positive {
        return Err(BasinError::NotPositive(theta.to_string()));
    }
    let prefix = theta.prefix(depth);
    for k in 0..=prefix.len() {
        let w: Vec<Digit> = prefix[..k].iter().rev().copied().collect();
        if reaches_along(ifs, cloud, x, &w, tol) {
            return Ok(MembershipResult {
                status: MembershipStatus::Yes,
                witness: Some(w),
                depth_searched: k,
                tolerance: tol,
            });
        }
    }
    Ok(MembershipResult {
        status: MembershipStatus::NoUpToDepth,
        witness: None,
        depth_searched: prefix.len(),
        tolerance: tol,
    })
}

/// Sample points of the ball of radius `margin` around `p` at spacing at most
/// `step`.
fn ball_samples(space: Space, p: Point, margin: f64, step: f64) -> Vec<Point> {
    let scale = space.planar_scale(p);
    let r = margin * scale;
    let h = step * scale;
    let m = (r / h).ceil().max(1.0) as i64;
    let s = r / m as f64;
    let mut out = Vec::new();
    if space == Space::R1 {
        for i in -m..=m {
            out.push(Point::on_line(p.x + i as f64 * s));
        }
        return out;
    }
    for i in -m..=m {
        for j in -m..=m {
            let q = Point::new(p.x + i as f64 * s, p.y + j as f64 * s);
            if space.distance(p, q) <= margin {
                out.push(q);
            }
        }
    }
    out
}

/// Interior test for the periodic word `θ = overline(period)`: the ball of
/// radius `margin` around `π(overline(reverse(period)))` must be covered by
/// the cloud at resolution `ε`.
pub fn is_reversible_periodic(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    period: &[Digit],
    margin: f64,
) -> Result<bool, BasinError> {
    if period.is_empty() {
        return Err(BasinError::EmptyPeriod);
    }
    if period.iter().any(|d| !d.is_positive()) {
        return Err(BasinError::NotPositive(Address::finite(period.to_vec()).to_string()));
    }
    let eps = cloud.resolution();
    if margin < 3.0 * eps {
        return Err(BasinError::Resolution {
            margin,
            needed: 3.0 * eps,
        });
    }
    let reversed: Vec<Digit> = period.iter().rev().copied().collect();
    let p = coding_map(ifs, &Address::periodic(Vec::new(), reversed), 1e-12)?;
    Ok(ball_samples(ifs.space(), p, margin, eps)
        .into_iter()
        .all(|q| cloud.distance_to(q) <= eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    /// Only the periodic sufficient condition is decided.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaReport {
    pub theta: Address,
    pub reached: usize,
    pub fraction: f64,
    pub results: Vec<MembershipResult>,
    /// Whether `θ` is reversible by the periodic interior test.
    pub reversible: Decision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinReport {
    pub samples: Vec<Point>,
    pub reached: usize,
    pub fraction: f64,
    pub results: Vec<MembershipResult>,
    pub theta: Option<ThetaReport>,
}

/// Runs [`membership`] on every sample and, for a supplied positive `θ`,
/// [`membership_along`] as well.
pub fn basin_inclusion_check(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    samples: &[Point],
    depth: usize,
    tol: f64,
    theta: Option<&Address>,
) -> Result<BasinReport, BasinError> {
    let results: Vec<MembershipResult> = samples
        .par_iter()
        .map(|&x| membership(ifs, cloud, x, depth, tol))
        .collect::<Result<_, _>>()?;
    let reached = results.iter().filter(|r| r.is_yes()).count();
    let fraction = reached as f64 / samples.len().max(1) as f64;
    let theta_report = match theta {
        None => None,
        Some(t) => {
            let rs: Vec<MembershipResult> = samples
                .par_iter()
                .map(|&x| membership_along(ifs, cloud, x, t, depth, tol))
                .collect::<Result<_, _>>()?;
            let reached = rs.iter().filter(|r| r.is_yes()).count();
            let reversible = if t.preperiod().is_empty() && !t.period().is_empty() {
                match is_reversible_periodic(ifs, cloud, t.period(), 4.0 * cloud.resolution()) {
                    Ok(true) => Decision::Yes,
                    Ok(false) => Decision::No,
                    Err(_) => Decision::Unknown,
                }
            } else {
                Decision::Unknown
            };
            Some(ThetaReport {
                theta: t.clone(),
                reached,
                fraction: reached as f64 / samples.len().max(1) as f64,
                results: rs,
                reversible,
            })
        }
    };
    Ok(BasinReport {
        samples: samples.to_vec(),
        reached,
        fraction,
        results,
        theta: theta_report,
    })
}
