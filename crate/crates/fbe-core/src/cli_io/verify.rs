//! The `verify` suite: property checks run against one system and its cloud.

use std::time::Instant;

use serde::Serialize;

use crate::basin::{continuation_of_word, continuation_union_raster, fast_basin_raster_with_tau, positive_words};
use crate::ifs_core::{verify_semiconjugacy, AttractorCloud, IfsSystem, Region, Space};
use crate::manifold::{Manifold, ManifoldError, ManifoldPoint};
use crate::symbolic::{self, Address, Digit, DyadicDistance, SymbolicSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The property being checked.
    pub tag: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    /// Seconds.
    pub runtime: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, tag: &str, residual: f64, tolerance: f64, runtime: f64) -> Self {
        Check {
            name: name.into(),
            tag: tag.into(),
            status: if residual <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
            residual,
            tolerance,
            runtime,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub system: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<22} residual={:.6e} tolerance={:.6e} time={:.3}s  {}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.runtime,
                c.tag
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random addresses for the semiconjugacy check.
    pub samples: usize,
    /// Word length for the raster comparison.
    pub raster_depth: usize,
    /// Leaf length for the shape count.
    pub leaf_depth: usize,
    /// Random triples for the metric checks.
    pub triples: usize,
    /// Longest integer part of random manifold points.
    pub max_theta: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            samples: 100,
            raster_depth: 3,
            leaf_depth: 3,
            triples: 300,
            max_theta: 3,
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

/// `2^{j+1}·d_H(Ẑ^{K+j}{ι}, 𝕀₊)` for `j = 1..=j_max` at truncation `depth`,
/// exact.
pub fn symbolic_attractor_rates(
    n_maps: usize,
    iota: &Address,
    depth: usize,
    j_max: usize,
) -> Result<Vec<(usize, DyadicDistance)>, symbolic::SymbolicError> {
    let k = iota.positive_tail_start().unwrap_or(0);
    let maps: Vec<Digit> = (1..=n_maps as i32).map(|v| Digit::new(v).unwrap()).collect();
    let start = SymbolicSet::from_addresses(std::slice::from_ref(iota), depth);
    (1..=j_max)
        .map(|j| {
            let s = symbolic::iterate_symbolic_ifs(&start, &maps, k + j)?;
            Ok((j, s.distance_to_positive(n_maps)))
        })
        .collect()
}

fn check_symbolic(n_maps: usize) -> Check {
    let iota = if n_maps >= 2 {
        Address::from_ints(&[-1, -1], &[n_maps as i32])
    } else {
        Address::from_ints(&[], &[1])
    };
    let (rates, t) = timed(|| symbolic_attractor_rates(n_maps, &iota, 16, 6));
    let residual = match rates {
        Ok(r) => r
            .iter()
            .map(|(j, d)| d.to_f64() * 2f64.powi(*j as i32 + 1))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    Check::new(
        "symbolic-attractor",
        "iterates of the symbolic IFS approach the positive words at rate 2^-(j+1)",
        residual,
        1.0,
        t,
    )
}

/// Region covering the depth-`depth` continuations, clipped to `[-50, 50]²`.
pub fn continuation_region(ifs: &IfsSystem, cloud: &AttractorCloud, depth: usize) -> Region {
    let mut r: Option<Region> = None;
    for w in positive_words(ifs.n_maps(), depth) {
        let c = continuation_of_word(ifs, cloud, &w);
        if let Some(b) = Region::bounding(&c.points) {
            r = Some(match r {
                None => b,
                Some(a) => Region::new(a.x0.min(b.x0), a.y0.min(b.y0), a.x1.max(b.x1), a.y1.max(b.y1)),
            });
        }
    }
    let r = r.unwrap_or(Region::new(-1.0, -1.0, 1.0, 1.0));
    let pad = 0.01 * (r.x1 - r.x0).max(r.y1 - r.y0).max(1e-6);
    let r = r.inflate(pad);
    let c = |v: f64| v.clamp(-50.0, 50.0);
    if ifs.space() == Space::R1 {
        Region::interval(c(r.x0), c(r.x1))
    } else {
        Region::new(c(r.x0), c(r.y0), c(r.x1), c(r.y1))
    }
}

fn check_rasters(ifs: &IfsSystem, cloud: &AttractorCloud, depth: usize) -> Check {
    let ((mismatch, total), t) = timed(|| {
        let region = continuation_region(ifs, cloud, depth);
        let (nx, ny) = if ifs.space() == Space::R1 {
            (4096, 1)
        } else {
            (256, 256)
        };
        let tau = cloud.tau();
        let a = fast_basin_raster_with_tau(ifs, cloud, region, nx, ny, depth, tau);
        let b = continuation_union_raster(ifs, cloud, region, nx, ny, depth, tau);
        let mismatch = a
            .cells()
            .iter()
            .zip(b.cells())
            .filter(|(x, y)| x.is_some() != y.is_some())
            .count();
        let bytes = (a.to_pgm() != b.to_pgm()) as usize;
        (mismatch + bytes, a.hit_count())
    });
    Check::new(
        "continuation-union",
        "the fast-basin raster equals the union of finite continuations",
        mismatch as f64,
        0.0,
        t,
    )
    .with_note(format!("{total} hit cells"))
}

fn check_semiconjugacy(ifs: &IfsSystem, opts: &VerifyOptions) -> Check {
    let (r, t) = timed(|| verify_semiconjugacy(ifs, opts.samples, 1e-9, opts.seed));
    match r {
        Ok(r) => Check::new(
            "semiconjugacy",
            "coding map intertwines the shifts with the maps",
            r.max_residual,
            r.tolerance,
            t,
        )
        .with_note(format!("{} address/digit pairs", r.checked)),
        Err(e) => Check::new(
            "semiconjugacy",
            "coding map intertwines the shifts with the maps",
            f64::INFINITY,
            1e-9,
            t,
        )
        .with_note(e.to_string()),
    }
}

/// Largest ratio of a metric violation to its `4·Lip·ε` slack over random
/// triples: triangle inequality, `d_𝕏 ≤ d_𝕃`, and same-sheet isometry.
pub fn metric_violations(m: &Manifold, points: &[ManifoldPoint]) -> (f64, f64, f64, usize) {
    let mut triangle: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    let mut same_sheet = 0;
    for t in points.chunks_exact(3) {
        let (a, b, c) = (&t[0], &t[1], &t[2]);
        let ab = m.distance(a, b);
        let bc = m.distance(b, c);
        let ac = m.distance(a, c);
        let slack = 2.0 * (ab.error_bound + bc.error_bound + ac.error_bound);
        triangle = triangle.max((ac.d_l - ab.d_l - bc.d_l) / slack);
        for d in [&ab, &bc, &ac] {
            contraction = contraction.max((d.d_x - d.d_l) / (2.0 * d.error_bound));
        }
        for (p, q, d) in [(a, b, &ab), (b, c, &bc), (a, c, &ac)] {
            let prefix = d.common_prefix.len();
            if prefix == p.theta().len() || prefix == q.theta().len() {
                same_sheet += 1;
                isometry = isometry.max((d.d_l - d.d_x).abs() / (2.0 * d.error_bound));
            }
        }
    }
    (triangle.max(0.0), contraction.max(0.0), isometry, same_sheet)
}

fn check_metric(m: &Manifold, opts: &VerifyOptions) -> Vec<Check> {
    let (points, t0) = timed(|| m.random_points(3 * opts.triples, opts.max_theta, opts.seed));
    let ((tri, con, iso, same), t) = timed(|| metric_violations(m, &points));
    let t = t + t0;
    let note = format!("{} triples", points.len() / 3);
    vec![
        Check::new(
            "manifold-triangle",
            "manifold distance satisfies the triangle inequality",
            tri,
            1.0,
            t,
        )
        .with_note(note.clone()),
        Check::new(
            "manifold-projection",
            "projection to the ambient space is 1-Lipschitz",
            con,
            1.0,
            0.0,
        )
        .with_note(note),
        Check::new("sheet-isometry", "projection is isometric on each sheet", iso, 1.0, 0.0)
            .with_note(format!("{same} same-sheet pairs")),
    ]
}

fn check_shift(m: &Manifold, opts: &VerifyOptions) -> Check {
    let ((residual, checked), t) = timed(|| {
        let ifs = m.ifs();
        let space = ifs.space();
        let mut worst: f64 = 0.0;
        let mut checked = 0;
        for a in m.random_points(opts.samples, opts.max_theta, opts.seed ^ 0x5eed) {
            for n in ifs.all_digits() {
                match m.sigma_tilde(n, &a) {
                    Ok(b) => {
                        let target = ifs.apply_digit(n, a.proj());
                        let scale = if space == Space::Sphere {
                            1.0
                        } else {
                            1.0 + target.x.hypot(target.y)
                        };
                        worst = worst.max(space.distance(b.proj(), target) / scale);
                        checked += 1;
                    }
                    Err(ManifoldError::LeavesFastBasin { .. } | ManifoldError::Ambiguous { .. }) => {}
                    Err(_) => worst = f64::INFINITY,
                }
            }
        }
        (worst, checked)
    });
    Check::new(
        "shift-commutation",
        "manifold shifts project onto the maps",
        residual,
        1e-9,
        t,
    )
    .with_note(format!("{checked} point/digit pairs"))
}

fn check_leaves(m: &Manifold, opts: &VerifyOptions) -> Check {
    let n = m.ifs().n_maps();
    let threshold = 3.0 * m.cloud().resolution();
    let (shapes, t) = timed(|| m.classify_leaves(opts.leaf_depth, threshold));
    match shapes {
        Ok(s) => Check::new(
            "leaf-shapes",
            "leaves fall into at most N+1 shapes",
            s.len() as f64,
            (n + 1) as f64,
            t,
        ),
        Err(e) => Check::new(
            "leaf-shapes",
            "leaves fall into at most N+1 shapes",
            f64::INFINITY,
            (n + 1) as f64,
            t,
        )
        .with_note(e.to_string()),
    }
}

fn check_invariance(ifs: &IfsSystem, cloud: &AttractorCloud) -> Check {
    let (r, t) = timed(|| cloud.invariance_residual(ifs));
    Check::new(
        "attractor-invariance",
        "the cloud is invariant under the Hutchinson operator",
        r,
        cloud.resolution(),
        t,
    )
    .with_note(format!("{} points, resolution {:.3e}", cloud.len(), cloud.resolution()))
}

/// Every check of the suite, in a fixed order.
pub fn run_verify(ifs: &IfsSystem, cloud: &AttractorCloud, name: &str, opts: &VerifyOptions) -> VerifyReport {
    let m = Manifold::new(ifs, cloud);
    let mut checks = vec![
        check_invariance(ifs, cloud),
        check_semiconjugacy(ifs, opts),
        check_symbolic(ifs.n_maps()),
        check_rasters(ifs, cloud, opts.raster_depth),
    ];
    checks.extend(check_metric(&m, opts));
    checks.push(check_shift(&m, opts));
    checks.push(check_leaves(&m, opts));
    VerifyReport {
        system: name.to_owned(),
        checks,
    }
}
