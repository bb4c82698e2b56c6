//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The exit status is nonzero when the set
//! of failing criteria differs from `KNOWN_FAILURES`, so an unexpected pass
//! is reported as loudly as an unexpected failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use fbe_core::basin::{
    continuation_of_word, continuation_union_raster, fast_basin_raster_with_tau, membership, membership_along,
    positive_words, MembershipStatus,
};
use fbe_core::cli_io::verify::{continuation_region, metric_violations, symbolic_attractor_rates};
use fbe_core::ifs_core::{
    attractor, attractor_default, coding_map, verify_semiconjugacy, AttractorCloud, IfsSystem, Point, Region,
};
use fbe_core::manifold::Manifold;
use fbe_core::symbolic::{word, Address};
use fbe_core::systems;

/// Branch-point projections of the interval system form every integer in
/// the searched range, not the two geometric sequences the criterion pins.
const KNOWN_FAILURES: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cloud(ifs: &IfsSystem, cell: f64) -> AttractorCloud {
    attractor_default(ifs, cell).expect("attractor")
}

/// Exact test of whether the closed interval `[a, b]` meets `C + shift`,
/// descending through the ternary construction.
fn meets_cantor(a: f64, b: f64, shift: f64) -> bool {
    fn go(a: f64, b: f64, lo: f64, hi: f64, level: u32) -> bool {
        if b < lo || a > hi {
            return false;
        }
        if (a <= lo && hi <= b) || level == 60 {
            return true;
        }
        let third = (hi - lo) / 3.0;
        go(a, b, lo, lo + third, level + 1) || go(a, b, hi - third, hi, level + 1)
    }
    go(a - shift, b - shift, 0.0, 1.0, 0)
}

/// Translates `t` with `f_w⁻¹(C) = ⋃ (C + t)` for every positive word of
/// length `≤ depth`, using `3C = C ∪ (C + 2)`.
fn cantor_translates(depth: usize) -> BTreeSet<i64> {
    let mut all = BTreeSet::from([0i64]);
    let mut level = BTreeSet::from([0i64]);
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for &t in &level {
            for c in [0, 2] {
                for d in [0, 2] {
                    next.insert(3 * t + d - c);
                }
            }
        }
        all.extend(&next);
        level = next;
    }
    all
}

fn cantor_fast_basin() -> Outcome {
    let ifs = systems::cantor();
    // twelve undeduplicated levels: every level-12 endpoint, including 1/3
    let cl = attractor(&ifs, &ifs.default_seed(), 12, 1e-12).expect("attractor");
    let tau = cl.tau();
    let n = 4096;
    let raster = fast_basin_raster_with_tau(&ifs, &cl, Region::interval(-3.0, 3.0), n, 1, 2, tau);
    let translates = cantor_translates(2);
    let mut mismatched = 0;
    for ix in 0..n {
        let (a, b) = raster.x_bounds(ix);
        let oracle = translates.iter().any(|&t| meets_cantor(a - tau, b + tau, t as f64));
        if oracle != raster.get(ix, 0).is_some() {
            mismatched += 1;
        }
    }
    outcome(
        mismatched == 0,
        format!("{mismatched} mismatched cells of {n}, {} hit", raster.hit_count()),
    )
}

fn basin_inclusion() -> Outcome {
    let ifs = systems::interval();
    let cl = cloud(&ifs, 2f64.powi(-12));
    let theta = Address::from_ints(&[], &[1, 2]);
    // f_w⁻¹ spreads cloud gaps by 2^|w|; the samples need |w| ≤ 4
    let tol = 2f64.powi(-8);
    let mut reached = 0;
    let samples = 200;
    for i in 0..samples {
        let x = -4.0 + 8.0 * (i as f64 + 0.5) / samples as f64;
        let r = membership_along(&ifs, &cl, Point::on_line(x), &theta, 12, tol).expect("membership");
        reached += r.is_yes() as usize;
    }
    let cantor = systems::cantor();
    let ccl = cloud(&cantor, 1e-6);
    let ctol = 3f64.powi(-6);
    let half = membership(&cantor, &ccl, Point::on_line(0.5), 8, ctol).expect("membership");
    outcome(
        reached == samples && half.status == MembershipStatus::NoUpToDepth,
        format!(
            "interval {reached}/{samples} reach A along (1.2)*; Cantor 1/2 {:?} at depth {}",
            half.status, half.depth_searched
        ),
    )
}

fn coding_map_examples() -> Outcome {
    let ifs = systems::interval();
    let a = coding_map(&ifs, &Address::from_ints(&[], &[2]), 1e-12).expect("pi");
    let b = coding_map(&ifs, &Address::from_ints(&[-1], &[2]), 1e-12).expect("pi");
    let cl = cloud(&ifs, 2f64.powi(-10));
    let m = Manifold::new(&ifs, &cl);
    let p = m
        .canonicalize(&Address::from_ints(&[-1, -1, -1], &[2]), 1e-12)
        .expect("canonicalize");
    let q = m
        .canonicalize(&Address::from_ints(&[-1, -1, -2, 1], &[2]), 1e-12)
        .expect("canonicalize");
    let pass = (a.x - 1.0).abs() <= 1e-9
        && (b.x - 2.0).abs() <= 1e-9
        && p.theta() == word(&[-1, -1, -1]).as_slice()
        && q.theta().is_empty();
    outcome(
        pass,
        format!(
            "pi = {:.3e} and {:.3e}; integer parts {:?} and {:?}",
            a.x,
            b.x,
            p.leaf().to_string(),
            q.leaf().to_string()
        ),
    )
}

fn semiconjugacy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, ifs) in [
        ("interval", systems::interval()),
        ("cantor", systems::cantor()),
        ("sierpinski", systems::sierpinski()),
    ] {
        let r = verify_semiconjugacy(&ifs, 100, 1e-9, 7).expect("semiconjugacy");
        worst = worst.max(r.max_residual);
        parts.push(format!("{name} {:.1e} over {}", r.max_residual, r.checked));
    }
    outcome(worst <= 1e-9, parts.join(", "))
}

fn symbolic_attractor() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    for (n, iota) in [
        (2, Address::from_ints(&[-1, -1], &[2])),
        (2, Address::from_ints(&[-2, 1, 1], &[1, 2])),
        (3, Address::from_ints(&[-3, -2], &[3, 1])),
    ] {
        let rates = symbolic_attractor_rates(n, &iota, 16, 6).expect("rates");
        for (j, d) in rates {
            let bound = 2f64.powi(-(j as i32) - 1);
            pass &= d.to_f64() <= bound;
            worst = worst.max(d.to_f64() / bound);
        }
    }
    outcome(pass, format!("largest d_H / 2^-(j+1) = {worst}"))
}

fn manifold_metric() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, ifs) in [("interval", systems::interval()), ("cantor", systems::cantor())] {
        let cl = cloud(&ifs, 2f64.powi(-10));
        let m = Manifold::new(&ifs, &cl);
        let points = m.random_points(3000, 3, 11);
        let (tri, con, iso, same) = metric_violations(&m, &points);
        pass &= tri <= 1.0 && con <= 1.0 && iso <= 1.0 && same > 0;
        parts.push(format!(
            "{name}: triangle {tri:.2e}, projection {con:.2e}, isometry {iso:.2e} ({same} same-sheet)"
        ));
    }
    let ifs = systems::interval();
    let cl = cloud(&ifs, 2f64.powi(-10));
    let m = Manifold::new(&ifs, &cl);
    let a = m.point(word(&[-1]), Point::on_line(0.75)).expect("point");
    let b = m.point(word(&[-2, -1]), Point::on_line(0.625)).expect("point");
    let d = m.distance(&a, &b);
    pass &= (d.d_l - 1.0).abs() <= 1e-3 && d.d_x == 0.0;
    parts.push(format!("branch pair d_L = {:.6}, d_X = {}", d.d_l, d.d_x));
    outcome(pass, parts.join("; "))
}

/// Hausdorff distance between a finite set on the line and `[lo, hi]`.
fn hausdorff_to_interval(points: &[Point], lo: f64, hi: f64) -> f64 {
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    let Some((&first, &last)) = xs.first().zip(xs.last()) else {
        return f64::INFINITY;
    };
    let outside = xs.iter().map(|&x| (lo - x).max(x - hi).max(0.0)).fold(0.0, f64::max);
    let gaps = xs.windows(2).map(|w| (w[1] - w[0]) / 2.0).fold(0.0, f64::max);
    outside.max(gaps).max(first - lo).max(hi - last)
}

fn leaf_classification() -> Outcome {
    let ifs = systems::interval();
    let cl = cloud(&ifs, 2f64.powi(-10));
    let m = Manifold::new(&ifs, &cl);
    let eps = cl.resolution();
    let shapes = m.classify_leaves(4, 3.0 * eps).expect("classify");
    let ideal = [(0.0, 1.0), (0.5, 1.0), (0.0, 0.5)];
    let slack = 2.0 * cl.tau();
    let matched = ideal
        .iter()
        .filter(|(lo, hi)| {
            shapes
                .iter()
                .any(|s| hausdorff_to_interval(&s.points, *lo, *hi) <= slack)
        })
        .count();
    let cantor = systems::cantor();
    let ccl = cloud(&cantor, 2f64.powi(-10));
    let cm = Manifold::new(&cantor, &ccl);
    let cshapes = cm.classify_leaves(4, 3.0 * ccl.resolution()).expect("classify");
    outcome(
        shapes.len() == 3 && matched == 3 && cshapes.len() == 3,
        format!(
            "interval {} shapes ({matched} matched [0,1], (1/2,1], [0,1/2)); Cantor {} shapes",
            shapes.len(),
            cshapes.len()
        ),
    )
}

fn branch_points() -> Outcome {
    let ifs = systems::interval();
    let cl = cloud(&ifs, 2f64.powi(-10));
    let m = Manifold::new(&ifs, &cl);
    let found: Vec<f64> = {
        let mut v: Vec<f64> = m
            .branch_points(4, 2.0 * cl.tau())
            .iter()
            .map(|b| b.point.proj().x)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-6);
        v
    };
    let expected = [-7.0, -3.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0];
    let same = found.len() == expected.len() && found.iter().zip(expected).all(|(a, b)| (a - b).abs() <= 1e-6);
    let cantor = systems::cantor();
    let ccl = cloud(&cantor, 2f64.powi(-10));
    let cm = Manifold::new(&cantor, &ccl);
    let cantor_count = cm.branch_points(4, 2.0 * ccl.tau()).len();
    let shown: Vec<String> = found
        .iter()
        .map(|x| format!("{}", (x * 1e3).round() / 1e3 + 0.0))
        .collect();
    outcome(
        same && cantor_count == 0,
        format!(
            "interval projections {{{}}}; Cantor {cantor_count} branch points",
            shown.join(", ")
        ),
    )
}

/// Algebraic least-squares circle through planar points: `(center, radius)`.
fn fit_circle(points: &[Point]) -> (Point, f64) {
    // minimize Σ (x² + y² + D x + E y + F)²
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for p in points {
        let row = [p.x, p.y, 1.0];
        let rhs = -(p.x * p.x + p.y * p.y);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            v[i] += row[i] * rhs;
        }
    }
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(m);
    let solve = |k: usize| {
        let mut a = m;
        for i in 0..3 {
            a[i][k] = v[i];
        }
        det3(a) / d
    };
    let (dd, ee, ff) = (solve(0), solve(1), solve(2));
    let center = Point::new(-dd / 2.0, -ee / 2.0);
    let radius = (center.x * center.x + center.y * center.y - ff).sqrt();
    (center, radius)
}

fn moebius_arc() -> Outcome {
    let ifs = systems::moebius_arc();
    let cl = cloud(&ifs, 1e-4);
    let pts: Vec<Point> = cl.points().iter().copied().filter(|p| !p.is_infinite()).collect();
    let (c, r) = fit_circle(&pts);
    let center_err = ((c.x).powi(2) + (c.y - 1.5).powi(2)).sqrt();
    let radius_err = (r - 0.5).abs();
    let mut off: f64 = 0.0;
    for w in positive_words(ifs.n_maps(), 3) {
        for p in continuation_of_word(&ifs, &cl, &w).points {
            if !p.is_infinite() {
                off = off.max((((p.x - c.x).powi(2) + (p.y - c.y).powi(2)).sqrt() - r).abs());
            }
        }
    }
    outcome(
        center_err <= 1e-2 && radius_err <= 1e-2 && off <= 1e-2,
        format!(
            "center ({:.6}, {:.6}), radius {r:.6}; depth-3 points within {off:.2e} of the circle",
            c.x, c.y
        ),
    )
}

fn projective() -> Outcome {
    let ifs = systems::projective();
    let dual = ifs.dual();
    let dcl = cloud(&dual, 1e-4);
    let finite: Vec<f64> = dcl.points().iter().filter(|p| !p.is_infinite()).map(|p| p.x).collect();
    let inside = finite.iter().filter(|&&x| x > -4.4 && x < 5.4).count();
    let near = |t: f64| finite.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
    let (nl, nr) = (near(-4.5), near(5.5));
    let cl = cloud(&ifs, 1e-4);
    let xs: Vec<f64> = cl.points().iter().map(|p| p.x).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eps = cl.resolution();
    let gap = {
        let mut s = xs.clone();
        s.sort_by(f64::total_cmp);
        s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    };
    let pass =
        inside == 0 && nl <= 1e-2 && nr <= 1e-2 && lo.abs() <= eps && (hi - 1.0).abs() <= eps && gap <= 2.0 * eps;
    outcome(
        pass,
        format!(
            "dual: {inside} points in (-4.4, 5.4), nearest to -4.5 and 5.5 at {nl:.1e} and {nr:.1e}; \
             primary spans [{lo:.2e}, {hi:.6}] with largest gap {gap:.1e}"
        ),
    )
}

fn raster_equivalence() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, ifs, cell) in [
        ("interval", systems::interval(), 2f64.powi(-10)),
        ("cantor", systems::cantor(), 2f64.powi(-10)),
        ("sierpinski", systems::sierpinski(), 2f64.powi(-8)),
    ] {
        let cl = cloud(&ifs, cell);
        let region = continuation_region(&ifs, &cl, 3);
        let (nx, ny) = if ifs.space().dim() == 1 { (4096, 1) } else { (256, 256) };
        let a = fast_basin_raster_with_tau(&ifs, &cl, region, nx, ny, 3, cl.tau());
        let b = continuation_union_raster(&ifs, &cl, region, nx, ny, 3, cl.tau());
        let same = a.to_pgm() == b.to_pgm();
        pass &= same && a.hit_count() > 0;
        parts.push(format!(
            "{name} {} ({} hit)",
            if same { "identical" } else { "differs" },
            a.hit_count()
        ));
    }
    outcome(pass, parts.join(", "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("cantor fast basin matches the ternary oracle", cantor_fast_basin),
        ("basin inclusion along a reversible word", basin_inclusion),
        ("coding map and integer parts", coding_map_examples),
        ("coding map semiconjugacy", semiconjugacy),
        ("symbolic attractor convergence rate", symbolic_attractor),
        ("manifold metric axioms and branch pair", manifold_metric),
        ("leaf shape classification", leaf_classification),
        ("branch point projections", branch_points),
        ("moebius arc lies on its circle", moebius_arc),
        ("projective dual repeller", projective),
        ("fast basin equals the union of continuations", raster_equivalence),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i as u32 + 1;
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed.push(id);
        }
        let known = KNOWN_FAILURES.contains(&id) && !o.pass;
        println!(
            "{} {id:>2} {name} [{:.2}s] {}{}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail,
            if known { " (known failure)" } else { "" }
        );
    }
    if failed == KNOWN_FAILURES {
        println!("{} passed, {} known failures", 11 - failed.len(), failed.len());
        ExitCode::SUCCESS
    } else {
        println!("failing criteria {failed:?}, expected exactly {KNOWN_FAILURES:?}");
        ExitCode::FAILURE
    }
}
