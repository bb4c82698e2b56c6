//! Standard example systems.

use num_complex::Complex64;

use crate::ifs_core::{Affine, IfsSystem, MapSpec, Space};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn plane(maps: Vec<([[f64; 2]; 2], [f64; 2])>) -> IfsSystem {
    IfsSystem::new(
        Space::R2,
        maps.into_iter()
            .map(|(m, t)| MapSpec::Affine(Affine::plane(m, t)))
            .collect(),
    )
    .expect("valid example system")
}

/// `{x/3, x/3 + 2/3}`; attractor the ternary Cantor set.
pub fn cantor() -> IfsSystem {
    IfsSystem::line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
}

/// `{x/2, x/2 + 1/2}`; attractor `[0,1]`.
pub fn interval() -> IfsSystem {
    IfsSystem::line(&[(0.5, 0.0), (0.5, 0.5)]).unwrap()
}

/// `(x + v)/2` for `v ∈ {(0,0), (1,0), (0,1)}`.
pub fn sierpinski() -> IfsSystem {
    let h = [[0.5, 0.0], [0.0, 0.5]];
    plane(vec![(h, [0.0, 0.0]), (h, [0.5, 0.0]), (h, [0.0, 0.5])])
}

/// Two-map affine Koch curve.
pub fn koch() -> IfsSystem {
    let s = 1.0 / (2.0 * 3f64.sqrt());
    plane(vec![
        ([[0.5, s], [s, -0.5]], [-1.0, 0.0]),
        ([[0.5, -s], [-s, -0.5]], [1.0, 0.0]),
    ])
}

/// Fractal interpolation function through `(−1,0), (0,1/2), (1,0)`.
pub fn fractal_interpolation() -> IfsSystem {
    plane(vec![
        ([[0.5, 0.0], [0.5, 0.4]], [0.5, 0.25]),
        ([[0.5, 0.0], [-0.5, 0.4]], [-0.5, 0.25]),
    ])
}

/// The Möbius pair whose attractor is an arc of `|z − 3i/2| = 1/2`.
pub fn moebius_arc() -> IfsSystem {
    IfsSystem::moebius(&[
        [c(-31.0, 4.0), c(8.0, 22.0), c(2.0, 11.0), c(2.0, -4.0)],
        [c(-25.0, -13.0), c(-17.0, 14.0), c(-11.0, 7.0), c(-4.0, 13.0)],
    ])
    .unwrap()
}

/// `{9x/(20 − 2x), (11x + 9)/(2x + 18)}` on the projective line; attractor
/// `[0,1]`, dual attractor `ℝ ∖ (−9/2, 11/2)`.
pub fn projective() -> IfsSystem {
    IfsSystem::moebius(&[
        [c(9.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(20.0, 0.0)],
        [c(11.0, 0.0), c(9.0, 0.0), c(2.0, 0.0), c(18.0, 0.0)],
    ])
    .unwrap()
}

/// Loxodromic pair generating a Schottky group, with `f₁(1) = 1`,
/// `f₂(−1) = −1` and multiplier `k` at both fixed points.
pub fn schottky(k: Complex64) -> IfsSystem {
    let q = c(0.0, 2.0 + 3f64.sqrt());
    let one = c(1.0, 0.0);
    let a = (one - q * k) / (one - k);
    IfsSystem::moebius(&[[a, -q, one, a - one - q], [a, q, -one, a - one - q]]).unwrap()
}

/// Name → constructor for the bundled systems.
pub fn by_name(name: &str) -> Option<IfsSystem> {
    Some(match name {
        "cantor" => cantor(),
        "interval" => interval(),
        "sierpinski" => sierpinski(),
        "koch" => koch(),
        "fractal-interpolation" => fractal_interpolation(),
        "moebius-arc" => moebius_arc(),
        "projective" => projective(),
        "schottky" => schottky(c(0.1, 0.0)),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "cantor",
    "interval",
    "sierpinski",
    "koch",
    "fractal-interpolation",
    "moebius-arc",
    "projective",
    "schottky",
];
