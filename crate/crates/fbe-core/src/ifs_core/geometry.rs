//! Points, spaces and metrics.
//!
//! Every space embeds isometrically into ℝ³: the line and the plane
//! directly, the Riemann sphere through inverse stereographic projection onto
//! the unit sphere, where Euclidean distance is the chordal metric
//! `2|z−w| / sqrt((1+|z|²)(1+|w|²))`. Nearest-neighbour indexing and dedup
//! work on the embedded coordinates.

use serde::{Deserialize, Serialize};

/// Magnitudes beyond this are treated as the point at infinity.
const HUGE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "R1")]
    R1,
    #[serde(rename = "R2")]
    R2,
    #[serde(rename = "sphere")]
    Sphere,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::R1 => 1,
            Space::R2 | Space::Sphere => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::R1 => "R1",
            Space::R2 => "R2",
            Space::Sphere => "sphere",
        }
    }

    pub fn embed(self, p: Point) -> [f64; 3] {
        match self {
            Space::R1 => [p.x, 0.0, 0.0],
            Space::R2 => [p.x, p.y, 0.0],
            Space::Sphere => {
                if p.is_infinite() {
                    return [0.0, 0.0, 1.0];
                }
                let r2 = p.x * p.x + p.y * p.y;
                let s = 1.0 + r2;
                [2.0 * p.x / s, 2.0 * p.y / s, (r2 - 1.0) / s]
            }
        }
    }

    /// Inverse of [`Space::embed`] for points on the embedded image.
    pub fn unembed(self, e: [f64; 3]) -> Point {
        match self {
            Space::R1 => Point::new(e[0], 0.0),
            Space::R2 => Point::new(e[0], e[1]),
            Space::Sphere => {
                let d = 1.0 - e[2];
                if d <= 0.0 {
                    Point::INFINITY
                } else {
                    Point::new(e[0] / d, e[1] / d)
                }
            }
        }
    }

    pub fn distance(self, p: Point, q: Point) -> f64 {
        match self {
            Space::R1 => (p.x - q.x).abs(),
            Space::R2 => (p.x - q.x).hypot(p.y - q.y),
            Space::Sphere => embedded_distance(&self.embed(p), &self.embed(q)),
        }
    }

    /// Scale converting a small distance at `p` into a planar distance. One
    /// for the flat spaces; `(1+|p|²)/2` on the sphere.
    pub fn planar_scale(self, p: Point) -> f64 {
        match self {
            Space::Sphere if !p.is_infinite() => (1.0 + p.x * p.x + p.y * p.y) / 2.0,
            Space::Sphere => f64::INFINITY,
            _ => 1.0,
        }
    }
}

pub fn embedded_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// A point of ℝ, ℝ² or the Riemann sphere (`x + iy`). On the line `y` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const INFINITY: Point = Point {
        x: f64::INFINITY,
        y: 0.0,
    };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    /// Normalizes huge or non-finite coordinates to [`Point::INFINITY`].
    pub fn normalized(self) -> Self {
        if !self.x.is_finite() || !self.y.is_finite() || self.x.abs().max(self.y.abs()) > HUGE {
            Point::INFINITY
        } else {
            self
        }
    }

    pub fn is_infinite(&self) -> bool {
        !self.x.is_finite() || !self.y.is_finite()
    }
}

/// Axis-aligned box `[x0,x1] × [y0,y1]`; on the line `y0 = y1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Region { x0, y0, x1, y1 }
    }

    pub fn interval(x0: f64, x1: f64) -> Self {
        Region::new(x0, 0.0, x1, 0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// Bounding box of the finite points, `None` if there are none.
    pub fn bounding(points: &[Point]) -> Option<Region> {
        let mut it = points.iter().filter(|p| !p.is_infinite());
        let first = it.next()?;
        let mut r = Region::new(first.x, first.y, first.x, first.y);
        for p in it {
            r.x0 = r.x0.min(p.x);
            r.x1 = r.x1.max(p.x);
            r.y0 = r.y0.min(p.y);
            r.y1 = r.y1.max(p.y);
        }
        Some(r)
    }

    pub fn inflate(&self, by: f64) -> Region {
        Region::new(self.x0 - by, self.y0 - by, self.x1 + by, self.y1 + by)
    }
}
