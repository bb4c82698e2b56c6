//! Affine maps of ℝ¹/ℝ² and Möbius maps of the Riemann sphere.

use num_complex::Complex64;

use super::geometry::{Point, Region};

/// `x ↦ M x + t`. One-dimensional maps use only `matrix[0][0]` and `offset[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub dim: usize,
    pub matrix: [[f64; 2]; 2],
    pub offset: [f64; 2],
}

impl Affine {
    pub fn line(scale: f64, offset: f64) -> Self {
        Affine {
            dim: 1,
            matrix: [[scale, 0.0], [0.0, 0.0]],
            offset: [offset, 0.0],
        }
    }

    pub fn plane(matrix: [[f64; 2]; 2], offset: [f64; 2]) -> Self {
        Affine { dim: 2, matrix, offset }
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.matrix[0][0],
            _ => self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0],
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = &self.matrix;
        match self.dim {
            1 => Point::on_line(m[0][0] * p.x + self.offset[0]),
            _ => Point::new(
                m[0][0] * p.x + m[0][1] * p.y + self.offset[0],
                m[1][0] * p.x + m[1][1] * p.y + self.offset[1],
            ),
        }
    }

    /// Caller guarantees `det ≠ 0`.
    pub fn inverse(&self) -> Affine {
        let m = &self.matrix;
        match self.dim {
            1 => {
                let s = 1.0 / m[0][0];
                Affine::line(s, -self.offset[0] * s)
            }
            _ => {
                let det = self.det();
                let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
                let t = [
                    -(inv[0][0] * self.offset[0] + inv[0][1] * self.offset[1]),
                    -(inv[1][0] * self.offset[0] + inv[1][1] * self.offset[1]),
                ];
                Affine::plane(inv, t)
            }
        }
    }

    /// Largest singular value of the linear part.
    pub fn operator_norm(&self) -> f64 {
        match self.dim {
            1 => self.matrix[0][0].abs(),
            _ => largest_singular_value(self.linear()),
        }
    }

    pub fn linear(&self) -> [[f64; 2]; 2] {
        match self.dim {
            1 => [[self.matrix[0][0], 0.0], [0.0, 0.0]],
            _ => self.matrix,
        }
    }

    /// The fixed point of a map with `I − M` invertible.
    pub fn fixed_point(&self) -> Option<Point> {
        let m = &self.matrix;
        match self.dim {
            1 => {
                let d = 1.0 - m[0][0];
                (d != 0.0).then(|| Point::on_line(self.offset[0] / d))
            }
            _ => {
                let a = 1.0 - m[0][0];
                let b = -m[0][1];
                let c = -m[1][0];
                let d = 1.0 - m[1][1];
                let det = a * d - b * c;
                (det != 0.0).then(|| {
                    Point::new(
                        (d * self.offset[0] - b * self.offset[1]) / det,
                        (-c * self.offset[0] + a * self.offset[1]) / det,
                    )
                })
            }
        }
    }
}

/// Largest singular value of a real 2×2 matrix.
pub fn largest_singular_value(m: [[f64; 2]; 2]) -> f64 {
    let f = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (f * f - 4.0 * det * det).max(0.0);
    ((f + disc.sqrt()) / 2.0).sqrt()
}

pub fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `z ↦ (a z + b)/(c z + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    /// Normalizes to unit determinant; `None` when `ad − bc = 0`.
    pub fn normalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let s = det.sqrt();
        Some(Moebius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        if p.is_infinite() {
            if self.c == Complex64::new(0.0, 0.0) {
                return Point::INFINITY;
            }
            let w = self.a / self.c;
            return Point::new(w.re, w.im).normalized();
        }
        let z = Complex64::new(p.x, p.y);
        let den = self.c * z + self.d;
        if den.re == 0.0 && den.im == 0.0 {
            return Point::INFINITY;
        }
        let w = (self.a * z + self.b) / den;
        Point::new(w.re, w.im).normalized()
    }

    pub fn inverse(&self) -> Moebius {
        Moebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn pole(&self) -> Point {
        if self.c == Complex64::new(0.0, 0.0) {
            Point::INFINITY
        } else {
            let p = -self.d / self.c;
            Point::new(p.re, p.im)
        }
    }

    /// Chordal derivative `(1+|z|²)/(|az+b|²+|cz+d|²)`.
    pub fn chordal_derivative(&self, p: Point) -> f64 {
        if p.is_infinite() {
            return 1.0 / (self.a.norm_sqr() + self.c.norm_sqr());
        }
        let z = Complex64::new(p.x, p.y);
        (1.0 + z.norm_sqr()) / ((self.a * z + self.b).norm_sqr() + (self.c * z + self.d).norm_sqr())
    }

    /// Global chordal Lipschitz constant `σ_max(M)²`.
    pub fn global_lipschitz(&self) -> f64 {
        complex_sigma_max_sq(self.matrix())
    }

    /// Fixed point with the smaller chordal derivative.
    pub fn attracting_fixed_point(&self) -> Point {
        let zero = Complex64::new(0.0, 0.0);
        let candidates: Vec<Point> = if self.c == zero {
            let den = self.d - self.a;
            if den == zero {
                vec![Point::INFINITY]
            } else {
                let z = self.b / den;
                vec![Point::new(z.re, z.im), Point::INFINITY]
            }
        } else {
            // c z² + (d − a) z − b = 0
            let qa = self.c;
            let qb = self.d - self.a;
            let qc = -self.b;
            let disc = (qb * qb - 4.0 * qa * qc).sqrt();
            [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)]
                .iter()
                .map(|z| Point::new(z.re, z.im))
                .collect()
        };
        candidates
            .into_iter()
            .min_by(|p, q| self.chordal_derivative(*p).total_cmp(&self.chordal_derivative(*q)))
            .expect("a Möbius map has a fixed point")
    }

    /// Sampled maximum of the chordal derivative over `region`.
    pub fn sampled_lipschitz(&self, region: &Region, samples: usize) -> f64 {
        let n = samples.max(2);
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = region.x0 + (region.x1 - region.x0) * i as f64 / (n - 1) as f64;
                let y = region.y0 + (region.y1 - region.y0) * j as f64 / (n - 1) as f64;
                best = best.max(self.chordal_derivative(Point::new(x, y)));
            }
        }
        best
    }
}

pub fn complex_mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `σ_max²` of a complex 2×2 matrix.
pub fn complex_sigma_max_sq(m: [[Complex64; 2]; 2]) -> f64 {
    let f = m[0][0].norm_sqr() + m[0][1].norm_sqr() + m[1][0].norm_sqr() + m[1][1].norm_sqr();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (f * f - 4.0 * det * det).max(0.0);
    (f + disc.sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapSpec {
    Affine(Affine),
    Moebius(Moebius),
}

impl MapSpec {
    pub fn apply(&self, p: Point) -> Point {
        match self {
            MapSpec::Affine(a) => a.apply(p),
            MapSpec::Moebius(m) => m.apply(p),
        }
    }

    pub fn inverse(&self) -> MapSpec {
        match self {
            MapSpec::Affine(a) => MapSpec::Affine(a.inverse()),
            MapSpec::Moebius(m) => MapSpec::Moebius(m.inverse()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs_core::geometry::Space;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn koch_map_norm() {
        let s = 1.0 / (2.0 * 3f64.sqrt());
        let f = Affine::plane([[0.5, s], [s, -0.5]], [-1.0, 0.0]);
        assert!((f.operator_norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singular_values_match_a_direct_eigen_solve() {
        let m: [[f64; 2]; 2] = [[2.0, 1.0], [-0.5, 3.0]];
        // eigenvalues of MᵀM
        let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
        let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        let d = m[0][1] * m[0][1] + m[1][1] * m[1][1];
        let lam = (a + d) / 2.0 + (((a - d) / 2.0).powi(2) + b * b).sqrt();
        assert!((largest_singular_value(m) - lam.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn affine_inverse_round_trip() {
        let f = Affine::plane([[0.5, 0.2], [-0.1, 0.4]], [1.0, -2.0]);
        let p = Point::new(0.3, 0.9);
        let q = f.inverse().apply(f.apply(p));
        assert!((q.x - p.x).abs() < 1e-14 && (q.y - p.y).abs() < 1e-14);
        let g = Affine::line(1.0 / 3.0, 2.0 / 3.0);
        assert_eq!(g.inverse().apply(Point::on_line(2.0 / 3.0)).x, 0.0);
    }

    #[test]
    fn moebius_normalization_and_pole() {
        let m = Moebius::normalized(c(9.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(20.0, 0.0)).unwrap();
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-14);
        let near_pole = m.apply(Point::on_line(10.0));
        assert!(Space::Sphere.distance(near_pole, Point::INFINITY) < 1e-12);
        let exact = Moebius::normalized(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(exact.apply(Point::on_line(-1.0)).is_infinite());
        let w = m.apply(Point::INFINITY);
        assert!((w.x + 4.5).abs() < 1e-12);
        assert!(Moebius::normalized(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_none());
    }

    #[test]
    fn chordal_derivative_bounded_by_sigma_max() {
        let m = Moebius::normalized(c(-31.0, 4.0), c(8.0, 22.0), c(2.0, 11.0), c(2.0, -4.0)).unwrap();
        let bound = m.global_lipschitz();
        for i in -20..20 {
            for j in -20..20 {
                let p = Point::new(i as f64 * 0.17, j as f64 * 0.13);
                assert!(m.chordal_derivative(p) <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn attracting_fixed_point_of_the_arc_pair() {
        let m = Moebius::normalized(c(-31.0, 4.0), c(8.0, 22.0), c(2.0, 11.0), c(2.0, -4.0)).unwrap();
        let p = m.attracting_fixed_point();
        assert!((p.x - 0.0).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
        assert!(m.chordal_derivative(p) < 1.0);
    }
}
