//! Ordered map families with word composition.

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::geometry::{Point, Region, Space};
use super::maps::{complex_mat_mul, complex_sigma_max_sq, largest_singular_value, mat_mul, Affine, MapSpec, Moebius};
use crate::symbolic::Digit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfsError {
    #[error("an IFS needs at least one map")]
    NoMaps,
    #[error("map {index} is not invertible")]
    NonInvertible { index: usize },
    #[error("map {index} does not act on {space}")]
    WrongSpace { index: usize, space: &'static str },
    #[error("digit {digit} is outside the alphabet of {n_maps} maps")]
    InvalidDigit { digit: i32, n_maps: usize },
    #[error("region contains the pole of map {index}")]
    PoleInRegion { index: usize },
    #[error("declared contractivity {lambda} is not in [0,1)")]
    BadContractivity { lambda: f64 },
}

/// Lipschitz constant, exact or sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBound {
    pub value: f64,
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    space: Space,
    maps: Vec<MapSpec>,
    inverses: Vec<MapSpec>,
    contractivity: Option<f64>,
}

impl IfsSystem {
    pub fn new(space: Space, maps: Vec<MapSpec>) -> Result<Self, IfsError> {
        if maps.is_empty() {
            return Err(IfsError::NoMaps);
        }
        for (i, m) in maps.iter().enumerate() {
            let index = i + 1;
            match (space, m) {
                (Space::R1, MapSpec::Affine(a)) if a.dim == 1 => {}
                (Space::R2, MapSpec::Affine(a)) if a.dim == 2 => {}
                (Space::Sphere, MapSpec::Moebius(_)) => {}
                _ => {
                    return Err(IfsError::WrongSpace {
                        index,
                        space: space.name(),
                    })
                }
            }
            let invertible = match m {
                MapSpec::Affine(a) => a.det() != 0.0 && a.det().is_finite(),
                MapSpec::Moebius(mb) => {
                    let d = mb.det();
                    d.norm() != 0.0 && d.is_finite()
                }
            };
            if !invertible {
                return Err(IfsError::NonInvertible { index });
            }
        }
        let inverses = maps.iter().map(MapSpec::inverse).collect();
        Ok(IfsSystem {
            space,
            maps,
            inverses,
            contractivity: None,
        })
    }

    /// Affine maps `x ↦ s x + t` on the line.
    pub fn line(maps: &[(f64, f64)]) -> Result<Self, IfsError> {
        IfsSystem::new(
            Space::R1,
            maps.iter().map(|&(s, t)| MapSpec::Affine(Affine::line(s, t))).collect(),
        )
    }

    /// Möbius maps from raw coefficients; normalizes each to unit determinant.
    pub fn moebius(coeffs: &[[Complex64; 4]]) -> Result<Self, IfsError> {
        let mut maps = Vec::with_capacity(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            let m = Moebius::normalized(c[0], c[1], c[2], c[3]).ok_or(IfsError::NonInvertible { index: i + 1 })?;
            maps.push(MapSpec::Moebius(m));
        }
        IfsSystem::new(Space::Sphere, maps)
    }

    pub fn with_contractivity(mut self, lambda: f64) -> Result<Self, IfsError> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(IfsError::BadContractivity { lambda });
        }
        self.contractivity = Some(lambda);
        Ok(self)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    pub fn contractivity(&self) -> Option<f64> {
        self.contractivity
    }

    pub fn positive_digits(&self) -> Vec<Digit> {
        (1..=self.n_maps() as i32).map(|v| Digit::new(v).unwrap()).collect()
    }

    /// `±1..=±N`, positive first.
    pub fn all_digits(&self) -> Vec<Digit> {
        let pos = self.positive_digits();
        pos.iter().copied().chain(pos.iter().map(|d| d.neg())).collect()
    }

    pub fn check_digit(&self, d: Digit) -> Result<(), IfsError> {
        if d.index() > self.n_maps() {
            Err(IfsError::InvalidDigit {
                digit: d.value(),
                n_maps: self.n_maps(),
            })
        } else {
            Ok(())
        }
    }

    pub fn check_word(&self, w: &[Digit]) -> Result<(), IfsError> {
        w.iter().try_for_each(|&d| self.check_digit(d))
    }

    /// `f_d`, with `f_{−j} = f_j^{−1}`.
    pub fn map(&self, d: Digit) -> &MapSpec {
        if d.is_positive() {
            &self.maps[d.index() - 1]
        } else {
            &self.inverses[d.index() - 1]
        }
    }

    pub fn apply_digit(&self, d: Digit, p: Point) -> Point {
        self.map(d).apply(p)
    }

    /// `f_{w₁} ∘ … ∘ f_{w_k}(x)`: the last digit acts first.
    pub fn apply_word(&self, w: &[Digit], p: Point) -> Point {
        w.iter().rev().fold(p, |q, &d| self.apply_digit(d, q))
    }

    /// `F(S) = ⋃ f_i(S)`, maps in order, points in order.
    pub fn hutchinson(&self, points: &[Point]) -> Vec<Point> {
        self.maps
            .iter()
            .flat_map(|m| points.iter().map(move |&p| m.apply(p)))
            .collect()
    }

    /// The system of inverse maps in the same digit order.
    pub fn dual(&self) -> IfsSystem {
        IfsSystem {
            space: self.space,
            maps: self.inverses.clone(),
            inverses: self.maps.clone(),
            contractivity: None,
        }
    }

    /// Lipschitz bound of map `index` (1-based). Affine maps give the exact
    /// operator norm; Möbius maps a sampled chordal-derivative maximum over
    /// `region`.
    pub fn lipschitz_bound(&self, index: usize, region: &Region) -> Result<LipschitzBound, IfsError> {
        match &self.maps[index - 1] {
            MapSpec::Affine(a) => Ok(LipschitzBound {
                value: a.operator_norm(),
                estimated: false,
            }),
            MapSpec::Moebius(m) => {
                let pole = m.pole();
                if !pole.is_infinite() && region.contains(pole) {
                    return Err(IfsError::PoleInRegion { index });
                }
                Ok(LipschitzBound {
                    value: m.sampled_lipschitz(region, 64),
                    estimated: true,
                })
            }
        }
    }

    /// Largest affine operator norm; `None` for Möbius systems.
    pub fn affine_contraction(&self) -> Option<f64> {
        self.maps
            .iter()
            .map(|m| match m {
                MapSpec::Affine(a) => Some(a.operator_norm()),
                MapSpec::Moebius(_) => None,
            })
            .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
    }

    /// Global Lipschitz bound of `f_w`: the operator norm of the composed
    /// linear part (affine) or `σ_max²` of the composed matrix (Möbius).
    pub fn word_lipschitz(&self, w: &[Digit]) -> f64 {
        match self.space {
            Space::R1 | Space::R2 => {
                let mut acc = [[1.0, 0.0], [0.0, 1.0]];
                for &d in w {
                    if let MapSpec::Affine(a) = self.map(d) {
                        acc = mat_mul(acc, a.linear());
                    }
                }
                if self.space == Space::R1 {
                    acc[0][0].abs()
                } else {
                    largest_singular_value(acc)
                }
            }
            Space::Sphere => {
                let one = Complex64::new(1.0, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                let mut acc = [[one, zero], [zero, one]];
                for &d in w {
                    if let MapSpec::Moebius(m) = self.map(d) {
                        acc = complex_mat_mul(acc, m.matrix());
                    }
                }
                complex_sigma_max_sq(acc)
            }
        }
    }

    /// Attracting fixed point of each map, in map order.
    pub fn fixed_points(&self) -> Vec<Point> {
        self.maps
            .iter()
            .map(|m| match m {
                MapSpec::Affine(a) => a.fixed_point().unwrap_or(Point::new(0.0, 0.0)),
                MapSpec::Moebius(mb) => mb.attracting_fixed_point(),
            })
            .collect()
    }

    /// Fixed points with exact duplicates removed.
    pub fn default_seed(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for p in self.fixed_points() {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Two base points for coding-map evaluation.
    pub fn base_points(&self) -> [Point; 2] {
        match self.space {
            Space::R1 => [Point::on_line(0.0), Point::on_line(1.0)],
            _ => [Point::new(0.0, 0.0), Point::new(1.0, 1.0)],
        }
    }

    /// Canonical text: space, then one line per map with 17 significant
    /// digits per coefficient.
    pub fn canonical_text(&self) -> String {
        let f = |v: f64| format!("{v:.16e}");
        let mut s = format!("{}\n", self.space.name());
        for m in &self.maps {
            match m {
                MapSpec::Affine(a) => {
                    s.push_str("affine");
                    for r in 0..a.dim {
                        for c in 0..a.dim {
                            s.push(' ');
                            s.push_str(&f(a.matrix[r][c]));
                        }
                    }
                    for r in 0..a.dim {
                        s.push(' ');
                        s.push_str(&f(a.offset[r]));
                    }
                }
                MapSpec::Moebius(mb) => {
                    s.push_str("moebius");
                    for z in [mb.a, mb.b, mb.c, mb.d] {
                        s.push(' ');
                        s.push_str(&f(z.re));
                        s.push(' ');
                        s.push_str(&f(z.im));
                    }
                }
            }
            s.push('\n');
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of [`IfsSystem::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::word;

    fn interval() -> IfsSystem {
        IfsSystem::line(&[(0.5, 0.0), (0.5, 0.5)]).unwrap()
    }

    #[test]
    fn apply_word_examples() {
        let cantor = IfsSystem::line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        assert_eq!(cantor.apply_word(&word(&[1]), Point::on_line(2.0)).x, 2.0 / 3.0);
        assert_eq!(cantor.apply_word(&[], Point::on_line(0.3)).x, 0.3);
        assert_eq!(interval().apply_word(&word(&[-2]), Point::on_line(0.5)).x, 0.0);
        // last digit acts first: f1(f2(0)) = 1/4, f2(f1(0)) = 1/2
        assert_eq!(interval().apply_word(&word(&[1, 2]), Point::on_line(0.0)).x, 0.25);
        assert_eq!(interval().apply_word(&word(&[2, 1]), Point::on_line(0.0)).x, 0.5);
    }

    #[test]
    fn dual_is_an_involution() {
        let ifs = interval();
        assert_eq!(ifs.dual().dual(), ifs);
        let third = IfsSystem::line(&[(1.0 / 3.0, 0.0)]).unwrap();
        assert_eq!(
            third.dual().apply_digit(Digit::new(1).unwrap(), Point::on_line(1.0)).x,
            3.0
        );
    }

    #[test]
    fn construction_errors() {
        assert_eq!(IfsSystem::line(&[]), Err(IfsError::NoMaps));
        assert_eq!(
            IfsSystem::line(&[(0.5, 0.0), (0.0, 1.0)]),
            Err(IfsError::NonInvertible { index: 2 })
        );
        let singular = MapSpec::Affine(Affine::plane([[1.0, 2.0], [2.0, 4.0]], [0.0, 0.0]));
        assert_eq!(
            IfsSystem::new(Space::R2, vec![singular]),
            Err(IfsError::NonInvertible { index: 1 })
        );
    }

    #[test]
    fn lipschitz_examples() {
        let r = Region::interval(-1.0, 1.0);
        let third = IfsSystem::line(&[(1.0 / 3.0, 0.0)]).unwrap();
        assert_eq!(third.lipschitz_bound(1, &r).unwrap().value, 1.0 / 3.0);
        let id = IfsSystem::new(
            Space::R2,
            vec![MapSpec::Affine(Affine::plane([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]))],
        )
        .unwrap();
        assert_eq!(id.lipschitz_bound(1, &r).unwrap().value, 1.0);
    }

    #[test]
    fn moebius_pole_in_region_is_rejected() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let ifs = IfsSystem::moebius(&[[c(9.0), c(0.0), c(-2.0), c(20.0)]]).unwrap();
        assert_eq!(
            ifs.lipschitz_bound(1, &Region::new(9.0, -1.0, 11.0, 1.0)),
            Err(IfsError::PoleInRegion { index: 1 })
        );
        let ok = ifs.lipschitz_bound(1, &Region::new(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(ok.estimated && ok.value < 1.0);
    }

    #[test]
    fn word_lipschitz_multiplies() {
        let ifs = interval();
        assert_eq!(ifs.word_lipschitz(&word(&[-1, -2, 1])), 2.0);
        assert_eq!(ifs.word_lipschitz(&[]), 1.0);
    }

    #[test]
    fn hash_tracks_coefficients() {
        let a = interval();
        let b = IfsSystem::line(&[(0.5, 0.0), (0.5, 0.5000001)]).unwrap();
        assert_eq!(a.hash(), interval().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
