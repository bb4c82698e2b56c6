//! Spec files, cloud caches, manifold point syntax and the verify suite.

pub mod cache;
pub mod spec;
pub mod verify;

use thiserror::Error;

pub use cache::{cache_attractor, cache_path, cached_attractor, load_cached, CacheError};
pub use spec::{load_spec, parse_spec, spec_json, SpecError, SpecFile};
pub use verify::{run_verify, Check, Status, VerifyOptions, VerifyReport};

use crate::ifs_core::{Point, Region, Space};
use crate::symbolic::{Address, Digit};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SyntaxError {
    #[error("expected {expected} comma-separated numbers in {input:?}")]
    Numbers { input: String, expected: String },
    #[error("manifold point {0:?} must look like THETA:X")]
    ManifoldPoint(String),
    #[error("integer part {0:?} must be a finite word")]
    Infinite(String),
    #[error(transparent)]
    Address(#[from] crate::symbolic::SymbolicError),
}

/// Comma-separated numbers.
pub fn parse_numbers(s: &str) -> Result<Vec<f64>, SyntaxError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| SyntaxError::Numbers {
            input: s.into(),
            expected: "1 or more".into(),
        })
}

/// `x` on the line, `x,y` in the plane or on the sphere.
pub fn parse_point(space: Space, s: &str) -> Result<Point, SyntaxError> {
    let v = parse_numbers(s)?;
    match (space, v.as_slice()) {
        (Space::R1, [x]) => Ok(Point::on_line(*x)),
        (Space::R2 | Space::Sphere, [x, y]) => Ok(Point::new(*x, *y)),
        _ => Err(SyntaxError::Numbers {
            input: s.into(),
            expected: space.dim().to_string(),
        }),
    }
}

/// `x0,x1` on the line, `x0,y0,x1,y1` otherwise.
pub fn parse_region(space: Space, s: &str) -> Result<Region, SyntaxError> {
    let v = parse_numbers(s)?;
    match (space, v.as_slice()) {
        (Space::R1, [a, b]) => Ok(Region::interval(*a, *b)),
        (Space::R2 | Space::Sphere, [a, b, c, d]) => Ok(Region::new(*a, *b, *c, *d)),
        _ => Err(SyntaxError::Numbers {
            input: s.into(),
            expected: (2 * space.dim()).to_string(),
        }),
    }
}

/// `NX` or `NX,NY`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), SyntaxError> {
    let err = || SyntaxError::Numbers {
        input: s.into(),
        expected: "1 or 2 positive integer".into(),
    };
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| err())?;
    match v.as_slice() {
        [n] if *n > 0 => Ok((*n, *n)),
        [a, b] if *a > 0 && *b > 0 => Ok((*a, *b)),
        _ => Err(err()),
    }
}

/// `THETA:X`, with `THETA` a finite word in address syntax.
pub fn parse_manifold_point(space: Space, s: &str) -> Result<(Vec<Digit>, Point), SyntaxError> {
    let (theta, x) = s.rsplit_once(':').ok_or_else(|| SyntaxError::ManifoldPoint(s.into()))?;
    let addr: Address = theta.parse()?;
    if !addr.is_finite() {
        return Err(SyntaxError::Infinite(theta.into()));
    }
    Ok((addr.preperiod().to_vec(), parse_point(space, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::word;

    #[test]
    fn parses_manifold_points() {
        let (t, x) = parse_manifold_point(Space::R1, "-2.-1:0.625").unwrap();
        assert_eq!(t, word(&[-2, -1]));
        assert_eq!(x, Point::on_line(0.625));
        let (t, x) = parse_manifold_point(Space::R2, ":0.5,0.25").unwrap();
        assert!(t.is_empty());
        assert_eq!(x, Point::new(0.5, 0.25));
        assert!(parse_manifold_point(Space::R1, "-1").is_err());
        assert!(parse_manifold_point(Space::R1, "(-1)*:0.5").is_err());
    }

    #[test]
    fn parses_regions_and_grids() {
        assert_eq!(parse_region(Space::R1, "-3,3").unwrap(), Region::interval(-3.0, 3.0));
        assert!(parse_region(Space::R2, "-3,3").is_err());
        assert_eq!(parse_grid("2048").unwrap(), (2048, 2048));
        assert_eq!(parse_grid("64,32").unwrap(), (64, 32));
        assert!(parse_grid("0").is_err());
    }
}
