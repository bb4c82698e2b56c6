//! JSON system specs.
//!
//! ```json
//! {"space":"R1","maps":[{"type":"affine","matrix":[[0.5]],"offset":[0]}]}
//! {"space":"sphere","maps":[{"type":"moebius","a":[1,0],"b":[0,0],"c":[0,0],"d":[2,0]}]}
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ifs_core::{Affine, IfsError, IfsSystem, MapSpec, Moebius, Space};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("spec parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("map {index}: {reason}")]
    Shape { index: usize, reason: String },
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: Space,
    pub maps: Vec<MapEntry>,
    /// Declared contraction factor, used instead of the computed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contractivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapEntry {
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Moebius {
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        d: [f64; 2],
    },
}

fn affine_from(index: usize, space: Space, matrix: &[Vec<f64>], offset: &[f64]) -> Result<MapSpec, SpecError> {
    let dim = match space {
        Space::R1 => 1,
        Space::R2 => 2,
        Space::Sphere => {
            return Err(SpecError::Shape {
                index,
                reason: "affine maps need space R1 or R2".into(),
            })
        }
    };
    if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) || offset.len() != dim {
        return Err(SpecError::Shape {
            index,
            reason: format!("expected a {dim}x{dim} matrix and a length-{dim} offset"),
        });
    }
    Ok(MapSpec::Affine(if dim == 1 {
        Affine::line(matrix[0][0], offset[0])
    } else {
        Affine::plane(
            [[matrix[0][0], matrix[0][1]], [matrix[1][0], matrix[1][1]]],
            [offset[0], offset[1]],
        )
    }))
}

impl SpecFile {
    pub fn to_system(&self) -> Result<IfsSystem, SpecError> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, m) in self.maps.iter().enumerate() {
            let index = i + 1;
            maps.push(match m {
                MapEntry::Affine { matrix, offset } => affine_from(index, self.space, matrix, offset)?,
                MapEntry::Moebius { a, b, c, d } => {
                    let z = |v: &[f64; 2]| Complex64::new(v[0], v[1]);
                    let m = Moebius::normalized(z(a), z(b), z(c), z(d)).ok_or(IfsError::NonInvertible { index })?;
                    MapSpec::Moebius(m)
                }
            });
        }
        let ifs = IfsSystem::new(self.space, maps)?;
        Ok(match self.contractivity {
            Some(l) => ifs.with_contractivity(l)?,
            None => ifs,
        })
    }

    pub fn from_system(ifs: &IfsSystem, name: Option<&str>) -> Self {
        let maps = ifs
            .maps()
            .iter()
            .map(|m| match m {
                MapSpec::Affine(a) => MapEntry::Affine {
                    matrix: (0..a.dim).map(|r| a.matrix[r][..a.dim].to_vec()).collect(),
                    offset: a.offset[..a.dim].to_vec(),
                },
                MapSpec::Moebius(mb) => {
                    let p = |z: Complex64| [z.re, z.im];
                    MapEntry::Moebius {
                        a: p(mb.a),
                        b: p(mb.b),
                        c: p(mb.c),
                        d: p(mb.d),
                    }
                }
            })
            .collect();
        SpecFile {
            name: name.map(str::to_owned),
            space: ifs.space(),
            maps,
            contractivity: ifs.contractivity(),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<IfsSystem, SpecError> {
    let spec: SpecFile = serde_json::from_str(text).map_err(|e| SpecError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.to_system()
}

pub fn load_spec(path: &Path) -> Result<IfsSystem, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_spec(&text)
}

pub fn spec_json(ifs: &IfsSystem, name: Option<&str>) -> String {
    serde_json::to_string_pretty(&SpecFile::from_system(ifs, name)).expect("spec serializes")
}
