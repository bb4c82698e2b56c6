//! Attractor cloud cache files.
//!
//! Header `FBE-CLOUD v1 <ifs-hash> <epsilon> <count>`, then one point per
//! line with 17 significant digits: `x` on the line, `x y` otherwise, `inf`
//! for the point at infinity.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ifs_core::{
    attractor_default, AttractorCloud, AttractorError, CloudMeta, CloudSource, IfsSystem, Point, Space,
};

pub const CACHE_DIR_VAR: &str = "FBE_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed cache at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("stale cache: file was written for system {found}, current system is {expected}")]
    Stale { expected: String, found: String },
    #[error(transparent)]
    Attractor(#[from] AttractorError),
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Cache text for `cloud`.
pub fn cloud_text(ifs: &IfsSystem, cloud: &AttractorCloud) -> String {
    let mut s = format!(
        "FBE-CLOUD v1 {} {} {}\n",
        ifs.hash(),
        fmt_num(cloud.resolution()),
        cloud.len()
    );
    for p in cloud.points() {
        if p.is_infinite() {
            s.push_str("inf\n");
        } else if ifs.space() == Space::R1 {
            let _ = writeln!(s, "{}", fmt_num(p.x));
        } else {
            let _ = writeln!(s, "{} {}", fmt_num(p.x), fmt_num(p.y));
        }
    }
    s
}

pub fn cache_attractor(ifs: &IfsSystem, cloud: &AttractorCloud, path: &Path) -> Result<(), CacheError> {
    std::fs::write(path, cloud_text(ifs, cloud)).map_err(|source| CacheError::Io {
        path: path.to_owned(),
        source,
    })
}

fn malformed(line: usize, reason: impl Into<String>) -> CacheError {
    CacheError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn num(tok: &str, line: usize) -> Result<f64, CacheError> {
    tok.parse::<f64>()
        .map_err(|_| malformed(line, format!("bad number {tok:?}")))
}

/// Parse cache text, refusing files written for another system.
pub fn parse_cloud(ifs: &IfsSystem, text: &str) -> Result<AttractorCloud, CacheError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "FBE-CLOUD" || fields[1] != "v1" {
        return Err(malformed(1, "bad header"));
    }
    let expected = ifs.hash();
    if fields[2] != expected {
        return Err(CacheError::Stale {
            expected,
            found: fields[2].to_owned(),
        });
    }
    let eps = num(fields[3], 1)?;
    let count: usize = fields[4].parse().map_err(|_| malformed(1, "bad point count"))?;
    let space = ifs.space();
    let mut points = Vec::with_capacity(count);
    for (i, l) in lines.enumerate() {
        let line = i + 2;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let p = match (space, toks.as_slice()) {
            (_, ["inf"]) => Point::INFINITY,
            (Space::R1, [x]) => Point::on_line(num(x, line)?),
            (Space::R2 | Space::Sphere, [x, y]) => Point::new(num(x, line)?, num(y, line)?),
            _ => return Err(malformed(line, "wrong number of coordinates")),
        };
        points.push(p);
    }
    if points.len() != count {
        return Err(malformed(
            count + 2,
            format!("expected {count} points, found {}", points.len()),
        ));
    }
    let meta = CloudMeta {
        ifs_hash: expected,
        depth: 0,
        cell: eps,
        contraction: ifs.contractivity().or_else(|| ifs.affine_contraction()).unwrap_or(0.0),
        contraction_estimated: ifs.contractivity().is_none() && ifs.affine_contraction().is_none(),
        contractive: true,
        source: CloudSource::Cache,
    };
    Ok(AttractorCloud::from_parts(space, points, eps, meta)?)
}

pub fn load_cached(ifs: &IfsSystem, path: &Path) -> Result<AttractorCloud, CacheError> {
    let text = std::fs::read_to_string(path).map_err(|source| CacheError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_cloud(ifs, &text)
}

/// `<dir>/<hash>-<cell>.cloud`.
pub fn cache_path(dir: &Path, ifs: &IfsSystem, cell: f64) -> PathBuf {
    dir.join(format!("{}-{cell:.6e}.cloud", ifs.hash()))
}

/// Default-seeded attractor at `cell`, read from and written to
/// `$FBE_CACHE_DIR` when that variable is set.
pub fn cached_attractor(ifs: &IfsSystem, cell: f64) -> Result<AttractorCloud, CacheError> {
    let Some(dir) = std::env::var_os(CACHE_DIR_VAR) else {
        return Ok(attractor_default(ifs, cell)?);
    };
    let dir = PathBuf::from(dir);
    let path = cache_path(&dir, ifs, cell);
    if path.exists() {
        return load_cached(ifs, &path);
    }
    let cloud = attractor_default(ifs, cell)?;
    std::fs::create_dir_all(&dir).map_err(|source| CacheError::Io {
        path: dir.clone(),
        source,
    })?;
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    cache_attractor(ifs, &cloud, &tmp)?;
    std::fs::rename(&tmp, &path).map_err(|source| CacheError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    #[test]
    fn round_trip_is_exact() {
        for ifs in [systems::cantor(), systems::koch(), systems::projective()] {
            let cloud = attractor_default(&ifs, 1e-2).unwrap();
            let back = parse_cloud(&ifs, &cloud_text(&ifs, &cloud)).unwrap();
            assert_eq!(back.points(), cloud.points());
            assert_eq!(back.resolution(), cloud.resolution());
        }
    }

    #[test]
    fn edited_spec_is_stale() {
        let ifs = systems::cantor();
        let cloud = attractor_default(&ifs, 1e-2).unwrap();
        let text = cloud_text(&ifs, &cloud);
        let edited = IfsSystem::line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 0.7)]).unwrap();
        assert!(matches!(parse_cloud(&edited, &text), Err(CacheError::Stale { .. })));
    }

    #[test]
    fn infinity_round_trips() {
        let ifs = systems::projective();
        let meta = attractor_default(&ifs, 1e-2).unwrap().meta().clone();
        let cloud =
            AttractorCloud::from_parts(Space::Sphere, vec![Point::new(0.5, -0.25), Point::INFINITY], 1e-3, meta)
                .unwrap();
        let text = cloud_text(&ifs, &cloud);
        assert!(text.ends_with("inf\n"));
        let back = parse_cloud(&ifs, &text).unwrap();
        assert!(back.points()[1].is_infinite());
        assert_eq!(back.points()[0], Point::new(0.5, -0.25));
    }

    #[test]
    fn rejects_truncated_files() {
        let ifs = systems::cantor();
        let cloud = attractor_default(&ifs, 1e-2).unwrap();
        let text = cloud_text(&ifs, &cloud);
        let cut: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_cloud(&ifs, &cut), Err(CacheError::Malformed { .. })));
    }
}
