//! Hit rasters over axis-aligned regions.

use std::fmt::Write as _;

use super::super::ifs_core::{Point, Region, Space};

/// Grid of cells with the smallest witness depth per hit cell.
///
/// Cell `(ix, iy)` is the closed box
/// `[x0 + ix·wx, x0 + (ix+1)·wx] × [y0 + iy·wy, y0 + (iy+1)·wy]`; a point hits
/// every cell whose box, inflated by the tolerance, contains it. On the line
/// `ny = 1` and `y` is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    region: Region,
    nx: usize,
    ny: usize,
    one_dimensional: bool,
    tau: f64,
    cells: Vec<Option<u32>>,
    resolution_warning: bool,
}

impl Raster {
    pub fn new(space: Space, region: Region, nx: usize, ny: usize, tau: f64) -> Self {
        let one_dimensional = space == Space::R1;
        let ny = if one_dimensional { 1 } else { ny.max(1) };
        let nx = nx.max(1);
        let mut r = Raster {
            region,
            nx,
            ny,
            one_dimensional,
            tau,
            cells: vec![None; nx * ny],
            resolution_warning: false,
        };
        let (wx, wy) = r.cell_size();
        let min_cell = if one_dimensional { wx } else { wx.min(wy) };
        r.resolution_warning = min_cell < tau;
        r
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// True when cells are smaller than the hit tolerance.
    pub fn resolution_warning(&self) -> bool {
        self.resolution_warning
    }

    pub fn cell_size(&self) -> (f64, f64) {
        let wx = (self.region.x1 - self.region.x0) / self.nx as f64;
        let wy = if self.one_dimensional {
            0.0
        } else {
            (self.region.y1 - self.region.y0) / self.ny as f64
        };
        (wx, wy)
    }

    /// Closed bounds `[lo, hi]` of column `ix`.
    pub fn x_bounds(&self, ix: usize) -> (f64, f64) {
        let wx = self.cell_size().0;
        (self.region.x0 + ix as f64 * wx, self.region.x0 + (ix + 1) as f64 * wx)
    }

    pub fn y_bounds(&self, iy: usize) -> (f64, f64) {
        let wy = self.cell_size().1;
        (self.region.y0 + iy as f64 * wy, self.region.y0 + (iy + 1) as f64 * wy)
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        let (x0, x1) = self.x_bounds(ix);
        if self.one_dimensional {
            Point::on_line((x0 + x1) / 2.0)
        } else {
            let (y0, y1) = self.y_bounds(iy);
            Point::new((x0 + x1) / 2.0, (y0 + y1) / 2.0)
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<u32> {
        self.cells[iy * self.nx + ix]
    }

    pub fn cells(&self) -> &[Option<u32>] {
        &self.cells
    }

    pub fn hit_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    fn axis_range(lo_edge: f64, w: f64, n: usize, v: f64, tau: f64) -> Option<(usize, usize)> {
        if w <= 0.0 || !v.is_finite() {
            return None;
        }
        let lo = ((v - tau - lo_edge) / w - 1.0).floor();
        let hi = ((v + tau - lo_edge) / w).floor() + 1.0;
        if hi < 0.0 || lo > n as f64 {
            return None;
        }
        let lo = lo.max(0.0) as usize;
        let hi = (hi.min(n as f64 - 1.0)).max(0.0) as usize;
        let hit = |i: usize| {
            let a = lo_edge + i as f64 * w;
            let b = lo_edge + (i + 1) as f64 * w;
            a - tau <= v && v <= b + tau
        };
        let first = (lo..=hi).find(|&i| hit(i))?;
        let last = (first..=hi).rev().find(|&i| hit(i))?;
        Some((first, last))
    }

    /// Mark every cell hit by `p` at inflation `tau`, keeping the smaller depth.
    pub fn mark_with(&mut self, p: Point, depth: u32, tau: f64) {
        if p.is_infinite() {
            return;
        }
        let (wx, wy) = self.cell_size();
        let Some((ix0, ix1)) = Self::axis_range(self.region.x0, wx, self.nx, p.x, tau) else {
            return;
        };
        let (iy0, iy1) = if self.one_dimensional {
            (0, 0)
        } else {
            match Self::axis_range(self.region.y0, wy, self.ny, p.y, tau) {
                Some(r) => r,
                None => return,
            }
        };
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                let c = &mut self.cells[iy * self.nx + ix];
                *c = Some(c.map_or(depth, |d| d.min(depth)));
            }
        }
    }

    pub fn mark(&mut self, p: Point, depth: u32) {
        let tau = self.tau;
        self.mark_with(p, depth, tau);
    }

    /// Cell-wise minimum depth; order-independent.
    pub fn merge(&mut self, other: &Raster) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a = match (*a, *b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            };
        }
    }

    /// Same grid, no hits.
    pub fn blank(&self) -> Raster {
        Raster {
            cells: vec![None; self.cells.len()],
            ..self.clone()
        }
    }

    /// Binary PGM (P5): 0 for a miss, `255 − min(16·depth, 254)` for a hit;
    /// top row first.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                out.push(match self.get(ix, iy) {
                    None => 0,
                    Some(d) => (255 - (16 * d as u64).min(254)) as u8,
                });
            }
        }
        out
    }

    /// `ix,iy,depth` for hit cells, row-major from `iy = 0`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ix,iy,depth\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if let Some(d) = self.get(ix, iy) {
                    let _ = writeln!(s, "{ix},{iy},{d}");
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marks_closed_inflated_cells() {
        let mut r = Raster::new(Space::R1, Region::interval(0.0, 4.0), 4, 1, 0.0);
        r.mark(Point::on_line(1.0), 2);
        // x = 1 lies on the shared edge of cells 0 and 1
        assert_eq!(r.get(0, 0), Some(2));
        assert_eq!(r.get(1, 0), Some(2));
        assert_eq!(r.get(2, 0), None);
        r.mark(Point::on_line(1.5), 1);
        assert_eq!(r.get(1, 0), Some(1));
        r.mark_with(Point::on_line(3.1), 0, 0.2);
        assert_eq!(r.get(2, 0), Some(0));
        assert_eq!(r.get(3, 0), Some(0));
        r.mark(Point::on_line(-5.0), 0);
        assert_eq!(r.hit_count(), 4);
    }

    #[test]
    fn pgm_layout() {
        let mut r = Raster::new(Space::R2, Region::new(0.0, 0.0, 2.0, 2.0), 2, 2, 0.0);
        r.mark(Point::new(0.5, 1.5), 1);
        let pgm = r.to_pgm();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        // top row first: the hit is in the top-left byte
        assert_eq!(&pgm[header.len()..], &[239, 0, 0, 0]);
        assert_eq!(r.to_csv(), "ix,iy,depth\n0,1,1\n");
    }

    #[test]
    fn merge_takes_minimum() {
        let mut a = Raster::new(Space::R1, Region::interval(0.0, 1.0), 2, 1, 0.0);
        let mut b = a.blank();
        a.mark(Point::on_line(0.2), 3);
        b.mark(Point::on_line(0.2), 1);
        b.mark(Point::on_line(0.8), 2);
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.get(0, 0), Some(1));
        assert_eq!(ab.get(1, 0), Some(2));
    }
}
