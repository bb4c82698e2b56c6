//! Static 3-d tree over embedded coordinates for exact nearest-neighbour and
//! radius queries.

use super::geometry::embedded_distance;

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<[f64; 3]>,
    /// Point indices in tree order; node `mid` of every subrange splits it.
    order: Vec<usize>,
    axes: Vec<u8>,
    /// Bounding box `[min, max]` of the subrange whose split node is `mid`.
    boxes: Vec<[[f64; 3]; 2]>,
}

impl KdTree {
    pub fn new(points: Vec<[f64; 3]>) -> Self {
        let n = points.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut axes = vec![0u8; n];
        let mut boxes = vec![[[0.0; 3]; 2]; n];
        build(&points, &mut order, &mut axes, &mut boxes, 0, n);
        KdTree {
            points,
            order,
            axes,
            boxes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64; 3] {
        &self.points[i]
    }

    /// Index and distance of a nearest point. Among equidistant points the
    /// lowest index visited wins; the choice is deterministic for a given set.
    pub fn nearest(&self, q: &[f64; 3]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(q, 0, self.points.len(), &mut best);
        Some(best)
    }

    fn nearest_in(&self, q: &[f64; 3], lo: usize, hi: usize, best: &mut (usize, f64)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        if box_distance(&self.boxes[mid], q) >= best.1 {
            return;
        }
        let idx = self.order[mid];
        let p = &self.points[idx];
        let d = embedded_distance(p, q);
        if d < best.1 || (d == best.1 && idx < best.0) {
            *best = (idx, d);
        }
        let axis = self.axes[mid] as usize;
        let delta = q[axis] - p[axis];
        let (first, second) = if delta <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_in(q, first.0, first.1, best);
        if delta.abs() < best.1 {
            self.nearest_in(q, second.0, second.1, best);
        }
    }

    /// Indices within distance `r` (inclusive), sorted ascending.
    pub fn within(&self, q: &[f64; 3], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_in(q, r, 0, self.points.len(), &mut out);
        out.sort_unstable();
        out
    }

    fn within_in(&self, q: &[f64; 3], r: f64, lo: usize, hi: usize, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        if box_distance(&self.boxes[mid], q) > r {
            return;
        }
        let idx = self.order[mid];
        let p = &self.points[idx];
        if embedded_distance(p, q) <= r {
            out.push(idx);
        }
        let axis = self.axes[mid] as usize;
        let delta = q[axis] - p[axis];
        if delta >= -r {
            self.within_in(q, r, mid + 1, hi, out);
        }
        if delta <= r {
            self.within_in(q, r, lo, mid, out);
        }
    }
}

fn box_distance(b: &[[f64; 3]; 2], q: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = (b[0][a] - q[a]).max(q[a] - b[1][a]).max(0.0);
        s += d * d;
    }
    s.sqrt()
}

fn build(points: &[[f64; 3]], order: &mut [usize], axes: &mut [u8], boxes: &mut [[[f64; 3]; 2]], lo: usize, hi: usize) {
    if hi <= lo {
        return;
    }
    let slice = &order[lo..hi];
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for &i in slice {
        for a in 0..3 {
            min[a] = min[a].min(points[i][a]);
            max[a] = max[a].max(points[i][a]);
        }
    }
    let mid = (lo + hi) / 2;
    boxes[mid] = [min, max];
    if hi - lo == 1 {
        return;
    }
    let axis = (0..3)
        .max_by(|&a, &b| (max[a] - min[a]).total_cmp(&(max[b] - min[b])))
        .unwrap();
    order[lo..hi].select_nth_unstable_by(mid - lo, |&i, &j| {
        points[i][axis].total_cmp(&points[j][axis]).then(i.cmp(&j))
    });
    axes[mid] = axis as u8;
    build(points, order, axes, boxes, lo, mid);
    build(points, order, axes, boxes, mid + 1, hi);
}
