//! Planar positions, Poisson deployments and positioning-error offsets.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point2D) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// A transmitter or receiver: where the controller believes it is, and
/// where it physically is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub actual: Point2D,
    pub perceived: Point2D,
}

impl Node {
    /// A node whose reported position is exact.
    pub fn exact(p: Point2D) -> Self {
        Self {
            actual: p,
            perceived: p,
        }
    }
}

/// Draw a homogeneous Poisson point process over the square
/// `[0, sqrt(area)]²`.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, area_m2: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    if !density.is_finite() || !area_m2.is_finite() {
        return Err(Error::invalid("PPP density and area must be finite"));
    }
    if density < 0.0 {
        return Err(Error::invalid(format!("negative PPP density {density}")));
    }
    if area_m2 <= 0.0 {
        return Err(Error::invalid(format!("non-positive area {area_m2}")));
    }
    let mean = density * area_m2;
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let poisson = Poisson::new(mean).map_err(|e| Error::invalid(format!("poisson mean {mean}: {e}")))?;
    let count = poisson.sample(rng) as usize;
    let side = area_m2.sqrt();
    Ok((0..count)
        .map(|_| Point2D::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
        .collect())
}

/// Offset drawn uniformly over the disk of radius `r`.
#[inline]
pub fn uniform_disk_offset<R: Rng + ?Sized>(r: f64, rng: &mut R) -> (f64, f64) {
    let rho = r * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    (rho * theta.cos(), rho * theta.sin())
}

/// Treat `points` as reported positions and place each true position
/// uniformly within `r_er` of its report.
pub fn inject_position_error<R: Rng + ?Sized>(points: &[Point2D], r_er: f64, rng: &mut R) -> Result<Vec<Node>> {
    if !(r_er >= 0.0) || !r_er.is_finite() {
        return Err(Error::invalid(format!("error radius must be finite and >= 0, got {r_er}")));
    }
    if r_er == 0.0 {
        return Ok(points.iter().copied().map(Node::exact).collect());
    }
    Ok(points
        .iter()
        .map(|p| {
            let (dx, dy) = uniform_disk_offset(r_er, rng);
            Node {
                actual: Point2D::new(p.x + dx, p.y + dy),
                perceived: *p,
            }
        })
        .collect())
}

/// Uniform bucket grid over a fixed bounding box for radius queries.
pub(crate) struct SpatialGrid {
    min_x: f64,
    min_y: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SpatialGrid {
    /// Grid covering `points`' bounding box with square cells of `cell` meters.
    pub fn covering(points: &[Point2D], cell: f64) -> Self {
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        if let Some(first) = points.first() {
            (min_x, min_y, max_x, max_y) = (first.x, first.y, first.x, first.y);
            for p in points {
                min_x = min_x.min(p.x);
                min_y = min_y.min(p.y);
                max_x = max_x.max(p.x);
                max_y = max_y.max(p.y);
            }
        }
        // cap the bucket count; coarser cells stay correct, only slower
        let mut cell = cell.max(1e-9);
        while ((max_x - min_x) / cell + 1.0) * ((max_y - min_y) / cell + 1.0) > 4.0e6 {
            cell *= 2.0;
        }
        let nx = ((max_x - min_x) / cell).floor() as usize + 1;
        let ny = ((max_y - min_y) / cell).floor() as usize + 1;
        Self {
            min_x,
            min_y,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        }
    }

    #[inline]
    fn cell_of(&self, p: &Point2D) -> (usize, usize) {
        let cx = ((p.x - self.min_x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let cy = ((p.y - self.min_y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (cx, cy)
    }

    pub fn insert(&mut self, idx: usize, p: &Point2D) {
        let (cx, cy) = self.cell_of(p);
        self.buckets[cy * self.nx + cx].push(idx as u32);
    }

    /// Visit every inserted index whose cell intersects the square of
    /// half-width `radius` around `p`. Callers filter by exact distance.
    pub fn for_each_candidate(&self, p: &Point2D, radius: f64, mut f: impl FnMut(usize)) {
        let lo = Point2D::new(p.x - radius, p.y - radius);
        let hi = Point2D::new(p.x + radius, p.y + radius);
        let (x0, y0) = self.cell_of(&lo);
        let (x1, y1) = self.cell_of(&hi);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &i in &self.buckets[cy * self.nx + cx] {
                    f(i as usize);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppp_zero_density_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_ppp(0.0, 1e6, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn ppp_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_ppp(f64::NAN, 1e6, &mut rng).is_err());
        assert!(sample_ppp(1e-3, f64::INFINITY, &mut rng).is_err());
        assert!(sample_ppp(-1e-3, 1e6, &mut rng).is_err());
        assert!(sample_ppp(1e-3, 0.0, &mut rng).is_err());
    }

    #[test]
    fn ppp_points_inside_square_and_deterministic() {
        let a = sample_ppp(5e-4, 1e6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_ppp(5e-4, 1e6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (0.0..=1000.0).contains(&p.x) && (0.0..=1000.0).contains(&p.y)));
    }

    #[test]
    fn ppp_mean_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 10_000;
        let total: usize = (0..draws)
            .map(|_| sample_ppp(5e-4, 1e6, &mut rng).unwrap().len())
            .sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - 500.0).abs() < 10.0, "mean count {mean}");
    }

    #[test]
    fn zero_error_radius_keeps_positions() {
        let pts = vec![Point2D::new(1.0, 2.0), Point2D::new(3.0, 4.0)];
        let nodes = inject_position_error(&pts, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(nodes.iter().all(|n| n.actual == n.perceived));
    }

    #[test]
    fn negative_error_radius_rejected() {
        let pts = vec![Point2D::new(1.0, 2.0)];
        assert!(inject_position_error(&pts, -1.0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
        assert!(inject_position_error(&pts, f64::NAN, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn offsets_bounded_by_radius() {
        let pts = vec![Point2D::new(500.0, 500.0); 10_000];
        let nodes = inject_position_error(&pts, 15.0, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!(nodes.iter().all(|n| n.actual.dist(&n.perceived) <= 15.0 + 1e-12));
        assert!(nodes.iter().all(|n| n.perceived == pts[0]));
    }

    #[test]
    fn grid_finds_all_points_within_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = sample_ppp(2e-3, 1e5, &mut rng).unwrap();
        let mut grid = SpatialGrid::covering(&pts, 7.0);
        for (i, p) in pts.iter().enumerate() {
            grid.insert(i, p);
        }
        let q = Point2D::new(150.0, 160.0);
        let mut found = Vec::new();
        grid.for_each_candidate(&q, 20.0, |i| {
            if pts[i].dist(&q) <= 20.0 {
                found.push(i)
            }
        });
        found.sort_unstable();
        let brute: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].dist(&q) <= 20.0).collect();
        assert_eq!(found, brute);
    }
}
