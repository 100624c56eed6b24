//! Clustered terrain grid.
//!
//! A grayscale chart is split into three intensity classes with a 1-D k-means:
//! the darkest cluster is impassable coast, the lightest is open water and the
//! middle one is "uncertain" shallows carrying a risk scalar in `(0, 0.35]`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Aabb, Vec3};
use crate::math;

/// Upper end of the risk interval assigned to uncertain cells.
pub const MAX_UNCERTAIN_RISK: f64 = 0.35;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    Coast,
    Uncertain,
    Water,
}

#[derive(Debug, Error, PartialEq)]
pub enum TerrainError {
    #[error("k-means terrain clustering needs exactly 3 classes, got {0}")]
    ClassCount(usize),
    #[error("image is empty")]
    EmptyImage,
    #[error("pixel buffer has {got} entries, expected {expected}")]
    BufferSize { expected: usize, got: usize },
    #[error("cell size must be positive, got {0}")]
    CellSize(f64),
}

/// Row-major 8-bit intensity grid. Row `r`, column `c` covers
/// `x in [c, c+1) * cell`, `y in [r, r+1) * cell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, TerrainError> {
        if width == 0 || height == 0 {
            return Err(TerrainError::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(TerrainError::BufferSize {
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerrainGrid {
    width: usize,
    height: usize,
    cell_size: f64,
    depth_extent: f64,
    classes: Vec<CellClass>,
    risk: Vec<f32>,
}

impl TerrainGrid {
    /// Grid with every cell open water.
    pub fn open_water(width: usize, height: usize, cell_size: f64, depth_extent: f64) -> Self {
        Self {
            width,
            height,
            cell_size,
            depth_extent,
            classes: vec![CellClass::Water; width * height],
            risk: vec![0.0; width * height],
        }
    }

    /// Builds a grid from explicit classes. Risk defaults to 1 for coast,
    /// the maximum uncertain risk for shallows and 0 for water.
    pub fn from_classes(
        width: usize,
        height: usize,
        cell_size: f64,
        depth_extent: f64,
        classes: Vec<CellClass>,
    ) -> Result<Self, TerrainError> {
        if classes.len() != width * height {
            return Err(TerrainError::BufferSize {
                expected: width * height,
                got: classes.len(),
            });
        }
        let risk = classes
            .iter()
            .map(|c| match c {
                CellClass::Coast => 1.0,
                CellClass::Uncertain => MAX_UNCERTAIN_RISK as f32,
                CellClass::Water => 0.0,
            })
            .collect();
        Ok(Self {
            width,
            height,
            cell_size,
            depth_extent,
            classes,
            risk,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn depth_extent(&self) -> f64 {
        self.depth_extent
    }

    pub fn classes(&self) -> &[CellClass] {
        &self.classes
    }

    /// Physical extent in meters: `[0, width*cell] x [0, height*cell] x [0, depth]`.
    pub fn extent(&self) -> Aabb {
        Aabb::new(
            Vec3::ZERO,
            Vec3::new(
                self.width as f64 * self.cell_size,
                self.height as f64 * self.cell_size,
                self.depth_extent,
            ),
        )
    }

    pub fn cell_index(&self, x: f64, y: f64) -> Option<usize> {
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let c = (x / self.cell_size) as usize;
        let r = (y / self.cell_size) as usize;
        // The far boundary belongs to the last cell.
        let c = if c == self.width && x <= self.width as f64 * self.cell_size { c - 1 } else { c };
        let r = if r == self.height && y <= self.height as f64 * self.cell_size { r - 1 } else { r };
        if c < self.width && r < self.height {
            Some(r * self.width + c)
        } else {
            None
        }
    }

    pub fn class_at_cell(&self, col: usize, row: usize) -> CellClass {
        self.classes[row * self.width + col]
    }

    /// Class at a horizontal position; anything outside the chart is coast.
    pub fn class_at(&self, p: Vec3) -> CellClass {
        match self.cell_index(p.x, p.y) {
            Some(i) => self.classes[i],
            None => CellClass::Coast,
        }
    }

    pub fn risk_at(&self, p: Vec3) -> f64 {
        match self.cell_index(p.x, p.y) {
            Some(i) => self.risk[i] as f64,
            None => 1.0,
        }
    }

    pub fn is_water(&self, p: Vec3) -> bool {
        self.class_at(p) == CellClass::Water
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn fraction(&self, class: CellClass) -> f64 {
        self.count(class) as f64 / self.classes.len() as f64
    }

    /// True when the straight segment `a -> b` stays inside water cells,
    /// probed at half-cell spacing.
    pub fn segment_in_water(&self, a: Vec3, b: Vec3) -> bool {
        let len = (b - a).horizontal_norm();
        let steps = ((len / (0.5 * self.cell_size)) as usize).max(1);
        (0..=steps).all(|k| self.is_water(a.lerp(b, k as f64 / steps as f64)))
    }

    /// Uniform random water position, resampling up to `attempts` times.
    pub fn random_water_point<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        region: &Aabb,
        attempts: usize,
    ) -> Option<Vec3> {
        for _ in 0..attempts {
            let p = Vec3::new(
                rng.random_range(region.min.x..=region.max.x),
                rng.random_range(region.min.y..=region.max.y),
                rng.random_range(region.min.z..=region.max.z),
            );
            if self.is_water(p) {
                return Some(p);
            }
        }
        None
    }
}

/// Result of clustering a chart.
#[derive(Clone, Debug)]
pub struct ClusteredMap {
    pub grid: TerrainGrid,
    /// Set when the image held a single intensity; the grid is then all water.
    pub degenerate: bool,
    /// Final cluster centroids, darkest first, after empty clusters collapsed.
    pub centroids: Vec<f64>,
}

/// Classifies every pixel into coast/uncertain/water by 1-D k-means on
/// intensity, seeded deterministically from intensity quantiles.
pub fn cluster_map(
    image: &GrayImage,
    k: usize,
    cell_size: f64,
    depth_extent: f64,
) -> Result<ClusteredMap, TerrainError> {
    if k != 3 {
        return Err(TerrainError::ClassCount(k));
    }
    if image.pixels.is_empty() {
        return Err(TerrainError::EmptyImage);
    }
    if !(cell_size > 0.0) {
        return Err(TerrainError::CellSize(cell_size));
    }
    let mut hist = [0u64; 256];
    for &p in &image.pixels {
        hist[p as usize] += 1;
    }
    let distinct = hist.iter().filter(|&&h| h > 0).count();
    if distinct <= 1 {
        return Ok(ClusteredMap {
            grid: TerrainGrid::open_water(image.width, image.height, cell_size, depth_extent),
            degenerate: true,
            centroids: Vec::new(),
        });
    }

    let centroids = kmeans_histogram(&hist, k);
    // Collapse empty clusters; survivors are sorted darkest first.
    let mut live: Vec<f64> = centroids
        .iter()
        .filter_map(|&(c, n)| (n > 0).then_some(c))
        .collect();
    live.sort_by(|a, b| a.total_cmp(b));

    let mut level_class = [CellClass::Water; 256];
    let mut level_risk = [0.0f32; 256];
    let coast_c = live[0];
    let water_c = live[live.len() - 1];
    for level in 0..256usize {
        let nearest = nearest_centroid(level as f64, &live);
        let class = match (live.len(), nearest) {
            (_, 0) => CellClass::Coast,
            (n, i) if i == n - 1 => CellClass::Water,
            _ => CellClass::Uncertain,
        };
        level_class[level] = class;
        level_risk[level] = match class {
            CellClass::Coast => 1.0,
            CellClass::Water => 0.0,
            CellClass::Uncertain => {
                let t = ((water_c - level as f64) / (water_c - coast_c)).clamp(0.0, 1.0);
                (MAX_UNCERTAIN_RISK * t.max(1e-3)) as f32
            }
        };
    }
    let classes = image.pixels.iter().map(|&p| level_class[p as usize]).collect();
    let risk = image.pixels.iter().map(|&p| level_risk[p as usize]).collect();
    Ok(ClusteredMap {
        grid: TerrainGrid {
            width: image.width,
            height: image.height,
            cell_size,
            depth_extent,
            classes,
            risk,
        },
        degenerate: false,
        centroids: live,
    })
}

fn nearest_centroid(v: f64, centroids: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in centroids.iter().enumerate() {
        if (v - c).abs() < (v - centroids[best]).abs() {
            best = i;
        }
    }
    best
}

fn quantile(hist: &[u64; 256], total: u64, q: f64) -> f64 {
    let target = ((total as f64 - 1.0) * q) as u64;
    let mut acc = 0u64;
    for (level, &h) in hist.iter().enumerate() {
        acc += h;
        if acc > target {
            return level as f64;
        }
    }
    255.0
}

/// Lloyd iterations over the 256-bin histogram. Returns (centroid, member count).
fn kmeans_histogram(hist: &[u64; 256], k: usize) -> Vec<(f64, u64)> {
    let total: u64 = hist.iter().sum();
    // Spread seeds evenly between the 0.5% and 99.5% intensity quantiles so
    // a dominant class cannot swallow two seeds.
    let mut lo = quantile(hist, total, 0.005);
    let mut hi = quantile(hist, total, 0.995);
    if hi <= lo {
        lo = hist.iter().position(|&h| h > 0).unwrap_or(0) as f64;
        hi = hist.iter().rposition(|&h| h > 0).unwrap_or(255) as f64;
    }
    let mut centroids: Vec<f64> = (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect();
    let mut counts = vec![0u64; k];
    for _ in 0..200 {
        let mut sums = vec![0.0f64; k];
        counts.iter_mut().for_each(|c| *c = 0);
        for (level, &h) in hist.iter().enumerate() {
            if h == 0 {
                continue;
            }
            let i = nearest_centroid(level as f64, &centroids);
            sums[i] += h as f64 * level as f64;
            counts[i] += h;
        }
        let mut moved = false;
        for i in 0..k {
            if counts[i] > 0 {
                let c = sums[i] / counts[i] as f64;
                if (c - centroids[i]).abs() > 1e-9 {
                    moved = true;
                }
                centroids[i] = c;
            }
        }
        if !moved {
            break;
        }
    }
    centroids.into_iter().zip(counts).collect()
}

/// A generated chart together with the coast mask it was painted from.
#[derive(Clone, Debug)]
pub struct SyntheticMap {
    pub image: GrayImage,
    pub coast_mask: Vec<bool>,
}

impl SyntheticMap {
    pub fn coast_fraction(&self) -> f64 {
        self.coast_mask.iter().filter(|&&m| m).count() as f64 / self.coast_mask.len() as f64
    }
}

/// Paints an island chart: dark lobed islands, a mid-gray shallow ring around
/// each, and light open water, all with small intensity noise. The south-west
/// and north-east corners are kept clear.
pub fn synthetic_archipelago<R: Rng + ?Sized>(
    width: usize,
    height: usize,
    islands: usize,
    rng: &mut R,
) -> SyntheticMap {
    struct Island {
        cx: f64,
        cy: f64,
        r: f64,
        lobes: [(f64, f64, f64); 2],
    }
    let scale = width.min(height) as f64;
    let ring = 0.015 * scale;
    let mut list = Vec::with_capacity(islands);
    let mut guard = 0;
    while list.len() < islands && guard < islands * 200 {
        guard += 1;
        let r = rng.random_range(0.04..0.10) * scale;
        let cx = rng.random_range(0.1..0.9) * width as f64;
        let cy = rng.random_range(0.1..0.9) * height as f64;
        let (u, v) = (cx / width as f64, cy / height as f64);
        // Keep the start/destination corners open.
        if (u < 0.3 && v < 0.3) || (u > 0.7 && v > 0.7) {
            continue;
        }
        let overlaps = list.iter().any(|o: &Island| {
            let d = math::sqrt((o.cx - cx) * (o.cx - cx) + (o.cy - cy) * (o.cy - cy));
            d < 1.45 * (o.r + r) + 2.0 * ring
        });
        if overlaps {
            continue;
        }
        let lobes = [
            (3.0, rng.random_range(0.1..0.25), rng.random_range(0.0..6.283)),
            (5.0, rng.random_range(0.05..0.15), rng.random_range(0.0..6.283)),
        ];
        list.push(Island { cx, cy, r, lobes });
    }

    let mut pixels = Vec::with_capacity(width * height);
    let mut coast_mask = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
            let mut best = f64::INFINITY;
            for is in &list {
                let (dx, dy) = (x - is.cx, y - is.cy);
                let theta = math::atan2(dy, dx);
                let shape = 1.0
                    + is.lobes
                        .iter()
                        .map(|&(f, a, ph)| a * math::sin(f * theta + ph))
                        .sum::<f64>();
                // Signed distance-like measure relative to the lobed boundary.
                let d = math::sqrt(dx * dx + dy * dy) - is.r * shape;
                best = best.min(d);
            }
            let coast = best < 0.0;
            let noise: i32 = rng.random_range(-8..=8);
            let base: i32 = if coast {
                35
            } else if best < ring {
                125
            } else {
                215
            };
            pixels.push((base + noise).clamp(0, 255) as u8);
            coast_mask.push(coast);
        }
    }
    SyntheticMap {
        image: GrayImage {
            width,
            height,
            pixels,
        },
        coast_mask,
    }
}
