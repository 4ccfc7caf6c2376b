//! Procedural road-scene synthesis: layout families, single-trajectory
//! sampling, and rasterization into training and evaluation samples.
//!
//! Axis convention, used everywhere in this crate: grids are indexed
//! `[row i, col j]` with `i` increasing downward; continuous geometry lives in
//! `(x, y)` with `y` pointing up, so the cell `(i, j)` of an `n`-cell grid
//! over a context extent `S` has its center at
//! `x = (j + 0.5) * S / n`, `y = S - (i + 0.5) * S / n`.
//! Angle 0 points along +x (rightward) and angles increase counter-clockwise.

mod layout;
mod raster;

pub use layout::{
    desk_test_corpus, desk_train_corpus, generate_layout, test_corpus, train_corpus, Arm,
    GeometryParams, LayoutKind, RoadLayout,
};
pub use raster::{build_eval_sample, rasterize_context, rasterize_sample, sample_trajectory};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Reference grid side; geometry parameters are quoted at this resolution and
/// scaled proportionally for other sides.
pub const REF_SIDE: f64 = 256.0;

/// Trajectory stroke width in label-resolution cells.
pub const STROKE_WIDTH_CELLS: f64 = 3.0;

/// Maximal lateral trajectory jitter in context cells.
pub const MAX_JITTER_CELLS: f64 = 2.0;

/// Directional modes closer than this are merged in evaluation samples.
pub const MODE_MERGE_RAD: f64 = 15.0 * std::f64::consts::PI / 180.0;

/// Two-layer probabilistic context grid: drivable region and road markings.
///
/// Cell values are beliefs in [0, 1]: 1.0 observed true, 0.0 observed
/// negative, 0.5 unknown. The synthesizer emits hard 0/1 observations.
#[derive(Debug, Clone)]
pub struct RoadContext {
    pub drivable: Array2<f32>,
    pub markings: Array2<f32>,
}

impl RoadContext {
    pub fn side(&self) -> usize {
        self.drivable.nrows()
    }
}

/// Half-resolution single-trajectory supervision: an occupancy mask plus unit
/// tangent components defined wherever the mask is set.
#[derive(Debug, Clone)]
pub struct TrajectoryLabel {
    pub mask: Array2<u8>,
    pub nx: Array2<f32>,
    pub ny: Array2<f32>,
}

impl TrajectoryLabel {
    pub fn side(&self) -> usize {
        self.mask.nrows()
    }

    /// Number of masked cells.
    pub fn mask_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m != 0).count()
    }
}

/// One feasible trajectory through a layout: a dense polyline in context
/// coordinates whose endpoints lie outside the image bounds.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<(f64, f64)>,
    pub lane_index: usize,
}

/// Directional ground-truth modes for one evaluation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCell {
    pub i: u32,
    pub j: u32,
    pub angles: Vec<f64>,
}

/// All-feasible-lanes evaluation sample: the union of every lane's rasterized
/// mask plus per-cell directional modes. Used for metrics only, never for
/// training.
#[derive(Debug, Clone)]
pub struct EvaluationSample {
    pub context: RoadContext,
    pub lanes: Array2<u8>,
    pub modes: Vec<ModeCell>,
}

impl EvaluationSample {
    pub fn lane_count_cells(&self) -> usize {
        self.lanes.iter().filter(|&&m| m != 0).count()
    }
}

/// Center of cell `(i, j)` of an `n`-cell grid spanning `extent` units.
pub(crate) fn cell_center(i: usize, j: usize, n: usize, extent: f64) -> (f64, f64) {
    let cell = extent / n as f64;
    ((j as f64 + 0.5) * cell, extent - (i as f64 + 0.5) * cell)
}

/// Angle of a direction vector, wrapped into [0, 2*pi).
pub(crate) fn angle_of(dx: f64, dy: f64) -> f64 {
    dy.atan2(dx).rem_euclid(std::f64::consts::TAU)
}

/// Circular distance between two angles, in [0, pi].
pub(crate) fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
