//! Rasterization of layouts into context grids, trajectory labels, and
//! all-feasible-lane evaluation samples.

use std::collections::HashMap;
use std::f64::consts::TAU;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::layout::{Lane, RoadLayout};
use super::{
    angle_of, cell_center, circ_dist, EvaluationSample, ModeCell, RoadContext, Trajectory,
    TrajectoryLabel, MAX_JITTER_CELLS, MODE_MERGE_RAD, STROKE_WIDTH_CELLS,
};

/// A point with the unit tangent of the polyline passing through it.
#[derive(Debug, Clone, Copy)]
struct Sample {
    x: f64,
    y: f64,
    tx: f64,
    ty: f64,
}

/// Resample a polyline at a fixed arc-length step, carrying unit tangents.
fn resample(points: &[(f64, f64)], step: f64) -> Vec<Sample> {
    let mut out = Vec::new();
    let mut carry = 0.0;
    for w in points.windows(2) {
        let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-12 {
            continue;
        }
        let (tx, ty) = (dx / len, dy / len);
        let mut s = carry;
        while s < len {
            out.push(Sample { x: w[0].0 + tx * s, y: w[0].1 + ty * s, tx, ty });
            s += step;
        }
        carry = s - len;
    }
    if let (Some(&last), Some(prev)) = (points.last(), out.last().copied()) {
        let (dx, dy) = (last.0 - prev.x, last.1 - prev.y);
        let len = (dx * dx + dy * dy).sqrt();
        if len > 1e-9 {
            out.push(Sample { x: last.0, y: last.1, tx: prev.tx, ty: prev.ty });
        }
    }
    out
}

/// Set every cell whose center lies within `radius` of `(x, y)` to `value`.
fn stamp_disc(grid: &mut Array2<f32>, extent: f64, x: f64, y: f64, radius: f64, value: f32) {
    let n = grid.nrows();
    let cell = extent / n as f64;
    let i_lo = (((extent - y - radius) / cell - 0.5).floor().max(0.0)) as usize;
    let i_hi = ((((extent - y + radius) / cell) + 0.5).ceil() as usize).min(n.saturating_sub(1));
    let j_lo = (((x - radius) / cell - 0.5).floor().max(0.0)) as usize;
    let j_hi = ((((x + radius) / cell) + 0.5).ceil() as usize).min(n.saturating_sub(1));
    if i_lo >= n || j_lo >= n {
        return;
    }
    let r2 = radius * radius;
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            let (cx, cy) = cell_center(i, j, n, extent);
            let (dx, dy) = (cx - x, cy - y);
            if dx * dx + dy * dy <= r2 {
                grid[[i, j]] = value;
            }
        }
    }
}

/// Rasterize the two context layers of a layout at full resolution.
///
/// The drivable region is the union of arm capsules and lane envelopes, both
/// padded by the road shoulder; markings draw the two-way medians and dashed
/// separators between same-direction lanes.
pub fn rasterize_context(layout: &RoadLayout) -> RoadContext {
    let n = layout.side();
    let extent = n as f64;
    let mut drivable = Array2::<f32>::zeros((n, n));
    let mut markings = Array2::<f32>::zeros((n, n));
    let scale = layout.params.scale();
    let shoulder = layout.shoulder();
    let center = layout.center();
    let step = 1.0_f64;

    for arm in &layout.arms {
        let (ux, uy) = (arm.angle.cos(), arm.angle.sin());
        let s0 = match layout.ring_radius {
            Some(r) => r + arm.width / 4.0,
            None => layout.blend_radius() * 0.5,
        };
        let mut s = s0;
        while s <= layout.outer_radius() {
            stamp_disc(
                &mut drivable,
                extent,
                center.0 + ux * s,
                center.1 + uy * s,
                arm.width / 2.0 + shoulder,
                1.0,
            );
            s += step;
        }
    }

    if let Some(ring_r) = layout.ring_radius {
        let ring_w = layout.arms.iter().map(|a| a.width).fold(0.0, f64::max);
        let steps = (TAU * ring_r / step).ceil() as usize;
        for k in 0..steps {
            let phi = TAU * k as f64 / steps as f64;
            stamp_disc(
                &mut drivable,
                extent,
                center.0 + ring_r * phi.cos(),
                center.1 + ring_r * phi.sin(),
                ring_w / 2.0 + shoulder,
                1.0,
            );
        }
    }

    for lane in &layout.lane_graph {
        let hw = layout.lane_half_width(lane.entry_arm).max(layout.lane_half_width(lane.exit_arm));
        for s in resample(&lane.points, step) {
            stamp_disc(&mut drivable, extent, s.x, s.y, hw + shoulder, 1.0);
        }
    }

    if layout.params.markings {
        let mark_r = (0.7 * scale).max(0.6);
        let dash = 6.0 * scale;
        for arm in &layout.arms {
            let (ux, uy) = (arm.angle.cos(), arm.angle.sin());
            let (rx, ry) = (uy, -ux);
            let s0 = match layout.ring_radius {
                Some(r) => r + arm.width / 2.0 + 4.0 * scale,
                None => layout.blend_radius(),
            };
            // Solid median between opposing directions.
            if arm.lanes_in > 0 && arm.lanes_out > 0 {
                let m = arm.width / 2.0 - arm.lanes_out as f64 * arm.lane_width();
                let mut s = s0;
                while s <= layout.outer_radius() {
                    stamp_disc(
                        &mut markings,
                        extent,
                        center.0 + ux * s + rx * m,
                        center.1 + uy * s + ry * m,
                        mark_r,
                        1.0,
                    );
                    s += step;
                }
            }
            // Dashed separators between same-direction lanes.
            for k in 1..arm.lanes_out {
                let m = arm.width / 2.0 - k as f64 * arm.lane_width();
                draw_dashed(&mut markings, extent, center, (ux, uy), (rx, ry), m, s0, layout.outer_radius(), dash, mark_r);
            }
            for k in 1..arm.lanes_in {
                let m = -arm.width / 2.0 + k as f64 * arm.lane_width();
                draw_dashed(&mut markings, extent, center, (ux, uy), (rx, ry), m, s0, layout.outer_radius(), dash, mark_r);
            }
        }
    }

    RoadContext { drivable, markings }
}

#[allow(clippy::too_many_arguments)]
fn draw_dashed(
    grid: &mut Array2<f32>,
    extent: f64,
    center: (f64, f64),
    u: (f64, f64),
    r: (f64, f64),
    offset: f64,
    s_from: f64,
    s_to: f64,
    dash: f64,
    radius: f64,
) {
    let mut s = s_from;
    while s <= s_to {
        if ((s - s_from) / dash) as usize % 2 == 0 {
            stamp_disc(
                grid,
                extent,
                center.0 + u.0 * s + r.0 * offset,
                center.1 + u.1 * s + r.1 * offset,
                radius,
                1.0,
            );
        }
        s += 1.0;
    }
}

/// Uniformly pick one lane of the layout and perturb it with smooth lateral
/// jitter of at most [`MAX_JITTER_CELLS`] context cells.
pub fn sample_trajectory(layout: &RoadLayout, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lane_index = rng.random_range(0..layout.lane_graph.len());
    let amplitude = rng.random_range(0.0..=MAX_JITTER_CELLS);
    let wavelength = layout.side() as f64 * rng.random_range(0.35..0.75);
    let phase = rng.random_range(0.0..TAU);

    let samples = resample(&layout.lane_graph[lane_index].points, 1.0);
    let points = samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let arc = k as f64;
            let off = amplitude * (TAU * arc / wavelength + phase).sin();
            // Perpendicular to the local tangent, on the right of travel.
            (s.x + s.ty * off, s.y - s.tx * off)
        })
        .collect();
    Trajectory { points, lane_index }
}

/// Stroke a polyline into a half-resolution mask, tracking for every masked
/// cell the tangent of the nearest polyline sample.
struct StrokeRaster {
    n: usize,
    extent: f64,
    best: HashMap<(usize, usize), (f64, f64, f64)>, // (dist2, tx, ty)
}

impl StrokeRaster {
    fn new(n: usize, extent: f64) -> Self {
        Self { n, extent, best: HashMap::new() }
    }

    fn add(&mut self, samples: &[Sample], radius: f64) {
        let cell = self.extent / self.n as f64;
        let r2 = radius * radius;
        for s in samples {
            let i_lo = ((self.extent - s.y - radius) / cell - 0.5).floor().max(0.0) as usize;
            let i_hi = (((self.extent - s.y + radius) / cell + 0.5).ceil() as usize)
                .min(self.n.saturating_sub(1));
            let j_lo = ((s.x - radius) / cell - 0.5).floor().max(0.0) as usize;
            let j_hi =
                (((s.x + radius) / cell + 0.5).ceil() as usize).min(self.n.saturating_sub(1));
            if i_lo >= self.n || j_lo >= self.n {
                continue;
            }
            for i in i_lo..=i_hi {
                for j in j_lo..=j_hi {
                    let (cx, cy) = cell_center(i, j, self.n, self.extent);
                    let (dx, dy) = (cx - s.x, cy - s.y);
                    let d2 = dx * dx + dy * dy;
                    if d2 <= r2 {
                        let e = self.best.entry((i, j)).or_insert((f64::INFINITY, 0.0, 0.0));
                        if d2 < e.0 {
                            *e = (d2, s.tx, s.ty);
                        }
                    }
                }
            }
        }
    }
}

/// Rasterize one training sample: the full-resolution context plus the
/// half-resolution trajectory label with per-cell unit tangents.
pub fn rasterize_sample(
    layout: &RoadLayout,
    traj: &Trajectory,
) -> Result<(RoadContext, TrajectoryLabel)> {
    let context = rasterize_context(layout);
    let label = rasterize_label(layout, traj, &context)?;
    Ok((context, label))
}

fn rasterize_label(
    layout: &RoadLayout,
    traj: &Trajectory,
    context: &RoadContext,
) -> Result<TrajectoryLabel> {
    let n_ctx = layout.side();
    let n = n_ctx / 2;
    let extent = n_ctx as f64;
    let label_cell = extent / n as f64;
    let radius = STROKE_WIDTH_CELLS / 2.0 * label_cell;

    let samples = resample(&traj.points, 0.5 * label_cell);
    let mut stroke = StrokeRaster::new(n, extent);
    stroke.add(&samples, radius);
    if stroke.best.is_empty() {
        return Err(Error::Rasterization("trajectory stroke covers no cells".into()));
    }

    let mut mask = Array2::<u8>::zeros((n, n));
    let mut nx = Array2::<f32>::zeros((n, n));
    let mut ny = Array2::<f32>::zeros((n, n));
    for (&(i, j), &(_, tx, ty)) in &stroke.best {
        let norm = (tx * tx + ty * ty).sqrt();
        mask[[i, j]] = 1;
        nx[[i, j]] = (tx / norm) as f32;
        ny[[i, j]] = (ty / norm) as f32;
        if !label_cell_drivable(&context.drivable, i, j) {
            return Err(Error::Rasterization(format!(
                "trajectory leaves the drivable region at label cell ({i}, {j})"
            )));
        }
    }
    Ok(TrajectoryLabel { mask, nx, ny })
}

/// A label-resolution cell is drivable when its whole 2x2 context block is.
pub fn label_cell_drivable(drivable: &Array2<f32>, i: usize, j: usize) -> bool {
    let block = [(2 * i, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j), (2 * i + 1, 2 * j + 1)];
    block.iter().all(|&(a, b)| drivable.get([a, b]).copied().unwrap_or(0.0) > 0.5)
}

/// Rasterize every lane of the layout without jitter, union the masks, and
/// collect per-cell direction modes, merging modes closer than
/// [`MODE_MERGE_RAD`]. Deterministic for a fixed layout.
pub fn build_eval_sample(layout: &RoadLayout) -> EvaluationSample {
    let context = rasterize_context(layout);
    let n_ctx = layout.side();
    let n = n_ctx / 2;
    let extent = n_ctx as f64;
    let label_cell = extent / n as f64;
    let radius = STROKE_WIDTH_CELLS / 2.0 * label_cell;

    let mut lanes = Array2::<u8>::zeros((n, n));
    let mut cell_angles: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for lane in &layout.lane_graph {
        let samples = resample(&lane.points, 0.5 * label_cell);
        let mut stroke = StrokeRaster::new(n, extent);
        stroke.add(&samples, radius);
        for (&(i, j), &(_, tx, ty)) in &stroke.best {
            lanes[[i, j]] = 1;
            cell_angles.entry((i, j)).or_default().push(angle_of(tx, ty));
        }
    }

    let mut modes: Vec<ModeCell> = cell_angles
        .into_iter()
        .map(|((i, j), angles)| ModeCell { i: i as u32, j: j as u32, angles: merge_modes(&angles) })
        .collect();
    modes.sort_by_key(|m| (m.i, m.j));
    EvaluationSample { context, lanes, modes }
}

/// Greedy circular clustering: each angle joins the first mode within the
/// merge threshold, and merged modes take the circular mean of their members.
pub(crate) fn merge_modes(angles: &[f64]) -> Vec<f64> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &a in angles {
        let mut placed = false;
        for c in clusters.iter_mut() {
            let mean = circular_mean(c);
            if circ_dist(a, mean) < MODE_MERGE_RAD {
                c.push(a);
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(vec![a]);
        }
    }
    let mut out: Vec<f64> = clusters.iter().map(|c| circular_mean(c)).collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    out
}

fn circular_mean(angles: &[f64]) -> f64 {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), &a| (s + a.sin(), c + a.cos()));
    s.atan2(c).rem_euclid(TAU)
}

#[cfg(test)]
mod tests {
    use super::super::layout::{generate_layout, GeometryParams, LayoutKind};
    use super::super::{circ_dist, train_corpus};
    use super::*;

    fn default_layout(kind: LayoutKind) -> RoadLayout {
        generate_layout(kind, &GeometryParams::default(), 7).unwrap()
    }

    #[test]
    fn four_arm_intersection_has_twelve_lanes() {
        let layout = default_layout(LayoutKind::Intersection);
        assert_eq!(layout.lane_graph.len(), 12);
    }

    #[test]
    fn straight_has_two_lanes() {
        let layout = default_layout(LayoutKind::Straight);
        assert_eq!(layout.lane_graph.len(), 2);
    }

    #[test]
    fn t_intersection_has_six_lanes() {
        let layout = default_layout(LayoutKind::TIntersection);
        assert_eq!(layout.lane_graph.len(), 6);
    }

    #[test]
    fn one_way_intersection_lane_count() {
        // Entries: two-way east/west + the one-way inbound arm; exits exclude
        // the entry arm. 2*(1+1... counted directly from the arm table:
        // arm1, arm3 (two-way, 1 lane in) -> 2 exits + one-way exit arm = 3
        // exits each minus own arm handled by construction; inbound one-way
        // arm has 2 lanes to 3 exits.
        let layout = default_layout(LayoutKind::OneWayIntersection);
        let mut expected = 0;
        for (ai, a) in layout.arms.iter().enumerate() {
            for (bi, b) in layout.arms.iter().enumerate() {
                if ai != bi && a.lanes_in > 0 && b.lanes_out > 0 {
                    expected += a.lanes_in;
                }
            }
        }
        assert_eq!(layout.lane_graph.len(), expected);
        assert!(expected > 0);
    }

    #[test]
    fn lane_endpoints_are_outside_image() {
        for layout in train_corpus(256).unwrap() {
            let s = layout.side() as f64;
            for lane in &layout.lane_graph {
                for p in [lane.points[0], *lane.points.last().unwrap()] {
                    assert!(
                        p.0 < 0.0 || p.0 >= s || p.1 < 0.0 || p.1 >= s,
                        "{}: endpoint {:?} inside image",
                        layout.name,
                        p
                    );
                }
            }
        }
    }

    #[test]
    fn generate_layout_is_deterministic() {
        let params = GeometryParams { angle_jitter: 0.1, ..GeometryParams::default() };
        let a = generate_layout(LayoutKind::Intersection, &params, 99).unwrap();
        let b = generate_layout(LayoutKind::Intersection, &params, 99).unwrap();
        assert_eq!(a.arms, b.arms);
        assert_eq!(a.lane_graph.len(), b.lane_graph.len());
        for (la, lb) in a.lane_graph.iter().zip(&b.lane_graph) {
            assert_eq!(la.points, lb.points);
        }
    }

    #[test]
    fn overlapping_arms_are_rejected() {
        let params = GeometryParams { arm_width: 60.0, curve_span: 0.3, ..Default::default() };
        assert!(generate_layout(LayoutKind::Curve, &params, 0).is_err());
    }

    #[test]
    fn trajectory_sampling_is_seeded() {
        let layout = default_layout(LayoutKind::Intersection);
        let a = sample_trajectory(&layout, 42);
        let b = sample_trajectory(&layout, 42);
        assert_eq!(a.lane_index, b.lane_index);
        assert_eq!(a.points, b.points);
        let c = sample_trajectory(&layout, 43);
        assert!(c.lane_index != a.lane_index || c.points != a.points);
    }

    #[test]
    fn trajectory_endpoints_outside_image() {
        let layout = default_layout(LayoutKind::Intersection);
        let s = layout.side() as f64;
        for seed in 0..20 {
            let t = sample_trajectory(&layout, seed);
            for p in [t.points[0], *t.points.last().unwrap()] {
                assert!(p.0 < 0.0 || p.0 >= s || p.1 < 0.0 || p.1 >= s);
            }
        }
    }

    #[test]
    fn trajectory_selection_is_uniform() {
        let layout = default_layout(LayoutKind::Intersection);
        let n = layout.lane_graph.len();
        let mut counts = vec![0usize; n];
        let draws = 10_000;
        for seed in 0..draws {
            counts[sample_trajectory(&layout, seed as u64).lane_index] += 1;
        }
        for (lane, &c) in counts.iter().enumerate() {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - 1.0 / n as f64).abs() <= 0.01,
                "lane {lane}: frequency {freq:.4} deviates from {:.4}",
                1.0 / n as f64
            );
        }
    }

    #[test]
    fn horizontal_trajectory_has_unit_x_tangents() {
        // straight_h runs along +x and -x; pick the lane traveling +x.
        let layout = generate_layout(
            LayoutKind::Straight,
            &GeometryParams { arm_width: 28.0, ..Default::default() },
            1,
        )
        .unwrap();
        let lane = layout
            .lane_graph
            .iter()
            .position(|l| {
                let a = &l.points[0];
                let b = l.points.last().unwrap();
                b.0 > a.0
            })
            .unwrap();
        let traj = Trajectory { points: layout.lane_graph[lane].points.clone(), lane_index: lane };
        let (_, label) = rasterize_sample(&layout, &traj).unwrap();
        assert!(label.mask_count() > 0);
        for ((i, j), &m) in label.mask.indexed_iter() {
            if m != 0 {
                assert!((label.nx[[i, j]] - 1.0).abs() < 1e-6, "nx at ({i},{j})");
                assert!(label.ny[[i, j]].abs() < 1e-6, "ny at ({i},{j})");
            }
        }
    }

    #[test]
    fn vertical_trajectory_points_up() {
        let layout = generate_layout(
            LayoutKind::Straight,
            &GeometryParams { orientation: std::f64::consts::FRAC_PI_2, ..Default::default() },
            1,
        )
        .unwrap();
        let lane = layout
            .lane_graph
            .iter()
            .position(|l| l.points.last().unwrap().1 > l.points[0].1)
            .unwrap();
        let traj = Trajectory { points: layout.lane_graph[lane].points.clone(), lane_index: lane };
        let (_, label) = rasterize_sample(&layout, &traj).unwrap();
        for ((i, j), &m) in label.mask.indexed_iter() {
            if m != 0 {
                assert!(label.nx[[i, j]].abs() < 1e-6);
                assert!((label.ny[[i, j]] - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn label_tangents_have_unit_norm() {
        for layout in train_corpus(256).unwrap() {
            for seed in 0..3 {
                let traj = sample_trajectory(&layout, seed);
                let (_, label) = rasterize_sample(&layout, &traj).unwrap();
                assert!(label.mask_count() > 0 && label.mask_count() <= label.side().pow(2));
                for ((i, j), &m) in label.mask.indexed_iter() {
                    if m != 0 {
                        let norm = (label.nx[[i, j]] as f64).hypot(label.ny[[i, j]] as f64);
                        assert!((norm - 1.0).abs() < 1e-6, "{}: norm {norm}", layout.name);
                    }
                }
            }
        }
    }

    #[test]
    fn lane_masks_stay_inside_drivable() {
        for layout in train_corpus(256).unwrap() {
            let context = rasterize_context(&layout);
            let eval = build_eval_sample(&layout);
            for ((i, j), &m) in eval.lanes.indexed_iter() {
                if m != 0 {
                    assert!(
                        label_cell_drivable(&context.drivable, i, j),
                        "{}: lane cell ({i}, {j}) outside drivable region",
                        layout.name
                    );
                }
            }
        }
    }

    #[test]
    fn eval_sample_is_deterministic() {
        let layout = default_layout(LayoutKind::YIntersection);
        let a = build_eval_sample(&layout);
        let b = build_eval_sample(&layout);
        assert_eq!(a.lanes, b.lanes);
        assert_eq!(a.modes, b.modes);
    }

    #[test]
    fn straight_eval_modes_oppose_across_lanes() {
        let layout = generate_layout(
            LayoutKind::Straight,
            &GeometryParams { arm_width: 32.0, ..Default::default() },
            1,
        )
        .unwrap();
        let eval = build_eval_sample(&layout);
        // Interior single-mode cells exist on both lanes, and their modes
        // differ by pi.
        let singles: Vec<&ModeCell> = eval
            .modes
            .iter()
            .filter(|m| m.angles.len() == 1 && m.j > 40 && m.j < 88)
            .collect();
        assert!(!singles.is_empty());
        let east: Vec<f64> = singles
            .iter()
            .filter(|m| circ_dist(m.angles[0], 0.0) < 0.1)
            .map(|m| m.angles[0])
            .collect();
        let west: Vec<f64> = singles
            .iter()
            .filter(|m| circ_dist(m.angles[0], std::f64::consts::PI) < 0.1)
            .map(|m| m.angles[0])
            .collect();
        assert!(!east.is_empty() && !west.is_empty());
        assert!((circ_dist(east[0], west[0]) - std::f64::consts::PI).abs() < 0.1);
    }

    #[test]
    fn intersection_center_cells_have_at_most_three_modes() {
        let layout = default_layout(LayoutKind::Intersection);
        let eval = build_eval_sample(&layout);
        let n = eval.lanes.nrows() as u32;
        let (lo, hi) = (n / 2 - n / 8, n / 2 + n / 8);
        let mut max_modes = 0;
        for m in &eval.modes {
            if m.i >= lo && m.i < hi && m.j >= lo && m.j < hi {
                max_modes = max_modes.max(m.angles.len());
            }
        }
        assert!(max_modes >= 2, "expected multimodal center cells");
        assert!(max_modes <= 3, "center cells carry {max_modes} modes");
    }

    #[test]
    fn eval_lanes_cover_jittered_trajectories() {
        let layout = default_layout(LayoutKind::TIntersection);
        let eval = build_eval_sample(&layout);
        // Dilate the eval mask by one cell (the jitter bound at label
        // resolution) and require every sampled mask inside it.
        let n = eval.lanes.nrows();
        let mut dilated = eval.lanes.clone();
        for ((i, j), &m) in eval.lanes.indexed_iter() {
            if m != 0 {
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (a, b) = (i as i64 + di, j as i64 + dj);
                        if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                            dilated[[a as usize, b as usize]] = 1;
                        }
                    }
                }
            }
        }
        for seed in 0..100 {
            let traj = sample_trajectory(&layout, seed);
            let (_, label) = rasterize_sample(&layout, &traj).unwrap();
            for ((i, j), &m) in label.mask.indexed_iter() {
                if m != 0 {
                    assert_eq!(dilated[[i, j]], 1, "seed {seed}: cell ({i},{j}) outside eval mask");
                }
            }
        }
    }

    #[test]
    fn mode_merging_clusters_nearby_angles() {
        let merged = merge_modes(&[0.0, 0.1, std::f64::consts::PI]);
        assert_eq!(merged.len(), 2);
        let merged = merge_modes(&[0.05, TAU - 0.05]);
        assert_eq!(merged.len(), 1, "wraparound angles should merge");
    }

    #[test]
    fn corpus_composition_matches_families() {
        let train = train_corpus(256).unwrap();
        assert_eq!(train.len(), 13);
        let count = |k: LayoutKind| train.iter().filter(|l| l.kind == k).count();
        assert_eq!(count(LayoutKind::Intersection), 2);
        assert_eq!(count(LayoutKind::Straight), 3);
        assert_eq!(count(LayoutKind::Curve), 1);
        assert_eq!(count(LayoutKind::TIntersection), 3);
        assert_eq!(count(LayoutKind::OneWayIntersection), 2);
        assert_eq!(count(LayoutKind::YIntersection), 1);
        assert_eq!(count(LayoutKind::Roundabout), 1);

        let test = test_corpus(256).unwrap();
        assert_eq!(test.len(), 8);
        let names: std::collections::HashSet<_> = train.iter().map(|l| l.name.clone()).collect();
        for t in &test {
            assert!(!names.contains(&t.name));
        }
    }

    use super::super::layout::test_corpus;
}
