//! Road-layout families and their directed lane graphs.
//!
//! A layout is a set of arms radiating from the image center plus a directed
//! lane polyline for every legal (entry arm, exit arm) connection. Lanes keep
//! right-hand traffic: a lane's center sits to the right of its direction of
//! travel. Connections through the junction are cubic Hermite blends, which
//! handle straight-through, turning, and lane-offset cases uniformly;
//! roundabouts add an arc along the circulating ring.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::REF_SIDE;

/// The road-layout families of the synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Intersection,
    Straight,
    Curve,
    TIntersection,
    OneWayIntersection,
    YIntersection,
    Roundabout,
}

impl LayoutKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LayoutKind::Intersection => "intersection",
            LayoutKind::Straight => "straight",
            LayoutKind::Curve => "curve",
            LayoutKind::TIntersection => "t_intersection",
            LayoutKind::OneWayIntersection => "one_way_intersection",
            LayoutKind::YIntersection => "y_intersection",
            LayoutKind::Roundabout => "roundabout",
        }
    }
}

/// Geometry knobs for one layout. Lengths are quoted in reference-resolution
/// cells (256 grid) and scaled to `side` internally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    /// Context grid side in cells.
    pub side: usize,
    /// Full arm width at reference scale; must lie in [20, 60].
    pub arm_width: f64,
    /// Lanes per direction on two-way arms; must lie in [1, 3].
    pub lanes_per_dir: usize,
    /// Whether to draw road markings.
    pub markings: bool,
    /// Global rotation of the arm pattern, radians.
    pub orientation: f64,
    /// Angle between the two arms of a curve layout.
    pub curve_span: f64,
    /// Arm count for intersections and roundabouts.
    pub arm_count: usize,
    /// Seeded per-arm angular perturbation amplitude, radians.
    pub angle_jitter: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            side: 256,
            arm_width: 32.0,
            lanes_per_dir: 1,
            markings: true,
            orientation: 0.0,
            curve_span: FRAC_PI_2,
            arm_count: 4,
            angle_jitter: 0.0,
        }
    }
}

impl GeometryParams {
    fn validate(&self) -> Result<()> {
        if !(20.0..=60.0).contains(&self.arm_width) {
            return Err(Error::Generation(format!(
                "arm width must be in [20, 60] reference cells, got {}",
                self.arm_width
            )));
        }
        if !(1..=3).contains(&self.lanes_per_dir) {
            return Err(Error::Generation(format!(
                "lanes per direction must be in [1, 3], got {}",
                self.lanes_per_dir
            )));
        }
        if self.side < 32 {
            return Err(Error::Generation(format!("side must be >= 32, got {}", self.side)));
        }
        Ok(())
    }

    /// Conversion factor from reference-scale lengths to this grid.
    pub fn scale(&self) -> f64 {
        self.side as f64 / REF_SIDE
    }
}

/// One road arm radiating from the image center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    /// Outward direction from the center, radians.
    pub angle: f64,
    /// Full width in context cells.
    pub width: f64,
    /// Inbound lanes (traveling toward the center).
    pub lanes_in: usize,
    /// Outbound lanes (traveling away from the center).
    pub lanes_out: usize,
}

impl Arm {
    fn unit(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }

    /// Right-hand perpendicular of the outward direction.
    fn right(&self) -> (f64, f64) {
        let (ux, uy) = self.unit();
        (uy, -ux)
    }

    fn lane_width(&self) -> f64 {
        self.width / (self.lanes_in + self.lanes_out) as f64
    }

    /// Signed offset of inbound lane `l` along the arm's right axis.
    fn inbound_offset(&self, l: usize) -> f64 {
        self.median() - (l as f64 + 0.5) * self.lane_width()
    }

    /// Signed offset of outbound lane `l` along the arm's right axis.
    fn outbound_offset(&self, l: usize) -> f64 {
        self.median() + (l as f64 + 0.5) * self.lane_width()
    }

    /// Boundary between the inbound and outbound halves, along right.
    fn median(&self) -> f64 {
        self.width / 2.0 - self.lanes_out as f64 * self.lane_width()
    }
}

/// One directed lane: a dense center polyline from an entry arm to an exit
/// arm, with endpoints outside the image bounds.
#[derive(Debug, Clone)]
pub struct Lane {
    pub entry_arm: usize,
    pub exit_arm: usize,
    pub points: Vec<(f64, f64)>,
}

/// A procedurally generated road layout with its directed lane graph.
#[derive(Debug, Clone)]
pub struct RoadLayout {
    pub kind: LayoutKind,
    pub name: String,
    pub params: GeometryParams,
    pub seed: u64,
    pub arms: Vec<Arm>,
    /// Circulating ring radius for roundabouts, context cells.
    pub ring_radius: Option<f64>,
    pub lane_graph: Vec<Lane>,
}

impl RoadLayout {
    pub fn side(&self) -> usize {
        self.params.side
    }

    pub fn center(&self) -> (f64, f64) {
        (self.params.side as f64 / 2.0, self.params.side as f64 / 2.0)
    }

    /// Half-width of each lane stroke envelope, context cells.
    pub(crate) fn lane_half_width(&self, arm: usize) -> f64 {
        self.arms[arm].lane_width() / 2.0
    }

    /// Distance from the center at which junction blends start.
    pub(crate) fn blend_radius(&self) -> f64 {
        let max_hw = self.arms.iter().map(|a| a.width / 2.0).fold(0.0, f64::max);
        max_hw + 10.0 * self.params.scale()
    }

    /// Distance from the center at which lane polylines start and end;
    /// guaranteed outside the image for any arm angle.
    pub(crate) fn outer_radius(&self) -> f64 {
        0.76 * self.params.side as f64
    }

    /// Road shoulder added around lanes and arms, context cells.
    pub(crate) fn shoulder(&self) -> f64 {
        (3.0 * self.params.scale()).max(1.5)
    }
}

fn vadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

fn vscale(a: (f64, f64), s: f64) -> (f64, f64) {
    (a.0 * s, a.1 * s)
}

fn vnorm(a: (f64, f64)) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

/// Cubic Hermite blend from `p1` (tangent `t1`) to `p2` (tangent `t2`),
/// with tangent magnitudes set to the chord length.
fn hermite_blend(
    p1: (f64, f64),
    t1: (f64, f64),
    p2: (f64, f64),
    t2: (f64, f64),
    samples: usize,
) -> Vec<(f64, f64)> {
    let chord = vnorm((p2.0 - p1.0, p2.1 - p1.1)).max(1e-9);
    let m1 = vscale(t1, chord);
    let m2 = vscale(t2, chord);
    (1..samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let t2_ = t * t;
            let t3 = t2_ * t;
            let h00 = 2.0 * t3 - 3.0 * t2_ + 1.0;
            let h10 = t3 - 2.0 * t2_ + t;
            let h01 = -2.0 * t3 + 3.0 * t2_;
            let h11 = t3 - t2_;
            (
                h00 * p1.0 + h10 * m1.0 + h01 * p2.0 + h11 * m2.0,
                h00 * p1.1 + h10 * m1.1 + h01 * p2.1 + h11 * m2.1,
            )
        })
        .collect()
}

/// Straight run along an arm between two radii at a fixed lateral offset.
fn arm_segment(
    center: (f64, f64),
    arm: &Arm,
    offset: f64,
    r_from: f64,
    r_to: f64,
    step: f64,
) -> Vec<(f64, f64)> {
    let u = arm.unit();
    let r = arm.right();
    let base = vadd(center, vscale(r, offset));
    let len = (r_to - r_from).abs();
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| {
            let t = r_from + (r_to - r_from) * k as f64 / n as f64;
            vadd(base, vscale(u, t))
        })
        .collect()
}

/// Build the lane polyline connecting `entry` to `exit` through the junction.
fn connect_lanes(
    layout_center: (f64, f64),
    entry: &Arm,
    entry_idx: usize,
    lane_in: usize,
    exit: &Arm,
    exit_idx: usize,
    lane_out: usize,
    r_blend: f64,
    r_outer: f64,
    step: f64,
) -> Lane {
    let o_in = entry.inbound_offset(lane_in);
    let o_out = exit.outbound_offset(lane_out);

    // Inbound: from outside toward the blend radius (reverse arm order).
    let mut points = arm_segment(layout_center, entry, o_in, r_outer, r_blend, step);
    let p1 = *points.last().expect("segment is non-empty");
    let (ux, uy) = entry.unit();
    let h_in = (-ux, -uy);

    let exit_pts = arm_segment(layout_center, exit, o_out, r_blend, r_outer, step);
    let p2 = exit_pts[0];
    let h_out = exit.unit();

    points.extend(hermite_blend(p1, h_in, p2, h_out, 24));
    points.extend(&exit_pts[1..]);
    Lane { entry_arm: entry_idx, exit_arm: exit_idx, points }
}

/// Build a roundabout lane: entry arm, merge onto the counter-clockwise
/// ring, circulate, and diverge onto the exit arm.
#[allow(clippy::too_many_arguments)]
fn connect_roundabout(
    center: (f64, f64),
    entry: &Arm,
    entry_idx: usize,
    exit: &Arm,
    exit_idx: usize,
    ring_r: f64,
    r_join: f64,
    r_outer: f64,
    step: f64,
) -> Lane {
    let merge_gap = 0.45;
    let phi_enter = entry.angle + merge_gap;
    let phi_exit = exit.angle - merge_gap;

    let ring_point = |phi: f64| vadd(center, (ring_r * phi.cos(), ring_r * phi.sin()));
    let ring_tangent = |phi: f64| (-phi.sin(), phi.cos());

    let o_in = entry.inbound_offset(0);
    let o_out = exit.outbound_offset(0);

    let mut points = arm_segment(center, entry, o_in, r_outer, r_join, step);
    let p1 = *points.last().expect("segment is non-empty");
    let (ux, uy) = entry.unit();
    points.extend(hermite_blend(p1, (-ux, -uy), ring_point(phi_enter), ring_tangent(phi_enter), 16));

    let sweep = (phi_exit - phi_enter).rem_euclid(TAU);
    let arc_steps = ((sweep * ring_r / step).ceil() as usize).max(2);
    for k in 1..=arc_steps {
        let phi = phi_enter + sweep * k as f64 / arc_steps as f64;
        points.push(ring_point(phi));
    }

    let exit_pts = arm_segment(center, exit, o_out, r_join, r_outer, step);
    points.extend(hermite_blend(
        *points.last().expect("arc is non-empty"),
        ring_tangent(phi_exit),
        exit_pts[0],
        exit.unit(),
        16,
    ));
    points.extend(&exit_pts[1..]);
    Lane { entry_arm: entry_idx, exit_arm: exit_idx, points }
}

/// Generate a road layout deterministically from its kind, geometry
/// parameters, and seed.
///
/// The lane graph connects every inbound arm to every legal outbound arm
/// (never back onto the same arm). Arms whose widths would overlap at the
/// blend radius are rejected as infeasible.
pub fn generate_layout(kind: LayoutKind, params: &GeometryParams, seed: u64) -> Result<RoadLayout> {
    params.validate()?;
    let scale = params.scale();
    let w = params.arm_width * scale;
    let lanes = params.lanes_per_dir;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let two_way = |angle: f64| Arm { angle, width: w, lanes_in: lanes, lanes_out: lanes };

    let mut arms: Vec<Arm> = match kind {
        LayoutKind::Intersection | LayoutKind::Roundabout => {
            let n = params.arm_count.clamp(3, 6);
            (0..n).map(|k| two_way(params.orientation + TAU * k as f64 / n as f64)).collect()
        }
        LayoutKind::Straight => {
            vec![two_way(params.orientation), two_way(params.orientation + PI)]
        }
        LayoutKind::Curve => {
            vec![two_way(params.orientation), two_way(params.orientation + params.curve_span)]
        }
        LayoutKind::TIntersection => vec![
            two_way(params.orientation),
            two_way(params.orientation + FRAC_PI_2),
            two_way(params.orientation + PI),
        ],
        LayoutKind::YIntersection => (0..3)
            .map(|k| two_way(params.orientation + TAU * k as f64 / 3.0))
            .collect(),
        LayoutKind::OneWayIntersection => {
            // A one-way street crossing a two-way street: arm 0 carries only
            // outbound traffic, arm 2 only inbound.
            let o = params.orientation;
            vec![
                Arm { angle: o, width: w, lanes_in: 0, lanes_out: 2 * lanes },
                two_way(o + FRAC_PI_2),
                Arm { angle: o + PI, width: w, lanes_in: 2 * lanes, lanes_out: 0 },
                two_way(o + 3.0 * FRAC_PI_2),
            ]
        }
    };

    if params.angle_jitter > 0.0 {
        for arm in &mut arms {
            arm.angle += rng.random_range(-params.angle_jitter..=params.angle_jitter);
        }
    }
    for arm in &mut arms {
        arm.angle = arm.angle.rem_euclid(TAU);
    }

    let mut layout = RoadLayout {
        kind,
        name: kind.as_str().to_string(),
        params: params.clone(),
        seed,
        arms,
        ring_radius: match kind {
            LayoutKind::Roundabout => Some((0.19 * params.side as f64).max(2.0 * w)),
            _ => None,
        },
        lane_graph: Vec::new(),
    };

    check_arm_separation(&layout)?;

    let center = layout.center();
    let r_blend = layout.blend_radius();
    let r_outer = layout.outer_radius();
    let step = 2.0_f64.max(2.0 * scale);

    let mut lanes_out = Vec::new();
    for (ai, a) in layout.arms.iter().enumerate() {
        for (bi, b) in layout.arms.iter().enumerate() {
            if ai == bi || a.lanes_in == 0 || b.lanes_out == 0 {
                continue;
            }
            for l in 0..a.lanes_in {
                let l_out = l.min(b.lanes_out - 1);
                let lane = match layout.ring_radius {
                    Some(ring_r) => {
                        let r_join = ring_r + 0.5 * w + 6.0 * scale;
                        connect_roundabout(center, a, ai, b, bi, ring_r, r_join, r_outer, step)
                    }
                    None => connect_lanes(center, a, ai, l, b, bi, l_out, r_blend, r_outer, step),
                };
                lanes_out.push(lane);
            }
        }
    }
    if lanes_out.is_empty() {
        return Err(Error::Generation("layout produced an empty lane graph".into()));
    }
    layout.lane_graph = lanes_out;
    Ok(layout)
}

/// Reject arm sets whose mouths overlap at the blend radius.
fn check_arm_separation(layout: &RoadLayout) -> Result<()> {
    let r = layout.blend_radius();
    for (i, a) in layout.arms.iter().enumerate() {
        for (j, b) in layout.arms.iter().enumerate().skip(i + 1) {
            let gap = super::circ_dist(a.angle, b.angle);
            let needed = 2.0 * ((a.width + b.width) / (4.0 * r)).min(1.0).asin();
            if gap < needed * 0.95 {
                return Err(Error::Generation(format!(
                    "arms {i} and {j} overlap: angular gap {gap:.3} < required {needed:.3}"
                )));
            }
        }
    }
    Ok(())
}

fn named(
    kind: LayoutKind,
    name: &str,
    seed: u64,
    mutate: impl FnOnce(&mut GeometryParams),
) -> Result<RoadLayout> {
    let mut params = GeometryParams::default();
    mutate(&mut params);
    let mut layout = generate_layout(kind, &params, seed)?;
    layout.name = name.to_string();
    Ok(layout)
}

/// The 13-layout training-distribution corpus: 2 intersections, 3 straights,
/// 1 curve, 3 T-intersections, 2 one-way intersections, 1 Y-intersection,
/// and 1 roundabout.
pub fn train_corpus(side: usize) -> Result<Vec<RoadLayout>> {
    use LayoutKind::*;
    let s = |p: &mut GeometryParams, side: usize| p.side = side;
    Ok(vec![
        named(Intersection, "intersection_a", 11, |p| {
            s(p, side);
        })?,
        named(Intersection, "intersection_b", 12, |p| {
            s(p, side);
            p.arm_width = 40.0;
            p.markings = false;
        })?,
        named(Straight, "straight_h", 13, |p| {
            s(p, side);
            p.arm_width = 28.0;
        })?,
        named(Straight, "straight_v", 14, |p| {
            s(p, side);
            p.orientation = FRAC_PI_2;
            p.arm_width = 36.0;
        })?,
        named(Straight, "straight_diag", 15, |p| {
            s(p, side);
            p.orientation = PI / 4.0;
        })?,
        named(Curve, "curve_90", 16, |p| {
            s(p, side);
            p.orientation = PI;
        })?,
        named(TIntersection, "t_intersection_a", 17, |p| {
            s(p, side);
        })?,
        named(TIntersection, "t_intersection_b", 18, |p| {
            s(p, side);
            p.orientation = FRAC_PI_2;
            p.arm_width = 36.0;
        })?,
        named(TIntersection, "t_intersection_c", 19, |p| {
            s(p, side);
            p.orientation = PI;
            p.arm_width = 28.0;
        })?,
        named(OneWayIntersection, "one_way_ns", 20, |p| {
            s(p, side);
            p.orientation = FRAC_PI_2;
        })?,
        named(OneWayIntersection, "one_way_ew", 21, |p| {
            s(p, side);
        })?,
        named(YIntersection, "y_intersection", 22, |p| {
            s(p, side);
            p.orientation = FRAC_PI_2;
        })?,
        named(Roundabout, "roundabout", 23, |p| {
            s(p, side);
            p.arm_width = 24.0;
        })?,
    ])
}

/// The 8-layout test-distribution corpus: structural variations of the
/// training families with altered lane or connection counts.
pub fn test_corpus(side: usize) -> Result<Vec<RoadLayout>> {
    use LayoutKind::*;
    let s = |p: &mut GeometryParams, side: usize| p.side = side;
    Ok(vec![
        named(Intersection, "test_intersection_2lane", 31, |p| {
            s(p, side);
            p.lanes_per_dir = 2;
            p.arm_width = 48.0;
        })?,
        named(Straight, "test_straight_2lane", 32, |p| {
            s(p, side);
            p.lanes_per_dir = 2;
            p.arm_width = 44.0;
            p.orientation = PI / 6.0;
        })?,
        named(Curve, "test_curve_135", 33, |p| {
            s(p, side);
            p.orientation = PI;
            p.curve_span = 3.0 * PI / 4.0;
        })?,
        named(TIntersection, "test_t_2lane", 34, |p| {
            s(p, side);
            p.lanes_per_dir = 2;
            p.arm_width = 48.0;
            p.orientation = 3.0 * FRAC_PI_2;
        })?,
        named(YIntersection, "test_y_rotated", 35, |p| {
            s(p, side);
            p.orientation = PI / 5.0;
            p.arm_width = 36.0;
        })?,
        named(Roundabout, "test_roundabout_3arm", 36, |p| {
            s(p, side);
            p.arm_count = 3;
            p.arm_width = 24.0;
        })?,
        named(OneWayIntersection, "test_one_way_rotated", 37, |p| {
            s(p, side);
            p.orientation = PI / 4.0;
        })?,
        named(Intersection, "test_intersection_5arm", 38, |p| {
            s(p, side);
            p.arm_count = 5;
            p.arm_width = 24.0;
        })?,
    ])
}

/// Three-layout corpus for CI-scale training runs.
pub fn desk_train_corpus(side: usize) -> Result<Vec<RoadLayout>> {
    let full = train_corpus(side)?;
    Ok(full
        .into_iter()
        .filter(|l| matches!(l.name.as_str(), "intersection_a" | "straight_h" | "t_intersection_a"))
        .collect())
}

/// Held-out structural variations scaled for CI runs.
pub fn desk_test_corpus(side: usize) -> Result<Vec<RoadLayout>> {
    let full = test_corpus(side)?;
    Ok(full
        .into_iter()
        .filter(|l| matches!(l.name.as_str(), "test_t_2lane" | "test_curve_135"))
        .collect())
}
