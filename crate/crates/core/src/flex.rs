//! Planar flexes of line frameworks.
//!
//! Two linkages are supported: the triangular prism with one rung removed
//! (a four-bar whose ground and coupler are the two flat triangles) and the
//! 4-cycle. Poses are computed in floating point from circle intersections.
//! A witness found here is evidence, not proof; a `None` is not a proof of
//! rigidity either.

use nalgebra::DMatrix;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::framework::{Edge, Framework, Graph};
use crate::gallery::prism_graph;
use crate::linalg::float_rank;
use crate::scalar::to_f64;

pub type Point = [f64; 2];

/// Relative tolerance on retained squared edge lengths.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Target |g| for bisection on the removed edge.
pub const BISECTION_TOL: f64 = 1e-12;
/// Slack allowed when circles are tangent up to rounding.
pub const TANGENCY_SLACK: f64 = 1e-12;
/// A returned realization must move some squared distance by more than this.
pub const NONCONGRUENCE_MARGIN: f64 = 1e-4;
/// Roots this close to the starting pose are ignored.
pub const MIN_THETA: f64 = 1e-3;

/// Which side of the line from the first center to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Direction of the sweep and intersection side; ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub backward: bool,
    pub side: Side,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { backward: false, side: Side::Left },
        Branch { backward: false, side: Side::Right },
        Branch { backward: true, side: Side::Left },
        Branch { backward: true, side: Side::Right },
    ];

    fn direction(self) -> f64 {
        if self.backward {
            -1.0
        } else {
            1.0
        }
    }
}

/// Intersection of two circles given by center and squared radius.
pub fn circle_circle_intersect(c1: Point, r1_sq: f64, c2: Point, r2_sq: f64, side: Side) -> Result<Point> {
    let dv = [c2[0] - c1[0], c2[1] - c1[1]];
    let d_sq = dv[0] * dv[0] + dv[1] * dv[1];
    if d_sq == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    let t = (d_sq + r1_sq - r2_sq) / (2.0 * d_sq);
    let mut h_sq = r1_sq / d_sq - t * t;
    if h_sq < 0.0 {
        if h_sq < -TANGENCY_SLACK * (1.0 + r1_sq.max(r2_sq)) / d_sq.max(1.0) {
            return Err(Error::NoIntersection);
        }
        h_sq = 0.0;
    }
    let h = h_sq.sqrt() * side.sign();
    Ok([c1[0] + t * dv[0] - h * dv[1], c1[1] + t * dv[1] + h * dv[0]])
}

fn dist_sq(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn is_four_cycle(g: &Graph) -> bool {
    g.n() == 4 && g.m() == 4 && (1..=4).all(|v| g.degree(v) == 2) && g.is_connected()
}

/// The linkage traced for a line framework.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linkage {
    /// Prism with rung `(rung, rung + 3)` removed.
    PrismMinusRung { rung: usize },
    /// 4-cycle `u-v-w-z` with bar `u-v` held on the axis, `w` cranked about
    /// `v`, and `z` closing the loop.
    FourCycle { u: usize, v: usize, w: usize, z: usize },
}

impl Linkage {
    /// Chooses the linkage for `f`: for a prism `edge` is the removed rung,
    /// for a 4-cycle it is the fixed bar.
    pub fn for_framework(f: &Framework, edge: Edge) -> Result<Linkage> {
        if f.dim() != 1 {
            return Err(Error::WrongDimension { expected: 1, got: f.dim() });
        }
        let (a, b) = (edge.0.min(edge.1), edge.0.max(edge.1));
        let g = f.graph();
        if g == &prism_graph() {
            if b != a + 3 || a > 3 {
                return Err(Error::InvalidArgument(format!("{a}-{b} is not a rung of the prism")));
            }
            if !flat_triangles_rigid(f) {
                return Err(Error::InvalidArgument("prism triangles are not flat rigid bodies".into()));
            }
            Ok(Linkage::PrismMinusRung { rung: a })
        } else if is_four_cycle(g) {
            if !g.has_edge(a, b) {
                return Err(Error::InvalidArgument(format!("{a}-{b} is not an edge of the cycle")));
            }
            let other = |x: usize, not: usize| g.neighbors(x).into_iter().find(|&y| y != not).expect("degree 2");
            let w = other(b, a);
            let z = other(a, b);
            let pts = f.config();
            if pts.point(a) == pts.point(b) || pts.point(w) == pts.point(b) {
                return Err(Error::InvalidArgument("cycle has a zero-length bar".into()));
            }
            Ok(Linkage::FourCycle { u: a, v: b, w, z })
        } else {
            Err(Error::InvalidArgument("flex tracing supports the prism graph and 4-cycles".into()))
        }
    }

    /// Edge whose length is dropped and then re-imposed by root finding.
    pub fn removed_edge(&self) -> Option<Edge> {
        match *self {
            Linkage::PrismMinusRung { rung } => Some((rung, rung + 3)),
            Linkage::FourCycle { .. } => None,
        }
    }

    fn retained_edges(&self, g: &Graph) -> Vec<Edge> {
        let removed = self.removed_edge();
        g.edges().iter().copied().filter(|&e| Some(e) != removed).collect()
    }
}

/// Exact check that each triangle of the prism is a flat rigid body:
/// distinct points with the middle one strictly between the others.
pub fn flat_triangles_rigid(f: &Framework) -> bool {
    let x = |v: usize| f.config().point(v)[0].clone();
    [[1, 2, 3], [4, 5, 6]].iter().all(|tri| {
        let mut pts: Vec<_> = tri.iter().map(|&v| x(v)).collect();
        pts.sort();
        let (lo, mid, hi) = (&pts[0], &pts[1], &pts[2]);
        lo < mid && mid < hi && (mid - lo).abs() + (hi - mid).abs() == (hi - lo).abs()
    })
}

struct LineData {
    x: Vec<f64>,
}

impl LineData {
    fn new(f: &Framework) -> Self {
        LineData { x: f.config().points().iter().map(|p| to_f64(&p[0])).collect() }
    }

    fn at(&self, v: usize) -> f64 {
        self.x[v - 1]
    }

    fn axis(&self, v: usize) -> Point {
        [self.at(v), 0.0]
    }

    fn len_sq(&self, a: usize, b: usize) -> f64 {
        (self.at(a) - self.at(b)).powi(2)
    }

    /// Endpoint of bar `pivot–moving` rotated by θ from its line position.
    fn crank(&self, pivot: usize, moving: usize, theta: f64) -> Point {
        let len = (self.at(moving) - self.at(pivot)).abs();
        let base = if self.at(moving) >= self.at(pivot) { 0.0 } else { std::f64::consts::PI };
        [self.at(pivot) + len * (base + theta).cos(), len * (base + theta).sin()]
    }
}

fn pose(line: &LineData, linkage: Linkage, theta: f64, side: Side) -> Result<Vec<Point>> {
    let degenerate = |e: Error| Error::Degenerate(format!("{e} at theta = {theta}"));
    match linkage {
        Linkage::PrismMinusRung { rung } => {
            let mut others = [1, 2, 3].into_iter().filter(|&r| r != rung);
            let (b, c) = (others.next().expect("two rungs"), others.next().expect("two rungs"));
            let mut q = vec![[0.0; 2]; 6];
            for v in 1..=3 {
                q[v - 1] = line.axis(v);
            }
            q[b + 2] = line.crank(b, b + 3, theta);
            q[c + 2] =
                circle_circle_intersect(q[c - 1], line.len_sq(c, c + 3), q[b + 2], line.len_sq(b + 3, c + 3), side)
                    .map_err(degenerate)?;
            // the rung endpoint rides along the flat triangle 4-5-6
            let s = (line.at(rung + 3) - line.at(b + 3)) / (line.at(c + 3) - line.at(b + 3));
            q[rung + 2] = [
                q[b + 2][0] + s * (q[c + 2][0] - q[b + 2][0]),
                q[b + 2][1] + s * (q[c + 2][1] - q[b + 2][1]),
            ];
            Ok(q)
        }
        Linkage::FourCycle { u, v, w, z } => {
            let mut q = vec![[0.0; 2]; 4];
            q[u - 1] = line.axis(u);
            q[v - 1] = line.axis(v);
            q[w - 1] = line.crank(v, w, theta);
            q[z - 1] = circle_circle_intersect(q[u - 1], line.len_sq(u, z), q[w - 1], line.len_sq(w, z), side)
                .map_err(degenerate)?;
            Ok(q)
        }
    }
}

/// Pose of the prism-minus-rung linkage at angle θ: triangle 1-2-3 pinned
/// on the x-axis, the first remaining rung rotated by θ, the second closed
/// by a circle intersection, and the last vertex carried rigidly.
pub fn prism_ladder_pose(f: &Framework, removed: Edge, theta: f64, side: Side) -> Result<Vec<Point>> {
    let linkage = Linkage::for_framework(f, removed)?;
    if !matches!(linkage, Linkage::PrismMinusRung { .. }) {
        return Err(Error::InvalidArgument("prism_ladder_pose needs the prism graph".into()));
    }
    pose(&LineData::new(f), linkage, theta, side)
}

/// Largest |Δ‖q_i − q_j‖²| over retained edges.
pub fn retained_residual(f: &Framework, linkage: &Linkage, q: &[Point]) -> f64 {
    let line = LineData::new(f);
    linkage
        .retained_edges(f.graph())
        .iter()
        .map(|&(a, b)| (dist_sq(q[a - 1], q[b - 1]) - line.len_sq(a, b)).abs())
        .fold(0.0, f64::max)
}

fn residual_bound(f: &Framework) -> f64 {
    let line = LineData::new(f);
    let max_len = f.graph().edges().iter().map(|&(a, b)| line.len_sq(a, b)).fold(0.0, f64::max);
    RESIDUAL_TOL * (1.0 + max_len)
}

/// Largest |Δ squared distance| over all vertex pairs against the line positions.
pub fn max_pair_discrepancy(f: &Framework, q: &[Point]) -> f64 {
    let line = LineData::new(f);
    let n = f.n();
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|(i, j)| (dist_sq(q[i - 1], q[j - 1]) - line.len_sq(i, j)).abs())
        .fold(0.0, f64::max)
}

/// Numerical affine span of a planar point set.
pub fn planar_span(q: &[Point]) -> usize {
    if q.is_empty() {
        return 0;
    }
    let n = q.len() as f64;
    let cx = q.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = q.iter().map(|p| p[1]).sum::<f64>() / n;
    let m = DMatrix::from_fn(q.len(), 2, |i, j| if j == 0 { q[i][0] - cx } else { q[i][1] - cy });
    float_rank(&m).unwrap_or(0)
}

/// Sweep settings.
#[derive(Clone, Copy, Debug)]
pub struct FlexOptions {
    /// Sweep |θ| over `(0, theta_max]`.
    pub theta_max: f64,
    /// Grid steps per branch.
    pub grid: usize,
}

impl Default for FlexOptions {
    fn default() -> Self {
        FlexOptions { theta_max: std::f64::consts::PI, grid: 10_000 }
    }
}

/// A planar realization equivalent to a line framework but not congruent to it.
#[derive(Clone, Debug, PartialEq)]
pub struct FlexWitness {
    pub linkage: Linkage,
    pub branch: Branch,
    pub theta: f64,
    pub points: Vec<Point>,
    /// Largest retained-edge residual (squared lengths).
    pub residual: f64,
    /// |g(θ)| on the removed edge; zero for the 4-cycle.
    pub removed_residual: f64,
    pub discrepancy: f64,
    pub span: usize,
}

impl FlexWitness {
    /// Largest squared-length residual over every edge of the framework.
    pub fn max_edge_residual(&self) -> f64 {
        self.residual.max(self.removed_residual)
    }
}

fn removed_gap(line: &LineData, linkage: &Linkage, q: &[Point]) -> f64 {
    match linkage.removed_edge() {
        Some((a, b)) => dist_sq(q[a - 1], q[b - 1]) - line.len_sq(a, b),
        None => 0.0,
    }
}

/// Searches each branch for a pose where the removed edge regains its
/// length (prism) or where the cycle has visibly moved (4-cycle).
///
/// Branches are scanned in lexicographic order; the first branch with a
/// root returns its smallest-|θ| root.
pub fn find_alternate_realization(f: &Framework, edge: Edge, opts: &FlexOptions) -> Result<Option<FlexWitness>> {
    let linkage = Linkage::for_framework(f, edge)?;
    let line = LineData::new(f);
    let bound = residual_bound(f);
    for branch in Branch::ALL {
        let found = match linkage {
            Linkage::PrismMinusRung { .. } => scan_for_root(f, &line, linkage, branch, opts, bound),
            Linkage::FourCycle { .. } => scan_for_motion(f, &line, linkage, branch, opts, bound),
        };
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn witness(
    f: &Framework,
    line: &LineData,
    linkage: Linkage,
    branch: Branch,
    theta: f64,
    q: Vec<Point>,
    bound: f64,
) -> Option<FlexWitness> {
    let residual = retained_residual(f, &linkage, &q);
    let removed_residual = removed_gap(line, &linkage, &q).abs();
    let discrepancy = max_pair_discrepancy(f, &q);
    let span = planar_span(&q);
    let ok = residual <= bound
        && removed_residual <= bound
        && discrepancy > NONCONGRUENCE_MARGIN
        && span == 2;
    ok.then_some(FlexWitness { linkage, branch, theta, points: q, residual, removed_residual, discrepancy, span })
}

fn scan_for_root(
    f: &Framework,
    line: &LineData,
    linkage: Linkage,
    branch: Branch,
    opts: &FlexOptions,
    bound: f64,
) -> Option<FlexWitness> {
    let g = |theta: f64| pose(line, linkage, theta, branch.side).ok().map(|q| removed_gap(line, &linkage, &q));
    let step = opts.theta_max / opts.grid as f64;
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..=opts.grid {
        let theta = branch.direction() * step * k as f64;
        let Some(val) = g(theta) else {
            prev = None;
            continue;
        };
        if theta.abs() <= MIN_THETA {
            prev = None;
            continue;
        }
        if val == 0.0 {
            let q = pose(line, linkage, theta, branch.side).ok()?;
            if let Some(w) = witness(f, line, linkage, branch, theta, q, bound) {
                return Some(w);
            }
        }
        if let Some((t0, v0)) = prev {
            if v0 * val < 0.0 {
                if let Some(root) = bisect(&g, t0, v0, theta) {
                    let q = pose(line, linkage, root, branch.side).ok()?;
                    if let Some(w) = witness(f, line, linkage, branch, root, q, bound) {
                        return Some(w);
                    }
                }
            }
        }
        prev = Some((theta, val));
    }
    None
}

fn bisect(g: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut g_lo: f64, mut hi: f64) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid.abs() <= BISECTION_TOL {
            return Some(mid);
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < f64::EPSILON * lo.abs().max(1.0) {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    g(mid).filter(|v| v.abs() <= BISECTION_TOL).map(|_| mid)
}

/// For the 4-cycle every valid pose is an equivalent realization; pick the
/// one that moves the pairwise distances the most.
fn scan_for_motion(
    f: &Framework,
    line: &LineData,
    linkage: Linkage,
    branch: Branch,
    opts: &FlexOptions,
    bound: f64,
) -> Option<FlexWitness> {
    let step = opts.theta_max / opts.grid as f64;
    let mut best: Option<FlexWitness> = None;
    for k in 1..=opts.grid {
        let theta = branch.direction() * step * k as f64;
        if theta.abs() <= MIN_THETA {
            continue;
        }
        let Ok(q) = pose(line, linkage, theta, branch.side) else { continue };
        if let Some(w) = witness(f, line, linkage, branch, theta, q, bound) {
            if best.as_ref().is_none_or(|b| w.discrepancy > b.discrepancy) {
                best = Some(w);
            }
        }
    }
    best
}

/// Samples of one flex branch.
#[derive(Clone, Debug, PartialEq)]
pub struct FlexPath {
    pub linkage: Linkage,
    pub branch: Branch,
    pub thetas: Vec<f64>,
    pub poses: Vec<Vec<Point>>,
    pub residuals: Vec<f64>,
    /// g(θ) on the removed edge at each sample (zeros for the 4-cycle).
    pub removed_gaps: Vec<f64>,
}

impl FlexPath {
    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }
}

/// Evenly spaced poses over the connected part of the branch that contains
/// the starting pose.
pub fn trace_flex(f: &Framework, edge: Edge, branch: Branch, steps: usize, opts: &FlexOptions) -> Result<FlexPath> {
    let linkage = Linkage::for_framework(f, edge)?;
    let line = LineData::new(f);
    let mut path = FlexPath {
        linkage,
        branch,
        thetas: Vec::new(),
        poses: Vec::new(),
        residuals: Vec::new(),
        removed_gaps: Vec::new(),
    };
    if steps == 0 {
        return Ok(path);
    }
    let step = opts.theta_max / opts.grid as f64;
    let mut reach = 0.0;
    for k in 1..=opts.grid {
        let theta = branch.direction() * step * k as f64;
        if pose(&line, linkage, theta, branch.side).is_err() {
            break;
        }
        reach = theta;
    }
    let bound = residual_bound(f);
    for k in 0..steps {
        let theta = if steps == 1 { 0.0 } else { reach * k as f64 / (steps - 1) as f64 };
        let Ok(q) = pose(&line, linkage, theta, branch.side) else { continue };
        let residual = retained_residual(f, &linkage, &q);
        if residual > bound {
            return Err(Error::Inconsistency(format!("flex residual {residual} exceeds {bound}")));
        }
        path.removed_gaps.push(removed_gap(&line, &linkage, &q));
        path.residuals.push(residual);
        path.thetas.push(theta);
        path.poses.push(q);
    }
    Ok(path)
}
