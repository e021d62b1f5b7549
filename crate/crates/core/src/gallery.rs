//! Named frameworks: stretched and alternating cycles, the triangular prism
//! in the plane and on the line, the orchard ladder, and seeded perturbation.
//!
//! Searches draw trial `t` from a ChaCha stream keyed by `(seed, t)` and
//! return the lowest successful trial, so results depend only on the seed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{certify_by_lift, certify_super_stable, convex_hull, LiftVerdict, SearchOptions};
use crate::error::{Error, Result};
use crate::flex::{find_alternate_realization, FlexOptions, FlexWitness};
use crate::framework::{Configuration, Edge, Framework, Graph};
use crate::linalg::psd_rank;
use crate::scalar::{dot, format_scalar, int, one, ratio, sub, zero, Scalar};
use crate::stress::{equilibrium_stress_basis, is_equilibrium, stress_matrix, Stress};
use crate::transform::{project_orthogonal, ProjectionTarget};

/// Trial budget for the planar prism and orchard ladder searches.
pub const PLANAR_TRIALS: u64 = 10_000;
/// Projection directions tried by [`prism_line_ur`].
pub const DIRECTION_TRIALS: u64 = 100;
/// Jittered line configurations tried by [`prism_line_flexible`].
pub const FLEX_TRIALS: u64 = 200;

/// Hamiltonian cycle of the prism that bounds its convex planar realizations.
pub const PRISM_HULL_CYCLE: [usize; 6] = [1, 2, 5, 4, 6, 3];

/// A constructed framework with an optional distinguished stress.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryItem {
    pub name: String,
    pub framework: Framework,
    pub stress: Option<Stress>,
    /// Construction parameters and seeds.
    pub notes: BTreeMap<String, String>,
}

impl GalleryItem {
    fn new(name: &str, framework: Framework, stress: Option<Stress>) -> Self {
        GalleryItem { name: name.to_string(), framework, stress, notes: BTreeMap::new() }
    }

    fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.insert(key.to_string(), value.to_string());
        self
    }

    /// True when there is no distinguished stress or it is in equilibrium.
    pub fn stress_is_equilibrium(&self) -> Result<bool> {
        match &self.stress {
            Some(w) => is_equilibrium(&self.framework, w),
            None => Ok(true),
        }
    }
}

/// Independent generator for trial `trial` of a search keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_ratio(rng: &mut ChaCha8Rng, max_num: i64, den: i64) -> Scalar {
    ratio(rng.random_range(-max_num..=max_num), den)
}

fn join(xs: &[Scalar]) -> String {
    xs.iter().map(format_scalar).collect::<Vec<_>>().join(",")
}

fn join_labels(xs: &[usize]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Scales `values` to coprime integers, keeping the sign of the first entry.
fn to_coprime_integers(values: &[Scalar]) -> Vec<Scalar> {
    let lcm = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = values.iter().map(|v| (v * Scalar::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return values.to_vec();
    }
    ints.into_iter().map(|v| Scalar::from_integer(v / &gcd)).collect()
}

/// Cycle on strictly increasing line positions, with its unique stress.
///
/// The stress is positive on the short edges and negative on `{1, n}`,
/// scaled to coprime integers.
pub fn stretched_cycle(positions: &[Scalar]) -> Result<GalleryItem> {
    let n = positions.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing);
    }
    let graph = Graph::cycle(n);
    let mut chain = vec![one()];
    for i in 1..n - 1 {
        let prev = &chain[i - 1];
        chain.push(prev * (&positions[i] - &positions[i - 1]) / (&positions[i + 1] - &positions[i]));
    }
    let closing = -(&chain[0] * (&positions[1] - &positions[0])) / (&positions[n - 1] - &positions[0]);
    let mut values = vec![zero(); n];
    for (i, w) in chain.into_iter().enumerate() {
        values[graph.edge_index(i + 1, i + 2).expect("cycle edge")] = w;
    }
    values[graph.edge_index(1, n).expect("closing edge")] = closing;
    let stress = Stress::new(to_coprime_integers(&values));
    let f = Framework::new(graph, Configuration::on_line(positions.iter().cloned()))?;
    Ok(GalleryItem::new("stretched-cycle", f, Some(stress)).note("positions", join(positions)))
}

/// Triangular gaps `0, 1, 3, 6, 10, ...`.
pub fn triangular_positions(n: usize) -> Vec<Scalar> {
    (0..n as i64).map(|k| int(k * (k + 1) / 2)).collect()
}

/// Cycle whose vertices alternate between a low and a high block on the
/// line, jittered by seeded rationals in `[-1/5, 1/5]`.
pub fn alternating_cycle(n: usize, seed: u64) -> Result<GalleryItem> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("alternating cycle needs an even n >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (n / 2) as i64;
    let positions: Vec<Scalar> = (0..n as i64)
        .map(|i| {
            let base = if i % 2 == 0 { i / 2 } else { half + i / 2 };
            int(base) + random_ratio(&mut rng, 20, 100)
        })
        .collect();
    let f = Framework::new(Graph::cycle(n), Configuration::on_line(positions.iter().cloned()))?;
    Ok(GalleryItem::new("alternating-cycle", f, None).note("positions", join(&positions)).note("seed", seed))
}

/// `K_3 × K_2`: triangles `{1,2,3}`, `{4,5,6}` and rungs `14`, `25`, `36`.
pub fn prism_graph() -> Graph {
    Graph::new(6, [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (1, 4), (2, 5), (3, 6)])
        .expect("prism graph is simple")
}

/// Ladder with rungs `12`, `34`, `56` and rails closed into triangles
/// `{1,3,5}`, `{2,4,6}`.
pub fn orchard_graph() -> Graph {
    Graph::new(6, [(1, 2), (3, 4), (5, 6), (1, 3), (3, 5), (1, 5), (2, 4), (4, 6), (2, 6)])
        .expect("orchard graph is simple")
}

/// Three lines through `origin` with two points on each:
/// point `s · directions[k]` from the origin for each `s` in `positions[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcurrentLines {
    pub origin: [Scalar; 2],
    pub directions: [[Scalar; 2]; 3],
    pub positions: [[Scalar; 2]; 3],
}

impl ConcurrentLines {
    /// Points grouped by line: `[a_1, b_1, a_2, b_2, a_3, b_3]`.
    pub fn points(&self) -> Result<Vec<Vec<Scalar>>> {
        for (k, d) in self.directions.iter().enumerate() {
            if d[0].is_zero() && d[1].is_zero() {
                return Err(Error::InvalidArgument(format!("direction {} is zero", k + 1)));
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let (u, v) = (&self.directions[a], &self.directions[b]);
                if (&u[0] * &v[1] - &u[1] * &v[0]).is_zero() {
                    return Err(Error::InvalidArgument(format!("lines {} and {} coincide", a + 1, b + 1)));
                }
            }
        }
        let mut out = Vec::with_capacity(6);
        for (k, (d, pos)) in self.directions.iter().zip(&self.positions).enumerate() {
            if pos[0] == pos[1] || pos.iter().any(Zero::is_zero) {
                return Err(Error::InvalidArgument(format!(
                    "positions on line {} must be distinct and off the origin",
                    k + 1
                )));
            }
            for s in pos {
                out.push(vec![&self.origin[0] + s * &d[0], &self.origin[1] + s * &d[1]]);
            }
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        let pair = |p: &[Scalar; 2]| format!("({},{})", format_scalar(&p[0]), format_scalar(&p[1]));
        let lines: Vec<String> = (0..3)
            .map(|k| format!("{}:{}", pair(&self.directions[k]), join(&self.positions[k])))
            .collect();
        format!("origin {} lines {}", pair(&self.origin), lines.join(" "))
    }

    /// Lines through two points each: line `k` passes through `pts[2k]`
    /// and `pts[2k+1]`; the first two lines fix the origin.
    fn through(pts: [[Scalar; 2]; 6]) -> Option<ConcurrentLines> {
        let origin = intersect(&pts[0], &pts[1], &pts[2], &pts[3])?;
        let mut directions: [[Scalar; 2]; 3] = Default::default();
        let mut positions: [[Scalar; 2]; 3] = Default::default();
        for k in 0..3 {
            let d = [&pts[2 * k][0] - &origin[0], &pts[2 * k][1] - &origin[1]];
            let len = &d[0] * &d[0] + &d[1] * &d[1];
            if len.is_zero() {
                return None;
            }
            let other = sub(&pts[2 * k + 1], &origin);
            let s = dot(&other, &d) / &len;
            if [&s * &d[0], &s * &d[1]] != [other[0].clone(), other[1].clone()] {
                return None;
            }
            positions[k] = [one(), s];
            directions[k] = d;
        }
        Some(ConcurrentLines { origin, directions, positions })
    }
}

impl Default for ConcurrentLines {
    /// A strictly convex super-stable prism whose projection near the
    /// x-axis orders the vertices `2, 5, 1, 4, 3, 6`, an order that also
    /// admits flexible line realizations.
    fn default() -> Self {
        ConcurrentLines {
            origin: [ratio(17, 3), ratio(-49, 3)],
            directions: [[int(-31), int(107)], [int(1), int(-2)], [int(1), int(-5)]],
            positions: [[ratio(1, 6), ratio(1, 8)], [ratio(-26, 3), ratio(-49, 6)], [ratio(-19, 6), ratio(-8, 3)]],
        }
    }
}

/// Intersection of line `ab` with line `cd`, if they are not parallel.
fn intersect(a: &[Scalar; 2], b: &[Scalar; 2], c: &[Scalar; 2], d: &[Scalar; 2]) -> Option<[Scalar; 2]> {
    let r = [&b[0] - &a[0], &b[1] - &a[1]];
    let s = [&d[0] - &c[0], &d[1] - &c[1]];
    let den = &r[0] * &s[1] - &r[1] * &s[0];
    if den.is_zero() {
        return None;
    }
    let t = ((&c[0] - &a[0]) * &s[1] - (&c[1] - &a[1]) * &s[0]) / den;
    Some([&a[0] + &t * &r[0], &a[1] + &t * &r[1]])
}

/// The unique stress of a planar framework, signed positive on `edge`.
fn unique_stress(f: &Framework, edge: Edge) -> Result<Stress> {
    let basis = equilibrium_stress_basis(f);
    if basis.len() != 1 {
        return Err(Error::Degenerate(format!("expected a 1-dimensional stress space, found {}", basis.len())));
    }
    let w = basis.into_iter().next().expect("one vector");
    let on = w.on_edge(f.graph(), edge.0, edge.1);
    if on.is_zero() {
        return Err(Error::Degenerate(format!("stress vanishes on edge {}-{}", edge.0, edge.1)));
    }
    Ok(if on.is_negative() { w.neg() } else { w })
}

/// True when the points are in strictly convex position with boundary
/// order `cycle` (either orientation).
pub fn strictly_convex_along(config: &Configuration, cycle: &[usize]) -> bool {
    let hull = convex_hull(config);
    if hull.len() != cycle.len() || config.len() != cycle.len() {
        return false;
    }
    let Some(start) = cycle.iter().position(|&v| v == hull[0]) else { return false };
    let k = cycle.len();
    let forward = (0..k).all(|i| hull[i] == cycle[(start + i) % k]);
    let backward = (0..k).all(|i| hull[i] == cycle[(start + k - i) % k]);
    forward || backward
}

/// Planar prism with rungs on three concurrent lines: `i` and `i + 3` lie
/// on line `i`. The stress is unique and positive on edge `12`.
pub fn prism_desargues_2d(params: &ConcurrentLines) -> Result<GalleryItem> {
    let pts = params.points()?;
    let order = [0, 2, 4, 1, 3, 5];
    let config = Configuration::new(2, order.iter().map(|&i| pts[i].clone()).collect())?;
    let f = Framework::new(prism_graph(), config)?;
    let w = unique_stress(&f, (1, 2))?;
    Ok(GalleryItem::new("prism-2d", f, Some(w)).note("params", params.describe()))
}

fn random_half_point(rng: &mut ChaCha8Rng, reach: i64) -> [Scalar; 2] {
    [random_ratio(rng, 2 * reach, 2), random_ratio(rng, 2 * reach, 2)]
}

/// Draws three concurrent lines: points for the first two lines at random,
/// then the third line through a random point and the intersection.
fn random_concurrent(rng: &mut ChaCha8Rng) -> Option<ConcurrentLines> {
    let a1 = random_half_point(rng, 3);
    let b1 = random_half_point(rng, 3);
    let a2 = random_half_point(rng, 3);
    let b2 = random_half_point(rng, 3);
    let a3 = random_half_point(rng, 3);
    let origin = intersect(&a1, &b1, &a2, &b2)?;
    let t = ratio(rng.random_range(-8..=8), 4);
    if t.is_zero() || t.is_one() {
        return None;
    }
    let b3 = [&origin[0] + &t * (&a3[0] - &origin[0]), &origin[1] + &t * (&a3[1] - &origin[1])];
    ConcurrentLines::through([a1, b1, a2, b2, a3, b3])
}

/// Searches concurrent-line placements until the planar prism is strictly
/// convex along `1-2-5-4-6-3` and certified super stable.
pub fn search_desargues_2d(seed: u64) -> Result<GalleryItem> {
    for trial in 0..PLANAR_TRIALS {
        let mut rng = trial_rng(seed, trial);
        let Some(params) = random_concurrent(&mut rng) else { continue };
        let Ok(item) = prism_desargues_2d(&params) else { continue };
        if !strictly_convex_along(item.framework.config(), &PRISM_HULL_CYCLE) {
            continue;
        }
        let cert = certify_super_stable(&item.framework, item.stress.as_ref(), &SearchOptions::seeded(seed))?;
        if cert.is_certified() {
            return Ok(item.note("seed", seed).note("trial", trial));
        }
    }
    Err(Error::SearchFailed(format!("no certified concurrent-rung prism in {PLANAR_TRIALS} trials")))
}

/// Flat-triangle stress on `{a, b, c}` of a line framework: `-v_i v_j` with
/// `v = (x_b - x_c, x_c - x_a, x_a - x_b)`, so its stress matrix is `v vᵀ`.
pub fn flat_triangle_stress(f: &Framework, tri: [usize; 3]) -> Result<Stress> {
    if f.dim() != 1 {
        return Err(Error::WrongDimension { expected: 1, got: f.dim() });
    }
    let x = |v: usize| f.config().point(v)[0].clone();
    let [a, b, c] = tri;
    let v = [x(b) - x(c), x(c) - x(a), x(a) - x(b)];
    let mut values = vec![zero(); f.m()];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let idx = f
            .graph()
            .edge_index(tri[i].min(tri[j]), tri[i].max(tri[j]))
            .ok_or_else(|| Error::InvalidArgument("triangle edge missing from graph".into()))?;
        values[idx] = -(&v[i] * &v[j]);
    }
    Ok(Stress::new(values))
}

/// The certified line prism and everything used to build it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrismLineUr {
    /// Perturbed line prism with its certifying stress.
    pub item: GalleryItem,
    /// Planar concurrent-rung prism.
    pub planar: GalleryItem,
    /// Projection of `planar` before perturbation.
    pub projected: Framework,
    /// Unit direction of the projection line.
    pub direction: [Scalar; 2],
    pub flat_stress: Stress,
    pub planar_stress: Stress,
    pub combined: Stress,
    /// Vertices from left to right.
    pub order: Vec<usize>,
}

/// Line prism certified super stable by a flat-triangle stress plus the
/// stress of a planar concurrent-rung prism, then perturbed and
/// re-certified.
pub fn prism_line_ur(seed: u64) -> Result<PrismLineUr> {
    prism_line_ur_from(&ConcurrentLines::default(), seed)
}

/// [`prism_line_ur`] for given concurrent lines.
pub fn prism_line_ur_from(params: &ConcurrentLines, seed: u64) -> Result<PrismLineUr> {
    let planar = prism_desargues_2d(params)?;
    let planar_stress = planar.stress.clone().expect("prism-2d has a stress");
    let cert = certify_super_stable(&planar.framework, Some(&planar_stress), &SearchOptions::seeded(seed))?;
    if !cert.is_certified() {
        return Err(Error::SearchFailed("planar prism is not super stable".into()));
    }
    for attempt in 0..DIRECTION_TRIALS {
        let mut rng = trial_rng(seed, attempt);
        // (1 - s², 2s) / (1 + s²) keeps the unit direction rational
        let s = random_ratio(&mut rng, 5, 100);
        let u = vec![one() - &s * &s, int(2) * &s];
        let split = project_orthogonal(&planar.framework, &ProjectionTarget::Directions(vec![u.clone()]))?;
        let Some(projected) = split.low_isometric() else { continue };
        let order = projected.config().line_order();
        if order.windows(2).any(|w| projected.config().point(w[0]) == projected.config().point(w[1])) {
            continue;
        }
        let flat_stress = flat_triangle_stress(&projected, [1, 2, 3])?;
        let combined = flat_stress.add(&planar_stress);
        let pre = certify_super_stable(&projected, Some(&combined), &SearchOptions::seeded(seed))?;
        if !pre.is_certified() {
            continue;
        }
        let perturbed = perturb(&projected, &ratio(1, 1000), seed.wrapping_add(attempt))?;
        let opts = SearchOptions { hints: vec![combined.clone()], ..SearchOptions::seeded(seed) };
        let post = certify_super_stable(&perturbed, None, &opts)?;
        if !post.is_certified() || perturbed.config().line_order() != order {
            continue;
        }
        let norm = one() + &s * &s;
        let direction = [&u[0] / &norm, &u[1] / &norm];
        let rank_planar = psd_rank(&stress_matrix(projected.graph(), &planar_stress)?)?.rank;
        let item = GalleryItem::new("prism-line-ur", perturbed, post.stress.clone())
            .note("seed", seed)
            .note("attempt", attempt)
            .note("direction", join(&direction))
            .note("order", join_labels(&order))
            .note("unperturbed", join(&projected.config().points().iter().map(|p| p[0].clone()).collect::<Vec<_>>()))
            .note("planar stress rank on the line", rank_planar)
            .note("params", params.describe());
        return Ok(PrismLineUr { item, planar, projected, direction, flat_stress, planar_stress, combined, order });
    }
    Err(Error::SearchFailed(format!("no projection direction certified in {DIRECTION_TRIALS} attempts")))
}

/// Flexible line prism together with its planar witness.
#[derive(Clone, Debug, PartialEq)]
pub struct PrismLineFlexible {
    pub item: GalleryItem,
    pub witness: FlexWitness,
    pub order: Vec<usize>,
}

/// Rungs tried, in order, when looking for a flex.
pub const RUNG_ORDER: [Edge; 3] = [(2, 5), (1, 4), (3, 6)];

/// Line prism with vertex `order[k]` near position `k + 1` (ends pinned,
/// interior jitter at most 1/4) that flexes in the plane.
pub fn prism_line_flexible(order: &[usize], seed: u64) -> Result<PrismLineFlexible> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != [1, 2, 3, 4, 5, 6] {
        return Err(Error::InvalidArgument(format!("order must be a permutation of 1..6, got {order:?}")));
    }
    let opts = FlexOptions::default();
    for trial in 0..FLEX_TRIALS {
        let mut rng = trial_rng(seed, trial);
        let mut xs = vec![zero(); 6];
        for (k, &v) in order.iter().enumerate() {
            let jitter = if k == 0 || k == 5 { zero() } else { random_ratio(&mut rng, 25, 100) };
            xs[v - 1] = int(k as i64 + 1) + jitter;
        }
        let f = Framework::new(prism_graph(), Configuration::on_line(xs.iter().cloned()))?;
        for rung in RUNG_ORDER {
            if let Some(witness) = find_alternate_realization(&f, rung, &opts)? {
                let item = GalleryItem::new("prism-line-flex", f, None)
                    .note("seed", seed)
                    .note("trial", trial)
                    .note("positions", join(&xs))
                    .note("order", join_labels(order))
                    .note("removed rung", format!("{}-{}", rung.0, rung.1))
                    .note("theta", witness.theta);
                return Ok(PrismLineFlexible { item, witness, order: order.to_vec() });
            }
        }
    }
    Err(Error::SearchFailed(format!("no flexible line prism in {FLEX_TRIALS} trials")))
}

/// Planar orchard ladder, its x-axis projection and the lift verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrchardLadder {
    pub planar: GalleryItem,
    pub projection: GalleryItem,
    pub lift: LiftVerdict,
}

/// Orchard ladder with rung `k` (`2k-1`, `2k`) on line `k`, certified in the
/// plane, projected to the x-axis, and lift-certified there.
pub fn orchard_ladder_from(params: &ConcurrentLines, seed: u64) -> Result<Option<OrchardLadder>> {
    let pts = params.points()?;
    let f = Framework::new(orchard_graph(), Configuration::new(2, pts)?)?;
    if equilibrium_stress_basis(&f).len() != 1 {
        return Err(Error::Degenerate("orchard ladder without a unique stress".into()));
    }
    let cert = certify_super_stable(&f, None, &SearchOptions::seeded(seed))?;
    if !cert.is_certified() {
        return Ok(None);
    }
    let w = cert.stress.expect("certified stress");
    let low = project_orthogonal(&f, &ProjectionTarget::FirstCoordinates(1))?.low;
    let xs = low.config().line_order();
    if xs.windows(2).any(|p| low.config().point(p[0]) == low.config().point(p[1])) {
        return Ok(None);
    }
    let lift = certify_by_lift(&low, &f, &w)?;
    if !lift.certified {
        return Err(Error::Inconsistency(format!("orchard lift failed: {:?}", lift.failures())));
    }
    let planar = GalleryItem::new("orchard-ladder", f, Some(w.clone())).note("params", params.describe());
    let projection = GalleryItem::new("orchard-ladder-line", low, Some(w)).note("order", join_labels(&xs));
    Ok(Some(OrchardLadder { planar, projection, lift }))
}

/// Seeded search for [`orchard_ladder_from`].
pub fn orchard_ladder(seed: u64) -> Result<OrchardLadder> {
    for trial in 0..PLANAR_TRIALS {
        let mut rng = trial_rng(seed, trial);
        let Some(params) = random_concurrent(&mut rng) else { continue };
        match orchard_ladder_from(&params, seed) {
            Ok(Some(mut found)) => {
                found.planar = found.planar.note("seed", seed).note("trial", trial);
                return Ok(found);
            }
            Ok(None) | Err(Error::Degenerate(_)) | Err(Error::InvalidArgument(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SearchFailed(format!("no certified orchard ladder in {PLANAR_TRIALS} trials")))
}

/// Adds seeded multiples of `10⁻⁶` in `[-magnitude, magnitude]` to every
/// coordinate. On the line the magnitude must stay below half the minimum
/// gap so the vertex order is kept.
pub fn perturb(f: &Framework, magnitude: &Scalar, seed: u64) -> Result<Framework> {
    if !magnitude.is_positive() {
        return Err(Error::InvalidArgument("perturbation magnitude must be positive".into()));
    }
    if f.dim() == 1 && f.n() > 1 {
        let order = f.config().line_order();
        let min_gap = order
            .windows(2)
            .map(|w| &f.config().point(w[1])[0] - &f.config().point(w[0])[0])
            .min()
            .expect("at least two points");
        if magnitude * int(2) >= min_gap {
            return Err(Error::OrderViolation);
        }
    }
    let scale = 1_000_000i64;
    let bound = (magnitude * int(scale)).floor().to_integer().to_i64().unwrap_or(i64::MAX / 4).min(i64::MAX / 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = f
        .config()
        .points()
        .iter()
        .map(|p| p.iter().map(|x| x + ratio(rng.random_range(-bound..=bound), scale)).collect())
        .collect();
    f.with_config(Configuration::new(f.dim(), points)?)
}
