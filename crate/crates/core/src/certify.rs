//! Super-stability certificates, the lift test, the convex-polygon stress
//! criterion, and affine-image detection.
//!
//! A `Certified` verdict is a proof of universal rigidity. Every negative
//! verdict here is only the absence of a certificate.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::framework::{Configuration, Framework};
use crate::linalg::{psd_rank, solve, MatrixR, PsdCertificate};
use crate::scalar::{int, sub, zero, Scalar};
use crate::stress::{
    conic_at_infinity, equilibrium_stress_basis, is_equilibrium, stress_matrix, ConicWitness, Stress,
};

/// Affine map `x ↦ A x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub a: MatrixR,
    pub b: Vec<Scalar>,
}

impl AffineMap {
    pub fn new(a: MatrixR, b: Vec<Scalar>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} rows but translation has {} entries",
                a.rows(),
                b.len()
            )));
        }
        Ok(AffineMap { a, b })
    }

    pub fn linear(a: MatrixR) -> Self {
        let b = vec![zero(); a.rows()];
        AffineMap { a, b }
    }

    pub fn source_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn apply(&self, p: &[Scalar]) -> Vec<Scalar> {
        self.a.mul_vec(p).into_iter().zip(&self.b).map(|(x, t)| x + t).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotCertifiedReason {
    NoEquilibriumStress,
    SearchExhausted,
    ConicAtInfinity,
    CandidateFails(String),
    DegenerateImage,
}

impl std::fmt::Display for NotCertifiedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotCertifiedReason::NoEquilibriumStress => f.write_str("no nonzero equilibrium stress"),
            NotCertifiedReason::SearchExhausted => {
                f.write_str("no PSD stress of the required rank found in the search")
            }
            NotCertifiedReason::ConicAtInfinity => f.write_str("edge directions lie on a conic at infinity"),
            NotCertifiedReason::CandidateFails(d) => write!(f, "candidate stress fails: {d}"),
            NotCertifiedReason::DegenerateImage => f.write_str("image collapses to a single point"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    /// Complete graph on at most d+1 affinely independent points; universally
    /// rigid because every equivalent framework is congruent.
    CompleteSimplex,
    NotCertified(NotCertifiedReason),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Certified => "Certified",
            Verdict::CompleteSimplex => "CompleteSimplex",
            Verdict::NotCertified(_) => "NotCertified",
        }
    }
}

/// Knobs of the stress-space search. The defaults are the documented recipe.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    /// Random integer combinations tried after the structured candidates.
    pub samples: usize,
    /// Coefficients of random combinations are drawn from `-range..=range`.
    pub coefficient_range: i64,
    /// Stresses tried first; each is replaced by its least-squares projection
    /// onto the equilibrium stress space.
    pub hints: Vec<Stress>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { seed: 0, samples: 1000, coefficient_range: 3, hints: Vec::new() }
    }
}

impl SearchOptions {
    pub fn seeded(seed: u64) -> Self {
        SearchOptions { seed, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRecord {
    pub seed: u64,
    pub stress_space_dim: usize,
    pub candidates_tested: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperStabilityCertificate {
    pub verdict: Verdict,
    /// Dimension of the affine span the certificate refers to.
    pub span: usize,
    pub required_rank: usize,
    pub stress: Option<Stress>,
    pub psd: Option<PsdCertificate>,
    pub conic: Option<ConicWitness>,
    pub search: Option<SearchRecord>,
}

impl SuperStabilityCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// Universally rigid by this certificate (super stable or a complete simplex).
    pub fn proves_universal_rigidity(&self) -> bool {
        matches!(self.verdict, Verdict::Certified | Verdict::CompleteSimplex)
    }
}

fn rank_requirement(n: usize, span: usize) -> usize {
    n.saturating_sub(span + 1)
}

/// Tests whether `w` is a PSD stress of exactly the required rank.
fn psd_with_rank(f: &Framework, w: &Stress, required: usize) -> Result<(PsdCertificate, bool)> {
    let cert = psd_rank(&stress_matrix(f.graph(), w)?)?;
    let ok = cert.is_psd() && cert.rank == required;
    Ok((cert, ok))
}

/// Least-squares projection of `hint` onto the span of `basis`.
fn project_onto(basis: &[Stress], hint: &Stress) -> Option<Stress> {
    let k = basis.len();
    let mut gram = MatrixR::zeros(k, k);
    let mut rhs = vec![zero(); k];
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = crate::scalar::dot(basis[i].values(), basis[j].values());
        }
        rhs[i] = crate::scalar::dot(basis[i].values(), hint.values());
    }
    let c = solve(&gram, &rhs)?;
    Some(combine(basis, &c))
}

fn combine(basis: &[Stress], coeffs: &[Scalar]) -> Stress {
    let m = basis[0].len();
    let mut out = vec![zero(); m];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(b.values()) {
            *o += c * v;
        }
    }
    Stress::new(out)
}

/// Candidate stresses in search order: hints, ±basis vectors, pairwise
/// sums and differences, then seeded random integer combinations.
fn search_candidates(basis: &[Stress], opts: &SearchOptions) -> Vec<Stress> {
    let k = basis.len();
    let mut out: Vec<Stress> = opts
        .hints
        .iter()
        .filter(|h| h.len() == basis[0].len())
        .filter_map(|h| project_onto(basis, h))
        .filter(|s| !s.is_zero())
        .collect();
    for b in basis {
        out.push(b.clone());
        out.push(b.neg());
    }
    for i in 0..k {
        for j in i + 1..k {
            let sum = basis[i].add(&basis[j]);
            let diff = basis[i].add(&basis[j].neg());
            out.push(sum.neg());
            out.push(diff.neg());
            out.push(sum);
            out.push(diff);
        }
    }
    if k > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let r = opts.coefficient_range.max(1);
        for _ in 0..opts.samples {
            let coeffs: Vec<Scalar> = (0..k).map(|_| int(rng.random_range(-r..=r))).collect();
            if coeffs.iter().all(Zero::is_zero) {
                continue;
            }
            out.push(combine(basis, &coeffs));
        }
    }
    out
}

/// Attempts to certify super stability of `f` in its affine span.
///
/// With a candidate, only that stress is checked. Otherwise the equilibrium
/// stress space is searched with the recipe in [`SearchOptions`].
pub fn certify_super_stable(
    f: &Framework,
    candidate: Option<&Stress>,
    opts: &SearchOptions,
) -> Result<SuperStabilityCertificate> {
    let g = f.reduce_to_span();
    let span = g.dim();
    let n = g.n();
    let required_rank = rank_requirement(n, span);
    let mut cert = SuperStabilityCertificate {
        verdict: Verdict::NotCertified(NotCertifiedReason::SearchExhausted),
        span,
        required_rank,
        stress: None,
        psd: None,
        conic: None,
        search: None,
    };
    if g.graph().is_complete() && n <= span + 1 {
        cert.verdict = Verdict::CompleteSimplex;
        return Ok(cert);
    }

    if let Some(w) = candidate {
        if !is_equilibrium(&g, w)? {
            cert.verdict = Verdict::NotCertified(NotCertifiedReason::CandidateFails(
                "not an equilibrium stress".into(),
            ));
            cert.stress = Some(w.clone());
            return Ok(cert);
        }
        let (psd, ok) = psd_with_rank(&g, w, required_rank)?;
        cert.stress = Some(w.clone());
        let detail = if !psd.is_psd() {
            Some("stress matrix is not PSD".to_string())
        } else if !ok {
            Some(format!("PSD of rank {}, need {}", psd.rank, required_rank))
        } else {
            None
        };
        cert.psd = Some(psd);
        if let Some(d) = detail {
            cert.verdict = Verdict::NotCertified(NotCertifiedReason::CandidateFails(d));
            return Ok(cert);
        }
        cert.conic = conic_at_infinity(&g);
        cert.verdict = if cert.conic.is_some() {
            Verdict::NotCertified(NotCertifiedReason::ConicAtInfinity)
        } else {
            Verdict::Certified
        };
        return Ok(cert);
    }

    let basis = equilibrium_stress_basis(&g);
    let mut record = SearchRecord { seed: opts.seed, stress_space_dim: basis.len(), candidates_tested: 0 };
    if basis.is_empty() {
        cert.verdict = Verdict::NotCertified(NotCertifiedReason::NoEquilibriumStress);
        cert.search = Some(record);
        return Ok(cert);
    }
    for w in search_candidates(&basis, opts) {
        record.candidates_tested += 1;
        let (psd, ok) = psd_with_rank(&g, &w, required_rank)?;
        if ok {
            cert.stress = Some(w);
            cert.psd = Some(psd);
            cert.conic = conic_at_infinity(&g);
            cert.verdict = if cert.conic.is_some() {
                Verdict::NotCertified(NotCertifiedReason::ConicAtInfinity)
            } else {
                Verdict::Certified
            };
            cert.search = Some(record);
            return Ok(cert);
        }
    }
    cert.search = Some(record);
    Ok(cert)
}

/// Outcome of the lift test; every individual check is recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftVerdict {
    pub certified: bool,
    pub equilibrium_low: bool,
    pub equilibrium_high: bool,
    pub psd: bool,
    pub rank: usize,
    pub required_rank: usize,
    pub high_span: usize,
    pub conic_free: bool,
    pub low_satisfies: bool,
}

impl LiftVerdict {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.equilibrium_low {
            v.push("stress is not an equilibrium of the low framework");
        }
        if !self.equilibrium_high {
            v.push("stress is not an equilibrium of the high framework");
        }
        if !self.psd {
            v.push("stress matrix is not PSD");
        } else if self.rank != self.required_rank {
            v.push("stress matrix rank differs from n - D - 1");
        }
        if !self.conic_free {
            v.push("high framework edges lie on a conic at infinity");
        }
        v
    }
}

/// Certifies `low` universally rigid as an affine image of the super-stable
/// `high`, both satisfying `w`.
pub fn certify_by_lift(low: &Framework, high: &Framework, w: &Stress) -> Result<LiftVerdict> {
    if low.graph() != high.graph() {
        return Err(Error::GraphMismatch);
    }
    let high = high.reduce_to_span();
    let equilibrium_low = is_equilibrium(low, w)?;
    let equilibrium_high = is_equilibrium(&high, w)?;
    let low_satisfies = low.config().augmented_matrix().mul(&stress_matrix(low.graph(), w)?).is_zero();
    let required_rank = rank_requirement(high.n(), high.dim());
    let cert = psd_rank(&stress_matrix(high.graph(), w)?)?;
    let conic_free = conic_at_infinity(&high).is_none();
    let certified = equilibrium_low
        && equilibrium_high
        && low_satisfies
        && cert.is_psd()
        && cert.rank == required_rank
        && conic_free;
    Ok(LiftVerdict {
        certified,
        equilibrium_low,
        equilibrium_high,
        psd: cert.is_psd(),
        rank: cert.rank,
        required_rank,
        high_span: high.dim(),
        conic_free,
        low_satisfies,
    })
}

/// Sign of the orientation determinant of `(a, b, c)` in the plane.
pub fn orientation(a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> std::cmp::Ordering {
    let ab = sub(b, a);
    let ac = sub(c, a);
    (&ab[0] * &ac[1] - &ab[1] * &ac[0]).cmp(&zero())
}

/// Vertices of the strict convex hull in counterclockwise order (1-based),
/// starting from the lowest-leftmost point. Collinear boundary points are dropped.
pub fn convex_hull(config: &Configuration) -> Vec<usize> {
    use std::cmp::Ordering::Greater;
    let mut idx: Vec<usize> = (1..=config.len()).collect();
    idx.sort_by(|&a, &b| config.point(a).cmp(config.point(b)).then(a.cmp(&b)));
    idx.dedup_by(|a, b| config.point(*a) == config.point(*b));
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &v in iter {
            while hull.len() >= start + 2 {
                let a = config.point(hull[hull.len() - 2]);
                let b = config.point(hull[hull.len() - 1]);
                if orientation(a, b, config.point(v)) == Greater {
                    break;
                }
                hull.pop();
            }
            hull.push(v);
        }
        hull.pop();
    }
    hull
}

/// Hypothesis and conclusion checks for the convex-polygon stress criterion:
/// strictly convex position, hull edges present, positive stress on hull
/// edges and negative elsewhere imply a PSD stress matrix of rank n − 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexStressReport {
    pub hull: Vec<usize>,
    pub strictly_convex: bool,
    pub hull_edges_present: bool,
    pub equilibrium: bool,
    pub boundary_positive: bool,
    pub interior_negative: bool,
    pub psd: PsdCertificate,
    pub required_rank: usize,
}

impl ConvexStressReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.strictly_convex
            && self.hull_edges_present
            && self.equilibrium
            && self.boundary_positive
            && self.interior_negative
    }

    pub fn conclusion_holds(&self) -> bool {
        self.psd.is_psd() && self.psd.rank == self.required_rank
    }
}

pub fn check_convex_polygon_stress(f: &Framework, w: &Stress) -> Result<ConvexStressReport> {
    if f.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: f.dim() });
    }
    let n = f.n();
    let p = f.config();
    let hull = convex_hull(p);
    let strictly_convex = hull.len() == n
        && n >= 3
        && (0..n).all(|k| {
            orientation(p.point(hull[k]), p.point(hull[(k + 1) % n]), p.point(hull[(k + 2) % n]))
                == std::cmp::Ordering::Greater
        });
    let hull_edge = |a: usize, b: usize| {
        strictly_convex
            && (0..n).any(|k| {
                let (x, y) = (hull[k], hull[(k + 1) % n]);
                (x, y) == (a, b) || (y, x) == (a, b)
            })
    };
    let hull_edges_present = strictly_convex && (0..n).all(|k| f.graph().has_edge(hull[k], hull[(k + 1) % n]));
    let mut boundary_positive = true;
    let mut interior_negative = true;
    if w.len() != f.m() {
        return Err(Error::IndexMismatch { expected: f.m(), got: w.len() });
    }
    for (&(a, b), v) in f.graph().edges().iter().zip(w.values()) {
        if hull_edge(a, b) {
            boundary_positive &= v.is_positive();
        } else {
            interior_negative &= v.is_negative();
        }
    }
    let equilibrium = is_equilibrium(f, w)?;
    let psd = psd_rank(&stress_matrix(f.graph(), w)?)?;
    let report = ConvexStressReport {
        hull,
        strictly_convex,
        hull_edges_present,
        equilibrium,
        boundary_positive: strictly_convex && boundary_positive,
        interior_negative: strictly_convex && interior_negative,
        psd,
        required_rank: n.saturating_sub(3),
    };
    if report.hypotheses_hold() && !report.conclusion_holds() {
        return Err(Error::Inconsistency(format!(
            "convex-polygon stress criterion violated: PSD={} rank={} (need {})",
            report.psd.is_psd(),
            report.psd.rank,
            report.required_rank
        )));
    }
    Ok(report)
}

/// Finds `(A, b)` with `q_i = A p_i + b` for every i, or `None`.
pub fn check_affine_image(p: &Configuration, q: &Configuration) -> Result<Option<AffineMap>> {
    if p.len() != q.len() {
        return Err(Error::CountMismatch { expected: p.len(), got: q.len() });
    }
    let (d, e) = (p.dim(), q.dim());
    // unknowns per output row: A_r1..A_rd, b_r
    let system = MatrixR::from_rows(
        p.points().iter().map(|pt| pt.iter().cloned().chain(std::iter::once(Scalar::one())).collect()).collect(),
    );
    let mut a = MatrixR::zeros(e, d);
    let mut b = vec![zero(); e];
    for r in 0..e {
        let rhs: Vec<Scalar> = q.points().iter().map(|pt| pt[r].clone()).collect();
        let Some(x) = (if p.is_empty() { Some(vec![zero(); d + 1]) } else { solve(&system, &rhs) }) else {
            return Ok(None);
        };
        for c in 0..d {
            a[(r, c)] = x[c].clone();
        }
        b[r] = x[d].clone();
    }
    let map = AffineMap { a, b };
    let verified = p.points().iter().zip(q.points()).all(|(pi, qi)| &map.apply(pi) == qi);
    if !verified {
        return Err(Error::Inconsistency("affine map failed substitution check".into()));
    }
    Ok(Some(map))
}
