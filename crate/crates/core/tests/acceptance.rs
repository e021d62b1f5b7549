//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exit status 0 when every criterion passes, 3 on an internal
//! inconsistency (a proof contradicted by a witness), 1 otherwise.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::Rng;

use rigidline::certify::{
    certify_by_lift, certify_super_stable, check_convex_polygon_stress, convex_hull, AffineMap, SearchOptions, Verdict,
};
use rigidline::flex::{find_alternate_realization, FlexOptions};
use rigidline::framework::{check_equivalent, Configuration, Framework, Graph};
use rigidline::gallery::{
    alternating_cycle, orchard_ladder, prism_graph, prism_line_flexible, prism_line_ur, stretched_cycle, trial_rng,
    triangular_positions, ConcurrentLines, GalleryItem, RUNG_ORDER,
};
use rigidline::linalg::{psd_rank, rref_kernel, MatrixR};
use rigidline::scalar::{int, one, ratio, to_f64, zero, Scalar};
use rigidline::stress::{equilibrium_stress_basis, stress_matrix, Stress};
use rigidline::transform::{affine_invariance_demo, project_orthogonal, svd_factor, ProjectionTarget};
use rigidline::Error;

const SEED: u64 = 2024;

enum Failure {
    Criterion(String),
    Inconsistency(String),
}

type Outcome = Result<String, Failure>;
type Criterion = (&'static str, fn() -> Outcome);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistency(m) => Failure::Inconsistency(m),
            other => Failure::Criterion(other.to_string()),
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Criterion(msg()))
    }
}

fn stretched_cycles() -> Outcome {
    for n in 3..=12 {
        let item = stretched_cycle(&triangular_positions(n))?;
        let cert = certify_super_stable(&item.framework, None, &SearchOptions::seeded(SEED))?;
        ensure(cert.verdict == Verdict::Certified, || format!("n = {n}: {:?}", cert.verdict))?;
        let rank = cert.psd.as_ref().map(|p| p.rank);
        ensure(rank == Some(n - 2), || format!("n = {n}: rank {rank:?}, want {}", n - 2))?;
        ensure(cert.conic.is_none(), || format!("n = {n}: conic present"))?;
    }
    Ok("n = 3..12 certified with PSD rank n - 2, no conic".into())
}

fn alternating_cycle_negative() -> Outcome {
    let base = Framework::new(Graph::cycle(4), Configuration::on_line([0, 2, 1, 3].map(int)))?;
    let jittered = alternating_cycle(4, SEED)?.framework;
    let mut worst_residual: f64 = 0.0;
    let mut least_discrepancy = f64::INFINITY;
    for f in [base, jittered] {
        let basis = equilibrium_stress_basis(&f);
        ensure(basis.len() == 1, || format!("stress space dimension {}", basis.len()))?;
        for w in [basis[0].clone(), basis[0].neg()] {
            let s = stress_matrix(f.graph(), &w)?;
            let cert = psd_rank(&s)?;
            ensure(!cert.is_psd(), || "a signed stress matrix is PSD".into())?;
            let witness_ok = cert.violation.as_ref().is_some_and(|v| v.verify(&s));
            ensure(witness_ok, || "indefiniteness witness does not verify".into())?;
        }
        let cert = certify_super_stable(&f, None, &SearchOptions::seeded(SEED))?;
        ensure(!cert.is_certified(), || "alternating cycle certified".into())?;
        let w = find_alternate_realization(&f, (1, 2), &FlexOptions::default())?
            .ok_or_else(|| Failure::Criterion("no planar witness".into()))?;
        worst_residual = worst_residual.max(w.residual);
        least_discrepancy = least_discrepancy.min(w.discrepancy);
    }
    ensure(worst_residual <= 1e-10, || format!("residual {worst_residual:e}"))?;
    ensure(least_discrepancy > 1e-2, || format!("discrepancy {least_discrepancy:e}"))?;
    Ok(format!("1-dim stress space, both signs indefinite, witness residual {worst_residual:.1e}, discrepancy {least_discrepancy:.3}"))
}

fn headline() -> Outcome {
    let ur = prism_line_ur(SEED)?;
    let f = &ur.item.framework;
    let cert = certify_super_stable(f, ur.item.stress.as_ref(), &SearchOptions::seeded(SEED))?;
    ensure(cert.verdict == Verdict::Certified, || format!("line prism: {:?}", cert.verdict))?;
    let rank = cert.psd.as_ref().map(|p| p.rank);
    ensure(rank == Some(4), || format!("line prism rank {rank:?}"))?;

    let flex = prism_line_flexible(&ur.order, SEED)?;
    let g = &flex.item.framework;
    ensure(g.config().line_order() == f.config().line_order(), || "vertex orders differ".into())?;
    let q = &flex.witness.points;
    let x: Vec<f64> = g.config().points().iter().map(|p| to_f64(&p[0])).collect();
    let planar_len = |a: usize, b: usize| ((q[a][0] - q[b][0]).powi(2) + (q[a][1] - q[b][1]).powi(2)).sqrt();
    let max_edge = g
        .graph()
        .edges()
        .iter()
        .map(|&(a, b)| (planar_len(a - 1, b - 1).powi(2) - (x[a - 1] - x[b - 1]).powi(2)).abs())
        .fold(0.0, f64::max);
    ensure(max_edge <= 1e-10, || format!("edge residual {max_edge:e}"))?;
    let max_pair = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .map(|(i, j)| (planar_len(i, j) - (x[i] - x[j]).abs()).abs())
        .fold(0.0, f64::max);
    ensure(max_pair > 5e-2, || format!("largest distance change {max_pair:e}"))?;
    let cx = q.iter().map(|p| p[0]).sum::<f64>() / 6.0;
    let cy = q.iter().map(|p| p[1]).sum::<f64>() / 6.0;
    let centered = DMatrix::from_fn(6, 2, |i, j| if j == 0 { q[i][0] - cx } else { q[i][1] - cy });
    let sv = centered.singular_values();
    let nonzero = sv.iter().filter(|&&s| s > 1e-6).count();
    ensure(nonzero == 2, || format!("witness singular values {:?}", sv.as_slice()))?;
    let flex_cert = certify_super_stable(g, None, &SearchOptions::seeded(SEED))?;
    if flex_cert.is_certified() {
        return Err(Failure::Inconsistency("flexible prism certified".into()));
    }
    let order: Vec<String> = ur.order.iter().map(ToString::to_string).collect();
    Ok(format!(
        "order {}: rank-4 certificate vs planar flex (edge residual {max_edge:.1e}, distance change {max_pair:.3}, singular values {:.3}, {:.3})",
        order.join(" "),
        sv[0],
        sv[1]
    ))
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Criterion(m) => write!(f, "{m}"),
            Failure::Inconsistency(m) => write!(f, "INCONSISTENCY: {m}"),
        }
    }
}

fn first_proof_arithmetic() -> Outcome {
    let ur = prism_line_ur(SEED)?;
    let g = ur.projected.graph();
    let rank_of = |w: &Stress| -> Result<(bool, usize), Failure> {
        let c = psd_rank(&stress_matrix(g, w)?)?;
        Ok((c.is_psd(), c.rank))
    };
    let flat = rank_of(&ur.flat_stress)?;
    let planar = rank_of(&ur.planar_stress)?;
    let sum = rank_of(&ur.combined)?;
    ensure(flat == (true, 1), || format!("flat stress {flat:?}"))?;
    ensure(planar == (true, 3), || format!("planar stress {planar:?}"))?;
    ensure(sum == (true, 4), || format!("sum {sum:?}"))?;
    let (rank, kernel) = rref_kernel(&stress_matrix(g, &ur.combined)?);
    ensure(rank == 4 && kernel.len() == 2, || format!("kernel dimension {}", kernel.len()))?;
    let ones = vec![one(); 6];
    let xs: Vec<Scalar> = ur.projected.config().points().iter().map(|p| p[0].clone()).collect();
    let spans = MatrixR::from_rows(vec![ones.clone(), xs.clone()]).rank() == 2
        && MatrixR::from_rows(vec![kernel[0].clone(), kernel[1].clone(), ones]).rank() == 2
        && MatrixR::from_rows(vec![kernel[0].clone(), kernel[1].clone(), xs]).rank() == 2;
    ensure(spans, || "kernel is not span{1, x}".into())?;
    Ok("ranks 1, 3, 4; kernel of the sum is span{1, x}".into())
}

fn lift_tests() -> Outcome {
    let ur = prism_line_ur(SEED)?;
    let lift = certify_by_lift(&ur.projected, &ur.planar.framework, &ur.planar_stress)?;
    ensure(lift.certified, || format!("prism lift: {:?}", lift.failures()))?;
    let orchard = orchard_ladder(SEED)?;
    let w = orchard.planar.stress.clone().expect("orchard stress");
    let lift = certify_by_lift(&orchard.projection.framework, &orchard.planar.framework, &w)?;
    ensure(lift.certified, || format!("orchard lift: {:?}", lift.failures()))?;

    let zero_stress = Stress::zero(9);
    let lift = certify_by_lift(&ur.projected, &ur.planar.framework, &zero_stress)?;
    ensure(!lift.certified, || "zero stress lifted".into())?;

    // every edge horizontal: the planar prism flattened onto y = 0
    let flat_points = ur.planar.framework.config().points().iter().map(|p| vec![p[0].clone(), zero()]).collect();
    let flat = ur.planar.framework.with_config(Configuration::new(2, flat_points)?)?;
    let lift = certify_by_lift(&ur.projected, &flat, &ur.planar_stress)?;
    ensure(!lift.certified, || "all-horizontal high framework lifted".into())?;

    // horizontal triangles joined by vertical rungs: edge directions on the conic xy = 0
    let ladder = Framework::new(
        prism_graph(),
        Configuration::from_i64(2, &[&[0, 0], &[1, 0], &[3, 0], &[0, 1], &[1, 1], &[3, 1]])?,
    )?;
    let low = project_orthogonal(&ladder, &ProjectionTarget::FirstCoordinates(1))?.low;
    let mut conic_hit = false;
    for w in equilibrium_stress_basis(&ladder) {
        let lift = certify_by_lift(&low, &ladder, &w)?;
        ensure(!lift.certified, || "axis-parallel ladder lifted".into())?;
        conic_hit |= !lift.conic_free;
    }
    ensure(conic_hit, || "conic at infinity not reported".into())?;
    Ok("prism and orchard lifts certified; zero stress, flattened and axis-parallel highs rejected".into())
}

fn random_scalar(rng: &mut impl Rng, max: i64, den: i64) -> Scalar {
    ratio(rng.random_range(-max..=max), den)
}

fn projection_identity() -> Outcome {
    let mut both = [0usize; 2];
    for trial in 0..100 {
        let mut rng = trial_rng(SEED, trial);
        let n = rng.random_range(2..=8usize);
        let big = rng.random_range(1..=4usize);
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let edges: Vec<_> = pairs.into_iter().filter(|_| rng.random_bool(0.6)).collect();
        let pts: Vec<Vec<Scalar>> = (0..n).map(|_| (0..big).map(|_| random_scalar(&mut rng, 20, 3)).collect()).collect();
        let f = Framework::new(Graph::new(n, edges)?, Configuration::new(big, pts)?)?;
        let k = rng.random_range(1..=big);
        let dirs: Vec<Vec<Scalar>> = (0..k).map(|_| (0..big).map(|_| random_scalar(&mut rng, 6, 1)).collect()).collect();
        let split = match project_orthogonal(&f, &ProjectionTarget::Directions(dirs)) {
            Ok(s) => s,
            Err(Error::DependentDirections) => project_orthogonal(&f, &ProjectionTarget::FirstCoordinates(k))?,
            Err(e) => return Err(e.into()),
        };
        for i in 1..=n {
            for j in 1..=n {
                let lhs = split.high_squared_distance(i, j);
                let rhs = split.low_squared_distance(i, j) + split.height_squared_distance(i, j);
                ensure(lhs == rhs, || format!("trial {trial}: splitting fails at {i},{j}"))?;
                let direct = f.config().squared_distance(i, j);
                ensure(lhs == direct, || format!("trial {trial}: high distance mismatch"))?;
            }
        }
        // an isometric copy of the low part and a perturbed one, both with the original heights
        let mirrored: Vec<Vec<Scalar>> = split.low.config().points().iter().map(|p| p.iter().map(|x| -x).collect()).collect();
        let mut bumped = split.low.config().points().to_vec();
        bumped[rng.random_range(0..n)][0] += ratio(1, 7);
        for q in [mirrored, bumped] {
            let q = Configuration::new(split.low.dim(), q)?;
            let high_eq = check_equivalent(&f, &split.lift(&q)?)?;
            let low_eq = split.low_equivalent(&q)?;
            ensure(high_eq == low_eq, || format!("trial {trial}: equivalence transfer fails"))?;
            both[usize::from(high_eq)] += 1;
        }
    }
    Ok(format!(
        "100 frameworks: splitting exact for all pairs; transfer holds ({} equivalent, {} not)",
        both[1], both[0]
    ))
}

fn certified_items() -> Result<Vec<GalleryItem>, Failure> {
    let ur = prism_line_ur(SEED)?;
    let planar = rigidline::gallery::prism_desargues_2d(&ConcurrentLines::default())?;
    let orchard = orchard_ladder(SEED)?;
    Ok(vec![stretched_cycle(&triangular_positions(6))?, ur.item, planar, orchard.planar])
}

fn affine_invariance() -> Outcome {
    let items = certified_items()?;
    let mut certified = 0;
    let mut collapsed = 0;
    for trial in 0..20u64 {
        let item = &items[trial as usize % items.len()];
        let f = &item.framework;
        let cert = certify_super_stable(f, item.stress.as_ref(), &SearchOptions::seeded(SEED))?;
        ensure(cert.is_certified(), || format!("{} is not certified", item.name))?;
        let mut rng = trial_rng(SEED ^ 0xaff1, trial);
        let d = f.dim();
        let singular = trial >= 15;
        let mut a = MatrixR::zeros(d, d);
        loop {
            for i in 0..d {
                for j in 0..d {
                    a[(i, j)] = random_scalar(&mut rng, 5, 2);
                }
            }
            if singular {
                if d == 1 {
                    a[(0, 0)] = zero();
                } else {
                    for j in 0..d {
                        let v = &a[(0, j)] * int(2);
                        a[(d - 1, j)] = v;
                    }
                }
            }
            if singular || a.rank() == d {
                break;
            }
        }
        let b: Vec<Scalar> = (0..d).map(|_| random_scalar(&mut rng, 5, 1)).collect();
        let af = DMatrix::from_fn(d, d, |i, j| to_f64(&a[(i, j)]));
        let svd = svd_factor(&af)?;
        let amax = af.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = (svd.reconstruct() - &af).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        ensure(err <= 1e-12 * (1.0 + amax), || format!("trial {trial}: svd error {err:e}"))?;
        let demo = affine_invariance_demo(f, &cert, &AffineMap::new(a, b)?, SEED)?;
        if demo.image_span >= 1 {
            ensure(demo.certified, || {
                format!("trial {trial} ({}): image of span {} not certified {:?}", item.name, demo.image_span, demo.lift)
            })?;
            certified += 1;
        } else {
            collapsed += 1;
        }
    }
    Ok(format!("20 maps (5 singular): {certified} images certified, {collapsed} collapsed to a point"))
}

fn convex_quadrilaterals() -> Outcome {
    let mut count = 0;
    let mut trial = 0;
    while count < 50 {
        let mut rng = trial_rng(SEED ^ 0xc0ffee, trial);
        trial += 1;
        let pts: Vec<Vec<Scalar>> = (0..4).map(|_| vec![random_scalar(&mut rng, 40, 4), random_scalar(&mut rng, 40, 4)]).collect();
        let config = Configuration::new(2, pts)?;
        let hull = convex_hull(&config);
        if hull.len() != 4 {
            continue;
        }
        count += 1;
        let f = Framework::new(Graph::complete(4), config)?;
        let basis = equilibrium_stress_basis(&f);
        ensure(basis.len() == 1, || format!("stress space dimension {}", basis.len()))?;
        let (a, b) = (hull[0].min(hull[1]), hull[0].max(hull[1]));
        let w = if basis[0].on_edge(f.graph(), a, b) > zero() { basis[0].clone() } else { basis[0].neg() };
        let report = check_convex_polygon_stress(&f, &w)?;
        ensure(report.hypotheses_hold(), || format!("quadrilateral {count}: hypotheses fail"))?;
        ensure(report.conclusion_holds(), || format!("quadrilateral {count}: conclusion fails"))?;
        ensure(report.psd.is_psd() && report.psd.rank == 1, || format!("quadrilateral {count}: rank {}", report.psd.rank))?;
        let diagonals = [(hull[0], hull[2]), (hull[1], hull[3])];
        let negative = diagonals.iter().all(|&(i, j)| w.on_edge(f.graph(), i.min(j), i.max(j)) < zero());
        ensure(negative, || format!("quadrilateral {count}: diagonal stress not negative"))?;
        ensure(!w.values().iter().any(Zero::is_zero), || "zero stress entry".into())?;
    }
    Ok("50 quadrilaterals: boundary positive, diagonals negative, PSD rank 1; 0 inconsistencies".into())
}

fn consistency_guard() -> Outcome {
    let opts = FlexOptions::default();
    let mut checked = 0;
    for scale in 1..=3 {
        {
            let positions: Vec<Scalar> = triangular_positions(4).into_iter().map(|x| x * int(scale)).collect();
            let item = stretched_cycle(&positions)?;
            for &e in item.framework.graph().edges() {
                if let Some(w) = find_alternate_realization(&item.framework, e, &opts)? {
                    return Err(Failure::Inconsistency(format!("certified 4-cycle flexes at theta {}", w.theta)));
                }
                checked += 1;
            }
        }
    }
    for seed in [SEED, 1, 2] {
        let ur = prism_line_ur(seed)?;
        for f in [&ur.item.framework, &ur.projected] {
            for rung in RUNG_ORDER {
                if let Some(w) = find_alternate_realization(f, rung, &opts)? {
                    return Err(Failure::Inconsistency(format!("certified prism flexes at theta {}", w.theta)));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} linkage searches on certified frameworks, no witness"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        ("stretched-cycle certification", stretched_cycles),
        ("alternating-cycle negative", alternating_cycle_negative),
        ("headline pair", headline),
        ("first-proof arithmetic", first_proof_arithmetic),
        ("lift test", lift_tests),
        ("projection identity", projection_identity),
        ("affine invariance", affine_invariance),
        ("convex quadrilaterals", convex_quadrilaterals),
        ("consistency guard", consistency_guard),
    ];
    let mut failed = 0;
    let mut inconsistent = false;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(e) => {
                failed += 1;
                inconsistent |= matches!(e, Failure::Inconsistency(_));
                println!("criterion {}: FAIL {name} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if inconsistent {
        ExitCode::from(3)
    } else if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
