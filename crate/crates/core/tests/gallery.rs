use rigidline::certify::{certify_by_lift, certify_super_stable, SearchOptions, Verdict};
use rigidline::flex::{find_alternate_realization, FlexOptions};
use rigidline::framework::Framework;
use rigidline::gallery::{
    orchard_ladder, prism_line_flexible, prism_line_ur, search_desargues_2d, strictly_convex_along, RUNG_ORDER,
    PRISM_HULL_CYCLE,
};
use rigidline::linalg::{psd_rank, rref_kernel};
use rigidline::scalar::one;
use rigidline::stress::{equilibrium_stress_basis, is_equilibrium, stress_matrix};

#[test]
fn line_prism_pipeline() {
    let ur = prism_line_ur(1).unwrap();
    let g = ur.projected.graph();
    let rank = |w| psd_rank(&stress_matrix(g, w).unwrap()).unwrap();
    assert_eq!(rank(&ur.flat_stress).rank, 1);
    assert_eq!(rank(&ur.planar_stress).rank, 3);
    let sum = rank(&ur.combined);
    assert!(sum.is_psd());
    assert_eq!(sum.rank, 4);

    let omega = stress_matrix(g, &ur.combined).unwrap();
    let (r, kernel) = rref_kernel(&omega);
    assert_eq!(r, 4);
    let xs: Vec<_> = ur.projected.config().points().iter().map(|p| p[0].clone()).collect();
    let ones = vec![one(); 6];
    let in_span = |v: &Vec<rigidline::Scalar>| {
        rigidline::MatrixR::from_rows(vec![kernel[0].clone(), kernel[1].clone(), v.clone()]).rank() == 2
    };
    assert!(in_span(&ones) && in_span(&xs));

    for item in [&ur.item, &ur.planar] {
        assert!(item.stress_is_equilibrium().unwrap());
    }
    assert!(is_equilibrium(&ur.projected, &ur.planar_stress).unwrap());
    let lift = certify_by_lift(&ur.projected, &ur.planar.framework, &ur.planar_stress).unwrap();
    assert!(lift.certified, "{:?}", lift.failures());
    let cert = certify_super_stable(&ur.item.framework, ur.item.stress.as_ref(), &SearchOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    for rung in RUNG_ORDER {
        assert!(find_alternate_realization(&ur.item.framework, rung, &FlexOptions::default()).unwrap().is_none());
    }

    let flex = prism_line_flexible(&ur.order, 1).unwrap();
    assert_eq!(flex.item.framework.config().line_order(), ur.order);
    let w = &flex.witness;
    assert!(w.max_edge_residual() <= 1e-10);
    assert!(w.discrepancy > 5e-2);
    assert_eq!(w.span, 2);
    let cert = certify_super_stable(&flex.item.framework, None, &SearchOptions::default()).unwrap();
    assert!(!cert.is_certified());
}

#[test]
fn orchard_ladder_lifts() {
    let o = orchard_ladder(3).unwrap();
    let psd = psd_rank(&stress_matrix(o.planar.framework.graph(), o.planar.stress.as_ref().unwrap()).unwrap()).unwrap();
    assert!(psd.is_psd());
    assert_eq!(psd.rank, 3);
    assert!(o.lift.certified);
    let again = certify_by_lift(&o.projection.framework, &o.planar.framework, o.planar.stress.as_ref().unwrap()).unwrap();
    assert!(again.certified);
    assert!(o.projection.stress_is_equilibrium().unwrap());
}

#[test]
fn seeded_desargues_search() {
    let item = search_desargues_2d(5).unwrap();
    assert!(strictly_convex_along(item.framework.config(), &PRISM_HULL_CYCLE));
    assert_eq!(equilibrium_stress_basis(&item.framework).len(), 1);
    let cert = certify_super_stable(&item.framework, item.stress.as_ref(), &SearchOptions::default()).unwrap();
    assert_eq!(cert.psd.unwrap().rank, 3);
    assert_eq!(item, search_desargues_2d(5).unwrap());
    let _: &Framework = &item.framework;
}
