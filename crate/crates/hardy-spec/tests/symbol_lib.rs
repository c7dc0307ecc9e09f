use hardy_spec::hardy::{BoundaryGrid, Discretization};
use hardy_spec::symbol::*;
use hardy_spec::{Error, C64};
use proptest::prelude::*;

fn sym(e: &str, class: ContinuityClass) -> AnalyticSymbol {
    make_symbol(&SymbolSpec::new(e, 0.5, class)).unwrap()
}

fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let dir = |x: &[C64], y: &[C64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    dir(a, b).max(dir(b, a))
}

#[test]
fn construction_examples() {
    assert!(make_symbol(&SymbolSpec::new("i", 0.5, ContinuityClass::Constant)).is_ok());
    let s = sym("i + 0.5*cay(z1)", ContinuityClass::ContinuousOnClosure);
    assert!(s.im_lower_bound >= 0.5 && s.sup_bound <= 1.5 + 1e-9);
    let err = make_symbol(&SymbolSpec::new("1", 0.5, ContinuityClass::Constant)).unwrap_err();
    assert!(matches!(err, Error::Construction(ref m) if m.contains("violates")));
    assert!(make_symbol(&SymbolSpec::new("i + cay(z1", 0.5, ContinuityClass::Constant)).is_err());
}

#[test]
fn expression_parsing() {
    let e = parse("2i + 1/(z1 + i) - z2^2").unwrap();
    let (a, b) = (C64::new(0.3, 1.2), C64::new(-1.0, 0.5));
    let want = C64::new(0.0, 2.0) + 1.0 / (a + C64::i()) - b * b;
    assert!((e.eval(a, b) - want).norm() < 1e-15);
    assert_eq!(parse("z").unwrap(), parse("z1").unwrap());
}

#[test]
fn boundary_evaluation_examples() {
    let g = BoundaryGrid::uniform(1e6, 3).unwrap();
    let space = Discretization::boundary2(g.clone(), g);
    let c = eval_boundary(&sym("i", ContinuityClass::Constant), &space).unwrap();
    assert!(c.iter().all(|v| *v == C64::i()));
    let s = sym("i + 0.5*cay(z1)", ContinuityClass::ContinuousOnClosure);
    let f = eval_boundary(&s, &space).unwrap();
    // middle node x1 = 0: cay(0) = -1
    assert!((f[4] - C64::new(-0.5, 1.0)).norm() < 1e-7);
    // x1 = 1e6: cay -> 1
    assert!((f[8] - C64::new(0.5, 1.0)).norm() < 1e-5);
    assert!(f.iter().all(|v| v.im >= 0.5 - 1e-6));
}

#[test]
fn cluster_sets_of_catalog_examples() {
    let plan = ClusterPlan::default_for(ClusterTarget::Infinity);
    let c = cluster_set(&sym("0.3 + 2i", ContinuityClass::Constant), ClusterTarget::Infinity, &plan).unwrap();
    assert_eq!(c.cloud.points, vec![C64::new(0.3, 2.0)]);
    for e in ["i + 0.5*cay(z1)", "i + 0.5*cay(z1)*cay(z2)"] {
        let c = cluster_set(&sym(e, ContinuityClass::ContinuousOnClosure), ClusterTarget::Infinity, &plan).unwrap();
        assert!(c.cloud.points.iter().all(|p| (p - C64::new(0.5, 1.0)).norm() < 1e-3), "{e}");
    }
}

#[test]
fn disc_corner_target() {
    let s =
        make_symbol(&SymbolSpec::new("i + 0.25*z1*z2", 0.5, ContinuityClass::ContinuousOnClosure).on_disc()).unwrap();
    let plan = ClusterPlan::default_for(ClusterTarget::DiscCorner);
    let c = cluster_set(&s, ClusterTarget::DiscCorner, &plan).unwrap();
    assert!(c.cloud.points.iter().all(|p| (p - C64::new(0.25, 1.0)).norm() < 1e-3));
}

#[test]
fn separable_sums_with_constant_factors_collapse() {
    let s = sym("(0.5)*(i) + (1)*(0.5i) + 0.25", ContinuityClass::SeparableSum);
    let c = cluster_set(&s, ClusterTarget::Infinity, &ClusterPlan::default_for(ClusterTarget::Infinity)).unwrap();
    assert_eq!(c.cloud.len(), 1);
    assert!((c.cloud.points[0] - C64::new(0.25, 1.0)).norm() < 1e-15);
}

#[test]
fn essential_range_matches_cluster_set() {
    let g = BoundaryGrid::uniform(1000.0, 401).unwrap();
    let space = Discretization::boundary2(g.clone(), g);
    let s = sym("i + 0.5*cay(z1)", ContinuityClass::ContinuousOnClosure);
    let field = eval_boundary(&s, &space).unwrap();
    let r = essential_range_at_infinity(&field, &space, &[100.0, 500.0], 0.01, TailMode::Joint).unwrap();
    let c = cluster_set(&s, ClusterTarget::Infinity, &ClusterPlan::default_for(ClusterTarget::Infinity)).unwrap();
    assert!(!r.cloud.is_empty());
    assert!(hausdorff(&r.cloud.points, &c.cloud.points) <= 0.02);
    assert!(matches!(
        essential_range_at_infinity(&field, &space, &[2000.0], 0.01, TailMode::Joint),
        Err(Error::Usage(_))
    ));
}

#[test]
fn per_axis_tail_keeps_the_other_variable_free() {
    let g = BoundaryGrid::uniform(1000.0, 201).unwrap();
    let space = Discretization::boundary2(g.clone(), g);
    let s = sym("i + 0.25*cay(z2)", ContinuityClass::ContinuousOnClosure);
    let field = eval_boundary(&s, &space).unwrap();
    // tail in x1 only: x2 sweeps the whole line, so the range is a curve, not a point
    let r = essential_range_at_infinity(&field, &space, &[500.0], 0.02, TailMode::Axis(0)).unwrap();
    assert!(r.cloud.len() > 5);
    let joint = essential_range_at_infinity(&field, &space, &[500.0], 0.02, TailMode::Joint).unwrap();
    assert!(joint.cloud.len() < r.cloud.len());
}

#[test]
fn closure_image_examples() {
    let c = closure_image(&sym("1 + 3i", ContinuityClass::Constant), 1000, 1).unwrap();
    assert_eq!(c.points, vec![C64::new(1.0, 3.0)]);
    let s = sym("i + 0.5*cay(z1)", ContinuityClass::ContinuousOnClosure);
    let c = closure_image(&s, 5000, 2).unwrap();
    let reach = c.points.iter().map(|p| (p - C64::i()).norm()).fold(0.0, f64::max);
    assert!(reach <= 0.5 + 1e-12 && reach > 0.45);
    assert!(c.points.iter().all(|p| p.im >= 0.5 - 1e-9));
}

#[test]
fn catalog_is_admissible() {
    for (name, spec) in catalog() {
        let s = make_symbol(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(s.sup_bound.is_finite() && s.im_lower_bound > 0.0, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    // With every shell in the estimate, appending shells can only add points.
    #[test]
    fn appending_shells_never_removes_cluster_points(extra in 1usize..4, start in 2i32..5) {
        let s = sym("i + 0.5*cay(z1)*cay(z2)", ContinuityClass::ContinuousOnClosure);
        let shells: Vec<f64> = (start..start + 4).map(|k| 2f64.powi(k)).collect();
        let mut plan = ClusterPlan { shells, samples_per_shell: 64, seed: 5, tail_shells: 4, parallelism: Default::default() };
        let small = cluster_set(&s, ClusterTarget::Infinity, &plan).unwrap();
        for k in 0..extra {
            plan.shells.push(2f64.powi(start + 4 + k as i32));
        }
        plan.tail_shells = plan.shells.len();
        let big = cluster_set(&s, ClusterTarget::Infinity, &plan).unwrap();
        for p in &small.cloud.points {
            prop_assert!(big.cloud.distance_to(*p) <= DEDUP_RESOLUTION);
        }
    }

    #[test]
    fn point_clouds_are_sorted_and_deduplicated(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..60)) {
        let mut v: Vec<C64> = pts.iter().map(|&(a, b)| C64::new(a, b)).collect();
        v.extend(v.clone());
        let c = PointCloud::new(v, "p");
        prop_assert!(c.points.windows(2).all(|w| (w[0].re, w[0].im) < (w[1].re, w[1].im)));
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                prop_assert!((c.points[i] - c.points[j]).norm() > DEDUP_RESOLUTION);
            }
        }
    }
}
