use hardy_spec::hardy::{cayley, BoundaryGrid, Discretization, FrequencyGrid};
use hardy_spec::operator::{kron, modal_dilation, modal_multiplier, op_norm, Block, FrequencyModel, OperatorMatrix};
use hardy_spec::quasi_parabolic::*;
use hardy_spec::symbol::{make_symbol, AnalyticSymbol, ContinuityClass, PointCloud, SymbolSpec};
use hardy_spec::{Error, C64};
use ndarray::Array2;
use proptest::prelude::*;
use std::f64::consts::PI;

fn sym(expr: &str) -> AnalyticSymbol {
    let class = if expr.contains('z') { ContinuityClass::ContinuousOnClosure } else { ContinuityClass::Constant };
    make_symbol(&SymbolSpec::new(expr, 0.5, class)).unwrap()
}

fn disc_sym(expr: &str) -> AnalyticSymbol {
    let class = if expr.contains('z') { ContinuityClass::ContinuousOnClosure } else { ContinuityClass::Constant };
    make_symbol(&SymbolSpec::new(expr, 0.5, class).on_disc()).unwrap()
}

fn cloud(p: &[C64]) -> PointCloud {
    PointCloud::new(p.to_vec(), "K")
}

fn scan_min(points: &[C64], lo: f64, hi: f64) -> (f64, f64) {
    (0..=20_000)
        .map(|k| lo + (hi - lo) * k as f64 / 20_000.0)
        .map(|a| (a, delta_of(points, a)))
        .fold((0.0, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

#[test]
fn alpha_examples() {
    let (a, d) = choose_alpha(&cloud(&[C64::new(0.0, 2.0)]), AlphaMode::Minimize).unwrap();
    assert!((a - 2.0).abs() < 1e-6 && d < 1e-6);

    let k = [C64::new(1.0, 1.0)];
    let (a, d) = choose_alpha(&cloud(&k), AlphaMode::Minimize).unwrap();
    assert!((a - 2.0).abs() < 1e-5 && (d - 0.5f64.sqrt()).abs() < 1e-10);
    let (_, brute) = scan_min(&k, 0.01, 10.0);
    assert!(d <= brute + 1e-12);

    // two points on the axis: the scan oracle lands on alpha = 2, delta = 1/2
    let k = [C64::new(0.0, 1.0), C64::new(0.0, 3.0)];
    let (a, d) = choose_alpha(&cloud(&k), AlphaMode::Minimize).unwrap();
    let (ba, bd) = scan_min(&k, 0.01, 10.0);
    assert!((a - ba).abs() < 1e-3 && d <= bd + 1e-12);
    assert!((a - 2.0).abs() < 1e-5 && (d - 0.5).abs() < 1e-10);

    let bad = cloud(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
    assert!(matches!(choose_alpha(&bad, AlphaMode::Minimize), Err(Error::Domain(_))));
}

#[test]
fn target_delta_gives_smallest_admissible_alpha() {
    let k = [C64::new(0.5, 1.0), C64::new(-0.3, 1.4)];
    let (a, d) = choose_alpha(&cloud(&k), AlphaMode::TargetDelta(0.8)).unwrap();
    assert!(d <= 0.8 + 1e-12);
    assert!(delta_of(&k, a * (1.0 - 1e-6)) > 0.8);
}

#[test]
fn vartheta_examples() {
    let f0 = vartheta(0, 1.7);
    for t in [0.0, 0.3, 2.0] {
        assert!((f0(t) - (-1.7 * t).exp()).norm() < 1e-15);
    }
    assert!((vartheta(1, 1.0)(1.0) - C64::new(0.0, -0.36787944117144233)).norm() < 1e-15);
    for (n, alpha) in [(1, 1.0), (4, 0.7), (9, 2.5)] {
        let f = vartheta(n, alpha);
        let scan = (1..200_000).map(|k| f(k as f64 * 1e-4).norm()).fold(0.0, f64::max);
        let mut fact = 1.0;
        for j in 1..=n {
            fact *= j as f64;
        }
        let closed = (n as f64 / (std::f64::consts::E * alpha)).powi(n as i32) / fact;
        assert!((vartheta_sup(n, alpha) - closed).abs() < 1e-14 * closed.max(1.0));
        assert!((scan - closed).abs() < 1e-8 * closed, "n = {n}");
    }
}

fn diag_entries(b: &Block, n: usize) -> Vec<C64> {
    match b {
        Block::Scalar(c) => vec![*c; n],
        Block::Diag(d) => d.to_vec(),
        Block::Dense(m) => (0..n).map(|i| m[[i, i]]).collect(),
    }
}

fn off_diagonal(b: &Block) -> f64 {
    match b {
        Block::Dense(m) => m.indexed_iter().filter(|((i, j), _)| i != j).map(|(_, v)| v.norm()).fold(0.0, f64::max),
        _ => 0.0,
    }
}

#[test]
fn constant_perturbation_equal_to_i_alpha_needs_one_term() {
    let map = QuasiParabolicMap::new(1.0, 1.0, sym("2i"), sym("2i")).unwrap();
    let plan = plan_series(&map, &PlanOptions::default()).unwrap();
    assert!((plan.alpha - 2.0).abs() < 1e-5);
    let g = FrequencyGrid::uniform(6.0, 13).unwrap();
    let out =
        build_series(&map, &plan.with_orders(6, 6), &FrequencyModel::sampled(vec![g.clone(), g.clone()])).unwrap();
    let d = diag_entries(&out.block, 169);
    for (i, &a) in g.nodes.iter().enumerate() {
        for (j, &b) in g.nodes.iter().enumerate() {
            let want = (-plan.alpha * (a + b)).exp();
            assert!((d[i * 13 + j] - want).norm() < 1e-8);
        }
    }
    assert!(off_diagonal(&out.block) < 1e-12);
}

#[test]
fn constant_symbols_sum_to_exponential() {
    let map = QuasiParabolicMap::new(1.0, 1.0, sym("i"), sym("2i")).unwrap();
    let plan = plan_series(&map, &PlanOptions::default()).unwrap();
    let g = FrequencyGrid::uniform(10.0, 11).unwrap();
    let model = FrequencyModel::sampled(vec![g.clone(), g.clone()]);
    let out = build_series(&map, &plan.with_orders(40, 40), &model).unwrap();
    let d = diag_entries(&out.block, 121);
    // node (1, 1): e^{-1 - 2}
    assert!((d[12] - 0.049787068367863944).norm() < 1e-9, "{}", d[12]);

    let zero = build_series(&map, &plan.with_orders(0, 0), &model).unwrap();
    let d0 = diag_entries(&zero.block, 121);
    assert!((d0[12] - (-2.0 * plan.alpha).exp()).norm() < 1e-14);
}

#[test]
fn uncertified_plans_are_refused() {
    let map = QuasiParabolicMap::new(1.0, 1.0, sym("i"), sym("2i")).unwrap();
    let g = FrequencyGrid::uniform(5.0, 8).unwrap();
    let plan = SeriesPlan::new(1.0, 1.2, 3, 3, Some(NormEstimates::unit()));
    assert!(build_series(&map, &plan, &FrequencyModel::sampled(vec![g.clone(), g])).is_err());
    assert!(QuasiParabolicMap::new(0.0, 1.0, sym("i"), sym("i")).is_err());
}

#[test]
fn remainder_examples() {
    let unit = Some(NormEstimates::unit());
    assert_eq!(remainder_bound(&SeriesPlan::new(1.0, 0.0, 4, 7, unit)).unwrap(), 0.0);
    let p = SeriesPlan::new(1.0, 0.5, 10, 10, unit);
    let direct = 2.0 * 0.5f64.powi(11) * 2.0 + 0.5f64.powi(20);
    assert!((remainder_bound(&p).unwrap() - direct).abs() < 1e-16);
    assert!((p.remainder_bound - 0.0019541).abs() < 5e-8);
    let missing = SeriesPlan { norm_estimates: None, ..p };
    assert!(matches!(remainder_bound(&missing), Err(Error::Usage(_))));
}

proptest! {
    #[test]
    fn remainder_decreases_in_each_order(delta in 0.01f64..0.99, n1 in 0usize..40, n2 in 0usize..40) {
        let p = SeriesPlan::new(1.0, delta, n1, n2, Some(NormEstimates::unit()));
        prop_assert!(p.with_orders(n1 + 1, n2).remainder_bound <= p.remainder_bound);
        prop_assert!(p.with_orders(n1, n2 + 1).remainder_bound <= p.remainder_bound);
        prop_assert!(p.with_orders(n1 + 1, n2 + 1).remainder_bound < p.remainder_bound);
    }

    #[test]
    fn minimized_delta_matches_brute_scan(pts in prop::collection::vec((-2.0f64..2.0, 0.2f64..3.0), 1..6)) {
        let k: Vec<C64> = pts.iter().map(|&(x, y)| C64::new(x, y)).collect();
        let (_, d) = choose_alpha(&cloud(&k), AlphaMode::Minimize).unwrap();
        let min_im = k.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        let max_abs2 = k.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let (lo, hi) = ((min_im / 2.0).ln(), (4.0 * max_abs2 / min_im).ln());
        let brute = (0..=4000).map(|j| delta_of(&k, (lo + (hi - lo) * j as f64 / 4000.0).exp())).fold(f64::INFINITY, f64::min);
        prop_assert!(d <= brute + 1e-9);
        prop_assert!(d < 1.0);
    }
}

fn kernel(w: (C64, C64)) -> impl Fn(C64, C64) -> C64 {
    let c = 1.0 / (C64::new(0.0, 2.0 * PI) * C64::new(0.0, 2.0 * PI));
    move |z1, z2| c / ((w.0.conj() - z1) * (w.1.conj() - z2))
}

#[test]
fn direct_translation_acts_on_kernels() {
    let g = BoundaryGrid::cayley(48).unwrap();
    let shift = FnMap(|a: C64, b: C64| (a + C64::i(), b + C64::i()));
    let op = direct_composition(&shift, &g, &g, 0.5).unwrap();
    let f = kernel((C64::new(0.3, 1.2), C64::new(-0.5, 0.8)));
    let n = g.len();
    let samples =
        ndarray::Array1::from_shape_fn(n * n, |i| f(C64::new(g.nodes[i / n], 0.0), C64::new(g.nodes[i % n], 0.0)));
    let out = op.entries.dot(&samples);
    let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for i in 0..n * n {
        let want = f(C64::new(g.nodes[i / n], 1.0), C64::new(g.nodes[i % n], 1.0));
        assert!((out[i] - want).norm() < 1e-4 * scale);
    }
}

#[test]
fn direct_translation_is_a_multiplier() {
    let alpha = 0.7;
    let modes = 10;
    let g = BoundaryGrid::cayley(64).unwrap();
    let shift = FnMap(move |a: C64, b: C64| (a + C64::new(0.0, alpha), b + C64::new(0.0, alpha)));
    let direct = direct_composition_modal(&shift, &g, &g, (modes, modes), 0.5).unwrap();
    let m = modal_multiplier(&|t| C64::new((-alpha * t).exp(), 0.0), alpha, modes).unwrap();
    let m1 = OperatorMatrix::square(m, Discretization::taylor(modes)).unwrap();
    let want = kron(&m1, &m1).unwrap();
    let gap = op_norm(&direct.sub(&want).unwrap()).unwrap();
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn direct_composition_requires_interior_image() {
    let g = BoundaryGrid::cayley(16).unwrap();
    let identity = FnMap(|a: C64, b: C64| (a, b));
    assert!(matches!(direct_composition(&identity, &g, &g, 0.1), Err(Error::Domain(_))));
}

#[test]
fn dilated_series_matches_direct_composition() {
    // The dilation mixes all modes, so the series is built on a larger section and its
    // leading block compared.
    let map = QuasiParabolicMap::new(2.0, 1.5, sym("i + 0.25*cay(z1)"), sym("i")).unwrap();
    let plan = plan_series(&map, &PlanOptions::default()).unwrap();
    let (modes, big) = (10, 40);
    let series = build_series(&map, &plan, &FrequencyModel::modal(vec![big, big])).unwrap();
    assert_eq!(series.diagnostics.dilation, Some((2.0, 1.5)));
    let full = series.matrix().entries;
    let lead = Array2::from_shape_fn((modes * modes, modes * modes), |(i, j)| {
        full[[(i / modes) * big + i % modes, (j / modes) * big + j % modes]]
    });
    let lead = OperatorMatrix::square(lead, Discretization::taylor2(modes, modes)).unwrap();
    let g = BoundaryGrid::cayley(64).unwrap();
    let direct = direct_composition_modal(&map, &g, &g, (modes, modes), 0.1).unwrap();
    let gap = op_norm(&lead.sub(&direct).unwrap()).unwrap();
    assert!(gap < plan.remainder_bound.max(1e-3), "{gap}");
}

#[test]
fn dilated_constant_map_on_lowest_mode() {
    // phi = (2 z1 + i, 2 z2 + i) sends 1/((z1+i)(z2+i)) to (1/4) / ((z1+i)(z2+i))
    let map = QuasiParabolicMap::new(2.0, 2.0, sym("i"), sym("i")).unwrap();
    let plan = plan_series(&map, &PlanOptions::default()).unwrap();
    let out = build_series(&map, &plan, &FrequencyModel::modal(vec![16, 16])).unwrap().matrix();
    assert!((out.entries[[0, 0]] - 0.25).norm() < 1e-8);
    assert!(out.entries.column(0).iter().skip(1).all(|v| v.norm() < 1e-8));
    // and the one-variable pieces are the modal dilation after the multiplier
    let m = modal_multiplier(&|t| C64::new((-t).exp(), 0.0), 1.0, 16).unwrap();
    let v = modal_dilation(0.5, 16).unwrap();
    let one = OperatorMatrix::square(v.dot(&m), Discretization::taylor(16)).unwrap();
    let want = kron(&one, &one).unwrap();
    assert!(op_norm(&out.sub(&want).unwrap()).unwrap() < 1e-8);
}

fn disc_residual(psi1: &str, psi2: &str, modes: usize) -> f64 {
    let (a, b) = (disc_sym(psi1), disc_sym(psi2));
    let out = disc_side_operator(&a, &b, &FrequencyModel::modal(vec![modes, modes]), &PlanOptions::default()).unwrap();
    let phi = out.disc_map();
    let mut worst: f64 = 0.0;
    for (p, q) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1), (2, 0)] {
        let want = disc_taylor_composition(&phi, (p, q), (modes, modes), 64);
        let col = out.operator.entries.column(p as usize * modes + q as usize).to_owned();
        let got = Array2::from_shape_vec((modes, modes), col.to_vec()).unwrap();
        let err = (&got - &want).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(err);
    }
    worst
}

#[test]
fn disc_side_intertwining_on_monomials() {
    let r = disc_residual("i", "i", 16);
    assert!(r < 1e-3, "constant perturbation residual {r}");
    let r = disc_residual("i + 0.25*z1", "i + 0.2*z2", 16);
    assert!(r < 1e-3, "residual {r}");
}

#[test]
fn disc_side_constant_case() {
    let (a, b) = (disc_sym("i"), disc_sym("i"));
    let out = disc_side_operator(&a, &b, &FrequencyModel::modal(vec![6, 6]), &PlanOptions::default()).unwrap();
    // the half-plane map is a translation by i in each variable
    let z = (C64::new(0.4, 0.9), C64::new(-1.2, 0.3));
    let (u, v) = out.map.apply(z.0, z.1);
    assert!((u - z.0 - C64::i()).norm() < 1e-15 && (v - z.1 - C64::i()).norm() < 1e-15);
    // the disc origin corresponds to z = i, which moves to 2i
    let (w1, _) = (out.disc_map())(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    assert!((w1 - cayley(C64::new(0.0, 2.0)).unwrap()).norm() < 1e-14);
    let m = |x: f64| (1.0 + C64::i() / C64::new(x, 1.0)) * (1.0 + C64::i() / C64::new(x, 1.0));
    assert!((m(1e6) - 1.0).norm() < 1e-5);
    assert!(matches!(
        disc_side_operator(&sym("i"), &sym("i"), &FrequencyModel::modal(vec![4, 4]), &PlanOptions::default()),
        Err(Error::Usage(_))
    ));
}
