//! The subcommands. Each writes its files into the output directory and returns
//! whether its check passed; errors carry their exit code through `main`.

use crate::config::{ConfigError, Layout, Model, RunConfig};
use crate::svg::Plot;
use anyhow::{bail, Context, Result};
use hardy_spec::hardy::{BoundaryGrid, Discretization, FrequencyGrid};
use hardy_spec::io::{write_cloud_csv, write_json, write_map_csv, write_matrix_csv, write_set_csv, MatrixSidecar};
use hardy_spec::operator::{op_norm, FrequencyModel, OperatorMatrix};
use hardy_spec::par::Parallelism;
use hardy_spec::quasi_parabolic::{
    build_series, direct_composition_modal, disc_side_operator, plan_series, AlphaMode, PlanOptions, QuasiParabolicMap,
    SeriesOutput, SeriesPlan,
};
use hardy_spec::spectra::{
    containment_verdict, default_tolerance, eigenvalues, essential_spectrum_surrogate, predicted_set, pseudospectrum,
    spiral_samples, Region, SpectralKind, SpectralSet, TGrid, Verdict,
};
use hardy_spec::symbol::{
    cluster_set, make_symbol, AnalyticSymbol, ClusterPlan, ClusterTarget, PointCloud, SymbolDomain, SymbolSpec,
};
use hardy_spec::{Error, C64};
use ndarray::Array2;
use serde::Serialize;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Cluster points per symbol drawn as spirals.
const SPIRAL_REPS: usize = 3;

pub struct Ctx {
    pub cfg: RunConfig,
    pub hash: String,
    pub out: PathBuf,
    pub mode: Parallelism,
}

impl Ctx {
    pub fn new(cfg: RunConfig, out: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
        let hash = cfg.hash();
        Ok(Self { cfg, hash, out, mode: Parallelism::Auto })
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let f = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn csv(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>, Option<&str>) -> hardy_spec::Result<()>,
    ) -> Result<()> {
        let mut w = self.create(name)?;
        f(&mut w, Some(&self.hash))?;
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        write_json(&mut w, value)?;
        w.flush()?;
        Ok(())
    }

    fn text(&self, name: &str, body: &str) -> Result<()> {
        std::fs::write(self.out.join(name), body).with_context(|| format!("cannot write {name}"))
    }

    fn hash_json(&self) -> serde_json::Value {
        json!(self.hash)
    }
}

fn symbols(cfg: &RunConfig) -> Result<(AnalyticSymbol, AnalyticSymbol)> {
    let m = &cfg.map;
    let spec = |expr: &str, class| SymbolSpec {
        expr: expr.to_string(),
        eps: m.eps,
        sup_bound: None,
        class: RunConfig::class_of(expr, class),
        domain: m.domain,
    };
    let a = make_symbol(&spec(&m.psi1, m.class1)).map_err(|e| ConfigError(format!("psi1: {e}")))?;
    let b = make_symbol(&spec(&m.psi2, m.class2)).map_err(|e| ConfigError(format!("psi2: {e}")))?;
    Ok((a, b))
}

fn self_map(cfg: &RunConfig) -> Result<QuasiParabolicMap> {
    let (a, b) = symbols(cfg)?;
    if cfg.map.domain == SymbolDomain::Disc && (cfg.map.p1 != 1.0 || cfg.map.p2 != 1.0) {
        bail!(ConfigError("disc-domain maps take p1 = p2 = 1".into()));
    }
    Ok(QuasiParabolicMap::new(cfg.map.p1, cfg.map.p2, a, b)?)
}

fn plan_options(cfg: &RunConfig) -> PlanOptions {
    let p = &cfg.plan;
    PlanOptions {
        samples: p.samples,
        seed: cfg.seed,
        tol: p.tol,
        max_order: p.max_order,
        alpha_mode: p.target_delta.map_or(AlphaMode::Minimize, AlphaMode::TargetDelta),
        alpha: p.alpha,
        orders: p.orders.map(|[a, b]| (a, b)),
        ..PlanOptions::default()
    }
}

/// Frequency model with `n` nodes or modes per axis. Uniform grids keep the step
/// `extent / (nodes - 1)` for every `n`, so surrogate sizes share their nodes.
fn model(cfg: &RunConfig, n: usize) -> hardy_spec::Result<FrequencyModel> {
    let g = &cfg.grid;
    Ok(match g.model {
        Model::Modal => FrequencyModel::modal(vec![n, n]),
        Model::Sampled => {
            let grid = match g.layout {
                Layout::Uniform => FrequencyGrid::uniform(g.extent / (g.nodes - 1) as f64 * (n - 1) as f64, n)?,
                Layout::GaussLaguerre => FrequencyGrid::gauss_laguerre(n, g.scale)?,
            };
            FrequencyModel::sampled(vec![grid.clone(), grid])
        }
    })
}

fn build_operator(
    cfg: &RunConfig,
    map: &QuasiParabolicMap,
    plan: &SeriesPlan,
    n: usize,
) -> hardy_spec::Result<(OperatorMatrix, SeriesOutput)> {
    let model = model(cfg, n)?;
    if cfg.map.domain == SymbolDomain::Disc {
        let opts = PlanOptions { orders: Some((plan.n1, plan.n2)), alpha: Some(plan.alpha), ..plan_options(cfg) };
        let out = disc_side_operator(&map.psi1, &map.psi2, &model, &opts)?;
        return Ok((out.operator, out.series));
    }
    let series = build_series(map, plan, &model)?;
    Ok((series.matrix(), series))
}

#[derive(Serialize)]
struct Certificate<'a> {
    alpha: f64,
    delta: f64,
    n1: usize,
    n2: usize,
    remainder_bound: f64,
    tol: f64,
    certified: bool,
    norm_estimates: &'a Option<hardy_spec::quasi_parabolic::NormEstimates>,
    dilation: Option<(f64, f64)>,
    separable: Option<bool>,
    toeplitz_power_gap: Option<f64>,
    config_hash: &'a str,
}

fn write_certificate(
    ctx: &Ctx,
    map: &QuasiParabolicMap,
    plan: &SeriesPlan,
    series: Option<&SeriesOutput>,
) -> Result<()> {
    ctx.json(
        "plan.json",
        &Certificate {
            alpha: plan.alpha,
            delta: plan.delta,
            n1: plan.n1,
            n2: plan.n2,
            remainder_bound: plan.remainder_bound,
            tol: ctx.cfg.plan.tol,
            certified: plan.remainder_bound <= ctx.cfg.plan.tol,
            norm_estimates: &plan.norm_estimates,
            dilation: map.has_dilation().then_some((map.p1, map.p2)),
            separable: series.map(|s| s.diagnostics.separable),
            toeplitz_power_gap: series.and_then(|s| s.diagnostics.toeplitz_power_gap),
            config_hash: &ctx.hash,
        },
    )
}

/// Plans the series and fails with a certification error (after writing `plan.json`)
/// when the bound exceeds the tolerance.
fn certified_plan(ctx: &Ctx, map: &QuasiParabolicMap) -> Result<SeriesPlan> {
    let plan = plan_series(map, &plan_options(&ctx.cfg))?;
    if !(plan.remainder_bound <= ctx.cfg.plan.tol) {
        write_certificate(ctx, map, &plan, None)?;
        return Err(Error::Certification(format!(
            "remainder bound {:.3e} at orders ({}, {}) exceeds tol {:.3e}",
            plan.remainder_bound, plan.n1, plan.n2, ctx.cfg.plan.tol
        ))
        .into());
    }
    Ok(plan)
}

fn constant_of(psi: &AnalyticSymbol) -> Option<C64> {
    (psi.variables() == (false, false)).then(|| psi.eval(C64::i(), C64::i()))
}

#[derive(Serialize)]
struct CrossCheck {
    method: &'static str,
    residual: f64,
    tol: f64,
    pass: bool,
}

fn leading_block(m: &Array2<C64>, big: usize, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n * n, n * n), |(i, j)| m[[(i / n) * big + i % n, (j / n) * big + j % n]])
}

fn crosscheck(ctx: &Ctx, map: &QuasiParabolicMap, plan: &SeriesPlan, op: &OperatorMatrix) -> Result<CrossCheck> {
    let cfg = &ctx.cfg;
    let consts = (constant_of(&map.psi1), constant_of(&map.psi2));
    if let (Some(c1), Some(c2), Model::Sampled, false, SymbolDomain::HalfPlane) =
        (consts.0, consts.1, cfg.grid.model, map.has_dilation(), cfg.map.domain)
    {
        // translation: the multiplier exp(i (c1 t1 + c2 t2)) at the nodes
        let g = match &model(cfg, cfg.grid.nodes)? {
            FrequencyModel::Sampled { grids, .. } => grids[0].clone(),
            _ => unreachable!("sampled model"),
        };
        let want: Vec<C64> =
            g.nodes.iter().flat_map(|&a| g.nodes.iter().map(move |&b| (C64::i() * (c1 * a + c2 * b)).exp())).collect();
        let residual = op
            .entries
            .indexed_iter()
            .map(|((i, j), v)| if i == j { (v - want[i]).norm() } else { v.norm() })
            .fold(0.0, f64::max);
        let tol = plan.remainder_bound.max(1e-12);
        return Ok(CrossCheck { method: "closed-form multiplier", residual, tol, pass: residual <= tol });
    }
    let n = cfg.crosscheck.modes;
    let big = if map.has_dilation() { 4 * n } else { n };
    let series = build_series(map, plan, &FrequencyModel::modal(vec![big, big]))?.matrix();
    let lead = OperatorMatrix::square(leading_block(&series.entries, big, n), Discretization::taylor2(n, n))?;
    let g = BoundaryGrid::cayley(cfg.crosscheck.cayley_nodes)?;
    let direct = direct_composition_modal(map, &g, &g, (n, n), 0.1)?;
    let residual = op_norm(&lead.sub(&direct)?)?;
    let tol = plan.remainder_bound.max(1e-3);
    Ok(CrossCheck { method: "series vs direct composition (modal)", residual, tol, pass: residual <= tol })
}

/// `build`: certificate, operator dump and the cross-check.
pub fn build(ctx: &Ctx) -> Result<bool> {
    let map = self_map(&ctx.cfg)?;
    let plan = certified_plan(ctx, &map)?;
    let (op, series) = build_operator(&ctx.cfg, &map, &plan, ctx.cfg.grid.nodes)?;
    write_certificate(ctx, &map, &plan, Some(&series))?;
    ctx.csv("operator.csv", |w, h| write_matrix_csv(w, &op.entries, h))?;
    ctx.json("operator.json", &MatrixSidecar::of(&op, Some(&ctx.hash)))?;
    if !ctx.cfg.crosscheck.enabled {
        return Ok(true);
    }
    let cc = crosscheck(ctx, &map, &plan, &op)?;
    ctx.json("crosscheck.json", &json!({ "check": cc, "config_hash": ctx.hash_json() }))?;
    if !cc.pass {
        eprintln!("cross-check failed: {} residual {:.3e} > tol {:.3e}", cc.method, cc.residual, cc.tol);
    }
    Ok(cc.pass)
}

fn representatives(c: &PointCloud, k: usize) -> Vec<C64> {
    let n = c.points.len();
    if n <= k {
        return c.points.clone();
    }
    (0..k).map(|j| c.points[j * (n - 1) / (k - 1).max(1)]).collect()
}

struct Prediction {
    clusters: [PointCloud; 2],
    grid: TGrid,
    set: SpectralSet,
}

fn prediction(ctx: &Ctx, map: &QuasiParabolicMap) -> Result<Prediction> {
    let cfg = &ctx.cfg;
    let plan = ClusterPlan {
        samples_per_shell: cfg.predict.samples_per_shell,
        seed: cfg.seed,
        parallelism: ctx.mode,
        ..ClusterPlan::default_for(ClusterTarget::Infinity)
    };
    let c1 = cluster_set(&map.psi1, ClusterTarget::Infinity, &plan)?.cloud;
    let c2 = cluster_set(&map.psi2, ClusterTarget::Infinity, &plan)?.cloud;
    let t_max = match cfg.predict.t_max {
        Some(t) => t,
        None => TGrid::default_for(&c1.union(&c2, "clusters").points)?.t_max,
    };
    let grid = TGrid { t_max, count: cfg.predict.t_count };
    let set = predicted_set(&c1, &c2, grid)?;
    Ok(Prediction { clusters: [c1, c2], grid, set })
}

/// `predict`: cluster sets, the predicted spiral set and sample spirals.
pub fn predict(ctx: &Ctx) -> Result<bool> {
    let map = self_map(&ctx.cfg)?;
    let p = prediction(ctx, &map)?;
    ctx.csv("cluster1.csv", |w, h| write_cloud_csv(w, &p.clusters[0], h))?;
    ctx.csv("cluster2.csv", |w, h| write_cloud_csv(w, &p.clusters[1], h))?;
    ctx.csv("predicted.csv", |w, h| write_set_csv(w, &p.set, h))?;

    let mut w = ctx.create("spiral.csv")?;
    writeln!(w, "# config_hash={}", ctx.hash)?;
    writeln!(w, "pair,t1,t2,re,im")?;
    let mut plot = Plot::new((-1.1, 1.1), (-1.1, 1.1));
    plot.circle(C64::new(0.0, 0.0), 1.0, "#999999");
    let mut pair = 0;
    for &a in &representatives(&p.clusters[0], SPIRAL_REPS) {
        for &b in &representatives(&p.clusters[1], SPIRAL_REPS) {
            let samples = spiral_samples(a, b, p.grid)?;
            for (t1, t2, v) in &samples {
                writeln!(w, "{pair},{t1},{t2},{},{}", v.re, v.im)?;
            }
            let n = p.grid.count;
            let diagonal: Vec<C64> = (0..n).map(|k| samples[k * n + k].2).collect();
            plot.path(&diagonal, "#1f4e9c");
            pair += 1;
        }
    }
    w.flush()?;
    ctx.text("spiral.svg", &plot.render(&ctx.hash))?;
    Ok(true)
}

fn spectra_section(cfg: &RunConfig) -> Result<&crate::config::SpectraConfig> {
    cfg.spectra.as_ref().ok_or_else(|| ConfigError("this command needs a [spectra] section".into()).into())
}

fn region_of(s: &crate::config::SpectraConfig) -> Result<(Region, (usize, usize))> {
    let region = Region::new((s.re[0], s.re[1]), (s.im[0], s.im[1])).map_err(|e| ConfigError(e.to_string()))?;
    Ok((region, (s.resolution[0], s.resolution[1])))
}

/// `spectrum`: eigenvalues and the pseudospectrum of the built operator.
pub fn spectrum(ctx: &Ctx) -> Result<bool> {
    let s = spectra_section(&ctx.cfg)?;
    let (region, res) = region_of(s)?;
    let map = self_map(&ctx.cfg)?;
    let plan = certified_plan(ctx, &map)?;
    let (op, _) = build_operator(&ctx.cfg, &map, &plan, ctx.cfg.grid.nodes)?;
    ctx.csv("eigenvalues.csv", |w, h| write_set_csv(w, &eigenvalues(&op)?, h))?;
    let (ps, levels) = pseudospectrum(&op, region, res, &s.eps, ctx.mode)?;
    ctx.csv("pseudospectrum.csv", |w, h| write_map_csv(w, &ps, h))?;
    for (k, level) in levels.iter().enumerate() {
        ctx.csv(&format!("level{k}.csv"), |w, h| write_set_csv(w, level, h))?;
    }
    Ok(true)
}

/// `verify`: predicted set against the essential-spectrum surrogate.
pub fn verify(ctx: &Ctx) -> Result<bool> {
    let cfg = &ctx.cfg;
    let s = spectra_section(cfg)?;
    let (region, res) = region_of(s)?;
    if cfg.map.p1 != 1.0 || cfg.map.p2 != 1.0 {
        bail!(ConfigError("verify compares against the spiral prediction, which needs p1 = p2 = 1".into()));
    }
    let map = self_map(cfg)?;
    let plan = certified_plan(ctx, &map)?;

    let start = Instant::now();
    let p = prediction(ctx, &map)?;
    let t_predict = start.elapsed().as_secs_f64();
    let shift = C64::new(s.control_shift[0], s.control_shift[1]);
    let predicted = if shift == C64::new(0.0, 0.0) {
        p.set
    } else {
        let pts = p.set.points.points.iter().map(|z| z + shift).collect();
        SpectralSet::new(PointCloud::new(pts, "shifted prediction"), SpectralKind::PredictedSpiral, p.set.params)
    };
    ctx.csv("predicted.csv", |w, h| write_set_csv(w, &predicted, h))?;

    let start = Instant::now();
    let builder = |n: usize| build_operator(cfg, &map, &plan, n).map(|(op, _)| op);
    let sur = essential_spectrum_surrogate(&builder, &s.sizes, s.eps[0], region, res, ctx.mode)?;
    let t_surrogate = start.elapsed().as_secs_f64();
    ctx.csv("surrogate.csv", |w, h| write_set_csv(w, &sur.set, h))?;

    let tol = s.tol.unwrap_or_else(|| default_tolerance(region.step(res), &predicted.points));
    let verdict: Verdict = containment_verdict(&predicted, &sur.set, tol)?;
    ctx.json("verdict.json", &json!({ "verdict": verdict, "config_hash": ctx.hash_json() }))?;
    ctx.json(
        "report.json",
        &json!({
            "config": cfg,
            "config_hash": ctx.hash,
            "seed": cfg.seed,
            "plan": { "alpha": plan.alpha, "delta": plan.delta, "n1": plan.n1, "n2": plan.n2, "remainder_bound": plan.remainder_bound },
            "surrogate": { "sizes": s.sizes, "eps": s.eps[0], "per_size_counts": sur.per_size_counts, "points": sur.set.len(), "diagnostic": sur.diagnostic },
            "verdict": { "pass": verdict.pass, "distance": verdict.distance, "tol": verdict.tol },
            "timings_s": { "predict": t_predict, "surrogate": t_surrogate },
        }),
    )?;

    let mut plot = Plot::new(region.re, region.im);
    plot.points(&sur.set.points.points, "#bbbbbb", 2.0);
    plot.points(&predicted.points.points, "#c0392b", 1.0);
    ctx.text("overlay.svg", &plot.render(&ctx.hash))?;

    println!(
        "{}: distance {:.3e}, tol {:.3e}, {} surrogate points",
        if verdict.pass { "PASS" } else { "FAIL" },
        verdict.distance,
        tol,
        sur.set.len()
    );
    if let Some(d) = &verdict.diagnostic {
        println!("  {d}");
    }
    Ok(verdict.pass)
}

/// Runs every bundled config and compares with its expected outcome.
pub fn demo(out: &Path, adjust: &dyn Fn(&mut RunConfig)) -> Result<bool> {
    let mut all = true;
    for (name, text) in crate::config::BUNDLED {
        let mut cfg = RunConfig::parse(text)?;
        adjust(&mut cfg);
        cfg.validate()?;
        let expect = cfg.expect;
        let has_spectra = cfg.spectra.is_some();
        let ctx = Ctx::new(cfg, out.join(name))?;
        let outcome = if has_spectra { verify(&ctx) } else { build(&ctx).and_then(|ok| Ok(ok && predict(&ctx)?)) };
        let (got, note) = match outcome {
            Ok(true) => (Some(crate::config::Expect::Pass), String::new()),
            Ok(false) => (Some(crate::config::Expect::Fail), String::new()),
            Err(e) => (None, format!(" ({e:#})")),
        };
        let ok = got == Some(expect);
        all &= ok;
        println!(
            "{} {name}: expected {expect:?}, got {}{note}",
            if ok { "ok  " } else { "MISMATCH" },
            got.map_or("error".to_string(), |g| format!("{g:?}"))
        );
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_span_the_cloud() {
        let c = PointCloud::new((0..10).map(|k| C64::new(k as f64, 1.0)).collect(), "c");
        let r = representatives(&c, 3);
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], c.points[0]);
        assert_eq!(r[2], c.points[9]);
        assert_eq!(representatives(&c, 20).len(), 10);
    }

    #[test]
    fn leading_block_picks_the_low_modes() {
        let m = Array2::from_shape_fn((9, 9), |(i, j)| C64::new(i as f64, j as f64));
        let b = leading_block(&m, 3, 2);
        assert_eq!(b.dim(), (4, 4));
        assert_eq!(b[[3, 2]], C64::new(4.0, 3.0));
    }

    #[test]
    fn uniform_surrogate_grids_share_the_step() {
        let cfg = RunConfig::parse(crate::config::BUNDLED[0].1).unwrap();
        let step = |n| match model(&cfg, n).unwrap() {
            FrequencyModel::Sampled { grids, .. } => grids[0].step().unwrap(),
            _ => unreachable!(),
        };
        assert!((step(41) - step(81)).abs() < 1e-14);
    }
}
