use super::{SpectralKind, SpectralSet};
use crate::symbol::PointCloud;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Uniform frequency sampling `[0, t_max]` with `count` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_max: f64,
    pub count: usize,
}

impl TGrid {
    /// `T = 8 / min Im` over the cluster points, 64 samples.
    pub fn default_for(cluster: &[C64]) -> Result<Self> {
        let m = cluster.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Domain("cluster points must lie in the open upper half-plane".into()));
        }
        Ok(Self { t_max: 8.0 / m, count: 64 })
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) || !self.t_max.is_finite() || self.count < 2 {
            return Err(Error::Usage(format!("bad t-grid {self:?}")));
        }
        Ok(())
    }

    pub fn node(&self, k: usize) -> f64 {
        self.t_max * k as f64 / (self.count - 1) as f64
    }
}

fn check_upper(zs: &[C64]) -> Result<()> {
    if let Some(z) = zs.iter().find(|z| !(z.im > 0.0)) {
        return Err(Error::Domain(format!("cluster point {z} is not in the open upper half-plane")));
    }
    Ok(())
}

/// Ordered samples `(t1, t2, exp(i (z1 t1 + z2 t2)))`, `t1` outer, starting at `(0, 0)`.
pub fn spiral_samples(z1: C64, z2: C64, grid: TGrid) -> Result<Vec<(f64, f64, C64)>> {
    check_upper(&[z1, z2])?;
    grid.validate()?;
    let mut out = Vec::with_capacity(grid.count * grid.count);
    for a in 0..grid.count {
        for b in 0..grid.count {
            let (t1, t2) = (grid.node(a), grid.node(b));
            out.push((t1, t2, (C64::i() * (z1 * t1 + z2 * t2)).exp()));
        }
    }
    Ok(out)
}

/// Cluster clouds are thinned to this resolution before the product is formed; the
/// image moves by at most `resolution / (e min Im z)`.
pub const CLUSTER_THINNING: f64 = 1e-3;

/// `{exp(i(z1 t1 + z2 t2)) : z_j in cluster_j, t on the grid} U {0}`.
pub fn predicted_set(cluster1: &PointCloud, cluster2: &PointCloud, grid: TGrid) -> Result<SpectralSet> {
    if cluster1.is_empty() || cluster2.is_empty() {
        return Err(Error::Usage("predicted set needs nonempty cluster sets".into()));
    }
    check_upper(&cluster1.points)?;
    check_upper(&cluster2.points)?;
    let c1 = PointCloud::with_resolution(cluster1.points.clone(), "", CLUSTER_THINNING);
    let c2 = PointCloud::with_resolution(cluster2.points.clone(), "", CLUSTER_THINNING);
    let mut pts = vec![C64::new(0.0, 0.0)];
    for &z1 in &c1.points {
        for &z2 in &c2.points {
            pts.extend(spiral_samples(z1, z2, grid)?.into_iter().map(|s| s.2));
        }
    }
    let enc = |c: &PointCloud| -> Vec<Value> { c.points.iter().map(|a| json!([a.re, a.im])).collect() };
    Ok(SpectralSet::new(
        PointCloud::new(pts, "predicted spiral"),
        SpectralKind::PredictedSpiral,
        json!({ "cluster1": enc(&c1), "cluster2": enc(&c2), "t_max": grid.t_max, "count": grid.count }),
    ))
}

/// One-variable version: `{exp(i z t)} U {0}`.
pub fn predicted_set_1d(cluster: &[C64], grid: TGrid) -> Result<SpectralSet> {
    check_upper(cluster)?;
    grid.validate()?;
    let mut pts = vec![C64::new(0.0, 0.0)];
    for &z in cluster {
        pts.extend((0..grid.count).map(|k| (C64::i() * z * grid.node(k)).exp()));
    }
    let zs: Vec<Value> = cluster.iter().map(|a| json!([a.re, a.im])).collect();
    Ok(SpectralSet::new(
        PointCloud::new(pts, "predicted spiral"),
        SpectralKind::PredictedSpiral,
        json!({ "cluster": zs, "t_max": grid.t_max, "count": grid.count }),
    ))
}

/// `sup_{a in A} dist(a, B)` and the point attaining it.
fn directed(a: &[C64], b: &[C64]) -> (f64, C64) {
    let mut worst = (0.0, a[0]);
    for p in a {
        let d = b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min);
        if d > worst.0 {
            worst = (d, *p);
        }
    }
    worst
}

pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("directed Hausdorff distance of an empty set".into()));
    }
    Ok(directed(&a.points, &b.points).0)
}

/// Largest nearest-neighbour distance within the cloud (0 for fewer than two points).
pub fn max_neighbor_spacing(c: &PointCloud) -> f64 {
    let p = &c.points;
    if p.len() < 2 {
        return 0.0;
    }
    (0..p.len())
        .map(|i| (0..p.len()).filter(|&j| j != i).map(|j| (p[i] - p[j]).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// `2 (grid step + t-grid image spacing)`.
pub fn default_tolerance(step: f64, predicted: &PointCloud) -> f64 {
    2.0 * (step + max_neighbor_spacing(predicted))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub distance: f64,
    pub worst_point: Option<[f64; 2]>,
    pub tol: f64,
    pub diagnostic: Option<String>,
    pub params: Value,
}

/// PASS when every predicted point is within `tol` of the surrogate.
pub fn containment_verdict(predicted: &SpectralSet, surrogate: &SpectralSet, tol: f64) -> Result<Verdict> {
    if predicted.is_empty() {
        return Err(Error::Usage("the predicted set is empty".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::Usage(format!("tolerance must be non-negative (got {tol})")));
    }
    let params = json!({ "predicted": predicted.params, "surrogate": surrogate.params });
    if surrogate.is_empty() {
        return Ok(Verdict {
            pass: false,
            distance: f64::INFINITY,
            worst_point: None,
            tol,
            diagnostic: Some("the surrogate set is empty".into()),
            params,
        });
    }
    let (distance, worst) = directed(&predicted.points.points, &surrogate.points.points);
    Ok(Verdict {
        pass: distance <= tol,
        distance,
        worst_point: Some([worst.re, worst.im]),
        tol,
        diagnostic: None,
        params,
    })
}
