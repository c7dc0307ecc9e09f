//! Eigenvalues, pseudospectra, the multi-size essential-spectrum surrogate, the
//! spiral predictor and one-sided containment checks.

mod predict;
mod smin;

pub use predict::{
    containment_verdict, default_tolerance, directed_hausdorff, max_neighbor_spacing, predicted_set, predicted_set_1d,
    spiral_samples, TGrid, Verdict,
};
pub use smin::{MinSingular, Structure};

use crate::operator::OperatorMatrix;
use crate::par::{map_range, Parallelism};
use crate::symbol::PointCloud;
use crate::{Error, Result, C64};
use ndarray::Array2;
use ndarray_linalg::EigVals;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralKind {
    Eigenvalues,
    PseudospectrumLevel,
    PredictedSpiral,
    EssentialSurrogate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralSet {
    pub points: PointCloud,
    pub kind: SpectralKind,
    pub params: Value,
}

impl SpectralSet {
    pub fn new(points: PointCloud, kind: SpectralKind, params: Value) -> Self {
        Self { points, kind, params }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Axis-aligned rectangle `[re.0, re.1] x [im.0, im.1]` in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        let ok = |a: (f64, f64)| a.0.is_finite() && a.1.is_finite() && a.0 < a.1;
        if !ok(re) || !ok(im) {
            return Err(Error::Usage(format!("region {re:?} x {im:?} is not a bounded rectangle")));
        }
        Ok(Self { re, im })
    }

    /// Grid point `(j, k)`: row `j` along the imaginary axis, column `k` along the real axis.
    pub fn point(&self, res: (usize, usize), j: usize, k: usize) -> C64 {
        let (nx, ny) = res;
        let x = self.re.0 + (self.re.1 - self.re.0) * k as f64 / (nx - 1) as f64;
        let y = self.im.0 + (self.im.1 - self.im.0) * j as f64 / (ny - 1) as f64;
        C64::new(x, y)
    }

    /// Largest grid spacing.
    pub fn step(&self, res: (usize, usize)) -> f64 {
        ((self.re.1 - self.re.0) / (res.0 - 1) as f64).max((self.im.1 - self.im.0) / (res.1 - 1) as f64)
    }
}

/// `values[j][k] = sigma_min(lambda_jk I - A)` on a rectangular grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudospectrumMap {
    pub region: Region,
    /// Points along the real and imaginary axes.
    pub resolution: (usize, usize),
    pub values: Vec<Vec<f64>>,
}

impl PseudospectrumMap {
    pub fn point(&self, j: usize, k: usize) -> C64 {
        self.region.point(self.resolution, j, k)
    }

    pub fn step(&self) -> f64 {
        self.region.step(self.resolution)
    }

    pub fn level_set(&self, eps: f64) -> SpectralSet {
        let mut pts = Vec::new();
        for (j, row) in self.values.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v <= eps {
                    pts.push(self.point(j, k));
                }
            }
        }
        SpectralSet::new(
            PointCloud::new(pts, format!("pseudospectrum level {eps:e}")),
            SpectralKind::PseudospectrumLevel,
            json!({ "eps": eps, "region": self.region, "resolution": self.resolution }),
        )
    }
}

fn check_resolution(res: (usize, usize)) -> Result<()> {
    if res.0 < 32 || res.1 < 32 {
        return Err(Error::Usage(format!(
            "pseudospectrum resolution must be at least 32x32 (got {}x{})",
            res.0, res.1
        )));
    }
    Ok(())
}

/// Eigenvalues of `W^{1/2} A W^{-1/2}`.
pub fn eigenvalues(a: &OperatorMatrix) -> Result<SpectralSet> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::Usage("eigenvalues need a square operator".into()));
    }
    let w = a.weighted();
    let vals: Vec<C64> =
        if a.is_diagonal() || a.triangularity().is_some() { w.diag().to_vec() } else { w.eigvals()?.to_vec() };
    Ok(SpectralSet::new(PointCloud::new(vals, "eigenvalues"), SpectralKind::Eigenvalues, json!({ "size": r })))
}

/// Smallest singular values over `region` and the level sets for each `eps`.
pub fn pseudospectrum(
    a: &OperatorMatrix,
    region: Region,
    resolution: (usize, usize),
    eps: &[f64],
    mode: Parallelism,
) -> Result<(PseudospectrumMap, Vec<SpectralSet>)> {
    check_resolution(resolution)?;
    let solver = MinSingular::new(&a.weighted())?;
    let map = sigma_map(&solver, region, resolution, mode)?;
    let levels = eps.iter().map(|&e| map.level_set(e)).collect();
    Ok((map, levels))
}

fn sigma_map(
    solver: &MinSingular,
    region: Region,
    resolution: (usize, usize),
    mode: Parallelism,
) -> Result<PseudospectrumMap> {
    let (nx, ny) = resolution;
    let flat: Vec<Result<f64>> =
        map_range(nx * ny, mode, |idx| solver.at(region.point(resolution, idx / nx, idx % nx)));
    let mut values = vec![vec![0.0; nx]; ny];
    for (idx, v) in flat.into_iter().enumerate() {
        values[idx / nx][idx % nx] = v?;
    }
    Ok(PseudospectrumMap { region, resolution, values })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Surrogate {
    pub set: SpectralSet,
    pub diagnostic: Option<String>,
    /// Number of grid points in each size's level set.
    pub per_size_counts: Vec<usize>,
}

/// Grid points where `sigma_min <= eps` for every size: a stability-filtered
/// pseudospectrum intersection standing in for the essential spectrum.
pub fn essential_spectrum_surrogate(
    builder: &dyn Fn(usize) -> Result<OperatorMatrix>,
    sizes: &[usize],
    eps: f64,
    region: Region,
    resolution: (usize, usize),
    mode: Parallelism,
) -> Result<Surrogate> {
    if sizes.len() < 3 {
        return Err(Error::Usage(format!("the surrogate needs at least three sizes (got {})", sizes.len())));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage("surrogate sizes must be increasing".into()));
    }
    check_resolution(resolution)?;
    let (nx, ny) = resolution;
    let mut keep = Array2::from_elem((ny, nx), true);
    let mut per_size_counts = Vec::new();
    for &n in sizes {
        let op = builder(n)?;
        let solver = MinSingular::new(&op.weighted())?;
        let map = sigma_map(&solver, region, resolution, mode)?;
        let mut count = 0;
        for j in 0..ny {
            for k in 0..nx {
                let inside = map.values[j][k] <= eps;
                count += inside as usize;
                keep[[j, k]] &= inside;
            }
        }
        per_size_counts.push(count);
    }
    let pts: Vec<C64> =
        keep.indexed_iter().filter(|(_, &v)| v).map(|((j, k), _)| region.point(resolution, j, k)).collect();
    let diagnostic = pts.is_empty().then(|| {
        format!(
            "the eps = {eps:e} level sets of sizes {sizes:?} have no common grid point (counts {per_size_counts:?})"
        )
    });
    let set = SpectralSet::new(
        PointCloud::new(pts, "essential-spectrum surrogate"),
        SpectralKind::EssentialSurrogate,
        json!({ "sizes": sizes, "eps": eps, "region": region, "resolution": resolution }),
    );
    Ok(Surrogate { set, diagnostic, per_size_counts })
}
