use super::cloud::PointCloud;
use super::{disc_samples, halfplane_samples, AnalyticSymbol, SymbolDomain};
use crate::hardy::{Axis, Discretization};
use crate::numeric::halton;
use crate::par::{map_range, Parallelism};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterTarget {
    /// `(inf, inf)` approached from the upper half-plane squared.
    Infinity,
    /// `(1, 1)` approached from inside the bidisc.
    DiscCorner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterPlan {
    /// Shell scales: distances `2^k` for the infinite target, radii `2^-k` for the corner.
    pub shells: Vec<f64>,
    pub samples_per_shell: usize,
    pub seed: u64,
    /// Number of innermost shells (closest to the target) whose values form the estimate.
    pub tail_shells: usize,
    #[serde(default)]
    pub parallelism: Parallelism,
}

impl ClusterPlan {
    pub fn default_for(target: ClusterTarget) -> Self {
        let shells = (3..=13)
            .map(|k| match target {
                ClusterTarget::Infinity => 2f64.powi(k),
                ClusterTarget::DiscCorner => 2f64.powi(-k),
            })
            .collect();
        Self { shells, samples_per_shell: 512, seed: 17, tail_shells: 3, parallelism: Parallelism::Auto }
    }

    fn validate(&self, target: ClusterTarget) -> Result<()> {
        if self.shells.len() < 3 {
            return Err(Error::Usage("cluster plan needs at least three shells".into()));
        }
        let approaching = self.shells.windows(2).all(|w| match target {
            ClusterTarget::Infinity => w[1] > w[0],
            ClusterTarget::DiscCorner => w[1] < w[0],
        });
        if !approaching || self.shells.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Usage("cluster shells must be positive and approach the target".into()));
        }
        if self.samples_per_shell == 0 || self.tail_shells == 0 {
            return Err(Error::Usage("cluster plan needs samples and at least one tail shell".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellDiagnostic {
    pub scale: f64,
    /// Largest distance between a shell value and the shell mean.
    pub spread: f64,
    /// Hausdorff distance to the previous shell's values (NaN for the first shell).
    pub shift: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterSet {
    pub cloud: PointCloud,
    pub shells: Vec<ShellDiagnostic>,
}

fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let dir = |x: &[C64], y: &[C64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    dir(a, b).max(dir(b, a))
}

fn shell_values(psi: &AnalyticSymbol, target: ClusterTarget, scale: f64, count: usize, seed: u64) -> Vec<C64> {
    let pts = halton(count, 4, seed);
    pts.iter()
        .map(|u| match target {
            ClusterTarget::Infinity => {
                let z = |a: f64, b: f64| C64::from_polar(scale * (1.0 + a), PI * (1e-6 + (1.0 - 2e-6) * b));
                psi.eval(z(u[0], u[1]), z(u[2], u[3]))
            }
            ClusterTarget::DiscCorner => {
                let w = |a: f64, b: f64| 1.0 - C64::from_polar(scale * (1.0 + a), 1.4 * (2.0 * b - 1.0));
                psi.eval_disc(w(u[0], u[1]), w(u[2], u[3]))
            }
        })
        .collect()
}

/// Values of `psi` on shells approaching the target. The estimate is the union of
/// the `tail_shells` innermost shells; every shell is reported in the diagnostics.
pub fn cluster_set(psi: &AnalyticSymbol, target: ClusterTarget, plan: &ClusterPlan) -> Result<ClusterSet> {
    plan.validate(target)?;
    let per_shell: Vec<Vec<C64>> = map_range(plan.shells.len(), plan.parallelism, |k| {
        shell_values(psi, target, plan.shells[k], plan.samples_per_shell, plan.seed.wrapping_add(k as u64))
    });
    let mut shells = Vec::with_capacity(per_shell.len());
    for (k, vals) in per_shell.iter().enumerate() {
        let mean: C64 = vals.iter().sum::<C64>() / vals.len() as f64;
        let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        let shift = if k == 0 { f64::NAN } else { hausdorff(vals, &per_shell[k - 1]) };
        shells.push(ShellDiagnostic { scale: plan.shells[k], spread, shift });
    }
    let start = per_shell.len().saturating_sub(plan.tail_shells);
    let pts: Vec<C64> = per_shell[start..].iter().flatten().copied().collect();
    let label = format!("cluster set of '{}' at {:?}", psi.source(), target);
    Ok(ClusterSet { cloud: PointCloud::new(pts, label), shells })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// `|x1| > n` and `|x2| > n`.
    Joint,
    /// `|x_axis| > n` on one axis (0 or 1).
    Axis(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EssentialRange {
    pub cloud: PointCloud,
    pub diagnostic: Option<String>,
}

/// Points `z` whose `radius`-ball preimage meets the tail beyond every cutoff in
/// positive (quadrature) measure. Candidates are the field values on the farthest tail,
/// thinned to `radius / 2`.
pub fn essential_range_at_infinity(
    field: &[C64],
    space: &Discretization,
    cutoffs: &[f64],
    radius: f64,
    mode: TailMode,
) -> Result<EssentialRange> {
    if field.len() != space.len() {
        return Err(Error::Usage("field length does not match the grid".into()));
    }
    if cutoffs.is_empty() || !(radius > 0.0) {
        return Err(Error::Usage("essential range needs cutoffs and a positive ball radius".into()));
    }
    let mut grids = Vec::new();
    for axis in space.axes() {
        let Axis::Boundary(g) = axis else {
            return Err(Error::Usage("essential range is taken on real boundary grids".into()));
        };
        grids.push(g);
    }
    let max_cut = cutoffs.iter().cloned().fold(0.0, f64::max);
    for g in &grids {
        if g.extent < max_cut {
            return Err(Error::Usage(format!("grid extent {} is smaller than the cutoff {max_cut}", g.extent)));
        }
    }
    let dims = space.dims();
    let weights = space.weights();
    let coords = |idx: usize| -> (f64, f64) {
        if grids.len() == 1 {
            (grids[0].nodes[idx], grids[0].nodes[idx])
        } else {
            (grids[0].nodes[idx / dims[1]], grids[1].nodes[idx % dims[1]])
        }
    };
    let in_tail = |idx: usize, n: f64| -> bool {
        let (a, b) = coords(idx);
        match mode {
            TailMode::Joint => a.abs() > n && b.abs() > n,
            TailMode::Axis(0) => a.abs() > n,
            TailMode::Axis(_) => b.abs() > n,
        }
    };
    let far: Vec<usize> = (0..field.len()).filter(|&i| in_tail(i, max_cut) && weights[i] > 0.0).collect();
    if far.is_empty() {
        return Ok(EssentialRange {
            cloud: PointCloud::new(vec![], "essential range"),
            diagnostic: Some(format!("no grid nodes with positive weight beyond the cutoff {max_cut}")),
        });
    }
    let candidates = PointCloud::with_resolution(far.iter().map(|&i| field[i]).collect(), "candidates", radius / 2.0);
    let tails: Vec<Vec<usize>> =
        cutoffs.iter().map(|&n| (0..field.len()).filter(|&i| in_tail(i, n)).collect()).collect();
    let kept: Vec<C64> = candidates
        .points
        .into_iter()
        .filter(|z| {
            tails.iter().all(|tail| {
                let mass: f64 = tail.iter().filter(|&&i| (field[i] - z).norm() < radius).map(|&i| weights[i]).sum();
                mass > 0.0
            })
        })
        .collect();
    Ok(EssentialRange { cloud: PointCloud::new(kept, "essential range at infinity"), diagnostic: None })
}

/// Values of `psi` over a quasi-random sweep of its domain (interior and boundary).
pub fn closure_image(psi: &AnalyticSymbol, count: usize, seed: u64) -> Result<PointCloud> {
    if count < 1000 {
        return Err(Error::Usage(format!("closure_image needs at least 1000 samples (got {count})")));
    }
    let vals: Vec<C64> = match psi.spec.domain {
        SymbolDomain::HalfPlane => {
            halfplane_samples(count, seed).into_iter().map(|(a, b)| psi.eval_native(a, b)).collect()
        }
        SymbolDomain::Disc => disc_samples(count, seed).into_iter().map(|(a, b)| psi.eval_native(a, b)).collect(),
    };
    Ok(PointCloud::new(vals, format!("closure image of '{}'", psi.source())))
}

#[cfg(test)]
mod tests {
    use super::super::{make_symbol, ContinuityClass, SymbolSpec};
    use super::*;
    use crate::hardy::BoundaryGrid;

    fn sym(e: &str) -> AnalyticSymbol {
        make_symbol(&SymbolSpec::new(e, 0.5, ContinuityClass::ContinuousOnClosure)).unwrap()
    }

    #[test]
    fn cluster_set_examples() {
        let plan = ClusterPlan::default_for(ClusterTarget::Infinity);
        let c = cluster_set(&sym("0.5i + 2"), ClusterTarget::Infinity, &plan).unwrap();
        assert_eq!(c.cloud.points, vec![C64::new(2.0, 0.5)]);
        for e in ["i + 0.5*cay(z1)", "i + 0.5*cay(z1)*cay(z2)"] {
            let c = cluster_set(&sym(e), ClusterTarget::Infinity, &plan).unwrap();
            let limit = C64::new(0.5, 1.0);
            assert!(c.cloud.points.iter().all(|p| (p - limit).norm() < 1e-3), "{e}");
            assert!(c.shells.last().unwrap().spread < c.shells[0].spread);
        }
    }

    #[test]
    fn too_few_shells_is_a_usage_error() {
        let mut plan = ClusterPlan::default_for(ClusterTarget::Infinity);
        plan.shells.truncate(2);
        assert!(cluster_set(&sym("i"), ClusterTarget::Infinity, &plan).is_err());
    }

    #[test]
    fn essential_range_of_constant_and_degenerate_tail() {
        let g = BoundaryGrid::uniform(100.0, 101).unwrap();
        let space = Discretization::boundary2(g.clone(), g);
        let field = vec![C64::new(0.0, 2.0); space.len()];
        let r = essential_range_at_infinity(&field, &space, &[10.0, 50.0], 1e-3, TailMode::Joint).unwrap();
        assert_eq!(r.cloud.points, vec![C64::new(0.0, 2.0)]);
        let r = essential_range_at_infinity(&field, &space, &[100.0], 1e-3, TailMode::Joint).unwrap();
        assert!(r.cloud.is_empty() && r.diagnostic.is_some());
        assert!(essential_range_at_infinity(&field, &space, &[200.0], 1e-3, TailMode::Joint).is_err());
    }

    #[test]
    fn closure_image_of_half_cay_stays_in_disc() {
        let c = closure_image(&sym("i + 0.5*cay(z1)"), 2000, 3).unwrap();
        assert!(c.points.iter().all(|p| (p - C64::i()).norm() <= 0.5 + 1e-12 && p.im >= 0.5 - 1e-9));
        assert!(closure_image(&sym("i"), 10, 3).is_err());
    }
}
