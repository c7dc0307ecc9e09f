//! Bochner transform `F(t) = (2 pi)^{-1/2} int f(x) e^{-ixt} dx` between boundary
//! samples and frequency samples on `[0, inf)`.
//!
//! Both sides are connected through the modal basis `e_n(x) = cay(x)^n / (x + i)`,
//! whose transform is `-i sqrt(2 pi) L_n(2t) e^{-t}`. Boundary samples are analysed
//! into modal coefficients (exactly, by the circle trapezoid rule, on Cayley grids),
//! then synthesised on the frequency grid. The inverse fits modal coefficients to
//! frequency samples by weighted least squares.

use super::cay;
use super::grid::{BoundaryGrid, BoundaryLayout, FrequencyGrid};
use super::space::{Axis, Discretization, HardyVector, Rep};
use crate::numeric::laguerre_functions;
use crate::{Error, Result, C64};
use ndarray::{s, Array1, Array2};
use ndarray_linalg::SVD;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BochnerOptions {
    /// Number of modal coefficients kept per axis.
    pub modes: usize,
    /// Relative negative-frequency energy above which a warning is attached.
    pub leakage_tol: f64,
}

impl Default for BochnerOptions {
    fn default() -> Self {
        Self { modes: 32, leakage_tol: 1e-8 }
    }
}

#[derive(Clone, Debug)]
pub struct BochnerOutput {
    pub vector: HardyVector,
    /// Relative energy in negative modes (zero for Hardy-class input).
    pub negative_mass: f64,
    pub warning: Option<String>,
}

fn kappa() -> C64 {
    C64::new(0.0, -(2.0 * PI).sqrt())
}

/// Rows `n = 0..modes` then `n = -1..-modes`; columns are boundary nodes.
pub fn boundary_analysis_matrix(grid: &BoundaryGrid, modes: usize) -> Array2<C64> {
    let m = grid.len();
    let mut a = Array2::zeros((2 * modes, m));
    for (k, (&x, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
        let z = C64::new(x, 0.0);
        let zb = cay(z).conj();
        let base = match grid.layout {
            BoundaryLayout::Cayley => (z + C64::i()) / m as f64,
            BoundaryLayout::Uniform => w / (PI * (z - C64::i())),
        };
        let mut p = base;
        for n in 0..modes {
            a[[n, k]] = p;
            p *= zb;
        }
        let mut p = base / zb;
        for n in 1..=modes {
            a[[modes + n - 1, k]] = p;
            p /= zb;
        }
    }
    a
}

/// `e_n(x_k)` for n = 0..modes.
pub fn modal_synthesis_matrix(grid: &BoundaryGrid, modes: usize) -> Array2<C64> {
    let mut e = Array2::zeros((grid.len(), modes));
    for (k, &x) in grid.nodes.iter().enumerate() {
        let z = C64::new(x, 0.0);
        let c = cay(z);
        let mut p = 1.0 / (z + C64::i());
        for n in 0..modes {
            e[[k, n]] = p;
            p *= c;
        }
    }
    e
}

/// Frequency samples of the modal basis, `-i sqrt(2 pi) l_n(t_k)`.
pub fn frequency_synthesis_matrix(grid: &FrequencyGrid, modes: usize) -> Array2<C64> {
    let mut s = Array2::zeros((grid.len(), modes));
    for (k, &t) in grid.nodes.iter().enumerate() {
        for (n, v) in laguerre_functions(modes, t).into_iter().enumerate() {
            s[[k, n]] = kappa() * v;
        }
    }
    s
}

/// Weighted least-squares left inverse of [`frequency_synthesis_matrix`].
pub fn frequency_analysis_matrix(grid: &FrequencyGrid, modes: usize) -> Result<Array2<C64>> {
    if modes > grid.len() {
        return Err(Error::Resolution(format!("{modes} modes cannot be fitted from {} frequency samples", grid.len())));
    }
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = frequency_synthesis_matrix(grid, modes);
    for (mut row, w) in a.rows_mut().into_iter().zip(&sw) {
        row.mapv_inplace(|v| v * *w);
    }
    let (u, sv, vt) = a.svd(true, true)?;
    let (u, vt) = (u.unwrap(), vt.unwrap());
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    if !(smin > 1e-10 * smax) {
        return Err(Error::Resolution(format!(
            "frequency grid cannot separate {modes} modes (condition {:.3e})",
            smax / smin
        )));
    }
    let r = sv.len();
    let mut pinv = Array2::<C64>::zeros((modes, grid.len()));
    for j in 0..r {
        let inv = 1.0 / sv[j];
        for p in 0..modes {
            let vpj = vt[[j, p]].conj() * inv;
            for k in 0..grid.len() {
                pinv[[p, k]] += vpj * u[[k, j]].conj() * sw[k];
            }
        }
    }
    Ok(pinv)
}

fn boundary_axes(space: &Discretization) -> Result<Vec<&BoundaryGrid>> {
    space
        .axes()
        .iter()
        .map(|a| match a {
            Axis::Boundary(g) => Ok(g),
            _ => Err(Error::Usage("expected a real-line boundary grid".into())),
        })
        .collect()
}

fn frequency_axes(space: &Discretization) -> Result<Vec<&FrequencyGrid>> {
    space
        .axes()
        .iter()
        .map(|a| match a {
            Axis::Frequency(g) => Ok(g),
            _ => Err(Error::Usage("expected a frequency grid".into())),
        })
        .collect()
}

fn as_matrix(v: &Array1<C64>, dims: &[usize]) -> Array2<C64> {
    let (r, c) = (dims[0], dims.get(1).copied().unwrap_or(1));
    Array2::from_shape_vec((r, c), v.to_vec()).expect("shape")
}

fn sandwich(left: &Array2<C64>, mid: &Array2<C64>, right: Option<&Array2<C64>>) -> Array2<C64> {
    let l = left.dot(mid);
    match right {
        Some(r) => l.dot(&r.t()),
        None => l,
    }
}

/// Boundary samples to frequency samples.
pub fn bochner_transform(f: &HardyVector, target: Arc<Discretization>, opts: BochnerOptions) -> Result<BochnerOutput> {
    if f.rep() != Rep::Boundary || target.rep() != Rep::Frequency {
        return Err(Error::Usage("bochner_transform maps boundary vectors to frequency vectors".into()));
    }
    let bx = boundary_axes(&f.space)?;
    let fx = frequency_axes(&target)?;
    if bx.len() != fx.len() {
        return Err(Error::Usage("source and target dimensions differ".into()));
    }
    let modes = opts.modes;
    for g in &bx {
        if g.layout == BoundaryLayout::Cayley && 2 * modes > g.len() {
            return Err(Error::Resolution(format!("{modes} modes need at least {} boundary nodes", 2 * modes)));
        }
    }
    let a: Vec<Array2<C64>> = bx.iter().map(|g| boundary_analysis_matrix(g, modes)).collect();
    let coef = sandwich(&a[0], &as_matrix(&f.values, &f.space.dims()), a.get(1));
    let total: f64 = coef.iter().map(|c| c.norm_sqr()).sum();
    let analytic = if bx.len() == 1 {
        coef.slice(s![..modes, ..]).to_owned()
    } else {
        coef.slice(s![..modes, ..modes]).to_owned()
    };
    let kept: f64 = analytic.iter().map(|c| c.norm_sqr()).sum();
    let negative_mass = if total > 0.0 { ((total - kept) / total).max(0.0) } else { 0.0 };
    let warning = (negative_mass > opts.leakage_tol).then(|| {
        format!("input carries {negative_mass:.3e} of its energy in negative frequencies; it is not Hardy class at this resolution")
    });
    let syn: Vec<Array2<C64>> = fx.iter().map(|g| frequency_synthesis_matrix(g, modes)).collect();
    let vals = sandwich(&syn[0], &analytic, syn.get(1));
    let vector = HardyVector::new(vals.into_iter().collect(), target)?;
    Ok(BochnerOutput { vector, negative_mass, warning })
}

/// Frequency samples back to boundary samples.
pub fn bochner_inverse(fv: &HardyVector, target: Arc<Discretization>, opts: BochnerOptions) -> Result<HardyVector> {
    if fv.rep() != Rep::Frequency || target.rep() != Rep::Boundary {
        return Err(Error::Usage("bochner_inverse maps frequency vectors to boundary vectors".into()));
    }
    let fx = frequency_axes(&fv.space)?;
    let bx = boundary_axes(&target)?;
    if bx.len() != fx.len() {
        return Err(Error::Usage("source and target dimensions differ".into()));
    }
    let p: Vec<Array2<C64>> = fx.iter().map(|g| frequency_analysis_matrix(g, opts.modes)).collect::<Result<_>>()?;
    let coef = sandwich(&p[0], &as_matrix(&fv.values, &fv.space.dims()), p.get(1));
    let e: Vec<Array2<C64>> = bx.iter().map(|g| modal_synthesis_matrix(g, opts.modes)).collect();
    let vals = sandwich(&e[0], &coef, e.get(1));
    HardyVector::new(vals.into_iter().collect(), target)
}
