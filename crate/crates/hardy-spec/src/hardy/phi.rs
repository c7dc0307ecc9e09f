use super::space::{Axis, Discretization, HardyVector, Rep};
use super::{cay, grid::BoundaryLayout};
use crate::{Error, Result, C64};
use ndarray::{Array1, Array2};
use rustfft::FftPlanner;
use std::sync::Arc;

/// `||Phi f|| = PHI_NORM_CONSTANT * ||f||` with the disc pairing `int int d theta1 d theta2`
/// and the Lebesgue pairing on the real boundary.
pub const PHI_NORM_CONSTANT: f64 = 0.5;

/// Taylor coefficients of a disc-side vector as a `n1 x n2` array (n2 = 1 for one variable).
fn taylor_coefficients(f: &HardyVector) -> Result<Array2<C64>> {
    let dims = f.space.dims();
    let (n1, n2) = (dims[0], dims.get(1).copied().unwrap_or(1));
    match f.space.axis(0) {
        Axis::Taylor(_) => Ok(Array2::from_shape_vec((n1, n2), f.values.to_vec()).expect("shape")),
        Axis::Circle(_) => {
            let mut a = Array2::from_shape_vec((n1, n2), f.values.to_vec()).expect("shape");
            let mut planner = FftPlanner::new();
            let f1 = planner.plan_fft_forward(n1);
            let f2 = planner.plan_fft_forward(n2);
            for mut row in a.rows_mut() {
                let mut buf = row.to_vec();
                f2.process(&mut buf);
                row.assign(&Array1::from(buf));
            }
            for mut col in a.columns_mut() {
                let mut buf = col.to_vec();
                f1.process(&mut buf);
                col.assign(&Array1::from(buf));
            }
            let scale = (n1 * n2) as f64;
            // keep the analytic quadrant only
            let (h1, h2) = (n1.div_ceil(2), n2.div_ceil(2));
            let mut out = Array2::zeros((h1, h2));
            for i in 0..h1 {
                for j in 0..h2 {
                    out[[i, j]] = a[[i, j]] / scale;
                }
            }
            Ok(out)
        }
        _ => Err(Error::Usage("phi_isometry expects a disc-side vector (Taylor or circle samples)".into())),
    }
}

/// `(Phi f)(z1, z2) = f(cay z1, cay z2) / ((z1 + i)(z2 + i))` sampled on boundary grids.
pub fn phi_isometry(f: &HardyVector, target: Arc<Discretization>) -> Result<HardyVector> {
    if target.rep() != Rep::Boundary || target.axes().len() != f.space.axes().len() {
        return Err(Error::Usage("phi_isometry target must be a boundary grid with matching dimension".into()));
    }
    let coef = taylor_coefficients(f)?;
    let top = coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degree = |axis: usize| -> usize {
        let mut d = 0;
        for ((i, j), c) in coef.indexed_iter() {
            if c.norm() > 1e-14 * top {
                d = d.max(if axis == 0 { i } else { j });
            }
        }
        d
    };
    let mut evals = Vec::new();
    for (k, axis) in target.axes().iter().enumerate() {
        let Axis::Boundary(g) = axis else {
            return Err(Error::Usage("phi_isometry target must be a real-line boundary grid".into()));
        };
        let d = degree(k);
        let coarse = g.len() < 4 * (d + 1)
            || (g.layout == BoundaryLayout::Uniform && (g.nodes[1] - g.nodes[0]) * d as f64 > 0.75);
        if coarse {
            return Err(Error::Resolution(format!(
                "boundary grid with {} nodes cannot resolve degree {d} on axis {}",
                g.len(),
                k + 1
            )));
        }
        let n = coef.dim().0.max(coef.dim().1);
        // powers cay(x)^n / (x + i)
        let m: Vec<Vec<C64>> = g
            .nodes
            .iter()
            .map(|&x| {
                let z = C64::new(x, 0.0);
                let c = cay(z);
                let mut p = 1.0 / (z + C64::i());
                (0..n)
                    .map(|_| {
                        let v = p;
                        p *= c;
                        v
                    })
                    .collect()
            })
            .collect();
        evals.push(m);
    }
    let (n1, n2) = coef.dim();
    let to_matrix = |m: &Vec<Vec<C64>>, cols: usize| Array2::from_shape_fn((m.len(), cols), |(r, c)| m[r][c]);
    let e1 = to_matrix(&evals[0], n1);
    let values: Array1<C64> = if evals.len() == 1 {
        e1.dot(&coef.column(0))
    } else {
        let e2 = to_matrix(&evals[1], n2);
        let v = e1.dot(&coef).dot(&e2.t());
        v.into_iter().collect()
    };
    HardyVector::new(values, target)
}
