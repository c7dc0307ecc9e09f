use super::plan::{plan_series, PlanOptions};
use super::series::{build_series, SeriesOutput};
use super::{QuasiParabolicMap, SelfMap};
use crate::hardy::{
    boundary_analysis_matrix, cay, cay_inv, modal_synthesis_matrix, Axis, BoundaryGrid, Discretization,
};
use crate::numeric::{coeff_2d, offset_angles, offset_coefficients_2d};
use crate::operator::{Block, FrequencyModel, OperatorMatrix};
use crate::symbol::{AnalyticSymbol, SymbolDomain};
use crate::{Error, Result, C64};
use ndarray::{s, Array2, Array3};
use std::f64::consts::PI;

/// Wraps a closure as a [`SelfMap`].
pub struct FnMap<F>(pub F);

impl<F: Fn(C64, C64) -> (C64, C64) + Sync> SelfMap for FnMap<F> {
    fn apply(&self, z1: C64, z2: C64) -> (C64, C64) {
        (self.0)(z1, z2)
    }
}

/// Per-axis Cauchy quadrature rows `omega_c / (2 pi i (t_c - w))`, normalized so that
/// `1/(t + i)` is reproduced exactly at `w`.
fn cauchy_row(grid: &BoundaryGrid, w: C64) -> Vec<C64> {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let row: Vec<C64> = grid.nodes.iter().zip(&grid.weights).map(|(&t, &om)| om / (two_pi_i * (t - w))).collect();
    let probe: C64 = row.iter().zip(&grid.nodes).map(|(r, &t)| r / (C64::new(t, 0.0) + C64::i())).sum();
    let norm = probe * (w + C64::i());
    row.into_iter().map(|r| r / norm).collect()
}

fn image_points(map: &dyn SelfMap, g1: &BoundaryGrid, g2: &BoundaryGrid, min_im: f64) -> Result<Vec<(C64, C64)>> {
    let mut out = Vec::with_capacity(g1.len() * g2.len());
    for &x1 in &g1.nodes {
        for &x2 in &g2.nodes {
            let (a, b) = map.boundary(x1, x2);
            if !(a.im >= min_im && b.im >= min_im) {
                return Err(Error::Domain(format!(
                    "Im phi at ({x1}, {x2}) is ({:.3e}, {:.3e}), below the required {min_im}",
                    a.im, b.im
                )));
            }
            out.push((a, b));
        }
    }
    Ok(out)
}

/// Boundary-representation matrix of `C_phi` from the double Cauchy integral
/// `f(phi(x)) = (2 pi i)^{-2} int int f(t) / ((t1 - phi1(x)) (t2 - phi2(x))) dt`.
pub fn direct_composition(
    map: &dyn SelfMap,
    g1: &BoundaryGrid,
    g2: &BoundaryGrid,
    min_im: f64,
) -> Result<OperatorMatrix> {
    let pts = image_points(map, g1, g2, min_im)?;
    let (m1, m2) = (g1.len(), g2.len());
    let mut m = Array2::<C64>::zeros((m1 * m2, m1 * m2));
    for (i, &(a, b)) in pts.iter().enumerate() {
        let r1 = cauchy_row(g1, a);
        let r2 = cauchy_row(g2, b);
        for c in 0..m1 {
            for d in 0..m2 {
                m[[i, c * m2 + d]] = r1[c] * r2[d];
            }
        }
    }
    let space = Discretization::boundary2(g1.clone(), g2.clone());
    OperatorMatrix::square(m, space)
}

/// The same operator compressed to the modal basis `cay^n / (x + i)` without forming
/// the full boundary matrix.
pub fn direct_composition_modal(
    map: &dyn SelfMap,
    g1: &BoundaryGrid,
    g2: &BoundaryGrid,
    modes: (usize, usize),
    min_im: f64,
) -> Result<OperatorMatrix> {
    let pts = image_points(map, g1, g2, min_im)?;
    let (m1, m2) = (g1.len(), g2.len());
    let (n1, n2) = modes;
    let e1 = modal_synthesis_matrix(g1, n1);
    let e2 = modal_synthesis_matrix(g2, n2);
    // r[a, b, (k1, k2)] = (K1 E1)[k1] (K2 E2)[k2] at target (a, b)
    let mut r = Array3::<C64>::zeros((m1, m2, n1 * n2));
    for (i, &(a, b)) in pts.iter().enumerate() {
        let p1 = ndarray::Array1::from(cauchy_row(g1, a)).dot(&e1);
        let p2 = ndarray::Array1::from(cauchy_row(g2, b)).dot(&e2);
        let (ia, ib) = (i / m2, i % m2);
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                r[[ia, ib, k1 * n2 + k2]] = p1[k1] * p2[k2];
            }
        }
    }
    let b1 = boundary_analysis_matrix(g1, n1).slice(s![..n1, ..]).to_owned();
    let b2 = boundary_analysis_matrix(g2, n2).slice(s![..n2, ..]).to_owned();
    // contract b with B2, then a with B1
    let mut x = Array2::<C64>::zeros((m1, n2 * n1 * n2));
    for a in 0..m1 {
        let ra = r.slice(s![a, .., ..]);
        let xa = b2.dot(&ra);
        x.row_mut(a).assign(&ndarray::Array1::from_iter(xa.iter().copied()));
    }
    let y = b1.dot(&x);
    let entries = Array2::from_shape_vec((n1 * n2, n1 * n2), y.iter().copied().collect()).expect("shape");
    OperatorMatrix::square(entries, Discretization::taylor2(n1, n2))
}

/// Compress a boundary operator on two Cayley grids to the first `modes` modal coefficients.
pub fn boundary_operator_to_modal(op: &OperatorMatrix, modes: (usize, usize)) -> Result<OperatorMatrix> {
    let grids: Vec<&BoundaryGrid> =
        op.domain.axes().iter().filter_map(|a| if let Axis::Boundary(g) = a { Some(g) } else { None }).collect();
    if grids.len() != 2 || !Discretization::same(&op.domain, &op.codomain) {
        return Err(Error::Usage("expected a square operator on a two-factor boundary grid".into()));
    }
    let (n1, n2) = modes;
    let b = ndarray::linalg::kron(
        &boundary_analysis_matrix(grids[0], n1).slice(s![..n1, ..]).to_owned(),
        &boundary_analysis_matrix(grids[1], n2).slice(s![..n2, ..]).to_owned(),
    );
    let e = ndarray::linalg::kron(&modal_synthesis_matrix(grids[0], n1), &modal_synthesis_matrix(grids[1], n2));
    OperatorMatrix::square(b.dot(&op.entries).dot(&e), Discretization::taylor2(n1, n2))
}

/// Taylor coefficients `[n1, n2]` of `phi1(w)^a phi2(w)^b` for a self-map of the bidisc,
/// from samples on a `len x len` torus grid.
pub fn disc_taylor_composition(
    phi: &dyn Fn(C64, C64) -> (C64, C64),
    exponents: (u32, u32),
    size: (usize, usize),
    len: usize,
) -> Array2<C64> {
    let th = offset_angles(len);
    let samples = Array2::from_shape_fn((len, len), |(p, q)| {
        let (u, v) = phi(C64::from_polar(1.0, th[p]), C64::from_polar(1.0, th[q]));
        u.powu(exponents.0) * v.powu(exponents.1)
    });
    let a = offset_coefficients_2d(&samples);
    Array2::from_shape_fn(size, |(n, m)| coeff_2d(&a, n as i64, m as i64))
}

#[derive(Clone, Debug)]
pub struct DiscSideOutput {
    /// `T_m C_{phi~}` on the model space.
    pub operator: OperatorMatrix,
    pub series: SeriesOutput,
    pub multiplier: Block,
    pub map: QuasiParabolicMap,
}

impl DiscSideOutput {
    /// The bidisc self-map `phi = c o phi~ o c^{-1}`.
    pub fn disc_map(&self) -> impl Fn(C64, C64) -> (C64, C64) + '_ {
        move |w1, w2| {
            let (a, b) = self.map.apply(cay_inv(w1), cay_inv(w2));
            (cay(a), cay(b))
        }
    }
}

/// Half-plane side of the bidisc composition operator with `phi_j = c(c^{-1}(w_j) + psi_j(w))`:
/// the Toeplitz operator with symbol `(1 + psi1 o c / (z1 + i))(1 + psi2 o c / (z2 + i))`
/// times the composition operator of `phi~(z) = z + psi(c z)`.
pub fn disc_side_operator(
    psi1: &AnalyticSymbol,
    psi2: &AnalyticSymbol,
    model: &FrequencyModel,
    opts: &PlanOptions,
) -> Result<DiscSideOutput> {
    if psi1.spec.domain != SymbolDomain::Disc || psi2.spec.domain != SymbolDomain::Disc {
        return Err(Error::Usage("disc_side_operator expects symbols defined on the bidisc".into()));
    }
    let map = QuasiParabolicMap::new(1.0, 1.0, psi1.clone(), psi2.clone())?;
    let plan = plan_series(&map, opts)?;
    let series = build_series(&map, &plan, model)?;
    let m = |x1: f64, x2: f64| {
        let f1 = 1.0 + psi1.eval_real(x1, x2) / C64::new(x1, 1.0);
        let f2 = 1.0 + psi2.eval_real(x1, x2) / C64::new(x2, 1.0);
        f1 * f2
    };
    let multiplier = model.toeplitz(&m)?;
    let space = model.space();
    let block = multiplier.mul(&series.block);
    let operator = OperatorMatrix::from_block(block, space);
    Ok(DiscSideOutput { operator, series, multiplier, map })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_rows_reproduce_modal_functions() {
        let g = BoundaryGrid::cayley(32).unwrap();
        let w = C64::new(0.3, 1.7);
        let row = cauchy_row(&g, w);
        for n in 0..8 {
            let f = |t: C64| cay(t).powi(n) / (t + C64::i());
            let q: C64 = row.iter().zip(&g.nodes).map(|(r, &t)| r * f(C64::new(t, 0.0))).sum();
            assert!((q - f(w)).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn translation_is_a_multiplier_in_modal_form() {
        let g = BoundaryGrid::cayley(48).unwrap();
        let shift = FnMap(|a: C64, b: C64| (a + C64::i(), b + C64::i()));
        let full = direct_composition(&shift, &g, &g, 0.5).unwrap();
        let a = boundary_operator_to_modal(&full, (4, 4)).unwrap();
        let b = direct_composition_modal(&shift, &g, &g, (4, 4), 0.5).unwrap();
        assert!((&a.entries - &b.entries).iter().all(|v| v.norm() < 1e-11));
    }
}
