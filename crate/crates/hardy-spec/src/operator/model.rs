use super::wiener_hopf::{
    is_constant, mode_matrix, shift_matrix, symbol_coefficients, toeplitz_from_coefficients, wiener_hopf_matrix,
    TAIL_TOLERANCE,
};
use super::{dilation_matrix, modal_dilation, modal_multiplier, Block, ToeplitzOptions};
use crate::hardy::{Axis, Discretization, FrequencyGrid};
use crate::numeric::{coeff_2d, offset_angles, offset_coefficients_2d};
use crate::{Error, Result, C64};
use ndarray::Array2;
use std::collections::HashMap;
use std::sync::Arc;

/// How the frequency side is discretized.
///
/// `Sampled` uses point values on uniform frequency grids (Nystrom Toeplitz matrices,
/// diagonal multipliers). `Modal` uses coefficients in the Laguerre functions
/// `l_n(t) = L_n(2t) e^{-t}`, the Bochner images of `cay(x)^n / (x + i)`; there analytic
/// Toeplitz operators are exact lower-triangular sections and multipliers are Galerkin
/// matrices.
#[derive(Clone, Debug)]
pub enum FrequencyModel {
    Sampled { grids: Vec<FrequencyGrid>, toeplitz: ToeplitzOptions },
    Modal { modes: Vec<usize>, toeplitz: ToeplitzOptions },
}

impl FrequencyModel {
    pub fn sampled(grids: Vec<FrequencyGrid>) -> Self {
        FrequencyModel::Sampled { grids, toeplitz: ToeplitzOptions::default() }
    }

    pub fn modal(modes: Vec<usize>) -> Self {
        FrequencyModel::Modal { modes, toeplitz: ToeplitzOptions::default() }
    }

    pub fn from_space(space: &Discretization) -> Result<Self> {
        let mut grids = Vec::new();
        let mut modes = Vec::new();
        for a in space.axes() {
            match a {
                Axis::Frequency(g) => grids.push(g.clone()),
                Axis::Taylor(n) => modes.push(*n),
                _ => return Err(Error::Usage("frequency models live on frequency or modal axes".into())),
            }
        }
        Ok(if modes.is_empty() { Self::sampled(grids) } else { Self::modal(modes) })
    }

    pub fn with_toeplitz(mut self, opts: ToeplitzOptions) -> Self {
        match &mut self {
            FrequencyModel::Sampled { toeplitz, .. } | FrequencyModel::Modal { toeplitz, .. } => *toeplitz = opts,
        }
        self
    }

    fn toeplitz_options(&self) -> ToeplitzOptions {
        match self {
            FrequencyModel::Sampled { toeplitz, .. } | FrequencyModel::Modal { toeplitz, .. } => *toeplitz,
        }
    }

    pub fn axis_count(&self) -> usize {
        match self {
            FrequencyModel::Sampled { grids, .. } => grids.len(),
            FrequencyModel::Modal { modes, .. } => modes.len(),
        }
    }

    fn axis(&self, k: usize) -> Axis {
        match self {
            FrequencyModel::Sampled { grids, .. } => Axis::Frequency(grids[k].clone()),
            FrequencyModel::Modal { modes, .. } => Axis::Taylor(modes[k]),
        }
    }

    pub fn axis_len(&self, k: usize) -> usize {
        self.axis(k).len()
    }

    pub fn axis_weights(&self, k: usize) -> Vec<f64> {
        self.axis(k).weights()
    }

    pub fn axis_space(&self, k: usize) -> Arc<Discretization> {
        Discretization::one(self.axis(k))
    }

    pub fn space(&self) -> Arc<Discretization> {
        match self.axis_count() {
            1 => self.axis_space(0),
            _ => Discretization::two(self.axis(0), self.axis(1)).expect("axes share a representation"),
        }
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, FrequencyModel::Modal { .. })
    }

    /// Matrix of the single power `cay^n` on axis `k`.
    pub fn mode_block(&self, n: i64, k: usize) -> Result<Array2<C64>> {
        match self {
            FrequencyModel::Sampled { grids, .. } => mode_matrix(n, &grids[k]),
            FrequencyModel::Modal { modes, .. } => Ok(shift_matrix(n, modes[k])),
        }
    }

    /// One-variable Toeplitz operator on axis `k`; constant symbols stay scalar.
    pub fn toeplitz_axis(&self, symbol: &(dyn Fn(f64) -> C64 + Sync), k: usize) -> Result<Block> {
        let coef = symbol_coefficients(symbol, self.toeplitz_options().circle_nodes)?;
        if let Some(c) = is_constant(&coef) {
            return Ok(Block::Scalar(c));
        }
        Ok(Block::Dense(match self {
            FrequencyModel::Sampled { grids, .. } => wiener_hopf_matrix(&coef, &grids[k])?,
            FrequencyModel::Modal { modes, .. } => toeplitz_from_coefficients(&coef, modes[k]),
        }))
    }

    /// Two-variable Toeplitz operator `sum_{n,m} a_nm X_n (x) Y_m` from the double
    /// Fourier expansion of `symbol(-cot(th1/2), -cot(th2/2))`.
    pub fn toeplitz(&self, symbol: &(dyn Fn(f64, f64) -> C64 + Sync)) -> Result<Block> {
        if self.axis_count() != 2 {
            return Err(Error::Usage("two-variable Toeplitz operator needs a two-axis model".into()));
        }
        let len = self.toeplitz_options().circle_nodes;
        let xs: Vec<f64> = offset_angles(len).iter().map(|&t| -1.0 / (t / 2.0).tan()).collect();
        let samples = Array2::from_shape_fn((len, len), |(a, b)| symbol(xs[a], xs[b]));
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Usage("symbol is not finite on the boundary".into()));
        }
        let a = offset_coefficients_2d(&samples);
        let top = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let half = (len / 2) as i64;
        let guard = (len / 8) as i64;
        let mut tail: f64 = 0.0;
        for n in -half..half {
            for m in -half..half {
                if n.abs() >= half - guard || m.abs() >= half - guard {
                    tail = tail.max(coeff_2d(&a, n, m).norm());
                }
            }
        }
        if top > 0.0 && tail / top > TAIL_TOLERANCE {
            return Err(Error::Usage(format!(
                "symbol does not settle at infinity on a {len}x{len} torus grid (tail ratio {:.2e})",
                tail / top
            )));
        }
        let cut = 1e-15 * top;
        let c00 = coeff_2d(&a, 0, 0);
        let nonconstant = (-half..half)
            .any(|n| (-half..half).any(|m| (n, m) != (0, 0) && coeff_2d(&a, n, m).norm() > 1e-14 * (1.0 + c00.norm())));
        if !nonconstant {
            return Ok(Block::Scalar(c00));
        }
        let (n1, n2) = (self.axis_len(0) as i64, self.axis_len(1) as i64);
        let mut ycache: HashMap<i64, Array2<C64>> = HashMap::new();
        let mut total = Array2::<C64>::zeros(((n1 * n2) as usize, (n1 * n2) as usize));
        for n in -half..half {
            if self.is_modal() && n.abs() >= n1 {
                continue;
            }
            let row: Vec<(i64, C64)> = (-half..half)
                .map(|m| (m, coeff_2d(&a, n, m)))
                .filter(|(m, v)| v.norm() > cut && !(self.is_modal() && m.abs() >= n2))
                .collect();
            if row.is_empty() {
                continue;
            }
            let mut r = Array2::<C64>::zeros((n2 as usize, n2 as usize));
            for (m, v) in row {
                if let std::collections::hash_map::Entry::Vacant(e) = ycache.entry(m) {
                    e.insert(self.mode_block(m, 1)?);
                }
                r.scaled_add(v, &ycache[&m]);
            }
            let x = self.mode_block(n, 0)?;
            total += &ndarray::linalg::kron(&x, &r);
        }
        Ok(Block::Dense(total))
    }

    /// Frequency multiplier on axis `k`. `decay` is the exponential rate of `theta`,
    /// used to pick the Gauss-Laguerre scale in the modal model.
    pub fn multiplier_axis(&self, theta: &dyn Fn(f64) -> C64, decay: f64, k: usize) -> Result<Block> {
        match self {
            FrequencyModel::Sampled { grids, .. } => {
                Ok(Block::Diag(grids[k].nodes.iter().map(|&t| theta(t)).collect()))
            }
            FrequencyModel::Modal { modes, .. } => Ok(Block::Dense(modal_multiplier(theta, decay, modes[k])?)),
        }
    }

    /// Dilation `G(t) = q F(q t)` on axis `k`, same grid on both sides.
    pub fn dilation_axis(&self, q: f64, k: usize) -> Result<Block> {
        if q == 1.0 {
            return Ok(Block::identity());
        }
        Ok(Block::Dense(match self {
            FrequencyModel::Sampled { grids, .. } => dilation_matrix(q, &grids[k], &grids[k])?,
            FrequencyModel::Modal { modes, .. } => modal_dilation(q, modes[k])?,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::cay;

    /// Boundary symbol of `cay^n`, used by tests and diagnostics.
    fn cay_power(n: i32) -> impl Fn(f64) -> C64 + Sync {
        move |x| cay(C64::new(x, 0.0)).powi(n)
    }

    #[test]
    fn modal_toeplitz_of_cay_is_shift() {
        let m = FrequencyModel::modal(vec![6]);
        let Block::Dense(t) = m.toeplitz_axis(&cay_power(1), 0).unwrap() else { panic!() };
        assert!((&t - &shift_matrix(1, 6)).iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn separable_symbol_is_a_kronecker_product() {
        let m = FrequencyModel::modal(vec![4, 5]);
        let f = |x: f64| C64::new(2.0, 0.0) + 0.5 * cay(C64::new(x, 0.0));
        let g = |x: f64| C64::i() - 0.25 * cay(C64::new(x, 0.0)).powi(2);
        let t = m.toeplitz(&|a, b| f(a) * g(b)).unwrap().into_dense(20);
        let a = m.toeplitz_axis(&f, 0).unwrap().into_dense(4);
        let b = m.toeplitz_axis(&g, 1).unwrap().into_dense(5);
        let k = ndarray::linalg::kron(&a, &b);
        assert!((&t - &k).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn sampled_two_variable_toeplitz_matches_kronecker() {
        let g = FrequencyGrid::uniform(4.0, 9).unwrap();
        let m = FrequencyModel::sampled(vec![g.clone(), g]).with_toeplitz(ToeplitzOptions { circle_nodes: 64 });
        let f = |x: f64| C64::new(1.0, 0.0) / (C64::new(x, 0.0) + C64::i()) + 1.0;
        let t = m.toeplitz(&|a, b| f(a) * f(b)).unwrap().into_dense(81);
        let a = m.toeplitz_axis(&f, 0).unwrap().into_dense(9);
        let k = ndarray::linalg::kron(&a, &a);
        assert!((&t - &k).iter().all(|v| v.norm() < 1e-11));
    }
}
