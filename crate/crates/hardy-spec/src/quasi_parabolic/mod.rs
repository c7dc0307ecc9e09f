//! Quasi-parabolic self-maps `phi(z) = (p1 z1 + psi1(z), p2 z2 + psi2(z))` of the upper
//! half-plane squared and their composition operators: alpha selection, the
//! Toeplitz/multiplier exponential series with its remainder certificate, and the
//! independent Cauchy-integral construction used to cross-check it.

mod alpha;
mod direct;
mod plan;
mod series;

pub use alpha::{choose_alpha, delta_of, AlphaMode};
pub use direct::{
    boundary_operator_to_modal, direct_composition, direct_composition_modal, disc_side_operator,
    disc_taylor_composition, DiscSideOutput, FnMap,
};
pub use plan::{plan_series, remainder_bound, NormEstimates, PlanOptions, SeriesPlan, MAX_ORDER};
pub use series::{build_series, SeriesBuilder, SeriesDiagnostics, SeriesOutput};

use crate::numeric::ln_factorial;
use crate::symbol::AnalyticSymbol;
use crate::{Error, Result, BOUNDARY_HEIGHT, C64};

/// A holomorphic self-map of the upper half-plane squared.
pub trait SelfMap: Sync {
    fn apply(&self, z1: C64, z2: C64) -> (C64, C64);

    /// Boundary value at real `(x1, x2)`, taken at height [`BOUNDARY_HEIGHT`].
    fn boundary(&self, x1: f64, x2: f64) -> (C64, C64) {
        self.apply(C64::new(x1, BOUNDARY_HEIGHT), C64::new(x2, BOUNDARY_HEIGHT))
    }
}

#[derive(Clone, Debug)]
pub struct QuasiParabolicMap {
    pub p1: f64,
    pub p2: f64,
    pub psi1: AnalyticSymbol,
    pub psi2: AnalyticSymbol,
}

impl QuasiParabolicMap {
    pub fn new(p1: f64, p2: f64, psi1: AnalyticSymbol, psi2: AnalyticSymbol) -> Result<Self> {
        if !(p1 > 0.0 && p2 > 0.0 && p1.is_finite() && p2.is_finite()) {
            return Err(Error::Domain(format!("dilation factors must be positive (got {p1}, {p2})")));
        }
        Ok(Self { p1, p2, psi1, psi2 })
    }

    /// `psi_j(z1 / p1, z2 / p2)`.
    pub fn rescaled(&self, j: usize, z1: C64, z2: C64) -> C64 {
        let (a, b) = (z1 / self.p1, z2 / self.p2);
        if j == 0 {
            self.psi1.eval(a, b)
        } else {
            self.psi2.eval(a, b)
        }
    }

    /// Smallest certified imaginary part of the perturbations.
    pub fn eps(&self) -> f64 {
        self.psi1.im_lower_bound.min(self.psi2.im_lower_bound)
    }

    /// Each `psi_j` depends on `z_j` only, so the operator is a tensor product.
    pub fn is_separable(&self) -> bool {
        !self.psi1.variables().1 && !self.psi2.variables().0
    }

    pub fn has_dilation(&self) -> bool {
        self.p1 != 1.0 || self.p2 != 1.0
    }
}

impl SelfMap for QuasiParabolicMap {
    fn apply(&self, z1: C64, z2: C64) -> (C64, C64) {
        (self.p1 * z1 + self.psi1.eval(z1, z2), self.p2 * z2 + self.psi2.eval(z1, z2))
    }
}

/// `t -> (-i t)^n e^{-alpha t} / n!`.
pub fn vartheta(n: usize, alpha: f64) -> impl Fn(f64) -> C64 + Sync + Send + Copy {
    let lf = ln_factorial(n);
    let phase = C64::new(0.0, -1.0).powi(n as i32);
    move |t: f64| {
        if n == 0 {
            return C64::new((-alpha * t).exp(), 0.0);
        }
        if t <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        phase * (n as f64 * t.ln() - alpha * t - lf).exp()
    }
}

/// `sup_t |vartheta_n(t)| = (n / (e alpha))^n / n!`.
pub fn vartheta_sup(n: usize, alpha: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    (nf * (nf / (std::f64::consts::E * alpha)).ln() - ln_factorial(n)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vartheta_values() {
        assert!((vartheta(0, 2.0)(0.5) - (-1.0f64).exp()).norm() < 1e-15);
        assert!((vartheta(1, 1.0)(1.0) - C64::new(0.0, -(-1.0f64).exp())).norm() < 1e-15);
        let f = vartheta(3, 1.5);
        let t_star = 3.0 / 1.5;
        assert!((f(t_star).norm() - vartheta_sup(3, 1.5)).abs() < 1e-14);
        assert!(f(t_star * 1.01).norm() < vartheta_sup(3, 1.5));
    }
}
