use super::grid::{BoundaryGrid, CircleGrid, FrequencyGrid};
use crate::{Error, Result, C64};
use ndarray::Array1;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rep {
    Boundary,
    Frequency,
    DiscTaylor,
}

/// One tensor factor of a discretization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Boundary(BoundaryGrid),
    /// Samples on the unit circle: the boundary representation on the disc side.
    Circle(CircleGrid),
    Frequency(FrequencyGrid),
    /// Taylor coefficients of `z^0 .. z^{n-1}`; on the half-plane side these are the
    /// coefficients in the basis `cay(x)^n / (x + i)` and, after the Bochner
    /// transform, in the Laguerre functions.
    Taylor(usize),
}

impl Axis {
    pub fn len(&self) -> usize {
        match self {
            Axis::Boundary(g) => g.len(),
            Axis::Circle(g) => g.count,
            Axis::Frequency(g) => g.len(),
            Axis::Taylor(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rep(&self) -> Rep {
        match self {
            Axis::Boundary(_) | Axis::Circle(_) => Rep::Boundary,
            Axis::Frequency(_) => Rep::Frequency,
            Axis::Taylor(_) => Rep::DiscTaylor,
        }
    }

    /// Quadrature weights; Taylor coefficients carry the disc normalization `2 pi`.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            Axis::Boundary(g) => g.weights.clone(),
            Axis::Circle(g) => vec![g.weight(); g.count],
            Axis::Frequency(g) => g.weights.clone(),
            Axis::Taylor(n) => vec![2.0 * PI; *n],
        }
    }
}

/// A one- or two-factor tensor discretization. Two-factor vectors are flattened
/// row-major: index = k1 * len2 + k2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    axes: Vec<Axis>,
}

impl Discretization {
    pub fn one(axis: Axis) -> Arc<Self> {
        Arc::new(Self { axes: vec![axis] })
    }

    pub fn two(a: Axis, b: Axis) -> Result<Arc<Self>> {
        if a.rep() != b.rep() {
            return Err(Error::Usage(format!(
                "tensor factors must share a representation ({:?} vs {:?})",
                a.rep(),
                b.rep()
            )));
        }
        Ok(Arc::new(Self { axes: vec![a, b] }))
    }

    /// Product of two one-factor discretizations.
    pub fn product(a: &Discretization, b: &Discretization) -> Result<Arc<Self>> {
        if a.axes.len() != 1 || b.axes.len() != 1 {
            return Err(Error::Usage("tensor products are limited to two one-variable factors".into()));
        }
        Self::two(a.axes[0].clone(), b.axes[0].clone())
    }

    pub fn taylor(n: usize) -> Arc<Self> {
        Self::one(Axis::Taylor(n))
    }

    pub fn taylor2(n1: usize, n2: usize) -> Arc<Self> {
        Self::two(Axis::Taylor(n1), Axis::Taylor(n2)).expect("same rep")
    }

    pub fn boundary2(g1: BoundaryGrid, g2: BoundaryGrid) -> Arc<Self> {
        Self::two(Axis::Boundary(g1), Axis::Boundary(g2)).expect("same rep")
    }

    pub fn frequency(g: FrequencyGrid) -> Arc<Self> {
        Self::one(Axis::Frequency(g))
    }

    pub fn frequency2(g1: FrequencyGrid, g2: FrequencyGrid) -> Arc<Self> {
        Self::two(Axis::Frequency(g1), Axis::Frequency(g2)).expect("same rep")
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    /// The one-factor discretization of axis `k`.
    pub fn factor(&self, k: usize) -> Arc<Self> {
        Self::one(self.axes[k].clone())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rep(&self) -> Rep {
        self.axes[0].rep()
    }

    pub fn is_two_dimensional(&self) -> bool {
        self.axes.len() == 2
    }

    /// Product quadrature weights in flattening order.
    pub fn weights(&self) -> Vec<f64> {
        match self.axes.len() {
            1 => self.axes[0].weights(),
            _ => {
                let (w1, w2) = (self.axes[0].weights(), self.axes[1].weights());
                let mut out = Vec::with_capacity(w1.len() * w2.len());
                for a in &w1 {
                    for b in &w2 {
                        out.push(a * b);
                    }
                }
                out
            }
        }
    }

    /// True when both handles describe the same discretization.
    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// A discretized Hardy-space element.
#[derive(Clone, Debug)]
pub struct HardyVector {
    pub values: Array1<C64>,
    pub space: Arc<Discretization>,
}

impl HardyVector {
    pub fn new(values: Array1<C64>, space: Arc<Discretization>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Usage(format!(
                "vector length {} does not match grid size {}",
                values.len(),
                space.len()
            )));
        }
        Ok(Self { values, space })
    }

    pub fn zeros(space: Arc<Discretization>) -> Self {
        Self { values: Array1::zeros(space.len()), space }
    }

    pub fn rep(&self) -> Rep {
        self.space.rep()
    }

    pub fn norm(&self) -> f64 {
        inner_product(self, self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }
}

/// Weighted pairing `sum_k w_k f_k conj(g_k)`; conjugate-linear in the second slot.
pub fn inner_product(f: &HardyVector, g: &HardyVector) -> Result<C64> {
    if !Discretization::same(&f.space, &g.space) {
        return Err(Error::Usage("inner product of vectors on different grids or representations".into()));
    }
    let w = f.space.weights();
    Ok(f.values.iter().zip(g.values.iter()).zip(w.iter()).map(|((a, b), w)| a * b.conj() * *w).sum())
}
