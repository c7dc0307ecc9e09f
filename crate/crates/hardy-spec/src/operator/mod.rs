//! Dense matrix operators on discretized Hardy spaces.

mod block;
mod model;
pub mod wiener_hopf;

pub use block::{embed_block, Block};
pub use model::FrequencyModel;

use crate::hardy::{Axis, CircleGrid, Discretization, FrequencyGrid, FrequencyLayout, HardyVector, Rep};
use crate::numeric::{cubic_weights, gauss_laguerre, laguerre_scaled};
use crate::{Error, Result, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use rustfft::FftPlanner;
use std::sync::Arc;

/// Largest dimension for which `op_norm` uses a full SVD.
pub const DENSE_NORM_LIMIT: usize = 2000;

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub entries: Array2<C64>,
    pub domain: Arc<Discretization>,
    pub codomain: Arc<Discretization>,
}

impl OperatorMatrix {
    pub fn new(entries: Array2<C64>, domain: Arc<Discretization>, codomain: Arc<Discretization>) -> Result<Self> {
        if entries.dim() != (codomain.len(), domain.len()) {
            return Err(Error::Usage(format!(
                "matrix of shape {:?} does not map a {}-point grid to a {}-point grid",
                entries.dim(),
                domain.len(),
                codomain.len()
            )));
        }
        if domain.rep() != codomain.rep() {
            return Err(Error::Usage("domain and codomain must share a representation".into()));
        }
        Ok(Self { entries, domain, codomain })
    }

    pub fn square(entries: Array2<C64>, space: Arc<Discretization>) -> Result<Self> {
        Self::new(entries, space.clone(), space)
    }

    pub fn identity(space: Arc<Discretization>) -> Self {
        let n = space.len();
        Self { entries: Array2::eye(n), domain: space.clone(), codomain: space }
    }

    pub fn from_block(block: Block, space: Arc<Discretization>) -> Self {
        let n = space.len();
        Self { entries: block.into_dense(n), domain: space.clone(), codomain: space }
    }

    pub fn rep(&self) -> Rep {
        self.domain.rep()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.entries.dim()
    }

    pub fn apply(&self, v: &HardyVector) -> Result<HardyVector> {
        if !Discretization::same(&v.space, &self.domain) {
            return Err(Error::Usage("vector does not live on the operator's domain".into()));
        }
        HardyVector::new(self.entries.dot(&v.values), self.codomain.clone())
    }

    /// `self * rhs`.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if !Discretization::same(&rhs.codomain, &self.domain) {
            return Err(Error::Usage("operators cannot be composed: grids differ".into()));
        }
        Ok(Self {
            entries: self.entries.dot(&rhs.entries),
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.same_shape(rhs)?;
        Ok(Self { entries: &self.entries + &rhs.entries, ..self.clone() })
    }

    pub fn sub(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.same_shape(rhs)?;
        Ok(Self { entries: &self.entries - &rhs.entries, ..self.clone() })
    }

    pub fn scale(&self, c: C64) -> OperatorMatrix {
        Self { entries: self.entries.mapv(|v| v * c), ..self.clone() }
    }

    fn same_shape(&self, rhs: &OperatorMatrix) -> Result<()> {
        if !Discretization::same(&self.domain, &rhs.domain) || !Discretization::same(&self.codomain, &rhs.codomain) {
            return Err(Error::Usage("operators live on different grids".into()));
        }
        Ok(())
    }

    /// `W_cod^{1/2} A W_dom^{-1/2}`: the matrix in an orthonormalized frame.
    pub fn weighted(&self) -> Array2<C64> {
        let wd: Vec<f64> = self.domain.weights().iter().map(|w| w.sqrt()).collect();
        let wc: Vec<f64> = self.codomain.weights().iter().map(|w| w.sqrt()).collect();
        Array2::from_shape_fn(self.entries.dim(), |(i, j)| self.entries[[i, j]] * wc[i] / wd[j])
    }

    /// Adjoint with respect to the quadrature inner products, `W_dom^{-1} A^H W_cod`.
    pub fn adjoint(&self) -> OperatorMatrix {
        let wd = self.domain.weights();
        let wc = self.codomain.weights();
        let (r, c) = self.entries.dim();
        let entries = Array2::from_shape_fn((c, r), |(i, j)| self.entries[[j, i]].conj() * wc[j] / wd[i]);
        Self { entries, domain: self.codomain.clone(), codomain: self.domain.clone() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.indexed_iter().all(|((i, j), v)| i == j || *v == C64::new(0.0, 0.0))
    }

    /// `Some(true)` for lower, `Some(false)` for upper triangular, `None` otherwise.
    pub fn triangularity(&self) -> Option<bool> {
        let zero = C64::new(0.0, 0.0);
        if self.entries.indexed_iter().all(|((i, j), v)| j <= i || *v == zero) {
            Some(true)
        } else if self.entries.indexed_iter().all(|((i, j), v)| j >= i || *v == zero) {
            Some(false)
        } else {
            None
        }
    }
}

/// Finite section `[phi_hat(j - k)]` of the disc Toeplitz operator from samples at
/// `theta_k = 2 pi k / L`. Requires `L >= 4 size`.
pub fn toeplitz_disc(samples: &[C64], grid: &CircleGrid, size: usize) -> Result<OperatorMatrix> {
    let len = grid.count;
    if samples.len() != len {
        return Err(Error::Usage("sample count does not match the circle grid".into()));
    }
    if len < 4 * size {
        return Err(Error::Usage(format!(
            "circle grid of {len} points aliases a {size}x{size} section (need {})",
            4 * size
        )));
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let coef = |n: i64| buf[n.rem_euclid(len as i64) as usize] / len as f64;
    let entries = Array2::from_shape_fn((size, size), |(j, k)| coef(j as i64 - k as i64));
    OperatorMatrix::square(entries, Discretization::taylor(size))
}

/// Options for realizing half-plane Toeplitz operators.
#[derive(Clone, Copy, Debug)]
pub struct ToeplitzOptions {
    /// Circle nodes per axis used to expand the symbol in powers of `cay`.
    pub circle_nodes: usize,
}

impl Default for ToeplitzOptions {
    fn default() -> Self {
        Self { circle_nodes: 256 }
    }
}

/// Toeplitz operator with a boundary symbol, in the frequency representation.
/// `symbol(x1, x2)` ignores `x2` for one-variable spaces.
pub fn toeplitz_halfplane(
    symbol: &(dyn Fn(f64, f64) -> C64 + Sync),
    space: Arc<Discretization>,
    opts: ToeplitzOptions,
) -> Result<OperatorMatrix> {
    if space.rep() != Rep::Frequency {
        return Err(Error::Usage("toeplitz_halfplane builds frequency-representation operators".into()));
    }
    let model = FrequencyModel::from_space(&space)?.with_toeplitz(opts);
    let entries = if space.is_two_dimensional() {
        model.toeplitz(symbol)?.into_dense(space.len())
    } else {
        model.toeplitz_axis(&|x| symbol(x, 0.0), 0)?.into_dense(space.len())
    };
    OperatorMatrix::square(entries, space)
}

/// Diagonal operator `diag(theta(t_k))` (row-major over `(t1, t2)` in two variables).
pub fn fourier_multiplier(theta: &dyn Fn(&[f64]) -> C64, space: Arc<Discretization>) -> Result<OperatorMatrix> {
    let d = multiplier_diagonal(theta, &space)?;
    OperatorMatrix::square(Array2::from_diag(&d), space)
}

pub fn multiplier_diagonal(theta: &dyn Fn(&[f64]) -> C64, space: &Discretization) -> Result<Array1<C64>> {
    let mut grids = Vec::new();
    for a in space.axes() {
        match a {
            Axis::Frequency(g) => grids.push(g),
            _ => return Err(Error::Usage("fourier_multiplier needs frequency grids".into())),
        }
    }
    let d: Array1<C64> = match grids.as_slice() {
        [g] => g.nodes.iter().map(|&t| theta(&[t])).collect(),
        [g1, g2] => {
            g1.nodes.iter().flat_map(|&a| g2.nodes.iter().map(move |&b| (a, b))).map(|(a, b)| theta(&[a, b])).collect()
        }
        _ => unreachable!(),
    };
    if d.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Usage("multiplier is not finite on the grid".into()));
    }
    Ok(d)
}

/// Galerkin matrix `2 int theta(t) l_j(t) l_k(t) dt` of a multiplier on the Laguerre
/// basis. `theta(t) e^{decay t}` must be a polynomial (or close to one) for exactness.
pub fn modal_multiplier(theta: &dyn Fn(f64) -> C64, decay: f64, modes: usize) -> Result<Array2<C64>> {
    if !(decay > -2.0) {
        return Err(Error::Usage("multiplier decay must exceed -2".into()));
    }
    let beta = 2.0 + decay;
    let q = modes + 24;
    let (s, w) = gauss_laguerre(q)?;
    let mut g = Array2::<C64>::zeros((modes, modes));
    for (&sq, &wq) in s.iter().zip(&w) {
        let t = sq / beta;
        // L_j(2t) e^{-s/2}; the product of two carries e^{-s}
        let l = laguerre_scaled(modes, 2.0 * t, sq / 2.0);
        let f = theta(t) * (decay * t).exp() * (2.0 * wq / beta);
        for j in 0..modes {
            let fj = f * l[j];
            for k in 0..modes {
                g[[j, k]] += fj * l[k];
            }
        }
    }
    Ok(g)
}

/// Frequency-side dilation `G(t) = q F(q t)`, i.e. `f(x) -> f(x / q)` on the boundary,
/// from samples on `dom` to samples on `cod` by four-point cubic interpolation.
pub fn dilation_matrix(q: f64, dom: &FrequencyGrid, cod: &FrequencyGrid) -> Result<Array2<C64>> {
    if !(q > 0.0) {
        return Err(Error::Usage("dilation factor must be positive".into()));
    }
    let (FrequencyLayout::Uniform, FrequencyLayout::Uniform) = (dom.layout, cod.layout) else {
        return Err(Error::Usage("sampled dilation needs uniform frequency grids".into()));
    };
    if q * cod.extent > dom.extent * (1.0 + 1e-12) {
        return Err(Error::Usage(format!(
            "dilation by {q} maps [0, {}] beyond the domain grid [0, {}]",
            cod.extent, dom.extent
        )));
    }
    if q == 1.0 && dom == cod {
        return Ok(Array2::eye(dom.len()));
    }
    let h = dom.step().expect("uniform");
    let mut m = Array2::zeros((cod.len(), dom.len()));
    for (j, &t) in cod.nodes.iter().enumerate() {
        for (k, w) in cubic_weights(dom.len(), h, q * t) {
            m[[j, k]] += C64::new(q * w, 0.0);
        }
    }
    Ok(m)
}

/// Galerkin matrix `2 int l_j(t) q l_k(q t) dt` of the same dilation on the Laguerre basis.
pub fn modal_dilation(q: f64, modes: usize) -> Result<Array2<C64>> {
    if !(q > 0.0) {
        return Err(Error::Usage("dilation factor must be positive".into()));
    }
    if q == 1.0 {
        return Ok(Array2::eye(modes));
    }
    let beta = 1.0 + q;
    let (s, w) = gauss_laguerre(modes + 24)?;
    let mut g = Array2::<C64>::zeros((modes, modes));
    for (&sq, &wq) in s.iter().zip(&w) {
        let t = sq / beta;
        let a = laguerre_scaled(modes, 2.0 * t, sq / 2.0);
        let b = laguerre_scaled(modes, 2.0 * q * t, sq / 2.0);
        let f = 2.0 * q * wq / beta;
        for j in 0..modes {
            for k in 0..modes {
                g[[j, k]] += C64::new(f * a[j] * b[k], 0.0);
            }
        }
    }
    Ok(g)
}

/// `V_{p1, p2}` on frequency grids: `(V f)(z) = f(z1 / p1, z2 / p2)`.
pub fn dilation(p: &[f64], dom: Arc<Discretization>, cod: Arc<Discretization>) -> Result<OperatorMatrix> {
    if p.len() != dom.axes().len() || dom.axes().len() != cod.axes().len() {
        return Err(Error::Usage("one dilation factor per axis is required".into()));
    }
    let mut factors = Vec::new();
    for (k, &pk) in p.iter().enumerate() {
        let m = match (dom.axis(k), cod.axis(k)) {
            (Axis::Frequency(a), Axis::Frequency(b)) => dilation_matrix(pk, a, b)?,
            (Axis::Taylor(a), Axis::Taylor(b)) if a == b => modal_dilation(pk, *a)?,
            _ => return Err(Error::Usage("dilation needs matching frequency or modal axes".into())),
        };
        factors.push(m);
    }
    let entries = match factors.as_slice() {
        [a] => a.clone(),
        [a, b] => ndarray::linalg::kron(a, b),
        _ => unreachable!(),
    };
    OperatorMatrix::new(entries, dom, cod)
}

/// Operator norm in the quadrature-weighted frame. Exact for diagonal matrices, SVD up
/// to [`DENSE_NORM_LIMIT`], power iteration beyond.
pub fn op_norm(a: &OperatorMatrix) -> Result<f64> {
    let (r, c) = a.dim();
    if r == c && a.is_diagonal() {
        let wd = a.domain.weights();
        let wc = a.codomain.weights();
        return Ok((0..r).map(|i| a.entries[[i, i]].norm() * (wc[i] / wd[i]).sqrt()).fold(0.0, f64::max));
    }
    let w = a.weighted();
    if r.max(c) <= DENSE_NORM_LIMIT {
        let (_, s, _) = w.svd(false, false)?;
        Ok(s.iter().cloned().fold(0.0, f64::max))
    } else {
        let ones = vec![1.0; c];
        Ok(Block::Dense(w).weighted_norm_estimate(&ones, 200))
    }
}

/// Largest singular value of a plain matrix.
pub fn spectral_norm(a: &Array2<C64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let (_, s, _) = a.svd(false, false)?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// Kronecker product; acts on two-variable vectors flattened row-major.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.rep() != b.rep() {
        return Err(Error::Usage("Kronecker factors must share a representation".into()));
    }
    let dom = Discretization::product(&a.domain, &b.domain)?;
    let cod = Discretization::product(&a.codomain, &b.codomain)?;
    OperatorMatrix::new(ndarray::linalg::kron(&a.entries, &b.entries), dom, cod)
}

/// `A (x) I` (axis 1) or `I (x) A` (axis 2).
pub fn embed_one_variable(a: &OperatorMatrix, axis: usize, other: Arc<Discretization>) -> Result<OperatorMatrix> {
    if a.domain.is_two_dimensional() || other.is_two_dimensional() {
        return Err(Error::Usage("embed_one_variable expects one-variable operators and grids".into()));
    }
    let eye = OperatorMatrix::identity(other);
    match axis {
        1 => kron(a, &eye),
        2 => kron(&eye, a),
        _ => Err(Error::Usage(format!("axis must be 1 or 2 (got {axis})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_toeplitz_of_simple_symbols() {
        let g = CircleGrid::new(32).unwrap();
        let th = g.angles();
        let one: Vec<C64> = th.iter().map(|_| C64::new(1.0, 0.0)).collect();
        let t = toeplitz_disc(&one, &g, 8).unwrap();
        assert!((&t.entries - &Array2::<C64>::eye(8)).iter().all(|v| v.norm() < 1e-14));
        let z: Vec<C64> = th.iter().map(|&a| C64::from_polar(1.0, a)).collect();
        let s = toeplitz_disc(&z, &g, 8).unwrap();
        assert!((s.entries[[3, 2]] - 1.0).norm() < 1e-14 && s.entries[[2, 3]].norm() < 1e-14);
        assert!(toeplitz_disc(&z, &g, 9).is_err());
    }

    #[test]
    fn dilation_is_identity_at_one_and_scales_exponentials() {
        let g = FrequencyGrid::uniform(10.0, 401).unwrap();
        let half = FrequencyGrid::uniform(5.0, 201).unwrap();
        assert_eq!(dilation_matrix(1.0, &g, &g).unwrap(), Array2::<C64>::eye(401));
        let v = dilation_matrix(2.0, &g, &half).unwrap();
        let f: Array1<C64> = g.nodes.iter().map(|t| C64::new((-t).exp(), 0.0)).collect();
        let out = v.dot(&f);
        for (t, o) in half.nodes.iter().zip(out.iter()) {
            assert!((o - 2.0 * (-2.0 * t).exp()).norm() < 1e-6);
        }
        assert!(dilation_matrix(2.0, &g, &g).is_err());
    }

    #[test]
    fn modal_dilation_round_trip() {
        let a = modal_dilation(2.0, 6).unwrap();
        // l_0 maps to 2 e^{-2t} whose l_0 coefficient is 2 * 2 int e^{-3t} dt = 4/3
        assert!((a[[0, 0]] - 4.0 / 3.0).norm() < 1e-12);
        let b = modal_dilation(0.5, 40).unwrap();
        let c = modal_dilation(2.0, 40).unwrap();
        let prod = c.dot(&b);
        assert!((prod[[0, 0]] - 1.0).norm() < 1e-6);
    }

    #[test]
    fn modal_multiplier_of_exponential() {
        // e^{-t} on l_0: 2 int e^{-3t} dt = 2/3
        let g = modal_multiplier(&|t| C64::new((-t).exp(), 0.0), 1.0, 4).unwrap();
        assert!((g[[0, 0]] - 2.0 / 3.0).norm() < 1e-13);
        assert!((g[[1, 0]] - g[[0, 1]]).norm() < 1e-13);
    }

    #[test]
    fn op_norm_of_identity_and_diagonal() {
        let s = Discretization::frequency(FrequencyGrid::uniform(4.0, 9).unwrap());
        assert!((op_norm(&OperatorMatrix::identity(s.clone())).unwrap() - 1.0).abs() < 1e-14);
        let d = fourier_multiplier(&|t| C64::new((-t[0]).exp(), 0.0), s).unwrap();
        assert!((op_norm(&d).unwrap() - 1.0).abs() < 1e-14);
    }
}
