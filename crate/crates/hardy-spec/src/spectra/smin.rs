use crate::{Error, Result, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Factorize, Solve, SVD};

/// Dense matrices up to this size use a full SVD per shift; larger ones use inverse
/// iteration on an LU factorization.
const SVD_LIMIT: usize = 256;
const INVERSE_ITERATIONS: usize = 60;

#[derive(Clone, Debug)]
pub enum Structure {
    Diagonal(Vec<C64>),
    /// Triangular matrix; `true` for lower.
    Triangular(Array2<C64>, bool),
    Dense(Array2<C64>),
}

/// `lambda -> sigma_min(lambda I - A)` with a fast path per matrix structure.
#[derive(Clone, Debug)]
pub struct MinSingular {
    structure: Structure,
}

impl MinSingular {
    pub fn new(a: &Array2<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Usage("sigma_min needs a square matrix".into()));
        }
        let zero = C64::new(0.0, 0.0);
        let lower = a.indexed_iter().all(|((i, j), v)| j <= i || *v == zero);
        let upper = a.indexed_iter().all(|((i, j), v)| j >= i || *v == zero);
        let structure = match (lower, upper) {
            (true, true) => Structure::Diagonal(a.diag().to_vec()),
            (true, false) => Structure::Triangular(a.clone(), true),
            (false, true) => Structure::Triangular(a.clone(), false),
            _ => Structure::Dense(a.clone()),
        };
        Ok(Self { structure })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn at(&self, lambda: C64) -> Result<f64> {
        match &self.structure {
            Structure::Diagonal(d) => Ok(d.iter().map(|v| (lambda - v).norm()).fold(f64::INFINITY, f64::min)),
            Structure::Triangular(a, lower) => {
                let m = shifted(a, lambda);
                if m.diag().iter().any(|v| v.norm() == 0.0) {
                    return Ok(0.0);
                }
                let lower = *lower;
                Ok(inverse_iteration(m.nrows(), |x| {
                    let y = triangular_solve(&m, x, lower, true);
                    triangular_solve(&m, &y, lower, false)
                }))
            }
            Structure::Dense(a) => {
                let m = shifted(a, lambda);
                if m.nrows() <= SVD_LIMIT {
                    let (_, s, _) = m.svd(false, false)?;
                    return Ok(s.iter().cloned().fold(f64::INFINITY, f64::min));
                }
                let lu = m.factorize()?;
                Ok(inverse_iteration(m.nrows(), |x| {
                    let y = lu.solve_h(x).unwrap_or_else(|_| Array1::from_elem(x.len(), C64::new(f64::NAN, 0.0)));
                    lu.solve(&y).unwrap_or_else(|_| Array1::from_elem(x.len(), C64::new(f64::NAN, 0.0)))
                }))
            }
        }
    }
}

fn shifted(a: &Array2<C64>, lambda: C64) -> Array2<C64> {
    let mut m = a.mapv(|v| -v);
    for k in 0..m.nrows() {
        m[[k, k]] += lambda;
    }
    m
}

/// Power iteration on `(M^H M)^{-1}`; returns `1 / sqrt(largest eigenvalue)`.
fn inverse_iteration(n: usize, apply: impl Fn(&Array1<C64>) -> Array1<C64>) -> f64 {
    let mut x = Array1::from_shape_fn(n, |k| C64::new(1.0 + 0.37 * ((k as f64) * 0.71).sin(), 0.13 * (k as f64).cos()));
    let norm = |v: &Array1<C64>| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nx = norm(&x);
    x.mapv_inplace(|v| v / nx);
    let mut est = 0.0;
    for _ in 0..INVERSE_ITERATIONS {
        let z = apply(&x);
        let nz = norm(&z);
        if !nz.is_finite() {
            return 0.0;
        }
        if nz == 0.0 {
            break;
        }
        x = z.mapv(|v| v / nz);
        let done = (nz - est).abs() <= 1e-12 * nz;
        est = nz;
        if done {
            break;
        }
    }
    if est == 0.0 {
        f64::INFINITY
    } else {
        1.0 / est.sqrt()
    }
}

/// Solves `M y = b` (`adjoint = false`) or `M^H y = b` for triangular `M`.
fn triangular_solve(m: &Array2<C64>, b: &Array1<C64>, lower: bool, adjoint: bool) -> Array1<C64> {
    let n = b.len();
    let at = |i: usize, j: usize| if adjoint { m[[j, i]].conj() } else { m[[i, j]] };
    // M^H of a lower matrix is upper.
    let forward = lower != adjoint;
    let mut y = Array1::<C64>::zeros(n);
    let order: Box<dyn Iterator<Item = usize>> = if forward { Box::new(0..n) } else { Box::new((0..n).rev()) };
    for i in order {
        let mut s = b[i];
        if forward {
            for j in 0..i {
                s -= at(i, j) * y[j];
            }
        } else {
            for j in i + 1..n {
                s -= at(i, j) * y[j];
            }
        }
        y[i] = s / at(i, i);
    }
    y
}
