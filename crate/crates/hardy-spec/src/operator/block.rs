use crate::C64;
use ndarray::{Array1, Array2, Zip};

/// A square matrix that remembers whether it is a scalar multiple of the identity
/// or diagonal, so products of such factors stay cheap.
#[derive(Clone, Debug)]
pub enum Block {
    Scalar(C64),
    Diag(Array1<C64>),
    Dense(Array2<C64>),
}

impl Block {
    pub fn identity() -> Self {
        Block::Scalar(C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Block::Scalar(C64::new(0.0, 0.0))
    }

    pub fn to_dense(&self, n: usize) -> Array2<C64> {
        match self {
            Block::Scalar(c) => Array2::from_diag_elem(n, *c),
            Block::Diag(d) => Array2::from_diag(d),
            Block::Dense(a) => a.clone(),
        }
    }

    pub fn into_dense(self, n: usize) -> Array2<C64> {
        match self {
            Block::Dense(a) => a,
            other => other.to_dense(n),
        }
    }

    pub fn mul(&self, rhs: &Block) -> Block {
        use Block::*;
        match (self, rhs) {
            (Scalar(a), Scalar(b)) => Scalar(a * b),
            (Scalar(a), Diag(d)) | (Diag(d), Scalar(a)) => Diag(d.mapv(|v| v * a)),
            (Scalar(a), Dense(m)) | (Dense(m), Scalar(a)) => Dense(m.mapv(|v| v * a)),
            (Diag(a), Diag(b)) => Diag(a * b),
            (Diag(d), Dense(m)) => {
                let mut out = m.clone();
                for (mut row, s) in out.rows_mut().into_iter().zip(d.iter()) {
                    row.mapv_inplace(|v| v * s);
                }
                Dense(out)
            }
            (Dense(m), Diag(d)) => {
                let mut out = m.clone();
                for mut row in out.rows_mut() {
                    Zip::from(&mut row).and(d).for_each(|v, s| *v *= s);
                }
                Dense(out)
            }
            (Dense(a), Dense(b)) => Dense(a.dot(b)),
        }
    }

    pub fn add(&self, rhs: &Block, n: usize) -> Block {
        use Block::*;
        match (self, rhs) {
            (Scalar(a), Scalar(b)) => Scalar(a + b),
            (Scalar(a), Diag(d)) | (Diag(d), Scalar(a)) => Diag(d.mapv(|v| v + a)),
            (Diag(a), Diag(b)) => Diag(a + b),
            (Dense(m), other) | (other, Dense(m)) => {
                let mut out = m.clone();
                match other {
                    Scalar(c) => out.diag_mut().mapv_inplace(|v| v + c),
                    Diag(d) => Zip::from(out.diag_mut()).and(d).for_each(|v, s| *v += s),
                    Dense(b) => out += b,
                }
                let _ = n;
                Dense(out)
            }
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Block::Scalar(_))
    }

    /// Frobenius norm of `W^{1/2} B W^{-1/2}`.
    pub fn weighted_frobenius(&self, weights: &[f64]) -> f64 {
        match self {
            Block::Scalar(c) => c.norm() * (weights.len() as f64).sqrt(),
            Block::Diag(d) => d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            Block::Dense(m) => {
                let mut s = 0.0;
                for ((i, j), v) in m.indexed_iter() {
                    s += v.norm_sqr() * weights[i] / weights[j];
                }
                s.sqrt()
            }
        }
    }

    /// Operator-norm estimate of `W^{1/2} B W^{-1/2}`: exact for scalar and diagonal blocks,
    /// a few power iterations otherwise (a lower bound that converges from below).
    pub fn weighted_norm_estimate(&self, weights: &[f64], iterations: usize) -> f64 {
        match self {
            Block::Scalar(c) => c.norm(),
            Block::Diag(d) => d.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Block::Dense(m) => {
                let n = m.ncols();
                let sw: Array1<f64> = weights.iter().map(|w| w.sqrt()).collect();
                let mut x: Array1<C64> =
                    (0..n).map(|k| C64::new(1.0 + 0.1 * (k % 7) as f64, 0.05 * (k % 3) as f64)).collect();
                let mut est = 0.0;
                for _ in 0..iterations.max(1) {
                    let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    if nx == 0.0 {
                        return 0.0;
                    }
                    x.mapv_inplace(|v| v / nx);
                    // y = W^{1/2} M W^{-1/2} x
                    let xs: Array1<C64> = Zip::from(&x).and(&sw).map_collect(|v, s| v / s);
                    let y: Array1<C64> = Zip::from(&m.dot(&xs)).and(&sw).map_collect(|v, s| v * s);
                    est = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    // x = A^H y
                    let ys: Array1<C64> = Zip::from(&y).and(&sw).map_collect(|v, s| v * s);
                    let z = m.t().mapv(|v| v.conj()).dot(&ys);
                    x = Zip::from(&z).and(&sw).map_collect(|v, s| v / s);
                }
                est
            }
        }
    }
}

/// `B (x) I_n` or `I_n (x) B`, keeping scalar and diagonal structure.
pub fn embed_block(block: &Block, axis: usize, other: usize) -> Block {
    match block {
        Block::Scalar(c) => Block::Scalar(*c),
        Block::Diag(d) => {
            let n = d.len();
            let mut out = Array1::zeros(n * other);
            for i in 0..n {
                for j in 0..other {
                    if axis == 0 {
                        out[i * other + j] = d[i];
                    } else {
                        out[j * n + i] = d[i];
                    }
                }
            }
            Block::Diag(out)
        }
        Block::Dense(m) => {
            let eye = Array2::<C64>::eye(other);
            Block::Dense(if axis == 0 { ndarray::linalg::kron(m, &eye) } else { ndarray::linalg::kron(&eye, m) })
        }
    }
}
