//! Frequency-side realisation of Toeplitz operators on the half-plane.
//!
//! A boundary symbol is expanded in powers of `cay(x)` by an FFT on the circle. Each
//! analytic power `cay^n - 1` has a causal kernel `-2 e^{-u} sum_{j<n} L_j(2u)`,
//! anti-analytic powers have the mirrored anti-causal kernel, and the value at infinity
//! is the constant part. The Wiener-Hopf operator is then discretized by the
//! trapezoid Nystrom rule `K(t_j - t_k) w_k + c delta_jk`.

use crate::hardy::{FrequencyGrid, FrequencyLayout};
use crate::numeric::{laguerre_functions, offset_angles, offset_coefficients, SignedCoefficients};
use crate::{Error, Result, C64};
use ndarray::Array2;

/// Relative size of the outermost Fourier coefficients above which a symbol is
/// considered unresolved (a jump or a non-decaying tail at infinity).
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Fourier coefficients of `g(theta) = symbol(-cot(theta/2))`.
pub fn symbol_coefficients(symbol: &(dyn Fn(f64) -> C64 + Sync), len: usize) -> Result<SignedCoefficients> {
    let samples: Vec<C64> = offset_angles(len).iter().map(|&t| symbol(-1.0 / (t / 2.0).tan())).collect();
    if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Usage("symbol is not finite on the boundary".into()));
    }
    let coef = offset_coefficients(&samples);
    let tail = coef.tail_ratio(len / 8);
    if tail > TAIL_TOLERANCE {
        return Err(Error::Usage(format!(
            "symbol does not settle to a constant at infinity on {len} circle nodes (tail ratio {tail:.2e})"
        )));
    }
    Ok(coef)
}

/// Causal and anti-causal tail sums `S_j = sum_{n>j} a_n`, `B_j = sum_{n>j} a_{-n}`.
fn tail_sums(coef: &SignedCoefficients) -> (Vec<C64>, Vec<C64>) {
    let top = coef.max_index();
    let scale = (-top..=top).map(|n| coef.get(n).norm()).fold(0.0, f64::max);
    let cut = 1e-16 * scale.max(1e-300);
    let mut last_pos = 0;
    let mut last_neg = 0;
    for n in 1..=top {
        if coef.get(n).norm() > cut {
            last_pos = n;
        }
        if coef.get(-n).norm() > cut {
            last_neg = n;
        }
    }
    let sums = |last: i64, sign: i64| -> Vec<C64> {
        let mut s = vec![C64::new(0.0, 0.0); last as usize];
        let mut acc = C64::new(0.0, 0.0);
        for j in (0..last).rev() {
            acc += coef.get(sign * (j + 1));
            s[j as usize] = acc;
        }
        s
    };
    (sums(last_pos, 1), sums(last_neg, -1))
}

fn laguerre_series(weights: &[C64], u: f64) -> C64 {
    if weights.is_empty() {
        return C64::new(0.0, 0.0);
    }
    let l = laguerre_functions(weights.len(), u);
    -2.0 * weights.iter().zip(&l).map(|(w, v)| w * v).sum::<C64>()
}

/// True when every coefficient except the constant one is negligible.
pub fn is_constant(coef: &SignedCoefficients) -> Option<C64> {
    let c0 = coef.get(0);
    let top = coef.max_index();
    let rest = (-top..=top).filter(|&n| n != 0).map(|n| coef.get(n).norm()).fold(0.0, f64::max);
    (rest <= 1e-14 * (1.0 + c0.norm())).then_some(c0)
}

/// Nystrom matrix of the Wiener-Hopf operator with the given symbol coefficients.
pub fn wiener_hopf_matrix(coef: &SignedCoefficients, grid: &FrequencyGrid) -> Result<Array2<C64>> {
    let (s, b) = tail_sums(coef);
    assemble(coef.value_at_one(), &s, &b, grid)
}

/// Wiener-Hopf matrix of the single power `cay(x)^n` (n may be negative).
pub fn mode_matrix(n: i64, grid: &FrequencyGrid) -> Result<Array2<C64>> {
    let ones = vec![C64::new(1.0, 0.0); n.unsigned_abs() as usize];
    let none: Vec<C64> = Vec::new();
    if n >= 0 {
        assemble(C64::new(1.0, 0.0), &ones, &none, grid)
    } else {
        assemble(C64::new(1.0, 0.0), &none, &ones, grid)
    }
}

fn assemble(c: C64, s: &[C64], b: &[C64], grid: &FrequencyGrid) -> Result<Array2<C64>> {
    let h = match grid.layout {
        FrequencyLayout::Uniform => grid.extent / (grid.len() - 1) as f64,
        _ => return Err(Error::Usage("Wiener-Hopf discretization needs a uniform frequency grid".into())),
    };
    let n = grid.len();
    let kplus: Vec<C64> = (0..n).map(|d| laguerre_series(s, d as f64 * h)).collect();
    let kminus: Vec<C64> = (0..n).map(|d| laguerre_series(b, d as f64 * h)).collect();
    let k0 = 0.5 * (kplus[0] + kminus[0]);
    let w = &grid.weights;
    Ok(Array2::from_shape_fn((n, n), |(j, k)| {
        if j > k {
            kplus[j - k] * w[k]
        } else if j < k {
            kminus[k - j] * w[k]
        } else {
            k0 * w[k] + c
        }
    }))
}

/// Disc shift power: `entries[j][k] = 1` when `j - k = n`.
pub fn shift_matrix(n: i64, size: usize) -> Array2<C64> {
    Array2::from_shape_fn(
        (size, size),
        |(j, k)| {
            if j as i64 - k as i64 == n {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    )
}

/// Finite section of the disc Toeplitz matrix, `entries[j][k] = a_{j-k}`.
pub fn toeplitz_from_coefficients(coef: &SignedCoefficients, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(j, k)| coef.get(j as i64 - k as i64))
}
