//! Small numerical kernels shared by the modules: Laguerre functions and
//! Gauss-Laguerre rules, circle Fourier coefficients, interpolation weights,
//! low-discrepancy points and a golden-section minimizer.

use crate::{Error, Result, C64};
use ndarray::{Array1, Array2};
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// `L_n(x) * exp(-shift)` for n = 0..count, computed by the three-term recurrence
/// with running rescaling so large `x` neither overflows nor underflows early.
pub fn laguerre_scaled(count: usize, x: f64, shift: f64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    let mut log_scale = -shift;
    let mut prev = 1.0;
    out[0] = log_scale.exp();
    if count == 1 {
        return out;
    }
    let mut cur = 1.0 - x;
    out[1] = cur * log_scale.exp();
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > 1e200 {
            prev *= 1e-200;
            cur *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
        out[n + 1] = cur * log_scale.exp();
    }
    out
}

/// Laguerre functions `l_n(t) = L_n(2t) e^{-t}`, n = 0..count. They are orthogonal on
/// [0, inf) with `int l_n l_m dt = delta_nm / 2` and bounded by 1.
pub fn laguerre_functions(count: usize, t: f64) -> Vec<f64> {
    laguerre_scaled(count, 2.0 * t, t)
}

/// Gauss-Laguerre rule for weight `e^{-s}` on [0, inf).
///
/// Returns nodes and *modified* weights `w_q e^{s_q}`, so that
/// `int_0^inf g(s) ds ~ sum_q W_q g(s_q)` with full relative accuracy even where
/// the classical weights underflow.
pub fn gauss_laguerre(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    use ndarray_linalg::{Eigh, UPLO};
    if q == 0 {
        return Err(Error::Usage("Gauss-Laguerre rule needs at least one node".into()));
    }
    let mut jac = Array2::<f64>::zeros((q, q));
    for k in 0..q {
        jac[[k, k]] = 2.0 * k as f64 + 1.0;
        if k + 1 < q {
            jac[[k, k + 1]] = (k + 1) as f64;
            jac[[k + 1, k]] = (k + 1) as f64;
        }
    }
    let (eig, _) = jac.eigh(UPLO::Lower)?;
    let mut nodes: Vec<f64> = eig.to_vec();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let qf = q as f64;
    let mut weights = Vec::with_capacity(q);
    for x in nodes.iter_mut() {
        // Newton polish on L_q using the scaled recurrence (scale cancels in the ratio)
        for _ in 0..3 {
            let l = laguerre_scaled(q + 1, *x, 0.5 * *x);
            let (lq, lq1) = (l[q], l[q - 1]);
            let deriv = qf * (lq - lq1) / *x;
            if deriv != 0.0 && deriv.is_finite() {
                let step = lq / deriv;
                if step.is_finite() && step.abs() < 0.1 * x.abs().max(1e-3) {
                    *x -= step;
                }
            }
        }
        let l = laguerre_scaled(q + 2, *x, 0.5 * *x);
        let lnext = l[q + 1];
        weights.push(*x / ((qf + 1.0) * (qf + 1.0) * lnext * lnext));
    }
    Ok((nodes, weights))
}

/// Signed Fourier coefficients on the circle, index `n` in `-len/2 .. len/2`.
#[derive(Clone, Debug)]
pub struct SignedCoefficients {
    data: Vec<C64>,
}

impl SignedCoefficients {
    pub fn from_fft_order(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn max_index(&self) -> i64 {
        (self.data.len() / 2) as i64 - 1
    }

    pub fn get(&self, n: i64) -> C64 {
        let len = self.data.len() as i64;
        if n > self.max_index() || n < -(len / 2) {
            return C64::new(0.0, 0.0);
        }
        self.data[n.rem_euclid(len) as usize]
    }

    /// Sum of all coefficients: the value of the function at theta = 0.
    pub fn value_at_one(&self) -> C64 {
        self.data.iter().sum()
    }

    /// Largest coefficient modulus among |n| >= len/2 - guard, relative to the largest overall.
    pub fn tail_ratio(&self, guard: usize) -> f64 {
        let len = self.data.len() as i64;
        let top = self.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        let lo = len / 2 - guard as i64;
        let mut tail: f64 = 0.0;
        for n in -(len / 2)..=(len / 2 - 1) {
            if n.abs() >= lo {
                tail = tail.max(self.get(n).norm());
            }
        }
        tail / top
    }
}

/// Nodes of the half-offset circle grid `theta_k = 2 pi (k + 1/2) / len`.
pub fn offset_angles(len: usize) -> Vec<f64> {
    (0..len).map(|k| 2.0 * PI * (k as f64 + 0.5) / len as f64).collect()
}

/// Fourier coefficients of samples taken at `offset_angles(len)`.
pub fn offset_coefficients(samples: &[C64]) -> SignedCoefficients {
    let len = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let l = len as i64;
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (m, v) in buf.into_iter().enumerate() {
        let n = if (m as i64) < l / 2 { m as i64 } else { m as i64 - l };
        let phase = C64::from_polar(1.0, -PI * n as f64 / len as f64);
        out[m] = v * phase / len as f64;
    }
    SignedCoefficients::from_fft_order(out)
}

/// Two-dimensional version: `samples` is row-major `len x len` on the offset torus grid.
/// Returns coefficients `a[(n mod len, m mod len)]`.
pub fn offset_coefficients_2d(samples: &Array2<C64>) -> Array2<C64> {
    let (r, c) = samples.dim();
    let mut planner = FftPlanner::new();
    let fr = planner.plan_fft_forward(c);
    let fc = planner.plan_fft_forward(r);
    let mut work = samples.clone();
    for mut row in work.rows_mut() {
        let mut buf = row.to_vec();
        fr.process(&mut buf);
        row.assign(&Array1::from(buf));
    }
    for mut col in work.columns_mut() {
        let mut buf = col.to_vec();
        fc.process(&mut buf);
        col.assign(&Array1::from(buf));
    }
    let signed = |m: usize, len: usize| -> f64 {
        if m < len / 2 {
            m as f64
        } else {
            m as f64 - len as f64
        }
    };
    let scale = (r * c) as f64;
    for ((i, j), v) in work.indexed_iter_mut() {
        let phase = C64::from_polar(1.0, -PI * (signed(i, r) / r as f64 + signed(j, c) / c as f64));
        *v = *v * phase / scale;
    }
    work
}

/// Signed index lookup into an fft-ordered 2-D coefficient array.
pub fn coeff_2d(a: &Array2<C64>, n: i64, m: i64) -> C64 {
    let (r, c) = a.dim();
    let (r, c) = (r as i64, c as i64);
    if n >= r / 2 || n < -(r / 2) || m >= c / 2 || m < -(c / 2) {
        return C64::new(0.0, 0.0);
    }
    a[[n.rem_euclid(r) as usize, m.rem_euclid(c) as usize]]
}

/// Four-point Lagrange weights for interpolating uniform samples `y_k = f(k h)`,
/// k = 0..n, at position `x`. Positions outside [0, n h] are clamped to the ends.
/// Linear in the data, so it can be assembled into a matrix.
pub fn cubic_weights(n_nodes: usize, h: f64, x: f64) -> Vec<(usize, f64)> {
    if n_nodes == 1 {
        return vec![(0, 1.0)];
    }
    let last = (n_nodes - 1) as f64;
    let s = (x / h).clamp(0.0, last);
    if n_nodes < 4 {
        let k = (s.floor() as usize).min(n_nodes - 2);
        let f = s - k as f64;
        return vec![(k, 1.0 - f), (k + 1, f)];
    }
    let k = (s.floor() as usize).min(n_nodes - 2);
    let start = k.saturating_sub(1).min(n_nodes - 4);
    let mut out = Vec::with_capacity(4);
    for a in 0..4 {
        let ia = start + a;
        let mut w = 1.0;
        for b in 0..4 {
            if b != a {
                let ib = (start + b) as f64;
                w *= (s - ib) / (ia as f64 - ib);
            }
        }
        out.push((ia, w));
    }
    out
}

/// Radical inverse of `index` in base `base` (Halton coordinate).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Halton points in `[0,1)^dim` with a seeded Cranley-Patterson rotation.
pub fn halton(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    assert!(dim <= PRIMES.len());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|k| (0..dim).map(|d| (radical_inverse(k as u64 + 1, PRIMES[d]) + shift[d]).fract()).collect())
        .collect()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `ln(n!)` by direct summation (n stays small here).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_matches_closed_forms() {
        let x = 0.7;
        let l = laguerre_scaled(4, x, 0.0);
        assert!((l[2] - (x * x - 4.0 * x + 2.0) / 2.0).abs() < 1e-14);
        assert!((l[3] - (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn laguerre_functions_stay_bounded_far_out() {
        for &t in &[50.0, 300.0, 900.0] {
            for v in laguerre_functions(80, t) {
                assert!(v.is_finite() && v.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn gauss_laguerre_integrates_polynomials() {
        let (s, w) = gauss_laguerre(40).unwrap();
        // int s^k e^{-s} ds = k!
        for k in [0usize, 1, 5, 20, 60] {
            let approx: f64 = s.iter().zip(&w).map(|(x, wm)| wm * x.powi(k as i32) * (-x).exp()).sum();
            let exact = ln_factorial(k).exp();
            assert!((approx / exact - 1.0).abs() < 1e-10, "k={k} {approx} {exact}");
        }
    }

    #[test]
    fn offset_coefficients_recover_modes() {
        let th = offset_angles(16);
        let s: Vec<C64> = th
            .iter()
            .map(|&t| C64::new(2.0, 0.0) + C64::from_polar(1.0, t) * 3.0 + C64::from_polar(1.0, -2.0 * t) * C64::i())
            .collect();
        let c = offset_coefficients(&s);
        assert!((c.get(0) - 2.0).norm() < 1e-13);
        assert!((c.get(1) - 3.0).norm() < 1e-13);
        assert!((c.get(-2) - C64::i()).norm() < 1e-13);
        assert!(c.get(3).norm() < 1e-13);
    }

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let h = 0.3;
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        for &x in &[0.0, 0.1, 0.77, 2.4, 2.7] {
            let v: f64 = cubic_weights(10, h, x).iter().map(|&(k, w)| w * f(k as f64 * h)).sum();
            assert!((v - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3) * (x - 1.3) + 2.0, -4.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6 && (fx - 2.0).abs() < 1e-12);
    }
}
