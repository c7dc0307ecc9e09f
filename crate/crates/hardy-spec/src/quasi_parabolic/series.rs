use super::plan::SeriesPlan;
use super::{vartheta, QuasiParabolicMap};
use crate::hardy::Discretization;
use crate::operator::{embed_block, Block, FrequencyModel, OperatorMatrix};
use crate::{Error, Result, C64};
use ndarray::Array1;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Consecutive non-decreasing terms above the theoretical envelope that count as divergence.
const DIVERGENCE_RUN: usize = 5;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    /// Weighted norm estimates of the terms `T^n D_n`, one list per axis
    /// (a single list of the `n`-sums on the general path).
    pub term_norms: Vec<Vec<f64>>,
    /// `max_j || toeplitz(tau_j^2) - T_{tau_j}^2 ||`, when some `T_{tau_j}` is not scalar.
    pub toeplitz_power_gap: Option<f64>,
    pub separable: bool,
    pub dilation: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct SeriesOutput {
    pub block: Block,
    pub space: Arc<Discretization>,
    pub plan: SeriesPlan,
    pub diagnostics: SeriesDiagnostics,
}

impl SeriesOutput {
    pub fn matrix(&self) -> OperatorMatrix {
        OperatorMatrix::from_block(self.block.clone(), self.space.clone())
    }
}

enum Parts {
    /// `terms[j][n] = T_j^n D_{j,n}` on axis `j`.
    Separable { terms: [Vec<Block>; 2] },
    /// Two-variable Toeplitz factors and embedded multipliers.
    General { t1: Block, t2: Block, d1: Vec<Block>, d2: Vec<Block> },
}

/// Precomputed factors of the series; partial sums of any order up to `max_order`.
pub struct SeriesBuilder {
    model: FrequencyModel,
    plan: SeriesPlan,
    parts: Parts,
    dilation: Block,
    diagnostics: SeriesDiagnostics,
    max_order: usize,
}

fn kron_blocks(a: &Block, na: usize, b: &Block, nb: usize) -> Block {
    match (a, b) {
        (Block::Scalar(x), Block::Scalar(y)) => Block::Scalar(x * y),
        (Block::Scalar(_) | Block::Diag(_), Block::Scalar(_) | Block::Diag(_)) => {
            let da = diag_of(a, na);
            let db = diag_of(b, nb);
            let mut out = Array1::zeros(na * nb);
            for i in 0..na {
                for j in 0..nb {
                    out[i * nb + j] = da[i] * db[j];
                }
            }
            Block::Diag(out)
        }
        _ => Block::Dense(ndarray::linalg::kron(&a.to_dense(na), &b.to_dense(nb))),
    }
}

fn diag_of(b: &Block, n: usize) -> Array1<C64> {
    match b {
        Block::Scalar(c) => Array1::from_elem(n, *c),
        Block::Diag(d) => d.clone(),
        Block::Dense(m) => m.diag().to_owned(),
    }
}

fn power_gap(t: &Block, t_sq: &Block, n: usize, weights: &[f64]) -> f64 {
    let diff = t_sq.add(&t.mul(t).mul(&Block::Scalar(C64::new(-1.0, 0.0))), n);
    match diff {
        Block::Dense(_) => diff.weighted_norm_estimate(weights, 40),
        other => other.weighted_norm_estimate(weights, 1),
    }
}

fn check_divergence(norms: &[f64], delta: f64) -> Result<()> {
    let scale = 1.5 * norms.first().copied().unwrap_or(1.0).max(1.0) / (1.0 - delta);
    let mut run = 0;
    for n in 1..norms.len() {
        let envelope = scale * delta.powi(n as i32);
        if norms[n] >= norms[n - 1] && norms[n] > envelope {
            run += 1;
            if run >= DIVERGENCE_RUN {
                return Err(Error::Divergence(format!(
                    "series terms stopped decaying at order {n} (term norm {:.3e}, envelope {envelope:.3e})",
                    norms[n]
                )));
            }
        } else {
            run = 0;
        }
    }
    Ok(())
}

impl SeriesBuilder {
    pub fn new(map: &QuasiParabolicMap, plan: &SeriesPlan, model: &FrequencyModel, max_order: usize) -> Result<Self> {
        if !(plan.delta < 1.0) {
            return Err(Error::Certification(format!("delta = {} >= 1; refusing to build the series", plan.delta)));
        }
        if model.axis_count() != 2 {
            return Err(Error::Usage("the composition series needs a two-axis frequency model".into()));
        }
        let max_order = max_order.max(plan.n1).max(plan.n2);
        let alpha = plan.alpha;
        let ia = C64::new(0.0, alpha);
        let lens = [model.axis_len(0), model.axis_len(1)];
        let weights = [model.axis_weights(0), model.axis_weights(1)];
        let multipliers = |j: usize| -> Result<Vec<Block>> {
            (0..=max_order).map(|n| model.multiplier_axis(&vartheta(n, alpha), alpha, j)).collect()
        };
        let mut diagnostics = SeriesDiagnostics { separable: map.is_separable(), ..Default::default() };
        let parts = if map.is_separable() {
            let (p1, p2) = (map.p1, map.p2);
            let tau1 = move |x: f64| ia - map.psi1.eval_real(x / p1, 0.0);
            let tau2 = move |x: f64| ia - map.psi2.eval_real(0.0, x / p2);
            let taus: [&(dyn Fn(f64) -> C64 + Sync); 2] = [&tau1, &tau2];
            let mut terms: [Vec<Block>; 2] = [Vec::new(), Vec::new()];
            let mut gap: Option<f64> = None;
            for j in 0..2 {
                let t = model.toeplitz_axis(taus[j], j)?;
                if !t.is_scalar() {
                    let tau_sq = |x: f64| taus[j](x).powi(2);
                    let t_sq = model.toeplitz_axis(&tau_sq, j)?;
                    let g = power_gap(&t, &t_sq, lens[j], &weights[j]);
                    gap = Some(gap.map_or(g, |v: f64| v.max(g)));
                }
                let d = multipliers(j)?;
                let mut power = Block::identity();
                let mut norms = Vec::with_capacity(d.len());
                for (n, dn) in d.iter().enumerate() {
                    if n > 0 {
                        power = t.mul(&power);
                    }
                    let term = power.mul(dn);
                    norms.push(term.weighted_norm_estimate(&weights[j], 20));
                    terms[j].push(term);
                }
                check_divergence(&norms, plan.delta)?;
                diagnostics.term_norms.push(norms);
            }
            diagnostics.toeplitz_power_gap = gap;
            Parts::Separable { terms }
        } else {
            let tau = |j: usize| {
                move |x1: f64, x2: f64| {
                    ia - map.rescaled(j, C64::new(x1, crate::BOUNDARY_HEIGHT), C64::new(x2, crate::BOUNDARY_HEIGHT))
                }
            };
            let (tau1, tau2) = (tau(0), tau(1));
            let t1 = model.toeplitz(&tau1)?;
            let t2 = model.toeplitz(&tau2)?;
            let n = lens[0] * lens[1];
            let w2d: Vec<f64> = weights[0].iter().flat_map(|a| weights[1].iter().map(move |b| a * b)).collect();
            let mut gap: Option<f64> = None;
            for (t, tau) in [(&t1, &tau1), (&t2, &tau2)] {
                if !t.is_scalar() {
                    let t_sq = model.toeplitz(&|a, b| tau(a, b).powi(2))?;
                    let g = power_gap(t, &t_sq, n, &w2d);
                    gap = Some(gap.map_or(g, |v: f64| v.max(g)));
                }
            }
            diagnostics.toeplitz_power_gap = gap;
            let d1 = multipliers(0)?.iter().map(|b| embed_block(b, 0, lens[1])).collect();
            let d2 = multipliers(1)?.iter().map(|b| embed_block(b, 1, lens[0])).collect();
            Parts::General { t1, t2, d1, d2 }
        };
        let dilation = if map.has_dilation() {
            diagnostics.dilation = Some((map.p1, map.p2));
            let v1 = model.dilation_axis(1.0 / map.p1, 0)?;
            let v2 = model.dilation_axis(1.0 / map.p2, 1)?;
            kron_blocks(&v1, lens[0], &v2, lens[1])
        } else {
            Block::identity()
        };
        let mut builder = Self { model: model.clone(), plan: plan.clone(), parts, dilation, diagnostics, max_order };
        if let Parts::General { .. } = builder.parts {
            let norms = builder.general_term_norms(plan.n1.max(plan.n2))?;
            check_divergence(&norms, plan.delta)?;
            builder.diagnostics.term_norms.push(norms);
        }
        Ok(builder)
    }

    fn dim(&self) -> usize {
        self.model.axis_len(0) * self.model.axis_len(1)
    }

    fn weights(&self) -> Vec<f64> {
        self.model.space().weights()
    }

    /// Norms of `T1^n Q D_{1,n}` with `Q` the full `m`-sum up to `order`.
    fn general_term_norms(&self, order: usize) -> Result<Vec<f64>> {
        let Parts::General { t1, d1, .. } = &self.parts else { return Ok(Vec::new()) };
        let q = self.inner_sum(order);
        let w = self.weights();
        let mut p = q;
        let mut out = Vec::new();
        for (n, d) in d1.iter().enumerate().take(order + 1) {
            if n > 0 {
                p = t1.mul(&p);
            }
            out.push(p.mul(d).weighted_norm_estimate(&w, 20));
        }
        Ok(out)
    }

    fn inner_sum(&self, n2: usize) -> Block {
        let Parts::General { t2, d2, .. } = &self.parts else { unreachable!() };
        let dim = self.dim();
        let mut power = Block::identity();
        let mut q = Block::zero();
        for (m, dm) in d2.iter().enumerate().take(n2 + 1) {
            if m > 0 {
                power = t2.mul(&power);
            }
            q = q.add(&power.mul(dm), dim);
        }
        q
    }

    /// `S_{n1, n2}` without the dilation.
    pub fn partial_sum(&self, n1: usize, n2: usize) -> Result<Block> {
        if n1 > self.max_order || n2 > self.max_order {
            return Err(Error::Usage(format!("partial sum beyond the prepared order {}", self.max_order)));
        }
        match &self.parts {
            Parts::Separable { terms } => {
                let sum = |j: usize, n: usize| {
                    let len = self.model.axis_len(j);
                    terms[j].iter().take(n + 1).fold(Block::zero(), |acc, t| acc.add(t, len))
                };
                Ok(kron_blocks(&sum(0, n1), self.model.axis_len(0), &sum(1, n2), self.model.axis_len(1)))
            }
            Parts::General { t1, d1, .. } => {
                let dim = self.dim();
                let q = self.inner_sum(n2);
                let mut p = q;
                let mut s = Block::zero();
                for (n, dn) in d1.iter().enumerate().take(n1 + 1) {
                    if n > 0 {
                        p = t1.mul(&p);
                    }
                    s = s.add(&p.mul(dn), dim);
                }
                Ok(s)
            }
        }
    }

    /// `S_{n, n} - S_{n-1, n-1}` (the L-shaped shell of terms with `max(n1, n2) = n`).
    pub fn shell(&self, n: usize) -> Result<Block> {
        if n == 0 {
            return self.partial_sum(0, 0);
        }
        match &self.parts {
            Parts::Separable { terms } => {
                let (l1, l2) = (self.model.axis_len(0), self.model.axis_len(1));
                let sum = |j: usize, k: usize, len: usize| {
                    terms[j].iter().take(k + 1).fold(Block::zero(), |acc, t| acc.add(t, len))
                };
                if n > self.max_order {
                    return Err(Error::Usage(format!("shell beyond the prepared order {}", self.max_order)));
                }
                // a_n (x) B_n + A_{n-1} (x) b_n
                let left = kron_blocks(&terms[0][n], l1, &sum(1, n, l2), l2);
                let right = kron_blocks(&sum(0, n - 1, l1), l1, &terms[1][n], l2);
                Ok(left.add(&right, l1 * l2))
            }
            Parts::General { .. } => {
                let hi = self.partial_sum(n, n)?;
                let lo = self.partial_sum(n - 1, n - 1)?;
                Ok(hi.add(&lo.mul(&Block::Scalar(C64::new(-1.0, 0.0))), self.dim()))
            }
        }
    }

    /// `V S_{n1, n2}`.
    pub fn operator(&self, n1: usize, n2: usize) -> Result<Block> {
        Ok(self.dilation.mul(&self.partial_sum(n1, n2)?))
    }

    pub fn finish(self) -> Result<SeriesOutput> {
        let block = self.operator(self.plan.n1, self.plan.n2)?;
        Ok(SeriesOutput { block, space: self.model.space(), plan: self.plan, diagnostics: self.diagnostics })
    }

    pub fn diagnostics(&self) -> &SeriesDiagnostics {
        &self.diagnostics
    }

    pub fn space(&self) -> Arc<Discretization> {
        self.model.space()
    }
}

/// `V_{1/p} sum_{n <= N1, m <= N2} T_{tau1}^n T_{tau2}^m D_{1,n} D_{2,m}` for the rescaled
/// `tau_j = i alpha - psi_j(z1/p1, z2/p2)`.
pub fn build_series(map: &QuasiParabolicMap, plan: &SeriesPlan, model: &FrequencyModel) -> Result<SeriesOutput> {
    SeriesBuilder::new(map, plan, model, 0)?.finish()
}
