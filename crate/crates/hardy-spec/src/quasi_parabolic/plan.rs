use super::alpha::{choose_alpha, AlphaMode};
use super::QuasiParabolicMap;
use crate::symbol::{closure_image, PointCloud};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Truncation orders are capped here.
pub const MAX_ORDER: usize = 60;

/// Norm estimates entering the remainder bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimates {
    pub t_tau1: f64,
    pub t_tau2: f64,
    pub c_phi1: f64,
    pub c_phi2: f64,
    pub c_phi: f64,
    /// Norm of the dilation applied on the left (1 without dilation).
    #[serde(default = "one")]
    pub dilation: f64,
}

fn one() -> f64 {
    1.0
}

impl NormEstimates {
    pub fn unit() -> Self {
        Self { t_tau1: 1.0, t_tau2: 1.0, c_phi1: 1.0, c_phi2: 1.0, c_phi: 1.0, dilation: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPlan {
    pub alpha: f64,
    pub delta: f64,
    pub n1: usize,
    pub n2: usize,
    pub remainder_bound: f64,
    pub norm_estimates: Option<NormEstimates>,
}

impl SeriesPlan {
    /// A plan with the given parameters and its bound filled in.
    pub fn new(alpha: f64, delta: f64, n1: usize, n2: usize, norms: Option<NormEstimates>) -> Self {
        let mut plan = Self { alpha, delta, n1, n2, remainder_bound: f64::NAN, norm_estimates: norms };
        if let Ok(b) = remainder_bound(&plan) {
            plan.remainder_bound = b;
        }
        plan
    }

    pub fn with_orders(&self, n1: usize, n2: usize) -> Self {
        Self::new(self.alpha, self.delta, n1, n2, self.norm_estimates)
    }
}

/// `dil * (c1 d^{N1+1}/(1-d) + c2 d^{N2+1}/(1-d) + t1 t2 c d^{N1+N2})`.
pub fn remainder_bound(plan: &SeriesPlan) -> Result<f64> {
    let n = plan.norm_estimates.ok_or_else(|| Error::Usage("plan has no norm estimates".into()))?;
    let d = plan.delta;
    if !(0.0..1.0).contains(&d) {
        return Err(Error::Certification(format!("delta = {d} is not in [0, 1)")));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let geo = |k: usize| d.powi(k as i32);
    let r1 = n.c_phi1 * geo(plan.n1 + 1) / (1.0 - d);
    let r2 = n.c_phi2 * geo(plan.n2 + 1) / (1.0 - d);
    let r12 = n.t_tau1 * n.t_tau2 * n.c_phi * geo(plan.n1 + plan.n2);
    Ok(n.dilation * (r1 + r2 + r12))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Samples per symbol for the closure image.
    pub samples: usize,
    pub seed: u64,
    /// Safety margin added to the sampled distances.
    pub margin: f64,
    /// Target remainder used to choose the orders.
    pub tol: f64,
    pub max_order: usize,
    pub alpha_mode: AlphaMode,
    pub alpha: Option<f64>,
    pub orders: Option<(usize, usize)>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            samples: 4000,
            seed: 7,
            margin: 1e-3,
            tol: 1e-6,
            max_order: MAX_ORDER,
            alpha_mode: AlphaMode::Minimize,
            alpha: None,
            orders: None,
        }
    }
}

fn default_order(delta: f64, tol: f64, cap: usize) -> usize {
    if delta <= 0.0 {
        return 0;
    }
    let n = ((tol * (1.0 - delta)).ln() / delta.ln()).ceil();
    (n.max(0.0) as usize).min(cap)
}

/// Alpha, delta, orders and remainder certificate for the series of `map`.
pub fn plan_series(map: &QuasiParabolicMap, opts: &PlanOptions) -> Result<SeriesPlan> {
    let k1 = closure_image(&map.psi1, opts.samples, opts.seed)?;
    let k2 = closure_image(&map.psi2, opts.samples, opts.seed.wrapping_add(1))?;
    let k = k1.union(&k2, "closure images");
    let alpha = match opts.alpha {
        Some(a) if a > 0.0 => a,
        Some(a) => return Err(Error::Usage(format!("alpha must be positive (got {a})"))),
        None => choose_alpha(&k, opts.alpha_mode)?.0,
    };
    let reach = |c: &PointCloud| c.points.iter().map(|z| (C64::new(0.0, alpha) - z).norm()).fold(0.0, f64::max);
    let delta = (reach(&k) + opts.margin) / alpha;
    if delta >= 1.0 {
        return Err(Error::Certification(format!(
            "alpha = {alpha:.6} gives delta = {delta:.6} >= 1; the series is not certified"
        )));
    }
    let (n1, n2) = opts.orders.unwrap_or_else(|| {
        let n = default_order(delta, opts.tol, opts.max_order);
        (n, n)
    });
    let norms = NormEstimates {
        t_tau1: reach(&k1) + opts.margin,
        t_tau2: reach(&k2) + opts.margin,
        c_phi1: 1.0 / (1.0 - delta),
        c_phi2: 1.0 / (1.0 - delta),
        c_phi: 1.0 / ((1.0 - delta) * (1.0 - delta)),
        dilation: 1.0 / (map.p1 * map.p2).sqrt(),
    };
    Ok(SeriesPlan::new(alpha, delta, n1, n2, Some(norms)))
}
