use crate::numeric::golden_section;
use crate::symbol::PointCloud;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Minimize `max_K |i alpha - z| / alpha`.
    Minimize,
    /// Smallest alpha reaching the given delta.
    TargetDelta(f64),
}

/// `max_{z in K} |i alpha - z| / alpha`.
pub fn delta_of(points: &[C64], alpha: f64) -> f64 {
    points.iter().map(|z| (C64::new(0.0, alpha) - z).norm() / alpha).fold(0.0, f64::max)
}

/// Alpha selection for a compact set in the upper half-plane. Returns `(alpha, delta)`.
pub fn choose_alpha(k: &PointCloud, mode: AlphaMode) -> Result<(f64, f64)> {
    let pts = &k.points;
    if pts.is_empty() {
        return Err(Error::Usage("alpha selection needs a nonempty set".into()));
    }
    if let Some(z) = pts.iter().find(|z| !(z.im > 0.0)) {
        return Err(Error::Domain(format!("point {z} is not in the upper half-plane")));
    }
    let min_im = pts.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
    let max_abs = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match mode {
        AlphaMode::Minimize => {
            let lo = (min_im / 2.0).ln();
            let hi = (4.0 * max_abs * max_abs / min_im).ln();
            let (la, _) = golden_section(|la| delta_of(pts, la.exp()), lo, hi, 1e-12);
            let alpha = la.exp();
            Ok((alpha, delta_of(pts, alpha)))
        }
        AlphaMode::TargetDelta(target) => {
            if !(target > 0.0 && target < 1.0) {
                return Err(Error::Usage(format!("target delta must lie in (0, 1) (got {target})")));
            }
            // In u = 1/alpha each |i alpha - z|^2 / alpha^2 = |z|^2 u^2 - 2 y u + 1 is a convex
            // quadratic, so the admissible u form an interval; the smallest alpha is 1 / u_max.
            let mut u_lo: f64 = 0.0;
            let mut u_hi = f64::INFINITY;
            for z in pts {
                let r2 = z.norm_sqr();
                let disc = z.im * z.im - r2 * (1.0 - target * target);
                if disc < 0.0 {
                    return Err(Error::Certification(format!("no alpha brings {z} within delta {target}")));
                }
                let s = disc.sqrt();
                u_lo = u_lo.max((z.im - s) / r2);
                u_hi = u_hi.min((z.im + s) / r2);
            }
            if u_lo > u_hi {
                return Err(Error::Certification(format!("no alpha reaches delta {target} on this set")));
            }
            let alpha = 1.0 / u_hi;
            Ok((alpha, delta_of(pts, alpha)))
        }
    }
}
