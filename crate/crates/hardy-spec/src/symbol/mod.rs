//! Admissible symbols (bounded analytic, `Im psi >= eps > 0`), their boundary values,
//! cluster sets and essential ranges.

mod cloud;
mod expr;
mod limits;

pub use cloud::{PointCloud, DEDUP_RESOLUTION};
pub use expr::{parse, Expr};
pub use limits::{
    closure_image, cluster_set, essential_range_at_infinity, ClusterPlan, ClusterSet, ClusterTarget, EssentialRange,
    ShellDiagnostic, TailMode,
};

use crate::hardy::{cay, cay_inv, Axis, Discretization};
use crate::numeric::halton;
use crate::{Error, Result, BOUNDARY_HEIGHT, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuityClass {
    Constant,
    ContinuousOnClosure,
    SeparableSum,
}

/// Where the expression variables live.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolDomain {
    /// Variables in the upper half-plane.
    #[default]
    HalfPlane,
    /// Variables in the unit disc; the half-plane symbol is `psi(cay z1, cay z2)`.
    Disc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub expr: String,
    pub eps: f64,
    #[serde(default)]
    pub sup_bound: Option<f64>,
    pub class: ContinuityClass,
    #[serde(default)]
    pub domain: SymbolDomain,
}

impl SymbolSpec {
    pub fn new(expr: &str, eps: f64, class: ContinuityClass) -> Self {
        Self { expr: expr.to_string(), eps, sup_bound: None, class, domain: SymbolDomain::HalfPlane }
    }

    pub fn on_disc(mut self) -> Self {
        self.domain = SymbolDomain::Disc;
        self
    }
}

#[derive(Clone, Debug)]
pub struct AnalyticSymbol {
    expr: Expr,
    pub spec: SymbolSpec,
    /// `eps` with `Im psi >= eps` on every sampled point.
    pub im_lower_bound: f64,
    /// `M` with `|psi| <= M` on every sampled point.
    pub sup_bound: f64,
}

/// Number of points used by the construction spot-check.
pub const SPOT_CHECK_SAMPLES: usize = 10_000;

const SPOT_CHECK_SEED: u64 = 0x5eed_0f5b;

impl AnalyticSymbol {
    /// Value at a point of the native domain.
    pub fn eval_native(&self, z1: C64, z2: C64) -> C64 {
        self.expr.eval(z1, z2)
    }

    /// Value at a point of the upper half-plane squared.
    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        match self.spec.domain {
            SymbolDomain::HalfPlane => self.expr.eval(z1, z2),
            SymbolDomain::Disc => self.expr.eval(cay(z1), cay(z2)),
        }
    }

    /// Value at a point of the bidisc.
    pub fn eval_disc(&self, w1: C64, w2: C64) -> C64 {
        match self.spec.domain {
            SymbolDomain::Disc => self.expr.eval(w1, w2),
            SymbolDomain::HalfPlane => self.expr.eval(cay_inv(w1), cay_inv(w2)),
        }
    }

    /// Boundary value at real `(x1, x2)`, taken at height [`BOUNDARY_HEIGHT`].
    pub fn eval_real(&self, x1: f64, x2: f64) -> C64 {
        self.eval(C64::new(x1, BOUNDARY_HEIGHT), C64::new(x2, BOUNDARY_HEIGHT))
    }

    /// Which half-plane variables the symbol depends on.
    pub fn variables(&self) -> (bool, bool) {
        self.expr.variables()
    }

    pub fn class(&self) -> ContinuityClass {
        self.spec.class
    }

    pub fn source(&self) -> &str {
        &self.spec.expr
    }
}

/// Quasi-random points of the upper half-plane squared, stratified in height and extent:
/// a third uniform on the bidisc pulled back by the Cayley map, a third with
/// log-uniform heights and extents, a third on the boundary.
pub(crate) fn halfplane_samples(count: usize, seed: u64) -> Vec<(C64, C64)> {
    let pts = halton(count, 4, seed);
    pts.iter()
        .enumerate()
        .map(|(k, u)| match k % 3 {
            0 => {
                let w = |r: f64, a: f64| C64::from_polar(r.sqrt() * (1.0 - 1e-9), 2.0 * PI * a);
                (cay_inv(w(u[0], u[1])), cay_inv(w(u[2], u[3])))
            }
            1 => {
                let z = |a: f64, b: f64| {
                    let (sign, a) = if a < 0.5 { (1.0, 2.0 * a) } else { (-1.0, 2.0 * a - 1.0) };
                    C64::new(sign * 10f64.powf(-3.0 + 9.0 * a), 10f64.powf(-6.0 + 10.0 * b))
                };
                (z(u[0], u[1]), z(u[2], u[3]))
            }
            _ => {
                let z = |a: f64| C64::new((PI * (a - 0.5)).tan(), BOUNDARY_HEIGHT);
                (z(u[0]), z(u[2]))
            }
        })
        .collect()
}

/// Quasi-random points of the closed bidisc (a third on the torus).
pub(crate) fn disc_samples(count: usize, seed: u64) -> Vec<(C64, C64)> {
    let pts = halton(count, 4, seed);
    pts.iter()
        .enumerate()
        .map(|(k, u)| {
            let r = |a: f64| if k % 3 == 2 { 1.0 - BOUNDARY_HEIGHT } else { a.sqrt() * (1.0 - 1e-9) };
            (C64::from_polar(r(u[0]), 2.0 * PI * u[1]), C64::from_polar(r(u[2]), 2.0 * PI * u[3]))
        })
        .collect()
}

/// Parse and spot-check a symbol: `Im psi >= eps` and `|psi| <= M` on
/// [`SPOT_CHECK_SAMPLES`] quasi-random points.
pub fn make_symbol(spec: &SymbolSpec) -> Result<AnalyticSymbol> {
    if !(spec.eps > 0.0) {
        return Err(Error::Construction(format!("symbol '{}': eps must be positive (got {})", spec.expr, spec.eps)));
    }
    let expr = parse(&spec.expr)?;
    let sym = AnalyticSymbol { expr, spec: spec.clone(), im_lower_bound: spec.eps, sup_bound: f64::INFINITY };
    let samples = match spec.domain {
        SymbolDomain::HalfPlane => halfplane_samples(SPOT_CHECK_SAMPLES, SPOT_CHECK_SEED),
        SymbolDomain::Disc => disc_samples(SPOT_CHECK_SAMPLES, SPOT_CHECK_SEED),
    };
    let mut sup: f64 = 0.0;
    for (z1, z2) in samples {
        let v = sym.eval_native(z1, z2);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Construction(format!("symbol '{}' is not finite at ({z1}, {z2})", spec.expr)));
        }
        if v.im < spec.eps - 1e-9 {
            return Err(Error::Construction(format!(
                "symbol '{}' violates Im >= {} at ({z1}, {z2}): value {v}",
                spec.expr, spec.eps
            )));
        }
        sup = sup.max(v.norm());
    }
    let sup_bound = match spec.sup_bound {
        Some(m) if sup > m * (1.0 + 1e-12) => {
            return Err(Error::Construction(format!("symbol '{}' exceeds the bound {m} (sampled {sup})", spec.expr)))
        }
        Some(m) => m,
        None => sup,
    };
    Ok(AnalyticSymbol { sup_bound, ..sym })
}

/// Boundary values on a two-factor boundary grid (row-major), at height 1e-8.
/// Circle grids are evaluated on the bidisc just inside the torus.
pub fn eval_boundary(psi: &AnalyticSymbol, space: &Discretization) -> Result<Vec<C64>> {
    let points = |axis: &Axis| -> Result<Vec<C64>> {
        match axis {
            Axis::Boundary(g) => Ok(g.nodes.iter().map(|&x| C64::new(x, BOUNDARY_HEIGHT)).collect()),
            Axis::Circle(g) => {
                Ok(g.angles().iter().map(|&t| cay_inv(C64::from_polar(1.0 - BOUNDARY_HEIGHT, t))).collect())
            }
            _ => Err(Error::Usage("eval_boundary needs boundary grids".into())),
        }
    };
    let p1 = points(space.axis(0))?;
    let p2 = if space.is_two_dimensional() { points(space.axis(1))? } else { vec![C64::new(0.0, 1.0)] };
    let mut out = Vec::with_capacity(p1.len() * p2.len());
    for &a in &p1 {
        for &b in &p2 {
            out.push(psi.eval(a, b));
        }
    }
    Ok(out)
}

/// Catalogued symbols: constants, rational functions continuous on the closed
/// bidisc, and a finite separable sum.
pub fn catalog() -> Vec<(&'static str, SymbolSpec)> {
    use ContinuityClass::*;
    vec![
        ("const-i", SymbolSpec::new("i", 0.5, Constant)),
        ("const-2i", SymbolSpec::new("2i", 0.5, Constant)),
        ("const-tilted", SymbolSpec::new("0.5 + i", 0.5, Constant)),
        ("quarter-cay-z1", SymbolSpec::new("i + 0.25*cay(z1)", 0.5, ContinuousOnClosure)),
        ("quarter-cay-z2", SymbolSpec::new("i + 0.25*cay(z2)", 0.5, ContinuousOnClosure)),
        ("half-cay-z1", SymbolSpec::new("i + 0.5*cay(z1)", 0.5, ContinuousOnClosure)),
        ("half-cay-product", SymbolSpec::new("i + 0.5*cay(z1)*cay(z2)", 0.5, ContinuousOnClosure)),
        ("rational-z1", SymbolSpec::new("2i + 1/(z1 + i)", 0.5, ContinuousOnClosure)),
        ("separable-sum", SymbolSpec::new("i + 0.25*cay(z1) + 0.25*cay(z2)", 0.5, SeparableSum)),
        ("separable-constant-factors", SymbolSpec::new("(0.5)*(i) + (1)*(0.5i) + 0.25", 0.5, SeparableSum)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::BoundaryGrid;

    #[test]
    fn construction_examples() {
        assert!(make_symbol(&SymbolSpec::new("i", 0.5, ContinuityClass::Constant)).is_ok());
        assert!(make_symbol(&SymbolSpec::new("i + 0.5*cay(z1)", 0.5, ContinuityClass::ContinuousOnClosure)).is_ok());
        let e = make_symbol(&SymbolSpec::new("1", 0.5, ContinuityClass::Constant)).unwrap_err();
        assert!(matches!(e, Error::Construction(_)));
        assert!(make_symbol(&SymbolSpec::new("i", 0.0, ContinuityClass::Constant)).is_err());
        let mut capped = SymbolSpec::new("3i", 0.5, ContinuityClass::Constant);
        capped.sup_bound = Some(2.0);
        assert!(make_symbol(&capped).is_err());
    }

    #[test]
    fn catalog_symbols_are_admissible() {
        for (name, spec) in catalog() {
            let s = make_symbol(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(s.sup_bound.is_finite());
        }
    }

    #[test]
    fn boundary_values() {
        let psi = make_symbol(&SymbolSpec::new("i + 0.5*cay(z1)", 0.5, ContinuityClass::ContinuousOnClosure)).unwrap();
        let g = BoundaryGrid::uniform(10.0, 21).unwrap();
        let space = Discretization::boundary2(g.clone(), g);
        let field = eval_boundary(&psi, &space).unwrap();
        // x1 = 0 is row 10
        assert!((field[10 * 21] - C64::new(-0.5, 1.0)).norm() < 1e-7);
        for v in &field {
            assert!(v.im >= 0.5 - 1e-6);
        }
        let far = psi.eval_real(1e6, 0.0);
        assert!((far - C64::new(0.5, 1.0)).norm() < 1e-5);
        let c = make_symbol(&SymbolSpec::new("i", 0.5, ContinuityClass::Constant)).unwrap();
        assert!(eval_boundary(&c, &space).unwrap().iter().all(|v| *v == C64::i()));
    }

    #[test]
    fn disc_symbols_compose_with_cayley() {
        let d =
            make_symbol(&SymbolSpec::new("i + 0.25*z1", 0.5, ContinuityClass::ContinuousOnClosure).on_disc()).unwrap();
        let z = C64::new(0.3, 2.0);
        assert!((d.eval(z, z) - (C64::i() + 0.25 * cay(z))).norm() < 1e-15);
        let w = C64::new(0.1, -0.2);
        assert!((d.eval_disc(w, w) - (C64::i() + 0.25 * w)).norm() < 1e-15);
    }
}
