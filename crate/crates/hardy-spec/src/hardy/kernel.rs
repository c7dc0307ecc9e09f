use super::space::{Axis, Discretization, HardyVector};
use crate::{Error, Result, C64};
use ndarray::Array1;
use std::f64::consts::PI;
use std::sync::Arc;

/// One-variable Szego kernel `1/(2 pi i (conj(w) - z))`.
pub fn kernel_value_1d(w: C64, z: C64) -> C64 {
    1.0 / (C64::new(0.0, 2.0 * PI) * (w.conj() - z))
}

/// `k_w(z) = 1/((2 pi i)^2 (conj(w1) - z1)(conj(w2) - z2))`, normalized so that
/// `<f, k_w> = f(w)` under the plain Lebesgue pairing on the boundary.
pub fn kernel_value(w: (C64, C64), z: (C64, C64)) -> C64 {
    kernel_value_1d(w.0, z.0) * kernel_value_1d(w.1, z.1)
}

/// `||k_w||^2 = k_w(w) = 1/(16 pi^2 Im w1 Im w2)`.
pub fn kernel_norm_squared(w: (C64, C64)) -> f64 {
    1.0 / (16.0 * PI * PI * w.0.im * w.1.im)
}

fn check_point(w: C64) -> Result<()> {
    if !(w.im > 0.0) || !w.re.is_finite() {
        return Err(Error::Domain(format!("kernel point {w} must lie in the open upper half-plane")));
    }
    Ok(())
}

/// Samples of the reproducing kernel at `w` on a boundary discretization
/// (one point per axis).
pub fn reproducing_kernel(w: &[C64], space: Arc<Discretization>) -> Result<HardyVector> {
    if w.len() != space.axes().len() {
        return Err(Error::Usage(format!(
            "kernel point has {} coordinates, grid has {} axes",
            w.len(),
            space.axes().len()
        )));
    }
    for &c in w {
        check_point(c)?;
    }
    let mut factors = Vec::new();
    for (axis, &wk) in space.axes().iter().zip(w) {
        let Axis::Boundary(g) = axis else {
            return Err(Error::Usage("reproducing kernel is sampled on boundary grids".into()));
        };
        factors.push(g.nodes.iter().map(|&x| kernel_value_1d(wk, C64::new(x, 0.0))).collect::<Vec<_>>());
    }
    let values: Array1<C64> = if factors.len() == 1 {
        factors.pop().unwrap().into()
    } else {
        let (a, b) = (&factors[0], &factors[1]);
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    };
    HardyVector::new(values, space)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_origin_for_w_ii() {
        let i = C64::i();
        // 1/((2 pi i)^2 (-i)(-i)) = 1/((-4 pi^2)(-1)) = 1/(4 pi^2)
        let v = kernel_value((i, i), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        assert!((v - C64::new(1.0 / (4.0 * PI * PI), 0.0)).norm() < 1e-16);
        assert!((kernel_norm_squared((i, i)) - 0.006_332_573_977_646_111).abs() < 1e-15);
        let kw = kernel_value((i, i), (i, i));
        assert!((kw.re - kernel_norm_squared((i, i))).abs() < 1e-16 && kw.im.abs() < 1e-18);
    }

    #[test]
    fn points_off_the_half_plane_are_rejected() {
        use crate::hardy::BoundaryGrid;
        let g = BoundaryGrid::cayley(8).unwrap();
        let space = Discretization::boundary2(g.clone(), g);
        let r = reproducing_kernel(&[C64::new(1.0, 0.0), C64::i()], space);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
