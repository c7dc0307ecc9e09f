//! Discretized Hardy spaces: grids, the Cayley transform, the isometry between the
//! bidisc and bi-half-plane spaces, reproducing kernels and the frequency picture.

mod bochner;
mod grid;
mod kernel;
mod phi;
mod space;

pub use bochner::{
    bochner_inverse, bochner_transform, boundary_analysis_matrix, frequency_analysis_matrix,
    frequency_synthesis_matrix, modal_synthesis_matrix, BochnerOptions, BochnerOutput,
};
pub use grid::{BoundaryGrid, BoundaryLayout, CircleGrid, FrequencyGrid, FrequencyLayout};
pub use kernel::{kernel_norm_squared, kernel_value, kernel_value_1d, reproducing_kernel};
pub use phi::{phi_isometry, PHI_NORM_CONSTANT};
pub use space::{inner_product, Axis, Discretization, HardyVector, Rep};

use crate::{Error, Result, C64};

/// `(z - i)/(z + i)`, mapping the upper half-plane onto the unit disc.
pub fn cayley(z: C64) -> Result<C64> {
    let den = z + C64::i();
    if den.norm() == 0.0 {
        return Err(Error::Domain("cayley transform has a pole at z = -i".into()));
    }
    Ok((z - C64::i()) / den)
}

/// `i (1 + w)/(1 - w)`, the inverse of [`cayley`].
pub fn cayley_inv(w: C64) -> Result<C64> {
    let den = C64::new(1.0, 0.0) - w;
    if den.norm() == 0.0 {
        return Err(Error::Domain("inverse cayley transform has a pole at w = 1".into()));
    }
    Ok(C64::i() * (C64::new(1.0, 0.0) + w) / den)
}

/// Unchecked Cayley transform for hot loops where `z` is known to avoid `-i`.
#[inline]
pub(crate) fn cay(z: C64) -> C64 {
    (z - C64::i()) / (z + C64::i())
}

#[inline]
pub(crate) fn cay_inv(w: C64) -> C64 {
    C64::i() * (1.0 + w) / (1.0 - w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_values() {
        assert!(cayley(C64::i()).unwrap().norm() < 1e-15);
        assert!((cayley(C64::new(0.0, 0.0)).unwrap() + 1.0).norm() < 1e-15);
        let w = cayley(C64::new(1.0, 1.0)).unwrap();
        assert!((w - C64::new(0.2, -0.4)).norm() < 1e-15);
        assert!(cayley(-C64::i()).is_err());
        assert!(cayley_inv(C64::new(1.0, 0.0)).is_err());
    }
}
