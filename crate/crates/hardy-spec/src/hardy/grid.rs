use crate::numeric::gauss_laguerre;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryLayout {
    /// Trapezoid rule on `[-X, X]`.
    Uniform,
    /// Pullback of the uniform circle rule under the Cayley map,
    /// `x_k = -cot(theta_k / 2)` with `theta_k = 2 pi (k + 1/2) / M`.
    Cayley,
}

/// Quadrature grid on the real line (boundary of the upper half-plane).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub extent: f64,
    pub layout: BoundaryLayout,
}

impl BoundaryGrid {
    pub fn uniform(extent: f64, count: usize) -> Result<Self> {
        if !(extent > 0.0) || count < 2 {
            return Err(Error::Usage(format!(
                "uniform boundary grid needs extent > 0 and at least 2 nodes (got {extent}, {count})"
            )));
        }
        let h = 2.0 * extent / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|k| -extent + k as f64 * h).collect();
        for k in 0..count / 2 {
            nodes[count - 1 - k] = -nodes[k];
        }
        if count % 2 == 1 {
            nodes[count / 2] = 0.0;
        }
        let mut weights = vec![h; count];
        weights[0] = h / 2.0;
        weights[count - 1] = h / 2.0;
        Ok(Self { nodes, weights, extent, layout: BoundaryLayout::Uniform })
    }

    /// Spectrally accurate for functions `g(cay x)/(x + i)` with `g` smooth on the circle.
    pub fn cayley(count: usize) -> Result<Self> {
        if count < 2 || !count.is_multiple_of(2) {
            return Err(Error::Usage(format!("cayley boundary grid needs an even node count >= 2 (got {count})")));
        }
        let m = count as f64;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for k in 0..count {
            let th = 2.0 * PI * (k as f64 + 0.5) / m;
            let x = -1.0 / (th / 2.0).tan();
            nodes.push(x);
            weights.push((2.0 * PI / m) * (1.0 + x * x) / 2.0);
        }
        // enforce exact symmetry
        for k in 0..count / 2 {
            let x = 0.5 * (nodes[count - 1 - k] - nodes[k]);
            nodes[k] = -x;
            nodes[count - 1 - k] = x;
            let w = 0.5 * (weights[k] + weights[count - 1 - k]);
            weights[k] = w;
            weights[count - 1 - k] = w;
        }
        let extent = nodes[count - 1];
        Ok(Self { nodes, weights, extent, layout: BoundaryLayout::Cayley })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Circle angle of each node under the Cayley map, `theta = 2 arccot(-x)` in `(0, 2 pi)`.
    pub fn angles(&self) -> Vec<f64> {
        self.nodes.iter().map(|&x| 2.0 * (1.0f64).atan2(-x)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyLayout {
    /// Trapezoid rule on `[0, T]`.
    Uniform,
    /// Gauss-Laguerre nodes `s_q / scale` with weights for `int_0^inf dt`.
    GaussLaguerre { scale: f64 },
}

/// Quadrature grid on `[0, inf)`, the frequency side of the Bochner transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub extent: f64,
    pub layout: FrequencyLayout,
}

impl FrequencyGrid {
    pub fn uniform(extent: f64, count: usize) -> Result<Self> {
        if !(extent > 0.0) || count < 2 {
            return Err(Error::Usage(format!(
                "uniform frequency grid needs T > 0 and at least 2 nodes (got {extent}, {count})"
            )));
        }
        let h = extent / (count - 1) as f64;
        let nodes = (0..count).map(|k| k as f64 * h).collect();
        let mut weights = vec![h; count];
        weights[0] = h / 2.0;
        weights[count - 1] = h / 2.0;
        Ok(Self { nodes, weights, extent, layout: FrequencyLayout::Uniform })
    }

    /// Exact for `p(t) e^{-scale t}` with `deg p < 2 count`.
    pub fn gauss_laguerre(count: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Usage("Gauss-Laguerre frequency grid needs scale > 0".into()));
        }
        let (s, w) = gauss_laguerre(count)?;
        let nodes: Vec<f64> = s.iter().map(|x| x / scale).collect();
        let weights = w.iter().map(|x| x / scale).collect();
        let extent = *nodes.last().unwrap();
        Ok(Self { nodes, weights, extent, layout: FrequencyLayout::GaussLaguerre { scale } })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node spacing of a uniform grid.
    pub fn step(&self) -> Option<f64> {
        match self.layout {
            FrequencyLayout::Uniform => Some(self.extent / (self.len() - 1) as f64),
            _ => None,
        }
    }
}

/// Uniform grid `theta_k = 2 pi k / n` on the unit circle (boundary of the disc).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid {
    pub count: usize,
}

impl CircleGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Usage("circle grid needs at least one node".into()));
        }
        Ok(Self { count })
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.count).map(|k| 2.0 * PI * k as f64 / self.count as f64).collect()
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.count as f64
    }
}
