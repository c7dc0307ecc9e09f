use crate::C64;
use serde::{Deserialize, Serialize};

/// Points closer than this are merged.
pub const DEDUP_RESOLUTION: f64 = 1e-9;

/// Finite point set, deduplicated and sorted by (re, im).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<C64>,
    pub label: String,
}

impl PointCloud {
    pub fn new(points: Vec<C64>, label: impl Into<String>) -> Self {
        Self::with_resolution(points, label, DEDUP_RESOLUTION)
    }

    /// Deduplicate at a coarser resolution (used to thin dense clouds).
    pub fn with_resolution(mut points: Vec<C64>, label: impl Into<String>, res: f64) -> Self {
        points.retain(|p| p.re.is_finite() && p.im.is_finite());
        points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut kept: Vec<C64> = Vec::with_capacity(points.len());
        for p in points {
            let mut dup = false;
            for q in kept.iter().rev() {
                if p.re - q.re > res {
                    break;
                }
                if (p - q).norm() <= res {
                    dup = true;
                    break;
                }
            }
            if !dup {
                kept.push(p);
            }
        }
        Self { points: kept, label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &PointCloud, label: impl Into<String>) -> PointCloud {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PointCloud::new(pts, label)
    }

    /// Distance from `z` to the nearest point (infinite for an empty cloud).
    pub fn distance_to(&self, z: C64) -> f64 {
        self.points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_order() {
        let c = PointCloud::new(
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0 + 1e-12, 0.0), C64::new(0.0, -1.0)],
            "t",
        );
        assert_eq!(c.points, vec![C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
    }
}
