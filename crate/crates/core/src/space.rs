//! Convex decision spaces for the principal: probability simplices and boxes.
//!
//! Each space kind is paired with a fixed norm: the simplex with ℓ1 and the
//! box with ℓ∞. Diameters, boundary distances and Lipschitz constants are
//! always reported in the paired norm.

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceNorm {
    L1,
    LInf,
}

impl std::fmt::Display for SpaceNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceNorm::L1 => write!(f, "l1"),
            SpaceNorm::LInf => write!(f, "linf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecisionSpace {
    /// Nonnegative vectors of length `dim` summing to 1.
    Simplex { dim: usize },
    /// Componentwise bounded vectors, `lo[i] <= x[i] <= hi[i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

pub const FEAS_TOL: f64 = 1e-9;

impl DecisionSpace {
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam {
                what: "simplex dimension must be positive".into(),
            });
        }
        Ok(DecisionSpace::Simplex { dim })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                axis: "box bounds",
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidParam {
                what: "box dimension must be positive".into(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidParam {
                what: "box requires lo <= hi componentwise".into(),
            });
        }
        Ok(DecisionSpace::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            DecisionSpace::Simplex { dim } => *dim,
            DecisionSpace::Box { lo, .. } => lo.len(),
        }
    }

    pub fn norm(&self) -> SpaceNorm {
        match self {
            DecisionSpace::Simplex { .. } => SpaceNorm::L1,
            DecisionSpace::Box { .. } => SpaceNorm::LInf,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            DecisionSpace::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            DecisionSpace::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&v, (&l, &h))| v >= l - tol && v <= h + tol),
        }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                axis: "decision",
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.contains(x, FEAS_TOL) {
            return Err(Error::Infeasible {
                what: format!("point {x:?} outside decision space"),
            });
        }
        Ok(())
    }

    /// Diameter in the paired norm: at most 2 for a simplex, max side for a box.
    pub fn diameter(&self) -> f64 {
        match self {
            DecisionSpace::Simplex { dim } => {
                if *dim >= 2 {
                    2.0
                } else {
                    0.0
                }
            }
            DecisionSpace::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| h - l)
                .fold(0.0f64, f64::max),
        }
    }

    /// Exact distance from an interior point to the boundary in the paired
    /// norm. For a simplex under ℓ1 this is twice the smallest coordinate;
    /// for a box under ℓ∞ the smallest face margin.
    pub fn boundary_distance(&self, c: &[f64]) -> f64 {
        match self {
            DecisionSpace::Simplex { .. } => {
                2.0 * c.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            DecisionSpace::Box { lo, hi } => c
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&l, &h))| (v - l).min(h - v))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest `t >= 0` with `from + t*(toward - from)` feasible, plus the
    /// exit point itself. `None` when the ray never leaves the space
    /// (degenerate zero direction).
    pub fn ray_exit(&self, from: &[f64], toward: &[f64]) -> Option<(f64, Vec<f64>)> {
        let dir: Vec<f64> = from.iter().zip(toward).map(|(f, t)| t - f).collect();
        let mut t_max = f64::INFINITY;
        match self {
            DecisionSpace::Simplex { .. } => {
                for (i, &d) in dir.iter().enumerate() {
                    if d < -1e-15 {
                        t_max = t_max.min(from[i] / -d);
                    }
                }
            }
            DecisionSpace::Box { lo, hi } => {
                for (i, &d) in dir.iter().enumerate() {
                    if d > 1e-15 {
                        t_max = t_max.min((hi[i] - from[i]) / d);
                    } else if d < -1e-15 {
                        t_max = t_max.min((from[i] - lo[i]) / -d);
                    }
                }
            }
        }
        if !t_max.is_finite() {
            return None;
        }
        let z: Vec<f64> = from
            .iter()
            .zip(&dir)
            .map(|(f, d)| f + t_max * d)
            .collect();
        Some((t_max, z))
    }

    /// Range of the affine function `off + lin·x` over the space.
    pub fn affine_range(&self, lin: &[f64], off: f64) -> (f64, f64) {
        match self {
            DecisionSpace::Simplex { .. } => {
                let lo = lin.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = lin.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (off + lo, off + hi)
            }
            DecisionSpace::Box { lo, hi } => {
                let mut a = off;
                let mut b = off;
                for (i, &c) in lin.iter().enumerate() {
                    a += (c * lo[i]).min(c * hi[i]);
                    b += (c * lo[i]).max(c * hi[i]);
                }
                (a, b)
            }
        }
    }

    /// Dual norm of `lin`: the tight Lipschitz constant of `x ↦ lin·x`
    /// in the paired norm.
    pub fn dual_norm(&self, lin: &[f64]) -> f64 {
        match self.norm() {
            SpaceNorm::L1 => lin.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
            SpaceNorm::LInf => lin.iter().map(|v| v.abs()).sum(),
        }
    }

    /// Barycenter of a simplex, midpoint of a box.
    pub fn center(&self) -> Vec<f64> {
        match self {
            DecisionSpace::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
            DecisionSpace::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
            }
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        match self {
            DecisionSpace::Simplex { dim } => {
                // Exponential spacings give a uniform Dirichlet(1,..,1) draw.
                let mut v: Vec<f64> = (0..*dim)
                    .map(|_| -(1.0 - rng.next_f64()).ln().max(1e-300))
                    .collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            }
            DecisionSpace::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l + (h - l) * rng.next_f64())
                .collect(),
        }
    }

    /// Simplex vertices (used by small grid oracles in tests).
    pub fn simplex_vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            DecisionSpace::Simplex { dim } => Some(
                (0..*dim)
                    .map(|i| {
                        let mut e = vec![0.0; *dim];
                        e[i] = 1.0;
                        e
                    })
                    .collect(),
            ),
            DecisionSpace::Box { .. } => None,
        }
    }
}

pub fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max)
}

pub fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
