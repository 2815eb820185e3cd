//! Gaussian radial-basis networks and the basis-norm quantities consumed by
//! the adaptive laws.

use crate::error::{Error, Result};

/// Closed interval of one input dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Gaussian RBF network with a shared width.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfNetwork {
    dim: usize,
    /// Row-major, `dim` entries per node.
    centers: Vec<f64>,
    width: f64,
    inv_width_sq: f64,
    active_box: Vec<Interval>,
}

impl RbfNetwork {
    pub fn new(centers: Vec<Vec<f64>>, width: f64, active_box: Vec<Interval>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::domain("network", "needs at least one node"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::domain("width", "must be positive"));
        }
        let dim = active_box.len();
        if dim == 0 {
            return Err(Error::domain("network", "needs at least one input dimension"));
        }
        let mut flat = Vec::with_capacity(centers.len() * dim);
        for c in &centers {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "rbf center",
                    expected: dim,
                    found: c.len(),
                });
            }
            if !c.iter().zip(&active_box).all(|(&x, iv)| iv.contains(x)) {
                return Err(Error::domain("center", "must lie inside the active box"));
            }
            flat.extend_from_slice(c);
        }
        Ok(Self {
            dim,
            centers: flat,
            width,
            inv_width_sq: 1.0 / (width * width),
            active_box,
        })
    }

    /// Evenly spaced grid of `points_per_dim^dim` centers over `[lo, hi]^dim`.
    /// The first dimension varies slowest.
    pub fn grid(dim: usize, points_per_dim: usize, lo: f64, hi: f64, width: f64) -> Result<Self> {
        if points_per_dim == 0 {
            return Err(Error::domain("points_per_dim", "must be at least 1"));
        }
        if !(hi > lo) {
            return Err(Error::domain("grid", "upper bound must exceed lower bound"));
        }
        let axis: Vec<f64> = if points_per_dim == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            let step = (hi - lo) / (points_per_dim - 1) as f64;
            (0..points_per_dim)
                .map(|k| if k + 1 == points_per_dim { hi } else { lo + step * k as f64 })
                .collect()
        };
        let nodes = points_per_dim.pow(dim as u32);
        let centers = (0..nodes)
            .map(|mut idx| {
                let mut c = vec![0.0; dim];
                for d in (0..dim).rev() {
                    c[d] = axis[idx % points_per_dim];
                    idx /= points_per_dim;
                }
                c
            })
            .collect();
        Self::new(centers, width, vec![Interval { lo, hi }; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.centers.len() / self.dim
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn active_box(&self) -> &[Interval] {
        &self.active_box
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.dim..(k + 1) * self.dim]
    }

    /// `ψ_k(x) = exp(-‖x - c_k‖² / width²)`, defined everywhere.
    pub fn basis(&self, x: &[f64]) -> Result<BasisVector> {
        self.check_dim(x)?;
        Ok(BasisVector {
            values: self.centers.chunks_exact(self.dim).map(|c| self.kernel(c, x)).collect(),
        })
    }

    /// `(ψᵀψ, ‖ψ‖)` without materializing the basis vector.
    pub fn norms(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        let sq: f64 = self
            .centers
            .chunks_exact(self.dim)
            .map(|c| {
                let v = self.kernel(c, x);
                v * v
            })
            .sum();
        Ok((sq, sq.sqrt()))
    }

    #[inline]
    fn kernel(&self, c: &[f64], x: &[f64]) -> f64 {
        let d2: f64 = c.iter().zip(x).map(|(a, b)| (b - a) * (b - a)).sum();
        (-d2 * self.inv_width_sq).exp()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "rbf input",
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    pub values: Vec<f64>,
}

impl BasisVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which `ψ_h` the norm-based methods use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiNorm {
    /// `‖ψ‖ + 1`
    NormPlusOne,
    /// `‖ψ‖`
    Norm,
}

pub fn psi_norm_sq(psi: &BasisVector) -> f64 {
    psi.values.iter().map(|v| v * v).sum()
}

pub fn psi_h(psi: &BasisVector, variant: PsiNorm) -> f64 {
    psi_h_from_norm(psi_norm_sq(psi).sqrt(), variant)
}

#[inline]
pub fn psi_h_from_norm(norm: f64, variant: PsiNorm) -> f64 {
    match variant {
        PsiNorm::NormPlusOne => norm + 1.0,
        PsiNorm::Norm => norm,
    }
}
