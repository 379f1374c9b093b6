use serde::Serialize;

use crate::error::{invalid, Result};

/// Unit normal `nu` and an orthonormal basis of the hyperplane `S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperplaneFrame {
    nu: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl HyperplaneFrame {
    /// Frame for the hyperplane orthogonal to `normal` (normalized here).
    pub fn new(normal: &[f64]) -> Result<Self> {
        let dim = normal.len();
        if dim < 2 {
            return invalid(format!("interface frame needs dimension >= 2, got {dim}"));
        }
        let len = dot(normal, normal).sqrt();
        if !(len > 0.0 && len.is_finite()) {
            return invalid("interface normal must be a nonzero finite vector");
        }
        let nu: Vec<f64> = normal.iter().map(|v| v / len).collect();
        // Gram-Schmidt over the coordinate axes, least aligned with nu first.
        let mut axes: Vec<usize> = (0..dim).collect();
        axes.sort_by(|&i, &j| nu[i].abs().total_cmp(&nu[j].abs()));
        let mut found: Vec<Vec<f64>> = vec![nu.clone()];
        for axis in axes {
            if found.len() == dim {
                break;
            }
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            // Two passes for orthogonality to rounding.
            for _ in 0..2 {
                for b in &found {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
                }
            }
            let n = dot(&v, &v).sqrt();
            if n > 1e-6 {
                v.iter_mut().for_each(|vi| *vi /= n);
                found.push(v);
            }
        }
        let basis = found.split_off(1);
        debug_assert_eq!(basis.len(), dim - 1);
        Ok(Self { nu, basis })
    }

    /// Frame with `nu = e_0`.
    pub fn axis_aligned(dim: usize) -> Result<Self> {
        if dim < 2 {
            return invalid(format!("interface frame needs dimension >= 2, got {dim}"));
        }
        let mut nu = vec![0.0; dim];
        nu[0] = 1.0;
        Self::new(&nu)
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn tangent_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `v . nu`.
    pub fn normal(&self, v: &[f64]) -> f64 {
        dot(v, &self.nu)
    }

    /// Coordinates of `pi_S v` in the tangential basis.
    pub fn tangential(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(v, b)).collect()
    }

    /// `pi_S v = v - (v . nu) nu`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let c = self.normal(v);
        v.iter().zip(&self.nu).map(|(vi, ni)| vi - c * ni).collect()
    }

    /// Vector in `S` with the given basis coordinates.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        self.assemble(0.0, coords)
    }

    /// `normal * nu + sum_i coords_i b_i`.
    pub fn assemble(&self, normal: f64, coords: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.nu.iter().map(|n| normal * n).collect();
        for (c, b) in coords.iter().zip(&self.basis) {
            out.iter_mut().zip(b).for_each(|(o, bi)| *o += c * bi);
        }
        out
    }
}
