//! Coordinate Levi-Civita machinery shared by the base manifold and the
//! bundle oracle: Christoffel symbols from a metric, curvature from
//! Christoffel symbols, and the covariant derivative of the lowered
//! curvature, each by central finite differences.
//!
//! Index layouts:
//! - Christoffel `[k, i, j]` holds Γ^k_ij.
//! - Curvature up `[l, i, j, k]` holds R^l_ijk with R(∂_i,∂_j)∂_k = R^l_ijk ∂_l.
//! - Curvature down `[i, j, k, l]` holds R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l).
//! - Covariant derivative `[a, i, j, k, l]` holds (∇_a R)_ijkl.

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::tensorkit::{finite_difference_derivative, DenseTensor, FdScheme};

pub fn inverse_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| GeoError::Geometry("metric is not positive-definite".into()))
}

/// Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij), given `dg[l, i, j] = ∂_l g_ij`.
pub fn christoffel_from_derivatives(g: &DMatrix<f64>, dg: &DenseTensor) -> Result<DenseTensor> {
    let n = g.nrows();
    let ginv = inverse_metric(g)?;
    // lowered Γ_{l,ij}
    let mut lower = DenseTensor::zeros(&[n, n, n]);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = 0.5 * (dg.get(&[i, j, l]) + dg.get(&[j, i, l]) - dg.get(&[l, i, j]));
                lower.set(&[l, i, j], v);
            }
        }
    }
    let mut gamma = DenseTensor::zeros(&[n, n, n]);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|l| ginv[(k, l)] * lower.get(&[l, i, j])).sum();
                gamma.set(&[k, i, j], s);
            }
        }
    }
    Ok(gamma)
}

pub fn christoffel_from_metric<F>(metric: &F, x: &[f64], scheme: &FdScheme) -> Result<DenseTensor>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>> + ?Sized,
{
    let g = metric(x)?;
    let field = |p: &[f64]| metric(p).map(|m| DenseTensor::from_matrix(&m));
    let dg = finite_difference_derivative(&field, x, scheme)?;
    christoffel_from_derivatives(&g, &dg)
}

/// R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_ip Γ^p_jk − Γ^l_jp Γ^p_ik.
pub fn riemann_up_from_christoffel<F>(christoffel: &F, x: &[f64], scheme: &FdScheme) -> Result<DenseTensor>
where
    F: Fn(&[f64]) -> Result<DenseTensor> + ?Sized,
{
    let gamma = christoffel(x)?;
    let n = x.len();
    let dgamma = finite_difference_derivative(christoffel, x, scheme)?; // [a, l, j, k]
    let mut up = DenseTensor::zeros(&[n, n, n, n]);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma.get(&[i, l, j, k]) - dgamma.get(&[j, l, i, k]);
                    for p in 0..n {
                        v += gamma.get(&[l, i, p]) * gamma.get(&[p, j, k]) - gamma.get(&[l, j, p]) * gamma.get(&[p, i, k]);
                    }
                    up.set(&[l, i, j, k], v);
                }
            }
        }
    }
    Ok(up)
}

pub fn lower_riemann(g: &DMatrix<f64>, up: &DenseTensor) -> DenseTensor {
    let n = g.nrows();
    let mut down = DenseTensor::zeros(&[n, n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v: f64 = (0..n).map(|p| g[(l, p)] * up.get(&[p, i, j, k])).sum();
                    down.set(&[i, j, k, l], v);
                }
            }
        }
    }
    down
}

pub fn raise_riemann(ginv: &DMatrix<f64>, down: &DenseTensor) -> DenseTensor {
    let n = ginv.nrows();
    let mut up = DenseTensor::zeros(&[n, n, n, n]);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v: f64 = (0..n).map(|p| ginv[(l, p)] * down.get(&[i, j, k, p])).sum();
                    up.set(&[l, i, j, k], v);
                }
            }
        }
    }
    up
}

/// (∇_a R)_ijkl = ∂_a R_ijkl − Γ^p_ai R_pjkl − Γ^p_aj R_ipkl − Γ^p_ak R_ijpl − Γ^p_al R_ijkp.
pub fn covariant_derivative_riemann(gamma: &DenseTensor, down: &DenseTensor, d_down: &DenseTensor) -> DenseTensor {
    let n = gamma.shape()[0];
    let mut out = DenseTensor::zeros(&[n, n, n, n, n]);
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = d_down.get(&[a, i, j, k, l]);
                        for p in 0..n {
                            v -= gamma.get(&[p, a, i]) * down.get(&[p, j, k, l])
                                + gamma.get(&[p, a, j]) * down.get(&[i, p, k, l])
                                + gamma.get(&[p, a, k]) * down.get(&[i, j, p, l])
                                + gamma.get(&[p, a, l]) * down.get(&[i, j, k, p]);
                        }
                        out.set(&[a, i, j, k, l], v);
                    }
                }
            }
        }
    }
    out
}

/// Largest violation of the algebraic curvature symmetries and first Bianchi identity.
pub fn symmetry_defect(down: &DenseTensor) -> f64 {
    let n = down.shape()[0];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let r = down.get(&[i, j, k, l]);
                    worst = worst
                        .max((r + down.get(&[j, i, k, l])).abs())
                        .max((r + down.get(&[i, j, l, k])).abs())
                        .max((r - down.get(&[k, l, i, j])).abs())
                        .max((r + down.get(&[j, k, i, l]) + down.get(&[k, i, j, l])).abs());
                }
            }
        }
    }
    worst
}
