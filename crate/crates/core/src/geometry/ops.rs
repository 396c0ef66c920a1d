//! Differential operators on jet-valued fields at a point.
//!
//! Vectors are contravariant component lists, covectors covariant, and
//! symmetric 2-tensors are fully covariant [`JetMatrix`] values. Every
//! operator returns jets, one order lower per derivative taken, so results
//! can be fed back into further operators.

use super::{GeometryError, JetMatrix, PointFrame};
use crate::jet::Jet;

fn require(op: &'static str, needed: usize, got: usize) -> Result<(), GeometryError> {
    if got < needed {
        return Err(GeometryError::InsufficientOrder { op, needed, got });
    }
    Ok(())
}

fn min_order(v: &[Jet]) -> usize {
    v.iter().map(Jet::order).min().unwrap_or(0)
}

/// `(∇f)^i = g^{ij} ∂_j f`
pub fn gradient(fr: &PointFrame, f: &Jet) -> Result<Vec<Jet>, GeometryError> {
    require("gradient", 1, f.order())?;
    let n = fr.dim();
    let df: Vec<Jet> = (0..n).map(|j| f.d(j)).collect();
    Ok(raise(fr, &df))
}

/// `ω^i = g^{ij} ω_j`
pub fn raise(fr: &PointFrame, covector: &[Jet]) -> Vec<Jet> {
    let n = fr.dim();
    let g_inv = fr.inverse_metric_jets();
    (0..n)
        .map(|i| {
            let mut acc = Jet::zero(n);
            for (j, w) in covector.iter().enumerate() {
                acc += *g_inv.get(i, j) * *w;
            }
            acc
        })
        .collect()
}

/// `v_i = g_ij v^j`
pub fn lower(fr: &PointFrame, vector: &[Jet]) -> Vec<Jet> {
    let n = fr.dim();
    let g = fr.metric_jets();
    (0..n)
        .map(|i| {
            let mut acc = Jet::zero(n);
            for (j, v) in vector.iter().enumerate() {
                acc += *g.get(i, j) * *v;
            }
            acc
        })
        .collect()
}

/// `(∇∇f)_ij = ∂_i∂_j f − Γ^k_ij ∂_k f`
pub fn hessian(fr: &PointFrame, f: &Jet) -> Result<JetMatrix, GeometryError> {
    require("hessian", 2, f.order())?;
    let n = fr.dim();
    let df: Vec<Jet> = (0..n).map(|k| f.d(k)).collect();
    let mut h = JetMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = df[i].d(j);
            for (k, dk) in df.iter().enumerate() {
                acc -= *fr.christoffel_jet(k, i, j) * *dk;
            }
            h.set(i, j, acc);
            h.set(j, i, acc);
        }
    }
    Ok(h)
}

/// `Δf = g^{ij}(∇∇f)_ij`, the trace of the Hessian (`Δ = div ∘ grad`).
pub fn laplacian(fr: &PointFrame, f: &Jet) -> Result<Jet, GeometryError> {
    Ok(trace(fr, &hessian(fr, f)?))
}

/// `(£_ξ h)_ij = ξ^k ∂_k h_ij + h_kj ∂_i ξ^k + h_ik ∂_j ξ^k`
pub fn lie_derivative(xi: &[Jet], h: &JetMatrix) -> Result<JetMatrix, GeometryError> {
    require("lie derivative (tensor)", 1, h.order())?;
    require("lie derivative (field)", 1, min_order(xi))?;
    let n = h.n();
    let dxi: Vec<Vec<Jet>> = xi
        .iter()
        .map(|c| (0..n).map(|i| c.d(i)).collect())
        .collect();
    let mut out = JetMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Jet::zero(n);
            for k in 0..n {
                acc += xi[k] * h.get(i, j).d(k);
                acc += *h.get(k, j) * dxi[k][i];
                acc += *h.get(i, k) * dxi[k][j];
            }
            out.set(i, j, acc);
            out.set(j, i, acc);
        }
    }
    Ok(out)
}

/// `£_ξ g`
pub fn lie_metric(fr: &PointFrame, xi: &[Jet]) -> Result<JetMatrix, GeometryError> {
    lie_derivative(xi, fr.metric_jets())
}

/// `£_ξ £_ξ g`, with the inner Lie derivative kept as a jet field.
pub fn lie2_metric(fr: &PointFrame, xi: &[Jet]) -> Result<JetMatrix, GeometryError> {
    lie_derivative(xi, &lie_metric(fr, xi)?)
}

/// `∇_i ξ^k = ∂_i ξ^k + Γ^k_ij ξ^j`, stored as `[i][k]`.
pub fn covariant_derivative(fr: &PointFrame, xi: &[Jet]) -> Result<Vec<Vec<Jet>>, GeometryError> {
    require("covariant derivative", 1, min_order(xi))?;
    let n = fr.dim();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let mut acc = xi[k].d(i);
                    for (j, xj) in xi.iter().enumerate() {
                        acc += *fr.christoffel_jet(k, i, j) * *xj;
                    }
                    acc
                })
                .collect()
        })
        .collect())
}

/// `(∇_ξ ξ)^k = ξ^i ∂_i ξ^k + Γ^k_ij ξ^i ξ^j`
pub fn covariant_acceleration(fr: &PointFrame, xi: &[Jet]) -> Result<Vec<Jet>, GeometryError> {
    let nabla = covariant_derivative(fr, xi)?;
    let n = fr.dim();
    Ok((0..n)
        .map(|k| {
            let mut acc = Jet::zero(n);
            for i in 0..n {
                acc += xi[i] * nabla[i][k];
            }
            acc
        })
        .collect())
}

/// `div V = ∂_i V^i + Γ^i_ik V^k`
pub fn div_vector(fr: &PointFrame, v: &[Jet]) -> Result<Jet, GeometryError> {
    require("vector divergence", 1, min_order(v))?;
    let n = fr.dim();
    let mut acc = Jet::zero(n);
    for i in 0..n {
        acc += v[i].d(i);
        for (k, vk) in v.iter().enumerate() {
            acc += *fr.christoffel_jet(i, i, k) * *vk;
        }
    }
    Ok(acc)
}

/// `(div T)_j = g^{ik} ∇_i T_kj`
pub fn div_tensor(fr: &PointFrame, t: &JetMatrix) -> Result<Vec<Jet>, GeometryError> {
    require("tensor divergence", 1, t.order())?;
    let n = fr.dim();
    let g_inv = fr.inverse_metric_jets();
    // ∇_i T_kj
    let nabla = |i: usize, k: usize, j: usize| {
        let mut acc = t.get(k, j).d(i);
        for l in 0..n {
            acc -= *fr.christoffel_jet(l, i, k) * *t.get(l, j);
            acc -= *fr.christoffel_jet(l, i, j) * *t.get(k, l);
        }
        acc
    };
    Ok((0..n)
        .map(|j| {
            let mut acc = Jet::zero(n);
            for i in 0..n {
                for k in 0..n {
                    acc += *g_inv.get(i, k) * nabla(i, k, j);
                }
            }
            acc
        })
        .collect())
}

/// `g^{ij} T_ij`
pub fn trace(fr: &PointFrame, t: &JetMatrix) -> Jet {
    let n = fr.dim();
    let g_inv = fr.inverse_metric_jets();
    let mut acc = Jet::zero(n);
    for i in 0..n {
        for j in 0..n {
            acc += *g_inv.get(i, j) * *t.get(i, j);
        }
    }
    acc
}

/// `‖T‖² = g^{ia} g^{jb} T_ij T_ab`
pub fn norm2_tensor(fr: &PointFrame, t: &JetMatrix) -> Jet {
    let n = fr.dim();
    let g_inv = fr.inverse_metric_jets();
    // raised[i][b] = g^{ia} T_ab... computed as T^i_b = g^{ia} T_ab
    let mixed: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|b| {
                    let mut acc = Jet::zero(n);
                    for a in 0..n {
                        acc += *g_inv.get(i, a) * *t.get(a, b);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // ‖T‖² = T^i_b T^b_i
    let mut acc = Jet::zero(n);
    for i in 0..n {
        for b in 0..n {
            acc += mixed[i][b] * mixed[b][i];
        }
    }
    acc
}

/// `g(u, v) = g_ij u^i v^j`
pub fn inner(fr: &PointFrame, u: &[Jet], v: &[Jet]) -> Jet {
    bilinear(fr.metric_jets(), u, v)
}

/// `T(u, v) = T_ij u^i v^j`
pub fn bilinear(t: &JetMatrix, u: &[Jet], v: &[Jet]) -> Jet {
    let n = t.n();
    let dim = t.get(0, 0).dim();
    let mut acc = Jet::zero(dim);
    for i in 0..n {
        for j in 0..n {
            acc += *t.get(i, j) * u[i] * v[j];
        }
    }
    acc
}

/// `g^{ij} ω_i ω_j`
pub fn covector_norm2(fr: &PointFrame, w: &[Jet]) -> Jet {
    bilinear(fr.inverse_metric_jets(), w, w)
}

/// `‖∇ξ‖² = g_{ka} g^{ib} ∇_i ξ^k ∇_b ξ^a`
pub fn nabla_norm2(fr: &PointFrame, xi: &[Jet]) -> Result<Jet, GeometryError> {
    let nabla = covariant_derivative(fr, xi)?;
    let n = fr.dim();
    let g = fr.metric_jets();
    let g_inv = fr.inverse_metric_jets();
    // lowered[i][a] = g_{ka} ∇_i ξ^k
    let lowered: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|a| {
                    let mut acc = Jet::zero(n);
                    for k in 0..n {
                        acc += *g.get(k, a) * nabla[i][k];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut acc = Jet::zero(n);
    for i in 0..n {
        for b in 0..n {
            for a in 0..n {
                acc += *g_inv.get(i, b) * lowered[i][a] * nabla[b][a];
            }
        }
    }
    Ok(acc)
}
