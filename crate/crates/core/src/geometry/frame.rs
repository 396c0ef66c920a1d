use nalgebra::{DMatrix, DVector};

use super::{Chart, GeometryError, JetMatrix};
use crate::jet::{Jet, DEFAULT_ORDER};

/// Everything the differential operators need at one point: metric jets,
/// their inverse, Christoffel symbols and Ricci curvature, all carried as
/// jets so that their partial derivatives are available exactly.
///
/// Orders: `g`, `g⁻¹` carry order 3, `Γ` order 2, `Ric` and `r` order 1.
#[derive(Debug, Clone)]
pub struct PointFrame {
    x: Vec<f64>,
    g: JetMatrix,
    g_inv: JetMatrix,
    gamma: Vec<Jet>,
    ric: JetMatrix,
    r: Jet,
    volume: f64,
}

/// Symmetric LDLᵀ factorization of a value matrix; returns the pivots.
pub(crate) fn ldl_pivots(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = if dj != 0.0 { v / dj } else { f64::NAN };
        }
    }
    d
}

pub(crate) fn first_nonpositive_pivot(m: &DMatrix<f64>) -> Option<f64> {
    ldl_pivots(m).into_iter().find(|p| !(*p > 0.0))
}

/// Inverse of a jet matrix by Gauss–Jordan elimination in jet arithmetic.
fn invert(g: &JetMatrix) -> Option<JetMatrix> {
    let n = g.n();
    let dim = g.get(0, 0).dim();
    let mut a: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| *g.get(i, j)).collect())
        .collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(dim, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col].recip().ok()?;
        for j in 0..n {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor.coeffs().iter().all(|&v| v == 0.0) {
                continue;
            }
            for j in 0..n {
                let s = factor * a[col][j];
                a[row][j] -= s;
                let s = factor * inv[col][j];
                inv[row][j] -= s;
            }
        }
    }
    let mut out = JetMatrix::zeros(n, dim);
    for i in 0..n {
        for j in i..n {
            // symmetrize rounding
            let v = (inv[i][j] + inv[j][i]) * 0.5;
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    Some(out)
}

impl PointFrame {
    pub(crate) fn build(chart: &Chart, x: &[f64]) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if x.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if !chart.contains(x) {
            return Err(GeometryError::OutsideDomain { point: x.to_vec() });
        }
        let mut g = JetMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let jet = chart.metric_expr(i, j).eval_jet_order(x, DEFAULT_ORDER)?;
                if i != j && chart.needs_symmetry_check(i, j) {
                    let other = chart.metric_expr(j, i).eval(x)?;
                    let diff = (other - jet.value()).abs();
                    if diff > 1e-14 {
                        return Err(GeometryError::AsymmetricMetric {
                            i,
                            j,
                            point: x.to_vec(),
                            difference: diff,
                        });
                    }
                }
                g.set(i, j, jet);
                g.set(j, i, jet);
            }
        }
        let g0 = g.values();
        let pivots = ldl_pivots(&g0);
        if let Some(&pivot) = pivots.iter().find(|p| !(**p > 0.0)) {
            return Err(GeometryError::NotPositiveDefinite {
                point: x.to_vec(),
                pivot,
            });
        }
        let volume = pivots.iter().product::<f64>().sqrt();
        let g_inv = invert(&g).ok_or_else(|| GeometryError::NotPositiveDefinite {
            point: x.to_vec(),
            pivot: 0.0,
        })?;

        // dg[(l, i, j)] = ∂_l g_ij
        let dg: Vec<Jet> = (0..n * n * n)
            .map(|idx| {
                let (l, i, j) = (idx / (n * n), (idx / n) % n, idx % n);
                g.get(i, j).d(l)
            })
            .collect();
        let dg_at = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];

        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Jet::zero(n);
                    for l in 0..n {
                        let bracket = *dg_at(i, j, l) + *dg_at(j, i, l) - *dg_at(l, i, j);
                        acc += *g_inv.get(k, l) * bracket;
                    }
                    gamma.push(acc * 0.5);
                }
            }
        }
        let gm = |k: usize, i: usize, j: usize| &gamma[(k * n + i) * n + j];

        let mut ric = JetMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Jet::zero(n);
                for k in 0..n {
                    acc += gm(k, i, j).d(k);
                    acc -= gm(k, k, j).d(i);
                    for l in 0..n {
                        acc += *gm(k, k, l) * *gm(l, i, j);
                        acc -= *gm(k, i, l) * *gm(l, k, j);
                    }
                }
                ric.set(i, j, acc);
                ric.set(j, i, acc);
            }
        }
        let mut r = Jet::zero(n);
        for i in 0..n {
            for j in 0..n {
                r += *g_inv.get(i, j) * *ric.get(i, j);
            }
        }

        Ok(PointFrame {
            x: x.to_vec(),
            g,
            g_inv,
            gamma,
            ric,
            r,
            volume,
        })
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn metric(&self) -> DMatrix<f64> {
        self.g.values()
    }

    pub fn inverse_metric(&self) -> DMatrix<f64> {
        self.g_inv.values()
    }

    pub fn metric_jets(&self) -> &JetMatrix {
        &self.g
    }

    pub fn inverse_metric_jets(&self) -> &JetMatrix {
        &self.g_inv
    }

    /// `∂_{vars} g_ij`, up to third order.
    pub fn metric_partial(&self, i: usize, j: usize, vars: &[usize]) -> Option<f64> {
        self.g.get(i, j).partial(vars)
    }

    /// `√det g`.
    pub fn volume_density(&self) -> f64 {
        self.volume
    }

    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> f64 {
        self.christoffel_jet(k, i, j).value()
    }

    /// `Γ^k_ij` with its first and second partials.
    pub fn christoffel_jet(&self, k: usize, i: usize, j: usize) -> &Jet {
        let n = self.dim();
        &self.gamma[(k * n + i) * n + j]
    }

    pub fn ricci(&self) -> DMatrix<f64> {
        self.ric.values()
    }

    /// `Ric_ij` with first partials.
    pub fn ricci_jets(&self) -> &JetMatrix {
        &self.ric
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.r.value()
    }

    pub fn scalar_curvature_jet(&self) -> &Jet {
        &self.r
    }

    /// `dr` as a covector.
    pub fn scalar_curvature_differential(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), (0..self.dim()).map(|i| self.r.d1(i)))
    }

    /// `∇r = g⁻¹ dr`.
    pub fn scalar_curvature_gradient(&self) -> DVector<f64> {
        self.inverse_metric() * self.scalar_curvature_differential()
    }
}
