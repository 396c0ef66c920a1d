//! Levenberg-damped Gauss–Newton search for gradient soliton data
//! `(f, λ, μ)` minimizing `J = ∫_M ‖residual‖²`.
//!
//! The potential is a finite expansion `f = Σ c_a φ_a` in DSL basis
//! functions. Since `∇f` is linear in `c`, the first Lie derivative is linear
//! and the second one quadratic in the coefficients; both are tabulated per
//! node once, from exact jets, so each objective evaluation is a small
//! polynomial in the parameters.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ops, Chart, GeometryError, ScalarField};
use crate::quadrature::{Grid, GridSpec, QuadratureError};
use crate::soliton::SolitonKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid basis: {0}")]
    Basis(String),
    #[error("initial guess has {found} coefficients, basis has {expected}")]
    InitLength { expected: usize, found: usize },
    #[error("normal equations singular at iteration {iteration} even with damping {damping:e}")]
    Singular { iteration: usize, damping: f64 },
    #[error("objective is not finite at iteration {iteration}")]
    NonFinite { iteration: usize },
}

/// Which coordinates carry nonconstant factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisFamily {
    /// `cos(kx)`, `sin(kx)` in periodic coordinates.
    Fourier,
    /// `cos(x)^k` in nonperiodic (polar) coordinates.
    PolynomialInCos,
    /// Products of both, total degree capped.
    TensorProduct,
}

const MAX_BASIS: usize = 120;

#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    family: BasisFamily,
    degree: usize,
    sources: Vec<String>,
    functions: Vec<ScalarField>,
    coefficients: Vec<f64>,
    constant_index: Option<usize>,
}

fn factors(chart: &Chart, i: usize, family: BasisFamily, degree: usize) -> Vec<(usize, String)> {
    let name = &chart.coord_names()[i];
    let periodic = chart.periodic()[i];
    let active = match family {
        BasisFamily::Fourier => periodic,
        BasisFamily::PolynomialInCos => !periodic,
        BasisFamily::TensorProduct => true,
    };
    let mut out = vec![(0, String::new())];
    if !active {
        return out;
    }
    if periodic {
        let (a, b) = chart.domain()[i];
        let omega = 2.0 * std::f64::consts::PI / (b - a);
        let arg = |k: usize| {
            let w = omega * k as f64;
            match (w == 1.0, a == 0.0) {
                (true, true) => name.clone(),
                (false, true) => format!("{w:e}*{name}"),
                (true, false) => format!("({name} - {a:e})"),
                (false, false) => format!("{w:e}*({name} - {a:e})"),
            }
        };
        for k in 1..=degree {
            out.push((k, format!("cos({})", arg(k))));
            out.push((k, format!("sin({})", arg(k))));
        }
    } else {
        for k in 1..=degree {
            let src = if k == 1 {
                format!("cos({name})")
            } else {
                format!("cos({name})^{k}")
            };
            out.push((k, src));
        }
    }
    out
}

impl BasisExpansion {
    /// All products of per-coordinate factors with total degree ≤ `degree`,
    /// coefficients zero.
    pub fn new(chart: &Chart, family: BasisFamily, degree: usize) -> Result<Self, FitError> {
        let per_coord: Vec<_> = (0..chart.dim())
            .map(|i| factors(chart, i, family, degree))
            .collect();
        let mut sources = Vec::new();
        let mut idx = vec![0usize; chart.dim()];
        loop {
            let total: usize = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| per_coord[i][k].0)
                .sum();
            if total <= degree {
                let parts: Vec<&str> = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| per_coord[i][k].1.as_str())
                    .filter(|s| !s.is_empty())
                    .collect();
                sources.push(if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                });
                if sources.len() > MAX_BASIS {
                    return Err(FitError::Basis(format!(
                        "more than {MAX_BASIS} basis functions; lower the degree"
                    )));
                }
            }
            let mut i = chart.dim();
            loop {
                if i == 0 {
                    return Self::from_sources(chart, family, degree, sources);
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < per_coord[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    fn from_sources(
        chart: &Chart,
        family: BasisFamily,
        degree: usize,
        sources: Vec<String>,
    ) -> Result<Self, FitError> {
        let functions = sources
            .iter()
            .map(|s| ScalarField::parse(s, chart))
            .collect::<Result<Vec<_>, _>>()?;
        let constant_index = sources.iter().position(|s| s == "1");
        Ok(BasisExpansion {
            family,
            degree,
            coefficients: vec![0.0; sources.len()],
            sources,
            functions,
            constant_index,
        })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn functions(&self) -> &[ScalarField] {
        &self.functions
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn constant_index(&self) -> Option<usize> {
        self.constant_index
    }

    pub fn with_coefficients(mut self, c: Vec<f64>) -> Result<Self, FitError> {
        if c.len() != self.len() {
            return Err(FitError::InitLength {
                expected: self.len(),
                found: c.len(),
            });
        }
        self.coefficients = c;
        Ok(self)
    }

    /// DSL source of `Σ c_a φ_a`; terms with zero coefficient are dropped.
    pub fn source(&self) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .zip(&self.sources)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, s)| {
                if s == "1" {
                    format!("({c:e})")
                } else {
                    format!("({c:e})*{s}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    pub fn field(&self, chart: &Chart) -> Result<ScalarField, FitError> {
        Ok(ScalarField::parse(&self.source(), chart)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub step_tol: f64,
    /// `|λ|` is kept at or above this value.
    pub lambda_min: f64,
    pub initial_damping: f64,
    /// Relative forward-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            lambda_min: 1e-3,
            initial_damping: 1e-3,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Gradient,
    Step,
    MaxIterations,
    /// Damping grew past its cap without an accepted step.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    /// `J` re-scored on the full grid.
    pub objective: f64,
    /// `J` on the optimization grid at the final parameters.
    pub fit_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub gradient_norm: f64,
    /// The λ clamp was active at some accepted iterate.
    pub lambda_clamped: bool,
    /// `J` after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
    pub fit_grid: Vec<usize>,
    pub grid: Vec<usize>,
}

/// Starting point; `coefficients` empty means all zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FitInit {
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
}

/// Tabulated soliton residual on a fixed grid.
///
/// Residual components per node are the upper triangle of `Eᵀ R E`, where
/// `g⁻¹ = E Eᵀ`, off-diagonals scaled by `√2` and everything by the root of
/// the volume weight, so their squared sum is `∫‖R‖²_g`.
#[derive(Debug, Clone)]
pub struct Objective {
    kind: SolitonKind,
    m: usize,
    comps: usize,
    frozen: Option<(usize, f64)>,
    lambda_min: f64,
    /// Per node: `m` linear blocks, `m(m+1)/2` quadratic blocks, one constant
    /// block and one `g` block, each `comps` long.
    table: Vec<f64>,
    grid_counts: Vec<usize>,
}

fn whitened_upper(e: &DMatrix<f64>, m: &DMatrix<f64>, sw: f64, out: &mut Vec<f64>) {
    let w = e.transpose() * m * e;
    let n = w.nrows();
    for i in 0..n {
        for j in i..n {
            let s = if i == j {
                1.0
            } else {
                std::f64::consts::SQRT_2
            };
            out.push(sw * s * w[(i, j)]);
        }
    }
}

impl Objective {
    pub fn new(
        chart: &Chart,
        kind: SolitonKind,
        basis: &BasisExpansion,
        grid: &GridSpec,
    ) -> Result<Self, FitError> {
        let grid = Grid::build(chart, grid)?;
        let m = basis.len();
        let n = chart.dim();
        let comps = n * (n + 1) / 2;
        let weights = grid.volume_weights().to_vec();
        let node_block = |k: usize| -> Result<Vec<f64>, GeometryError> {
            let x = grid.node(k);
            let sw = weights[k].max(0.0).sqrt();
            let fr = chart.frame_at(x)?;
            let e = fr
                .inverse_metric()
                .cholesky()
                .ok_or_else(|| GeometryError::NotPositiveDefinite {
                    point: x.to_vec(),
                    pivot: 0.0,
                })?
                .l();
            let mut xis = Vec::with_capacity(m);
            let mut lies = Vec::with_capacity(m);
            for phi in basis.functions() {
                let xi = ops::gradient(&fr, &phi.jet_at(x)?)?;
                lies.push(ops::lie_metric(&fr, &xi)?);
                xis.push(xi);
            }
            let mut out = Vec::with_capacity((m + m * (m + 1) / 2 + 2) * comps);
            for lie in &lies {
                whitened_upper(&e, &lie.values(), sw, &mut out);
            }
            for a in 0..m {
                for b in a..m {
                    let mut q = ops::lie_derivative(&xis[a], &lies[b])?.values();
                    if a != b {
                        q += ops::lie_derivative(&xis[b], &lies[a])?.values();
                    }
                    whitened_upper(&e, &q, sw, &mut out);
                }
            }
            let base = match kind {
                SolitonKind::HyperbolicRicci => fr.ricci(),
                SolitonKind::HyperbolicYamabe => fr.metric() * fr.scalar_curvature(),
            };
            whitened_upper(&e, &base, sw, &mut out);
            whitened_upper(&e, &fr.metric(), sw, &mut out);
            Ok(out)
        };
        let results: Vec<_> = (0..grid.len()).into_par_iter().map(node_block).collect();
        let mut blocks = Vec::with_capacity(results.len());
        for (k, r) in results.into_iter().enumerate() {
            blocks.push(r.map_err(|e| QuadratureError::NodeFailure {
                point: grid.node(k).to_vec(),
                message: e.to_string(),
            })?);
        }
        Ok(Objective {
            kind,
            m,
            comps,
            frozen: basis.constant_index().map(|i| (i, basis.coefficients()[i])),
            lambda_min: FitOptions::default().lambda_min,
            table: blocks.concat(),
            grid_counts: grid.spec().counts.clone(),
        })
    }

    pub fn kind(&self) -> SolitonKind {
        self.kind
    }

    fn with_lambda_min(mut self, lambda_min: f64) -> Self {
        self.lambda_min = lambda_min;
        self
    }

    /// Free coefficients plus `λ` and `μ`.
    pub fn param_count(&self) -> usize {
        self.m - usize::from(self.frozen.is_some()) + 2
    }

    pub fn pack(&self, coefficients: &[f64], lambda: f64, mu: f64) -> Vec<f64> {
        let mut p: Vec<f64> = coefficients
            .iter()
            .enumerate()
            .filter(|(i, _)| self.frozen.is_none_or(|(f, _)| f != *i))
            .map(|(_, c)| *c)
            .collect();
        p.push(lambda);
        p.push(mu);
        p
    }

    pub fn unpack(&self, p: &[f64]) -> (Vec<f64>, f64, f64) {
        let mut c = Vec::with_capacity(self.m);
        let mut free = p.iter();
        for i in 0..self.m {
            match self.frozen {
                Some((f, v)) if f == i => c.push(v),
                _ => c.push(*free.next().expect("parameter length")),
            }
        }
        (c, p[p.len() - 2], p[p.len() - 1])
    }

    fn node_stride(&self) -> usize {
        (self.m + self.m * (self.m + 1) / 2 + 2) * self.comps
    }

    /// Stacked weighted residual components, node-major.
    pub fn residuals(&self, p: &[f64]) -> Vec<f64> {
        let (c, lambda, mu) = self.unpack(p);
        let m = self.m;
        let comps = self.comps;
        let stride = self.node_stride();
        self.table
            .par_chunks(stride)
            .flat_map_iter(|t| {
                let mut r = vec![0.0; comps];
                for a in 0..m {
                    let s = lambda * c[a];
                    if s != 0.0 {
                        for (ri, ti) in r.iter_mut().zip(&t[a * comps..(a + 1) * comps]) {
                            *ri += s * ti;
                        }
                    }
                }
                let mut off = m * comps;
                for a in 0..m {
                    for b in a..m {
                        let s = c[a] * c[b];
                        if s != 0.0 {
                            for (ri, ti) in r.iter_mut().zip(&t[off..off + comps]) {
                                *ri += s * ti;
                            }
                        }
                        off += comps;
                    }
                }
                let (base, g) = (&t[off..off + comps], &t[off + comps..off + 2 * comps]);
                for i in 0..comps {
                    r[i] += base[i] - mu * g[i];
                }
                r
            })
            .collect()
    }

    /// `J = ∫‖residual‖²`
    pub fn value(&self, p: &[f64]) -> f64 {
        self.residuals(p).iter().map(|r| r * r).sum()
    }

    /// Forward-difference Jacobian of [`Objective::residuals`], column per
    /// parameter.
    pub fn jacobian(&self, p: &[f64], r0: &[f64], rel_step: f64) -> DMatrix<f64> {
        let cols: Vec<Vec<f64>> = (0..p.len())
            .into_par_iter()
            .map(|j| {
                let h = rel_step * p[j].abs().max(1.0);
                let mut q = p.to_vec();
                q[j] += h;
                let h = q[j] - p[j];
                self.residuals(&q)
                    .iter()
                    .zip(r0)
                    .map(|(a, b)| (a - b) / h)
                    .collect()
            })
            .collect();
        DMatrix::from_fn(r0.len(), p.len(), |i, j| cols[j][i])
    }

    /// `∇J = 2 Jacᵀ r`
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let r = self.residuals(p);
        let jac = self.jacobian(p, &r, FitOptions::default().fd_step);
        (jac.transpose() * DVector::from_vec(r) * 2.0)
            .iter()
            .copied()
            .collect()
    }

    /// Keeps `|λ| ≥ lambda_min`; returns whether the clamp moved λ.
    fn clamp(&self, p: &mut [f64], previous_sign: f64) -> bool {
        let l = p.len() - 2;
        if p[l].abs() < self.lambda_min {
            let sign = if p[l] != 0.0 {
                p[l].signum()
            } else {
                previous_sign
            };
            p[l] = sign * self.lambda_min;
            true
        } else {
            false
        }
    }
}

const MAX_DAMPING: f64 = 1e16;

/// Minimizes `J` over the free coefficients, `λ` and `μ`. The constant basis
/// coefficient stays at its initial value since only `∇f` enters.
///
/// `grid` is the verification grid; the optimization runs on
/// [`GridSpec::halved`] and the result is re-scored on `grid`.
pub fn fit_potential(
    chart: &Chart,
    kind: SolitonKind,
    basis: &BasisExpansion,
    init: &FitInit,
    grid: &GridSpec,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    let basis = if init.coefficients.is_empty() {
        basis.clone().with_coefficients(vec![0.0; basis.len()])?
    } else {
        basis.clone().with_coefficients(init.coefficients.clone())?
    };
    let fit_grid = grid.halved();
    let obj = Objective::new(chart, kind, &basis, &fit_grid)?.with_lambda_min(opts.lambda_min);

    let mut p = obj.pack(basis.coefficients(), init.lambda, init.mu);
    let mut sign = if init.lambda < 0.0 { -1.0 } else { 1.0 };
    let mut clamped = obj.clamp(&mut p, sign);
    let mut r = obj.residuals(&p);
    let mut j = r.iter().map(|v| v * v).sum::<f64>();
    if !j.is_finite() {
        return Err(FitError::NonFinite { iteration: 0 });
    }
    let mut history = vec![j];
    let mut damping = opts.initial_damping;
    let mut termination = Termination::MaxIterations;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;

    'outer: while iterations < opts.max_iterations {
        iterations += 1;
        let jac = obj.jacobian(&p, &r, opts.fd_step);
        let rv = DVector::from_column_slice(&r);
        let g = jac.transpose() * &rv;
        grad_norm = 2.0 * g.norm();
        if grad_norm <= opts.gradient_tol {
            termination = Termination::Gradient;
            break;
        }
        let normal = jac.transpose() * &jac;
        loop {
            let mut a = normal.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += damping;
            }
            let Some(chol) = a.cholesky() else {
                damping *= 4.0;
                if damping > MAX_DAMPING {
                    return Err(FitError::Singular {
                        iteration: iterations,
                        damping,
                    });
                }
                continue;
            };
            let step = chol.solve(&(-&g));
            if step.norm() <= opts.step_tol {
                termination = Termination::Step;
                break 'outer;
            }
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let hit = obj.clamp(&mut trial, sign);
            let r_trial = obj.residuals(&trial);
            let j_trial: f64 = r_trial.iter().map(|v| v * v).sum();
            if j_trial.is_finite() && j_trial < j {
                debug_assert!(j_trial <= *history.last().unwrap());
                p = trial;
                r = r_trial;
                j = j_trial;
                history.push(j);
                clamped |= hit;
                sign = p[p.len() - 2].signum();
                damping = (damping / 3.0).max(1e-15);
                break;
            }
            damping *= 4.0;
            if damping > MAX_DAMPING {
                termination = Termination::Stalled;
                break 'outer;
            }
        }
    }
    if iterations == 0 {
        grad_norm = obj.gradient(&p).iter().map(|v| v * v).sum::<f64>().sqrt();
    }

    let (coefficients, lambda, mu) = obj.unpack(&p);
    let full = Objective::new(chart, kind, &basis, grid)?;
    let objective = full.value(&full.pack(&coefficients, lambda, mu));
    Ok(FitResult {
        coefficients,
        lambda,
        mu,
        objective,
        fit_objective: j,
        iterations,
        converged: matches!(termination, Termination::Gradient | Termination::Step),
        termination,
        gradient_norm: grad_norm,
        lambda_clamped: clamped,
        history,
        fit_grid: obj.grid_counts.clone(),
        grid: full.grid_counts,
    })
}
