//! Tensor-product quadrature over a chart: `∫_M φ = ∫ φ √det g dx`.
//!
//! Periodic coordinates use the uniform trapezoidal rule (spectrally accurate
//! for smooth periodic data); other coordinates use Gauss–Legendre on the
//! exclusion-shrunk interval, so sphere poles are never evaluated.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{first_nonpositive_pivot, Chart, GeometryError};

pub const MIN_NODES: usize = 8;
pub const DEFAULT_NONPERIODIC_NODES: usize = 64;
pub const DEFAULT_PERIODIC_NODES: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("integrand failed at node {point:?}: {message}")]
    NodeFailure { point: Vec<f64>, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    UniformPeriodic,
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub counts: Vec<usize>,
    pub rules: Vec<Rule>,
}

impl GridSpec {
    /// 64 nodes per nonperiodic coordinate, 128 per periodic one.
    pub fn default_for(chart: &Chart) -> Self {
        let counts = chart
            .periodic()
            .iter()
            .map(|&p| {
                if p {
                    DEFAULT_PERIODIC_NODES
                } else {
                    DEFAULT_NONPERIODIC_NODES
                }
            })
            .collect();
        Self::with_counts(chart, counts)
    }

    /// Node counts per coordinate with rules chosen by periodicity.
    pub fn with_counts(chart: &Chart, counts: Vec<usize>) -> Self {
        let rules = chart
            .periodic()
            .iter()
            .map(|&p| {
                if p {
                    Rule::UniformPeriodic
                } else {
                    Rule::GaussLegendre
                }
            })
            .collect();
        GridSpec { counts, rules }
    }

    /// Half resolution in every coordinate, never below [`MIN_NODES`].
    pub fn halved(&self) -> Self {
        GridSpec {
            counts: self
                .counts
                .iter()
                .map(|&c| (c / 2).max(MIN_NODES))
                .collect(),
            rules: self.rules.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * pn - p0) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Realized grid: node coordinates and volume weights `w_k √det g(x_k)`.
///
/// Nodes are ordered lexicographically with the last coordinate fastest.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: GridSpec,
    dim: usize,
    points: Vec<f64>,
    volume_weights: Vec<f64>,
}

impl Grid {
    /// Lays out nodes and checks positive definiteness of the metric at every
    /// node; the first offending node is reported.
    pub fn build(chart: &Chart, spec: &GridSpec) -> Result<Self, QuadratureError> {
        let n = chart.dim();
        if spec.counts.len() != n || spec.rules.len() != n {
            return Err(QuadratureError::InvalidGrid(format!(
                "grid needs {n} node counts, got {}",
                spec.counts.len()
            )));
        }
        if let Some(c) = spec.counts.iter().find(|&&c| c < MIN_NODES) {
            return Err(QuadratureError::InvalidGrid(format!(
                "node counts must be at least {MIN_NODES}, got {c}"
            )));
        }
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .map(|i| {
                let (a, b) = chart.sampled_interval(i);
                let count = spec.counts[i];
                match spec.rules[i] {
                    Rule::UniformPeriodic => {
                        let h = (b - a) / count as f64;
                        (
                            (0..count).map(|k| a + k as f64 * h).collect(),
                            vec![h; count],
                        )
                    }
                    Rule::GaussLegendre => {
                        let (x, w) = gauss_legendre(count);
                        let half = 0.5 * (b - a);
                        (
                            x.iter().map(|t| a + half * (t + 1.0)).collect(),
                            w.iter().map(|w| w * half).collect(),
                        )
                    }
                }
            })
            .collect();

        let total = spec.node_count();
        let mut points = Vec::with_capacity(total * n);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let mut w = 1.0;
            for (i, &k) in idx.iter().enumerate() {
                points.push(axes[i].0[k]);
                w *= axes[i].1[k];
            }
            weights.push(w);
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < spec.counts[i] {
                    break;
                }
                idx[i] = 0;
            }
        }

        let densities: Vec<Result<f64, GeometryError>> = points
            .par_chunks(n)
            .map(|x| {
                let g = chart.metric_at(x)?;
                if let Some(pivot) = first_nonpositive_pivot(&g) {
                    return Err(GeometryError::NotPositiveDefinite {
                        point: x.to_vec(),
                        pivot,
                    });
                }
                Ok(g.determinant().sqrt())
            })
            .collect();
        let mut volume_weights = Vec::with_capacity(total);
        for (w, d) in weights.iter().zip(densities) {
            volume_weights.push(w * d?);
        }
        Ok(Grid {
            spec: spec.clone(),
            dim: n,
            points,
            volume_weights,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.volume_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume_weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dim)
    }

    /// `w_k √det g(x_k)`
    pub fn volume_weight(&self, k: usize) -> f64 {
        self.volume_weights[k]
    }

    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    /// Evaluates `f` at every node in parallel; results in node order.
    pub fn map_nodes<T, E, F>(&self, f: F) -> Result<Vec<T>, (Vec<f64>, E)>
    where
        T: Send,
        E: Send,
        F: Fn(&[f64]) -> Result<T, E> + Sync,
    {
        let results: Vec<Result<T, E>> = self.points.par_chunks(self.dim).map(&f).collect();
        let mut out = Vec::with_capacity(results.len());
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => out.push(v),
                Err(e) => return Err((self.node(k).to_vec(), e)),
            }
        }
        Ok(out)
    }

    /// `Σ_k w_k √det g(x_k) v_k`, summed sequentially in node order.
    pub fn weighted_sum(&self, values: &[f64]) -> f64 {
        self.volume_weights
            .iter()
            .zip(values)
            .fold(0.0, |acc, (w, v)| acc + w * v)
    }
}

/// `∫_M φ` over the chart.
pub fn integrate<F, E>(phi: F, chart: &Chart, grid: &GridSpec) -> Result<f64, QuadratureError>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: std::fmt::Display + Send,
{
    let grid = Grid::build(chart, grid)?;
    integrate_on(phi, &grid)
}

/// [`integrate`] on a prebuilt grid.
pub fn integrate_on<F, E>(phi: F, grid: &Grid) -> Result<f64, QuadratureError>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: std::fmt::Display + Send,
{
    let values = grid
        .map_nodes(phi)
        .map_err(|(point, e)| QuadratureError::NodeFailure {
            point,
            message: e.to_string(),
        })?;
    Ok(grid.weighted_sum(&values))
}
