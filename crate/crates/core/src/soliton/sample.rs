//! Per-node quantities shared by all checks.

use super::{contracted_rhs, residual_from_parts, Potential, SolitonKind, SolitonSpec};
use crate::geometry::{ops, GeometryError, PointFrame, VectorSource};
use crate::jet::Jet;

/// Curvature-only quantities.
#[derive(Debug, Clone, Default)]
pub(crate) struct NodeSample {
    pub r: f64,
    pub grad_r_norm2: f64,
    /// `‖div Ric − dr/2‖`
    pub schur: f64,
    /// `‖Ric − (r/n) g‖`
    pub einstein_dev: f64,
    pub potential: Option<PotentialSample>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct PotentialSample {
    /// `‖£_ξ g‖`
    pub killing: f64,
    pub div_xi: f64,
    pub trace_lie2: f64,
    /// `‖d trace £_ξ£_ξ g‖`
    pub grad_trace_lie2: f64,
    /// `‖div £_ξ£_ξ g‖`
    pub div_lie2: f64,
    pub ric_xi_xi: f64,
    pub nabla_xi_norm2: f64,
    /// `div(∇_ξ ξ)`
    pub div_accel: f64,
    /// `‖residual‖`, present when soliton data were supplied.
    pub residual_norm: Option<f64>,
    /// `trace_g(residual)`
    pub residual_trace: Option<f64>,
    pub gradient: Option<GradientSample>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct GradientSample {
    pub lap_f: f64,
    pub hess_norm2: f64,
    /// `½ Δ‖∇f‖²`
    pub bochner_lhs: f64,
    /// `g(∇Δf, ∇f)`
    pub grad_lap_dot_grad: f64,
    /// `g(∇f, ∇r)`
    pub grad_f_dot_grad_r: f64,
    /// `Ric(∇f, ∇r)`
    pub ric_grad_f_grad_r: f64,
    /// `max_j |div(£_{∇f} g)(∂_j) − 2∂_j(Δf) − 2Ric(∂_j, ∇f)|`
    pub div_lie_formula: f64,
    /// `max_j |k Ric(∂_j, ∇f) − ∂_j r|` with `k = 2λ/(n−1)` (Yamabe) or
    /// `4λ` (Ricci).
    pub div_lie_conclusion: Option<f64>,
    /// `|λ Ric(∇f, ∇r) − c' ‖∇r‖²|`
    pub csc_identity: Option<f64>,
    /// `|2λΔf − contracted right-hand side|`
    pub contracted_trace: Option<f64>,
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

fn covector_norm(fr: &PointFrame, w: &[f64]) -> f64 {
    let g_inv = fr.inverse_metric();
    let mut acc = 0.0;
    for i in 0..w.len() {
        for j in 0..w.len() {
            acc += g_inv[(i, j)] * w[i] * w[j];
        }
    }
    acc.max(0.0).sqrt()
}

/// Soliton parameters that some quantities depend on.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Params {
    pub kind: SolitonKind,
    pub lambda: f64,
    pub mu: f64,
}

impl From<&SolitonSpec> for Params {
    fn from(s: &SolitonSpec) -> Self {
        Params {
            kind: s.kind,
            lambda: s.lambda,
            mu: s.mu,
        }
    }
}

pub(crate) fn sample_node(
    fr: &PointFrame,
    potential: Option<&Potential>,
    params: Option<Params>,
) -> Result<NodeSample, GeometryError> {
    let n = fr.dim();
    let dr: Vec<f64> = (0..n).map(|i| fr.scalar_curvature_jet().d1(i)).collect();
    let grad_r = fr.inverse_metric() * nalgebra::DVector::from_column_slice(&dr);

    let div_ric = values(&ops::div_tensor(fr, fr.ricci_jets())?);
    let schur_err: Vec<f64> = div_ric.iter().zip(&dr).map(|(d, r)| d - 0.5 * r).collect();
    let r = fr.scalar_curvature();
    let dev = fr.ricci() - fr.metric() * (r / n as f64);

    let mut sample = NodeSample {
        r,
        grad_r_norm2: covector_norm(fr, &dr).powi(2),
        schur: covector_norm(fr, &schur_err),
        einstein_dev: crate::geometry::norm2(&dev, fr).max(0.0).sqrt(),
        potential: None,
    };
    let Some(potential) = potential else {
        return Ok(sample);
    };

    let f_jet = potential
        .scalar()
        .map(|f| f.jet_at(fr.point()))
        .transpose()?;
    let xi = match &f_jet {
        Some(f) => ops::gradient(fr, f)?,
        None => potential.vector_jets(fr)?,
    };
    let lie1 = ops::lie_metric(fr, &xi)?;
    let lie2 = ops::lie_derivative(&xi, &lie1)?;
    let trace2 = ops::trace(fr, &lie2);
    let d_trace2: Vec<f64> = (0..n).map(|i| trace2.d1(i)).collect();
    let div_lie2 = values(&ops::div_tensor(fr, &lie2)?);
    let accel = ops::covariant_acceleration(fr, &xi)?;
    let xi_val = values(&xi);

    let mut ps = PotentialSample {
        killing: ops::norm2_tensor(fr, &lie1).value().max(0.0).sqrt(),
        div_xi: ops::div_vector(fr, &xi)?.value(),
        trace_lie2: trace2.value(),
        grad_trace_lie2: covector_norm(fr, &d_trace2),
        div_lie2: covector_norm(fr, &div_lie2),
        ric_xi_xi: ops::bilinear(fr.ricci_jets(), &xi, &xi).value(),
        nabla_xi_norm2: ops::nabla_norm2(fr, &xi)?.value(),
        div_accel: ops::div_vector(fr, &accel)?.value(),
        residual_norm: None,
        residual_trace: None,
        gradient: None,
    };
    if let Some(p) = params {
        let res = residual_from_parts(p.kind, p.lambda, p.mu, fr, &lie1, &lie2);
        ps.residual_norm = Some(crate::geometry::norm2(&res, fr).max(0.0).sqrt());
        ps.residual_trace = Some(crate::geometry::trace_g(&res, fr));
    }

    if let Some(f) = f_jet {
        let hess = ops::hessian(fr, &f)?;
        let lap = ops::trace(fr, &hess);
        let dlap: Vec<f64> = (0..n).map(|i| lap.d1(i)).collect();
        let grad_norm2 = ops::inner(fr, &xi, &xi);
        let ric = fr.ricci();
        let ric_xi: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|k| ric[(j, k)] * xi_val[k]).sum())
            .collect();
        let div_lie1 = values(&ops::div_tensor(fr, &lie1)?);
        let div_lie_formula = (0..n)
            .map(|j| (div_lie1[j] - 2.0 * dlap[j] - 2.0 * ric_xi[j]).abs())
            .fold(0.0, f64::max);

        let mut gs = GradientSample {
            lap_f: lap.value(),
            hess_norm2: ops::norm2_tensor(fr, &hess).value(),
            bochner_lhs: 0.5 * ops::laplacian(fr, &grad_norm2)?.value(),
            grad_lap_dot_grad: dlap.iter().zip(&xi_val).map(|(a, b)| a * b).sum(),
            grad_f_dot_grad_r: dr.iter().zip(&xi_val).map(|(a, b)| a * b).sum(),
            ric_grad_f_grad_r: ric_xi.iter().zip(grad_r.iter()).map(|(a, b)| a * b).sum(),
            div_lie_formula,
            div_lie_conclusion: None,
            csc_identity: None,
            contracted_trace: None,
        };
        if let Some(p) = params {
            let nf = n as f64;
            // Denominators cleared so small λ does not amplify rounding in dr.
            let (k, c_csc) = match p.kind {
                SolitonKind::HyperbolicYamabe => (2.0 * p.lambda / (nf - 1.0), (nf - 1.0) / 2.0),
                SolitonKind::HyperbolicRicci => (4.0 * p.lambda, 0.25),
            };
            gs.div_lie_conclusion = Some(
                (0..n)
                    .map(|j| (k * ric_xi[j] - dr[j]).abs())
                    .fold(0.0, f64::max),
            );
            gs.csc_identity =
                Some((p.lambda * gs.ric_grad_f_grad_r - c_csc * sample.grad_r_norm2).abs());
            gs.contracted_trace =
                Some((2.0 * p.lambda * gs.lap_f - contracted_rhs(p.kind, p.mu, n, r)).abs());
        }
        ps.gradient = Some(gs);
    }
    sample.potential = Some(ps);
    Ok(sample)
}
