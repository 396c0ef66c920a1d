//! Hyperbolic Ricci and hyperbolic Yamabe soliton residuals, the identity
//! checks behind the triviality results, and theorem verdicts.
//!
//! The soliton equations are
//!
//! ```text
//! Ricci:   £_ξ£_ξ g + λ £_ξ g + Ric = μ g
//! Yamabe:  £_ξ£_ξ g + λ £_ξ g       = (μ − r) g
//! ```
//!
//! Every check evaluates its quantities at the nodes of a quadrature grid
//! (see [`Evaluation`]) and reduces them into a [`CheckReport`].

mod checks;
mod report;
mod sample;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    ops, Chart, GeometryError, Gradient, JetMatrix, PointFrame, ScalarField, VectorField,
    VectorSource,
};
use crate::jet::Jet;
use crate::quadrature::{GridSpec, QuadratureError};

pub use checks::{
    evaluate_theorem, identity_bochner, identity_div_lie, identity_lemma_hessian, identity_prop_p2,
    identity_trace_lie2, remark_csc, CurvatureSummary, Evaluation,
};
pub use report::{CheckReport, Tolerances, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("check {check} needs a gradient potential (ξ = ∇f)")]
    NotGradient { check: &'static str },
    #[error("check {check} needs λ ≠ 0")]
    ZeroLambda { check: &'static str },
    #[error("check {check} needs soliton data")]
    MissingSoliton { check: &'static str },
    #[error("unknown check id '{0}'; valid ids: {valid}", valid = CheckId::ALL.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "))]
    UnknownCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    HyperbolicRicci,
    HyperbolicYamabe,
}

impl fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolitonKind::HyperbolicRicci => "hyperbolic_ricci",
            SolitonKind::HyperbolicYamabe => "hyperbolic_yamabe",
        })
    }
}

/// The potential field of a soliton: a general vector field or `∇f`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Vector(VectorField),
    Gradient(ScalarField),
}

impl Potential {
    pub fn is_gradient(&self) -> bool {
        matches!(self, Potential::Gradient(_))
    }

    pub fn scalar(&self) -> Option<&ScalarField> {
        match self {
            Potential::Gradient(f) => Some(f),
            Potential::Vector(_) => None,
        }
    }
}

impl VectorSource for Potential {
    fn vector_jets(&self, fr: &PointFrame) -> Result<Vec<Jet>, GeometryError> {
        match self {
            Potential::Vector(v) => v.vector_jets(fr),
            Potential::Gradient(f) => Gradient(f).vector_jets(fr),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSpec {
    pub kind: SolitonKind,
    pub potential: Potential,
    pub lambda: f64,
    pub mu: f64,
}

impl SolitonSpec {
    pub fn new(kind: SolitonKind, potential: Potential, lambda: f64, mu: f64) -> Self {
        SolitonSpec {
            kind,
            potential,
            lambda,
            mu,
        }
    }
}

/// Stable check identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    TraceLie2,
    Bochner,
    LemmaHessian,
    DivLie,
    PropP2,
    ContractedTrace,
    RemarkCsc,
    Schur,
    TheoremC,
    Theorem1,
    Theorem2,
    Corollary,
    SquaredDeficit,
    TheoremN2,
    PropCsc,
}

impl CheckId {
    pub const ALL: [CheckId; 15] = [
        CheckId::TraceLie2,
        CheckId::Bochner,
        CheckId::LemmaHessian,
        CheckId::DivLie,
        CheckId::PropP2,
        CheckId::ContractedTrace,
        CheckId::RemarkCsc,
        CheckId::Schur,
        CheckId::TheoremC,
        CheckId::Theorem1,
        CheckId::Theorem2,
        CheckId::Corollary,
        CheckId::SquaredDeficit,
        CheckId::TheoremN2,
        CheckId::PropCsc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::TraceLie2 => "trace_lie2",
            CheckId::Bochner => "bochner",
            CheckId::LemmaHessian => "lemma_hessian",
            CheckId::DivLie => "div_lie",
            CheckId::PropP2 => "prop_p2",
            CheckId::ContractedTrace => "contracted_trace",
            CheckId::RemarkCsc => "remark_csc",
            CheckId::Schur => "schur",
            CheckId::TheoremC => "T-C",
            CheckId::Theorem1 => "T-1",
            CheckId::Theorem2 => "T-2",
            CheckId::Corollary => "T-COR",
            CheckId::SquaredDeficit => "T-SQ",
            CheckId::TheoremN2 => "T-N2",
            CheckId::PropCsc => "P-CSC",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = SolitonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| SolitonError::UnknownCheck(s.to_string()))
    }
}

/// Left-hand side minus right-hand side of the soliton equation, given the
/// first and second Lie derivatives of the metric.
pub(crate) fn residual_from_parts(
    spec_kind: SolitonKind,
    lambda: f64,
    mu: f64,
    fr: &PointFrame,
    lie1: &JetMatrix,
    lie2: &JetMatrix,
) -> DMatrix<f64> {
    let g = fr.metric();
    let base = lie2.values() + lie1.values() * lambda;
    match spec_kind {
        SolitonKind::HyperbolicRicci => base + fr.ricci() - g * mu,
        SolitonKind::HyperbolicYamabe => base - g * (mu - fr.scalar_curvature()),
    }
}

/// Soliton equation residual at a point; vanishes iff the equation holds.
pub fn residual(spec: &SolitonSpec, fr: &PointFrame) -> Result<DMatrix<f64>, SolitonError> {
    let xi = spec.potential.vector_jets(fr)?;
    let lie1 = ops::lie_metric(fr, &xi)?;
    let lie2 = ops::lie_derivative(&xi, &lie1)?;
    Ok(residual_from_parts(
        spec.kind,
        spec.lambda,
        spec.mu,
        fr,
        &lie1,
        &lie2,
    ))
}

/// `(2λΔf, n(μ − r))` for Yamabe data, `(2λΔf, nμ − r)` for Ricci data.
pub fn contracted_trace(spec: &SolitonSpec, fr: &PointFrame) -> Result<(f64, f64), SolitonError> {
    let f = spec.potential.scalar().ok_or(SolitonError::NotGradient {
        check: "contracted_trace",
    })?;
    let lap = ops::laplacian(fr, &f.jet_at(fr.point())?)?.value();
    Ok((
        2.0 * spec.lambda * lap,
        contracted_rhs(spec.kind, spec.mu, fr.dim(), fr.scalar_curvature()),
    ))
}

pub(crate) fn contracted_rhs(kind: SolitonKind, mu: f64, n: usize, r: f64) -> f64 {
    let n = n as f64;
    match kind {
        SolitonKind::HyperbolicYamabe => n * (mu - r),
        SolitonKind::HyperbolicRicci => n * mu - r,
    }
}

/// Max over grid nodes of `‖£_ξ g‖`; zero (to tolerance) iff ξ is Killing.
pub fn killing_residual(
    xi: &(dyn VectorSource + Sync),
    chart: &Chart,
    grid: &GridSpec,
) -> Result<f64, SolitonError> {
    let grid = crate::quadrature::Grid::build(chart, grid)?;
    let values = grid
        .map_nodes(|x| -> Result<f64, SolitonError> {
            let fr = chart.frame_at(x)?;
            let lie = ops::lie_metric(&fr, &xi.vector_jets(&fr)?)?;
            Ok(ops::norm2_tensor(&fr, &lie).value().max(0.0).sqrt())
        })
        .map_err(|(_, e)| e)?;
    Ok(values.into_iter().fold(0.0, f64::max))
}
