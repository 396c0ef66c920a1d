//! Numerical workbench for hyperbolic Ricci and hyperbolic Yamabe solitons on
//! compact manifolds given by a single coordinate chart.
//!
//! * [`jet`]: truncated multivariate Taylor jets (forward-mode derivatives up
//!   to order 4)
//! * [`expr`]: the expression DSL for metrics, fields and integrands
//! * [`geometry`]: charts, curvature and tensor calculus at a point
//! * [`quadrature`]: tensor-product grids and integrals over the manifold
//! * [`soliton`]: soliton residuals, identity checks and theorem verdicts
//! * [`fit`]: least-squares search for gradient soliton data
//! * [`manifest`], [`cli`]: JSON manifests and the batch front end

pub mod cli;
pub mod expr;
pub mod fit;
pub mod geometry;
pub mod integrand;
pub mod jet;
pub mod manifest;
pub mod quadrature;
pub mod soliton;
