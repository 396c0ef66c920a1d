//! Integrands for ad-hoc quadrature: the DSL plus curvature and field names.
//!
//! Bound names: `r` (scalar curvature), every declared scalar by name, and
//! the calls `ric(v, w)`, `g(v, w)`, `lap(s)`, `norm2_hess(s)`. Vector
//! arguments are declared vector fields, `grad<s>` for a declared scalar
//! `s`, or `gradr`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Bindings, Expr, Node, ParseError, Scope};
use crate::geometry::{self, Chart, GeometryError, PointFrame, ScalarField, VectorField};
use crate::quadrature::{integrate_on, Grid, QuadratureError};

const CALLS: [(&str, usize); 4] = [("ric", 2), ("g", 2), ("lap", 1), ("norm2_hess", 1)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrandError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("'{name}' is not a declared {expected} (known: {known})")]
    UnknownField {
        name: String,
        expected: &'static str,
        known: String,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Named fields an integrand may refer to.
#[derive(Debug, Clone, Default)]
pub struct FieldSet {
    pub scalars: BTreeMap<String, ScalarField>,
    pub vectors: BTreeMap<String, VectorField>,
}

impl FieldSet {
    fn vector_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.vectors.keys().cloned().collect();
        names.extend(self.scalars.keys().map(|s| format!("grad{s}")));
        names.push("gradr".to_string());
        names
    }

    fn vector_at(&self, name: &str, fr: &PointFrame) -> Result<Option<Vec<f64>>, GeometryError> {
        if name == "gradr" {
            return Ok(Some(
                fr.scalar_curvature_gradient().iter().copied().collect(),
            ));
        }
        if let Some(v) = self.vectors.get(name) {
            return Ok(Some(
                v.components()
                    .iter()
                    .map(|e| e.eval(fr.point()))
                    .collect::<Result<_, _>>()?,
            ));
        }
        if let Some(f) = name.strip_prefix("grad").and_then(|s| self.scalars.get(s)) {
            return Ok(Some(geometry::grad(f, fr)?.iter().copied().collect()));
        }
        Ok(None)
    }
}

#[derive(Debug, Clone)]
pub struct Integrand {
    expr: Expr,
    fields: FieldSet,
}

fn bound_names(e: &Expr, out: &mut Vec<(String, Vec<String>, usize)>) {
    match e.node() {
        Node::Bound { name, args } => out.push((name.clone(), args.clone(), e.span().start)),
        Node::Neg(a) | Node::Call(_, a) => bound_names(a, out),
        Node::Binary(_, a, b) => {
            bound_names(a, out);
            bound_names(b, out);
        }
        Node::Const(_) | Node::Var { .. } => {}
    }
}

impl Integrand {
    pub fn parse(src: &str, chart: &Chart, fields: FieldSet) -> Result<Self, IntegrandError> {
        let mut scalars: Vec<&str> = vec!["r"];
        scalars.extend(fields.scalars.keys().map(String::as_str));
        let scope = Scope {
            coords: chart.coord_names(),
            scalars: &scalars,
            calls: &CALLS,
        };
        let expr = Expr::parse_in(src, &scope)?;
        let mut bound = Vec::new();
        bound_names(&expr, &mut bound);
        let vectors = fields.vector_names();
        for (name, args, _) in bound {
            let (expected, known): (&'static str, Vec<String>) = match name.as_str() {
                "ric" | "g" => ("vector field", vectors.clone()),
                "lap" | "norm2_hess" => ("scalar field", fields.scalars.keys().cloned().collect()),
                _ => continue,
            };
            if let Some(bad) = args.iter().find(|a| !known.contains(a)) {
                return Err(IntegrandError::UnknownField {
                    name: bad.clone(),
                    expected,
                    known: known.join(", "),
                });
            }
        }
        Ok(Integrand { expr, fields })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn value_at(&self, fr: &PointFrame) -> Result<f64, GeometryError> {
        let b = NodeBindings {
            fr,
            fields: &self.fields,
        };
        Ok(self.expr.eval_with(fr.point(), &b)?)
    }

    /// `∫_M` of the integrand over `grid`.
    pub fn integrate(&self, chart: &Chart, grid: &Grid) -> Result<f64, IntegrandError> {
        Ok(integrate_on(
            |x| -> Result<f64, GeometryError> { self.value_at(&chart.frame_at(x)?) },
            grid,
        )?)
    }
}

struct NodeBindings<'a> {
    fr: &'a PointFrame,
    fields: &'a FieldSet,
}

impl NodeBindings<'_> {
    fn pair(&self, args: &[String], m: &nalgebra::DMatrix<f64>) -> Option<f64> {
        let u = self.fields.vector_at(&args[0], self.fr).ok()??;
        let v = self.fields.vector_at(&args[1], self.fr).ok()??;
        let mut acc = 0.0;
        for i in 0..u.len() {
            for j in 0..v.len() {
                acc += m[(i, j)] * u[i] * v[j];
            }
        }
        Some(acc)
    }
}

impl Bindings for NodeBindings<'_> {
    fn value(&self, name: &str, args: &[String]) -> Option<f64> {
        match name {
            "r" => Some(self.fr.scalar_curvature()),
            "ric" => self.pair(args, &self.fr.ricci()),
            "g" => self.pair(args, &self.fr.metric()),
            "lap" => geometry::laplacian(self.fields.scalars.get(&args[0])?, self.fr).ok(),
            "norm2_hess" => {
                let h = geometry::hessian(self.fields.scalars.get(&args[0])?, self.fr).ok()?;
                Some(geometry::norm2(&h, self.fr))
            }
            s => self
                .fields
                .scalars
                .get(s)?
                .expr()
                .eval(self.fr.point())
                .ok(),
        }
    }
}
