//! JSON manifests: a manifold block, optional soliton data, extra named
//! fields for integrands, and an optional fit block.
//!
//! ```json
//! {
//!   "manifold": {
//!     "name": "unit_sphere_2",
//!     "coords": ["th", "ph"],
//!     "domain": [[0, "pi"], [0, "2*pi"]],
//!     "periodic": [false, true],
//!     "metric": [["1", "0"], ["", "sin(th)^2"]],
//!     "grid": [32, 64]
//!   },
//!   "soliton": {
//!     "kind": "hyperbolic_yamabe",
//!     "potential": { "gradient": "0" },
//!     "lambda": 1.0,
//!     "mu": 2.0
//!   }
//! }
//! ```
//!
//! Metric entries below the diagonal may be empty strings, meaning "mirror
//! the upper triangle". Domain bounds are numbers or constant expressions.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::fit::{BasisFamily, FitInit, FitOptions};
use crate::geometry::{Chart, ScalarField, VectorField};
use crate::integrand::FieldSet;
use crate::quadrature::GridSpec;
use crate::soliton::{Potential, SolitonKind, SolitonSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl ToString) -> ManifestError {
    ManifestError::Schema {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldBlock {
    name: String,
    dim: Option<usize>,
    coords: Vec<String>,
    domain: Vec<[Bound; 2]>,
    periodic: Vec<bool>,
    #[serde(default)]
    exclusion: Option<Vec<f64>>,
    metric: Vec<Vec<String>>,
    #[serde(default)]
    grid: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum PotentialBlock {
    Gradient(String),
    Vector(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolitonBlock {
    kind: SolitonKind,
    potential: PotentialBlock,
    lambda: f64,
    mu: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldsBlock {
    #[serde(default)]
    scalars: BTreeMap<String, String>,
    #[serde(default)]
    vectors: BTreeMap<String, Vec<String>>,
}

/// Fit settings; `kind` defaults to the soliton block's kind.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitBlock {
    #[serde(default)]
    pub kind: Option<SolitonKind>,
    pub basis: BasisFamily,
    pub degree: usize,
    #[serde(default)]
    pub init: FitInit,
    #[serde(default)]
    pub options: FitOptions,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    manifold: ManifoldBlock,
    #[serde(default)]
    soliton: Option<SolitonBlock>,
    #[serde(default)]
    fields: Option<FieldsBlock>,
    #[serde(default)]
    fit: Option<FitBlock>,
}

/// A validated manifest.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub chart: Chart,
    /// Grid override from the manifest, else the chart default.
    pub grid: GridSpec,
    pub soliton: Option<SolitonSpec>,
    /// Declared fields plus `f` for a gradient potential and `xi` for any
    /// potential.
    pub fields: FieldSet,
    pub fit: Option<FitBlock>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawManifest = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(
                if path == "." { "manifest".into() } else { path },
                e.into_inner(),
            )
        })?;
        raw.validate()
    }
}

fn parse_expr(src: &str, coords: &[String], path: &str) -> Result<Expr, ManifestError> {
    Expr::parse(src, coords).map_err(|e| schema(path, e))
}

impl ManifoldBlock {
    fn chart(&self) -> Result<Chart, ManifestError> {
        let n = self.coords.len();
        if let Some(d) = self.dim {
            if d != n {
                return Err(schema(
                    "manifold.dim",
                    format!("dim is {d} but {n} coordinates are listed"),
                ));
            }
        }
        for (field, len) in [
            ("domain", self.domain.len()),
            ("periodic", self.periodic.len()),
            ("metric", self.metric.len()),
        ] {
            if len != n {
                return Err(schema(
                    format!("manifold.{field}"),
                    format!("expected {n} entries, found {len}"),
                ));
            }
        }
        let mut domain = Vec::with_capacity(n);
        for (i, pair) in self.domain.iter().enumerate() {
            let mut ends = [0.0; 2];
            for (k, b) in pair.iter().enumerate() {
                let path = format!("manifold.domain[{i}][{k}]");
                ends[k] = match b {
                    Bound::Number(v) => *v,
                    Bound::Expr(s) => parse_expr(s, &[], &path)?
                        .eval(&[])
                        .map_err(|e| schema(&path, e))?,
                };
            }
            domain.push((ends[0], ends[1]));
        }
        let exclusion = match &self.exclusion {
            Some(e) if e.len() != n => {
                return Err(schema(
                    "manifold.exclusion",
                    format!("expected {n} entries, found {}", e.len()),
                ))
            }
            Some(e) => e.clone(),
            None => vec![0.0; n],
        };
        let mut table: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
        for (i, row) in self.metric.iter().enumerate() {
            for j in 0..n {
                let path = format!("manifold.metric[{i}][{j}]");
                match row.get(j).map(|s| s.trim()) {
                    Some("") | None if j < i => {}
                    Some("") | None => {
                        return Err(schema(path, "missing metric entry"));
                    }
                    Some(src) => table[i][j] = Some(parse_expr(src, &self.coords, &path)?),
                }
            }
            if row.len() > n {
                return Err(schema(
                    format!("manifold.metric[{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
        }
        let metric: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        table[i][j]
                            .clone()
                            .or_else(|| table[j][i].clone())
                            .expect("upper triangle filled")
                    })
                    .collect()
            })
            .collect();
        Chart::new(
            self.name.clone(),
            self.coords.clone(),
            domain,
            self.periodic.clone(),
            exclusion,
            metric,
        )
        .map_err(|e| schema("manifold", e))
    }
}

impl RawManifest {
    fn validate(self) -> Result<Manifest, ManifestError> {
        let chart = self.manifold.chart()?;
        let n = chart.dim();
        let coords = chart.coord_names().to_vec();
        let grid = match &self.manifold.grid {
            Some(g) if g.len() != n => {
                return Err(schema(
                    "manifold.grid",
                    format!("expected {n} node counts, found {}", g.len()),
                ))
            }
            Some(g) => GridSpec::with_counts(&chart, g.clone()),
            None => GridSpec::default_for(&chart),
        };

        let mut fields = FieldSet::default();
        let raw_fields = self.fields.unwrap_or_default();
        for (name, src) in &raw_fields.scalars {
            let path = format!("fields.scalars.{name}");
            check_field_name(name, &coords, &path)?;
            let e = parse_expr(src, &coords, &path)?;
            fields.scalars.insert(name.clone(), ScalarField::new(e));
        }
        for (name, comps) in &raw_fields.vectors {
            let path = format!("fields.vectors.{name}");
            check_field_name(name, &coords, &path)?;
            fields
                .vectors
                .insert(name.clone(), vector(comps, &coords, n, &path)?);
        }

        let soliton = match self.soliton {
            None => None,
            Some(s) => {
                let potential = match s.potential {
                    PotentialBlock::Gradient(src) => {
                        let f = ScalarField::new(parse_expr(
                            &src,
                            &coords,
                            "soliton.potential.gradient",
                        )?);
                        fields
                            .scalars
                            .entry("f".into())
                            .or_insert_with(|| f.clone());
                        Potential::Gradient(f)
                    }
                    PotentialBlock::Vector(comps) => {
                        let v = vector(&comps, &coords, n, "soliton.potential.vector")?;
                        fields
                            .vectors
                            .entry("xi".into())
                            .or_insert_with(|| v.clone());
                        Potential::Vector(v)
                    }
                };
                for (name, v) in [("soliton.lambda", s.lambda), ("soliton.mu", s.mu)] {
                    if !v.is_finite() {
                        return Err(schema(name, "must be finite"));
                    }
                }
                Some(SolitonSpec::new(s.kind, potential, s.lambda, s.mu))
            }
        };
        if let Some(fit) = &self.fit {
            if fit.kind.is_none() && soliton.is_none() {
                return Err(schema(
                    "fit.kind",
                    "required when the manifest has no soliton block",
                ));
            }
        }
        Ok(Manifest {
            chart,
            grid,
            soliton,
            fields,
            fit: self.fit,
        })
    }
}

fn check_field_name(name: &str, coords: &[String], path: &str) -> Result<(), ManifestError> {
    let ok = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok {
        return Err(schema(path, format!("'{name}' is not an identifier")));
    }
    if coords.iter().any(|c| c == name) || ["r", "pi", "gradr"].contains(&name) {
        return Err(schema(path, format!("'{name}' is reserved")));
    }
    Ok(())
}

fn vector(
    comps: &[String],
    coords: &[String],
    n: usize,
    path: &str,
) -> Result<VectorField, ManifestError> {
    if comps.len() != n {
        return Err(schema(
            path,
            format!("expected {n} components, found {}", comps.len()),
        ));
    }
    let exprs = comps
        .iter()
        .enumerate()
        .map(|(i, s)| parse_expr(s, coords, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorField::new(exprs))
}
