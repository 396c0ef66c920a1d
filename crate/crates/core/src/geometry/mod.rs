//! Coordinate charts, metric evaluation and the differential operators used
//! by the soliton checks.
//!
//! A compact manifold is represented by a single chart whose coordinate
//! degeneracies (sphere poles) lie on the boundary of a coordinate box. The
//! `exclusion` margins shrink the sampled box away from that set.

mod frame;
pub mod ops;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{EvalError, Expr, ParseError};
use crate::jet::{Jet, DEFAULT_ORDER, MAX_ORDER};

pub(crate) use frame::first_nonpositive_pivot;
pub use frame::PointFrame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("point {point:?} lies outside the sampled chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is not positive definite at {point:?} (pivot {pivot})")]
    NotPositiveDefinite { point: Vec<f64>, pivot: f64 },
    #[error("metric[{i}][{j}] and metric[{j}][{i}] differ by {difference} at {point:?}")]
    AsymmetricMetric {
        i: usize,
        j: usize,
        point: Vec<f64>,
        difference: f64,
    },
    #[error("{op} needs a jet of order {needed}, got order {got}")]
    InsufficientOrder {
        op: &'static str,
        needed: usize,
        got: usize,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Square matrix of jets; used for symmetric covariant 2-tensors.
#[derive(Debug, Clone)]
pub struct JetMatrix {
    n: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn zeros(n: usize, dim: usize) -> Self {
        JetMatrix {
            n,
            data: vec![Jet::zero(dim); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.data[i * self.n + j] = v;
    }

    /// Smallest order among the entries.
    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).value())
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &JetMatrix, s: f64) -> JetMatrix {
        JetMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + b.scale(s))
                .collect(),
        }
    }

    /// `s·self` with each entry multiplied by the scalar jet `w`.
    pub fn scale_by(&self, w: &Jet) -> JetMatrix {
        JetMatrix {
            n: self.n,
            data: self.data.iter().map(|a| *a * *w).collect(),
        }
    }
}

/// Coordinate chart with metric component expressions.
#[derive(Debug, Clone)]
pub struct Chart {
    name: String,
    coord_names: Vec<String>,
    domain: Vec<(f64, f64)>,
    periodic: Vec<bool>,
    exclusion: Vec<f64>,
    /// Row-major `n × n`; both symmetric slots present.
    metric: Vec<Expr>,
}

impl Chart {
    /// Builds and validates a chart. `metric` must be a full `n × n` table;
    /// use [`Chart::from_strings`] to mirror an upper triangle.
    pub fn new(
        name: impl Into<String>,
        coord_names: Vec<String>,
        domain: Vec<(f64, f64)>,
        periodic: Vec<bool>,
        exclusion: Vec<f64>,
        metric: Vec<Vec<Expr>>,
    ) -> Result<Self, GeometryError> {
        let n = coord_names.len();
        let invalid = |msg: String| Err(GeometryError::InvalidChart(msg));
        if !(2..=4).contains(&n) {
            return invalid(format!("dimension must be 2..=4, got {n}"));
        }
        if domain.len() != n || periodic.len() != n || exclusion.len() != n {
            return invalid("domain, periodic and exclusion need one entry per coordinate".into());
        }
        for (i, name) in coord_names.iter().enumerate() {
            if coord_names[..i].contains(name) {
                return invalid(format!("duplicate coordinate name '{name}'"));
            }
        }
        for i in 0..n {
            let (a, b) = domain[i];
            if !(a.is_finite() && b.is_finite() && a < b) {
                return invalid(format!(
                    "domain[{i}] must be a finite interval with lower < upper"
                ));
            }
            let m = exclusion[i];
            if !(m >= 0.0) || (!periodic[i] && a + m >= b - m) {
                return invalid(format!(
                    "exclusion[{i}] must be nonnegative and leave a nonempty interval"
                ));
            }
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return invalid(format!("metric must be a {n}x{n} table"));
        }
        let metric: Vec<Expr> = metric.into_iter().flatten().collect();
        if let Some(e) = metric.iter().find(|e| e.arity() > n) {
            return invalid(format!("metric entry '{e}' references unknown coordinates"));
        }
        Ok(Chart {
            name: name.into(),
            coord_names,
            domain,
            periodic,
            exclusion,
            metric,
        })
    }

    /// Like [`Chart::new`] but parses metric strings; empty entries below the
    /// diagonal mirror the upper triangle.
    pub fn from_strings(
        name: &str,
        coord_names: &[&str],
        domain: &[(f64, f64)],
        periodic: &[bool],
        exclusion: &[f64],
        metric: &[&[&str]],
    ) -> Result<Self, GeometryError> {
        let coords: Vec<String> = coord_names.iter().map(|s| s.to_string()).collect();
        let n = coords.len();
        let mut table = Vec::with_capacity(n);
        for (i, row) in metric.iter().enumerate() {
            let mut parsed = Vec::with_capacity(n);
            for (j, src) in row.iter().enumerate() {
                if j < i && src.is_empty() {
                    parsed.push(Expr::constant(f64::NAN));
                } else {
                    parsed.push(Expr::parse(src, &coords)?);
                }
            }
            table.push(parsed);
        }
        for i in 0..table.len() {
            for j in 0..i.min(table[i].len()) {
                if metric[i][j].is_empty() {
                    table[i][j] = table[j][i].clone();
                }
            }
        }
        Chart::new(
            name,
            coords,
            domain.to_vec(),
            periodic.to_vec(),
            exclusion.to_vec(),
            table,
        )
    }

    /// Unit round sphere: `S²` in polar coordinates `(th, ph)`, `S³` in Hopf
    /// coordinates `(eta, p, q)` with
    /// `g = dη² + sin²η dp² + cos²η dq²`, `η ∈ (0, π/2)`.
    ///
    /// Hopf coordinates degenerate in one direction at a time, which keeps
    /// rounding near the coordinate singularities at the level of `S²`.
    pub fn unit_sphere(n: usize) -> Result<Self, GeometryError> {
        let pi = std::f64::consts::PI;
        match n {
            2 => Chart::from_strings(
                "unit_sphere_2",
                &["th", "ph"],
                &[(0.0, pi), (0.0, 2.0 * pi)],
                &[false, true],
                &[0.0, 0.0],
                &[&["1", "0"], &["", "sin(th)^2"]],
            ),
            3 => Chart::from_strings(
                "unit_sphere_3",
                &["eta", "p", "q"],
                &[(0.0, pi / 2.0), (0.0, 2.0 * pi), (0.0, 2.0 * pi)],
                &[false, true, true],
                &[0.0, 0.0, 0.0],
                &[
                    &["1", "0", "0"],
                    &["", "sin(eta)^2", "0"],
                    &["", "", "cos(eta)^2"],
                ],
            ),
            _ => Err(GeometryError::InvalidChart(format!(
                "unit sphere chart available for n = 2, 3, not {n}"
            ))),
        }
    }

    /// Flat torus `[0, 2π)^n`.
    pub fn flat_torus(n: usize) -> Result<Self, GeometryError> {
        let names = ["x", "y", "z", "w"];
        if !(2..=4).contains(&n) {
            return Err(GeometryError::InvalidChart(format!("torus dimension {n}")));
        }
        let rows: Vec<Vec<&str>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { "1" } else { "0" }).collect())
            .collect();
        let rows: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
        Chart::from_strings(
            &format!("flat_torus_{n}"),
            &names[..n],
            &vec![(0.0, 2.0 * std::f64::consts::PI); n],
            &vec![true; n],
            &vec![0.0; n],
            &rows,
        )
    }

    /// `S²(a) × S¹(b)`: round sphere of radius `a` times a circle of radius `b`.
    pub fn sphere_times_circle(a: f64, b: f64) -> Result<Self, GeometryError> {
        let pi = std::f64::consts::PI;
        let (a2, b2) = (format!("{}", a * a), format!("{}", b * b));
        let sin_term = format!("{a2}*sin(th)^2");
        Chart::from_strings(
            "sphere2_x_circle",
            &["th", "ph", "psi"],
            &[(0.0, pi), (0.0, 2.0 * pi), (0.0, 2.0 * pi)],
            &[false, true, true],
            &[0.0, 0.0, 0.0],
            &[&[&a2, "0", "0"], &["", &sin_term, "0"], &["", "", &b2]],
        )
    }

    /// Ellipsoid of revolution with unit equatorial radius and polar semi-axis
    /// `c`: `g = (cos²θ + c² sin²θ) dθ² + sin²θ dφ²`. Not Einstein for `c ≠ 1`.
    pub fn warped_sphere(c: f64) -> Result<Self, GeometryError> {
        let pi = std::f64::consts::PI;
        let g_thth = format!("cos(th)^2 + {}*sin(th)^2", c * c);
        Chart::from_strings(
            "warped_sphere",
            &["th", "ph"],
            &[(0.0, pi), (0.0, 2.0 * pi)],
            &[false, true],
            &[0.0, 0.0],
            &[&[&g_thth, "0"], &["", "sin(th)^2"]],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn exclusion(&self) -> &[f64] {
        &self.exclusion
    }

    pub fn metric_expr(&self, i: usize, j: usize) -> &Expr {
        &self.metric[i * self.dim() + j]
    }

    pub(crate) fn needs_symmetry_check(&self, i: usize, j: usize) -> bool {
        self.metric_expr(i, j) != self.metric_expr(j, i)
    }

    /// Interval actually sampled along coordinate `i`. Exclusion margins
    /// apply to nonperiodic coordinates only.
    pub fn sampled_interval(&self, i: usize) -> (f64, f64) {
        let (a, b) = self.domain[i];
        if self.periodic[i] {
            (a, b)
        } else {
            (a + self.exclusion[i], b - self.exclusion[i])
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(i, &v)| {
                let (a, b) = self.sampled_interval(i);
                v >= a && v <= b
            })
    }

    /// Metric values at `x` (no derivatives).
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.metric_expr(i, j).eval(x)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Geometric data at `x`; see [`PointFrame`].
    pub fn frame_at(&self, x: &[f64]) -> Result<PointFrame, GeometryError> {
        PointFrame::build(self, x)
    }
}

/// Free function form of [`Chart::frame_at`].
pub fn frame_at(chart: &Chart, x: &[f64]) -> Result<PointFrame, GeometryError> {
    chart.frame_at(x)
}

/// Scalar field given by one expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: Expr,
}

impl ScalarField {
    pub fn new(expr: Expr) -> Self {
        ScalarField { expr }
    }

    pub fn parse(src: &str, chart: &Chart) -> Result<Self, GeometryError> {
        Ok(ScalarField::new(Expr::parse(src, chart.coord_names())?))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Order-4 jet: enough for fourth derivatives of a potential, which
    /// divergence of `£_{∇f}£_{∇f} g` requires.
    pub fn jet_at(&self, x: &[f64]) -> Result<Jet, GeometryError> {
        Ok(self.expr.eval_jet_order(x, MAX_ORDER)?)
    }
}

/// Vector field given by contravariant component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(components: Vec<Expr>) -> Self {
        VectorField { components }
    }

    pub fn parse(srcs: &[&str], chart: &Chart) -> Result<Self, GeometryError> {
        if srcs.len() != chart.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: chart.dim(),
                got: srcs.len(),
            });
        }
        let components = srcs
            .iter()
            .map(|s| Expr::parse(s, chart.coord_names()))
            .collect::<Result<_, _>>()?;
        Ok(VectorField { components })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

/// Symmetric covariant 2-tensor given by its upper triangle, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    n: usize,
    components: Vec<Expr>,
}

impl SymTensorField {
    pub fn new(n: usize, upper: Vec<Expr>) -> Result<Self, GeometryError> {
        if upper.len() != n * (n + 1) / 2 {
            return Err(GeometryError::DimensionMismatch {
                expected: n * (n + 1) / 2,
                got: upper.len(),
            });
        }
        Ok(SymTensorField {
            n,
            components: upper,
        })
    }

    pub fn parse(upper: &[&str], chart: &Chart) -> Result<Self, GeometryError> {
        let parsed = upper
            .iter()
            .map(|s| Expr::parse(s, chart.coord_names()))
            .collect::<Result<_, _>>()?;
        SymTensorField::new(chart.dim(), parsed)
    }

    /// Order-3 jet field.
    pub fn jets_at(&self, x: &[f64]) -> Result<JetMatrix, GeometryError> {
        let n = self.n;
        let mut m = JetMatrix::zeros(n, x.len());
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                let v = self.components[idx].eval_jet_order(x, DEFAULT_ORDER)?;
                m.set(i, j, v);
                m.set(j, i, v);
                idx += 1;
            }
        }
        Ok(m)
    }
}

/// Anything that yields a contravariant vector jet field at a frame.
pub trait VectorSource {
    fn vector_jets(&self, fr: &PointFrame) -> Result<Vec<Jet>, GeometryError>;
}

impl VectorSource for VectorField {
    fn vector_jets(&self, fr: &PointFrame) -> Result<Vec<Jet>, GeometryError> {
        if self.components.len() != fr.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: fr.dim(),
                got: self.components.len(),
            });
        }
        self.components
            .iter()
            .map(|e| Ok(e.eval_jet_order(fr.point(), DEFAULT_ORDER)?))
            .collect()
    }
}

/// The gradient `∇f` of a scalar field, as a vector source.
#[derive(Debug, Clone, Copy)]
pub struct Gradient<'a>(pub &'a ScalarField);

impl VectorSource for Gradient<'_> {
    fn vector_jets(&self, fr: &PointFrame) -> Result<Vec<Jet>, GeometryError> {
        ops::gradient(fr, &self.0.jet_at(fr.point())?)
    }
}

fn vector_values(v: &[Jet]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(Jet::value))
}

/// `∇f` at the frame point.
pub fn grad(f: &ScalarField, fr: &PointFrame) -> Result<DVector<f64>, GeometryError> {
    Ok(vector_values(&Gradient(f).vector_jets(fr)?))
}

/// `∇∇f` at the frame point.
pub fn hessian(f: &ScalarField, fr: &PointFrame) -> Result<DMatrix<f64>, GeometryError> {
    Ok(ops::hessian(fr, &f.jet_at(fr.point())?)?.values())
}

/// `Δf` at the frame point.
pub fn laplacian(f: &ScalarField, fr: &PointFrame) -> Result<f64, GeometryError> {
    Ok(ops::laplacian(fr, &f.jet_at(fr.point())?)?.value())
}

/// `£_ξ g` at the frame point.
pub fn lie_metric(xi: &dyn VectorSource, fr: &PointFrame) -> Result<DMatrix<f64>, GeometryError> {
    Ok(ops::lie_metric(fr, &xi.vector_jets(fr)?)?.values())
}

/// `£_ξ £_ξ g` at the frame point.
pub fn lie2_metric(xi: &dyn VectorSource, fr: &PointFrame) -> Result<DMatrix<f64>, GeometryError> {
    Ok(ops::lie2_metric(fr, &xi.vector_jets(fr)?)?.values())
}

/// `∇_ξ ξ` at the frame point.
pub fn cov_accel(xi: &dyn VectorSource, fr: &PointFrame) -> Result<DVector<f64>, GeometryError> {
    Ok(vector_values(&ops::covariant_acceleration(
        fr,
        &xi.vector_jets(fr)?,
    )?))
}

/// `div ξ` at the frame point.
pub fn div_vector(xi: &dyn VectorSource, fr: &PointFrame) -> Result<f64, GeometryError> {
    Ok(ops::div_vector(fr, &xi.vector_jets(fr)?)?.value())
}

/// `div T` (a covector) for a tensor field supplied as jets.
pub fn div_tensor(t: &JetMatrix, fr: &PointFrame) -> Result<DVector<f64>, GeometryError> {
    Ok(vector_values(&ops::div_tensor(fr, t)?))
}

/// `g^{ij} T_ij` for a tensor value.
pub fn trace_g(t: &DMatrix<f64>, fr: &PointFrame) -> f64 {
    (fr.inverse_metric() * t).trace()
}

/// `g^{ia} g^{jb} T_ij T_ab` for a tensor value.
pub fn norm2(t: &DMatrix<f64>, fr: &PointFrame) -> f64 {
    let m = fr.inverse_metric() * t;
    (&m * &m).trace()
}

/// `g(v, v)` for a vector value.
pub fn norm2_vector(v: &DVector<f64>, fr: &PointFrame) -> f64 {
    (v.transpose() * fr.metric() * v)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn sphere_christoffels() {
        let s2 = Chart::unit_sphere(2).unwrap();
        let fr = s2.frame_at(&[PI / 4.0, 0.3]).unwrap();
        close(fr.christoffel(0, 1, 1), -0.5, 1e-15);
        close(fr.christoffel(1, 0, 1), 1.0, 1e-15);
        close(fr.christoffel(1, 1, 0), 1.0, 1e-15);
        close(fr.christoffel(0, 0, 0), 0.0, 1e-15);
    }

    #[test]
    fn sphere_ricci_and_scalar() {
        let s2 = Chart::unit_sphere(2).unwrap();
        for th in [0.2, 0.7, 1.3, 2.9] {
            let fr = s2.frame_at(&[th, 1.0]).unwrap();
            let ric = fr.ricci();
            close(ric[(0, 0)], 1.0, 1e-12);
            close(ric[(1, 1)], th.sin().powi(2), 1e-12);
            close(ric[(0, 1)], 0.0, 1e-12);
            close(fr.scalar_curvature(), 2.0, 1e-12);
        }
    }

    #[test]
    fn torus_is_flat() {
        let t2 = Chart::flat_torus(2).unwrap();
        let fr = t2.frame_at(&[1.0, 2.0]).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(fr.christoffel(k, i, j), 0.0);
                }
            }
        }
        assert_eq!(fr.scalar_curvature(), 0.0);
        assert_eq!(fr.ricci(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn scalar_curvature_recomputes_from_values() {
        let w = Chart::warped_sphere(1.5).unwrap();
        let fr = w.frame_at(&[0.8, 0.1]).unwrap();
        let r = (fr.inverse_metric() * fr.ricci()).trace();
        assert!((r - fr.scalar_curvature()).abs() <= 1e-10 * r.abs());
        assert!((fr.scalar_curvature() - 2.0).abs() > 1e-3);
    }

    #[test]
    fn gradient_examples() {
        let s2 = Chart::unit_sphere(2).unwrap();
        let f = ScalarField::parse("cos(th)", &s2).unwrap();
        let fr = s2.frame_at(&[PI / 2.0, 0.4]).unwrap();
        let g = grad(&f, &fr).unwrap();
        close(g[0], -1.0, 1e-15);
        close(g[1], 0.0, 1e-15);

        let c = ScalarField::parse("3.5", &s2).unwrap();
        assert_eq!(grad(&c, &fr).unwrap().norm(), 0.0);

        let t2 = Chart::flat_torus(2).unwrap();
        let f = ScalarField::parse("cos(x)", &t2).unwrap();
        let fr = t2.frame_at(&[0.0, 1.0]).unwrap();
        assert_eq!(grad(&f, &fr).unwrap().norm(), 0.0);
    }

    #[test]
    fn hessian_and_laplacian_examples() {
        let s2 = Chart::unit_sphere(2).unwrap();
        let f = ScalarField::parse("cos(th)", &s2).unwrap();
        let th = PI / 3.0;
        let fr = s2.frame_at(&[th, 0.4]).unwrap();
        let h = hessian(&f, &fr).unwrap();
        close(h[(0, 0)], -0.5, 1e-14);
        close(h[(0, 1)], 0.0, 1e-14);
        close(h[(1, 1)], -0.5 * th.sin().powi(2), 1e-14);
        close(laplacian(&f, &fr).unwrap(), -1.0, 1e-14);

        let t2 = Chart::flat_torus(2).unwrap();
        let f = ScalarField::parse("cos(x)", &t2).unwrap();
        let fr = t2.frame_at(&[0.7, 1.0]).unwrap();
        let h = hessian(&f, &fr).unwrap();
        close(h[(0, 0)], -(0.7f64).cos(), 1e-15);
        close(h[(1, 1)], 0.0, 1e-15);
        close(laplacian(&f, &fr).unwrap(), -(0.7f64).cos(), 1e-15);

        let c = ScalarField::parse("2", &t2).unwrap();
        assert_eq!(laplacian(&c, &fr).unwrap(), 0.0);
    }

    #[test]
    fn lie_metric_examples() {
        let s2 = Chart::unit_sphere(2).unwrap();
        let f = ScalarField::parse("cos(th)", &s2).unwrap();
        let fr = s2.frame_at(&[PI / 3.0, 0.4]).unwrap();
        let l = lie_metric(&Gradient(&f), &fr).unwrap();
        close(l[(0, 0)], -1.0, 1e-14);
        close(l[(1, 1)], -0.75, 1e-14);
        close(l[(0, 1)], 0.0, 1e-14);

        let zero = VectorField::parse(&["0", "0"], &s2).unwrap();
        assert_eq!(lie_metric(&zero, &fr).unwrap().norm(), 0.0);
        assert_eq!(lie2_metric(&zero, &fr).unwrap().norm(), 0.0);

        let t2 = Chart::flat_torus(2).unwrap();
        let dx = VectorField::parse(&["1", "0"], &t2).unwrap();
        let fr = t2.frame_at(&[0.7, 1.0]).unwrap();
        assert_eq!(lie_metric(&dx, &fr).unwrap().norm(), 0.0);
        assert_eq!(lie2_metric(&dx, &fr).unwrap().norm(), 0.0);
        assert_eq!(cov_accel(&dx, &fr).unwrap().norm(), 0.0);
    }

    #[test]
    fn divergence_of_scaled_metric() {
        // T = ψ g with ψ = −2 cos θ: div T = dψ, so (div T)_θ = 2 sin θ.
        let s2 = Chart::unit_sphere(2).unwrap();
        let t = SymTensorField::parse(&["-2*cos(th)", "0", "-2*cos(th)*sin(th)^2"], &s2).unwrap();
        let fr = s2.frame_at(&[PI / 2.0, 0.4]).unwrap();
        let d = div_tensor(&t.jets_at(fr.point()).unwrap(), &fr).unwrap();
        close(d[0], 2.0, 1e-14);
        close(d[1], 0.0, 1e-14);
    }

    #[test]
    fn div_tensor_needs_jets() {
        let s2 = Chart::unit_sphere(2).unwrap();
        let fr = s2.frame_at(&[1.0, 0.4]).unwrap();
        let mut flat = JetMatrix::zeros(2, 2);
        for i in 0..2 {
            flat.set(i, i, Jet::constant_with_order(2, 0, 1.0));
        }
        assert!(matches!(
            div_tensor(&flat, &fr),
            Err(GeometryError::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn metric_trace_and_norm() {
        let s3 = Chart::unit_sphere(3).unwrap();
        let fr = s3.frame_at(&[0.5, 1.1, 2.0]).unwrap();
        close(fr.scalar_curvature(), 6.0, 1e-13);
        close(trace_g(&fr.metric(), &fr), 3.0, 1e-14);
        close(norm2(&fr.metric(), &fr), 3.0, 1e-14);
    }

    #[test]
    fn rejects_bad_points_and_metrics() {
        let s2 = Chart::unit_sphere(2).unwrap();
        assert!(matches!(
            s2.frame_at(&[4.0, 0.0]),
            Err(GeometryError::OutsideDomain { .. })
        ));
        assert!(matches!(
            s2.frame_at(&[1.0]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        let bad = Chart::from_strings(
            "bad",
            &["x", "y"],
            &[(0.0, 1.0), (0.0, 1.0)],
            &[false, false],
            &[0.0, 0.0],
            &[&["1", "2"], &["", "1"]],
        )
        .unwrap();
        assert!(matches!(
            bad.frame_at(&[0.5, 0.5]),
            Err(GeometryError::NotPositiveDefinite { .. })
        ));
        let asym = Chart::from_strings(
            "asym",
            &["x", "y"],
            &[(0.0, 1.0), (0.0, 1.0)],
            &[false, false],
            &[0.0, 0.0],
            &[&["2", "x"], &["y", "2"]],
        )
        .unwrap();
        assert!(matches!(
            asym.frame_at(&[0.5, 0.25]),
            Err(GeometryError::AsymmetricMetric { .. })
        ));
        assert!(asym.frame_at(&[0.5, 0.5]).is_ok());
    }
}
