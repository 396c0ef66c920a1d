use super::report::{ReportBuilder, Scale};
use super::sample::{sample_node, GradientSample, NodeSample, Params, PotentialSample};
use super::{CheckId, CheckReport, Potential, SolitonError, SolitonKind, SolitonSpec, Tolerances};
use crate::geometry::Chart;
use crate::quadrature::{Grid, GridSpec, QuadratureError};

/// Extremes of the curvature quantities over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSummary {
    pub r_min: f64,
    pub r_max: f64,
    /// `max ‖Ric − (r/n) g‖`
    pub einstein_deviation: f64,
    /// `max ‖div Ric − dr/2‖`
    pub schur_residual: f64,
}

/// Node samples of every quantity the checks need, computed once per grid.
#[derive(Debug, Clone)]
pub struct Evaluation {
    dim: usize,
    grid: Grid,
    potential: Option<Potential>,
    spec: Option<SolitonSpec>,
    samples: Vec<NodeSample>,
}

impl Evaluation {
    /// Curvature quantities only.
    pub fn new(chart: &Chart, grid: &GridSpec) -> Result<Self, SolitonError> {
        Self::build(chart, None, None, grid)
    }

    /// Curvature plus everything derived from a potential field, without
    /// soliton parameters.
    pub fn with_potential(
        chart: &Chart,
        potential: &Potential,
        grid: &GridSpec,
    ) -> Result<Self, SolitonError> {
        Self::build(chart, Some(potential), None, grid)
    }

    pub fn with_soliton(
        chart: &Chart,
        spec: &SolitonSpec,
        grid: &GridSpec,
    ) -> Result<Self, SolitonError> {
        Self::build(chart, Some(&spec.potential), Some(spec), grid)
    }

    fn build(
        chart: &Chart,
        potential: Option<&Potential>,
        spec: Option<&SolitonSpec>,
        grid: &GridSpec,
    ) -> Result<Self, SolitonError> {
        let grid = Grid::build(chart, grid)?;
        let params = spec.map(Params::from);
        let samples = grid
            .map_nodes(|x| {
                let fr = chart.frame_at(x)?;
                sample_node(&fr, potential, params)
            })
            .map_err(|(point, e)| QuadratureError::NodeFailure {
                point,
                message: e.to_string(),
            })?;
        Ok(Evaluation {
            dim: chart.dim(),
            grid,
            potential: potential.cloned(),
            spec: spec.cloned(),
            samples,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> Option<&SolitonSpec> {
        self.spec.as_ref()
    }

    pub fn curvature_summary(&self) -> CurvatureSummary {
        let mut s = CurvatureSummary {
            r_min: f64::INFINITY,
            r_max: f64::NEG_INFINITY,
            einstein_deviation: 0.0,
            schur_residual: 0.0,
        };
        for n in &self.samples {
            s.r_min = s.r_min.min(n.r);
            s.r_max = s.r_max.max(n.r);
            s.einstein_deviation = s.einstein_deviation.max(n.einstein_dev);
            s.schur_residual = s.schur_residual.max(n.schur);
        }
        s
    }

    /// Every check that the available data support, in catalog order.
    pub fn applicable_checks(&self) -> Vec<CheckId> {
        CheckId::ALL
            .into_iter()
            .filter(|&id| self.requirements(id).is_ok())
            .collect()
    }

    fn requirements(&self, id: CheckId) -> Result<(), SolitonError> {
        use CheckId::*;
        let check = id.as_str();
        let needs_gradient = !matches!(id, TraceLie2 | RemarkCsc | Schur | TheoremC);
        let needs_soliton = !matches!(id, TraceLie2 | Bochner | DivLie | Schur);
        let needs_lambda = !matches!(
            id,
            TraceLie2 | Bochner | DivLie | Schur | ContractedTrace | RemarkCsc
        );
        if id != Schur && self.potential.is_none() {
            return Err(SolitonError::MissingSoliton { check });
        }
        if needs_gradient && !self.potential.as_ref().is_some_and(Potential::is_gradient) {
            return Err(SolitonError::NotGradient { check });
        }
        if needs_soliton && self.spec.is_none() {
            return Err(SolitonError::MissingSoliton { check });
        }
        if needs_lambda && self.spec.as_ref().is_some_and(|s| s.lambda == 0.0) {
            return Err(SolitonError::ZeroLambda { check });
        }
        Ok(())
    }

    pub fn report(&self, id: CheckId, tol: &Tolerances) -> Result<CheckReport, SolitonError> {
        self.requirements(id)?;
        let mut b = ReportBuilder::new(id.as_str(), *tol, self.grid.spec().counts.clone());
        match id {
            CheckId::TraceLie2 => self.trace_lie2(&mut b),
            CheckId::Bochner => self.bochner(&mut b),
            CheckId::LemmaHessian => self.lemma_hessian(&mut b),
            CheckId::DivLie => self.div_lie(&mut b),
            CheckId::PropP2 => self.prop_p2(&mut b),
            CheckId::ContractedTrace => self.contracted_trace(&mut b),
            CheckId::RemarkCsc => self.remark_csc(&mut b),
            CheckId::Schur => self.schur(&mut b),
            CheckId::TheoremC => self.theorem_c(&mut b),
            CheckId::Theorem1 => self.theorem_bochner_bound(&mut b, SolitonKind::HyperbolicYamabe),
            CheckId::Theorem2 => self.theorem_bochner_bound(&mut b, SolitonKind::HyperbolicRicci),
            CheckId::Corollary => self.corollary(&mut b),
            CheckId::SquaredDeficit => self.squared_deficit(&mut b),
            CheckId::TheoremN2 => self.theorem_n2(&mut b),
            CheckId::PropCsc => self.prop_csc(&mut b),
        }
        Ok(b.finish())
    }

    fn spec_params(&self) -> (SolitonKind, f64, f64) {
        let s = self.spec.as_ref().expect("requirements checked");
        (s.kind, s.lambda, s.mu)
    }

    fn pot(&self, k: usize) -> &PotentialSample {
        self.samples[k]
            .potential
            .as_ref()
            .expect("requirements checked")
    }

    fn grad(&self, k: usize) -> &GradientSample {
        self.pot(k).gradient.as_ref().expect("requirements checked")
    }

    /// Max of `|q|` over nodes, recording the worst node.
    fn pointwise(
        &self,
        b: &mut ReportBuilder,
        name: &str,
        conditional: bool,
        q: impl Fn(usize) -> f64,
    ) {
        self.pointwise_at(b, name, conditional, Scale::Pointwise, q);
    }

    /// Conclusions built from `dr` (third metric derivatives) lose accuracy
    /// near coordinate poles and are held to the conclusion tolerance.
    fn pointwise_conclusion(&self, b: &mut ReportBuilder, name: &str, q: impl Fn(usize) -> f64) {
        self.pointwise_at(b, name, true, Scale::Integral, q);
    }

    fn pointwise_at(
        &self,
        b: &mut ReportBuilder,
        name: &str,
        conditional: bool,
        scale: Scale,
        q: impl Fn(usize) -> f64,
    ) {
        let mut worst = (0.0, 0usize);
        for k in 0..self.samples.len() {
            let v = q(k).abs();
            if !(v <= worst.0) {
                worst = (v, k);
            }
        }
        if conditional {
            b.conditional(name, worst.0, scale);
        } else {
            b.unconditional(name, worst.0, Scale::Pointwise);
        }
        b.worst_node(worst.0, self.grid.node(worst.1));
    }

    fn max_abs(&self, q: impl Fn(usize) -> f64) -> f64 {
        (0..self.samples.len())
            .map(|k| q(k).abs())
            .fold(0.0, f64::max)
    }

    fn integral(&self, q: impl Fn(usize) -> f64) -> f64 {
        let values: Vec<f64> = (0..self.samples.len()).map(q).collect();
        self.grid.weighted_sum(&values)
    }

    fn volume(&self) -> f64 {
        self.grid.weighted_sum(&vec![1.0; self.samples.len()])
    }

    /// `max |q − mean(q)|` with the volume-weighted mean.
    fn deviation_from_mean(&self, q: impl Fn(usize) -> f64) -> f64 {
        let mean = self.integral(&q) / self.volume();
        self.max_abs(|k| q(k) - mean)
    }

    fn soliton_hypothesis(&self, b: &mut ReportBuilder) {
        let res = self.max_abs(|k| self.pot(k).residual_norm.unwrap_or(f64::NAN));
        b.hypothesis("soliton_residual", res);
    }

    fn trace_free_hypothesis(&self, b: &mut ReportBuilder) {
        b.hypothesis("trace_lie2", self.max_abs(|k| self.pot(k).trace_lie2));
    }

    fn divergence_free_hypothesis(&self, b: &mut ReportBuilder) {
        b.hypothesis("div_lie2", self.max_abs(|k| self.pot(k).div_lie2));
    }

    fn structural_kind(&self, b: &mut ReportBuilder, required: SolitonKind) {
        let (kind, _, _) = self.spec_params();
        if kind != required {
            b.not_applicable(format!(
                "statement concerns {required} solitons, data are {kind}"
            ));
        }
    }

    fn dim_f(&self) -> f64 {
        self.dim as f64
    }

    /// `r ≡ μ` for Yamabe data, `r ≡ nμ` for Ricci data: what `Δf = 0` forces
    /// through the contracted equation.
    fn scalar_curvature_conclusion(&self, b: &mut ReportBuilder) {
        let (kind, _, mu) = self.spec_params();
        let target = match kind {
            SolitonKind::HyperbolicYamabe => mu,
            SolitonKind::HyperbolicRicci => self.dim_f() * mu,
        };
        let dev = self.max_abs(|k| self.samples[k].r - target);
        b.conditional("scalar_curvature_constant", dev, Scale::Integral);
    }

    fn hessian_conclusion(&self, b: &mut ReportBuilder) {
        let hess = self.integral(|k| self.grad(k).hess_norm2);
        b.integral("hess_norm2", hess);
        b.conditional("hess_norm2", hess, Scale::Integral);
    }

    fn trace_lie2(&self, b: &mut ReportBuilder) {
        self.pointwise(b, "trace_formula", false, |k| {
            let p = self.pot(k);
            p.trace_lie2 - 2.0 * (p.nabla_xi_norm2 + p.div_accel - p.ric_xi_xi)
        });
    }

    fn bochner(&self, b: &mut ReportBuilder) {
        self.pointwise(b, "bochner", false, |k| {
            let p = self.pot(k);
            let g = self.grad(k);
            g.bochner_lhs - (g.hess_norm2 + p.ric_xi_xi + g.grad_lap_dot_grad)
        });
    }

    fn lemma_hessian(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        let (kind, lambda, _) = self.spec_params();
        let c = match kind {
            SolitonKind::HyperbolicYamabe => self.dim_f() / (2.0 * lambda),
            SolitonKind::HyperbolicRicci => 1.0 / (2.0 * lambda),
        };
        self.pointwise(b, "hessian_ricci_form", true, |k| {
            let (p, g) = (self.pot(k), self.grad(k));
            g.bochner_lhs - (g.hess_norm2 + p.ric_xi_xi - c * g.grad_f_dot_grad_r)
        });
        self.pointwise(b, "double_hessian_form", true, |k| {
            let (p, g) = (self.pot(k), self.grad(k));
            g.bochner_lhs - (2.0 * g.hess_norm2 + p.div_accel - c * g.grad_f_dot_grad_r)
        });
        self.pointwise(b, "double_ricci_form", true, |k| {
            let (p, g) = (self.pot(k), self.grad(k));
            g.bochner_lhs - (2.0 * p.ric_xi_xi - p.div_accel - c * g.grad_f_dot_grad_r)
        });
        self.pointwise(b, "contracted_trace", true, |k| {
            self.grad(k).contracted_trace.unwrap_or(f64::NAN)
        });
    }

    fn div_lie(&self, b: &mut ReportBuilder) {
        self.pointwise(b, "div_lie_formula", false, |k| {
            self.grad(k).div_lie_formula
        });
        match &self.spec {
            None => {
                b.note("no soliton data: conclusions not evaluated".to_string());
            }
            Some(s) if s.lambda == 0.0 => {
                b.note("λ = 0: conclusions not evaluated".to_string());
            }
            Some(_) => {
                self.soliton_hypothesis(b);
                b.hypothesis(
                    "grad_trace_lie2",
                    self.max_abs(|k| self.pot(k).grad_trace_lie2),
                );
                self.divergence_free_hypothesis(b);
                self.pointwise_conclusion(b, "ricci_gradient_conclusion", |k| {
                    self.grad(k).div_lie_conclusion.unwrap_or(f64::NAN)
                });
            }
        }
    }

    fn prop_p2(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        self.divergence_free_hypothesis(b);
        let (kind, _, _) = self.spec_params();
        let n = self.dim_f();
        self.pointwise(b, "reduced_bochner", true, |k| {
            let (p, g) = (self.pot(k), self.grad(k));
            let rhs = match kind {
                SolitonKind::HyperbolicYamabe => {
                    (n - 2.0) / (n - 1.0) * g.hess_norm2 - p.div_accel / (n - 1.0)
                }
                SolitonKind::HyperbolicRicci => -p.div_accel,
            };
            g.bochner_lhs - rhs
        });
    }

    fn contracted_trace(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        self.pointwise(b, "contracted_trace", true, |k| {
            self.grad(k).contracted_trace.unwrap_or(f64::NAN)
        });
    }

    fn remark_csc(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        b.hypothesis(
            "div_xi_deviation",
            self.deviation_from_mean(|k| self.pot(k).div_xi),
        );
        b.hypothesis(
            "trace_lie2_deviation",
            self.deviation_from_mean(|k| self.pot(k).trace_lie2),
        );
        let dev = self.deviation_from_mean(|k| self.samples[k].r);
        b.conditional("scalar_curvature_deviation", dev, Scale::Pointwise);
    }

    fn schur(&self, b: &mut ReportBuilder) {
        self.pointwise(b, "schur", false, |k| self.samples[k].schur);
        b.diagnostic(
            "einstein_deviation",
            self.max_abs(|k| self.samples[k].einstein_dev),
        );
    }

    fn theorem_c(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        let ric = self.integral(|k| self.pot(k).ric_xi_xi);
        b.integral("ric_xi_xi", ric);
        b.integral(
            "nabla_xi_norm2",
            self.integral(|k| self.pot(k).nabla_xi_norm2),
        );
        b.inequality("ric_xi_xi_nonpositive", 0.0, ric);
        let killing = self.max_abs(|k| self.pot(k).killing);
        b.conditional("killing", killing, Scale::Integral);
    }

    /// Shared by T-1 (`c = n/2λ`, Yamabe) and T-2 (`c = 1/2λ`, Ricci).
    fn theorem_bochner_bound(&self, b: &mut ReportBuilder, statement: SolitonKind) {
        self.structural_kind(b, statement);
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        let (_, lambda, _) = self.spec_params();
        let c = match statement {
            SolitonKind::HyperbolicYamabe => self.dim_f() / (2.0 * lambda),
            SolitonKind::HyperbolicRicci => 1.0 / (2.0 * lambda),
        };
        let ric = self.integral(|k| self.pot(k).ric_xi_xi);
        let gfr = self.integral(|k| self.grad(k).grad_f_dot_grad_r);
        b.integral("ric_grad_f", ric);
        b.integral("grad_f_dot_grad_r", gfr);
        b.inequality("ricci_bound", ric, c * gfr);
        self.hessian_conclusion(b);
        self.scalar_curvature_conclusion(b);
    }

    fn corollary(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        let (_, lambda, _) = self.spec_params();
        let gfr = self.integral(|k| self.grad(k).grad_f_dot_grad_r);
        b.integral("grad_f_dot_grad_r", gfr);
        b.inequality("lambda_grad_f_dot_grad_r_nonpositive", 0.0, lambda * gfr);
        self.hessian_conclusion(b);
        self.scalar_curvature_conclusion(b);
    }

    fn squared_deficit(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        let (kind, lambda, mu) = self.spec_params();
        let n = self.dim_f();
        let deficit = match kind {
            SolitonKind::HyperbolicYamabe => {
                n * n / (4.0 * lambda * lambda)
                    * self.integral(|k| (mu - self.samples[k].r).powi(2))
            }
            SolitonKind::HyperbolicRicci => {
                1.0 / (4.0 * lambda * lambda)
                    * self.integral(|k| (n * mu - self.samples[k].r).powi(2))
            }
        };
        let ric = self.integral(|k| self.pot(k).ric_xi_xi);
        b.integral("ric_grad_f", ric);
        b.integral("squared_deficit", deficit);
        b.integral(
            "lap_f_squared",
            self.integral(|k| self.grad(k).lap_f.powi(2)),
        );
        b.inequality("ricci_bound", ric, deficit);
        self.hessian_conclusion(b);
        self.scalar_curvature_conclusion(b);
    }

    fn theorem_n2(&self, b: &mut ReportBuilder) {
        self.structural_kind(b, SolitonKind::HyperbolicYamabe);
        if self.dim <= 2 {
            b.not_applicable(format!("statement needs n > 2, chart has n = {}", self.dim));
        }
        self.soliton_hypothesis(b);
        self.trace_free_hypothesis(b);
        self.divergence_free_hypothesis(b);
        self.hessian_conclusion(b);
    }

    fn prop_csc(&self, b: &mut ReportBuilder) {
        self.soliton_hypothesis(b);
        self.divergence_free_hypothesis(b);
        let (_, lambda, _) = self.spec_params();
        let ric = self.integral(|k| self.grad(k).ric_grad_f_grad_r);
        b.integral("ric_grad_f_grad_r", ric);
        b.inequality("lambda_ric_grad_f_grad_r_nonpositive", 0.0, lambda * ric);
        b.diagnostic(
            "grad_trace_lie2",
            self.max_abs(|k| self.pot(k).grad_trace_lie2),
        );
        self.pointwise_conclusion(b, "ric_grad_r_identity", |k| {
            self.grad(k).csc_identity.unwrap_or(f64::NAN)
        });
        let dev = self.deviation_from_mean(|k| self.samples[k].r);
        b.conditional("scalar_curvature_deviation", dev, Scale::Integral);
    }
}

/// `trace £_ξ£_ξ g = 2(‖∇ξ‖² + div(∇_ξ ξ) − Ric(ξ, ξ))` at every node.
pub fn identity_trace_lie2(
    xi: &Potential,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    Evaluation::with_potential(chart, xi, grid)?.report(CheckId::TraceLie2, &Tolerances::default())
}

/// Bochner's formula for `f`.
pub fn identity_bochner(
    f: &crate::geometry::ScalarField,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    Evaluation::with_potential(chart, &Potential::Gradient(f.clone()), grid)?
        .report(CheckId::Bochner, &Tolerances::default())
}

pub fn identity_lemma_hessian(
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    evaluate(CheckId::LemmaHessian, spec, chart, grid)
}

pub fn identity_div_lie(
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    evaluate(CheckId::DivLie, spec, chart, grid)
}

pub fn identity_prop_p2(
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    evaluate(CheckId::PropP2, spec, chart, grid)
}

pub fn remark_csc(
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    evaluate(CheckId::RemarkCsc, spec, chart, grid)
}

/// One of the theorem tags `T-C`, `T-1`, `T-2`, `T-COR`, `T-SQ`, `T-N2`,
/// `P-CSC`; any other check id is evaluated the same way.
pub fn evaluate_theorem(
    id: CheckId,
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    evaluate(id, spec, chart, grid)
}

fn evaluate(
    id: CheckId,
    spec: &SolitonSpec,
    chart: &Chart,
    grid: &GridSpec,
) -> Result<CheckReport, SolitonError> {
    Evaluation::with_soliton(chart, spec, grid)?.report(id, &Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ScalarField, VectorField};
    use crate::soliton::Verdict;

    fn sphere() -> Chart {
        Chart::unit_sphere(2).unwrap()
    }

    fn grid(chart: &Chart) -> GridSpec {
        GridSpec::with_counts(chart, vec![12; chart.dim()])
    }

    fn gradient_spec(
        chart: &Chart,
        f: &str,
        kind: SolitonKind,
        lambda: f64,
        mu: f64,
    ) -> SolitonSpec {
        SolitonSpec::new(
            kind,
            Potential::Gradient(ScalarField::parse(f, chart).unwrap()),
            lambda,
            mu,
        )
    }

    #[test]
    fn trivial_sphere_passes_every_check() {
        let s2 = sphere();
        for (kind, mu) in [
            (SolitonKind::HyperbolicYamabe, 2.0),
            (SolitonKind::HyperbolicRicci, 1.0),
        ] {
            let spec = gradient_spec(&s2, "0", kind, 1.0, mu);
            let ev = Evaluation::with_soliton(&s2, &spec, &grid(&s2)).unwrap();
            for id in CheckId::ALL {
                let r = ev.report(id, &Tolerances::default()).unwrap();
                assert_eq!(r.verdict, Verdict::IdentityHolds, "{kind} {id}: {r:?}");
            }
        }
    }

    #[test]
    fn non_soliton_fails_hypotheses() {
        let s2 = sphere();
        let spec = gradient_spec(&s2, "cos(th)", SolitonKind::HyperbolicYamabe, 1.0, 2.0);
        let ev = Evaluation::with_soliton(&s2, &spec, &grid(&s2)).unwrap();
        for id in [
            CheckId::LemmaHessian,
            CheckId::PropP2,
            CheckId::RemarkCsc,
            CheckId::TheoremC,
            CheckId::Theorem1,
            CheckId::TheoremN2,
            CheckId::PropCsc,
        ] {
            let r = ev.report(id, &Tolerances::default()).unwrap();
            assert_eq!(r.verdict, Verdict::HypothesisNotMet, "{id}");
            assert!(r.hypothesis_residuals["soliton_residual"] > 0.1);
        }
        for id in [CheckId::TraceLie2, CheckId::Bochner, CheckId::Schur] {
            let r = ev.report(id, &Tolerances::default()).unwrap();
            assert_eq!(r.verdict, Verdict::IdentityHolds, "{id}");
        }
    }

    #[test]
    fn structural_notes() {
        let s2 = sphere();
        let spec = gradient_spec(&s2, "0", SolitonKind::HyperbolicRicci, 1.0, 1.0);
        let ev = Evaluation::with_soliton(&s2, &spec, &grid(&s2)).unwrap();
        let r = ev
            .report(CheckId::TheoremN2, &Tolerances::default())
            .unwrap();
        assert!(!r.applicable);
        assert_eq!(r.notes.len(), 2);
    }

    #[test]
    fn requirement_errors() {
        let t2 = Chart::flat_torus(2).unwrap();
        let g = grid(&t2);
        let xi = Potential::Vector(VectorField::parse(&["1", "0"], &t2).unwrap());
        let spec = SolitonSpec::new(SolitonKind::HyperbolicYamabe, xi.clone(), 1.0, 0.0);
        let ev = Evaluation::with_soliton(&t2, &spec, &g).unwrap();
        assert!(matches!(
            ev.report(CheckId::Theorem1, &Tolerances::default()),
            Err(SolitonError::NotGradient { check: "T-1" })
        ));
        assert_eq!(
            ev.report(CheckId::TheoremC, &Tolerances::default())
                .unwrap()
                .verdict,
            Verdict::IdentityHolds
        );
        let zero = SolitonSpec::new(SolitonKind::HyperbolicYamabe, xi, 0.0, 0.0);
        let ev = Evaluation::with_soliton(&t2, &zero, &g).unwrap();
        assert!(matches!(
            ev.report(CheckId::TheoremC, &Tolerances::default()),
            Err(SolitonError::ZeroLambda { .. })
        ));
        let bare = Evaluation::new(&t2, &g).unwrap();
        assert!(matches!(
            bare.report(CheckId::TraceLie2, &Tolerances::default()),
            Err(SolitonError::MissingSoliton { .. })
        ));
        assert_eq!(bare.applicable_checks(), vec![CheckId::Schur]);
    }

    #[test]
    fn torus_translation_trivial() {
        let t2 = Chart::flat_torus(2).unwrap();
        let xi = Potential::Vector(VectorField::parse(&["1", "0"], &t2).unwrap());
        let spec = SolitonSpec::new(SolitonKind::HyperbolicYamabe, xi, 1.0, 0.0);
        let r = remark_csc(&spec, &t2, &grid(&t2)).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityHolds);
        assert_eq!(r.residuals["scalar_curvature_deviation"], 0.0);
    }

    #[test]
    fn warped_sphere_schur() {
        let w = Chart::warped_sphere(0.7).unwrap();
        let ev = Evaluation::new(&w, &grid(&w)).unwrap();
        let r = ev.report(CheckId::Schur, &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityHolds, "{r:?}");
        let s = ev.curvature_summary();
        assert!(s.r_max - s.r_min > 0.1);
    }
}
