use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IdentityHolds,
    HypothesisNotMet,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pointwise identity residuals.
    pub pointwise: f64,
    /// Integral conclusions such as `∫‖∇∇f‖²`.
    pub integral: f64,
    /// Hypothesis gating, including the slack band of integral inequalities.
    pub hypothesis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pointwise: 1e-8,
            integral: 1e-7,
            hypothesis: 1e-7,
        }
    }
}

/// Outcome of one named check. Field names are part of the report format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    /// Largest identity or conclusion residual.
    pub max_residual: f64,
    pub residuals: BTreeMap<String, f64>,
    pub hypothesis_residuals: BTreeMap<String, f64>,
    pub integrals: BTreeMap<String, f64>,
    /// Reported but never gating.
    pub diagnostics: BTreeMap<String, f64>,
    /// An integral inequality landed inside the slack band.
    pub boundary_case: bool,
    /// `false` when the data fall outside the statement's structural
    /// assumptions (soliton kind, dimension).
    pub applicable: bool,
    pub notes: Vec<String>,
    pub grid: Vec<usize>,
    /// Node where the largest pointwise residual occurred.
    pub worst_node: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Scale {
    Pointwise,
    Integral,
}

/// Collects residuals and decides the verdict.
///
/// * any unconditional residual above tolerance: `violated`
/// * otherwise any hypothesis residual above tolerance: `hypothesis-not-met`
/// * otherwise any conditional residual above tolerance: `violated` when the
///   statement applies, `hypothesis-not-met` when a structural assumption
///   fails
/// * otherwise `identity-holds`
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    check: String,
    tol: Tolerances,
    unconditional: Vec<(String, f64, Scale)>,
    conditional: Vec<(String, f64, Scale)>,
    hypotheses: BTreeMap<String, f64>,
    integrals: BTreeMap<String, f64>,
    diagnostics: BTreeMap<String, f64>,
    boundary_case: bool,
    applicable: bool,
    notes: Vec<String>,
    grid: Vec<usize>,
    worst: Option<(f64, Vec<f64>)>,
}

impl ReportBuilder {
    pub fn new(check: &str, tol: Tolerances, grid: Vec<usize>) -> Self {
        ReportBuilder {
            check: check.to_string(),
            tol,
            unconditional: Vec::new(),
            conditional: Vec::new(),
            hypotheses: BTreeMap::new(),
            integrals: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            boundary_case: false,
            applicable: true,
            notes: Vec::new(),
            grid,
            worst: None,
        }
    }

    fn tol_for(&self, scale: Scale) -> f64 {
        match scale {
            Scale::Pointwise => self.tol.pointwise,
            Scale::Integral => self.tol.integral,
        }
    }

    pub fn unconditional(&mut self, name: &str, value: f64, scale: Scale) -> &mut Self {
        self.unconditional.push((name.to_string(), value, scale));
        self
    }

    pub fn conditional(&mut self, name: &str, value: f64, scale: Scale) -> &mut Self {
        self.conditional.push((name.to_string(), value, scale));
        self
    }

    pub fn hypothesis(&mut self, name: &str, value: f64) -> &mut Self {
        self.hypotheses.insert(name.to_string(), value);
        self
    }

    /// Non-strict inequality `lhs ≥ rhs`, recorded as a deficit
    /// `max(0, rhs − lhs)` with the slack band.
    pub fn inequality(&mut self, name: &str, lhs: f64, rhs: f64) -> &mut Self {
        let gap = lhs - rhs;
        if gap.abs() <= self.tol.hypothesis {
            self.boundary_case = true;
        }
        self.hypothesis(name, (-gap).max(0.0))
    }

    pub fn integral(&mut self, name: &str, value: f64) -> &mut Self {
        self.integrals.insert(name.to_string(), value);
        self
    }

    pub fn diagnostic(&mut self, name: &str, value: f64) -> &mut Self {
        self.diagnostics.insert(name.to_string(), value);
        self
    }

    pub fn not_applicable(&mut self, note: String) -> &mut Self {
        self.applicable = false;
        self.notes.push(note);
        self
    }

    pub fn note(&mut self, note: String) -> &mut Self {
        self.notes.push(note);
        self
    }

    pub fn worst_node(&mut self, value: f64, node: &[f64]) -> &mut Self {
        if self.worst.as_ref().is_none_or(|(w, _)| value > *w) {
            self.worst = Some((value, node.to_vec()));
        }
        self
    }

    pub fn finish(self) -> CheckReport {
        let over = |list: &[(String, f64, Scale)]| {
            list.iter().any(|(_, v, s)| !(v.abs() <= self.tol_for(*s)))
        };
        let hyp_failed = self
            .hypotheses
            .values()
            .any(|v| !(v.abs() <= self.tol.hypothesis));
        let verdict = if over(&self.unconditional) {
            Verdict::Violated
        } else if hyp_failed {
            Verdict::HypothesisNotMet
        } else if over(&self.conditional) {
            if self.applicable {
                Verdict::Violated
            } else {
                Verdict::HypothesisNotMet
            }
        } else {
            Verdict::IdentityHolds
        };
        let max_residual = self
            .unconditional
            .iter()
            .chain(&self.conditional)
            .map(|(_, v, _)| v.abs())
            .fold(0.0, f64::max);
        let residuals = self
            .unconditional
            .into_iter()
            .chain(self.conditional)
            .map(|(k, v, _)| (k, v))
            .collect();
        CheckReport {
            check: self.check,
            verdict,
            max_residual,
            residuals,
            hypothesis_residuals: self.hypotheses,
            integrals: self.integrals,
            diagnostics: self.diagnostics,
            boundary_case: self.boundary_case,
            applicable: self.applicable,
            notes: self.notes,
            grid: self.grid,
            worst_node: self.worst.map(|(_, x)| x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builder() -> ReportBuilder {
        ReportBuilder::new("x", Tolerances::default(), vec![8, 8])
    }

    #[test]
    fn lattice() {
        let mut b = builder();
        b.unconditional("a", 1e-9, Scale::Pointwise);
        assert_eq!(b.finish().verdict, Verdict::IdentityHolds);

        let mut b = builder();
        b.hypothesis("h", 1.0)
            .conditional("c", 1.0, Scale::Pointwise);
        assert_eq!(b.finish().verdict, Verdict::HypothesisNotMet);

        let mut b = builder();
        b.hypothesis("h", 0.0)
            .conditional("c", 1.0, Scale::Pointwise);
        assert_eq!(b.finish().verdict, Verdict::Violated);

        let mut b = builder();
        b.hypothesis("h", 1.0)
            .unconditional("u", 1.0, Scale::Pointwise);
        assert_eq!(b.finish().verdict, Verdict::Violated);

        let mut b = builder();
        b.not_applicable("kind".into())
            .conditional("c", 1.0, Scale::Pointwise);
        assert_eq!(b.finish().verdict, Verdict::HypothesisNotMet);

        let mut b = builder();
        b.conditional("nan", f64::NAN, Scale::Integral);
        assert_eq!(b.finish().verdict, Verdict::Violated);
    }

    #[test]
    fn inequality_slack_band() {
        let mut b = builder();
        b.inequality("ineq", 0.0, 5e-8);
        let r = b.finish();
        assert!(r.boundary_case);
        assert_eq!(r.verdict, Verdict::IdentityHolds);
        assert_eq!(r.hypothesis_residuals["ineq"], 5e-8);

        let mut b = builder();
        b.inequality("ineq", 0.0, 1.0);
        let r = b.finish();
        assert!(!r.boundary_case);
        assert_eq!(r.verdict, Verdict::HypothesisNotMet);
    }
}
