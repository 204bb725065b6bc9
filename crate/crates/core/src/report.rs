//! Versioned report assembled section by section.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    assignment_serde, classify, conserved_report, invertible_choice, ClassifyError, ConservedReport, InvertibleChoice,
    StructureClass,
};
use crate::dsolver::{compare_with_oracle, oracle_family, solve_family, DFamily, OracleComparison};
use crate::exact::{format_rational, Assignment, ExactError, RatMatrix, Rational};
use crate::integrability::{
    commutant, compare_commutant, construct_integrable, sylvester_oracle, CheckStatus, CommutantComparison,
    CommutantFamily, IntegrableSystem,
};
use crate::jordan::JordanSpec;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("unsupported report version {found}, expected {REPORT_VERSION}")]
    Version { found: u32 },
    #[error("report has no integrable system")]
    NoSystem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(with = "assignment_serde")]
    pub assignment: Assignment,
    pub d: RatMatrix,
    pub structure: StructureClass,
    pub conserved: ConservedReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub spec: JordanSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<DFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invertible_choice: Option<InvertibleChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutant: Option<CommutantFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutant_oracle: Option<CommutantComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrable: Option<IntegrableSystem>,
}

impl Report {
    pub fn new(spec: JordanSpec) -> Self {
        Report {
            version: REPORT_VERSION,
            spec,
            family: None,
            oracle: None,
            classification: None,
            invertible_choice: None,
            commutant: None,
            commutant_oracle: None,
            integrable: None,
        }
    }

    /// Every section, oracles included.
    pub fn full(spec: JordanSpec, assignment: &Assignment, seed: u64) -> Result<Self, ReportError> {
        let mut r = Report::new(spec);
        r.add_family(true);
        r.add_classification(assignment)?;
        r.add_invertible_choice();
        r.add_commutant(true);
        r.add_integrable(seed);
        Ok(r)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn check_version(&self) -> Result<(), ReportError> {
        if self.version != REPORT_VERSION {
            return Err(ReportError::Version { found: self.version });
        }
        Ok(())
    }

    pub fn family(&mut self) -> &DFamily {
        if self.family.is_none() {
            self.family = Some(solve_family(&self.spec));
        }
        self.family.as_ref().expect("just set")
    }

    pub fn add_family(&mut self, oracle: bool) {
        self.family();
        if oracle {
            let o = oracle_family(&self.spec.realize());
            self.oracle = Some(compare_with_oracle(self.family.as_ref().expect("set"), &o));
        }
    }

    /// Unassigned parameters count as zero.
    pub fn add_classification(&mut self, assignment: &Assignment) -> Result<(), ReportError> {
        let d = self.family().general.evaluate_or_zero(assignment)?;
        let b = self.spec.realize();
        self.classification = Some(Classification {
            assignment: assignment.clone(),
            structure: classify(&b, &d)?,
            conserved: conserved_report(&b, &d)?,
            d,
        });
        Ok(())
    }

    pub fn add_invertible_choice(&mut self) {
        let family = self.family().clone();
        self.invertible_choice = Some(invertible_choice(&self.spec, &family));
    }

    pub fn add_commutant(&mut self, oracle: bool) {
        let c = commutant(&self.spec);
        if oracle {
            self.commutant_oracle = Some(compare_commutant(&c, &sylvester_oracle(&self.spec.realize())));
        }
        self.commutant = Some(c);
    }

    pub fn add_integrable(&mut self, seed: u64) {
        self.integrable = Some(construct_integrable(&self.spec, seed));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }
}

fn grid(out: &mut String, indent: &str, m: &RatMatrix) {
    let cells: Vec<String> = m.entries().iter().map(format_rational).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(1);
    for i in 0..m.rows() {
        let row: Vec<String> = cells[i * m.cols()..(i + 1) * m.cols()].iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "{indent}[{}]", row.join(" "));
    }
}

fn vector(v: &[Rational]) -> String {
    format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "hamfactor report v{}", r.version);
    let _ = writeln!(out, "spec: {}", serde_json::to_string(&r.spec).expect("spec serializes"));
    let _ = writeln!(out, "dimension: {}", r.spec.dim());
    out.push_str("B:\n");
    grid(&mut out, "  ", &r.spec.realize());

    if let Some(f) = &r.family {
        let _ = writeln!(out, "\nD-family: dim {}", f.dim);
        let _ = writeln!(out, "  params: {}", f.params().join(", "));
        for i in 0..f.general.rows() {
            let row: Vec<String> = (0..f.general.cols()).map(|j| f.general.get(i, j).to_string()).collect();
            let _ = writeln!(out, "  [{}]", row.join(", "));
        }
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(
            out,
            "oracle: dim {}, closed rank {}, outside span {:?}, agrees {}",
            o.oracle_dim,
            o.closed_rank,
            o.outside_span,
            yes(o.agrees)
        );
    }
    if let Some(c) = &r.classification {
        let assigned: Vec<String> = c.assignment.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect();
        let _ = writeln!(out, "\nclassification with {}", if assigned.is_empty() { "no assignment".to_string() } else { assigned.join(", ") });
        out.push_str("  D:\n");
        grid(&mut out, "    ", &c.d);
        let s = &c.structure;
        let _ = writeln!(out, "  verdict: {}", s.verdict);
        let _ = writeln!(
            out,
            "  dynamics paired: {}, B invertible: {}, D invertible: {}",
            yes(s.dynamics_paired),
            yes(s.b_invertible),
            yes(s.d_invertible)
        );
        if let Some(w) = &s.omega {
            out.push_str("  omega = D B^-1:\n");
            grid(&mut out, "    ", w);
        }
        if let Some(p) = &s.pi {
            out.push_str("  pi = B D^-1:\n");
            grid(&mut out, "    ", p);
        }
        if let Some(w) = &s.witness {
            let _ = writeln!(out, "  witness in ker B and ker D: {}", vector(w.entries()));
        }
        let _ = writeln!(out, "  hamiltonian: {}", c.conserved.convention);
        for (k, cas) in c.conserved.casimirs.iter().enumerate() {
            let _ = writeln!(out, "  casimir {}: c = {}, eta = {}", k + 1, vector(&cas.c), vector(&cas.eta));
        }
        for (k, f) in c.conserved.isotropic_fields.iter().enumerate() {
            let _ = writeln!(out, "  isotropic field {}: {} = B {}", k + 1, vector(&f.field), vector(&f.xi));
        }
    }
    if let Some(choice) = &r.invertible_choice {
        match choice {
            InvertibleChoice::Found { assignment, .. } => {
                let names: Vec<String> = assignment.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect();
                let _ = writeln!(out, "\ninvertible choice: {}", names.join(", "));
            }
            InvertibleChoice::Impossible(o) => {
                let col = o.zero_column.map_or("none".to_string(), |c| (c + 1).to_string());
                let _ = writeln!(
                    out,
                    "\ninvertible choice: impossible in group {} ({}): {}; zero column: {}",
                    o.group + 1,
                    o.kind,
                    o.reason,
                    col
                );
            }
        }
    }
    if let Some(c) = &r.commutant {
        let _ = writeln!(out, "\ncommutant: dim {}", c.dim);
        let _ = writeln!(out, "  params: {}", c.general.params().join(", "));
    }
    if let Some(o) = &r.commutant_oracle {
        let _ = writeln!(
            out,
            "commutant oracle: dim {}, closed rank {}, outside span {}, agrees {}",
            o.oracle_dim,
            o.closed_rank,
            o.outside_span,
            yes(o.agrees)
        );
    }
    if let Some(sys) = &r.integrable {
        let _ = writeln!(out, "\nintegrable system: p = {}, q = {}, verdict {}", sys.p, sys.q, sys.structure.verdict);
        out.push_str("  D0:\n");
        grid(&mut out, "    ", &sys.d0);
        for u in &sys.units {
            let _ = writeln!(out, "  unit {} on {:?}: {} fields, {} integrals", u.label, u.coords, u.fields, u.integrals);
        }
        for (i, (c, h)) in sys.vector_fields.iter().zip(&sys.field_hamiltonians).enumerate() {
            let _ = writeln!(out, "  C{}:", i + 1);
            grid(&mut out, "    ", c);
            let _ = writeln!(out, "  H{}:", i + 1);
            grid(&mut out, "    ", h);
        }
        for (j, s) in sys.quadratic_integrals.iter().enumerate() {
            let _ = writeln!(out, "  S{}:", j + 1);
            grid(&mut out, "    ", s);
        }
        for (j, c) in sys.linear_integrals.iter().enumerate() {
            let _ = writeln!(out, "  c{}: {}", j + 1, vector(&c.c));
        }
        let _ = writeln!(out, "  transcript (seed {}):", sys.transcript.seed);
        for check in &sys.transcript.checks {
            let status = match check.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::NotApplicable => "n/a",
            };
            let _ = writeln!(out, "    {status:<4} {}: {}", check.name, check.detail);
        }
        for (i, z) in sys.transcript.field_witnesses.iter().enumerate() {
            if let Some(z) = z {
                let _ = writeln!(out, "  Z{}:", i + 1);
                grid(&mut out, "    ", z);
            }
        }
        for (j, z) in sys.transcript.casimir_witnesses.iter().enumerate() {
            if let Some(z) = z {
                let _ = writeln!(out, "  z{}: {}", j + 1, vector(z.entries()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::jordan::BlockSpec;

    fn double_j2() -> JordanSpec {
        JordanSpec::new(vec![BlockSpec::Zero { sizes: vec![2, 2] }]).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let mut a = Assignment::new();
        a.insert("g1.d_1_4".to_string(), rat(1));
        let r = Report::full(double_j2(), &a, 0).unwrap();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.integrable.as_ref().unwrap().transcript.passed());
    }

    #[test]
    fn text_carries_every_rational() {
        let mut a = Assignment::new();
        a.insert("g1.d_1_4".to_string(), Rational::new(3.into(), 2.into()));
        let r = Report::full(double_j2(), &a, 0).unwrap();
        let text = r.to_text();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let mut strings = Vec::new();
        collect_strings(&json, &mut strings);
        for s in strings {
            if crate::exact::parse_rational(&s).is_ok() {
                assert!(text.contains(&s), "{s} missing from text");
            }
        }
    }

    fn collect_strings(v: &serde_json::Value, out: &mut Vec<String>) {
        match v {
            serde_json::Value::String(s) => out.push(s.clone()),
            serde_json::Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out)),
            serde_json::Value::Object(o) => o.values().for_each(|x| collect_strings(x, out)),
            _ => {}
        }
    }
}
