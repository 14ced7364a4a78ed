//! Serializable reports and their plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pfaff_core::exterior::DifferentialForm;
use pfaff_core::physics::Vec3;
use pfaff_core::spinor::EigenKind;
use pfaff_core::symbolic::ZeroVerdict;
use pfaff_core::thermo::{DomainScan, ProcessClass, PropertyCheck, ThermoClass};
use pfaff_core::Expr;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "pfaff-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct SamplerInfo {
    pub seed: u64,
    pub samples: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub engine: String,
    pub command: String,
    pub source: String,
    pub sampler: SamplerInfo,
    pub results: Vec<Outcome>,
    /// Requests that failed at the analysis level.
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        render_text(&serde_json::to_value(self).expect("reports serialize"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub runs: Vec<SweepRun>,
    /// Every run reached the same zero-test statuses as the master seed.
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRun {
    pub seed: u64,
    pub statuses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub request: String,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Classify(ClassifyResult),
    Sequence(SequenceResult),
    Torsion(Box<TorsionResult>),
    Process(Box<ProcessResult>),
    Spinors(SpinorResult),
    Ns(Box<NsResult>),
    CartanHilbert(Box<CartanHilbertResult>),
    Error { message: String },
}

pub fn show(e: &Expr) -> String {
    e.to_string()
}

pub fn show_form(f: &DifferentialForm) -> String {
    f.to_string()
}

pub fn show_vec(v: &[Expr]) -> Vec<String> {
    v.iter().map(show).collect()
}

pub fn show_vec3(v: &Vec3) -> Vec<String> {
    show_vec(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResult {
    pub form: String,
    pub point: Option<BTreeMap<String, String>>,
    pub ptd: usize,
    pub class: Option<ThermoClass>,
    pub confidence: pfaff_core::symbolic::Confidence,
    pub monotone: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainScan>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceElement {
    pub degree: usize,
    pub form: String,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceResult {
    pub form: String,
    pub elements: Vec<SequenceElement>,
    pub ptd: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReading {
    pub electric: Vec<String>,
    pub magnetic: Vec<String>,
    /// `A·B`
    pub helicity: String,
    /// `E·B`
    pub parity: String,
    /// How the torsion vector compares with `-[E×A + φB, A·B]`.
    pub torsion_vs_field_formula: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointValue {
    pub point: BTreeMap<String, String>,
    pub sigma: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionResult {
    pub form: String,
    pub torsion: Vec<String>,
    pub divergence: String,
    pub sigma: String,
    pub parity_identity: bool,
    pub checks: Vec<PropertyCheck>,
    pub fields: FieldReading,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub at: Vec<PointValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProcessResult {
    pub form: String,
    pub field: String,
    pub direction: Vec<String>,
    pub rho: String,
    pub energy: String,
    pub work: String,
    pub heat: String,
    pub d_work: String,
    pub d_heat: String,
    pub heat_twist: String,
    pub work_twist: String,
    pub classes: Vec<ProcessClass>,
    pub reversible: ZeroVerdict,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenEntry {
    pub value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<String>,
    pub vector: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_vector: Option<Vec<String>>,
    pub kind: EigenKind,
    pub degenerate: bool,
    pub isotropic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinorResult {
    pub form: String,
    pub point: BTreeMap<String, String>,
    pub matrix: Vec<Vec<String>>,
    pub eigen: Vec<EigenEntry>,
    pub rank: usize,
    pub ptd: usize,
    pub extremal_count: usize,
    pub spinor_count: usize,
    pub counts_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerSummary {
    pub residual: Vec<String>,
    pub residual_verdicts: Vec<ZeroVerdict>,
    pub time_relation: String,
    pub time_verdict: ZeroVerdict,
    pub helmholtz: Vec<String>,
    pub helmholtz_verdict: ZeroVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    pub work: String,
    pub closure: Vec<String>,
    pub spatial: Vec<String>,
    pub spatial_matches_residual: ZeroVerdict,
    pub ns_satisfied: ZeroVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct HydroSigmaSummary {
    pub sigma: String,
    pub pressure_term: String,
    pub shear_term: String,
    pub bulk_term: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct NsResult {
    pub field: String,
    pub velocity: Vec<String>,
    pub density: String,
    pub pressure: String,
    pub potential: String,
    pub shear: String,
    pub bulk: String,
    pub expansion: String,
    pub incompressible: bool,
    pub action: String,
    pub residual: Vec<String>,
    pub residual_verdicts: Vec<ZeroVerdict>,
    pub euler: EulerSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_failure: Option<String>,
    pub hydro_torsion: Vec<String>,
    pub hydro_sigma: HydroSigmaSummary,
    /// `hydro_torsion` minus the torsion vector of the action, componentwise.
    pub torsion_agreement: ZeroVerdict,
    /// `hydro_sigma` minus the dissipation coefficient of the action.
    pub sigma_agreement: ZeroVerdict,
    pub process_classes: Vec<ProcessClass>,
    pub process_reversible: ZeroVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct CartanHilbertResult {
    pub n: usize,
    pub lagrangian: String,
    pub action: String,
    pub top: String,
    pub top_verdict: ZeroVerdict,
    pub closure_verdict: ZeroVerdict,
    pub momentum_defect: String,
    pub factorization_verdict: ZeroVerdict,
    pub canonical_top_verdict: ZeroVerdict,
    pub ptd: usize,
    pub rank: usize,
    pub all_hold: bool,
}

/// Every `"status"` string in document order.
pub fn statuses(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    collect_statuses(v, &mut out);
    out
}

fn collect_statuses(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match (k.as_str(), x) {
                    ("status", Value::String(s)) => out.push(s.clone()),
                    _ => collect_statuses(x, out),
                }
            }
        }
        Value::Array(a) => a.iter().for_each(|x| collect_statuses(x, out)),
        _ => {}
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn is_verdict(m: &serde_json::Map<String, Value>) -> bool {
    m.contains_key("status") && m.contains_key("confidence")
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    match v {
        Value::Object(m) if is_verdict(m) => {
            let status = scalar(&m["status"])?;
            let conf = scalar(&m["confidence"])?;
            Some(format!("{status} ({conf})"))
        }
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) => {
            let parts: Option<Vec<String>> = a.iter().map(inline).collect();
            parts.map(|p| format!("[{}]", p.join(", "))).filter(|s| s.len() <= 100)
        }
        _ => None,
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

/// Indented `key: value` listing of a report; zero verdicts collapse to `status (confidence)`.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_rendering() {
        let v = json!({"a": 1, "b": {"status": "zero", "confidence": "exact", "samples": 0}, "c": [{"x": "y"}]});
        assert_eq!(render_text(&v), "a: 1\nb: zero (exact)\nc:\n  -\n    x: y\n");
    }

    #[test]
    fn status_collection() {
        let v = json!({"a": {"status": "zero"}, "b": [{"status": "non_zero"}]});
        assert_eq!(statuses(&v), vec!["zero", "non_zero"]);
    }
}
