//! Certificate files: JSON step lists that re-run to the same trace.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use kscheck_core::colouring::{self, Outcome, PartialValuation, PropagationTrace};
use kscheck_core::contexts::Algebra;
use kscheck_core::exactnum::Scalar;

use crate::common::LabelTable;

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ContextDesc {
    pub id: usize,
    pub atoms: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, Clone)]
pub struct AssignDesc {
    pub ray: String,
    pub value: u8,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepDesc {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<usize>,
    pub subject: String,
    pub value: u8,
}

/// A propagation or prediction certificate. `initial` holds every seed the
/// propagation started from (for predictions this includes the assumed
/// opposite of the predicted value), so replaying is a plain re-run.
#[derive(Debug, Serialize, Deserialize)]
pub struct TraceCertificate {
    pub dataset: String,
    pub kind: String,
    pub contexts: Vec<ContextDesc>,
    pub initial: Vec<AssignDesc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<AssignDesc>,
    pub steps: Vec<StepDesc>,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<AssignDesc>>,
}

pub fn context_descs<S: Scalar>(
    contexts: &[Algebra<S>],
    labels: &LabelTable<S>,
) -> Vec<ContextDesc> {
    contexts
        .iter()
        .enumerate()
        .map(|(id, algebra)| ContextDesc {
            id,
            atoms: algebra
                .atoms()
                .iter()
                .map(|a| labels.describe_atom(a))
                .collect(),
        })
        .collect()
}

pub fn steps_from_trace<S: Scalar>(
    trace: &PropagationTrace<S>,
    labels: &LabelTable<S>,
) -> Vec<StepDesc> {
    trace
        .steps
        .iter()
        .map(|step| StepDesc {
            rule: step.rule.name().to_string(),
            context: step.context,
            subject: labels.subject(&step.subject),
            value: u8::from(step.value),
        })
        .collect()
}

pub fn outcome_name(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Fixpoint => "Fixpoint",
        Outcome::Contradiction => "Contradiction",
    }
}

pub fn valuation_descs<S: Scalar>(
    valuation: &PartialValuation<S>,
    labels: &LabelTable<S>,
) -> Vec<AssignDesc> {
    let mut out: Vec<AssignDesc> = valuation
        .iter()
        .map(|(subspace, value)| AssignDesc {
            ray: labels.subject(subspace),
            value: u8::from(value),
        })
        .collect();
    out.sort_by(|a, b| a.ray.cmp(&b.ray));
    out
}

/// Re-run a stored certificate against freshly built contexts and compare
/// step lists. Returns Ok(true) on an exact match.
pub fn replay<S: Scalar>(
    cert: &TraceCertificate,
    contexts: &[Algebra<S>],
    labels: &LabelTable<S>,
) -> Result<bool> {
    if cert.kind != "propagate" && cert.kind != "dps" {
        bail!("certificate kind {:?} is not replayable", cert.kind);
    }
    let mut initial = PartialValuation::new();
    for assign in &cert.initial {
        let Some(ray) = labels.ray(&assign.ray) else {
            bail!("certificate names unknown ray {:?}", assign.ray);
        };
        initial.assign(ray.subspace(), assign.value == 1)?;
    }
    let (_, trace) = colouring::propagate(contexts, &initial)?;
    let fresh_steps = steps_from_trace(&trace, labels);
    Ok(fresh_steps == cert.steps && outcome_name(trace.outcome) == cert.outcome)
}

pub fn write_json<T: Serialize>(value: &T, path: &std::path::Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
