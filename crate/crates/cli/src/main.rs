//! Command-line surface for the colourability engine.
//!
//! Exit codes follow one contract everywhere: 0 for a positive verdict
//! (SAT / VERIFIED / fixpoint / replay match), 1 for a successful negative
//! verdict (UNSAT / CONTRADICTION / NOT-FORCED / replay mismatch), 2 for
//! usage or input errors.

mod certificate;
mod common;
mod dot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use kscheck_core::colouring::{
    self, engine, enumerate_global, search_global, DpsResult, PartialValuation, PropagationTrace,
    RootResult, SearchResult,
};
use kscheck_core::contexts::{build_poset, lift_dimension, Signature, WPoset};
use kscheck_core::datasets::{self, ContextDiagram, Dataset, LabelledRay, RaySet, TypedRaySet};
use kscheck_core::exactnum::Scalar;
use kscheck_core::loops::{enumerate_loops_skeleton, min_loop_skeleton, reduce, Skeleton};
use kscheck_core::presheaf::ElementCandidate;

use certificate::{
    context_descs, outcome_name, steps_from_trace, valuation_descs, write_json, AssignDesc,
    StepDesc, TraceCertificate,
};
use common::{
    default_signatures, parse_assignment, parse_signatures, prepare, prepare_for_check, resolve,
    ContextSource, LabelTable,
};
use report::{command_echo, DatasetSummary, RunReport};

#[derive(Parser)]
#[command(
    name = "kscheck",
    version,
    about = "Exact colourability checks on finite ray sets: contexts, global valuations, prediction certificates, loop inventories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    /// Backtracking search with unit propagation.
    Search,
    /// Exhaustive enumeration of all atom choices (slow cross-check).
    Brute,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the dataset admits a consistent valuation (exit 0 = SAT, 1 = UNSAT).
    Check {
        /// Builtin name or ray-set JSON path.
        dataset: String,
        /// Complete near-basis cliques with their missing direction (default on).
        #[arg(long)]
        complete: bool,
        /// Leave near-basis cliques incomplete.
        #[arg(long, conflicts_with = "complete")]
        no_complete: bool,
        #[arg(long, value_enum, default_value_t = CheckMode::Search)]
        mode: CheckMode,
        /// Context source; `check` defaults to discovered cliques.
        #[arg(long, value_enum)]
        contexts: Option<ContextSource>,
        /// Directory for report.json and certificate.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate assignments, or verify a prediction with --predict.
    Propagate {
        dataset: String,
        /// Seed assignment RAY=BIT; repeatable.
        #[arg(long = "assign", value_name = "RAY=BIT")]
        assign: Vec<String>,
        /// Predicted assignment RAY=BIT to verify.
        #[arg(long, value_name = "RAY=BIT")]
        predict: Option<String>,
        #[arg(long)]
        complete: bool,
        #[arg(long, conflicts_with = "complete")]
        no_complete: bool,
        #[arg(long, value_enum)]
        contexts: Option<ContextSource>,
        /// Write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-run a stored certificate and compare traces.
        #[arg(long, conflicts_with_all = ["assign", "predict"])]
        replay: Option<PathBuf>,
    },
    /// Reduced-graph statistics and chordless loop inventory.
    Loops {
        dataset: String,
        #[arg(long, default_value_t = 6)]
        max_maximals: usize,
        /// Degenerate signatures, e.g. "2-1" or "2-1-1,3-1,2-2" (default: all for the dimension).
        #[arg(long)]
        signatures: Option<String>,
        #[arg(long)]
        complete: bool,
        #[arg(long, conflicts_with = "complete")]
        no_complete: bool,
        /// Context source; defaults to the listed grouping when the dataset has one.
        #[arg(long, value_enum)]
        contexts: Option<ContextSource>,
        /// Write the reduced bipartite graph as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Export the context poset as a DOT diagram.
    ExportDot {
        dataset: String,
        #[arg(long)]
        signatures: Option<String>,
        #[arg(long)]
        complete: bool,
        #[arg(long, conflicts_with = "complete")]
        no_complete: bool,
        #[arg(long, value_enum)]
        contexts: Option<ContextSource>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a ray set into a higher dimension, adjoining the new axis rays.
    Lift {
        dataset: String,
        #[arg(long)]
        dim: usize,
        /// Output ray-set JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes instead of panicking on
    // println; verdict lines are routinely piped to head or grep.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn effective_complete(_complete: bool, no_complete: bool) -> bool {
    // Completion is the default everywhere; --complete states it explicitly.
    !no_complete
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Check {
            dataset,
            complete,
            no_complete,
            mode,
            contexts,
            out,
        } => {
            let resolved = resolve(&dataset)?;
            let complete = effective_complete(complete, no_complete);
            match resolved {
                Dataset::Rays(RaySet::Exact(set)) => {
                    check_rays(&set, complete, mode, contexts, out.as_deref())
                }
                Dataset::Rays(RaySet::Approx(set)) => {
                    check_rays(&set, complete, mode, contexts, out.as_deref())
                }
                Dataset::Diagram(diagram) => check_diagram(&diagram, out.as_deref()),
            }
        }
        Command::Propagate {
            dataset,
            assign,
            predict,
            complete,
            no_complete,
            contexts,
            out,
            replay,
        } => {
            let resolved = resolve(&dataset)?;
            let complete = effective_complete(complete, no_complete);
            let assigns = assign
                .iter()
                .map(|a| parse_assignment(a))
                .collect::<Result<Vec<_>>>()?;
            let predicted = predict.as_deref().map(parse_assignment).transpose()?;
            match resolved {
                Dataset::Rays(RaySet::Exact(set)) => propagate_rays(
                    &set,
                    complete,
                    contexts,
                    &assigns,
                    predicted,
                    out.as_deref(),
                    replay.as_deref(),
                ),
                Dataset::Rays(RaySet::Approx(set)) => propagate_rays(
                    &set,
                    complete,
                    contexts,
                    &assigns,
                    predicted,
                    out.as_deref(),
                    replay.as_deref(),
                ),
                Dataset::Diagram(diagram) => propagate_diagram(
                    &diagram,
                    &assigns,
                    predicted,
                    out.as_deref(),
                    replay.as_deref(),
                ),
            }
        }
        Command::Loops {
            dataset,
            max_maximals,
            signatures,
            complete,
            no_complete,
            contexts,
            dot,
        } => {
            if max_maximals < 2 {
                bail!("a loop joins at least two maximal contexts; --max-maximals must be >= 2");
            }
            let resolved = resolve(&dataset)?;
            let complete = effective_complete(complete, no_complete);
            let signatures = signatures.as_deref().map(parse_signatures).transpose()?;
            match resolved {
                Dataset::Rays(RaySet::Exact(set)) => loops_rays(
                    &set,
                    complete,
                    contexts,
                    max_maximals,
                    signatures,
                    dot.as_deref(),
                ),
                Dataset::Rays(RaySet::Approx(set)) => loops_rays(
                    &set,
                    complete,
                    contexts,
                    max_maximals,
                    signatures,
                    dot.as_deref(),
                ),
                Dataset::Diagram(diagram) => loops_diagram(&diagram, max_maximals, dot.as_deref()),
            }
        }
        Command::ExportDot {
            dataset,
            signatures,
            complete,
            no_complete,
            contexts,
            out,
        } => {
            let resolved = resolve(&dataset)?;
            let complete = effective_complete(complete, no_complete);
            let signatures = signatures.as_deref().map(parse_signatures).transpose()?;
            let text = match resolved {
                Dataset::Rays(RaySet::Exact(set)) => {
                    export_dot_rays(&set, complete, contexts, signatures)?
                }
                Dataset::Rays(RaySet::Approx(set)) => {
                    export_dot_rays(&set, complete, contexts, signatures)?
                }
                Dataset::Diagram(diagram) => dot::diagram(&diagram),
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Lift { dataset, dim, out } => {
            let resolved = resolve(&dataset)?;
            let lifted = match resolved {
                Dataset::Rays(RaySet::Exact(set)) => RaySet::Exact(lift_set(&set, dim)?),
                Dataset::Rays(RaySet::Approx(set)) => RaySet::Approx(lift_set(&set, dim)?),
                Dataset::Diagram(_) => {
                    bail!("diagram-level datasets carry no coordinates to lift")
                }
            };
            emit(&datasets::to_json(&lifted), out.as_deref())?;
            Ok(0)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

// --- check ----------------------------------------------------------------

#[derive(serde::Serialize)]
struct ChosenDesc {
    context: Vec<String>,
    chosen: String,
}

#[derive(serde::Serialize)]
struct CheckSatCert {
    dataset: String,
    kind: String,
    assignment: Vec<ChosenDesc>,
}

#[derive(serde::Serialize)]
struct RootDesc {
    choice: String,
    outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    steps: Vec<StepDesc>,
}

#[derive(serde::Serialize)]
struct CheckUnsatCert {
    dataset: String,
    kind: String,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    search_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combinations: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    roots: Vec<RootDesc>,
}

fn check_rays<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    mode: CheckMode,
    source: Option<ContextSource>,
    out: Option<&Path>,
) -> Result<u8> {
    let started = Instant::now();
    let prepared = prepare_for_check(set, complete, source)?;
    let poset = build_poset(&prepared.contexts, &[], prepared.auxiliary.clone());
    let labels = &prepared.labels;

    let mut sat_candidate: Option<ElementCandidate> = None;
    let mut unsat_cert: Option<CheckUnsatCert> = None;
    match mode {
        CheckMode::Search => match search_global(&poset) {
            SearchResult::Sat(candidate) => sat_candidate = Some(candidate),
            SearchResult::Unsat(stats) => {
                unsat_cert = Some(CheckUnsatCert {
                    dataset: set.name.clone(),
                    kind: "check-unsat".to_string(),
                    mode: "search".to_string(),
                    search_nodes: Some(stats.nodes),
                    combinations: None,
                    roots: stats
                        .roots
                        .iter()
                        .map(|root| match &root.result {
                            RootResult::Contradiction(trace) => RootDesc {
                                choice: labels.subject(&root.choice),
                                outcome: "contradiction".to_string(),
                                nodes: None,
                                steps: steps_from_trace(trace, labels),
                            },
                            RootResult::Exhausted { nodes } => RootDesc {
                                choice: labels.subject(&root.choice),
                                outcome: "exhausted".to_string(),
                                nodes: Some(*nodes),
                                steps: Vec::new(),
                            },
                        })
                        .collect(),
                });
            }
        },
        CheckMode::Brute => {
            let combinations: u64 = poset
                .maximal_ids()
                .iter()
                .map(|&id| poset.algebra(id).atoms().len() as u64)
                .product();
            match enumerate_global(&poset) {
                Some(candidate) => sat_candidate = Some(candidate),
                None => {
                    unsat_cert = Some(CheckUnsatCert {
                        dataset: set.name.clone(),
                        kind: "check-unsat".to_string(),
                        mode: "brute".to_string(),
                        search_nodes: None,
                        combinations: Some(combinations),
                        roots: Vec::new(),
                    });
                }
            }
        }
    }

    let verdict = if sat_candidate.is_some() {
        "sat"
    } else {
        "unsat"
    };
    println!("{}", verdict.to_uppercase());
    eprintln!(
        "{}: {} rays, {} contexts, {} auxiliary; {:?}",
        set.name,
        set.rays.len(),
        prepared.contexts.len(),
        prepared.auxiliary.len(),
        started.elapsed()
    );

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let cert_path = dir.join("certificate.json");
        match (&sat_candidate, &unsat_cert) {
            (Some(candidate), _) => {
                let cert = CheckSatCert {
                    dataset: set.name.clone(),
                    kind: "check-sat".to_string(),
                    assignment: candidate_desc(&poset, candidate, labels),
                };
                write_json(&cert, &cert_path)?;
            }
            (_, Some(cert)) => write_json(cert, &cert_path)?,
            _ => unreachable!("one verdict is always set"),
        }
        let report = RunReport {
            command: command_echo(),
            dataset: DatasetSummary {
                name: set.name.clone(),
                dim: Some(set.dim),
                rays: set.rays.len(),
                contexts: prepared.contexts.len(),
                auxiliary: prepared.auxiliary.len(),
            },
            verdict: verdict.to_string(),
            mode: match mode {
                CheckMode::Search => "search".to_string(),
                CheckMode::Brute => "brute".to_string(),
            },
            search_nodes: unsat_cert.as_ref().and_then(|c| c.search_nodes),
            certificate: Some("certificate.json".to_string()),
            timing_ms: None,
        };
        write_json(&report, &dir.join("report.json"))?;
    }
    Ok(if sat_candidate.is_some() { 0 } else { 1 })
}

fn candidate_desc<S: Scalar>(
    poset: &WPoset<S>,
    candidate: &ElementCandidate,
    labels: &LabelTable<S>,
) -> Vec<ChosenDesc> {
    poset
        .maximal_ids()
        .into_iter()
        .map(|id| {
            let algebra = poset.algebra(id);
            let chosen = candidate.get(id).expect("sat candidates are total");
            ChosenDesc {
                context: algebra
                    .atoms()
                    .iter()
                    .map(|a| labels.describe_atom(a))
                    .collect(),
                chosen: labels.describe_atom(&algebra.atoms()[chosen.atom]),
            }
        })
        .collect()
}

fn check_diagram(diagram: &ContextDiagram, out: Option<&Path>) -> Result<u8> {
    let net = diagram.net();
    let result = engine::search(&net, &[], &mut |_| true);
    let sat = matches!(result, engine::NetSearchResult::Sat { .. });
    println!("{}", if sat { "SAT" } else { "UNSAT" });
    eprintln!(
        "{}: {} abstract rays, {} contexts",
        diagram.name,
        diagram.rays.len(),
        diagram.contexts.len()
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let report = RunReport {
            command: command_echo(),
            dataset: DatasetSummary {
                name: diagram.name.clone(),
                dim: None,
                rays: diagram.rays.len(),
                contexts: diagram.contexts.len(),
                auxiliary: 0,
            },
            verdict: if sat { "sat" } else { "unsat" }.to_string(),
            mode: "search".to_string(),
            search_nodes: match &result {
                engine::NetSearchResult::Unsat { nodes, .. } => Some(*nodes),
                engine::NetSearchResult::Sat { nodes, .. } => Some(*nodes),
            },
            certificate: None,
            timing_ms: None,
        };
        write_json(&report, &dir.join("report.json"))?;
    }
    Ok(if sat { 0 } else { 1 })
}

// --- propagate --------------------------------------------------------------

fn print_trace<S: Scalar>(trace: &PropagationTrace<S>, labels: &LabelTable<S>) {
    for step in &trace.steps {
        let ctx = step
            .context
            .map(|c| format!("ctx {c}"))
            .unwrap_or_else(|| "seed".to_string());
        println!(
            "{:<18} {:<8} {} = {}",
            step.rule.name(),
            ctx,
            labels.subject(&step.subject),
            u8::from(step.value)
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn propagate_rays<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    source: Option<ContextSource>,
    assigns: &[(String, bool)],
    predicted: Option<(String, bool)>,
    out: Option<&Path>,
    replay: Option<&Path>,
) -> Result<u8> {
    let prepared = prepare_for_check(set, complete, source)?;
    let labels = &prepared.labels;

    if let Some(cert_path) = replay {
        let text = std::fs::read_to_string(cert_path)?;
        let cert: TraceCertificate = serde_json::from_str(&text)?;
        if cert.dataset != set.name {
            bail!(
                "certificate was produced for dataset {:?}, not {:?}",
                cert.dataset,
                set.name
            );
        }
        let matches = certificate::replay(&cert, &prepared.contexts, labels)?;
        println!(
            "{}",
            if matches {
                "REPLAY OK"
            } else {
                "REPLAY MISMATCH"
            }
        );
        return Ok(if matches { 0 } else { 1 });
    }

    let mut initial = PartialValuation::new();
    let mut initial_desc = Vec::new();
    for (label, value) in assigns {
        let ray = labels
            .ray(label)
            .with_context(|| format!("unknown ray label {label:?}"))?;
        initial.assign(ray.subspace(), *value)?;
        initial_desc.push(AssignDesc {
            ray: label.clone(),
            value: u8::from(*value),
        });
    }

    match predicted {
        None => {
            let (_, trace) = colouring::propagate(&prepared.contexts, &initial)?;
            print_trace(&trace, labels);
            let contradiction = trace.contradiction();
            println!(
                "{}",
                if contradiction {
                    "CONTRADICTION"
                } else {
                    "FIXPOINT"
                }
            );
            if let Some(path) = out {
                let cert = TraceCertificate {
                    dataset: set.name.clone(),
                    kind: "propagate".to_string(),
                    contexts: context_descs(&prepared.contexts, labels),
                    initial: initial_desc,
                    predicted: None,
                    steps: steps_from_trace(&trace, labels),
                    outcome: outcome_name(trace.outcome).to_string(),
                    search_nodes: None,
                    witness: None,
                };
                write_json(&cert, path)?;
            }
            Ok(if contradiction { 1 } else { 0 })
        }
        Some((label, value)) => {
            let ray = labels
                .ray(&label)
                .with_context(|| format!("unknown ray label {label:?}"))?;
            let subject = ray.subspace();
            // The certificate seeds include the assumed opposite, making the
            // stored step list a self-contained replayable run.
            initial_desc.push(AssignDesc {
                ray: label.clone(),
                value: u8::from(!value),
            });
            let result = colouring::verify_dps(&prepared.contexts, &initial, (&subject, value))?;
            match result {
                DpsResult::Verified(cert) => {
                    print_trace(&cert.trace, labels);
                    if let Some(nodes) = cert.search_nodes {
                        println!("exhausted remaining branches: {nodes} nodes");
                    }
                    println!("VERIFIED");
                    if let Some(path) = out {
                        let doc = TraceCertificate {
                            dataset: set.name.clone(),
                            kind: "dps".to_string(),
                            contexts: context_descs(&prepared.contexts, labels),
                            initial: initial_desc,
                            predicted: Some(AssignDesc {
                                ray: label.clone(),
                                value: u8::from(value),
                            }),
                            steps: steps_from_trace(&cert.trace, labels),
                            outcome: outcome_name(cert.trace.outcome).to_string(),
                            search_nodes: cert.search_nodes,
                            witness: None,
                        };
                        write_json(&doc, path)?;
                    }
                    Ok(0)
                }
                DpsResult::NotForced { witness } => {
                    println!("NOT-FORCED");
                    let witness_desc = valuation_descs(&witness, labels);
                    for assign in &witness_desc {
                        println!("witness {} = {}", assign.ray, assign.value);
                    }
                    if let Some(path) = out {
                        let doc = TraceCertificate {
                            dataset: set.name.clone(),
                            kind: "dps".to_string(),
                            contexts: context_descs(&prepared.contexts, labels),
                            initial: initial_desc,
                            predicted: Some(AssignDesc {
                                ray: label.clone(),
                                value: u8::from(value),
                            }),
                            steps: Vec::new(),
                            outcome: "NotForced".to_string(),
                            search_nodes: None,
                            witness: Some(witness_desc),
                        };
                        write_json(&doc, path)?;
                    }
                    Ok(1)
                }
            }
        }
    }
}

fn propagate_diagram(
    diagram: &ContextDiagram,
    assigns: &[(String, bool)],
    predicted: Option<(String, bool)>,
    out: Option<&Path>,
    replay: Option<&Path>,
) -> Result<u8> {
    if replay.is_some() {
        bail!("replay is supported for coordinate datasets only");
    }
    if out.is_some() {
        bail!("certificate output is supported for coordinate datasets only");
    }
    let net = diagram.net();
    let mut seeds = Vec::new();
    for (label, value) in assigns {
        let id = diagram
            .ray_id(label)
            .with_context(|| format!("unknown ray label {label:?}"))?;
        seeds.push((id, *value));
    }
    let print_net_trace = |trace: &engine::NetTrace| {
        for step in &trace.steps {
            let ctx = step
                .context
                .map(|c| format!("ctx {c}"))
                .unwrap_or_else(|| "seed".to_string());
            println!(
                "{:<18} {:<8} {} = {}",
                step.rule.name(),
                ctx,
                diagram.rays[step.atom],
                u8::from(step.value)
            );
        }
    };
    match predicted {
        None => {
            let (_, trace) = engine::propagate(&net, &seeds);
            print_net_trace(&trace);
            let contradiction = trace.contradiction();
            println!(
                "{}",
                if contradiction {
                    "CONTRADICTION"
                } else {
                    "FIXPOINT"
                }
            );
            Ok(if contradiction { 1 } else { 0 })
        }
        Some((label, value)) => {
            let id = diagram
                .ray_id(&label)
                .with_context(|| format!("unknown ray label {label:?}"))?;
            seeds.push((id, !value));
            let (_, trace) = engine::propagate(&net, &seeds);
            if trace.contradiction() {
                print_net_trace(&trace);
                println!("VERIFIED");
                return Ok(0);
            }
            match engine::search(&net, &seeds, &mut |_| true) {
                engine::NetSearchResult::Unsat { nodes, .. } => {
                    print_net_trace(&trace);
                    println!("exhausted remaining branches: {nodes} nodes");
                    println!("VERIFIED");
                    Ok(0)
                }
                engine::NetSearchResult::Sat { assignment, .. } => {
                    println!("NOT-FORCED");
                    for (atom, value) in assignment.iter().enumerate() {
                        println!("witness {} = {}", diagram.rays[atom], u8::from(*value));
                    }
                    Ok(1)
                }
            }
        }
    }
}

// --- loops ------------------------------------------------------------------

fn loop_summary(skeleton: &Skeleton, max_maximals: usize) -> (Option<usize>, Vec<(usize, usize)>) {
    let loops = enumerate_loops_skeleton(skeleton, max_maximals);
    let mut per_size: std::collections::BTreeMap<usize, usize> = Default::default();
    for l in &loops {
        *per_size.entry(l.len()).or_default() += 1;
    }
    (min_loop_skeleton(skeleton), per_size.into_iter().collect())
}

fn print_loop_report(
    maximal_count: usize,
    degenerate_count: usize,
    edge_count: usize,
    min: Option<usize>,
    per_size: &[(usize, usize)],
    max_maximals: usize,
) {
    println!("maximal contexts: {maximal_count}");
    println!("reduced degenerate nodes: {degenerate_count}");
    println!("edges: {edge_count}");
    match min {
        Some(len) => println!("min loop: {len} algebras ({} maximal)", len / 2),
        None => println!("min loop: none"),
    }
    let total: usize = per_size.iter().map(|(_, n)| n).sum();
    println!("chordless loops with at most {max_maximals} maximal contexts: {total}");
    for (size, count) in per_size {
        println!("  {size} algebras ({} maximal): {count}", size / 2);
    }
}

fn loops_rays<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    source: Option<ContextSource>,
    max_maximals: usize,
    signatures: Option<Vec<Signature>>,
    dot_out: Option<&Path>,
) -> Result<u8> {
    let prepared = prepare(set, complete, source)?;
    let signatures = signatures.unwrap_or_else(|| default_signatures(set.dim));
    let poset = build_poset(&prepared.contexts, &signatures, prepared.auxiliary.clone());
    let graph = reduce(&poset);
    let skeleton = graph.skeleton();
    let (min, per_size) = loop_summary(&skeleton, max_maximals);
    print_loop_report(
        graph.maximals().len(),
        graph.nodes().len(),
        graph.edge_count(),
        min,
        &per_size,
        max_maximals,
    );
    if let Some(path) = dot_out {
        std::fs::write(
            path,
            dot::reduced(&set.name, &poset, &graph, &prepared.labels),
        )?;
    }
    Ok(0)
}

fn loops_diagram(
    diagram: &ContextDiagram,
    max_maximals: usize,
    dot_out: Option<&Path>,
) -> Result<u8> {
    let shared: Vec<Vec<usize>> = diagram
        .rays
        .iter()
        .map(|ray| {
            diagram
                .contexts
                .iter()
                .enumerate()
                .filter(|(_, ctx)| ctx.contains(ray))
                .map(|(id, _)| id)
                .collect::<Vec<usize>>()
        })
        .filter(|parents| parents.len() >= 2)
        .collect();
    let edge_count = shared.iter().map(|p| p.len()).sum();
    let skeleton = Skeleton::new(shared, diagram.contexts.len());
    let (min, per_size) = loop_summary(&skeleton, max_maximals);
    print_loop_report(
        skeleton.maximal_count(),
        skeleton.degenerate_count(),
        edge_count,
        min,
        &per_size,
        max_maximals,
    );
    if let Some(path) = dot_out {
        std::fs::write(path, dot::diagram(diagram))?;
    }
    Ok(0)
}

// --- export-dot and lift ------------------------------------------------------

fn export_dot_rays<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    source: Option<ContextSource>,
    signatures: Option<Vec<Signature>>,
) -> Result<String> {
    let prepared = prepare(set, complete, source)?;
    let signatures = signatures.unwrap_or_else(|| default_signatures(set.dim));
    let poset = build_poset(&prepared.contexts, &signatures, prepared.auxiliary.clone());
    Ok(dot::poset(&set.name, &poset, &prepared.labels))
}

fn lift_set<S: Scalar>(set: &TypedRaySet<S>, dim: usize) -> Result<TypedRaySet<S>> {
    let rays = set.rays_only();
    let lifted = lift_dimension(&rays, dim)?;
    let mut labels: Vec<String> = set.rays.iter().map(|r| r.label.clone()).collect();
    for axis in set.dim..dim {
        let mut label = format!("Q{}", axis + 1);
        while labels.contains(&label) {
            label.push('x');
        }
        labels.push(label);
    }
    debug_assert_eq!(labels.len(), lifted.len());
    Ok(TypedRaySet {
        name: format!("{}-lift{dim}", set.name),
        dim,
        mode: set.mode,
        rays: labels
            .into_iter()
            .zip(lifted)
            .map(|(label, ray)| LabelledRay { label, ray })
            .collect(),
        groups: Vec::new(),
        provenance: format!(
            "{} embedded in dimension {dim}; the added axis rays complete every padded context.",
            set.name
        ),
    })
}
