//! Propagation and search over plain atom ids.
//!
//! This is the constraint core shared by the subspace-level API and the
//! diagram-level datasets: a [`ContextNet`] is a list of contexts, each a list
//! of atom ids, under the rules that equal atoms share a value, a context with
//! a 1-atom zeroes its siblings, and a context whose other atoms are all 0
//! forces its last atom to 1. Rule application order is fixed (contexts by
//! id, atoms by index), so traces are reproducible.

/// One of the propagation rules, or the terminal contradiction marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    InitialAssignment,
    OnePerContextZero,
    LastAtomOne,
    Contradiction,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::InitialAssignment => "InitialAssignment",
            Rule::OnePerContextZero => "OnePerContextZero",
            Rule::LastAtomOne => "LastAtomOne",
            Rule::Contradiction => "Contradiction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetStep {
    pub rule: Rule,
    /// Context the rule fired in; `None` for initial assignments.
    pub context: Option<usize>,
    pub atom: usize,
    /// The value written, or for a contradiction the value that clashed with
    /// the one already recorded.
    pub value: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Fixpoint,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetTrace {
    pub steps: Vec<NetStep>,
    pub outcome: Outcome,
}

impl NetTrace {
    pub fn contradiction(&self) -> bool {
        self.outcome == Outcome::Contradiction
    }
}

/// Contexts over a fixed atom universe `0..n_atoms`.
#[derive(Debug, Clone)]
pub struct ContextNet {
    n_atoms: usize,
    contexts: Vec<Vec<usize>>,
}

impl ContextNet {
    pub fn new(n_atoms: usize, contexts: Vec<Vec<usize>>) -> Self {
        for ctx in &contexts {
            debug_assert!(!ctx.is_empty());
            debug_assert!(ctx.iter().all(|&a| a < n_atoms));
        }
        ContextNet { n_atoms, contexts }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }
}

/// Closure of `seeds` under the propagation rules, starting from a blank
/// assignment. Stops at the first contradiction.
pub fn propagate(net: &ContextNet, seeds: &[(usize, bool)]) -> (Vec<Option<bool>>, NetTrace) {
    let mut assignment = vec![None; net.n_atoms];
    let mut steps = Vec::new();
    let outcome = propagate_from(net, &mut assignment, seeds, &mut steps);
    (assignment, NetTrace { steps, outcome })
}

/// Same as [`propagate`] but continuing from an existing assignment; used by
/// the search to run unit propagation after each decision.
fn propagate_from(
    net: &ContextNet,
    assignment: &mut [Option<bool>],
    seeds: &[(usize, bool)],
    steps: &mut Vec<NetStep>,
) -> Outcome {
    for &(atom, value) in seeds {
        match assignment[atom] {
            Some(existing) if existing != value => {
                steps.push(NetStep {
                    rule: Rule::InitialAssignment,
                    context: None,
                    atom,
                    value,
                });
                steps.push(NetStep {
                    rule: Rule::Contradiction,
                    context: first_context_of(net, atom),
                    atom,
                    value,
                });
                return Outcome::Contradiction;
            }
            Some(_) => {}
            None => {
                assignment[atom] = Some(value);
                steps.push(NetStep {
                    rule: Rule::InitialAssignment,
                    context: None,
                    atom,
                    value,
                });
            }
        }
    }
    loop {
        let mut changed = false;
        for (cid, ctx) in net.contexts.iter().enumerate() {
            let one = ctx.iter().copied().find(|&a| assignment[a] == Some(true));
            if let Some(one_atom) = one {
                for &a in ctx {
                    if a == one_atom {
                        continue;
                    }
                    match assignment[a] {
                        None => {
                            assignment[a] = Some(false);
                            steps.push(NetStep {
                                rule: Rule::OnePerContextZero,
                                context: Some(cid),
                                atom: a,
                                value: false,
                            });
                            changed = true;
                        }
                        Some(true) => {
                            steps.push(NetStep {
                                rule: Rule::Contradiction,
                                context: Some(cid),
                                atom: a,
                                value: false,
                            });
                            return Outcome::Contradiction;
                        }
                        Some(false) => {}
                    }
                }
            } else {
                let mut unassigned = ctx.iter().copied().filter(|&a| assignment[a].is_none());
                if let (Some(last), None) = (unassigned.next(), unassigned.next()) {
                    if ctx
                        .iter()
                        .all(|&a| a == last || assignment[a] == Some(false))
                    {
                        assignment[last] = Some(true);
                        steps.push(NetStep {
                            rule: Rule::LastAtomOne,
                            context: Some(cid),
                            atom: last,
                            value: true,
                        });
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Outcome::Fixpoint;
        }
    }
}

fn first_context_of(net: &ContextNet, atom: usize) -> Option<usize> {
    net.contexts.iter().position(|ctx| ctx.contains(&atom))
}

#[derive(Debug, Clone)]
pub enum NetSearchResult {
    Sat {
        assignment: Vec<bool>,
        nodes: u64,
    },
    Unsat {
        nodes: u64,
        roots: Vec<NetRootOutcome>,
    },
}

/// What happened under one atom choice at the first branching context.
#[derive(Debug, Clone)]
pub struct NetRootOutcome {
    pub choice: usize,
    pub result: NetRootResult,
}

#[derive(Debug, Clone)]
pub enum NetRootResult {
    Contradiction(NetTrace),
    Exhausted { nodes: u64 },
}

/// Complete backtracking search: branch, context by context, on which atom
/// receives value 1, with propagation after every decision. A total
/// assignment is a solution only if `accept` endorses it, so callers can
/// layer extra semantics (global-element checks) on top of colouring.
/// Deterministic: the first solution in canonical decision order is returned.
pub fn search(
    net: &ContextNet,
    seeds: &[(usize, bool)],
    accept: &mut dyn FnMut(&[bool]) -> bool,
) -> NetSearchResult {
    let mut assignment = vec![None; net.n_atoms];
    let mut steps = Vec::new();
    if propagate_from(net, &mut assignment, seeds, &mut steps) == Outcome::Contradiction {
        return NetSearchResult::Unsat {
            nodes: 0,
            roots: Vec::new(),
        };
    }

    let mut nodes = 0u64;
    match next_open_context(net, &assignment) {
        None => {
            let total = finish(net, &assignment);
            if accept(&total) {
                NetSearchResult::Sat {
                    assignment: total,
                    nodes,
                }
            } else {
                NetSearchResult::Unsat {
                    nodes,
                    roots: Vec::new(),
                }
            }
        }
        Some(cid) => {
            let mut roots = Vec::new();
            let options: Vec<usize> = net.contexts[cid]
                .iter()
                .copied()
                .filter(|&a| assignment[a].is_none())
                .collect();
            for choice in options {
                nodes += 1;
                let mut branch = assignment.clone();
                let mut branch_steps = Vec::new();
                let outcome =
                    propagate_from(net, &mut branch, &[(choice, true)], &mut branch_steps);
                if outcome == Outcome::Contradiction {
                    roots.push(NetRootOutcome {
                        choice,
                        result: NetRootResult::Contradiction(NetTrace {
                            steps: branch_steps,
                            outcome,
                        }),
                    });
                    continue;
                }
                let before = nodes;
                if let Some(total) = dfs(net, branch, accept, &mut nodes) {
                    return NetSearchResult::Sat {
                        assignment: total,
                        nodes,
                    };
                }
                roots.push(NetRootOutcome {
                    choice,
                    result: NetRootResult::Exhausted {
                        nodes: nodes - before,
                    },
                });
            }
            NetSearchResult::Unsat { nodes, roots }
        }
    }
}

fn dfs(
    net: &ContextNet,
    assignment: Vec<Option<bool>>,
    accept: &mut dyn FnMut(&[bool]) -> bool,
    nodes: &mut u64,
) -> Option<Vec<bool>> {
    match next_open_context(net, &assignment) {
        None => {
            let total = finish(net, &assignment);
            accept(&total).then_some(total)
        }
        Some(cid) => {
            let options: Vec<usize> = net.contexts[cid]
                .iter()
                .copied()
                .filter(|&a| assignment[a].is_none())
                .collect();
            for choice in options {
                *nodes += 1;
                let mut branch = assignment.clone();
                let mut steps = Vec::new();
                if propagate_from(net, &mut branch, &[(choice, true)], &mut steps)
                    == Outcome::Contradiction
                {
                    continue;
                }
                if let Some(total) = dfs(net, branch, accept, nodes) {
                    return Some(total);
                }
            }
            None
        }
    }
}

/// First context, in id order, that does not yet contain a 1-atom.
fn next_open_context(net: &ContextNet, assignment: &[Option<bool>]) -> Option<usize> {
    net.contexts
        .iter()
        .position(|ctx| !ctx.iter().any(|&a| assignment[a] == Some(true)))
}

/// Turn a saturated assignment into a total one. Every context holds a 1, so
/// propagation has pinned all atoms; unvisited atoms cannot occur.
fn finish(net: &ContextNet, assignment: &[Option<bool>]) -> Vec<bool> {
    debug_assert!(net
        .contexts
        .iter()
        .all(|ctx| ctx.iter().all(|&a| assignment[a].is_some())));
    assignment.iter().map(|v| v.unwrap_or(false)).collect()
}

/// Re-run propagation from the trace's premises and compare step for step.
/// Sound traces replay exactly; any divergence is reported.
pub fn replay_matches(net: &ContextNet, seeds: &[(usize, bool)], trace: &NetTrace) -> bool {
    let (_, fresh) = propagate(net, seeds);
    fresh == *trace
}
