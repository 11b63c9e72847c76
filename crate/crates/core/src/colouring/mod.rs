//! Valuation semantics on projectors: constraint propagation with auditable
//! traces, definite-prediction verification, exhaustive global-element
//! search, and the magic-square parity argument.
//!
//! Additivity inside a context (exactly one atom of an orthogonal resolution
//! carries the value 1) drives two rules: a 1-atom zeroes its context
//! siblings, and a context whose other atoms are all 0 forces the last atom
//! to 1. Equal subspaces share their value across contexts through a
//! deduplicated atom registry. The propagation core lives in [`engine`]; this
//! module maps it onto [`Subspace`] atoms and the poset view.

pub mod engine;
pub mod parity;

use thiserror::Error;

use crate::contexts::{Algebra, WPoset};
use crate::exactnum::Scalar;
use crate::presheaf::{self, ElementCandidate, GlobalCheck, PresheafError};
use crate::rays::Subspace;

pub use engine::{Outcome, Rule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColouringError {
    #[error("projector {0} is not an atom of any listed context")]
    UnknownProjector(String),
    #[error("conflicting assignment for {0}")]
    ConflictingAssignment(String),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

/// Bit assignments on projector ranges. Inserting both values for one
/// subspace is rejected at once rather than stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialValuation<S: Scalar> {
    entries: Vec<(Subspace<S>, bool)>,
}

impl<S: Scalar> PartialValuation<S> {
    pub fn new() -> Self {
        PartialValuation {
            entries: Vec::new(),
        }
    }

    pub fn assign(&mut self, subspace: Subspace<S>, value: bool) -> Result<(), ColouringError> {
        if let Some(existing) = self.get(&subspace) {
            if existing != value {
                return Err(ColouringError::ConflictingAssignment(subspace.render()));
            }
            return Ok(());
        }
        self.entries.push((subspace, value));
        Ok(())
    }

    pub fn get(&self, subspace: &Subspace<S>) -> Option<bool> {
        self.entries
            .iter()
            .find(|(s, _)| s == subspace)
            .map(|&(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subspace<S>, bool)> {
        self.entries.iter().map(|(s, v)| (s, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Deduplicated atoms of a list of contexts, plus each context as a list of
/// registry ids. Registry order follows context order, so ids are stable.
#[derive(Debug, Clone)]
pub struct AtomRegistry<S: Scalar> {
    atoms: Vec<Subspace<S>>,
    net: engine::ContextNet,
}

impl<S: Scalar> AtomRegistry<S> {
    pub fn from_contexts(contexts: &[Algebra<S>]) -> Self {
        let mut atoms: Vec<Subspace<S>> = Vec::new();
        let mut per_context = Vec::with_capacity(contexts.len());
        for algebra in contexts {
            let mut ids = Vec::with_capacity(algebra.atoms().len());
            for atom in algebra.atoms() {
                let id = match atoms.iter().position(|a| a == atom) {
                    Some(id) => id,
                    None => {
                        atoms.push(atom.clone());
                        atoms.len() - 1
                    }
                };
                ids.push(id);
            }
            per_context.push(ids);
        }
        let net = engine::ContextNet::new(atoms.len(), per_context);
        AtomRegistry { atoms, net }
    }

    pub fn atoms(&self) -> &[Subspace<S>] {
        &self.atoms
    }

    pub fn net(&self) -> &engine::ContextNet {
        &self.net
    }

    pub fn id_of(&self, subspace: &Subspace<S>) -> Option<usize> {
        self.atoms.iter().position(|a| a == subspace)
    }

    fn seeds_from(
        &self,
        valuation: &PartialValuation<S>,
    ) -> Result<Vec<(usize, bool)>, ColouringError> {
        valuation
            .iter()
            .map(|(subspace, value)| {
                self.id_of(subspace)
                    .map(|id| (id, value))
                    .ok_or_else(|| ColouringError::UnknownProjector(subspace.render()))
            })
            .collect()
    }

    fn valuation_from(&self, assignment: &[Option<bool>]) -> PartialValuation<S> {
        let mut out = PartialValuation::new();
        for (id, value) in assignment.iter().enumerate() {
            if let Some(v) = *value {
                out.entries.push((self.atoms[id].clone(), v));
            }
        }
        out
    }

    fn lift_trace(&self, trace: &engine::NetTrace) -> PropagationTrace<S> {
        PropagationTrace {
            steps: trace
                .steps
                .iter()
                .map(|s| TraceStep {
                    rule: s.rule,
                    context: s.context,
                    subject: self.atoms[s.atom].clone(),
                    value: s.value,
                })
                .collect(),
            outcome: trace.outcome,
        }
    }
}

/// One propagation step over subspace atoms; the implication chain these form
/// is the certificate a verdict ships with.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<S: Scalar> {
    pub rule: Rule,
    /// Index into the context list the rule fired in; `None` for seeds.
    pub context: Option<usize>,
    pub subject: Subspace<S>,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTrace<S: Scalar> {
    pub steps: Vec<TraceStep<S>>,
    pub outcome: Outcome,
}

impl<S: Scalar> PropagationTrace<S> {
    pub fn contradiction(&self) -> bool {
        self.outcome == Outcome::Contradiction
    }

    /// Position of the first step assigning `subject` to `value`, if any.
    pub fn position_of(&self, subject: &Subspace<S>, value: bool) -> Option<usize> {
        self.steps.iter().position(|s| {
            s.rule != Rule::Contradiction && &s.subject == subject && s.value == value
        })
    }
}

/// Close `initial` under the propagation rules over the given contexts.
/// Terminates at a fixpoint or at the first contradiction, whichever comes
/// first, and returns the reached valuation with its trace.
pub fn propagate<S: Scalar>(
    contexts: &[Algebra<S>],
    initial: &PartialValuation<S>,
) -> Result<(PartialValuation<S>, PropagationTrace<S>), ColouringError> {
    let registry = AtomRegistry::from_contexts(contexts);
    let seeds = registry.seeds_from(initial)?;
    let (assignment, trace) = engine::propagate(registry.net(), &seeds);
    Ok((
        registry.valuation_from(&assignment),
        registry.lift_trace(&trace),
    ))
}

/// Evidence that a prediction is forced: either the propagation chain alone
/// reaches the contradiction, or an exhaustive search over the remaining
/// choices confirms it (with the node count recorded).
#[derive(Debug, Clone)]
pub struct DpsCertificate<S: Scalar> {
    pub trace: PropagationTrace<S>,
    pub search_nodes: Option<u64>,
}

#[derive(Debug, Clone)]
pub enum DpsResult<S: Scalar> {
    Verified(DpsCertificate<S>),
    NotForced { witness: PartialValuation<S> },
}

/// Does `input` force `predicted`? Assume the opposite value, propagate, and
/// if needed search exhaustively. `NotForced` carries a consistent total
/// counter-example.
pub fn verify_dps<S: Scalar>(
    contexts: &[Algebra<S>],
    input: &PartialValuation<S>,
    predicted: (&Subspace<S>, bool),
) -> Result<DpsResult<S>, ColouringError> {
    let registry = AtomRegistry::from_contexts(contexts);
    let (subspace, value) = predicted;
    let target = registry
        .id_of(subspace)
        .ok_or_else(|| ColouringError::UnknownProjector(subspace.render()))?;
    let mut seeds = registry.seeds_from(input)?;
    seeds.push((target, !value));

    let (_, net_trace) = engine::propagate(registry.net(), &seeds);
    if net_trace.contradiction() {
        return Ok(DpsResult::Verified(DpsCertificate {
            trace: registry.lift_trace(&net_trace),
            search_nodes: None,
        }));
    }
    match engine::search(registry.net(), &seeds, &mut |_| true) {
        engine::NetSearchResult::Sat { assignment, .. } => {
            let mut witness = PartialValuation::new();
            for (id, &v) in assignment.iter().enumerate() {
                witness.entries.push((registry.atoms()[id].clone(), v));
            }
            Ok(DpsResult::NotForced { witness })
        }
        engine::NetSearchResult::Unsat { nodes, .. } => Ok(DpsResult::Verified(DpsCertificate {
            trace: registry.lift_trace(&net_trace),
            search_nodes: Some(nodes),
        })),
    }
}

/// Outcome of the exhaustive global-element search.
#[derive(Debug, Clone)]
pub enum SearchResult<S: Scalar> {
    Sat(ElementCandidate),
    Unsat(SearchStats<S>),
}

#[derive(Debug, Clone)]
pub struct SearchStats<S: Scalar> {
    pub nodes: u64,
    pub roots: Vec<RootOutcome<S>>,
}

#[derive(Debug, Clone)]
pub struct RootOutcome<S: Scalar> {
    pub choice: Subspace<S>,
    pub result: RootResult<S>,
}

#[derive(Debug, Clone)]
pub enum RootResult<S: Scalar> {
    Contradiction(PropagationTrace<S>),
    Exhausted { nodes: u64 },
}

/// Complete backtracking search for a global element of the dual presheaf
/// over `poset`. Branches per maximal context on which atom receives 1, with
/// unit propagation after each decision; a saturated colouring is accepted
/// only if the candidate it induces passes [`presheaf::is_global`], so
/// degenerate algebras shared between contexts genuinely constrain the
/// result. Unsat is exhaustive.
pub fn search_global<S: Scalar>(poset: &WPoset<S>) -> SearchResult<S> {
    let maximal_ids = poset.maximal_ids();
    let maximal_algebras: Vec<Algebra<S>> = maximal_ids
        .iter()
        .map(|&id| poset.algebra(id).clone())
        .collect();
    let registry = AtomRegistry::from_contexts(&maximal_algebras);
    let table = presheaf::RestrictionTable::new(poset).expect("poset is well formed");
    let derivations = derivation_maps(poset);

    let build_candidate = |total: &[bool]| -> Option<ElementCandidate> {
        let mut candidate = ElementCandidate::new();
        for (ctx_pos, &poset_id) in maximal_ids.iter().enumerate() {
            let ids = &registry.net().contexts()[ctx_pos];
            let chosen = ids.iter().position(|&atom| total[atom])?;
            candidate.choose(poset_id, chosen);
        }
        for (id, parent, map) in &derivations {
            let upstairs = candidate.get(*parent)?;
            candidate.choose(*id, map[upstairs.atom]);
        }
        Some(candidate)
    };

    let mut accept = |total: &[bool]| -> bool {
        match build_candidate(total) {
            Some(candidate) => matches!(table.check(&candidate), GlobalCheck::Ok),
            None => false,
        }
    };

    match engine::search(registry.net(), &[], &mut accept) {
        engine::NetSearchResult::Sat { assignment, .. } => {
            let candidate =
                build_candidate(&assignment).expect("accepted assignment induces a candidate");
            SearchResult::Sat(candidate)
        }
        engine::NetSearchResult::Unsat { nodes, roots } => SearchResult::Unsat(SearchStats {
            nodes,
            roots: roots
                .into_iter()
                .map(|r| RootOutcome {
                    choice: registry.atoms()[r.choice].clone(),
                    result: match r.result {
                        engine::NetRootResult::Contradiction(t) => {
                            RootResult::Contradiction(registry.lift_trace(&t))
                        }
                        engine::NetRootResult::Exhausted { nodes } => {
                            RootResult::Exhausted { nodes }
                        }
                    },
                })
                .collect(),
        }),
    }
}

/// Restriction lookup for every non-maximal algebra from its first maximal
/// parent: (algebra id, parent id, parent-atom to child-atom map).
fn derivation_maps<S: Scalar>(poset: &WPoset<S>) -> Vec<(usize, usize, Vec<usize>)> {
    poset
        .non_maximal_ids()
        .into_iter()
        .map(|id| {
            let parent = *poset
                .maximal_parents(id)
                .first()
                .expect("every algebra in a poset sits under a maximal one");
            let map = presheaf::fiber(poset, parent)
                .into_iter()
                .map(|hom| {
                    presheaf::restrict(poset, hom, id)
                        .expect("restriction along an inclusion")
                        .atom
                })
                .collect();
            (id, parent, map)
        })
        .collect()
}

/// Slow cross-check for [`search_global`]: walk every combination of one
/// chosen atom per maximal context in canonical order, keep those where
/// shared atoms receive one consistent value, and return the first candidate
/// that passes the presheaf matching condition. Exponential in the context
/// count; use on small posets only.
pub fn enumerate_global<S: Scalar>(poset: &WPoset<S>) -> Option<ElementCandidate> {
    let maximal_ids = poset.maximal_ids();
    let maximal_algebras: Vec<Algebra<S>> = maximal_ids
        .iter()
        .map(|&id| poset.algebra(id).clone())
        .collect();
    let registry = AtomRegistry::from_contexts(&maximal_algebras);
    let contexts = registry.net().contexts().to_vec();
    if contexts.is_empty() {
        return Some(ElementCandidate::new());
    }
    let table = presheaf::RestrictionTable::new(poset).expect("poset is well formed");
    let derivations = derivation_maps(poset);

    let mut odometer = vec![0usize; contexts.len()];
    'combos: loop {
        let mut values: Vec<Option<bool>> = vec![None; registry.atoms().len()];
        let mut consistent = true;
        'fill: for (ctx, &pick) in contexts.iter().zip(&odometer) {
            for (pos, &atom) in ctx.iter().enumerate() {
                let value = pos == pick;
                match values[atom] {
                    Some(existing) if existing != value => {
                        consistent = false;
                        break 'fill;
                    }
                    _ => values[atom] = Some(value),
                }
            }
        }
        if consistent {
            let mut candidate = ElementCandidate::new();
            for (ctx_pos, &poset_id) in maximal_ids.iter().enumerate() {
                candidate.choose(poset_id, odometer[ctx_pos]);
            }
            for (id, parent, map) in &derivations {
                let upstairs = candidate.get(*parent).expect("maximal choices are set");
                candidate.choose(*id, map[upstairs.atom]);
            }
            if matches!(table.check(&candidate), GlobalCheck::Ok) {
                return Some(candidate);
            }
        }
        // Advance the odometer, last context fastest.
        for slot in (0..odometer.len()).rev() {
            odometer[slot] += 1;
            if odometer[slot] < contexts[slot].len() {
                continue 'combos;
            }
            odometer[slot] = 0;
        }
        return None;
    }
}

/// The parity-argument shortcut for the magic square.
pub use parity::{mermin_parity_check, ParityCertificate, ParityOutcome, ParitySystem};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::{build_poset, Algebra};
    use crate::exactnum::QuadScalar;
    use crate::rays::{Ray, Vector};

    fn ray(coords: &[i64]) -> Ray<QuadScalar> {
        Ray::canonicalize(&Vector::new(
            coords.iter().map(|&c| QuadScalar::from_int(c, 2)).collect(),
        ))
        .unwrap()
    }

    fn axis_context() -> Algebra<QuadScalar> {
        Algebra::maximal_from_rays(&[ray(&[1, 0, 0]), ray(&[0, 1, 0]), ray(&[0, 0, 1])]).unwrap()
    }

    #[test]
    fn one_in_a_context_zeroes_the_rest() {
        let ctx = axis_context();
        let mut initial = PartialValuation::new();
        initial.assign(ray(&[1, 0, 0]).subspace(), true).unwrap();
        let (valuation, trace) = propagate(std::slice::from_ref(&ctx), &initial).unwrap();
        assert!(!trace.contradiction());
        assert_eq!(valuation.get(&ray(&[0, 1, 0]).subspace()), Some(false));
        assert_eq!(valuation.get(&ray(&[0, 0, 1]).subspace()), Some(false));
    }

    #[test]
    fn zeros_force_the_last_atom() {
        let ctx = axis_context();
        let mut initial = PartialValuation::new();
        initial.assign(ray(&[1, 0, 0]).subspace(), false).unwrap();
        initial.assign(ray(&[0, 1, 0]).subspace(), false).unwrap();
        let (valuation, trace) = propagate(std::slice::from_ref(&ctx), &initial).unwrap();
        assert!(!trace.contradiction());
        assert_eq!(valuation.get(&ray(&[0, 0, 1]).subspace()), Some(true));
    }

    #[test]
    fn unknown_projector_is_reported() {
        let ctx = axis_context();
        let mut initial = PartialValuation::new();
        initial.assign(ray(&[1, 1, 1]).subspace(), true).unwrap();
        let err = propagate(std::slice::from_ref(&ctx), &initial).unwrap_err();
        assert!(matches!(err, ColouringError::UnknownProjector(_)));
    }

    #[test]
    fn valuation_rejects_conflicts() {
        let mut v = PartialValuation::new();
        v.assign(ray(&[1, 0, 0]).subspace(), true).unwrap();
        assert!(v.assign(ray(&[1, 0, 0]).subspace(), true).is_ok());
        assert!(matches!(
            v.assign(ray(&[1, 0, 0]).subspace(), false),
            Err(ColouringError::ConflictingAssignment(_))
        ));
    }

    #[test]
    fn prediction_in_a_single_context_is_not_forced() {
        let ctx = axis_context();
        let mut input = PartialValuation::new();
        input.assign(ray(&[1, 0, 0]).subspace(), true).unwrap();
        let predicted = ray(&[0, 1, 0]).subspace();
        match verify_dps(std::slice::from_ref(&ctx), &input, (&predicted, true)).unwrap() {
            DpsResult::NotForced { witness } => {
                assert_eq!(witness.get(&predicted), Some(false));
                assert_eq!(witness.get(&ray(&[1, 0, 0]).subspace()), Some(true));
            }
            DpsResult::Verified(_) => panic!("a single context forces nothing extra"),
        }
    }

    #[test]
    fn search_on_one_context_is_sat_and_global() {
        let poset = build_poset(&[axis_context()], &[vec![2, 1]], Vec::new());
        match search_global(&poset) {
            SearchResult::Sat(candidate) => {
                assert_eq!(candidate.len(), poset.len());
                assert!(matches!(
                    presheaf::is_global(&poset, &candidate),
                    Ok(GlobalCheck::Ok)
                ));
            }
            SearchResult::Unsat(_) => panic!("one context is trivially colourable"),
        }
    }
}
