//! The dual presheaf over a [`WPoset`]: fibers, restriction maps, and
//! global-element verification.
//!
//! The fiber over an algebra is its set of two-valued homomorphisms. A finite
//! Boolean algebra with k atoms has exactly k of them, one per atom, sending
//! that atom to 1 and every other atom to 0, so a [`Hom`] is stored as a
//! chosen-atom index. Restriction along an inclusion picks the unique atom of
//! the smaller algebra containing the chosen one.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::contexts::WPoset;
use crate::exactnum::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("algebra {child} is not included in algebra {parent}")]
    NotIncluded { child: usize, parent: usize },
    #[error("no atom of algebra {algebra} contains the restricted atom; poset is corrupted")]
    StructureError { algebra: usize },
    #[error("candidate misses algebras {missing:?}")]
    IncompleteCandidate { missing: Vec<usize> },
    #[error("hom refers to atom {atom} of algebra {algebra}, which has {count} atoms")]
    BadAtom {
        algebra: usize,
        atom: usize,
        count: usize,
    },
}

/// A two-valued homomorphism on one algebra: the chosen atom maps to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hom {
    pub algebra: usize,
    pub atom: usize,
}

/// A (possibly partial) assignment of one fiber element per algebra.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ElementCandidate {
    choices: BTreeMap<usize, usize>,
}

impl ElementCandidate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn choose(&mut self, algebra: usize, atom: usize) {
        self.choices.insert(algebra, atom);
    }

    pub fn get(&self, algebra: usize) -> Option<Hom> {
        self.choices
            .get(&algebra)
            .map(|&atom| Hom { algebra, atom })
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Hom> + '_ {
        self.choices
            .iter()
            .map(|(&algebra, &atom)| Hom { algebra, atom })
    }
}

/// All homomorphisms on algebra `w`, in atom order.
pub fn fiber<S: Scalar>(poset: &WPoset<S>, w: usize) -> Vec<Hom> {
    (0..poset.algebra(w).atoms().len())
        .map(|atom| Hom { algebra: w, atom })
        .collect()
}

fn check_hom<S: Scalar>(poset: &WPoset<S>, h: Hom) -> Result<(), PresheafError> {
    let count = poset.algebra(h.algebra).atoms().len();
    if h.atom >= count {
        return Err(PresheafError::BadAtom {
            algebra: h.algebra,
            atom: h.atom,
            count,
        });
    }
    Ok(())
}

/// Restrict `h` along the inclusion of `w2` into `h.algebra`: the resulting
/// hom chooses the unique atom of `w2` whose subspace contains the atom
/// chosen upstairs.
pub fn restrict<S: Scalar>(poset: &WPoset<S>, h: Hom, w2: usize) -> Result<Hom, PresheafError> {
    check_hom(poset, h)?;
    if !poset.le(w2, h.algebra) {
        return Err(PresheafError::NotIncluded {
            child: w2,
            parent: h.algebra,
        });
    }
    let chosen = &poset.algebra(h.algebra).atoms()[h.atom];
    let atom = poset
        .algebra(w2)
        .atom_containing(chosen)
        .ok_or(PresheafError::StructureError { algebra: w2 })?;
    Ok(Hom { algebra: w2, atom })
}

/// Every hom on `w_parent` whose restriction to `w_child` equals `h_child`:
/// the parent atoms lying inside the child's chosen atom.
pub fn preimage<S: Scalar>(
    poset: &WPoset<S>,
    w_child: usize,
    h_child: Hom,
    w_parent: usize,
) -> Result<Vec<Hom>, PresheafError> {
    debug_assert_eq!(h_child.algebra, w_child);
    check_hom(poset, h_child)?;
    if !poset.le(w_child, w_parent) {
        return Err(PresheafError::NotIncluded {
            child: w_child,
            parent: w_parent,
        });
    }
    let chosen = &poset.algebra(w_child).atoms()[h_child.atom];
    let homs = poset
        .algebra(w_parent)
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, atom)| chosen.contains(atom).unwrap_or(false))
        .map(|(atom, _)| Hom {
            algebra: w_parent,
            atom,
        })
        .collect();
    Ok(homs)
}

/// Result of checking the matching condition on every Hasse edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlobalCheck {
    Ok,
    Violation {
        child: usize,
        parent: usize,
        expected: Hom,
        found: Hom,
    },
}

/// Is the candidate a global element? Checks, for every Hasse edge
/// `child ⊂ parent`, that the parent's chosen hom restricts to the child's.
/// Violations are reported in canonical edge order, first one wins.
pub fn is_global<S: Scalar>(
    poset: &WPoset<S>,
    candidate: &ElementCandidate,
) -> Result<GlobalCheck, PresheafError> {
    let missing: Vec<usize> = (0..poset.len())
        .filter(|id| candidate.get(*id).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(PresheafError::IncompleteCandidate { missing });
    }
    for &(child, parent) in poset.hasse_edges() {
        let upstairs = candidate.get(parent).expect("candidate is total");
        let expected = restrict(poset, upstairs, child)?;
        let found = candidate.get(child).expect("candidate is total");
        if expected != found {
            return Ok(GlobalCheck::Violation {
                child,
                parent,
                expected,
                found,
            });
        }
    }
    Ok(GlobalCheck::Ok)
}

/// Restriction maps of a poset tabulated once, for callers that check many
/// candidates: `edge_maps[e][parent_atom]` is the child atom the restriction
/// along Hasse edge `e` picks. Agreement with [`restrict`] is by
/// construction; [`is_global`] remains the definitional check.
#[derive(Debug, Clone)]
pub struct RestrictionTable {
    edges: Vec<(usize, usize)>,
    edge_maps: Vec<Vec<usize>>,
}

impl RestrictionTable {
    pub fn new<S: Scalar>(poset: &WPoset<S>) -> Result<Self, PresheafError> {
        let edges = poset.hasse_edges().to_vec();
        let edge_maps = edges
            .iter()
            .map(|&(child, parent)| {
                fiber(poset, parent)
                    .into_iter()
                    .map(|hom| restrict(poset, hom, child).map(|h| h.atom))
                    .collect::<Result<Vec<usize>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RestrictionTable { edges, edge_maps })
    }

    /// Same verdict as [`is_global`] on total candidates, by table lookup.
    pub fn check(&self, candidate: &ElementCandidate) -> GlobalCheck {
        for (&(child, parent), map) in self.edges.iter().zip(&self.edge_maps) {
            let upstairs = candidate.get(parent).expect("candidate is total");
            let expected = map[upstairs.atom];
            let found = candidate.get(child).expect("candidate is total");
            if expected != found.atom {
                return GlobalCheck::Violation {
                    child,
                    parent,
                    expected: Hom {
                        algebra: child,
                        atom: expected,
                    },
                    found,
                };
            }
        }
        GlobalCheck::Ok
    }
}
