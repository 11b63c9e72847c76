//! Loop structure of the bipartite inclusion graph: factor-through reduction,
//! chordless cycle enumeration, and girth.
//!
//! Obstructions to global elements live on loops: alternating cycles of
//! degenerate and maximal algebras. Parallel degenerate algebras between the
//! same maximal parents carry no independent constraints: their inclusions
//! factor through the algebra they generate together, so [`reduce`] merges
//! each such family into that single combined algebra and drops degenerate
//! algebras with fewer than two maximal parents. Loop searches then run on
//! the reduced graph.

use std::collections::BTreeMap;

use crate::contexts::{Algebra, WPoset};
use crate::exactnum::Scalar;
use crate::rays::{Subspace, Vector};

/// One node on the degenerate side of the reduced graph: the combined
/// algebra, the poset ids it absorbed, and its maximal parents (as positions
/// into [`InclusionGraph::maximals`]).
#[derive(Debug, Clone)]
pub struct ReducedNode<S: Scalar> {
    pub algebra: Algebra<S>,
    pub members: Vec<usize>,
    pub parents: Vec<usize>,
}

/// Bipartite inclusion graph after factor-through reduction.
#[derive(Debug, Clone)]
pub struct InclusionGraph<S: Scalar> {
    maximals: Vec<usize>,
    nodes: Vec<ReducedNode<S>>,
}

impl<S: Scalar> InclusionGraph<S> {
    /// Poset ids of the maximal algebras, ascending.
    pub fn maximals(&self) -> &[usize] {
        &self.maximals
    }

    pub fn nodes(&self) -> &[ReducedNode<S>] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.parents.len()).sum()
    }

    /// The label-free bipartite structure the cycle algorithms run on.
    pub fn skeleton(&self) -> Skeleton {
        Skeleton::new(
            self.nodes.iter().map(|n| n.parents.clone()).collect(),
            self.maximals.len(),
        )
    }
}

/// Reduce the poset to its obstruction-relevant bipartite graph. Families of
/// degenerate algebras with identical maximal-parent sets (of size at least
/// two) are replaced by the algebra generated by the family; the rest are
/// dropped.
pub fn reduce<S: Scalar>(poset: &WPoset<S>) -> InclusionGraph<S> {
    let maximals = poset.maximal_ids();
    let slot_of: BTreeMap<usize, usize> = maximals
        .iter()
        .enumerate()
        .map(|(slot, &id)| (id, slot))
        .collect();

    let mut families: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for id in poset.non_maximal_ids() {
        let parents: Vec<usize> = poset
            .maximal_parents(id)
            .into_iter()
            .map(|p| slot_of[&p])
            .collect();
        if parents.len() >= 2 {
            families.entry(parents).or_default().push(id);
        }
    }

    let mut nodes: Vec<ReducedNode<S>> = families
        .into_iter()
        .map(|(parents, members)| {
            let host = poset.algebra(maximals[parents[0]]);
            let member_algebras: Vec<&Algebra<S>> =
                members.iter().map(|&id| poset.algebra(id)).collect();
            ReducedNode {
                algebra: combine(host, &member_algebras),
                members,
                parents,
            }
        })
        .collect();
    nodes.sort_by(|a, b| a.algebra.canonical_cmp(&b.algebra));
    InclusionGraph { maximals, nodes }
}

/// The subalgebra of `host` generated by all `members` together: the common
/// refinement of the partitions each member induces on the host's atoms.
fn combine<S: Scalar>(host: &Algebra<S>, members: &[&Algebra<S>]) -> Algebra<S> {
    let host_atoms = host.atoms();
    // Block signature of each host atom across all member partitions.
    let mut signature: Vec<Vec<usize>> = vec![Vec::new(); host_atoms.len()];
    for member in members {
        for (i, atom) in host_atoms.iter().enumerate() {
            let block = member
                .atom_containing(atom)
                .expect("member is a subalgebra of a shared parent");
            signature[i].push(block);
        }
    }
    let mut blocks: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, sig) in signature.into_iter().enumerate() {
        blocks.entry(sig).or_default().push(i);
    }
    let atoms: Vec<Subspace<S>> = blocks
        .values()
        .map(|idxs| {
            if idxs.len() == 1 {
                host_atoms[idxs[0]].clone()
            } else {
                let rows: Vec<Vector<S>> = idxs
                    .iter()
                    .flat_map(|&i| host_atoms[i].basis_rows().iter().cloned())
                    .map(Vector::new)
                    .collect();
                Subspace::span(&rows).expect("atoms are nonzero")
            }
        })
        .collect();
    debug_assert!(
        atoms.len() > 1,
        "combined algebra of distinct parents is proper"
    );
    Algebra::from_atoms(atoms).expect("refinement of a resolution of identity")
}

/// A label-free bipartite graph: degenerate vertices with their adjacent
/// maximal slots. Shared by poset-derived and diagram-level datasets.
#[derive(Debug, Clone)]
pub struct Skeleton {
    deg_adj: Vec<Vec<usize>>,
    max_count: usize,
}

impl Skeleton {
    pub fn new(mut deg_adj: Vec<Vec<usize>>, max_count: usize) -> Self {
        for adj in deg_adj.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
            debug_assert!(adj.iter().all(|&m| m < max_count));
        }
        Skeleton { deg_adj, max_count }
    }

    pub fn degenerate_count(&self) -> usize {
        self.deg_adj.len()
    }

    pub fn maximal_count(&self) -> usize {
        self.max_count
    }

    fn max_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.max_count];
        for (d, parents) in self.deg_adj.iter().enumerate() {
            for &m in parents {
                adj[m].push(d);
            }
        }
        adj
    }

    fn has_edge(&self, d: usize, m: usize) -> bool {
        self.deg_adj[d].binary_search(&m).is_ok()
    }
}

/// One alternating vertex of a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoopVertex {
    /// Index into the degenerate node list.
    Degenerate(usize),
    /// Position into the maximal list.
    Maximal(usize),
}

/// A simple alternating cycle, stored from its smallest degenerate vertex in
/// the direction that visits the smaller neighbouring maximal first. Even
/// length, at least 4.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Loop {
    vertices: Vec<LoopVertex>,
}

impl Loop {
    pub fn vertices(&self) -> &[LoopVertex] {
        &self.vertices
    }

    /// Total number of algebras on the cycle.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn maximal_count(&self) -> usize {
        self.vertices.len() / 2
    }

    pub fn maximal_slots(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .filter_map(|v| match v {
                LoopVertex::Maximal(m) => Some(*m),
                LoopVertex::Degenerate(_) => None,
            })
            .collect()
    }

    pub fn degenerate_indices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .filter_map(|v| match v {
                LoopVertex::Degenerate(d) => Some(*d),
                LoopVertex::Maximal(_) => None,
            })
            .collect()
    }
}

/// All chordless simple cycles with at most `max_maximals` maximal vertices,
/// canonicalized and sorted. `max_maximals` must be at least 2.
pub fn enumerate_loops<S: Scalar>(g: &InclusionGraph<S>, max_maximals: usize) -> Vec<Loop> {
    enumerate_loops_skeleton(&g.skeleton(), max_maximals)
}

pub fn enumerate_loops_skeleton(skeleton: &Skeleton, max_maximals: usize) -> Vec<Loop> {
    assert!(
        max_maximals >= 2,
        "a loop joins at least two maximal algebras"
    );
    let max_adj = skeleton.max_adj();
    let mut out = Vec::new();
    let mut path_deg = Vec::new();
    let mut path_max = Vec::new();
    for start in 0..skeleton.degenerate_count() {
        path_deg.push(start);
        extend_cycle(
            skeleton,
            &max_adj,
            start,
            max_maximals,
            &mut path_deg,
            &mut path_max,
            &mut out,
        );
        path_deg.pop();
    }
    out.retain(|l| is_chordless(skeleton, l));
    out.sort();
    out
}

/// Depth-first walk d0, m1, d1, m2, ... from the smallest degenerate vertex
/// of each cycle, with every other degenerate above it and the orientation
/// fixed by m1 < closing maximal, so each cycle is produced exactly once.
fn extend_cycle(
    skeleton: &Skeleton,
    max_adj: &[Vec<usize>],
    start: usize,
    max_maximals: usize,
    path_deg: &mut Vec<usize>,
    path_max: &mut Vec<usize>,
    out: &mut Vec<Loop>,
) {
    let current = *path_deg.last().unwrap();
    for &m in &skeleton.deg_adj[current] {
        if path_max.contains(&m) {
            continue;
        }
        let closes = path_deg.len() >= 2
            && path_max.len() < max_maximals
            && skeleton.has_edge(start, m)
            && path_max[0] < m;
        if closes {
            let mut vertices = Vec::with_capacity(path_deg.len() * 2);
            for (i, &d) in path_deg.iter().enumerate() {
                vertices.push(LoopVertex::Degenerate(d));
                let mx = if i < path_max.len() { path_max[i] } else { m };
                vertices.push(LoopVertex::Maximal(mx));
            }
            out.push(Loop { vertices });
        }
        // Going deeper commits to at least one more maximal before closing.
        if path_max.len() + 2 > max_maximals {
            continue;
        }
        path_max.push(m);
        for &d in &max_adj[m] {
            if d <= start || path_deg.contains(&d) {
                continue;
            }
            path_deg.push(d);
            extend_cycle(
                skeleton,
                max_adj,
                start,
                max_maximals,
                path_deg,
                path_max,
                out,
            );
            path_deg.pop();
        }
        path_max.pop();
    }
}

fn is_chordless(skeleton: &Skeleton, l: &Loop) -> bool {
    let n = l.vertices().len();
    for (i, v) in l.vertices().iter().enumerate() {
        let LoopVertex::Degenerate(d) = v else {
            continue;
        };
        for (j, w) in l.vertices().iter().enumerate() {
            let LoopVertex::Maximal(m) = w else { continue };
            let consecutive = (i + 1) % n == j || (j + 1) % n == i;
            if !consecutive && skeleton.has_edge(*d, *m) {
                return false;
            }
        }
    }
    true
}

/// Total length of the shortest loop, or `None` for an acyclic graph.
pub fn min_loop<S: Scalar>(g: &InclusionGraph<S>) -> Option<usize> {
    min_loop_skeleton(&g.skeleton())
}

/// Girth by breadth-first search from every vertex: a non-tree edge found at
/// distances du, dv bounds a cycle of length du + dv + 1, and the bound is
/// attained from a root lying on a shortest cycle.
pub fn min_loop_skeleton(skeleton: &Skeleton) -> Option<usize> {
    let d = skeleton.degenerate_count();
    let n = d + skeleton.maximal_count();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (deg, parents) in skeleton.deg_adj.iter().enumerate() {
        for &m in parents {
            adjacency[deg].push(d + m);
            adjacency[d + m].push(deg);
        }
    }
    let mut best: Option<usize> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let cycle = dist[u] + dist[v] + 1;
                    if best.is_none_or(|b| cycle < b) {
                        best = Some(cycle);
                    }
                }
            }
        }
    }
    best
}
