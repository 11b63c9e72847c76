//! Boolean subalgebras of projectors and their inclusion poset.
//!
//! An [`Algebra`] is stored by its atoms: pairwise-orthogonal subspaces whose
//! ranks sum to the ambient dimension (an orthogonal resolution of identity).
//! Joins of atoms recover the full algebra, so atom-set equality is algebra
//! equality. Maximal contexts are found as maximal cliques of the
//! orthogonality graph of a ray set; near-complete cliques can be completed by
//! the unique missing direction. [`build_poset`] assembles the inclusion poset
//! with Hasse edges.

use std::cmp::Ordering;

use thiserror::Error;

use crate::exactnum::Scalar;
use crate::rays::{LinError, Ray, Subspace, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error("rays have mixed dimensions: {0} vs {1}")]
    MixedDimensions(usize, usize),
    #[error("no rays given")]
    EmptyRays,
    #[error("target dimension {target} must exceed the current dimension {current}")]
    TargetDim { target: usize, current: usize },
    #[error("atoms are not pairwise orthogonal")]
    AtomsNotOrthogonal,
    #[error("atom ranks sum to {got} in ambient dimension {ambient}")]
    RankSum { got: usize, ambient: usize },
}

/// Multiset of atom ranks, sorted descending: `[1,1,1]`, `[2,1]`, `[2,2]`, ...
pub type Signature = Vec<usize>;

pub fn signature_from_ranks(mut ranks: Vec<usize>) -> Signature {
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    ranks
}

/// A Boolean subalgebra, represented by its atoms in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra<S: Scalar> {
    atoms: Vec<Subspace<S>>,
}

impl<S: Scalar> Algebra<S> {
    /// Validate orthogonality and the rank sum, then sort atoms canonically.
    pub fn from_atoms(mut atoms: Vec<Subspace<S>>) -> Result<Self, ContextError> {
        let first = atoms.first().ok_or(ContextError::EmptyRays)?;
        let ambient = first.ambient();
        for a in &atoms {
            if a.ambient() != ambient {
                return Err(ContextError::MixedDimensions(ambient, a.ambient()));
            }
        }
        let got: usize = atoms.iter().map(|a| a.rank()).sum();
        if got != ambient {
            return Err(ContextError::RankSum { got, ambient });
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if !atoms[i].orthogonal_to(&atoms[j]) {
                    return Err(ContextError::AtomsNotOrthogonal);
                }
            }
        }
        atoms.sort_by(|a, b| a.canonical_cmp(b));
        Ok(Algebra { atoms })
    }

    /// The maximal algebra whose atoms are the given orthogonal rays.
    pub fn maximal_from_rays(rays: &[Ray<S>]) -> Result<Self, ContextError> {
        Self::from_atoms(rays.iter().map(|r| r.subspace()).collect())
    }

    pub fn atoms(&self) -> &[Subspace<S>] {
        &self.atoms
    }

    pub fn ambient(&self) -> usize {
        self.atoms[0].ambient()
    }

    pub fn signature(&self) -> Signature {
        signature_from_ranks(self.atoms.iter().map(|a| a.rank()).collect())
    }

    pub fn is_maximal(&self) -> bool {
        self.atoms.iter().all(|a| a.rank() == 1)
    }

    /// Index of the unique atom whose subspace contains `sub`, if any.
    pub fn atom_containing(&self, sub: &Subspace<S>) -> Option<usize> {
        self.atoms
            .iter()
            .position(|a| a.contains(sub).unwrap_or(false))
    }

    /// Index of the atom equal to `sub`, if any.
    pub fn atom_index(&self, sub: &Subspace<S>) -> Option<usize> {
        self.atoms.iter().position(|a| a == sub)
    }

    /// Is `self` a subalgebra of `other`? True when every atom of `self` is a
    /// span of atoms of `other`, checked through rank bookkeeping.
    pub fn included_in(&self, other: &Algebra<S>) -> bool {
        if self.ambient() != other.ambient() {
            return false;
        }
        self.atoms.iter().all(|a| {
            let covered: usize = other
                .atoms
                .iter()
                .filter(|b| a.contains(b).unwrap_or(false))
                .map(|b| b.rank())
                .sum();
            covered == a.rank()
        })
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let len = self.atoms.len().cmp(&other.atoms.len());
        if len != Ordering::Equal {
            return len;
        }
        for (a, b) in self.atoms.iter().zip(&other.atoms) {
            match a.canonical_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.atoms.iter().map(|a| a.render()).collect();
        parts.join(" | ")
    }
}

/// All maximal cliques of the orthogonality graph of `rays`, turned into
/// maximal algebras. Cliques one short of a basis are completed by the unique
/// orthocomplement ray when `complete` is set (the new rays are returned
/// separately); smaller cliques are discarded. Output is canonically sorted
/// and independent of input order.
#[allow(clippy::type_complexity)]
pub fn maximal_contexts<S: Scalar>(
    rays: &[Ray<S>],
    complete: bool,
) -> Result<(Vec<Algebra<S>>, Vec<Ray<S>>), ContextError> {
    if rays.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let dim = rays[0].dim();
    for r in rays {
        if r.dim() != dim {
            return Err(ContextError::MixedDimensions(dim, r.dim()));
        }
    }
    let mut sorted: Vec<Ray<S>> = rays.to_vec();
    sorted.sort_by(|a, b| a.canonical_cmp(b));
    sorted.dedup();

    let n = sorted.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let prod = crate::rays::inner(sorted[i].vector(), sorted[j].vector())?;
            if prod.is_zero() {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }

    let mut cliques = Vec::new();
    let mut current = Vec::new();
    bron_kerbosch(
        &adj,
        &mut current,
        (0..n).collect(),
        Vec::new(),
        &mut cliques,
    );
    for c in cliques.iter_mut() {
        c.sort_unstable();
    }
    cliques.sort();

    let mut algebras = Vec::new();
    let mut auxiliary: Vec<Ray<S>> = Vec::new();
    for clique in &cliques {
        let members: Vec<Ray<S>> = clique.iter().map(|&i| sorted[i].clone()).collect();
        if members.len() == dim {
            algebras.push(Algebra::maximal_from_rays(&members)?);
        } else if members.len() + 1 == dim && complete {
            let vectors: Vec<Vector<S>> = members.iter().map(|r| r.vector().clone()).collect();
            let missing = Subspace::span(&vectors)?.orthocomplement()?;
            debug_assert_eq!(missing.rank(), 1);
            let new_ray = Ray::canonicalize(&Vector::new(missing.basis_rows()[0].clone()))?;
            if !auxiliary.contains(&new_ray) {
                auxiliary.push(new_ray.clone());
            }
            let mut full = members;
            full.push(new_ray);
            algebras.push(Algebra::maximal_from_rays(&full)?);
        }
    }
    algebras.sort_by(|a, b| a.canonical_cmp(b));
    auxiliary.sort_by(|a, b| a.canonical_cmp(b));
    Ok((algebras, auxiliary))
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    current: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() && excluded.is_empty() {
        out.push(current.clone());
        return;
    }
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&u| candidates.iter().filter(|&&v| adj[u][v]).count())
        .expect("nonempty candidate or excluded set");
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&v| !adj[pivot][v])
        .collect();
    for v in branch {
        current.push(v);
        let next_candidates = candidates.iter().copied().filter(|&u| adj[v][u]).collect();
        let next_excluded = excluded.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, current, next_candidates, next_excluded, out);
        current.pop();
        candidates.retain(|&u| u != v);
        excluded.push(v);
    }
}

/// Proper coarsenings of a maximal algebra: one algebra per partition of the
/// atom set whose block-rank signature is listed in `signatures`.
pub fn subalgebras_of<S: Scalar>(m: &Algebra<S>, signatures: &[Signature]) -> Vec<Algebra<S>> {
    assert!(
        m.is_maximal(),
        "coarsenings are generated from maximal algebras"
    );
    let k = m.atoms().len();
    let mut out = Vec::new();
    for partition in set_partitions(k) {
        let block_count = partition.iter().max().map_or(0, |&b| b + 1);
        if block_count <= 1 || block_count >= k {
            // One block is the trivial algebra, k blocks is m itself.
            continue;
        }
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); block_count];
        for (atom, &block) in partition.iter().enumerate() {
            blocks[block].push(atom);
        }
        let signature = signature_from_ranks(blocks.iter().map(|b| b.len()).collect::<Vec<_>>());
        if !signatures.contains(&signature) {
            continue;
        }
        let atoms: Vec<Subspace<S>> = blocks.iter().map(|block| span_of_atoms(m, block)).collect();
        out.push(Algebra::from_atoms(atoms).expect("coarsening of a valid algebra"));
    }
    out.sort_by(|a, b| a.canonical_cmp(b));
    out
}

fn span_of_atoms<S: Scalar>(m: &Algebra<S>, block: &[usize]) -> Subspace<S> {
    if block.len() == 1 {
        return m.atoms()[block[0]].clone();
    }
    let vectors: Vec<Vector<S>> = block
        .iter()
        .flat_map(|&i| m.atoms()[i].basis_rows().iter().cloned())
        .map(Vector::new)
        .collect();
    Subspace::span(&vectors).expect("atoms are nonzero")
}

/// All set partitions of `{0, .., k-1}` as restricted growth strings.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    fn recurse(
        k: usize,
        pos: usize,
        max_used: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == k {
            out.push(current.clone());
            return;
        }
        for block in 0..=max_used + 1 {
            current[pos] = block;
            recurse(k, pos + 1, max_used.max(block), current, out);
        }
    }
    if k == 0 {
        return out;
    }
    recurse(k, 1, 0, &mut current, &mut out);
    out
}

/// The inclusion poset of algebras, with Hasse edges and the rays introduced
/// by context completion. Ids are indices into the canonically sorted algebra
/// list, so they are stable across runs.
#[derive(Debug, Clone)]
pub struct WPoset<S: Scalar> {
    algebras: Vec<Algebra<S>>,
    hasse: Vec<(usize, usize)>,
    le: Vec<Vec<bool>>,
    auxiliary: Vec<Ray<S>>,
}

/// Deduplicated union of the given maximal algebras and their coarsenings
/// with the requested signatures. A degenerate algebra generated from several
/// parents appears once, with inclusion edges to each of them.
pub fn build_poset<S: Scalar>(
    maximals: &[Algebra<S>],
    signatures: &[Signature],
    auxiliary: Vec<Ray<S>>,
) -> WPoset<S> {
    let mut algebras: Vec<Algebra<S>> = Vec::new();
    let push_unique = |list: &mut Vec<Algebra<S>>, a: Algebra<S>| {
        if !list.contains(&a) {
            list.push(a);
        }
    };
    for m in maximals {
        push_unique(&mut algebras, m.clone());
    }
    for m in maximals {
        for sub in subalgebras_of(m, signatures) {
            push_unique(&mut algebras, sub);
        }
    }
    algebras.sort_by(|a, b| a.canonical_cmp(b));

    let n = algebras.len();
    let mut le = vec![vec![false; n]; n];
    for (i, child) in algebras.iter().enumerate() {
        le[i][i] = true;
        for (j, parent) in algebras.iter().enumerate() {
            if i != j && child.included_in(parent) {
                le[i][j] = true;
            }
        }
    }
    let mut hasse = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !le[i][j] {
                continue;
            }
            let direct = !(0..n).any(|k| k != i && k != j && le[i][k] && le[k][j]);
            if direct {
                hasse.push((i, j));
            }
        }
    }
    hasse.sort_unstable();
    WPoset {
        algebras,
        hasse,
        le,
        auxiliary,
    }
}

impl<S: Scalar> WPoset<S> {
    pub fn len(&self) -> usize {
        self.algebras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty()
    }

    pub fn algebra(&self, id: usize) -> &Algebra<S> {
        &self.algebras[id]
    }

    pub fn algebras(&self) -> &[Algebra<S>] {
        &self.algebras
    }

    /// Hasse edges as (child, parent) pairs in canonical order.
    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Reflexive inclusion test: is algebra `a` a subalgebra of `b`?
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn maximal_ids(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.algebras[i].is_maximal())
            .collect()
    }

    pub fn non_maximal_ids(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.algebras[i].is_maximal())
            .collect()
    }

    /// Ids of maximal algebras containing `id` (by inclusion, not only Hasse).
    pub fn maximal_parents(&self, id: usize) -> Vec<usize> {
        self.maximal_ids()
            .into_iter()
            .filter(|&m| m != id && self.le(id, m))
            .collect()
    }

    pub fn auxiliary(&self) -> &[Ray<S>] {
        &self.auxiliary
    }
}

/// Embed `rays` into a larger space by zero-padding, and adjoin the new axis
/// rays so every padded context can be completed through them.
pub fn lift_dimension<S: Scalar>(
    rays: &[Ray<S>],
    target_dim: usize,
) -> Result<Vec<Ray<S>>, ContextError> {
    let first = rays.first().ok_or(ContextError::EmptyRays)?;
    let current = first.dim();
    if target_dim <= current {
        return Err(ContextError::TargetDim {
            target: target_dim,
            current,
        });
    }
    let zero = first.vector().coords()[0].zero_like();
    let one = zero.one_like();
    let mut out = Vec::new();
    for ray in rays {
        if ray.dim() != current {
            return Err(ContextError::MixedDimensions(current, ray.dim()));
        }
        let mut coords = ray.vector().coords().to_vec();
        coords.resize(target_dim, zero.clone());
        out.push(Ray::canonicalize(&Vector::new(coords))?);
    }
    for axis in current..target_dim {
        let mut coords = vec![zero.clone(); target_dim];
        coords[axis] = one.clone();
        out.push(Ray::canonicalize(&Vector::new(coords))?);
    }
    Ok(out)
}
