//! Dataset resolution and the label bookkeeping shared by all subcommands.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use kscheck_core::contexts::{maximal_contexts, Algebra, Signature};
use kscheck_core::datasets::{self, Dataset, TypedRaySet, BUILTIN_NAMES};
use kscheck_core::exactnum::Scalar;
use kscheck_core::rays::{Ray, Subspace};

/// Resolve a dataset argument: builtin names win, anything else is read as a
/// ray-set file path.
pub fn resolve(dataset: &str) -> Result<Dataset> {
    if BUILTIN_NAMES.contains(&dataset) {
        return Ok(datasets::builtin(dataset)?);
    }
    let path = Path::new(dataset);
    if !path.exists() {
        bail!(
            "{dataset:?} is neither a builtin dataset ({}) nor a file",
            BUILTIN_NAMES.join(", ")
        );
    }
    let outcome = datasets::load(path).with_context(|| format!("loading {dataset}"))?;
    for (dropped, kept) in &outcome.merged {
        eprintln!("note: ray {dropped} names the same direction as {kept}; merged");
    }
    Ok(Dataset::Rays(outcome.set))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ContextSource {
    /// Maximal cliques of the orthogonality graph (plus completion).
    Discovered,
    /// The context grouping listed with the dataset, when it has one.
    Listed,
}

/// Ray labels for everything that can appear in a trace: the dataset rays
/// plus completion rays, which receive letters A, B, ... in canonical order.
pub struct LabelTable<S: Scalar> {
    entries: Vec<(String, Ray<S>)>,
}

impl<S: Scalar> LabelTable<S> {
    pub fn build(set: &TypedRaySet<S>, auxiliary: &[Ray<S>]) -> Self {
        let mut entries: Vec<(String, Ray<S>)> = set
            .rays
            .iter()
            .map(|r| (r.label.clone(), r.ray.clone()))
            .collect();
        let mut used: Vec<String> = entries.iter().map(|(l, _)| l.clone()).collect();
        let mut fresh = aux_letters();
        for ray in auxiliary {
            let label = loop {
                let candidate = fresh.next().expect("letter stream is unbounded");
                if !used.contains(&candidate) {
                    break candidate;
                }
            };
            used.push(label.clone());
            entries.push((label, ray.clone()));
        }
        LabelTable { entries }
    }

    pub fn ray(&self, label: &str) -> Option<&Ray<S>> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, r)| r)
    }

    /// Name for a rank-1 subspace, falling back to coordinates.
    pub fn subject(&self, subspace: &Subspace<S>) -> String {
        self.entries
            .iter()
            .find(|(_, r)| &r.subspace() == subspace)
            .map(|(l, _)| l.clone())
            .unwrap_or_else(|| subspace.render())
    }

    /// Human description of any atom: a ray label for rank 1, otherwise the
    /// bracketed list of table rays the subspace contains.
    pub fn describe_atom(&self, atom: &Subspace<S>) -> String {
        if atom.rank() == 1 {
            return self.subject(atom);
        }
        let members: Vec<&str> = self
            .entries
            .iter()
            .filter(|(_, r)| atom.contains(&r.subspace()).unwrap_or(false))
            .map(|(l, _)| l.as_str())
            .collect();
        if members.is_empty() {
            atom.render()
        } else {
            format!("[{}]", members.join(" "))
        }
    }

    pub fn describe_algebra(&self, algebra: &Algebra<S>) -> String {
        let parts: Vec<String> = algebra
            .atoms()
            .iter()
            .map(|a| self.describe_atom(a))
            .collect();
        parts.join(" ")
    }

    /// Figure-style label: the rank-1 member rays when the algebra has any,
    /// otherwise the bracketed higher-rank atoms (2-2 algebras).
    pub fn figure_label(&self, algebra: &Algebra<S>) -> String {
        let rays: Vec<String> = algebra
            .atoms()
            .iter()
            .filter(|a| a.rank() == 1)
            .map(|a| self.subject(a))
            .collect();
        if rays.is_empty() {
            self.describe_algebra(algebra)
        } else {
            rays.join(" ")
        }
    }
}

/// A, B, .., Z, then AA, AB, ...
fn aux_letters() -> impl Iterator<Item = String> {
    (0..).map(|i: usize| {
        let mut n = i;
        let mut label = String::new();
        loop {
            label.insert(0, (b'A' + (n % 26) as u8) as char);
            if n < 26 {
                break;
            }
            n = n / 26 - 1;
        }
        label
    })
}

/// Contexts ready for colouring, with labels for every atom that can occur.
pub struct Prepared<S: Scalar> {
    pub contexts: Vec<Algebra<S>>,
    pub auxiliary: Vec<Ray<S>>,
    pub labels: LabelTable<S>,
}

pub fn prepare<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    source: Option<ContextSource>,
) -> Result<Prepared<S>> {
    let effective = match source {
        Some(ContextSource::Listed) if set.groups.is_empty() => {
            bail!("dataset {} has no listed context grouping", set.name)
        }
        Some(s) => s,
        None if !set.groups.is_empty() => ContextSource::Listed,
        None => ContextSource::Discovered,
    };
    match effective {
        ContextSource::Discovered => {
            let rays = set.rays_only();
            let (contexts, auxiliary) = maximal_contexts(&rays, complete)?;
            let labels = LabelTable::build(set, &auxiliary);
            Ok(Prepared {
                contexts,
                auxiliary,
                labels,
            })
        }
        ContextSource::Listed => {
            let mut contexts = set.listed_contexts()?;
            contexts.sort_by(|a, b| a.canonical_cmp(b));
            let labels = LabelTable::build(set, &[]);
            Ok(Prepared {
                contexts,
                auxiliary: Vec::new(),
                labels,
            })
        }
    }
}

/// For `check`, the colouring view always comes from discovered contexts
/// unless the caller insists otherwise.
pub fn prepare_for_check<S: Scalar>(
    set: &TypedRaySet<S>,
    complete: bool,
    source: Option<ContextSource>,
) -> Result<Prepared<S>> {
    prepare(set, complete, source.or(Some(ContextSource::Discovered)))
}

/// Parse "r7=1" style assignments.
pub fn parse_assignment(text: &str) -> Result<(String, bool)> {
    let (label, value) = text
        .split_once('=')
        .ok_or_else(|| anyhow!("expected RAY=BIT, got {text:?}"))?;
    let bit = match value {
        "0" => false,
        "1" => true,
        other => bail!("expected bit 0 or 1, got {other:?} in {text:?}"),
    };
    Ok((label.to_string(), bit))
}

/// Parse "2-1" or "2-1-1,3-1,2-2" into signatures.
pub fn parse_signatures(text: &str) -> Result<Vec<Signature>> {
    text.split(',')
        .map(|part| {
            let ranks: Result<Vec<usize>, _> =
                part.trim().split('-').map(|r| r.parse::<usize>()).collect();
            let mut ranks = ranks.with_context(|| format!("bad signature {part:?}"))?;
            if ranks.is_empty() || ranks.contains(&0) {
                bail!("bad signature {part:?}");
            }
            ranks.sort_unstable_by(|a, b| b.cmp(a));
            Ok(ranks)
        })
        .collect()
}

/// Every proper degenerate signature of the given dimension.
pub fn default_signatures(dim: usize) -> Vec<Signature> {
    let mut out = Vec::new();
    for partition in partitions_of(dim) {
        if partition.len() > 1 && partition.len() < dim {
            out.push(partition);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn partitions_of(n: usize) -> Vec<Vec<usize>> {
    fn recurse(remaining: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            current.push(part);
            recurse(remaining - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    recurse(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_parsing() {
        assert_eq!(parse_signatures("2-1").unwrap(), vec![vec![2, 1]]);
        assert_eq!(
            parse_signatures("2-1-1,3-1,2-2").unwrap(),
            vec![vec![2, 1, 1], vec![3, 1], vec![2, 2]]
        );
        assert_eq!(parse_signatures("1-2").unwrap(), vec![vec![2, 1]]);
        assert!(parse_signatures("2-x").is_err());
        assert!(parse_signatures("2-0").is_err());
    }

    #[test]
    fn default_signatures_per_dimension() {
        assert_eq!(default_signatures(3), vec![vec![2, 1]]);
        assert_eq!(
            default_signatures(4),
            vec![vec![2, 1, 1], vec![2, 2], vec![3, 1]]
        );
    }

    #[test]
    fn aux_letter_stream() {
        let letters: Vec<String> = aux_letters().take(28).collect();
        assert_eq!(letters[0], "A");
        assert_eq!(letters[25], "Z");
        assert_eq!(letters[26], "AA");
        assert_eq!(letters[27], "AB");
    }

    #[test]
    fn assignment_parsing() {
        assert_eq!(parse_assignment("r7=1").unwrap(), ("r7".to_string(), true));
        assert_eq!(parse_assignment("A=0").unwrap(), ("A".to_string(), false));
        assert!(parse_assignment("r7").is_err());
        assert!(parse_assignment("r7=2").is_err());
    }
}
