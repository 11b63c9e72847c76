//! Projective rays, inner products, and subspaces in reduced row-echelon form.
//!
//! A projector is represented by its range: a [`Subspace`] whose basis is the
//! unique RREF of any generating set, so subspace equality is plain matrix
//! equality. Coordinates are real (exact or tolerance-based); the inner
//! product is the symmetric bilinear form without conjugation.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::exactnum::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("zero vector where a direction is required")]
    ZeroVector,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("subspace already spans the whole space")]
    FullRank,
}

/// A coordinate vector. `dim` is the length of `coords`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S: Scalar> {
    coords: Vec<S>,
}

impl<S: Scalar> Vector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        assert!(!coords.is_empty(), "vectors need at least one coordinate");
        Vector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// Exact inner product `sum_i u_i v_i`.
pub fn inner<S: Scalar>(u: &Vector<S>, v: &Vector<S>) -> Result<S, LinError> {
    if u.dim() != v.dim() {
        return Err(LinError::DimMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(dot(u.coords(), v.coords()))
}

fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = u[0].mul(&v[0]);
    for (a, b) in u.iter().zip(v).skip(1) {
        acc = acc.add(&a.mul(b));
    }
    acc
}

/// A projective direction in canonical form: the first nonzero coordinate is
/// exactly 1, so a ray and its negation compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray<S: Scalar> {
    vector: Vector<S>,
}

impl<S: Scalar> Ray<S> {
    /// Scale `v` so its first nonzero coordinate becomes 1. The leading
    /// entry is set to an exact 1, which keeps the form bit-stable under
    /// repeated canonicalization in approx mode. Idempotent.
    pub fn canonicalize(v: &Vector<S>) -> Result<Self, LinError> {
        let lead = v
            .coords()
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(LinError::ZeroVector)?;
        let inv = v.coords()[lead].invert();
        let mut coords: Vec<S> = v.coords().iter().map(|c| c.mul(&inv)).collect();
        coords[lead] = inv.one_like();
        for c in coords.iter_mut().take(lead) {
            *c = c.zero_like();
        }
        Ok(Ray {
            vector: Vector::new(coords),
        })
    }

    pub fn vector(&self) -> &Vector<S> {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// The rank-1 subspace spanned by this ray.
    pub fn subspace(&self) -> Subspace<S> {
        Subspace {
            ambient: self.dim(),
            rows: vec![self.vector.coords().to_vec()],
        }
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        cmp_rows(self.vector.coords(), other.vector.coords())
    }

    pub fn render(&self) -> String {
        render_row(self.vector.coords())
    }
}

impl<S: Scalar> fmt::Display for Ray<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn cmp_rows<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.canonical_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn render_row<S: Scalar>(row: &[S]) -> String {
    let parts: Vec<String> = row.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

/// A linear subspace, stored as its unique reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<S: Scalar> {
    ambient: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Subspace<S> {
    /// Row space of the given vectors. Errors if every vector is zero or the
    /// dimensions disagree.
    pub fn span(vectors: &[Vector<S>]) -> Result<Self, LinError> {
        let first = vectors.first().ok_or(LinError::ZeroVector)?;
        let ambient = first.dim();
        for v in vectors {
            if v.dim() != ambient {
                return Err(LinError::DimMismatch {
                    left: ambient,
                    right: v.dim(),
                });
            }
        }
        let rows = rref(vectors.iter().map(|v| v.coords().to_vec()).collect());
        if rows.is_empty() {
            return Err(LinError::ZeroVector);
        }
        Ok(Subspace { ambient, rows })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis_rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    /// The subspace of every vector orthogonal to this one, i.e. the exact
    /// nullspace of the basis matrix.
    pub fn orthocomplement(&self) -> Result<Self, LinError> {
        if self.rank() == self.ambient {
            return Err(LinError::FullRank);
        }
        let n = self.ambient;
        let zero = self.rows[0][0].zero_like();
        let one = zero.one_like();
        let pivots: Vec<usize> = self.rows.iter().map(|r| pivot_col(r)).collect();
        let mut basis = Vec::new();
        for free in 0..n {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![zero.clone(); n];
            v[free] = one.clone();
            for (row, &p) in self.rows.iter().zip(&pivots) {
                v[p] = row[free].negated();
            }
            basis.push(v);
        }
        let rows = rref(basis);
        debug_assert_eq!(rows.len(), n - self.rank());
        Ok(Subspace { ambient: n, rows })
    }

    /// Is every row of `other` inside this row space?
    pub fn contains(&self, other: &Subspace<S>) -> Result<bool, LinError> {
        if self.ambient != other.ambient {
            return Err(LinError::DimMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(other.rows.iter().all(|row| self.reduces_to_zero(row)))
    }

    pub fn contains_vector(&self, v: &Vector<S>) -> Result<bool, LinError> {
        if self.ambient != v.dim() {
            return Err(LinError::DimMismatch {
                left: self.ambient,
                right: v.dim(),
            });
        }
        Ok(self.reduces_to_zero(v.coords()))
    }

    fn reduces_to_zero(&self, row: &[S]) -> bool {
        let mut rem = row.to_vec();
        for basis_row in &self.rows {
            let p = pivot_col(basis_row);
            if rem[p].is_zero() {
                continue;
            }
            let factor = rem[p].clone();
            for (r, b) in rem.iter_mut().zip(basis_row) {
                *r = r.sub(&factor.mul(b));
            }
        }
        rem.iter().all(|c| c.is_zero())
    }

    /// True when every basis vector here is orthogonal to every basis vector
    /// of `other`.
    pub fn orthogonal_to(&self, other: &Subspace<S>) -> bool {
        debug_assert_eq!(self.ambient, other.ambient);
        self.rows
            .iter()
            .all(|u| other.rows.iter().all(|v| dot(u, v).is_zero()))
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.rank().cmp(&other.rank()))
            .then_with(|| {
                for (a, b) in self.rows.iter().zip(&other.rows) {
                    match cmp_rows(a, b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }

    pub fn render(&self) -> String {
        let rows: Vec<String> = self.rows.iter().map(|r| render_row(r)).collect();
        format!("[{}]", rows.join(" "))
    }
}

impl<S: Scalar> fmt::Display for Subspace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn pivot_col<S: Scalar>(row: &[S]) -> usize {
    row.iter()
        .position(|c| !c.is_zero())
        .expect("RREF rows are nonzero")
}

/// Gauss-Jordan elimination to reduced row-echelon form; zero rows dropped.
/// The RREF of a row space is unique, so the output is a canonical basis.
fn rref<S: Scalar>(mut rows: Vec<Vec<S>>) -> Vec<Vec<S>> {
    if rows.is_empty() {
        return rows;
    }
    let n = rows[0].len();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].invert();
        for c in rows[rank].iter_mut() {
            *c = c.mul(&inv);
        }
        // Leading entry exactly 1 keeps canonical forms stable in approx mode.
        rows[rank][col] = inv.one_like();
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            let (head, tail) = rows.split_at_mut(rank.max(r));
            let (source, target) = if r > rank {
                (&head[rank], &mut tail[0])
            } else {
                (&tail[0], &mut head[r])
            };
            for (t, s) in target.iter_mut().zip(source) {
                *t = t.sub(&factor.mul(s));
            }
            target[col] = factor.zero_like();
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::QuadScalar;

    fn v(coords: &[i64]) -> Vector<QuadScalar> {
        Vector::new(coords.iter().map(|&c| QuadScalar::from_int(c, 2)).collect())
    }

    fn sp(rows: &[&[i64]]) -> Subspace<QuadScalar> {
        Subspace::span(&rows.iter().map(|r| v(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn canonicalize_scales_leading_coordinate() {
        let r = Ray::canonicalize(&v(&[0, 2, 0])).unwrap();
        assert_eq!(r.vector(), &v(&[0, 1, 0]));
        let r = Ray::canonicalize(&v(&[-1, 1, 1])).unwrap();
        assert_eq!(r.vector(), &v(&[1, -1, -1]));
        assert_eq!(
            Ray::canonicalize(&v(&[0, 0, 0])).unwrap_err(),
            LinError::ZeroVector
        );
    }

    #[test]
    fn ray_identifies_negation() {
        let a = Ray::canonicalize(&v(&[1, 1, 1])).unwrap();
        let b = Ray::canonicalize(&v(&[-1, -1, -1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inner_products() {
        assert!(inner(&v(&[1, 0, -1]), &v(&[1, 1, 1])).unwrap().is_zero());
        assert!(inner(&v(&[1, 0, -1]), &v(&[1, 0, 1])).unwrap().is_zero());
        assert_eq!(
            inner(&v(&[1, 1, 0]), &v(&[1, 0, 0])).unwrap(),
            QuadScalar::from_int(1, 2)
        );
        assert!(matches!(
            inner(&v(&[1, 0]), &v(&[1, 0, 0])),
            Err(LinError::DimMismatch { .. })
        ));
    }

    #[test]
    fn span_row_reduces() {
        let s = sp(&[&[1, 0, 1, 0], &[-1, 0, 1, 0]]);
        assert_eq!(s, sp(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]));
        assert_eq!(s.rank(), 2);
        assert_eq!(sp(&[&[0, 1, 0]]).rank(), 1);
        assert_eq!(sp(&[&[1, 1, 0], &[2, 2, 0]]).rank(), 1);
    }

    #[test]
    fn rref_is_canonical_under_shuffle_and_scale() {
        let a = sp(&[&[1, 2, 3], &[0, 1, 1]]);
        let b = sp(&[&[0, 2, 2], &[1, 2, 3], &[1, 4, 5]]);
        assert_eq!(a, b);
    }

    #[test]
    fn orthocomplements() {
        let s = sp(&[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(s.orthocomplement().unwrap(), sp(&[&[0, 0, 1]]));

        let s = sp(&[&[1, 0, -1], &[1, 1, 1]]);
        assert_eq!(s.orthocomplement().unwrap(), sp(&[&[1, -2, 1]]));

        let s = sp(&[&[1, 0, 1, 0], &[-1, 0, 1, 0]]);
        assert_eq!(
            s.orthocomplement().unwrap(),
            sp(&[&[0, 1, 0, 0], &[0, 0, 0, 1]])
        );

        let full = sp(&[&[1, 0], &[0, 1]]);
        assert_eq!(full.orthocomplement().unwrap_err(), LinError::FullRank);
    }

    #[test]
    fn orthocomplement_involution_and_rank_sum() {
        for rows in [
            vec![vec![1, 0, -1]],
            vec![vec![1, 2, 3], vec![0, 1, 1]],
            vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]],
        ] {
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let s = sp(&refs);
            let c = s.orthocomplement().unwrap();
            assert_eq!(s.rank() + c.rank(), s.ambient());
            assert!(s.orthogonal_to(&c));
            assert_eq!(c.orthocomplement().unwrap(), s);
        }
    }

    #[test]
    fn containment() {
        let big = sp(&[&[1, 0, 0], &[0, 0, 1]]);
        assert!(big.contains(&sp(&[&[1, 0, 0]])).unwrap());
        assert!(!sp(&[&[1, 0, 0]]).contains(&sp(&[&[0, 1, 0]])).unwrap());
        let plane = sp(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        assert!(plane.contains(&sp(&[&[1, 0, 1, 0]])).unwrap());
        assert!(matches!(
            plane.contains(&sp(&[&[1, 0, 0]])),
            Err(LinError::DimMismatch { .. })
        ));
    }
}
