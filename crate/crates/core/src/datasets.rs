//! Built-in ray sets and ingestion of user ray sets.
//!
//! Four coordinate-level sets ship with the crate:
//! - `clifton8`: eight rational 3D rays forming the classic two-triple
//!   definite-prediction set.
//! - `cg10`: ten trigonometric 3D rays with free parameters (phi, alpha,
//!   beta) tied by the constraint `sin a sin b cos(a-b) = -tan^2 phi`;
//!   float backend with a dataset-wide tolerance.
//! - `peres33`: the 33 rays with entries in {0, ±1, ±sqrt 2}, exact over
//!   Q(sqrt 2); self-validating through its context counts.
//! - `mermin24`: the 24 rays of the six magic-square tetrads, with the
//!   tetrad grouping attached.
//!
//! Two further names, `cg_appendix_a` and `cg_appendix_b`, are diagram-level
//! datasets: orthogonality structure without coordinates (the figures they
//! correspond to fix only the structure). They reuse the propagation engine
//! over abstract ray labels.
//!
//! The cg10 entry `r8` is published with only two components in the source
//! table; the third is reconstructed as 0 here, which is the unique choice
//! completing the orthogonal triple {r8, r9, r10} that the accompanying text
//! requires.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::engine::ContextNet;
use crate::contexts::{Algebra, ContextError};
use crate::exactnum::{
    is_square_free, parse_scalar, ApproxScalar, NumError, ParseError, QuadScalar, Scalar,
};
use crate::rays::{LinError, Ray, Vector};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("ray {label}: parse error at byte {}: {}", source.position, source.message)]
    BadScalar { label: String, source: ParseError },
    #[error("ray {label} has {got} coordinates, expected {expected}")]
    DimMismatch {
        label: String,
        got: usize,
        expected: usize,
    },
    #[error("ray {label} is the zero vector")]
    ZeroVector { label: String },
    #[error("invalid ray-set file: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// Scalar backend of a ray set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact { d: u64 },
    Approx { epsilon: f64 },
}

#[derive(Debug, Clone)]
pub struct LabelledRay<S: Scalar> {
    pub label: String,
    pub ray: Ray<S>,
}

/// A named collection of distinct canonical rays over one scalar backend.
#[derive(Debug, Clone)]
pub struct TypedRaySet<S: Scalar> {
    pub name: String,
    pub dim: usize,
    pub mode: Mode,
    pub rays: Vec<LabelledRay<S>>,
    /// Optional named context grouping (label prefix families); used by the
    /// magic-square dataset to expose its six listed tetrads.
    pub groups: Vec<(String, Vec<String>)>,
    pub provenance: String,
}

impl<S: Scalar> TypedRaySet<S> {
    pub fn rays_only(&self) -> Vec<Ray<S>> {
        self.rays.iter().map(|r| r.ray.clone()).collect()
    }

    pub fn by_label(&self, label: &str) -> Option<&Ray<S>> {
        self.rays.iter().find(|r| r.label == label).map(|r| &r.ray)
    }

    pub fn label_of(&self, ray: &Ray<S>) -> Option<&str> {
        self.rays
            .iter()
            .find(|r| &r.ray == ray)
            .map(|r| r.label.as_str())
    }

    /// The algebras of the listed groups, if the set carries any: each group
    /// must be a full orthogonal basis.
    pub fn listed_contexts(&self) -> Result<Vec<Algebra<S>>, DatasetError> {
        let mut out = Vec::new();
        for (group, labels) in &self.groups {
            let members: Vec<Ray<S>> = labels
                .iter()
                .map(|l| {
                    self.by_label(l).cloned().ok_or_else(|| {
                        DatasetError::Schema(format!("group {group} names unknown ray {l}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            out.push(Algebra::maximal_from_rays(&members)?);
        }
        Ok(out)
    }
}

/// Coordinate-level ray set in either scalar backend.
#[derive(Debug, Clone)]
pub enum RaySet {
    Exact(TypedRaySet<QuadScalar>),
    Approx(TypedRaySet<ApproxScalar>),
}

impl RaySet {
    pub fn name(&self) -> &str {
        match self {
            RaySet::Exact(s) => &s.name,
            RaySet::Approx(s) => &s.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RaySet::Exact(s) => s.dim,
            RaySet::Approx(s) => s.dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RaySet::Exact(s) => s.rays.len(),
            RaySet::Approx(s) => s.rays.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            RaySet::Exact(s) => s.mode,
            RaySet::Approx(s) => s.mode,
        }
    }
}

/// Orthogonality structure without coordinates: named abstract rays and the
/// contexts they fall into, plus the prediction the diagram was built for.
#[derive(Debug, Clone)]
pub struct ContextDiagram {
    pub name: String,
    pub rays: Vec<String>,
    pub contexts: Vec<Vec<String>>,
    pub dps_input: Vec<(String, bool)>,
    pub dps_predicted: (String, bool),
    pub provenance: String,
}

impl ContextDiagram {
    /// Atom-id view for the propagation engine; atom ids follow `self.rays`.
    pub fn net(&self) -> ContextNet {
        let id = |label: &str| {
            self.rays
                .iter()
                .position(|r| r == label)
                .expect("diagram contexts name listed rays")
        };
        let contexts = self
            .contexts
            .iter()
            .map(|ctx| ctx.iter().map(|l| id(l)).collect())
            .collect();
        ContextNet::new(self.rays.len(), contexts)
    }

    pub fn ray_id(&self, label: &str) -> Option<usize> {
        self.rays.iter().position(|r| r == label)
    }
}

/// Any dataset a command can resolve: coordinates or diagram.
#[derive(Debug, Clone)]
pub enum Dataset {
    Rays(RaySet),
    Diagram(ContextDiagram),
}

impl Dataset {
    pub fn name(&self) -> &str {
        match self {
            Dataset::Rays(r) => r.name(),
            Dataset::Diagram(d) => &d.name,
        }
    }
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "cg10",
    "cg_appendix_a",
    "cg_appendix_b",
    "clifton8",
    "mermin24",
    "peres33",
];

/// Fetch a built-in dataset by name. `cg10` uses the reference parameters
/// (phi = 3/10, beta = -alpha, alpha solved from the constraint equation).
pub fn builtin(name: &str) -> Result<Dataset, DatasetError> {
    match name {
        "clifton8" => Ok(Dataset::Rays(RaySet::Exact(clifton8()))),
        "peres33" => Ok(Dataset::Rays(RaySet::Exact(peres33()))),
        "mermin24" => Ok(Dataset::Rays(RaySet::Exact(mermin24()))),
        "cg10" => Ok(Dataset::Rays(RaySet::Approx(cg10(CgParams::reference()?)?))),
        "cg_appendix_a" => Ok(Dataset::Diagram(cg_appendix_a())),
        "cg_appendix_b" => Ok(Dataset::Diagram(cg_appendix_b())),
        other => Err(DatasetError::UnknownDataset(other.to_string())),
    }
}

fn exact_set(
    name: &str,
    dim: usize,
    d: u64,
    rows: &[(&str, &[i64])],
    groups: Vec<(String, Vec<String>)>,
    provenance: &str,
) -> TypedRaySet<QuadScalar> {
    let rays = rows
        .iter()
        .map(|(label, coords)| {
            debug_assert_eq!(coords.len(), dim);
            let vector = Vector::new(coords.iter().map(|&c| QuadScalar::from_int(c, d)).collect());
            LabelledRay {
                label: (*label).to_string(),
                ray: Ray::canonicalize(&vector).expect("builtin rays are nonzero"),
            }
        })
        .collect();
    TypedRaySet {
        name: name.to_string(),
        dim,
        mode: Mode::Exact { d },
        rays,
        groups,
        provenance: provenance.to_string(),
    }
}

fn clifton8() -> TypedRaySet<QuadScalar> {
    exact_set(
        "clifton8",
        3,
        1,
        &[
            ("r1", &[1, 0, -1]),
            ("r2", &[1, 0, 1]),
            ("r3", &[0, 1, 0]),
            ("r4", &[0, 0, 1]),
            ("r5", &[1, -1, 0]),
            ("r6", &[1, 1, 0]),
            ("r7", &[1, 1, 1]),
            ("r8", &[-1, 1, 1]),
        ],
        Vec::new(),
        "Eight-ray definite-prediction set: two orthogonal triples {r1,r2,r3}, \
         {r4,r5,r6} plus r7 orthogonal to r1 and r5, and r8 orthogonal to r2 \
         and r6. Setting r7 = r8 = 1 propagates to a contradiction, so r7 = 1 \
         forces r8 = 0.",
    )
}

fn mermin24() -> TypedRaySet<QuadScalar> {
    let groups = ["A", "B", "C", "D", "E", "F"]
        .iter()
        .map(|g| (g.to_string(), (1..=4).map(|i| format!("{g}{i}")).collect()))
        .collect();
    exact_set(
        "mermin24",
        4,
        1,
        &[
            ("A1", &[1, 0, 1, 0]),
            ("A2", &[-1, 0, 1, 0]),
            ("A3", &[0, 1, 0, 1]),
            ("A4", &[0, 1, 0, -1]),
            ("B1", &[1, 1, 0, 0]),
            ("B2", &[1, -1, 0, 0]),
            ("B3", &[0, 0, 1, 1]),
            ("B4", &[0, 0, 1, -1]),
            ("C1", &[1, 0, 0, 1]),
            ("C2", &[1, 0, 0, -1]),
            ("C3", &[0, 1, 1, 0]),
            ("C4", &[0, 1, -1, 0]),
            ("D1", &[1, 0, 0, 0]),
            ("D2", &[0, 1, 0, 0]),
            ("D3", &[0, 0, 1, 0]),
            ("D4", &[0, 0, 0, 1]),
            ("E1", &[1, 1, 1, 1]),
            ("E2", &[-1, 1, -1, 1]),
            ("E3", &[-1, 1, 1, -1]),
            ("E4", &[1, 1, -1, -1]),
            ("F1", &[-1, 1, 1, 1]),
            ("F2", &[1, -1, 1, 1]),
            ("F3", &[1, 1, -1, 1]),
            ("F4", &[1, 1, 1, -1]),
        ],
        groups,
        "Twenty-four rays in six orthogonal tetrads A..F; the spectral planes \
         of the nine magic-square observables arise as 2-2 subalgebras shared \
         between one row tetrad and one column tetrad.",
    )
}

/// The 33 rays over Q(sqrt 2): every canonical direction whose squared
/// coordinates form one of the multisets {0,0,1}, {0,1,1}, {0,1,2}, {1,1,2}.
fn peres33() -> TypedRaySet<QuadScalar> {
    let d = 2;
    let zero = QuadScalar::from_int(0, d);
    let one = QuadScalar::from_int(1, d);
    let root = QuadScalar::sqrt_d(d).expect("2 is square-free");
    let entries = [
        zero.clone(),
        one.clone(),
        one.negated(),
        root.clone(),
        root.negated(),
    ];
    let squared = [0u8, 1, 1, 2, 2];
    let allowed: [[u8; 3]; 4] = [[0, 0, 1], [0, 1, 1], [0, 1, 2], [1, 1, 2]];

    let mut rays: Vec<Ray<QuadScalar>> = Vec::new();
    for i in 0..entries.len() {
        for j in 0..entries.len() {
            for k in 0..entries.len() {
                let mut pattern = [squared[i], squared[j], squared[k]];
                pattern.sort_unstable();
                if !allowed.contains(&pattern) {
                    continue;
                }
                let vector = Vector::new(vec![
                    entries[i].clone(),
                    entries[j].clone(),
                    entries[k].clone(),
                ]);
                let ray = Ray::canonicalize(&vector).expect("nonzero by pattern");
                if !rays.contains(&ray) {
                    rays.push(ray);
                }
            }
        }
    }
    rays.sort_by(|a, b| a.canonical_cmp(b));
    debug_assert_eq!(rays.len(), 33);
    let rays = rays
        .into_iter()
        .enumerate()
        .map(|(i, ray)| LabelledRay {
            label: format!("p{:02}", i + 1),
            ray,
        })
        .collect();
    TypedRaySet {
        name: "peres33".to_string(),
        dim: 3,
        mode: Mode::Exact { d },
        rays,
        groups: Vec::new(),
        provenance: "The 33-ray set with entries in {0, ±1, ±sqrt 2}, invariant \
                     under axis interchange; with completion it spans 40 maximal \
                     contexts through 24 auxiliary rays and admits no colouring."
            .to_string(),
    }
}

/// Free parameters of the cg10 set. The reference configuration uses
/// phi = 3/10 and the symmetric branch beta = -alpha, under which the
/// constraint becomes `sin^2 a cos 2a = tan^2 phi` with a unique root in
/// (0, pi/6]; that interval's supremum 1/8 is exactly where the bound
/// |phi| <= arctan(1/sqrt 8) comes from.
#[derive(Debug, Clone, Copy)]
pub struct CgParams {
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub const CG_CONSTRAINT_TOLERANCE: f64 = 1e-12;

impl CgParams {
    pub fn reference() -> Result<Self, DatasetError> {
        Self::solve(0.3)
    }

    /// Solve the constraint for the symmetric branch by bisection.
    pub fn solve(phi: f64) -> Result<Self, DatasetError> {
        let bound = (1.0 / 8f64.sqrt()).atan();
        if !(phi.is_finite() && phi != 0.0 && phi.abs() <= bound) {
            return Err(DatasetError::InvalidParams(format!(
                "phi must satisfy 0 < |phi| <= arctan(1/sqrt 8) ~ {bound:.6}, got {phi}"
            )));
        }
        let target = phi.tan().powi(2);
        let g = |a: f64| a.sin().powi(2) * (2.0 * a).cos() - target;
        let mut lo = 1e-9;
        let mut hi = std::f64::consts::FRAC_PI_6;
        debug_assert!(g(lo) < 0.0 && g(hi) >= -1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let alpha = 0.5 * (lo + hi);
        let params = CgParams {
            phi,
            alpha,
            beta: -alpha,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn constraint_residual(&self) -> f64 {
        self.alpha.sin() * self.beta.sin() * (self.alpha - self.beta).cos() + self.phi.tan().powi(2)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bound = (1.0 / 8f64.sqrt()).atan();
        if !(self.phi.is_finite() && self.phi != 0.0 && self.phi.abs() <= bound) {
            return Err(DatasetError::InvalidParams(format!(
                "phi must satisfy 0 < |phi| <= arctan(1/sqrt 8), got {}",
                self.phi
            )));
        }
        if self.alpha == self.beta {
            return Err(DatasetError::InvalidParams(
                "alpha and beta must differ".to_string(),
            ));
        }
        if self.alpha.sin() == 0.0 || self.beta.sin() == 0.0 {
            return Err(DatasetError::InvalidParams(
                "alpha and beta must have nonzero sine".to_string(),
            ));
        }
        let residual = self.constraint_residual();
        if residual.abs() > CG_CONSTRAINT_TOLERANCE {
            return Err(DatasetError::InvalidParams(format!(
                "constraint equation violated: sin a sin b cos(a-b) + tan^2 phi = {residual:e}"
            )));
        }
        Ok(())
    }
}

/// The ten-ray trigonometric set for the given parameters.
pub fn cg10(params: CgParams) -> Result<TypedRaySet<ApproxScalar>, DatasetError> {
    params.validate()?;
    let epsilon = 1e-12;
    let CgParams { phi, alpha, beta } = params;
    let rows: [(&str, [f64; 3]); 10] = [
        ("r1", [1.0, 0.0, 0.0]),
        ("r2", [0.0, alpha.cos(), alpha.sin()]),
        ("r3", [phi.tan().recip(), 1.0, -alpha.tan().recip()]),
        ("r4", [phi.tan() / alpha.sin(), -alpha.sin(), alpha.cos()]),
        ("r5", [0.0, beta.cos(), beta.sin()]),
        ("r6", [phi.tan().recip(), 1.0, -beta.tan().recip()]),
        ("r7", [phi.tan() / beta.sin(), -beta.sin(), beta.cos()]),
        // r8's third component is reconstructed as 0: the unique value that
        // makes {r8, r9, r10} the orthogonal triple the construction uses.
        ("r8", [phi.sin(), -phi.cos(), 0.0]),
        ("r9", [0.0, 0.0, 1.0]),
        ("r10", [phi.cos(), phi.sin(), 0.0]),
    ];
    let rays = rows
        .iter()
        .map(|(label, coords)| {
            let vector = Vector::new(
                coords
                    .iter()
                    .map(|&c| ApproxScalar::new(c, epsilon))
                    .collect(),
            );
            Ok(LabelledRay {
                label: (*label).to_string(),
                ray: Ray::canonicalize(&vector)?,
            })
        })
        .collect::<Result<Vec<_>, LinError>>()?;
    Ok(TypedRaySet {
        name: "cg10".to_string(),
        dim: 3,
        mode: Mode::Approx { epsilon },
        rays,
        groups: Vec::new(),
        provenance: format!(
            "Ten-ray prediction set with phi = {phi}, alpha = {alpha:.17}, \
             beta = -alpha; assigning 1 to r1 forces 1 on r10. r8's missing \
             third component is taken as 0 so that {{r8, r9, r10}} is an \
             orthogonal triple."
        ),
    })
}

fn cg_appendix_a() -> ContextDiagram {
    let rays: Vec<String> = (1..=8)
        .map(|i| i.to_string())
        .chain(["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()))
        .collect();
    let ctx = |labels: &[&str]| labels.iter().map(|s| s.to_string()).collect();
    ContextDiagram {
        name: "cg_appendix_a".to_string(),
        rays,
        contexts: vec![
            ctx(&["1", "2", "3"]),
            ctx(&["4", "5", "6"]),
            ctx(&["3", "4", "A"]),
            ctx(&["1", "7", "B"]),
            ctx(&["5", "7", "C"]),
            ctx(&["2", "8", "D"]),
            ctx(&["6", "8", "E"]),
        ],
        dps_input: vec![("7".to_string(), true)],
        dps_predicted: ("8".to_string(), false),
        provenance: "Diagram-level dataset: the minimal join of two five-context \
                     loops sharing three contexts, the skeleton common to the \
                     appendix prediction sets. Coordinates are not part of the \
                     published figure, so only the orthogonality structure ships; \
                     loop inventory: two chordless 5-context loops, shortest loop \
                     10 algebras."
            .to_string(),
    }
}

fn cg_appendix_b() -> ContextDiagram {
    let rays: Vec<String> = (1..=10)
        .map(|i| i.to_string())
        .chain(["A", "B", "C", "D", "E", "F"].iter().map(|s| s.to_string()))
        .collect();
    let ctx = |labels: &[&str]| labels.iter().map(|s| s.to_string()).collect();
    ContextDiagram {
        name: "cg_appendix_b".to_string(),
        rays,
        contexts: vec![
            ctx(&["2", "3", "4"]),
            ctx(&["5", "6", "7"]),
            ctx(&["8", "9", "10"]),
            ctx(&["1", "2", "A"]),
            ctx(&["1", "5", "B"]),
            ctx(&["1", "9", "C"]),
            ctx(&["3", "8", "D"]),
            ctx(&["6", "8", "E"]),
            ctx(&["4", "7", "F"]),
        ],
        dps_input: vec![("1".to_string(), true)],
        dps_predicted: ("10".to_string(), true),
        provenance: "Diagram-level dataset: two five-context loops sharing three \
                     contexts plus the extra connection that upgrades the \
                     prediction to value one on the target ray. Coordinates are \
                     not part of the published figure, so only the orthogonality \
                     structure ships; loop inventory: four chordless 5-context \
                     loops, shortest loop 10 algebras."
            .to_string(),
    }
}

// --- JSON ray-set format -------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RaySetDoc {
    name: String,
    dim: usize,
    mode: ModeDoc,
    rays: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
enum ModeDoc {
    #[serde(rename = "exact")]
    Exact { d: u64 },
    #[serde(rename = "approx")]
    Approx { epsilon: f64 },
}

/// Result of ingesting a file: the validated set plus a report of rays that
/// were merged because they named the same projective direction.
#[derive(Debug)]
pub struct LoadOutcome {
    pub set: RaySet,
    /// Pairs (dropped label, kept label).
    pub merged: Vec<(String, String)>,
}

pub fn load(path: &Path) -> Result<LoadOutcome, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}

pub fn from_json(text: &str) -> Result<LoadOutcome, DatasetError> {
    let doc: RaySetDoc = serde_json::from_str(text)?;
    if doc.dim < 2 {
        return Err(DatasetError::Schema(format!(
            "dimension must be at least 2, got {}",
            doc.dim
        )));
    }
    match doc.mode {
        ModeDoc::Exact { d } => {
            if !is_square_free(d) {
                return Err(DatasetError::Num(NumError::NotSquareFree(d)));
            }
            let parse = |label: &str, text: &str| {
                parse_scalar(text, d).map_err(|source| DatasetError::BadScalar {
                    label: label.to_string(),
                    source,
                })
            };
            let (rays, merged) = collect_rays(&doc, parse)?;
            Ok(LoadOutcome {
                set: RaySet::Exact(TypedRaySet {
                    name: doc.name,
                    dim: doc.dim,
                    mode: Mode::Exact { d },
                    rays,
                    groups: Vec::new(),
                    provenance: doc.provenance,
                }),
                merged,
            })
        }
        ModeDoc::Approx { epsilon } => {
            if !(epsilon.is_finite() && epsilon > 0.0) {
                return Err(DatasetError::Schema(format!(
                    "epsilon must be a positive finite number, got {epsilon}"
                )));
            }
            let parse = |label: &str, text: &str| {
                text.parse::<f64>()
                    .map(|v| ApproxScalar::new(v, epsilon))
                    .map_err(|e| DatasetError::BadScalar {
                        label: label.to_string(),
                        source: ParseError {
                            position: 0,
                            message: e.to_string(),
                        },
                    })
            };
            let (rays, merged) = collect_rays(&doc, parse)?;
            Ok(LoadOutcome {
                set: RaySet::Approx(TypedRaySet {
                    name: doc.name,
                    dim: doc.dim,
                    mode: Mode::Approx { epsilon },
                    rays,
                    groups: Vec::new(),
                    provenance: doc.provenance,
                }),
                merged,
            })
        }
    }
}

#[allow(clippy::type_complexity)]
fn collect_rays<S: Scalar>(
    doc: &RaySetDoc,
    mut parse: impl FnMut(&str, &str) -> Result<S, DatasetError>,
) -> Result<(Vec<LabelledRay<S>>, Vec<(String, String)>), DatasetError> {
    let mut rays: Vec<LabelledRay<S>> = Vec::new();
    let mut merged = Vec::new();
    for (label, coords) in &doc.rays {
        if coords.len() != doc.dim {
            return Err(DatasetError::DimMismatch {
                label: label.clone(),
                got: coords.len(),
                expected: doc.dim,
            });
        }
        let scalars: Vec<S> = coords
            .iter()
            .map(|c| parse(label, c))
            .collect::<Result<_, _>>()?;
        let vector = Vector::new(scalars);
        let ray = Ray::canonicalize(&vector).map_err(|_| DatasetError::ZeroVector {
            label: label.clone(),
        })?;
        if let Some(existing) = rays.iter().find(|r| r.ray == ray) {
            merged.push((label.clone(), existing.label.clone()));
        } else {
            rays.push(LabelledRay {
                label: label.clone(),
                ray,
            });
        }
    }
    Ok((rays, merged))
}

/// Canonical JSON text for a ray set: labels sorted, scalars rendered in
/// their re-parseable text form. Byte-stable for a fixed set.
pub fn to_json(set: &RaySet) -> String {
    let doc = match set {
        RaySet::Exact(s) => RaySetDoc {
            name: s.name.clone(),
            dim: s.dim,
            mode: match s.mode {
                Mode::Exact { d } => ModeDoc::Exact { d },
                Mode::Approx { epsilon } => ModeDoc::Approx { epsilon },
            },
            rays: s
                .rays
                .iter()
                .map(|r| {
                    (
                        r.label.clone(),
                        r.ray
                            .vector()
                            .coords()
                            .iter()
                            .map(|c| c.to_string())
                            .collect(),
                    )
                })
                .collect(),
            provenance: s.provenance.clone(),
        },
        RaySet::Approx(s) => RaySetDoc {
            name: s.name.clone(),
            dim: s.dim,
            mode: match s.mode {
                Mode::Exact { d } => ModeDoc::Exact { d },
                Mode::Approx { epsilon } => ModeDoc::Approx { epsilon },
            },
            rays: s
                .rays
                .iter()
                .map(|r| {
                    (
                        r.label.clone(),
                        r.ray
                            .vector()
                            .coords()
                            .iter()
                            .map(|c| c.to_string())
                            .collect(),
                    )
                })
                .collect(),
            provenance: s.provenance.clone(),
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("ray-set docs serialize");
    text.push('\n');
    text
}

/// Write a set to disk in the canonical format.
pub fn save(set: &RaySet, path: &Path) -> Result<(), DatasetError> {
    std::fs::write(path, to_json(set))?;
    Ok(())
}
