//! Exact-arithmetic engine for Kochen-Specker colourability questions.
//!
//! The crate builds Boolean subalgebras of projectors ("contexts") generated
//! by a finite set of rays, assembles their inclusion poset, and then asks
//! whether the dual presheaf over that poset admits a global element, the
//! existence question behind non-contextual valuations. Everything runs over
//! exact scalars in a quadratic field Q(sqrt(d)), with a tolerance-based float
//! backend for the one trigonometric dataset that needs it.
//!
//! Module map:
//! - [`exactnum`]: rationals, `a + b*sqrt(d)` scalars, parsing, the `Scalar` trait.
//! - [`rays`]: canonical projective rays, inner products, RREF subspaces.
//! - [`contexts`]: maximal contexts from orthogonality cliques, degenerate
//!   subalgebras, the inclusion poset `WPoset`.
//! - [`presheaf`]: fibers, restriction maps, global-element verification.
//! - [`colouring`]: constraint propagation with certificates, DPS checks,
//!   exhaustive global-element search, the magic-square parity argument.
//! - [`loops`]: factor-through reduction and chordless loop enumeration in the
//!   bipartite inclusion graph.
//! - [`datasets`]: built-in ray sets (clifton8, cg10, peres33, mermin24, two
//!   diagram-level sets) and JSON ingestion.

pub mod colouring;
pub mod contexts;
pub mod datasets;
pub mod exactnum;
pub mod loops;
pub mod presheaf;
pub mod rays;

pub use exactnum::{ApproxScalar, QuadScalar, Rational, Scalar};
pub use rays::{Ray, Subspace, Vector};
