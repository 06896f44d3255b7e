//! Calculus of stable differential forms on 6- and 7-dimensional spaces.
//!
//! The crate models left-invariant geometry on 6-dimensional Lie algebras:
//! stable 2-, 3- and 4-forms and their volume functionals ([`hitchin`]),
//! SU(3)-structures and their torsion classes ([`su3`]), the lift of an
//! SU(3)-structure to a G2 three-form on the product with a line ([`g2`]),
//! evolution equations whose solutions produce nearly parallel and parallel
//! G2-structures ([`flow`]), and closed-form cone and sine-cone solution
//! families over a nearly Kaehler base ([`solutions`]).
//!
//! Everything is built on a small dense exterior-algebra engine ([`exterior`])
//! and a Chevalley-Eilenberg model of invariant forms ([`lie_model`]).
//! File formats for forms and algebras live in [`io`]; the `formlift` binary
//! exposes the checks on the command line.

pub mod exterior;
pub mod flow;
pub mod g2;
pub mod hitchin;
pub mod io;
pub mod lie_model;
pub mod solutions;
pub mod su3;

/// Crate version string reported by the CLI and the C ABI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
