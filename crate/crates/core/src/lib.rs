//! Classification engine for finite abelian group actions on K3 surfaces
//! whose quotient is a Hirzebruch surface.
//!
//! The quotient map is encoded by a branch class on `F_n`: a formal sum of
//! irreducible curve classes with multiplicities whose weighted sum cancels
//! the canonical class.  This crate enumerates all such classes, applies the
//! mechanical rejection rules, carries the curated classification tables,
//! and verifies the cover towers realizing every admissible class.
//!
//! Module map:
//! - [`picard`]: divisor arithmetic on Hirzebruch surfaces.
//! - [`classes`]: branch classes, canonical form, fixture grammar.
//! - [`enumerate`]: exhaustive zero-defect enumeration.
//! - [`rules`]: generic rejection rules and the exceptional equation.
//! - [`groups`]: finite abelian groups, catalogs, group deduction.
//! - [`enriques`]: descent to Enriques quotients.
//! - [`lattices`]: Smith normal form, discriminant groups, symplectic tables.
//! - [`towers`]: cover plans and their mechanical verification.
//! - [`fixtures`]: the curated tables shipping with the crate.

pub mod classes;
pub mod enriques;
pub mod enumerate;
pub mod fixtures;
pub mod groups;
pub mod lattices;
pub mod picard;
pub mod rules;
pub mod towers;

pub use classes::{BranchClass, BranchComponent, ClassId};
pub use fixtures::FixtureSet;
pub use groups::FiniteAbelianGroup;
pub use rules::{RuleId, Verdict};
