//! Enriques refinement: which admissible K3 actions descend to an Enriques
//! surface.
//!
//! A candidate is an admissible branch class whose multiplicities are all
//! powers of two; the group then extends by a free involution, so `G` is a
//! 2-group of the form `(Z/2)^s + (Z/4)^t + (Z/8)^u`.  A free involution on
//! the K3 cover moreover forces at least three invariant factors.  Classes
//! passing this screen are settled by the curated case analysis, which
//! records the Enriques-acting group `H` with `|G| = 2 |H|` for the
//! admissible ones.

use crate::classes::{BranchClass, ClassId};
use crate::fixtures::{EnriquesRow, FixtureSet};
use crate::groups::{CatalogKey, FiniteAbelianGroup};
use crate::rules::Verdict;
use std::collections::BTreeSet;

/// Outcome of the Enriques case analysis for a candidate class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnriquesVerdict {
    /// The action descends; `H` acts on the Enriques quotient.
    Admissible(FiniteAbelianGroup),
    Rejected,
}

/// Errors from Enriques lookups.
#[derive(Debug, thiserror::Error)]
pub enum EnriquesError {
    #[error("class {0} is not in the curated tables")]
    UnknownClass(ClassId),
    #[error("class {0} is not an Enriques candidate")]
    NotCandidate(ClassId),
}

/// Citation used for candidates screened out by the invariant-factor count.
pub const SMALL_GROUP_CITATION: &str =
    "a free Enriques involution forces G isomorphic to (Z/2)^s + (Z/4)^t + (Z/8)^u with at least 3 invariant factors";

fn is_power_of_two(x: u64) -> bool {
    x >= 2 && x & (x - 1) == 0
}

/// True when every branch multiplicity is a power of two.
pub fn has_two_power_multiplicities(class: &BranchClass) -> bool {
    class
        .components()
        .iter()
        .all(|c| is_power_of_two(c.multiplicity))
}

/// Necessary screen from the free involution: the extended group must be of
/// the form `(Z/2)^s + (Z/4)^t + (Z/8)^u` with `s + t + u >= 3`.
pub fn passes_free_involution_screen(group: &FiniteAbelianGroup) -> bool {
    let factors = group.invariant_factors();
    factors.len() >= 3 && factors.iter().all(|&d| matches!(d, 2 | 4 | 8))
}

/// Admissible classes whose multiplicities are powers of two, on `F_n`.
pub fn enriques_candidates<'a>(
    n: u32,
    fixtures: &'a FixtureSet,
) -> Vec<(&'a ClassId, &'a BranchClass)> {
    fixtures
        .on_surface(n)
        .filter(|(id, class)| {
            matches!(fixtures.verdict(id), Some(Verdict::Admissible(_)))
                && has_two_power_multiplicities(class)
        })
        .collect()
}

/// The curated Enriques verdict for a candidate class.
pub fn enriques_verdict<'a>(
    id: &ClassId,
    fixtures: &'a FixtureSet,
) -> Result<&'a EnriquesRow, EnriquesError> {
    let Some(class) = fixtures.class(id) else {
        return Err(EnriquesError::UnknownClass(id.clone()));
    };
    let admissible = matches!(fixtures.verdict(id), Some(Verdict::Admissible(_)));
    if !admissible || !has_two_power_multiplicities(class) {
        return Err(EnriquesError::NotCandidate(id.clone()));
    }
    fixtures
        .enriques_row(id)
        .ok_or_else(|| EnriquesError::NotCandidate(id.clone()))
}

/// The catalog `AG_n(E)` of abelian groups acting on an Enriques surface
/// with quotient the Hirzebruch surface `F_n`, together with the key
/// `Infinity` for actions whose quotient is the projective plane; the union
/// over every key is [`catalog_age_full`].
pub fn catalog_age(key: CatalogKey) -> BTreeSet<FiniteAbelianGroup> {
    let specs: &[&str] = match key {
        CatalogKey::Surface(0) => &["Z2^2", "Z2^3", "Z2^4", "Z4^2", "Z2xZ4", "Z2^2xZ4"],
        CatalogKey::Surface(1) => &["Z2^2", "Z2^3", "Z2^4", "Z2xZ4", "Z2^2xZ4", "Z4xZ8"],
        CatalogKey::Surface(2) => &["Z2^2", "Z2^3", "Z4^2", "Z2^2xZ4"],
        CatalogKey::Surface(4) => &["Z2xZ4"],
        CatalogKey::Surface(_) => &[],
        CatalogKey::Infinity => &["Z2^2", "Z2^3", "Z2^4"],
    };
    specs
        .iter()
        .map(|s| FiniteAbelianGroup::parse_spec(s).expect("static spec"))
        .collect()
}

/// The union of [`catalog_age`] over every key: all finite abelian groups
/// acting on an Enriques surface with a smooth rational quotient.
pub fn catalog_age_full() -> BTreeSet<FiniteAbelianGroup> {
    let mut out = BTreeSet::new();
    for n in 0..=12 {
        out.extend(catalog_age(CatalogKey::Surface(n)));
    }
    out.extend(catalog_age(CatalogKey::Infinity));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn screen_accepts_exactly_the_two_power_groups_with_three_factors() {
        let yes = ["Z2^3", "Z2xZ4xZ8", "Z2^2xZ4", "Z4^2xZ2"];
        for spec in yes {
            let g = FiniteAbelianGroup::parse_spec(spec).unwrap();
            assert!(passes_free_involution_screen(&g), "{spec}");
        }
        let no = ["Z2", "Z2^2", "Z2xZ4", "Z4^2", "Z2^2xZ3", "Z2^2xZ16"];
        for spec in no {
            let g = FiniteAbelianGroup::parse_spec(spec).unwrap();
            assert!(!passes_free_involution_screen(&g), "{spec}");
        }
    }

    #[test]
    fn age_catalogs_have_the_published_sizes() {
        assert_eq!(catalog_age(CatalogKey::Surface(0)).len(), 6);
        assert_eq!(catalog_age(CatalogKey::Surface(1)).len(), 6);
        assert_eq!(catalog_age(CatalogKey::Surface(2)).len(), 4);
        assert_eq!(catalog_age(CatalogKey::Surface(4)).len(), 1);
        assert_eq!(catalog_age(CatalogKey::Infinity).len(), 3);
        assert!(catalog_age(CatalogKey::Surface(3)).is_empty());
        assert_eq!(catalog_age_full().len(), 7);
    }

    #[test]
    fn candidates_need_two_power_multiplicities() {
        let set = FixtureSet::embedded();
        for n in 0..=12 {
            for (id, class) in enriques_candidates(n, set) {
                assert!(has_two_power_multiplicities(class), "{id}");
            }
        }
    }

    #[test]
    fn every_candidate_has_a_curated_row_and_vice_versa() {
        let set = FixtureSet::embedded();
        let mut candidates = BTreeSet::new();
        for n in 0..=12 {
            candidates.extend(enriques_candidates(n, set).into_iter().map(|(id, _)| id.clone()));
        }
        let rows: BTreeSet<ClassId> = set.enriques_ids().cloned().collect();
        assert_eq!(candidates, rows);
    }

    #[test]
    fn admissible_rows_halve_the_group_order() {
        let set = FixtureSet::embedded();
        for id in set.enriques_ids() {
            let row = set.enriques_row(id).unwrap();
            if let EnriquesVerdict::Admissible(h) = &row.verdict {
                let Some(Verdict::Admissible(g)) = set.verdict(id) else {
                    panic!("{id} must be admissible");
                };
                assert_eq!(g.order(), 2 * h.order(), "{id}");
                assert!(passes_free_involution_screen(g), "{id}");
            }
        }
    }

    #[test]
    fn screened_out_rows_cite_the_screen() {
        let set = FixtureSet::embedded();
        for id in set.enriques_ids() {
            let row = set.enriques_row(id).unwrap();
            let Some(Verdict::Admissible(g)) = set.verdict(id) else {
                panic!("{id} must be admissible");
            };
            if !passes_free_involution_screen(g) {
                assert_eq!(row.verdict, EnriquesVerdict::Rejected, "{id}");
                assert_eq!(row.citation, SMALL_GROUP_CITATION, "{id}");
            }
        }
    }

    #[test]
    fn verdict_lookup_distinguishes_the_error_cases() {
        let set = FixtureSet::embedded();
        let unknown: ClassId = "F0-9999".parse().unwrap();
        assert!(matches!(
            enriques_verdict(&unknown, set),
            Err(EnriquesError::UnknownClass(_))
        ));
        // F0-1 is admissible with multiplicity 3: not a candidate.
        let id: ClassId = "F0-1".parse().unwrap();
        assert!(matches!(
            enriques_verdict(&id, set),
            Err(EnriquesError::NotCandidate(_))
        ));
    }
}
