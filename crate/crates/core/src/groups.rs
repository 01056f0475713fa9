//! Finite abelian groups in invariant-factor form, the group catalogs of the
//! classification, and the group deductions that follow from a branch class
//! alone.

use crate::classes::BranchClass;
use crate::fixtures::FixtureSet;
use crate::rules::Verdict;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Errors produced by group deductions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    /// The branch class is not admissible, so no group is attached to it.
    #[error("class {0} is not admissible; no group is attached")]
    NotAdmissible(String),
    /// A group specification string does not match the `Z2^3xZ4` grammar.
    #[error("malformed group spec {0:?}")]
    MalformedSpec(String),
}

/// A finite abelian group in invariant-factor normal form.
///
/// `invariant_factors` is the ascending chain `d_1 | d_2 | ... | d_k` with
/// all `d_i >= 2`; the trivial group has no factors.  Two groups compare
/// equal exactly when they are isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    /// The trivial group.
    pub fn trivial() -> Self {
        Self {
            invariant_factors: Vec::new(),
        }
    }

    /// The cyclic group `Z/m`.
    pub fn cyclic(m: u64) -> Self {
        Self::from_cyclic_factors(&[m])
    }

    /// Build from an arbitrary direct sum of cyclic groups, normalizing to
    /// invariant factors (so `Z/2 + Z/3 == Z/6` and factor order is
    /// irrelevant).  Factors equal to 1 are dropped.
    pub fn from_cyclic_factors(factors: &[u64]) -> Self {
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &f in factors {
            assert!(f >= 1, "cyclic factor must be positive");
            for (p, e) in factorize(f) {
                primary.entry(p).or_default().push(e);
            }
        }
        for exps in primary.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        let depth = primary.values().map(Vec::len).max().unwrap_or(0);
        let mut inv = Vec::new();
        for i in 0..depth {
            let mut d = 1u64;
            for (&p, exps) in &primary {
                if let Some(&e) = exps.get(i) {
                    d *= p.pow(e);
                }
            }
            inv.push(d);
        }
        inv.reverse();
        Self {
            invariant_factors: inv,
        }
    }

    /// The ascending invariant-factor chain.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    /// Group order.
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    /// Primary decomposition as a sorted list of prime powers, e.g.
    /// `Z/2 + Z/2 + Z/4 -> [2, 2, 4]` and `Z/6 -> [2, 3]`.
    pub fn primary_parts(&self) -> Vec<u64> {
        let mut parts = Vec::new();
        for &d in &self.invariant_factors {
            for (p, e) in factorize(d) {
                parts.push(p.pow(e));
            }
        }
        parts.sort_unstable();
        parts
    }

    /// Parse the compact grammar `Z2^3xZ4` (case-insensitive; `Z/2` and a
    /// bare `1` for the trivial group are also accepted).
    pub fn parse_spec(spec: &str) -> Result<Self, GroupError> {
        let cleaned = spec.trim();
        if cleaned == "1" {
            return Ok(Self::trivial());
        }
        let mut factors = Vec::new();
        for token in cleaned.split(['x', 'X']) {
            let token = token.trim();
            let rest = token
                .strip_prefix(['z', 'Z'])
                .ok_or_else(|| GroupError::MalformedSpec(spec.to_string()))?;
            let rest = rest.strip_prefix('/').unwrap_or(rest);
            let (base_str, exp) = match rest.split_once('^') {
                Some((b, e)) => {
                    let exp: u32 = e
                        .trim()
                        .parse()
                        .map_err(|_| GroupError::MalformedSpec(spec.to_string()))?;
                    (b, exp)
                }
                None => (rest, 1),
            };
            let base: u64 = base_str
                .trim()
                .parse()
                .map_err(|_| GroupError::MalformedSpec(spec.to_string()))?;
            if base < 2 || exp == 0 {
                return Err(GroupError::MalformedSpec(spec.to_string()));
            }
            factors.extend(std::iter::repeat(base).take(exp as usize));
        }
        if factors.is_empty() {
            return Err(GroupError::MalformedSpec(spec.to_string()));
        }
        Ok(Self::from_cyclic_factors(&factors))
    }
}

impl std::str::FromStr for FiniteAbelianGroup {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_spec(s)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    /// Compact primary form with exponent grouping: `Z2^3xZ4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.primary_parts();
        if parts.is_empty() {
            return f.write_str("1");
        }
        let mut runs: Vec<(u64, usize)> = Vec::new();
        for p in parts {
            match runs.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => runs.push((p, 1)),
            }
        }
        let rendered: Vec<String> = runs
            .into_iter()
            .map(|(p, c)| {
                if c == 1 {
                    format!("Z{p}")
                } else {
                    format!("Z{p}^{c}")
                }
            })
            .collect();
        f.write_str(&rendered.join("x"))
    }
}

impl Ord for FiniteAbelianGroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.invariant_factors.cmp(&other.invariant_factors))
    }
}

impl PartialOrd for FiniteAbelianGroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// How a deduced group was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupProvenance {
    /// Forced by the branch class alone (one component, or two intersecting
    /// components).
    Generic,
    /// Read from the curated table.
    Curated,
}

/// The abelian cover of the projective line with the given branch
/// multiplicities, when one exists: the only abelian branch signatures on
/// P^1 are two points of equal index (cyclic) and three points of index two
/// (Klein four group).
pub fn fenchel_abelian_p1(multiplicities: &[u64]) -> Option<FiniteAbelianGroup> {
    let mut mults = multiplicities.to_vec();
    if mults.iter().any(|&m| m < 2) {
        return None;
    }
    mults.sort_unstable();
    match mults.as_slice() {
        [m, m2] if m == m2 => Some(FiniteAbelianGroup::cyclic(*m)),
        [2, 2, 2] => Some(FiniteAbelianGroup::from_cyclic_factors(&[2, 2])),
        _ => None,
    }
}

/// Key for the per-surface group catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CatalogKey {
    /// Groups admissible on the Hirzebruch surface `F_n`.
    Surface(u32),
    /// Groups admissible with the projective plane as quotient.
    Infinity,
}

fn groups_from(lists: &[&[u64]]) -> BTreeSet<FiniteAbelianGroup> {
    lists
        .iter()
        .map(|f| FiniteAbelianGroup::from_cyclic_factors(f))
        .collect()
}

/// The catalog `AG` of all abelian groups admitting a K3 action with
/// Hirzebruch quotient, or its restriction `AG_n` to a fixed surface.
/// Surface indices outside {0,1,2,3,4,6,8,12} yield the empty catalog.
pub fn catalog_ag(key: CatalogKey) -> BTreeSet<FiniteAbelianGroup> {
    match key {
        CatalogKey::Surface(0) => groups_from(&[
            &[2], &[2, 2], &[2, 2, 2], &[2, 2, 2, 2], &[2, 2, 2, 2, 2],
            &[3], &[3, 3], &[3, 3, 3],
            &[2, 4], &[2, 4, 4], &[2, 2, 4], &[2, 2, 2, 4],
        ]),
        CatalogKey::Surface(1) => groups_from(&[
            &[2], &[2, 2], &[2, 2, 2], &[2, 2, 2, 2], &[2, 2, 2, 2, 2],
            &[4, 4],
            &[2, 3], &[2, 3, 3], &[2, 3, 3, 3],
            &[2, 4], &[2, 2, 4], &[2, 2, 2, 4],
            &[2, 3, 3, 4],
            &[2, 4, 8],
        ]),
        CatalogKey::Surface(2) => groups_from(&[
            &[2], &[2, 2], &[2, 2, 2], &[2, 2, 2, 2],
            &[3], &[3, 3], &[3, 3, 3],
            &[2, 2, 3, 3],
            &[2, 4], &[2, 4, 4], &[2, 2, 4], &[2, 2, 2, 4],
        ]),
        CatalogKey::Surface(3) => groups_from(&[
            &[2, 3], &[2, 3, 3], &[2, 2, 2, 3], &[2, 3, 4],
        ]),
        CatalogKey::Surface(4) => groups_from(&[
            &[2], &[2, 2], &[2, 2, 2], &[4], &[2, 3, 3], &[2, 4], &[2, 2, 4],
        ]),
        CatalogKey::Surface(6) => groups_from(&[&[3], &[3, 3], &[2, 2, 3]]),
        CatalogKey::Surface(8) => groups_from(&[&[2, 4]]),
        CatalogKey::Surface(12) => groups_from(&[&[2, 3]]),
        CatalogKey::Surface(_) => BTreeSet::new(),
        CatalogKey::Infinity => groups_from(&[
            &[2], &[2, 2], &[2, 2, 2], &[2, 2, 2, 2], &[2, 2, 2, 2, 2],
            &[4], &[4, 4, 4],
            &[2, 3], &[2, 3, 3], &[2, 2, 2, 3, 3],
            &[2, 2, 4],
        ]),
    }
}

/// The full catalog `AG`: union of the per-surface catalogs and the
/// plane-quotient catalog (25 groups).
pub fn catalog_ag_full() -> BTreeSet<FiniteAbelianGroup> {
    let mut all = BTreeSet::new();
    for n in [0, 1, 2, 3, 4, 6, 8, 12] {
        all.extend(catalog_ag(CatalogKey::Surface(n)));
    }
    all.extend(catalog_ag(CatalogKey::Infinity));
    all
}

/// Group order forced by the simply-connected-removal mechanism, when the
/// shape of the class determines it.
///
/// Deleting at most one section-class component and one fiber component
/// leaves a configuration whose complement is simply connected, so the
/// stabilizers of the remaining components generate the group.  The order is
/// then pinned for three remaining shapes: a single component (cyclic of its
/// multiplicity), two intersecting components (direct sum), or three
/// pairwise-intersecting components with multiplicities {2,2,2} / {2,4,4} /
/// {2,3,6} (orders 8 / 32 / 36, the three abelian plane-quartic-like
/// configurations).  Removals that disagree yield `None`.
pub fn tentative_order(class: &BranchClass) -> Option<u64> {
    let comps = class.components();
    let mut candidates = BTreeSet::new();
    for (_, remaining) in class.simply_connected_removals() {
        let pairwise_intersecting = remaining.iter().enumerate().all(|(k, &i)| {
            remaining[k + 1..].iter().all(|&j| {
                comps[i]
                    .cls
                    .intersection(&comps[j].cls)
                    .expect("same ambient")
                    != 0
            })
        });
        let order = match remaining.as_slice() {
            [i] => Some(comps[*i].multiplicity),
            [i, j] if pairwise_intersecting => {
                Some(comps[*i].multiplicity * comps[*j].multiplicity)
            }
            [i, j, k] if pairwise_intersecting => {
                let mut mults = [
                    comps[*i].multiplicity,
                    comps[*j].multiplicity,
                    comps[*k].multiplicity,
                ];
                mults.sort_unstable();
                match mults {
                    [2, 2, 2] => Some(8),
                    [2, 4, 4] => Some(32),
                    [2, 3, 6] => Some(36),
                    _ => None,
                }
            }
            _ => None,
        };
        if let Some(o) = order {
            candidates.insert(o);
        }
    }
    if candidates.len() == 1 {
        candidates.into_iter().next()
    } else {
        None
    }
}

/// Deduce the group attached to an admissible class: one component forces
/// `Z/b_1`, two intersecting components force `Z/b_1 + Z/b_2`, and every
/// other shape is read from the curated table.
pub fn deduce_group(
    class: &BranchClass,
    fixtures: &FixtureSet,
) -> Result<(FiniteAbelianGroup, GroupProvenance), GroupError> {
    let id = fixtures
        .id_of(class)
        .ok_or_else(|| GroupError::NotAdmissible(format!("unknown class on F_{}", class.n())))?;
    let curated = match fixtures.verdict(&id) {
        Some(Verdict::Admissible(group)) => group.clone(),
        _ => return Err(GroupError::NotAdmissible(id.to_string())),
    };
    let comps = class.components();
    match comps {
        [only] => Ok((
            FiniteAbelianGroup::cyclic(only.multiplicity),
            GroupProvenance::Generic,
        )),
        [x, y] if x.cls.intersection(&y.cls).expect("same ambient") != 0 => {
            Ok((
                FiniteAbelianGroup::from_cyclic_factors(&[x.multiplicity, y.multiplicity]),
                GroupProvenance::Generic,
            ))
        }
        _ => Ok((curated, GroupProvenance::Curated)),
    }
}

fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factors_are_canonical() {
        let g = FiniteAbelianGroup::from_cyclic_factors(&[8, 4, 2]);
        assert_eq!(g.invariant_factors(), &[2, 4, 8]);
        let h = FiniteAbelianGroup::from_cyclic_factors(&[2, 8, 4]);
        assert_eq!(g, h);
    }

    #[test]
    fn cross_prime_factors_merge() {
        // Z/2 + Z/3 = Z/6 in invariant-factor form.
        let g = FiniteAbelianGroup::from_cyclic_factors(&[2, 3]);
        assert_eq!(g.invariant_factors(), &[6]);
        assert_eq!(g, FiniteAbelianGroup::cyclic(6));
        // Z/2 + Z/3 + Z/3 + Z/4 has chain 6 | 12.
        let h = FiniteAbelianGroup::from_cyclic_factors(&[2, 3, 3, 4]);
        assert_eq!(h.invariant_factors(), &[6, 12]);
        assert_eq!(h.order(), 72);
    }

    #[test]
    fn display_uses_primary_parts() {
        assert_eq!(
            FiniteAbelianGroup::from_cyclic_factors(&[2, 2, 2, 4]).to_string(),
            "Z2^3xZ4"
        );
        assert_eq!(FiniteAbelianGroup::cyclic(6).to_string(), "Z2xZ3");
        assert_eq!(FiniteAbelianGroup::trivial().to_string(), "1");
    }

    #[test]
    fn spec_grammar_roundtrips() {
        for spec in ["Z2^3xZ4", "z2Xz4", "Z/2xZ/3", "Z6"] {
            let g = FiniteAbelianGroup::parse_spec(spec).unwrap();
            assert_eq!(FiniteAbelianGroup::parse_spec(&g.to_string()).unwrap(), g);
        }
        assert!(FiniteAbelianGroup::parse_spec("A5").is_err());
        assert!(FiniteAbelianGroup::parse_spec("Z0").is_err());
    }

    #[test]
    fn fenchel_shapes() {
        assert_eq!(
            fenchel_abelian_p1(&[5, 5]),
            Some(FiniteAbelianGroup::cyclic(5))
        );
        assert_eq!(
            fenchel_abelian_p1(&[2, 2, 2]),
            Some(FiniteAbelianGroup::from_cyclic_factors(&[2, 2]))
        );
        assert_eq!(fenchel_abelian_p1(&[2, 3]), None);
        assert_eq!(fenchel_abelian_p1(&[2, 2, 3]), None);
        assert_eq!(fenchel_abelian_p1(&[4]), None);
        assert_eq!(fenchel_abelian_p1(&[]), None);
    }

    #[test]
    fn catalog_sizes() {
        assert_eq!(catalog_ag(CatalogKey::Surface(0)).len(), 12);
        assert_eq!(catalog_ag(CatalogKey::Surface(1)).len(), 14);
        assert_eq!(catalog_ag(CatalogKey::Surface(2)).len(), 12);
        assert_eq!(catalog_ag(CatalogKey::Surface(3)).len(), 4);
        assert_eq!(catalog_ag(CatalogKey::Surface(4)).len(), 7);
        assert_eq!(catalog_ag(CatalogKey::Surface(6)).len(), 3);
        assert_eq!(catalog_ag(CatalogKey::Surface(8)).len(), 1);
        assert_eq!(catalog_ag(CatalogKey::Surface(12)).len(), 1);
        assert_eq!(catalog_ag(CatalogKey::Surface(5)).len(), 0);
        assert_eq!(catalog_ag(CatalogKey::Infinity).len(), 11);
        assert_eq!(catalog_ag_full().len(), 25);
    }

    #[test]
    fn infinity_catalog_is_inside_full_catalog() {
        let full = catalog_ag_full();
        for g in catalog_ag(CatalogKey::Infinity) {
            assert!(full.contains(&g), "{g} missing from the full catalog");
        }
    }
}
