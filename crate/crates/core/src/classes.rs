//! Branch classes: weighted configurations of curve classes on a Hirzebruch
//! surface, together with the fixture-line grammar they are serialized in.
//!
//! A branch class `sum_i b_i * B_i` records, for a quotient map branched over
//! curves `B_i`, the branch multiplicities `b_i >= 2` and the divisor classes
//! of the branch curves.  The fixture grammar is one class per line:
//!
//! ```text
//! F2-167 | n=2 | 3*(3,6)
//! F0-14  | n=0 | 3*(1,0) + 3*(1,0) + 3*(1,3)
//! # comment and blank lines are skipped
//! ```

use crate::picard::{canonical_class, DivisorClass, Rational, RationalDivisorClass};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// Errors produced when building or parsing branch classes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    /// A component violates an invariant (multiplicity, irreducibility,
    /// ambient surface, or the uniqueness of the negative section).
    #[error("invalid component: {0}")]
    InvalidComponent(String),
    /// A fixture line does not match the grammar.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// One branch component: an irreducible curve class with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BranchComponent {
    /// Branch multiplicity `b_i >= 2`.
    pub multiplicity: u64,
    /// Class of the branch curve.
    pub cls: DivisorClass,
}

impl BranchComponent {
    /// Weight `(b-1)/b` of the component in the canonical defect.
    pub fn weight(&self) -> Rational {
        let b = self.multiplicity as i64;
        Rational::new(b - 1, b)
    }
}

/// A branch class on `F_n`, kept in canonical component order.
///
/// Components are sorted by `(cls.a, cls.b, multiplicity)` so that equal
/// configurations compare equal.  For `n >= 1` at most one component may be
/// the negative section `(1,0)` (there is only one such curve).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BranchClass {
    n: u32,
    components: Vec<BranchComponent>,
}

impl BranchClass {
    /// Build a branch class, validating every component.
    pub fn new(n: u32, mut components: Vec<BranchComponent>) -> Result<Self, ClassError> {
        for comp in &components {
            if comp.multiplicity < 2 {
                return Err(ClassError::InvalidComponent(format!(
                    "multiplicity {} < 2 for class ({},{})",
                    comp.multiplicity, comp.cls.a, comp.cls.b
                )));
            }
            if comp.cls.n != n {
                return Err(ClassError::InvalidComponent(format!(
                    "component on F_{} inside a branch class on F_{}",
                    comp.cls.n, n
                )));
            }
            if !comp.cls.is_irreducible_class() {
                return Err(ClassError::InvalidComponent(format!(
                    "({},{}) is not an irreducible class on F_{}",
                    comp.cls.a, comp.cls.b, n
                )));
            }
        }
        if n >= 1 {
            let sections = components
                .iter()
                .filter(|c| (c.cls.a, c.cls.b) == (1, 0))
                .count();
            if sections > 1 {
                return Err(ClassError::InvalidComponent(format!(
                    "{sections} components in the section class (1,0) on F_{n}; \
                     the negative section is unique"
                )));
            }
        }
        components.sort();
        Ok(Self { n, components })
    }

    /// Index of the ambient surface.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Components in canonical order.
    pub fn components(&self) -> &[BranchComponent] {
        &self.components
    }

    /// The image of this class under the automorphism of the quadric that
    /// exchanges the two rulings, `(a,b) -> (b,a)`.  `None` off `F_0`,
    /// where no such automorphism exists.
    pub fn ruling_swap(&self) -> Option<BranchClass> {
        if self.n != 0 {
            return None;
        }
        let swapped = self
            .components
            .iter()
            .map(|c| BranchComponent {
                multiplicity: c.multiplicity,
                cls: DivisorClass::new(0, c.cls.b, c.cls.a),
            })
            .collect();
        Some(Self::new(0, swapped).expect("swap preserves validity"))
    }

    /// Canonical representative of the class modulo the ruling swap: the
    /// smaller of the class and its swap on `F_0`, the class itself
    /// elsewhere.  Curated tables list one representative per swap orbit.
    pub fn swap_canonical(&self) -> BranchClass {
        match self.ruling_swap() {
            Some(swapped) if swapped < *self => swapped,
            _ => self.clone(),
        }
    }

    /// Canonical defect `K + sum_i (1 - 1/b_i) B_i`; the branch class is a
    /// valid abelian-quotient branch exactly when this vanishes.  An empty
    /// class yields `K` itself.
    pub fn canonical_defect(&self) -> RationalDivisorClass {
        let mut acc = canonical_class(self.n).to_rational();
        for comp in &self.components {
            acc = acc
                .add_scaled(comp.weight(), &comp.cls)
                .expect("components share the ambient surface");
        }
        acc
    }

    /// Whether the canonical defect vanishes.
    pub fn is_defect_zero(&self) -> bool {
        self.canonical_defect().is_zero()
    }

    /// Indices of components in the first ruling class `(1,0)` (the negative
    /// section for `n >= 1`).
    pub fn section_indices(&self) -> Vec<usize> {
        self.indices_with_class(1, 0)
    }

    /// Indices of components in the fiber class `(0,1)`.
    pub fn fiber_indices(&self) -> Vec<usize> {
        self.indices_with_class(0, 1)
    }

    fn indices_with_class(&self, a: i64, b: i64) -> Vec<usize> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| (c.cls.a, c.cls.b) == (a, b))
            .map(|(i, _)| i)
            .collect()
    }

    /// All ways of deleting at most one component per ruling class so that
    /// the complement of the remaining configuration stays simply connected:
    /// `F_n` minus (at most one section-class curve and one fiber) is simply
    /// connected, so the stabilizers of the remaining components generate the
    /// whole group.  Returns `(removed, remaining)` index pairs, deduplicated
    /// up to the multiplicities of the removed components.
    pub fn simply_connected_removals(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut first: Vec<Option<usize>> = vec![None];
        first.extend(self.section_indices().into_iter().map(Some));
        let mut second: Vec<Option<usize>> = vec![None];
        second.extend(self.fiber_indices().into_iter().map(Some));
        let mut seen = std::collections::BTreeSet::new();
        let mut views = Vec::new();
        for &ra in &first {
            for &rb in &second {
                let removed: Vec<usize> = [ra, rb].into_iter().flatten().collect();
                let key: Vec<u64> = removed
                    .iter()
                    .map(|&i| self.components[i].multiplicity)
                    .collect();
                if !seen.insert((removed.len(), key)) {
                    continue;
                }
                let remaining: Vec<usize> = (0..self.components.len())
                    .filter(|i| !removed.contains(i))
                    .collect();
                views.push((removed, remaining));
            }
        }
        views
    }

    /// Serialize to the fixture-line payload (everything after the id).
    fn payload(&self) -> String {
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|c| format!("{}*({},{})", c.multiplicity, c.cls.a, c.cls.b))
            .collect();
        format!("n={} | {}", self.n, comps.join(" + "))
    }
}

/// Identifier of a fixture class, `F<n>-<label>`.
///
/// Labels carry an optional dotted suffix (`F0-67.1`) or a letter tag
/// (`F1-99.a3`, `F2-u1`).  Ordering is numeric-aware: `F0-9 < F0-10`, and
/// letter-labeled entries sort after numeric ones within the same surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassId(String);

impl ClassId {
    /// Validate and wrap an id string.
    pub fn parse(s: &str) -> Result<Self, ClassError> {
        Self::sort_key_of(s).map(|_| Self(s.to_string())).ok_or_else(|| {
            ClassError::InvalidComponent(format!("malformed class id {s:?}; expected F<n>-<label>"))
        })
    }

    /// The raw id string.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Ambient surface index encoded in the id.
    pub fn surface(&self) -> u32 {
        Self::sort_key_of(&self.0).expect("validated at construction").0
    }

    fn sort_key_of(s: &str) -> Option<(u32, u64, String)> {
        let rest = s.strip_prefix('F')?;
        let (n_str, label) = rest.split_once('-')?;
        let n: u32 = n_str.parse().ok()?;
        if label.is_empty() {
            return None;
        }
        let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
        let tail = label[digits.len()..].to_string();
        let num: u64 = if digits.is_empty() {
            u64::MAX
        } else {
            digits.parse().ok()?
        };
        Some((n, num, tail))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for ClassId {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Ord for ClassId {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = Self::sort_key_of(&self.0).expect("validated");
        let b = Self::sort_key_of(&other.0).expect("validated");
        a.cmp(&b).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ClassId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parse one fixture line.  Returns `Ok(None)` for blank and `#`-comment
/// lines; `line_no` is used only for error reporting.
pub fn parse_fixture_line(
    text: &str,
    line_no: usize,
) -> Result<Option<(ClassId, BranchClass)>, ClassError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let err = |column: usize, message: String| ClassError::Parse {
        line: line_no,
        column,
        message,
    };
    let col_of = |part: &str| {
        // Best-effort column: byte offset of the field inside the line.
        text.find(part).map(|i| i + 1).unwrap_or(1)
    };

    let fields: Vec<&str> = trimmed.split('|').collect();
    if fields.len() != 3 {
        return Err(err(
            1,
            format!("expected 3 '|'-separated fields, found {}", fields.len()),
        ));
    }
    let id_field = fields[0].trim();
    let id = ClassId::parse(id_field)
        .map_err(|e| err(col_of(id_field), e.to_string()))?;

    let n_field = fields[1].trim();
    let n: u32 = n_field
        .strip_prefix("n=")
        .ok_or_else(|| err(col_of(n_field), format!("expected n=<int>, found {n_field:?}")))?
        .trim()
        .parse()
        .map_err(|_| err(col_of(n_field), format!("invalid surface index in {n_field:?}")))?;

    let mut components = Vec::new();
    for comp_text in fields[2].split('+') {
        let comp_trim = comp_text.trim();
        let col = col_of(comp_trim);
        let (mult_str, cls_str) = comp_trim
            .split_once('*')
            .ok_or_else(|| err(col, format!("expected <mult>*(a,b), found {comp_trim:?}")))?;
        let multiplicity: u64 = mult_str
            .trim()
            .parse()
            .map_err(|_| err(col, format!("invalid multiplicity in {comp_trim:?}")))?;
        let inner = cls_str
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| err(col, format!("expected (a,b) in {comp_trim:?}")))?;
        let (a_str, b_str) = inner
            .split_once(',')
            .ok_or_else(|| err(col, format!("expected two coordinates in {comp_trim:?}")))?;
        let a: i64 = a_str.trim().parse().map_err(|_| {
            err(col, format!("invalid first coordinate in {comp_trim:?}"))
        })?;
        let b: i64 = b_str.trim().parse().map_err(|_| {
            err(col, format!("invalid second coordinate in {comp_trim:?}"))
        })?;
        components.push(BranchComponent {
            multiplicity,
            cls: DivisorClass::new(n, a, b),
        });
    }
    let class = BranchClass::new(n, components).map_err(|e| err(col_of(fields[2].trim()), e.to_string()))?;
    if id.surface() != n {
        return Err(err(
            col_of(id_field),
            format!("id {id} does not match surface index n={n}"),
        ));
    }
    Ok(Some((id, class)))
}

/// Serialize a class to its fixture line, the exact inverse of
/// [`parse_fixture_line`].
pub fn serialize_fixture_line(id: &ClassId, class: &BranchClass) -> String {
    format!("{} | {}", id, class.payload())
}
