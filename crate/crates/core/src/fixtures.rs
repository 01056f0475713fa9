//! Curated fixture tables: the classified branch classes, their verdicts,
//! the Enriques refinement and the cover-tower plans.
//!
//! The tables ship embedded in the crate and can be overridden by a
//! directory containing files of the same names, so downstream tooling can
//! experiment with variants without rebuilding.

use crate::classes::{parse_fixture_line, BranchClass, ClassId};
use crate::enriques::EnriquesVerdict;
use crate::groups::FiniteAbelianGroup;
use crate::rules::{RuleId, Verdict};
use crate::towers::CoverPlan;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

/// File names used both for the embedded tables and directory overrides.
pub const CLASSES_FILE: &str = "classes.txt";
pub const VERDICTS_FILE: &str = "verdicts.tsv";
pub const ENRIQUES_FILE: &str = "verdicts_enriques.tsv";
pub const PLANS_FILE: &str = "plans.json";

const EMBEDDED_CLASSES: &str = include_str!("../fixtures/classes.txt");
const EMBEDDED_VERDICTS: &str = include_str!("../fixtures/verdicts.tsv");
const EMBEDDED_ENRIQUES: &str = include_str!("../fixtures/verdicts_enriques.tsv");
const EMBEDDED_PLANS: &str = include_str!("../fixtures/plans.json");

/// Errors raised while loading or cross-checking fixture tables.
#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Class(#[from] crate::classes::ClassError),
    #[error(transparent)]
    Rule(#[from] crate::rules::RuleError),
    #[error(transparent)]
    Group(#[from] crate::groups::GroupError),
    #[error("failed to read {name}: {source}")]
    Io {
        name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {name}: {source}")]
    Json {
        name: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{file} line {line}: {message}")]
    Format {
        file: String,
        line: usize,
        message: String,
    },
    #[error("inconsistent tables: {0}")]
    Inconsistent(String),
}

/// One row of the verdict table.
#[derive(Debug, Clone)]
pub struct CuratedRow {
    pub verdict: Verdict,
    pub citation: String,
}

/// One row of the Enriques verdict table.
#[derive(Debug, Clone)]
pub struct EnriquesRow {
    pub verdict: EnriquesVerdict,
    pub citation: String,
}

/// The full set of curated tables, indexed for lookups in both directions.
#[derive(Debug, Default)]
pub struct FixtureSet {
    classes: BTreeMap<ClassId, BranchClass>,
    reverse: BTreeMap<BranchClass, ClassId>,
    verdicts: BTreeMap<ClassId, CuratedRow>,
    enriques: BTreeMap<ClassId, EnriquesRow>,
    plans: BTreeMap<ClassId, CoverPlan>,
}

impl FixtureSet {
    /// The tables embedded in the crate.
    pub fn embedded() -> &'static FixtureSet {
        static EMBEDDED: OnceLock<FixtureSet> = OnceLock::new();
        EMBEDDED.get_or_init(|| {
            FixtureSet::from_strings(
                EMBEDDED_CLASSES,
                EMBEDDED_VERDICTS,
                EMBEDDED_ENRIQUES,
                EMBEDDED_PLANS,
            )
            .expect("embedded fixture tables are consistent")
        })
    }

    /// Load tables from a directory holding the four fixture files.
    pub fn from_dir(dir: &Path) -> Result<FixtureSet, FixtureError> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name)).map_err(|source| FixtureError::Io {
                name: dir.join(name).display().to_string(),
                source,
            })
        };
        FixtureSet::from_strings(
            &read(CLASSES_FILE)?,
            &read(VERDICTS_FILE)?,
            &read(ENRIQUES_FILE)?,
            &read(PLANS_FILE)?,
        )
    }

    /// Parse and cross-validate the four tables.
    pub fn from_strings(
        classes: &str,
        verdicts: &str,
        enriques: &str,
        plans: &str,
    ) -> Result<FixtureSet, FixtureError> {
        let mut set = FixtureSet::default();

        for (line_no, line) in classes.lines().enumerate() {
            let Some((id, class)) = parse_fixture_line(line, line_no + 1)? else {
                continue;
            };
            if set.classes.contains_key(&id) {
                return Err(FixtureError::Format {
                    file: CLASSES_FILE.to_string(),
                    line: line_no + 1,
                    message: format!("duplicate class id {id}"),
                });
            }
            set.reverse.entry(class.clone()).or_insert_with(|| id.clone());
            set.classes.insert(id, class);
        }

        parse_verdicts(verdicts, &mut set)?;
        parse_enriques(enriques, &mut set)?;

        let plan_list: Vec<CoverPlan> =
            serde_json::from_str(plans).map_err(|source| FixtureError::Json {
                name: PLANS_FILE.to_string(),
                source,
            })?;
        for plan in plan_list {
            if set.plans.contains_key(&plan.class_id) {
                return Err(FixtureError::Inconsistent(format!(
                    "duplicate plan for {}",
                    plan.class_id
                )));
            }
            set.plans.insert(plan.class_id.clone(), plan);
        }

        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<(), FixtureError> {
        for id in self.verdicts.keys() {
            if !self.classes.contains_key(id) {
                return Err(FixtureError::Inconsistent(format!(
                    "verdict for unknown class {id}"
                )));
            }
        }
        for id in self.classes.keys() {
            if !self.verdicts.contains_key(id) {
                return Err(FixtureError::Inconsistent(format!(
                    "class {id} has no verdict"
                )));
            }
        }
        for id in self.enriques.keys() {
            if !self.classes.contains_key(id) {
                return Err(FixtureError::Inconsistent(format!(
                    "Enriques verdict for unknown class {id}"
                )));
            }
        }
        for (id, plan) in &self.plans {
            if plan.class_id != *id {
                return Err(FixtureError::Inconsistent(format!(
                    "plan key {id} does not match its class id {}",
                    plan.class_id
                )));
            }
            if !self.classes.contains_key(id) {
                return Err(FixtureError::Inconsistent(format!(
                    "plan for unknown class {id}"
                )));
            }
        }
        for (id, row) in &self.verdicts {
            match &row.verdict {
                Verdict::Admissible(group) => {
                    let Some(plan) = self.plans.get(id) else {
                        return Err(FixtureError::Inconsistent(format!(
                            "admissible class {id} has no cover plan"
                        )));
                    };
                    if plan.claimed_group != *group {
                        return Err(FixtureError::Inconsistent(format!(
                            "plan for {id} claims {} but the verdict says {group}",
                            plan.claimed_group
                        )));
                    }
                }
                Verdict::Rejected(rules) => {
                    if rules.is_empty() {
                        return Err(FixtureError::Inconsistent(format!(
                            "rejected class {id} cites no rules"
                        )));
                    }
                    if self.plans.contains_key(id) {
                        return Err(FixtureError::Inconsistent(format!(
                            "rejected class {id} has a cover plan"
                        )));
                    }
                }
                Verdict::Undecided => {
                    return Err(FixtureError::Inconsistent(format!(
                        "curated verdict for {id} must decide the class"
                    )));
                }
            }
        }
        Ok(())
    }

    // ── lookups ─────────────────────────────────────────────────────────

    pub fn ids(&self) -> impl Iterator<Item = &ClassId> {
        self.classes.keys()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, id: &ClassId) -> Option<&BranchClass> {
        self.classes.get(id)
    }

    /// Reverse lookup from branch data to the curated id.  On `F_0` the
    /// tables hold one representative per ruling-swap orbit, so the swapped
    /// form of the class is tried as well.
    pub fn id_of(&self, class: &BranchClass) -> Option<ClassId> {
        self.reverse.get(class).cloned().or_else(|| {
            class
                .ruling_swap()
                .and_then(|swapped| self.reverse.get(&swapped).cloned())
        })
    }

    pub fn verdict(&self, id: &ClassId) -> Option<&Verdict> {
        self.verdicts.get(id).map(|row| &row.verdict)
    }

    pub fn verdict_row(&self, id: &ClassId) -> Option<&CuratedRow> {
        self.verdicts.get(id)
    }

    pub fn enriques_row(&self, id: &ClassId) -> Option<&EnriquesRow> {
        self.enriques.get(id)
    }

    pub fn enriques_ids(&self) -> impl Iterator<Item = &ClassId> {
        self.enriques.keys()
    }

    pub fn plan(&self, id: &ClassId) -> Option<&CoverPlan> {
        self.plans.get(id)
    }

    pub fn plans(&self) -> impl Iterator<Item = &CoverPlan> {
        self.plans.values()
    }

    /// Classes on `F_n`, in id order.
    pub fn on_surface(&self, n: u32) -> impl Iterator<Item = (&ClassId, &BranchClass)> {
        self.classes.iter().filter(move |(_, class)| class.n() == n)
    }

    /// Ids of admissible classes with the recorded groups, in id order.
    pub fn admissible(&self) -> impl Iterator<Item = (&ClassId, &FiniteAbelianGroup)> {
        self.verdicts.iter().filter_map(|(id, row)| match &row.verdict {
            Verdict::Admissible(group) => Some((id, group)),
            _ => None,
        })
    }

    /// Pairs of distinct ids that name the same branch class.
    pub fn duplicate_classes(&self) -> Vec<(ClassId, ClassId)> {
        let mut seen: BTreeMap<&BranchClass, &ClassId> = BTreeMap::new();
        let mut dups = Vec::new();
        for (id, class) in &self.classes {
            if let Some(first) = seen.get(class) {
                dups.push(((*first).clone(), id.clone()));
            } else {
                seen.insert(class, id);
            }
        }
        dups
    }
}

fn split_tsv(line: &str) -> Vec<&str> {
    line.split('\t').map(str::trim).collect()
}

fn parse_verdicts(text: &str, set: &mut FixtureSet) -> Result<(), FixtureError> {
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_tsv(trimmed);
        let fail = |message: String| FixtureError::Format {
            file: VERDICTS_FILE.to_string(),
            line: line_no + 1,
            message,
        };
        if fields.len() != 4 {
            return Err(fail(format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let id = ClassId::parse(fields[0])?;
        let verdict = match fields[1] {
            "admissible" => {
                Verdict::Admissible(FiniteAbelianGroup::parse_spec(fields[2])?)
            }
            "rejected" => {
                let mut rules = BTreeSet::new();
                for token in fields[2].split(';') {
                    rules.insert(token.trim().parse::<RuleId>()?);
                }
                Verdict::Rejected(rules)
            }
            other => return Err(fail(format!("unknown verdict {other:?}"))),
        };
        if set
            .verdicts
            .insert(id.clone(), CuratedRow { verdict, citation: fields[3].to_string() })
            .is_some()
        {
            return Err(fail(format!("duplicate verdict for {id}")));
        }
    }
    Ok(())
}

fn parse_enriques(text: &str, set: &mut FixtureSet) -> Result<(), FixtureError> {
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_tsv(trimmed);
        let fail = |message: String| FixtureError::Format {
            file: ENRIQUES_FILE.to_string(),
            line: line_no + 1,
            message,
        };
        if fields.len() != 4 {
            return Err(fail(format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let id = ClassId::parse(fields[0])?;
        let verdict = match fields[1] {
            "admissible" => {
                EnriquesVerdict::Admissible(FiniteAbelianGroup::parse_spec(fields[2])?)
            }
            "rejected" => {
                if fields[2] != "-" {
                    return Err(fail("rejected rows use `-` for the group".to_string()));
                }
                EnriquesVerdict::Rejected
            }
            other => return Err(fail(format!("unknown verdict {other:?}"))),
        };
        if set
            .enriques
            .insert(id.clone(), EnriquesRow { verdict, citation: fields[3].to_string() })
            .is_some()
        {
            return Err(fail(format!("duplicate Enriques verdict for {id}")));
        }
    }
    Ok(())
}
