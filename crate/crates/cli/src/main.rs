//! `k3q`: command-line front end for the classification engine.
//!
//! Every subcommand prints deterministically ordered output (sorted by
//! class id) and distinguishes three exit codes: 0 for a clean answer,
//! 1 when a mechanical check contradicts the curated tables, and 2 for
//! usage or input errors.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use k3q_core::classes::{serialize_fixture_line, BranchClass, ClassId};
use k3q_core::enriques::{catalog_age, catalog_age_full, enriques_candidates, EnriquesVerdict};
use k3q_core::enumerate::enumerate_branch_classes;
use k3q_core::fixtures::FixtureSet;
use k3q_core::groups::{
    catalog_ag, catalog_ag_full, deduce_group, fenchel_abelian_p1, tentative_order, CatalogKey,
    FiniteAbelianGroup,
};
use k3q_core::lattices::{check_all_symplectic_tables, check_symplectic_tables, TableReport};
use k3q_core::rules::{apply_generic_rules, Verdict};
use k3q_core::towers::{verify_plan, CoverStep, Ruling};

/// Exit status for runs whose mechanical checks disagree with the tables.
const DISAGREE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "k3q",
    version,
    about = "Finite abelian group actions on K3 surfaces with Hirzebruch-surface quotients"
)]
struct Cli {
    /// Directory holding the four fixture tables (classes.txt, verdicts.tsv,
    /// verdicts_enriques.tsv, plans.json) to use instead of the embedded
    /// ones.
    #[arg(long, global = true, env = "K3Q_FIXTURES", value_name = "DIR")]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the defect-zero branch classes on F_n and check them
    /// against the curated list.
    ///
    /// On the quadric (n = 0) classes are listed once per orbit of the
    /// ruling-swap automorphism, matching the curated table.
    Enumerate(EnumerateArgs),
    /// Print verdict, group or rules, and citation for every class on F_n.
    Classify {
        /// Surface index n of F_n.
        #[arg(long)]
        n: u32,
    },
    /// Compare the computed group catalogs with the tabulated ones.
    Catalog {
        /// Which classification to compare.
        #[arg(long, value_enum)]
        target: Target,
        /// Restrict to one surface; otherwise all of 0..=12 plus the union.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Check the symplectic lattice table.
    Lattice {
        /// One tabulated group, e.g. Z2^2 or Z2xZ4.
        #[arg(long, value_name = "SPEC", conflicts_with = "check_all")]
        group: Option<String>,
        /// Check all fourteen tabulated groups.
        #[arg(long)]
        check_all: bool,
    },
    /// Show (and optionally replay) the cover tower for a class.
    Plan {
        /// Class id, e.g. F0-58.
        #[arg(long, value_name = "ID")]
        class: String,
        /// Replay the tower mechanically and report the outcome.
        #[arg(long)]
        verify: bool,
    },
    /// Decide Fenchel's problem on the line for a branch signature.
    Fenchel {
        /// Branch multiplicities, comma separated, e.g. 2,2,2.
        #[arg(long, value_delimiter = ',', value_name = "M1,M2,...")]
        mults: Vec<u64>,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    /// Surface index n of F_n.
    #[arg(long, conflicts_with = "all")]
    n: Option<u32>,
    /// Enumerate every surface n = 0..=12.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    K3,
    Enriques,
}

/// Fixture tables for this invocation: loaded from a directory when one is
/// given, the embedded ones otherwise.
struct Tables {
    owned: Option<FixtureSet>,
}

impl Tables {
    fn load(dir: &Option<PathBuf>) -> Result<Tables> {
        let owned = match dir {
            Some(dir) => Some(
                FixtureSet::from_dir(dir)
                    .with_context(|| format!("loading fixtures from {}", dir.display()))?,
            ),
            None => None,
        };
        Ok(Tables { owned })
    }

    fn get(&self) -> &FixtureSet {
        self.owned.as_ref().unwrap_or_else(|| FixtureSet::embedded())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tables = Tables::load(&cli.fixtures)?;
    let fixtures = tables.get();
    match cli.command {
        Command::Enumerate(args) => cmd_enumerate(fixtures, &args),
        Command::Classify { n } => cmd_classify(fixtures, n),
        Command::Catalog { target, n } => cmd_catalog(fixtures, target, n),
        Command::Lattice { group, check_all } => cmd_lattice(group.as_deref(), check_all),
        Command::Plan { class, verify } => cmd_plan(fixtures, &class, verify),
        Command::Fenchel { mults } => cmd_fenchel(&mults),
    }
}

// ── enumerate ───────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ComponentEntry {
    multiplicity: u64,
    a: i64,
    b: i64,
}

#[derive(Serialize)]
struct ClassEntry {
    /// Curated id, absent when the class is missing from the tables.
    id: Option<String>,
    /// The class in fixture-line grammar, reparseable as shipped.
    line: Option<String>,
    components: Vec<ComponentEntry>,
}

#[derive(Serialize)]
struct SurfaceListing {
    n: u32,
    count: usize,
    classes: Vec<ClassEntry>,
    /// Curated ids whose class the enumeration did not produce.
    missing_from_enumeration: Vec<String>,
}

fn surface_listing(fixtures: &FixtureSet, n: u32) -> SurfaceListing {
    let orbits: BTreeSet<BranchClass> = enumerate_branch_classes(n)
        .iter()
        .map(BranchClass::swap_canonical)
        .collect();

    let mut classes: Vec<ClassEntry> = orbits
        .iter()
        .map(|class| {
            let id = fixtures.id_of(class);
            let line = id
                .as_ref()
                .and_then(|id| fixtures.class(id).map(|c| serialize_fixture_line(id, c)));
            ClassEntry {
                id: id.map(|id| id.to_string()),
                line,
                components: class
                    .components()
                    .iter()
                    .map(|c| ComponentEntry {
                        multiplicity: c.multiplicity,
                        a: c.cls.a,
                        b: c.cls.b,
                    })
                    .collect(),
            }
        })
        .collect();
    classes.sort_by(|x, y| match (&x.id, &y.id) {
        (Some(a), Some(b)) => a.cmp(b),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => x.components.len().cmp(&y.components.len()),
    });

    let missing_from_enumeration: Vec<String> = fixtures
        .on_surface(n)
        .filter(|(_, class)| !orbits.contains(&class.swap_canonical()))
        .map(|(id, _)| id.to_string())
        .collect();

    SurfaceListing {
        n,
        count: classes.len(),
        classes,
        missing_from_enumeration,
    }
}

fn cmd_enumerate(fixtures: &FixtureSet, args: &EnumerateArgs) -> Result<ExitCode> {
    let ns: Vec<u32> = match (args.n, args.all) {
        (Some(n), false) => vec![n],
        (None, true) => (0..=12).collect(),
        (None, false) => bail!("pass --n <int> or --all"),
        (Some(_), true) => unreachable!("clap rejects the combination"),
    };

    let listings: Vec<SurfaceListing> = ns.iter().map(|&n| surface_listing(fixtures, n)).collect();
    let disagree = listings
        .iter()
        .any(|l| !l.missing_from_enumeration.is_empty() || l.classes.iter().any(|c| c.id.is_none()));

    match args.format {
        Format::Json => {
            if args.all {
                println!("{}", serde_json::to_string_pretty(&listings)?);
            } else {
                println!("{}", serde_json::to_string_pretty(&listings[0])?);
            }
        }
        Format::Text => {
            for listing in &listings {
                let plural = if listing.count == 1 { "class" } else { "classes" };
                println!("F_{}: {} {plural}", listing.n, listing.count);
                for entry in &listing.classes {
                    match (&entry.id, &entry.line) {
                        (Some(_), Some(line)) => println!("{line}"),
                        _ => {
                            let comps: Vec<String> = entry
                                .components
                                .iter()
                                .map(|c| format!("{}*({},{})", c.multiplicity, c.a, c.b))
                                .collect();
                            println!("<unlisted> | n={} | {}", listing.n, comps.join(" + "));
                        }
                    }
                }
                for id in &listing.missing_from_enumeration {
                    println!("missing from enumeration: {id}");
                }
            }
        }
    }
    Ok(if disagree {
        ExitCode::from(DISAGREE)
    } else {
        ExitCode::SUCCESS
    })
}

// ── classify ────────────────────────────────────────────────────────────

fn cmd_classify(fixtures: &FixtureSet, n: u32) -> Result<ExitCode> {
    let mut total = 0usize;
    let mut admissible = 0usize;
    let mut contradictions = 0usize;
    for (id, class) in fixtures.on_surface(n) {
        let row = fixtures
            .verdict_row(id)
            .ok_or_else(|| anyhow!("{id} has no verdict row"))?;
        match &row.verdict {
            Verdict::Admissible(group) => {
                admissible += 1;
                println!("{id}\tadmissible\t{group}\t{}", row.citation);
            }
            Verdict::Rejected(rules) => {
                let tokens: Vec<String> = rules.iter().map(ToString::to_string).collect();
                println!("{id}\trejected\t{}\t{}", tokens.join(";"), row.citation);
            }
            Verdict::Undecided => println!("{id}\tundecided\t-\t{}", row.citation),
        }
        if row.verdict.is_admissible() {
            if let Verdict::Rejected(fired) = apply_generic_rules(class, tentative_order(class)) {
                let tokens: Vec<String> = fired.iter().map(ToString::to_string).collect();
                eprintln!(
                    "CONTRADICTION: {id} is admissible but rules {} fire",
                    tokens.join(";")
                );
                contradictions += 1;
            }
        }
        total += 1;
    }
    let plural = if total == 1 { "class" } else { "classes" };
    println!(
        "F_{n}: {total} {plural}, {admissible} admissible, {} rejected",
        total - admissible
    );
    Ok(if contradictions > 0 {
        ExitCode::from(DISAGREE)
    } else {
        ExitCode::SUCCESS
    })
}

// ── catalog ─────────────────────────────────────────────────────────────

fn computed_k3_catalog(fixtures: &FixtureSet, n: u32) -> Result<BTreeSet<FiniteAbelianGroup>> {
    let mut out = BTreeSet::new();
    for (id, class) in fixtures.on_surface(n) {
        if fixtures.verdict(id).is_some_and(Verdict::is_admissible) {
            let (group, _) = deduce_group(class, fixtures)
                .with_context(|| format!("deducing the group of {id}"))?;
            out.insert(group);
        }
    }
    Ok(out)
}

fn computed_enriques_catalog(fixtures: &FixtureSet, n: u32) -> BTreeSet<FiniteAbelianGroup> {
    enriques_candidates(n, fixtures)
        .into_iter()
        .filter_map(|(id, _)| match fixtures.enriques_row(id) {
            Some(row) => match &row.verdict {
                EnriquesVerdict::Admissible(h) => Some(h.clone()),
                EnriquesVerdict::Rejected => None,
            },
            None => None,
        })
        .collect()
}

fn group_list(groups: &BTreeSet<FiniteAbelianGroup>) -> String {
    if groups.is_empty() {
        return "(none)".to_string();
    }
    let names: Vec<String> = groups.iter().map(ToString::to_string).collect();
    names.join(", ")
}

fn report_catalog_row(
    label: &str,
    computed: &BTreeSet<FiniteAbelianGroup>,
    expected: &BTreeSet<FiniteAbelianGroup>,
) -> bool {
    if computed == expected {
        let plural = if computed.len() == 1 { "group matches" } else { "groups match" };
        println!("{label}: {} {plural}: {}", computed.len(), group_list(computed));
        true
    } else {
        let computed_only: BTreeSet<_> = computed.difference(expected).cloned().collect();
        let tabulated_only: BTreeSet<_> = expected.difference(computed).cloned().collect();
        println!(
            "{label}: MISMATCH computed-only [{}] tabulated-only [{}]",
            group_list(&computed_only),
            group_list(&tabulated_only)
        );
        false
    }
}

fn cmd_catalog(fixtures: &FixtureSet, target: Target, n: Option<u32>) -> Result<ExitCode> {
    if let Some(n) = n {
        if n > 12 {
            bail!("no Hirzebruch quotient exists for n = {n}; the range is 0..=12");
        }
    }
    let ns: Vec<u32> = match n {
        Some(n) => vec![n],
        None => (0..=12).collect(),
    };
    let mut ok = true;
    let mut union: BTreeSet<FiniteAbelianGroup> = BTreeSet::new();
    for &n in &ns {
        let (computed, expected) = match target {
            Target::K3 => (
                computed_k3_catalog(fixtures, n)?,
                catalog_ag(CatalogKey::Surface(n)),
            ),
            Target::Enriques => (
                computed_enriques_catalog(fixtures, n),
                catalog_age(CatalogKey::Surface(n)),
            ),
        };
        ok &= report_catalog_row(&format!("F_{n}"), &computed, &expected);
        union.extend(computed);
    }
    if n.is_none() {
        let (full, infinity) = match target {
            Target::K3 => (catalog_ag_full(), catalog_ag(CatalogKey::Infinity)),
            Target::Enriques => (catalog_age_full(), catalog_age(CatalogKey::Infinity)),
        };
        union.extend(infinity);
        ok &= report_catalog_row("union (with the plane quotients)", &union, &full);
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(DISAGREE)
    })
}

// ── lattice ─────────────────────────────────────────────────────────────

fn print_table_report(report: &TableReport) {
    let predicted = report
        .predicted_disc_order
        .as_ref()
        .map_or_else(|| "-".to_string(), ToString::to_string);
    let status = if report.consistent {
        "CONSISTENT"
    } else {
        "DISCREPANCY"
    };
    println!(
        "{}\trank {} (tabulated {})\t|det E_G| = {}\tpredicted disc order {} vs tabulated {}\t{status}",
        report.group,
        report.computed_rank,
        report.tabulated_rank,
        report.det_abs,
        predicted,
        report.tabulated_disc_order,
    );
}

fn cmd_lattice(group: Option<&str>, check_all: bool) -> Result<ExitCode> {
    match (group, check_all) {
        (Some(spec), false) => {
            let group = FiniteAbelianGroup::parse_spec(spec)
                .with_context(|| format!("parsing the group spec {spec:?}"))?;
            let report = check_symplectic_tables(&group)?;
            let consistent = report.consistent;
            print_table_report(&report);
            Ok(if consistent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(DISAGREE)
            })
        }
        (None, true) => {
            let reports = check_all_symplectic_tables();
            let mut inconsistent = 0usize;
            for report in &reports {
                print_table_report(report);
                inconsistent += usize::from(!report.consistent);
            }
            println!(
                "{} rows: {} consistent, {} discrepant",
                reports.len(),
                reports.len() - inconsistent,
                inconsistent
            );
            Ok(if inconsistent == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(DISAGREE)
            })
        }
        _ => bail!("pass exactly one of --group <spec> or --check-all"),
    }
}

// ── plan ────────────────────────────────────────────────────────────────

fn render_ruling(ruling: Ruling) -> &'static str {
    match ruling {
        Ruling::First => "first",
        Ruling::Second => "second",
    }
}

fn render_classes(pairs: &[(i64, i64)]) -> String {
    let rendered: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    rendered.join(" + ")
}

fn render_step(step: &CoverStep) -> String {
    match step {
        CoverStep::BaseChangeCyclic {
            degree,
            from_n,
            to_n,
            ruling,
        } => format!(
            "cyclic base change of degree {degree} along the {} ruling, F_{from_n} -> F_{to_n}",
            render_ruling(*ruling)
        ),
        CoverStep::BaseChangeKlein { from_n, to_n, ruling } => format!(
            "Klein base change along the {} ruling, F_{from_n} -> F_{to_n}",
            render_ruling(*ruling)
        ),
        CoverStep::CyclicCover { degree, branch } => format!(
            "cyclic cover of degree {degree} branched along {}",
            render_classes(branch)
        ),
        CoverStep::FiberProduct => {
            "normalized fiber product of the two preceding covers".to_string()
        }
        CoverStep::AssertedStep {
            citation,
            degree,
            ramifies,
        } => {
            let ramification = if ramifies.is_empty() {
                "unramified".to_string()
            } else {
                format!("ramified over {}", render_classes(ramifies))
            };
            format!("asserted cover of degree {degree}, {ramification}: {citation}")
        }
    }
}

fn cmd_plan(fixtures: &FixtureSet, class: &str, verify: bool) -> Result<ExitCode> {
    let id = ClassId::parse(class).with_context(|| format!("parsing the class id {class:?}"))?;
    let Some(branch_class) = fixtures.class(&id) else {
        bail!("{id} is not in the curated tables");
    };
    let Some(plan) = fixtures.plan(&id) else {
        let row = fixtures
            .verdict_row(&id)
            .ok_or_else(|| anyhow!("{id} has no verdict row"))?;
        match &row.verdict {
            Verdict::Rejected(rules) => {
                let tokens: Vec<String> = rules.iter().map(ToString::to_string).collect();
                println!(
                    "{id}: no tower; rejected ({}): {}",
                    tokens.join(";"),
                    row.citation
                );
            }
            _ => println!("{id}: no tower recorded"),
        }
        return Ok(ExitCode::SUCCESS);
    };

    println!(
        "{id}: group {} ({})",
        plan.claimed_group,
        match plan.provenance {
            k3q_core::towers::PlanProvenance::Curated => "curated",
            k3q_core::towers::PlanProvenance::CuratedInterpolated => "curated, interpolated",
        }
    );
    println!("citation: {}", plan.citation);
    for (index, step) in plan.steps.iter().enumerate() {
        println!("  {}. {}", index + 1, render_step(step));
    }
    if verify {
        let report = verify_plan(plan, branch_class);
        println!(
            "verify: {} (total degree {})",
            report.outcome, report.total_degree
        );
        if !report.outcome.is_pass() || report.total_degree != plan.claimed_group.order() {
            return Ok(ExitCode::from(DISAGREE));
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ── fenchel ─────────────────────────────────────────────────────────────

fn cmd_fenchel(mults: &[u64]) -> Result<ExitCode> {
    if mults.is_empty() {
        bail!("pass at least one multiplicity");
    }
    let rendered: Vec<String> = mults.iter().map(ToString::to_string).collect();
    let signature = rendered.join(",");
    match fenchel_abelian_p1(mults) {
        Some(group) => println!("signature ({signature}): abelian cover of the line with group {group}"),
        None => println!("signature ({signature}): no abelian cover of the line"),
    }
    Ok(ExitCode::SUCCESS)
}
