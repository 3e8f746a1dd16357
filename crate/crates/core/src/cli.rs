//! Command-line front end: `groups`, `chern`, `verify`, `manifold`, and
//! `parse-check` over a workspace of definition files.
//!
//! Every command emits a stream of records — queries for computations,
//! checks for verifications — rendered either as human lines or as one JSON
//! object per line (`--machine`).  Both renderings carry the same facts in
//! the same order.  Exit codes: 0 success, 1 at least one check failed,
//! 2 usage or input error.

use crate::algebra::{OverflowPolicy, Poly};
use crate::chern::{verify_axioms, ChernError, MapModel, RealBundleModel};
use crate::conjugation::SpaceModel;
use crate::equivariant::{rank_reconciliation, twisted_group};
use crate::manifolds::{partition_label, ManifoldModel, Side};
use crate::report::{CheckResult, Record};
use crate::workspace::{standard_catalogue, LoadOptions, Workspace};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "realchern",
    version,
    about = "Equivariant Chern classes of Real bundles over conjugation spaces"
)]
pub struct Cli {
    /// Definition files to load, in order; the embedded catalogue if omitted.
    #[arg(long = "workspace", global = true, value_name = "FILE")]
    pub workspace: Vec<PathBuf>,

    /// Truncation degree for spaces without an explicit `truncate`.
    #[arg(long = "max-degree", global = true, value_name = "N", default_value_t = 16)]
    pub max_degree: u32,

    /// Emit one JSON record per line instead of human-readable lines.
    #[arg(long, global = true)]
    pub machine: bool,

    /// Let expressions silently drop terms above the truncation degree.
    #[arg(long = "allow-truncation", global = true)]
    pub allow_truncation: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Print the twisted-coefficient cohomology groups of a space.
    Groups {
        space: String,
        /// Highest degree to print.
        #[arg(long, default_value_t = 12)]
        max: u32,
        /// Coefficient twist: 0, 1, or both.
        #[arg(long, value_enum, default_value_t = TwistArg::Both)]
        twist: TwistArg,
    },
    /// Print equivariant Chern classes of a bundle: coordinates,
    /// (degree, twist), forgetful image, and fixed-point restriction.
    Chern {
        bundle: String,
        /// Single class index; all nonzero classes if omitted.
        n: Option<u32>,
        /// Print the whole total class (the default when no index is given).
        #[arg(long)]
        total: bool,
    },
    /// Run a verification suite; exit 0 iff every check passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict the space-indexed suites to one space.
        #[arg(long)]
        space: Option<String>,
        /// Highest degree the space-indexed suites look at.
        #[arg(long, default_value_t = 12)]
        max: u32,
    },
    /// Closed-manifold computations on both sides of the conjugation.
    Manifold {
        name: String,
        #[command(subcommand)]
        action: ManifoldAction,
    },
    /// Load the definition files and report diagnostics.
    ParseCheck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TwistArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Conjugation,
    Ranks,
    Wu,
    All,
}

#[derive(Subcommand)]
pub enum ManifoldAction {
    /// Total Wu classes of both sides.
    Wu,
    /// Stiefel-Whitney numbers of both sides, one per partition.
    SwNumbers,
    /// Transfer of Stiefel-Whitney and Wu classes along kappa.
    KappaCheck,
    /// Compare characteristic numbers with another manifold of the same
    /// dimension, on both sides.
    Compare { other: String },
}

enum CliError {
    /// Unknown names, malformed files, out-of-range queries: exit 2.
    Usage(String),
    /// A computation exposed wrong input data: exit 1.
    Failed(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(records) => {
            let mut all_pass = true;
            for record in &records {
                if let Record::Check(c) = record {
                    all_pass &= c.pass;
                }
                if cli.machine {
                    println!("{}", record.machine_line());
                } else {
                    println!("{}", record.human_line());
                }
            }
            if all_pass {
                0
            } else {
                1
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            2
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {}", msg);
            1
        }
    }
}

fn load_options(cli: &Cli) -> LoadOptions {
    LoadOptions {
        default_cap: cli.max_degree,
        overflow: if cli.allow_truncation {
            OverflowPolicy::Truncate
        } else {
            OverflowPolicy::Error
        },
    }
}

/// Load the given files in order, or the embedded catalogue when none are
/// given.  Emits one record per loaded source when `records` is provided.
fn load_workspace(cli: &Cli, records: Option<&mut Vec<Record>>) -> Result<Workspace, CliError> {
    let opts = load_options(cli);
    let mut notes = Vec::new();
    let ws = if cli.workspace.is_empty() {
        notes.push("catalog.defs (embedded)".to_string());
        standard_catalogue(&opts).map_err(|e| usage(e.to_string()))?
    } else {
        let mut ws = Workspace::new();
        for path in &cli.workspace {
            ws.load_path(path, &opts).map_err(|e| usage(e.to_string()))?;
            notes.push(path.display().to_string());
        }
        ws
    };
    if let Some(records) = records {
        for note in notes {
            records.push(Record::query("parse-check", note, "ok", ""));
        }
    }
    Ok(ws)
}

fn execute(cli: &Cli) -> Result<Vec<Record>, CliError> {
    match &cli.command {
        Command::Groups { space, max, twist } => {
            let ws = load_workspace(cli, None)?;
            cmd_groups(&ws, space, *max, *twist)
        }
        Command::Chern { bundle, n, total } => {
            let ws = load_workspace(cli, None)?;
            cmd_chern(&ws, bundle, *n, *total)
        }
        Command::Verify { suite, space, max } => {
            let ws = load_workspace(cli, None)?;
            cmd_verify(&ws, *suite, space.as_deref(), *max)
        }
        Command::Manifold { name, action } => {
            let ws = load_workspace(cli, None)?;
            cmd_manifold(&ws, name, action)
        }
        Command::ParseCheck => {
            let mut records = Vec::new();
            let ws = load_workspace(cli, Some(&mut records))?;
            records.push(Record::query(
                "parse-check",
                "workspace",
                "ok",
                format!(
                    "{} space(s), {} bundle(s), {} manifold(s), {} map(s)",
                    ws.spaces().len(),
                    ws.bundles().len(),
                    ws.manifolds().len(),
                    ws.maps().len()
                ),
            ));
            Ok(records)
        }
    }
}

fn cmd_groups(
    ws: &Workspace,
    name: &str,
    max: u32,
    twist: TwistArg,
) -> Result<Vec<Record>, CliError> {
    let space = ws
        .space(name)
        .ok_or_else(|| usage(format!("unknown space '{}'", name)))?;
    let twists: &[u8] = match twist {
        TwistArg::Zero => &[0],
        TwistArg::One => &[1],
        TwistArg::Both => &[0, 1],
    };
    let mut records = Vec::new();
    for k in 0..=max {
        for &eps in twists {
            let group = twisted_group(space, k, eps).map_err(|e| usage(e.to_string()))?;
            records.push(Record::query(
                "group",
                format!("H^{}({}; Z({}))", k, name, eps),
                group.to_string(),
                "",
            ));
        }
    }
    Ok(records)
}

fn cmd_chern(
    ws: &Workspace,
    name: &str,
    n: Option<u32>,
    total: bool,
) -> Result<Vec<Record>, CliError> {
    let bundle = ws
        .bundle(name)
        .ok_or_else(|| usage(format!("unknown bundle '{}'", name)))?;
    let (indices, listing): (Vec<u32>, bool) = match (n, total) {
        (Some(_), true) => {
            return Err(usage("give either a class index or --total, not both"))
        }
        (Some(k), false) => (vec![k], false),
        (None, _) => ((0..=bundle.top_chern_degree()).collect(), true),
    };
    let mut records = Vec::new();
    for k in indices {
        let class = bundle
            .equivariant_chern(k)
            .map_err(|e| usage(e.to_string()))?;
        if listing && k > 0 && class.is_zero() {
            continue;
        }
        let subject = format!("{} c~{}", name, k);
        records.push(Record::query(
            "chern",
            subject.clone(),
            class.to_string(),
            format!("degree {} twist {}", 2 * k, k % 2),
        ));
        let forget = bundle.forget_chern(k).map_err(|e| usage(e.to_string()))?;
        records.push(Record::query(
            "chern-forget",
            subject.clone(),
            forget.to_string(),
            "underlying class",
        ));
        let restrict = bundle.restrict_chern(k).map_err(|e| match e {
            ChernError::RestrictionMismatch { .. } => CliError::Failed(e.to_string()),
            other => usage(other.to_string()),
        })?;
        records.push(Record::query(
            "chern-restrict",
            subject.clone(),
            restrict.to_string(),
            "fixed-point restriction",
        ));
        if bundle.base().trivial_involution() && k > 0 {
            let leading = bundle.kahn_reduction(k).map_err(|e| usage(e.to_string()))?;
            records.push(Record::query(
                "chern-kahn",
                subject,
                leading.to_string(),
                "leading restriction coefficient",
            ));
        }
    }
    Ok(records)
}

fn cmd_verify(
    ws: &Workspace,
    suite: Suite,
    space_filter: Option<&str>,
    max: u32,
) -> Result<Vec<Record>, CliError> {
    if let Some(name) = space_filter {
        if ws.space(name).is_none() {
            return Err(usage(format!("unknown space '{}'", name)));
        }
    }
    let spaces: Vec<(&String, &Arc<SpaceModel>)> = ws
        .spaces()
        .iter()
        .filter(|(n, _)| space_filter.is_none_or(|f| f == n.as_str()))
        .collect();
    let mut checks: Vec<CheckResult> = Vec::new();
    if matches!(suite, Suite::Axioms | Suite::All) {
        checks.extend(axioms_suite(ws)?);
    }
    if matches!(suite, Suite::Conjugation | Suite::All) {
        for (name, space) in &spaces {
            checks.extend(conjugation_suite(name, space, max));
        }
    }
    if matches!(suite, Suite::Ranks | Suite::All) {
        for (name, space) in &spaces {
            checks.extend(ranks_suite(name, space, max)?);
        }
    }
    if matches!(suite, Suite::Wu | Suite::All) {
        for manifold in ws.manifolds().values() {
            checks.extend(wu_suite(manifold));
        }
    }
    let mut records: Vec<Record> = checks.into_iter().map(Record::Check).collect();
    records.sort_by_key(Record::key);
    Ok(records)
}

fn axioms_suite(ws: &Workspace) -> Result<Vec<CheckResult>, CliError> {
    let mut checks = Vec::new();
    for bundle in ws.bundles().values() {
        checks.extend(bundle.validate());
    }
    for map in ws.maps().values() {
        checks.extend(map.validate());
    }
    let bundles: Vec<&RealBundleModel> = ws.bundles().values().collect();
    let maps: Vec<&MapModel> = ws.maps().values().collect();
    checks.extend(verify_axioms(&bundles, &maps).map_err(|e| usage(e.to_string()))?);
    Ok(checks)
}

fn conjugation_suite(name: &str, space: &Arc<SpaceModel>, max: u32) -> Vec<CheckResult> {
    let mut checks = space.validate();
    let ring = space.mod2_ring().clone();
    let cap = max.min(space.degree_cap());
    let mut two_m = 0;
    while two_m <= cap {
        for mono in ring.monomial_basis(two_m) {
            let subject = format!("{} {}", name, mono.display(&ring));
            let class = Poly::monomial(&ring, mono);
            match space.conjugation_equation_check(&class) {
                Ok(report) => {
                    let detail = if report.pass {
                        format!("leading {} * u^{}", report.leading, two_m / 2)
                    } else {
                        format!(
                            "leading {} but kappa gives {}",
                            report.leading, report.expected
                        )
                    };
                    checks.push(CheckResult::of(
                        "conjugation-equation",
                        subject,
                        report.pass,
                        detail,
                    ));
                }
                Err(e) => checks.push(CheckResult::fail(
                    "conjugation-equation",
                    subject,
                    format!("error: {}", e),
                )),
            }
        }
        two_m += 2;
    }
    checks
}

fn ranks_suite(
    name: &str,
    space: &Arc<SpaceModel>,
    max: u32,
) -> Result<Vec<CheckResult>, CliError> {
    let report = rank_reconciliation(space, max.min(space.degree_cap()))
        .map_err(|e| usage(e.to_string()))?;
    Ok(report
        .rows
        .into_iter()
        .map(|row| {
            CheckResult::of(
                format!("rank/degree={}/twist={}", row.degree, row.twist),
                name,
                row.matched(),
                format!(
                    "group {} vs monomial count free {} torsion {}",
                    row.group, row.monomial_free, row.monomial_torsion
                ),
            )
        })
        .collect())
}

fn wu_suite(manifold: &ManifoldModel) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for side in [Side::M, Side::N] {
        let subject = format!("{}/{}", manifold.name(), side);
        match manifold.wu_classes(side) {
            Ok(v) => {
                let action = match side {
                    Side::M => manifold.space().even_sq(),
                    Side::N => manifold.space().fixed_sq(),
                };
                let roundtrip = action
                    .map(|a| a.total_sq(&v) == *manifold.total_sw(side))
                    .unwrap_or(false);
                checks.push(CheckResult::of(
                    "wu-roundtrip",
                    subject.clone(),
                    roundtrip,
                    format!("Sq({}) recovers the total class", v),
                ));
            }
            Err(e) => checks.push(CheckResult::fail(
                "wu-roundtrip",
                subject.clone(),
                format!("error: {}", e),
            )),
        }
        match manifold.wu_duality_check(side) {
            Ok(check) => checks.push(check),
            Err(e) => checks.push(CheckResult::fail(
                "wu-duality",
                subject,
                format!("error: {}", e),
            )),
        }
    }
    match manifold.kappa_transfer_check() {
        Ok(results) => checks.extend(results),
        Err(e) => checks.push(CheckResult::fail(
            "kappa-transfer",
            manifold.name(),
            format!("error: {}", e),
        )),
    }
    checks
}

fn cmd_manifold(
    ws: &Workspace,
    name: &str,
    action: &ManifoldAction,
) -> Result<Vec<Record>, CliError> {
    let manifold = ws
        .manifold(name)
        .ok_or_else(|| usage(format!("unknown manifold '{}'", name)))?;
    let mut records = Vec::new();
    match action {
        ManifoldAction::Wu => {
            for side in [Side::M, Side::N] {
                let v = manifold.wu_classes(side).map_err(|e| usage(e.to_string()))?;
                records.push(Record::query(
                    "wu",
                    format!("{}/{} v", name, side),
                    v.to_string(),
                    format!("dimension {}", manifold.dimension(side)),
                ));
            }
        }
        ManifoldAction::SwNumbers => {
            for side in [Side::M, Side::N] {
                for partition in crate::manifolds::partitions(manifold.dimension(side)) {
                    let value = manifold.sw_numbers(side)[&partition];
                    records.push(Record::query(
                        "sw-number",
                        format!("{}/{} {}", name, side, partition_label(&partition)),
                        if value { "1" } else { "0" },
                        "",
                    ));
                }
            }
        }
        ManifoldAction::KappaCheck => {
            let results = manifold
                .kappa_transfer_check()
                .map_err(|e| usage(e.to_string()))?;
            records.extend(results.into_iter().map(Record::Check));
        }
        ManifoldAction::Compare { other } => {
            let second = ws
                .manifold(other)
                .ok_or_else(|| usage(format!("unknown manifold '{}'", other)))?;
            let report = manifold
                .cobordism_compare(second)
                .map_err(|e| usage(e.to_string()))?;
            for (side, equal) in [(Side::M, report.m_equal), (Side::N, report.n_equal)] {
                let tag = format!("[{}]", side);
                let differing: Vec<&String> = report
                    .differing
                    .iter()
                    .filter(|d| d.ends_with(&tag))
                    .collect();
                records.push(Record::query(
                    "cobordism",
                    format!("{} vs {} /{}", name, other, side),
                    if equal { "equal numbers" } else { "different numbers" }.to_string(),
                    differing
                        .iter()
                        .map(|d| d.trim_end_matches(&tag).to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                ));
            }
            records.push(Record::Check(CheckResult::of(
                "cobordism-consistent",
                format!("{} vs {}", name, other),
                report.consistent(),
                "the two sides must agree on equality of numbers",
            )));
        }
    }
    Ok(records)
}
