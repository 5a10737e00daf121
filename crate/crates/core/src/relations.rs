//! The inclusion chains between the interval, weak, strong and order
//! topologies on effects and on projections, assembled from check outcomes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{self, CheckResults};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("check `{0}` has no recorded result")]
    MissingCheck(String),
    #[error("unknown format `{0}` (expected json, text or dot)")]
    UnknownFormat(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ambient {
    #[serde(rename = "E(H)")]
    Effects,
    #[serde(rename = "P(H)")]
    Projections,
}

impl Ambient {
    pub fn label(self) -> &'static str {
        match self {
            Self::Effects => "E(H)",
            Self::Projections => "P(H)",
        }
    }
}

impl std::str::FromStr for Ambient {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eh" | "E(H)" => Ok(Self::Effects),
            "ph" | "P(H)" => Ok(Self::Projections),
            other => Err(format!("unknown ambient `{other}` (expected eh or ph)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TopologyName {
    #[serde(rename = "interval")]
    Interval,
    #[serde(rename = "WOT")]
    Wot,
    #[serde(rename = "SOT")]
    Sot,
    #[serde(rename = "order")]
    Order,
}

impl TopologyName {
    pub const CHAIN: [TopologyName; 4] = [Self::Interval, Self::Wot, Self::Sot, Self::Order];

    pub fn label(self) -> &'static str {
        match self {
            Self::Interval => "interval",
            Self::Wot => "WOT",
            Self::Sot => "SOT",
            Self::Order => "order",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TopologyId {
    pub name: TopologyName,
    pub ambient: Ambient,
}

impl std::fmt::Display for TopologyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} on {}", self.name.label(), self.ambient.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationKind {
    #[serde(rename = "subset")]
    Subset,
    #[serde(rename = "strict-subset")]
    StrictSubset,
    #[serde(rename = "equal")]
    Equal,
}

impl RelationKind {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Subset => "⊆",
            Self::StrictSubset => "⊊",
            Self::Equal => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeStatus {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "verified-on-instances")]
    VerifiedOnInstances,
    #[serde(rename = "cited-not-verified")]
    CitedNotVerified,
    #[serde(rename = "falsified")]
    Falsified,
}

impl EdgeStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Verified => "verified",
            Self::VerifiedOnInstances => "verified-on-instances",
            Self::CitedNotVerified => "cited-not-verified",
            Self::Falsified => "falsified",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub id: String,
    pub passed: bool,
    pub summary: String,
}

/// `from` is coarser than `to`: its closed sets are closed in `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationEdge {
    pub from: TopologyId,
    pub to: TopologyId,
    pub kind: RelationKind,
    pub status: EdgeStatus,
    pub evidence: Vec<String>,
    /// The evidence ids that witness strictness.
    pub counterexamples: Vec<String>,
    pub failed_evidence: Vec<String>,
    pub paper_ref: String,
    /// Why the edge is only checked on finite instances.
    pub reason: String,
    pub instances: Vec<EvidenceItem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summary {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub ambient: Ambient,
    pub edges: Vec<RelationEdge>,
    /// Checks not cited by any edge of this ambient.
    pub supporting: Vec<EvidenceItem>,
    pub summary: Summary,
    pub notes: Vec<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.summary == Summary::Pass
    }

    /// The chain as `interval ⊊ WOT ⊊ SOT ⊊ order`.
    pub fn chain(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.edges.iter().enumerate() {
            if i == 0 {
                out.push_str(e.from.name.label());
            }
            let _ = write!(out, " {} {}", e.kind.symbol(), e.to.name.label());
        }
        out
    }
}

struct EdgeSpec {
    kind: RelationKind,
    inclusion: &'static [&'static str],
    counterexamples: &'static [&'static str],
    paper_ref: &'static str,
}

const INSTANCES_ONLY: &str =
    "the inclusion is a statement about all nets on an infinite-dimensional space; only finite instances are checked";

fn edge_specs(ambient: Ambient) -> [EdgeSpec; 3] {
    let interval_wot = EdgeSpec {
        kind: RelationKind::StrictSubset,
        inclusion: &[checks::INTERVAL_WOT],
        counterexamples: &[checks::EX5_NORM, checks::EX5_GRID, checks::EX5_BOUNDARY],
        paper_ref: "closed intervals are weakly closed; a norm-convergent projection family escapes every order interval around its limit",
    };
    let sot_order = EdgeSpec {
        kind: RelationKind::StrictSubset,
        inclusion: &[checks::VIGIER, checks::SQUEEZE],
        counterexamples: &[checks::EX3_NORM, checks::EX3_GRID],
        paper_ref: "order convergence forces strong convergence through monotone squeezing; a norm-convergent rotated projection family admits no upper bound chain",
    };
    let middle = match ambient {
        Ambient::Effects => EdgeSpec {
            kind: RelationKind::StrictSubset,
            inclusion: &[checks::SOT_WOT],
            counterexamples: &[checks::EX4_SOT, checks::EX4_WOT, checks::EX4_NORM],
            paper_ref: "strong convergence implies weak convergence; projections onto (e1 + en)/sqrt 2 converge weakly to e1 e1*/2 but not strongly",
        },
        Ambient::Projections => EdgeSpec {
            kind: RelationKind::Equal,
            inclusion: &[checks::SOT_WOT, checks::PROJECTION_IDENTITY],
            counterexamples: &[],
            paper_ref: "on projections the strong residual is a combination of inner products, so weak and strong convergence agree",
        },
    };
    [interval_wot, middle, sot_order]
}

fn lookup(results: &CheckResults, id: &str) -> Result<EvidenceItem, RelationError> {
    let o = results.get(id).ok_or_else(|| RelationError::MissingCheck(id.to_string()))?;
    Ok(EvidenceItem { id: id.to_string(), passed: o.passed, summary: o.summary.clone() })
}

/// Assembles the three-edge chain for `ambient`.
///
/// A failed check marks its edge falsified and the report as failed.
pub fn build_relation_report(ambient: Ambient, results: &CheckResults) -> Result<RelationReport, RelationError> {
    let mut edges = Vec::new();
    for (i, spec) in edge_specs(ambient).into_iter().enumerate() {
        let ids: Vec<&str> = spec.inclusion.iter().chain(spec.counterexamples).copied().collect();
        let instances = ids.iter().map(|id| lookup(results, id)).collect::<Result<Vec<_>, _>>()?;
        let failed_evidence: Vec<String> = instances.iter().filter(|e| !e.passed).map(|e| e.id.clone()).collect();
        let status = if failed_evidence.is_empty() { EdgeStatus::VerifiedOnInstances } else { EdgeStatus::Falsified };
        edges.push(RelationEdge {
            from: TopologyId { name: TopologyName::CHAIN[i], ambient },
            to: TopologyId { name: TopologyName::CHAIN[i + 1], ambient },
            kind: spec.kind,
            status,
            evidence: ids.iter().map(|s| s.to_string()).collect(),
            counterexamples: spec.counterexamples.iter().map(|s| s.to_string()).collect(),
            failed_evidence,
            paper_ref: spec.paper_ref.to_string(),
            reason: INSTANCES_ONLY.to_string(),
            instances,
        });
    }
    let cited: Vec<&String> = edges.iter().flat_map(|e| &e.evidence).collect();
    let supporting = checks::ALL_CHECKS
        .iter()
        .filter(|id| !cited.iter().any(|c| c == id))
        .map(|id| lookup(results, id))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = edges.iter().all(|e| e.status != EdgeStatus::Falsified) && supporting.iter().all(|e| e.passed);
    let notes = vec![
        "monotone convergence is checked on sequences of finite matrices, not on arbitrary nets".to_string(),
        "on finite carriers both the order and interval topologies are discrete, so they cannot separate there"
            .to_string(),
        "the escaping family is tested against weak convergence to 0 through |(P_n e1, e1)| tending to 1".to_string(),
    ];
    Ok(RelationReport { ambient, edges, supporting, summary: if ok { Summary::Pass } else { Summary::Fail }, notes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, RelationError> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            "dot" => Ok(Self::Dot),
            other => Err(RelationError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn render(report: &RelationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
        Format::Dot => render_dot(report),
    }
}

fn render_text(report: &RelationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ambient {}: {}", report.ambient.label(), report.chain());
    for e in &report.edges {
        let _ =
            writeln!(out, "{} {} {} [{}]", e.from.name.label(), e.kind.symbol(), e.to.name.label(), e.status.label());
        for item in &e.instances {
            let _ = writeln!(out, "  {} {}: {}", verdict(item.passed), item.id, item.summary);
        }
    }
    let _ = writeln!(out, "supporting");
    for item in &report.supporting {
        let _ = writeln!(out, "  {} {}: {}", verdict(item.passed), item.id, item.summary);
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "summary: {}", if report.passed() { "PASS" } else { "FAIL" });
    out
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_dot(report: &RelationReport) -> String {
    let mut out = String::new();
    let amb = report.ambient.label();
    let _ = writeln!(out, "digraph \"relations {amb}\" {{");
    let _ = writeln!(out, "  rankdir=LR;");
    for name in TopologyName::CHAIN {
        let _ = writeln!(out, "  \"{}\" [label=\"{} {}\"];", name.label(), name.label(), amb);
    }
    for e in &report.edges {
        let style = if e.status == EdgeStatus::Falsified { ", color=red" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{} {}\"{}];",
            e.from.name.label(),
            e.to.name.label(),
            e.kind.symbol(),
            e.status.label(),
            style
        );
    }
    let _ = writeln!(out, "}}");
    out
}
