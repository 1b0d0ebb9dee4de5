//! Waste detection over data usage, issue registers, and as-is/to-be comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{AccessDirection, Collaboration, DataLabel, ProcessModel};
use crate::scenario::BoundScenario;
use crate::sim::{simulate, SimError, SimulationReport};

pub const NOT_APPLICABLE: &str = "Not applicable";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IssueCategory {
    Overprocessing,
    DataDistribution,
    FormatFragmentation,
    Manual,
}

impl IssueCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCategory::Overprocessing => "overprocessing",
            IssueCategory::DataDistribution => "data_distribution",
            IssueCategory::FormatFragmentation => "format_fragmentation",
            IssueCategory::Manual => "manual",
        }
    }
}

impl fmt::Display for IssueCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WasteGroup {
    Move,
    Hold,
    Overdo,
    None,
}

impl WasteGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            WasteGroup::Move => "move",
            WasteGroup::Hold => "hold",
            WasteGroup::Overdo => "overdo",
            WasteGroup::None => "none",
        }
    }
}

impl fmt::Display for WasteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueFinding {
    pub id: String,
    pub title: String,
    pub category: IssueCategory,
    pub waste_group: WasteGroup,
    /// Data base name the finding is about; used to match findings across models.
    pub subject: String,
    pub description: String,
    pub data_and_assumptions: String,
    pub qualitative_impact: String,
    pub quantitative_impact: String,
    pub elements: Vec<String>,
    pub duplication_factor: Option<u32>,
}

impl IssueFinding {
    /// A finding recorded by hand, e.g. for transport or waiting waste.
    pub fn manual(id: impl Into<String>, title: impl Into<String>, waste_group: WasteGroup) -> Self {
        let title = title.into();
        IssueFinding {
            id: id.into(),
            subject: title.clone(),
            title,
            category: IssueCategory::Manual,
            waste_group,
            description: String::new(),
            data_and_assumptions: String::new(),
            qualitative_impact: String::new(),
            quantitative_impact: NOT_APPLICABLE.to_string(),
            elements: Vec::new(),
            duplication_factor: None,
        }
    }

    fn key(&self) -> (IssueCategory, &str) {
        (self.category, &self.subject)
    }
}

/// One node touching one data object, together with the stores the same
/// node touches in the same direction.
struct Usage<'a> {
    node: &'a str,
    object: &'a str,
    label: &'a DataLabel,
    direction: AccessDirection,
    stores: Vec<(&'a str, &'a str)>,
}

fn usages(p: &ProcessModel) -> Vec<Usage<'_>> {
    let mut out = Vec::new();
    for a in p.data_associations() {
        let Some(obj) = p.data_objects().iter().find(|o| o.id == a.artifact) else { continue };
        let stores = p
            .data_associations()
            .iter()
            .filter(|b| b.node == a.node && b.direction == a.direction)
            .filter_map(|b| p.data_stores().iter().find(|s| s.id == b.artifact))
            .map(|s| (s.id.as_str(), s.name.as_str()))
            .collect();
        out.push(Usage { node: &a.node, object: &obj.id, label: &obj.label, direction: a.direction, stores });
    }
    out
}

fn masked_label(label: &str, store_name: &str) -> String {
    let mask: BTreeSet<&str> = store_name.split_whitespace().collect();
    label.split_whitespace().filter(|t| !mask.contains(t)).collect::<Vec<_>>().join(" ")
}

#[derive(Default)]
struct Subject<'a> {
    // (masked task label) -> (task id, store id)
    tasks: BTreeMap<String, BTreeSet<(&'a str, &'a str)>>,
    writers: BTreeSet<&'a str>,
    written_to: BTreeSet<&'a str>,
    formats: BTreeMap<&'a str, BTreeSet<&'a str>>,
    format_objects: BTreeSet<&'a str>,
    format_stores: BTreeSet<&'a str>,
}

/// Runs the overprocessing, data distribution and format fragmentation detectors.
pub fn detect_issues(model: &Collaboration) -> Vec<IssueFinding> {
    let mut subjects: BTreeMap<&str, Subject> = BTreeMap::new();
    let mut store_names: BTreeMap<&str, &str> = BTreeMap::new();
    for p in model.processes() {
        for s in p.data_stores() {
            store_names.insert(&s.id, &s.name);
        }
        for u in usages(p) {
            if u.stores.is_empty() {
                continue;
            }
            let subject = subjects.entry(u.label.base_name.as_str()).or_default();
            let is_task = p.node(u.node).is_some_and(|n| n.kind.is_task());
            for &(sid, sname) in &u.stores {
                if is_task {
                    let label = &p.node(u.node).unwrap().label;
                    subject.tasks.entry(masked_label(label, sname)).or_default().insert((u.node, sid));
                }
                if u.direction == AccessDirection::Write {
                    subject.writers.insert(u.node);
                    subject.written_to.insert(sid);
                }
                if let Some(f) = &u.label.format {
                    subject.formats.entry(f.as_str()).or_default().insert(sid);
                    subject.format_objects.insert(u.object);
                    subject.format_stores.insert(sid);
                }
            }
        }
    }

    let mut over = Vec::new();
    let mut dist = Vec::new();
    let mut frag = Vec::new();
    for (base, s) in &subjects {
        let mut factor = 0;
        let mut tasks = BTreeSet::new();
        let mut stores = BTreeSet::new();
        for group in s.tasks.values() {
            let ids: BTreeSet<&str> = group.iter().map(|(t, _)| *t).collect();
            let in_stores: BTreeSet<&str> = group.iter().map(|(_, s)| *s).collect();
            if ids.len() >= 2 && in_stores.len() >= 2 {
                factor = factor.max(in_stores.len());
                tasks.extend(ids);
                stores.extend(in_stores);
            }
        }
        if factor > 0 {
            over.push(overprocessing(base, factor as u32, &tasks, &stores));
        }
        if s.written_to.len() >= 2 {
            let names: Vec<&str> = s.written_to.iter().map(|id| store_names[id]).collect();
            dist.push(distribution(base, &names, s.writers.iter().chain(&s.written_to)));
        }
        if s.formats.len() >= 2 && s.format_stores.len() >= 2 {
            let formats: Vec<&str> = s.formats.keys().copied().collect();
            frag.push(fragmentation(base, &formats, s.format_objects.iter().chain(&s.format_stores)));
        }
    }

    let mut all: Vec<IssueFinding> = over.into_iter().chain(dist).chain(frag).collect();
    for (i, f) in all.iter_mut().enumerate() {
        f.id = format!("ISSUE-{}", i + 1);
    }
    all
}

fn times(n: u32) -> String {
    match n {
        2 => "twice".to_string(),
        n => format!("{} times", crate::textgen::number_word(n as usize)),
    }
}

fn overprocessing(base: &str, factor: u32, tasks: &BTreeSet<&str>, stores: &BTreeSet<&str>) -> IssueFinding {
    IssueFinding {
        id: String::new(),
        title: format!("Overprocessing of {base}"),
        category: IssueCategory::Overprocessing,
        waste_group: WasteGroup::Overdo,
        subject: base.to_string(),
        description: format!(
            "The same work on {base} is repeated for each system that keeps its own copy, up to {} per run ({factor}x).",
            times(factor)
        ),
        data_and_assumptions: format!(
            "{} tasks act on {base} held in {} separate data stores; each repetition is assumed to cost the same.",
            tasks.len(),
            stores.len()
        ),
        qualitative_impact: "Repeated bookkeeping adds effort without adding value and slows the process down.".into(),
        quantitative_impact: NOT_APPLICABLE.into(),
        elements: tasks.iter().chain(stores).map(|s| s.to_string()).collect(),
        duplication_factor: Some(factor),
    }
}

fn distribution<'a>(base: &str, stores: &[&str], elements: impl Iterator<Item = &'a &'a str>) -> IssueFinding {
    IssueFinding {
        id: String::new(),
        title: format!("Distribution of {base}"),
        category: IssueCategory::DataDistribution,
        waste_group: WasteGroup::None,
        subject: base.to_string(),
        description: format!(
            "{base} is written to {} stores that do not exchange data: {}.",
            stores.len(),
            stores.join(", ")
        ),
        data_and_assumptions: format!("Each store keeps an independent copy of {base}."),
        qualitative_impact: "Copies can drift apart, so later steps may work on inconsistent data.".into(),
        quantitative_impact: NOT_APPLICABLE.into(),
        elements: elements.map(|s| s.to_string()).collect(),
        duplication_factor: None,
    }
}

fn fragmentation<'a>(base: &str, formats: &[&str], elements: impl Iterator<Item = &'a &'a str>) -> IssueFinding {
    IssueFinding {
        id: String::new(),
        title: format!("Format fragmentation of {base}"),
        category: IssueCategory::FormatFragmentation,
        waste_group: WasteGroup::None,
        subject: base.to_string(),
        description: format!("{base} is kept in {} different formats: {}.", formats.len(), formats.join(", ")),
        data_and_assumptions: "No shared format is agreed between the systems involved.".into(),
        qualitative_impact: "Moving the data between systems needs conversion, which hurts interoperability.".into(),
        quantitative_impact: NOT_APPLICABLE.into(),
        elements: elements.map(|s| s.to_string()).collect(),
        duplication_factor: None,
    }
}

/// Plain-text issue register, one block per finding.
pub fn render_register(findings: &[IssueFinding]) -> String {
    let mut out = String::new();
    for f in findings {
        out.push_str(&format!("{}: {}\n", f.id, f.title));
        out.push_str(&format!("  Category: {} ({})\n", f.category, f.waste_group));
        out.push_str(&format!("  Description: {}\n", f.description));
        out.push_str(&format!("  Data and assumptions: {}\n", f.data_and_assumptions));
        out.push_str(&format!("  Qualitative impact: {}\n", f.qualitative_impact));
        out.push_str(&format!("  Quantitative impact: {}\n", f.quantitative_impact));
        if !f.elements.is_empty() {
            out.push_str(&format!("  Elements: {}\n", f.elements.join(", ")));
        }
    }
    if findings.is_empty() {
        out.push_str("No issues found.\n");
    }
    out
}

#[derive(Debug, Clone)]
pub struct RedesignReport {
    pub task_count_a: usize,
    pub task_count_b: usize,
    pub tasks_removed: Vec<String>,
    pub tasks_added: Vec<String>,
    pub simulation_a: SimulationReport,
    pub simulation_b: SimulationReport,
    pub resolved_issues: Vec<IssueFinding>,
    pub heuristic_tags: Vec<String>,
}

impl RedesignReport {
    /// (best, worst, expected) of b minus a, in seconds.
    pub fn deltas(&self) -> (i64, i64, i64) {
        let d = |a: crate::Duration, b: crate::Duration| b.secs() as i64 - a.secs() as i64;
        let (a, b) = (&self.simulation_a, &self.simulation_b);
        (d(a.best, b.best), d(a.worst, b.worst), d(a.expected, b.expected))
    }
}

fn task_labels(c: &Collaboration) -> Vec<String> {
    let mut v: Vec<String> =
        c.processes().flat_map(|p| p.tasks().map(|n| n.label.clone()).collect::<Vec<_>>()).collect();
    v.sort();
    v
}

/// Multiset difference of sorted lists.
fn minus(a: &[String], b: &[String]) -> Vec<String> {
    let mut left: BTreeMap<&str, usize> = BTreeMap::new();
    for x in b {
        *left.entry(x).or_default() += 1;
    }
    a.iter()
        .filter(|x| match left.get_mut(x.as_str()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                false
            }
            _ => true,
        })
        .cloned()
        .collect()
}

/// Compares two versions of a process. Times are simulated on the process
/// each scenario is bound to.
pub fn compare(
    model_a: &Collaboration,
    model_b: &Collaboration,
    bound_a: &BoundScenario,
    bound_b: &BoundScenario,
) -> Result<RedesignReport, SimError> {
    let labels_a = task_labels(model_a);
    let labels_b = task_labels(model_b);
    let tasks_removed = minus(&labels_a, &labels_b);
    let tasks_added = minus(&labels_b, &labels_a);

    let simulation_a = simulate(&bound_a.model, bound_a)?;
    let simulation_b = simulate(&bound_b.model, bound_b)?;

    let issues_b = detect_issues(model_b);
    let still: BTreeSet<_> = issues_b.iter().map(IssueFinding::key).collect();
    let resolved_issues: Vec<IssueFinding> =
        detect_issues(model_a).into_iter().filter(|f| !still.contains(&f.key())).collect();

    let mut heuristic_tags = Vec::new();
    if labels_b.len() < labels_a.len() {
        heuristic_tags.push("task elimination".to_string());
    }
    if resolved_issues.iter().any(|f| f.category == IssueCategory::DataDistribution) {
        heuristic_tags.push("integral technology".to_string());
    }

    Ok(RedesignReport {
        task_count_a: labels_a.len(),
        task_count_b: labels_b.len(),
        tasks_removed,
        tasks_added,
        simulation_a,
        simulation_b,
        resolved_issues,
        heuristic_tags,
    })
}
