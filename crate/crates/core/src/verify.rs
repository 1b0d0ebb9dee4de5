//! Structural and modeling-guideline checks.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::model::{GatewayKind, NodeKind, ProcessModel};

/// Size limit for flow nodes before W02 fires.
pub const MAX_ELEMENTS: usize = 50;

const DEFAULT_VERBS: &str = include_str!("../data/verbs.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Node not reachable from a start event.
    E01,
    /// Node cannot reach any end event.
    E02,
    /// Gateway that both splits and joins.
    E03,
    /// Sequence flow leaving an end event or entering a start event.
    E04,
    W01,
    W02,
    W03,
    W04,
}

impl Code {
    pub fn severity(self) -> Severity {
        match self {
            Code::E01 | Code::E02 | Code::E03 | Code::E04 => Severity::Error,
            _ => Severity::Warning,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub elements: Vec<String>,
    pub message: String,
}

impl Diagnostic {
    fn new(code: Code, elements: Vec<String>, message: String) -> Self {
        Diagnostic { code, severity: code.severity(), elements, message }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{} {}: {} [{}]", self.code, sev, self.message, self.elements.join(", "))
    }
}

/// Verbs accepted as the first word of a task label.
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    verbs: BTreeSet<String>,
}

impl VerbLexicon {
    /// Reads one verb per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let verbs = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        VerbLexicon { verbs }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.verbs.contains(&word.to_lowercase())
    }
}

impl Default for VerbLexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_VERBS)
    }
}

/// Runs every rule with the bundled verb lexicon.
pub fn validate_structure(model: &ProcessModel) -> Vec<Diagnostic> {
    validate_with(model, &VerbLexicon::default())
}

pub fn validate_with(model: &ProcessModel, verbs: &VerbLexicon) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let starts: Vec<&str> = model.start_events().map(|n| n.id.as_str()).collect();
    let ends: Vec<&str> = model.end_events().map(|n| n.id.as_str()).collect();

    let forward = reach(model, &starts, true);
    let backward = reach(model, &ends, false);
    for n in model.nodes() {
        if !forward.contains(n.id.as_str()) {
            out.push(Diagnostic::new(
                Code::E01,
                vec![n.id.clone()],
                format!("`{}` is unreachable from a start event", n.label),
            ));
        }
        if !backward.contains(n.id.as_str()) {
            out.push(Diagnostic::new(
                Code::E02,
                vec![n.id.clone()],
                format!("`{}` cannot reach an end event", n.label),
            ));
        }
        if n.kind.gateway_kind().is_some() && model.in_degree(&n.id) > 1 && model.out_degree(&n.id) > 1 {
            out.push(Diagnostic::new(Code::E03, vec![n.id.clone()], "gateway both splits and joins".to_string()));
        }
    }

    for f in model.sequence_flows() {
        let from_end = matches!(model.node(&f.source).map(|n| n.kind), Some(NodeKind::EndEvent));
        let into_start = matches!(model.node(&f.target).map(|n| n.kind), Some(NodeKind::StartEvent { .. }));
        if from_end || into_start {
            let what = if from_end { "leaves an end event" } else { "enters a start event" };
            out.push(Diagnostic::new(Code::E04, vec![f.id.clone()], format!("sequence flow {what}")));
        }
    }

    if starts.len() > 1 {
        out.push(Diagnostic::new(
            Code::W01,
            starts.iter().map(|s| s.to_string()).collect(),
            format!("{} start events; a process should have one", starts.len()),
        ));
    }
    if model.nodes().len() > MAX_ELEMENTS {
        out.push(Diagnostic::new(
            Code::W02,
            vec![model.id().to_string()],
            format!("{} flow elements exceed the limit of {MAX_ELEMENTS}", model.nodes().len()),
        ));
    }
    for t in model.tasks() {
        let first = t.label.split_whitespace().next().unwrap_or("");
        if !verbs.contains(first) {
            out.push(Diagnostic::new(
                Code::W03,
                vec![t.id.clone()],
                format!("label `{}` does not start with a known verb", t.label),
            ));
        }
    }
    for n in model.nodes() {
        if n.kind.gateway_kind() == Some(GatewayKind::Exclusive) && model.out_degree(&n.id) > 1 {
            let unlabeled: Vec<String> = model
                .outgoing(&n.id)
                .filter(|f| f.condition.as_deref().is_none_or(|c| c.trim().is_empty()))
                .map(|f| f.id.clone())
                .collect();
            if !unlabeled.is_empty() {
                let mut elements = vec![n.id.clone()];
                elements.extend(unlabeled);
                out.push(Diagnostic::new(
                    Code::W04,
                    elements,
                    "exclusive split with unlabeled outgoing flows".to_string(),
                ));
            }
        }
    }

    out.sort();
    out
}

fn reach<'a>(model: &'a ProcessModel, seeds: &[&'a str], forward: bool) -> BTreeSet<&'a str> {
    let mut seen: BTreeSet<&str> = seeds.iter().copied().collect();
    let mut queue: VecDeque<&str> = seeds.iter().copied().collect();
    while let Some(n) = queue.pop_front() {
        let next: Vec<&str> = if forward {
            model.outgoing(n).map(|f| f.target.as_str()).collect()
        } else {
            model.incoming(n).map(|f| f.source.as_str()).collect()
        };
        for m in next {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    seen
}
