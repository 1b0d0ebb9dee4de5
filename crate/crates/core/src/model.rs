//! Typed in-memory representation of a BPMN collaboration.
//!
//! All types are immutable once built: constructors check the structural
//! invariants (unique ids, resolvable references, no self-loops or parallel
//! edges) and the resulting values expose read-only accessors only.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Errors raised while assembling a model from parts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("`{owner}` references unknown element `{target}`")]
    UnknownReference { owner: String, target: String },
    #[error("sequence flow `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("sequence flows `{0}` and `{1}` connect the same pair of nodes")]
    MultiEdge(String, String),
    #[error("data association `{0}` must attach to a task or event")]
    AssociationOnGateway(String),
    #[error("data object `{0}` has an empty base name")]
    EmptyDataObject(String),
    #[error("message flow `{0}` connects elements of the same pool")]
    IntraPoolMessageFlow(String),
    #[error("data store name `{0}` is used more than once")]
    DuplicateStoreName(String),
    #[error("pool `{0}` needs a participant id inside a collaboration with an id")]
    DetachedPool(String),
    #[error("message flow `{0}` needs a collaboration with an id")]
    MessageFlowOutsideCollaboration(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventTrigger {
    None,
    Message,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskMarker {
    Generic,
    User,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GatewayKind {
    Exclusive,
    Parallel,
    Inclusive,
}

impl fmt::Display for GatewayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GatewayKind::Exclusive => "exclusive",
            GatewayKind::Parallel => "parallel",
            GatewayKind::Inclusive => "inclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    StartEvent { trigger: EventTrigger },
    IntermediateCatchEvent { trigger: EventTrigger },
    EndEvent,
    Task { marker: TaskMarker },
    Gateway { kind: GatewayKind },
}

impl NodeKind {
    pub fn is_event(&self) -> bool {
        matches!(self, NodeKind::StartEvent { .. } | NodeKind::IntermediateCatchEvent { .. } | NodeKind::EndEvent)
    }

    pub fn is_task(&self) -> bool {
        matches!(self, NodeKind::Task { .. })
    }

    pub fn gateway_kind(&self) -> Option<GatewayKind> {
        match self {
            NodeKind::Gateway { kind } => Some(*kind),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowNode {
    pub id: String,
    pub label: String,
    pub kind: NodeKind,
}

impl FlowNode {
    pub fn new(id: impl Into<String>, label: impl Into<String>, kind: NodeKind) -> Self {
        FlowNode { id: id.into(), label: label.into(), kind }
    }

    pub fn start(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self::new(id, label, NodeKind::StartEvent { trigger: EventTrigger::None })
    }

    pub fn end(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self::new(id, label, NodeKind::EndEvent)
    }

    pub fn task(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self::new(id, label, NodeKind::Task { marker: TaskMarker::Generic })
    }

    pub fn gateway(id: impl Into<String>, label: impl Into<String>, kind: GatewayKind) -> Self {
        Self::new(id, label, NodeKind::Gateway { kind })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequenceFlow {
    pub id: String,
    pub source: String,
    pub target: String,
    pub condition: Option<String>,
}

impl SequenceFlow {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        SequenceFlow { id: id.into(), source: source.into(), target: target.into(), condition: None }
    }

    pub fn with_condition(mut self, condition: impl Into<String>) -> Self {
        self.condition = Some(condition.into());
        self
    }
}

/// A data object occurrence whose display label follows `Base (Format) [State]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataObject {
    pub id: String,
    /// Id of the `dataObject` definition this reference points to, if any.
    pub object_ref: Option<String>,
    pub label: DataLabel,
}

/// Parsed `Base (Format) [State]` label. Both annotations are optional.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataLabel {
    pub base_name: String,
    pub format: Option<String>,
    pub state: Option<String>,
    // Separator text kept so that rendering reproduces the input exactly.
    raw: String,
}

impl DataLabel {
    /// Splits a display label into base name, format and state.
    ///
    /// A trailing `[...]` is the state; a trailing `(...)` before it is the
    /// format. Anything that does not fit stays in the base name.
    pub fn parse(text: &str) -> DataLabel {
        let mut rest = text.trim_end();
        let mut state = None;
        if rest.ends_with(']') {
            if let Some(open) = rest.rfind('[') {
                state = Some(rest[open + 1..rest.len() - 1].to_string());
                rest = rest[..open].trim_end();
            }
        }
        let mut format = None;
        if rest.ends_with(')') {
            if let Some(open) = rest.rfind('(') {
                if open > 0 {
                    format = Some(rest[open + 1..rest.len() - 1].to_string());
                    rest = rest[..open].trim_end();
                }
            }
        }
        let base_name = rest.trim().to_string();
        if base_name.is_empty() {
            // Nothing sensible to split; keep the whole text as the name.
            return DataLabel { base_name: text.trim().to_string(), format: None, state: None, raw: text.to_string() };
        }
        DataLabel { base_name, format, state, raw: text.to_string() }
    }

    pub fn from_parts(base_name: &str, format: Option<&str>, state: Option<&str>) -> DataLabel {
        let mut raw = base_name.to_string();
        if let Some(f) = format {
            raw.push_str(&format!(" ({f})"));
        }
        if let Some(s) = state {
            raw.push_str(&format!(" [{s}]"));
        }
        DataLabel::parse(&raw)
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }
}

impl fmt::Display for DataLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl DataObject {
    pub fn new(id: impl Into<String>, label: &str) -> Self {
        DataObject { id: id.into(), object_ref: None, label: DataLabel::parse(label) }
    }

    pub fn with_object_ref(mut self, object_ref: impl Into<String>) -> Self {
        self.object_ref = Some(object_ref.into());
        self
    }

    pub fn base_name(&self) -> &str {
        &self.label.base_name
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataStore {
    pub id: String,
    pub name: String,
}

impl DataStore {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        DataStore { id: id.into(), name: name.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AccessDirection {
    Read,
    Write,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataAssociation {
    pub id: String,
    pub node: String,
    pub artifact: String,
    pub direction: AccessDirection,
}

impl DataAssociation {
    pub fn read(id: impl Into<String>, node: impl Into<String>, artifact: impl Into<String>) -> Self {
        DataAssociation {
            id: id.into(),
            node: node.into(),
            artifact: artifact.into(),
            direction: AccessDirection::Read,
        }
    }

    pub fn write(id: impl Into<String>, node: impl Into<String>, artifact: impl Into<String>) -> Self {
        DataAssociation {
            id: id.into(),
            node: node.into(),
            artifact: artifact.into(),
            direction: AccessDirection::Write,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lane {
    pub id: String,
    pub name: String,
    pub members: Vec<String>,
}

/// What an artifact id resolves to.
#[derive(Debug, Clone, Copy)]
pub enum Artifact<'a> {
    Object(&'a DataObject),
    Store(&'a DataStore),
}

/// Raw parts of a process, validated by [`ProcessModel::new`].
#[derive(Debug, Clone, Default)]
pub struct ProcessParts {
    pub id: String,
    pub name: String,
    pub nodes: Vec<FlowNode>,
    pub sequence_flows: Vec<SequenceFlow>,
    pub data_objects: Vec<DataObject>,
    pub data_stores: Vec<DataStore>,
    pub data_associations: Vec<DataAssociation>,
    pub lanes: Vec<Lane>,
}

/// A single process: flow nodes, sequence flows and the data they touch.
///
/// Element vectors keep document order, which decides branch order for
/// path enumeration and text generation. Equality ignores that order.
#[derive(Debug, Clone)]
pub struct ProcessModel {
    parts: ProcessParts,
    node_index: HashMap<String, usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl ProcessModel {
    pub fn new(parts: ProcessParts) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        let mut claim = |id: &str| {
            if seen.insert(id.to_string()) {
                Ok(())
            } else {
                Err(ModelError::DuplicateId(id.to_string()))
            }
        };
        claim(&parts.id)?;
        for n in &parts.nodes {
            claim(&n.id)?;
        }
        for f in &parts.sequence_flows {
            claim(&f.id)?;
        }
        for o in &parts.data_objects {
            claim(&o.id)?;
        }
        for s in &parts.data_stores {
            claim(&s.id)?;
        }
        for a in &parts.data_associations {
            claim(&a.id)?;
        }
        for l in &parts.lanes {
            claim(&l.id)?;
        }

        let node_index: HashMap<String, usize> =
            parts.nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let mut outgoing = vec![Vec::new(); parts.nodes.len()];
        let mut incoming = vec![Vec::new(); parts.nodes.len()];
        let mut edges: HashMap<(usize, usize), &str> = HashMap::new();
        for (fi, f) in parts.sequence_flows.iter().enumerate() {
            let resolve = |id: &str| {
                node_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| ModelError::UnknownReference { owner: f.id.clone(), target: id.to_string() })
            };
            let s = resolve(&f.source)?;
            let t = resolve(&f.target)?;
            if s == t {
                return Err(ModelError::SelfLoop(f.id.clone()));
            }
            if let Some(other) = edges.insert((s, t), &f.id) {
                return Err(ModelError::MultiEdge(other.to_string(), f.id.clone()));
            }
            outgoing[s].push(fi);
            incoming[t].push(fi);
        }

        for a in &parts.data_associations {
            let node = node_index
                .get(&a.node)
                .ok_or_else(|| ModelError::UnknownReference { owner: a.id.clone(), target: a.node.clone() })?;
            if parts.nodes[*node].kind.gateway_kind().is_some() {
                return Err(ModelError::AssociationOnGateway(a.id.clone()));
            }
            let known = parts.data_objects.iter().any(|o| o.id == a.artifact)
                || parts.data_stores.iter().any(|s| s.id == a.artifact);
            if !known {
                return Err(ModelError::UnknownReference { owner: a.id.clone(), target: a.artifact.clone() });
            }
        }
        for o in &parts.data_objects {
            if o.label.base_name.is_empty() {
                return Err(ModelError::EmptyDataObject(o.id.clone()));
            }
        }
        for l in &parts.lanes {
            for m in &l.members {
                if !node_index.contains_key(m) {
                    return Err(ModelError::UnknownReference { owner: l.id.clone(), target: m.clone() });
                }
            }
        }

        Ok(ProcessModel { parts, node_index, outgoing, incoming })
    }

    pub fn id(&self) -> &str {
        &self.parts.id
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.parts.nodes
    }

    pub fn sequence_flows(&self) -> &[SequenceFlow] {
        &self.parts.sequence_flows
    }

    pub fn data_objects(&self) -> &[DataObject] {
        &self.parts.data_objects
    }

    pub fn data_stores(&self) -> &[DataStore] {
        &self.parts.data_stores
    }

    pub fn data_associations(&self) -> &[DataAssociation] {
        &self.parts.data_associations
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.parts.lanes
    }

    pub fn parts(&self) -> &ProcessParts {
        &self.parts
    }

    pub fn into_parts(self) -> ProcessParts {
        self.parts
    }

    pub fn node(&self, id: &str) -> Option<&FlowNode> {
        self.node_index.get(id).map(|&i| &self.parts.nodes[i])
    }

    pub fn flow(&self, id: &str) -> Option<&SequenceFlow> {
        self.parts.sequence_flows.iter().find(|f| f.id == id)
    }

    /// Outgoing sequence flows of `node` in document order.
    pub fn outgoing(&self, node: &str) -> impl Iterator<Item = &SequenceFlow> + '_ {
        let idx = self.node_index.get(node).copied();
        idx.into_iter().flat_map(move |i| self.outgoing[i].iter()).map(move |&fi| &self.parts.sequence_flows[fi])
    }

    pub fn incoming(&self, node: &str) -> impl Iterator<Item = &SequenceFlow> + '_ {
        let idx = self.node_index.get(node).copied();
        idx.into_iter().flat_map(move |i| self.incoming[i].iter()).map(move |&fi| &self.parts.sequence_flows[fi])
    }

    pub fn out_degree(&self, node: &str) -> usize {
        self.node_index.get(node).map_or(0, |&i| self.outgoing[i].len())
    }

    pub fn in_degree(&self, node: &str) -> usize {
        self.node_index.get(node).map_or(0, |&i| self.incoming[i].len())
    }

    pub fn is_split(&self, node: &str) -> bool {
        self.node(node).is_some_and(|n| n.kind.gateway_kind().is_some()) && self.out_degree(node) > 1
    }

    pub fn is_join(&self, node: &str) -> bool {
        self.node(node).is_some_and(|n| n.kind.gateway_kind().is_some()) && self.in_degree(node) > 1
    }

    pub fn start_events(&self) -> impl Iterator<Item = &FlowNode> + '_ {
        self.parts.nodes.iter().filter(|n| matches!(n.kind, NodeKind::StartEvent { .. }))
    }

    pub fn end_events(&self) -> impl Iterator<Item = &FlowNode> + '_ {
        self.parts.nodes.iter().filter(|n| matches!(n.kind, NodeKind::EndEvent))
    }

    pub fn tasks(&self) -> impl Iterator<Item = &FlowNode> + '_ {
        self.parts.nodes.iter().filter(|n| n.kind.is_task())
    }

    pub fn artifact(&self, id: &str) -> Option<Artifact<'_>> {
        if let Some(o) = self.parts.data_objects.iter().find(|o| o.id == id) {
            return Some(Artifact::Object(o));
        }
        self.parts.data_stores.iter().find(|s| s.id == id).map(Artifact::Store)
    }

    /// Every element id declared by this process, the process id included.
    pub fn element_ids(&self) -> impl Iterator<Item = &str> + '_ {
        let p = &self.parts;
        std::iter::once(p.id.as_str())
            .chain(p.nodes.iter().map(|n| n.id.as_str()))
            .chain(p.sequence_flows.iter().map(|f| f.id.as_str()))
            .chain(p.data_objects.iter().map(|o| o.id.as_str()))
            .chain(p.data_stores.iter().map(|s| s.id.as_str()))
            .chain(p.data_associations.iter().map(|a| a.id.as_str()))
            .chain(p.lanes.iter().map(|l| l.id.as_str()))
    }

    /// True when the sequence-flow graph contains a directed cycle.
    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm; leftovers mean a cycle.
        let n = self.parts.nodes.len();
        let mut indeg: Vec<usize> = self.incoming.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut removed = 0;
        while let Some(i) = ready.pop() {
            removed += 1;
            for &fi in &self.outgoing[i] {
                let t = self.node_index[&self.parts.sequence_flows[fi].target];
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        removed != n
    }

    fn canonical(&self) -> ProcessParts {
        let mut p = self.parts.clone();
        p.nodes.sort();
        p.sequence_flows.sort();
        p.data_objects.sort();
        p.data_stores.sort();
        p.data_associations.sort();
        for l in &mut p.lanes {
            l.members.sort();
        }
        p.lanes.sort();
        p
    }
}

impl PartialEq for ProcessModel {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.id == b.id
            && a.name == b.name
            && a.nodes == b.nodes
            && a.sequence_flows == b.sequence_flows
            && a.data_objects == b.data_objects
            && a.data_stores == b.data_stores
            && a.data_associations == b.data_associations
            && a.lanes == b.lanes
    }
}

impl Eq for ProcessModel {}

/// A participant. Without a process it is a black box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    /// Participant id; `None` for a bare process outside any collaboration.
    pub id: Option<String>,
    pub name: String,
    pub process: Option<ProcessModel>,
}

impl Pool {
    pub fn is_black_box(&self) -> bool {
        self.process.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MessageFlow {
    pub id: String,
    pub label: Option<String>,
    pub source: String,
    pub target: String,
}

/// A set of pools exchanging messages.
#[derive(Debug, Clone)]
pub struct Collaboration {
    id: Option<String>,
    pools: Vec<Pool>,
    message_flows: Vec<MessageFlow>,
}

impl Collaboration {
    pub fn new(id: Option<String>, pools: Vec<Pool>, message_flows: Vec<MessageFlow>) -> Result<Self, ModelError> {
        // Element id -> owning pool index.
        let mut owner: BTreeMap<String, usize> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        if let Some(id) = &id {
            seen.insert(id.clone());
        }
        for (pi, pool) in pools.iter().enumerate() {
            let participant_ok = match (&id, &pool.id) {
                (None, Some(_)) => false,
                (_, None) => pool.process.is_some(),
                _ => true,
            };
            if !participant_ok {
                return Err(ModelError::DetachedPool(pool.name.clone()));
            }
            if let Some(pid) = &pool.id {
                if !seen.insert(pid.clone()) {
                    return Err(ModelError::DuplicateId(pid.clone()));
                }
                owner.insert(pid.clone(), pi);
            }
            if let Some(p) = &pool.process {
                for eid in p.element_ids() {
                    if !seen.insert(eid.to_string()) {
                        return Err(ModelError::DuplicateId(eid.to_string()));
                    }
                    owner.insert(eid.to_string(), pi);
                }
            }
        }
        let mut store_names = BTreeSet::new();
        for p in pools.iter().filter_map(|p| p.process.as_ref()) {
            for s in p.data_stores() {
                if !store_names.insert(s.name.clone()) {
                    return Err(ModelError::DuplicateStoreName(s.name.clone()));
                }
            }
        }
        for m in &message_flows {
            if id.is_none() {
                return Err(ModelError::MessageFlowOutsideCollaboration(m.id.clone()));
            }
            if !seen.insert(m.id.clone()) {
                return Err(ModelError::DuplicateId(m.id.clone()));
            }
            let lookup = |target: &str| {
                owner
                    .get(target)
                    .copied()
                    .ok_or_else(|| ModelError::UnknownReference { owner: m.id.clone(), target: target.to_string() })
            };
            if lookup(&m.source)? == lookup(&m.target)? {
                return Err(ModelError::IntraPoolMessageFlow(m.id.clone()));
            }
        }
        Ok(Collaboration { id, pools, message_flows })
    }

    /// Wraps a single process with no participant around it.
    pub fn from_process(process: ProcessModel) -> Self {
        let name = process.name().to_string();
        Collaboration { id: None, pools: vec![Pool { id: None, name, process: Some(process) }], message_flows: vec![] }
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn pools(&self) -> &[Pool] {
        &self.pools
    }

    pub fn message_flows(&self) -> &[MessageFlow] {
        &self.message_flows
    }

    pub fn processes(&self) -> impl Iterator<Item = &ProcessModel> + '_ {
        self.pools.iter().filter_map(|p| p.process.as_ref())
    }

    pub fn process(&self, id: &str) -> Option<&ProcessModel> {
        self.processes().find(|p| p.id() == id)
    }
}

impl PartialEq for Collaboration {
    fn eq(&self, other: &Self) -> bool {
        fn sorted_pools(c: &Collaboration) -> Vec<&Pool> {
            let mut v: Vec<&Pool> = c.pools.iter().collect();
            v.sort_by(|a, b| {
                (&a.id, &a.name, a.process.as_ref().map(|p| p.id())).cmp(&(
                    &b.id,
                    &b.name,
                    b.process.as_ref().map(|p| p.id()),
                ))
            });
            v
        }
        let mut ma = self.message_flows.clone();
        let mut mb = other.message_flows.clone();
        ma.sort();
        mb.sort();
        self.id == other.id && ma == mb && sorted_pools(self) == sorted_pools(other)
    }
}

impl Eq for Collaboration {}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> ProcessParts {
        ProcessParts {
            id: "P".into(),
            name: "Line".into(),
            nodes: vec![FlowNode::start("s", "Begin"), FlowNode::task("t", "Do Work"), FlowNode::end("e", "Done")],
            sequence_flows: vec![SequenceFlow::new("f1", "s", "t"), SequenceFlow::new("f2", "t", "e")],
            ..Default::default()
        }
    }

    #[test]
    fn data_label_parts() {
        let l = DataLabel::parse("Field Geo-Data (Format 1) [Updated]");
        assert_eq!(l.base_name, "Field Geo-Data");
        assert_eq!(l.format.as_deref(), Some("Format 1"));
        assert_eq!(l.state.as_deref(), Some("Updated"));
        assert_eq!(l.to_string(), "Field Geo-Data (Format 1) [Updated]");

        let l = DataLabel::parse("Harvest Yield Map");
        assert_eq!((l.base_name.as_str(), l.format.as_ref(), l.state.as_ref()), ("Harvest Yield Map", None, None));

        let l = DataLabel::parse("Seed Application Map (Target)");
        assert_eq!(l.format.as_deref(), Some("Target"));

        let l = DataLabel::parse("(Format 1)");
        assert_eq!(l.base_name, "(Format 1)");
        assert_eq!(l.format, None);
    }

    #[test]
    fn data_label_from_parts_matches_parse() {
        let l = DataLabel::from_parts("Field Geo-Data", Some("Format 2"), None);
        assert_eq!(l, DataLabel::parse("Field Geo-Data (Format 2)"));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let mut p = line();
        p.sequence_flows[1].id = "t".into();
        assert_eq!(ProcessModel::new(p).unwrap_err(), ModelError::DuplicateId("t".into()));
    }

    #[test]
    fn rejects_self_loop_and_multi_edge() {
        let mut p = line();
        p.sequence_flows.push(SequenceFlow::new("f3", "t", "t"));
        assert_eq!(ProcessModel::new(p).unwrap_err(), ModelError::SelfLoop("f3".into()));

        let mut p = line();
        p.sequence_flows.push(SequenceFlow::new("f3", "t", "e"));
        assert!(matches!(ProcessModel::new(p).unwrap_err(), ModelError::MultiEdge(..)));
    }

    #[test]
    fn rejects_dangling_flow() {
        let mut p = line();
        p.sequence_flows.push(SequenceFlow::new("f3", "t", "nowhere"));
        assert!(matches!(ProcessModel::new(p).unwrap_err(), ModelError::UnknownReference { .. }));
    }

    #[test]
    fn association_must_not_target_gateway() {
        let mut p = line();
        p.nodes.push(FlowNode::gateway("g", "", GatewayKind::Exclusive));
        p.data_stores.push(DataStore::new("db", "DB"));
        p.data_associations.push(DataAssociation::read("a", "g", "db"));
        assert_eq!(ProcessModel::new(p).unwrap_err(), ModelError::AssociationOnGateway("a".into()));
    }

    #[test]
    fn equality_ignores_element_order() {
        let a = ProcessModel::new(line()).unwrap();
        let mut parts = line();
        parts.nodes.reverse();
        parts.sequence_flows.reverse();
        let b = ProcessModel::new(parts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degrees_and_cycle() {
        let m = ProcessModel::new(line()).unwrap();
        assert_eq!(m.out_degree("s"), 1);
        assert_eq!(m.in_degree("s"), 0);
        assert!(!m.has_cycle());

        let mut p = line();
        p.nodes.push(FlowNode::task("u", "Redo Work"));
        p.sequence_flows.push(SequenceFlow::new("f3", "t", "u"));
        p.sequence_flows.push(SequenceFlow::new("f4", "u", "t"));
        assert!(ProcessModel::new(p).unwrap().has_cycle());
    }

    #[test]
    fn message_flow_must_cross_pools() {
        let m = ProcessModel::new(line()).unwrap();
        let pools = vec![
            Pool { id: Some("A".into()), name: "A".into(), process: Some(m) },
            Pool { id: Some("B".into()), name: "B".into(), process: None },
        ];
        let ok = Collaboration::new(
            Some("C".into()),
            pools.clone(),
            vec![MessageFlow { id: "m1".into(), label: None, source: "t".into(), target: "B".into() }],
        );
        assert!(ok.is_ok());
        let bad = Collaboration::new(
            Some("C".into()),
            pools,
            vec![MessageFlow { id: "m1".into(), label: None, source: "t".into(), target: "s".into() }],
        );
        assert_eq!(bad.unwrap_err(), ModelError::IntraPoolMessageFlow("m1".into()));
    }
}
