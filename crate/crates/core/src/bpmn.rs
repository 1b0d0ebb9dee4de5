//! Reading and writing the supported BPMN 2.0 XML subset.
//!
//! Diagram interchange and every other unsupported element is skipped on
//! parse (and reported in [`ParseReport::ignored`]); it is never written.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use quick_xml::events::Event;
use quick_xml::name::ResolveResult;
use quick_xml::NsReader;
use thiserror::Error;

use crate::model::{
    AccessDirection, Collaboration, DataAssociation, DataLabel, DataObject, DataStore, EventTrigger, FlowNode,
    GatewayKind, Lane, MessageFlow, ModelError, NodeKind, Pool, ProcessModel, ProcessParts, SequenceFlow, TaskMarker,
};

pub const BPMN_NS: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpmnError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("invalid BPMN: {0}")]
    Schema(String),
    #[error("`{element}` refers to unknown element `{reference}`")]
    DanglingRef { element: String, reference: String },
}

impl From<ModelError> for BpmnError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownReference { owner, target } => {
                BpmnError::DanglingRef { element: owner, reference: target }
            }
            other => BpmnError::Schema(other.to_string()),
        }
    }
}

/// An element that was recognised as XML but is outside the supported subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgnoredElement {
    pub name: String,
    pub id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseReport {
    pub model: Collaboration,
    pub ignored: Vec<IgnoredElement>,
}

#[derive(Debug)]
struct Elem {
    in_bpmn: bool,
    local: String,
    qname: String,
    attrs: Vec<(String, String)>,
    children: Vec<Elem>,
    text: String,
}

impl Elem {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<String, BpmnError> {
        self.attr(key).map(str::to_string).ok_or_else(|| {
            let id = self.attr("id").map(|i| format!(" `{i}`")).unwrap_or_default();
            BpmnError::Schema(format!("<{}>{id} is missing required attribute `{key}`", self.local))
        })
    }

    fn is(&self, local: &str) -> bool {
        self.in_bpmn && self.local == local
    }

    fn display_name(&self) -> String {
        if self.in_bpmn {
            self.local.clone()
        } else {
            self.qname.clone()
        }
    }
}

fn read_tree(input: &[u8]) -> Result<Elem, BpmnError> {
    let xml = |e: &dyn std::fmt::Display| BpmnError::Xml(e.to_string());
    let mut reader = NsReader::from_reader(input);
    let mut stack: Vec<Elem> = Vec::new();
    let mut root: Option<Elem> = None;

    loop {
        let (ns, event) = reader.read_resolved_event().map_err(|e| xml(&e))?;
        let in_bpmn = matches!(ns, ResolveResult::Bound(n) if n.as_ref() == BPMN_NS.as_bytes());
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let mut attrs = Vec::new();
                for a in e.attributes() {
                    let a = a.map_err(|e| xml(&e))?;
                    if a.key.prefix().is_some() || a.key.as_ref() == b"xmlns" {
                        continue;
                    }
                    let key = String::from_utf8(a.key.as_ref().to_vec()).map_err(|e| xml(&e))?;
                    let value = a.unescape_value().map_err(|e| xml(&e))?.into_owned();
                    attrs.push((key, value));
                }
                let elem = Elem {
                    in_bpmn,
                    local: String::from_utf8(e.local_name().as_ref().to_vec()).map_err(|e| xml(&e))?,
                    qname: String::from_utf8(e.name().as_ref().to_vec()).map_err(|e| xml(&e))?,
                    attrs,
                    children: Vec::new(),
                    text: String::new(),
                };
                if stack.is_empty() && root.is_some() {
                    return Err(BpmnError::Xml("more than one root element".into()));
                }
                if matches!(event, Event::Start(_)) {
                    if stack.len() >= MAX_DEPTH {
                        return Err(BpmnError::Xml(format!("nesting deeper than {MAX_DEPTH} levels")));
                    }
                    stack.push(elem);
                } else {
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(elem),
                        None => root = Some(elem),
                    }
                }
            }
            Event::End(_) => {
                let done = stack.pop().ok_or_else(|| BpmnError::Xml("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(done),
                    None => root = Some(done),
                }
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| xml(&e))?;
                match stack.last_mut() {
                    Some(cur) => cur.text.push_str(&s),
                    None if s.trim().is_empty() => {}
                    None => return Err(BpmnError::Xml("text outside the root element".into())),
                }
            }
            Event::CData(c) => {
                let s = std::str::from_utf8(&c).map_err(|e| xml(&e))?;
                match stack.last_mut() {
                    Some(cur) => cur.text.push_str(s),
                    None => return Err(BpmnError::Xml("CDATA outside the root element".into())),
                }
            }
            Event::Eof => break,
            Event::Decl(_) | Event::PI(_) | Event::Comment(_) | Event::DocType(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(BpmnError::Xml(format!("unclosed element <{}>", stack.last().unwrap().qname)));
    }
    root.ok_or_else(|| BpmnError::Xml("document has no root element".into()))
}

/// Participants as (id, name, processRef), plus the message flows.
type CollabParts = (String, Vec<(String, String, Option<String>)>, Vec<MessageFlow>);

struct Interpreter {
    ignored: Vec<IgnoredElement>,
}

impl Interpreter {
    fn ignore(&mut self, e: &Elem) {
        self.ignored.push(IgnoredElement { name: e.display_name(), id: e.attr("id").map(str::to_string) });
    }

    fn definitions(&mut self, root: &Elem) -> Result<Collaboration, BpmnError> {
        if !root.is("definitions") {
            return Err(BpmnError::Schema(format!("root element is <{}>, expected BPMN <definitions>", root.qname)));
        }
        let mut collab: Option<CollabParts> = None;
        let mut processes: Vec<ProcessModel> = Vec::new();
        for child in &root.children {
            if child.is("collaboration") {
                if collab.is_some() {
                    return Err(BpmnError::Schema("more than one <collaboration>".into()));
                }
                collab = Some(self.collaboration(child)?);
            } else if child.is("process") {
                processes.push(self.process(child)?);
            } else {
                self.ignore(child);
            }
        }

        let mut by_id: BTreeMap<String, ProcessModel> =
            processes.iter().map(|p| (p.id().to_string(), p.clone())).collect();
        if by_id.len() != processes.len() {
            return Err(BpmnError::Schema("duplicate process id".into()));
        }
        let mut pools = Vec::new();
        let (cid, flows) = match collab {
            Some((cid, participants, flows)) => {
                for (pid, name, pref) in participants {
                    let process = match pref {
                        Some(r) => Some(
                            by_id
                                .remove(&r)
                                .ok_or_else(|| BpmnError::DanglingRef { element: pid.clone(), reference: r.clone() })?,
                        ),
                        None => None,
                    };
                    pools.push(Pool { id: Some(pid), name, process });
                }
                (Some(cid), flows)
            }
            None => (None, Vec::new()),
        };
        for p in processes {
            if let Some(p) = by_id.remove(p.id()) {
                pools.push(Pool { id: None, name: p.name().to_string(), process: Some(p) });
            }
        }
        Ok(Collaboration::new(cid, pools, flows)?)
    }

    fn collaboration(&mut self, e: &Elem) -> Result<CollabParts, BpmnError> {
        let id = e.required("id")?;
        let mut participants = Vec::new();
        let mut flows = Vec::new();
        for c in &e.children {
            if c.is("participant") {
                participants.push((
                    c.required("id")?,
                    c.attr("name").unwrap_or("").to_string(),
                    c.attr("processRef").map(str::to_string),
                ));
                for inner in &c.children {
                    self.ignore(inner);
                }
            } else if c.is("messageFlow") {
                flows.push(MessageFlow {
                    id: c.required("id")?,
                    label: c.attr("name").map(str::to_string),
                    source: c.required("sourceRef")?,
                    target: c.required("targetRef")?,
                });
                for inner in &c.children {
                    self.ignore(inner);
                }
            } else {
                self.ignore(c);
            }
        }
        Ok((id, participants, flows))
    }

    fn process(&mut self, e: &Elem) -> Result<ProcessModel, BpmnError> {
        let mut parts = ProcessParts {
            id: e.required("id")?,
            name: e.attr("name").unwrap_or("").to_string(),
            ..Default::default()
        };
        // dataObject definitions: id -> name
        let mut definitions: Vec<(String, String)> = Vec::new();
        let mut references: Vec<(String, Option<String>, String)> = Vec::new();

        for c in &e.children {
            if !c.in_bpmn {
                self.ignore(c);
                continue;
            }
            match c.local.as_str() {
                "laneSet" => self.lane_set(c, &mut parts.lanes)?,
                "sequenceFlow" => {
                    let mut f =
                        SequenceFlow::new(c.required("id")?, c.required("sourceRef")?, c.required("targetRef")?);
                    f.condition = c.attr("name").map(str::to_string);
                    parts.sequence_flows.push(f);
                    for inner in &c.children {
                        self.ignore(inner);
                    }
                }
                "dataObject" => {
                    definitions.push((c.required("id")?, c.attr("name").unwrap_or("").to_string()));
                    for inner in &c.children {
                        self.ignore(inner);
                    }
                }
                "dataObjectReference" => {
                    references.push((
                        c.required("id")?,
                        c.attr("dataObjectRef").map(str::to_string),
                        c.attr("name").unwrap_or("").to_string(),
                    ));
                    for inner in &c.children {
                        self.ignore(inner);
                    }
                }
                "dataStoreReference" => {
                    parts.data_stores.push(DataStore::new(c.required("id")?, c.required("name")?));
                    for inner in &c.children {
                        self.ignore(inner);
                    }
                }
                local => match node_kind(local) {
                    Some(kind) => self.flow_node(c, kind, &mut parts)?,
                    None => self.ignore(c),
                },
            }
        }

        let referenced: BTreeSet<&str> = references.iter().filter_map(|(_, r, _)| r.as_deref()).collect();
        for r in &referenced {
            if !definitions.iter().any(|(id, _)| id == r) {
                let owner = references.iter().find(|(_, rr, _)| rr.as_deref() == Some(*r)).unwrap().0.clone();
                return Err(BpmnError::DanglingRef { element: owner, reference: r.to_string() });
            }
        }
        for (id, name) in &definitions {
            if !referenced.contains(id.as_str()) {
                parts.data_objects.push(data_object(id, None, name)?);
            }
        }
        for (id, object_ref, name) in references {
            parts.data_objects.push(data_object(&id, object_ref, &name)?);
        }
        Ok(ProcessModel::new(parts)?)
    }

    fn lane_set(&mut self, e: &Elem, lanes: &mut Vec<Lane>) -> Result<(), BpmnError> {
        for lane in &e.children {
            if !lane.is("lane") {
                self.ignore(lane);
                continue;
            }
            let mut members = Vec::new();
            for r in &lane.children {
                if r.is("flowNodeRef") {
                    members.push(r.text.trim().to_string());
                } else {
                    self.ignore(r);
                }
            }
            lanes.push(Lane { id: lane.required("id")?, name: lane.attr("name").unwrap_or("").to_string(), members });
        }
        Ok(())
    }

    fn flow_node(&mut self, e: &Elem, mut kind: NodeKind, parts: &mut ProcessParts) -> Result<(), BpmnError> {
        let id = e.required("id")?;
        for c in &e.children {
            if !c.in_bpmn {
                self.ignore(c);
                continue;
            }
            match c.local.as_str() {
                "incoming" | "outgoing" => {}
                "messageEventDefinition" => match &mut kind {
                    NodeKind::StartEvent { trigger } | NodeKind::IntermediateCatchEvent { trigger } => {
                        *trigger = EventTrigger::Message
                    }
                    _ => self.ignore(c),
                },
                "dataInputAssociation" | "dataOutputAssociation" => {
                    let read = c.local == "dataInputAssociation";
                    let wanted = if read { "sourceRef" } else { "targetRef" };
                    let refs: Vec<&Elem> = c.children.iter().filter(|x| x.is(wanted)).collect();
                    for x in c.children.iter().filter(|x| !x.is("sourceRef") && !x.is("targetRef")) {
                        self.ignore(x);
                    }
                    let [r] = refs.as_slice() else {
                        return Err(BpmnError::Schema(format!("<{}> in `{id}` needs exactly one <{wanted}>", c.local)));
                    };
                    let artifact = r.text.trim().to_string();
                    let aid = c.required("id")?;
                    parts.data_associations.push(DataAssociation {
                        id: aid,
                        node: id.clone(),
                        artifact,
                        direction: if read { AccessDirection::Read } else { AccessDirection::Write },
                    });
                }
                _ => self.ignore(c),
            }
        }
        parts.nodes.push(FlowNode { id, label: e.attr("name").unwrap_or("").to_string(), kind });
        Ok(())
    }
}

fn data_object(id: &str, object_ref: Option<String>, name: &str) -> Result<DataObject, BpmnError> {
    if name.trim().is_empty() {
        return Err(BpmnError::Schema(format!("data object `{id}` has no name")));
    }
    Ok(DataObject { id: id.to_string(), object_ref, label: DataLabel::parse(name) })
}

fn node_kind(local: &str) -> Option<NodeKind> {
    Some(match local {
        "startEvent" => NodeKind::StartEvent { trigger: EventTrigger::None },
        "endEvent" => NodeKind::EndEvent,
        "intermediateCatchEvent" => NodeKind::IntermediateCatchEvent { trigger: EventTrigger::None },
        "task" => NodeKind::Task { marker: TaskMarker::Generic },
        "userTask" => NodeKind::Task { marker: TaskMarker::User },
        "manualTask" => NodeKind::Task { marker: TaskMarker::Manual },
        "exclusiveGateway" => NodeKind::Gateway { kind: GatewayKind::Exclusive },
        "parallelGateway" => NodeKind::Gateway { kind: GatewayKind::Parallel },
        "inclusiveGateway" => NodeKind::Gateway { kind: GatewayKind::Inclusive },
        _ => return None,
    })
}

fn element_name(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::StartEvent { .. } => "startEvent",
        NodeKind::EndEvent => "endEvent",
        NodeKind::IntermediateCatchEvent { .. } => "intermediateCatchEvent",
        NodeKind::Task { marker: TaskMarker::Generic } => "task",
        NodeKind::Task { marker: TaskMarker::User } => "userTask",
        NodeKind::Task { marker: TaskMarker::Manual } => "manualTask",
        NodeKind::Gateway { kind: GatewayKind::Exclusive } => "exclusiveGateway",
        NodeKind::Gateway { kind: GatewayKind::Parallel } => "parallelGateway",
        NodeKind::Gateway { kind: GatewayKind::Inclusive } => "inclusiveGateway",
    }
}

/// Parses a BPMN document into a collaboration.
pub fn parse(document: &[u8]) -> Result<ParseReport, BpmnError> {
    let root = read_tree(document)?;
    let mut it = Interpreter { ignored: Vec::new() };
    let model = it.definitions(&root)?;
    Ok(ParseReport { model, ignored: it.ignored })
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

struct Out {
    buf: String,
}

impl Out {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.buf.push_str("  ");
        }
        self.buf.push_str(text);
        self.buf.push('\n');
    }
}

fn attrs(pairs: &[(&str, Option<&str>)]) -> String {
    pairs.iter().filter_map(|(k, v)| v.map(|v| format!(" {k}=\"{}\"", esc(v)))).collect()
}

/// Writes the collaboration as BPMN XML. Elements are sorted by id, so the
/// output is deterministic and `serialize(parse(serialize(m))) == serialize(m)`.
pub fn serialize(model: &Collaboration) -> Vec<u8> {
    let mut o = Out { buf: String::new() };
    o.line(0, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    o.line(0, &format!(r#"<definitions xmlns="{BPMN_NS}" id="Definitions" targetNamespace="urn:bpmn-twin">"#));

    if let Some(cid) = model.id() {
        o.line(1, &format!("<collaboration{}>", attrs(&[("id", Some(cid))])));
        let mut pools: Vec<&Pool> = model.pools().iter().filter(|p| p.id.is_some()).collect();
        pools.sort_by(|a, b| a.id.cmp(&b.id));
        for p in pools {
            let pref = p.process.as_ref().map(|m| m.id());
            o.line(
                2,
                &format!(
                    "<participant{} />",
                    attrs(&[("id", p.id.as_deref()), ("name", Some(&p.name)), ("processRef", pref)])
                ),
            );
        }
        let mut flows: Vec<&MessageFlow> = model.message_flows().iter().collect();
        flows.sort_by(|a, b| a.id.cmp(&b.id));
        for m in flows {
            o.line(
                2,
                &format!(
                    "<messageFlow{} />",
                    attrs(&[
                        ("id", Some(&m.id)),
                        ("name", m.label.as_deref()),
                        ("sourceRef", Some(&m.source)),
                        ("targetRef", Some(&m.target)),
                    ])
                ),
            );
        }
        o.line(1, "</collaboration>");
    }

    let mut processes: Vec<&ProcessModel> = model.processes().collect();
    processes.sort_by(|a, b| a.id().cmp(b.id()));
    for p in processes {
        write_process(&mut o, p);
    }
    o.line(0, "</definitions>");
    o.buf.into_bytes()
}

fn write_process(o: &mut Out, p: &ProcessModel) {
    o.line(1, &format!("<process{} isExecutable=\"false\">", attrs(&[("id", Some(p.id())), ("name", Some(p.name()))])));

    if !p.lanes().is_empty() {
        o.line(2, "<laneSet>");
        let mut lanes: Vec<&Lane> = p.lanes().iter().collect();
        lanes.sort_by(|a, b| a.id.cmp(&b.id));
        for l in lanes {
            o.line(3, &format!("<lane{}>", attrs(&[("id", Some(&l.id)), ("name", Some(&l.name))])));
            let mut members = l.members.clone();
            members.sort();
            for m in members {
                o.line(4, &format!("<flowNodeRef>{}</flowNodeRef>", esc(&m)));
            }
            o.line(3, "</lane>");
        }
        o.line(2, "</laneSet>");
    }

    let mut assoc: HashMap<&str, Vec<&DataAssociation>> = HashMap::new();
    for a in p.data_associations() {
        assoc.entry(a.node.as_str()).or_default().push(a);
    }
    let mut nodes: Vec<&FlowNode> = p.nodes().iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    for n in nodes {
        let tag = element_name(n.kind);
        let head = format!("<{tag}{}", attrs(&[("id", Some(&n.id)), ("name", Some(&n.label))]));
        let message = matches!(
            n.kind,
            NodeKind::StartEvent { trigger: EventTrigger::Message }
                | NodeKind::IntermediateCatchEvent { trigger: EventTrigger::Message }
        );
        let mut links = assoc.remove(n.id.as_str()).unwrap_or_default();
        links.sort_by(|a, b| a.id.cmp(&b.id));
        if !message && links.is_empty() {
            o.line(2, &format!("{head} />"));
            continue;
        }
        o.line(2, &format!("{head}>"));
        for a in links {
            match a.direction {
                AccessDirection::Read => {
                    o.line(3, &format!("<dataInputAssociation{}>", attrs(&[("id", Some(&a.id))])));
                    o.line(4, &format!("<sourceRef>{}</sourceRef>", esc(&a.artifact)));
                    o.line(3, "</dataInputAssociation>");
                }
                AccessDirection::Write => {
                    o.line(3, &format!("<dataOutputAssociation{}>", attrs(&[("id", Some(&a.id))])));
                    o.line(4, &format!("<targetRef>{}</targetRef>", esc(&a.artifact)));
                    o.line(3, "</dataOutputAssociation>");
                }
            }
        }
        if message {
            o.line(3, "<messageEventDefinition />");
        }
        o.line(2, &format!("</{tag}>"));
    }

    let mut flows: Vec<&SequenceFlow> = p.sequence_flows().iter().collect();
    flows.sort_by(|a, b| a.id.cmp(&b.id));
    for f in flows {
        o.line(
            2,
            &format!(
                "<sequenceFlow{} />",
                attrs(&[
                    ("id", Some(&f.id)),
                    ("name", f.condition.as_deref()),
                    ("sourceRef", Some(&f.source)),
                    ("targetRef", Some(&f.target)),
                ])
            ),
        );
    }

    let mut objects: Vec<&DataObject> = p.data_objects().iter().collect();
    objects.sort_by(|a, b| a.id.cmp(&b.id));
    let defs: BTreeSet<&str> = objects.iter().filter_map(|d| d.object_ref.as_deref()).collect();
    for d in &defs {
        o.line(2, &format!("<dataObject{} />", attrs(&[("id", Some(d))])));
    }
    for d in objects.iter().filter(|d| d.object_ref.is_none()) {
        o.line(2, &format!("<dataObject{} />", attrs(&[("id", Some(&d.id)), ("name", Some(d.label.as_str()))])));
    }
    for d in objects.iter().filter(|d| d.object_ref.is_some()) {
        o.line(
            2,
            &format!(
                "<dataObjectReference{} />",
                attrs(&[
                    ("id", Some(&d.id)),
                    ("name", Some(d.label.as_str())),
                    ("dataObjectRef", d.object_ref.as_deref())
                ])
            ),
        );
    }
    let mut stores: Vec<&DataStore> = p.data_stores().iter().collect();
    stores.sort_by(|a, b| a.id.cmp(&b.id));
    for s in stores {
        o.line(2, &format!("<dataStoreReference{} />", attrs(&[("id", Some(&s.id)), ("name", Some(&s.name))])));
    }
    o.line(1, "</process>");
}
