//! Random block-structured models for property tests and benchmarks.

use rand::Rng;

use crate::model::{
    Collaboration, DataAssociation, DataObject, DataStore, EventTrigger, FlowNode, GatewayKind, Lane, MessageFlow,
    NodeKind, Pool, ProcessModel, ProcessParts, SequenceFlow, TaskMarker,
};
use crate::scenario::{Duration, FlowRef, Probability, Scenario};

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_splits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 20, max_splits: 4 }
    }
}

enum Shape {
    Task,
    Seq(Vec<Shape>),
    Xor(Vec<Shape>),
    And(Vec<Shape>),
}

struct Budget {
    nodes: usize,
    splits: usize,
}

fn shape<R: Rng>(rng: &mut R, b: &mut Budget, depth: usize) -> Shape {
    // A split costs two gateways plus at least one task per non-empty branch.
    let can_split = b.splits > 0 && b.nodes >= 4 && depth < 4;
    match rng.gen_range(0..10) {
        0..=3 if can_split => {
            b.splits -= 1;
            b.nodes -= 2;
            let parallel = rng.gen_bool(0.3);
            let n = rng.gen_range(2..=3);
            let mut branches = Vec::new();
            let mut empty_used = false;
            for i in 0..n {
                if !parallel && !empty_used && i > 0 && rng.gen_bool(0.3) {
                    empty_used = true;
                    branches.push(Shape::Seq(vec![]));
                } else if b.nodes > 0 {
                    branches.push(shape(rng, b, depth + 1));
                }
            }
            if branches.len() < 2 || branches.iter().filter(|s| matches!(s, Shape::Seq(v) if v.is_empty())).count() > 1
            {
                // Out of room: fall back to a single task in the nodes we reserved.
                b.nodes += 1;
                return Shape::Task;
            }
            if parallel {
                Shape::And(branches)
            } else {
                Shape::Xor(branches)
            }
        }
        4..=5 if b.nodes >= 2 => {
            let n = rng.gen_range(2..=3);
            let mut items = Vec::new();
            for _ in 0..n {
                if b.nodes == 0 {
                    break;
                }
                items.push(shape(rng, b, depth + 1));
            }
            Shape::Seq(items)
        }
        _ => {
            b.nodes = b.nodes.saturating_sub(1);
            Shape::Task
        }
    }
}

struct Builder {
    nodes: Vec<FlowNode>,
    flows: Vec<SequenceFlow>,
    next_node: usize,
    next_flow: usize,
    conditions: usize,
}

impl Builder {
    fn node(&mut self, kind: NodeKind, prefix: &str) -> String {
        self.next_node += 1;
        let id = format!("n{:03}", self.next_node);
        let label = match kind {
            NodeKind::Task { .. } => format!("{prefix} Item {}", self.next_node),
            NodeKind::Gateway { kind: GatewayKind::Exclusive } => format!("Decision {}", self.next_node),
            NodeKind::Gateway { .. } => String::new(),
            _ => format!("Event {}", self.next_node),
        };
        self.nodes.push(FlowNode::new(id.clone(), label, kind));
        id
    }

    fn flow(&mut self, from: &str, to: &str, condition: Option<String>) {
        self.next_flow += 1;
        let mut f = SequenceFlow::new(format!("f{:03}", self.next_flow), from, to);
        f.condition = condition;
        self.flows.push(f);
    }

    fn build<R: Rng>(&mut self, rng: &mut R, s: &Shape, from: &str) -> String {
        match s {
            Shape::Task => {
                let verb = ["Check", "Plan", "Review", "Send", "Record"][rng.gen_range(0..5)];
                let t = self.node(NodeKind::Task { marker: TaskMarker::Generic }, verb);
                self.flow(from, &t, None);
                t
            }
            Shape::Seq(items) => {
                let mut at = from.to_string();
                for i in items {
                    at = self.build(rng, i, &at);
                }
                at
            }
            Shape::Xor(branches) | Shape::And(branches) => {
                let kind = if matches!(s, Shape::Xor(_)) { GatewayKind::Exclusive } else { GatewayKind::Parallel };
                let split = self.node(NodeKind::Gateway { kind }, "");
                self.flow(from, &split, None);
                let mut ends = Vec::new();
                let mut first_flows = Vec::new();
                for br in branches {
                    let before = self.flows.len();
                    let end = self.build(rng, br, &split);
                    first_flows.push(before);
                    ends.push(end);
                }
                let join = self.node(NodeKind::Gateway { kind }, "");
                for end in &ends {
                    if kind == GatewayKind::Exclusive && end == &split {
                        self.conditions += 1;
                        self.flow(end, &join, Some(format!("case {}", self.conditions)));
                    } else {
                        self.flow(end, &join, None);
                    }
                }
                if kind == GatewayKind::Exclusive {
                    for idx in first_flows {
                        if let Some(f) = self.flows.get_mut(idx).filter(|f| f.source == split) {
                            if f.condition.is_none() {
                                self.conditions += 1;
                                f.condition = Some(format!("case {}", self.conditions));
                            }
                        }
                    }
                }
                join
            }
        }
    }
}

/// A random block-structured acyclic process within `limits`.
pub fn random_process<R: Rng>(rng: &mut R, limits: Limits) -> ProcessModel {
    // Start and end events take two of the nodes.
    let mut budget = Budget { nodes: limits.max_nodes.saturating_sub(2).max(1), splits: limits.max_splits };
    let mut items = Vec::new();
    while budget.nodes > 0 && (items.is_empty() || rng.gen_bool(0.6)) {
        items.push(shape(rng, &mut budget, 0));
    }
    let root = Shape::Seq(items);

    let mut b = Builder { nodes: Vec::new(), flows: Vec::new(), next_node: 0, next_flow: 0, conditions: 0 };
    let start = b.node(NodeKind::StartEvent { trigger: EventTrigger::None }, "");
    let last = b.build(rng, &root, &start);
    let end = b.node(NodeKind::EndEvent, "");
    b.flow(&last, &end, None);

    ProcessModel::new(ProcessParts {
        id: "Process_R".into(),
        name: "Random".into(),
        nodes: b.nodes,
        sequence_flows: b.flows,
        ..Default::default()
    })
    .expect("generated model is well-formed")
}

/// Random durations for every task and random exact branch probabilities
/// for every exclusive split, some of them zero.
pub fn random_scenario<R: Rng>(rng: &mut R, model: &ProcessModel) -> Scenario {
    let mut s = Scenario::new("random");
    for t in model.tasks() {
        s = s.with_duration(t.label.clone(), Duration::from_secs(rng.gen_range(0..3600)));
    }
    for g in model.nodes().iter().filter(|n| model.is_split(&n.id)) {
        if g.kind.gateway_kind() != Some(GatewayKind::Exclusive) {
            continue;
        }
        let outs: Vec<&SequenceFlow> = model.outgoing(&g.id).collect();
        let mut weights: Vec<i64> = outs.iter().map(|_| rng.gen_range(0..5)).collect();
        if weights.iter().all(|&w| w == 0) {
            weights[0] = 1;
        }
        let total: i64 = weights.iter().sum();
        for (f, w) in outs.iter().zip(weights) {
            s = s.with_probability(FlowRef::Flow(f.id.clone()), Probability::ratio(w, total).unwrap());
        }
    }
    s
}

const AWKWARD: [&str; 6] = ["", " & ", " <draft>", " \"quoted\"", " l'été", " \u{1F33E}"];

/// A random collaboration exercising the whole XML subset: markers,
/// triggers, data, lanes, black-box pools and message flows.
pub fn random_collaboration<R: Rng>(rng: &mut R, limits: Limits) -> Collaboration {
    let mut parts = random_process(rng, limits).into_parts();

    for n in parts.nodes.iter_mut() {
        n.label.push_str(AWKWARD[rng.gen_range(0..AWKWARD.len())]);
        match &mut n.kind {
            NodeKind::Task { marker } => {
                *marker = [TaskMarker::Generic, TaskMarker::User, TaskMarker::Manual][rng.gen_range(0..3)]
            }
            NodeKind::StartEvent { trigger } if rng.gen_bool(0.3) => *trigger = EventTrigger::Message,
            _ => {}
        }
    }

    let stores = rng.gen_range(0..3);
    for i in 0..stores {
        parts.data_stores.push(DataStore::new(format!("s{i}"), format!("Store {i}")));
    }
    let tasks: Vec<String> = parts.nodes.iter().filter(|n| n.kind.is_task()).map(|n| n.id.clone()).collect();
    let objects = rng.gen_range(0..4);
    let mut assoc = 0;
    for i in 0..objects {
        let fmt = ["", " (Format A)", " (Format B)"][rng.gen_range(0..3)];
        let state = ["", " [Draft]"][rng.gen_range(0..2)];
        let mut o = DataObject::new(format!("d{i}"), &format!("Record {i}{fmt}{state}"));
        if rng.gen_bool(0.5) {
            o = o.with_object_ref(format!("do{i}"));
        }
        parts.data_objects.push(o);
        if let Some(t) = tasks.get(rng.gen_range(0..tasks.len().max(1))) {
            assoc += 1;
            let id = format!("a{assoc}");
            parts.data_associations.push(if rng.gen_bool(0.5) {
                DataAssociation::read(id, t.clone(), format!("d{i}"))
            } else {
                DataAssociation::write(id, t.clone(), format!("d{i}"))
            });
            if stores > 0 {
                assoc += 1;
                let s = format!("s{}", rng.gen_range(0..stores));
                parts.data_associations.push(DataAssociation::write(format!("a{assoc}"), t.clone(), s));
            }
        }
    }
    if rng.gen_bool(0.5) {
        let members = parts.nodes.iter().filter(|_| rng.gen_bool(0.7)).map(|n| n.id.clone()).collect();
        parts.lanes.push(Lane { id: "lane1".into(), name: "Clerk".into(), members });
    }

    let process = ProcessModel::new(parts).expect("decorations keep the model valid");
    if rng.gen_bool(0.4) {
        return Collaboration::from_process(process);
    }
    let mut pools = vec![Pool { id: Some("pool_main".into()), name: "Main".into(), process: Some(process.clone()) }];
    let mut flows = Vec::new();
    for k in 0..rng.gen_range(0..3) {
        let pid = format!("pool_ext{k}");
        if let Some(t) = tasks.get(rng.gen_range(0..tasks.len().max(1))) {
            let label = rng.gen_bool(0.5).then(|| format!("Message {k}"));
            flows.push(MessageFlow { id: format!("m{k}"), label, source: t.clone(), target: pid.clone() });
        }
        pools.push(Pool { id: Some(pid), name: format!("Partner {k}"), process: None });
    }
    Collaboration::new(Some("collab".into()), pools, flows).expect("pools are distinct")
}
