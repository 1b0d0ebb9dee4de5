#![allow(dead_code)]

use std::collections::BTreeMap;

use bpmn_twin::corpus::{AS_IS_BPMN, TIMES_SCN, TO_BE_BPMN};

pub const TIMES: &str = TIMES_SCN;
use bpmn_twin::{
    bind, parse, parse_scenario, BoundScenario, FlowNode, GatewayKind, NodeKind, ProcessModel, ProcessParts,
    SequenceFlow,
};
use num_rational::BigRational;
use num_traits::Zero;

pub fn build(name: &str, nodes: Vec<FlowNode>, flows: Vec<SequenceFlow>) -> ProcessModel {
    ProcessModel::new(ProcessParts {
        id: "P".into(),
        name: name.into(),
        nodes,
        sequence_flows: flows,
        ..Default::default()
    })
    .unwrap()
}

pub fn chain(ids: &[(&str, &str)]) -> Vec<SequenceFlow> {
    ids.iter().enumerate().map(|(i, (s, t))| SequenceFlow::new(format!("f{:02}", i + 1), *s, *t)).collect()
}

pub fn fixture(doc: &str) -> ProcessModel {
    parse(doc.as_bytes()).unwrap().model.processes().next().unwrap().clone()
}

pub fn as_is() -> (ProcessModel, BoundScenario) {
    let m = fixture(AS_IS_BPMN);
    let b = bind(&parse_scenario(TIMES_SCN.as_bytes()).unwrap(), &m).unwrap();
    (m, b)
}

pub fn to_be() -> (ProcessModel, BoundScenario) {
    let m = fixture(TO_BE_BPMN);
    let b = bind(&parse_scenario(TIMES_SCN.as_bytes()).unwrap(), &m).unwrap();
    (m, b)
}

/// Brute-force reference: plays the token game directly on the graph and
/// returns every complete run with positive probability as (probability, seconds).
pub fn oracle_runs(model: &ProcessModel, bound: &BoundScenario) -> Vec<(BigRational, u64)> {
    fn explore(
        model: &ProcessModel,
        bound: &BoundScenario,
        mut tokens: Vec<String>,
        mut waiting: BTreeMap<String, usize>,
        p: BigRational,
        mut t: u64,
        out: &mut Vec<(BigRational, u64)>,
    ) {
        while !tokens.is_empty() {
            let at = tokens.remove(0);
            let node = model.node(&at).unwrap();
            let incoming = model.incoming(&at).count();
            if node.kind == (NodeKind::Gateway { kind: GatewayKind::Parallel }) && incoming > 1 {
                let w = waiting.entry(at.clone()).or_insert(0);
                *w += 1;
                if *w < incoming {
                    continue;
                }
                waiting.remove(&at);
            }
            t += bound.duration(&at).secs();
            let outs: Vec<&SequenceFlow> = model.outgoing(&at).collect();
            if node.kind == (NodeKind::Gateway { kind: GatewayKind::Exclusive }) && outs.len() > 1 {
                for f in outs {
                    let q = bound.probability(&at, &f.id).as_ratio().clone();
                    if q.is_zero() {
                        continue;
                    }
                    let mut next = vec![f.target.clone()];
                    next.extend(tokens.iter().cloned());
                    explore(model, bound, next, waiting.clone(), &p * q, t, out);
                }
                return;
            }
            let mut next: Vec<String> = outs.iter().map(|f| f.target.clone()).collect();
            next.append(&mut tokens);
            tokens = next;
        }
        assert!(waiting.is_empty(), "oracle run left tokens waiting");
        out.push((p, t));
    }
    let start = model.start_events().next().unwrap().id.clone();
    let mut out = Vec::new();
    explore(model, bound, vec![start], BTreeMap::new(), BigRational::from_integer(1.into()), 0, &mut out);
    out
}

pub fn oracle_expectation(model: &ProcessModel, bound: &BoundScenario) -> BigRational {
    oracle_runs(model, bound)
        .into_iter()
        .fold(BigRational::zero(), |acc, (p, t)| acc + p * BigRational::from_integer(t.into()))
}

/// Small models that between them use every sentence template.
pub fn template_models() -> Vec<ProcessModel> {
    let seq = build(
        "Order Handling",
        vec![
            FlowNode::start("s", "an order arrives"),
            FlowNode::task("a", "Check Order"),
            FlowNode::task("b", "Pack Goods"),
            FlowNode::task("c", "Ship Parcel"),
            FlowNode::end("e", "the parcel shipped"),
        ],
        chain(&[("s", "a"), ("a", "b"), ("b", "c"), ("c", "e")]),
    );

    let mut xor_flows =
        chain(&[("s", "a"), ("a", "g"), ("g", "b"), ("g", "c"), ("b", "j"), ("c", "j"), ("j", "d"), ("d", "e")]);
    xor_flows[2].condition = Some("available".into());
    xor_flows[3].condition = Some("missing".into());
    let xor = build(
        "Stock",
        vec![
            FlowNode::start("s", "a request comes in"),
            FlowNode::task("a", "Look Up Stock"),
            FlowNode::gateway("g", "item", GatewayKind::Exclusive),
            FlowNode::task("b", "Reserve Item"),
            FlowNode::task("c", "Order Item"),
            FlowNode::gateway("j", "", GatewayKind::Exclusive),
            FlowNode::task("d", "Notify Customer"),
            FlowNode::end("e", "the customer informed"),
        ],
        xor_flows,
    );

    let split = |kind: GatewayKind, name: &str, n: usize| {
        let mut nodes = vec![FlowNode::start("s", "work starts"), FlowNode::gateway("g", "", kind)];
        let mut pairs: Vec<(String, String)> = vec![("s".into(), "g".into())];
        for i in 0..n {
            nodes.push(FlowNode::task(format!("t{i}"), format!("Do Part {i}")));
            pairs.push(("g".into(), format!("t{i}")));
        }
        for i in 0..n {
            pairs.push((format!("t{i}"), "j".into()));
        }
        nodes.push(FlowNode::gateway("j", "", kind));
        nodes.push(FlowNode::task("z", "Close Case"));
        nodes.push(FlowNode::end("e", "the case closed"));
        pairs.push(("j".into(), "z".into()));
        pairs.push(("z".into(), "e".into()));
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        build(name, nodes, chain(&refs))
    };
    let inclusive = split(GatewayKind::Inclusive, "Options", 2);
    let parallel = split(GatewayKind::Parallel, "Fan Out", 3);

    let mut loop_flows = chain(&[("s", "j"), ("j", "a"), ("a", "g"), ("g", "j"), ("g", "b"), ("b", "e")]);
    loop_flows[3].condition = Some("again".into());
    loop_flows[4].condition = Some("done".into());
    let looped = build(
        "Rework",
        vec![
            FlowNode::start("s", "a draft exists"),
            FlowNode::gateway("j", "", GatewayKind::Exclusive),
            FlowNode::task("a", "Revise Draft"),
            FlowNode::gateway("g", "draft", GatewayKind::Exclusive),
            FlowNode::task("b", "Publish Draft"),
            FlowNode::end("e", "the draft published"),
        ],
        loop_flows,
    );

    vec![seq, xor, inclusive, parallel, looped]
}
