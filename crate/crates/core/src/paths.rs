//! Start-to-end execution path enumeration for acyclic models.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::{GatewayKind, NodeKind, ProcessModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("the sequence-flow graph contains a cycle")]
    CyclicModel,
    #[error("inclusive gateway `{0}` has no supported path semantics")]
    InclusiveGatewayUnsupported(String),
    #[error("the model has no start event")]
    NoStartEvent,
    #[error("execution from `{start}` stalls at `{node}`")]
    Deadlock { start: String, node: String },
}

/// One complete run from a start event to an end event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExecutionPath {
    /// Visited nodes, gateways included. Parallel branches appear one after
    /// the other in document order.
    pub nodes: Vec<String>,
    /// Chosen outgoing flow for each exclusive split on the path.
    pub branch_choices: BTreeMap<String, String>,
}

#[derive(Clone)]
struct Run {
    nodes: Vec<String>,
    choices: BTreeMap<String, String>,
    // Pending tokens, processed front first.
    tokens: Vec<String>,
    arrivals: HashMap<String, usize>,
}

/// Enumerates every path of an acyclic model, one start event at a time.
///
/// Exclusive splits fork the run; parallel splits hand a token to every
/// branch and the matching join fires once all of its incoming tokens are in.
pub fn enumerate_paths(model: &ProcessModel) -> Result<Vec<ExecutionPath>, PathError> {
    if model.has_cycle() {
        return Err(PathError::CyclicModel);
    }
    if let Some(g) = model.nodes().iter().find(|n| n.kind.gateway_kind() == Some(GatewayKind::Inclusive)) {
        return Err(PathError::InclusiveGatewayUnsupported(g.id.clone()));
    }
    let starts: Vec<&str> = model.start_events().map(|n| n.id.as_str()).collect();
    if starts.is_empty() {
        return Err(PathError::NoStartEvent);
    }

    let mut out = Vec::new();
    for start in starts {
        let mut pending = vec![Run {
            nodes: vec![],
            choices: BTreeMap::new(),
            tokens: vec![start.to_string()],
            arrivals: HashMap::new(),
        }];
        while let Some(mut run) = pending.pop() {
            loop {
                if run.tokens.is_empty() {
                    if let Some((node, _)) = run.arrivals.iter().find(|(_, &c)| c > 0) {
                        return Err(PathError::Deadlock { start: start.to_string(), node: node.clone() });
                    }
                    out.push(ExecutionPath { nodes: run.nodes, branch_choices: run.choices });
                    break;
                }
                let at = run.tokens.remove(0);
                let node = model.node(&at).expect("flow targets resolve");
                let kind = node.kind;

                if kind == (NodeKind::Gateway { kind: GatewayKind::Parallel }) {
                    let needed = model.in_degree(&at);
                    if needed > 1 {
                        let c = run.arrivals.entry(at.clone()).or_insert(0);
                        *c += 1;
                        if *c < needed {
                            continue;
                        }
                        run.arrivals.remove(&at);
                    }
                }
                run.nodes.push(at.clone());

                let outs: Vec<_> = model.outgoing(&at).collect();
                let exclusive = kind == NodeKind::Gateway { kind: GatewayKind::Exclusive };
                if outs.len() > 1 && exclusive {
                    // Fork: later branches are pushed first so the first branch is explored first.
                    for f in outs.iter().skip(1).rev() {
                        let mut alt = run.clone();
                        alt.choices.insert(at.clone(), f.id.clone());
                        alt.tokens.insert(0, f.target.clone());
                        pending.push(alt);
                    }
                    run.choices.insert(at.clone(), outs[0].id.clone());
                    run.tokens.insert(0, outs[0].target.clone());
                } else {
                    // Everything else passes a token along every outgoing flow.
                    for (i, f) in outs.iter().enumerate() {
                        run.tokens.insert(i, f.target.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}
