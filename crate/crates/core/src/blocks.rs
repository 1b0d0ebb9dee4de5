//! Decomposition of a structured process into nested blocks.
//!
//! Every split gateway must close at a single join gateway of the same kind
//! (or all of its branches must end the process), and every loop must be an
//! exclusive join at the entry paired with an exclusive split whose back
//! edge points straight at that join.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::model::{GatewayKind, NodeKind, ProcessModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("model is not block-structured: {0}")]
    Unstructured(String),
}

fn unstructured<T>(msg: impl Into<String>) -> Result<T, BlockError> {
    Err(BlockError::Unstructured(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChoiceKind {
    Exclusive,
    Inclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// Outgoing flow of the split that opens this branch.
    pub flow: String,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Leaf(String),
    Sequence(Vec<Block>),
    Choice {
        gateway: String,
        /// `None` when every branch runs into its own end event.
        join: Option<String>,
        kind: ChoiceKind,
        branches: Vec<Branch>,
    },
    Parallel {
        gateway: String,
        join: Option<String>,
        branches: Vec<Branch>,
    },
    Loop {
        /// Exclusive join at the loop entry.
        entry: String,
        /// Exclusive split deciding whether to repeat.
        exit: String,
        body: Box<Block>,
        back_edge: String,
        exit_flow: String,
    },
}

impl Block {
    /// Leaf ids in traversal order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Block::Leaf(id) => out.push(id),
            Block::Sequence(items) => items.iter().for_each(|b| b.collect_leaves(out)),
            Block::Choice { branches, .. } | Block::Parallel { branches, .. } => {
                branches.iter().for_each(|b| b.body.collect_leaves(out))
            }
            Block::Loop { body, .. } => body.collect_leaves(out),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Block::Sequence(items) if items.is_empty())
    }

    /// True if any part of this block can only be left through an end event.
    fn ends(&self) -> bool {
        match self {
            Block::Sequence(items) => items.last().is_some_and(Block::ends),
            Block::Choice { join, .. } | Block::Parallel { join, .. } => join.is_none(),
            _ => false,
        }
    }
}

/// Root of a decomposition; always a [`Block::Sequence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTree {
    pub root: Block,
}

impl BlockTree {
    pub fn leaves(&self) -> Vec<&str> {
        self.root.leaves()
    }
}

enum Exit {
    End,
    Join(String),
    LoopSplit(String),
}

struct Decomposer<'a> {
    model: &'a ProcessModel,
    // back edge flow id, keyed by its target (loop entry)
    back_into: HashMap<String, String>,
    back_edges: BTreeSet<String>,
}

pub fn decompose_blocks(model: &ProcessModel) -> Result<BlockTree, BlockError> {
    let starts: Vec<&str> = model.start_events().map(|n| n.id.as_str()).collect();
    let [start] = starts.as_slice() else {
        return unstructured(format!("expected exactly one start event, found {}", starts.len()));
    };

    let back_edges = find_back_edges(model, start);
    let mut back_into = HashMap::new();
    for fid in &back_edges {
        let f = model.flow(fid).expect("back edge is a flow");
        if back_into.insert(f.target.clone(), f.id.clone()).is_some() {
            return unstructured(format!("`{}` is re-entered by more than one back edge", f.target));
        }
    }

    let d = Decomposer { model, back_into, back_edges };
    let (items, exit) = d.sequence(start)?;
    match exit {
        Exit::End => Ok(BlockTree { root: Block::Sequence(items) }),
        Exit::Join(j) => unstructured(format!("join `{j}` has no matching split")),
        Exit::LoopSplit(s) => unstructured(format!("split `{s}` loops back outside its block")),
    }
}

fn find_back_edges(model: &ProcessModel, start: &str) -> BTreeSet<String> {
    // Iterative DFS; an edge into a node on the stack closes a cycle.
    let mut back = BTreeSet::new();
    let mut on_stack: HashSet<&str> = HashSet::new();
    let mut done: HashSet<&str> = HashSet::new();
    let mut stack: Vec<(&str, Vec<(&str, &str)>)> = Vec::new();
    let succ = |n: &str| -> Vec<(&str, &str)> {
        let mut v: Vec<(&str, &str)> = model.outgoing(n).map(|f| (f.id.as_str(), f.target.as_str())).collect();
        v.reverse();
        v
    };
    let start = model.node(start).map(|n| n.id.as_str()).unwrap_or(start);
    on_stack.insert(start);
    stack.push((start, succ(start)));
    while let Some((node, pending)) = stack.last_mut() {
        let node = *node;
        match pending.pop() {
            Some((fid, target)) => {
                if on_stack.contains(target) {
                    back.insert(fid.to_string());
                } else if !done.contains(target) {
                    on_stack.insert(target);
                    stack.push((target, succ(target)));
                }
            }
            None => {
                on_stack.remove(node);
                done.insert(node);
                stack.pop();
            }
        }
    }
    back
}

impl<'a> Decomposer<'a> {
    fn forward_in(&self, node: &str) -> usize {
        self.model.incoming(node).filter(|f| !self.back_edges.contains(&f.id)).count()
    }

    fn successor(&self, node: &str) -> Result<&'a str, BlockError> {
        let outs: Vec<_> = self.model.outgoing(node).collect();
        match outs.as_slice() {
            [f] => Ok(f.target.as_str()),
            _ => unstructured(format!("`{node}` should have exactly one outgoing flow")),
        }
    }

    fn sequence(&self, first: &str) -> Result<(Vec<Block>, Exit), BlockError> {
        let mut items = Vec::new();
        let mut at: &str = first;
        loop {
            let node = self.model.node(at).expect("resolved id");
            let outs = self.model.out_degree(at);
            let ins = self.forward_in(at);
            match node.kind {
                NodeKind::Gateway { kind } => {
                    if let Some(back) = self.back_into.get(at) {
                        // Loop entry: parse the body up to the repeat split.
                        let back_flow = self.model.flow(back).expect("flow");
                        if kind != GatewayKind::Exclusive || ins != 1 || outs != 1 {
                            return unstructured(format!("loop entry `{at}` must be an exclusive join"));
                        }
                        let (body, exit) = self.sequence(self.successor(at)?)?;
                        let split = match exit {
                            Exit::LoopSplit(s) if s == back_flow.source => s,
                            _ => return unstructured(format!("loop at `{at}` is not closed by its back edge")),
                        };
                        let exit_flow = self
                            .model
                            .outgoing(&split)
                            .find(|f| f.id != *back)
                            .expect("repeat split has two outgoing flows");
                        items.push(Block::Loop {
                            entry: at.to_string(),
                            exit: split.clone(),
                            body: Box::new(Block::Sequence(body)),
                            back_edge: back.clone(),
                            exit_flow: exit_flow.id.clone(),
                        });
                        at = exit_flow.target.as_str();
                        continue;
                    }
                    if self.model.outgoing(at).any(|f| self.back_edges.contains(&f.id)) {
                        if kind != GatewayKind::Exclusive || outs != 2 || ins != 1 {
                            return unstructured(format!("loop split `{at}` must be a binary exclusive split"));
                        }
                        return Ok((items, Exit::LoopSplit(at.to_string())));
                    }
                    if ins > 1 && outs > 1 {
                        return unstructured(format!("gateway `{at}` both splits and joins"));
                    }
                    if ins > 1 {
                        return Ok((items, Exit::Join(at.to_string())));
                    }
                    if outs > 1 {
                        let (block, next) = self.split(at, kind)?;
                        let ends = block.ends();
                        items.push(block);
                        match next {
                            Some(n) => at = n,
                            None => {
                                debug_assert!(ends);
                                return Ok((items, Exit::End));
                            }
                        }
                        continue;
                    }
                    if outs == 0 {
                        return unstructured(format!("gateway `{at}` has no outgoing flow"));
                    }
                    // Pass-through gateway.
                    at = self.successor(at)?;
                }
                _ => {
                    if ins > 1 {
                        return unstructured(format!("`{at}` merges flows without a join gateway"));
                    }
                    items.push(Block::Leaf(at.to_string()));
                    match outs {
                        0 if node.kind == NodeKind::EndEvent => return Ok((items, Exit::End)),
                        0 => return unstructured(format!("`{at}` is a dead end")),
                        1 => at = self.successor(at)?,
                        _ => return unstructured(format!("`{at}` splits without a gateway")),
                    }
                }
            }
        }
    }

    /// Parses a split block; returns it with the node following its join.
    fn split(&self, gateway: &str, kind: GatewayKind) -> Result<(Block, Option<&'a str>), BlockError> {
        let mut branches = Vec::new();
        let mut join: Option<Option<String>> = None;
        for f in self.model.outgoing(gateway) {
            let target = f.target.as_str();
            let (body, exit) = if self.model.is_join(target) && !self.back_into.contains_key(target) {
                (Vec::new(), Exit::Join(target.to_string()))
            } else {
                self.sequence(target)?
            };
            let closes = match exit {
                Exit::End => None,
                Exit::Join(j) => Some(j),
                Exit::LoopSplit(s) => return unstructured(format!("branch of `{gateway}` runs into loop split `{s}`")),
            };
            match &join {
                None => join = Some(closes),
                Some(prev) if *prev == closes => {}
                Some(_) => return unstructured(format!("branches of `{gateway}` do not meet at one join")),
            }
            branches.push(Branch { flow: f.id.clone(), body: Block::Sequence(body) });
        }
        let join = join.flatten();
        let next = match &join {
            Some(j) => {
                let jn = self.model.node(j).expect("join exists");
                if jn.kind.gateway_kind() != Some(kind) {
                    return unstructured(format!("split `{gateway}` is closed by a different kind of join `{j}`"));
                }
                if self.forward_in(j) != branches.len() {
                    return unstructured(format!("join `{j}` does not match split `{gateway}` one-to-one"));
                }
                if self.back_into.contains_key(j.as_str()) {
                    return unstructured(format!("join `{j}` is also a loop entry"));
                }
                Some(self.successor(j)?)
            }
            None => None,
        };
        let block = match kind {
            GatewayKind::Parallel => Block::Parallel { gateway: gateway.to_string(), join, branches },
            GatewayKind::Exclusive => {
                Block::Choice { gateway: gateway.to_string(), join, kind: ChoiceKind::Exclusive, branches }
            }
            GatewayKind::Inclusive => {
                Block::Choice { gateway: gateway.to_string(), join, kind: ChoiceKind::Inclusive, branches }
            }
        };
        Ok((block, next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FlowNode, ProcessParts, SequenceFlow};

    fn build(nodes: Vec<FlowNode>, flows: Vec<SequenceFlow>) -> ProcessModel {
        ProcessModel::new(ProcessParts {
            id: "P".into(),
            name: "P".into(),
            nodes,
            sequence_flows: flows,
            ..Default::default()
        })
        .unwrap()
    }

    fn leaf(s: &str) -> Block {
        Block::Leaf(s.into())
    }

    #[test]
    fn single_task() {
        let m = build(
            vec![FlowNode::start("s", "S"), FlowNode::task("t", "Do It"), FlowNode::end("e", "E")],
            vec![SequenceFlow::new("f1", "s", "t"), SequenceFlow::new("f2", "t", "e")],
        );
        assert_eq!(decompose_blocks(&m).unwrap().root, Block::Sequence(vec![leaf("s"), leaf("t"), leaf("e")]));
    }

    #[test]
    fn choice_with_empty_branch() {
        let m = build(
            vec![
                FlowNode::start("s", "S"),
                FlowNode::gateway("g", "G", GatewayKind::Exclusive),
                FlowNode::task("a", "Do A"),
                FlowNode::gateway("j", "", GatewayKind::Exclusive),
                FlowNode::end("e", "E"),
            ],
            vec![
                SequenceFlow::new("f1", "s", "g"),
                SequenceFlow::new("f2", "g", "a").with_condition("yes"),
                SequenceFlow::new("f3", "g", "j").with_condition("no"),
                SequenceFlow::new("f4", "a", "j"),
                SequenceFlow::new("f5", "j", "e"),
            ],
        );
        let t = decompose_blocks(&m).unwrap();
        assert_eq!(
            t.root,
            Block::Sequence(vec![
                leaf("s"),
                Block::Choice {
                    gateway: "g".into(),
                    join: Some("j".into()),
                    kind: ChoiceKind::Exclusive,
                    branches: vec![
                        Branch { flow: "f2".into(), body: Block::Sequence(vec![leaf("a")]) },
                        Branch { flow: "f3".into(), body: Block::Sequence(vec![]) },
                    ],
                },
                leaf("e"),
            ])
        );
    }

    #[test]
    fn choice_ending_in_separate_end_events() {
        let m = build(
            vec![
                FlowNode::start("s", "S"),
                FlowNode::gateway("g", "G", GatewayKind::Exclusive),
                FlowNode::task("a", "Do A"),
                FlowNode::end("e1", "E1"),
                FlowNode::end("e2", "E2"),
            ],
            vec![
                SequenceFlow::new("f1", "s", "g"),
                SequenceFlow::new("f2", "g", "a"),
                SequenceFlow::new("f3", "a", "e1"),
                SequenceFlow::new("f4", "g", "e2"),
            ],
        );
        let t = decompose_blocks(&m).unwrap();
        assert_eq!(t.leaves(), ["s", "a", "e1", "e2"]);
        assert!(matches!(&t.root, Block::Sequence(v) if matches!(&v[1], Block::Choice { join: None, .. })));
    }

    #[test]
    fn loop_block() {
        let m = build(
            vec![
                FlowNode::start("s", "S"),
                FlowNode::gateway("j", "", GatewayKind::Exclusive),
                FlowNode::task("t", "Do It"),
                FlowNode::gateway("g", "Again?", GatewayKind::Exclusive),
                FlowNode::end("e", "E"),
            ],
            vec![
                SequenceFlow::new("f1", "s", "j"),
                SequenceFlow::new("f2", "j", "t"),
                SequenceFlow::new("f3", "t", "g"),
                SequenceFlow::new("f4", "g", "j"),
                SequenceFlow::new("f5", "g", "e"),
            ],
        );
        let t = decompose_blocks(&m).unwrap();
        assert_eq!(
            t.root,
            Block::Sequence(vec![
                leaf("s"),
                Block::Loop {
                    entry: "j".into(),
                    exit: "g".into(),
                    body: Box::new(Block::Sequence(vec![leaf("t")])),
                    back_edge: "f4".into(),
                    exit_flow: "f5".into(),
                },
                leaf("e"),
            ])
        );
    }

    #[test]
    fn overlapping_gateways_are_unstructured() {
        // g1 and g2 each send one branch into the other's join.
        let m = build(
            vec![
                FlowNode::start("s", "S"),
                FlowNode::gateway("g1", "", GatewayKind::Exclusive),
                FlowNode::gateway("g2", "", GatewayKind::Exclusive),
                FlowNode::task("a", "Do A"),
                FlowNode::task("b", "Do B"),
                FlowNode::gateway("j1", "", GatewayKind::Exclusive),
                FlowNode::gateway("j2", "", GatewayKind::Exclusive),
                FlowNode::end("e", "E"),
            ],
            vec![
                SequenceFlow::new("f1", "s", "g1"),
                SequenceFlow::new("f2", "g1", "a"),
                SequenceFlow::new("f3", "g1", "g2"),
                SequenceFlow::new("f4", "g2", "b"),
                SequenceFlow::new("f5", "g2", "j1"),
                SequenceFlow::new("f6", "a", "j1"),
                SequenceFlow::new("f7", "b", "j2"),
                SequenceFlow::new("f8", "j1", "j2"),
                SequenceFlow::new("f9", "j2", "e"),
            ],
        );
        assert!(matches!(decompose_blocks(&m), Err(BlockError::Unstructured(_))));
    }

    #[test]
    fn mismatched_join_kind() {
        let m = build(
            vec![
                FlowNode::start("s", "S"),
                FlowNode::gateway("g", "", GatewayKind::Parallel),
                FlowNode::task("a", "Do A"),
                FlowNode::task("b", "Do B"),
                FlowNode::gateway("j", "", GatewayKind::Exclusive),
                FlowNode::end("e", "E"),
            ],
            vec![
                SequenceFlow::new("f1", "s", "g"),
                SequenceFlow::new("f2", "g", "a"),
                SequenceFlow::new("f3", "g", "b"),
                SequenceFlow::new("f4", "a", "j"),
                SequenceFlow::new("f5", "b", "j"),
                SequenceFlow::new("f6", "j", "e"),
            ],
        );
        assert!(decompose_blocks(&m).is_err());
    }
}
