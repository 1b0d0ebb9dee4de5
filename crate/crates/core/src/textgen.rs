//! Template-based natural-language descriptions of block-structured models.

use std::fmt::Write as _;

use crate::blocks::{decompose_blocks, Block, BlockError, BlockTree, Branch, ChoiceKind};
use crate::model::{NodeKind, ProcessModel};

const CONNECTORS: [&str; 3] = ["Then, ", "After that, ", "Subsequently, "];
const PARALLEL_INTROS: [&str; 2] = ["In the meantime, ", "At the same time, "];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    /// Model elements the sentence speaks about.
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Description {
    pub sentences: Vec<Sentence>,
}

impl Description {
    /// One sentence per line. `annotated` appends the element ids.
    pub fn render(&self, annotated: bool) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&s.text);
            if annotated {
                let _ = write!(out, "  [ids: {}]", s.elements.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

/// Spelled-out cardinal for 1..=12, digits otherwise.
pub fn number_word(n: usize) -> String {
    const WORDS: [&str; 12] =
        ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve"];
    match n {
        1..=12 => WORDS[n - 1].to_string(),
        _ => n.to_string(),
    }
}

pub fn ordinal_word(n: usize) -> String {
    const WORDS: [&str; 12] = [
        "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth", "eleventh",
        "twelfth",
    ];
    match n {
        1..=12 => WORDS[n - 1].to_string(),
        _ => {
            let suffix = match (n % 10, n % 100) {
                (_, 11..=13) => "th",
                (1, _) => "st",
                (2, _) => "nd",
                (3, _) => "rd",
                _ => "th",
            };
            format!("{n}{suffix}")
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn lowercase_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

struct Writer<'a> {
    model: &'a ProcessModel,
    out: Vec<Sentence>,
    prefix: Option<String>,
    prefix_ids: Vec<String>,
}

impl<'a> Writer<'a> {
    fn label(&self, id: &str) -> &'a str {
        self.model.node(id).map(|n| n.label.as_str()).unwrap_or("")
    }

    fn set_prefix(&mut self, prefix: impl Into<String>, ids: &[&str]) {
        self.prefix = Some(prefix.into());
        self.prefix_ids.extend(ids.iter().map(|s| s.to_string()));
    }

    /// Emits a sentence. `templated` bodies start with a capital letter
    /// that is lowered when a prefix is put in front of them.
    fn emit(&mut self, body: String, templated: bool, ids: Vec<String>, connector: Option<&str>) {
        let lead = self.prefix.take().or(connector.map(str::to_string));
        let text = match lead {
            Some(p) if templated => format!("{}{}", p, lowercase_first(&body)),
            Some(p) => format!("{p}{body}"),
            None => capitalize(&body),
        };
        let mut elements = std::mem::take(&mut self.prefix_ids);
        elements.extend(ids);
        self.out.push(Sentence { text, elements });
    }

    fn condition(&self, gateway: &str, b: &Branch) -> String {
        self.model
            .flow(&b.flow)
            .and_then(|f| f.condition.clone())
            .filter(|c| !c.trim().is_empty())
            .unwrap_or_else(|| format!("the branch towards {}", self.first_label(&b.body).unwrap_or(gateway)))
    }

    fn first_label(&self, b: &Block) -> Option<&'a str> {
        b.leaves().first().map(|id| self.label(id))
    }

    /// Sentences for `block`. `counter` is the enclosing sequence's connector position, absent for
    /// the first item of a block.
    fn block(&mut self, block: &Block, counter: Option<&mut usize>) {
        let c = counter.map(|n| {
            let c = CONNECTORS[*n % CONNECTORS.len()];
            *n += 1;
            c
        });
        match block {
            Block::Sequence(items) => {
                let mut counter = 0;
                for (i, item) in items.iter().enumerate() {
                    self.block(item, (i > 0).then_some(&mut counter));
                }
            }
            Block::Leaf(id) => {
                let node = match self.model.node(id) {
                    Some(n) => n,
                    None => return,
                };
                match node.kind {
                    NodeKind::StartEvent { .. } => {
                        let body = format!("The {} process starts when {}.", self.model.name(), node.label);
                        self.emit(body, true, vec![id.clone()], None);
                    }
                    NodeKind::EndEvent => {
                        self.emit(format!("The process ends with {}.", node.label), true, vec![id.clone()], None);
                    }
                    NodeKind::Gateway { .. } => {}
                    _ => {
                        self.emit(format!("{}.", node.label), false, vec![id.clone()], c);
                    }
                }
            }
            Block::Choice { gateway, join, kind: ChoiceKind::Exclusive, branches } => {
                let label = self.label(gateway);
                let subject = if label.trim().is_empty() { "decision".to_string() } else { label.to_string() };
                let meeting = match join.as_deref().map(|j| self.label(j).trim()) {
                    Some(l) if !l.is_empty() => l.to_string(),
                    _ => "the branches join again".to_string(),
                };
                let options: Vec<String> = branches
                    .iter()
                    .map(|b| {
                        let cond = self.condition(gateway, b);
                        if b.body.is_empty() {
                            format!("{cond}, in which case nothing further is required before {meeting}")
                        } else {
                            cond
                        }
                    })
                    .collect();
                let body = format!("The {subject} may either be {}.", join_alternatives(&options));
                self.emit(body, true, vec![gateway.clone()], c);
                for b in branches.iter().filter(|b| !b.body.is_empty()) {
                    let intro = format!("If {}, ", self.condition(gateway, b));
                    self.set_prefix(intro, &[]);
                    self.block(&b.body, None);
                }
                if let Some(j) = join {
                    self.set_prefix("In any of these cases, ", &[j]);
                }
            }
            Block::Choice { gateway, join, kind: ChoiceKind::Inclusive, branches } => {
                let body =
                    format!("{} alternative procedures may be executed.", capitalize(&number_word(branches.len())));
                self.emit(body, true, vec![gateway.clone()], c);
                for (i, b) in branches.iter().enumerate().filter(|(_, b)| !b.body.is_empty()) {
                    self.set_prefix(format!("In the {} procedure, ", ordinal_word(i + 1)), &[]);
                    self.block(&b.body, None);
                }
                if let Some(j) = join {
                    self.set_prefix("Afterwards, ", &[j]);
                }
            }
            Block::Parallel { gateway, join, branches } => {
                let body = format!(
                    "{} procedures are executed in an arbitrary order.",
                    capitalize(&number_word(branches.len()))
                );
                self.emit(body, true, vec![gateway.clone()], c);
                let mut secondary = 0;
                for (i, b) in branches.iter().enumerate().filter(|(_, b)| !b.body.is_empty()) {
                    if i > 0 {
                        self.set_prefix(PARALLEL_INTROS[secondary % PARALLEL_INTROS.len()], &[]);
                        secondary += 1;
                    }
                    self.block(&b.body, None);
                }
                if let Some(j) = join {
                    self.set_prefix("After each case, ", &[j]);
                }
            }
            Block::Loop { entry, exit, body, .. } => {
                self.prefix_ids.push(entry.clone());
                let first = self.first_label(body).unwrap_or("the loop entry").to_string();
                self.block(body, None);
                let text = format!("If required, the latter steps are repeated and continue with {first}.");
                self.emit(text, true, vec![exit.clone()], None);
                self.set_prefix("Once the loop is finished, ", &[]);
            }
        }
    }
}

fn join_alternatives(options: &[String]) -> String {
    match options {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{}, or {}", init.join(", "), last),
    }
}

/// Describes `model` following the decomposition in `tree`.
pub fn describe(model: &ProcessModel, tree: &BlockTree) -> Description {
    let mut w = Writer { model, out: Vec::new(), prefix: None, prefix_ids: Vec::new() };
    w.block(&tree.root, None);
    Description { sentences: w.out }
}

pub fn describe_model(model: &ProcessModel) -> Result<Description, BlockError> {
    Ok(describe(model, &decompose_blocks(model)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        assert_eq!(number_word(2), "two");
        assert_eq!(number_word(12), "twelve");
        assert_eq!(number_word(13), "13");
        assert_eq!(ordinal_word(3), "third");
        assert_eq!(ordinal_word(21), "21st");
        assert_eq!(ordinal_word(112), "112th");
    }

    #[test]
    fn alternatives() {
        let s = |v: &[&str]| join_alternatives(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        assert_eq!(s(&["a", "b"]), "a, or b");
        assert_eq!(s(&["a", "b", "c"]), "a, b, or c");
    }
}
