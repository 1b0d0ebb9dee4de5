//! Simulation scenarios: task durations and exclusive-branch probabilities.
//!
//! File format, one statement per line:
//!
//! ```text
//! scenario "name"
//! [durations]
//! "Plan Beet Seeding" = 15:00
//! "Check Field Geo-Data in FMIS *" = 05:00
//! "Check Field Geo-Data" = "Check Field Geo-Data in FMIS *"
//! [probabilities]
//! "*Field Geo-Data" / "out-of-date" = 0.05
//! Flow_7 = 0.5
//! ```
//!
//! A duration value that is itself a quoted string refers to another row.
//! `#` outside quotes starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{GatewayKind, ProcessModel};

/// Non-negative whole seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Duration(u64);

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub const fn from_secs(secs: u64) -> Self {
        Duration(secs)
    }

    pub const fn from_hms(h: u64, m: u64, s: u64) -> Self {
        Duration(h * 3600 + m * 60 + s)
    }

    pub const fn secs(self) -> u64 {
        self.0
    }
}

impl std::ops::Add for Duration {
    type Output = Duration;

    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Duration {
    fn sum<I: Iterator<Item = Duration>>(iter: I) -> Duration {
        Duration(iter.map(|d| d.0).sum())
    }
}

/// `H:MM:SS`, hours unpadded.
impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        write!(f, "{}:{:02}:{:02}", s / 3600, (s / 60) % 60, s % 60)
    }
}

/// Renders a signed number of seconds as `[-]H:MM:SS`.
pub fn format_signed(secs: i64) -> String {
    let d = Duration(secs.unsigned_abs());
    if secs < 0 {
        format!("-{d}")
    } else {
        d.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DurationError {
    #[error("`{0}` is not a duration (expected MM:SS or H:MM:SS)")]
    Syntax(String),
    #[error("`{0}`: minutes and seconds must be below 60")]
    Range(String),
}

impl FromStr for Duration {
    type Err = DurationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || DurationError::Syntax(s.to_string());
        let fields: Vec<&str> = s.split(':').collect();
        let num = |f: &str, max_len: usize| -> Result<u64, DurationError> {
            if f.is_empty() || f.len() > max_len || !f.bytes().all(|b| b.is_ascii_digit()) {
                return Err(syntax());
            }
            f.parse().map_err(|_| syntax())
        };
        let (h, m, sec) = match fields.as_slice() {
            [m, sec] => (0, num(m, 2)?, num(sec, 2)?),
            [h, m, sec] => (num(h, 9)?, num(m, 2)?, num(sec, 2)?),
            _ => return Err(syntax()),
        };
        if m >= 60 || sec >= 60 {
            return Err(DurationError::Range(s.to_string()));
        }
        Ok(Duration::from_hms(h, m, sec))
    }
}

/// An exact probability in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Option<Self> {
        (!value.is_negative() && value <= BigRational::one()).then_some(Probability(value))
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    pub fn zero() -> Self {
        Probability(BigRational::zero())
    }

    /// `numer / denom`; `None` if outside `[0, 1]` or `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Option<Self> {
        if denom == 0 {
            return None;
        }
        Self::new(BigRational::new(numer.into(), denom.into()))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses a plain decimal (`0.05`, `1`, `.5`, `-0.1`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mantissa: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = BigInt::from(10u8).pow(frac.len() as u32);
    let v = BigRational::new(mantissa, scale);
    Some(if negative { -v } else { v })
}

/// Reference to an outgoing flow of an exclusive split.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowRef {
    Flow(String),
    /// Gateway label (may contain `*`) plus the flow's condition label.
    Condition {
        gateway: String,
        condition: String,
    },
}

impl fmt::Display for FlowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowRef::Flow(id) => f.write_str(id),
            FlowRef::Condition { gateway, condition } => write!(f, "\"{gateway}\" / \"{condition}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DurationValue {
    Fixed(Duration),
    /// Same duration as the row with this matcher text.
    Alias(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationRule {
    /// Exact task label, or a pattern where `*` matches any text.
    pub matcher: String,
    pub value: DurationValue,
}

impl DurationRule {
    pub fn is_glob(&self) -> bool {
        self.matcher.contains('*')
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityRule {
    pub flow: FlowRef,
    pub value: Probability,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: {reason}")]
    Range { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub name: String,
    pub durations: Vec<DurationRule>,
    pub probabilities: Vec<ProbabilityRule>,
}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Scenario { name: name.into(), ..Default::default() }
    }

    pub fn with_duration(mut self, matcher: impl Into<String>, d: Duration) -> Self {
        self.durations.push(DurationRule { matcher: matcher.into(), value: DurationValue::Fixed(d) });
        self
    }

    pub fn with_alias(mut self, matcher: impl Into<String>, target: impl Into<String>) -> Self {
        self.durations.push(DurationRule { matcher: matcher.into(), value: DurationValue::Alias(target.into()) });
        self
    }

    pub fn with_probability(mut self, flow: FlowRef, p: Probability) -> Self {
        self.probabilities.push(ProbabilityRule { flow, value: p });
        self
    }

    /// Renders the scenario in the file format; parsing it back yields an equal value.
    pub fn to_text(&self) -> String {
        let mut out = format!("scenario \"{}\"\n[durations]\n", self.name);
        for r in &self.durations {
            match &r.value {
                DurationValue::Fixed(d) => out.push_str(&format!("\"{}\" = {d}\n", r.matcher)),
                DurationValue::Alias(t) => out.push_str(&format!("\"{}\" = \"{t}\"\n", r.matcher)),
            }
        }
        out.push_str("[probabilities]\n");
        for r in &self.probabilities {
            let v = r.value.as_ratio();
            // Non-decimal ratios print as `a/b`, which the parser rejects.
            out.push_str(&format!("{} = {}\n", r.flow, decimal_string(v)));
        }
        out
    }

    fn resolve(&self, matcher: &str) -> Option<Duration> {
        let mut at = matcher;
        for _ in 0..=self.durations.len() {
            let rule = self.durations.iter().find(|r| r.matcher == at)?;
            match &rule.value {
                DurationValue::Fixed(d) => return Some(*d),
                DurationValue::Alias(t) => at = t,
            }
        }
        None
    }
}

fn decimal_string(v: &BigRational) -> String {
    // Probabilities built by the parser always have a power-of-ten denominator.
    let mut denom = v.denom().clone();
    let mut digits = 0usize;
    let ten = BigInt::from(10u8);
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{v}");
    }
    digits += twos.max(fives);
    let scaled = v * BigRational::from_integer(ten.pow(digits as u32));
    let n = scaled.to_integer();
    if digits == 0 {
        return n.to_string();
    }
    let s = format!("{:0>width$}", n.to_string(), width = digits + 1);
    let (i, f) = s.split_at(s.len() - digits);
    format!("{i}.{f}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Quoted(String),
    Bare(String),
    Eq,
    Slash,
    Open,
    Close,
}

fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, ch)) => s.push(ch),
                        None => return Err(format!("unterminated string starting at column {}", i + 1)),
                    }
                }
                out.push(Token::Quoted(s));
            }
            '=' | '/' | '[' | ']' => {
                chars.next();
                out.push(match c {
                    '=' => Token::Eq,
                    '/' => Token::Slash,
                    '[' => Token::Open,
                    _ => Token::Close,
                });
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_whitespace() || matches!(ch, '"' | '=' | '/' | '#' | '[' | ']') {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                out.push(Token::Bare(s));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Durations,
    Probabilities,
}

pub fn parse_scenario(input: &[u8]) -> Result<Scenario, ScenarioError> {
    let text = std::str::from_utf8(input)
        .map_err(|e| ScenarioError::Syntax { line: 1, reason: format!("input is not UTF-8: {e}") })?;
    let mut sc = Scenario::default();
    let mut section = Section::None;
    let mut named = false;
    let mut seen_matchers = BTreeSet::new();
    let mut seen_flows = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let syntax = |reason: String| ScenarioError::Syntax { line, reason };
        let range = |reason: String| ScenarioError::Range { line, reason };
        let tokens = tokenize(raw).map_err(syntax)?;
        match tokens.as_slice() {
            [] => {}
            [Token::Bare(kw), Token::Quoted(name)] if kw == "scenario" => {
                if named {
                    return Err(syntax("scenario name given twice".into()));
                }
                sc.name = name.clone();
                named = true;
            }
            [Token::Open, Token::Bare(s), Token::Close] => {
                section = match s.as_str() {
                    "durations" => Section::Durations,
                    "probabilities" => Section::Probabilities,
                    other => return Err(syntax(format!("unknown section `{other}`"))),
                };
            }
            [lhs @ .., Token::Eq, value] => {
                let is_duration = match value {
                    Token::Quoted(_) => true,
                    Token::Bare(v) => v.contains(':'),
                    _ => return Err(syntax("missing value after `=`".into())),
                };
                let wants = match section {
                    Section::None if is_duration => Section::Durations,
                    Section::None => Section::Probabilities,
                    s => s,
                };
                if wants == Section::Durations {
                    let [Token::Quoted(matcher)] = lhs else {
                        return Err(syntax("expected a quoted task label before `=`".into()));
                    };
                    if matcher.is_empty() {
                        return Err(syntax("empty task matcher".into()));
                    }
                    let value = match value {
                        Token::Quoted(target) => DurationValue::Alias(target.clone()),
                        Token::Bare(v) => DurationValue::Fixed(v.parse().map_err(|e: DurationError| match e {
                            DurationError::Syntax(_) => syntax(e.to_string()),
                            DurationError::Range(_) => range(e.to_string()),
                        })?),
                        _ => unreachable!(),
                    };
                    if !seen_matchers.insert(matcher.clone()) {
                        return Err(syntax(format!("duplicate entry for \"{matcher}\"")));
                    }
                    sc.durations.push(DurationRule { matcher: matcher.clone(), value });
                } else {
                    let flow = match lhs {
                        [Token::Bare(id)] => FlowRef::Flow(id.clone()),
                        [Token::Quoted(g), Token::Slash, Token::Quoted(c)] => {
                            FlowRef::Condition { gateway: g.clone(), condition: c.clone() }
                        }
                        _ => return Err(syntax("expected a flow id or \"gateway\" / \"condition\" before `=`".into())),
                    };
                    let Token::Bare(v) = value else {
                        return Err(syntax("probability must be a number".into()));
                    };
                    let ratio = parse_decimal(v).ok_or_else(|| syntax(format!("`{v}` is not a decimal number")))?;
                    let value =
                        Probability::new(ratio).ok_or_else(|| range(format!("probability {v} is outside [0, 1]")))?;
                    if !seen_flows.insert(flow.clone()) {
                        return Err(syntax(format!("duplicate probability for {flow}")));
                    }
                    sc.probabilities.push(ProbabilityRule { flow, value });
                }
            }
            _ => return Err(syntax(format!("cannot parse `{}`", raw.trim()))),
        }
    }

    for r in &sc.durations {
        if let DurationValue::Alias(t) = &r.value {
            if !seen_matchers.contains(t) {
                return Err(ScenarioError::Syntax {
                    line: 0,
                    reason: format!("\"{}\" refers to unknown row \"{t}\"", r.matcher),
                });
            }
            if sc.resolve(&r.matcher).is_none() {
                return Err(ScenarioError::Syntax {
                    line: 0,
                    reason: format!("alias cycle through \"{}\"", r.matcher),
                });
            }
        }
    }
    Ok(sc)
}

/// `*` matches any run of characters; everything else is literal.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] != '*' && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindError {
    #[error("no duration for task(s): {}", .0.join(", "))]
    MissingDuration(Vec<String>),
    #[error("no probability for flow(s) {} of gateway `{gateway}`", .flows.join(", "))]
    MissingProbability { gateway: String, flows: Vec<String> },
    #[error("`{element}` is matched by conflicting entries: {}", .matchers.join(", "))]
    AmbiguousMatch { element: String, matchers: Vec<String> },
    #[error("probabilities of gateway `{gateway}` sum to {sum}")]
    SumError { gateway: String, sum: f64 },
}

/// A scenario resolved against one model: every lookup is total.
#[derive(Debug, Clone)]
pub struct BoundScenario {
    pub scenario_name: String,
    pub model: ProcessModel,
    pub task_duration: BTreeMap<String, Duration>,
    /// Keyed by (exclusive split gateway id, outgoing flow id).
    pub branch_probability: BTreeMap<(String, String), Probability>,
}

impl BoundScenario {
    pub fn duration(&self, node: &str) -> Duration {
        self.task_duration.get(node).copied().unwrap_or(Duration::ZERO)
    }

    pub fn probability(&self, gateway: &str, flow: &str) -> &Probability {
        &self.branch_probability[&(gateway.to_string(), flow.to_string())]
    }

    /// Same binding with every task duration shifted by `delta` seconds.
    pub fn shifted(&self, delta: u64) -> BoundScenario {
        let mut b = self.clone();
        for (id, d) in b.task_duration.iter_mut() {
            if self.model.node(id).is_some_and(|n| n.kind.is_task()) {
                *d = Duration(d.0 + delta);
            }
        }
        b
    }

    /// Same binding with one branch probability replaced (no re-normalisation).
    pub fn with_probability(&self, gateway: &str, flow: &str, p: Probability) -> BoundScenario {
        let mut b = self.clone();
        b.branch_probability.insert((gateway.to_string(), flow.to_string()), p);
        b
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

pub fn bind(scenario: &Scenario, model: &ProcessModel) -> Result<BoundScenario, BindError> {
    let mut task_duration = BTreeMap::new();
    let mut missing = Vec::new();
    for node in model.nodes() {
        if !node.kind.is_task() {
            task_duration.insert(node.id.clone(), Duration::ZERO);
            continue;
        }
        let exact = scenario.durations.iter().find(|r| !r.is_glob() && r.matcher == node.label);
        let d = match exact {
            Some(r) => scenario.resolve(&r.matcher),
            None => {
                let hits: Vec<&DurationRule> =
                    scenario.durations.iter().filter(|r| r.is_glob() && glob_match(&r.matcher, &node.label)).collect();
                let values: BTreeSet<Option<Duration>> = hits.iter().map(|r| scenario.resolve(&r.matcher)).collect();
                if values.len() > 1 {
                    return Err(BindError::AmbiguousMatch {
                        element: node.label.clone(),
                        matchers: hits.iter().map(|r| r.matcher.clone()).collect(),
                    });
                }
                values.into_iter().next().flatten()
            }
        };
        match d {
            Some(d) => {
                task_duration.insert(node.id.clone(), d);
            }
            None => missing.push(node.label.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(BindError::MissingDuration(missing));
    }

    let mut branch_probability = BTreeMap::new();
    for g in model.nodes() {
        if g.kind.gateway_kind() != Some(GatewayKind::Exclusive) || model.out_degree(&g.id) < 2 {
            continue;
        }
        let mut given: Vec<(&str, Option<Probability>)> = Vec::new();
        for f in model.outgoing(&g.id) {
            let by_id = scenario.probabilities.iter().find(|r| r.flow == FlowRef::Flow(f.id.clone()));
            let p = match by_id {
                Some(r) => Some(r.value.clone()),
                None => {
                    let hits: Vec<&ProbabilityRule> = scenario
                        .probabilities
                        .iter()
                        .filter(|r| match &r.flow {
                            FlowRef::Condition { gateway, condition } => {
                                f.condition.as_deref() == Some(condition.as_str()) && glob_match(gateway, &g.label)
                            }
                            FlowRef::Flow(_) => false,
                        })
                        .collect();
                    let values: BTreeSet<&Probability> = hits.iter().map(|r| &r.value).collect();
                    if values.len() > 1 {
                        return Err(BindError::AmbiguousMatch {
                            element: f.id.clone(),
                            matchers: hits.iter().map(|r| r.flow.to_string()).collect(),
                        });
                    }
                    values.into_iter().next().cloned()
                }
            };
            given.push((f.id.as_str(), p));
        }

        let known: BigRational = given.iter().filter_map(|(_, p)| p.as_ref()).map(|p| p.0.clone()).sum();
        let unknown: Vec<&str> = given.iter().filter(|(_, p)| p.is_none()).map(|(f, _)| *f).collect();
        let sum_error =
            |sum: &BigRational| BindError::SumError { gateway: g.id.clone(), sum: sum.to_f64().unwrap_or(f64::NAN) };
        match unknown.as_slice() {
            [] => {
                let off = (&known - BigRational::one()).abs();
                if off.to_f64().unwrap_or(f64::INFINITY) > SUM_TOLERANCE {
                    return Err(sum_error(&known));
                }
            }
            [single] => {
                let rest = Probability::new(BigRational::one() - &known).ok_or_else(|| sum_error(&known))?;
                for (f, p) in given.iter_mut() {
                    if f == single {
                        *p = Some(rest.clone());
                    }
                }
            }
            _ => {
                return Err(BindError::MissingProbability {
                    gateway: g.id.clone(),
                    flows: unknown.iter().map(|s| s.to_string()).collect(),
                })
            }
        }
        for (f, p) in given {
            branch_probability.insert((g.id.clone(), f.to_string()), p.expect("filled above"));
        }
    }

    Ok(BoundScenario { scenario_name: scenario.name.clone(), model: model.clone(), task_duration, branch_probability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FlowNode, ProcessParts, SequenceFlow};

    #[test]
    fn durations_from_the_time_table() {
        assert_eq!("03:20:00".parse::<Duration>().unwrap().secs(), 12000);
        assert_eq!("05:00".parse::<Duration>().unwrap().secs(), 300);
        assert_eq!("02:36:00".parse::<Duration>().unwrap().secs(), 9360);
        assert_eq!("0:00".parse::<Duration>().unwrap().secs(), 0);
    }

    #[test]
    fn duration_errors() {
        assert!(matches!("60:00".parse::<Duration>(), Err(DurationError::Range(_))));
        assert!(matches!("1:00:60".parse::<Duration>(), Err(DurationError::Range(_))));
        assert!(matches!("5".parse::<Duration>(), Err(DurationError::Syntax(_))));
        assert!(matches!("1:2:3:4".parse::<Duration>(), Err(DurationError::Syntax(_))));
        assert!(matches!("a:00".parse::<Duration>(), Err(DurationError::Syntax(_))));
        assert!(matches!("-1:00".parse::<Duration>(), Err(DurationError::Syntax(_))));
    }

    #[test]
    fn duration_rendering() {
        assert_eq!(Duration::from_secs(32235).to_string(), "8:57:15");
        assert_eq!(Duration::from_secs(45).to_string(), "0:00:45");
        assert_eq!(Duration::from_secs(360_000 - 1).to_string(), "99:59:59");
        assert_eq!(format_signed(-690), "-0:11:30");
        assert_eq!(format_signed(0), "0:00:00");
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.05").unwrap(), BigRational::new(1.into(), 20.into()));
        assert_eq!(parse_decimal(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_decimal("1").unwrap(), BigRational::one());
        assert_eq!(parse_decimal("-0.1").unwrap(), BigRational::new((-1).into(), 10.into()));
        assert!(parse_decimal("1e-2").is_none());
        assert!(parse_decimal(".").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn single_lines() {
        let s = parse_scenario(b"\"Perform Fertilization\" = 03:20:00").unwrap();
        assert_eq!(s.durations[0].value, DurationValue::Fixed(Duration::from_secs(12000)));
        let s = parse_scenario(b"\"Pay Contractor for Service\" = 05:00").unwrap();
        assert_eq!(s.durations[0].value, DurationValue::Fixed(Duration::from_secs(300)));
        assert!(matches!(parse_scenario(b"p = 1.5"), Err(ScenarioError::Range { line: 1, .. })));
        assert!(matches!(parse_scenario(b"[probabilities]\np = -0.5"), Err(ScenarioError::Range { line: 2, .. })));
    }

    #[test]
    fn full_file() {
        let text = br#"
# estimated times
scenario "table-estimated-times"
[durations]
"Check Field Geo-Data in FMIS *" = 05:00   # glob row
"Plan Beet Seeding"              = 15:00
"Check Field Geo-Data"           = "Check Field Geo-Data in FMIS *"
[probabilities]
# gateway label / condition label / value
"Field Geo-Data up-to-date?" / "out-of-date" = 0.05
Flow_9 = 1
"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.name, "table-estimated-times");
        assert_eq!(s.durations.len(), 3);
        assert_eq!(s.resolve("Check Field Geo-Data"), Some(Duration::from_secs(300)));
        assert_eq!(s.probabilities.len(), 2);
        assert_eq!(
            s.probabilities[0].flow,
            FlowRef::Condition { gateway: "Field Geo-Data up-to-date?".into(), condition: "out-of-date".into() }
        );
        assert_eq!(parse_scenario(s.to_text().as_bytes()).unwrap(), s);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases: [(&[u8], usize); 6] = [
            (b"[durations]\n\"open = 05:00", 2),
            (b"[durations]\nPlan = 05:00", 2),
            (b"[weather]", 1),
            (b"\"a\" = 05:00\n\"a\" = 06:00", 2),
            (b"[probabilities]\n\"g\" / \"c\" = lots", 2),
            (b"\n\njust words", 3),
        ];
        for (text, line) in cases {
            match parse_scenario(text) {
                Err(ScenarioError::Syntax { line: l, .. }) => assert_eq!(l, line, "{}", String::from_utf8_lossy(text)),
                other => panic!("{other:?}"),
            }
        }
        assert!(parse_scenario(b"\"a\" = \"b\"").is_err());
        assert!(parse_scenario(b"\"a\" = \"b\"\n\"b\" = \"a\"").is_err());
        assert!(parse_scenario(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn globbing() {
        assert!(glob_match("Check Field Geo-Data in FMIS *", "Check Field Geo-Data in FMIS 3"));
        assert!(glob_match("Update FMIS * Field Geo-Data", "Update FMIS 2 Field Geo-Data"));
        assert!(!glob_match("Update FMIS * Field Geo-Data", "Update Field Twin Geo-Data"));
        assert!(glob_match("*", ""));
        assert!(glob_match("a*b*c", "aXXbYYc"));
        assert!(!glob_match("a*b*c", "aXXbYY"));
        assert!(glob_match("exact", "exact"));
        assert!(!glob_match("exact", "exactly"));
    }

    fn choice_model() -> ProcessModel {
        ProcessModel::new(ProcessParts {
            id: "P".into(),
            name: "P".into(),
            nodes: vec![
                FlowNode::start("s", "S"),
                FlowNode::task("c", "Check Data"),
                FlowNode::gateway("g", "Data ok?", GatewayKind::Exclusive),
                FlowNode::task("u", "Update Data"),
                FlowNode::gateway("j", "", GatewayKind::Exclusive),
                FlowNode::task("p", "Plan Work"),
                FlowNode::end("e", "E"),
            ],
            sequence_flows: vec![
                SequenceFlow::new("f1", "s", "c"),
                SequenceFlow::new("f2", "c", "g"),
                SequenceFlow::new("f3", "g", "u").with_condition("no"),
                SequenceFlow::new("f4", "g", "j").with_condition("yes"),
                SequenceFlow::new("f5", "u", "j"),
                SequenceFlow::new("f6", "j", "p"),
                SequenceFlow::new("f7", "p", "e"),
            ],
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn bind_complements_binary_split() {
        let sc =
            parse_scenario(b"\"* Data\" = 05:00\n\"Plan Work\" = 10:00\n[probabilities]\n\"Data *\" / \"no\" = 0.05")
                .unwrap();
        let b = bind(&sc, &choice_model()).unwrap();
        assert_eq!(b.duration("c"), Duration::from_secs(300));
        assert_eq!(b.duration("p"), Duration::from_secs(600));
        assert_eq!(b.duration("g"), Duration::ZERO);
        assert_eq!(b.duration("s"), Duration::ZERO);
        assert_eq!(b.probability("g", "f3"), &Probability::ratio(1, 20).unwrap());
        assert_eq!(b.probability("g", "f4"), &Probability::ratio(19, 20).unwrap());
    }

    #[test]
    fn exact_beats_glob() {
        let sc = Scenario::new("x")
            .with_duration("* Data", Duration::from_secs(1))
            .with_duration("Update Data", Duration::from_secs(7))
            .with_duration("Plan Work", Duration::from_secs(2))
            .with_probability(FlowRef::Flow("f3".into()), Probability::ratio(1, 2).unwrap());
        let b = bind(&sc, &choice_model()).unwrap();
        assert_eq!(b.duration("u"), Duration::from_secs(7));
        assert_eq!(b.duration("c"), Duration::from_secs(1));
    }

    #[test]
    fn bind_errors() {
        let base = Scenario::new("x")
            .with_duration("Check Data", Duration::from_secs(1))
            .with_duration("Update Data", Duration::from_secs(1));
        let m = choice_model();

        let err = bind(&base.clone().with_probability(FlowRef::Flow("f3".into()), Probability::one()), &m);
        assert_eq!(err.unwrap_err(), BindError::MissingDuration(vec!["Plan Work".into()]));

        let sc = base.clone().with_duration("Plan Work", Duration::from_secs(1));
        assert_eq!(
            bind(&sc, &m).unwrap_err(),
            BindError::MissingProbability { gateway: "g".into(), flows: vec!["f3".into(), "f4".into()] }
        );

        let bad = sc
            .clone()
            .with_probability(FlowRef::Flow("f3".into()), Probability::ratio(1, 2).unwrap())
            .with_probability(FlowRef::Flow("f4".into()), Probability::ratio(6, 10).unwrap());
        assert!(matches!(bind(&bad, &m), Err(BindError::SumError { .. })));

        let ambiguous = Scenario::new("x")
            .with_duration("* Data", Duration::from_secs(1))
            .with_duration("Check *", Duration::from_secs(2))
            .with_duration("Plan Work", Duration::from_secs(1));
        assert!(matches!(bind(&ambiguous, &m), Err(BindError::AmbiguousMatch { .. })));

        let agreeing = Scenario::new("x")
            .with_duration("* Data", Duration::from_secs(1))
            .with_duration("Check *", Duration::from_secs(1))
            .with_duration("Plan Work", Duration::from_secs(1))
            .with_probability(FlowRef::Flow("f4".into()), Probability::one());
        let b = bind(&agreeing, &m).unwrap();
        assert!(b.probability("g", "f3").is_zero());
    }

    #[test]
    fn decimal_rendering() {
        for s in ["0.05", "1", "0", "0.125", "0.333"] {
            let r = parse_decimal(s).unwrap();
            assert_eq!(parse_decimal(&decimal_string(&r)).unwrap(), r, "{s}");
        }
        assert_eq!(decimal_string(&parse_decimal("0.050").unwrap()), "0.05");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn duration_render_parse_round_trip(s in 0u64..360_000) {
                let d = Duration::from_secs(s);
                prop_assert_eq!(d.to_string().parse::<Duration>().unwrap(), d);
            }
        }
    }
}
