//! Processing-time analysis: best, worst and probability-weighted expected
//! time, computed exactly from the block structure, plus a seeded Monte
//! Carlo sampler for cross-checking.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::blocks::{decompose_blocks, Block, BlockError, ChoiceKind};
use crate::model::{GatewayKind, ProcessModel};
use crate::paths::{enumerate_paths, ExecutionPath, PathError};
use crate::scenario::{BoundScenario, Duration, Probability};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("the model contains a cycle; loops cannot be simulated")]
    CyclicModel,
    #[error("inclusive gateway `{0}` cannot be simulated")]
    InclusiveGatewayUnsupported(String),
    #[error(transparent)]
    Unstructured(#[from] BlockError),
    #[error(transparent)]
    Paths(PathError),
    #[error("sample count must be positive")]
    NoSamples,
}

impl From<PathError> for SimError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::CyclicModel => SimError::CyclicModel,
            PathError::InclusiveGatewayUnsupported(g) => SimError::InclusiveGatewayUnsupported(g),
            other => SimError::Paths(other),
        }
    }
}

/// How parallel branches combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeMode {
    /// Sum of all work on the path.
    #[default]
    Processing,
    /// Parallel branches overlap; a parallel block takes its longest branch.
    CycleTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub path: ExecutionPath,
    pub probability: Probability,
    pub duration: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub mode: TimeMode,
    pub best: Duration,
    pub worst: Duration,
    /// `expected_exact` rounded half-up to whole seconds.
    pub expected: Duration,
    pub expected_exact: BigRational,
    pub per_path: Vec<PathOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub n: u64,
    pub seed: u64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero for a single sample.
    pub stddev: f64,
    pub min: Duration,
    pub max: Duration,
}

/// Sum of task durations along a path. Events and gateways add nothing.
pub fn path_time(path: &ExecutionPath, bound: &BoundScenario) -> Duration {
    path.nodes.iter().map(|n| bound.duration(n)).sum()
}

pub fn simulate(model: &ProcessModel, bound: &BoundScenario) -> Result<SimulationReport, SimError> {
    simulate_with(model, bound, TimeMode::Processing)
}

pub fn simulate_with(
    model: &ProcessModel,
    bound: &BoundScenario,
    mode: TimeMode,
) -> Result<SimulationReport, SimError> {
    check_supported(model)?;
    let tree = decompose_blocks(model)?;

    let dist = distribution(&tree.root, bound, mode);
    let expected_exact: BigRational = dist.iter().map(|(t, p)| BigRational::from_integer(BigInt::from(*t)) * p).sum();

    let mut per_path = Vec::new();
    for path in enumerate_paths(model)? {
        let probability = path_probability(&path, bound);
        let duration = match mode {
            TimeMode::Processing => path_time(&path, bound),
            TimeMode::CycleTime => Duration::from_secs(fixed_time(&tree.root, bound, &path.branch_choices, mode)),
        };
        per_path.push(PathOutcome { path, probability, duration });
    }
    let live = per_path.iter().filter(|o| !o.probability.is_zero()).map(|o| o.duration);
    let best = live.clone().min().unwrap_or(Duration::ZERO);
    let worst = live.max().unwrap_or(Duration::ZERO);

    Ok(SimulationReport { mode, best, worst, expected: round_half_up(&expected_exact), expected_exact, per_path })
}

pub fn round_half_up(x: &BigRational) -> Duration {
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    let r = (x + half).floor().to_integer();
    Duration::from_secs(r.to_u64().unwrap_or(0))
}

fn check_supported(model: &ProcessModel) -> Result<(), SimError> {
    if model.has_cycle() {
        return Err(SimError::CyclicModel);
    }
    if let Some(g) = model.nodes().iter().find(|n| n.kind.gateway_kind() == Some(GatewayKind::Inclusive)) {
        return Err(SimError::InclusiveGatewayUnsupported(g.id.clone()));
    }
    Ok(())
}

fn path_probability(path: &ExecutionPath, bound: &BoundScenario) -> Probability {
    let p: BigRational = path.branch_choices.iter().map(|(g, f)| bound.probability(g, f).as_ratio().clone()).product();
    Probability::new(p).expect("product of probabilities stays in [0, 1]")
}

type Dist = BTreeMap<u64, BigRational>;

fn point(t: u64) -> Dist {
    BTreeMap::from([(t, BigRational::one())])
}

fn combine(a: &Dist, b: &Dist, op: impl Fn(u64, u64) -> u64) -> Dist {
    let mut out = Dist::new();
    for (ta, pa) in a {
        for (tb, pb) in b {
            *out.entry(op(*ta, *tb)).or_insert_with(BigRational::zero) += pa * pb;
        }
    }
    out
}

/// Exact distribution of a block's time under the bound probabilities.
fn distribution(block: &Block, bound: &BoundScenario, mode: TimeMode) -> Dist {
    match block {
        Block::Leaf(id) => point(bound.duration(id).secs()),
        Block::Sequence(items) => {
            items.iter().fold(point(0), |acc, b| combine(&acc, &distribution(b, bound, mode), |x, y| x + y))
        }
        Block::Choice { gateway, branches, kind, .. } => {
            debug_assert_eq!(*kind, ChoiceKind::Exclusive, "inclusive choices are rejected up front");
            let mut out = Dist::new();
            for br in branches {
                let p = bound.probability(gateway, &br.flow).as_ratio();
                if p.is_zero() {
                    continue;
                }
                for (t, q) in distribution(&br.body, bound, mode) {
                    *out.entry(t).or_insert_with(BigRational::zero) += p * q;
                }
            }
            out
        }
        Block::Parallel { branches, .. } => branches.iter().fold(point(0), |acc, br| {
            let d = distribution(&br.body, bound, mode);
            match mode {
                TimeMode::Processing => combine(&acc, &d, |x, y| x + y),
                TimeMode::CycleTime => combine(&acc, &d, u64::max),
            }
        }),
        Block::Loop { .. } => unreachable!("cyclic models are rejected up front"),
    }
}

/// Time of a block with every exclusive choice fixed in advance.
fn fixed_time(block: &Block, bound: &BoundScenario, choices: &BTreeMap<String, String>, mode: TimeMode) -> u64 {
    match block {
        Block::Leaf(id) => bound.duration(id).secs(),
        Block::Sequence(items) => items.iter().map(|b| fixed_time(b, bound, choices, mode)).sum(),
        Block::Choice { gateway, branches, .. } => branches
            .iter()
            .find(|b| choices.get(gateway) == Some(&b.flow))
            .map_or(0, |b| fixed_time(&b.body, bound, choices, mode)),
        Block::Parallel { branches, .. } => {
            let times = branches.iter().map(|b| fixed_time(&b.body, bound, choices, mode));
            match mode {
                TimeMode::Processing => times.sum(),
                TimeMode::CycleTime => times.max().unwrap_or(0),
            }
        }
        Block::Loop { .. } => unreachable!("cyclic models are rejected up front"),
    }
}

fn sample(block: &Block, bound: &BoundScenario, mode: TimeMode, rng: &mut ChaCha8Rng) -> u64 {
    match block {
        Block::Leaf(id) => bound.duration(id).secs(),
        Block::Sequence(items) => items.iter().map(|b| sample(b, bound, mode, rng)).sum(),
        Block::Choice { gateway, branches, .. } => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = None;
            for br in branches {
                let p = bound.probability(gateway, &br.flow);
                if p.is_zero() {
                    continue;
                }
                acc += p.to_f64();
                chosen = Some(br);
                if u < acc {
                    break;
                }
            }
            chosen.map_or(0, |b| sample(&b.body, bound, mode, rng))
        }
        Block::Parallel { branches, .. } => {
            let times = branches.iter().map(|b| sample(&b.body, bound, mode, rng));
            match mode {
                TimeMode::Processing => times.sum(),
                TimeMode::CycleTime => times.fold(0, u64::max),
            }
        }
        Block::Loop { .. } => unreachable!("cyclic models are rejected up front"),
    }
}

/// Replication `i` draws from ChaCha8 stream `i` of `seed`, so the report
/// does not depend on how replications are scheduled across threads.
pub fn monte_carlo(model: &ProcessModel, bound: &BoundScenario, n: u64, seed: u64) -> Result<McReport, SimError> {
    monte_carlo_with(model, bound, n, seed, TimeMode::Processing)
}

pub fn monte_carlo_with(
    model: &ProcessModel,
    bound: &BoundScenario,
    n: u64,
    seed: u64,
    mode: TimeMode,
) -> Result<McReport, SimError> {
    if n == 0 {
        return Err(SimError::NoSamples);
    }
    check_supported(model)?;
    let tree = decompose_blocks(model)?;

    let (sum, sum_sq, min, max) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let t = sample(&tree.root, bound, mode, &mut rng) as u128;
            (t, t * t, t, t)
        })
        .reduce(|| (0, 0, u128::MAX, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.min(b.2), a.3.max(b.3)));

    let nn = n as u128;
    let mean = sum as f64 / n as f64;
    let stddev = if n > 1 {
        // Exact integer numerator: n * sum(t^2) - (sum t)^2.
        let num = nn * sum_sq - sum * sum;
        (num as f64 / (nn * (nn - 1)) as f64).sqrt()
    } else {
        0.0
    };
    Ok(McReport { n, seed, mean, stddev, min: Duration::from_secs(min as u64), max: Duration::from_secs(max as u64) })
}
