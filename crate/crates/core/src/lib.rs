//! Analysis toolkit for a BPMN 2.0 subset.
//!
//! Parses process models, checks them against structural and naming rules,
//! decomposes them into blocks, renders template-based descriptions,
//! detects data-related waste, and computes best/worst/expected processing
//! times under a duration and branch-probability scenario.

pub mod analyzer;
pub mod blocks;
pub mod bpmn;
pub mod corpus;
pub mod model;
pub mod paths;
pub mod scenario;
pub mod sim;
pub mod synth;
pub mod textgen;
pub mod verify;

pub use analyzer::{compare, detect_issues, render_register, IssueCategory, IssueFinding, RedesignReport, WasteGroup};
pub use blocks::{decompose_blocks, Block, BlockError, BlockTree, Branch, ChoiceKind};
pub use bpmn::{parse, serialize, BpmnError, IgnoredElement, ParseReport};
pub use model::{
    AccessDirection, Collaboration, DataAssociation, DataLabel, DataObject, DataStore, EventTrigger, FlowNode,
    GatewayKind, Lane, MessageFlow, ModelError, NodeKind, Pool, ProcessModel, ProcessParts, SequenceFlow, TaskMarker,
};
pub use paths::{enumerate_paths, ExecutionPath, PathError};
pub use scenario::{
    bind, format_signed, parse_scenario, BindError, BoundScenario, Duration, FlowRef, Probability, Scenario,
    ScenarioError,
};
pub use sim::{
    monte_carlo, monte_carlo_with, path_time, simulate, simulate_with, McReport, PathOutcome, SimError,
    SimulationReport, TimeMode,
};
pub use textgen::{describe, describe_model, Description, Sentence};
pub use verify::{validate_structure, validate_with, Code, Diagnostic, Severity, VerbLexicon};
