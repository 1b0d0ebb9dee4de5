//! The sugar beet fixtures, embedded.

pub const AS_IS_BPMN: &str = include_str!("../../../fixtures/sugar_beet_as_is.bpmn");
pub const TO_BE_BPMN: &str = include_str!("../../../fixtures/sugar_beet_to_be.bpmn");
pub const TIMES_SCN: &str = include_str!("../../../fixtures/paper_times.scn");
