mod common;

use bpmn_twin::corpus::{AS_IS_BPMN, TO_BE_BPMN};
use bpmn_twin::{
    bind, compare, detect_issues, parse, parse_scenario, Collaboration, DataAssociation, DataStore, Duration, FlowNode,
    IssueCategory, ProcessModel, ProcessParts, WasteGroup,
};
use common::{as_is, chain, to_be};

fn collab(doc: &str) -> Collaboration {
    parse(doc.as_bytes()).unwrap().model
}

fn merged_stores(c: &Collaboration) -> Collaboration {
    let p = c.processes().next().unwrap();
    let mut parts = p.clone().into_parts();
    let ids: Vec<String> = parts.data_stores.iter().map(|s| s.id.clone()).collect();
    parts.data_stores = vec![DataStore::new("Store_All", "Shared DB")];
    for a in parts.data_associations.iter_mut() {
        if ids.contains(&a.artifact) {
            a.artifact = "Store_All".into();
        }
    }
    // Merging can leave the same node linked twice to the one store.
    let mut seen = std::collections::BTreeSet::new();
    parts.data_associations.retain(|a| seen.insert((a.node.clone(), a.artifact.clone(), a.direction)));
    Collaboration::from_process(ProcessModel::new(parts).unwrap())
}

#[test]
fn as_is_findings() {
    let f = detect_issues(&collab(AS_IS_BPMN));
    assert_eq!(f.len(), 3);
    assert_eq!(f[0].category, IssueCategory::Overprocessing);
    assert_eq!(f[0].waste_group, WasteGroup::Overdo);
    assert_eq!(f[0].duplication_factor, Some(3));
    assert_eq!(f[0].elements.len(), 9);
    assert!(f.iter().all(|x| !x.elements.is_empty() && x.quantitative_impact == "Not applicable"));
    assert_eq!(f.iter().map(|x| x.id.as_str()).collect::<Vec<_>>(), ["ISSUE-1", "ISSUE-2", "ISSUE-3"]);
}

#[test]
fn to_be_is_clean() {
    assert!(detect_issues(&collab(TO_BE_BPMN)).is_empty());
}

#[test]
fn one_task_one_store_is_clean() {
    let parts = ProcessParts {
        id: "P".into(),
        name: "One".into(),
        nodes: vec![FlowNode::start("s", "go"), FlowNode::task("t", "Write Note"), FlowNode::end("e", "done")],
        sequence_flows: chain(&[("s", "t"), ("t", "e")]),
        data_objects: vec![bpmn_twin::DataObject::new("d", "Note (Text)")],
        data_stores: vec![DataStore::new("db", "Notes DB")],
        data_associations: vec![DataAssociation::write("a1", "t", "d"), DataAssociation::write("a2", "t", "db")],
        ..Default::default()
    };
    let c = Collaboration::from_process(ProcessModel::new(parts).unwrap());
    assert!(detect_issues(&c).is_empty());
}

#[test]
fn merging_stores_removes_store_driven_findings() {
    let f = detect_issues(&merged_stores(&collab(AS_IS_BPMN)));
    assert!(f.iter().all(|x| x.category != IssueCategory::DataDistribution));
    assert!(f.iter().all(|x| x.category != IssueCategory::Overprocessing));
}

#[test]
fn fixture_comparison() {
    let (_, ab) = as_is();
    let (_, bb) = to_be();
    let r = compare(&collab(AS_IS_BPMN), &collab(TO_BE_BPMN), &ab, &bb).unwrap();
    assert_eq!((r.task_count_a, r.task_count_b), (18, 14));
    assert_eq!(r.tasks_added, ["Check Field Geo-Data", "Update Field Twin Geo-Data"]);
    assert_eq!(r.tasks_removed.len(), 6);
    assert_eq!(r.task_count_a - r.tasks_removed.len() + r.tasks_added.len(), r.task_count_b);
    assert_eq!(r.deltas(), (-600, -2400, -690));
    assert_eq!(r.resolved_issues.len(), 3);
    assert_eq!(r.heuristic_tags, ["task elimination", "integral technology"]);
}

#[test]
fn comparison_is_mirrored() {
    let (_, ab) = as_is();
    let (_, bb) = to_be();
    let (a, b) = (collab(AS_IS_BPMN), collab(TO_BE_BPMN));
    let ab_r = compare(&a, &b, &ab, &bb).unwrap();
    let ba_r = compare(&b, &a, &bb, &ab).unwrap();
    assert_eq!(ab_r.tasks_removed, ba_r.tasks_added);
    assert_eq!(ab_r.tasks_added, ba_r.tasks_removed);
    let (x, y, z) = ab_r.deltas();
    assert_eq!(ba_r.deltas(), (-x, -y, -z));
    assert!(ba_r.resolved_issues.is_empty());
}

#[test]
fn identity_comparison() {
    let (_, ab) = as_is();
    let a = collab(AS_IS_BPMN);
    let r = compare(&a, &a, &ab, &ab).unwrap();
    assert!(r.tasks_removed.is_empty() && r.tasks_added.is_empty());
    assert_eq!(r.deltas(), (0, 0, 0));
    assert!(r.heuristic_tags.is_empty());
}

#[test]
fn relabelled_task() {
    let (m, _) = as_is();
    let mut parts = m.clone().into_parts();
    let t = parts.nodes.iter_mut().find(|n| n.label == "Plan Beet Harvesting").unwrap();
    t.label = "Schedule Beet Harvesting".into();
    let m2 = ProcessModel::new(parts).unwrap();
    let s = parse_scenario(common::TIMES.as_bytes())
        .unwrap()
        .with_duration("Schedule Beet Harvesting", Duration::from_secs(20 * 60));
    let r = compare(
        &Collaboration::from_process(m.clone()),
        &Collaboration::from_process(m2.clone()),
        &bind(&s, &m).unwrap(),
        &bind(&s, &m2).unwrap(),
    )
    .unwrap();
    assert_eq!(r.tasks_removed, ["Plan Beet Harvesting"]);
    assert_eq!(r.tasks_added, ["Schedule Beet Harvesting"]);
    assert_eq!(r.deltas(), (0, 0, 0));
}
