mod common;

use bpmn_twin::corpus::{AS_IS_BPMN, TO_BE_BPMN};
use bpmn_twin::{decompose_blocks, describe, describe_model, FlowNode};
use common::{build, chain, fixture, template_models};

fn text(i: usize) -> String {
    describe_model(&template_models()[i]).unwrap().render(false)
}

#[test]
fn single_task_gives_three_sentences() {
    let m = build(
        "Tiny",
        vec![FlowNode::start("s", "asked"), FlowNode::task("t", "Answer Question"), FlowNode::end("e", "answered")],
        chain(&[("s", "t"), ("t", "e")]),
    );
    let d = describe_model(&m).unwrap();
    let lines: Vec<&str> = d.sentences.iter().map(|s| s.text.as_str()).collect();
    assert_eq!(
        lines,
        ["The Tiny process starts when asked.", "Then, Answer Question.", "The process ends with answered."]
    );
}

#[test]
fn sequence_connectors_cycle() {
    assert_eq!(
        text(0),
        "The Order Handling process starts when an order arrives.\n\
         Then, Check Order.\n\
         After that, Pack Goods.\n\
         Subsequently, Ship Parcel.\n\
         The process ends with the parcel shipped.\n"
    );
}

#[test]
fn exclusive_block() {
    let t = text(1);
    assert!(t.contains("After that, the item may either be available, or missing.\n"), "{t}");
    assert!(t.contains("If available, Reserve Item.\n"));
    assert!(t.contains("If missing, Order Item.\n"));
    assert!(t.contains("In any of these cases, Notify Customer.\n"));
}

#[test]
fn inclusive_block() {
    let t = text(2);
    assert!(t.contains("Then, two alternative procedures may be executed.\n"), "{t}");
    assert!(t.contains("In the first procedure, Do Part 0.\n"));
    assert!(t.contains("In the second procedure, Do Part 1.\n"));
    assert!(t.contains("Afterwards, Close Case.\n"));
}

#[test]
fn parallel_block() {
    let t = text(3);
    assert!(t.contains("Then, three procedures are executed in an arbitrary order.\nDo Part 0.\n"), "{t}");
    assert!(t.contains("In the meantime, Do Part 1.\n"));
    assert!(t.contains("At the same time, Do Part 2.\n"));
    assert!(t.contains("After each case, Close Case.\n"));
}

#[test]
fn loop_block() {
    let t = text(4);
    assert!(t.contains("If required, the latter steps are repeated and continue with Revise Draft.\n"), "{t}");
    assert!(t.contains("Once the loop is finished, Publish Draft.\n"));
}

#[test]
fn empty_branch_names_the_next_step() {
    let d = describe_model(&fixture(AS_IS_BPMN)).unwrap().render(false);
    assert!(d.contains(
        "the FMIS 1 Field Geo-Data may either be out-of-date, or up-to-date, in which case nothing further is required before the branches join again."
    ));
    assert!(d.contains("If out-of-date, Update FMIS 1 Field Geo-Data.\n"));
}

#[test]
fn to_be_opening_sentence() {
    let d = describe_model(&fixture(TO_BE_BPMN)).unwrap();
    assert_eq!(d.sentences[0].text, "The Sugar Beet Farming To-Be process starts when Decision to Plant Beet Made.");
}

#[test]
fn fixtures_cover_each_task_once_in_order() {
    for doc in [AS_IS_BPMN, TO_BE_BPMN] {
        let m = fixture(doc);
        let tree = decompose_blocks(&m).unwrap();
        let d = describe(&m, &tree);
        let mut seen = Vec::new();
        for (i, s) in d.sentences.iter().enumerate() {
            for e in &s.elements {
                if m.node(e).is_some_and(|n| n.kind.is_task() || n.kind.is_event()) {
                    seen.push((e.clone(), i));
                }
            }
        }
        let order: Vec<&str> = seen.iter().map(|(e, _)| e.as_str()).collect();
        assert_eq!(order, tree.leaves());
        for t in m.tasks() {
            assert_eq!(d.render(false).matches(&t.label).count(), 1, "{}", t.label);
        }
        assert_eq!(d.render(true), describe(&m, &tree).render(true));
    }
}

#[test]
fn annotated_mode_lists_ids() {
    let d = describe_model(&template_models()[0]).unwrap().render(true);
    assert!(d.starts_with("The Order Handling process starts when an order arrives.  [ids: s]\n"));
}
