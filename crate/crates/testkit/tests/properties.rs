use proptest::prelude::*;

use sessioncheck_core::check::{check_file, CheckResult};
use sessioncheck_core::model::overlapping;
use sessioncheck_core::model::RoleId;
use sessioncheck_core::syntax::{parse, print, SessionExpr, SourceFile};
use sessioncheck_testkit::ast_gen::source_file;
use sessioncheck_testkit::oracle::{derive, FinalPath, FlatIndex};
use sessioncheck_testkit::overlap::{all_lists, is_subsequence_brute};
use sessioncheck_testkit::protocols::{call_free_protocol, step_count, MAX_STEPS};

fn checker_finals(result: &CheckResult) -> Vec<FinalPath> {
    result
        .final_indices
        .iter()
        .map(|(label, index)| FinalPath {
            arms: label.arms.clone(),
            terminator: label.terminator.clone(),
            index: index
                .items()
                .iter()
                .map(|item| (item.var.clone(), item.ty.clone(), item.knowers().to_vec()))
                .collect::<FlatIndex>(),
        })
        .collect()
}

fn reparse(file: &SourceFile) -> SourceFile {
    let text = print(file);
    parse(&text).unwrap_or_else(|e| panic!("printed file does not parse: {e:?}\n{text}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(file in source_file()) {
        let text = print(&file);
        let back = parse(&text);
        prop_assert!(back.is_ok(), "{:?}\n{}", back.err(), text);
        prop_assert_eq!(back.unwrap(), file);
    }

    #[test]
    fn print_is_idempotent(file in source_file()) {
        let once = print(&file);
        prop_assert_eq!(print(&parse(&once).unwrap()), once);
    }

    #[test]
    fn checker_agrees_with_prefix_scan(file in call_free_protocol()) {
        let body = &file.protocols().next().unwrap().body;
        prop_assert!(step_count(body) <= MAX_STEPS);
        let result = check_file(&file);
        let expected = derive(&file);
        let codes = result.error_codes().into_iter().collect();
        prop_assert_eq!(&expected.errors, &codes, "{}", print(&file));
        if expected.accepted() {
            prop_assert_eq!(expected.finals, checker_finals(&result), "{}", print(&file));
        } else {
            prop_assert!(result.final_indices.is_empty());
        }
    }

    #[test]
    fn knowers_grow_and_sends_touch_one_role(file in call_free_protocol()) {
        let file = reparse(&file);
        let result = check_file(&file);
        for step in &result.steps {
            for item in step.before.items() {
                let after = step.after.get(&item.var).expect("items are never dropped");
                prop_assert!(item.knowers().iter().all(|r| after.is_known_by(r)));
            }
            if step.summary.starts_with("send ") {
                let added: usize = step
                    .after
                    .items()
                    .iter()
                    .map(|a| a.knowers().len() - step.before.get(&a.var).map_or(0, |b| b.knowers().len()))
                    .sum();
                prop_assert!(added <= 1);
                prop_assert_eq!(step.before.len(), step.after.len());
            }
        }
    }
}

#[test]
fn overlapping_matches_subsequence_enumeration() {
    let alphabet: Vec<RoleId> = ["A", "B", "C"].iter().map(|r| RoleId::new(*r)).collect();
    let lists = all_lists(&alphabet, 5);
    for sub in &lists {
        for sup in &lists {
            assert_eq!(
                overlapping(sub, sup),
                is_subsequence_brute(sub, sup),
                "{sub:?} in {sup:?}"
            );
        }
    }
}

#[test]
fn generator_produces_both_verdicts() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = call_free_protocol();
    let (mut accepted, mut reads) = (0, 0);
    for _ in 0..500 {
        let file = strategy.new_tree(&mut runner).unwrap().current();
        if derive(&file).accepted() {
            accepted += 1;
        }
        let body = &file.protocols().next().unwrap().body;
        if body
            .stmts
            .iter()
            .any(|s| matches!(s.expr, SessionExpr::Read { .. }))
        {
            reads += 1;
        }
    }
    assert!(
        accepted > 50 && accepted < 450,
        "{accepted} of 500 accepted"
    );
    assert!(reads > 50, "{reads} of 500 branch");
}
