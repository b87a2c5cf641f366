use std::fs;
use std::path::PathBuf;

use kcplan::syntax::{expand_macros, parse_program, validate, Program};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load(files: &[&str]) -> Program {
    let texts: Vec<String> = files.iter().map(|f| fixture(f)).collect();
    parse_program(&texts).unwrap_or_else(|e| panic!("{files:?}: {e}"))
}

const PROBLEMS: &[&[&str]] = &[
    &["bridge/bridge.bk", "bridge/bridge.plan"],
    &["bridge/bridge_costs.bk", "bridge/bridge_costs.plan"],
    &["bridge/bridge_costs.bk", "bridge/bridge_secure.plan"],
    &["blocks/blocks.bk", "blocks/blocks.plan"],
    &["tsp/tsp.bk", "tsp/tsp.plan"],
    &[
        "tsp/tsp.bk",
        "tsp/weekdays.bk",
        "tsp/exc.bk",
        "tsp/tsp_weekdays.plan",
    ],
    &["buying/buying.bk", "buying/buying.plan"],
];

#[test]
fn fixtures_round_trip() {
    for files in PROBLEMS {
        let p = load(files);
        let printed = p.to_string();
        let q = parse_program(&[&printed]).unwrap_or_else(|e| panic!("{files:?}: {e}\n{printed}"));
        assert_eq!(p, q, "{files:?}");
        let split = parse_program(&[p.background_text(), p.plan_text()]).unwrap();
        assert_eq!(p, split, "{files:?}");
    }
}

#[test]
fn fixtures_are_valid() {
    for files in PROBLEMS {
        let p = expand_macros(&load(files)).unwrap();
        assert_eq!(validate(&p), vec![], "{files:?}");
    }
}

#[test]
fn macro_expansion_is_idempotent_on_fixtures() {
    for files in PROBLEMS {
        let p = load(files);
        let once = expand_macros(&p).unwrap();
        assert_eq!(expand_macros(&once).unwrap(), once);
        assert_eq!(once.symbols(), p.symbols());
    }
}

#[test]
fn declarations_of_the_bridge_problem() {
    let p = load(&["bridge/bridge_costs.bk", "bridge/bridge_costs.plan"]);
    let cross = p.action_decl("cross").unwrap();
    assert_eq!(
        cross.to_string(),
        "cross(X) requires person(X) costs WX where walk(X,WX)."
    );
    assert!(p.no_concurrency);
    let q = p.query.as_ref().unwrap();
    assert_eq!(q.goal_pos.len(), 4);
    assert_eq!(q.plan_length, None);
}
