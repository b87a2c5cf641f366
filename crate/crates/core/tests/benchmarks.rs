use kcplan::background::evaluate_background;
use kcplan::grounder::{ground, GroundDomain, GroundOptions};
use kcplan::planner::{
    find_optimal_plans, find_optimistic_plans, goal_holds, Enumerate, PlanDisplay, PlanVerdict,
};
use kcplan::syntax::parse_program;
use kcplan::transition::{is_legal_initial_state, is_legal_transition};

fn fixture(path: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/../../fixtures/{path}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn domain(files: &[&str], l: usize, n: i64) -> GroundDomain {
    let texts: Vec<String> = files.iter().map(|f| fixture(f)).collect();
    let p = parse_program(&texts).unwrap();
    let m = evaluate_background(&p.background, n).unwrap();
    ground(&p, &m, l, GroundOptions::default()).unwrap()
}

/// The witness is a legal trajectory that executes the plan and ends in
/// the goal.
fn check_witness(gd: &GroundDomain, v: &PlanVerdict) {
    let w = &v.witness;
    assert!(is_legal_initial_state(gd, &w.initial));
    assert_eq!(w.transitions.len(), v.plan.steps.len());
    let mut s = &w.initial;
    for (t, a) in w.transitions.iter().zip(&v.plan.steps) {
        assert_eq!(&t.from, s);
        assert_eq!(&t.actions, a);
        assert!(is_legal_transition(gd, t));
        s = &t.to;
    }
    assert!(goal_holds(gd, w.final_state()));
}

#[test]
fn blocks_p0() {
    let gd = domain(&["blocks/blocks.bk", "blocks/blocks.plan"], 3, 0);
    assert!(find_optimal_plans(&gd, 1, Enumerate::First)
        .unwrap()
        .is_none());
    let (c2, p2) = find_optimal_plans(&gd, 2, Enumerate::First)
        .unwrap()
        .unwrap();
    println!(
        "{}",
        PlanDisplay {
            gd: &gd,
            plan: &p2[0].plan
        }
    );
    assert_eq!(c2, 6);
    check_witness(&gd, &p2[0]);
    let (c3, p3) = find_optimal_plans(&gd, 3, Enumerate::First)
        .unwrap()
        .unwrap();
    println!(
        "{}",
        PlanDisplay {
            gd: &gd,
            plan: &p3[0].plan
        }
    );
    assert_eq!(c3, 5);
    check_witness(&gd, &p3[0]);
}

#[test]
fn tsp_austria() {
    let gd = domain(&["tsp/tsp.bk", "tsp/tsp.plan"], 9, 0);
    let (c, plans) = find_optimal_plans(&gd, 9, Enumerate::All).unwrap().unwrap();
    for v in &plans {
        println!(
            "{}",
            PlanDisplay {
                gd: &gd,
                plan: &v.plan
            }
        );
    }
    assert_eq!(c, 15);
    assert_eq!(plans.len(), 10);
    plans.iter().for_each(|v| check_witness(&gd, v));
}

#[test]
fn buying() {
    let gd = domain(&["buying/buying.bk", "buying/buying.plan"], 1, 10);
    assert!(find_optimistic_plans(&gd, 1, Enumerate::First, Some(6))
        .unwrap()
        .is_empty());
    let (c, plans) = find_optimal_plans(&gd, 1, Enumerate::All).unwrap().unwrap();
    println!(
        "{}",
        PlanDisplay {
            gd: &gd,
            plan: &plans[0].plan
        }
    );
    assert_eq!(c, 7);
    check_witness(&gd, &plans[0]);
}

#[test]
fn tsp_weekday_exceptions() {
    let base = ["tsp/tsp.bk", "tsp/weekdays.bk", "tsp/tsp_weekdays.plan"];
    for (extra, expected) in [
        (None, 15),
        (Some("tsp/exc.bk"), 15),
        (Some("tsp/we.bk"), 12),
        (Some("tsp/lwe.bk"), 11),
    ] {
        let mut files = base.to_vec();
        files.extend(extra);
        let gd = domain(&files, 9, 10);
        let (c, _) = find_optimal_plans(&gd, 9, Enumerate::First)
            .unwrap()
            .unwrap();
        assert_eq!(c, expected, "{extra:?}");
    }
}
