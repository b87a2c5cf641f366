use std::collections::BTreeSet;
use std::time::Instant;

use kcplan::background::evaluate_background;
use kcplan::grounder::{ground, GroundDomain, GroundOptions};
use kcplan::planner::{
    find_optimal_plans, find_optimal_secure_plans, find_optimistic_plans, Enumerate, Plan,
    PlanDisplay,
};
use kcplan::rewriter::{
    rewrite_beta, rewrite_delta, rewrite_gamma, Decode, Decoded, Factor, RewriteError,
    RewriteOptions, RewriteResult,
};
use kcplan::syntax::{parse_program, validate, Program};
use kcplan::transition::ActionSet;

fn fixture(path: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/../../fixtures/{path}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn program(files: &[&str]) -> Program {
    let texts: Vec<String> = files.iter().map(|f| fixture(f)).collect();
    parse_program(&texts).unwrap()
}

/// Solves the rewritten problem after a round trip through its text.
fn solve(r: &RewriteResult, n: i64) -> (i64, Decoded) {
    let p = parse_program(&[r.program.to_string()]).unwrap();
    let m = evaluate_background(&p.background, n).unwrap();
    let gd = ground(&p, &m, r.horizon, GroundOptions::default()).unwrap();
    let (c, plans) = find_optimal_plans(&gd, r.horizon, Enumerate::First)
        .unwrap()
        .unwrap();
    println!(
        "{}",
        PlanDisplay {
            gd: &gd,
            plan: &plans[0].plan
        }
    );
    (c, r.decode_plan(&gd, &plans[0].plan).unwrap())
}

#[test]
fn blocks_gamma() {
    let p = program(&["blocks/blocks.bk", "blocks/blocks.plan"]);
    let t = Instant::now();
    let r = rewrite_gamma(&p, 6, &RewriteOptions::default()).unwrap();
    let (c, d) = solve(&r, 0);
    println!("{:?}", t.elapsed());
    assert_eq!(c, 39);
    assert_eq!(d, Decoded { steps: 3, cost: 5 });
}

#[test]
fn blocks_delta() {
    let p = program(&["blocks/blocks.bk", "blocks/blocks.plan"]);
    let t = Instant::now();
    let r = rewrite_delta(&p, 6, Factor::Trusted(42), &RewriteOptions::default()).unwrap();
    let (c, d) = solve(&r, 0);
    println!("{:?}", t.elapsed());
    assert_eq!(c, 132);
    assert_eq!(d, Decoded { steps: 2, cost: 6 });
}

#[test]
fn gamma_program_text() {
    let p = program(&["blocks/blocks.bk", "blocks/blocks.plan"]);
    let r = rewrite_gamma(&p, 6, &RewriteOptions::default()).unwrap();
    assert_eq!(
        r.program,
        program(&["blocks/blocks.bk", "blocks/blocks_gamma.plan"])
    );
    assert_eq!(r.horizon, 7);
    assert_eq!(r.required_int_bound, 7);
    assert!(validate(&r.program).is_empty());
}

#[test]
fn delta_factor() {
    let p = program(&["blocks/blocks.bk", "blocks/blocks.plan"]);
    let opts = RewriteOptions::default();
    // 42 legal move instances at 7 steps, plus one.
    let safe = rewrite_delta(&p, 6, Factor::Safe, &opts).unwrap();
    assert_eq!(safe.decode, Decode::CheapestShortest { factor: 295 });
    assert!(safe.warnings.is_empty());
    assert!(validate(&safe.program).is_empty());
    assert!(matches!(
        rewrite_delta(&p, 6, Factor::Checked(42), &opts),
        Err(RewriteError::FactorTooLow {
            given: 42,
            safe: 295
        })
    ));
    let trusted = rewrite_delta(&p, 6, Factor::Trusted(42), &opts).unwrap();
    assert_eq!(trusted.warnings.len(), 1);
    assert_eq!(trusted.required_int_bound, 7 * 42);
    assert_eq!(safe.required_int_bound, 7 * 295);
}

fn without_costs(mut p: Program) -> Program {
    for d in &mut p.actions {
        d.cost = None;
        d.cost_where.clear();
    }
    p
}

/// The least plan length with an optimistic (or secure) plan, by
/// iterative deepening over the original program.
fn shortest(p: &Program, max: usize, secure: bool) -> Option<usize> {
    let m = evaluate_background(&p.background, 0).unwrap();
    (0..=max).find(|&l| {
        let gd = ground(p, &m, l, GroundOptions::default()).unwrap();
        if secure {
            find_optimal_secure_plans(&gd, l, Enumerate::First)
                .unwrap()
                .is_some()
        } else {
            find_optimal_plans(&gd, l, Enumerate::First)
                .unwrap()
                .is_some()
        }
    })
}

#[test]
fn beta_matches_iterative_deepening() {
    for (files, i) in [
        (&["blocks/blocks.bk", "blocks/blocks.plan"][..], 6),
        (&["bridge/bridge.bk", "bridge/bridge.plan"][..], 8),
    ] {
        let p = without_costs(program(files));
        let r = rewrite_beta(&p, i, &RewriteOptions::default()).unwrap();
        assert!(validate(&r.program).is_empty());
        let (c, d) = solve(&r, 0);
        let j = shortest(&p, i, false).unwrap();
        assert_eq!(d.steps, j, "{files:?}");
        assert_eq!(c as usize, j + 1);
    }
}

#[test]
fn beta_goal_true_initially() {
    let p = parse_program(&[
        "fluents: f.\nactions: a.\nalways: executable a.\ninitially: f.\ngoal: f? (3)",
    ])
    .unwrap();
    let r = rewrite_beta(&p, 0, &RewriteOptions::default()).unwrap();
    let (c, d) = solve(&r, 0);
    assert_eq!((c, d.steps), (1, 0));
}

#[test]
fn beta_secure_bridge() {
    let p = without_costs(program(&[
        "bridge/bridge_costs.bk",
        "bridge/bridge_secure.plan",
    ]));
    let r = rewrite_beta(&p, 7, &RewriteOptions::default()).unwrap();
    let q = parse_program(&[r.program.to_string()]).unwrap();
    let m = evaluate_background(&q.background, 0).unwrap();
    let gd = ground(&q, &m, r.horizon, GroundOptions::default()).unwrap();
    let (c, plans) = find_optimal_secure_plans(&gd, r.horizon, Enumerate::First)
        .unwrap()
        .unwrap();
    let d = r.decode_plan(&gd, &plans[0].plan).unwrap();
    assert_eq!(Some(d.steps), shortest(&p, 7, true));
    assert_eq!(c as usize, d.steps + 1);
}

#[test]
fn fresh_symbols() {
    let src = "fluents: gr.\nactions: a.\nalways: executable a.\ncaused gr after a.\ngoal: gr? (1)";
    let p = parse_program(&[src]).unwrap();
    assert!(
        matches!(rewrite_beta(&p, 1, &RewriteOptions::default()), Err(RewriteError::Clash(n)) if n == "gr")
    );
    let opts = RewriteOptions {
        rename_on_clash: true,
        ..RewriteOptions::default()
    };
    let r = rewrite_beta(&p, 1, &opts).unwrap();
    assert_ne!(r.gr, "gr");
    assert_eq!(r.finish, "finish");
    assert!(validate(&r.program).is_empty());
    let (c, d) = solve(&r, 0);
    assert_eq!((c, d.steps), (2, 1));
}

#[test]
fn beta_rejects_costs() {
    let p = program(&["blocks/blocks.bk", "blocks/blocks.plan"]);
    assert!(
        matches!(rewrite_beta(&p, 6, &RewriteOptions::default()), Err(RewriteError::HasCosts(n)) if n == "move")
    );
}

/// Every plan of the toy instance of length at most `i`, with its length.
fn all_plans(p: &Program, i: usize) -> Vec<(usize, Plan)> {
    let m = evaluate_background(&p.background, 0).unwrap();
    let mut out = Vec::new();
    for l in 0..=i {
        let gd = ground(p, &m, l, GroundOptions::default()).unwrap();
        out.extend(
            find_optimistic_plans(&gd, l, Enumerate::All, None)
                .unwrap()
                .into_iter()
                .map(|v| (l, v.plan)),
        );
    }
    out
}

/// Optimal plans of a rewritten problem, cut before `finish`; checks that
/// only empty steps follow it.
fn optimal_prefixes(r: &RewriteResult) -> (i64, BTreeSet<Vec<ActionSet>>) {
    let q = parse_program(&[r.program.to_string()]).unwrap();
    let m = evaluate_background(&q.background, 0).unwrap();
    let gd = ground(&q, &m, r.horizon, GroundOptions::default()).unwrap();
    let (c, plans) = find_optimal_plans(&gd, r.horizon, Enumerate::All)
        .unwrap()
        .unwrap();
    let mut out = BTreeSet::new();
    for v in plans {
        let t = r.finish_time(&gd, &v.plan).unwrap();
        assert_eq!(v.plan.steps[t - 1].len(), 1);
        assert!(v.plan.steps[t..].iter().all(|a| a.is_empty()));
        out.insert(v.plan.steps[..t - 1].to_vec());
    }
    (c, out)
}

type Named = BTreeSet<Vec<Vec<String>>>;

fn named(gd: &GroundDomain, plans: impl IntoIterator<Item = Vec<ActionSet>>) -> Named {
    plans
        .into_iter()
        .map(|steps| {
            steps
                .iter()
                .map(|a| a.0.iter().map(|&x| gd.action_name(x)).collect())
                .collect()
        })
        .collect()
}

fn domain_of(p: &Program, l: usize) -> GroundDomain {
    let m = evaluate_background(&p.background, 0).unwrap();
    ground(p, &m, l, GroundOptions::default()).unwrap()
}

fn rewritten_names(r: &RewriteResult, plans: &BTreeSet<Vec<ActionSet>>) -> Named {
    let q = parse_program(&[r.program.to_string()]).unwrap();
    named(&domain_of(&q, r.horizon), plans.iter().cloned())
}

fn original_names(p: &Program, l: usize, plans: &[Plan]) -> Named {
    named(&domain_of(p, l), plans.iter().map(|v| v.steps.clone()))
}

#[test]
fn toy_correspondences() {
    let p = program(&["blocks/toy.bk", "blocks/toy.plan"]);
    let i = 3;
    let all = all_plans(&p, i);

    // Shortest among the cheapest.
    let best = all.iter().map(|(l, v)| (v.cost, *l)).min().unwrap();
    let expected: Vec<Plan> = all
        .iter()
        .filter(|(l, v)| (v.cost, *l) == best)
        .map(|(_, v)| v.clone())
        .collect();
    let r = rewrite_gamma(&p, i, &RewriteOptions::default()).unwrap();
    let (c, got) = optimal_prefixes(&r);
    assert_eq!(best, (2, 2));
    assert_eq!(c, (i as i64 + 1) * best.0 + best.1 as i64 + 1);
    assert_eq!(
        rewritten_names(&r, &got),
        original_names(&p, best.1, &expected)
    );

    // Cheapest among the shortest.
    let best = all.iter().map(|(l, v)| (*l, v.cost)).min().unwrap();
    let expected: Vec<Plan> = all
        .iter()
        .filter(|(l, v)| (*l, v.cost) == best)
        .map(|(_, v)| v.clone())
        .collect();
    let r = rewrite_delta(&p, i, Factor::Safe, &RewriteOptions::default()).unwrap();
    let Decode::CheapestShortest { factor } = r.decode else {
        unreachable!()
    };
    let (c, got) = optimal_prefixes(&r);
    assert_eq!(best, (1, 5));
    assert_eq!(c, best.1 + (best.0 as i64 + 1) * factor);
    assert_eq!(
        rewritten_names(&r, &got),
        original_names(&p, best.0, &expected)
    );
}
