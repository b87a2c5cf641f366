//! Successor states and legal initial states against a guess-and-check
//! oracle over every consistent candidate state of small random domains.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kcplan::background::evaluate_background;
use kcplan::grounder::{ground, FLit, GroundDomain, GroundOptions, GroundRule};
use kcplan::syntax::parse_program;
use kcplan::transition::{legal_initial_states, successor_states, transitions, ActionSet, State};

fn lit(rng: &mut StdRng, nf: usize) -> String {
    let f = rng.gen_range(0..nf);
    if rng.gen_bool(0.4) {
        format!("-f{f}")
    } else {
        format!("f{f}")
    }
}

/// Up to `max` fluent literals, some under `not`.
fn fluent_body(rng: &mut StdRng, nf: usize, max: usize) -> Vec<String> {
    (0..rng.gen_range(0..=max))
        .map(|_| {
            let l = lit(rng, nf);
            if rng.gen_bool(0.3) {
                format!("not {l}")
            } else {
                l
            }
        })
        .collect()
}

fn clause(word: &str, parts: &[String]) -> String {
    if parts.is_empty() {
        String::new()
    } else {
        format!(" {word} {}", parts.join(", "))
    }
}

/// A random program with at most 6 fluents and 4 actions.
fn random_program(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let nf = rng.gen_range(1..=6);
    let na = rng.gen_range(1..=4);
    let mut out = String::from("fluents:");
    for f in 0..nf {
        out += &format!(" f{f}.");
    }
    out += "\nactions:";
    for a in 0..na {
        out += &format!(" a{a}.");
    }
    out += "\ninitially:";
    for _ in 0..rng.gen_range(0..=3) {
        let head = lit(&mut rng, nf);
        let body = fluent_body(&mut rng, nf, 2);
        out += &format!(" caused {head}{}.", clause("if", &body));
    }
    out += "\nalways:";
    for _ in 0..rng.gen_range(0..=8) {
        let body = fluent_body(&mut rng, nf, 2);
        let mut after = fluent_body(&mut rng, nf, 2);
        for _ in 0..rng.gen_range(0..=2) {
            let a = rng.gen_range(0..na);
            after.push(if rng.gen_bool(0.2) {
                format!("not a{a}")
            } else {
                format!("a{a}")
            });
        }
        let head = if rng.gen_bool(0.15) {
            "false".to_string()
        } else {
            lit(&mut rng, nf)
        };
        out += &format!(
            "\n  caused {head}{}{}.",
            clause("if", &body),
            clause("after", &after)
        );
    }
    for f in 0..nf {
        if rng.gen_bool(0.5) {
            out += &format!("\n  inertial f{f}.");
        }
        if rng.gen_bool(0.3) {
            out += &format!("\n  inertial -f{f}.");
        }
    }
    for a in 0..na {
        for _ in 0..rng.gen_range(0..=2) {
            let pre = fluent_body(&mut rng, nf, 2);
            out += &format!("\n  executable a{a}{}.", clause("if", &pre));
        }
        if rng.gen_bool(0.3) {
            let pre = fluent_body(&mut rng, nf, 1);
            out += &format!("\n  nonexecutable a{a}{}.", clause("if", &pre));
        }
    }
    if rng.gen_bool(0.3) {
        out += "\nnoConcurrency.";
    }
    out += "\ngoal: f0? (1)\n";
    out
}

/// Every consistent set of literals over `n` fluents.
fn candidates(n: usize) -> Vec<State> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut s = State::empty(n);
        for f in 0..n {
            match c % 3 {
                1 => {
                    s.insert(FLit::new(f as u32, false));
                }
                2 => {
                    s.insert(FLit::new(f as u32, true));
                }
                _ => {}
            }
            c /= 3;
        }
        out.push(s);
    }
    out
}

fn subset(s: &State, lits: &[FLit]) -> bool {
    lits.iter().all(|&l| s.contains(l))
}

fn disjoint(s: &State, lits: &[FLit]) -> bool {
    lits.iter().all(|&l| !s.contains(l))
}

/// Whether `cand` is the least model of the reduct of `rules` by `cand`
/// and satisfies every constraint.
fn stable(n: usize, rules: &[&GroundRule], cand: &State) -> bool {
    let reduct: Vec<&&GroundRule> = rules
        .iter()
        .filter(|r| disjoint(cand, &r.post_neg))
        .collect();
    let mut m = State::empty(n);
    let mut changed = true;
    while changed {
        changed = false;
        for r in &reduct {
            if let Some(h) = r.head {
                if !m.contains(h) && subset(&m, &r.post_pos) {
                    m.insert(h);
                    changed = true;
                }
            }
        }
    }
    let fires = reduct
        .iter()
        .any(|r| r.head.is_none() && subset(&m, &r.post_pos));
    !fires && m == *cand
}

fn oracle_initial(gd: &GroundDomain, all: &[State]) -> Vec<State> {
    let rules: Vec<&GroundRule> = gd
        .initial_rules
        .iter()
        .chain(gd.rules.iter().filter(|r| r.is_static()))
        .collect();
    let mut out: Vec<State> = all
        .iter()
        .filter(|c| stable(gd.num_fluents(), &rules, c))
        .cloned()
        .collect();
    out.sort();
    out
}

fn oracle_executable(gd: &GroundDomain, s: &State, a: &ActionSet) -> bool {
    a.0.iter().all(|&x| {
        gd.execs.iter().any(|e| {
            e.action == x
                && subset(s, &e.pre_pos)
                && disjoint(s, &e.pre_neg)
                && e.act_pos.iter().all(|y| a.contains(*y))
                && !e.act_neg.iter().any(|y| a.contains(*y))
        })
    })
}

fn oracle_successors(gd: &GroundDomain, s: &State, a: &ActionSet, all: &[State]) -> Vec<State> {
    let rules: Vec<&GroundRule> = gd
        .rules
        .iter()
        .filter(|r| {
            subset(s, &r.pre_pos)
                && disjoint(s, &r.pre_neg)
                && r.act_pos.iter().all(|y| a.contains(*y))
                && !r.act_neg.iter().any(|y| a.contains(*y))
        })
        .collect();
    let mut out: Vec<State> = all
        .iter()
        .filter(|c| stable(gd.num_fluents(), &rules, c))
        .cloned()
        .collect();
    out.sort();
    out
}

pub fn check(seed: u64) {
    let text = random_program(seed);
    let p = parse_program(&[&text]).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let m = evaluate_background(&p.background, 0).unwrap();
    let gd = ground(&p, &m, 1, GroundOptions::default()).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let all = candidates(gd.num_fluents());

    let mut init = legal_initial_states(&gd);
    init.sort();
    assert_eq!(init, oracle_initial(&gd, &all), "initial states\n{text}");

    // The legal initial states and a sample of other consistent states.
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let mut states = init;
    for _ in 0..4 {
        states.push(all[rng.gen_range(0..all.len())].clone());
    }
    let na = gd.num_actions();
    for s in &states {
        let mut expected = Vec::new();
        for bits in 0..1u32 << na {
            let a = ActionSet::new((0..na as u32).filter(|i| bits >> i & 1 == 1).collect());
            if !oracle_executable(&gd, s, &a) {
                continue;
            }
            let succ = oracle_successors(&gd, s, &a, &all);
            let mut got = successor_states(&gd, s, &a);
            got.sort();
            assert_eq!(got, succ, "successors of {a:?}\n{text}");
            if !succ.is_empty() {
                expected.push((a, succ));
            }
        }
        expected.sort();
        let mut got: Vec<(ActionSet, Vec<State>)> = transitions(&gd, s)
            .into_iter()
            .map(|(a, mut n)| {
                n.sort();
                (a, n)
            })
            .collect();
        got.sort();
        assert_eq!(got, expected, "transitions\n{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 600, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn successors_match_oracle(seed in any::<u64>()) {
        check(seed);
    }
}
