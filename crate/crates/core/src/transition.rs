//! States, executable action sets and legal transitions of a ground domain.
//!
//! Successor states are the stable models of the rules whose after-part
//! holds: a candidate is legal iff it equals the least model of the rules
//! that survive the reduct by it, is consistent, and violates no constraint.
//! The search branches on default-negated if-part literals only, bounding
//! every candidate between two least models to prune early.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::grounder::{ActionId, FLit, GroundDomain, GroundExec, GroundRule};

/// A consistent set of ground fluent literals, stored as a bitset over
/// literal codes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    bits: Vec<u64>,
}

impl State {
    pub fn empty(num_fluents: usize) -> State {
        State {
            bits: vec![0; (2 * num_fluents).div_ceil(64)],
        }
    }

    pub fn from_lits(num_fluents: usize, lits: impl IntoIterator<Item = FLit>) -> State {
        let mut s = State::empty(num_fluents);
        for l in lits {
            s.insert(l);
        }
        s
    }

    pub fn contains(&self, l: FLit) -> bool {
        let i = l.0 as usize;
        self.bits
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn insert(&mut self, l: FLit) -> bool {
        let i = l.0 as usize;
        let w = &mut self.bits[i / 64];
        let new = *w >> (i % 64) & 1 == 0;
        *w |= 1 << (i % 64);
        new
    }

    pub fn remove(&mut self, l: FLit) {
        let i = l.0 as usize;
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    /// Literals in ascending code order.
    pub fn iter(&self) -> impl Iterator<Item = FLit> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| FLit((wi * 64 + b) as u32))
        })
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    /// No fluent occurs both positively and strongly negated.
    pub fn is_consistent(&self) -> bool {
        const EVEN: u64 = 0x5555_5555_5555_5555;
        self.bits.iter().all(|w| w & (w >> 1) & EVEN == 0)
    }

    pub fn contains_all(&self, lits: &[FLit]) -> bool {
        lits.iter().all(|l| self.contains(*l))
    }

    pub fn contains_any(&self, lits: &[FLit]) -> bool {
        lits.iter().any(|l| self.contains(*l))
    }

    /// The literals of `self` that are also in `mask`.
    pub fn masked(&self, mask: &State) -> State {
        State {
            bits: self
                .bits
                .iter()
                .zip(&mask.bits)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn display<'a>(&'a self, gd: &'a GroundDomain) -> impl fmt::Display + 'a {
        StateDisplay { s: self, gd }
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}

struct StateDisplay<'a> {
    s: &'a State,
    gd: &'a GroundDomain,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.s.iter().map(|l| self.gd.fluent_name(l)).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// A set of legal action instances, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSet(pub Vec<ActionId>);

impl ActionSet {
    pub fn new(mut actions: Vec<ActionId>) -> ActionSet {
        actions.sort_unstable();
        actions.dedup();
        ActionSet(actions)
    }

    pub fn contains(&self, a: ActionId) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn contains_all(&self, acts: &[ActionId]) -> bool {
        acts.iter().all(|a| self.contains(*a))
    }

    pub fn contains_any(&self, acts: &[ActionId]) -> bool {
        acts.iter().any(|a| self.contains(*a))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: State,
    pub actions: ActionSet,
    pub to: State,
}

/// Whether the after-part of `r` holds for `s` and `a`.
fn pre_holds(r: &GroundRule, s: &State, a: &ActionSet) -> bool {
    s.contains_all(&r.pre_pos)
        && !s.contains_any(&r.pre_neg)
        && a.contains_all(&r.act_pos)
        && !a.contains_any(&r.act_neg)
}

/// The rules of the reduct by `t`, stripped of default negation.
pub fn reduct(gd: &GroundDomain, t: &Transition) -> Vec<GroundRule> {
    gd.rules
        .iter()
        .filter(|r| {
            !t.to.contains_any(&r.post_neg)
                && !t.from.contains_any(&r.pre_neg)
                && !t.actions.contains_any(&r.act_neg)
        })
        .map(|r| GroundRule {
            head: r.head,
            post_pos: r.post_pos.clone(),
            pre_pos: r.pre_pos.clone(),
            act_pos: r.act_pos.clone(),
            ..GroundRule::default()
        })
        .collect()
}

/// A rule whose after-part already holds.
#[derive(Clone, Copy)]
struct Active<'a> {
    head: Option<FLit>,
    pos: &'a [FLit],
    neg: &'a [FLit],
}

impl<'a> Active<'a> {
    fn of(r: &'a GroundRule) -> Active<'a> {
        Active {
            head: r.head,
            pos: &r.post_pos,
            neg: &r.post_neg,
        }
    }
}

/// Least model of the positive rules selected by `enabled`. Returns the
/// model and whether a constraint fires.
fn least_model(
    num_fluents: usize,
    rules: &[Active<'_>],
    enabled: impl Fn(&Active<'_>) -> bool,
) -> (State, bool) {
    let mut m = State::empty(num_fluents);
    let on: Vec<&Active<'_>> = rules.iter().filter(|r| enabled(r)).collect();
    let mut done = vec![false; on.len()];
    let mut fires = false;
    loop {
        let mut changed = false;
        for (i, r) in on.iter().enumerate() {
            if done[i] || !m.contains_all(r.pos) {
                continue;
            }
            done[i] = true;
            match r.head {
                Some(h) => changed |= m.insert(h),
                // Keep going: the upper bound needs the whole model.
                None => fires = true,
            }
        }
        if !changed {
            return (m, fires);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unknown,
    True,
    False,
}

struct Solver<'a> {
    n: usize,
    rules: Vec<Active<'a>>,
    branch: Vec<FLit>,
    out: Vec<State>,
}

impl Solver<'_> {
    /// Assignment lookup for branch literals; others count as unknown.
    fn val(&self, asg: &[Val], l: FLit) -> Val {
        match self.branch.binary_search(&l) {
            Ok(i) => asg[i],
            Err(_) => Val::Unknown,
        }
    }

    fn search(&mut self, mut asg: Vec<Val>) {
        loop {
            // Lower bound: rules whose default literals are all known false.
            let (lo, lo_fires) = least_model(self.n, &self.rules, |r| {
                r.neg.iter().all(|l| self.val(&asg, *l) == Val::False)
            });
            if lo_fires || !lo.is_consistent() {
                return;
            }
            // Upper bound: rules not blocked by a literal known true.
            let (up, _) = least_model(self.n, &self.rules, |r| {
                r.neg.iter().all(|l| self.val(&asg, *l) != Val::True)
            });
            let mut changed = false;
            for (i, &b) in self.branch.iter().enumerate() {
                let want = if lo.contains(b) {
                    Val::True
                } else if !up.contains(b) || lo.contains(b.complement()) {
                    Val::False
                } else {
                    continue;
                };
                match asg[i] {
                    Val::Unknown => {
                        asg[i] = want;
                        changed = true;
                    }
                    v if v != want => return,
                    _ => {}
                }
            }
            if changed {
                continue;
            }
            match asg.iter().position(|v| *v == Val::Unknown) {
                None => {
                    // Every default literal is decided, so both bounds coincide.
                    debug_assert_eq!(lo, up);
                    self.out.push(lo);
                    return;
                }
                Some(i) => {
                    let mut t = asg.clone();
                    t[i] = Val::True;
                    self.search(t);
                    asg[i] = Val::False;
                }
            }
        }
    }
}

/// All stable models of `rules`, sorted.
fn stable_models(num_fluents: usize, rules: Vec<Active<'_>>) -> Vec<State> {
    let mut branch: Vec<FLit> = rules.iter().flat_map(|r| r.neg.iter().copied()).collect();
    branch.sort_unstable();
    branch.dedup();
    let asg = vec![Val::Unknown; branch.len()];
    let mut s = Solver {
        n: num_fluents,
        rules,
        branch,
        out: Vec::new(),
    };
    s.search(asg);
    s.out.sort();
    s.out.dedup();
    s.out
}

/// Whether `cand` is a stable model of `rules`.
fn is_stable(num_fluents: usize, rules: &[Active<'_>], cand: &State) -> bool {
    if !cand.is_consistent() {
        return false;
    }
    let (m, fires) = least_model(num_fluents, rules, |r| !cand.contains_any(r.neg));
    !fires && m == *cand
}

fn initial_rules(gd: &GroundDomain) -> Vec<Active<'_>> {
    gd.initial_rules
        .iter()
        .chain(gd.rules.iter().filter(|r| r.is_static()))
        .map(Active::of)
        .collect()
}

fn active_rules<'a>(gd: &'a GroundDomain, s: &State, a: &ActionSet) -> Vec<Active<'a>> {
    gd.rules
        .iter()
        .filter(|r| pre_holds(r, s, a))
        .map(Active::of)
        .collect()
}

/// The literals that successors, executability and the goal can depend
/// on. Two states that agree on them have the same futures.
pub fn relevant_literals(gd: &GroundDomain) -> State {
    let mut m = State::empty(gd.num_fluents());
    let rules = gd
        .rules
        .iter()
        .flat_map(|r| r.pre_pos.iter().chain(&r.pre_neg));
    let execs = gd
        .execs
        .iter()
        .flat_map(|e| e.pre_pos.iter().chain(&e.pre_neg));
    for &l in rules.chain(execs).chain(&gd.goal.pos).chain(&gd.goal.neg) {
        m.insert(l);
    }
    m
}

/// Every legal initial state, sorted.
pub fn legal_initial_states(gd: &GroundDomain) -> Vec<State> {
    stable_models(gd.num_fluents(), initial_rules(gd))
}

pub fn is_legal_initial_state(gd: &GroundDomain, s: &State) -> bool {
    is_stable(gd.num_fluents(), &initial_rules(gd), s)
}

/// Whether every action of `a` has an executability condition satisfied by
/// `s` and `a`.
pub fn is_executable(gd: &GroundDomain, s: &State, a: &ActionSet) -> bool {
    a.0.iter().all(|&x| {
        gd.execs.iter().any(|e| {
            e.action == x
                && s.contains_all(&e.pre_pos)
                && !s.contains_any(&e.pre_neg)
                && a.contains_all(&e.act_pos)
                && !a.contains_any(&e.act_neg)
        })
    })
}

/// Enumerates every executable action set for `s`.
fn action_sets(gd: &GroundDomain, s: &State) -> Vec<ActionSet> {
    let mut cand: Vec<ActionId> = gd
        .execs
        .iter()
        .filter(|e| s.contains_all(&e.pre_pos) && !s.contains_any(&e.pre_neg))
        .map(|e| e.action)
        .collect();
    cand.sort_unstable();
    cand.dedup();
    let max_size = if gd.no_concurrency { 1 } else { usize::MAX };
    let mut out = Vec::new();
    let mut cur = Vec::new();
    enumerate(gd, s, &cand, 0, max_size, &mut cur, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    gd: &GroundDomain,
    s: &State,
    cand: &[ActionId],
    i: usize,
    max_size: usize,
    cur: &mut Vec<ActionId>,
    out: &mut Vec<ActionSet>,
) {
    if i == cand.len() {
        let a = ActionSet(cur.clone());
        if is_executable(gd, s, &a) {
            out.push(a);
        }
        return;
    }
    enumerate(gd, s, cand, i + 1, max_size, cur, out);
    if cur.len() < max_size {
        cur.push(cand[i]);
        enumerate(gd, s, cand, i + 1, max_size, cur, out);
        cur.pop();
    }
}

/// Every executable action set for `s`, the empty set first.
pub fn executable_action_sets(gd: &GroundDomain, s: &State) -> Vec<ActionSet> {
    action_sets(gd, s)
}

/// Every legal successor of `s` under `a`, sorted.
pub fn successor_states(gd: &GroundDomain, s: &State, a: &ActionSet) -> Vec<State> {
    stable_models(gd.num_fluents(), active_rules(gd, s, a))
}

/// All transitions from `s`: executable action sets with their successors.
/// Action sets without a successor are left out.
pub fn transitions(gd: &GroundDomain, s: &State) -> Vec<(ActionSet, Vec<State>)> {
    StateContext::new(gd, s).transitions(s)
}

pub fn is_legal_transition(gd: &GroundDomain, t: &Transition) -> bool {
    t.from.is_consistent()
        && is_executable(gd, &t.from, &t.actions)
        && is_stable(
            gd.num_fluents(),
            &active_rules(gd, &t.from, &t.actions),
            &t.to,
        )
}

/// The parts of the domain that depend on one state only: candidate
/// actions, constraints on actions, and rules indexed by the greatest action
/// in their after-part.
pub struct StateContext<'a> {
    gd: &'a GroundDomain,
    cand: Vec<ActionId>,
    /// Executability conditions with action literals, for candidates that
    /// have no condition satisfied by the state alone.
    conditional: Vec<(ActionId, Vec<&'a GroundExec>)>,
    base: Vec<Active<'a>>,
    neg_only: Vec<&'a GroundRule>,
    by_action: HashMap<ActionId, Vec<&'a GroundRule>>,
    guards: HashMap<ActionId, Vec<&'a GroundRule>>,
}

impl<'a> StateContext<'a> {
    pub fn new(gd: &'a GroundDomain, s: &State) -> StateContext<'a> {
        let mut free = Vec::new();
        let mut cond: HashMap<ActionId, Vec<&GroundExec>> = HashMap::new();
        for e in gd
            .execs
            .iter()
            .filter(|e| s.contains_all(&e.pre_pos) && !s.contains_any(&e.pre_neg))
        {
            if e.act_pos.is_empty() && e.act_neg.is_empty() {
                free.push(e.action);
            } else {
                cond.entry(e.action).or_default().push(e);
            }
        }
        free.sort_unstable();
        free.dedup();
        let mut cand: Vec<ActionId> = free.iter().copied().chain(cond.keys().copied()).collect();
        cand.sort_unstable();
        cand.dedup();
        let mut conditional: Vec<_> = cond
            .into_iter()
            .filter(|(a, _)| free.binary_search(a).is_err())
            .collect();
        conditional.sort_unstable_by_key(|(a, _)| *a);

        let mut base = Vec::new();
        let mut neg_only = Vec::new();
        let mut by_action: HashMap<ActionId, Vec<&GroundRule>> = HashMap::new();
        let mut guards: HashMap<ActionId, Vec<&GroundRule>> = HashMap::new();
        for r in gd
            .rules
            .iter()
            .filter(|r| s.contains_all(&r.pre_pos) && !s.contains_any(&r.pre_neg))
        {
            if !r.act_pos.iter().all(|a| cand.binary_search(a).is_ok()) {
                continue;
            }
            match r.act_pos.last() {
                None if r.act_neg.is_empty() => base.push(Active::of(r)),
                None => neg_only.push(r),
                Some(&last) => {
                    let pure = r.head.is_none() && r.post_pos.is_empty() && r.post_neg.is_empty();
                    let map = if pure { &mut guards } else { &mut by_action };
                    map.entry(last).or_default().push(r);
                }
            }
        }
        StateContext {
            gd,
            cand,
            conditional,
            base,
            neg_only,
            by_action,
            guards,
        }
    }

    fn executable(&self, s: &State, a: &ActionSet) -> bool {
        self.conditional.iter().all(|(x, es)| {
            !a.contains(*x)
                || es.iter().any(|e| {
                    debug_assert!(s.contains_all(&e.pre_pos));
                    a.contains_all(&e.act_pos) && !a.contains_any(&e.act_neg)
                })
        })
    }

    fn active(&self, a: &ActionSet) -> Vec<Active<'a>> {
        let mut out = self.base.clone();
        out.extend(
            self.neg_only
                .iter()
                .filter(|r| !a.contains_any(&r.act_neg))
                .map(|r| Active::of(r)),
        );
        for x in &a.0 {
            if let Some(rs) = self.by_action.get(x) {
                out.extend(
                    rs.iter()
                        .filter(|r| a.contains_all(&r.act_pos) && !a.contains_any(&r.act_neg))
                        .map(|r| Active::of(r)),
                );
            }
        }
        out
    }

    /// Every legal successor of the state under `a`, which must be an
    /// executable action set of it.
    pub fn successors(&self, a: &ActionSet) -> Vec<State> {
        stable_models(self.gd.num_fluents(), self.active(a))
    }

    /// Executable action sets that no constraint on actions and the state
    /// alone rules out, the empty set first.
    pub fn action_sets(&self, s: &State) -> Vec<ActionSet> {
        let max_size = if self.gd.no_concurrency {
            1
        } else {
            usize::MAX
        };
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.enumerate(s, 0, max_size, &mut cur, &mut out);
        out
    }

    fn enumerate(
        &self,
        s: &State,
        i: usize,
        max_size: usize,
        cur: &mut Vec<ActionId>,
        out: &mut Vec<ActionSet>,
    ) {
        if i == self.cand.len() {
            let a = ActionSet(cur.clone());
            let killed = cur.iter().any(|x| {
                self.guards.get(x).is_some_and(|gs| {
                    gs.iter().any(|r| {
                        !r.act_neg.is_empty()
                            && a.contains_all(&r.act_pos)
                            && !a.contains_any(&r.act_neg)
                    })
                })
            });
            if !killed && self.executable(s, &a) {
                out.push(a);
            }
            return;
        }
        self.enumerate(s, i + 1, max_size, cur, out);
        if cur.len() < max_size {
            let x = self.cand[i];
            cur.push(x);
            // Constraints without negated actions can only stay violated.
            let killed = self.guards.get(&x).is_some_and(|gs| {
                gs.iter()
                    .any(|r| r.act_neg.is_empty() && r.act_pos.iter().all(|y| cur.contains(y)))
            });
            if !killed {
                self.enumerate(s, i + 1, max_size, cur, out);
            }
            cur.pop();
        }
    }

    /// Like `transitions`, but leaves out action sets under which no
    /// successor can contain all of `goal`: some goal literal is the head
    /// of no rule that the action set makes active.
    pub fn transitions_towards(&self, s: &State, goal: &[FLit]) -> Vec<(ActionSet, Vec<State>)> {
        let mut needs: Vec<Vec<&GroundRule>> = Vec::new();
        for &g in goal {
            if self.base.iter().any(|r| r.head == Some(g)) {
                continue;
            }
            let support: Vec<&GroundRule> = self
                .neg_only
                .iter()
                .copied()
                .chain(self.by_action.values().flatten().copied())
                .filter(|r| r.head == Some(g))
                .collect();
            if support.is_empty() {
                return Vec::new();
            }
            needs.push(support);
        }
        self.action_sets(s)
            .into_iter()
            .filter(|a| {
                needs.iter().all(|rs| {
                    rs.iter()
                        .any(|r| a.contains_all(&r.act_pos) && !a.contains_any(&r.act_neg))
                })
            })
            .filter_map(|a| {
                let next = self.successors(&a);
                (!next.is_empty()).then_some((a, next))
            })
            .collect()
    }

    /// All transitions from the state, leaving out action sets without a
    /// successor.
    pub fn transitions(&self, s: &State) -> Vec<(ActionSet, Vec<State>)> {
        self.action_sets(s)
            .into_iter()
            .filter_map(|a| {
                let next = self.successors(&a);
                (!next.is_empty()).then_some((a, next))
            })
            .collect()
    }
}
