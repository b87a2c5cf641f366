//! Plan search: optimistic, admissible, optimal and secure plans.
//!
//! Both searches are exact dynamic programs over the cost-to-go of a node.
//! Optimistic planning works on (step, state) nodes; secure planning works
//! on (step, set of possible states) nodes, since a plan is secure iff every
//! state reachable by a prefix can continue and every final state reaches
//! the goal. Costs depend only on the step and the action set, so the
//! cost-to-go of a node is well defined.
//!
//! Nodes hold states projected onto the literals that futures depend on, so
//! states differing only in other fluents share one node. Witness
//! trajectories are replayed on real states afterwards.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::grounder::{check_well_defined, CostDiagnostic, GroundDomain};
use crate::transition::{
    is_executable, legal_initial_states, relevant_literals, successor_states, ActionSet, State,
    StateContext, Transition,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plan {
    pub steps: Vec<ActionSet>,
    pub cost: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub initial: State,
    pub transitions: Vec<Transition>,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.transitions.last().map_or(&self.initial, |t| &t.to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanVerdict {
    pub plan: Plan,
    pub witness: Trajectory,
    pub secure: Option<bool>,
}

/// Whether to stop after the first plan or to collect all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumerate {
    First,
    All,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("action costs are not well-defined:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    IllDefined(Vec<CostDiagnostic>),
    #[error("plan length {length} exceeds the grounded horizon {horizon}")]
    Horizon { length: usize, horizon: usize },
    #[error("inconclusive: more than {cap} possible states at one step")]
    StateCap { cap: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct PlanOptions {
    /// Upper bound on the size of a set of possible states in secure search.
    pub state_cap: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { state_cap: 100_000 }
    }
}

/// The cost of a plan: the sum of `cost_j(a)` over steps `j` and actions.
/// Undefined costs count as 0; callers check well-definedness first.
pub fn plan_cost(gd: &GroundDomain, steps: &[ActionSet]) -> i64 {
    steps
        .iter()
        .enumerate()
        .map(|(j, a)| step_cost(gd, j + 1, a))
        .sum()
}

fn step_cost(gd: &GroundDomain, j: usize, a: &ActionSet) -> i64 {
    a.0.iter().map(|&x| gd.action_cost(x, j).unwrap_or(0)).sum()
}

pub fn goal_holds(gd: &GroundDomain, s: &State) -> bool {
    !gd.goal.unsatisfiable && s.contains_all(&gd.goal.pos) && !s.contains_any(&gd.goal.neg)
}

type Edges = Rc<Vec<(ActionSet, Vec<State>)>>;

/// Search state for one domain and plan length.
pub struct Planner<'a> {
    gd: &'a GroundDomain,
    length: usize,
    opts: PlanOptions,
    mask: State,
    edges: HashMap<State, Edges>,
    final_edges: HashMap<State, Edges>,
    togo: HashMap<(usize, State), Option<i64>>,
    secure_togo: HashMap<(usize, Vec<State>), Option<i64>>,
    initial: Vec<State>,
    roots: Vec<State>,
}

impl<'a> Planner<'a> {
    /// Checks that every action has a unique cost at each step of a plan of
    /// `length` steps.
    pub fn new(
        gd: &'a GroundDomain,
        length: usize,
        opts: PlanOptions,
    ) -> Result<Planner<'a>, PlanError> {
        if length > gd.costs.horizon() && gd.has_costs {
            return Err(PlanError::Horizon {
                length,
                horizon: gd.costs.horizon(),
            });
        }
        let diags = check_well_defined(gd, length);
        if !diags.is_empty() {
            return Err(PlanError::IllDefined(diags));
        }
        let mask = relevant_literals(gd);
        let initial = legal_initial_states(gd);
        let mut roots: Vec<State> = Vec::new();
        for s in &initial {
            let r = s.masked(&mask);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        Ok(Planner {
            gd,
            length,
            opts,
            mask,
            edges: HashMap::new(),
            final_edges: HashMap::new(),
            togo: HashMap::new(),
            secure_togo: HashMap::new(),
            initial,
            roots,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn initial_states(&self) -> &[State] {
        &self.initial
    }

    /// Transitions of the projected state `s` at step `j + 1`, with
    /// projected successors. The last step only keeps action sets that can
    /// reach the goal.
    fn edges(&mut self, j: usize, s: &State) -> Edges {
        let last = j + 1 == self.length;
        let cache = if last { &self.final_edges } else { &self.edges };
        if let Some(e) = cache.get(s) {
            return e.clone();
        }
        let ctx = StateContext::new(self.gd, s);
        let raw = if !last {
            ctx.transitions(s)
        } else if self.gd.goal.unsatisfiable {
            Vec::new()
        } else {
            ctx.transitions_towards(s, &self.gd.goal.pos)
        };
        let mut e: Vec<(ActionSet, Vec<State>)> = raw
            .into_iter()
            .map(|(a, next)| {
                let mut next: Vec<State> = next.iter().map(|n| n.masked(&self.mask)).collect();
                next.sort();
                next.dedup();
                (a, next)
            })
            .collect();
        // Plans come out in lexicographic order of their action sets.
        e.sort_by(|x, y| x.0.cmp(&y.0));
        let e = Rc::new(e);
        let cache = if last {
            &mut self.final_edges
        } else {
            &mut self.edges
        };
        cache.insert(s.clone(), e.clone());
        e
    }

    /// Replays `steps` on real states, starting from the least initial
    /// state projecting to `root` and moving each time to the least
    /// successor with the projection in `path`.
    fn realize(&self, root: &State, steps: &[ActionSet], path: &[State]) -> Trajectory {
        let initial = self
            .initial
            .iter()
            .find(|s| s.masked(&self.mask) == *root)
            .unwrap()
            .clone();
        let mut s = initial.clone();
        let mut transitions = Vec::new();
        for (a, p) in steps.iter().zip(path) {
            let to = successor_states(self.gd, &s, a)
                .into_iter()
                .find(|n| n.masked(&self.mask) == *p)
                .expect("projected edge without a real successor");
            transitions.push(Transition {
                from: s,
                actions: a.clone(),
                to: to.clone(),
            });
            s = to;
        }
        Trajectory {
            initial,
            transitions,
        }
    }

    /// Least cost of reaching the goal from `s` after `j` steps; `None` if
    /// the goal is unreachable.
    fn cost_to_go(&mut self, j: usize, s: &State) -> Option<i64> {
        if j == self.length {
            return goal_holds(self.gd, s).then_some(0);
        }
        if let Some(v) = self.togo.get(&(j, s.clone())) {
            return *v;
        }
        let mut best: Option<i64> = None;
        for (a, next) in self.edges(j, s).iter() {
            let c = step_cost(self.gd, j + 1, a);
            for n in next {
                if let Some(rest) = self.cost_to_go(j + 1, n) {
                    best = Some(best.map_or(c + rest, |b| b.min(c + rest)));
                }
            }
        }
        self.togo.insert((j, s.clone()), best);
        best
    }

    /// The optimal cost over all plans; `None` if there is no plan.
    pub fn optimal_cost(&mut self) -> Option<i64> {
        let roots = self.roots.clone();
        roots.iter().filter_map(|s| self.cost_to_go(0, s)).min()
    }

    /// Plans with cost at most `bound`, each with one witness trajectory.
    /// Plans are distinct; a plan reachable through several trajectories
    /// keeps the first witness in search order.
    pub fn plans(&mut self, bound: Option<i64>, mode: Enumerate) -> Vec<PlanVerdict> {
        let mut found: BTreeMap<Vec<ActionSet>, PlanVerdict> = BTreeMap::new();
        let mut order = Vec::new();
        let roots = self.roots.clone();
        for s0 in &roots {
            let Some(h) = self.cost_to_go(0, s0) else {
                continue;
            };
            if bound.is_some_and(|b| h > b) {
                continue;
            }
            let mut path = Vec::new();
            let stop = self.dfs(s0, s0, 0, 0, bound, mode, &mut path, &mut found, &mut order);
            if stop {
                break;
            }
        }
        order
            .into_iter()
            .map(|k| found.remove(&k).unwrap())
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &mut self,
        root: &State,
        s: &State,
        j: usize,
        spent: i64,
        bound: Option<i64>,
        mode: Enumerate,
        path: &mut Vec<(ActionSet, State)>,
        found: &mut BTreeMap<Vec<ActionSet>, PlanVerdict>,
        order: &mut Vec<Vec<ActionSet>>,
    ) -> bool {
        if j == self.length {
            let steps: Vec<ActionSet> = path.iter().map(|(a, _)| a.clone()).collect();
            if !found.contains_key(&steps) {
                let nodes: Vec<State> = path.iter().map(|(_, n)| n.clone()).collect();
                let witness = self.realize(root, &steps, &nodes);
                order.push(steps.clone());
                found.insert(
                    steps.clone(),
                    PlanVerdict {
                        plan: Plan { steps, cost: spent },
                        witness,
                        secure: None,
                    },
                );
            }
            return mode == Enumerate::First;
        }
        for (a, next) in self.edges(j, s).iter() {
            let c = spent + step_cost(self.gd, j + 1, a);
            for n in next {
                let Some(rest) = self.cost_to_go(j + 1, n) else {
                    continue;
                };
                if bound.is_some_and(|b| c + rest > b) {
                    continue;
                }
                path.push((a.clone(), n.clone()));
                let stop = self.dfs(root, n, j + 1, c, bound, mode, path, found, order);
                path.pop();
                if stop {
                    return true;
                }
            }
        }
        false
    }

    /// Whether `steps` is a secure plan: from every legal initial state,
    /// every prefix can be continued and every complete trajectory reaches
    /// the goal.
    pub fn is_secure(&self, steps: &[ActionSet]) -> Result<bool, PlanError> {
        if self.initial.is_empty() || steps.len() != self.length {
            return Ok(false);
        }
        let mut belief = self.initial.clone();
        for a in steps {
            let mut next = Vec::new();
            for s in &belief {
                if !is_executable(self.gd, s, a) {
                    return Ok(false);
                }
                let succ = successor_states(self.gd, s, a);
                if succ.is_empty() {
                    return Ok(false);
                }
                next.extend(succ);
            }
            next.sort();
            next.dedup();
            if next.len() > self.opts.state_cap {
                return Err(PlanError::StateCap {
                    cap: self.opts.state_cap,
                });
            }
            belief = next;
        }
        Ok(belief.iter().all(|s| goal_holds(self.gd, s)))
    }

    /// Action sets that every state of `belief` can execute with at least
    /// one successor, with the union of the successors.
    fn belief_edges(
        &mut self,
        j: usize,
        belief: &[State],
    ) -> Result<Vec<(ActionSet, Vec<State>)>, PlanError> {
        let mut common: Option<BTreeMap<ActionSet, Vec<State>>> = None;
        for s in belief {
            let e = self.edges(j, s);
            common = Some(match common {
                None => e.iter().cloned().collect(),
                Some(mut acc) => {
                    let here: HashMap<&ActionSet, &Vec<State>> =
                        e.iter().map(|(a, n)| (a, n)).collect();
                    acc.retain(|a, _| here.contains_key(a));
                    for (a, n) in acc.iter_mut() {
                        n.extend(here[a].iter().cloned());
                    }
                    acc
                }
            });
            if common.as_ref().is_some_and(|c| c.is_empty()) {
                break;
            }
        }
        let mut out = Vec::new();
        for (a, mut n) in common.unwrap_or_default() {
            n.sort();
            n.dedup();
            if n.len() > self.opts.state_cap {
                return Err(PlanError::StateCap {
                    cap: self.opts.state_cap,
                });
            }
            out.push((a, n));
        }
        // Keep the enumeration order of the first state's action sets.
        if let Some(s) = belief.first() {
            let e = self.edges(j, s);
            let rank: HashMap<&ActionSet, usize> =
                e.iter().enumerate().map(|(i, (a, _))| (a, i)).collect();
            out.sort_by_key(|(a, _)| rank[a]);
        }
        Ok(out)
    }

    fn secure_cost_to_go(&mut self, j: usize, belief: &[State]) -> Result<Option<i64>, PlanError> {
        if j == self.length {
            return Ok(belief.iter().all(|s| goal_holds(self.gd, s)).then_some(0));
        }
        let key = (j, belief.to_vec());
        if let Some(v) = self.secure_togo.get(&key) {
            return Ok(*v);
        }
        let mut best: Option<i64> = None;
        for (a, next) in self.belief_edges(j, belief)? {
            if let Some(rest) = self.secure_cost_to_go(j + 1, &next)? {
                let c = step_cost(self.gd, j + 1, &a) + rest;
                best = Some(best.map_or(c, |b| b.min(c)));
            }
        }
        self.secure_togo.insert(key, best);
        Ok(best)
    }

    /// The least cost of a secure plan; `None` if there is none.
    pub fn optimal_secure_cost(&mut self) -> Result<Option<i64>, PlanError> {
        if self.initial.is_empty() {
            return Ok(None);
        }
        let mut roots = self.roots.clone();
        roots.sort();
        self.secure_cost_to_go(0, &roots)
    }

    /// Secure plans with cost at most `bound`.
    pub fn secure_plans(
        &mut self,
        bound: Option<i64>,
        mode: Enumerate,
    ) -> Result<Vec<PlanVerdict>, PlanError> {
        let mut out = Vec::new();
        let Some(h) = self.optimal_secure_cost()? else {
            return Ok(out);
        };
        if bound.is_some_and(|b| h > b) {
            return Ok(out);
        }
        let mut roots = self.roots.clone();
        roots.sort();
        let mut steps = Vec::new();
        self.secure_dfs(&roots, 0, 0, bound, mode, &mut steps, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn secure_dfs(
        &mut self,
        belief: &[State],
        j: usize,
        spent: i64,
        bound: Option<i64>,
        mode: Enumerate,
        steps: &mut Vec<ActionSet>,
        out: &mut Vec<PlanVerdict>,
    ) -> Result<bool, PlanError> {
        if j == self.length {
            let witness = self.witness(steps);
            out.push(PlanVerdict {
                plan: Plan {
                    steps: steps.clone(),
                    cost: spent,
                },
                witness,
                secure: Some(true),
            });
            return Ok(mode == Enumerate::First);
        }
        for (a, next) in self.belief_edges(j, belief)? {
            let c = spent + step_cost(self.gd, j + 1, &a);
            let Some(rest) = self.secure_cost_to_go(j + 1, &next)? else {
                continue;
            };
            if bound.is_some_and(|b| c + rest > b) {
                continue;
            }
            steps.push(a);
            let stop = self.secure_dfs(&next, j + 1, c, bound, mode, steps, out)?;
            steps.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The trajectory of a secure plan that starts in the least initial
    /// state and always moves to the least successor.
    fn witness(&self, steps: &[ActionSet]) -> Trajectory {
        let initial = self.initial[0].clone();
        let mut s = initial.clone();
        let mut transitions = Vec::new();
        for a in steps {
            let to = successor_states(self.gd, &s, a).swap_remove(0);
            transitions.push(Transition {
                from: s,
                actions: a.clone(),
                to: to.clone(),
            });
            s = to;
        }
        Trajectory {
            initial,
            transitions,
        }
    }
}

/// Plans whose cost is at most `bound` (all plans without a bound).
pub fn find_optimistic_plans(
    gd: &GroundDomain,
    length: usize,
    mode: Enumerate,
    bound: Option<i64>,
) -> Result<Vec<PlanVerdict>, PlanError> {
    let mut p = Planner::new(gd, length, PlanOptions::default())?;
    Ok(p.plans(bound, mode))
}

/// The optimal cost and the plans attaining it; `None` if there is no plan.
pub fn find_optimal_plans(
    gd: &GroundDomain,
    length: usize,
    mode: Enumerate,
) -> Result<Option<(i64, Vec<PlanVerdict>)>, PlanError> {
    let mut p = Planner::new(gd, length, PlanOptions::default())?;
    let Some(c) = p.optimal_cost() else {
        return Ok(None);
    };
    Ok(Some((c, p.plans(Some(c), mode))))
}

pub fn is_secure(gd: &GroundDomain, steps: &[ActionSet]) -> Result<bool, PlanError> {
    Planner::new(gd, steps.len(), PlanOptions::default())?.is_secure(steps)
}

/// The least cost of a secure plan and the secure plans attaining it.
pub fn find_optimal_secure_plans(
    gd: &GroundDomain,
    length: usize,
    mode: Enumerate,
) -> Result<Option<(i64, Vec<PlanVerdict>)>, PlanError> {
    let mut p = Planner::new(gd, length, PlanOptions::default())?;
    let Some(c) = p.optimal_secure_cost()? else {
        return Ok(None);
    };
    Ok(Some((c, p.secure_plans(Some(c), mode)?)))
}

/// Formats a plan the way the command line prints it:
/// `PLAN: a:2; b COST: 2`, where `: c` is shown for nonzero costs only and
/// actions of one step are separated by commas.
pub struct PlanDisplay<'a> {
    pub gd: &'a GroundDomain,
    pub plan: &'a Plan,
}

impl fmt::Display for PlanDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PLAN:")?;
        for (j, a) in self.plan.steps.iter().enumerate() {
            if j > 0 {
                f.write_str(";")?;
            }
            if a.is_empty() {
                f.write_str(" (no action)")?;
            }
            for (k, &x) in a.0.iter().enumerate() {
                f.write_str(if k > 0 { ", " } else { " " })?;
                f.write_str(&self.gd.action_name(x))?;
                match self.gd.action_cost(x, j + 1) {
                    Some(0) | None => {}
                    Some(c) => write!(f, ":{c}")?,
                }
            }
        }
        write!(f, " COST: {}", self.plan.cost)
    }
}

/// Splits at `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let (mut depth, mut start, mut out) = (0i32, 0, Vec::new());
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Reads back a line printed by [`PlanDisplay`]: the steps and the cost.
pub fn parse_plan_line(gd: &GroundDomain, line: &str) -> Option<(Vec<ActionSet>, i64)> {
    let rest = line.trim().strip_prefix("PLAN:")?;
    let (body, cost) = rest.rsplit_once("COST:")?;
    let cost = cost.trim().parse().ok()?;
    if body.trim().is_empty() {
        return Some((Vec::new(), cost));
    }
    let mut steps = Vec::new();
    for step in split_top(body, ';') {
        let step = step.trim();
        let mut acts = Vec::new();
        if step != "(no action)" {
            for a in split_top(step, ',') {
                let name = split_top(a, ':')[0].trim();
                acts.push(gd.action_id(&gd.atom(name)?)?);
            }
        }
        steps.push(ActionSet::new(acts));
    }
    Some((steps, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::evaluate_background;
    use crate::grounder::{ground, GroundOptions};
    use crate::syntax::parse_program;

    fn domain(files: &[&str], l: usize, n: i64) -> GroundDomain {
        let p = parse_program(files).unwrap();
        let m = evaluate_background(&p.background, n).unwrap();
        ground(&p, &m, l, GroundOptions::default()).unwrap()
    }

    const PERSONS: &str = include_str!("../../../fixtures/bridge/bridge_costs.bk");
    const COSTS: &str = include_str!("../../../fixtures/bridge/bridge_costs.plan");
    const SECURE: &str = include_str!("../../../fixtures/bridge/bridge_secure.plan");

    fn steps(gd: &GroundDomain, text: &str) -> Vec<ActionSet> {
        text.split(';')
            .map(|s| {
                let a = gd.atom(s).unwrap();
                ActionSet::new(vec![gd.action_id(&a).unwrap()])
            })
            .collect()
    }

    const SEVEN: &str =
        "crossTogether(joe,jack); cross(joe); takeLamp(william); crossTogether(william,averell); \
                         takeLamp(jack); cross(jack); crossTogether(joe,jack)";

    #[test]
    fn bridge_optimal_costs() {
        let gd = domain(&[PERSONS, COSTS], 7, 0);
        let (c7, plans) = find_optimal_plans(&gd, 7, Enumerate::All).unwrap().unwrap();
        assert_eq!(c7, 17);
        assert!(plans.iter().all(|v| v.plan.cost == 17));
        assert!(plans.iter().any(|v| v.plan.steps == steps(&gd, SEVEN)));
        let (c5, _) = find_optimal_plans(&gd, 5, Enumerate::First)
            .unwrap()
            .unwrap();
        assert_eq!(c5, 19);
        assert_eq!(plan_cost(&gd, &steps(&gd, SEVEN)), 17);
        assert_eq!(plan_cost(&gd, &[]), 0);
    }

    #[test]
    fn printed_plan() {
        let gd = domain(&[PERSONS, COSTS], 7, 0);
        let plan = Plan {
            steps: steps(&gd, SEVEN),
            cost: 17,
        };
        assert_eq!(
            PlanDisplay { gd: &gd, plan: &plan }.to_string(),
            "PLAN: crossTogether(joe,jack):2; cross(joe):1; takeLamp(william); crossTogether(william,averell):10; \
             takeLamp(jack); cross(jack):2; crossTogether(joe,jack):2 COST: 17"
        );
        let line = PlanDisplay {
            gd: &gd,
            plan: &plan,
        }
        .to_string();
        assert_eq!(parse_plan_line(&gd, &line), Some((plan.steps.clone(), 17)));
        let buy = domain(
            &[
                include_str!("../../../fixtures/buying/buying.bk"),
                include_str!("../../../fixtures/buying/buying.plan"),
            ],
            1,
            10,
        );
        let (steps, c) =
            parse_plan_line(&buy, "PLAN: buy(newspaper,1):1, buy(magazine,2):6 COST: 7").unwrap();
        assert_eq!((steps[0].len(), c), (2, 7));
        assert_eq!(
            parse_plan_line(&gd, "PLAN: (no action) COST: 0"),
            Some((vec![ActionSet::new(vec![])], 0))
        );
    }

    #[test]
    fn admissible_filter() {
        let gd = domain(&[PERSONS, COSTS], 5, 0);
        let all = find_optimistic_plans(&gd, 5, Enumerate::All, None).unwrap();
        let bounded = find_optimistic_plans(&gd, 5, Enumerate::All, Some(21)).unwrap();
        let expected: Vec<_> = all
            .iter()
            .filter(|v| v.plan.cost <= 21)
            .map(|v| v.plan.clone())
            .collect();
        let mut got: Vec<_> = bounded.iter().map(|v| v.plan.clone()).collect();
        let mut expected = expected;
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
        assert!(find_optimistic_plans(&gd, 5, Enumerate::All, Some(18))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn secure_bridge() {
        let gd = domain(&[PERSONS, SECURE], 8, 0);
        assert_eq!(legal_initial_states(&gd).len(), 15);
        // Seven steps allow secure plans, but none as cheap as 17.
        let (c7, _) = find_optimal_secure_plans(&gd, 7, Enumerate::First)
            .unwrap()
            .unwrap();
        assert_eq!(c7, 19);
        let mut p7 = Planner::new(&gd, 7, PlanOptions::default()).unwrap();
        assert!(p7
            .secure_plans(Some(17), Enumerate::First)
            .unwrap()
            .is_empty());
        let (c, plans) = find_optimal_secure_plans(&gd, 8, Enumerate::First)
            .unwrap()
            .unwrap();
        assert_eq!(c, 17);
        assert!(is_secure(&gd, &plans[0].plan.steps).unwrap());
        let gd7 = domain(&[PERSONS, SECURE], 7, 0);
        assert!(!is_secure(&gd7, &steps(&gd7, SEVEN)).unwrap());
    }
}
