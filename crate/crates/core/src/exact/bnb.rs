//! Best-first branch-and-bound with plunging.
//!
//! Node bounds are the larger of a combinatorial bound (uncovered demand times
//! the cheapest remaining way to cover it) and the LP relaxation, solved with
//! `microlp`. The root presolve propagates activity bounds and shrinks big-M
//! coefficients to the bounds of the other terms; the MILP itself (and its
//! MPS export) keeps the uniform M.
//!
//! Branching follows the family order placement, servers, assignments,
//! migration direction; within the family, strong branching picks among the
//! most fractional candidates, and each child keeps the LP solved for it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};
use serde::{Deserialize, Serialize};

use super::milp::{MilpModel, Relation, VarKind};
use crate::model::Solution;
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    pub time_budget: Duration,
    pub node_budget: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            time_budget: Duration::from_secs(60),
            node_budget: u64::MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleBoundGap,
    TimeLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleBoundGap => "feasible-bound-gap",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Best solution found; `None` only when no feasible point is known.
    pub solution: Option<Solution>,
    /// Model variable vector of `solution`.
    pub values: Option<Vec<i64>>,
    pub objective: Option<Money>,
    pub status: SolveStatus,
    pub nodes: u64,
    pub wall_time: Duration,
    /// Proven lower bound. `Money(i64::MAX)` for infeasible models.
    pub best_bound: Money,
}

/// Solves `model` from scratch.
///
/// Every variable must be binary or integer (`build_milp` produces nothing
/// else), and the model must have the layout `build_milp` gives it.
pub fn solve(model: &MilpModel, limits: &SolveLimits) -> SolveReport {
    solve_with_incumbent(model, limits, None)
}

/// Like [`solve`], seeded with a known feasible solution.
pub fn solve_with_incumbent(model: &MilpModel, limits: &SolveLimits, start: Option<&Solution>) -> SolveReport {
    let started = Instant::now();
    let mut search = Search::new(model, started, limits);
    if let Some(sol) = start {
        let v = model.encode(sol);
        search.offer(v);
    }
    let mut zero = vec![0; model.variables.len()];
    model.complete(&mut zero);
    search.offer(zero);
    search.run();
    search.report()
}

const INT_TOL: f64 = 1e-6;
/// Open nodes allowed to carry a copy of a simplex state.
const WARM_LIMIT: usize = 48;
/// Fractional variables tried per node when choosing where to branch.
const STRONG_CANDIDATES: usize = 8;

fn lp_bound(obj: f64) -> i64 {
    (obj - 1e-9 * obj.abs() - 1e-4).ceil() as i64
}

type Path = Option<Rc<Step>>;

struct Step {
    var: usize,
    /// `x >= value` when true, `x <= value` otherwise.
    up: bool,
    value: i64,
    parent: Path,
}

struct Node {
    bound: i64,
    depth: u32,
    seq: u64,
    path: Path,
    warm: Warm,
}

enum Warm {
    None,
    /// The node's own LP, solved while choosing the branching variable.
    Own(Box<microlp::Solution>),
}

impl Warm {
    fn is_some(&self) -> bool {
        !matches!(self, Warm::None)
    }
}

enum ChildLp {
    Infeasible,
    Solved(microlp::Solution),
    Failed,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the maximum: lowest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// A `>=` row.
#[derive(Clone)]
struct LpRow {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

const INF: i128 = i64::MAX as i128;

fn min_activity(terms: &[(usize, i64)], lb: &[i64], ub: &[i64], skip: Option<usize>) -> Option<i128> {
    let mut sum: i128 = 0;
    for (k, &(j, a)) in terms.iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        let bound = if a > 0 { lb[j] } else { ub[j] };
        if bound == i64::MAX || bound == i64::MIN {
            return None;
        }
        sum += a as i128 * bound as i128;
    }
    Some(sum)
}

/// Activity-based bound tightening over `>=` rows, a few rounds.
fn propagate(rows: &[LpRow], lb: &mut [i64], ub: &mut [i64]) {
    for _ in 0..8 {
        let mut changed = false;
        for row in rows {
            // a_j x_j >= rhs - max activity of the rest
            let mut max_rest_total: i128 = 0;
            let mut unbounded = 0usize;
            let mut unbounded_at = 0usize;
            for (k, &(j, a)) in row.terms.iter().enumerate() {
                let bound = if a > 0 { ub[j] } else { lb[j] };
                if bound == i64::MAX {
                    unbounded += 1;
                    unbounded_at = k;
                } else {
                    max_rest_total += a as i128 * bound as i128;
                }
            }
            if unbounded > 1 {
                continue;
            }
            for (k, &(j, a)) in row.terms.iter().enumerate() {
                let own = if a > 0 { ub[j] } else { lb[j] };
                let max_rest = if unbounded == 1 {
                    if k != unbounded_at {
                        continue;
                    }
                    max_rest_total
                } else {
                    max_rest_total - a as i128 * own as i128
                };
                let need = row.rhs as i128 - max_rest;
                // a x >= need
                let a = a as i128;
                if a > 0 {
                    let v = div_ceil_i128(need, a);
                    if v > lb[j] as i128 && v <= INF {
                        lb[j] = v as i64;
                        changed = true;
                    }
                } else {
                    let v = div_floor_i128(need, a);
                    if v < ub[j] as i128 {
                        ub[j] = v.max(i64::MIN as i128) as i64;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn div_floor_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    -div_floor_i128(-a, b)
}

/// Shrinks the coefficient of a binary in a big-M row to what the other
/// terms' bounds make necessary. The integer points are unchanged.
fn tighten_binary(row: &mut LpRow, binary: &[bool], lb: &[i64], ub: &[i64]) {
    let Some(k) = row.terms.iter().position(|&(j, _)| binary[j] && lb[j] == 0 && ub[j] == 1) else {
        return;
    };
    let a = row.terms[k].1;
    let Some(lmin) = min_activity(&row.terms, lb, ub, Some(k)) else {
        return;
    };
    // delta = 0: L >= rhs; delta = 1: L >= rhs - a. Cases below lmin are void.
    let r0 = (row.rhs as i128).max(lmin);
    let r1 = (row.rhs as i128 - a as i128).max(lmin);
    if r0 == row.rhs as i128 && r1 == row.rhs as i128 - a as i128 {
        return;
    }
    let (Ok(rhs), Ok(coef)) = (i64::try_from(r0), i64::try_from(r0 - r1)) else {
        return;
    };
    row.terms[k].1 = coef;
    row.rhs = rhs;
}

struct CoverRow {
    vars: Vec<usize>,
    rhs: i64,
}

struct Search<'a> {
    model: &'a MilpModel,
    /// LP handles; index `j` of every problem built here is variable `j`.
    vars: Vec<Variable>,
    started: Instant,
    limits: SolveLimits,
    lb: Vec<i64>,
    ub: Vec<i64>,
    /// LP rows: the multi-variable constraints after presolve.
    lp_rows: Vec<LpRow>,
    covers: Vec<CoverRow>,
    nonneg_costs: bool,
    root_infeasible: bool,
    incumbent: Option<(i64, Vec<i64>)>,
    heap: BinaryHeap<Node>,
    warm_in_heap: usize,
    seq: u64,
    nodes: u64,
    /// Smallest bound among nodes dropped after LP failures.
    lost: Option<i64>,
    stopped: Option<SolveStatus>,
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

impl<'a> Search<'a> {
    fn new(model: &'a MilpModel, started: Instant, limits: &SolveLimits) -> Self {
        let n = model.variables.len();
        let mut lb: Vec<i64> = model.variables.iter().map(|v| v.lower).collect();
        let mut ub: Vec<i64> = model.variables.iter().map(|v| v.upper.unwrap_or(i64::MAX)).collect();
        for (j, v) in model.variables.iter().enumerate() {
            debug_assert!(v.kind != VarKind::Continuous, "continuous variable {j}");
            if v.kind == VarKind::Binary {
                lb[j] = lb[j].max(0);
                ub[j] = ub[j].min(1);
            }
        }
        let mut rows = Vec::new();
        let mut root_infeasible = false;
        for (i, c) in model.constraints.iter().enumerate() {
            let terms: Vec<_> = c.terms.iter().filter(|t| t.1 != 0).collect();
            match terms.as_slice() {
                [] => {
                    let ok = match c.relation {
                        Relation::Le => 0 <= c.rhs,
                        Relation::Ge => 0 >= c.rhs,
                        Relation::Eq => c.rhs == 0,
                    };
                    root_infeasible |= !ok;
                }
                [&(j, a)] => {
                    let (le, ge) = match c.relation {
                        Relation::Le => (true, false),
                        Relation::Ge => (false, true),
                        Relation::Eq => (true, true),
                    };
                    if le {
                        let v = if a > 0 { div_floor(c.rhs, a) } else { div_ceil(c.rhs, a) };
                        if a > 0 { ub[j] = ub[j].min(v) } else { lb[j] = lb[j].max(v) }
                    }
                    if ge {
                        let v = if a > 0 { div_ceil(c.rhs, a) } else { div_floor(c.rhs, a) };
                        if a > 0 { lb[j] = lb[j].max(v) } else { ub[j] = ub[j].min(v) }
                    }
                }
                _ => rows.push(i),
            }
        }
        let mut lp_rows: Vec<LpRow> = Vec::new();
        for &i in &rows {
            let c = &model.constraints[i];
            let terms: Vec<(usize, i64)> = c.terms.iter().copied().filter(|t| t.1 != 0).collect();
            let neg = || LpRow {
                terms: terms.iter().map(|&(j, a)| (j, -a)).collect(),
                rhs: -c.rhs,
            };
            let pos = || LpRow {
                terms: terms.clone(),
                rhs: c.rhs,
            };
            match c.relation {
                Relation::Ge => lp_rows.push(pos()),
                Relation::Le => lp_rows.push(neg()),
                Relation::Eq => {
                    lp_rows.push(pos());
                    lp_rows.push(neg());
                }
            }
        }
        propagate(&lp_rows, &mut lb, &mut ub);
        let binary: Vec<bool> = model.variables.iter().map(|v| v.kind == VarKind::Binary).collect();
        for row in &mut lp_rows {
            tighten_binary(row, &binary, &lb, &ub);
        }
        root_infeasible |= lb.iter().zip(&ub).any(|(l, u)| l > u);

        // Disjoint unit-coefficient covering rows feed the combinatorial bound.
        let mut used = vec![false; n];
        let mut covers = Vec::new();
        for &i in &rows {
            let c = &model.constraints[i];
            if c.relation != Relation::Ge || c.terms.iter().any(|&(j, a)| a != 1 || used[j]) {
                continue;
            }
            c.terms.iter().for_each(|&(j, _)| used[j] = true);
            covers.push(CoverRow {
                vars: c.terms.iter().map(|t| t.0).collect(),
                rhs: c.rhs,
            });
        }

        let mut handles = Problem::new(OptimizationDirection::Minimize);
        let vars = (0..n).map(|_| handles.add_var(0.0, (0.0, 0.0))).collect();
        Search {
            model,
            vars,
            started,
            limits: *limits,
            lb,
            ub,
            lp_rows,
            covers,
            nonneg_costs: model.objective.iter().all(|&c| c >= 0),
            root_infeasible,
            incumbent: None,
            heap: BinaryHeap::new(),
            warm_in_heap: 0,
            seq: 0,
            nodes: 0,
            lost: None,
            stopped: None,
        }
    }

    fn incumbent_value(&self) -> i64 {
        self.incumbent.as_ref().map_or(i64::MAX, |i| i.0)
    }

    /// Accepts `values` as incumbent if feasible and better.
    fn offer(&mut self, mut values: Vec<i64>) {
        if !self.model.is_feasible(&values) {
            return;
        }
        self.normalize_ties(&mut values);
        let obj = self.model.objective_value(&values);
        if obj < self.incumbent_value() {
            self.incumbent = Some((obj, values));
        }
    }

    /// On an unchanged aggregate with the direction set to "shrinks", flips it
    /// to "grows" and recounts migrations as decreases. Cost-neutral.
    fn normalize_ties(&self, values: &mut [i64]) {
        let l = &self.model.layout;
        for u in 0..l.n_clusters {
            for s in 0..l.n_services {
                for t in 1..l.horizon {
                    let a = |t| (0..l.n_dcs).map(|d| values[l.y(d, u, s, t)]).sum::<i64>();
                    if values[l.delta(u, s, t)] != 0 || a(t) != a(t - 1) {
                        continue;
                    }
                    let mut trial = values.to_vec();
                    trial[l.delta(u, s, t)] = 1;
                    for d in 0..l.n_dcs {
                        trial[l.mig(d, u, s, t)] = (values[l.y(d, u, s, t - 1)] - values[l.y(d, u, s, t)]).max(0);
                    }
                    if self.model.is_feasible(&trial) && self.model.objective_value(&trial) <= self.model.objective_value(values) {
                        values.copy_from_slice(&trial);
                    }
                }
            }
        }
    }

    fn bounds(&self, path: &Path) -> (Vec<i64>, Vec<i64>) {
        let mut lb = self.lb.clone();
        let mut ub = self.ub.clone();
        let mut cur = path.as_ref();
        while let Some(step) = cur {
            if step.up {
                lb[step.var] = lb[step.var].max(step.value);
            } else {
                ub[step.var] = ub[step.var].min(step.value);
            }
            cur = step.parent.as_ref();
        }
        (lb, ub)
    }

    /// `None` when the bounds admit no covering.
    fn combinatorial_bound(&self, lb: &[i64], ub: &[i64]) -> Option<i64> {
        let c = &self.model.objective;
        let mut bound: i64 = 0;
        for j in 0..c.len() {
            bound = bound.saturating_add(if c[j] >= 0 {
                c[j].saturating_mul(lb[j])
            } else if ub[j] == i64::MAX {
                return Some(i64::MIN);
            } else {
                c[j].saturating_mul(ub[j])
            });
        }
        if !self.nonneg_costs {
            return Some(bound);
        }
        for row in &self.covers {
            let have: i64 = row.vars.iter().map(|&j| lb[j]).sum();
            let mut need = row.rhs - have;
            if need <= 0 {
                continue;
            }
            let mut open: Vec<(i64, i64)> = row
                .vars
                .iter()
                .filter(|&&j| ub[j] > lb[j])
                .map(|&j| (c[j], ub[j].saturating_sub(lb[j])))
                .collect();
            open.sort_unstable();
            for (cost, room) in open {
                let take = need.min(room);
                bound = bound.saturating_add(cost.saturating_mul(take));
                need -= take;
                if need == 0 {
                    break;
                }
            }
            if need > 0 {
                return None;
            }
        }
        Some(bound)
    }

    fn cold_lp(&self, lb: &[i64], ub: &[i64]) -> Result<microlp::Solution, microlp::Error> {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = (0..lb.len())
            .map(|j| {
                let hi = if ub[j] == i64::MAX { f64::INFINITY } else { ub[j] as f64 };
                p.add_var(self.model.objective[j] as f64, (lb[j] as f64, hi))
            })
            .collect();
        for row in &self.lp_rows {
            let expr: Vec<(Variable, f64)> = row.terms.iter().map(|&(j, a)| (vars[j], a as f64)).collect();
            p.add_constraint(&expr[..], ComparisonOp::Ge, row.rhs as f64);
        }
        match p.solve()? {
            SolveOutcome::Solution(s) => {
                debug_assert!(vars.iter().zip(&self.vars).all(|(a, b)| a.idx() == b.idx()));
                Ok(s)
            }
            SolveOutcome::Interrupted(_) => Err(microlp::Error::InternalError("interrupted".into())),
        }
    }

    fn child_lp(&self, parent: &microlp::Solution, step: &Step) -> ChildLp {
        match self.warm_lp(parent.clone(), step) {
            Ok(s) => ChildLp::Solved(s),
            Err(microlp::Error::Infeasible) => ChildLp::Infeasible,
            Err(_) => ChildLp::Failed,
        }
    }

    fn warm_lp(&self, parent: microlp::Solution, step: &Step) -> Result<microlp::Solution, microlp::Error> {
        let var = self.vars[step.var];
        let outcome = if self.model.variables[step.var].kind == VarKind::Binary {
            parent.fix_var(var, step.value as f64)?
        } else {
            let cmp = if step.up { ComparisonOp::Ge } else { ComparisonOp::Le };
            parent.add_constraint(&[(var, 1.0)][..], cmp, step.value as f64)?
        };
        match outcome {
            SolveOutcome::Solution(s) => Ok(s),
            SolveOutcome::Interrupted(_) => Err(microlp::Error::InternalError("interrupted".into())),
        }
    }

    fn out_of_budget(&self) -> Option<SolveStatus> {
        if self.started.elapsed() >= self.limits.time_budget {
            Some(SolveStatus::TimeLimit)
        } else if self.nodes >= self.limits.node_budget {
            Some(SolveStatus::FeasibleBoundGap)
        } else {
            None
        }
    }

    fn run(&mut self) {
        if self.root_infeasible {
            return;
        }
        let mut current = Some(Node {
            bound: i64::MIN,
            depth: 0,
            seq: 0,
            path: None,
            warm: Warm::None,
        });
        loop {
            let node = match current.take() {
                Some(n) => n,
                None => match self.heap.pop() {
                    Some(n) => {
                        if n.warm.is_some() {
                            self.warm_in_heap -= 1;
                        }
                        n
                    }
                    None => break,
                },
            };
            if node.bound >= self.incumbent_value() {
                continue;
            }
            if let Some(status) = self.out_of_budget() {
                self.stopped = Some(status);
                self.heap.push(node);
                break;
            }
            self.nodes += 1;
            current = self.process(node);
        }
    }

    fn lose(&mut self, bound: i64) {
        self.lost = Some(self.lost.map_or(bound, |b| b.min(bound)));
    }

    /// Bounds, solves and branches `node`; returns the child to plunge into.
    fn process(&mut self, node: Node) -> Option<Node> {
        let (lb, ub) = self.bounds(&node.path);
        if lb.iter().zip(&ub).any(|(l, u)| l > u) {
            return None;
        }
        let comb = self.combinatorial_bound(&lb, &ub)?;
        let inc = self.incumbent_value();
        if comb >= inc {
            return None;
        }

        let lp = match node.warm {
            Warm::Own(own) => *own,
            Warm::None => match self.cold_lp(&lb, &ub) {
                Ok(s) => s,
                Err(microlp::Error::Infeasible) => return None,
                Err(_) => {
                    self.lose(comb.max(node.bound));
                    return None;
                }
            },
        };
        let bound = comb.max(lp_bound(lp.objective())).max(node.bound);
        if bound >= inc {
            return None;
        }
        let n = lb.len();
        let x: Vec<f64> = (0..n).map(|j| lp.var_value_raw(self.vars[j])).collect();

        // Candidates: the most fractional variables of the first family (in
        // priority order) that has any.
        let layout = &self.model.layout;
        let mut fractional = false;
        let mut candidates: Vec<(u8, f64, usize)> = Vec::new();
        for (j, &v) in x.iter().enumerate() {
            let f = v - v.floor();
            let dist = f.min(1.0 - f);
            if dist <= INT_TOL {
                continue;
            }
            fractional = true;
            let pri = layout.priority(j);
            if pri <= 3 {
                candidates.push((pri, dist, j));
            }
        }

        if !fractional {
            let rounded: Vec<i64> = x.iter().map(|v| v.round() as i64).collect();
            if self.model.is_feasible(&rounded) {
                self.offer(rounded);
                return None;
            }
        }
        // Round the assignment down and complete it: a cheap incumbent, and the
        // node optimum once placement, direction and assignment are integral.
        let mut repaired: Vec<i64> = x.iter().map(|v| (v + INT_TOL).floor().max(0.0) as i64).collect();
        self.model.complete(&mut repaired);
        self.offer(repaired);

        if candidates.is_empty() {
            if !fractional {
                // Integral but infeasible after rounding: numerical trouble.
                self.lose(bound);
            }
            return None;
        }
        if bound >= self.incumbent_value() {
            return None;
        }
        let top = candidates.iter().map(|c| c.0).min().unwrap();
        candidates.retain(|c| c.0 == top);
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.cmp(&b.2)));
        candidates.truncate(STRONG_CANDIDATES);

        // Strong branching: solve both children of each candidate and keep
        // the variable whose weaker child improves the bound most.
        let base = lp.objective();
        let step = |j: usize, up: bool| Step {
            var: j,
            up,
            value: if up { x[j].ceil() as i64 } else { x[j].floor() as i64 },
            parent: node.path.clone(),
        };
        let mut best: Option<(f64, usize, [ChildLp; 2])> = None;
        for &(_, _, j) in &candidates {
            let kids = [self.child_lp(&lp, &step(j, false)), self.child_lp(&lp, &step(j, true))];
            let gain = |k: &ChildLp| match k {
                ChildLp::Infeasible => f64::INFINITY,
                ChildLp::Solved(s) if lp_bound(s.objective()) >= self.incumbent_value() => f64::INFINITY,
                ChildLp::Solved(s) => (s.objective() - base).max(0.0),
                ChildLp::Failed => 0.0,
            };
            let (g0, g1) = (gain(&kids[0]), gain(&kids[1]));
            if g0.is_infinite() && g1.is_infinite() {
                // Both sides close: so does this node.
                return None;
            }
            let score = g0.max(1e-6) * g1.max(1e-6);
            if best.as_ref().is_none_or(|b| score > b.0) {
                let done = score.is_infinite();
                best = Some((score, j, kids));
                if done {
                    break;
                }
            }
        }
        let (_, j, kids) = best.expect("at least one candidate");

        let depth = node.depth + 1;
        let mut children: Vec<Node> = Vec::new();
        for (k, kid) in kids.into_iter().enumerate() {
            let up = k == 1;
            let (child_bound, warm) = match kid {
                ChildLp::Infeasible => continue,
                ChildLp::Solved(s) => (bound.max(lp_bound(s.objective())), Warm::Own(Box::new(s))),
                ChildLp::Failed => (bound, Warm::None),
            };
            if child_bound >= self.incumbent_value() {
                continue;
            }
            self.seq += 1;
            children.push(Node {
                bound: child_bound,
                depth,
                seq: self.seq,
                path: Some(Rc::new(step(j, up))),
                warm,
            });
        }
        // Plunge into the child with the better bound (the up child on ties
        // when the value is at least half-way there).
        children.sort_by_key(|c| c.bound);
        if children.len() == 2 && children[0].bound == children[1].bound && x[j] - x[j].floor() >= 0.5 {
            children.swap(0, 1);
        }
        let mut it = children.into_iter();
        let first = it.next();
        for mut other in it {
            if other.warm.is_some() {
                if self.warm_in_heap < WARM_LIMIT {
                    self.warm_in_heap += 1;
                } else {
                    other.warm = Warm::None;
                }
            }
            self.heap.push(other);
        }
        first
    }

    fn report(self) -> SolveReport {
        let inc = self.incumbent_value();
        let open = self.heap.iter().map(|n| n.bound).min();
        let mut bound = [open, self.lost].into_iter().flatten().min().unwrap_or(inc).min(inc);
        let status = match (&self.incumbent, self.stopped) {
            (_, Some(s)) => s,
            (None, None) if self.lost.is_none() => SolveStatus::Infeasible,
            (Some(_), None) if self.lost.is_none() => SolveStatus::Optimal,
            _ => SolveStatus::FeasibleBoundGap,
        };
        if status == SolveStatus::Infeasible {
            bound = i64::MAX;
        }
        let (objective, solution, values) = match self.incumbent {
            Some((obj, v)) => (Some(Money(obj)), Some(self.model.decode(&v)), Some(v)),
            None => (None, None, None),
        };
        SolveReport {
            solution,
            values,
            objective,
            status,
            nodes: self.nodes,
            wall_time: self.started.elapsed(),
            best_bound: Money(bound),
        }
    }
}
