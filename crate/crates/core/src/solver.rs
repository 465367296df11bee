//! Stage constraints as a weighted digraph, and the termination check over it.
//!
//! An edge `x -> y` with weight `w` stands for `x ⊑ y + w`, where a negative
//! weight moves the hats to the left-hand side. The infinity node only has
//! outgoing edges of weight 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{meta, CheckerState, Stage, StageVar, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Infty,
    Var(StageVar),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Infty => f.write_str("INFTY"),
            Node::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    edges: BTreeMap<(Node, Node), i64>,
}

impl ConstraintSet {
    pub fn new() -> ConstraintSet {
        ConstraintSet::default()
    }

    /// Records `lhs ⊑ rhs`.
    pub fn add(&mut self, lhs: Stage, rhs: Stage) {
        match (lhs, rhs) {
            (_, Stage::Infty) => {}
            (Stage::Infty, Stage::Var(v, _)) => self.add_edge(Node::Infty, Node::Var(v), 0),
            (Stage::Var(a, n), Stage::Var(b, m)) => {
                self.add_edge(Node::Var(a), Node::Var(b), i64::from(m) - i64::from(n))
            }
        }
    }

    /// Adds an edge, keeping the smaller weight on duplicates. Trivial
    /// self-loops are dropped; negative ones are kept since they force infinity.
    pub fn add_edge(&mut self, from: Node, to: Node, weight: i64) {
        if to == Node::Infty {
            return;
        }
        let weight = if from == Node::Infty { 0 } else { weight };
        if from == to && weight >= 0 {
            return;
        }
        self.edges.entry((from, to)).and_modify(|w| *w = (*w).min(weight)).or_insert(weight);
    }

    pub fn extend(&mut self, other: &ConstraintSet) {
        for (&(a, b), &w) in &other.edges {
            self.add_edge(a, b, w);
        }
    }

    pub fn union(mut self, other: &ConstraintSet) -> ConstraintSet {
        self.extend(other);
        self
    }

    pub fn weight(&self, from: Node, to: Node) -> Option<i64> {
        self.edges.get(&(from, to)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Node, Node, i64)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Variables mentioned by some edge.
    pub fn vars(&self) -> BTreeSet<StageVar> {
        let mut out = BTreeSet::new();
        for &(a, b) in self.edges.keys() {
            for n in [a, b] {
                if let Node::Var(v) = n {
                    out.insert(v);
                }
            }
        }
        out
    }

    fn remove_touching(&mut self, vs: &BTreeSet<StageVar>) {
        let hit = |n: &Node| matches!(n, Node::Var(v) if vs.contains(v));
        self.edges.retain(|(a, b), _| !hit(a) && !hit(b));
    }

    fn closure(&self, start: impl IntoIterator<Item = Node>, forward: bool) -> BTreeSet<Node> {
        let mut adj: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        for &(a, b) in self.edges.keys() {
            let (from, to) = if forward { (a, b) } else { (b, a) };
            adj.entry(from).or_default().push(to);
        }
        let mut seen: BTreeSet<Node> = BTreeSet::new();
        let mut stack: Vec<Node> = start.into_iter().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                if let Some(next) = adj.get(&n) {
                    stack.extend(next.iter().copied().filter(|m| !seen.contains(m)));
                }
            }
        }
        seen
    }

    /// Everything reachable from `start`, including `start`.
    pub fn upward_closure(&self, start: impl IntoIterator<Item = Node>) -> BTreeSet<Node> {
        self.closure(start, true)
    }

    /// Everything that reaches `start`, including `start`.
    pub fn downward_closure(&self, start: impl IntoIterator<Item = Node>) -> BTreeSet<Node> {
        self.closure(start, false)
    }

    /// Variables lying on some closed walk of negative total weight.
    ///
    /// A strongly connected component containing a negative cycle puts every
    /// one of its members on a negative closed walk, so whole components are
    /// reported.
    pub fn negative_cycle_vars(&self) -> BTreeSet<StageVar> {
        let mut out = BTreeSet::new();
        for comp in self.sccs() {
            let members: BTreeSet<Node> = comp.iter().copied().collect();
            let inner: Vec<(Node, Node, i64)> =
                self.edges().filter(|(a, b, _)| members.contains(a) && members.contains(b)).collect();
            if inner.is_empty() {
                continue;
            }
            // Bellman-Ford from a virtual source at distance 0 to every member.
            let mut dist: BTreeMap<Node, i64> = comp.iter().map(|n| (*n, 0)).collect();
            let mut relaxed = false;
            for _ in 0..=comp.len() {
                relaxed = false;
                for &(a, b, w) in &inner {
                    let cand = dist[&a] + w;
                    if cand < dist[&b] {
                        dist.insert(b, cand);
                        relaxed = true;
                    }
                }
                if !relaxed {
                    break;
                }
            }
            if relaxed {
                out.extend(comp.iter().filter_map(|n| match n {
                    Node::Var(v) => Some(*v),
                    Node::Infty => None,
                }));
            }
        }
        out
    }

    /// Strongly connected components (Tarjan, iterative).
    fn sccs(&self) -> Vec<Vec<Node>> {
        let mut nodes: BTreeSet<Node> = BTreeSet::new();
        let mut adj: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        for &(a, b) in self.edges.keys() {
            nodes.insert(a);
            nodes.insert(b);
            adj.entry(a).or_default().push(b);
        }
        let mut index: BTreeMap<Node, usize> = BTreeMap::new();
        let mut low: BTreeMap<Node, usize> = BTreeMap::new();
        let mut on_stack: BTreeSet<Node> = BTreeSet::new();
        let mut stack: Vec<Node> = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        let empty = Vec::new();

        for &root in &nodes {
            if index.contains_key(&root) {
                continue;
            }
            // (node, next child position)
            let mut work: Vec<(Node, usize)> = vec![(root, 0)];
            while let Some(&mut (n, ref mut child)) = work.last_mut() {
                if *child == 0 && !index.contains_key(&n) {
                    index.insert(n, counter);
                    low.insert(n, counter);
                    counter += 1;
                    stack.push(n);
                    on_stack.insert(n);
                }
                let succs = adj.get(&n).unwrap_or(&empty);
                if *child < succs.len() {
                    let m = succs[*child];
                    *child += 1;
                    if !index.contains_key(&m) {
                        work.push((m, 0));
                    } else if on_stack.contains(&m) {
                        let l = low[&n].min(index[&m]);
                        low.insert(n, l);
                    }
                    continue;
                }
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    let l = low[&parent].min(low[&n]);
                    low.insert(parent, l);
                }
                if low[&n] == index[&n] {
                    let mut comp = Vec::new();
                    while let Some(m) = stack.pop() {
                        on_stack.remove(&m);
                        comp.push(m);
                        if m == n {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
        out
    }

    /// One line per edge, sorted: `v3 ⊑1 v8`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (a, b, w) in self.edges() {
            s.push_str(&format!("{a} ⊑{w} {b}\n"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecCheckError {
    /// No position variable other than the recursive one is left to demote.
    #[error("unsatisfiable size constraints for recursive variable {rho}")]
    Unsatisfiable { rho: StageVar },
    /// These position variables must be demoted before retrying.
    #[error("position variables must be demoted: {0:?}")]
    Demote(BTreeSet<StageVar>),
}

fn vars_of(nodes: &BTreeSet<Node>) -> BTreeSet<StageVar> {
    nodes
        .iter()
        .filter_map(|n| match n {
            Node::Var(v) => Some(*v),
            Node::Infty => None,
        })
        .collect()
}

fn nodes_of(vars: &BTreeSet<StageVar>) -> impl Iterator<Item = Node> + '_ {
    vars.iter().map(|v| Node::Var(*v))
}

/// Checks that `c` admits sizes where `vstar` is finite, `vneq` is infinite and
/// `rho` is below everything finite. Returns the extended constraint set.
pub fn rec_check(
    c: &ConstraintSet,
    rho: StageVar,
    vstar: &BTreeSet<StageVar>,
    vneq: &BTreeSet<StageVar>,
) -> Result<ConstraintSet, RecCheckError> {
    let mut c = c.clone();

    let v_iota = vars_of(&c.downward_closure(nodes_of(vstar)));
    for &v in &v_iota {
        c.add_edge(Node::Var(rho), Node::Var(v), 0);
    }

    let v_neg = c.negative_cycle_vars();
    c.remove_touching(&v_neg);
    for &v in &v_neg {
        c.add_edge(Node::Infty, Node::Var(v), 0);
    }

    let up_neq = c.upward_closure(nodes_of(vneq));
    let up_iota = c.upward_closure(nodes_of(&v_iota));
    for n in up_neq.intersection(&up_iota) {
        c.add_edge(Node::Infty, *n, 0);
    }

    let v_bot: BTreeSet<StageVar> = vars_of(&c.upward_closure([Node::Infty])).intersection(&v_iota).copied().collect();
    if v_bot.is_empty() {
        return Ok(c);
    }

    let v: BTreeSet<StageVar> = v_bot.into_iter().filter(|x| *x != rho && vstar.contains(x)).collect();
    if v.is_empty() {
        Err(RecCheckError::Unsatisfiable { rho })
    } else {
        Err(RecCheckError::Demote(v))
    }
}

/// Failure of a whole recursive block: the index of the definition whose check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopFailure {
    pub def: usize,
    pub rho: StageVar,
}

/// Runs [`rec_check`] for every definition of a block against the same
/// constraints, with position and non-position variables read off the current
/// state. On success returns the union of the results.
pub fn rec_check_pass(
    c: &ConstraintSet,
    rhos: &[StageVar],
    types: &[Term],
    bodies: &[Term],
    state: &CheckerState,
) -> Result<ConstraintSet, (usize, RecCheckError)> {
    let mut out = ConstraintSet::new();
    for (k, ((rho, t), e)) in rhos.iter().zip(types).zip(bodies).enumerate() {
        let pv = meta::pos_vars(t, state.positions());
        let mut sv = meta::stage_vars(t);
        sv.extend(meta::stage_vars(e));
        let sv: BTreeSet<StageVar> = sv.difference(&pv).copied().collect();
        let ck = rec_check(c, *rho, &pv, &sv).map_err(|err| (k, err))?;
        out.extend(&ck);
    }
    Ok(out)
}

/// Repeats [`rec_check_pass`] on a fixed constraint set, demoting position
/// variables from `state` until it succeeds or nothing is left to demote.
pub fn rec_check_loop(
    c: &ConstraintSet,
    rhos: &[StageVar],
    types: &[Term],
    bodies: &[Term],
    state: &mut CheckerState,
) -> Result<ConstraintSet, LoopFailure> {
    loop {
        match rec_check_pass(c, rhos, types, bodies, state) {
            Ok(out) => return Ok(out),
            Err((_, RecCheckError::Demote(vs))) => state.remove_positions(&vs),
            Err((def, RecCheckError::Unsatisfiable { rho })) => return Err(LoopFailure { def, rho }),
        }
    }
}
