//! Brute-force decision of the recursion check on small constraint graphs.

use std::collections::BTreeSet;

use rand::Rng;

use cicstar::solver::{rec_check, ConstraintSet, Node};
use cicstar::syntax::StageVar;

/// A constraint graph over variables `1..=n`. A missing source is ∞.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: u32,
    pub edges: Vec<(Option<u32>, u32, i64)>,
    pub rho: u32,
    pub vstar: BTreeSet<u32>,
    pub vneq: BTreeSet<u32>,
}

impl Instance {
    pub fn random(rng: &mut impl Rng) -> Instance {
        let n = rng.random_range(1..=6u32);
        let rho = rng.random_range(1..=n);
        let mut vstar = BTreeSet::from([rho]);
        let mut vneq = BTreeSet::new();
        for v in 1..=n {
            if v == rho {
                continue;
            }
            match rng.random_range(0..4) {
                0 => {
                    vstar.insert(v);
                }
                1 => {
                    vneq.insert(v);
                }
                _ => {}
            }
        }
        let m = rng.random_range(0..=2 * n + 2);
        let edges = (0..m)
            .map(|_| {
                let to = rng.random_range(1..=n);
                if rng.random_ratio(1, 10) {
                    (None, to, 0)
                } else {
                    (Some(rng.random_range(1..=n)), to, rng.random_range(-2..=2))
                }
            })
            .collect();
        Instance { n, edges, rho, vstar, vneq }
    }

    pub fn constraints(&self) -> ConstraintSet {
        let mut c = ConstraintSet::new();
        for &(a, b, w) in &self.edges {
            let from = a.map_or(Node::Infty, |a| Node::Var(StageVar(a)));
            c.add_edge(from, Node::Var(StageVar(b)), w);
        }
        c
    }

    pub fn solver_accepts(&self) -> bool {
        let set = |s: &BTreeSet<u32>| s.iter().map(|v| StageVar(*v)).collect::<BTreeSet<_>>();
        rec_check(&self.constraints(), StageVar(self.rho), &set(&self.vstar), &set(&self.vneq)).is_ok()
    }

    /// Variables that can reach `vstar`, including `vstar` itself.
    fn below_vstar(&self) -> BTreeSet<u32> {
        let mut out = self.vstar.clone();
        loop {
            let before = out.len();
            for &(a, b, _) in &self.edges {
                if let Some(a) = a {
                    if out.contains(&b) {
                        out.insert(a);
                    }
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    /// Searches assignments into `0..=3n` plus ∞ under which every edge holds,
    /// `vstar` is finite, `vneq` is infinite and `rho` is below everything
    /// that `vstar` depends on.
    pub fn oracle_accepts(&self) -> bool {
        let below = self.below_vstar();
        let mut checks: Vec<(Option<u32>, u32, i64)> = self.edges.clone();
        checks.extend(below.iter().map(|v| (Some(self.rho), *v, 0)));
        let bound = 3 * i64::from(self.n);
        let mut sigma = vec![None::<Option<i64>>; self.n as usize + 1];
        self.search(1, bound, &checks, &mut sigma)
    }

    fn search(
        &self,
        v: u32,
        bound: i64,
        checks: &[(Option<u32>, u32, i64)],
        sigma: &mut [Option<Option<i64>>],
    ) -> bool {
        if v > self.n {
            return true;
        }
        let mut choices: Vec<Option<i64>> = Vec::new();
        if !self.vstar.contains(&v) {
            choices.push(None);
        }
        if !self.vneq.contains(&v) {
            choices.extend((0..=bound).map(Some));
        }
        for c in choices {
            sigma[v as usize] = Some(c);
            let ok = checks.iter().all(|&(a, b, w)| {
                let lhs = match a {
                    None => Some(None),
                    Some(a) if a <= v => sigma[a as usize],
                    Some(_) => return true,
                };
                if b > v {
                    return true;
                }
                le(lhs.expect("assigned"), sigma[b as usize].expect("assigned"), w)
            });
            if ok && self.search(v + 1, bound, checks, sigma) {
                return true;
            }
        }
        sigma[v as usize] = None;
        false
    }
}

/// `x ≤ y + w` with ∞ absorbing.
fn le(x: Option<i64>, y: Option<i64>, w: i64) -> bool {
    match (x, y) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y + w,
    }
}
