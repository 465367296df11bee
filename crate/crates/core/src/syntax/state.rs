use std::collections::BTreeSet;

use super::stage::StageVar;

/// The mutable stage-variable pools of a single declaration check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckerState {
    next: u32,
    pool: BTreeSet<StageVar>,
    positions: BTreeSet<StageVar>,
}

impl CheckerState {
    pub fn new() -> CheckerState {
        CheckerState::default()
    }

    pub fn fresh_var(&mut self) -> StageVar {
        let v = StageVar(self.next);
        self.next += 1;
        self.pool.insert(v);
        v
    }

    pub fn fresh(&mut self, n: usize) -> Vec<StageVar> {
        (0..n).map(|_| self.fresh_var()).collect()
    }

    /// Like [`CheckerState::fresh`], also marking the variables as positions.
    pub fn fresh_star(&mut self, n: usize) -> Vec<StageVar> {
        let vs = self.fresh(n);
        self.positions.extend(vs.iter().copied());
        vs
    }

    pub fn pool(&self) -> &BTreeSet<StageVar> {
        &self.pool
    }

    pub fn positions(&self) -> &BTreeSet<StageVar> {
        &self.positions
    }

    pub fn is_position(&self, v: StageVar) -> bool {
        self.positions.contains(&v)
    }

    pub fn add_positions(&mut self, vs: impl IntoIterator<Item = StageVar>) {
        for v in vs {
            debug_assert!(self.pool.contains(&v));
            self.positions.insert(v);
        }
    }

    pub fn remove_positions(&mut self, vs: &BTreeSet<StageVar>) {
        for v in vs {
            self.positions.remove(v);
        }
    }

    /// Number of variables allocated so far.
    pub fn allocated(&self) -> u32 {
        self.next
    }

    /// Clears both pools and the counter.
    pub fn reset(&mut self) {
        *self = CheckerState::default();
    }
}
