//! Pure metafunctions over annotated terms: variable sets, erasures,
//! shifting and stage substitution.

use std::collections::BTreeSet;

use super::stage::{Annot, Stage, StageVar};
use super::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EraseMode {
    /// Every annotation becomes bare; size vectors are dropped.
    Bare,
    /// Every annotation becomes full.
    Full,
    /// Position variables become `*`, everything else bare.
    Star,
    /// Position variables become global annotations, everything else full.
    Glob,
}

/// All stage variables in sized annotations and size vectors.
pub fn stage_vars(t: &Term) -> BTreeSet<StageVar> {
    let mut out = BTreeSet::new();
    t.for_each_annot(&mut |a| {
        if let Annot::Sized(Stage::Var(v, _)) = a {
            out.insert(v);
        }
    });
    out
}

/// Stage variables of `t` that are position variables.
pub fn pos_vars(t: &Term, positions: &BTreeSet<StageVar>) -> BTreeSet<StageVar> {
    stage_vars(t).intersection(positions).copied().collect()
}

pub fn count_annots(t: &Term) -> usize {
    t.count_annots()
}

pub fn erase(t: &Term, mode: EraseMode, positions: &BTreeSet<StageVar>) -> Term {
    let is_pos = |a: Annot| matches!(a, Annot::Sized(Stage::Var(v, _)) if positions.contains(&v));
    match mode {
        EraseMode::Bare => t.erase_bare(),
        EraseMode::Full => t.erase_full(),
        EraseMode::Star => t.map_annots(&mut |a| {
            if is_pos(a) {
                Annot::Star
            } else if a.is_counted() {
                Annot::Bare
            } else {
                a
            }
        }),
        EraseMode::Glob => t.map_annots(&mut |a| {
            if is_pos(a) {
                Annot::Glob
            } else if a.is_counted() {
                Annot::Full
            } else {
                a
            }
        }),
    }
}

/// Adds a successor to every annotation whose variable is a position variable.
pub fn shift(t: &Term, positions: &BTreeSet<StageVar>) -> Term {
    t.map_annots(&mut |a| match a {
        Annot::Sized(Stage::Var(v, n)) if positions.contains(&v) => Annot::Sized(Stage::Var(v, n + 1)),
        _ => a,
    })
}

/// Replaces `v` by `s`, keeping any successors applied to `v`.
pub fn subst_stage(t: &Term, v: StageVar, s: Stage) -> Term {
    t.map_annots(&mut |a| match a {
        Annot::Sized(Stage::Var(w, n)) if w == v => {
            let mut r = s;
            for _ in 0..n {
                r = r.succ();
            }
            Annot::Sized(r)
        }
        _ => a,
    })
}

/// Replaces full annotations, in canonical order, by the given stages.
pub fn subst_fulls(t: &Term, sizes: &[Stage]) -> Option<Term> {
    let annots: Vec<Annot> = sizes.iter().map(|s| Annot::Sized(*s)).collect();
    t.subst_fulls(&annots)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("infinite stage has no underlying variable")]
pub struct InfiniteStage;

pub fn stage_floor(s: Stage) -> Result<StageVar, InfiniteStage> {
    s.floor().ok_or(InfiniteStage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(a: Annot) -> Term {
        Term::ind("Nat", a)
    }

    fn sv(v: u32) -> Annot {
        Annot::Sized(Stage::var(StageVar(v)))
    }

    fn set(vs: &[u32]) -> BTreeSet<StageVar> {
        vs.iter().map(|v| StageVar(*v)).collect()
    }

    #[test]
    fn stage_vars_collects_sized_only() {
        let t = Term::arrow(nat(sv(1)), nat(sv(2)));
        assert_eq!(stage_vars(&t), set(&[1, 2]));
        assert!(stage_vars(&nat(Annot::Sized(Stage::Infty))).is_empty());
        let dom = Term::abs("x", nat(sv(9)), nat(sv(3)));
        assert_eq!(stage_vars(&dom), set(&[3]));
    }

    #[test]
    fn pos_vars_intersects() {
        let t = Term::arrow(nat(sv(1)), nat(sv(5)));
        assert_eq!(pos_vars(&t, &set(&[1])), set(&[1]));
        assert!(pos_vars(&nat(sv(3)), &set(&[1, 2])).is_empty());
    }

    #[test]
    fn erasures_of_fixpoint_type() {
        let t = Term::arrow(nat(sv(1)), nat(sv(2)));
        let p = set(&[1, 2]);
        assert_eq!(erase(&t, EraseMode::Glob, &p), Term::arrow(nat(Annot::Glob), nat(Annot::Glob)));
        assert_eq!(erase(&t, EraseMode::Star, &p), Term::arrow(nat(Annot::Star), nat(Annot::Star)));
        assert_eq!(erase(&nat(sv(3)), EraseMode::Bare, &p), nat(Annot::Bare));
        assert_eq!(erase(&t, EraseMode::Glob, &set(&[1])), Term::arrow(nat(Annot::Glob), nat(Annot::Full)));
    }

    #[test]
    fn shift_only_touches_positions() {
        let p = set(&[1, 2]);
        let t = Term::arrow(nat(sv(1)), nat(sv(2)));
        let hat = |v| Annot::Sized(Stage::Var(StageVar(v), 1));
        assert_eq!(shift(&t, &p), Term::arrow(nat(hat(1)), nat(hat(2))));
        assert_eq!(shift(&nat(sv(3)), &p), nat(sv(3)));
        let inf = nat(Annot::Sized(Stage::Infty));
        assert_eq!(shift(&inf, &p), inf);
    }

    #[test]
    fn subst_stage_keeps_hats() {
        let v = StageVar(4);
        let t = nat(Annot::Sized(Stage::Var(v, 2)));
        assert_eq!(subst_stage(&t, v, Stage::Infty), nat(Annot::Sized(Stage::Infty)));
        let w = StageVar(5);
        assert_eq!(subst_stage(&t, v, Stage::var(w)), nat(Annot::Sized(Stage::Var(w, 2))));
    }

    #[test]
    fn floor_of_infinity_fails() {
        assert_eq!(stage_floor(Stage::Var(StageVar(2), 3)), Ok(StageVar(2)));
        assert_eq!(stage_floor(Stage::Infty), Err(InfiniteStage));
    }
}
