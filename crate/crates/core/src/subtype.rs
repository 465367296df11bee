//! Subtyping with stage constraints, and positivity of stage variables.

use crate::reduce::{annot_stage, equate, whnf, Env, NotConvertible};
use crate::solver::ConstraintSet;
use crate::syntax::{meta, LocalDecl, LocalEnv, StageVar, Term};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("not a subtype")]
pub struct NotSubtype {
    pub left: Term,
    pub right: Term,
}

impl From<NotConvertible> for NotSubtype {
    fn from(e: NotConvertible) -> NotSubtype {
        NotSubtype { left: e.left, right: e.right }
    }
}

/// Constraints under which `t` is a subtype of `u`.
pub fn subtype(env: Env<'_>, lenv: &LocalEnv, t: &Term, u: &Term) -> Result<ConstraintSet, NotSubtype> {
    let mut out = ConstraintSet::new();
    sub(env, lenv, t, u, &mut out)?;
    Ok(out)
}

fn sub(env: Env<'_>, lenv: &LocalEnv, t: &Term, u: &Term, out: &mut ConstraintSet) -> Result<(), NotSubtype> {
    let t = whnf(env, lenv, t);
    let u = whnf(env, lenv, u);
    match (&t, &u) {
        (Term::Univ(a), Term::Univ(b)) => {
            if a.is_sub(*b) {
                Ok(())
            } else {
                Err(NotSubtype { left: t.clone(), right: u.clone() })
            }
        }
        (Term::Prod(x, a1, b1), Term::Prod(_, a2, b2)) => {
            out.extend(&equate(env, lenv, a1, a2)?);
            let inner = lenv.push(LocalDecl::assum(x.clone(), (**a1).clone()));
            sub(env, &inner, b1, b2, out)
        }
        _ => {
            let (ht, at) = t.spine();
            let (hu, au) = u.spine();
            match (ht, hu) {
                (Term::Ind(i, r), Term::Ind(j, s)) => {
                    if i != j || at.len() != au.len() {
                        return Err(NotSubtype { left: t.clone(), right: u.clone() });
                    }
                    for (a, b) in at.iter().zip(&au) {
                        out.extend(&equate(env, lenv, a, b)?);
                    }
                    if let (Some(r), Some(s)) = (annot_stage(*r), annot_stage(*s)) {
                        if env.sig.is_coinductive(i) {
                            out.add(s, r);
                        } else {
                            out.add(r, s);
                        }
                    }
                    Ok(())
                }
                _ if !at.is_empty() && at.len() == au.len() => {
                    sub(env, lenv, ht, hu, out)?;
                    for (a, b) in at.iter().zip(&au) {
                        out.extend(&equate(env, lenv, a, b)?);
                    }
                    Ok(())
                }
                _ => {
                    out.extend(&equate(env, lenv, &t, &u)?);
                    Ok(())
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn dual(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// Whether `v` occurs only positively (or only negatively) in `t`.
pub fn polarity_check(env: Env<'_>, lenv: &LocalEnv, v: StageVar, t: &Term, p: Polarity) -> bool {
    if !meta::stage_vars(t).contains(&v) {
        return true;
    }
    let t = whnf(env, lenv, t);
    if !meta::stage_vars(&t).contains(&v) {
        return true;
    }
    match &t {
        Term::Prod(x, a, b) => {
            let inner = lenv.push(LocalDecl::assum(x.clone(), (**a).clone()));
            polarity_check(env, lenv, v, a, p.dual()) && polarity_check(env, &inner, v, b, p)
        }
        _ => {
            let (head, args) = t.spine();
            let Term::Ind(i, _) = head else { return false };
            if args.iter().any(|a| meta::stage_vars(a).contains(&v)) {
                return false;
            }
            let wanted = if env.sig.is_coinductive(i) { Polarity::Negative } else { Polarity::Positive };
            p == wanted
        }
    }
}

/// Checks every binder domain and the final codomain of a function type
/// separately against the same polarity, without flipping in domains.
pub fn telescope_polarity(env: Env<'_>, lenv: &LocalEnv, v: StageVar, t: &Term, p: Polarity) -> bool {
    match whnf(env, lenv, t) {
        Term::Prod(x, a, b) => {
            let inner = lenv.push(LocalDecl::assum(x, (*a).clone()));
            polarity_check(env, lenv, v, &a, p) && telescope_polarity(env, &inner, v, &b, p)
        }
        other => polarity_check(env, lenv, v, &other, p),
    }
}
