use std::collections::BTreeSet;

use crate::error::{Error, TypeError};
use crate::reduce::{whnf, Env};
use crate::solver::ConstraintSet;
use crate::subtype::subtype;
use crate::syntax::{erase, Annot, EraseMode, GlobalDecl, LocalEnv, Name, Stage, StageVar, Term};

use super::{Checker, FixRecord, Options, Result};

/// A bare global declaration.
#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Assum {
        name: Name,
        ty: Term,
    },
    /// A missing type is taken from the body.
    Def {
        name: Name,
        ty: Option<Term>,
        body: Term,
    },
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Assum { name, .. } | Decl::Def { name, .. } => name,
        }
    }
}

/// The outcome of checking one declaration.
#[derive(Clone, Debug)]
pub struct Report {
    pub decl: GlobalDecl,
    pub dumps: Vec<(Name, ConstraintSet)>,
    pub trace: Vec<&'static str>,
    pub fixpoints: Vec<FixRecord>,
    /// The sized body type, before erasure to a global type.
    pub inferred: Option<Term>,
    pub positions: BTreeSet<StageVar>,
}

/// Checks a declaration against `env`. Stage variables never outlive it.
pub fn check_decl(env: Env<'_>, opts: Options, decl: &Decl) -> Result<Report> {
    let name = decl.name();
    if env.globals.contains(name) || env.sig.defines(name) {
        return Err(TypeError::Duplicate(name.clone()).into());
    }
    let mut ck = Checker::new(env, opts);
    let lenv = LocalEnv::new();
    let (stored, inferred) = match decl {
        Decl::Assum { ty, .. } => {
            ck.rule("a-global-assum");
            let (t, _) = ck.infer_sort(&lenv, ty)?;
            (GlobalDecl::Assum { ty: t.erase_full() }, None)
        }
        Decl::Def { ty, body, .. } => {
            ck.rule("a-global-def");
            let (t, e, u) = match ty {
                Some(ty) => {
                    let (t, _) = ck.infer_sort(&lenv, ty)?;
                    let (e, u) = ck.infer(&lenv, body)?;
                    (t, e, u)
                }
                None => {
                    let (e, u) = ck.infer(&lenv, body)?;
                    let (t, _) = ck.infer_sort(&lenv, &u.erase_bare())?;
                    (t, e, u)
                }
            };
            if subtype(env, &lenv, &u, &t).is_err() {
                return Err(Error::from(TypeError::NotSubtype { left: ck.show(&lenv, &u), right: ck.show(&lenv, &t) }));
            }
            let pv = get_pos_vars(env, &lenv, &t, &u, ck.state.positions()).map_err(|(d, i)| {
                Error::from(TypeError::Mismatch { declared: ck.show(&lenv, &d), inferred: ck.show(&lenv, &i) })
            })?;
            ck.state.add_positions(pv);
            let positions = ck.state.positions().clone();
            (GlobalDecl::Def { ty: erase(&t, EraseMode::Glob, &positions), body: e.erase_full() }, Some(u))
        }
    };
    Ok(Report {
        decl: stored,
        dumps: ck.dumps,
        trace: ck.trace,
        fixpoints: ck.fixpoints,
        inferred,
        positions: ck.state.positions().clone(),
    })
}

/// Variables of `declared` sitting where `inferred` has position variables.
/// On a shape mismatch, returns the offending pair.
pub fn get_pos_vars(
    env: Env<'_>,
    lenv: &LocalEnv,
    declared: &Term,
    inferred: &Term,
    positions: &BTreeSet<StageVar>,
) -> std::result::Result<BTreeSet<StageVar>, (Term, Term)> {
    let mut out = BTreeSet::new();
    walk(env, lenv, declared, inferred, positions, &mut out, false)?;
    Ok(out)
}

fn var_of(a: Annot) -> Option<StageVar> {
    match a {
        Annot::Sized(Stage::Var(v, _)) => Some(v),
        _ => None,
    }
}

fn walk(
    env: Env<'_>,
    lenv: &LocalEnv,
    t: &Term,
    u: &Term,
    positions: &BTreeSet<StageVar>,
    out: &mut BTreeSet<StageVar>,
    reduced: bool,
) -> std::result::Result<(), (Term, Term)> {
    let retry = |out: &mut BTreeSet<StageVar>| {
        if reduced {
            return Err((t.clone(), u.clone()));
        }
        let (t2, u2) = (whnf(env, lenv, t), whnf(env, lenv, u));
        walk(env, lenv, &t2, &u2, positions, out, true)
    };
    match (t, u) {
        (Term::Prod(x, a1, b1), Term::Prod(_, a2, b2)) => {
            walk(env, lenv, a1, a2, positions, out, false)?;
            let inner = lenv.push_assum(x.clone(), (**a1).clone());
            walk(env, &inner, b1, b2, positions, out, false)
        }
        (Term::Univ(_), Term::Univ(_)) | (Term::Rel(..), Term::Rel(..)) => Ok(()),
        (Term::Constr(a), Term::Constr(b)) if a == b => Ok(()),
        (Term::Const(a, _), Term::Const(b, _)) if a == b => Ok(()),
        (Term::Ind(i, a), Term::Ind(j, b)) if i == j => {
            if let (Some(w), Some(v)) = (var_of(*a), var_of(*b)) {
                if positions.contains(&v) {
                    out.insert(w);
                }
            }
            Ok(())
        }
        (Term::App(..), Term::App(..)) => {
            let (ht, at) = t.spine();
            let (hu, au) = u.spine();
            let same_head = matches!((ht, hu), (Term::Ind(i, _), Term::Ind(j, _)) if i == j);
            if !same_head || at.len() != au.len() {
                return retry(out);
            }
            walk(env, lenv, ht, hu, positions, out, false)?;
            for (a, b) in at.iter().zip(&au) {
                walk(env, lenv, a, b, positions, out, false)?;
            }
            Ok(())
        }
        _ => retry(out),
    }
}
