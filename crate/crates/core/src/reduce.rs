//! Weak-head reduction and conversion.

use crate::solver::ConstraintSet;
use crate::syntax::{Annot, GlobalDecl, GlobalEnv, LocalDecl, LocalEnv, Name, Signature, Stage, Term};

/// The global part of a typing context.
#[derive(Clone, Copy)]
pub struct Env<'a> {
    pub sig: &'a Signature,
    pub globals: &'a GlobalEnv,
}

impl<'a> Env<'a> {
    pub fn new(sig: &'a Signature, globals: &'a GlobalEnv) -> Env<'a> {
        Env { sig, globals }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("terms are not convertible")]
pub struct NotConvertible {
    pub left: Term,
    pub right: Term,
}

/// Stage carried by an annotation for constraint purposes. Full annotations
/// stand for infinity; bare and position ones carry no size.
pub fn annot_stage(a: Annot) -> Option<Stage> {
    match a {
        Annot::Sized(s) => Some(s),
        Annot::Full | Annot::Glob => Some(Stage::Infty),
        Annot::Bare | Annot::Star => None,
    }
}

fn unfold_sized(body: &Term, sizes: &Option<Vec<Annot>>) -> Term {
    match sizes {
        Some(sz) => body.erase_full().subst_fulls(sz).unwrap_or_else(|| body.clone()),
        None => body.clone(),
    }
}

/// One δ or Δ step on the head of the spine, if the head is a definition.
pub fn unfold_head(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> Option<Term> {
    let (head, args) = t.spine();
    let unfolded = match head {
        Term::Rel(i, sizes) => unfold_sized(&lenv.body_of(*i)?, sizes),
        Term::Const(c, sizes) => match env.globals.get(c)? {
            GlobalDecl::Def { body, .. } => unfold_sized(body, sizes),
            GlobalDecl::Assum { .. } => return None,
        },
        _ => return None,
    };
    Some(Term::apps(unfolded, args.into_iter().cloned()))
}

struct Machine<'e, 'a> {
    env: Env<'a>,
    lenv: &'e LocalEnv,
    delta: bool,
    fuel: Option<usize>,
}

impl Machine<'_, '_> {
    fn tick(&mut self) -> bool {
        match &mut self.fuel {
            Some(0) => false,
            Some(n) => {
                *n -= 1;
                true
            }
            None => true,
        }
    }

    fn run(&mut self, t: &Term) -> Option<Term> {
        let mut t = t.clone();
        loop {
            match self.step(&t)? {
                Some(next) => t = next,
                None => return Some(t),
            }
        }
    }

    /// `None` when out of fuel, `Some(None)` when in head normal form.
    fn step(&mut self, t: &Term) -> Option<Option<Term>> {
        let (head, args) = t.spine();
        let reduced = match head {
            Term::Abs(_, _, body) if !args.is_empty() => {
                let r = body.instantiate(args[0]);
                Term::apps(r, args[1..].iter().map(|a| (*a).clone()))
            }
            Term::LetIn(_, _, e, body) => Term::apps(body.instantiate(e), args.iter().map(|a| (*a).clone())),
            Term::Rel(..) | Term::Const(..) if self.delta => match unfold_head(self.env, self.lenv, t) {
                Some(u) => u,
                None => return Some(None),
            },
            Term::Case(c) => match self.reduce_case(c)? {
                Some(r) => Term::apps(r, args.iter().map(|a| (*a).clone())),
                None => return Some(None),
            },
            Term::Fix(fx) => {
                let Some(&n) = fx.indices.get(fx.select - 1) else { return Some(None) };
                if n == 0 || args.len() < n {
                    return Some(None);
                }
                let rec = self.run(args[n - 1])?;
                if !matches!(rec.spine().0, Term::Constr(_)) {
                    return Some(None);
                }
                let mut new_args: Vec<Term> = args.iter().map(|a| (*a).clone()).collect();
                new_args[n - 1] = rec;
                Term::apps(fx.unfold(false), new_args)
            }
            _ => return Some(None),
        };
        if !self.tick() {
            return None;
        }
        Some(Some(reduced))
    }

    fn reduce_case(&mut self, c: &crate::syntax::CaseTerm) -> Option<Option<Term>> {
        let target = self.run(&c.target)?;
        let (head, args) = target.spine();
        match head {
            Term::Constr(name) => {
                let Some(r) = self.env.sig.constr(name) else { return Some(None) };
                let nparams = self.env.sig.block(r.block).params.len();
                let Some((_, branch)) = c.branches.iter().find(|(n, _)| n == name) else {
                    return Some(None);
                };
                let rest = args.iter().skip(nparams).map(|a| (*a).clone());
                Some(Some(Term::apps(branch.clone(), rest)))
            }
            Term::Cofix(fx) => {
                let unfolded = Term::apps(fx.unfold(true), args.iter().map(|a| (*a).clone()));
                Some(Some(Term::Case(Box::new(crate::syntax::CaseTerm {
                    motive: c.motive.clone(),
                    target: unfolded,
                    branches: c.branches.clone(),
                }))))
            }
            _ => Some(None),
        }
    }
}

/// Weak-head normal form, unfolding definitions.
pub fn whnf(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> Term {
    Machine { env, lenv, delta: true, fuel: None }.run(t).expect("unbounded reduction")
}

/// Weak-head normal form without unfolding definitions.
pub fn whnf_core(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> Term {
    Machine { env, lenv, delta: false, fuel: None }.run(t).expect("unbounded reduction")
}

/// [`whnf`] with a step budget; `None` when the budget runs out.
pub fn whnf_bounded(env: Env<'_>, lenv: &LocalEnv, t: &Term, steps: usize) -> Option<Term> {
    Machine { env, lenv, delta: true, fuel: Some(steps) }.run(t)
}

/// Conversion up to reduction and η. Corresponding stage annotations are
/// related in both directions.
pub fn equate(env: Env<'_>, lenv: &LocalEnv, t: &Term, u: &Term) -> Result<ConstraintSet, NotConvertible> {
    let mut out = ConstraintSet::new();
    Conv { env }.conv(lenv, t, u, &mut out)?;
    Ok(out)
}

pub(crate) fn equate_annots(a: Annot, b: Annot, out: &mut ConstraintSet) {
    if let (Some(s), Some(r)) = (annot_stage(a), annot_stage(b)) {
        out.add(s, r);
        out.add(r, s);
    }
}

fn equate_vectors(a: &Option<Vec<Annot>>, b: &Option<Vec<Annot>>, out: &mut ConstraintSet) {
    if let (Some(a), Some(b)) = (a, b) {
        if a.len() == b.len() {
            a.iter().zip(b).for_each(|(x, y)| equate_annots(*x, *y, out));
        }
    }
}

fn bind(lenv: &LocalEnv, x: &Name, ty: &Term) -> LocalEnv {
    lenv.push(LocalDecl::assum(x.clone(), ty.clone()))
}

struct Conv<'a> {
    env: Env<'a>,
}

impl Conv<'_> {
    fn conv(&self, lenv: &LocalEnv, t: &Term, u: &Term, out: &mut ConstraintSet) -> Result<(), NotConvertible> {
        if t == u {
            return Ok(());
        }
        let t = whnf_core(self.env, lenv, t);
        let u = whnf_core(self.env, lenv, u);

        let t_def = unfold_head(self.env, lenv, &t);
        let u_def = unfold_head(self.env, lenv, &u);
        match (&t_def, &u_def) {
            (Some(t2), Some(u2)) => {
                if same_head(&t, &u) {
                    let mut scratch = ConstraintSet::new();
                    if self.spines(lenv, &t, &u, &mut scratch).is_ok() {
                        out.extend(&scratch);
                        return Ok(());
                    }
                }
                self.conv(lenv, t2, u2, out)
            }
            (Some(t2), None) => self.conv(lenv, t2, &u, out),
            (None, Some(u2)) => self.conv(lenv, &t, u2, out),
            (None, None) => self.structural(lenv, &t, &u, out),
        }
    }

    fn spines(&self, lenv: &LocalEnv, t: &Term, u: &Term, out: &mut ConstraintSet) -> Result<(), NotConvertible> {
        let (ht, at) = t.spine();
        let (hu, au) = u.spine();
        if at.len() != au.len() {
            return Err(mismatch(t, u));
        }
        self.head(lenv, ht, hu, out)?;
        for (a, b) in at.iter().zip(&au) {
            self.conv(lenv, a, b, out)?;
        }
        Ok(())
    }

    /// Compares two heads that are not applications.
    fn head(&self, lenv: &LocalEnv, t: &Term, u: &Term, out: &mut ConstraintSet) -> Result<(), NotConvertible> {
        match (t, u) {
            (Term::Hole, _) | (_, Term::Hole) => Ok(()),
            (Term::Univ(a), Term::Univ(b)) if a == b => Ok(()),
            (Term::Rel(i, sa), Term::Rel(j, sb)) if i == j => {
                equate_vectors(sa, sb, out);
                Ok(())
            }
            (Term::Const(a, sa), Term::Const(b, sb)) if a == b => {
                equate_vectors(sa, sb, out);
                Ok(())
            }
            (Term::Ind(a, sa), Term::Ind(b, sb)) if a == b => {
                equate_annots(*sa, *sb, out);
                Ok(())
            }
            (Term::Constr(a), Term::Constr(b)) if a == b => Ok(()),
            (Term::Prod(x, a1, b1), Term::Prod(_, a2, b2)) => {
                self.conv(lenv, a1, a2, out)?;
                self.conv(&bind(lenv, x, a1), b1, b2, out)
            }
            (Term::Abs(x, d, b1), Term::Abs(_, _, b2)) => self.conv(&bind(lenv, x, d), b1, b2, out),
            (Term::Abs(x, d, b1), other) | (other, Term::Abs(x, d, b1)) => {
                let eta = Term::app(other.lift(0, 1), Term::rel(0));
                let inner = bind(lenv, x, d);
                if matches!(t, Term::Abs(..)) {
                    self.conv(&inner, b1, &eta, out)
                } else {
                    self.conv(&inner, &eta, b1, out)
                }
            }
            (Term::Case(c1), Term::Case(c2)) => {
                if c1.branches.len() != c2.branches.len() {
                    return Err(mismatch(t, u));
                }
                self.conv(lenv, &c1.motive, &c2.motive, out)?;
                self.conv(lenv, &c1.target, &c2.target, out)?;
                for ((n1, b1), (n2, b2)) in c1.branches.iter().zip(&c2.branches) {
                    if n1 != n2 {
                        return Err(mismatch(t, u));
                    }
                    self.conv(lenv, b1, b2, out)?;
                }
                Ok(())
            }
            (Term::Fix(f1), Term::Fix(f2)) | (Term::Cofix(f1), Term::Cofix(f2)) => {
                let same_shape = f1.select == f2.select
                    && f1.defs.len() == f2.defs.len()
                    && (f1.indices == f2.indices || f1.indices.is_empty() || f2.indices.is_empty());
                if !same_shape {
                    return Err(mismatch(t, u));
                }
                let mut inner = lenv.clone();
                for (d1, d2) in f1.defs.iter().zip(&f2.defs) {
                    self.conv(lenv, &d1.ty, &d2.ty, out)?;
                    inner = bind(&inner, &d1.name, &d1.ty);
                }
                for (d1, d2) in f1.defs.iter().zip(&f2.defs) {
                    self.conv(&inner, &d1.body, &d2.body, out)?;
                }
                Ok(())
            }
            _ => Err(mismatch(t, u)),
        }
    }

    fn structural(&self, lenv: &LocalEnv, t: &Term, u: &Term, out: &mut ConstraintSet) -> Result<(), NotConvertible> {
        match (t, u) {
            (Term::App(..), Term::App(..)) => self.spines(lenv, t, u, out),
            (Term::Abs(..), _) | (_, Term::Abs(..)) => self.head(lenv, t, u, out),
            (Term::App(..), _) | (_, Term::App(..)) => {
                if matches!(t, Term::Hole) || matches!(u, Term::Hole) {
                    Ok(())
                } else {
                    Err(mismatch(t, u))
                }
            }
            _ => self.head(lenv, t, u, out),
        }
    }
}

fn same_head(t: &Term, u: &Term) -> bool {
    match (t.spine().0, u.spine().0) {
        (Term::Rel(i, _), Term::Rel(j, _)) => i == j,
        (Term::Const(a, _), Term::Const(b, _)) => a == b,
        _ => false,
    }
}

fn mismatch(t: &Term, u: &Term) -> NotConvertible {
    NotConvertible { left: t.clone(), right: u.clone() }
}
