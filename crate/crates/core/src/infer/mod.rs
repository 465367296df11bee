//! Size inference and type checking.

mod fix;
mod global;
pub mod meta;

use std::collections::BTreeSet;

pub use global::{check_decl, get_pos_vars, Decl, Report};

use crate::error::{Error, TypeError};
use crate::reduce::{annot_stage, equate, whnf, Env};
use crate::solver::ConstraintSet;
use crate::subtype::subtype;
use crate::syntax::{
    Annot, CaseTerm, CheckerState, IndRef, LocalDecl, LocalEnv, Name, Printer, Stage, StageVar, Term, Universe,
};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoopMode {
    /// After demoting position variables, re-check the bodies so that their
    /// constraints reflect the new positions.
    #[default]
    Regenerate,
    /// Demote and retry against the constraints generated the first time.
    Literal,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub loop_mode: LoopMode,
    pub trace: bool,
}

/// An accepted (co)fixpoint definition, kept for post-hoc checks.
#[derive(Clone, Debug)]
pub struct FixRecord {
    pub name: Name,
    pub lenv: LocalEnv,
    pub ty: Term,
    pub rho: StageVar,
    pub cofix: bool,
    pub positions: BTreeSet<StageVar>,
}

pub struct Checker<'a> {
    pub env: Env<'a>,
    pub state: CheckerState,
    /// Constraints accumulated so far in the current declaration.
    pub c: ConstraintSet,
    pub opts: Options,
    pub trace: Vec<&'static str>,
    /// The constraints handed to the recursion check, per (co)fixpoint.
    pub dumps: Vec<(Name, ConstraintSet)>,
    pub fixpoints: Vec<FixRecord>,
    fix_stack: Vec<Name>,
}

struct Snapshot {
    state: CheckerState,
    c: ConstraintSet,
    trace: usize,
    dumps: usize,
    fixpoints: usize,
}

impl<'a> Checker<'a> {
    pub fn new(env: Env<'a>, opts: Options) -> Checker<'a> {
        Checker {
            env,
            state: CheckerState::new(),
            c: ConstraintSet::new(),
            opts,
            trace: Vec::new(),
            dumps: Vec::new(),
            fixpoints: Vec::new(),
            fix_stack: Vec::new(),
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            state: self.state.clone(),
            c: self.c.clone(),
            trace: self.trace.len(),
            dumps: self.dumps.len(),
            fixpoints: self.fixpoints.len(),
        }
    }

    fn restore(&mut self, s: Snapshot) {
        self.state = s.state;
        self.c = s.c;
        self.trace.truncate(s.trace);
        self.dumps.truncate(s.dumps);
        self.fixpoints.truncate(s.fixpoints);
    }

    fn rule(&mut self, name: &'static str) {
        if self.opts.trace {
            self.trace.push(name);
        }
    }

    fn fail(&self, kind: TypeError) -> Error {
        Error { kind, fixpoint: self.fix_stack.last().cloned(), constraints: None }
    }

    pub fn show(&self, lenv: &LocalEnv, t: &Term) -> String {
        Printer::new().with_positions(self.state.positions()).show_in(t, &lenv.names())
    }

    fn whnf(&self, lenv: &LocalEnv, t: &Term) -> Term {
        whnf(self.env, lenv, t)
    }

    fn sub(&mut self, lenv: &LocalEnv, t: &Term, u: &Term) -> Result<()> {
        match subtype(self.env, lenv, t, u) {
            Ok(c) => {
                self.c.extend(&c);
                Ok(())
            }
            Err(_) => Err(self.fail(TypeError::NotSubtype { left: self.show(lenv, t), right: self.show(lenv, u) })),
        }
    }

    fn conv(&mut self, lenv: &LocalEnv, t: &Term, u: &Term) -> Result<()> {
        match equate(self.env, lenv, t, u) {
            Ok(c) => {
                self.c.extend(&c);
                Ok(())
            }
            Err(_) => Err(self.fail(TypeError::NotConvertible { left: self.show(lenv, t), right: self.show(lenv, u) })),
        }
    }

    fn sized(vs: &[StageVar]) -> Vec<Annot> {
        vs.iter().map(|v| Annot::Sized(Stage::var(*v))).collect()
    }

    /// Infers a type and requires it to be a sort.
    pub fn infer_sort(&mut self, lenv: &LocalEnv, t: &Term) -> Result<(Term, Universe)> {
        let (t2, ty) = self.infer(lenv, t)?;
        match self.whnf(lenv, &ty) {
            Term::Univ(w) => Ok((t2, w)),
            other => Err(self.fail(TypeError::NotSort(self.show(lenv, &other)))),
        }
    }

    /// Annotates a bare term, returning it with its sized type.
    pub fn infer(&mut self, lenv: &LocalEnv, e: &Term) -> Result<(Term, Term)> {
        match e {
            Term::Rel(i, _) => {
                let decl = lenv.get(*i).ok_or_else(|| self.fail(TypeError::Unbound(format!("#{i}"))))?;
                let ty = lenv.type_of(*i).expect("bound variable");
                match &decl.body {
                    Some(body) => {
                        self.rule("a-var-def");
                        let vs = self.state.fresh(body.count_annots());
                        Ok((Term::Rel(*i, Some(Self::sized(&vs))), ty))
                    }
                    None => {
                        self.rule("a-var-assum");
                        Ok((Term::Rel(*i, None), ty))
                    }
                }
            }
            Term::Const(c, _) => {
                let decl = self.env.globals.get(c).ok_or_else(|| self.fail(TypeError::Unbound(c.to_string())))?;
                match decl.body() {
                    None => {
                        self.rule("a-const-assum");
                        let ty = decl.ty().clone();
                        let ty = if has_glob(&ty) {
                            let v = self.state.fresh_var();
                            instantiate_glob(&ty, v)
                        } else {
                            instantiate_glob(&ty, StageVar(0))
                        };
                        Ok((Term::Const(c.clone(), None), ty))
                    }
                    Some(body) => {
                        self.rule("a-const-def");
                        let vs = self.state.fresh(body.count_annots());
                        let v = self.state.fresh_var();
                        Ok((Term::Const(c.clone(), Some(Self::sized(&vs))), instantiate_glob(decl.ty(), v)))
                    }
                }
            }
            Term::Univ(w) => {
                self.rule("a-univ");
                Ok((e.clone(), Term::Univ(w.axiom())))
            }
            Term::Prod(x, a, b) => {
                self.rule("a-prod");
                let (a2, w1) = self.infer_sort(lenv, a)?;
                let inner = lenv.push_assum(x.clone(), a2.clone());
                let (b2, w2) = self.infer_sort(&inner, b)?;
                Ok((Term::Prod(x.clone(), Box::new(a2), Box::new(b2)), Term::Univ(w1.rule(w2))))
            }
            Term::Abs(x, a, b) => {
                if **a == Term::Hole {
                    return Err(self.fail(TypeError::Hole(x.clone())));
                }
                self.rule("a-abs");
                let (a2, _) = self.infer_sort(lenv, a)?;
                let inner = lenv.push_assum(x.clone(), a2.clone());
                let (b2, u) = self.infer(&inner, b)?;
                Ok((
                    Term::Abs(x.clone(), Box::new(a2.erase_bare()), Box::new(b2)),
                    Term::Prod(x.clone(), Box::new(a2), Box::new(u)),
                ))
            }
            Term::App(f, a) => {
                self.rule("a-app");
                let (f2, tf) = self.infer(lenv, f)?;
                let Term::Prod(_, t, u) = self.whnf(lenv, &tf) else {
                    return Err(
                        self.fail(TypeError::NotFunction { term: self.show(lenv, f), ty: self.show(lenv, &tf) })
                    );
                };
                let a2 = self.check(lenv, a, &t)?;
                let ty = u.instantiate(&a2);
                Ok((Term::App(Box::new(f2), Box::new(a2)), ty))
            }
            Term::LetIn(x, t, e1, e2) => {
                self.rule("a-let-in");
                let (t2, e1b) = if **t == Term::Hole {
                    let (e1b, t2) = self.infer(lenv, e1)?;
                    (t2, e1b)
                } else {
                    let (t2, _) = self.infer_sort(lenv, t)?;
                    let e1b = self.check(lenv, e1, &t2)?;
                    (t2, e1b)
                };
                let inner = lenv.push(LocalDecl { name: x.clone(), ty: t2.clone(), body: Some(e1b.clone()) });
                let (e2b, u) = self.infer(&inner, e2)?;
                let ty = u.instantiate(&e1b);
                Ok((Term::LetIn(x.clone(), Box::new(t2.erase_bare()), Box::new(e1b), Box::new(e2b)), ty))
            }
            Term::Ind(i, a) => {
                let r = self.env.sig.ind(i).ok_or_else(|| self.fail(TypeError::Unbound(i.to_string())))?;
                let annot = match a {
                    Annot::Bare => {
                        self.rule("a-ind");
                        Annot::Sized(Stage::var(self.state.fresh_var()))
                    }
                    Annot::Star => {
                        self.rule("a-ind-star");
                        Annot::Sized(Stage::var(self.state.fresh_star(1)[0]))
                    }
                    Annot::Sized(s) => Annot::Sized(*s),
                    Annot::Full | Annot::Glob => Annot::Sized(Stage::Infty),
                };
                Ok((Term::Ind(i.clone(), annot), meta::ind_type(self.env.sig, r)))
            }
            Term::Constr(c) => {
                self.rule("a-constr");
                let r = self.env.sig.constr(c).ok_or_else(|| self.fail(TypeError::Unbound(c.to_string())))?;
                let n = self.env.sig.block(r.block).bodies.len();
                let sizes: Vec<Stage> = self.state.fresh(n).into_iter().map(Stage::var).collect();
                Ok((e.clone(), meta::constr_type(self.env.sig, r, &sizes)))
            }
            Term::Case(c) => self.infer_case(lenv, c),
            Term::Fix(fx) => self.infer_fix(lenv, fx, false),
            Term::Cofix(fx) => self.infer_fix(lenv, fx, true),
            Term::Hole => Err(self.fail(TypeError::Hole(Name::from("_")))),
        }
    }

    /// Checks a bare term against a sized type. Abstractions are checked
    /// against products directly so that their binder types may be omitted.
    pub fn check(&mut self, lenv: &LocalEnv, e: &Term, expected: &Term) -> Result<Term> {
        if let Term::Abs(x, dom, body) = e {
            if let Term::Prod(_, d, cod) = self.whnf(lenv, expected) {
                self.rule("a-abs");
                let dom = if **dom == Term::Hole { d.erase_bare() } else { (**dom).clone() };
                let (t, _) = self.infer_sort(lenv, &dom)?;
                self.conv(lenv, &t, &d)?;
                let inner = lenv.push_assum(x.clone(), t.clone());
                let body = self.check(&inner, body, &cod)?;
                return Ok(Term::Abs(x.clone(), Box::new(t.erase_bare()), Box::new(body)));
            }
        }
        let (e2, t) = self.infer(lenv, e)?;
        self.rule("a-check");
        self.sub(lenv, &t, expected)?;
        Ok(e2)
    }

    fn infer_case(&mut self, lenv: &LocalEnv, c: &CaseTerm) -> Result<(Term, Term)> {
        self.rule("a-case");
        let sig = self.env.sig;
        let (target, tty) = self.infer(lenv, &c.target)?;
        let reduced = self.whnf(lenv, &tty);
        let (head, args) = reduced.spine();
        let Term::Ind(iname, annot) = head else {
            return Err(self.fail(TypeError::NotInductive(self.show(lenv, &tty))));
        };
        let r = sig.ind(iname).expect("inferred inductive is declared");
        let np = sig.nparams(r);
        let ni = sig.ind_body(r).indices.len();
        if args.len() != np + ni {
            return Err(self.fail(TypeError::NotInductive(self.show(lenv, &tty))));
        }
        let params: Vec<Term> = args[..np].iter().map(|t| (*t).clone()).collect();
        let indices: Vec<Term> = args[np..].iter().map(|t| (*t).clone()).collect();
        let s = annot_stage(*annot).unwrap_or(Stage::Infty);

        let bare_params: Vec<Term> = params.iter().map(Term::erase_bare).collect();
        let shape = meta::motive_type(sig, r, &bare_params, Universe::Prop, Annot::Bare);
        let motive0 = fill_holes(&c.motive, &shape, ni + 1);
        let (motive, tp) = self.infer(lenv, &motive0)?;
        let Some((tel, rest)) = meta::decompose(self.env, lenv, &tp, ni + 1) else {
            return Err(self.fail(TypeError::Decompose { ty: self.show(lenv, &tp), n: ni + 1 }));
        };
        let inner = meta::push_tel(lenv, &tel);
        let w = match self.whnf(&inner, &rest) {
            Term::Univ(w) => w,
            other => return Err(self.fail(TypeError::NotSort(self.show(&inner, &other)))),
        };
        let from = sig.ind_body(r).univ;
        if !meta::elim(from, w, || self.is_small(r)) {
            return Err(self.fail(TypeError::Elim { ind: iname.clone(), from, to: w }));
        }

        let vs = self.state.fresh(sig.block(r.block).bodies.len());
        let sizes: Vec<Stage> = vs.iter().map(|v| Stage::var(*v)).collect();
        let vk = vs[r.body];
        self.c.extend(&meta::case_stage(sig, iname, s, vk));
        let expected = meta::motive_type(sig, r, &params, w, Annot::Sized(Stage::var(vk).succ()));
        self.sub(lenv, &tp, &expected)?;

        let ctors = sig.constructors_of(r);
        let names: Vec<&Name> = ctors.iter().map(|k| &sig.constr_decl(*k).name).collect();
        let mut seen = BTreeSet::new();
        for (b, _) in &c.branches {
            if !names.contains(&b) {
                return Err(self.fail(TypeError::Arity(format!("`{b}` is not a constructor of `{iname}`"))));
            }
            if !seen.insert(b.clone()) {
                return Err(self.fail(TypeError::Arity(format!("duplicate branch for `{b}`"))));
            }
        }
        let mut branches = Vec::with_capacity(ctors.len());
        for k in ctors {
            let cname = sig.constr_decl(k).name.clone();
            let Some((_, body)) = c.branches.iter().find(|(b, _)| *b == cname) else {
                return Err(self.fail(TypeError::Arity(format!("missing branch for `{cname}`"))));
            };
            let bt = meta::branch_type(sig, k, &params, &sizes, &motive);
            let body = self.check(lenv, body, &bt)?;
            branches.push((cname, body));
        }
        let ty = Term::apps(motive.clone(), indices.into_iter().chain([target.clone()]));
        let term = Term::Case(Box::new(CaseTerm { motive: motive.erase_bare(), target, branches }));
        Ok((term, ty))
    }

    /// Empty inductives, and those with a single constructor whose
    /// non-parameter arguments are all proofs.
    fn is_small(&mut self, r: IndRef) -> bool {
        let sig = self.env.sig;
        let ctors = sig.constructors_of(r);
        match ctors.as_slice() {
            [] => true,
            [k] => {
                let snap = self.snapshot();
                let mut lenv = LocalEnv::new();
                for p in &sig.block(r.block).params {
                    lenv = lenv.push(p.clone());
                }
                let mut ok = true;
                for a in &sig.constr_decl(*k).args {
                    match self.infer_sort(&lenv, &a.ty) {
                        Ok((_, Universe::Prop)) => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                    lenv = lenv.push(a.clone());
                }
                self.restore(snap);
                ok
            }
            _ => false,
        }
    }
}

fn has_glob(t: &Term) -> bool {
    let mut found = false;
    t.for_each_annot(&mut |a| found |= a == Annot::Glob);
    found
}

/// Global annotations become `v`, full ones ∞.
fn instantiate_glob(t: &Term, v: StageVar) -> Term {
    t.map_annots(&mut |a| match a {
        Annot::Glob => Annot::Sized(Stage::var(v)),
        Annot::Full => Annot::Sized(Stage::Infty),
        _ => a,
    })
}

/// Fills omitted binder types of the first `n` abstractions of `m` from the
/// corresponding products of `shape`.
fn fill_holes(m: &Term, shape: &Term, n: usize) -> Term {
    if n == 0 {
        return m.clone();
    }
    match (m, shape) {
        (Term::Abs(x, dom, body), Term::Prod(_, d, cod)) => {
            let dom = if **dom == Term::Hole { d.erase_bare() } else { (**dom).clone() };
            Term::Abs(x.clone(), Box::new(dom), Box::new(fill_holes(body, cod, n - 1)))
        }
        _ => m.clone(),
    }
}
