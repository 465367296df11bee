//! Elaboration of surface declarations into core terms and signature blocks.

use crate::error::TypeError;
use crate::infer::Decl;
use crate::syntax::{
    name, Annot, CaseTerm, ConstrDecl, FixDef, Fixpoint, GlobalEnv, IndBlock, IndBody, LocalDecl, Name, Signature,
    Telescope, Term,
};

use super::ast::{Binder, FixBody, SDecl, STerm};

pub enum Elaborated {
    Inductive(IndBlock),
    Globals(Vec<Decl>),
}

pub fn elaborate(sig: &Signature, globals: &GlobalEnv, d: &SDecl) -> Result<Elaborated, TypeError> {
    let mut r = Resolver { sig, globals, pending: Vec::new(), locals: Vec::new() };
    match d {
        SDecl::Axiom { name: x, ty } => Ok(Elaborated::Globals(vec![Decl::Assum { name: name(x), ty: r.term(ty)? }])),
        SDecl::Definition { name: x, binders, ty, body } => {
            let ty = match ty {
                Some(t) => Some(r.with_binders(binders, true, |r| r.term(t))?),
                None => None,
            };
            let body = r.with_binders(binders, false, |r| r.term(body))?;
            Ok(Elaborated::Globals(vec![Decl::Def { name: name(x), ty, body }]))
        }
        SDecl::Fixpoint { cofix, bodies } => r.fixpoint(*cofix, bodies).map(Elaborated::Globals),
        SDecl::Inductive { coinductive, bodies } => r.inductive(*coinductive, bodies).map(Elaborated::Inductive),
    }
}

struct Resolver<'a> {
    sig: &'a Signature,
    globals: &'a GlobalEnv,
    /// Names of the inductive block being declared.
    pending: Vec<String>,
    /// Local binders, outermost first.
    locals: Vec<String>,
}

fn flat(binders: &[Binder]) -> impl Iterator<Item = (&String, Option<&STerm>)> {
    binders.iter().flat_map(|b| b.names.iter().map(move |n| (n, b.ty.as_ref())))
}

impl Resolver<'_> {
    fn var(&self, x: &str) -> Result<Term, TypeError> {
        if x != "_" {
            if let Some(k) = self.locals.iter().rev().position(|l| l == x) {
                return Ok(Term::rel(k));
            }
        }
        if self.sig.constr(x).is_some() {
            return Ok(Term::constr(x));
        }
        if self.sig.ind(x).is_some() || self.pending.iter().any(|p| p == x) {
            return Ok(Term::ind(x, Annot::Bare));
        }
        if self.globals.contains(x) {
            return Ok(Term::constant(x));
        }
        Err(TypeError::Unbound(x.to_string()))
    }

    /// Resolves `k` under `binders`, wrapping the result in products when
    /// `prod` is set and in abstractions otherwise.
    fn with_binders(
        &mut self,
        binders: &[Binder],
        prod: bool,
        k: impl FnOnce(&mut Self) -> Result<Term, TypeError>,
    ) -> Result<Term, TypeError> {
        let depth = self.locals.len();
        let mut doms = Vec::new();
        let mut res = Ok(());
        for (x, ty) in flat(binders) {
            match ty.map(|t| self.term(t)).transpose() {
                Ok(t) => doms.push((name(x), t.unwrap_or(Term::Hole))),
                Err(e) => {
                    res = Err(e);
                    break;
                }
            }
            self.locals.push(x.clone());
        }
        let body = res.and_then(|()| k(self));
        self.locals.truncate(depth);
        let body = body?;
        Ok(doms.into_iter().rev().fold(body, |acc, (x, d)| {
            if prod {
                Term::Prod(x, Box::new(d), Box::new(acc))
            } else {
                Term::Abs(x, Box::new(d), Box::new(acc))
            }
        }))
    }

    fn term(&mut self, t: &STerm) -> Result<Term, TypeError> {
        Ok(match t {
            STerm::Var(x) => self.var(x)?,
            STerm::Hole => Term::Hole,
            STerm::Sort(u) => Term::Univ(*u),
            STerm::App(f, args) => {
                let f = self.term(f)?;
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Term::apps(f, args)
            }
            STerm::Arrow(a, b) => Term::arrow(self.term(a)?, self.term(b)?),
            STerm::Forall(bs, body) => self.with_binders(bs, true, |r| r.term(body))?,
            STerm::Fun(bs, body) => self.with_binders(bs, false, |r| r.term(body))?,
            STerm::Let { name: x, binders, ty, value, body } => {
                let ty = match ty {
                    Some(ty) => self.with_binders(binders, true, |r| r.term(ty))?,
                    None => Term::Hole,
                };
                let value = self.with_binders(binders, false, |r| r.term(value))?;
                self.locals.push(x.clone());
                let body = self.term(body);
                self.locals.pop();
                Term::LetIn(name(x), Box::new(ty), Box::new(value), Box::new(body?))
            }
            STerm::Match(m) => {
                let target = self.term(&m.scrutinee)?;
                let idx_names = self.index_names(m)?;
                let mut binders: Vec<String> = idx_names;
                binders.push(m.as_name.clone().unwrap_or_else(|| "_".into()));
                let motive = match &m.ret {
                    Some(ret) => {
                        let bs: Vec<Binder> =
                            binders.into_iter().map(|n| Binder { names: vec![n], ty: None }).collect();
                        self.with_binders(&bs, false, |r| r.term(ret))?
                    }
                    None => Term::Hole,
                };
                let mut branches = Vec::with_capacity(m.branches.len());
                for b in &m.branches {
                    if self.sig.constr(&b.constr).is_none() {
                        return Err(TypeError::Unbound(b.constr.clone()));
                    }
                    let bs = [Binder { names: b.vars.clone(), ty: None }];
                    branches.push((name(&b.constr), self.with_binders(&bs, false, |r| r.term(&b.body))?));
                }
                Term::Case(Box::new(CaseTerm { motive, target, branches }))
            }
        })
    }

    /// Names bound to the indices in a match's return clause. Without an
    /// `in` clause they are anonymous, counted from the first branch.
    fn index_names(&self, m: &super::ast::Match) -> Result<Vec<String>, TypeError> {
        if let Some((i, names)) = &m.in_pattern {
            let r = self.sig.ind(i).ok_or_else(|| TypeError::Unbound(i.clone()))?;
            let np = self.sig.nparams(r);
            let ni = self.sig.ind_body(r).indices.len();
            if names.len() != np + ni {
                return Err(TypeError::Arity(format!("`in {i}` expects {} names, found {}", np + ni, names.len())));
            }
            return Ok(names[np..].to_vec());
        }
        let ni = m
            .branches
            .first()
            .and_then(|b| self.sig.constr(&b.constr))
            .map_or(0, |c| self.sig.ind_body(self.sig.constr_owner(c)).indices.len());
        Ok(vec!["_".into(); ni])
    }

    fn fixpoint(&mut self, cofix: bool, bodies: &[FixBody]) -> Result<Vec<Decl>, TypeError> {
        let mut types = Vec::with_capacity(bodies.len());
        let mut indices = Vec::new();
        for b in bodies {
            types.push(self.with_binders(&b.binders, true, |r| r.term(&b.ret))?);
            if let Some(s) = &b.struct_arg {
                let pos = flat(&b.binders).position(|(x, _)| x == s);
                let pos = pos.ok_or_else(|| TypeError::Arity(format!("`{s}` is not an argument of `{}`", b.name)))?;
                indices.push(pos + 1);
            }
        }
        if cofix || indices.len() != bodies.len() {
            indices.clear();
        }
        for b in bodies {
            self.locals.push(b.name.clone());
        }
        let mut defs = Vec::with_capacity(bodies.len());
        let mut res = Ok(());
        for (b, ty) in bodies.iter().zip(&types) {
            match self.with_binders(&b.binders, false, |r| r.term(&b.body)) {
                Ok(body) => defs.push(FixDef { name: name(&b.name), ty: ty.clone(), body }),
                Err(e) => {
                    res = Err(e);
                    break;
                }
            }
        }
        self.locals.truncate(self.locals.len() - bodies.len());
        res?;
        Ok((0..bodies.len())
            .map(|k| {
                let fx = Box::new(Fixpoint { indices: indices.clone(), select: k + 1, defs: defs.clone() });
                Decl::Def {
                    name: defs[k].name.clone(),
                    ty: Some(types[k].clone()),
                    body: if cofix { Term::Cofix(fx) } else { Term::Fix(fx) },
                }
            })
            .collect())
    }

    fn telescope(&mut self, binders: &[Binder]) -> Result<Telescope, TypeError> {
        let mut tel = Vec::new();
        for (x, ty) in flat(binders) {
            let ty = ty.ok_or_else(|| TypeError::IndDecl(format!("parameter `{x}` needs a type")))?;
            tel.push(LocalDecl::assum(name(x), full(&self.term(ty)?)));
            self.locals.push(x.clone());
        }
        Ok(tel)
    }

    fn inductive(&mut self, coinductive: bool, bodies: &[super::ast::IndBody]) -> Result<IndBlock, TypeError> {
        let params = &bodies[0].params;
        if let Some(b) = bodies.iter().find(|b| &b.params != params) {
            return Err(TypeError::IndDecl(format!(
                "`{}` must have the same parameters as `{}`",
                b.name, bodies[0].name
            )));
        }
        let params = self.telescope(params)?;
        let np = params.len();

        let mut out = Vec::with_capacity(bodies.len());
        for b in bodies {
            let (indices, sort) = split_prods(&self.term(&b.arity)?);
            let Term::Univ(univ) = sort else {
                return Err(TypeError::IndDecl(format!("the arity of `{}` must end in a sort", b.name)));
            };
            out.push(IndBody {
                name: name(&b.name),
                indices: indices.iter().map(full_decl).collect(),
                univ,
                coinductive,
            });
        }

        self.pending = bodies.iter().map(|b| b.name.clone()).collect();
        let mut constructors = Vec::new();
        for (owner, b) in bodies.iter().enumerate() {
            let ni = out[owner].indices.len();
            for (c, ty) in &b.constructors {
                let (args, concl) = split_prods(&self.term(ty)?);
                let na = args.len();
                let (head, cargs) = concl.spine();
                let ok_head = matches!(head, Term::Ind(i, _) if **i == *b.name);
                let ok_params = cargs.len() == np + ni
                    && cargs[..np].iter().enumerate().all(|(j, a)| **a == Term::rel(na + np - 1 - j));
                if !ok_head || !ok_params {
                    return Err(TypeError::IndDecl(format!(
                        "constructor `{c}` must return `{}` applied to its parameters and {ni} indices",
                        b.name
                    )));
                }
                constructors.push(ConstrDecl {
                    name: name(c),
                    owner,
                    args: args.iter().map(full_decl).collect(),
                    index_args: cargs[np..].iter().map(|t| full(t)).collect(),
                });
            }
        }
        self.pending.clear();
        self.locals.clear();
        Ok(IndBlock { params, bodies: out, constructors })
    }
}

/// Splits off the leading products of `t`.
fn split_prods(t: &Term) -> (Telescope, Term) {
    let mut tel = Vec::new();
    let mut t = t;
    while let Term::Prod(x, a, b) = t {
        tel.push(LocalDecl::assum(x.clone(), (**a).clone()));
        t = b;
    }
    (tel, t.clone())
}

/// Signature types carry full annotations.
fn full(t: &Term) -> Term {
    t.map_inds(&mut |_: &Name, a| if a == Annot::Bare { Annot::Full } else { a })
}

fn full_decl(d: &LocalDecl) -> LocalDecl {
    LocalDecl::assum(d.name.clone(), full(&d.ty))
}
