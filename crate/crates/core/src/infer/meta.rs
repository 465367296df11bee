//! Metafunctions used by the typing rules and the inference algorithm.

use crate::reduce::{whnf, Env};
use crate::solver::ConstraintSet;
use crate::syntax::{
    Annot, ConstrRef, IndRef, LocalDecl, LocalEnv, Name, Signature, Stage, StageVar, Telescope, Term, Universe,
};

/// Wraps `body` in products over `tel`.
pub fn prods(tel: &[LocalDecl], body: Term) -> Term {
    tel.iter().rev().fold(body, |acc, d| Term::Prod(d.name.clone(), Box::new(d.ty.clone()), Box::new(acc)))
}

/// Full annotations in signature types stand for ∞.
fn infinite(t: &Term) -> Term {
    t.map_annots(&mut |a| match a {
        Annot::Full | Annot::Glob => Annot::Sized(Stage::Infty),
        _ => a,
    })
}

/// Annotates occurrences of the block's types with the given stages; every
/// other annotation becomes ∞.
fn annotate_block(sig: &Signature, block: usize, t: &Term, sizes: &[Stage]) -> Term {
    let bodies = &sig.block(block).bodies;
    let t = t.map_inds(&mut |i, a| match bodies.iter().position(|b| &b.name == i) {
        Some(k) => Annot::Sized(sizes[k]),
        None => a,
    });
    infinite(&t)
}

fn annotate_tel(sig: &Signature, block: usize, tel: &Telescope, sizes: &[Stage]) -> Telescope {
    tel.iter().map(|d| LocalDecl::assum(d.name.clone(), annotate_block(sig, block, &d.ty, sizes))).collect()
}

fn infinite_tel(tel: &Telescope) -> Telescope {
    tel.iter().map(|d| LocalDecl::assum(d.name.clone(), infinite(&d.ty))).collect()
}

/// `n` variables referring to the binders `offset .. offset + n` counted
/// from the inside, outermost first.
fn rels(n: usize, offset: usize) -> impl Iterator<Item = Term> {
    (0..n).rev().map(move |i| Term::rel(i + offset))
}

pub fn ind_type(sig: &Signature, r: IndRef) -> Term {
    let block = sig.block(r.block);
    let body = &block.bodies[r.body];
    prods(&infinite_tel(&block.params), prods(&infinite_tel(&body.indices), Term::Univ(body.univ)))
}

pub fn constr_type(sig: &Signature, c: ConstrRef, sizes: &[Stage]) -> Term {
    let block = sig.block(c.block);
    let decl = &block.constructors[c.index];
    let np = block.params.len();
    let na = decl.args.len();
    let owner = &block.bodies[decl.owner];
    let head = Term::ind(&owner.name, Annot::Sized(sizes[decl.owner].succ()));
    let result = Term::apps(head, rels(np, na).chain(decl.index_args.iter().map(infinite)));
    prods(&infinite_tel(&block.params), prods(&annotate_tel(sig, c.block, &decl.args, sizes), result))
}

/// The type a case motive must have: a function over the indices and the
/// target, with the parameters instantiated by `params`.
pub fn motive_type(sig: &Signature, r: IndRef, params: &[Term], univ: Universe, annot: Annot) -> Term {
    let block = sig.block(r.block);
    let body = &block.bodies[r.body];
    let np = block.params.len();
    let ni = body.indices.len();
    let target = Term::apps(Term::Ind(body.name.clone(), annot), rels(np, ni).chain(rels(ni, 0)));
    let t =
        prods(&infinite_tel(&body.indices), Term::Prod(Name::from("_"), Box::new(target), Box::new(Term::Univ(univ))));
    t.instantiate_many(params)
}

/// The type of the branch for `c`, given the sized motive.
pub fn branch_type(sig: &Signature, c: ConstrRef, params: &[Term], sizes: &[Stage], motive: &Term) -> Term {
    let block = sig.block(c.block);
    let decl = &block.constructors[c.index];
    let np = block.params.len();
    let na = decl.args.len();
    // Built in the context [motive, params, args], motive outermost.
    let built = Term::apps(
        Term::rel(np + na),
        decl.index_args
            .iter()
            .map(infinite)
            .chain([Term::apps(Term::Constr(decl.name.clone()), rels(np, na).chain(rels(na, 0)))]),
    );
    let args = block_args(sig, c, sizes);
    let t = prods(&args, built);
    let mut subst = Vec::with_capacity(np + 1);
    subst.push(motive.clone());
    subst.extend(params.iter().cloned());
    t.instantiate_many(&subst)
}

/// Constructor arguments with the block's types annotated by `sizes`, in the
/// context of the parameters.
pub fn block_args(sig: &Signature, c: ConstrRef, sizes: &[Stage]) -> Telescope {
    annotate_tel(sig, c.block, &sig.block(c.block).constructors[c.index].args, sizes)
}

/// Number of types in the mutual block defining `name`.
pub fn inds(sig: &Signature, name: &str) -> Option<usize> {
    sig.inds(name)
}

pub fn case_stage(sig: &Signature, ind: &str, s: Stage, v: StageVar) -> ConstraintSet {
    let mut c = ConstraintSet::new();
    let hat = Stage::var(v).succ();
    if sig.is_coinductive(ind) {
        c.add(hat, s);
    } else {
        c.add(s, hat);
    }
    c
}

/// Peels `n` products off `t`, reducing to weak-head normal form before each.
pub fn decompose(env: Env<'_>, lenv: &LocalEnv, t: &Term, n: usize) -> Option<(Telescope, Term)> {
    let mut tel = Vec::with_capacity(n);
    let mut cur = t.clone();
    let mut inner = lenv.clone();
    for _ in 0..n {
        match whnf(env, &inner, &cur) {
            Term::Prod(x, a, b) => {
                let d = LocalDecl::assum(x, *a);
                inner = inner.push(d.clone());
                tel.push(d);
                cur = *b;
            }
            _ => return None,
        }
    }
    Some((tel, cur))
}

/// Like [`decompose`] but peels as many products as there are.
pub fn decompose_all(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> (Telescope, Term) {
    let mut tel = Vec::new();
    let mut cur = t.clone();
    let mut inner = lenv.clone();
    loop {
        match whnf(env, &inner, &cur) {
            Term::Prod(x, a, b) => {
                let d = LocalDecl::assum(x, *a);
                inner = inner.push(d.clone());
                tel.push(d);
                cur = *b;
            }
            other => return (tel, other),
        }
    }
}

/// Extends `lenv` with the declarations of a telescope.
pub fn push_tel(lenv: &LocalEnv, tel: &[LocalDecl]) -> LocalEnv {
    tel.iter().fold(lenv.clone(), |env, d| env.push(d.clone()))
}

/// Whether eliminating an inductive living in `from` into `to` is allowed.
/// `small` says whether the inductive is empty or a singleton.
pub fn elim(from: Universe, to: Universe, small: impl FnOnce() -> bool) -> bool {
    match (from, to) {
        (Universe::Set | Universe::Type(_), _) => true,
        (Universe::Prop, Universe::Prop) => true,
        (Universe::Prop, _) => small(),
    }
}

fn head_ind(t: &Term) -> Option<&Name> {
    match t.spine().0 {
        Term::Ind(i, _) => Some(i),
        _ => None,
    }
}

fn star_head(t: &Term) -> Term {
    let (head, args) = t.clone().into_spine();
    match head {
        Term::Ind(i, _) => Term::apps(Term::Ind(i, Annot::Star), args),
        other => Term::apps(other, args),
    }
}

/// Splits a bare function type into its reduced argument and return types.
/// Reduction is needed to see through aliases; the reduced forms are bare.
fn split_reduced(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> (Vec<(LocalDecl, Term)>, Term, Term) {
    let (tel, ret) = decompose_all(env, lenv, t);
    let mut inner = lenv.clone();
    let mut args = Vec::with_capacity(tel.len());
    for d in tel {
        let reduced = whnf(env, &inner, &d.ty).erase_bare();
        inner = inner.push(d.clone());
        args.push((d, reduced));
    }
    let reduced_ret = whnf(env, &inner, &ret).erase_bare();
    (args, ret, reduced_ret)
}

fn rebuild(args: Vec<LocalDecl>, ret: Term) -> Term {
    prods(&args, ret)
}

/// Stars the `n`-th (1-based) argument's inductive type and every argument
/// or return type headed by the same inductive.
pub fn set_rec_stars(env: Env<'_>, lenv: &LocalEnv, t: &Term, n: usize) -> Option<Term> {
    let (args, ret, reduced_ret) = split_reduced(env, lenv, t);
    let (_, rec) = args.get(n.checked_sub(1)?)?;
    let ind = head_ind(rec)?.clone();
    if env.sig.is_coinductive(&ind) {
        return None;
    }
    Some(star_same(args, ret, reduced_ret, &ind))
}

/// Stars the coinductive return type and every argument headed by it.
pub fn set_corec_stars(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> Option<Term> {
    let (args, ret, reduced_ret) = split_reduced(env, lenv, t);
    let ind = head_ind(&reduced_ret)?.clone();
    if !env.sig.is_coinductive(&ind) {
        return None;
    }
    Some(star_same(args, ret, reduced_ret, &ind))
}

fn star_same(args: Vec<(LocalDecl, Term)>, ret: Term, reduced_ret: Term, ind: &Name) -> Term {
    let pick = |orig: Term, reduced: Term| {
        if head_ind(&reduced) == Some(ind) {
            star_head(&reduced)
        } else {
            orig
        }
    };
    let args = args.into_iter().map(|(d, reduced)| LocalDecl::assum(d.name, pick(d.ty, reduced))).collect();
    rebuild(args, pick(ret, reduced_ret))
}

/// Number of products of `t` after reduction.
pub fn arity(env: Env<'_>, lenv: &LocalEnv, t: &Term) -> usize {
    decompose_all(env, lenv, t).0.len()
}

fn position_head(
    env: Env<'_>,
    lenv: &LocalEnv,
    t: &Term,
    positions: &std::collections::BTreeSet<StageVar>,
) -> Option<StageVar> {
    match whnf(env, lenv, t).spine().0 {
        Term::Ind(_, Annot::Sized(Stage::Var(v, 0))) if positions.contains(v) => Some(*v),
        _ => None,
    }
}

/// The position variable on the `n`-th argument of a sized fixpoint type.
pub fn get_rec_var(
    env: Env<'_>,
    lenv: &LocalEnv,
    t: &Term,
    n: usize,
    positions: &std::collections::BTreeSet<StageVar>,
) -> Option<StageVar> {
    let (tel, _) = decompose(env, lenv, t, n)?;
    let (last, outer) = tel.split_last()?;
    position_head(env, &push_tel(lenv, outer), &last.ty, positions)
}

/// The position variable on the return type of a sized cofixpoint type.
pub fn get_corec_var(
    env: Env<'_>,
    lenv: &LocalEnv,
    t: &Term,
    positions: &std::collections::BTreeSet<StageVar>,
) -> Option<StageVar> {
    let (tel, ret) = decompose_all(env, lenv, t);
    position_head(env, &push_tel(lenv, &tel), &ret, positions)
}
