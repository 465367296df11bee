use std::sync::Arc;

use super::stage::{Annot, Universe};

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Terms of the calculus. Local variables are de Bruijn indices; globals,
/// inductive types and constructors are referenced by name.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Univ(Universe),
    /// Local variable. The size vector is present only on uses of let-bound variables.
    Rel(usize, Option<Vec<Annot>>),
    /// Global constant. The size vector is present only on uses of definitions.
    Const(Name, Option<Vec<Annot>>),
    Abs(Name, Box<Term>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Prod(Name, Box<Term>, Box<Term>),
    LetIn(Name, Box<Term>, Box<Term>, Box<Term>),
    Ind(Name, Annot),
    Constr(Name),
    Case(Box<CaseTerm>),
    Fix(Box<Fixpoint>),
    Cofix(Box<Fixpoint>),
    /// Binder domain left for the checker to fill in (branch and motive binders).
    Hole,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseTerm {
    pub motive: Term,
    pub target: Term,
    pub branches: Vec<(Name, Term)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixDef {
    pub name: Name,
    pub ty: Term,
    pub body: Term,
}

/// A block of mutual (co)fixpoints. Bodies live under all the block's names,
/// the first definition being bound outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixpoint {
    /// 1-based recursive argument positions, one per definition. Empty on a
    /// bare fixpoint whose indices are still to be searched for. Unused by cofixpoints.
    pub indices: Vec<usize>,
    /// 1-based index of the selected definition.
    pub select: usize,
    pub defs: Vec<FixDef>,
}

impl Term {
    pub fn rel(i: usize) -> Term {
        Term::Rel(i, None)
    }

    pub fn constant(n: &str) -> Term {
        Term::Const(name(n), None)
    }

    pub fn ind(n: &str, a: Annot) -> Term {
        Term::Ind(name(n), a)
    }

    pub fn constr(n: &str) -> Term {
        Term::Constr(name(n))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn prod(x: &str, dom: Term, cod: Term) -> Term {
        Term::Prod(name(x), Box::new(dom), Box::new(cod))
    }

    /// Non-dependent product; `cod` is given in the outer context.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::Prod(name("_"), Box::new(dom), Box::new(cod.lift(0, 1)))
    }

    pub fn abs(x: &str, dom: Term, body: Term) -> Term {
        Term::Abs(name(x), Box::new(dom), Box::new(body))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn into_spine(self) -> (Term, Vec<Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(*a);
            t = *f;
        }
        args.reverse();
        (t, args)
    }

    /// Shifts free variables at or above `cutoff` by `n`.
    pub fn lift(&self, cutoff: usize, n: usize) -> Term {
        if n == 0 {
            return self.clone();
        }
        self.map_rels(cutoff, &mut |i, sizes, depth| {
            if i >= depth {
                Term::Rel(i + n, sizes.clone())
            } else {
                Term::Rel(i, sizes.clone())
            }
        })
    }

    /// Substitutes `e` for variable 0 and lowers the remaining free variables.
    ///
    /// Occurrences carrying a size vector receive the fully-erased `e` with the
    /// vector's stages substituted in, which is exactly the δ-local unfolding.
    pub fn instantiate(&self, e: &Term) -> Term {
        self.instantiate_many(std::slice::from_ref(e))
    }

    /// Simultaneously substitutes `args` for the `args.len()` innermost
    /// variables; the last argument replaces variable 0.
    pub fn instantiate_many(&self, args: &[Term]) -> Term {
        let n = args.len();
        if n == 0 {
            return self.clone();
        }
        self.map_rels(0, &mut |i, sizes, depth| {
            if i < depth {
                Term::Rel(i, sizes.clone())
            } else if i - depth < n {
                let e = &args[n - 1 - (i - depth)];
                let v = match sizes {
                    Some(sz) => e.erase_full().subst_fulls(sz).unwrap_or_else(|| e.clone()),
                    None => e.clone(),
                };
                v.lift(0, depth)
            } else {
                Term::Rel(i - n, sizes.clone())
            }
        })
    }

    /// Whether variable `i` occurs free.
    pub fn has_rel(&self, i: usize) -> bool {
        let mut found = false;
        self.visit_rels(i, &mut |j, depth| {
            if j == depth {
                found = true;
            }
        });
        found
    }

    fn visit_rels(&self, depth: usize, f: &mut impl FnMut(usize, usize)) {
        match self {
            Term::Rel(i, _) => f(*i, depth),
            Term::Univ(_) | Term::Const(..) | Term::Ind(..) | Term::Constr(_) | Term::Hole => {}
            Term::Abs(_, a, b) | Term::Prod(_, a, b) => {
                a.visit_rels(depth, f);
                b.visit_rels(depth + 1, f);
            }
            Term::App(a, b) => {
                a.visit_rels(depth, f);
                b.visit_rels(depth, f);
            }
            Term::LetIn(_, t, e, b) => {
                t.visit_rels(depth, f);
                e.visit_rels(depth, f);
                b.visit_rels(depth + 1, f);
            }
            Term::Case(c) => {
                c.motive.visit_rels(depth, f);
                c.target.visit_rels(depth, f);
                for (_, b) in &c.branches {
                    b.visit_rels(depth, f);
                }
            }
            Term::Fix(fx) | Term::Cofix(fx) => {
                let n = fx.defs.len();
                for d in &fx.defs {
                    d.ty.visit_rels(depth, f);
                    d.body.visit_rels(depth + n, f);
                }
            }
        }
    }

    /// Rebuilds the term, replacing each variable occurrence by `f(index, sizes, depth)`.
    pub fn map_rels(&self, depth: usize, f: &mut impl FnMut(usize, &Option<Vec<Annot>>, usize) -> Term) -> Term {
        match self {
            Term::Rel(i, sizes) => f(*i, sizes, depth),
            Term::Univ(_) | Term::Const(..) | Term::Ind(..) | Term::Constr(_) | Term::Hole => self.clone(),
            Term::Abs(x, a, b) => {
                Term::Abs(x.clone(), Box::new(a.map_rels(depth, f)), Box::new(b.map_rels(depth + 1, f)))
            }
            Term::Prod(x, a, b) => {
                Term::Prod(x.clone(), Box::new(a.map_rels(depth, f)), Box::new(b.map_rels(depth + 1, f)))
            }
            Term::App(a, b) => Term::App(Box::new(a.map_rels(depth, f)), Box::new(b.map_rels(depth, f))),
            Term::LetIn(x, t, e, b) => Term::LetIn(
                x.clone(),
                Box::new(t.map_rels(depth, f)),
                Box::new(e.map_rels(depth, f)),
                Box::new(b.map_rels(depth + 1, f)),
            ),
            Term::Case(c) => Term::Case(Box::new(CaseTerm {
                motive: c.motive.map_rels(depth, f),
                target: c.target.map_rels(depth, f),
                branches: c.branches.iter().map(|(n, b)| (n.clone(), b.map_rels(depth, f))).collect(),
            })),
            Term::Fix(fx) => Term::Fix(Box::new(fx.map_rels(depth, f))),
            Term::Cofix(fx) => Term::Cofix(Box::new(fx.map_rels(depth, f))),
        }
    }

    /// Rewrites annotation sites outside bare and position subterms (binder
    /// domains, let types, motives and fixpoint types), including size vectors.
    /// Sites are visited in the canonical left-to-right pre-order.
    pub fn map_annots(&self, f: &mut impl FnMut(Annot) -> Annot) -> Term {
        match self {
            Term::Rel(i, sizes) => Term::Rel(*i, map_vec(sizes, f)),
            Term::Const(c, sizes) => Term::Const(c.clone(), map_vec(sizes, f)),
            Term::Ind(i, a) => Term::Ind(i.clone(), f(*a)),
            Term::Univ(_) | Term::Constr(_) | Term::Hole => self.clone(),
            Term::Abs(x, a, b) => Term::Abs(x.clone(), a.clone(), Box::new(b.map_annots(f))),
            Term::Prod(x, a, b) => {
                let a = a.map_annots(f);
                Term::Prod(x.clone(), Box::new(a), Box::new(b.map_annots(f)))
            }
            Term::App(a, b) => {
                let a = a.map_annots(f);
                Term::App(Box::new(a), Box::new(b.map_annots(f)))
            }
            Term::LetIn(x, t, e, b) => {
                let e = e.map_annots(f);
                Term::LetIn(x.clone(), t.clone(), Box::new(e), Box::new(b.map_annots(f)))
            }
            Term::Case(c) => {
                let target = c.target.map_annots(f);
                let branches = c.branches.iter().map(|(n, b)| (n.clone(), b.map_annots(f))).collect();
                Term::Case(Box::new(CaseTerm { motive: c.motive.clone(), target, branches }))
            }
            Term::Fix(fx) => Term::Fix(Box::new(fx.map_bodies(|b| b.map_annots(f)))),
            Term::Cofix(fx) => Term::Cofix(Box::new(fx.map_bodies(|b| b.map_annots(f)))),
        }
    }

    /// Visits annotation sites in the same order as [`Term::map_annots`].
    pub fn for_each_annot(&self, f: &mut impl FnMut(Annot)) {
        match self {
            Term::Rel(_, sizes) | Term::Const(_, sizes) => {
                if let Some(v) = sizes {
                    v.iter().for_each(|a| f(*a));
                }
            }
            Term::Ind(_, a) => f(*a),
            Term::Univ(_) | Term::Constr(_) | Term::Hole => {}
            Term::Abs(_, _, b) => b.for_each_annot(f),
            Term::Prod(_, a, b) | Term::App(a, b) => {
                a.for_each_annot(f);
                b.for_each_annot(f);
            }
            Term::LetIn(_, _, e, b) => {
                e.for_each_annot(f);
                b.for_each_annot(f);
            }
            Term::Case(c) => {
                c.target.for_each_annot(f);
                c.branches.iter().for_each(|(_, b)| b.for_each_annot(f));
            }
            Term::Fix(fx) | Term::Cofix(fx) => fx.defs.iter().for_each(|d| d.body.for_each_annot(f)),
        }
    }

    /// Rewrites the annotation of every inductive occurrence, including those
    /// inside bare and position subterms. Size vectors are left alone.
    pub fn map_inds(&self, f: &mut impl FnMut(&Name, Annot) -> Annot) -> Term {
        match self {
            Term::Ind(i, a) => Term::Ind(i.clone(), f(i, *a)),
            Term::Rel(..) | Term::Const(..) | Term::Univ(_) | Term::Constr(_) | Term::Hole => self.clone(),
            Term::Abs(x, a, b) => Term::Abs(x.clone(), Box::new(a.map_inds(f)), Box::new(b.map_inds(f))),
            Term::Prod(x, a, b) => Term::Prod(x.clone(), Box::new(a.map_inds(f)), Box::new(b.map_inds(f))),
            Term::App(a, b) => Term::App(Box::new(a.map_inds(f)), Box::new(b.map_inds(f))),
            Term::LetIn(x, t, e, b) => {
                Term::LetIn(x.clone(), Box::new(t.map_inds(f)), Box::new(e.map_inds(f)), Box::new(b.map_inds(f)))
            }
            Term::Case(c) => Term::Case(Box::new(CaseTerm {
                motive: c.motive.map_inds(f),
                target: c.target.map_inds(f),
                branches: c.branches.iter().map(|(n, b)| (n.clone(), b.map_inds(f))).collect(),
            })),
            Term::Fix(fx) => Term::Fix(Box::new(fx.map_inds(f))),
            Term::Cofix(fx) => Term::Cofix(Box::new(fx.map_inds(f))),
        }
    }

    /// Maps every annotation to bare and drops size vectors, everywhere.
    pub fn erase_bare(&self) -> Term {
        match self {
            Term::Rel(i, _) => Term::Rel(*i, None),
            Term::Const(c, _) => Term::Const(c.clone(), None),
            Term::Ind(i, _) => Term::Ind(i.clone(), Annot::Bare),
            Term::Univ(_) | Term::Constr(_) | Term::Hole => self.clone(),
            Term::Abs(x, a, b) => Term::Abs(x.clone(), Box::new(a.erase_bare()), Box::new(b.erase_bare())),
            Term::Prod(x, a, b) => Term::Prod(x.clone(), Box::new(a.erase_bare()), Box::new(b.erase_bare())),
            Term::App(a, b) => Term::App(Box::new(a.erase_bare()), Box::new(b.erase_bare())),
            Term::LetIn(x, t, e, b) => {
                Term::LetIn(x.clone(), Box::new(t.erase_bare()), Box::new(e.erase_bare()), Box::new(b.erase_bare()))
            }
            Term::Case(c) => Term::Case(Box::new(CaseTerm {
                motive: c.motive.erase_bare(),
                target: c.target.erase_bare(),
                branches: c.branches.iter().map(|(n, b)| (n.clone(), b.erase_bare())).collect(),
            })),
            Term::Fix(fx) => Term::Fix(Box::new(fx.erase_bare())),
            Term::Cofix(fx) => Term::Cofix(Box::new(fx.erase_bare())),
        }
    }

    /// Maps every counted annotation to `Full`, keeping size vectors.
    pub fn erase_full(&self) -> Term {
        self.map_annots(&mut |a| if a.is_counted() { Annot::Full } else { a })
    }

    /// Replaces `Full` annotation sites, in canonical order, with the given
    /// annotations. Returns `None` on a length mismatch.
    pub fn subst_fulls(&self, sizes: &[Annot]) -> Option<Term> {
        let mut it = sizes.iter();
        let mut short = false;
        let t = self.map_annots(&mut |a| match a {
            Annot::Full => match it.next() {
                Some(s) => *s,
                None => {
                    short = true;
                    a
                }
            },
            _ => a,
        });
        if short || it.next().is_some() {
            None
        } else {
            Some(t)
        }
    }

    /// Number of counted annotation sites, in canonical order.
    pub fn count_annots(&self) -> usize {
        let mut n = 0;
        self.for_each_annot(&mut |a| {
            if a.is_counted() {
                n += 1
            }
        });
        n
    }

    /// Whether the term is syntactically a sort.
    pub fn as_univ(&self) -> Option<Universe> {
        match self {
            Term::Univ(u) => Some(*u),
            _ => None,
        }
    }
}

fn map_vec(sizes: &Option<Vec<Annot>>, f: &mut impl FnMut(Annot) -> Annot) -> Option<Vec<Annot>> {
    sizes.as_ref().map(|v| v.iter().map(|a| f(*a)).collect())
}

impl Fixpoint {
    fn map_rels(&self, depth: usize, f: &mut impl FnMut(usize, &Option<Vec<Annot>>, usize) -> Term) -> Fixpoint {
        let n = self.defs.len();
        Fixpoint {
            indices: self.indices.clone(),
            select: self.select,
            defs: self
                .defs
                .iter()
                .map(|d| FixDef {
                    name: d.name.clone(),
                    ty: d.ty.map_rels(depth, f),
                    body: d.body.map_rels(depth + n, f),
                })
                .collect(),
        }
    }

    pub fn map_bodies(&self, mut f: impl FnMut(&Term) -> Term) -> Fixpoint {
        Fixpoint {
            indices: self.indices.clone(),
            select: self.select,
            defs: self
                .defs
                .iter()
                .map(|d| FixDef { name: d.name.clone(), ty: d.ty.clone(), body: f(&d.body) })
                .collect(),
        }
    }

    fn map_inds(&self, f: &mut impl FnMut(&Name, Annot) -> Annot) -> Fixpoint {
        Fixpoint {
            indices: self.indices.clone(),
            select: self.select,
            defs: self
                .defs
                .iter()
                .map(|d| FixDef { name: d.name.clone(), ty: d.ty.map_inds(f), body: d.body.map_inds(f) })
                .collect(),
        }
    }

    fn erase_bare(&self) -> Fixpoint {
        Fixpoint {
            indices: self.indices.clone(),
            select: self.select,
            defs: self
                .defs
                .iter()
                .map(|d| FixDef { name: d.name.clone(), ty: d.ty.erase_bare(), body: d.body.erase_bare() })
                .collect(),
        }
    }

    /// The selected definition.
    pub fn selected(&self) -> &FixDef {
        &self.defs[self.select - 1]
    }

    /// The term standing for the `k`-th (0-based) definition of this block,
    /// used when unfolding.
    pub fn project(&self, k: usize, cofix: bool) -> Term {
        let fx = Fixpoint { indices: self.indices.clone(), select: k + 1, defs: self.defs.clone() };
        if cofix {
            Term::Cofix(Box::new(fx))
        } else {
            Term::Fix(Box::new(fx))
        }
    }

    /// The selected body with every block name replaced by its projection.
    pub fn unfold(&self, cofix: bool) -> Term {
        let projections: Vec<Term> = (0..self.defs.len()).map(|k| self.project(k, cofix)).collect();
        self.selected().body.instantiate_many(&projections)
    }
}
