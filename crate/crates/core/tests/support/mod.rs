//! Generators, the brute-force solver oracle and the property checks shared
//! by the property suite and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use cicstar::frontend::{Session, Status};
use cicstar::infer::{FixRecord, Options};
use cicstar::reduce::{equate, whnf_bounded, Env};
use cicstar::solver::{ConstraintSet, Node};
use cicstar::subtype::{polarity_check, subtype, telescope_polarity, Polarity};
use cicstar::syntax::{
    erase, name, subst_stage, Annot, CaseTerm, EraseMode, FixDef, Fixpoint, LocalEnv, Stage, StageVar, Term,
};

pub mod oracle;

/// Prelude plus a parameterless coinductive type, for polarity duality.
pub fn world() -> Session {
    let mut s = Session::with_prelude(Options::default());
    let out = s.run("CoInductive CoNat : Set := | CoS : CoNat -> CoNat.");
    assert_eq!(out.status, Status::Ok);
    s
}

pub fn env(s: &Session) -> Env<'_> {
    Env::new(&s.sig, &s.globals)
}

/// Runs `f` on a thread with a large stack. Reduction nests once per
/// match or fixpoint argument, up to the step budget.
pub fn big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new().stack_size(512 << 20).spawn(f).unwrap().join().unwrap()
}

/// Runs `prop` on `cases` deterministic samples of `strategy`.
pub fn run_deterministic<S: Strategy>(
    cases: u32,
    strategy: S,
    prop: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, prop).map_err(|e| e.to_string())
}

pub fn stage() -> impl Strategy<Value = Stage> + Clone {
    prop_oneof![
        1 => Just(Stage::Infty),
        4 => (1u32..=3, 0u32..=1).prop_map(|(v, h)| Stage::Var(StageVar(v), h)),
    ]
}

pub fn annot() -> impl Strategy<Value = Annot> + Clone {
    prop_oneof![
        6 => stage().prop_map(Annot::Sized),
        1 => Just(Annot::Bare),
        1 => Just(Annot::Full),
        1 => Just(Annot::Star),
        1 => Just(Annot::Glob),
    ]
}

/// Annotations of sized terms.
pub fn sized_annot() -> impl Strategy<Value = Annot> + Clone {
    stage().prop_map(Annot::Sized)
}

fn first_order(annot: impl Strategy<Value = Annot> + Clone + 'static) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        annot.clone().prop_map(|a| Term::ind("Nat", a)),
        annot.clone().prop_map(|a| Term::ind("Bool", a)),
        Just(Term::Univ(cicstar::syntax::Universe::Set)),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (annot.clone(), inner.clone()).prop_map(|(a, t)| Term::app(Term::ind("List", a), t)),
            (annot.clone(), inner.clone()).prop_map(|(a, t)| Term::app(Term::ind("Stream", a), t)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::arrow(a, b)),
        ]
    })
}

/// Closed first-order types over the prelude with arbitrary annotations.
pub fn annotated_type() -> impl Strategy<Value = Term> {
    first_order(annot())
}

/// Closed first-order sized types.
pub fn sized_type() -> impl Strategy<Value = Term> {
    first_order(sized_annot())
}

/// Shapes of first-order types; annotations are filled in separately.
#[derive(Clone, Debug)]
pub enum Shape {
    Nat,
    CoNat,
    List(Box<Shape>),
    Stream(Box<Shape>),
    Arrow(Box<Shape>, Box<Shape>),
}

pub fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Nat), Just(Shape::CoNat)].prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| Shape::List(Box::new(s))),
            inner.clone().prop_map(|s| Shape::Stream(Box::new(s))),
            (inner.clone(), inner).prop_map(|(a, b)| Shape::Arrow(Box::new(a), Box::new(b))),
        ]
    })
}

impl Shape {
    pub fn holes(&self) -> usize {
        match self {
            Shape::Nat | Shape::CoNat => 1,
            Shape::List(s) | Shape::Stream(s) => 1 + s.holes(),
            Shape::Arrow(a, b) => a.holes() + b.holes(),
        }
    }

    /// Builds the type, taking annotations in order from `stages`.
    pub fn build(&self, stages: &mut impl Iterator<Item = Stage>) -> Term {
        let mut next = || Annot::Sized(stages.next().expect("enough stages"));
        match self {
            Shape::Nat => Term::ind("Nat", next()),
            Shape::CoNat => Term::ind("CoNat", next()),
            Shape::List(s) => {
                let a = next();
                Term::app(Term::ind("List", a), s.build(stages))
            }
            Shape::Stream(s) => {
                let a = next();
                Term::app(Term::ind("Stream", a), s.build(stages))
            }
            Shape::Arrow(a, b) => {
                let a = a.build(stages);
                Term::arrow(a, b.build(stages))
            }
        }
    }

    /// Swaps inductive and coinductive heads.
    pub fn mirror(&self) -> Shape {
        match self {
            Shape::Nat => Shape::CoNat,
            Shape::CoNat => Shape::Nat,
            Shape::List(s) => Shape::Stream(Box::new(s.mirror())),
            Shape::Stream(s) => Shape::List(Box::new(s.mirror())),
            Shape::Arrow(a, b) => Shape::Arrow(Box::new(a.mirror()), Box::new(b.mirror())),
        }
    }
}

/// A shape with several annotation vectors of the right length drawn from `stage`.
pub fn shaped(
    count: usize,
    stage: impl Strategy<Value = Stage> + Clone,
) -> impl Strategy<Value = (Shape, Vec<Vec<Stage>>)> {
    shape().prop_flat_map(move |s| {
        let n = s.holes();
        (Just(s), proptest::collection::vec(proptest::collection::vec(stage.clone(), n), count))
    })
}

/// Stages over a single variable, so that validity of constraints is decidable by hand.
pub fn ground_stage() -> impl Strategy<Value = Stage> + Clone {
    prop_oneof![1 => Just(Stage::Infty), 3 => (0u32..=2).prop_map(|h| Stage::Var(StageVar(1), h))]
}

/// Whether every constraint holds for all values of the single variable.
pub fn valid(c: &ConstraintSet) -> bool {
    c.edges().all(|(a, b, w)| match (a, b) {
        (Node::Infty, _) => false,
        (Node::Var(x), Node::Var(y)) => x != y || w >= 0,
        (Node::Var(_), Node::Infty) => true,
    })
}

/// The relation decided by `subtype` on ground types.
pub fn holds(e: Env<'_>, t: &Term, u: &Term) -> bool {
    subtype(e, &LocalEnv::new(), t, u).is_ok_and(|c| valid(&c))
}

/// Erasure on a sized `t`, with the variable `v` as the only position.
pub fn prop_erasure(t: Term, v: u32) -> Result<(), TestCaseError> {
    let positions: BTreeSet<StageVar> = [StageVar(v)].into();
    let bare = erase(&t, EraseMode::Bare, &positions);
    prop_assert_eq!(&erase(&bare, EraseMode::Bare, &positions), &bare);
    let star = erase(&t, EraseMode::Star, &positions);
    let via_star = star.map_annots(&mut |a| match a {
        Annot::Star => Annot::Glob,
        Annot::Bare => Annot::Full,
        a => a,
    });
    prop_assert_eq!(via_star, erase(&t, EraseMode::Glob, &positions));
    prop_assert_eq!(erase(&t, EraseMode::Full, &positions).count_annots(), t.count_annots());
    for mode in [EraseMode::Bare, EraseMode::Full, EraseMode::Star, EraseMode::Glob] {
        let once = erase(&t, mode, &positions);
        prop_assert_eq!(once.erase_bare(), bare.clone(), "{:?} changes the bare skeleton", mode);
        prop_assert_eq!(erase(&t.lift(0, 2), mode, &positions), once.lift(0, 2), "{:?} and lifting", mode);
    }
    let s = Stage::Var(StageVar(9), 1);
    prop_assert_eq!(subst_stage(&t, StageVar(v), s).erase_bare(), bare);
    Ok(())
}

pub fn prop_subtype_reflexive(e: Env<'_>, t: &Term) -> Result<(), TestCaseError> {
    let c = subtype(e, &LocalEnv::new(), t, t).map_err(|_| TestCaseError::fail("t is not a subtype of itself"))?;
    for (a, b, w) in c.edges() {
        let trivial = a == b && w >= 0;
        let paired = c.weight(b, a) == Some(-w);
        prop_assert!(trivial || paired, "stray constraint {} ⊑{} {}", a, w, b);
        prop_assert!(b != Node::Infty, "edge into infinity");
    }
    Ok(())
}

pub fn prop_subtype_transitive(e: Env<'_>, shape: &Shape, ann: &[Vec<Stage>]) -> Result<(), TestCaseError> {
    let [t, u, v] = [0, 1, 2].map(|k| shape.build(&mut ann[k].iter().copied()));
    if holds(e, &t, &u) && holds(e, &u, &v) {
        prop_assert!(holds(e, &t, &v), "transitivity fails");
    }
    Ok(())
}

pub fn prop_equate_symmetric(e: Env<'_>, t: &Term, u: &Term) -> Result<(), TestCaseError> {
    let lenv = LocalEnv::new();
    let edges = |c: ConstraintSet| c.edges().collect::<Vec<_>>();
    match (equate(e, &lenv, t, u), equate(e, &lenv, u, t)) {
        (Ok(a), Ok(b)) => prop_assert_eq!(edges(a), edges(b)),
        (Err(_), Err(_)) => {}
        _ => return Err(TestCaseError::fail("equate succeeds in one direction only")),
    }
    Ok(())
}

pub fn prop_polarity_duality(e: Env<'_>, shape: &Shape, stages: &[Stage]) -> Result<(), TestCaseError> {
    let lenv = LocalEnv::new();
    let v = StageVar(1);
    let t = shape.build(&mut stages.iter().copied());
    let m = shape.mirror().build(&mut stages.iter().copied());
    for p in [Polarity::Positive, Polarity::Negative] {
        prop_assert_eq!(polarity_check(e, &lenv, v, &t, p), polarity_check(e, &lenv, v, &m, p.dual()));
    }
    Ok(())
}

/// Position variables of an accepted (co)fixpoint type are collapsed onto
/// its recursive variable, which must then occur with the right polarity.
pub fn positivity_ok(e: Env<'_>, r: &FixRecord) -> bool {
    let mut t = r.ty.clone();
    for v in cicstar::syntax::stage_vars(&r.ty).intersection(&r.positions) {
        t = subst_stage(&t, *v, Stage::var(r.rho));
    }
    let p = if r.cofix { Polarity::Negative } else { Polarity::Positive };
    telescope_polarity(e, &r.lenv, r.rho, &t, p)
}

fn nat() -> Term {
    Term::ind("Nat", Annot::Bare)
}

fn nat_case(target: Term, zero: Term, succ: Term) -> Term {
    Term::Case(Box::new(CaseTerm {
        motive: Term::abs("_", nat(), nat()),
        target,
        branches: vec![(name("O"), zero), (name("S"), Term::abs("m", nat(), succ))],
    }))
}

/// Nat terms over `depth` free Nat variables.
pub fn nat_term(depth: usize) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![Just(Term::constr("O")), (0..depth.max(1)).prop_map(Term::rel),];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app(Term::constr("S"), t)),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(t, z, s)| nat_case(t, z, s.lift(0, 1))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Term::abs("x", nat(), b.lift(0, 1)), a)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::LetIn(
                name("y"),
                Box::new(nat()),
                Box::new(a),
                Box::new(b.lift(0, 1))
            )),
            (structural_fix_body(), inner).prop_map(|(body, a)| Term::app(fix_of(body), a)),
        ]
    })
    .boxed()
}

/// Bodies `λn. e` of a unary Nat fixpoint, where `e` sees `n` (0) and `f` (1)
/// and may call `f` on anything, including `n` itself.
pub fn fix_body() -> BoxedStrategy<Term> {
    let leaf = prop_oneof![Just(Term::constr("O")), Just(Term::rel(0))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app(Term::constr("S"), t)),
            inner.clone().prop_map(|t| Term::app(Term::rel(1), t)),
            (inner.clone(), inner.clone()).prop_map(|(z, s)| nat_case(Term::rel(0), z, s.lift(0, 1))),
        ]
    })
    .prop_map(|e| Term::abs("n", nat(), e))
    .boxed()
}

/// Bodies `λn. match n with O => z | S m => s` where `s` may call `f` on `m` only.
pub fn structural_fix_body() -> BoxedStrategy<Term> {
    let succ = prop_oneof![Just(Term::rel(0)), Just(Term::rel(1)), Just(Term::app(Term::rel(2), Term::rel(0)))];
    (prop_oneof![Just(Term::constr("O")), Just(Term::rel(0))], succ, 0usize..3)
        .prop_map(|(z, s, hats)| {
            let s = (0..hats).fold(s, |t, _| Term::app(Term::constr("S"), t));
            Term::abs("n", nat(), nat_case(Term::rel(0), z, s))
        })
        .boxed()
}

pub fn fix_of(body: Term) -> Term {
    Term::Fix(Box::new(Fixpoint {
        indices: vec![1],
        select: 1,
        defs: vec![FixDef { name: name("f"), ty: Term::arrow(nat(), nat()), body }],
    }))
}

pub fn cofix_of(body: Term) -> Term {
    Term::Cofix(Box::new(Fixpoint {
        indices: vec![],
        select: 1,
        defs: vec![FixDef { name: name("f"), ty: Term::arrow(nat(), nat()), body }],
    }))
}

pub const FUEL: usize = 2_000;

pub fn nat_context(depth: usize) -> LocalEnv {
    (0..depth).fold(LocalEnv::new(), |l, k| l.push_assum(name(&format!("x{k}")), nat()))
}

pub fn prop_whnf_idempotent(e: Env<'_>, t: &Term) -> Result<(), TestCaseError> {
    let lenv = nat_context(3);
    if let Some(w) = whnf_bounded(e, &lenv, t, FUEL) {
        prop_assert_eq!(whnf_bounded(e, &lenv, &w, FUEL), Some(w));
    }
    Ok(())
}

/// Neutral Nat terms: variables and matches stuck on them.
pub fn neutral() -> impl Strategy<Value = Term> {
    (0usize..3).prop_flat_map(|i| {
        prop_oneof![Just(Term::rel(i)), Just(nat_case(Term::rel(i), Term::constr("O"), Term::rel(0))),]
    })
}

/// A fixpoint applied to a neutral argument is stuck; the step budget is the
/// watchdog against unfolding it anyway.
pub fn prop_fix_guard(e: Env<'_>, body: &Term, arg: &Term) -> Result<(), TestCaseError> {
    let lenv = nat_context(3);
    let t = Term::app(fix_of(body.clone()), arg.clone());
    let w = whnf_bounded(e, &lenv, &t, FUEL).ok_or_else(|| TestCaseError::fail("ran out of steps"))?;
    let (head, args) = w.spine();
    prop_assert!(matches!(head, Term::Fix(_)), "fixpoint unfolded on a non-constructor");
    prop_assert_eq!(args.len(), 1);
    let c = Term::app(cofix_of(body.clone()), arg.clone());
    prop_assert_eq!(whnf_bounded(e, &lenv, &c, FUEL), Some(c.clone()), "cofixpoint unfolded outside a match");
    Ok(())
}
