//! Surface syntax and its printer.

use std::fmt::{self, Write};

use crate::syntax::Universe;

use super::lexer::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum STerm {
    Var(String),
    Hole,
    Sort(Universe),
    App(Box<STerm>, Vec<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Forall(Vec<Binder>, Box<STerm>),
    Fun(Vec<Binder>, Box<STerm>),
    Let { name: String, binders: Vec<Binder>, ty: Option<Box<STerm>>, value: Box<STerm>, body: Box<STerm> },
    Match(Box<Match>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    pub scrutinee: STerm,
    pub as_name: Option<String>,
    /// Inductive name and the names bound to its parameters and indices.
    pub in_pattern: Option<(String, Vec<String>)>,
    pub ret: Option<STerm>,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub constr: String,
    pub vars: Vec<String>,
    pub body: STerm,
}

/// `x`, or `(x y : T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub names: Vec<String>,
    pub ty: Option<STerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndBody {
    pub name: String,
    pub params: Vec<Binder>,
    pub arity: STerm,
    pub constructors: Vec<(String, STerm)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixBody {
    pub name: String,
    pub binders: Vec<Binder>,
    pub struct_arg: Option<String>,
    pub ret: STerm,
    pub body: STerm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SDecl {
    Inductive { coinductive: bool, bodies: Vec<IndBody> },
    Definition { name: String, binders: Vec<Binder>, ty: Option<STerm>, body: STerm },
    Fixpoint { cofix: bool, bodies: Vec<FixBody> },
    Axiom { name: String, ty: STerm },
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub decls: Vec<(Span, SDecl)>,
}

impl SourceFile {
    /// Declarations without their spans, for structural comparison.
    pub fn bare(&self) -> Vec<&SDecl> {
        self.decls.iter().map(|(_, d)| d).collect()
    }
}

const TOP: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

fn write_term(out: &mut String, t: &STerm, prec: u8) {
    let wrap = |out: &mut String, need: bool, f: &dyn Fn(&mut String)| {
        if need {
            out.push('(');
        }
        f(out);
        if need {
            out.push(')');
        }
    };
    match t {
        STerm::Var(x) => out.push_str(x),
        STerm::Hole => out.push('_'),
        STerm::Sort(Universe::Prop) => out.push_str("Prop"),
        STerm::Sort(Universe::Set) => out.push_str("Set"),
        STerm::Sort(Universe::Type(1)) => out.push_str("Type"),
        STerm::Sort(Universe::Type(n)) => {
            let _ = write!(out, "Type@{{{n}}}");
        }
        STerm::App(f, args) => wrap(out, prec > APP, &|out| {
            write_term(out, f, ATOM);
            for a in args {
                out.push(' ');
                write_term(out, a, ATOM);
            }
        }),
        STerm::Arrow(a, b) => wrap(out, prec > TOP, &|out| {
            write_term(out, a, APP);
            out.push_str(" -> ");
            write_term(out, b, TOP);
        }),
        STerm::Forall(bs, body) => wrap(out, prec > TOP, &|out| {
            out.push_str("forall ");
            write_binders(out, bs);
            out.push_str(", ");
            write_term(out, body, TOP);
        }),
        STerm::Fun(bs, body) => wrap(out, prec > TOP, &|out| {
            out.push_str("fun ");
            write_binders(out, bs);
            out.push_str(" => ");
            write_term(out, body, TOP);
        }),
        STerm::Let { name, binders, ty, value, body } => wrap(out, prec > TOP, &|out| {
            out.push_str("let ");
            out.push_str(name);
            if !binders.is_empty() {
                out.push(' ');
                write_binders(out, binders);
            }
            if let Some(ty) = ty {
                out.push_str(" : ");
                write_term(out, ty, TOP);
            }
            out.push_str(" := ");
            write_term(out, value, TOP);
            out.push_str(" in ");
            write_term(out, body, TOP);
        }),
        STerm::Match(m) => {
            out.push_str("match ");
            write_term(out, &m.scrutinee, TOP);
            if let Some(x) = &m.as_name {
                out.push_str(" as ");
                out.push_str(x);
            }
            if let Some((i, names)) = &m.in_pattern {
                out.push_str(" in ");
                out.push_str(i);
                for n in names {
                    out.push(' ');
                    out.push_str(n);
                }
            }
            if let Some(r) = &m.ret {
                out.push_str(" return ");
                write_term(out, r, TOP);
            }
            out.push_str(" with");
            for b in &m.branches {
                out.push_str(" | ");
                out.push_str(&b.constr);
                for v in &b.vars {
                    out.push(' ');
                    out.push_str(v);
                }
                out.push_str(" => ");
                write_term(out, &b.body, TOP);
            }
            out.push_str(" end");
        }
    }
}

/// Binders are always parenthesised when typed, so that a following `:`
/// cannot be mistaken for part of them.
fn write_binders(out: &mut String, bs: &[Binder]) {
    for (k, b) in bs.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        match &b.ty {
            Some(ty) => {
                out.push('(');
                out.push_str(&b.names.join(" "));
                out.push_str(" : ");
                write_term(out, ty, TOP);
                out.push(')');
            }
            None => out.push_str(&b.names.join(" ")),
        }
    }
}

impl fmt::Display for STerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, TOP);
        f.write_str(&s)
    }
}

fn write_params(out: &mut String, bs: &[Binder]) {
    if !bs.is_empty() {
        out.push(' ');
        write_binders(out, bs);
    }
}

impl fmt::Display for SDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        match self {
            SDecl::Inductive { coinductive, bodies } => {
                out.push_str(if *coinductive { "CoInductive " } else { "Inductive " });
                for (k, b) in bodies.iter().enumerate() {
                    if k > 0 {
                        out.push_str("\nwith ");
                    }
                    out.push_str(&b.name);
                    write_params(&mut out, &b.params);
                    let _ = write!(out, " : {} :=", b.arity);
                    for (c, ty) in &b.constructors {
                        let _ = write!(out, "\n  | {c} : {ty}");
                    }
                }
            }
            SDecl::Definition { name, binders, ty, body } => {
                out.push_str("Definition ");
                out.push_str(name);
                write_params(&mut out, binders);
                if let Some(ty) = ty {
                    let _ = write!(out, " : {ty}");
                }
                let _ = write!(out, " :=\n  {body}");
            }
            SDecl::Fixpoint { cofix, bodies } => {
                out.push_str(if *cofix { "CoFixpoint " } else { "Fixpoint " });
                for (k, b) in bodies.iter().enumerate() {
                    if k > 0 {
                        out.push_str("\nwith ");
                    }
                    out.push_str(&b.name);
                    write_params(&mut out, &b.binders);
                    if let Some(s) = &b.struct_arg {
                        let _ = write!(out, " {{struct {s}}}");
                    }
                    let _ = write!(out, " : {} :=\n  {}", b.ret, b.body);
                }
            }
            SDecl::Axiom { name, ty } => {
                let _ = write!(out, "Axiom {name} : {ty}");
            }
        }
        out.push('.');
        f.write_str(&out)
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (_, d) in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
