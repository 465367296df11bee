//! Pretty-printing of core terms.

use std::collections::{BTreeMap, BTreeSet};

use super::stage::{Annot, Stage, StageVar};
use super::term::{Fixpoint, Name, Term};

#[derive(Clone, Copy, Default)]
pub struct Printer<'a> {
    pub ascii: bool,
    /// Variables to print as ρ rather than υ.
    pub positions: Option<&'a BTreeSet<StageVar>>,
    /// Explicit names for some stage variables.
    pub stage_names: Option<&'a BTreeMap<StageVar, String>>,
}

const PREC_TOP: u8 = 0;
const PREC_APP: u8 = 1;
const PREC_ATOM: u8 = 2;

impl<'a> Printer<'a> {
    pub fn new() -> Printer<'a> {
        Printer::default()
    }

    pub fn ascii(mut self, ascii: bool) -> Printer<'a> {
        self.ascii = ascii;
        self
    }

    pub fn with_positions(mut self, positions: &'a BTreeSet<StageVar>) -> Printer<'a> {
        self.positions = Some(positions);
        self
    }

    pub fn with_stage_names(mut self, names: &'a BTreeMap<StageVar, String>) -> Printer<'a> {
        self.stage_names = Some(names);
        self
    }

    /// Prints a closed term.
    pub fn show(&self, t: &Term) -> String {
        self.show_in(t, &[])
    }

    /// Prints `t` in a context whose names are given innermost first.
    pub fn show_in(&self, t: &Term, ctx: &[Name]) -> String {
        let mut names: Vec<String> = ctx.iter().rev().map(|n| n.to_string()).collect();
        let mut out = String::new();
        self.go(t, &mut names, PREC_TOP, &mut out);
        out
    }

    fn arrow(&self) -> &'static str {
        if self.ascii {
            "->"
        } else {
            "→"
        }
    }

    fn var_name(&self, v: StageVar) -> String {
        if let Some(n) = self.stage_names.and_then(|m| m.get(&v)) {
            return n.clone();
        }
        let pos = self.positions.is_some_and(|p| p.contains(&v));
        match (pos, self.ascii) {
            (true, false) => format!("ρ{}", v.0),
            (false, false) => format!("υ{}", v.0),
            (true, true) => format!("r{}", v.0),
            (false, true) => format!("v{}", v.0),
        }
    }

    pub fn stage(&self, s: Stage) -> String {
        match s {
            Stage::Infty => self.infty().to_string(),
            Stage::Var(v, 0) => self.var_name(v),
            Stage::Var(v, 1) if !self.ascii => format!("{}\u{302}", self.var_name(v)),
            Stage::Var(v, k) => format!("({}+{k})", self.var_name(v)),
        }
    }

    fn infty(&self) -> &'static str {
        if self.ascii {
            "oo"
        } else {
            "∞"
        }
    }

    /// The annotation text without the leading caret; empty for bare.
    pub fn annot(&self, a: Annot) -> String {
        match a {
            Annot::Bare => String::new(),
            Annot::Star => "*".into(),
            Annot::Glob => if self.ascii { "!" } else { "ι" }.into(),
            Annot::Full => self.infty().into(),
            Annot::Sized(s) => self.stage(s),
        }
    }

    fn sizes(&self, sizes: &Option<Vec<Annot>>, out: &mut String) {
        let Some(sz) = sizes else { return };
        if sz.is_empty() {
            return;
        }
        let (open, close) = if self.ascii { ("<", ">") } else { ("⟨", "⟩") };
        let items: Vec<String> =
            sz.iter().map(|a| if *a == Annot::Bare { "_".to_string() } else { self.annot(*a) }).collect();
        out.push('^');
        out.push_str(open);
        out.push_str(&items.join(", "));
        out.push_str(close);
    }

    fn bind(&self, x: &Name, names: &[String]) -> String {
        if &**x == "_" || !names.iter().any(|n| n == &**x) {
            return x.to_string();
        }
        let mut k = 0;
        loop {
            let cand = format!("{x}{k}");
            if !names.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }

    /// Anonymous binders that are referenced get a name.
    fn bind_used(&self, x: &Name, body: &Term, names: &[String]) -> String {
        if &**x == "_" && body.has_rel(0) {
            self.bind(&Name::from("x"), names)
        } else {
            self.bind(x, names)
        }
    }

    fn go(&self, t: &Term, names: &mut Vec<String>, prec: u8, out: &mut String) {
        match t {
            Term::Univ(u) => out.push_str(&u.to_string()),
            Term::Hole => out.push('_'),
            Term::Rel(i, sizes) => {
                match names.len().checked_sub(i + 1).map(|k| &names[k]) {
                    Some(n) => out.push_str(n),
                    None => out.push_str(&format!("#{i}")),
                }
                self.sizes(sizes, out);
            }
            Term::Const(c, sizes) => {
                out.push_str(c);
                self.sizes(sizes, out);
            }
            Term::Constr(c) => out.push_str(c),
            Term::Ind(i, a) => {
                out.push_str(i);
                let a = self.annot(*a);
                if !a.is_empty() {
                    out.push('^');
                    out.push_str(&a);
                }
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                paren(prec > PREC_APP, out, |out| {
                    self.go(head, names, PREC_APP, out);
                    for a in args {
                        out.push(' ');
                        self.go(a, names, PREC_ATOM, out);
                    }
                });
            }
            Term::Prod(x, a, b) => paren(prec > PREC_TOP, out, |out| {
                let x = self.bind_used(x, b, names);
                if x != "_" && b.has_rel(0) {
                    out.push('(');
                    out.push_str(&x);
                    out.push_str(" : ");
                    self.go(a, names, PREC_TOP, out);
                    out.push(')');
                } else {
                    self.go(a, names, PREC_APP, out);
                }
                out.push(' ');
                out.push_str(self.arrow());
                out.push(' ');
                names.push(x);
                self.go(b, names, PREC_TOP, out);
                names.pop();
            }),
            Term::Abs(x, a, b) => paren(prec > PREC_TOP, out, |out| {
                let x = self.bind_used(x, b, names);
                out.push_str("fun ");
                if **a == Term::Hole {
                    out.push_str(&x);
                } else {
                    out.push('(');
                    out.push_str(&x);
                    out.push_str(" : ");
                    self.go(a, names, PREC_TOP, out);
                    out.push(')');
                }
                out.push_str(" => ");
                names.push(x);
                self.go(b, names, PREC_TOP, out);
                names.pop();
            }),
            Term::LetIn(x, ty, e, b) => paren(prec > PREC_TOP, out, |out| {
                let x = self.bind(x, names);
                out.push_str("let ");
                out.push_str(&x);
                if **ty != Term::Hole {
                    out.push_str(" : ");
                    self.go(ty, names, PREC_TOP, out);
                }
                out.push_str(" := ");
                self.go(e, names, PREC_TOP, out);
                out.push_str(" in ");
                names.push(x);
                self.go(b, names, PREC_TOP, out);
                names.pop();
            }),
            Term::Case(c) => {
                out.push_str("match ");
                self.go(&c.target, names, PREC_TOP, out);
                out.push_str(" return ");
                self.go(&c.motive, names, PREC_ATOM, out);
                out.push_str(" with");
                for (k, b) in &c.branches {
                    out.push_str(" | ");
                    out.push_str(k);
                    out.push_str(" => ");
                    self.go(b, names, PREC_TOP, out);
                }
                out.push_str(" end");
            }
            Term::Fix(fx) => paren(prec > PREC_TOP, out, |out| self.fixpoint("fix", fx, names, out)),
            Term::Cofix(fx) => paren(prec > PREC_TOP, out, |out| self.fixpoint("cofix", fx, names, out)),
        }
    }

    fn fixpoint(&self, kw: &str, fx: &Fixpoint, names: &mut Vec<String>, out: &mut String) {
        out.push_str(kw);
        let base = names.len();
        let bound: Vec<String> = fx.defs.iter().map(|d| self.bind(&d.name, names)).collect();
        for (k, d) in fx.defs.iter().enumerate() {
            out.push_str(if k == 0 { " " } else { " with " });
            out.push_str(&bound[k]);
            if let Some(n) = fx.indices.get(k) {
                out.push_str(&format!(" {{struct {n}}}"));
            }
            out.push_str(" : ");
            self.go(&d.ty, names, PREC_TOP, out);
            out.push_str(" := ");
            names.extend(bound.iter().cloned());
            self.go(&d.body, names, PREC_TOP, out);
            names.truncate(base);
        }
        out.push_str(" for ");
        out.push_str(&bound[fx.select - 1]);
    }
}

fn paren(wrap: bool, out: &mut String, f: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    f(out);
    if wrap {
        out.push(')');
    }
}
