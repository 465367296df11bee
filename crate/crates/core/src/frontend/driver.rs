use std::fmt::Write;

use crate::error::{Error, TypeError};
use crate::infer::{check_decl, Checker, Options, Report};
use crate::reduce::Env;
use crate::syntax::{Annot, GlobalDecl, GlobalEnv, IndBlock, LocalEnv, Name, Printer, Signature, Term};

use super::diag::Diagnostic;
use super::parser::parse;
use super::resolve::{elaborate, Elaborated};

const PRELUDE: &str = include_str!("prelude.v");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    TypeError,
    SyntaxError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::TypeError => 1,
            Status::SyntaxError => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    /// Accepted global definitions and assumptions, in order.
    pub reports: Vec<(Name, Report)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Outcome {
    /// One `name : type` line per accepted global, preceded by its
    /// constraint dumps when `dump` is set.
    pub fn render(&self, ascii: bool, dump: bool) -> String {
        let mut out = String::new();
        for (name, r) in &self.reports {
            if dump {
                for (f, c) in &r.dumps {
                    let _ = writeln!(out, "# constraints of {f}");
                    out.push_str(&c.dump());
                }
            }
            let _ = writeln!(out, "{name} : {}", Printer::new().ascii(ascii).show(r.decl.ty()));
        }
        out
    }
}

pub struct Session {
    pub sig: Signature,
    pub globals: GlobalEnv,
    pub opts: Options,
}

impl Session {
    pub fn new(opts: Options) -> Session {
        Session { sig: Signature::new(), globals: GlobalEnv::new(), opts }
    }

    pub fn with_prelude(opts: Options) -> Session {
        let mut s = Session::new(opts);
        let out = s.load(PRELUDE, true);
        assert_eq!(out.status, Status::Ok, "prelude failed: {:?}", out.diagnostics);
        let nat = |a| Term::ind("Nat", a);
        let modulo = Term::arrow(nat(Annot::Full), Term::arrow(nat(Annot::Glob), nat(Annot::Glob)));
        s.globals.push(Name::from("modulo"), GlobalDecl::Assum { ty: modulo }).expect("fresh name");
        s
    }

    pub fn run(&mut self, src: &str) -> Outcome {
        self.load(src, false)
    }

    fn load(&mut self, src: &str, trusted: bool) -> Outcome {
        let mut out = Outcome { status: Status::Ok, reports: Vec::new(), diagnostics: Vec::new() };
        let file = match parse(src) {
            Ok(f) => f,
            Err(e) => {
                out.status = Status::SyntaxError;
                out.diagnostics.push(Diagnostic::syntax(&e));
                return out;
            }
        };
        for (span, d) in &file.decls {
            let fail = |out: &mut Outcome, e: Error| {
                out.status = Status::TypeError;
                out.diagnostics.push(Diagnostic::checker(&e, *span));
            };
            let elaborated = match elaborate(&self.sig, &self.globals, d) {
                Ok(x) => x,
                Err(e) => {
                    fail(&mut out, e.into());
                    return out;
                }
            };
            match elaborated {
                Elaborated::Inductive(block) => {
                    let names: Vec<Name> = block.bodies.iter().map(|b| b.name.clone()).collect();
                    if let Err(e) = self.add_block(block) {
                        fail(&mut out, e);
                        return out;
                    }
                    if !trusted {
                        let list: Vec<String> = names.iter().map(|n| format!("`{n}`")).collect();
                        out.diagnostics.push(Diagnostic::warning(
                            "W-POSITIVITY",
                            format!("strict positivity of {} is not checked", list.join(", ")),
                            *span,
                        ));
                    }
                }
                Elaborated::Globals(decls) => {
                    for decl in decls {
                        let r = match check_decl(Env::new(&self.sig, &self.globals), self.opts, &decl) {
                            Ok(r) => r,
                            Err(e) => {
                                fail(&mut out, e);
                                return out;
                            }
                        };
                        let name = decl.name().clone();
                        self.globals.push(name.clone(), r.decl.clone()).expect("checked for duplicates");
                        out.reports.push((name, r));
                    }
                }
            }
        }
        out
    }

    /// Adds a block after checking that its telescopes are well sorted.
    fn add_block(&mut self, block: IndBlock) -> Result<(), Error> {
        for n in block.bodies.iter().map(|b| &b.name).chain(block.constructors.iter().map(|c| &c.name)) {
            if self.globals.contains(n) {
                return Err(TypeError::Duplicate(n.clone()).into());
            }
        }
        let mut sig = self.sig.clone();
        sig.add_block(block.clone()).map_err(TypeError::Duplicate)?;
        let mut ck = Checker::new(Env::new(&sig, &self.globals), self.opts);
        let well_sorted = |ck: &mut Checker<'_>, lenv: &LocalEnv, tel: &[crate::syntax::LocalDecl]| {
            let mut lenv = lenv.clone();
            for d in tel {
                ck.infer_sort(&lenv, &d.ty)?;
                lenv = lenv.push(d.clone());
            }
            Ok::<_, Error>(lenv)
        };
        let params = well_sorted(&mut ck, &LocalEnv::new(), &block.params)?;
        for b in &block.bodies {
            well_sorted(&mut ck, &params, &b.indices)?;
        }
        for c in &block.constructors {
            let inner = well_sorted(&mut ck, &params, &c.args)?;
            for t in &c.index_args {
                ck.infer(&inner, t)?;
            }
        }
        drop(ck);
        self.sig = sig;
        Ok(())
    }
}
