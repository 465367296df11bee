use crate::syntax::Universe;

use super::ast::{Binder, Branch, FixBody, IndBody, Match, SDecl, STerm, SourceFile};
use super::lexer::{lex, Span, SyntaxError, Tok};

const KEYWORDS: &[&str] = &[
    "forall",
    "fun",
    "let",
    "in",
    "match",
    "as",
    "return",
    "with",
    "end",
    "Prop",
    "Set",
    "Type",
    "Inductive",
    "CoInductive",
    "Definition",
    "Fixpoint",
    "CoFixpoint",
    "Axiom",
    "struct",
];

pub fn parse(src: &str) -> Result<SourceFile, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        let start = p.span();
        let d = p.decl()?;
        decls.push((start.to(p.prev_span()), d));
    }
    Ok(SourceFile { decls })
}

/// Parses a single term, for tests and tools.
pub fn parse_term(src: &str) -> Result<STerm, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.term()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError { message: format!("expected {what}, found {}", self.peek()), span: self.span() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(&t.to_string())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn at_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        if self.at_ident() {
            let Tok::Ident(s) = self.bump() else { unreachable!() };
            Ok(s)
        } else {
            self.error("an identifier")
        }
    }

    /// An identifier or `_`.
    fn name(&mut self) -> Result<String, SyntaxError> {
        if *self.peek() == Tok::Underscore {
            self.bump();
            Ok("_".into())
        } else {
            self.ident()
        }
    }

    fn at_name(&self) -> bool {
        self.at_ident() || *self.peek() == Tok::Underscore
    }

    fn decl(&mut self) -> Result<SDecl, SyntaxError> {
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.error("a declaration");
        };
        self.bump();
        let d = match kw.as_str() {
            "Inductive" | "CoInductive" => {
                let mut bodies = vec![self.ind_body()?];
                while self.eat_kw("with") {
                    bodies.push(self.ind_body()?);
                }
                SDecl::Inductive { coinductive: kw == "CoInductive", bodies }
            }
            "Definition" => {
                let name = self.ident()?;
                let binders = self.decl_binders()?;
                let ty = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.term()?)
                } else {
                    None
                };
                self.expect(Tok::ColonEq)?;
                let body = self.term()?;
                SDecl::Definition { name, binders, ty, body }
            }
            "Fixpoint" | "CoFixpoint" => {
                let cofix = kw == "CoFixpoint";
                let mut bodies = vec![self.fix_body(cofix)?];
                while self.eat_kw("with") {
                    bodies.push(self.fix_body(cofix)?);
                }
                SDecl::Fixpoint { cofix, bodies }
            }
            "Axiom" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.term()?;
                SDecl::Axiom { name, ty }
            }
            _ => {
                self.pos -= 1;
                return self.error("a declaration");
            }
        };
        self.expect(Tok::Dot)?;
        Ok(d)
    }

    fn ind_body(&mut self) -> Result<IndBody, SyntaxError> {
        let name = self.ident()?;
        let params = self.decl_binders()?;
        self.expect(Tok::Colon)?;
        let arity = self.term()?;
        self.expect(Tok::ColonEq)?;
        let mut constructors = Vec::new();
        if *self.peek() == Tok::Bar || self.at_ident() {
            if *self.peek() == Tok::Bar {
                self.bump();
            }
            loop {
                let c = self.ident()?;
                self.expect(Tok::Colon)?;
                constructors.push((c, self.term()?));
                if *self.peek() != Tok::Bar {
                    break;
                }
                self.bump();
            }
        }
        Ok(IndBody { name, params, arity, constructors })
    }

    fn fix_body(&mut self, cofix: bool) -> Result<FixBody, SyntaxError> {
        let name = self.ident()?;
        let binders = self.decl_binders()?;
        let mut struct_arg = None;
        if !cofix && *self.peek() == Tok::LBrace {
            self.bump();
            self.expect_kw("struct")?;
            struct_arg = Some(self.ident()?);
            self.expect(Tok::RBrace)?;
        }
        if *self.peek() != Tok::Colon {
            return self.error("`:` and a return type");
        }
        self.bump();
        let ret = self.term()?;
        self.expect(Tok::ColonEq)?;
        let body = self.term()?;
        Ok(FixBody { name, binders, struct_arg, ret, body })
    }

    /// Parenthesised binder groups after a declared name.
    fn decl_binders(&mut self) -> Result<Vec<Binder>, SyntaxError> {
        let mut out = Vec::new();
        while *self.peek() == Tok::LParen {
            out.push(self.paren_binder()?);
        }
        Ok(out)
    }

    fn paren_binder(&mut self) -> Result<Binder, SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut names = vec![self.name()?];
        while self.at_name() {
            names.push(self.name()?);
        }
        self.expect(Tok::Colon)?;
        let ty = self.term()?;
        self.expect(Tok::RParen)?;
        Ok(Binder { names, ty: Some(ty) })
    }

    /// Binders of `fun` and `forall`: either `x y : T` or a sequence of
    /// names and parenthesised groups.
    fn binders(&mut self) -> Result<Vec<Binder>, SyntaxError> {
        if self.at_name() {
            let mut names = Vec::new();
            while self.at_name() {
                names.push(self.name()?);
            }
            if *self.peek() == Tok::Colon {
                self.bump();
                let ty = self.term()?;
                return Ok(vec![Binder { names, ty: Some(ty) }]);
            }
            let mut out = vec![Binder { names, ty: None }];
            out.extend(self.mixed_binders()?);
            return Ok(out);
        }
        let out = self.mixed_binders()?;
        if out.is_empty() {
            return self.error("a binder");
        }
        Ok(out)
    }

    fn mixed_binders(&mut self) -> Result<Vec<Binder>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            if *self.peek() == Tok::LParen {
                out.push(self.paren_binder()?);
            } else if self.at_name() {
                out.push(Binder { names: vec![self.name()?], ty: None });
            } else {
                return Ok(out);
            }
        }
    }

    pub fn term(&mut self) -> Result<STerm, SyntaxError> {
        if self.eat_kw("forall") {
            let bs = self.binders()?;
            self.expect(Tok::Comma)?;
            return Ok(STerm::Forall(bs, Box::new(self.term()?)));
        }
        if self.eat_kw("fun") {
            let bs = self.binders()?;
            self.expect(Tok::FatArrow)?;
            return Ok(STerm::Fun(bs, Box::new(self.term()?)));
        }
        if self.eat_kw("let") {
            let name = self.name()?;
            let binders = self.mixed_binders()?;
            let ty = if *self.peek() == Tok::Colon {
                self.bump();
                Some(Box::new(self.term()?))
            } else {
                None
            };
            self.expect(Tok::ColonEq)?;
            let value = Box::new(self.term()?);
            self.expect_kw("in")?;
            let body = Box::new(self.term()?);
            return Ok(STerm::Let { name, binders, ty, value, body });
        }
        let lhs = self.app()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(STerm::Arrow(Box::new(lhs), Box::new(self.term()?)));
        }
        Ok(lhs)
    }

    fn at_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()) || matches!(s.as_str(), "Prop" | "Set" | "Type" | "match"),
            Tok::Underscore | Tok::LParen => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<STerm, SyntaxError> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.at_atom() {
            args.push(self.atom()?);
        }
        Ok(if args.is_empty() { head } else { STerm::App(Box::new(head), args) })
    }

    fn atom(&mut self) -> Result<STerm, SyntaxError> {
        match self.peek().clone() {
            Tok::Underscore => {
                self.bump();
                Ok(STerm::Hole)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) => match s.as_str() {
                "Prop" => {
                    self.bump();
                    Ok(STerm::Sort(Universe::Prop))
                }
                "Set" => {
                    self.bump();
                    Ok(STerm::Sort(Universe::Set))
                }
                "Type" => {
                    self.bump();
                    if *self.peek() == Tok::At && *self.peek_at(1) == Tok::LBrace {
                        self.bump();
                        self.bump();
                        let Tok::Num(n) = self.peek().clone() else {
                            return self.error("a universe level");
                        };
                        if n == 0 {
                            return Err(SyntaxError {
                                message: "universe levels start at 1".into(),
                                span: self.span(),
                            });
                        }
                        self.bump();
                        self.expect(Tok::RBrace)?;
                        Ok(STerm::Sort(Universe::Type(n)))
                    } else {
                        Ok(STerm::Sort(Universe::Type(1)))
                    }
                }
                "match" => self.match_term(),
                _ => Ok(STerm::Var(self.ident()?)),
            },
            _ => self.error("a term"),
        }
    }

    fn match_term(&mut self) -> Result<STerm, SyntaxError> {
        self.expect_kw("match")?;
        let scrutinee = self.term()?;
        let as_name = if self.eat_kw("as") { Some(self.name()?) } else { None };
        let in_pattern = if self.eat_kw("in") {
            let i = self.ident()?;
            let mut names = Vec::new();
            while self.at_name() {
                names.push(self.name()?);
            }
            Some((i, names))
        } else {
            None
        };
        let ret = if self.eat_kw("return") { Some(self.term()?) } else { None };
        self.expect_kw("with")?;
        let mut branches = Vec::new();
        if *self.peek() == Tok::Bar || self.at_ident() {
            if *self.peek() == Tok::Bar {
                self.bump();
            }
            loop {
                let constr = self.ident()?;
                let mut vars = Vec::new();
                while self.at_name() {
                    vars.push(self.name()?);
                }
                self.expect(Tok::FatArrow)?;
                let body = self.term()?;
                branches.push(Branch { constr, vars, body });
                if *self.peek() != Tok::Bar {
                    break;
                }
                self.bump();
            }
        }
        self.expect_kw("end")?;
        Ok(STerm::Match(Box::new(Match { scrutinee, as_name, in_pattern, ret, branches })))
    }
}
