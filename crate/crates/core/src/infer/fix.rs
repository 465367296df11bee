use crate::error::{Error, TypeError};
use crate::solver::{rec_check_loop, rec_check_pass, LoopFailure, RecCheckError};
use crate::syntax::{erase, shift, EraseMode, FixDef, Fixpoint, LocalEnv, Term};

use super::{meta, Checker, FixRecord, LoopMode, Result};

impl Checker<'_> {
    pub(super) fn infer_fix(&mut self, lenv: &LocalEnv, fx: &Fixpoint, cofix: bool) -> Result<(Term, Term)> {
        if cofix || !fx.indices.is_empty() {
            return self.fix_with(lenv, fx, &fx.indices, cofix);
        }
        self.search_indices(lenv, fx)
    }

    /// Tries every combination of recursive arguments, leftmost varying slowest.
    fn search_indices(&mut self, lenv: &LocalEnv, fx: &Fixpoint) -> Result<(Term, Term)> {
        let arities: Vec<usize> = fx.defs.iter().map(|d| meta::arity(self.env, lenv, &d.ty)).collect();
        if let Some(k) = arities.iter().position(|a| *a == 0) {
            return Err(self.fail(TypeError::NoRecArg(fx.defs[k].name.clone())));
        }
        let mut tuple = vec![1; fx.defs.len()];
        let mut first: Option<Error> = None;
        loop {
            let snap = self.snapshot();
            match self.fix_with(lenv, fx, &tuple, false) {
                Ok(r) => return Ok(r),
                Err(e) => {
                    self.restore(snap);
                    let no_arg = matches!(&e.kind, TypeError::NoRecArg(n) if fx.defs.iter().any(|d| &d.name == n));
                    if first.is_none() && !no_arg {
                        first = Some(e);
                    }
                }
            }
            // Advance the rightmost position that can still grow.
            let mut k = tuple.len();
            loop {
                if k == 0 {
                    return Err(first.unwrap_or_else(|| self.fail(TypeError::NoRecArg(fx.selected().name.clone()))));
                }
                k -= 1;
                if tuple[k] < arities[k] {
                    tuple[k] += 1;
                    for t in &mut tuple[k + 1..] {
                        *t = 1;
                    }
                    break;
                }
            }
        }
    }

    fn fix_with(&mut self, lenv: &LocalEnv, fx: &Fixpoint, indices: &[usize], cofix: bool) -> Result<(Term, Term)> {
        self.rule(if cofix { "a-cofix" } else { "a-fix" });
        let n = fx.defs.len();

        for d in &fx.defs {
            let (state, c) = (self.state.clone(), self.c.clone());
            self.infer_sort(lenv, &d.ty)?;
            self.state = state;
            self.c = c;
        }

        let mut types = Vec::with_capacity(n);
        let mut rhos = Vec::with_capacity(n);
        for (k, d) in fx.defs.iter().enumerate() {
            let starred = if cofix {
                meta::set_corec_stars(self.env, lenv, &d.ty)
                    .ok_or_else(|| self.fail(TypeError::NotCoinductive(d.name.clone())))?
            } else {
                meta::set_rec_stars(self.env, lenv, &d.ty, indices[k])
                    .ok_or_else(|| self.fail(TypeError::NoRecArg(d.name.clone())))?
            };
            let (t, _) = self.infer_sort(lenv, &starred)?;
            let rho = if cofix {
                meta::get_corec_var(self.env, lenv, &t, self.state.positions())
            } else {
                meta::get_rec_var(self.env, lenv, &t, indices[k], self.state.positions())
            };
            let rho = rho.ok_or_else(|| self.fail(TypeError::NoRecArg(d.name.clone())))?;
            types.push(t);
            rhos.push(rho);
        }

        let mut inner = lenv.clone();
        for (k, d) in fx.defs.iter().enumerate() {
            inner = inner.push_assum(d.name.clone(), types[k].lift(0, k));
        }

        let c1 = self.c.clone();
        let (dumps, records) = (self.dumps.len(), self.fixpoints.len());
        let mut first = true;
        let bodies = loop {
            self.c = c1.clone();
            self.dumps.truncate(dumps);
            self.fixpoints.truncate(records);
            let mut bodies = Vec::with_capacity(n);
            for (k, d) in fx.defs.iter().enumerate() {
                let expected = shift(&types[k], self.state.positions()).lift(0, n);
                self.fix_stack.push(d.name.clone());
                let body = self.check(&inner, &d.body, &expected);
                self.fix_stack.pop();
                bodies.push(body?);
            }
            if first {
                self.dumps.push((fx.selected().name.clone(), self.c.clone()));
                first = false;
            }
            match self.opts.loop_mode {
                LoopMode::Literal => match rec_check_loop(&self.c, &rhos, &types, &bodies, &mut self.state) {
                    Ok(c) => {
                        self.c = c;
                        break bodies;
                    }
                    Err(LoopFailure { def, .. }) => return Err(self.unsat(fx, def)),
                },
                LoopMode::Regenerate => match rec_check_pass(&self.c, &rhos, &types, &bodies, &self.state) {
                    Ok(c) => {
                        self.c = c;
                        break bodies;
                    }
                    Err((_, RecCheckError::Demote(vs))) => {
                        self.rule("demote");
                        self.state.remove_positions(&vs);
                    }
                    Err((def, RecCheckError::Unsatisfiable { .. })) => return Err(self.unsat(fx, def)),
                },
            }
        };

        let positions = self.state.positions().clone();
        for (k, d) in fx.defs.iter().enumerate() {
            self.fixpoints.push(FixRecord {
                name: d.name.clone(),
                lenv: lenv.clone(),
                ty: types[k].clone(),
                rho: rhos[k],
                cofix,
                positions: positions.clone(),
            });
        }
        let defs = fx
            .defs
            .iter()
            .zip(bodies)
            .zip(&types)
            .map(|((d, body), t)| FixDef { name: d.name.clone(), ty: erase(t, EraseMode::Star, &positions), body })
            .collect();
        let out = Fixpoint { indices: indices.to_vec(), select: fx.select, defs };
        let ty = types[fx.select - 1].clone();
        let term = if cofix { Term::Cofix(Box::new(out)) } else { Term::Fix(Box::new(out)) };
        Ok((term, ty))
    }

    fn unsat(&self, fx: &Fixpoint, def: usize) -> Error {
        let name = fx.defs[def].name.clone();
        Error { kind: TypeError::Unsat(name.clone()), fixpoint: Some(name), constraints: Some(self.c.dump()) }
    }
}
