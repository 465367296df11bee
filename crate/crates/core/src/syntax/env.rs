use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;

use super::stage::Universe;
use super::term::{Name, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalDecl {
    pub name: Name,
    pub ty: Term,
    pub body: Option<Term>,
}

impl LocalDecl {
    pub fn assum(name: Name, ty: Term) -> LocalDecl {
        LocalDecl { name, ty, body: None }
    }
}

/// Ordered binders; each entry lives in the context of the ones before it.
pub type Telescope = Vec<LocalDecl>;

/// Persistent local context. Index 0 is the innermost binder.
#[derive(Clone, Debug, Default)]
pub struct LocalEnv {
    head: Option<Arc<Node>>,
    len: usize,
}

#[derive(Debug)]
struct Node {
    decl: LocalDecl,
    next: Option<Arc<Node>>,
}

impl LocalEnv {
    pub fn new() -> LocalEnv {
        LocalEnv::default()
    }

    pub fn push(&self, decl: LocalDecl) -> LocalEnv {
        LocalEnv { head: Some(Arc::new(Node { decl, next: self.head.clone() })), len: self.len + 1 }
    }

    pub fn push_assum(&self, name: Name, ty: Term) -> LocalEnv {
        self.push(LocalDecl::assum(name, ty))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The declaration for variable `i`, as stored in its own context.
    pub fn get(&self, i: usize) -> Option<&LocalDecl> {
        let mut node = self.head.as_deref();
        for _ in 0..i {
            node = node?.next.as_deref();
        }
        node.map(|n| &n.decl)
    }

    /// Type of variable `i` in the current context.
    pub fn type_of(&self, i: usize) -> Option<Term> {
        self.get(i).map(|d| d.ty.lift(0, i + 1))
    }

    /// Body of variable `i` in the current context, if it is a definition.
    pub fn body_of(&self, i: usize) -> Option<Term> {
        self.get(i).and_then(|d| d.body.as_ref()).map(|b| b.lift(0, i + 1))
    }

    /// Names from innermost to outermost.
    pub fn names(&self) -> Vec<Name> {
        let mut out = Vec::with_capacity(self.len);
        let mut node = self.head.as_deref();
        while let Some(n) = node {
            out.push(n.decl.name.clone());
            node = n.next.as_deref();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndBody {
    pub name: Name,
    /// Index telescope, in the context of the block parameters.
    pub indices: Telescope,
    pub univ: Universe,
    pub coinductive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrDecl {
    pub name: Name,
    /// Position of the owning inductive within the block.
    pub owner: usize,
    /// Arguments, in the context of the block parameters.
    pub args: Telescope,
    /// Indices of the result type, in the context of parameters and arguments.
    pub index_args: Vec<Term>,
}

/// A block of mutual (co)inductive types sharing their parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct IndBlock {
    pub params: Telescope,
    pub bodies: Vec<IndBody>,
    pub constructors: Vec<ConstrDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndRef {
    pub block: usize,
    pub body: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstrRef {
    pub block: usize,
    pub index: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Signature {
    blocks: Vec<IndBlock>,
    inds: HashMap<Name, IndRef>,
    constrs: HashMap<Name, ConstrRef>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Registers a block. Returns the first clashing name, if any.
    pub fn add_block(&mut self, block: IndBlock) -> Result<(), Name> {
        let mut seen = std::collections::HashSet::new();
        let names = block.bodies.iter().map(|b| &b.name).chain(block.constructors.iter().map(|c| &c.name));
        for n in names {
            if self.defines(n) || !seen.insert(n.clone()) {
                return Err(n.clone());
            }
        }
        let b = self.blocks.len();
        for (i, body) in block.bodies.iter().enumerate() {
            self.inds.insert(body.name.clone(), IndRef { block: b, body: i });
        }
        for (i, c) in block.constructors.iter().enumerate() {
            self.constrs.insert(c.name.clone(), ConstrRef { block: b, index: i });
        }
        self.blocks.push(block);
        Ok(())
    }

    pub fn defines(&self, n: &str) -> bool {
        self.inds.contains_key(n) || self.constrs.contains_key(n)
    }

    pub fn ind(&self, n: &str) -> Option<IndRef> {
        self.inds.get(n).copied()
    }

    pub fn constr(&self, n: &str) -> Option<ConstrRef> {
        self.constrs.get(n).copied()
    }

    pub fn block(&self, b: usize) -> &IndBlock {
        &self.blocks[b]
    }

    pub fn ind_body(&self, r: IndRef) -> &IndBody {
        &self.blocks[r.block].bodies[r.body]
    }

    pub fn constr_decl(&self, r: ConstrRef) -> &ConstrDecl {
        &self.blocks[r.block].constructors[r.index]
    }

    /// The inductive type a constructor builds.
    pub fn constr_owner(&self, r: ConstrRef) -> IndRef {
        IndRef { block: r.block, body: self.constr_decl(r).owner }
    }

    /// Constructors of an inductive type, in declaration order.
    pub fn constructors_of(&self, r: IndRef) -> Vec<ConstrRef> {
        self.blocks[r.block]
            .constructors
            .iter()
            .enumerate()
            .filter(|(_, c)| c.owner == r.body)
            .map(|(i, _)| ConstrRef { block: r.block, index: i })
            .collect()
    }

    pub fn nparams(&self, r: IndRef) -> usize {
        self.blocks[r.block].params.len()
    }

    /// Number of types in the block defining `n` (an inductive or a constructor).
    pub fn inds(&self, n: &str) -> Option<usize> {
        let b = self.ind(n).map(|r| r.block).or_else(|| self.constr(n).map(|r| r.block))?;
        Some(self.blocks[b].bodies.len())
    }

    pub fn is_coinductive(&self, n: &str) -> bool {
        self.ind(n).is_some_and(|r| self.ind_body(r).coinductive)
    }

    pub fn blocks(&self) -> &[IndBlock] {
        &self.blocks
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GlobalDecl {
    /// Assumption with a full-annotated type.
    Assum { ty: Term },
    /// Definition with a global-annotated type and a full-annotated body.
    Def { ty: Term, body: Term },
}

impl GlobalDecl {
    pub fn ty(&self) -> &Term {
        match self {
            GlobalDecl::Assum { ty } | GlobalDecl::Def { ty, .. } => ty,
        }
    }

    pub fn body(&self) -> Option<&Term> {
        match self {
            GlobalDecl::Assum { .. } => None,
            GlobalDecl::Def { body, .. } => Some(body),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GlobalEnv {
    decls: IndexMap<Name, GlobalDecl>,
}

impl GlobalEnv {
    pub fn new() -> GlobalEnv {
        GlobalEnv::default()
    }

    /// Appends a declaration; fails if the name is taken.
    pub fn push(&mut self, name: Name, decl: GlobalDecl) -> Result<(), Name> {
        if self.decls.contains_key(&name) {
            return Err(name);
        }
        self.decls.insert(name, decl);
        Ok(())
    }

    pub fn get(&self, n: &str) -> Option<&GlobalDecl> {
        self.decls.get(n)
    }

    pub fn contains(&self, n: &str) -> bool {
        self.decls.contains_key(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &GlobalDecl)> {
        self.decls.iter()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }
}
