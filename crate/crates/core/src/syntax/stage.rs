use std::fmt;

/// A stage variable, identified by a dense index into the checker's pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StageVar(pub u32);

impl fmt::Display for StageVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A size expression: infinity, or a variable under some number of successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Infty,
    Var(StageVar, u32),
}

impl Stage {
    pub fn var(v: StageVar) -> Stage {
        Stage::Var(v, 0)
    }

    /// Successor; the successor of infinity is infinity.
    pub fn succ(self) -> Stage {
        match self {
            Stage::Infty => Stage::Infty,
            Stage::Var(v, n) => Stage::Var(v, n + 1),
        }
    }

    /// The underlying variable of a finite stage.
    pub fn floor(self) -> Option<StageVar> {
        match self {
            Stage::Infty => None,
            Stage::Var(v, _) => Some(v),
        }
    }

    pub fn hats(self) -> u32 {
        match self {
            Stage::Infty => 0,
            Stage::Var(_, n) => n,
        }
    }
}

/// Annotation carried by an inductive type occurrence or a definition's size vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Annot {
    Bare,
    Star,
    Glob,
    Full,
    Sized(Stage),
}

impl Annot {
    pub fn stage(self) -> Option<Stage> {
        match self {
            Annot::Sized(s) => Some(s),
            _ => None,
        }
    }

    /// Whether this annotation is counted by `count_annots`.
    pub fn is_counted(self) -> bool {
        matches!(self, Annot::Sized(_) | Annot::Full | Annot::Glob)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Universe {
    Prop,
    Set,
    Type(u32),
}

impl Universe {
    /// Position in the cumulativity chain Prop ≤ Set ≤ Type1 ≤ Type2 ≤ ...
    fn rank(self) -> u32 {
        match self {
            Universe::Prop => 0,
            Universe::Set => 1,
            Universe::Type(i) => i + 1,
        }
    }

    pub fn is_sub(self, other: Universe) -> bool {
        self.rank() <= other.rank()
    }

    /// The type of a universe.
    pub fn axiom(self) -> Universe {
        match self {
            Universe::Prop | Universe::Set => Universe::Type(1),
            Universe::Type(i) => Universe::Type(i + 1),
        }
    }

    /// The sort of a product whose domain lives in `self` and codomain in `cod`.
    pub fn rule(self, cod: Universe) -> Universe {
        match (self, cod) {
            (_, Universe::Prop) => Universe::Prop,
            (Universe::Prop | Universe::Set, Universe::Set) => Universe::Set,
            (Universe::Type(i), Universe::Set) => Universe::Type(i),
            (Universe::Prop | Universe::Set, Universe::Type(j)) => Universe::Type(j),
            (Universe::Type(i), Universe::Type(j)) => Universe::Type(i.max(j)),
        }
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Prop => f.write_str("Prop"),
            Universe::Set => f.write_str("Set"),
            Universe::Type(1) => f.write_str("Type"),
            Universe::Type(i) => write!(f, "Type@{{{i}}}"),
        }
    }
}
