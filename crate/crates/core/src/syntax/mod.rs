//! Stages, annotated terms, environments and the pure metafunctions over them.

mod env;
pub mod meta;
mod print;
mod stage;
mod state;
mod term;

pub use env::{
    ConstrDecl, ConstrRef, GlobalDecl, GlobalEnv, IndBlock, IndBody, IndRef, LocalDecl, LocalEnv, Signature, Telescope,
};
pub use meta::{erase, pos_vars, shift, stage_floor, stage_vars, subst_stage, EraseMode};
pub use print::Printer;
pub use stage::{Annot, Stage, StageVar, Universe};
pub use state::CheckerState;
pub use term::{name, CaseTerm, FixDef, Fixpoint, Name, Term};
