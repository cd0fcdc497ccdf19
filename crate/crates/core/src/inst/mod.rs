//! Instantiation modules: the ground-term database, enumerative
//! instantiation, trigger generation and e-matching.

mod ematch;
mod enumerate;
mod termdb;
mod triggers;

use std::collections::HashSet;

pub use ematch::{ematch, ematch_trigger, Binding, EMatcher};
pub use enumerate::{next_instantiation, EnumCursor, Enumerator};
pub use termdb::{is_db_term, TermDb};
pub use triggers::{generate_triggers, NoTrigger, Trigger, TriggerOptions, TriggerSel};

use crate::term::{TermId, TermStore};

/// Shared view handed to an instantiation module for one round.
pub struct InstContext<'a> {
    pub store: &'a mut TermStore,
    pub db: &'a TermDb,
    /// Lemmas already in the clause set; never produced again.
    pub known_lemmas: &'a HashSet<TermId>,
}

/// A lemma produced by a module, tagged with the index of its quantifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstLemma {
    pub quantifier: usize,
    pub lemma: TermId,
    /// Ground terms bound to the quantifier's variables, in binder order.
    pub binding: Vec<TermId>,
}
