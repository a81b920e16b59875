use super::Handle;
use crate::semantics::ConceptId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StackEntry {
    pub concept: ConceptId,
    pub handle: Handle,
}

/// Resolved segments of one access, first segment at the bottom.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextStack {
    entries: Vec<StackEntry>,
}

impl ContextStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, concept: ConceptId, handle: Handle) {
        self.entries.push(StackEntry { concept, handle });
    }

    pub fn get(&self, i: usize) -> Option<StackEntry> {
        self.entries.get(i).copied()
    }

    pub fn top(&self) -> Option<StackEntry> {
        self.entries.last().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[StackEntry] {
        &self.entries
    }

    pub fn position(&self, concept: ConceptId) -> Option<usize> {
        self.entries.iter().position(|e| e.concept == concept)
    }

    /// Copy of the bottom `n` entries.
    pub fn prefix(&self, n: usize) -> ContextStack {
        ContextStack { entries: self.entries[..n.min(self.entries.len())].to_vec() }
    }
}
