use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use super::Value;
use crate::semantics::ConceptId;

/// Opaque primitive reference. Ids are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Handle(u64);

impl Handle {
    pub fn id(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSegment {
    pub concept: ConceptId,
    pub fields: IndexMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HeapError {
    #[error("handle {0} is not live")]
    Dangling(Handle),
    #[error("object {0} has no segment for the requested concept")]
    MissingSegment(Handle),
}

/// One allocation. Segments of concepts that inherit identity are stored
/// next to their owner.
#[derive(Debug)]
struct Cell {
    owner: ConceptId,
    segments: Vec<ObjectSegment>,
}

#[derive(Debug, Default)]
pub struct Heap {
    cells: HashMap<u64, Cell>,
    next: u64,
}

impl Heap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, concept: ConceptId, fields: IndexMap<String, Value>) -> Handle {
        self.next += 1;
        let cell = Cell { owner: concept, segments: vec![ObjectSegment { concept, fields }] };
        self.cells.insert(self.next, cell);
        Handle(self.next)
    }

    /// Adds a co-located segment to an existing allocation.
    pub fn attach(&mut self, h: Handle, concept: ConceptId, fields: IndexMap<String, Value>) -> Result<(), HeapError> {
        let cell = self.cell_mut(h)?;
        cell.segments.retain(|s| s.concept != concept);
        cell.segments.push(ObjectSegment { concept, fields });
        Ok(())
    }

    pub fn detach(&mut self, h: Handle, concept: ConceptId) -> Result<(), HeapError> {
        let cell = self.cell_mut(h)?;
        let before = cell.segments.len();
        cell.segments.retain(|s| s.concept != concept);
        if cell.segments.len() == before {
            return Err(HeapError::MissingSegment(h));
        }
        Ok(())
    }

    pub fn free(&mut self, h: Handle) -> Result<(), HeapError> {
        self.cells.remove(&h.0).map(|_| ()).ok_or(HeapError::Dangling(h))
    }

    /// The segment of the concept that allocated `h`.
    pub fn get(&self, h: Handle) -> Result<&ObjectSegment, HeapError> {
        let cell = self.cells.get(&h.0).ok_or(HeapError::Dangling(h))?;
        Ok(&cell.segments[0])
    }

    pub fn segment(&self, h: Handle, concept: ConceptId) -> Result<&ObjectSegment, HeapError> {
        let cell = self.cells.get(&h.0).ok_or(HeapError::Dangling(h))?;
        cell.segments.iter().find(|s| s.concept == concept).ok_or(HeapError::MissingSegment(h))
    }

    pub fn segment_mut(&mut self, h: Handle, concept: ConceptId) -> Result<&mut ObjectSegment, HeapError> {
        let cell = self.cell_mut(h)?;
        cell.segments.iter_mut().find(|s| s.concept == concept).ok_or(HeapError::MissingSegment(h))
    }

    pub fn owner(&self, h: Handle) -> Result<ConceptId, HeapError> {
        self.cells.get(&h.0).map(|c| c.owner).ok_or(HeapError::Dangling(h))
    }

    pub fn is_live(&self, h: Handle) -> bool {
        self.cells.contains_key(&h.0)
    }

    pub fn live_count(&self) -> usize {
        self.cells.len()
    }

    /// Total allocations ever made.
    pub fn allocations(&self) -> u64 {
        self.next
    }

    fn cell_mut(&mut self, h: Handle) -> Result<&mut Cell, HeapError> {
        self.cells.get_mut(&h.0).ok_or(HeapError::Dangling(h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn c(n: u32) -> ConceptId {
        ConceptId(n)
    }

    #[test]
    fn alloc_get_free() {
        let mut heap = Heap::new();
        let h = heap.alloc(c(1), IndexMap::from([("balance".to_string(), Value::Double(10.0))]));
        assert_eq!(heap.get(h).unwrap().fields["balance"], Value::Double(10.0));
        heap.free(h).unwrap();
        assert_eq!(heap.get(h), Err(HeapError::Dangling(h)));
        assert_eq!(heap.free(h), Err(HeapError::Dangling(h)));
    }

    #[test]
    fn handles_are_never_reused() {
        let mut heap = Heap::new();
        let mut seen = HashSet::new();
        for _ in 0..100_000 {
            let h = heap.alloc(c(1), IndexMap::new());
            assert!(seen.insert(h));
            heap.free(h).unwrap();
        }
        assert_eq!(heap.live_count(), 0);
    }

    #[test]
    fn co_located_segments() {
        let mut heap = Heap::new();
        let h = heap.alloc(c(1), IndexMap::new());
        heap.attach(h, c(2), IndexMap::new()).unwrap();
        assert!(heap.segment(h, c(2)).is_ok());
        assert_eq!(heap.owner(h), Ok(c(1)));
        heap.detach(h, c(2)).unwrap();
        assert_eq!(heap.segment(h, c(2)), Err(HeapError::MissingSegment(h)));
    }
}
