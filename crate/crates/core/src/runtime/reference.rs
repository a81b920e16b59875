use indexmap::IndexMap;

use super::{Handle, Value};
use crate::semantics::{ConceptId, ConceptTable};

/// One concept's reference fields. `None` marks a field added by right-cast
/// extension that has not been assigned yet.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSegment {
    pub concept: ConceptId,
    pub fields: IndexMap<String, Option<Value>>,
}

impl ReferenceSegment {
    /// Segment with every declared field unset.
    pub fn unset(table: &ConceptTable, concept: ConceptId) -> Self {
        let fields = table.get(concept).ref_fields.iter().map(|f| (f.name.clone(), None)).collect();
        ReferenceSegment { concept, fields }
    }

    pub fn is_initialized(&self) -> bool {
        self.fields.values().all(Option::is_some)
    }
}

/// A sequence of nested reference segments below `context`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexReference {
    pub context: ConceptId,
    /// Root-level identity, used when the first segment inherits identity
    /// from Root (the plain object case).
    pub primitive: Option<Handle>,
    pub segments: Vec<ReferenceSegment>,
}

impl ComplexReference {
    pub fn empty(context: ConceptId) -> Self {
        ComplexReference { context, primitive: None, segments: vec![] }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_global(&self) -> bool {
        self.context == ConceptId::ROOT
    }

    /// Concept of the last segment; the context for an empty reference.
    pub fn instance_of(&self) -> ConceptId {
        self.segments.last().map_or(self.context, |s| s.concept)
    }

    pub fn position(&self, concept: ConceptId) -> Option<usize> {
        self.segments.iter().position(|s| s.concept == concept)
    }

    pub fn concepts(&self) -> impl Iterator<Item = ConceptId> + '_ {
        self.segments.iter().map(|s| s.concept)
    }

    /// Each segment's concept is the direct child of the previous one.
    pub fn is_well_formed(&self, table: &ConceptTable) -> bool {
        let mut parent = self.context;
        for s in &self.segments {
            if table.parent(s.concept) != Some(parent) {
                return false;
            }
            parent = s.concept;
        }
        true
    }

    /// Debug form, e.g. `<SavingsAccount:Root/Account(accNo=A1)/SavingsAccount>`.
    pub fn render(&self, table: &ConceptTable) -> String {
        let mut out = format!("<{}:{}", table.name(self.instance_of()), table.name(self.context));
        for s in &self.segments {
            out.push('/');
            out.push_str(table.name(s.concept));
            if !s.fields.is_empty() {
                let fields: Vec<String> = s
                    .fields
                    .iter()
                    .map(|(k, v)| match v {
                        Some(v) => format!("{k}={}", v.render(table)),
                        None => format!("{k}=?"),
                    })
                    .collect();
                out.push_str(&format!("({})", fields.join(",")));
            }
        }
        out.push('>');
        out
    }
}
