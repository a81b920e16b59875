//! Reference algebra. All operations are pure; operands are never mutated.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::runtime::{ComplexReference, ReferenceSegment};
use crate::semantics::{ConceptId, ConceptTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefOpError {
    #[error("operation on a null reference")]
    NullReference,
    #[error("`{0}` and `{1}` are unrelated")]
    CastUnrelated(String, String),
    #[error("no context value available for segment `{0}`")]
    MissingContextValues(String),
    #[error("result is not a well-formed reference: {0}")]
    IllFormedResult(String),
}

impl RefOpError {
    pub fn code(&self) -> &'static str {
        match self {
            RefOpError::NullReference => "NullReference",
            RefOpError::CastUnrelated(..) => "CastUnrelated",
            RefOpError::MissingContextValues(_) => "MissingContextValues",
            RefOpError::IllFormedResult(_) => "IllFormedResult",
        }
    }
}

pub fn length(a: &ComplexReference) -> usize {
    a.len()
}

pub fn instanceof(a: &ComplexReference) -> ConceptId {
    a.instance_of()
}

pub fn contextof(a: &ComplexReference) -> ConceptId {
    a.context
}

/// `L : a`. Extension takes the missing head segments from `implicit`,
/// which must hold a segment for every concept between `l` and `contextof(a)`.
pub fn left_cast(
    table: &ConceptTable,
    l: ConceptId,
    a: &ComplexReference,
    implicit: Option<&ComplexReference>,
) -> Result<ComplexReference, RefOpError> {
    if l == a.context {
        return Ok(a.clone());
    }
    if table.is_strict_ancestor(l, a.context) {
        let needed = table.chain(l, a.context).expect("ancestor chain");
        let mut segments = Vec::with_capacity(needed.len() + a.len());
        for c in &needed {
            let seg = implicit
                .and_then(|imp| imp.position(*c).map(|i| imp.segments[i].clone()))
                .ok_or_else(|| RefOpError::MissingContextValues(table.name(*c).into()))?;
            segments.push(seg);
        }
        let primitive = implicit
            .filter(|imp| imp.context == l && imp.segments.first().map(|s| s.concept) == needed.first().copied())
            .and_then(|imp| imp.primitive);
        segments.extend(a.segments.iter().cloned());
        return Ok(ComplexReference { context: l, primitive, segments });
    }
    if let Some(i) = a.position(l) {
        return Ok(ComplexReference { context: l, primitive: None, segments: a.segments[i + 1..].to_vec() });
    }
    Err(unrelated(table, l, a.instance_of()))
}

/// `a : R`. Truncates to an ancestor or appends unset segments down to a descendant.
pub fn right_cast(table: &ConceptTable, a: &ComplexReference, r: ConceptId) -> Result<ComplexReference, RefOpError> {
    let actual = a.instance_of();
    if r == actual {
        return Ok(a.clone());
    }
    if r == a.context {
        return Ok(ComplexReference::empty(a.context));
    }
    if let Some(i) = a.position(r) {
        let mut out = a.clone();
        out.segments.truncate(i + 1);
        return Ok(out);
    }
    if table.is_strict_ancestor(actual, r) {
        let mut out = a.clone();
        for c in table.chain(actual, r).expect("descendant chain") {
            out.segments.push(ReferenceSegment::unset(table, c));
        }
        return Ok(out);
    }
    Err(unrelated(table, actual, r))
}

/// Segments whose concepts occur in both operands, values from `a`.
pub fn intersect(table: &ConceptTable, a: &ComplexReference, b: &ComplexReference) -> Result<ComplexReference, RefOpError> {
    require_one_chain(table, a, b)?;
    let in_b: BTreeSet<ConceptId> = b.concepts().collect();
    let segments: Vec<ReferenceSegment> = a.segments.iter().filter(|s| in_b.contains(&s.concept)).cloned().collect();
    let Some(first) = segments.first() else {
        return Ok(ComplexReference::empty(a.context));
    };
    let context = table.parent(first.concept).expect("non-root segment");
    let primitive = if a.segments[0].concept == first.concept { a.primitive } else { None };
    finish(table, ComplexReference { context, primitive, segments })
}

/// All segments of both operands; on overlap the values come from `b`.
pub fn union(table: &ConceptTable, a: &ComplexReference, b: &ComplexReference) -> Result<ComplexReference, RefOpError> {
    require_one_chain(table, a, b)?;
    let mut segments: Vec<ReferenceSegment> = b.segments.clone();
    for s in &a.segments {
        if b.position(s.concept).is_none() {
            segments.push(s.clone());
        }
    }
    segments.sort_by_key(|s| table.depth(s.concept));
    let Some(first) = segments.first() else {
        return Ok(ComplexReference::empty(a.context));
    };
    let context = table.parent(first.concept).expect("non-root segment");
    let primitive = [b, a]
        .into_iter()
        .find(|r| r.segments.first().map(|s| s.concept) == Some(first.concept))
        .and_then(|r| r.primitive);
    finish(table, ComplexReference { context, primitive, segments })
}

/// Copies the source segments that `target` also has. Disjoint operands
/// leave the target unchanged.
pub fn assign(target: &ComplexReference, source: &ComplexReference) -> ComplexReference {
    let mut out = target.clone();
    for seg in &mut out.segments {
        if let Some(i) = source.position(seg.concept) {
            seg.fields = source.segments[i].fields.clone();
        }
    }
    let same_head = match (target.segments.first(), source.segments.first()) {
        (Some(t), Some(s)) => t.concept == s.concept,
        _ => false,
    };
    if same_head && target.context == source.context && source.primitive.is_some() {
        out.primitive = source.primitive;
    }
    out
}

/// `a : b`, the right cast of `a` to `instanceof(b)` followed by assigning `b`.
pub fn concat(table: &ConceptTable, a: &ComplexReference, b: &ComplexReference) -> Result<ComplexReference, RefOpError> {
    if !table.related(a.instance_of(), b.context) {
        return Err(unrelated(table, a.instance_of(), b.context));
    }
    let widened = right_cast(table, a, b.instance_of())?;
    Ok(assign(&widened, b))
}

/// The three concepts a variable exposes through `contextof`, `conceptof`
/// and `instanceof`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefView {
    pub context: ConceptId,
    pub declared: ConceptId,
    pub actual: ConceptId,
}

impl RefView {
    pub fn of(declared: ConceptId, r: &ComplexReference) -> Self {
        RefView { context: r.context, declared, actual: r.instance_of() }
    }

    /// `contextof > instanceof` for nonempty references and `conceptof >= instanceof`.
    pub fn ordering_holds(&self, table: &ConceptTable, nonempty: bool) -> bool {
        let context_ok = !nonempty || table.is_strict_ancestor(self.context, self.actual);
        context_ok && table.is_ancestor_or_self(self.declared, self.actual)
    }
}

fn unrelated(table: &ConceptTable, a: ConceptId, b: ConceptId) -> RefOpError {
    RefOpError::CastUnrelated(table.name(a).into(), table.name(b).into())
}

fn require_one_chain(table: &ConceptTable, a: &ComplexReference, b: &ComplexReference) -> Result<(), RefOpError> {
    let all: Vec<ConceptId> = a.concepts().chain(b.concepts()).collect();
    for (i, &x) in all.iter().enumerate() {
        for &y in &all[i + 1..] {
            if !table.related(x, y) {
                return Err(RefOpError::IllFormedResult(format!(
                    "`{}` and `{}` lie on different branches",
                    table.name(x),
                    table.name(y)
                )));
            }
        }
    }
    Ok(())
}

fn finish(table: &ConceptTable, r: ComplexReference) -> Result<ComplexReference, RefOpError> {
    for pair in r.segments.windows(2) {
        if table.parent(pair[1].concept) != Some(pair[0].concept) {
            return Err(RefOpError::IllFormedResult(format!(
                "gap between `{}` and `{}`",
                table.name(pair[0].concept),
                table.name(pair[1].concept)
            )));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::Value;
    use crate::semantics::analyze;
    use crate::syntax::{parse, tokenize};
    use indexmap::IndexMap;

    fn table() -> ConceptTable {
        let src = "concept A reference { double a; void continue() {} }\n\
                   concept B in A reference { double b; void continue() {} }\n\
                   concept C in B reference { double c; void continue() {} }\n\
                   concept D in A";
        analyze(parse(&tokenize(src).unwrap()).unwrap()).unwrap().table
    }

    fn seg(t: &ConceptTable, name: &str, v: f64) -> ReferenceSegment {
        let c = t.id(name).unwrap();
        let fields: IndexMap<String, Option<Value>> =
            t.get(c).ref_fields.iter().map(|f| (f.name.clone(), Some(Value::Double(v)))).collect();
        ReferenceSegment { concept: c, fields }
    }

    fn r(t: &ConceptTable, ctx: &str, names: &[&str], v: f64) -> ComplexReference {
        ComplexReference {
            context: t.id(ctx).unwrap(),
            primitive: None,
            segments: names.iter().map(|n| seg(t, n, v)).collect(),
        }
    }

    fn names(t: &ConceptTable, r: &ComplexReference) -> Vec<String> {
        r.concepts().map(|c| t.name(c).to_string()).collect()
    }

    #[test]
    fn structural_queries() {
        let t = table();
        let a = r(&t, "Root", &["A", "B", "C"], 1.0);
        assert_eq!(length(&a), 3);
        assert_eq!(instanceof(&a), t.id("C").unwrap());
        assert_eq!(contextof(&a), ConceptId::ROOT);
        let empty = ComplexReference::empty(t.id("B").unwrap());
        assert_eq!(length(&empty), 0);
        assert_eq!(instanceof(&empty), t.id("B").unwrap());
    }

    #[test]
    fn left_cast_extends_from_implicit_context() {
        let t = table();
        let local = r(&t, "A", &["B"], 2.0);
        let implicit = r(&t, "Root", &["A"], 7.0);
        let full = left_cast(&t, ConceptId::ROOT, &local, Some(&implicit)).unwrap();
        assert_eq!(names(&t, &full), ["A", "B"]);
        assert_eq!(full.segments[0], implicit.segments[0]);
        assert_eq!(
            left_cast(&t, ConceptId::ROOT, &local, None),
            Err(RefOpError::MissingContextValues("A".into()))
        );
    }

    #[test]
    fn left_cast_shortens_and_identity() {
        let t = table();
        let a = r(&t, "Root", &["A", "B", "C"], 1.0);
        let tail = left_cast(&t, t.id("A").unwrap(), &a, None).unwrap();
        assert_eq!(names(&t, &tail), ["B", "C"]);
        assert_eq!(left_cast(&t, ConceptId::ROOT, &a, None).unwrap(), a);
        assert!(matches!(left_cast(&t, t.id("D").unwrap(), &a, None), Err(RefOpError::CastUnrelated(..))));
    }

    #[test]
    fn right_cast_extends_with_unset_fields() {
        let t = table();
        let a = r(&t, "Root", &["A"], 1.0);
        let ext = right_cast(&t, &a, t.id("C").unwrap()).unwrap();
        assert_eq!(names(&t, &ext), ["A", "B", "C"]);
        assert!(!ext.segments[1].is_initialized());
        let head = right_cast(&t, &ext, t.id("A").unwrap()).unwrap();
        assert_eq!(names(&t, &head), ["A"]);
        assert!(right_cast(&t, &a, t.id("D").unwrap()).is_ok());
        let b = r(&t, "Root", &["A", "B"], 1.0);
        assert!(matches!(right_cast(&t, &b, t.id("D").unwrap()), Err(RefOpError::CastUnrelated(..))));
    }

    #[test]
    fn intersect_and_union() {
        let t = table();
        let ab = r(&t, "Root", &["A", "B"], 1.0);
        let bc = r(&t, "A", &["B", "C"], 2.0);
        let i = intersect(&t, &ab, &bc).unwrap();
        assert_eq!(names(&t, &i), ["B"]);
        assert_eq!(i.segments[0], ab.segments[1]);
        let u = union(&t, &ab, &bc).unwrap();
        assert_eq!(names(&t, &u), ["A", "B", "C"]);
        assert_eq!(u.segments[1], bc.segments[0]);
        let a = r(&t, "Root", &["A"], 1.0);
        let c = r(&t, "B", &["C"], 1.0);
        assert!(matches!(union(&t, &a, &c), Err(RefOpError::IllFormedResult(_))));
    }

    #[test]
    fn assign_overlap_only() {
        let t = table();
        let target = r(&t, "Root", &["A", "B"], 1.0);
        let source = r(&t, "Root", &["A"], 9.0);
        let out = assign(&target, &source);
        assert_eq!(out.segments[0], source.segments[0]);
        assert_eq!(out.segments[1], target.segments[1]);
        let disjoint = r(&t, "B", &["C"], 5.0);
        assert_eq!(assign(&target, &disjoint), target);
    }

    #[test]
    fn concat_builds_full_reference() {
        let t = table();
        let main = r(&t, "Root", &["A"], 1.0);
        let sub = r(&t, "A", &["B"], 2.0);
        let full = concat(&t, &main, &sub).unwrap();
        assert_eq!(names(&t, &full), ["A", "B"]);
        assert_eq!(full.segments[1], sub.segments[0]);
        let neutral = ComplexReference::empty(t.id("A").unwrap());
        assert_eq!(concat(&t, &main, &neutral).unwrap(), main);
    }
}
