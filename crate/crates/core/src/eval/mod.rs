//! Tree-walking evaluator and the access protocol.
//!
//! Every method call, field access, creation and deletion on a reference
//! opens an access request. Its reference phase runs reference methods from
//! the first segment downward; its meta-transition resolves segments through
//! their continuations, pushing one context-stack entry per segment; its
//! object phase dispatches to the most specific object method.

mod access;
mod exec;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use indexmap::IndexMap;

use crate::error::{Diagnostic, RuntimeError, RuntimeErrorKind, Severity};
use crate::refops::{self, RefOpError, RefView};
use crate::runtime::{ComplexReference, ContextStack, Heap, ReferenceSegment, Value};
use crate::semantics::{Analyzed, ConceptId, ConceptTable};
use crate::syntax::ast::{ContextRef, MethodDecl, Program, Span, TypeName, TypeRef};

use access::{Request, Seed};

type Result<T> = std::result::Result<T, RuntimeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Evaluation steps before `FuelExhausted`.
    pub max_steps: u64,
    /// Nested method calls before `CallDepthExceeded`.
    pub max_depth: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_steps: 10_000_000, max_depth: 200 }
    }
}

/// Instrumentation counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    /// Continuation executions: user `continue` methods plus built-in
    /// resolutions of segments without reference fields.
    pub continuations: u64,
    pub continuations_by_concept: BTreeMap<String, u64>,
    pub requests: u64,
    pub steps: u64,
    /// References stored into typed slots and checked for concept ordering.
    pub references_checked: u64,
    pub ordering_violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Flow {
    Normal,
    Return(Value),
}

/// Runtime form of a declared type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TypeKind {
    Void,
    Double,
    Bool,
    Str,
    Map,
    Handle,
    Ref { concept: ConceptId, context: ConceptId },
}

#[derive(Debug, Clone)]
pub(crate) struct Binding {
    kind: TypeKind,
    value: Value,
    /// Context reference captured from `ctxVar : Type name`.
    explicit_context: Option<ComplexReference>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Special {
    None,
    /// Resolution; `proceeds` is false when crossing only prepares a deletion.
    Continue { proceeds: bool },
    Create,
    Delete,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum FrameKind {
    TopLevel,
    Function,
    Reference { req: usize, seg: usize, special: Special },
    Object { req: usize, entry: usize, special: Special },
}

#[derive(Debug, Default)]
pub(crate) struct Scope {
    vars: IndexMap<String, Binding>,
    /// Request of the context block that opened this scope.
    context: Option<usize>,
}

#[derive(Debug)]
pub(crate) struct Frame {
    kind: FrameKind,
    scopes: Vec<Scope>,
}

/// A storage location a name or member expression denotes.
#[derive(Debug, Clone)]
pub(crate) enum Place {
    Local { frame: usize, scope: usize, name: String },
    Global(String),
    RefField { req: usize, seg: usize, name: String },
    ObjField { req: usize, entry: usize, name: String },
    /// An object field seen from a reference method; reading it triggers the
    /// meta-transition.
    ObjViaMeta { req: usize, entry: usize, name: String },
}

pub struct Interpreter<'a> {
    program: &'a Program,
    table: &'a ConceptTable,
    config: Config,
    heap: Heap,
    globals: IndexMap<String, Binding>,
    frames: Vec<Frame>,
    /// Frame used for lexical lookups; differs from the top frame while a
    /// context-block body runs inside its resolution.
    active: usize,
    requests: Vec<Request<'a>>,
    out: &'a mut dyn Write,
    trace: Option<&'a mut dyn Write>,
    stats: Stats,
    warnings: Vec<Diagnostic>,
    warned: HashSet<(String, u32, u32)>,
    statics_ready: bool,
}

impl<'a> Interpreter<'a> {
    pub fn new(
        analyzed: &'a Analyzed,
        out: &'a mut dyn Write,
        trace: Option<&'a mut dyn Write>,
        config: Config,
    ) -> Self {
        Interpreter {
            program: &analyzed.program,
            table: &analyzed.table,
            config,
            heap: Heap::new(),
            globals: IndexMap::new(),
            frames: vec![Frame { kind: FrameKind::TopLevel, scopes: vec![Scope::default()] }],
            active: 0,
            requests: vec![],
            out,
            trace,
            stats: Stats::default(),
            warnings: vec![],
            warned: HashSet::new(),
            statics_ready: false,
        }
    }

    /// Initializes statics, then runs the top-level statements in order.
    pub fn run(&mut self) -> Result<()> {
        self.init_statics()?;
        let program = self.program;
        let flow = self.exec_stmts(&program.statements)?;
        let _ = flow;
        self.out.flush().map_err(|e| RuntimeErrorKind::Io(e.to_string()))?;
        Ok(())
    }

    pub fn init_statics(&mut self) -> Result<()> {
        if self.statics_ready {
            return Ok(());
        }
        self.statics_ready = true;
        let program = self.program;
        for decl in &program.statics {
            let binding = self.new_binding(&decl.ty, decl.init.as_ref())?;
            self.globals.insert(decl.name.clone(), binding);
        }
        Ok(())
    }

    pub fn table(&self) -> &ConceptTable {
        self.table
    }

    pub fn heap(&self) -> &Heap {
        &self.heap
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = Stats::default();
    }

    /// Runtime warnings such as context-block shadowing.
    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    /// A top-level variable or static after `run`.
    pub fn variable(&self, name: &str) -> Option<&Value> {
        self.frames[0]
            .scopes
            .iter()
            .rev()
            .find_map(|s| s.vars.get(name))
            .or_else(|| self.globals.get(name))
            .map(|b| &b.value)
    }

    /// Invokes `method` on a global reference from outside any access.
    pub fn invoke(&mut self, target: &ComplexReference, method: &str, args: Vec<Value>) -> Result<Value> {
        let (v, _) = self.invoke_reference(target.clone(), method, args, Seed::Fresh)?;
        Ok(v)
    }

    /// Creates a global reference of `concept`, like `new Concept(args)`.
    pub fn create(&mut self, concept: &str, args: Vec<Value>) -> Result<ComplexReference> {
        let id = self.concept_id(concept)?;
        let kind = TypeKind::Ref { concept: id, context: ConceptId::ROOT };
        self.create_reference(kind, None, &Value::Null, args)
    }

    pub fn delete(&mut self, target: &ComplexReference) -> Result<()> {
        self.delete_reference(target.clone(), Seed::Fresh)
    }

    /// Resolves every segment of `target` and returns the resulting stack.
    pub fn resolve(&mut self, target: &ComplexReference) -> Result<ContextStack> {
        self.resolve_reference(target.clone(), Seed::Fresh)
    }

    /// Calls a top-level function.
    pub fn call(&mut self, function: &str, args: Vec<Value>) -> Result<Value> {
        let program = self.program;
        let f = program.functions.iter().find(|f| f.name == function).ok_or_else(|| {
            RuntimeErrorKind::NoSuchMember { concept: "Root".into(), member: function.into() }
        })?;
        self.call_function(f, args)
    }

    fn concept_id(&self, name: &str) -> Result<ConceptId> {
        self.table.id(name).ok_or_else(|| {
            RuntimeErrorKind::NoSuchMember { concept: "Root".into(), member: name.into() }.into()
        })
    }

    fn name(&self, c: ConceptId) -> String {
        self.table.name(c).to_string()
    }

    // ---- bookkeeping -------------------------------------------------------

    fn tick(&mut self) -> Result<()> {
        self.stats.steps += 1;
        if self.stats.steps > self.config.max_steps {
            return Err(RuntimeErrorKind::FuelExhausted(self.config.max_steps).into());
        }
        Ok(())
    }

    fn emit_trace(&mut self, line: std::fmt::Arguments<'_>) -> Result<()> {
        if let Some(t) = self.trace.as_mut() {
            writeln!(t, "{line}").map_err(|e| RuntimeErrorKind::Io(e.to_string()))?;
        }
        Ok(())
    }

    fn warn(&mut self, code: &str, message: String, span: Span) {
        let key = (code.to_string() + &message, span.line, span.column);
        if self.warned.insert(key) {
            self.warnings.push(Diagnostic {
                severity: Severity::Warning,
                code: code.into(),
                message,
                span: Some(span),
                notes: vec![],
            });
        }
    }

    fn count_continuation(&mut self, concept: ConceptId) {
        self.stats.continuations += 1;
        *self.stats.continuations_by_concept.entry(self.name(concept)).or_default() += 1;
    }

    // ---- frames ------------------------------------------------------------

    /// Runs `body` in a new frame and converts the returned value to `ret`.
    fn call_body(&mut self, kind: FrameKind, method: &'a MethodDecl, args: Vec<Value>) -> Result<Value> {
        if method.params.len() != args.len() {
            return Err(RuntimeErrorKind::ArityMismatch {
                name: method.name.clone(),
                expected: method.params.len(),
                found: args.len(),
            }
            .into());
        }
        if self.frames.len() >= self.config.max_depth {
            return Err(RuntimeErrorKind::CallDepthExceeded(self.config.max_depth).into());
        }
        let mut scope = Scope::default();
        for (p, v) in method.params.iter().zip(args) {
            let kind = self.type_kind(&p.ty)?.0;
            let value = self.coerce(kind, v)?;
            scope.vars.insert(p.name.clone(), Binding { kind, value, explicit_context: None });
        }
        self.frames.push(Frame { kind, scopes: vec![scope] });
        let saved = self.active;
        self.active = self.frames.len() - 1;
        let result = self.exec_stmts(&method.body);
        self.frames.pop();
        self.active = saved;
        let value = match result? {
            Flow::Return(v) => v,
            Flow::Normal => Value::Null,
        };
        let kind = self.type_kind(&method.ret)?.0;
        self.coerce(kind, value)
    }

    fn call_function(&mut self, f: &'a MethodDecl, args: Vec<Value>) -> Result<Value> {
        self.call_body(FrameKind::Function, f, args)
    }

    fn frame_kind(&self) -> FrameKind {
        self.frames[self.active].kind
    }

    // ---- types and bindings ------------------------------------------------

    /// Runtime kind of a declared type plus the context reference captured
    /// when the context is a variable.
    fn type_kind(&self, ty: &TypeRef) -> Result<(TypeKind, Option<ComplexReference>)> {
        let kind = match &ty.name {
            TypeName::Void => TypeKind::Void,
            TypeName::Double => TypeKind::Double,
            TypeName::Boolean => TypeKind::Bool,
            TypeName::Str => TypeKind::Str,
            TypeName::Map => TypeKind::Map,
            TypeName::Root => TypeKind::Handle,
            TypeName::Concept(name) => {
                let concept = self.concept_id(name)?;
                return match &ty.context {
                    None => Ok((TypeKind::Ref { concept, context: ConceptId::ROOT }, None)),
                    Some(ContextRef::Concept(c)) | Some(ContextRef::Unresolved(c)) => {
                        Ok((TypeKind::Ref { concept, context: self.concept_id(c)? }, None))
                    }
                    Some(ContextRef::Variable(v)) => {
                        let place = self.lookup(v, Span::default())?;
                        let TypeKind::Ref { concept: ctx, .. } = self.place_kind(&place)? else {
                            return Err(RuntimeErrorKind::RuntimeTypeError(format!(
                                "context variable `{v}` is not a reference"
                            ))
                            .into());
                        };
                        let explicit = self.place_reference(&place)?;
                        Ok((TypeKind::Ref { concept, context: ctx }, explicit))
                    }
                };
            }
        };
        Ok((kind, None))
    }

    fn default_value(kind: TypeKind) -> Value {
        match kind {
            TypeKind::Double => Value::Double(0.0),
            TypeKind::Bool => Value::Bool(false),
            _ => Value::Null,
        }
    }

    fn new_binding(&mut self, ty: &TypeRef, init: Option<&crate::syntax::ast::Expr>) -> Result<Binding> {
        let (kind, explicit_context) = self.type_kind(ty)?;
        let value = match init {
            Some(e) => {
                let v = self.eval(e)?;
                self.coerce(kind, v)?
            }
            None => Self::default_value(kind),
        };
        Ok(Binding { kind, value, explicit_context })
    }

    /// Converts `v` for storage in a slot of `kind`. References are left-cast
    /// to the slot's context and checked against its concept.
    fn coerce(&mut self, kind: TypeKind, v: Value) -> Result<Value> {
        let ok = match (kind, &v) {
            (TypeKind::Void, _) => true,
            (TypeKind::Double, Value::Double(_)) | (TypeKind::Bool, Value::Bool(_)) => true,
            (TypeKind::Str | TypeKind::Map | TypeKind::Handle | TypeKind::Ref { .. }, Value::Null) => true,
            (TypeKind::Str, Value::Str(_)) | (TypeKind::Map, Value::Map(_)) | (TypeKind::Handle, Value::Handle(_)) => {
                true
            }
            (TypeKind::Ref { concept, context }, Value::Ref(r)) => {
                let r = if r.context == context {
                    r.clone()
                } else {
                    let implicit = self.implicit_reference();
                    refops::left_cast(self.table, context, r, implicit.as_ref())?
                };
                if !r.is_empty() {
                    self.stats.references_checked += 1;
                    if !RefView::of(concept, &r).ordering_holds(self.table, true) {
                        self.stats.ordering_violations += 1;
                    }
                    if !self.table.is_ancestor_or_self(concept, r.instance_of()) {
                        return Err(RuntimeErrorKind::RuntimeTypeError(format!(
                            "cannot store a `{}` reference in a `{}` slot",
                            self.name(r.instance_of()),
                            self.name(concept)
                        ))
                        .into());
                    }
                }
                return Ok(Value::Ref(r));
            }
            _ => false,
        };
        if ok {
            Ok(v)
        } else {
            Err(RuntimeErrorKind::RuntimeTypeError(format!(
                "expected {}, found {}",
                kind_name(kind, self.table),
                v.type_name()
            ))
            .into())
        }
    }

    // ---- name lookup -------------------------------------------------------

    /// Finds the place `name` denotes in the active frame: block-local
    /// variables, context-block object members, the enclosing method's
    /// members, then statics.
    fn lookup(&self, name: &str, span: Span) -> Result<Place> {
        let _ = span;
        let frame = &self.frames[self.active];
        for (i, scope) in frame.scopes.iter().enumerate().rev() {
            if scope.vars.contains_key(name) {
                return Ok(Place::Local { frame: self.active, scope: i, name: name.into() });
            }
            if let Some(req) = scope.context {
                if let Some(entry) = self.find_obj_field(req, None, name) {
                    return Ok(Place::ObjField { req, entry, name: name.into() });
                }
            }
        }
        match self.member_place(name) {
            // Reference code sits outside the object: statics win over its fields.
            Some(Place::ObjViaMeta { .. }) if self.globals.contains_key(name) => {
                return Ok(Place::Global(name.into()));
            }
            Some(p) => return Ok(p),
            None => {}
        }
        if self.globals.contains_key(name) {
            return Ok(Place::Global(name.into()));
        }
        Err(RuntimeErrorKind::NoSuchMember { concept: "Root".into(), member: name.into() }.into())
    }

    /// Like `lookup`, but warns when a context-block member hides an outer name.
    fn lookup_warn(&mut self, name: &str, span: Span) -> Result<Place> {
        let place = self.lookup(name, span)?;
        if let Place::ObjField { .. } = place {
            let frame = &self.frames[self.active];
            let hidden = frame.scopes.iter().any(|s| s.vars.contains_key(name))
                || self.member_place(name).is_some()
                || self.globals.contains_key(name);
            let in_block = frame.scopes.iter().any(|s| s.context.is_some());
            if hidden && in_block {
                self.warn(
                    "ShadowedName",
                    format!("context object member `{name}` hides an outer name"),
                    span,
                );
            }
        }
        Ok(place)
    }

    /// Members of the concept whose method the active frame runs.
    fn member_place(&self, name: &str) -> Option<Place> {
        match self.frames[self.active].kind {
            FrameKind::Reference { req, seg, .. } => {
                let r = &self.requests[req];
                let concept = r.target.segments[seg].concept;
                let info = self.table.get(concept);
                if info.ref_field(name).is_some() {
                    Some(Place::RefField { req, seg, name: name.into() })
                } else if info.obj_field(name).is_some() {
                    Some(Place::ObjViaMeta { req, entry: r.base + seg, name: name.into() })
                } else {
                    None
                }
            }
            FrameKind::Object { req, entry, .. } => {
                self.find_obj_field(req, Some(entry + 1), name).map(|e| Place::ObjField { req, entry: e, name: name.into() })
            }
            FrameKind::TopLevel | FrameKind::Function => None,
        }
    }

    /// Highest stack entry below `limit` whose concept declares object field `name`.
    fn find_obj_field(&self, req: usize, limit: Option<usize>, name: &str) -> Option<usize> {
        let stack = &self.requests[req].stack;
        let top = limit.unwrap_or(stack.len()).min(stack.len());
        (0..top).rev().find(|&e| self.table.get(stack.entries()[e].concept).obj_field(name).is_some())
    }

    fn binding(&self, place: &Place) -> Option<&Binding> {
        match place {
            Place::Local { frame, scope, name } => self.frames[*frame].scopes[*scope].vars.get(name),
            Place::Global(name) => self.globals.get(name),
            _ => None,
        }
    }

    fn binding_mut(&mut self, place: &Place) -> Option<&mut Binding> {
        match place {
            Place::Local { frame, scope, name } => self.frames[*frame].scopes[*scope].vars.get_mut(name),
            Place::Global(name) => self.globals.get_mut(name),
            _ => None,
        }
    }

    /// Declared type of the slot behind `place`.
    fn place_kind(&self, place: &Place) -> Result<TypeKind> {
        if let Some(b) = self.binding(place) {
            return Ok(b.kind);
        }
        let ty = match place {
            Place::RefField { req, seg, name } => {
                let c = self.requests[*req].target.segments[*seg].concept;
                &self.table.get(c).ref_field(name).expect("declared field").ty
            }
            Place::ObjField { req, entry, name } | Place::ObjViaMeta { req, entry, name } => {
                let c = self.requests[*req].stack_concept(*entry);
                &self.table.get(c).obj_field(name).expect("declared field").ty
            }
            _ => unreachable!("bindings handled above"),
        };
        Ok(self.type_kind(ty)?.0)
    }

    /// The reference stored at `place`, extended by the binding's explicit
    /// context when it has one.
    fn place_reference(&self, place: &Place) -> Result<Option<ComplexReference>> {
        let Some(b) = self.binding(place) else {
            return Ok(None);
        };
        let Value::Ref(r) = &b.value else {
            return Ok(None);
        };
        match &b.explicit_context {
            Some(ctx) if !r.is_global() => Ok(Some(refops::concat(self.table, ctx, r)?)),
            _ => Ok(Some(r.clone())),
        }
    }

    fn read_place(&mut self, place: &Place) -> Result<Value> {
        if let Some(b) = self.binding(place) {
            return Ok(b.value.clone());
        }
        match place {
            Place::RefField { req, seg, name } => {
                let r = &self.requests[*req];
                let s = &r.target.segments[*seg];
                match s.fields.get(name) {
                    Some(Some(v)) => Ok(v.clone()),
                    _ => Err(RuntimeErrorKind::UnsetField { concept: self.name(s.concept), field: name.clone() }.into()),
                }
            }
            Place::ObjField { req, entry, name } => self.read_obj_field(*req, *entry, name),
            Place::ObjViaMeta { req, entry, name } if *entry < self.requests[*req].stack.len() => {
                self.read_obj_field(*req, *entry, name)
            }
            Place::ObjViaMeta { req, entry, name } => {
                let inner = access::Inner::Read { entry: Some(*entry), name: name.clone() };
                match self.meta_transition(*req, inner)? {
                    Some(Flow::Return(v)) => Ok(v),
                    _ => Ok(Value::Null),
                }
            }
            _ => unreachable!("bindings handled above"),
        }
    }

    fn write_place(&mut self, place: &Place, value: Value) -> Result<()> {
        let kind = self.place_kind(place)?;
        let value = self.coerce(kind, value)?;
        if let Some(b) = self.binding_mut(place) {
            b.value = value;
            return Ok(());
        }
        match place {
            Place::RefField { req, seg, name } => {
                self.requests[*req].target.segments[*seg].fields.insert(name.clone(), Some(value));
                Ok(())
            }
            Place::ObjField { req, entry, name } => self.write_obj_field(*req, *entry, name, value),
            Place::ObjViaMeta { req, entry, name } if *entry < self.requests[*req].stack.len() => {
                self.write_obj_field(*req, *entry, name, value)
            }
            Place::ObjViaMeta { req, entry, name } => {
                let inner = access::Inner::Write { entry: Some(*entry), name: name.clone(), value };
                self.meta_transition(*req, inner)?;
                Ok(())
            }
            _ => unreachable!("bindings handled above"),
        }
    }

    fn read_obj_field(&self, req: usize, entry: usize, name: &str) -> Result<Value> {
        let e = self.requests[req].stack.entries()[entry];
        let seg = self.heap.segment(e.handle, e.concept)?;
        seg.fields.get(name).cloned().ok_or_else(|| {
            RuntimeErrorKind::NoSuchMember { concept: self.name(e.concept), member: name.into() }.into()
        })
    }

    fn write_obj_field(&mut self, req: usize, entry: usize, name: &str, value: Value) -> Result<()> {
        let e = self.requests[req].stack.entries()[entry];
        let seg = self.heap.segment_mut(e.handle, e.concept)?;
        seg.fields.insert(name.into(), value);
        Ok(())
    }

    /// Object field values for a fresh segment of `concept`.
    fn object_fields(&mut self, concept: ConceptId) -> Result<IndexMap<String, Value>> {
        let table = self.table;
        let mut fields = IndexMap::new();
        for f in &table.get(concept).obj_fields {
            self.frames.push(Frame { kind: FrameKind::Function, scopes: vec![Scope::default()] });
            let saved = self.active;
            self.active = self.frames.len() - 1;
            let b = self.new_binding(&f.ty, f.init.as_ref());
            self.frames.pop();
            self.active = saved;
            fields.insert(f.name.clone(), b?.value);
        }
        Ok(fields)
    }

    /// Reference segment for `concept` with initializer or default values.
    fn reference_segment(&mut self, concept: ConceptId) -> Result<ReferenceSegment> {
        let table = self.table;
        let mut fields = IndexMap::new();
        for f in &table.get(concept).ref_fields {
            let b = self.new_binding(&f.ty, f.init.as_ref())?;
            fields.insert(f.name.clone(), Some(b.value));
        }
        Ok(ReferenceSegment { concept, fields })
    }

    // ---- dynamic context ---------------------------------------------------

    /// Requests visible from the active frame, innermost first.
    fn context_requests(&self) -> Vec<usize> {
        let frame = &self.frames[self.active];
        let mut out: Vec<usize> = frame.scopes.iter().rev().filter_map(|s| s.context).collect();
        match frame.kind {
            FrameKind::Reference { req, .. } | FrameKind::Object { req, .. } => out.push(req),
            FrameKind::TopLevel | FrameKind::Function => {}
        }
        out
    }

    /// Full chain of the innermost current context, used to extend local references.
    fn implicit_reference(&self) -> Option<ComplexReference> {
        self.context_requests().first().map(|&r| self.requests[r].full_reference())
    }

    /// Innermost context-block request in the active frame.
    fn block_request(&self) -> Option<usize> {
        self.frames[self.active].scopes.iter().rev().find_map(|s| s.context)
    }
}

fn kind_name(kind: TypeKind, table: &ConceptTable) -> String {
    match kind {
        TypeKind::Void => "void".into(),
        TypeKind::Double => "double".into(),
        TypeKind::Bool => "boolean".into(),
        TypeKind::Str => "String".into(),
        TypeKind::Map => "Map".into(),
        TypeKind::Handle => "Root".into(),
        TypeKind::Ref { concept, .. } => table.name(concept).into(),
    }
}

fn at(mut e: RuntimeError, span: Span) -> RuntimeError {
    if e.span.is_none() {
        e.span = Some(span);
    }
    e
}

fn null_reference() -> RuntimeError {
    RuntimeErrorKind::RefOp(RefOpError::NullReference).into()
}
