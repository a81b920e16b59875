//! Access requests: reference phase, meta-transition and life cycle.

use crate::error::RuntimeErrorKind;
use crate::refops;
use crate::runtime::{ComplexReference, ContextStack, Handle, ReferenceSegment, Value};
use crate::semantics::ConceptId;
use crate::syntax::ast::{MethodDecl, Stmt};

use super::{Flow, FrameKind, Interpreter, Result, Special, TypeKind};

/// Work performed once every segment has been resolved.
#[derive(Debug)]
pub(crate) enum Inner<'a> {
    Dispatch { name: String, args: Vec<Value> },
    /// `entry: None` searches the stack from the top.
    Read { entry: Option<usize>, name: String },
    Write { entry: Option<usize>, name: String, value: Value },
    Block { frame: usize, body: &'a [Stmt] },
    CreateFrom { index: usize, args: Vec<Value> },
    Nothing,
}

/// How a new request obtains already resolved segments.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Seed {
    /// Local targets borrow their context from the active access.
    Fresh,
    /// The first `count` target segments match the resolved bottom of `req`.
    Prefix { req: usize, count: usize },
}

#[derive(Debug)]
pub(crate) struct Request<'a> {
    pub(crate) label: String,
    pub(crate) target: ComplexReference,
    /// Segments above the target, borrowed from an enclosing access; the
    /// first `base` stack entries belong to them.
    pub(crate) context_segments: Vec<ReferenceSegment>,
    pub(crate) context_primitive: Option<Handle>,
    pub(crate) full_context: ConceptId,
    pub(crate) base: usize,
    pub(crate) stack: ContextStack,
    proceeded: Vec<bool>,
    /// Create and delete progress per segment.
    started: Vec<bool>,
    /// Target segments to resolve before the inner action runs.
    resolve_end: usize,
    resolving: bool,
    inner: Option<Inner<'a>>,
    inner_result: Option<Flow>,
}

impl Request<'_> {
    /// Context segments followed by target segments, rooted at `full_context`.
    pub(crate) fn full_reference(&self) -> ComplexReference {
        let mut segments = self.context_segments.clone();
        segments.extend(self.target.segments.iter().cloned());
        let primitive = if self.base == 0 { self.target.primitive } else { self.context_primitive };
        ComplexReference { context: self.full_context, primitive, segments }
    }

    pub(crate) fn stack_concept(&self, entry: usize) -> ConceptId {
        self.stack.entries()[entry].concept
    }

    fn crossed(&self, k: usize) -> bool {
        self.stack.len() > self.base + k
    }

    fn resolved(&self) -> usize {
        self.stack.len() - self.base
    }
}

impl<'a> Interpreter<'a> {
    // ---- request lifetime --------------------------------------------------

    pub(crate) fn open_request(
        &mut self,
        member: &str,
        target: ComplexReference,
        seed: Seed,
    ) -> Result<usize> {
        let label = format!("{}.{member}", self.name(target.instance_of()));
        let n = target.len();
        let mut req = Request {
            label,
            context_segments: vec![],
            context_primitive: None,
            full_context: target.context,
            base: 0,
            stack: ContextStack::new(),
            proceeded: vec![false; n],
            started: vec![false; n + 1],
            resolve_end: n,
            resolving: false,
            inner: None,
            inner_result: None,
            target,
        };
        match seed {
            Seed::Prefix { req: from, count } => {
                let src = &self.requests[from];
                req.stack = src.stack.prefix(count);
                req.full_context = src.full_context;
            }
            Seed::Fresh if !req.target.is_global() => {
                let context = req.target.context;
                let from = self
                    .context_requests()
                    .into_iter()
                    .find_map(|r| {
                        let src = &self.requests[r];
                        let full = src.full_reference();
                        full.position(context).filter(|&j| j < src.stack.len()).map(|j| (r, j, full))
                    })
                    .ok_or_else(|| refops::RefOpError::MissingContextValues(self.name(context)))?;
                let (from, j, full) = from;
                let src = &self.requests[from];
                req.stack = src.stack.prefix(j + 1);
                req.context_segments = full.segments[..=j].to_vec();
                req.context_primitive = full.primitive;
                req.full_context = full.context;
                req.base = j + 1;
            }
            Seed::Fresh => {}
        }
        self.stats.requests += 1;
        self.requests.push(req);
        Ok(self.requests.len() - 1)
    }

    fn close_request(&mut self, req: usize) -> Request<'a> {
        debug_assert_eq!(req + 1, self.requests.len(), "requests close in LIFO order");
        self.requests.pop().expect("open request")
    }

    /// Runs `f` on a new request and closes it, recording the access on errors.
    fn with_request<T>(
        &mut self,
        member: &str,
        target: ComplexReference,
        seed: Seed,
        f: impl FnOnce(&mut Self, usize) -> Result<T>,
    ) -> Result<(T, ComplexReference)> {
        if target.is_empty() {
            return Err(super::null_reference());
        }
        let req = self.open_request(member, target, seed)?;
        let result = f(self, req);
        let closed = self.close_request(req);
        match result {
            Ok(v) => Ok((v, closed.target)),
            Err(mut e) => {
                e.accesses.push(closed.label);
                Err(e)
            }
        }
    }

    // ---- entry points ------------------------------------------------------

    /// Full access: reference phase, then meta-transition and object phase.
    /// Returns the result and the target with any reference-field updates.
    pub(crate) fn invoke_reference(
        &mut self,
        target: ComplexReference,
        name: &str,
        args: Vec<Value>,
        seed: Seed,
    ) -> Result<(Value, ComplexReference)> {
        self.with_request(name, target, seed, |this, req| this.ref_phase(req, 0, name, args, false))
    }

    pub(crate) fn read_field(&mut self, target: ComplexReference, name: &str, seed: Seed) -> Result<Value> {
        let (v, _) = self.with_request(name, target, seed, |this, req| {
            this.require_obj_field(req, name)?;
            let inner = Inner::Read { entry: None, name: name.into() };
            Ok(match this.meta_transition(req, inner)? {
                Some(Flow::Return(v)) => v,
                _ => Value::Null,
            })
        })?;
        Ok(v)
    }

    pub(crate) fn write_field(&mut self, target: ComplexReference, name: &str, value: Value, seed: Seed) -> Result<()> {
        self.with_request(name, target, seed, |this, req| {
            this.require_obj_field(req, name)?;
            this.meta_transition(req, Inner::Write { entry: None, name: name.into(), value })?;
            Ok(())
        })?;
        Ok(())
    }

    pub(crate) fn resolve_reference(&mut self, target: ComplexReference, seed: Seed) -> Result<ContextStack> {
        let (stack, _) = self.with_request("continue", target, seed, |this, req| {
            this.meta_transition(req, Inner::Nothing)?;
            Ok(this.requests[req].stack.clone())
        })?;
        Ok(stack)
    }

    /// Resolves `target` and runs `body` inside it with the context object's
    /// members in scope.
    pub(crate) fn run_block(&mut self, target: ComplexReference, seed: Seed, body: &'a [Stmt]) -> Result<Flow> {
        let frame = self.active;
        let (flow, _) = self.with_request("block", target, seed, |this, req| {
            this.meta_transition(req, Inner::Block { frame, body })
        })?;
        Ok(flow.unwrap_or(Flow::Normal))
    }

    /// Runs the creation protocol for a slot of `kind`. An `existing` value
    /// whose leading segments are fully assigned keeps them; only the rest
    /// is created.
    pub(crate) fn create_reference(
        &mut self,
        kind: TypeKind,
        explicit_context: Option<&ComplexReference>,
        existing: &Value,
        args: Vec<Value>,
    ) -> Result<ComplexReference> {
        let TypeKind::Ref { concept, context } = kind else {
            return Err(RuntimeErrorKind::RuntimeTypeError("create on a non-reference slot".into()).into());
        };
        let chain = self.table.chain(context, concept).expect("checked by analysis");
        let mut kept = 0;
        let mut segments = Vec::with_capacity(chain.len());
        if let Value::Ref(old) = existing {
            if old.context == context && old.len() < chain.len() || old.segments.iter().any(|s| !s.is_initialized()) {
                for (s, c) in old.segments.iter().zip(&chain) {
                    if s.concept != *c || !s.is_initialized() {
                        break;
                    }
                    segments.push(s.clone());
                    kept += 1;
                }
            }
        }
        for &c in &chain[kept..] {
            segments.push(self.reference_segment(c)?);
        }
        let local = ComplexReference { context, primitive: None, segments };
        let (target, prefix) = match explicit_context {
            Some(ctx) => (refops::concat(self.table, ctx, &local)?, ctx.len() + kept),
            None => (local, kept),
        };
        let tail_len = chain.len();
        let label = self.name(concept);
        let _ = label;
        let (_, created) = self.with_request("create", target, Seed::Fresh, |this, req| {
            if prefix > 0 {
                this.requests[req].resolve_end = prefix;
                this.meta_transition(req, Inner::CreateFrom { index: prefix, args })?;
                Ok(())
            } else {
                this.create_from(req, 0, args)
            }
        })?;
        Ok(tail(created, tail_len, context))
    }

    pub(crate) fn delete_reference(&mut self, target: ComplexReference, seed: Seed) -> Result<()> {
        self.with_request("delete", target, seed, |this, req| this.delete_from(req, 0))?;
        Ok(())
    }

    // ---- reference phase ---------------------------------------------------

    /// Runs the first reference method `name` at or below segment `from`.
    /// Without one, the access crosses to the object side. `lenient` turns a
    /// missing member into a no-op, as for `sub.m()` past the last definition.
    pub(crate) fn ref_phase(&mut self, req: usize, from: usize, name: &str, args: Vec<Value>, lenient: bool) -> Result<Value> {
        let table = self.table;
        let n = self.requests[req].target.len();
        for j in from..n {
            let c = self.requests[req].target.segments[j].concept;
            if let Some(m) = table.ref_method(c, name) {
                return self.call_ref_method(req, j, m, args, Special::None);
            }
        }
        if !self.object_method_exists(req, name) {
            if lenient {
                return Ok(Value::Null);
            }
            let concept = self.name(self.requests[req].target.instance_of());
            return Err(RuntimeErrorKind::NoSuchMember { concept, member: name.into() }.into());
        }
        match self.meta_transition(req, Inner::Dispatch { name: name.into(), args })? {
            Some(Flow::Return(v)) => Ok(v),
            _ => Ok(Value::Null),
        }
    }

    fn object_method_exists(&self, req: usize, name: &str) -> bool {
        let r = &self.requests[req];
        r.context_segments.iter().chain(&r.target.segments).any(|s| self.table.obj_method(s.concept, name).is_some())
    }

    fn require_obj_field(&self, req: usize, name: &str) -> Result<()> {
        let r = &self.requests[req];
        if r.context_segments.iter().chain(&r.target.segments).any(|s| self.table.get(s.concept).obj_field(name).is_some()) {
            Ok(())
        } else {
            let concept = self.name(r.target.instance_of());
            Err(RuntimeErrorKind::NoSuchMember { concept, member: name.into() }.into())
        }
    }

    pub(crate) fn call_ref_method(
        &mut self,
        req: usize,
        seg: usize,
        m: &'a MethodDecl,
        args: Vec<Value>,
        special: Special,
    ) -> Result<Value> {
        let label = format!("{}.{}", self.name(self.requests[req].target.segments[seg].concept), m.name);
        self.emit_trace(format_args!("REF-ENTER {label}"))?;
        let v = self.call_body(FrameKind::Reference { req, seg, special }, m, args)?;
        self.emit_trace(format_args!("REF-EXIT {label}"))?;
        Ok(v)
    }

    pub(crate) fn call_obj_method(
        &mut self,
        req: usize,
        entry: usize,
        m: &'a MethodDecl,
        args: Vec<Value>,
        special: Special,
    ) -> Result<Value> {
        let label = format!("{}.{}", self.name(self.requests[req].stack_concept(entry)), m.name);
        self.emit_trace(format_args!("OBJ-ENTER {label}"))?;
        let v = self.call_body(FrameKind::Object { req, entry, special }, m, args)?;
        self.emit_trace(format_args!("OBJ-EXIT {label}"))?;
        Ok(v)
    }

    /// Most specific object method `name` among entries below `limit`.
    pub(crate) fn find_obj_method(&self, req: usize, limit: usize, name: &str) -> Option<(usize, &'a MethodDecl)> {
        let table = self.table;
        let stack = &self.requests[req].stack;
        (0..limit.min(stack.len()))
            .rev()
            .find_map(|e| table.obj_method(stack.entries()[e].concept, name).map(|m| (e, &**m)))
    }

    // ---- meta-transition ---------------------------------------------------

    /// Resolves the remaining segments of `req`, then runs `inner`. Returns
    /// `None` when an object continuation ended the access without proceeding.
    pub(crate) fn meta_transition(&mut self, req: usize, inner: Inner<'a>) -> Result<Option<Flow>> {
        let r = &mut self.requests[req];
        let done = r.resolved();
        if done >= r.resolve_end {
            r.inner = Some(inner);
            self.run_inner(req)?;
            return Ok(self.requests[req].inner_result.take());
        }
        if r.resolving {
            let concept = r.target.segments[done].concept;
            let concept = self.name(concept);
            return Err(RuntimeErrorKind::ResolutionFailed {
                concept,
                reason: "object accessed before its resolution completed".into(),
            }
            .into());
        }
        r.inner = Some(inner);
        r.resolving = true;
        let result = self.resolve_from(req, done);
        let r = &mut self.requests[req];
        r.resolving = false;
        r.inner = None;
        result?;
        Ok(r.inner_result.take())
    }

    /// Resolves segment `k` through its continuation; crossing into the
    /// object proceeds to `k + 1`, and past the last segment runs the inner action.
    fn resolve_from(&mut self, req: usize, k: usize) -> Result<()> {
        if k >= self.requests[req].resolve_end {
            return self.run_inner(req);
        }
        let table = self.table;
        let concept = self.requests[req].target.segments[k].concept;
        let info = table.get(concept);
        self.count_continuation(concept);
        if let Some(m) = info.ref_methods.get("continue").filter(|m| m.params.is_empty()) {
            self.call_ref_method(req, k, m, vec![], Special::Continue { proceeds: true })?;
            if !self.requests[req].crossed(k) {
                return Err(RuntimeErrorKind::ResolutionFailed {
                    concept: info.name.clone(),
                    reason: "continuation finished without crossing into the object".into(),
                }
                .into());
            }
            Ok(())
        } else if !info.has_custom_identity() {
            let h = self.inherited_handle(req, k)?;
            self.cross(req, k, h, true)
        } else {
            Err(RuntimeErrorKind::MissingContinuation(info.name.clone()).into())
        }
    }

    fn run_inner(&mut self, req: usize) -> Result<()> {
        let Some(inner) = self.requests[req].inner.take() else {
            return Ok(());
        };
        let flow = match inner {
            Inner::Dispatch { name, args } => {
                let top = self.requests[req].stack.len();
                let Some((e, m)) = self.find_obj_method(req, top, &name) else {
                    let concept = self.name(self.requests[req].target.instance_of());
                    return Err(RuntimeErrorKind::NoSuchMember { concept, member: name }.into());
                };
                Flow::Return(self.call_obj_method(req, e, m, args, Special::None)?)
            }
            Inner::Read { entry, name } => {
                let e = self.field_entry(req, entry, &name)?;
                Flow::Return(self.read_obj_field(req, e, &name)?)
            }
            Inner::Write { entry, name, value } => {
                let e = self.field_entry(req, entry, &name)?;
                let c = self.requests[req].stack_concept(e);
                let ty = &self.table.get(c).obj_field(&name).expect("declared field").ty;
                let kind = self.type_kind(ty)?.0;
                let value = self.coerce(kind, value)?;
                self.write_obj_field(req, e, &name, value)?;
                Flow::Normal
            }
            Inner::Block { frame, body } => self.exec_in_context(req, frame, body)?,
            Inner::CreateFrom { index, args } => {
                self.create_from(req, index, args)?;
                Flow::Normal
            }
            Inner::Nothing => Flow::Normal,
        };
        self.requests[req].inner_result = Some(flow);
        Ok(())
    }

    fn field_entry(&self, req: usize, entry: Option<usize>, name: &str) -> Result<usize> {
        match entry {
            Some(e) => Ok(e),
            None => self.find_obj_field(req, None, name).ok_or_else(|| {
                let concept = self.name(self.requests[req].target.instance_of());
                RuntimeErrorKind::NoSuchMember { concept, member: name.into() }.into()
            }),
        }
    }

    /// Handle of the identity a fieldless segment shares with its parent.
    fn inherited_handle(&self, req: usize, k: usize) -> Result<Handle> {
        let r = &self.requests[req];
        let concept = r.target.segments[k].concept;
        let h = if r.base + k == 0 {
            r.target.primitive
        } else {
            r.stack.get(r.base + k - 1).map(|e| e.handle)
        };
        h.ok_or_else(|| {
            RuntimeErrorKind::ResolutionFailed {
                concept: self.name(concept),
                reason: "reference has no identity to inherit".into(),
            }
            .into()
        })
    }

    /// Crosses into the object at `h` for segment `k`: pushes the stack
    /// entry, then runs the object continuation, which proceeds to the next
    /// segment when `proceeds` is set.
    pub(crate) fn cross(&mut self, req: usize, k: usize, h: Handle, proceeds: bool) -> Result<()> {
        let concept = self.requests[req].target.segments[k].concept;
        if self.requests[req].crossed(k) {
            return Err(RuntimeErrorKind::DoubleCrossing(self.name(concept)).into());
        }
        self.heap.segment(h, concept)?;
        self.push_entry(req, concept, h)?;
        let entry = self.requests[req].base + k;
        match self.table.obj_method(concept, "continue").filter(|m| m.params.is_empty()) {
            Some(m) => {
                self.call_obj_method(req, entry, m, vec![], Special::Continue { proceeds })?;
            }
            None if proceeds => self.proceed(req, k, false)?,
            None => {}
        }
        Ok(())
    }

    fn push_entry(&mut self, req: usize, concept: ConceptId, h: Handle) -> Result<()> {
        self.requests[req].stack.push(concept, h);
        self.emit_trace(format_args!("META {}", self.table.name(concept)))
    }

    /// Continues the access past segment `k`. `strict` rejects a second proceed.
    pub(crate) fn proceed(&mut self, req: usize, k: usize, strict: bool) -> Result<()> {
        if self.requests[req].proceeded[k] {
            if strict {
                let concept = self.name(self.requests[req].target.segments[k].concept);
                return Err(RuntimeErrorKind::ContinueTwice(concept).into());
            }
            return Ok(());
        }
        self.requests[req].proceeded[k] = true;
        self.resolve_from(req, k + 1)
    }

    /// `sub.continue()` inside the reference continuation of segment `k`.
    pub(crate) fn sub_continue(&mut self, req: usize, k: usize, proceeds: bool) -> Result<()> {
        if !proceeds {
            return Ok(());
        }
        if !self.requests[req].crossed(k) {
            let concept = self.name(self.requests[req].target.segments[k].concept);
            return Err(RuntimeErrorKind::ResolutionFailed {
                concept,
                reason: "`sub.continue()` before crossing into this segment's object".into(),
            }
            .into());
        }
        self.proceed(req, k, false)
    }

    /// `h.continue()` inside a special reference method.
    pub(crate) fn handle_continue(&mut self, h: Option<Handle>) -> Result<()> {
        let (req, seg, special) = self.special_frame("continue")?;
        let Some(h) = h else {
            let concept = self.name(self.requests[req].target.segments[seg].concept);
            return Err(RuntimeErrorKind::ResolutionFailed { concept, reason: "handle is null".into() }.into());
        };
        let proceeds = matches!(special, Special::Continue { proceeds: true });
        self.cross(req, seg, h, proceeds)
    }

    fn special_frame(&self, what: &str) -> Result<(usize, usize, Special)> {
        match self.frame_kind() {
            FrameKind::Reference { req, seg, special } if special != Special::None => Ok((req, seg, special)),
            _ => Err(RuntimeErrorKind::NotInSpecialMethod(format!("{what}()")).into()),
        }
    }

    // ---- creation ----------------------------------------------------------

    /// Creates segment `k` and then, unless its create method already did,
    /// the segments below it.
    pub(crate) fn create_from(&mut self, req: usize, k: usize, args: Vec<Value>) -> Result<()> {
        let n = self.requests[req].target.len();
        if k >= n || self.requests[req].started[k] {
            return Ok(());
        }
        self.requests[req].started[k] = true;
        let table = self.table;
        let concept = self.requests[req].target.segments[k].concept;
        let info = table.get(concept);
        if let Some(m) = info.ref_methods.get("create") {
            self.call_ref_method(req, k, m, args, Special::Create)?;
            if !self.requests[req].crossed(k) {
                return Err(RuntimeErrorKind::CreateFailed {
                    concept: info.name.clone(),
                    reason: "create method neither allocated nor reused an object".into(),
                }
                .into());
            }
        } else if !info.has_custom_identity() {
            let fields = self.object_fields(concept)?;
            let r = &self.requests[req];
            let h = if r.base + k == 0 {
                let h = self.heap.alloc(concept, fields);
                self.requests[req].target.primitive = Some(h);
                h
            } else {
                let h = self.inherited_handle(req, k)?;
                self.heap.attach(h, concept, fields)?;
                h
            };
            self.push_entry(req, concept, h)?;
            self.run_constructor(req, k, args)?;
        } else {
            return Err(RuntimeErrorKind::CreateFailed {
                concept: info.name.clone(),
                reason: "reference fields require a create method".into(),
            }
            .into());
        }
        if k + 1 < n && !self.requests[req].started[k + 1] {
            self.create_from(req, k + 1, vec![])?;
        }
        Ok(())
    }

    fn run_constructor(&mut self, req: usize, k: usize, args: Vec<Value>) -> Result<()> {
        let concept = self.requests[req].target.segments[k].concept;
        let entry = self.requests[req].base + k;
        match self.table.obj_method(concept, "create") {
            Some(m) => {
                self.call_obj_method(req, entry, m, args, Special::Create)?;
            }
            None if !args.is_empty() => {
                return Err(RuntimeErrorKind::ArityMismatch { name: "create".into(), expected: 0, found: args.len() }.into())
            }
            None => {}
        }
        Ok(())
    }

    /// `Root h.create(args)` inside a reference create method.
    pub(crate) fn handle_create(&mut self, args: Vec<Value>) -> Result<Handle> {
        let (req, k, special) = self.special_frame("create")?;
        if special != Special::Create {
            return Err(RuntimeErrorKind::NotInSpecialMethod("create()".into()).into());
        }
        let concept = self.requests[req].target.segments[k].concept;
        if self.requests[req].crossed(k) {
            return Err(RuntimeErrorKind::DoubleCrossing(self.name(concept)).into());
        }
        let fields = self.object_fields(concept)?;
        let h = self.heap.alloc(concept, fields);
        self.push_entry(req, concept, h)?;
        self.run_constructor(req, k, args)?;
        Ok(h)
    }

    /// `sub.create(args)` inside the create method of segment `k`.
    pub(crate) fn sub_create(&mut self, req: usize, k: usize, args: Vec<Value>) -> Result<()> {
        if !self.requests[req].crossed(k) {
            let concept = self.name(self.requests[req].target.segments[k].concept);
            return Err(RuntimeErrorKind::CreateFailed {
                concept,
                reason: "`sub.create()` before this segment's object exists".into(),
            }
            .into());
        }
        self.create_from(req, k + 1, args)
    }

    // ---- deletion ----------------------------------------------------------

    /// Deletes segment `k`; reference delete methods wrap those of the
    /// segments below, while object destructors run child first.
    pub(crate) fn delete_from(&mut self, req: usize, k: usize) -> Result<()> {
        let n = self.requests[req].target.len();
        if k >= n || self.requests[req].started[k] {
            return Ok(());
        }
        self.requests[req].started[k] = true;
        let table = self.table;
        let concept = self.requests[req].target.segments[k].concept;
        let info = table.get(concept);
        if let Some(m) = info.ref_methods.get("delete").filter(|m| m.params.is_empty()) {
            self.call_ref_method(req, k, m, vec![], Special::Delete)?;
            if k + 1 < n && !self.requests[req].started[k + 1] {
                self.delete_from(req, k + 1)?;
            }
            Ok(())
        } else if !info.has_custom_identity() {
            let h = self.inherited_handle(req, k)?;
            self.heap.segment(h, concept)?;
            self.push_entry(req, concept, h)?;
            self.destroy(req, k)
        } else if let Some(m) = info.ref_methods.get("continue").filter(|m| m.params.is_empty()) {
            self.count_continuation(concept);
            self.call_ref_method(req, k, m, vec![], Special::Continue { proceeds: false })?;
            if !self.requests[req].crossed(k) {
                return Err(RuntimeErrorKind::ResolutionFailed {
                    concept: info.name.clone(),
                    reason: "continuation finished without crossing into the object".into(),
                }
                .into());
            }
            self.destroy(req, k)
        } else {
            Err(RuntimeErrorKind::MissingContinuation(info.name.clone()).into())
        }
    }

    /// `h.delete()` inside a reference delete method.
    pub(crate) fn handle_delete(&mut self, h: Option<Handle>) -> Result<()> {
        let (req, k, special) = self.special_frame("delete")?;
        if special != Special::Delete {
            return Err(RuntimeErrorKind::NotInSpecialMethod("delete()".into()).into());
        }
        let Some(h) = h else {
            return Err(RuntimeErrorKind::DanglingHandle("delete of a null handle".into()).into());
        };
        let concept = self.requests[req].target.segments[k].concept;
        if !self.requests[req].crossed(k) {
            self.heap.segment(h, concept)?;
            self.push_entry(req, concept, h)?;
        }
        self.destroy(req, k)
    }

    /// Deletes the segments below `k`, runs the destructor of `k` and
    /// releases its storage.
    fn destroy(&mut self, req: usize, k: usize) -> Result<()> {
        let n = self.requests[req].target.len();
        if k + 1 < n && !self.requests[req].started[k + 1] {
            self.delete_from(req, k + 1)?;
        }
        let entry = self.requests[req].base + k;
        let e = self.requests[req].stack.entries()[entry];
        if let Some(m) = self.table.obj_method(e.concept, "delete").filter(|m| m.params.is_empty()) {
            self.call_obj_method(req, entry, m, vec![], Special::Delete)?;
        }
        if self.heap.owner(e.handle)? == e.concept {
            self.heap.free(e.handle)?;
        } else {
            self.heap.detach(e.handle, e.concept)?;
        }
        Ok(())
    }
}

/// Last `len` segments of `r`, rooted at `context`.
fn tail(mut r: ComplexReference, len: usize, context: ConceptId) -> ComplexReference {
    if r.len() > len {
        r.segments.drain(..r.len() - len);
        r.primitive = None;
        r.context = context;
    }
    r
}

