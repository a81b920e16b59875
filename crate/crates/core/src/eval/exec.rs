//! Statement execution and expression evaluation.

use crate::error::RuntimeErrorKind;
use crate::refops;
use crate::runtime::{ComplexReference, Handle, Value};
use crate::semantics::ConceptId;
use crate::syntax::ast::{BinaryOp, Builtin, Expr, ExprKind, Stmt, StmtKind, TypeName, UnaryOp};

use super::access::Seed;
use super::{at, null_reference, Binding, Flow, FrameKind, Interpreter, Place, Result, Scope, Special, TypeKind};

/// Where a method call sends its access.
enum Receiver {
    /// A reference plus the place it came from, for writing back
    /// reference-field updates, and the length of its local tail.
    Reference { target: ComplexReference, seed: Seed, place: Option<(Place, usize)> },
    Handle(Option<Handle>, Option<Place>),
    Map(crate::runtime::MapRef),
}

impl<'a> Interpreter<'a> {
    /// Runs `body` in the current scope.
    pub(crate) fn exec_stmts(&mut self, body: &'a [Stmt]) -> Result<Flow> {
        for s in body {
            if let Flow::Return(v) = self.exec_stmt(s).map_err(|e| at(e, s.span))? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_block(&mut self, body: &'a [Stmt], context: Option<usize>) -> Result<Flow> {
        let frame = self.active;
        self.frames[frame].scopes.push(Scope { context, ..Scope::default() });
        let result = self.exec_stmts(body);
        self.frames[frame].scopes.pop();
        result
    }

    /// Body of a context block, run once its reference is resolved.
    pub(crate) fn exec_in_context(&mut self, req: usize, frame: usize, body: &'a [Stmt]) -> Result<Flow> {
        let saved = self.active;
        self.active = frame;
        let result = self.exec_block(body, Some(req));
        self.active = saved;
        result
    }

    fn declare(&mut self, name: &str, binding: Binding) {
        let frame = &mut self.frames[self.active];
        frame.scopes.last_mut().expect("scope").vars.insert(name.into(), binding);
    }

    fn exec_stmt(&mut self, s: &'a Stmt) -> Result<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::VarDecl(d) => {
                let b = self.new_binding(&d.ty, d.init.as_ref())?;
                self.declare(&d.name, b);
            }
            StmtKind::DeclCreate { decl, method, args } => {
                let args = self.eval_args(args)?;
                if decl.ty.name == TypeName::Root && method == "create" {
                    let h = self.handle_create(args)?;
                    let b = Binding { kind: TypeKind::Handle, value: Value::Handle(h), explicit_context: None };
                    self.declare(&decl.name, b);
                    return Ok(Flow::Normal);
                }
                let b = self.new_binding(&decl.ty, None)?;
                self.declare(&decl.name, b);
                let place = self.lookup(&decl.name, s.span)?;
                if method == "create" {
                    self.create_at(&place, args)?;
                } else {
                    let recv = Expr::new(ExprKind::Var(decl.name.clone()), s.span);
                    let recv = self.receiver(&recv)?;
                    self.call_on(recv, method, args)?;
                }
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::Assign { target, value } => {
                let v = self.eval(value)?;
                self.assign(target, v)?;
            }
            StmtKind::Return(v) => {
                let v = match v {
                    Some(e) => self.eval(e)?,
                    None => Value::Null,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::If { cond, then_body, else_body } => {
                if self.eval_bool(cond)? {
                    return self.exec_block(then_body, None);
                } else if let Some(b) = else_body {
                    return self.exec_block(b, None);
                }
            }
            StmtKind::ContextBlock { context, body } => {
                let (target, seed) = match self.receiver(context)? {
                    Receiver::Reference { target, seed, .. } => (target, seed),
                    _ => {
                        return Err(RuntimeErrorKind::RuntimeTypeError(
                            "context block needs a reference".into(),
                        )
                        .into())
                    }
                };
                return self.run_block(target, seed, body);
            }
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, target: &Expr, v: Value) -> Result<()> {
        if let Some(place) = self.expr_place(target)? {
            return self.write_place(&place, v);
        }
        match &target.kind {
            ExprKind::Field { receiver, name } => match self.receiver(receiver)? {
                Receiver::Reference { target, seed, .. } => self.write_field(target, name, v, seed),
                _ => Err(RuntimeErrorKind::RuntimeTypeError(format!("cannot assign field `{name}` of a non-reference"))
                    .into()),
            },
            _ => Err(RuntimeErrorKind::RuntimeTypeError("invalid assignment target".into()).into()),
        }
    }

    fn eval_args(&mut self, args: &[Expr]) -> Result<Vec<Value>> {
        args.iter().map(|a| self.eval(a)).collect()
    }

    fn eval_bool(&mut self, e: &Expr) -> Result<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => Err(at(
                RuntimeErrorKind::RuntimeTypeError(format!("expected boolean, found {}", v.type_name())).into(),
                e.span,
            )),
        }
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> Result<Value> {
        self.tick()?;
        self.eval_kind(e).map_err(|err| at(err, e.span))
    }

    fn eval_kind(&mut self, e: &Expr) -> Result<Value> {
        Ok(match &e.kind {
            ExprKind::Number(n) => Value::Double(*n),
            ExprKind::Str(s) => Value::str(s),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Null => Value::Null,
            ExprKind::ConceptName(n) => Value::Concept(self.concept_id(n)?),
            ExprKind::Var(name) => {
                let place = self.lookup_warn(name, e.span)?;
                self.read_place(&place)?
            }
            ExprKind::This => Value::Ref(self.this_reference()?),
            ExprKind::Super => self.super_reference()?,
            ExprKind::Sub => self.sub_reference()?,
            ExprKind::BlockConcat(_) => match self.receiver(e)? {
                Receiver::Reference { target, .. } => Value::Ref(target),
                _ => unreachable!("block concatenation yields references"),
            },
            ExprKind::Field { receiver, name } => {
                if let Some(place) = self.expr_place(e)? {
                    return self.read_place(&place);
                }
                match self.receiver(receiver)? {
                    Receiver::Reference { target, seed, .. } => self.read_field(target, name, seed)?,
                    _ => return Err(RuntimeErrorKind::RuntimeTypeError(format!("no field `{name}` on a non-reference")).into()),
                }
            }
            ExprKind::MethodCall { receiver, name, args } => self.method_call(receiver, name, args)?,
            ExprKind::DualCall { name, args } => {
                let args = self.eval_args(args)?;
                let FrameKind::Reference { req, .. } = self.frame_kind() else {
                    return Err(RuntimeErrorKind::NotInReferenceMethod(name.clone()).into());
                };
                match self.meta_transition(req, super::access::Inner::Dispatch { name: name.clone(), args })? {
                    Some(Flow::Return(v)) => v,
                    _ => Value::Null,
                }
            }
            ExprKind::Call { name, args } => {
                let args = self.eval_args(args)?;
                self.unqualified_call(name, args)?
            }
            ExprKind::New { concept, args } => {
                let args = self.eval_args(args)?;
                if concept == "Map" {
                    Value::new_map()
                } else {
                    let id = self.concept_id(concept)?;
                    let kind = TypeKind::Ref { concept: id, context: ConceptId::ROOT };
                    Value::Ref(self.create_reference(kind, None, &Value::Null, args)?)
                }
            }
            ExprKind::Builtin { func, args } => self.builtin(*func, args)?,
            ExprKind::ColonForm { .. } => unreachable!("rewritten by analysis"),
            ExprKind::LeftCast { concept, operand } => {
                let c = self.eval_concept(concept)?;
                let r = self.eval_reference(operand)?;
                let implicit = self.implicit_reference();
                Value::Ref(refops::left_cast(self.table, c, &r, implicit.as_ref())?)
            }
            ExprKind::RightCast { operand, concept } => {
                let r = self.eval_reference(operand)?;
                let c = self.eval_concept(concept)?;
                Value::Ref(refops::right_cast(self.table, &r, c)?)
            }
            ExprKind::Concat { left, right } => {
                let a = self.eval_reference(left)?;
                let b = self.eval_reference(right)?;
                Value::Ref(refops::concat(self.table, &a, &b)?)
            }
            ExprKind::Unary { op, operand } => match (op, self.eval(operand)?) {
                (UnaryOp::Neg, Value::Double(d)) => Value::Double(-d),
                (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                (_, v) => {
                    return Err(RuntimeErrorKind::RuntimeTypeError(format!("bad operand {} for unary operator", v.type_name()))
                        .into())
                }
            },
            ExprKind::Binary { op: BinaryOp::And, lhs, rhs } => Value::Bool(self.eval_bool(lhs)? && self.eval_bool(rhs)?),
            ExprKind::Binary { op: BinaryOp::Or, lhs, rhs } => Value::Bool(self.eval_bool(lhs)? || self.eval_bool(rhs)?),
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                self.binary(*op, a, b)?
            }
        })
    }

    fn binary(&self, op: BinaryOp, a: Value, b: Value) -> Result<Value> {
        use BinaryOp::*;
        Ok(match (op, &a, &b) {
            (Eq, ..) => Value::Bool(a == b),
            (Ne, ..) => Value::Bool(a != b),
            (Add, Value::Str(_), _) | (Add, _, Value::Str(_)) => {
                Value::str(&(a.render(self.table) + &b.render(self.table)))
            }
            (_, Value::Double(x), Value::Double(y)) => match op {
                Add => Value::Double(x + y),
                Sub => Value::Double(x - y),
                Mul => Value::Double(x * y),
                Div => Value::Double(x / y),
                Lt => Value::Bool(x < y),
                Gt => Value::Bool(x > y),
                Le => Value::Bool(x <= y),
                Ge => Value::Bool(x >= y),
                Eq | Ne | And | Or => unreachable!("handled above"),
            },
            _ => {
                return Err(RuntimeErrorKind::RuntimeTypeError(format!(
                    "operator `{}` does not apply to {} and {}",
                    op.symbol(),
                    a.type_name(),
                    b.type_name()
                ))
                .into())
            }
        })
    }

    fn eval_concept(&mut self, e: &Expr) -> Result<ConceptId> {
        match self.eval(e)? {
            Value::Concept(c) => Ok(c),
            v => Err(RuntimeErrorKind::RuntimeTypeError(format!("expected a concept, found {}", v.type_name())).into()),
        }
    }

    /// Reference denoted by `e`; variables with an explicit context yield
    /// the concatenated reference.
    fn eval_reference(&mut self, e: &Expr) -> Result<ComplexReference> {
        match self.receiver(e)? {
            Receiver::Reference { target, .. } => Ok(target),
            _ => Err(RuntimeErrorKind::RuntimeTypeError("expected a reference".into()).into()),
        }
    }

    fn builtin(&mut self, func: Builtin, args: &[Expr]) -> Result<Value> {
        if func == Builtin::Print {
            let mut line = String::new();
            for a in args {
                let v = self.eval(a)?;
                line.push_str(&v.render(self.table));
            }
            writeln!(self.out, "{line}").map_err(|e| RuntimeErrorKind::Io(e.to_string()))?;
            return Ok(Value::Null);
        }
        let values = self.eval_args(args)?;
        let reference = |v: &Value| match v {
            Value::Ref(r) => Ok(r.clone()),
            Value::Null => Err(null_reference()),
            v => Err(RuntimeErrorKind::RuntimeTypeError(format!("`{}` expects a reference, found {}", func.name(), v.type_name())).into()),
        };
        let arity = |n: usize| -> Result<()> {
            if values.len() == n {
                Ok(())
            } else {
                Err(RuntimeErrorKind::ArityMismatch { name: func.name().into(), expected: n, found: values.len() }.into())
            }
        };
        Ok(match func {
            Builtin::Length => match values.as_slice() {
                [Value::Concept(c)] => Value::Double(self.table.depth(*c) as f64),
                [Value::Concept(a), Value::Concept(b)] => {
                    if !self.table.is_ancestor_or_self(*a, *b) {
                        return Err(refops::RefOpError::CastUnrelated(self.name(*a), self.name(*b)).into());
                    }
                    Value::Double((self.table.depth(*b) - self.table.depth(*a)) as f64)
                }
                [v] => Value::Double(refops::length(&reference(v)?) as f64),
                _ => {
                    arity(1)?;
                    unreachable!()
                }
            },
            Builtin::Instanceof => {
                arity(1)?;
                let r = reference(&values[0])?;
                if r.is_empty() {
                    return Err(null_reference());
                }
                Value::Concept(refops::instanceof(&r))
            }
            Builtin::Contextof => {
                arity(1)?;
                Value::Concept(refops::contextof(&reference(&values[0])?))
            }
            Builtin::Print | Builtin::Conceptof => unreachable!("print handled above; conceptof rewritten by analysis"),
        })
    }

    // ---- keywords ----------------------------------------------------------

    fn this_reference(&self) -> Result<ComplexReference> {
        match self.frame_kind() {
            FrameKind::Reference { req, .. } | FrameKind::Object { req, .. } => Ok(self.requests[req].target.clone()),
            _ => Err(RuntimeErrorKind::RuntimeTypeError("`this` outside a concept method".into()).into()),
        }
    }

    /// `super` as a value: the full reference cut after the parent segment.
    fn super_reference(&self) -> Result<Value> {
        let (req, index) = match self.frame_kind() {
            FrameKind::Reference { req, seg, .. } => (req, self.requests[req].base + seg),
            FrameKind::Object { req, entry, .. } => (req, entry),
            _ => return Err(RuntimeErrorKind::RuntimeTypeError("`super` outside a concept method".into()).into()),
        };
        if index == 0 {
            return Err(RuntimeErrorKind::NoParent.into());
        }
        let mut full = self.requests[req].full_reference();
        full.segments.truncate(index);
        Ok(Value::Ref(full))
    }

    /// `sub` as a value: the segments after the current one, or null at the last.
    fn sub_reference(&self) -> Result<Value> {
        let (req, seg) = match self.frame_kind() {
            FrameKind::Reference { req, seg, .. } => (req, seg),
            FrameKind::Object { req, entry, .. } => {
                let r = &self.requests[req];
                match entry.checked_sub(r.base) {
                    Some(seg) => (req, seg),
                    None => return Ok(Value::Null),
                }
            }
            _ => return Err(RuntimeErrorKind::RuntimeTypeError("`sub` outside a concept method".into()).into()),
        };
        let target = &self.requests[req].target;
        if seg + 1 >= target.len() {
            return Ok(Value::Null);
        }
        Ok(Value::Ref(ComplexReference {
            context: target.segments[seg].concept,
            primitive: None,
            segments: target.segments[seg + 1..].to_vec(),
        }))
    }

    // ---- places and receivers ----------------------------------------------

    /// Storage location denoted by a variable or a keyword-qualified field.
    fn expr_place(&mut self, e: &Expr) -> Result<Option<Place>> {
        match &e.kind {
            ExprKind::Var(name) => Ok(Some(self.lookup_warn(name, e.span)?)),
            ExprKind::Field { receiver, name } => match (&receiver.kind, self.frame_kind()) {
                (ExprKind::This, FrameKind::Reference { .. } | FrameKind::Object { .. }) => {
                    Ok(Some(self.member_place(name).ok_or_else(|| self.no_member(name))?))
                }
                (ExprKind::Super, FrameKind::Reference { req, seg, .. }) => {
                    let r = &self.requests[req];
                    if r.base + seg == 0 {
                        return Err(RuntimeErrorKind::NoParent.into());
                    }
                    for j in (0..seg).rev() {
                        if self.table.get(r.target.segments[j].concept).ref_field(name).is_some() {
                            return Ok(Some(Place::RefField { req, seg: j, name: name.clone() }));
                        }
                    }
                    let entry = (0..r.base + seg)
                        .rev()
                        .find(|&i| {
                            let c = if i < r.base { r.context_segments[i].concept } else { r.target.segments[i - r.base].concept };
                            self.table.get(c).obj_field(name).is_some()
                        })
                        .ok_or_else(|| self.no_member(name))?;
                    Ok(Some(Place::ObjViaMeta { req, entry, name: name.clone() }))
                }
                (ExprKind::Super, FrameKind::Object { req, entry, .. }) => {
                    if entry == 0 {
                        return Err(RuntimeErrorKind::NoParent.into());
                    }
                    let e = self.find_obj_field(req, Some(entry), name).ok_or_else(|| self.no_member(name))?;
                    Ok(Some(Place::ObjField { req, entry: e, name: name.clone() }))
                }
                (ExprKind::Sub, FrameKind::Reference { req, seg, .. }) => {
                    let r = &self.requests[req];
                    for j in seg + 1..r.target.len() {
                        if self.table.get(r.target.segments[j].concept).ref_field(name).is_some() {
                            return Ok(Some(Place::RefField { req, seg: j, name: name.clone() }));
                        }
                    }
                    Err(self.no_member(name))
                }
                _ => Ok(None),
            },
            _ => Ok(None),
        }
    }

    fn no_member(&self, name: &str) -> crate::error::RuntimeError {
        let concept = match self.frame_kind() {
            FrameKind::Reference { req, seg, .. } => self.name(self.requests[req].target.segments[seg].concept),
            FrameKind::Object { req, entry, .. } => self.name(self.requests[req].stack_concept(entry)),
            _ => "Root".into(),
        };
        RuntimeErrorKind::NoSuchMember { concept, member: name.into() }.into()
    }

    fn receiver(&mut self, e: &Expr) -> Result<Receiver> {
        if let ExprKind::BlockConcat(inner) = &e.kind {
            let block = self.block_request().expect("checked by analysis");
            let local = self.eval_reference(inner)?;
            let full = self.requests[block].full_reference();
            let target = refops::concat(self.table, &full, &local)?;
            let seed = Seed::Prefix { req: block, count: self.requests[block].stack.len() };
            let place = self.expr_place(inner)?.map(|p| (p, local.len()));
            return Ok(Receiver::Reference { target, seed, place });
        }
        let place = self.expr_place(e)?;
        let value = match &place {
            Some(p) => {
                if self.place_kind(p)? == TypeKind::Handle {
                    let h = match self.read_place(p)? {
                        Value::Handle(h) => Some(h),
                        _ => None,
                    };
                    return Ok(Receiver::Handle(h, Some(p.clone())));
                }
                if let Some(r) = self.place_reference(p)? {
                    let len = match self.binding(p).map(|b| &b.value) {
                        Some(Value::Ref(local)) => local.len(),
                        _ => r.len(),
                    };
                    return Ok(Receiver::Reference { target: r, seed: Seed::Fresh, place: Some((p.clone(), len)) });
                }
                self.read_place(p)?
            }
            None => self.eval(e)?,
        };
        match value {
            Value::Ref(r) => {
                let len = r.len();
                Ok(Receiver::Reference { target: r, seed: Seed::Fresh, place: place.map(|p| (p, len)) })
            }
            Value::Handle(h) => Ok(Receiver::Handle(Some(h), None)),
            Value::Map(m) => Ok(Receiver::Map(m)),
            Value::Null => Err(null_reference()),
            v => Err(RuntimeErrorKind::RuntimeTypeError(format!("{} has no members", v.type_name())).into()),
        }
    }

    // ---- calls -------------------------------------------------------------

    fn method_call(&mut self, receiver: &Expr, name: &str, args: &[Expr]) -> Result<Value> {
        match receiver.kind {
            ExprKind::This => {
                let args = self.eval_args(args)?;
                return self.this_call(name, args);
            }
            ExprKind::Super => {
                let args = self.eval_args(args)?;
                return self.super_call(name, args);
            }
            ExprKind::Sub => {
                let args = self.eval_args(args)?;
                return self.sub_call(name, args);
            }
            _ => {}
        }
        if name == "create" {
            // Creation fills a slot, which may still be null.
            if let Some(place) = self.expr_place(receiver)? {
                if let TypeKind::Ref { .. } = self.place_kind(&place)? {
                    let args = self.eval_args(args)?;
                    self.create_at(&place, args)?;
                    return Ok(Value::Null);
                }
            }
        }
        let recv = self.receiver(receiver)?;
        let args = self.eval_args(args)?;
        self.call_on(recv, name, args)
    }

    fn create_at(&mut self, place: &Place, args: Vec<Value>) -> Result<()> {
        let kind = self.place_kind(place)?;
        let explicit = self.binding(place).and_then(|b| b.explicit_context.clone());
        let existing = match self.binding(place) {
            Some(b) => b.value.clone(),
            None => self.read_place(place)?,
        };
        let r = self.create_reference(kind, explicit.as_ref(), &existing, args)?;
        self.write_place(place, Value::Ref(r))
    }

    fn call_on(&mut self, recv: Receiver, name: &str, args: Vec<Value>) -> Result<Value> {
        match recv {
            Receiver::Handle(h, place) => match name {
                "create" => {
                    let h = self.handle_create(args)?;
                    if let Some(p) = place {
                        self.write_place(&p, Value::Handle(h))?;
                    }
                    Ok(Value::Handle(h))
                }
                "continue" => self.handle_continue(h).map(|_| Value::Null),
                "delete" => self.handle_delete(h).map(|_| Value::Null),
                _ => Err(RuntimeErrorKind::NoSuchMember { concept: "Root".into(), member: name.into() }.into()),
            },
            Receiver::Map(m) => self.map_call(&m, name, args),
            Receiver::Reference { target, seed, place } => match name {
                "create" => {
                    let kind = TypeKind::Ref { concept: target.instance_of(), context: target.context };
                    self.create_reference(kind, None, &Value::Ref(target), args)?;
                    Ok(Value::Null)
                }
                "delete" if args.is_empty() => {
                    self.delete_reference(target, seed)?;
                    Ok(Value::Null)
                }
                _ => {
                    let (v, updated) = self.invoke_reference(target, name, args, seed)?;
                    if let Some((place, len)) = place {
                        let tail_start = updated.len().saturating_sub(len);
                        let mut local = updated;
                        if tail_start > 0 {
                            local.context = local.segments[tail_start - 1].concept;
                            local.segments.drain(..tail_start);
                            local.primitive = None;
                        }
                        if self.read_place(&place)? != Value::Ref(local.clone()) {
                            self.write_place(&place, Value::Ref(local))?;
                        }
                    }
                    Ok(v)
                }
            },
        }
    }

    fn map_call(&mut self, m: &crate::runtime::MapRef, name: &str, args: Vec<Value>) -> Result<Value> {
        let key = |this: &Self, i: usize| args.get(i).map(|k| k.render(this.table));
        let expect = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(RuntimeErrorKind::ArityMismatch { name: name.into(), expected: n, found: args.len() }.into())
            }
        };
        Ok(match name {
            "get" => {
                expect(1)?;
                m.borrow().get(&key(self, 0).unwrap()).cloned().unwrap_or(Value::Null)
            }
            "add" | "put" => {
                expect(2)?;
                m.borrow_mut().insert(key(self, 0).unwrap(), args[1].clone());
                Value::Null
            }
            "remove" => {
                expect(1)?;
                m.borrow_mut().shift_remove(&key(self, 0).unwrap()).unwrap_or(Value::Null)
            }
            "contains" => {
                expect(1)?;
                Value::Bool(m.borrow().contains_key(&key(self, 0).unwrap()))
            }
            "size" => {
                expect(0)?;
                Value::Double(m.borrow().len() as f64)
            }
            _ => return Err(RuntimeErrorKind::NoSuchMember { concept: "Map".into(), member: name.into() }.into()),
        })
    }

    /// `this.m()`: the reference method of the current concept in reference
    /// code, virtual dispatch in object code.
    fn this_call(&mut self, name: &str, args: Vec<Value>) -> Result<Value> {
        match self.frame_kind() {
            FrameKind::Reference { req, seg, .. } => {
                let c = self.requests[req].target.segments[seg].concept;
                if let Some(m) = self.table.ref_method(c, name) {
                    return self.call_ref_method(req, seg, m, args, Special::None);
                }
                self.meta_dispatch(req, name, args)
            }
            FrameKind::Object { req, .. } => self.virtual_call(req, name, args),
            _ => Err(RuntimeErrorKind::RuntimeTypeError("`this` outside a concept method".into()).into()),
        }
    }

    fn meta_dispatch(&mut self, req: usize, name: &str, args: Vec<Value>) -> Result<Value> {
        match self.meta_transition(req, super::access::Inner::Dispatch { name: name.into(), args })? {
            Some(Flow::Return(v)) => Ok(v),
            _ => Ok(Value::Null),
        }
    }

    fn virtual_call(&mut self, req: usize, name: &str, args: Vec<Value>) -> Result<Value> {
        let top = self.requests[req].stack.len();
        let (e, m) = self.find_obj_method(req, top, name).ok_or_else(|| self.no_member(name))?;
        self.call_obj_method(req, e, m, args, Special::None)
    }

    /// `super.m()`: the nearest definition above the current segment; a
    /// no-op when no parent defines it.
    fn super_call(&mut self, name: &str, args: Vec<Value>) -> Result<Value> {
        match self.frame_kind() {
            FrameKind::Reference { req, seg, .. } => {
                let table = self.table;
                for j in (0..seg).rev() {
                    if let Some(m) = table.ref_method(self.requests[req].target.segments[j].concept, name) {
                        return self.call_ref_method(req, j, m, args, Special::None);
                    }
                }
                Ok(Value::Null)
            }
            FrameKind::Object { req, entry, special } => {
                if let Some((e, m)) = self.find_obj_method(req, entry, name) {
                    let special = if name == "create" || name == "delete" { special } else { Special::None };
                    return self.call_obj_method(req, e, m, args, special);
                }
                Ok(Value::Null)
            }
            _ => Err(RuntimeErrorKind::RuntimeTypeError("`super` outside a concept method".into()).into()),
        }
    }

    /// `sub.m()`: passes control to the next segment; past the last one it
    /// continues to the object side, or does nothing when there is no target.
    fn sub_call(&mut self, name: &str, args: Vec<Value>) -> Result<Value> {
        let FrameKind::Reference { req, seg, special } = self.frame_kind() else {
            return Err(RuntimeErrorKind::NotInReferenceMethod(format!("sub.{name}")).into());
        };
        match (name, special) {
            ("continue", Special::Continue { proceeds }) => self.sub_continue(req, seg, proceeds).map(|_| Value::Null),
            ("create", Special::Create) => self.sub_create(req, seg, args).map(|_| Value::Null),
            ("delete", Special::Delete) => self.delete_from(req, seg + 1).map(|_| Value::Null),
            _ => self.ref_phase(req, seg + 1, name, args, true),
        }
    }

    /// `name(args)` without a receiver.
    fn unqualified_call(&mut self, name: &str, args: Vec<Value>) -> Result<Value> {
        let kind = self.frame_kind();
        if name == "continue" && args.is_empty() {
            return match kind {
                FrameKind::Object { req, entry, special: Special::Continue { proceeds } } => {
                    if proceeds {
                        let k = entry - self.requests[req].base;
                        self.proceed(req, k, true)?;
                    }
                    Ok(Value::Null)
                }
                _ => Err(RuntimeErrorKind::NotInSpecialMethod("continue()".into()).into()),
            };
        }
        let blocks: Vec<usize> = self.frames[self.active].scopes.iter().rev().filter_map(|s| s.context).collect();
        for req in blocks {
            let top = self.requests[req].stack.len();
            if let Some((e, m)) = self.find_obj_method(req, top, name) {
                return self.call_obj_method(req, e, m, args, Special::None);
            }
        }
        match kind {
            FrameKind::Reference { req, seg, .. } => {
                let c = self.requests[req].target.segments[seg].concept;
                if let Some(m) = self.table.ref_method(c, name) {
                    return self.call_ref_method(req, seg, m, args, Special::None);
                }
                let full = self.requests[req].full_reference();
                if full.segments.iter().any(|s| self.table.obj_method(s.concept, name).is_some()) {
                    return self.meta_dispatch(req, name, args);
                }
            }
            FrameKind::Object { req, .. } => {
                let top = self.requests[req].stack.len();
                if self.find_obj_method(req, top, name).is_some() {
                    return self.virtual_call(req, name, args);
                }
            }
            FrameKind::TopLevel | FrameKind::Function => {}
        }
        let program = self.program;
        if let Some(f) = program.functions.iter().find(|f| f.name == name) {
            return self.call_function(f, args);
        }
        Err(self.no_member(name))
    }
}
