//! Concept table construction, validation and colon-form classification.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::syntax::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(pub(crate) u32);

impl ConceptId {
    pub const ROOT: ConceptId = ConceptId(0);

    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct ConceptInfo {
    pub name: String,
    /// `None` only for Root.
    pub parent: Option<ConceptId>,
    pub depth: usize,
    pub ref_fields: Vec<VarDecl>,
    pub ref_methods: IndexMap<String, Arc<MethodDecl>>,
    pub obj_fields: Vec<VarDecl>,
    pub obj_methods: IndexMap<String, Arc<MethodDecl>>,
    pub span: Span,
}

impl ConceptInfo {
    pub fn has_custom_identity(&self) -> bool {
        !self.ref_fields.is_empty()
    }

    pub fn ref_field(&self, name: &str) -> Option<&VarDecl> {
        self.ref_fields.iter().find(|f| f.name == name)
    }

    pub fn obj_field(&self, name: &str) -> Option<&VarDecl> {
        self.obj_fields.iter().find(|f| f.name == name)
    }
}

/// Immutable inclusion hierarchy rooted at the built-in `Root` concept.
#[derive(Debug, Clone)]
pub struct ConceptTable {
    concepts: Vec<ConceptInfo>,
    by_name: HashMap<String, ConceptId>,
}

impl ConceptTable {
    fn with_root() -> Self {
        let root = ConceptInfo {
            name: "Root".into(),
            parent: None,
            depth: 0,
            ref_fields: vec![],
            ref_methods: IndexMap::new(),
            obj_fields: vec![],
            obj_methods: IndexMap::new(),
            span: Span::default(),
        };
        ConceptTable { concepts: vec![root], by_name: HashMap::from([("Root".into(), ConceptId::ROOT)]) }
    }

    pub fn id(&self, name: &str) -> Option<ConceptId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: ConceptId) -> &ConceptInfo {
        &self.concepts[id.index()]
    }

    pub fn name(&self, id: ConceptId) -> &str {
        &self.get(id).name
    }

    pub fn parent(&self, id: ConceptId) -> Option<ConceptId> {
        self.get(id).parent
    }

    pub fn depth(&self, id: ConceptId) -> usize {
        self.get(id).depth
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ids(&self) -> impl Iterator<Item = ConceptId> + '_ {
        (0..self.concepts.len() as u32).map(ConceptId)
    }

    /// True when `a` lies on the parent chain of `b`, `b` included.
    pub fn is_ancestor_or_self(&self, a: ConceptId, b: ConceptId) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    pub fn is_strict_ancestor(&self, a: ConceptId, b: ConceptId) -> bool {
        a != b && self.is_ancestor_or_self(a, b)
    }

    /// Either concept is an ancestor-or-self of the other.
    pub fn related(&self, a: ConceptId, b: ConceptId) -> bool {
        self.is_ancestor_or_self(a, b) || self.is_ancestor_or_self(b, a)
    }

    /// Concepts strictly below `from` down to `to` inclusive, top first.
    pub fn chain(&self, from: ConceptId, to: ConceptId) -> Option<Vec<ConceptId>> {
        let mut out = Vec::new();
        let mut cur = to;
        while cur != from {
            out.push(cur);
            cur = self.parent(cur)?;
        }
        out.reverse();
        Some(out)
    }

    pub fn ref_method(&self, id: ConceptId, name: &str) -> Option<&Arc<MethodDecl>> {
        self.get(id).ref_methods.get(name)
    }

    pub fn obj_method(&self, id: ConceptId, name: &str) -> Option<&Arc<MethodDecl>> {
        self.get(id).obj_methods.get(name)
    }

    pub fn length_concept(&self, name: &str) -> Result<usize, SemanticErrorKind> {
        let id = self.id(name).ok_or_else(|| SemanticErrorKind::UnknownConcept(name.into()))?;
        Ok(self.depth(id))
    }

    pub fn length_interval(&self, a: &str, b: &str) -> Result<usize, SemanticErrorKind> {
        let ia = self.id(a).ok_or_else(|| SemanticErrorKind::UnknownConcept(a.into()))?;
        let ib = self.id(b).ok_or_else(|| SemanticErrorKind::UnknownConcept(b.into()))?;
        if !self.is_ancestor_or_self(ia, ib) {
            return Err(SemanticErrorKind::NotAnAncestor(a.into(), b.into()));
        }
        Ok(self.depth(ib) - self.depth(ia))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticErrorKind {
    #[error("unknown parent concept `{0}`")]
    UnknownParent(String),
    #[error("concept `{0}` is declared more than once")]
    DuplicateConcept(String),
    #[error("inclusion cycle {0}")]
    CycleDetected(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("concept `{0}` has reference fields but no `continue` method")]
    MissingContinuation(String),
    #[error("`{1}` is declared more than once in concept `{0}`")]
    DuplicateMember(String, String),
    #[error("function `{0}` is declared more than once")]
    DuplicateFunction(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("`{0}` is not a context of `{1}`")]
    InvalidContext(String, String),
    #[error("conceptof expects a reference variable")]
    ConceptofNotVariable,
    #[error("both operands of `:` are concepts")]
    InvalidColonForm,
    #[error("`:{0}` used outside a context block")]
    BlockConcatOutsideBlock(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("`{0}` is not an ancestor of `{1}`")]
    NotAnAncestor(String, String),
}

impl SemanticErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownParent(_) => "UnknownParent",
            Self::DuplicateConcept(_) => "DuplicateConcept",
            Self::CycleDetected(_) => "CycleDetected",
            Self::UnknownIdentifier(_) => "UnknownIdentifier",
            Self::MissingContinuation(_) => "MissingContinuation",
            Self::DuplicateMember(..) => "DuplicateMember",
            Self::DuplicateFunction(_) => "DuplicateFunction",
            Self::ArityMismatch { .. } => "ArityMismatch",
            Self::InvalidContext(..) => "InvalidContext",
            Self::ConceptofNotVariable => "ConceptofNotVariable",
            Self::InvalidColonForm => "InvalidColonForm",
            Self::BlockConcatOutsideBlock(_) => "BlockConcatOutsideBlock",
            Self::UnknownConcept(_) => "UnknownConcept",
            Self::NotAnAncestor(..) => "NotAnAncestor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct SemanticError {
    pub kind: SemanticErrorKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// Output of analysis: the rewritten program and its concept table.
#[derive(Debug, Clone)]
pub struct Analyzed {
    pub program: Program,
    pub table: ConceptTable,
    pub warnings: Vec<Warning>,
}

pub fn analyze(program: Program) -> Result<Analyzed, SemanticError> {
    let mut table = build_table(&program)?;
    let mut checker = Checker {
        table: &table,
        functions: program.functions.iter().map(|f| (f.name.clone(), f.params.len())).collect(),
        statics: HashMap::new(),
        warnings: vec![],
        uses: vec![],
        scopes: vec![],
        body: BodyKind::TopLevel,
    };
    let mut seen = HashSet::new();
    for f in &program.functions {
        if !seen.insert(f.name.as_str()) {
            return Err(SemanticError {
                kind: SemanticErrorKind::DuplicateFunction(f.name.clone()),
                span: f.span,
            });
        }
    }

    let mut out = Program::default();
    for s in &program.statics {
        checker.scopes = vec![Scope::default()];
        let decl = checker.var_decl(s)?;
        checker.statics.insert(decl.name.clone(), decl.ty.clone());
        out.statics.push(decl);
    }

    let mut ref_methods = Vec::new();
    let mut obj_methods = Vec::new();
    for (i, c) in program.concepts.iter().enumerate() {
        let id = ConceptId(i as u32 + 1);
        let mut decl = c.clone();
        for (members, is_ref) in [(&mut decl.reference, true), (&mut decl.object, false)] {
            let Some(members) = members else { continue };
            for m in members.iter_mut() {
                checker.body = if is_ref { BodyKind::Reference(id) } else { BodyKind::Object(id) };
                match m {
                    Member::Field(f) => {
                        checker.body = BodyKind::Function;
                        checker.scopes = vec![Scope::default()];
                        *f = checker.var_decl(f)?;
                    }
                    Member::Method(md) => {
                        let new = Arc::new(checker.method(md)?);
                        if is_ref {
                            ref_methods.push((id, new.clone()));
                        } else {
                            obj_methods.push((id, new.clone()));
                        }
                        *md = new;
                    }
                }
            }
        }
        out.concepts.push(decl);
    }
    for f in &program.functions {
        checker.body = BodyKind::Function;
        out.functions.push(Arc::new(checker.method(f)?));
    }
    checker.body = BodyKind::TopLevel;
    checker.scopes = vec![Scope::default()];
    for s in &program.statements {
        out.statements.push(checker.stmt(s)?);
    }

    let uses = std::mem::take(&mut checker.uses);
    let warnings = std::mem::take(&mut checker.warnings);
    check_continuations(&table, &uses)?;

    for (id, m) in ref_methods {
        table.concepts[id.index()].ref_methods.insert(m.name.clone(), m);
    }
    for (id, m) in obj_methods {
        table.concepts[id.index()].obj_methods.insert(m.name.clone(), m);
    }
    for (i, c) in out.concepts.iter().enumerate() {
        let info = &mut table.concepts[i + 1];
        info.ref_fields = fields(&c.reference);
        info.obj_fields = fields(&c.object);
    }
    Ok(Analyzed { program: out, table, warnings })
}

fn fields(block: &Option<Vec<Member>>) -> Vec<VarDecl> {
    block
        .iter()
        .flatten()
        .filter_map(|m| match m {
            Member::Field(f) => Some(f.clone()),
            Member::Method(_) => None,
        })
        .collect()
}

fn methods(block: &Option<Vec<Member>>) -> IndexMap<String, Arc<MethodDecl>> {
    block
        .iter()
        .flatten()
        .filter_map(|m| match m {
            Member::Method(m) => Some((m.name.clone(), m.clone())),
            Member::Field(_) => None,
        })
        .collect()
}

fn build_table(program: &Program) -> Result<ConceptTable, SemanticError> {
    let mut table = ConceptTable::with_root();
    for c in &program.concepts {
        let err = |kind| SemanticError { kind, span: c.span };
        if table.by_name.contains_key(&c.name) {
            return Err(err(SemanticErrorKind::DuplicateConcept(c.name.clone())));
        }
        for block in [&c.reference, &c.object] {
            let mut names = HashSet::new();
            for m in block.iter().flatten() {
                if !names.insert(m.name()) {
                    return Err(err(SemanticErrorKind::DuplicateMember(c.name.clone(), m.name().into())));
                }
            }
        }
        let id = ConceptId(table.concepts.len() as u32);
        table.by_name.insert(c.name.clone(), id);
        table.concepts.push(ConceptInfo {
            name: c.name.clone(),
            parent: None,
            depth: 0,
            ref_fields: fields(&c.reference),
            ref_methods: methods(&c.reference),
            obj_fields: fields(&c.object),
            obj_methods: methods(&c.object),
            span: c.span,
        });
    }
    for (i, c) in program.concepts.iter().enumerate() {
        let parent = match &c.parent {
            None => ConceptId::ROOT,
            Some(p) => table.id(p).ok_or_else(|| SemanticError {
                kind: SemanticErrorKind::UnknownParent(p.clone()),
                span: c.span,
            })?,
        };
        table.concepts[i + 1].parent = Some(parent);
    }
    for (i, c) in program.concepts.iter().enumerate() {
        let start = ConceptId(i as u32 + 1);
        let mut path = vec![start];
        let mut cur = start;
        while let Some(p) = table.parent(cur) {
            if p == ConceptId::ROOT {
                break;
            }
            if path.contains(&p) {
                path.push(p);
                let names: Vec<&str> = path.iter().map(|&id| table.name(id)).collect();
                return Err(SemanticError {
                    kind: SemanticErrorKind::CycleDetected(names.join(" -> ")),
                    span: c.span,
                });
            }
            path.push(p);
            cur = p;
        }
        table.concepts[i + 1].depth = path.len();
    }
    Ok(table)
}

/// A declared reference type `context : concept`, recorded for the
/// resolvability check.
struct TypeUse {
    context: ConceptId,
    concept: ConceptId,
    span: Span,
}

fn check_continuations(table: &ConceptTable, uses: &[TypeUse]) -> Result<(), SemanticError> {
    for u in uses {
        for c in table.chain(u.context, u.concept).unwrap_or_default() {
            let info = table.get(c);
            let resolvable = info.ref_methods.get("continue").is_some_and(|m| m.params.is_empty());
            if info.has_custom_identity() && !resolvable {
                return Err(SemanticError {
                    kind: SemanticErrorKind::MissingContinuation(info.name.clone()),
                    span: u.span,
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum BodyKind {
    TopLevel,
    Function,
    Reference(ConceptId),
    Object(ConceptId),
}

#[derive(Default)]
struct Scope {
    vars: HashMap<String, TypeRef>,
    /// Set for context blocks; the inner `None` means the context type is unknown.
    block_context: Option<Option<ConceptId>>,
}

struct Checker<'t> {
    table: &'t ConceptTable,
    functions: HashMap<String, usize>,
    statics: HashMap<String, TypeRef>,
    warnings: Vec<Warning>,
    uses: Vec<TypeUse>,
    scopes: Vec<Scope>,
    body: BodyKind,
}

enum Binding<'a> {
    Var(&'a TypeRef),
    Member,
}

impl Checker<'_> {
    fn error<T>(&self, kind: SemanticErrorKind, span: Span) -> Result<T, SemanticError> {
        Err(SemanticError { kind, span })
    }

    fn method(&mut self, m: &MethodDecl) -> Result<MethodDecl, SemanticError> {
        self.scopes = vec![Scope::default()];
        let ret = self.type_ref(&m.ret, m.span)?;
        let mut params = Vec::new();
        for p in &m.params {
            let ty = self.type_ref(&p.ty, m.span)?;
            self.scopes[0].vars.insert(p.name.clone(), ty.clone());
            params.push(Param { ty, name: p.name.clone() });
        }
        let body = self.stmts(&m.body)?;
        Ok(MethodDecl { ret, name: m.name.clone(), params, body, span: m.span })
    }

    fn stmts(&mut self, body: &[Stmt]) -> Result<Vec<Stmt>, SemanticError> {
        self.scopes.push(Scope::default());
        let out = body.iter().map(|s| self.stmt(s)).collect();
        self.scopes.pop();
        out
    }

    fn declare(&mut self, name: &str, ty: TypeRef) {
        self.scopes.last_mut().expect("scope").vars.insert(name.into(), ty);
    }

    fn var_decl(&mut self, d: &VarDecl) -> Result<VarDecl, SemanticError> {
        let ty = self.type_ref(&d.ty, d.span)?;
        let init = d.init.as_ref().map(|e| self.expr(e)).transpose()?;
        self.declare(&d.name, ty.clone());
        Ok(VarDecl { ty, name: d.name.clone(), init, span: d.span })
    }

    fn type_ref(&mut self, ty: &TypeRef, span: Span) -> Result<TypeRef, SemanticError> {
        let TypeName::Concept(name) = &ty.name else {
            if let Some(ctx) = &ty.context {
                return self.error(SemanticErrorKind::InvalidContext(ctx.name().into(), "a value type".into()), span);
            }
            return Ok(ty.clone());
        };
        let Some(concept) = self.table.id(name) else {
            return self.error(SemanticErrorKind::UnknownIdentifier(name.clone()), span);
        };
        let (context, context_id) = match &ty.context {
            None => (None, ConceptId::ROOT),
            Some(ctx) => {
                let n = ctx.name();
                let as_var = match ctx {
                    ContextRef::Concept(_) => None,
                    _ => self.lookup_var(n),
                };
                if let Some(var_ty) = as_var {
                    let Some(c) = var_ty.concept().and_then(|c| self.table.id(c)) else {
                        return self.error(SemanticErrorKind::InvalidContext(n.into(), name.clone()), span);
                    };
                    (Some(ContextRef::Variable(n.into())), c)
                } else if let Some(c) = self.table.id(n) {
                    (Some(ContextRef::Concept(n.into())), c)
                } else {
                    return self.error(SemanticErrorKind::UnknownIdentifier(n.into()), span);
                }
            }
        };
        if context_id == concept {
            self.warnings.push(Warning {
                code: "DegenerateContext",
                message: format!("context `{name}` equals the declared type"),
                span,
            });
        } else if !self.table.is_strict_ancestor(context_id, concept) {
            let ctx_name = self.table.name(context_id).to_string();
            return self.error(SemanticErrorKind::InvalidContext(ctx_name, name.clone()), span);
        }
        self.uses.push(TypeUse { context: context_id, concept, span });
        Ok(TypeRef { context, name: ty.name.clone() })
    }

    fn lookup_var(&self, name: &str) -> Option<&TypeRef> {
        self.scopes.iter().rev().find_map(|s| s.vars.get(name)).or_else(|| self.statics.get(name))
    }

    fn in_context_block(&self) -> bool {
        self.scopes.iter().any(|s| s.block_context.is_some())
    }

    /// Object members visible through `concept` and its ancestors.
    fn object_member(&self, concept: ConceptId, name: &str, method: bool) -> bool {
        let mut cur = Some(concept);
        while let Some(c) = cur {
            let info = self.table.get(c);
            let found = if method {
                info.obj_methods.contains_key(name)
            } else {
                info.obj_field(name).is_some()
            };
            if found {
                return true;
            }
            cur = info.parent;
        }
        false
    }

    fn resolve_name(&self, name: &str, method: bool) -> Option<Binding<'_>> {
        for scope in self.scopes.iter().rev() {
            if !method {
                if let Some(ty) = scope.vars.get(name) {
                    return Some(Binding::Var(ty));
                }
            }
            match scope.block_context {
                Some(None) => return Some(Binding::Member),
                Some(Some(c)) if self.object_member(c, name, method) => return Some(Binding::Member),
                _ => {}
            }
        }
        match self.body {
            BodyKind::Reference(c) => {
                let info = self.table.get(c);
                if method && info.ref_methods.contains_key(name) {
                    return Some(Binding::Member);
                }
                if !method {
                    if let Some(f) = info.ref_field(name).or_else(|| info.obj_field(name)) {
                        return Some(Binding::Var(&f.ty));
                    }
                }
            }
            BodyKind::Object(c) => {
                if !method {
                    let mut cur = Some(c);
                    while let Some(id) = cur {
                        if let Some(f) = self.table.get(id).obj_field(name) {
                            return Some(Binding::Var(&f.ty));
                        }
                        cur = self.table.parent(id);
                    }
                } else if self.object_member(c, name, true) {
                    return Some(Binding::Member);
                }
            }
            BodyKind::TopLevel | BodyKind::Function => {}
        }
        if !method {
            if let Some(ty) = self.statics.get(name) {
                return Some(Binding::Var(ty));
            }
        }
        None
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Stmt, SemanticError> {
        let kind = match &s.kind {
            StmtKind::VarDecl(d) => StmtKind::VarDecl(self.var_decl(d)?),
            StmtKind::DeclCreate { decl, method, args } => {
                let args = self.exprs(args)?;
                let decl = self.var_decl(decl)?;
                StmtKind::DeclCreate { decl, method: method.clone(), args }
            }
            StmtKind::Expr(e) => StmtKind::Expr(self.expr(e)?),
            StmtKind::Assign { target, value } => {
                StmtKind::Assign { target: self.expr(target)?, value: self.expr(value)? }
            }
            StmtKind::Return(v) => StmtKind::Return(v.as_ref().map(|e| self.expr(e)).transpose()?),
            StmtKind::If { cond, then_body, else_body } => StmtKind::If {
                cond: self.expr(cond)?,
                then_body: self.stmts(then_body)?,
                else_body: else_body.as_ref().map(|b| self.stmts(b)).transpose()?,
            },
            StmtKind::ContextBlock { context, body } => {
                let context = self.expr(context)?;
                let static_type = match &context.kind {
                    ExprKind::Var(v) => {
                        self.lookup_var(v).and_then(|t| t.concept()).and_then(|c| self.table.id(c))
                    }
                    _ => None,
                };
                self.scopes.push(Scope { vars: HashMap::new(), block_context: Some(static_type) });
                let body = body.iter().map(|s| self.stmt(s)).collect::<Result<_, _>>();
                self.scopes.pop();
                StmtKind::ContextBlock { context, body: body? }
            }
        };
        Ok(Stmt { kind, span: s.span })
    }

    fn exprs(&mut self, es: &[Expr]) -> Result<Vec<Expr>, SemanticError> {
        es.iter().map(|e| self.expr(e)).collect()
    }

    fn boxed(&mut self, e: &Expr) -> Result<Box<Expr>, SemanticError> {
        Ok(Box::new(self.expr(e)?))
    }

    fn expr(&mut self, e: &Expr) -> Result<Expr, SemanticError> {
        let span = e.span;
        let kind = match &e.kind {
            ExprKind::Var(name) => match self.resolve_name(name, false) {
                Some(_) => ExprKind::Var(name.clone()),
                None if self.table.id(name).is_some() => ExprKind::ConceptName(name.clone()),
                None => return self.error(SemanticErrorKind::UnknownIdentifier(name.clone()), span),
            },
            ExprKind::Call { name, args } => {
                let args = self.exprs(args)?;
                if self.resolve_name(name, true).is_none() {
                    match self.functions.get(name) {
                        None => return self.error(SemanticErrorKind::UnknownIdentifier(name.clone()), span),
                        Some(&n) if n != args.len() => {
                            return self.error(
                                SemanticErrorKind::ArityMismatch {
                                    name: name.clone(),
                                    expected: n,
                                    found: args.len(),
                                },
                                span,
                            )
                        }
                        Some(_) => {}
                    }
                }
                ExprKind::Call { name: name.clone(), args }
            }
            ExprKind::New { concept, args } => {
                if concept != "Map" {
                    let Some(id) = self.table.id(concept) else {
                        return self.error(SemanticErrorKind::UnknownIdentifier(concept.clone()), span);
                    };
                    self.uses.push(TypeUse { context: ConceptId::ROOT, concept: id, span });
                }
                ExprKind::New { concept: concept.clone(), args: self.exprs(args)? }
            }
            ExprKind::Builtin { func: Builtin::Conceptof, args } => {
                let [arg] = args.as_slice() else {
                    return self.error(SemanticErrorKind::ConceptofNotVariable, span);
                };
                let ExprKind::Var(name) = &arg.kind else {
                    return self.error(SemanticErrorKind::ConceptofNotVariable, span);
                };
                let declared = match self.resolve_name(name, false) {
                    Some(Binding::Var(ty)) => ty.concept().map(str::to_string),
                    _ => None,
                };
                match declared {
                    Some(c) => ExprKind::ConceptName(c),
                    None => return self.error(SemanticErrorKind::ConceptofNotVariable, span),
                }
            }
            ExprKind::Builtin { func, args } => ExprKind::Builtin { func: *func, args: self.exprs(args)? },
            ExprKind::Field { receiver, name } => {
                ExprKind::Field { receiver: self.boxed(receiver)?, name: name.clone() }
            }
            ExprKind::MethodCall { receiver, name, args } => ExprKind::MethodCall {
                receiver: self.boxed(receiver)?,
                name: name.clone(),
                args: self.exprs(args)?,
            },
            ExprKind::DualCall { name, args } => {
                ExprKind::DualCall { name: name.clone(), args: self.exprs(args)? }
            }
            ExprKind::BlockConcat(inner) => {
                if !self.in_context_block() {
                    return self.error(SemanticErrorKind::BlockConcatOutsideBlock(crate::syntax::pretty_expr(inner)), span);
                }
                ExprKind::BlockConcat(self.boxed(inner)?)
            }
            ExprKind::ColonForm { left, right } => {
                let left = self.boxed(left)?;
                let right = self.boxed(right)?;
                match (is_concept_valued(&left), is_concept_valued(&right)) {
                    (true, true) => return self.error(SemanticErrorKind::InvalidColonForm, span),
                    (true, false) => ExprKind::LeftCast { concept: left, operand: right },
                    (false, true) => ExprKind::RightCast { operand: left, concept: right },
                    (false, false) => ExprKind::Concat { left, right },
                }
            }
            ExprKind::LeftCast { concept, operand } => {
                ExprKind::LeftCast { concept: self.boxed(concept)?, operand: self.boxed(operand)? }
            }
            ExprKind::RightCast { operand, concept } => {
                ExprKind::RightCast { operand: self.boxed(operand)?, concept: self.boxed(concept)? }
            }
            ExprKind::Concat { left, right } => {
                ExprKind::Concat { left: self.boxed(left)?, right: self.boxed(right)? }
            }
            ExprKind::Unary { op, operand } => ExprKind::Unary { op: *op, operand: self.boxed(operand)? },
            ExprKind::Binary { op, lhs, rhs } => {
                ExprKind::Binary { op: *op, lhs: self.boxed(lhs)?, rhs: self.boxed(rhs)? }
            }
            ExprKind::ConceptName(name) => {
                if self.table.id(name).is_none() {
                    return self.error(SemanticErrorKind::UnknownConcept(name.clone()), span);
                }
                e.kind.clone()
            }
            ExprKind::Number(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::Null
            | ExprKind::This
            | ExprKind::Super
            | ExprKind::Sub => e.kind.clone(),
        };
        Ok(Expr { kind, span })
    }
}

fn is_concept_valued(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::ConceptName(_) => true,
        ExprKind::Builtin { func, .. } => func.yields_concept(),
        _ => false,
    }
}
