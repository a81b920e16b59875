use std::cell::RefCell;
use std::rc::Rc;

use indexmap::IndexMap;

use super::{ComplexReference, Handle};
use crate::semantics::{ConceptId, ConceptTable};

/// Shared mutable map; copies alias the same storage.
pub type MapRef = Rc<RefCell<IndexMap<String, Value>>>;

#[derive(Debug, Clone, Default)]
pub enum Value {
    #[default]
    Null,
    Double(f64),
    Bool(bool),
    Str(Rc<str>),
    Handle(Handle),
    Ref(ComplexReference),
    Map(MapRef),
    /// Result of `instanceof`, `contextof` and `conceptof`.
    Concept(ConceptId),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Double(a), Value::Double(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Handle(a), Value::Handle(b)) => a == b,
            (Value::Ref(a), Value::Ref(b)) => a == b,
            (Value::Map(a), Value::Map(b)) => Rc::ptr_eq(a, b),
            (Value::Concept(a), Value::Concept(b)) => a == b,
            _ => false,
        }
    }
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn new_map() -> Value {
        Value::Map(Rc::new(RefCell::new(IndexMap::new())))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Double(_) => "double",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "String",
            Value::Handle(_) => "Root",
            Value::Ref(_) => "reference",
            Value::Map(_) => "Map",
            Value::Concept(_) => "concept",
        }
    }

    /// Text used by `print`, string concatenation and map keys.
    pub fn render(&self, table: &ConceptTable) -> String {
        match self {
            Value::Null => "null".into(),
            Value::Double(d) => format_double(*d),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.to_string(),
            Value::Handle(h) => format!("<handle {}>", h.id()),
            Value::Ref(r) => r.render(table),
            Value::Map(m) => {
                let items: Vec<String> =
                    m.borrow().iter().map(|(k, v)| format!("{k}: {}", v.render(table))).collect();
                format!("{{{}}}", items.join(", "))
            }
            Value::Concept(c) => table.name(*c).to_string(),
        }
    }
}

/// Integral values keep one decimal place, so 10 prints as `10.0`.
pub fn format_double(d: f64) -> String {
    if d.is_finite() && d.fract() == 0.0 {
        format!("{d:.1}")
    } else {
        format!("{d}")
    }
}
