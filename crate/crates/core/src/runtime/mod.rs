//! Element model: values, complex references, the object heap and context stacks.

mod heap;
mod reference;
mod stack;
mod value;

pub use heap::{Handle, Heap, HeapError, ObjectSegment};
pub use reference::{ComplexReference, ReferenceSegment};
pub use stack::{ContextStack, StackEntry};
pub use value::{format_double, MapRef, Value};
