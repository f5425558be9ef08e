//! Arithmetic of `GL_n(F_q)`: fields, classes and a small element-level engine.

mod classes;
mod field;
mod tiny;

pub use classes::{enumerate_classes, gl_order, unipotent_centralizer, ClassLabel, ClassRecord, ClassTable};
pub use field::{prime_power, BaseField, ExtField, FieldTower, IrrPoly, Irreducible, MAX_Q};
pub use tiny::{Matrix, TinyGroup, TINY_LIMIT};
