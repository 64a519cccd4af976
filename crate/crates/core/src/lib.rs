//! Genus-2 curves with D6 action over prime fields.

pub mod arith;
pub mod curves;
pub mod factorizer;
pub mod family;
pub mod fields;
pub mod quadcover;
pub mod survey;
pub mod tricover;
