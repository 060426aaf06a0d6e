//! Requirements modelling toolkit: a description-based requirements language with its parser,
//! set and description-logic semantics, refinement operators, reasoning services, graded
//! membership, linting, OWL export and a command-line front end.

pub mod cli;
pub mod export;
pub mod lint;
pub mod membership;
pub mod model;
pub mod operators;
pub mod parser;
pub mod reasoner;
pub mod semantics;
pub mod value;

pub use model::*;
pub use value::{format_rational, parse_decimal, rat, ratio, Rational, Value};
