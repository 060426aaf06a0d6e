//! Set semantics over finite worlds and translation into the description-logic fragment.

pub mod dl;
pub mod eval;
pub mod translate;
pub mod world;

pub use dl::{data_contains, eval_concept, CardKind, DlAxiom, DlConcept};
pub use eval::{element_holds, eval_description, Satisfaction};
pub use translate::{expand_u, pct_restriction, root_concept, translate_axiom, translate_description, translate_element};
pub use world::{region_contains, QualityRecord, World};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("annotation path {path:?} matches nothing in element {element}")]
    PathMismatch { element: String, path: Vec<String> },
    #[error("element {0} nests U more deeply than the world checker supports")]
    UnsupportedNestedU(String),
    #[error("element {element}: quality record {record} uses a different unit than the region")]
    UnitMismatch { element: String, record: String },
    #[error("element {0} has a natural-language body")]
    Unstructured(String),
}
