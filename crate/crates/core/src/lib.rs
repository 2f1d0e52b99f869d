//! Software Heritage persistent identifiers (SWHIDs).
//!
//! - [`model`]: identifier types, parser, printer and validator.
//! - [`hash`]: intrinsic identifiers for contents, directories, revisions,
//!   releases and snapshots.
//! - [`resolver`]: archive URLs and citation snippets.
//! - [`archive`]: blocking client for the archive's public API.
//! - [`audit`]: archival-readiness checks for a source tree.

pub mod archive;
pub mod audit;
pub mod hash;
pub mod model;
pub mod resolver;

pub use model::{
    parse, validate, CoreIdentifier, LineRange, ObjectId, ObjectType, Origin, ParseError,
    QualifiedIdentifier, ValidationReport,
};
