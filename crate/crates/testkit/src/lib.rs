//! Helpers shared by the integration and acceptance tests.
//!
//! Nothing here depends on the library under test: [`git`] drives the real
//! git binary as an oracle, and [`mock`] serves canned HTTP responses.

pub mod git;
pub mod golden;
pub mod mock;
