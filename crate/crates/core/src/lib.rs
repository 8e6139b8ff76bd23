//! Offline engine that turns natural-language programming tasks into ranked,
//! attributed code snippets mined from a Q&A posts dump.
//!
//! The pipeline runs in stages: [`corpus`] ingests the dump, [`extract`]
//! mines task phrases from question titles, [`completion`] serves
//! type-to-filter suggestions over those tasks, [`search`] maps a chosen task
//! to snippets, and [`session`] inserts and cycles snippets in a document.

pub mod bench;
pub mod completion;
pub mod config;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod search;
pub mod session;
pub mod stats;
pub mod telemetry;

pub use config::Config;
pub use error::{Error, Result};
pub use stats::{stats, Stats};
