pub mod adapters;
pub mod analysis;
pub mod baseline;
pub mod catalog;
pub mod corpus;
mod edit;
pub mod error;
pub mod generator;
pub mod metrics;
pub mod mr;
pub mod pipeline;
pub mod seed;
pub mod template;
pub mod text;

pub use catalog::Catalog;
pub use corpus::{CaseCorpus, Generator, PairCorpus, TestCase, TestPair};
pub use error::{Error, Result};
pub use mr::MrId;
pub use template::TemplateSet;
