//! Extraction of contextual-integrity flow parameters (sender, receiver,
//! subject, attribute, transmission principle) from privacy-policy
//! statements, with a trigram HMM tagger, dependency-rule and
//! semantic-role mappers, a redundant-verb filter, and scoring.

pub mod corpus;
pub mod dp;
pub mod error;
pub mod eval;
pub mod hmm;
pub mod interchange;
pub mod pipeline;
pub mod refine;
pub mod report;
pub mod srl;
pub mod types;

pub use error::{Error, Result};
pub use types::{CiParam, FlowAnnotation, Method, Span, Statement, Token};
