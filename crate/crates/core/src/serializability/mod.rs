//! Strict-serializability checking: completions, committed projections,
//! legality of t-sequential histories and an exhaustive serialization
//! search that reports a witness or an exhaustion certificate.

mod checker;
mod completion;
mod legality;

use thiserror::Error;

pub use checker::{
    check_strict_serializability, equivalent, SearchBound, SerializationVerdict, Witness,
};
pub use completion::{committed_projection, enumerate_completions, Completion, Insertion};
pub use legality::{is_legal_tsequential, latest_written_value};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("history is not t-complete")]
    NotTComplete,
    #[error("history is not t-sequential")]
    NotTSequential,
    #[error("event {0} is not a t-read")]
    NotARead(usize),
}
