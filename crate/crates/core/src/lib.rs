//! XOR-based private information retrieval from two non-colluding
//! replicated databases when the user holds two side-information messages.
//!
//! The scheme is built in [`construct`], decoded in [`retrieve`], made
//! private for any demand/side-information assignment in [`privacy`], and
//! carried over a byte stream by [`netsim`].

pub mod analysis;
pub mod cli;
pub mod construct;
pub mod error;
pub mod gf2;
pub mod netsim;
pub mod privacy;
pub mod retrieve;
pub mod storage;
pub mod types;

pub use error::{Error, Result};
pub use types::{BitRef, Code, Codeword, Db, MessageId, Query, SchemeParams};
