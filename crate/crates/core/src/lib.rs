pub mod error;
pub mod experiment;
pub mod export;
pub mod gcn;
pub mod kg;
pub mod matcher;
pub mod optim;
pub mod synthetic;
pub mod lnb;
pub mod trans;

pub use error::{Error, ErrorKind, Result};
