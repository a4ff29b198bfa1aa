pub mod arith;
pub mod blackbox;
pub mod densepoly;
pub mod error;
pub mod interp;
pub mod modroots;
pub mod options;
pub mod oracle;
mod ntt;
pub mod poly;
pub mod shift;

pub use error::{Error, Result};
