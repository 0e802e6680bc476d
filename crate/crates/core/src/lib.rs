#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod characters;
pub mod cones;
pub mod error;
pub mod field;
pub mod instances;
pub mod io;
pub mod lseries;
pub mod measure;
pub mod padic;
pub mod par;

pub use error::{Error, Result};
