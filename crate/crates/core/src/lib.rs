pub mod catalog;
pub mod cli;
pub mod cycnum;
pub mod error;
pub mod groups;
pub mod localfield;
pub mod matgrp;
pub mod multiplicity;
pub mod report;
pub mod repthy;

pub use error::{Error, Result};
