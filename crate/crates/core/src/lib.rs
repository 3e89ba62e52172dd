//! Measures induced by multichannel filter banks and iterated function
//! systems.
//!
//! The crate builds the depth-k atomic approximants of the measure a unit
//! vector induces through the word projections of a filter-bank
//! representation, alongside classical scalar-weight IFS fixed-point
//! measures, and compares the two where they are supposed to agree.

pub mod coeff;
pub mod cuntz;
pub mod diagnostics;
pub mod error;
pub mod filterbank;
pub mod hutchinson;
pub mod io;
pub mod laurent;
pub mod nadic;

pub use coeff::CoeffVector;
pub use error::{Error, Result};
pub use filterbank::{FilterBank, ValidationReport};
pub use laurent::LaurentPolynomial;
pub use nadic::{AtomicMeasure, NAdicAddress};

