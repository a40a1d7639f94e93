//! Reference oracles and corpus generators used by the secretsniff test
//! suites. Everything here is written from scratch against the documented
//! matching and hashing rules, independently of the engine code paths it
//! checks, so agreement between the two is evidence rather than tautology.

pub mod corpus;
pub mod diffgen;
pub mod oracle;
pub mod sha256;
pub mod tokens;
