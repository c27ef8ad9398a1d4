//! Generators and brute-force oracles for the sessioncheck test suites.

pub mod ast_gen;
pub mod oracle;
pub mod overlap;
pub mod protocols;
