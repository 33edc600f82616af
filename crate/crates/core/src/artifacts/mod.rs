//! Result artifacts and their independent checkers.

pub mod certificate;
pub mod witness;

pub use certificate::{check_certificate, CertCheck, Certificate, CertificateError};
pub use witness::{check_witness, emit_witness, parse_witness, WitnessError};
