//! Exact evaluation of nonlinear convolution recurrences for the Taylor
//! coefficients of differentially algebraic power series, together with
//! explicit denominator certificates and the tooling to check them.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`] is an exact power-series toolbox over big rationals. It is
//!   the independent oracle every recurrence is checked against.
//! * [`recurrence`] holds the recurrence data model, its text format and
//!   the evaluation engines (direct enumeration and incremental products).
//! * [`shift`] removes negative convolution offsets from a recurrence.
//! * [`certify`] computes the factorial-type denominator bounds and checks
//!   them prime by prime against computed coefficients.
//! * [`propcheck`] is an exhaustive falsification harness for the
//!   factorial-ratio valuation inequalities behind the bound.
//! * [`catalog`] collects the classical worked examples with their oracles.
//! * [`experiments`] runs the growth and drift experiments and emits CSV/JSON.

pub mod arith;
pub mod catalog;
pub mod certify;
pub mod experiments;
pub mod par;
pub mod poly;
pub mod propcheck;
pub mod recurrence;
pub mod series;
pub mod shift;
pub mod valuation;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub use certify::{DenominatorCertificate, FactoredDivisor, ValuationReport};
pub use par::Exec;
pub use poly::Poly;
pub use recurrence::{CoefficientRule, Denominator, RecurrenceSpec, SeparableTerm};
pub use series::RationalSeries;
