//! Certified lower bounds for large gaps between zeros of the zeta function.
//!
//! Structure integrals are exact rationals; series evaluation and lemma sums are generic
//! over [`scalar::Real`], implemented for `f32`, `f64` and the arbitrary-precision [`BigReal`].

pub mod arith;
pub mod combinat;
pub mod error;
pub mod lab;
pub mod moments;
pub mod optimize;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use optimize::{certify, lambda_r, optimize_poly, verify_certificate, Certificate, LambdaReport, SearchState};
pub use poly::{parse_poly_spec, RationalPoly};
pub use scalar::{BigReal, Precision, Real};
pub use series::{CriterionSeries, GapConfig, SeriesEvaluation, TailCertificate};

/// Exact rational used for every structure integral.
pub type Rational = num_rational::BigRational;

pub type Series64 = series::RealSeries<f64>;
pub type SeriesBig = series::RealSeries<BigReal>;
pub type Evaluation64 = SeriesEvaluation<f64>;
pub type EvaluationBig = SeriesEvaluation<BigReal>;
pub type Report64 = LambdaReport<f64>;
pub type ReportBig = LambdaReport<BigReal>;
pub type Row64 = lab::ComparisonRow<f64>;
pub type RowBig = lab::ComparisonRow<BigReal>;
pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexBig = num_complex::Complex<BigReal>;
