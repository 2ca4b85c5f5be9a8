//! Both sides of the arithmetic Siegel-Weil identity for Shimura curves.
//!
//! The analytic side is the Fourier expansion of a normalized weight 3/2
//! Eisenstein series at `s = 1/2` (value and derivative). The geometric side
//! is the height pairing of special cycles with the metrized Hodge bundle,
//! split into horizontal, vertical and archimedean parts. Every closed form
//! is paired with an independent oracle (form counting, p-adic point
//! counting, lattice enumeration in the Bruhat-Tits tree, dual quadrature).
//!
//! Module layout, bottom-up:
//! - [`arith`]: factorization, Kronecker symbols, `4m = n^2 d`.
//! - [`classnum`]: class numbers, regulators, `H_0(m;D)`, `delta(d;D)`.
//! - [`localpoly`]: the local density polynomials `b_p(n,s;D)` and the
//!   counting oracle for local densities.
//! - [`special`]: gamma, zeta, L-values, `J(t)`, confluent hypergeometric
//!   `Psi`, archimedean Whittaker functions.
//! - [`eisenstein`]: Fourier coefficients of the Eisenstein series.
//! - [`geometry`]: Faltings heights, tree multiplicities, height pairings.
//! - [`checks`]: the identity suites used by the CLI and acceptance tests.

// Input guards use `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod arith;
pub mod checks;
pub mod classnum;
pub mod eisenstein;
mod error;
pub mod geometry;
pub mod localpoly;
pub mod report;
pub mod special;

pub use error::{Error, Result};
pub use report::{CheckReport, CheckStatus};

/// Exact rationals used throughout.
pub type Rational = num_rational::BigRational;

/// Build a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Convert an exact rational to the nearest double.
pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serialize a rational as `{"num": "..", "den": "..", "decimal": f64}`.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Rational", 3)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    st.serialize_field("decimal", &rat_to_f64(r))?;
    st.end()
}
