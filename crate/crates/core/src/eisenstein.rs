//! Fourier coefficients of the normalized weight 3/2 Eisenstein series
//! `E(tau,s;D)` and of its modification `E(tau,s;D) + sum_{p|D} c_p(s)
//! E(tau,s;D/p)`: exact values at `s = 1/2`, derivatives at `s = 1/2` with
//! their decomposition, and coefficients at general `s`.
//!
//! All coefficients have the factor `q^m` removed. For `m < 0` the factor
//! `e^{-4 pi |m| v}` is kept, and rows also carry the value multiplied by
//! `e^{4 pi |m| v}` so that large `|m| v` does not underflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, decompose, ord_p, Decomposition};
use crate::classnum::{self, H0Value};
use crate::error::{invalid, Error, Result};
use crate::localpoly::{self, b_poly_for};
use crate::report::{CheckReport, Params};
use crate::special::{self, EULER_GAMMA};
use crate::{rat, rat_to_f64, Rational};

// ---------------------------------------------------------------------------
// Normalization.

/// `c(D)` and `Lambda_D(2s+1)`.
#[derive(Debug, Clone, Serialize)]
pub struct Normalization {
    pub big_d: u64,
    pub s: f64,
    /// `c(D) = -(-1)^{ord D} (1/2 pi) D prod_{p|D} (p+1)^{-1}`.
    pub c_d: f64,
    /// `2 pi c(D)`, exactly.
    #[serde(serialize_with = "crate::serialize_rational")]
    pub c_d_times_2pi: Rational,
    /// `Lambda_D(2s+1) = (D/pi)^{s+1/2} Gamma(s+1/2) zeta(2s+1) prod_{p|D} (1 - p^{-2s-1})`.
    pub lambda_d: f64,
    pub product: f64,
}

/// `2 pi c(D)` as an exact rational.
fn c_d_times_2pi(big_d: u64) -> Result<Rational> {
    let ps = arith::squarefree_primes(big_d)?;
    let mut r = rat(big_d as i64, 1);
    for &p in &ps {
        r /= rat(p as i64 + 1, 1);
    }
    Ok(if ps.len() % 2 == 0 { -r } else { r })
}

/// `Lambda_D(w)` at `w = 2s+1`.
fn lambda_d(big_d: u64, w: f64) -> Result<f64> {
    let ps = arith::squarefree_primes(big_d)?;
    let mut euler = 1.0;
    for &p in &ps {
        euler *= 1.0 - (p as f64).powf(-w);
    }
    Ok((big_d as f64 / PI).powf(0.5 * w) * special::gamma(0.5 * w) * special::riemann_zeta(w)? * euler)
}

pub fn normalization(big_d: u64, s: f64) -> Result<Normalization> {
    let c2pi = c_d_times_2pi(big_d)?;
    let c_d = rat_to_f64(&c2pi) / (2.0 * PI);
    let lambda = lambda_d(big_d, 2.0 * s + 1.0)?;
    Ok(Normalization {
        big_d,
        s,
        c_d,
        c_d_times_2pi: c2pi,
        lambda_d: lambda,
        product: c_d * lambda,
    })
}

/// `c_p(s) = 1 - (p^s + p^{-s}) / (p^{1/2} + p^{-1/2})`.
pub fn c_p_modifier(p: u64, s: f64) -> f64 {
    let pf = p as f64;
    1.0 - (pf.powf(s) + pf.powf(-s)) / (pf.sqrt() + 1.0 / pf.sqrt())
}

/// `c_p'(1/2) = -((p-1)/(p+1)) log p`.
pub fn c_p_modifier_deriv_half(p: u64) -> f64 {
    let pf = p as f64;
    -(pf - 1.0) / (pf + 1.0) * pf.ln()
}

/// `C_f(D) = prod_p C_p`, a finite product over `p = 2` and `p | D`.
pub fn c_finite(big_d: u64) -> Result<Complex64> {
    let ps = arith::squarefree_primes(big_d)?;
    let mut out = localpoly::local_constant(2, big_d.is_multiple_of(2));
    for &p in ps.iter().filter(|&&p| p != 2) {
        out *= localpoly::local_constant(p, true);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Values at s = 1/2.

/// `2 delta(d;D') H_0(m;D')` for `m > 0` and any squarefree `D' >= 1`.
fn value_pos(dec: &Decomposition, big_d: u64) -> Result<Rational> {
    let delta = classnum::delta_factor(dec.delta, big_d)?;
    if delta == 0 {
        return Ok(Rational::zero());
    }
    let h0 = classnum::h0_pos(dec.m, big_d)?;
    Ok(rat(2 * delta as i64, 1) * h0)
}

/// Coefficient of `E(tau, 1/2; D)` for `D > 1`: `2 delta(d;D) H_0(m;D)` for
/// `m > 0`, `zeta_D(-1)` for `m = 0` and `0` for `m < 0`.
pub fn coeff_value_half(m: i64, big_d: u64) -> Result<Rational> {
    if big_d == 1 {
        return invalid("D = 1 is the Zagier series; use zagier_coeff");
    }
    arith::squarefree_primes(big_d)?;
    match m.signum() {
        1 => value_pos(&decompose(m)?, big_d),
        0 => classnum::zeta_d_minus_one(big_d),
        _ => Ok(Rational::zero()),
    }
}

/// Coefficient of Zagier's series `E(tau, 1/2; 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct ZagierCoefficient {
    pub m: i64,
    pub v: f64,
    /// Holomorphic part: `2 H_0(m;1) = H(4m)` for `m > 0`, `-1/12` for `m = 0`.
    #[serde(serialize_with = "crate::serialize_rational")]
    pub holomorphic: Rational,
    /// Non-holomorphic part `(1/8 pi) v^{-1/2} int_1^inf e^{-4 pi n^2 v r} r^{-3/2} dr`
    /// summed over `n` with `-n^2 = m`.
    pub nonholomorphic: f64,
}

pub fn zagier_coeff(m: i64, v: f64) -> Result<ZagierCoefficient> {
    if !(v > 0.0) {
        return invalid(format!("v must be positive, got {v}"));
    }
    let mut holomorphic = Rational::zero();
    let mut nonholomorphic = 0.0;
    if m > 0 {
        holomorphic = value_pos(&decompose(m)?, 1)?;
    } else if m == 0 {
        holomorphic = rat(-1, 12);
        // n = 0: the integral of r^{-3/2} over [1, inf) is 2
        nonholomorphic = 2.0 / (8.0 * PI * v.sqrt());
    } else {
        let n2 = m.unsigned_abs();
        if arith::is_square(n2) {
            let c = 4.0 * PI * n2 as f64 * v;
            // n and -n
            nonholomorphic = 2.0 / (8.0 * PI * v.sqrt()) * special::tail_integral(c)?;
        }
    }
    Ok(ZagierCoefficient { m, v, holomorphic, nonholomorphic })
}

// ---------------------------------------------------------------------------
// Derivatives at s = 1/2.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// `m > 0`, no `p | D` split in the field of `d`.
    PosNoSplit,
    /// `m > 0`, exactly one `p | D` split.
    PosUniqueSplit,
    /// `m < 0` with `delta(d;D) != 0`.
    Negative,
    Constant,
    Vanishing,
}

/// The four parts of the derivative in the no-split case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientParts {
    /// `V [ (1/2) log d + L'(1)/L(1) - (1/2) log pi - gamma/2 ]`.
    pub faltings: f64,
    /// `V J(4 pi m v) / 2`.
    pub archimedean_j: f64,
    /// `V sum_{p !| D} (log|n|_p - b_p'/b_p)`.
    pub off_d: f64,
    /// `V sum_{p | D} K_p log p`.
    pub on_d: f64,
}

impl CoefficientParts {
    pub fn total(&self) -> f64 {
        self.faltings + self.archimedean_j + self.off_d + self.on_d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub m: i64,
    pub v: f64,
    pub big_d: u64,
    #[serde(serialize_with = "crate::serialize_rational")]
    pub value_half: Rational,
    pub deriv_half: f64,
    /// `deriv_half * e^{scale_exponent}`; the exponent is `4 pi |m| v` for
    /// `m < 0` and `0` otherwise.
    pub deriv_half_scaled: f64,
    pub scale_exponent: f64,
    pub case_tag: CaseTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<CoefficientParts>,
    /// The unique split prime in the `PosUniqueSplit` case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_prime: Option<u64>,
    /// `D` has an odd number of prime factors, so it is not the
    /// discriminant of an indefinite quaternion algebra.
    pub odd_prime_count: bool,
}

/// `K_p` for `p | D` with `chi_d(p) != 1`.
pub fn k_p(p: u64, k: u32, chi: i32) -> Result<Rational> {
    let pk = Rational::from_integer(num_bigint::BigInt::from(p).pow(k));
    let pr = rat(p as i64, 1);
    let kr = rat(k as i64, 1);
    let one = Rational::one();
    match chi {
        -1 => Ok(-kr + (&pr + &one) * (&pk - &one) / (rat(2, 1) * (&pr - &one))),
        0 => Ok(-one.clone() - kr + (&pk * &pr - &one) / (&pr - &one)),
        _ => invalid(format!("K_p is defined for chi = 0, -1, got {chi}")),
    }
}

struct SplitInfo {
    dec: Decomposition,
    primes_d: Vec<u64>,
    split: Vec<u64>,
}

fn split_info(m: i64, big_d: u64) -> Result<SplitInfo> {
    let primes_d = arith::squarefree_primes(big_d)?;
    let dec = decompose(m)?;
    let split = primes_d.iter().copied().filter(|&p| dec.chi(p) == 1).collect();
    Ok(SplitInfo { dec, primes_d, split })
}

fn check_v(v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return invalid(format!("v must be positive, got {v}"));
    }
    Ok(())
}

fn base_row(m: i64, v: f64, big_d: u64, primes_d: &[u64], tag: CaseTag) -> CoefficientRow {
    CoefficientRow {
        m,
        v,
        big_d,
        value_half: Rational::zero(),
        deriv_half: 0.0,
        deriv_half_scaled: 0.0,
        scale_exponent: if m < 0 { 4.0 * PI * m.unsigned_abs() as f64 * v } else { 0.0 },
        case_tag: tag,
        parts: None,
        split_prime: None,
        odd_prime_count: primes_d.len() % 2 == 1,
    }
}

fn sum_p_log_p_over_p_minus_1(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| p as f64 * (p as f64).ln() / (p as f64 - 1.0)).sum()
}

/// Derivative at `s = 1/2` of the modified series from its closed forms.
pub fn coeff_deriv_half(m: i64, v: f64, big_d: u64) -> Result<CoefficientRow> {
    check_v(v)?;
    if big_d == 1 {
        return invalid("the derivative for D = 1 is not supported");
    }
    if m == 0 {
        let primes_d = arith::squarefree_primes(big_d)?;
        let zeta_d = classnum::zeta_d_minus_one(big_d)?;
        let bracket = 0.5 * v.ln() - 2.0 * special::zeta_logderiv_at_minus1_direct() - 1.0
            + 2.0 * special::metric_constant()
            + sum_p_log_p_over_p_minus_1(&primes_d);
        let d = rat_to_f64(&zeta_d) * bracket;
        let mut row = base_row(m, v, big_d, &primes_d, CaseTag::Constant);
        row.value_half = zeta_d;
        row.deriv_half = d;
        row.deriv_half_scaled = d;
        return Ok(row);
    }
    let info = split_info(m, big_d)?;
    let dec = &info.dec;
    if m < 0 {
        let delta = classnum::delta_factor(dec.delta, big_d)?;
        let mut row = base_row(m, v, big_d, &info.primes_d, CaseTag::Vanishing);
        if delta == 0 {
            return Ok(row);
        }
        let h0 = match classnum::h0(m, big_d)? {
            H0Value::Real(x) => x,
            _ => return Err(Error::Internal("expected a real H_0 for m < 0".into())),
        };
        let c = row.scale_exponent;
        let am = m.unsigned_abs() as f64;
        let scaled = 2.0 * delta as f64 * h0 / (4.0 * PI) / (am.sqrt() * v.sqrt())
            * special::tail_integral_scaled(c)?;
        row.case_tag = CaseTag::Negative;
        row.deriv_half_scaled = scaled;
        row.deriv_half = scaled * (-c).exp();
        return Ok(row);
    }
    match info.split.len() {
        0 => {
            let delta = classnum::delta_factor(dec.delta, big_d)?;
            let h0 = classnum::h0_pos(m, big_d)?;
            let value = rat(2 * delta as i64, 1) * h0;
            let vf = rat_to_f64(&value);
            let lv = special::l_values(dec.delta)?;
            let d = dec.d() as f64;
            let faltings = vf * (0.5 * d.ln() + lv.logderiv1 - 0.5 * PI.ln() - 0.5 * EULER_GAMMA);
            let archimedean_j = vf * 0.5 * special::j_integral(4.0 * PI * m as f64 * v)?;
            let mut off = 0.0;
            for p in arith::factorize(dec.n).primes() {
                if big_d.is_multiple_of(p) {
                    continue;
                }
                let k = ord_p(dec.n, p);
                let ld = localpoly::b_logderiv_zero(p, k, dec.chi(p), false)?;
                off += (-(k as f64) - rat_to_f64(&ld)) * (p as f64).ln();
            }
            let mut on = 0.0;
            for &p in &info.primes_d {
                let kp = k_p(p, ord_p(dec.n, p), dec.chi(p))?;
                on += rat_to_f64(&kp) * (p as f64).ln();
            }
            let parts = CoefficientParts {
                faltings,
                archimedean_j,
                off_d: vf * off,
                on_d: vf * on,
            };
            let mut row = base_row(m, v, big_d, &info.primes_d, CaseTag::PosNoSplit);
            row.value_half = value;
            row.deriv_half = parts.total();
            row.deriv_half_scaled = row.deriv_half;
            row.parts = Some(parts);
            Ok(row)
        }
        1 => {
            let p = info.split[0];
            let delta = classnum::delta_factor(dec.delta, big_d / p)?;
            let h0 = classnum::h0_pos(m, big_d)?;
            let k = ord_p(dec.n, p);
            let d = 2.0 * delta as f64 * rat_to_f64(&h0) * ((p as f64).powi(k as i32) - 1.0) * (p as f64).ln();
            let mut row = base_row(m, v, big_d, &info.primes_d, CaseTag::PosUniqueSplit);
            row.deriv_half = d;
            row.deriv_half_scaled = d;
            row.split_prime = Some(p);
            Ok(row)
        }
        _ => Ok(base_row(m, v, big_d, &info.primes_d, CaseTag::Vanishing)),
    }
}

/// Rows for many indices, computed in parallel and ordered as given.
pub fn coeff_deriv_half_batch(ms: &[i64], v: f64, big_d: u64) -> Vec<Result<CoefficientRow>> {
    ms.par_iter().map(|&m| coeff_deriv_half(m, v, big_d)).collect()
}

/// `b_p(n,0;D)` and `b_p'(n,0;D)` (derivative in `s`) for every prime that
/// can contribute, from the polynomials.
fn local_factors_at_zero(m: i64, big_d: u64, dec: &Decomposition) -> Result<Vec<(u64, f64, f64)>> {
    let mut primes: Vec<u64> = arith::factorize(dec.n).primes().collect();
    primes.extend(arith::squarefree_primes(big_d)?);
    primes.sort_unstable();
    primes.dedup();
    primes
        .into_iter()
        .map(|p| {
            let b = b_poly_for(p, m, big_d)?;
            Ok((
                p,
                rat_to_f64(&b.value_at_zero()),
                rat_to_f64(&b.deriv_at_zero()) * (p as f64).ln(),
            ))
        })
        .collect()
}

/// `d/ds prod_p b_p(n, 1/2 - s; D)` at `s = 1/2`, together with the product.
fn local_product_and_derivative(factors: &[(u64, f64, f64)]) -> (f64, f64) {
    let product: f64 = factors.iter().map(|f| f.1).product();
    let mut deriv = 0.0;
    for (i, f) in factors.iter().enumerate() {
        let others: f64 = factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.1)
            .product();
        deriv -= f.2 * others;
    }
    (product, deriv)
}

/// `E_m(tau, 1/2; D')` for the modification terms, `D' >= 1`.
fn value_half_for_modifier(m: i64, v: f64, big_d: u64) -> Result<f64> {
    if big_d == 1 {
        let z = zagier_coeff(m, v)?;
        return Ok(rat_to_f64(&z.holomorphic) + z.nonholomorphic);
    }
    Ok(rat_to_f64(&coeff_value_half(m, big_d)?))
}

/// Derivative at `s = 1/2` of the unmodified series `E(tau,s;D)`, from the
/// product formula for its Fourier coefficients: archimedean factor by
/// quadrature, `L(s,chi)` through Hurwitz zeta and the local factors by
/// polynomial calculus. For `m < 0` returns the value times `e^{4 pi |m| v}`.
pub fn unmodified_deriv_half(m: i64, v: f64, big_d: u64) -> Result<Complex64> {
    check_v(v)?;
    let primes_d = arith::squarefree_primes(big_d)?;
    if big_d == 1 {
        return invalid("the derivative for D = 1 is not supported");
    }
    let df = big_d as f64;
    if m == 0 {
        if primes_d.len() < 2 {
            return invalid("constant term derivative needs at least two primes in D");
        }
        // 2 Lambda_D'(2)/Lambda_D(2)
        let two_ld = (df / PI).ln() + special::digamma(1.0)? + 2.0 * special::zeta_logderiv_at_2()
            + primes_d.iter().map(|&p| 2.0 * (p as f64).ln() / ((p * p) as f64 - 1.0)).sum::<f64>();
        let base = rat_to_f64(&classnum::zeta_d_minus_one(big_d)?);
        return Ok(Complex64::new(base * (0.5 * v.ln() + 1.0 + two_ld), 0.0));
    }
    let dec = decompose(m)?;
    let cf = c_finite(big_d)?;
    let cd = rat_to_f64(&c_d_times_2pi(big_d)?) / (2.0 * PI);
    let nd = (dec.n * big_d) as f64;
    let factors = local_factors_at_zero(m, big_d, &dec)?;
    let (prod, prod_deriv) = local_product_and_derivative(&factors);
    if m < 0 {
        if dec.is_split_field() {
            if primes_d.len() < 2 {
                return invalid("4m = -n^2 with prime D has a pole of L(s) against a single local zero");
            }
            // at least two local zeros against the simple pole of zeta
            return Ok(Complex64::new(0.0, 0.0));
        }
        let l1 = special::dirichlet_l(dec.delta, 1.0)?;
        let w_prime = special::whittaker_deriv_half_neg_scaled_alt(m, v)?;
        return Ok(cd * cf * (df / PI) * w_prime * (l1 / nd * prod));
    }
    let w = special::whittaker_arch(m, v, 0.5)?;
    let (l, dl) = special::dirichlet_l_with_deriv(dec.delta, 1.0)?;
    let logderiv = (df / PI).ln() + special::digamma(2.0)? + special::whittaker_logderiv_half(m, v)? + dl / l
        - 2.0 * nd.ln();
    Ok(cd * cf * (df / PI) * w * (l / nd) * (prod * logderiv + prod_deriv))
}

/// Derivative at `s = 1/2` of the modified series assembled as
/// `E'(D) + sum_{p|D} c_p'(1/2) E(D/p)`, independent of the closed forms
/// used by [`coeff_deriv_half`]. Requires at least two primes in `D`.
pub fn coeff_modified_deriv(m: i64, v: f64, big_d: u64) -> Result<CoefficientRow> {
    check_v(v)?;
    let primes_d = arith::squarefree_primes(big_d)?;
    if primes_d.len() < 2 {
        return invalid("the assembled derivative requires at least two primes dividing D");
    }
    let unmod = unmodified_deriv_half(m, v, big_d)?;
    let c = if m < 0 { 4.0 * PI * m.unsigned_abs() as f64 * v } else { 0.0 };
    let mut total = unmod.re;
    for &p in &primes_d {
        let e = value_half_for_modifier(m, v, big_d / p)?;
        // the D/p terms carry no e^{-c} rescaling: they vanish for m < 0
        total += c_p_modifier_deriv_half(p) * e;
    }
    let info = if m == 0 { None } else { Some(split_info(m, big_d)?) };
    let tag = if m == 0 {
        CaseTag::Constant
    } else if m < 0 {
        if total == 0.0 {
            CaseTag::Vanishing
        } else {
            CaseTag::Negative
        }
    } else {
        match info.as_ref().map_or(0, |i| i.split.len()) {
            0 => CaseTag::PosNoSplit,
            1 => CaseTag::PosUniqueSplit,
            _ => CaseTag::Vanishing,
        }
    };
    let mut row = base_row(m, v, big_d, &primes_d, tag);
    row.value_half = coeff_value_half(m, big_d)?;
    if tag == CaseTag::PosUniqueSplit {
        row.split_prime = info.map(|i| i.split[0]);
    }
    row.deriv_half_scaled = total;
    row.deriv_half = total * (-c).exp();
    if unmod.im.abs() > 1e-9 * unmod.re.abs().max(1e-300) {
        return Err(Error::Internal(format!(
            "assembled coefficient not real: m={m}, D={big_d}, im={:e}",
            unmod.im
        )));
    }
    Ok(row)
}

/// The intermediate expression for the unmodified derivative when exactly
/// one `p | D` splits: `-2 delta(d;D/p) H_0(m;D) (p+1)^{-1} (1+p-2p^{k+1}) log p`.
pub fn unique_split_unmodified(m: i64, big_d: u64) -> Result<f64> {
    let info = split_info(m, big_d)?;
    if m <= 0 || info.split.len() != 1 {
        return invalid("requires m > 0 and exactly one split prime dividing D");
    }
    let p = info.split[0];
    let pf = p as f64;
    let k = ord_p(info.dec.n, p) as i32;
    let delta = classnum::delta_factor(info.dec.delta, big_d / p)? as f64;
    let h0 = rat_to_f64(&classnum::h0_pos(m, big_d)?);
    Ok(-2.0 * delta * h0 / (pf + 1.0) * (1.0 + pf - 2.0 * pf.powi(k + 1)) * pf.ln())
}

/// The constant-term bracket before the modification, in its
/// `zeta'(2)/zeta(2)` form, plus the modification:
/// `zeta_D(-1)[ (1/2) log v + 1 - log pi - gamma + 2 zeta'(2)/zeta(2) + sum p log p/(p-1) ]`.
pub fn constant_deriv_zeta2_form(v: f64, big_d: u64) -> Result<f64> {
    check_v(v)?;
    let primes_d = arith::squarefree_primes(big_d)?;
    let base = rat_to_f64(&classnum::zeta_d_minus_one(big_d)?);
    Ok(base
        * (0.5 * v.ln() + 1.0 - PI.ln() - EULER_GAMMA + 2.0 * special::zeta_logderiv_at_2()
            + sum_p_log_p_over_p_minus_1(&primes_d)))
}

// ---------------------------------------------------------------------------
// General s.

#[derive(Debug, Clone, Serialize)]
pub struct GeneralCoefficient {
    pub m: i64,
    pub v: f64,
    pub s: f64,
    pub big_d: u64,
    pub value: f64,
    /// `Lambda(s + 1/2, chi_m; D)` for `m != 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_completed: Option<f64>,
}

/// `Lambda(w, chi_m; D) = (4|m|D^2/pi)^{w/2} Gamma((w+a)/2) L(w,chi_d) prod_p b_p(n,w;D)`
/// with `a = (1 + sgn m)/2`.
pub fn lambda_completed(m: i64, big_d: u64, w: f64) -> Result<f64> {
    if m == 0 {
        return invalid("Lambda(s, chi_m; D) needs m != 0");
    }
    let dec = decompose(m)?;
    let primes_d = arith::squarefree_primes(big_d)?;
    let a = if m > 0 { 1.0 } else { 0.0 };
    let l = if dec.is_split_field() {
        special::riemann_zeta(w)?
    } else {
        special::dirichlet_l(dec.delta, w)?
    };
    let mut primes: Vec<u64> = arith::factorize(dec.n).primes().collect();
    primes.extend(primes_d);
    primes.sort_unstable();
    primes.dedup();
    let mut prod = 1.0;
    for p in primes {
        prod *= b_poly_for(p, m, big_d)?.eval_s(w);
    }
    let df = big_d as f64;
    let scale = (4.0 * m.unsigned_abs() as f64 * df * df / PI).powf(0.5 * w);
    Ok(scale * special::gamma(0.5 * (w + a)) * l * prod)
}

fn prod_p_plus_1(big_d: u64) -> Result<f64> {
    Ok(arith::squarefree_primes(big_d)?.iter().map(|&p| p as f64 + 1.0).product())
}

/// `G_D(s) = v^{s/2 - 1/4} xi(1+2s) (s + 1/2) prod_{p|D} (p^{-1/2-s} - p^{1/2+s})`.
fn g_d(v: f64, s: f64, big_d: u64) -> Result<f64> {
    let mut prod = 1.0;
    for p in arith::squarefree_primes(big_d)? {
        let pf = p as f64;
        prod *= pf.powf(-0.5 - s) - pf.powf(0.5 + s);
    }
    // (s + 1/2) xi(1+2s) = pi^{-(s+1/2)} Gamma(s+3/2) zeta(1+2s), regular at s = -1/2
    let xi_times = PI.powf(-(s + 0.5)) * special::gamma(s + 1.5) * special::riemann_zeta(1.0 + 2.0 * s)?;
    Ok(v.powf(0.5 * s - 0.25) * xi_times * prod)
}

/// Fourier coefficient of `E(tau, s; D)` at general `s`.
pub fn coeff_general(m: i64, v: f64, s: f64, big_d: u64) -> Result<GeneralCoefficient> {
    check_v(v)?;
    if big_d == 1 {
        return invalid("general-s coefficients require D > 1");
    }
    if !(s.abs() <= 2.0) {
        return invalid(format!("s = {s} outside the supported band |s| <= 2"));
    }
    let pp = prod_p_plus_1(big_d)?;
    let am = m.unsigned_abs() as f64;
    let z = 4.0 * PI * am * v;
    let (value, lambda) = match m.signum() {
        1 => {
            let lam = lambda_completed(m, big_d, 0.5 + s)?;
            (lam * z.powf(0.5 * s - 0.25) * special::psi_n(-1.5, s, z)? / (PI.sqrt() * pp), Some(lam))
        }
        -1 => {
            let lam = lambda_completed(m, big_d, 0.5 + s)?;
            let val = (s * s - 0.25) * lam * z.powf(0.5 * s - 0.25) * special::psi_n(1.5, s, z)?
                / (4.0 * PI.sqrt() * pp)
                * (-z).exp();
            (val, Some(lam))
        }
        _ => {
            if s.abs() < 1e-6 {
                return invalid("the constant term is evaluated only for |s| >= 1e-6");
            }
            let g = g_d(v, s, big_d)? + g_d(v, -s, big_d)?;
            (-(big_d as f64) / (2.0 * PI * pp) * g, None)
        }
    };
    Ok(GeneralCoefficient { m, v, s, big_d, value, lambda_completed: lambda })
}

/// The same coefficient assembled from the product formula with complex
/// local constants: `c(D) C_f(D) (D/pi)^{s+1/2} Gamma(s+3/2) W_m(s)
/// L(s+1/2,chi_d) (nD)^{-2s} prod_p b_p(n,1/2-s;D)` for `m != 0`, and the
/// two-term constant term for `m = 0`.
pub fn coeff_general_product(m: i64, v: f64, s: f64, big_d: u64) -> Result<Complex64> {
    check_v(v)?;
    let primes_d = arith::squarefree_primes(big_d)?;
    let df = big_d as f64;
    let cd = rat_to_f64(&c_d_times_2pi(big_d)?) / (2.0 * PI);
    let cf = c_finite(big_d)?;
    let w = special::whittaker_arch(m, v, s)?;
    let common = cd * cf * (df / PI).powf(s + 0.5) * special::gamma(s + 1.5) * w;
    if m == 0 {
        let first = v.powf(0.5 * (s - 0.5)) * (s + 0.5) * cd * lambda_d(big_d, 2.0 * s + 1.0)?;
        let mut euler = 1.0;
        for &p in &primes_d {
            euler *= 1.0 - (p as f64).powf(1.0 - 2.0 * s);
        }
        return Ok(first + common * (special::riemann_zeta(2.0 * s)? * euler));
    }
    let dec = decompose(m)?;
    let l = if dec.is_split_field() {
        special::riemann_zeta(s + 0.5)?
    } else {
        special::dirichlet_l(dec.delta, s + 0.5)?
    };
    let mut primes: Vec<u64> = arith::factorize(dec.n).primes().collect();
    primes.extend(primes_d);
    primes.sort_unstable();
    primes.dedup();
    let mut prod = 1.0;
    for p in primes {
        prod *= b_poly_for(p, m, big_d)?.eval_s(0.5 - s);
    }
    let nd = (dec.n * big_d) as f64;
    Ok(common * (l * nd.powf(-2.0 * s) * prod))
}

// ---------------------------------------------------------------------------
// Constants.

/// `c(D) C_f(D) = -(1/sqrt 2) zeta_8^{-1} (1/2 pi) prod (p+1)^{-1}` and
/// `c(D) C_f(D) C_inf = prod (p+1)^{-1}` for `D` in `{6, 10, 15, 21}`.
pub fn constants_check() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let zeta8_inv = Complex64::from_polar(1.0, -PI / 4.0);
    for big_d in [6u64, 10, 15, 21] {
        let cd = rat_to_f64(&c_d_times_2pi(big_d)?) / (2.0 * PI);
        let pp = prod_p_plus_1(big_d)?;
        let lhs = cd * c_finite(big_d)?;
        let rhs = -zeta8_inv * (std::f64::consts::FRAC_1_SQRT_2 / (2.0 * PI * pp));
        let params = Params::new().with("D", big_d);
        out.push(complex_report("c(D)C_f(D)", params.clone(), lhs, rhs, 1e-12));
        let lhs = lhs * special::c_infinity();
        out.push(complex_report(
            "c(D)C_f(D)C_inf",
            params,
            lhs,
            Complex64::new(1.0 / pp, 0.0),
            1e-12,
        ));
    }
    Ok(out)
}

fn complex_report(name: &str, params: Params, lhs: Complex64, rhs: Complex64, tol: f64) -> CheckReport {
    let diff = (lhs - rhs).norm();
    let scale = lhs.norm().max(rhs.norm());
    let mut r = CheckReport::float(name, params, lhs.re, rhs.re, tol);
    r.abs_residual = diff;
    r.rel_residual = if scale == 0.0 { 0.0 } else { diff / scale };
    r.status = if r.rel_residual <= tol {
        crate::CheckStatus::Pass
    } else {
        crate::CheckStatus::Fail
    };
    r.with_note(format!("imaginary parts {:.3e} vs {:.3e}", lhs.im, rhs.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::relative_residual as rel;

    #[test]
    fn normalization_examples() {
        for (d, expect) in [(6u64, rat(-1, 6)), (10, rat(-1, 3)), (15, rat(-2, 3))] {
            let n = normalization(d, 0.5).unwrap();
            assert!((n.product - rat_to_f64(&expect)).abs() < 1e-13, "D={d}");
            assert_eq!(classnum::zeta_d_minus_one(d).unwrap(), expect);
        }
        let n = normalization(1, 0.5).unwrap();
        assert!((n.product + 1.0 / 12.0).abs() < 1e-13);
        assert!(normalization(12, 0.5).is_err());
    }

    #[test]
    fn c_p_modifier_properties() {
        for p in [2u64, 3, 5, 7] {
            assert!(c_p_modifier(p, 0.5).abs() < 1e-15);
            assert!(c_p_modifier(p, -0.5).abs() < 1e-15);
            assert!((c_p_modifier(p, 0.3) - c_p_modifier(p, -0.3)).abs() < 1e-15);
            let h = 1e-5;
            let num = (c_p_modifier(p, 0.5 + h) - c_p_modifier(p, 0.5 - h)) / (2.0 * h);
            assert!((num - c_p_modifier_deriv_half(p)).abs() < 1e-8);
        }
        assert!((c_p_modifier_deriv_half(2) + 2f64.ln() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn value_examples() {
        assert_eq!(coeff_value_half(1, 6).unwrap(), rat(1, 1));
        assert_eq!(coeff_value_half(0, 6).unwrap(), rat(-1, 6));
        assert_eq!(coeff_value_half(-2, 6).unwrap(), rat(0, 1));
        assert!(coeff_value_half(3, 1).is_err());
    }

    #[test]
    fn value_matches_degree() {
        for big_d in [6u64, 10, 22, 15, 21, 26, 33, 34, 35, 38] {
            for m in 1..=200 {
                assert_eq!(
                    coeff_value_half(m, big_d).unwrap(),
                    classnum::degree_z(m, big_d).unwrap(),
                    "m={m} D={big_d}"
                );
            }
        }
    }

    #[test]
    fn zagier_examples() {
        assert_eq!(zagier_coeff(1, 1.0).unwrap().holomorphic, rat(1, 2));
        assert_eq!(zagier_coeff(3, 1.0).unwrap().holomorphic, rat(4, 3));
        assert_eq!(zagier_coeff(0, 1.0).unwrap().holomorphic, rat(-1, 12));
        for m in 1..60 {
            assert_eq!(zagier_coeff(m, 1.0).unwrap().holomorphic, classnum::hurwitz(4 * m as u64));
        }
        let z = zagier_coeff(-4, 0.5).unwrap();
        let expect = 1.0 / (4.0 * PI * 0.5f64.sqrt()) * special::tail_integral(8.0 * PI).unwrap();
        assert!(rel(z.nonholomorphic, expect) < 1e-14);
        assert_eq!(zagier_coeff(-3, 1.0).unwrap().nonholomorphic, 0.0);
    }

    #[test]
    fn k_p_examples() {
        assert_eq!(k_p(3, 1, -1).unwrap(), rat(1, 1));
        for p in [2u64, 3, 5] {
            assert_eq!(k_p(p, 0, 0).unwrap(), rat(0, 1));
            assert_eq!(k_p(p, 0, -1).unwrap(), rat(0, 1));
        }
        assert!(k_p(2, 1, 1).is_err());
    }

    #[test]
    fn k_p_matches_modified_log_derivative() {
        // -1 - k - b'/b/log p + c' (1-chi)^{-1} b_p(n,0;D/p)/... with c' = -(p-1)/(p+1)
        for p in [2u64, 3, 5, 7] {
            for k in 0..5 {
                for chi in [-1, 0] {
                    let ld = localpoly::b_poly(p, k, chi, true).unwrap().logderiv_at_zero().unwrap();
                    let off = localpoly::b_at_zero(p, k, chi, false).unwrap();
                    let c_prime = rat(1 - p as i64, p as i64 + 1);
                    let expr = rat(-1 - k as i64, 1) - ld + c_prime * off / rat(1 - chi as i64, 1);
                    assert_eq!(expr, k_p(p, k, chi).unwrap(), "p={p} k={k} chi={chi}");
                }
            }
        }
    }

    #[test]
    fn constants() {
        let reports = constants_check().unwrap();
        assert_eq!(reports.len(), 8);
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn deriv_examples_and_tags() {
        let row = coeff_deriv_half(1, 1.0, 6).unwrap();
        assert_eq!(row.case_tag, CaseTag::PosNoSplit);
        assert!(rel(row.deriv_half, row.parts.unwrap().total()) < 1e-15);
        assert_eq!(row.value_half, rat(1, 1));
        let row = coeff_deriv_half(-3, 1.0, 6).unwrap();
        assert_eq!(row.case_tag, CaseTag::Negative);
        let dec = decompose(-3).unwrap();
        let delta = classnum::delta_factor(dec.delta, 6).unwrap() as f64;
        let h0 = classnum::h0(-3, 6).unwrap().to_f64();
        let expect = 2.0 * delta * h0 / (4.0 * PI) / 3f64.sqrt() * special::tail_integral(12.0 * PI).unwrap();
        assert!(rel(row.deriv_half, expect) < 1e-12);
        // m = -1: 4m = -2^2, the split algebra
        assert_eq!(coeff_deriv_half(-1, 1.0, 6).unwrap().case_tag, CaseTag::Vanishing);
        assert_eq!(coeff_deriv_half(0, 1.0, 6).unwrap().case_tag, CaseTag::Constant);
        assert!(coeff_deriv_half(1, 1.0, 1).is_err());
        assert!(coeff_deriv_half(1, 0.0, 6).is_err());
        assert!(coeff_deriv_half(1, 1.0, 3).unwrap().odd_prime_count);
    }

    #[test]
    fn vanishing_case_is_exactly_zero() {
        for big_d in [6u64, 10, 15] {
            for m in -60..=60i64 {
                let row = coeff_deriv_half(m, 0.8, big_d).unwrap();
                if row.case_tag == CaseTag::Vanishing {
                    assert_eq!(row.deriv_half, 0.0);
                    assert!(row.value_half.is_zero());
                }
                if matches!(row.case_tag, CaseTag::Negative | CaseTag::PosUniqueSplit) {
                    assert!(row.value_half.is_zero());
                }
            }
        }
    }

    #[test]
    fn two_assembly_routes_agree() {
        for big_d in [6u64, 10, 15, 21] {
            for m in -25..=40i64 {
                for v in [0.3, 1.0] {
                    let a = coeff_deriv_half(m, v, big_d).unwrap();
                    let b = coeff_modified_deriv(m, v, big_d).unwrap();
                    assert_eq!(a.case_tag, b.case_tag, "m={m} D={big_d}");
                    let err = (a.deriv_half_scaled - b.deriv_half_scaled).abs();
                    assert!(
                        err <= 1e-10 * a.deriv_half_scaled.abs().max(1e-2),
                        "m={m} v={v} D={big_d}: {} vs {}",
                        a.deriv_half_scaled,
                        b.deriv_half_scaled
                    );
                }
            }
        }
    }

    #[test]
    fn unique_split_intermediate() {
        let mut seen = 0;
        for big_d in [6u64, 10, 15] {
            for m in 1..60i64 {
                let Ok(inter) = unique_split_unmodified(m, big_d) else { continue };
                let direct = unmodified_deriv_half(m, 1.0, big_d).unwrap();
                assert!((inter - direct.re).abs() < 1e-10 * inter.abs().max(1.0), "m={m} D={big_d}");
                seen += 1;
            }
        }
        assert!(seen > 10);
    }

    #[test]
    fn constant_term_zeta_forms() {
        for big_d in [6u64, 10, 35] {
            for v in [0.5, 1.0, 3.0] {
                let a = coeff_deriv_half(0, v, big_d).unwrap().deriv_half;
                let b = constant_deriv_zeta2_form(v, big_d).unwrap();
                assert!(rel(a, b) < 1e-11, "D={big_d} v={v}");
            }
        }
    }

    #[test]
    fn general_coefficient_examples() {
        let a = coeff_general(1, 1.0, 0.3, 6).unwrap().value;
        let b = coeff_general(1, 1.0, -0.3, 6).unwrap().value;
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
        let half = coeff_general(1, 1.0, 0.5, 6).unwrap().value;
        assert!(rel(half, rat_to_f64(&coeff_value_half(1, 6).unwrap())) < 1e-9);
        let l1 = lambda_completed(3, 6, 0.7).unwrap();
        let l2 = lambda_completed(3, 6, 0.3).unwrap();
        assert!(rel(l1, l2) < 1e-9);
    }

    #[test]
    fn general_coefficient_symmetry_grid() {
        for big_d in [6u64, 10] {
            for m in [-3i64, 1, 2, 5] {
                for s in [0.1, 0.25, 0.4] {
                    for v in [0.5, 1.0, 2.0] {
                        let a = coeff_general(m, v, s, big_d).unwrap().value;
                        let b = coeff_general(m, v, -s, big_d).unwrap().value;
                        assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-12), "m={m} s={s} v={v} D={big_d}");
                    }
                }
            }
        }
    }

    #[test]
    fn general_coefficient_matches_product_formula() {
        for big_d in [6u64, 10, 15] {
            for m in [-5i64, -3, -1, 0, 1, 2, 3, 7] {
                for s in [0.2, 0.35, 0.8] {
                    let a = coeff_general(m, 0.9, s, big_d).unwrap().value;
                    let b = coeff_general_product(m, 0.9, s, big_d).unwrap();
                    assert!(b.im.abs() <= 1e-12 * b.norm().max(1e-300), "m={m} s={s}");
                    assert!(rel(a, b.re) < 1e-9, "m={m} s={s} D={big_d}: {a} {}", b.re);
                }
            }
        }
    }

    #[test]
    fn constant_term_limit_matches_value() {
        // s -> 1/2 of the constant term is zeta_D(-1)
        let a = coeff_general(0, 1.3, 0.5, 6).unwrap().value;
        assert!(rel(a, -1.0 / 6.0) < 1e-9, "{a}");
    }
}
