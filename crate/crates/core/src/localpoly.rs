//! Local density polynomials `b_p(n,s;D)` in `X = p^{-s}`, their values and
//! logarithmic derivatives at `s = 0`, the non-archimedean Whittaker
//! factors, and a p-adic point-counting oracle for the local densities of
//! the trace-zero lattice plus `r` hyperbolic planes.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, decompose, is_prime};
use crate::error::{invalid, Error, Result};
use crate::{rat, Rational};

fn rpow(p: u64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(p).pow(e))
}

/// `p^e` for a possibly negative exponent.
fn rpow_signed(p: u64, e: i64) -> Rational {
    if e >= 0 {
        rpow(p, e as u32)
    } else {
        rpow(p, (-e) as u32).recip()
    }
}

// ---------------------------------------------------------------------------
// Dense rational polynomials in one variable.

fn poly_trim(mut c: Vec<Rational>) -> Vec<Rational> {
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn poly_add_term(c: &mut Vec<Rational>, deg: usize, coeff: Rational) {
    if c.len() <= deg {
        c.resize(deg + 1, Rational::zero());
    }
    c[deg] += coeff;
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_eval(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
}

fn poly_eval_f64(c: &[Rational], x: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, a| acc * x + crate::rat_to_f64(a))
}

fn poly_derivative(c: &[Rational]) -> Vec<Rational> {
    if c.len() <= 1 {
        return vec![Rational::zero()];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(j, a)| a * Rational::from_integer(j.into()))
        .collect()
}

/// Exact quotient of `num` by `1 - p X^2`, or `None` if the remainder is nonzero.
fn div_one_minus_px2(num: &[Rational], p: u64) -> Option<Vec<Rational>> {
    let pr = rpow(p, 1);
    let len = num.len();
    if len < 3 {
        return if num.iter().all(|c| c.is_zero()) {
            Some(vec![Rational::zero()])
        } else {
            None
        };
    }
    // q_j = num_j + p q_{j-2}; the terms q_{len-2}, q_{len-1} must vanish.
    let mut q: Vec<Rational> = Vec::with_capacity(len);
    for j in 0..len {
        let prev = if j >= 2 { &q[j - 2] * &pr } else { Rational::zero() };
        q.push(&num[j] + prev);
    }
    if !q[len - 2].is_zero() || !q[len - 1].is_zero() {
        return None;
    }
    q.truncate(len - 2);
    Some(poly_trim(q))
}

// ---------------------------------------------------------------------------
// b_p(n, s; D).

/// `b_p(n,s;D)` as an exact polynomial in `X = p^{-s}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPolynomial {
    pub p: u64,
    /// `k = ord_p(n)`.
    pub k: u32,
    /// `chi_d(p)`.
    pub chi: i32,
    /// Whether `p | D`.
    pub on_d: bool,
    /// Coefficient of `X^j` at index `j`.
    #[serde(serialize_with = "serialize_rationals")]
    pub coeffs: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&r.to_string())?;
    }
    seq.end()
}

fn check_args(p: u64, chi: i32) -> Result<()> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if !(-1..=1).contains(&chi) {
        return invalid(format!("chi = {chi} is not in {{-1,0,1}}"));
    }
    Ok(())
}

/// Numerator of `b_p` over `1 - p X^2`: the general form for `p | D` or the
/// form for `p` not dividing `D`.
fn numerator(p: u64, k: u32, chi: i32, on_d: bool) -> Vec<Rational> {
    let c = rat(chi as i64, 1);
    let k_us = k as usize;
    let mut num = Vec::new();
    if !on_d {
        // 1 - chi X + chi p^k X^{2k+1} - p^{k+1} X^{2k+2}
        poly_add_term(&mut num, 0, Rational::one());
        poly_add_term(&mut num, 1, -c.clone());
        poly_add_term(&mut num, 2 * k_us + 1, &c * rpow(p, k));
        poly_add_term(&mut num, 2 * k_us + 2, -rpow(p, k + 1));
    } else {
        // (1 - chi X)(1 - p^2 X^2) - chi p^{k+1} X^{2k+1} + p^{k+2} X^{2k+2}
        //   + chi p^{k+1} X^{2k+3} - p^{k+2} X^{2k+4}
        // (the last exponent of p is k+2, as in the two specialized forms)
        let p2 = rpow(p, 2);
        poly_add_term(&mut num, 0, Rational::one());
        poly_add_term(&mut num, 1, -c.clone());
        poly_add_term(&mut num, 2, -p2.clone());
        poly_add_term(&mut num, 3, &c * &p2);
        poly_add_term(&mut num, 2 * k_us + 1, -(&c * rpow(p, k + 1)));
        poly_add_term(&mut num, 2 * k_us + 2, rpow(p, k + 2));
        poly_add_term(&mut num, 2 * k_us + 3, &c * rpow(p, k + 1));
        poly_add_term(&mut num, 2 * k_us + 4, -rpow(p, k + 2));
    }
    poly_trim(num)
}

/// The two specialized numerators for `p | D`, depending on `p | d`.
fn numerator_on_d_special(p: u64, k: u32, chi: i32) -> Vec<Rational> {
    let k_us = k as usize;
    let one_minus_p2x2 = vec![Rational::one(), Rational::zero(), -rpow(p, 2)];
    if chi == 0 {
        // 1 - p^2 X^2 + p^{k+2} X^{2k+2} (1 - X^2)
        let mut num = one_minus_p2x2;
        poly_add_term(&mut num, 2 * k_us + 2, rpow(p, k + 2));
        poly_add_term(&mut num, 2 * k_us + 4, -rpow(p, k + 2));
        poly_trim(num)
    } else {
        // (1 - chi X)(1 - p^2 X^2) - chi p^{k+1} X^{2k+1} (1 - chi p X)(1 - X^2)
        let c = rat(chi as i64, 1);
        let mut num = poly_mul(&[Rational::one(), -c.clone()], &one_minus_p2x2);
        let inner = poly_mul(
            &[Rational::one(), -(&c * rpow(p, 1))],
            &[Rational::one(), Rational::zero(), -Rational::one()],
        );
        let scale = -(&c * rpow(p, k + 1));
        for (j, a) in inner.iter().enumerate() {
            poly_add_term(&mut num, 2 * k_us + 1 + j, &scale * a);
        }
        poly_trim(num)
    }
}

/// Build `b_p(n,s;D)` for `k = ord_p(n)`, `chi = chi_d(p)` and `on_d = (p | D)`.
///
/// For `p | D` the two specialized numerators are also divided and must give
/// the same polynomial.
pub fn b_poly(p: u64, k: u32, chi: i32, on_d: bool) -> Result<DensityPolynomial> {
    check_args(p, chi)?;
    let num = numerator(p, k, chi, on_d);
    let coeffs = div_one_minus_px2(&num, p).ok_or_else(|| {
        Error::Internal(format!("b_p numerator not divisible by 1 - pX^2 (p={p}, k={k}, chi={chi})"))
    })?;
    if on_d {
        let alt = div_one_minus_px2(&numerator_on_d_special(p, k, chi), p);
        if alt.as_ref() != Some(&coeffs) {
            return Err(Error::Internal(format!(
                "b_p numerator forms disagree for p | D (p={p}, k={k}, chi={chi})"
            )));
        }
    }
    Ok(DensityPolynomial { p, k, chi, on_d, coeffs })
}

impl DensityPolynomial {
    /// `e = ord_p(nD) = k + [p | D]`, the exponent in the functional equation.
    pub fn fe_exponent(&self) -> u32 {
        self.k + self.on_d as u32
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluate at a rational `X`.
    pub fn eval(&self, x: &Rational) -> Rational {
        poly_eval(&self.coeffs, x)
    }

    /// `b_p(n,s;D)` at real `s`.
    pub fn eval_s(&self, s: f64) -> f64 {
        poly_eval_f64(&self.coeffs, (self.p as f64).powf(-s))
    }

    /// `b_p(n,s;D)` at an integer `s`, exactly.
    pub fn eval_int_s(&self, s: i64) -> Rational {
        self.eval(&rpow_signed(self.p, -s))
    }

    /// `b_p(n,0;D)` from the polynomial.
    pub fn value_at_zero(&self) -> Rational {
        self.coeffs.iter().sum()
    }

    /// `b_p'(n,0;D) / log p = -P'(1)` by the chain rule `dX/ds = -X log p`.
    pub fn deriv_at_zero(&self) -> Rational {
        -poly_derivative(&self.coeffs).into_iter().sum::<Rational>()
    }

    /// `b_p'(n,0;D) / (b_p(n,0;D) log p)` by polynomial calculus; `None` if
    /// `b_p(n,0;D) = 0`.
    pub fn logderiv_at_zero(&self) -> Option<Rational> {
        let v = self.value_at_zero();
        if v.is_zero() {
            None
        } else {
            Some(self.deriv_at_zero() / v)
        }
    }

    /// Whether `c_j = p^{j-e} c_{2e-j}` for all `j`, i.e.
    /// `b(s) = p^{e(1-2s)} b(1-s)` as polynomials.
    pub fn functional_equation_holds(&self) -> bool {
        let e = self.fe_exponent() as usize;
        if self.degree() != 2 * e {
            return false;
        }
        (0..=2 * e).all(|j| {
            self.coeffs[j] == rpow_signed(self.p, j as i64 - e as i64) * &self.coeffs[2 * e - j]
        })
    }

    /// `|nD|_p^{-s} b(s) - |nD|_p^{s-1} b(1-s)` at a rational `X = p^{-s}`,
    /// written as `b(X) - p^e X^{2e} b(1/(pX))`.
    pub fn functional_equation_residual(&self, x: &Rational) -> Rational {
        let e = self.fe_exponent();
        let pr = rpow(self.p, 1);
        let mirrored = (&pr * x).recip();
        let xe = x.pow(2 * e as i32);
        self.eval(x) - rpow(self.p, e) * xe * self.eval(&mirrored)
    }
}

/// `b_p(n,0;D)` from its closed forms.
pub fn b_at_zero(p: u64, k: u32, chi: i32, on_d: bool) -> Result<Rational> {
    check_args(p, chi)?;
    let c = rat(chi as i64, 1);
    Ok(if on_d {
        (Rational::one() - c) * rat(1 + p as i64, 1)
    } else {
        (Rational::one() - &c + &c * rpow(p, k) - rpow(p, k + 1)) / rat(1 - p as i64, 1)
    })
}

/// `b_p'(n,0;D) / (b_p(n,0;D) log p)` from its closed forms. For `p | D`
/// with `chi = 1`, where `b_p(n,0;D) = 0`, returns `b_p'(n,0;D)/log p =
/// 1 + p - 2p^{k+1}` instead.
pub fn b_logderiv_zero(p: u64, k: u32, chi: i32, on_d: bool) -> Result<Rational> {
    check_args(p, chi)?;
    let pr = rat(p as i64, 1);
    let pk = rpow(p, k);
    let pk1 = rpow(p, k + 1);
    let kr = rat(k as i64, 1);
    let one = Rational::one();
    let two = rat(2, 1);
    Ok(match (on_d, chi) {
        (false, 1) => (&pk - &one) / (&pk * (&pr - &one)) - &two * kr,
        (false, 0) => {
            -(&two * &pr * (&one - (&kr + &one) * &pk + &kr * &pk1))
                / ((&pr - &one) * (&pk1 - &one))
        }
        (false, _) => {
            let pk2 = rpow(p, k + 2);
            -(&one + rat(3, 1) * &pr - (&two * &kr + &one) * &pk - rat(3, 1) * &pk1
                + &two * &kr * pk2)
                / ((&pr - &one) * (&pk1 + &pk - &two))
        }
        (true, 1) => &one + &pr - &two * &pk1,
        (true, 0) => -(&two * &pr * (&pk1 - &one)) / (&pr * &pr - &one),
        (true, _) => {
            -(&two * (&one + &pr) * &pk1 + &pr * &pr - rat(4, 1) * &pr - &one)
                / (&two * (&pr * &pr - &one))
        }
    })
}

/// The general expression for `p` not dividing `D`, before case splitting:
/// `(chi - chi(2k+1)p^k + (2k+2)p^{k+1}) / (1 - chi + chi p^k - p^{k+1}) - 2p/(1-p)`.
pub fn b_logderiv_zero_unsplit(p: u64, k: u32, chi: i32) -> Result<Rational> {
    check_args(p, chi)?;
    let c = rat(chi as i64, 1);
    let pr = rat(p as i64, 1);
    let kr = rat(k as i64, 1);
    let one = Rational::one();
    let num = &c - &c * (rat(2, 1) * &kr + &one) * rpow(p, k) + (rat(2, 1) * &kr + rat(2, 1)) * rpow(p, k + 1);
    let den = &one - &c + &c * rpow(p, k) - rpow(p, k + 1);
    Ok(num / den - rat(2, 1) * &pr / (&one - &pr))
}

/// `sum_{c | p^k} c prod_{l | c} (1 - chi/l)`.
pub fn conductor_sum_local(p: u64, k: u32, chi: i32) -> Rational {
    let mut total = Rational::one();
    let factor = Rational::one() - rat(chi as i64, p as i64);
    for j in 1..=k {
        total += rpow(p, j) * &factor;
    }
    total
}

/// `b_p(n,s;D)` for the prime `p` and index `m`, taking `n`, `chi` from `4m = n^2 d`.
pub fn b_poly_for(p: u64, m: i64, big_d: u64) -> Result<DensityPolynomial> {
    let dec = decompose(m)?;
    b_poly(p, arith::ord_p(dec.n, p), dec.chi(p), big_d.is_multiple_of(p))
}

// ---------------------------------------------------------------------------
// Local factors and Whittaker functions.

/// `zeta_p(s) = (1 - p^{-s})^{-1}`.
pub fn zeta_p(p: u64, s: f64) -> f64 {
    1.0 / (1.0 - (p as f64).powf(-s))
}

/// `L_p(s, chi) = (1 - chi p^{-s})^{-1}`.
pub fn l_p(p: u64, chi: i32, s: f64) -> f64 {
    1.0 / (1.0 - chi as f64 * (p as f64).powf(-s))
}

fn zeta_p_exact(p: u64, s: i64) -> Rational {
    (Rational::one() - rpow_signed(p, -s)).recip()
}

fn l_p_exact(p: u64, chi: i32, s: i64) -> Rational {
    (Rational::one() - rat(chi as i64, 1) * rpow_signed(p, -s)).recip()
}

/// `zeta_8^{-1} = e(-1/8)`.
fn zeta8_inv() -> Complex64 {
    Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)
}

/// `C_p^+` (for `p` not dividing `D`) or `C_p^- = -C_p^+/p` (for `p | D`).
pub fn local_constant(p: u64, on_d: bool) -> Complex64 {
    let plus = if p == 2 {
        zeta8_inv() * std::f64::consts::FRAC_1_SQRT_2
    } else {
        Complex64::new(1.0, 0.0)
    };
    if on_d {
        -plus / p as f64
    } else {
        plus
    }
}

/// The splitting index `beta(V)` of the trace-zero space (`kappa = -1`).
pub fn splitting_index(p: u64, on_d: bool) -> Complex64 {
    let eps = if on_d { -1.0 } else { 1.0 };
    if p == 2 {
        zeta8_inv() * eps
    } else {
        Complex64::new(eps, 0.0)
    }
}

/// `|det 2S|_p` for the lattice `L = V cap O_B`.
pub fn det_2s_abs(p: u64, on_d: bool) -> Rational {
    let two = if p == 2 { rat(1, 2) } else { Rational::one() };
    if on_d {
        two / rpow(p, 2)
    } else {
        two
    }
}

/// `W_{m,p}(s + 1/2)` for the standard section attached to `D`.
pub fn whittaker_nonarch(p: u64, m: i64, s: f64, big_d: u64) -> Result<Complex64> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    arith::squarefree_primes(big_d)?;
    let on_d = big_d.is_multiple_of(p);
    let c = local_constant(p, on_d);
    if m == 0 {
        let z = zeta_p(p, 2.0 * s);
        let tail = if on_d {
            1.0 / zeta_p(p, 2.0 * s - 1.0)
        } else {
            1.0 / zeta_p(p, 2.0 * s + 1.0)
        };
        return Ok(c * (z * tail));
    }
    let bp = b_poly_for(p, m, big_d)?;
    let chi = bp.chi;
    let core = l_p(p, chi, s + 1.0) * bp.eval_s(s + 1.0);
    Ok(if on_d {
        c * core
    } else {
        c * (core / zeta_p(p, 2.0 * s + 2.0))
    })
}

// ---------------------------------------------------------------------------
// Local densities W(m, S_r).

/// Closed form for the local density `W_p(m, S_r)` of the lattice
/// `L + r` hyperbolic planes (`ramified` means `p | D`).
pub fn local_density_closed(p: u64, m: i64, r: u32, ramified: bool) -> Result<Rational> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let r = r as i64;
    if m == 0 {
        let num = zeta_p_exact(p, 2 * r + 1);
        return Ok(if ramified {
            if r == 0 {
                return invalid("W_p(0, S_0) diverges for p | D");
            }
            num / zeta_p_exact(p, 2 * r)
        } else {
            num / zeta_p_exact(p, 2 * r + 2)
        });
    }
    let dec = decompose(m)?;
    let k = arith::ord_p(dec.n, p);
    let chi = dec.chi(p);
    let bp = b_poly(p, k, chi, ramified)?;
    let core = l_p_exact(p, chi, r + 1) * bp.eval_int_s(r + 1);
    Ok(if ramified {
        core
    } else {
        core / zeta_p_exact(p, 2 * r + 2)
    })
}

/// Smallest quadratic nonresidue modulo an odd prime.
fn nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| legendre(a, p) == -1)
        .expect("odd prime has a nonresidue")
}

fn legendre(a: u64, p: u64) -> i32 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    match result {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Value distribution of `f` over `(Z/p^t)^vars`: `out[v] = #{x : f(x) = v}`.
fn distribution(modulus: u64, vars: u32, f: impl Fn(&[u64]) -> u64 + Sync) -> Vec<u128> {
    let total = modulus.pow(vars);
    let mut out = vec![0u128; modulus as usize];
    let mut x = vec![0u64; vars as usize];
    for mut idx in 0..total {
        for xi in x.iter_mut() {
            *xi = idx % modulus;
            idx /= modulus;
        }
        out[(f(&x) % modulus) as usize] += 1;
    }
    out
}

/// Cyclic convolution of two value distributions.
fn convolve(a: &[u128], b: &[u128]) -> Vec<u128> {
    let m = a.len();
    (0..m)
        .into_par_iter()
        .map(|k| {
            let mut s = 0u128;
            for (i, &ai) in a.iter().enumerate() {
                if ai != 0 {
                    s += ai * b[(k + m - i) % m];
                }
            }
            s
        })
        .collect()
}

fn mod_signed(a: i64, modulus: u64) -> u64 {
    a.rem_euclid(modulus as i64) as u64
}

/// Value distribution of the `kappa = -1` trace-zero form on `(Z/p^t)^3`.
fn lattice_distribution(p: u64, t: u32, ramified: bool) -> Vec<u128> {
    let q = p.pow(t);
    let qi = q as i128;
    let red = move |v: i128| v.rem_euclid(qi) as u64;
    if !ramified {
        // -(x1^2 + x2 x3)
        let sq = distribution(q, 1, |x| red(-((x[0] as i128) * (x[0] as i128))));
        let pr = distribution(q, 2, |x| red(-((x[0] as i128) * (x[1] as i128))));
        convolve(&sq, &pr)
    } else if p == 2 {
        // 3 x1^2 - 2 x2^2 - 2 x2 x3 - 2 x3^2
        let sq = distribution(q, 1, |x| red(3 * (x[0] as i128) * (x[0] as i128)));
        let bin = distribution(q, 2, |x| {
            let (a, b) = (x[0] as i128, x[1] as i128);
            red(-2 * (a * a + a * b + b * b))
        });
        convolve(&sq, &bin)
    } else {
        // -(beta x1^2 + p x2^2 - beta p x3^2)
        let beta = nonresidue(p) as i128;
        let pi = p as i128;
        let d1 = distribution(q, 1, |x| red(-beta * (x[0] as i128) * (x[0] as i128)));
        let d2 = distribution(q, 1, |x| red(-pi * (x[0] as i128) * (x[0] as i128)));
        let d3 = distribution(q, 1, |x| red(beta * pi * (x[0] as i128) * (x[0] as i128)));
        convolve(&convolve(&d1, &d2), &d3)
    }
}

/// Total value distribution of `Q_r` on `(Z/p^t)^{2r+3}`.
fn full_distribution(p: u64, r: u32, ramified: bool, t: u32) -> Vec<u128> {
    let q = p.pow(t);
    let mut dist = lattice_distribution(p, t, ramified);
    if r > 0 {
        let hyp = distribution(q, 2, |x| ((x[0] as u128 * x[1] as u128) % q as u128) as u64);
        for _ in 0..r {
            dist = convolve(&dist, &hyp);
        }
    }
    dist
}

/// Upper bound on `p^{2t}` handled by the counting oracle.
const MAX_PAIR_STATES: u64 = 1 << 34;

fn affordable(p: u64, t: u32) -> bool {
    p.checked_pow(2 * t).is_some_and(|v| v <= MAX_PAIR_STATES)
}

/// `p^{-t(2r+2)} #{x in (Z/p^t)^{2r+3} : Q_r(x) = m mod p^t}` by convolving
/// the value distributions of the orthogonal blocks.
pub fn density_count(p: u64, m: i64, r: u32, ramified: bool, t: u32) -> Result<Rational> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if t == 0 {
        return Ok(Rational::one());
    }
    if !affordable(p, t) {
        return Err(Error::Inconclusive(format!("p^t too large (p={p}, t={t})")));
    }
    let dist = full_distribution(p, r, ramified, t);
    let count = dist[mod_signed(m, p.pow(t)) as usize];
    let scale = BigInt::from(p).pow(t * (2 * r + 2));
    Ok(Rational::new(BigInt::from(count), scale))
}

/// Same count by direct enumeration of all `(Z/p^t)^{2r+3}` vectors; only
/// for cross-checking the convolution on tiny cases.
pub fn density_count_enumerate(p: u64, m: i64, r: u32, ramified: bool, t: u32) -> Result<Rational> {
    let q = p.pow(t);
    let vars = 2 * r + 3;
    if q.checked_pow(vars).is_none_or(|v| v > 1 << 26) {
        return invalid("enumeration too large");
    }
    let beta = if p == 2 { 0 } else { nonresidue(p) as i128 };
    let pi = p as i128;
    let target = mod_signed(m, q);
    let dist = distribution(q, vars, |x| {
        let v: Vec<i128> = x.iter().map(|&a| a as i128).collect();
        let lat = if !ramified {
            -(v[0] * v[0] + v[1] * v[2])
        } else if p == 2 {
            3 * v[0] * v[0] - 2 * v[1] * v[1] - 2 * v[1] * v[2] - 2 * v[2] * v[2]
        } else {
            -(beta * v[0] * v[0] + pi * v[1] * v[1] - beta * pi * v[2] * v[2])
        };
        let hyp: i128 = (0..r as usize).map(|i| v[3 + 2 * i] * v[4 + 2 * i]).sum();
        (lat + hyp).rem_euclid(q as i128) as u64
    });
    let scale = BigInt::from(p).pow(t * (2 * r + 2));
    Ok(Rational::new(BigInt::from(dist[target as usize]), scale))
}

/// The local density `W_p(m, S_r)` from point counts.
///
/// For `m != 0` the count at precision `t` and `t + 1` must agree, starting
/// from `t_start` (default `ord_p(4m) + 3`) and doubling once. For `m = 0`
/// the primitive part `a_t - p^{2-n} a_{t-2}` (with `n = 2r+3`) is
/// stabilized instead and summed as a geometric series over the
/// `p`-divisible vectors.
pub fn local_density_oracle(
    p: u64,
    m: i64,
    r: u32,
    ramified: bool,
    t_start: Option<u32>,
) -> Result<Rational> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if m == 0 {
        if r == 0 {
            return invalid("m = 0 density needs r >= 1");
        }
        let shrink = rpow_signed(p, 2 - (2 * r as i64 + 3));
        let primitive = |t: u32| -> Result<Rational> {
            Ok(density_count(p, 0, r, ramified, t)? - &shrink * density_count(p, 0, r, ramified, t - 2)?)
        };
        let t0 = t_start.unwrap_or(3).max(2);
        for t in [t0, 2 * t0] {
            let a = primitive(t)?;
            if a == primitive(t + 1)? {
                return Ok(a / (Rational::one() - &shrink));
            }
        }
        return Err(Error::Inconclusive(format!(
            "primitive density for m=0 did not stabilize (p={p}, r={r})"
        )));
    }
    let ord = arith::ord_p(4 * m.unsigned_abs(), p);
    let t0 = t_start.unwrap_or(ord + 3);
    for t in [t0, 2 * t0] {
        let a = density_count(p, m, r, ramified, t)?;
        if a == density_count(p, m, r, ramified, t + 1)? {
            return Ok(a);
        }
    }
    Err(Error::Inconclusive(format!(
        "density did not stabilize (p={p}, m={m}, r={r})"
    )))
}

/// Sanity of the half-integral `|det 2S|_p^{1/2}` factor: `beta(V) |det 2S|_p^{1/2}`.
pub fn measure_constant(p: u64, on_d: bool) -> Complex64 {
    let d = crate::rat_to_f64(&det_2s_abs(p, on_d));
    splitting_index(p, on_d) * d.sqrt()
}

/// `|x|_p` of a nonzero integer, exactly.
pub fn p_abs(x: i64, p: u64) -> Rational {
    rpow(p, arith::ord_p(x.unsigned_abs(), p)).recip()
}

/// `det(2S)` of the Gram matrix of the trace-zero lattice, as an integer
/// (`S` has half-integral off-diagonal entries, so `2S` is integral).
pub fn det_2s(p: u64, on_d: bool) -> i64 {
    let m: [[i64; 3]; 3] = if !on_d {
        [[-2, 0, 0], [0, 0, -1], [0, -1, 0]]
    } else if p == 2 {
        [[6, 0, 0], [0, -4, -2], [0, -2, -4]]
    } else {
        let b = nonresidue(p) as i64;
        let p = p as i64;
        [[-2 * b, 0, 0], [0, -2 * p, 0], [0, 0, 2 * b * p]]
    };
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
