//! The geometric side: Faltings heights of CM elliptic curves, horizontal,
//! vertical and archimedean contributions to the height pairing
//! `<Z(m,v), omega>`, and multiplicity sums over the Bruhat-Tits tree.
//!
//! This module deliberately avoids the local density polynomials and the
//! analytic closed forms of [`crate::eisenstein`]: class number sums come
//! from per-order form counts and Pell solutions, vertical degrees from tree
//! shell counts, and the archimedean integrals from their second quadrature
//! rules.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, decompose, ord_p, Decomposition};
use crate::classnum;
use crate::error::{invalid, Result};
use crate::localpoly;
use crate::report::{CheckReport, CheckStatus, Params};
use crate::special::{self, EULER_GAMMA};
use crate::{eisenstein, rat, rat_to_f64, Rational};

// ---------------------------------------------------------------------------
// Faltings heights.

fn check_imag_fundamental(delta: i64) -> Result<()> {
    if delta >= 0 || !arith::is_fundamental(delta) {
        return invalid(format!("{delta} is not a negative fundamental discriminant"));
    }
    Ok(())
}

/// `2 h*_Fal(E)` for an elliptic curve with CM by the maximal order of
/// discriminant `delta`, with the renormalized metric:
/// `(1/2) log|delta| + L'(1)/L(1) - (1/2) log pi - gamma/2`.
pub fn faltings_star(delta: i64) -> Result<f64> {
    check_imag_fundamental(delta)?;
    let lv = special::l_values(delta)?;
    let d = delta.unsigned_abs() as f64;
    Ok(0.5 * d.ln() + lv.logderiv1 - 0.5 * PI.ln() - 0.5 * EULER_GAMMA)
}

/// `2 h_Fal(E)` with the standard metric, `-(1/2) log d - L'(0)/L(0)`, where
/// `L(s) = d^{-s} sum_a chi(a) zeta(s, a/d)` is differentiated termwise.
pub fn faltings_unstarred(delta: i64) -> Result<f64> {
    check_imag_fundamental(delta)?;
    let q = delta.unsigned_abs();
    let qf = q as f64;
    let (mut l0, mut dl0) = (0.0, 0.0);
    for a in 1..q {
        let chi = arith::kronecker(delta, a as i64)?;
        if chi == 0 {
            continue;
        }
        let x = a as f64 / qf;
        l0 += chi as f64 * special::hurwitz_zeta(0.0, x)?;
        dl0 += chi as f64 * special::hurwitz_zeta_deriv(0.0, x)?;
    }
    dl0 -= qf.ln() * l0;
    Ok(-0.5 * qf.ln() - dl0 / l0)
}

/// The metric offset `2 h* - 2 h = C` for one CM elliptic curve.
pub fn faltings_offset_report(delta: i64) -> Result<CheckReport> {
    let lhs = faltings_star(delta)? - faltings_unstarred(delta)?;
    Ok(CheckReport::float_abs(
        "faltings_offset",
        Params::new().with("Delta", delta),
        lhs,
        special::metric_constant(),
        1e-12,
    ))
}

// ---------------------------------------------------------------------------
// Horizontal part.

/// `eta_p(r)` as a multiple of `log p`:
/// `r - (1 - p^{-r}) (1 - chi) / ((1 - p^{-1}) (p - chi))`.
pub fn eta_p(p: u64, r: u32, chi: i32) -> Rational {
    let one = Rational::one();
    let pr = rat(p as i64, 1);
    let p_neg_r = Rational::new(1.into(), num_bigint::BigInt::from(p).pow(r));
    let correction = (&one - p_neg_r) * rat(1 - chi as i64, 1)
        / ((&one - pr.recip()) * (&pr - rat(chi as i64, 1)));
    rat(r as i64, 1) - correction
}

/// `sum_{c | n, (c,D)=1} c prod_{l | c} (1 - chi(l)/l) sum_{p | c} eta_p(ord_p c) log p`,
/// grouped by `p`: the rational coefficient of each `log p`.
pub fn conductor_eta_sum(dec: &Decomposition, big_d: u64) -> BTreeMap<u64, Rational> {
    let mut out: BTreeMap<u64, Rational> = BTreeMap::new();
    for c in arith::divisors(dec.n) {
        if c.gcd(&big_d) != 1 || c == 1 {
            continue;
        }
        let fc = arith::factorize(c);
        let mut weight = Rational::from_integer(c.into());
        for p in fc.primes() {
            weight *= Rational::one() - rat(dec.chi(p) as i64, p as i64);
        }
        for p in fc.primes() {
            let e = eta_p(p, fc.ord(p), dec.chi(p));
            *out.entry(p).or_insert_with(Rational::zero) += &weight * e;
        }
    }
    out
}

/// `sum_{c | n, (c,D)=1} h(c^2 d)/w(c^2 d)` from per-order form counts: the
/// weighted number of optimal embeddings, equal to `H_0(m;D)` for `m > 0`.
fn h0_from_orders(dec: &Decomposition, big_d: u64) -> Result<Rational> {
    let mut sum = Rational::zero();
    for c in arith::divisors(dec.n) {
        if c.gcd(&big_d) == 1 {
            sum += classnum::order_class_ratio(dec.delta, c)?;
        }
    }
    Ok(sum)
}

fn geometric_primes(big_d: u64) -> Result<Vec<u64>> {
    arith::quaternion_primes(big_d)
}

/// Height of the horizontal part of `Z(m)`, `m > 0`, by direct summation
/// over conductors:
/// `2 delta H_0 2h*_Fal + 2 delta (h/w) sum_c ... eta_p log p`.
pub fn horizontal_height(m: i64, big_d: u64) -> Result<f64> {
    if m <= 0 {
        return invalid("horizontal_height requires m > 0");
    }
    geometric_primes(big_d)?;
    let dec = decompose(m)?;
    let delta = classnum::delta_factor(dec.delta, big_d)?;
    if delta == 0 {
        return Ok(0.0);
    }
    let h0 = rat_to_f64(&h0_from_orders(&dec, big_d)?);
    let inv = classnum::imag_invariants(dec.delta)?;
    let hw = inv.h as f64 / inv.w as f64;
    let eta_part: f64 = conductor_eta_sum(&dec, big_d)
        .iter()
        .map(|(&p, coef)| rat_to_f64(coef) * (p as f64).ln())
        .sum();
    let two_delta = 2.0 * delta as f64;
    Ok(two_delta * h0 * faltings_star(dec.delta)? + two_delta * hw * eta_part)
}

/// Per-prime coefficients of `log p` on both sides of the conductor-sum
/// identity: `(h/w) * conductor_eta_sum` and
/// `H_0(m;D) (log|n|_p - b_p'/b_p) / log p`, for `p | n`, `p !| D`.
pub fn lemma109_coefficients(m: i64, big_d: u64) -> Result<Vec<(u64, Rational, Rational)>> {
    if m <= 0 {
        return invalid("the conductor-sum identity requires m > 0");
    }
    let dec = decompose(m)?;
    let h0 = classnum::h0_pos(m, big_d)?;
    let inv = classnum::imag_invariants(dec.delta)?;
    let hw = rat(inv.h as i64, inv.w as i64);
    let left = conductor_eta_sum(&dec, big_d);
    let mut out = Vec::new();
    for p in arith::factorize(dec.n).primes() {
        if big_d.is_multiple_of(p) {
            continue;
        }
        let k = ord_p(dec.n, p);
        let ld = localpoly::b_logderiv_zero(p, k, dec.chi(p), false)?;
        let rhs = &h0 * (rat(-(k as i64), 1) - ld);
        let lhs = left.get(&p).cloned().unwrap_or_else(Rational::zero) * &hw;
        out.push((p, lhs, rhs));
    }
    Ok(out)
}

/// The conductor-sum identity relating `eta_p` to the log-derivatives of
/// the local polynomials: each `log p` coefficient must agree exactly and
/// the assembled real numbers to `1e-10`.
pub fn lemma109_check(m: i64, big_d: u64) -> Result<CheckReport> {
    let coefs = lemma109_coefficients(m, big_d)?;
    let lhs: f64 = coefs.iter().map(|(p, l, _)| rat_to_f64(l) * (*p as f64).ln()).sum();
    let rhs: f64 = coefs.iter().map(|(p, _, r)| rat_to_f64(r) * (*p as f64).ln()).sum();
    let exact = coefs.iter().all(|(_, l, r)| l == r);
    let mut rep = CheckReport::float(
        "conductor_eta_identity",
        Params::new().with("m", m).with("D", big_d),
        lhs,
        rhs,
        1e-10,
    );
    if !exact {
        rep.status = CheckStatus::Fail;
    }
    Ok(rep.with_note(format!("per-prime coefficients exact: {exact}")))
}

// ---------------------------------------------------------------------------
// Vertical part and the Bruhat-Tits tree.

/// Fixed-point configurations in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeCase {
    /// `p` inert: a single fixed vertex.
    InertVertex,
    /// `p` ramified: a pair of adjacent fixed vertices.
    RamifiedEdgePair,
    /// `p` split: an apartment, modulo translation by two steps.
    SplitApartment,
}

impl TreeCase {
    pub fn from_chi(chi: i32) -> TreeCase {
        match chi {
            1 => TreeCase::SplitApartment,
            0 => TreeCase::RamifiedEdgePair,
            _ => TreeCase::InertVertex,
        }
    }
}

/// `sum max(k - dist, 0)` over vertices of the `(p+1)`-regular tree, by
/// explicit breadth-first enumeration outward from the fixed set. In the
/// split case the sum runs over vertices whose nearest apartment vertex is
/// one of two consecutive apartment vertices (a fundamental domain).
pub fn tree_mult_sum(p: u64, k: u32, case: TreeCase) -> Result<Rational> {
    if !arith::is_prime(p) || k == 0 {
        return invalid("tree_mult_sum needs a prime p and k >= 1");
    }
    let deg = p as usize + 1;
    // Core vertices: (number of core neighbours, counted in the sum).
    let core: Vec<(usize, bool)> = match case {
        TreeCase::InertVertex => vec![(0, true)],
        TreeCase::RamifiedEdgePair => vec![(1, true), (1, true)],
        // a window of the apartment; every window vertex has two apartment
        // neighbours, and only the middle two are marked
        TreeCase::SplitApartment => vec![(2, false), (2, true), (2, true), (2, false)],
    };
    // queue entries: (distance to the fixed set, marked root, neighbours left to expand)
    let mut queue: VecDeque<(u32, bool, usize)> = VecDeque::new();
    let mut total: u64 = 0;
    for &(core_deg, marked) in &core {
        queue.push_back((0, marked, deg - core_deg));
    }
    while let Some((dist, marked, children)) = queue.pop_front() {
        if marked {
            total += u64::from(k.saturating_sub(dist));
        }
        if dist + 1 >= k {
            continue;
        }
        for _ in 0..children {
            queue.push_back((dist + 1, marked, deg - 1));
        }
    }
    Ok(Rational::from_integer(total.into()))
}

/// The same multiplicity sums from shell sizes: `(p+1) p^{r-1}` vertices at
/// distance `r` from a vertex, `2 p^r` from an edge, `2 (p-1) p^{r-1}` off
/// a two-vertex apartment segment.
pub fn tree_shell_sum(p: u64, k: u32, case: TreeCase) -> Rational {
    let pb = num_bigint::BigInt::from(p);
    let mut total = num_bigint::BigInt::zero();
    let (center, shell): (u64, Box<dyn Fn(u32) -> num_bigint::BigInt>) = match case {
        TreeCase::InertVertex => (1, Box::new(|r| (&pb + 1) * pb.pow(r - 1))),
        TreeCase::RamifiedEdgePair => (2, Box::new(|r| 2 * pb.pow(r))),
        TreeCase::SplitApartment => (2, Box::new(|r| 2 * (&pb - 1) * pb.pow(r - 1))),
    };
    total += num_bigint::BigInt::from(center * u64::from(k));
    for r in 1..k {
        total += shell(r) * (k - r);
    }
    Rational::from_integer(total)
}

/// `deg(omega | Z(m)_p^vert) log p` for `p | D`, `m > 0`: the degree
/// `p - 1` of `omega` on each projective line of the fibre times the tree
/// multiplicity sum, weighted by the number of fixed points
/// `delta(d;D) H_0` (or `delta(d;D/p) H_0` when `p` splits, where the sum
/// covers one fundamental domain of the apartment).
pub fn vertical_degree(m: i64, big_d: u64, p: u64) -> Result<f64> {
    if m <= 0 {
        return invalid("vertical_degree requires m > 0");
    }
    geometric_primes(big_d)?;
    if !big_d.is_multiple_of(p) {
        return invalid(format!("p = {p} does not divide D = {big_d}"));
    }
    let dec = decompose(m)?;
    let chi = dec.chi(p);
    let k = ord_p(dec.n, p);
    let weight_d = if chi == 1 { big_d / p } else { big_d };
    let delta = classnum::delta_factor(dec.delta, weight_d)?;
    if delta == 0 || k == 0 {
        return Ok(0.0);
    }
    let h0 = h0_from_orders(&dec, big_d)?;
    let shells = tree_shell_sum(p, k, TreeCase::from_chi(chi));
    let deg = rat(delta as i64 * (p as i64 - 1), 1) * h0 * shells;
    Ok(rat_to_f64(&deg) * (p as f64).ln())
}

// ---------------------------------------------------------------------------
// Archimedean part.

/// `H_0(m;D)` for `m < 0` as `(1/2) sum_c h(c^2 d) log eps(c^2 d)` over the
/// orders, from reduced-form cycles and Pell solutions.
fn h0_negative(m: i64, big_d: u64) -> Result<f64> {
    let dec = decompose(m)?;
    if dec.is_split_field() {
        return Ok(0.0);
    }
    classnum::h0_neg_orders(m, big_d)
}

/// `kappa(m,v)` times `e^{4 pi |m| v}` for `m < 0` (unchanged for `m > 0`).
pub fn kappa_arch_scaled(m: i64, v: f64, big_d: u64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return invalid(format!("v must be positive, got {v}"));
    }
    if m == 0 {
        return invalid("kappa is defined for m != 0");
    }
    arith::squarefree_primes(big_d)?;
    let dec = decompose(m)?;
    let delta = classnum::delta_factor(dec.delta, big_d)?;
    if delta == 0 {
        return Ok(0.0);
    }
    let two_delta = 2.0 * delta as f64;
    let am = m.unsigned_abs() as f64;
    if m > 0 {
        let h0 = rat_to_f64(&h0_from_orders(&dec, big_d)?);
        Ok(two_delta * h0 * 0.5 * special::j_integral_de(4.0 * PI * am * v)?)
    } else {
        let h0 = h0_negative(m, big_d)?;
        let tail = special::tail_integral_quad_scaled(4.0 * PI * am * v)?;
        Ok(two_delta * h0 / (4.0 * PI) / (am * v).sqrt() * tail)
    }
}

/// `kappa(m,v)`, the contribution of the Green function's non-standard
/// normalization. Underflows to zero for large `|m| v` when `m < 0`.
pub fn kappa_arch(m: i64, v: f64, big_d: u64) -> Result<f64> {
    let scaled = kappa_arch_scaled(m, v, big_d)?;
    Ok(if m < 0 {
        scaled * (-4.0 * PI * m.unsigned_abs() as f64 * v).exp()
    } else {
        scaled
    })
}

// ---------------------------------------------------------------------------
// Assembly.

#[derive(Debug, Clone, Serialize)]
pub struct HeightBreakdown {
    pub m: i64,
    pub v: f64,
    pub big_d: u64,
    pub horizontal: f64,
    /// `deg(omega | Z(m)_p^vert) log p` for each `p | D`.
    pub vertical: BTreeMap<u64, f64>,
    pub kappa: f64,
    pub total: f64,
    /// `e^{4 pi |m| v}` times `kappa` and `total` for `m < 0`; equal to
    /// them for `m > 0`.
    pub kappa_scaled: f64,
    pub total_scaled: f64,
    pub scale_exponent: f64,
}

/// `<Z(m,v), omega>` as horizontal + vertical + archimedean parts. For
/// `m < 0` the cycle is empty and only `kappa` remains.
pub fn height_pairing(m: i64, v: f64, big_d: u64) -> Result<HeightBreakdown> {
    let primes = geometric_primes(big_d)?;
    if m == 0 {
        return invalid("the m = 0 term is reported by constant_term_report");
    }
    let kappa_scaled = kappa_arch_scaled(m, v, big_d)?;
    let scale_exponent = if m < 0 { 4.0 * PI * m.unsigned_abs() as f64 * v } else { 0.0 };
    let mut out = HeightBreakdown {
        m,
        v,
        big_d,
        horizontal: 0.0,
        vertical: BTreeMap::new(),
        kappa: kappa_scaled * (-scale_exponent).exp(),
        total: 0.0,
        kappa_scaled,
        total_scaled: kappa_scaled,
        scale_exponent,
    };
    if m < 0 {
        out.total = out.kappa;
        return Ok(out);
    }
    out.horizontal = horizontal_height(m, big_d)?;
    for p in primes {
        out.vertical.insert(p, vertical_degree(m, big_d, p)?);
    }
    out.total = out.horizontal + out.vertical.values().sum::<f64>() + out.kappa;
    out.total_scaled = out.total;
    Ok(out)
}

/// Geometric height pairing against the analytic derivative at `s = 1/2`
/// (both scaled by `e^{4 pi |m| v}` when `m < 0`).
pub fn main_identity_report(m: i64, v: f64, big_d: u64) -> Result<CheckReport> {
    let geo = height_pairing(m, v, big_d)?;
    let ana = eisenstein::coeff_deriv_half(m, v, big_d)?;
    let name = if m < 0 { "main_identity_scaled" } else { "main_identity" };
    Ok(CheckReport::float(
        name,
        Params::new().with("m", m).with("v", v).with("D", big_d),
        geo.total_scaled,
        ana.deriv_half_scaled,
        1e-9,
    ))
}

// ---------------------------------------------------------------------------
// Constant term.

/// `sum_{p | D} p log p / (p - 1)`.
fn sum_p_log_p(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| p as f64 * (p as f64).ln() / (p as f64 - 1.0)).sum()
}

/// Constant term `E'_0(v;D) = zeta_D(-1) [ (1/2) log v - 2 zeta'/zeta(-1) - 1
/// + 2C + sum_{p|D} p log p/(p-1) ]`, `D >= 1`.
pub fn constant_term_deriv(v: f64, big_d: u64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return invalid(format!("v must be positive, got {v}"));
    }
    let primes = arith::squarefree_primes(big_d)?;
    let zd = rat_to_f64(&classnum::zeta_d_minus_one(big_d)?);
    Ok(zd
        * (0.5 * v.ln() - 2.0 * special::zeta_logderiv_at_minus1() - 1.0
            + 2.0 * special::metric_constant()
            + sum_p_log_p(&primes)))
}

/// The conjectural value of `<omega_0, omega_0>` for the Petersson-type
/// metric: `zeta_D(-1) [ 2 zeta'/zeta(-1) + 1 - sum_{p|D} p log p/(p-1) ]`.
pub fn conjectural_omega0_pairing(big_d: u64) -> Result<f64> {
    let primes = arith::squarefree_primes(big_d)?;
    let zd = rat_to_f64(&classnum::zeta_d_minus_one(big_d)?);
    Ok(zd * (2.0 * special::zeta_logderiv_at_minus1_direct() + 1.0 - sum_p_log_p(&primes)))
}

/// Bookkeeping for the constant term. For `D = 1` the derivative is compared
/// with `-<omega, omega> - (1/2) deg(omega) log v`, where the self-pairing is
/// `2 [zeta'(-1) + zeta(-1)/2] + 2 C deg(omega)` and `deg(omega) = -zeta(-1)`.
/// For `D > 1` the same rearrangement defines a conjectural self-pairing,
/// which is reported in the note and labeled as such.
pub fn constant_term_report(v: f64, big_d: u64) -> Result<CheckReport> {
    let e0 = constant_term_deriv(v, big_d)?;
    let deg = -rat_to_f64(&classnum::zeta_d_minus_one(big_d)?);
    let c = special::metric_constant();
    let params = Params::new().with("v", v).with("D", big_d);
    if big_d == 1 {
        let z = special::riemann_zeta(-1.0)?;
        let dz = special::riemann_zeta_deriv(-1.0)?;
        let omega_sq = 2.0 * (dz + 0.5 * z) + 2.0 * c * deg;
        let rhs = -omega_sq - 0.5 * deg * v.ln();
        return Ok(CheckReport::float_abs("constant_term_modular_curve", params, e0, rhs, 1e-11)
            .with_note(format!("deg(omega) = {deg:.14e}")));
    }
    let conj = conjectural_omega0_pairing(big_d)?;
    let rearranged = -e0 - 0.5 * deg * v.ln() - 2.0 * c * deg;
    let vol = rat_to_f64(&classnum::volume(big_d)?);
    let rep = CheckReport::float_abs("constant_term_conjectural", params, rearranged, conj, 1e-11);
    let deg_ok = (deg - vol).abs() <= 1e-15 * vol;
    let mut rep = rep.with_note(format!(
        "CONJECTURAL <omega_0,omega_0> = {conj:.14e}; deg(omega) = {deg:.14e} = vol: {deg_ok}"
    ));
    if !deg_ok {
        rep.status = CheckStatus::Fail;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::relative_residual as rel;
    use proptest::prelude::*;

    #[test]
    fn faltings_examples() {
        let g = |x: f64| statrs::function::gamma::ln_gamma(x);
        let expect = 0.5 * 4f64.ln() + ((2.0 * PI).ln() + EULER_GAMMA - 2.0 * g(0.25) + 2.0 * g(0.75))
            - 0.5 * PI.ln()
            - 0.5 * EULER_GAMMA;
        assert!((faltings_star(-4).unwrap() - expect).abs() < 1e-13);
        // w/(2h) = 3 for Delta = -3
        let expect3 = 0.5 * 3f64.ln() + ((2.0 * PI).ln() + EULER_GAMMA - 3.0 * (g(1.0 / 3.0) - g(2.0 / 3.0)))
            - 0.5 * PI.ln()
            - 0.5 * EULER_GAMMA;
        assert!((faltings_star(-3).unwrap() - expect3).abs() < 1e-13);
        assert!(faltings_star(-12).is_err());
        assert!(faltings_star(5).is_err());
    }

    #[test]
    fn faltings_offset_is_metric_constant() {
        for delta in [-3i64, -4, -7, -8, -11, -15, -20, -23, -24, -84, -163, -388] {
            let r = faltings_offset_report(delta).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn eta_examples() {
        for p in [2u64, 3, 5] {
            for chi in [-1, 0, 1] {
                assert!(eta_p(p, 0, chi).is_zero());
            }
            for r in 0..5 {
                assert_eq!(eta_p(p, r, 1), rat(r as i64, 1));
            }
        }
        assert_eq!(eta_p(3, 1, -1), rat(1, 2));
    }

    proptest! {
        #[test]
        fn eta_bounds_and_monotone(pi in 0usize..5, r in 0u32..12, chi in -1i32..=0) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let a = eta_p(p, r, chi);
            let b = eta_p(p, r + 1, chi);
            prop_assert!(a >= Rational::zero());
            prop_assert!(a <= rat(r as i64, 1));
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn horizontal_trivial_cases() {
        // n = 1: no conductor terms
        let dec = decompose(1).unwrap();
        assert!(conductor_eta_sum(&dec, 6).is_empty());
        // chi_{-7}(2) = 1 splits 2 | 6, so delta vanishes
        assert_eq!(horizontal_height(7, 6).unwrap(), 0.0);
        assert!(horizontal_height(1, 5).is_err());
    }

    #[test]
    fn horizontal_dual_route() {
        // the double sum against the local-polynomial form of the same term
        for (m, big_d) in [(9i64, 22u64), (1, 6), (12, 35), (27, 10), (75, 14)] {
            let dec = decompose(m).unwrap();
            let delta = classnum::delta_factor(dec.delta, big_d).unwrap() as f64;
            let h0 = rat_to_f64(&classnum::h0_pos(m, big_d).unwrap());
            let mut off = 0.0;
            for p in arith::factorize(dec.n).primes() {
                if big_d % p != 0 {
                    let k = ord_p(dec.n, p);
                    let ld = localpoly::b_logderiv_zero(p, k, dec.chi(p), false).unwrap();
                    off += (-(k as f64) - rat_to_f64(&ld)) * (p as f64).ln();
                }
            }
            let other = 2.0 * delta * h0 * (faltings_star(dec.delta).unwrap() + off);
            let h = horizontal_height(m, big_d).unwrap();
            assert!(rel(h, other) < 1e-12, "m={m} D={big_d}: {h} vs {other}");
        }
    }

    #[test]
    fn lemma109_cases() {
        // single prime powers n = p^t with each splitting behaviour; m = n^2 d / 4
        for (p, t) in [(2u64, 3u32), (3, 2), (5, 1)] {
            let n = p.pow(t) as i64;
            for d in [3i64, 4, 7, 8, 11, 15, 20, 24] {
                if (n * n * d) % 4 != 0 {
                    continue;
                }
                let m = n * n * d / 4;
                let r = lemma109_check(m, 1).unwrap();
                assert!(r.passed(), "{r}");
            }
        }
        assert!(lemma109_check(108, 1).unwrap().passed());
        let r = lemma109_check(3, 6).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        for m in 1..=300 {
            for big_d in [1u64, 6, 10, 15] {
                assert!(lemma109_check(m, big_d).unwrap().passed(), "m={m} D={big_d}");
            }
        }
    }

    #[test]
    fn lemma109_covers_all_chi() {
        let mut seen = [false; 3];
        for m in 1..=300 {
            let dec = decompose(m).unwrap();
            for p in arith::factorize(dec.n).primes() {
                seen[(dec.chi(p) + 1) as usize] = true;
            }
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn tree_examples() {
        assert_eq!(tree_mult_sum(3, 1, TreeCase::InertVertex).unwrap(), rat(1, 1));
        assert_eq!(tree_mult_sum(3, 2, TreeCase::InertVertex).unwrap(), rat(6, 1));
        assert_eq!(tree_mult_sum(2, 1, TreeCase::RamifiedEdgePair).unwrap(), rat(2, 1));
        assert!(tree_mult_sum(4, 1, TreeCase::InertVertex).is_err());
        assert!(tree_mult_sum(3, 0, TreeCase::InertVertex).is_err());
    }

    #[test]
    fn tree_matches_closed_forms() {
        for p in [2u64, 3, 5, 7] {
            let pr = rat(p as i64, 1);
            let one = Rational::one();
            for k in 1..=6u32 {
                let kr = rat(k as i64, 1);
                let pk = Rational::from_integer(num_bigint::BigInt::from(p).pow(k));
                let inert = -rat(2, 1) * &kr + (&pr + &one) * (&pk - &one) / (&pr - &one);
                let ramified =
                    -rat(2, 1) * &kr - rat(2, 1) + rat(2, 1) * (&pk * &pr - &one) / (&pr - &one);
                let split = rat(2, 1) * (&pk - &one);
                for (case, closed) in [
                    (TreeCase::InertVertex, inert),
                    (TreeCase::RamifiedEdgePair, ramified),
                    (TreeCase::SplitApartment, split),
                ] {
                    let t = tree_mult_sum(p, k, case).unwrap();
                    assert_eq!(&t * (&pr - &one), closed, "p={p} k={k} {case:?}");
                    assert_eq!(t, tree_shell_sum(p, k, case), "p={p} k={k} {case:?}");
                }
            }
        }
    }

    #[test]
    fn vertical_matches_local_constants() {
        // (p - 1) * shells / 2 equals K_p for non-split p
        for p in [2u64, 3, 5, 7] {
            for k in 0..=6u32 {
                for chi in [-1, 0] {
                    let t = tree_shell_sum(p, k, TreeCase::from_chi(chi)) * rat(p as i64 - 1, 2);
                    assert_eq!(t, eisenstein::k_p(p, k, chi).unwrap(), "p={p} k={k} chi={chi}");
                }
            }
        }
        // k = 0 gives nothing; p = 2 inert with k = 1 gives the factor 1/2
        assert_eq!(vertical_degree(1, 6, 2).unwrap(), 0.0);
        // m = 20: d = 20, n = 2, 2 ramified and 5 ramified
        assert!(vertical_degree(20, 10, 2).unwrap() > 0.0);
        // d = 3, n = 2: 2 inert, 5 inert, D = 10
        let v = vertical_degree(3, 10, 2).unwrap();
        let h0 = rat_to_f64(&classnum::h0_pos(3, 10).unwrap());
        let delta = classnum::delta_factor(-3, 10).unwrap() as f64;
        assert!((v - 2.0 * h0 * delta * 0.5 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn kappa_examples() {
        let j = special::j_integral(4.0 * PI).unwrap();
        assert!(rel(kappa_arch(1, 1.0, 6).unwrap(), 0.5 * j) < 1e-12);
        assert_eq!(kappa_arch(7, 1.0, 6).unwrap(), 0.0);
        let row = eisenstein::coeff_deriv_half(-3, 1.0, 6).unwrap();
        assert!(rel(kappa_arch_scaled(-3, 1.0, 6).unwrap(), row.deriv_half_scaled) < 1e-12);
        assert!(kappa_arch(1, 0.0, 6).is_err());
    }

    #[test]
    fn height_examples() {
        let h = height_pairing(1, 1.0, 6).unwrap();
        assert!(h.vertical.values().all(|&x| x == 0.0));
        assert_eq!(h.vertical.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
        assert!(rel(h.total, h.horizontal + 0.5 * special::j_integral(4.0 * PI).unwrap()) < 1e-12);
        let h = height_pairing(-2, 1.0, 6).unwrap();
        assert!(h.vertical.is_empty());
        assert_eq!(h.horizontal, 0.0);
        assert_eq!(h.total, h.kappa);
        // unique split prime with k >= 1: m = 7 * 4 = 28, d = 7, n = 2, chi(2) = 1, D = 10
        let h = height_pairing(28, 1.0, 10).unwrap();
        assert_eq!(h.horizontal, 0.0);
        assert_eq!(h.kappa, 0.0);
        assert!(h.vertical[&2] > 0.0);
        assert_eq!(h.vertical[&5], 0.0);
        assert!(height_pairing(1, 1.0, 30).is_err());
        assert!(height_pairing(1, 1.0, 12).is_err());
        assert!(height_pairing(0, 1.0, 6).is_err());
    }

    #[test]
    fn two_split_primes_vanish() {
        // d = 23: chi(2) = chi(3) = 1
        let h = height_pairing(23, 1.0, 6).unwrap();
        assert_eq!(h.total, 0.0);
        assert_eq!(eisenstein::coeff_deriv_half(23, 1.0, 6).unwrap().deriv_half, 0.0);
    }

    #[test]
    fn main_identity_sample() {
        for big_d in [6u64, 10, 14, 15, 21, 22, 26, 33, 34, 35] {
            for v in [0.5, 1.0, 2.0] {
                for m in (-40..=40).filter(|&m| m != 0) {
                    let r = main_identity_report(m, v, big_d).unwrap();
                    assert!(r.passed(), "{r}");
                }
            }
        }
    }

    #[test]
    fn constant_term_examples() {
        for v in [0.5, 1.0, 2.0] {
            let r = constant_term_report(v, 1).unwrap();
            assert!(r.passed(), "{r}");
            for big_d in [6u64, 10, 15] {
                let r = constant_term_report(v, big_d).unwrap();
                assert!(r.passed(), "{r}");
                assert!(r.note.as_ref().unwrap().contains("CONJECTURAL"));
                let e0 = eisenstein::coeff_deriv_half(0, v, big_d).unwrap().deriv_half;
                let c0 = constant_term_deriv(v, big_d).unwrap();
                assert!(rel(c0, e0) < 1e-11, "{c0} {e0}");
            }
        }
    }
}
