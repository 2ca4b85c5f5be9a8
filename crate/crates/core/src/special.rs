//! Real special functions: gamma and digamma, Hurwitz and Riemann zeta with
//! `s`-derivatives, Dirichlet L-values of quadratic characters, the integral
//! `J(t)`, the confluent hypergeometric `Psi(a,b;z)`, the tail integral
//! `int_1^inf e^{-cr} r^{-3/2} dr`, and the archimedean Whittaker functions
//! for weight `3/2`.
//!
//! Every integral has two independent evaluations: a double-exponential
//! rule and adaptive Gauss-Kronrod (or a closed form in incomplete gamma
//! functions for the tail integral).

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{is_fundamental, kronecker};
use crate::classnum;
use crate::error::{invalid, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return invalid(format!("log_gamma needs x > 0, got {x}"));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `Gamma'(x)/Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return invalid(format!("digamma needs x > 0, got {x}"));
    }
    Ok(statrs::function::gamma::digamma(x))
}

/// `Gamma(x)` for real `x` away from the poles.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `1/Gamma(x)`, an entire function; exactly zero at the poles of `Gamma`.
pub fn rgamma(x: f64) -> f64 {
    if x >= 0.5 {
        return 1.0 / gamma(x);
    }
    if x == x.round() {
        return 0.0;
    }
    // 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi
    gamma(1.0 - x) * (PI * x).sin() / PI
}

/// The metric constant `C = (log 4 pi + gamma) / 2`.
pub fn metric_constant() -> f64 {
    0.5 * ((4.0 * PI).ln() + EULER_GAMMA)
}

// ---------------------------------------------------------------------------
// Quadrature.

pub mod quad {
    //! Double-exponential and adaptive Gauss-Kronrod quadrature.

    use std::f64::consts::FRAC_PI_2;

    const MAX_LEVEL: u32 = 12;

    /// Trapezoid sums of a transformed integrand `g(t)` on `[t_lo, t_hi]`
    /// with step halving until two levels agree to `tol` (relative).
    fn de_sum(g: impl Fn(f64) -> f64, t_lo: f64, t_hi: f64, tol: f64) -> f64 {
        let mut h = 0.5;
        let mut sum = 0.0;
        let mut t = t_lo;
        while t <= t_hi + 1e-12 {
            sum += g(t);
            t += h;
        }
        let mut prev = sum * h;
        for _ in 0..MAX_LEVEL {
            h /= 2.0;
            let mut t = t_lo + h;
            while t <= t_hi {
                sum += g(t);
                t += 2.0 * h;
            }
            let cur = sum * h;
            if (cur - prev).abs() <= tol * cur.abs() || cur == prev {
                return cur;
            }
            prev = cur;
        }
        prev
    }

    fn finite_or_zero(v: f64) -> f64 {
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// Tanh-sinh rule on `[a, b]`; tolerates integrable endpoint singularities.
    pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let half = 0.5 * (b - a);
        let g = |t: f64| {
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u.abs()).exp();
            // distance from the nearer endpoint, in units of half-length
            let comp = 2.0 * e / (1.0 + e);
            if comp == 0.0 {
                return 0.0;
            }
            let x = if t >= 0.0 { b - half * comp } else { a + half * comp };
            let cosh_u = u.cosh();
            let w = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
            finite_or_zero(w * f(x))
        };
        de_sum(g, -6.0, 6.0, tol)
    }

    /// Exp-sinh rule on `[a, inf)` for integrands decaying at least
    /// exponentially; tolerates an integrable singularity at `a`.
    pub fn exp_sinh(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> f64 {
        let g = |t: f64| {
            let e = (FRAC_PI_2 * t.sinh()).exp();
            if e == 0.0 || !e.is_finite() {
                return 0.0;
            }
            let w = FRAC_PI_2 * t.cosh() * e;
            finite_or_zero(w * f(a + e))
        };
        de_sum(g, -6.0, 4.0, tol)
    }

    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_728,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut k = fc * WGK[7];
        let mut g = fc * WG[3];
        for i in 0..7 {
            let dx = h * XGK[i];
            let s = f(c - dx) + f(c + dx);
            k += WGK[i] * s;
            if i % 2 == 1 {
                g += WG[i / 2] * s;
            }
        }
        (k * h, ((k - g) * h).abs())
    }

    fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, depth: u32) -> f64 {
        let (k, err) = gk15(f, a, b);
        if err <= abs_tol || depth == 0 || (b - a).abs() < 1e-15 * a.abs().max(1e-300) {
            return k;
        }
        let m = 0.5 * (a + b);
        adapt(f, a, m, 0.5 * abs_tol, depth - 1) + adapt(f, m, b, 0.5 * abs_tol, depth - 1)
    }

    /// Adaptive Gauss-Kronrod (7/15) on `[a, b]` to relative tolerance `tol`.
    pub fn gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let (rough, _) = gk15(&f, a, b);
        let scale = rough.abs().max(f64::MIN_POSITIVE);
        adapt(&f, a, b, tol * scale, 48)
    }

    /// Adaptive Gauss-Kronrod on `[0, inf)` over dyadic blocks
    /// `[0,1], [1,2], [2,4], ...` up to `u_max`, for integrands carrying
    /// `e^{-u}`. Each block gets the relative tolerance `tol`.
    pub fn gauss_kronrod_semi_infinite(f: impl Fn(f64) -> f64, u_max: f64, tol: f64) -> f64 {
        let mut total = gauss_kronrod(&f, 0.0, 1.0, tol);
        let mut lo = 1.0;
        while lo < u_max {
            total += gauss_kronrod(&f, lo, 2.0 * lo, tol);
            lo *= 2.0;
        }
        total
    }
}

const DE_TOL: f64 = 1e-14;
const GK_TOL: f64 = 1e-13;
/// Blocks beyond this contribute below `e^{-128}` relative to `e^{-u}`-type integrands.
const GK_U_MAX: f64 = 128.0;

// ---------------------------------------------------------------------------
// Hurwitz and Riemann zeta.

/// `B_{2j} / (2j)!` for `j = 1..=13`.
const BERNOULLI_OVER_FACT: [f64; 13] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1693824136731743669452800000.0,
    657931.0 / 186134520519971831808000000.0,
];

// Small enough to limit cancellation for s < 0, large enough for the
// asymptotic remainder to stay below 1e-17 on -3 < s < 4.
const EM_SHIFT: u32 = 8;

/// `expm1(y)/y`, equal to 1 at 0.
fn expm1_over(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 + 0.5 * y
    } else {
        y.exp_m1() / y
    }
}

/// `(y e^y - e^y + 1) / y^2`, equal to 1/2 at 0.
fn pole_deriv_kernel(y: f64) -> f64 {
    if y.abs() < 1e-2 {
        let y2 = y * y;
        0.5 + y / 3.0 + y2 / 8.0 + y2 * y / 30.0 + y2 * y2 / 144.0 + y2 * y2 * y / 840.0
    } else {
        (y * y.exp() - y.exp_m1()) / (y * y)
    }
}

/// Regularized Hurwitz zeta `zeta(s,a) - 1/(s-1)` and its `s`-derivative,
/// both finite at `s = 1`, by Euler-Maclaurin summation.
pub fn hurwitz_zeta_reg_with_deriv(s: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 1.0) {
        return invalid(format!("Hurwitz parameter a = {a} must lie in (0, 1]"));
    }
    let mut val = 0.0;
    let mut der = 0.0;
    for k in 0..EM_SHIFT {
        let x = k as f64 + a;
        let lx = x.ln();
        let t = (-s * lx).exp();
        val += t;
        der -= lx * t;
    }
    let x = EM_SHIFT as f64 + a;
    let l = x.ln();
    let u = 1.0 - s;
    // x^{1-s}/(s-1) - 1/(s-1) and its s-derivative
    val -= if (u * l).abs() < 0.5 {
        l * expm1_over(u * l)
    } else {
        (x.powf(u) - 1.0) / u
    };
    der += l * l * pole_deriv_kernel(u * l);
    let xs = (-s * l).exp();
    val += 0.5 * xs;
    der -= 0.5 * l * xs;
    // rising factorial s (s+1) ... (s+2j-2) with its derivative
    let mut p = s;
    let mut dp = 1.0;
    let mut xpow = xs / x; // x^{-s-1}
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        if j > 0 {
            for i in [2 * j - 1, 2 * j] {
                let f = s + i as f64;
                dp = dp * f + p;
                p *= f;
            }
            xpow /= x * x;
        }
        val += c * p * xpow;
        der += c * (dp - l * p) * xpow;
    }
    Ok((val, der))
}

/// Hurwitz zeta `zeta(s, a)` for `a in (0, 1]`, `s != 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if s == 1.0 {
        return invalid("Hurwitz zeta has a pole at s = 1");
    }
    Ok(hurwitz_zeta_reg_with_deriv(s, a)?.0 + 1.0 / (s - 1.0))
}

/// `d/ds zeta(s, a)`, `s != 1`.
pub fn hurwitz_zeta_deriv(s: f64, a: f64) -> Result<f64> {
    if s == 1.0 {
        return invalid("Hurwitz zeta has a pole at s = 1");
    }
    let d = s - 1.0;
    Ok(hurwitz_zeta_reg_with_deriv(s, a)?.1 - 1.0 / (d * d))
}

/// Riemann zeta, `s != 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// `zeta'(s)`, `s != 1`.
pub fn riemann_zeta_deriv(s: f64) -> Result<f64> {
    hurwitz_zeta_deriv(s, 1.0)
}

/// `zeta'(2)/zeta(2)`.
pub fn zeta_logderiv_at_2() -> f64 {
    riemann_zeta_deriv(2.0).expect("regular") / riemann_zeta(2.0).expect("regular")
}

/// `zeta'(-1)/zeta(-1)` from the differentiated functional equation:
/// `log 2 pi - 1 + gamma - zeta'(2)/zeta(2)`.
pub fn zeta_logderiv_at_minus1() -> f64 {
    (2.0 * PI).ln() - 1.0 + EULER_GAMMA - zeta_logderiv_at_2()
}

/// `zeta'(-1)/zeta(-1)` directly from Euler-Maclaurin.
pub fn zeta_logderiv_at_minus1_direct() -> f64 {
    riemann_zeta_deriv(-1.0).expect("regular") / riemann_zeta(-1.0).expect("regular")
}

/// Completed zeta `xi(w) = pi^{-w/2} Gamma(w/2) zeta(w)`, `w != 1`.
pub fn completed_zeta(w: f64) -> Result<f64> {
    Ok(PI.powf(-0.5 * w) * gamma(0.5 * w) * riemann_zeta(w)?)
}

// ---------------------------------------------------------------------------
// Dirichlet L-functions of quadratic characters.

fn check_character(delta: i64) -> Result<u64> {
    if delta == 1 || !is_fundamental(delta) {
        return invalid(format!("{delta} is not a fundamental discriminant != 1"));
    }
    Ok(delta.unsigned_abs())
}

/// `L(s, chi_Delta)` and `L'(s, chi_Delta)` through Hurwitz zeta values.
pub fn dirichlet_l_with_deriv(delta: i64, s: f64) -> Result<(f64, f64)> {
    let q = check_character(delta)?;
    let qf = q as f64;
    let mut sum = 0.0;
    let mut dsum = 0.0;
    for a in 1..q {
        let chi = kronecker(delta, a as i64)?;
        if chi == 0 {
            continue;
        }
        // the pole parts cancel because the character sums to zero
        let (z, dz) = hurwitz_zeta_reg_with_deriv(s, a as f64 / qf)?;
        sum += chi as f64 * z;
        dsum += chi as f64 * dz;
    }
    let scale = qf.powf(-s);
    let l = scale * sum;
    Ok((l, -qf.ln() * l + scale * dsum))
}

pub fn dirichlet_l(delta: i64, s: f64) -> Result<f64> {
    Ok(dirichlet_l_with_deriv(delta, s)?.0)
}

/// `L(1,chi)` and `L'(1,chi)/L(1,chi)` for a fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValueBundle {
    pub delta: i64,
    pub l1: f64,
    pub logderiv1: f64,
}

/// `sum_{a=1}^{|Delta|-1} chi(a) log Gamma(a/|Delta|)`.
pub fn log_gamma_character_sum(delta: i64) -> Result<f64> {
    let q = check_character(delta)?;
    let mut s = 0.0;
    for a in 1..q {
        let chi = kronecker(delta, a as i64)?;
        if chi != 0 {
            s += chi as f64 * statrs::function::gamma::ln_gamma(a as f64 / q as f64);
        }
    }
    Ok(s)
}

/// `L(1,chi)` from the class number formula and `L'(1,chi)/L(1,chi)` from
/// the log-gamma sum (imaginary) or Hurwitz-zeta differentiation (real).
pub fn l_values(delta: i64) -> Result<LValueBundle> {
    check_character(delta)?;
    if delta < 0 {
        let inv = classnum::imag_invariants(delta)?;
        let (h, w) = (inv.h as f64, inv.w as f64);
        let q = delta.unsigned_abs() as f64;
        let l1 = 2.0 * PI * h / (w * q.sqrt());
        let logderiv1 = (2.0 * PI).ln() + EULER_GAMMA - w / (2.0 * h) * log_gamma_character_sum(delta)?;
        Ok(LValueBundle { delta, l1, logderiv1 })
    } else {
        let hle = classnum::h_log_eps_lvalue(delta);
        let l1 = 2.0 * hle / (delta as f64).sqrt();
        let (l, dl) = dirichlet_l_with_deriv(delta, 1.0)?;
        Ok(LValueBundle { delta, l1, logderiv1: dl / l })
    }
}

// ---------------------------------------------------------------------------
// J(t), Psi, tail integrals.

/// `(1+x)^c - 1` without cancellation.
fn pow1p_m1(x: f64, c: f64) -> f64 {
    (c * x.ln_1p()).exp_m1()
}

/// `J(t) = int_0^inf e^{-tr} ((1+r)^{1/2} - 1) r^{-1} dr`, written as
/// `int_0^inf e^{-u} ((1+u/t)^{1/2} - 1) u^{-1} du`, by adaptive
/// Gauss-Kronrod over dyadic blocks.
pub fn j_integral(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("J(t) needs t > 0, got {t}"));
    }
    Ok(quad::gauss_kronrod_semi_infinite(|u| j_integrand(u, t), GK_U_MAX, GK_TOL))
}

fn j_integrand(u: f64, t: f64) -> f64 {
    if u == 0.0 {
        return 0.5 / t;
    }
    let x = u / t;
    (-u).exp() * (x / ((1.0 + x).sqrt() + 1.0)) / u
}

/// `J(t)` by the exp-sinh rule, an independent second evaluation.
pub fn j_integral_de(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("J(t) needs t > 0, got {t}"));
    }
    Ok(quad::exp_sinh(|u| j_integrand(u, t), 0.0, DE_TOL))
}

/// `int_0^inf e^{-u} g(u) u^{p} du` for `p > -1`, split at `u = 1` into a
/// tanh-sinh piece (absorbing the singularity) and an exp-sinh piece.
fn laplace_singular(g: impl Fn(f64) -> f64, p: f64) -> f64 {
    let f = |u: f64| (-u).exp() * g(u) * u.powf(p);
    quad::tanh_sinh(f, 0.0, 1.0, DE_TOL) + quad::exp_sinh(f, 1.0, DE_TOL)
}

/// Confluent hypergeometric function of the second kind `Psi(a,b;z)`, `z > 0`.
///
/// `a >= 1`: the defining integral. `-1 < a < 1`: the representation
/// `z^{-a} + Gamma(a)^{-1} int_0^inf e^{-zr} ((r+1)^{b-a-1} - 1) r^{a-1} dr`,
/// which continues the integral to `a > -1` and gives `Psi(0,b;z) = 1`.
/// Otherwise the Kummer relation `Psi(a,b;z) = z^{1-b} Psi(1+a-b, 2-b; z)`.
pub fn psi(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return invalid(format!("Psi needs z > 0, got {z}"));
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    let c = b - a - 1.0;
    if a >= 1.0 {
        // substitute r = u/z
        let integral = laplace_singular(|u| (u / z).ln_1p().mul_add(c, 0.0).exp(), a - 1.0);
        return Ok(z.powf(-a) * rgamma(a) * integral);
    }
    if a > -1.0 {
        let integral = laplace_singular(|u| pow1p_m1(u / z, c), a - 1.0);
        return Ok(z.powf(-a) * (1.0 + rgamma(a) * integral));
    }
    let a2 = 1.0 + a - b;
    if a2 > -1.0 {
        return Ok(z.powf(1.0 - b) * psi(a2, 2.0 - b, z)?);
    }
    invalid(format!("Psi({a},{b};z): neither representation converges"))
}

/// `Psi_n(s, z) = Psi((1+n+s)/2, s+1; z)`.
pub fn psi_n(n: f64, s: f64, z: f64) -> Result<f64> {
    psi(0.5 * (1.0 + n + s), s + 1.0, z)
}

/// `e^c int_1^inf e^{-cr} r^{-3/2} dr = c^{1/2} e^c Gamma(-1/2, c)`.
pub fn tail_integral_scaled(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return invalid(format!("tail integral needs c > 0, got {c}"));
    }
    if c < 1.0 {
        // 2 - 2 sqrt(pi c) e^c erfc(sqrt c), with erf summed from its series
        let x = c.sqrt();
        let mut term = x;
        let mut erf_sum = x;
        for n in 1..60 {
            term *= -c / n as f64;
            let t = term / (2 * n + 1) as f64;
            erf_sum += t;
            if t.abs() < 1e-18 {
                break;
            }
        }
        let erfc = 1.0 - 2.0 / PI.sqrt() * erf_sum;
        return Ok(2.0 - 2.0 * (PI * c).sqrt() * c.exp() * erfc);
    }
    // continued fraction for e^x x^{-a} Gamma(a, x) at a = -1/2
    let a = -0.5;
    let tiny = 1e-300;
    let mut bb = c + 1.0 - a;
    let mut cc = 1.0 / tiny;
    let mut dd = 1.0 / bb;
    let mut h = dd;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        bb += 2.0;
        dd = an * dd + bb;
        if dd.abs() < tiny {
            dd = tiny;
        }
        cc = bb + an / cc;
        if cc.abs() < tiny {
            cc = tiny;
        }
        dd = 1.0 / dd;
        let del = dd * cc;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    Ok(h)
}

/// `int_1^inf e^{-cr} r^{-3/2} dr` (underflows to 0 for very large `c`).
pub fn tail_integral(c: f64) -> Result<f64> {
    Ok((-c).exp() * tail_integral_scaled(c)?)
}

/// `e^c int_1^inf e^{-cr} r^{-3/2} dr` by quadrature after `r = 1 + u/c`.
pub fn tail_integral_quad_scaled(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return invalid(format!("tail integral needs c > 0, got {c}"));
    }
    let f = |u: f64| (-u).exp() * (1.0 + u / c).powf(-1.5);
    Ok(quad::exp_sinh(f, 0.0, DE_TOL) / c)
}

/// `e^c int_1^inf e^{-cr} r^{-1/2} dr` by quadrature.
pub fn tail_integral_half_quad_scaled(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return invalid(format!("tail integral needs c > 0, got {c}"));
    }
    let f = |u: f64| (-u).exp() * (1.0 + u / c).powf(-0.5);
    Ok(quad::gauss_kronrod_semi_infinite(f, GK_U_MAX, GK_TOL) / c)
}

// ---------------------------------------------------------------------------
// Archimedean Whittaker functions, weight l = 3/2, with q^m factored out.

const ELL: f64 = 1.5;

/// `e(-3/8) = (-i)^{3/2}`.
fn phase() -> Complex64 {
    Complex64::from_polar(1.0, -0.75 * PI)
}

/// `C_inf = (-2i)^{3/2} pi = 2^{3/2} e(-3/8) pi`.
pub fn c_infinity() -> Complex64 {
    phase() * (2f64.powf(1.5) * PI)
}

/// `W_{m,inf}(tau, s)` divided by `q^m` (Prop. 15.1 (i)-(iii) at `l = 3/2`).
/// For `m < 0` the factor `e^{-4 pi |m| v}` is included.
pub fn whittaker_arch(m: i64, v: f64, s: f64) -> Result<Complex64> {
    Ok(phase() * whittaker_arch_real(m, v, s)?)
}

/// `whittaker_arch` without the constant phase `e(-3/8)`.
pub fn whittaker_arch_real(m: i64, v: f64, s: f64) -> Result<f64> {
    if !(v > 0.0) {
        return invalid(format!("v must be positive, got {v}"));
    }
    let alpha = 0.5 * (s + 1.0 + ELL);
    let beta = 0.5 * (s + 1.0 - ELL);
    let am = m.unsigned_abs() as f64;
    let z = 4.0 * PI * am * v;
    Ok(match m.signum() {
        1 => 2.0 * PI * v.powf(beta) * (2.0 * PI * am).powf(s) * psi_n(-ELL, s, z)? * rgamma(alpha),
        -1 => {
            2.0 * PI
                * v.powf(beta)
                * (2.0 * PI * am).powf(s)
                * psi_n(ELL, s, z)?
                * rgamma(beta)
                * (-z).exp()
        }
        _ => {
            2.0 * PI * v.powf(0.5 * (1.0 - ELL - s)) * 2f64.powf(-s) * gamma(s) * rgamma(alpha) * rgamma(beta)
        }
    })
}

/// Special value at `s = 1/2`: `(-2 pi i)^{3/2} m^{1/2} / Gamma(3/2)` for
/// `m > 0`, zero otherwise.
pub fn whittaker_arch_half(m: i64) -> Complex64 {
    if m <= 0 {
        return Complex64::new(0.0, 0.0);
    }
    // (-2 pi i)^{3/2} = (2 pi)^{3/2} e(-3/8)
    phase() * ((2.0 * PI).powf(1.5) * (m as f64).sqrt() / gamma(1.5))
}

/// `W'/W` at `s = 1/2` for `m > 0`: `(log(pi m) - psi(3/2) + J(4 pi m v)) / 2`.
pub fn whittaker_logderiv_half(m: i64, v: f64) -> Result<f64> {
    if m <= 0 {
        return invalid("log-derivative at s = 1/2 requires m > 0");
    }
    let mf = m as f64;
    Ok(0.5 * ((PI * mf).ln() - (2.0 - EULER_GAMMA - 2.0 * LN_2) + j_integral(4.0 * PI * mf * v)?))
}

/// `W'(1/2)` for `m < 0` times `e^{4 pi |m| v}`, in the form
/// `C_inf (1/4) v^{-1/2} e^c int_1^inf e^{-cr} r^{-3/2} dr`, `c = 4 pi |m| v`.
pub fn whittaker_deriv_half_neg_scaled(m: i64, v: f64) -> Result<Complex64> {
    if m >= 0 {
        return invalid("requires m < 0");
    }
    let c = 4.0 * PI * m.unsigned_abs() as f64 * v;
    Ok(c_infinity() * (0.25 / v.sqrt() * tail_integral_scaled(c)?))
}

/// The same quantity in the form
/// `C_inf |m|^{1/2} int_0^inf e^{-cr} (r+1)^{-1} r^{1/2} dr`, by quadrature.
pub fn whittaker_deriv_half_neg_scaled_alt(m: i64, v: f64) -> Result<Complex64> {
    if m >= 0 {
        return invalid("requires m < 0");
    }
    let am = m.unsigned_abs() as f64;
    let c = 4.0 * PI * am * v;
    // u = c r
    let integral = laplace_singular(|u| 1.0 / (1.0 + u / c), 0.5) * c.powf(-1.5);
    Ok(c_infinity() * (am.sqrt() * integral))
}
