//! Named identity suites shared by the command-line tool and the acceptance
//! tests. Each suite returns one [`CheckReport`] per comparison, in a fixed
//! order independent of parallelism.

use std::f64::consts::PI;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, decompose, ord_p};
use crate::classnum;
use crate::eisenstein;
use crate::error::{Error, Result};
use crate::geometry::{self, TreeCase};
use crate::localpoly;
use crate::report::{CheckReport, Params};
use crate::special;
use crate::{rat, Rational};

/// Quaternion discriminants used by the identity grids.
pub const D_GRID: [u64; 10] = [6, 10, 14, 15, 21, 22, 26, 33, 34, 35];
pub const V_GRID: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    LocalDensity,
    ClassNumbers,
    Special,
    MainIdentity,
    Functional,
    Constants,
}

impl Suite {
    pub const ALL_SUITES: [Suite; 6] = [
        Suite::LocalDensity,
        Suite::ClassNumbers,
        Suite::Special,
        Suite::MainIdentity,
        Suite::Functional,
        Suite::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::LocalDensity => "localdensity",
            Suite::ClassNumbers => "classnumbers",
            Suite::Special => "special",
            Suite::MainIdentity => "mainidentity",
            Suite::Functional => "functional",
            Suite::Constants => "constants",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    /// Smaller grids for interactive use.
    pub quick: bool,
    /// Restrict prime-indexed checks of the local density suite to one prime.
    pub prime: Option<u64>,
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Vec<CheckReport> {
    match suite {
        Suite::All => Suite::ALL_SUITES.iter().flat_map(|&s| run_suite(s, opts)).collect(),
        Suite::LocalDensity => local_density_suite(opts),
        Suite::ClassNumbers => class_number_suite(opts),
        Suite::Special => special_suite(opts),
        Suite::MainIdentity => main_identity_suite(opts),
        Suite::Functional => functional_suite(opts),
        Suite::Constants => constants_suite(),
    }
}

/// Turn a failed computation into a report instead of aborting the suite.
fn guard(name: &str, params: Params, r: Result<CheckReport>) -> CheckReport {
    match r {
        Ok(rep) => rep,
        Err(Error::Inconclusive(msg)) => CheckReport::inconclusive(name, params, msg),
        Err(e) => {
            let mut rep = CheckReport::inconclusive(name, params, e.to_string());
            rep.status = crate::CheckStatus::Fail;
            rep
        }
    }
}

fn primes_for(opts: &CheckOptions, default: &[u64]) -> Vec<u64> {
    match opts.prime {
        Some(p) => vec![p],
        None => default.to_vec(),
    }
}

// ---------------------------------------------------------------------------
// Local densities and b_p.

/// `W_2(m, S_r)` for `2 !| D` from the three explicit subcase polynomials
/// in `X = 2^{-r}`, with the subcase number (1: `8 | d`, 2: `ord_2 d = 2`,
/// 3: `d` odd).
pub fn p2_subcase_density(m: i64, r: u32) -> Result<(u32, Rational)> {
    let dec = decompose(m)?;
    let d = dec.d();
    let k = ord_p(dec.n, 2) as i32;
    let x = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(r));
    let one = Rational::one();
    let x2 = &x * &x;
    let quarter = rat(1, 4);
    let half = rat(1, 2);
    let denom = &one - &half * &x2;
    let two_pow = |e: i32| -> Rational {
        let b = num_bigint::BigInt::from(2).pow(e.unsigned_abs());
        if e >= 0 {
            Rational::from_integer(b)
        } else {
            Rational::new(1.into(), b)
        }
    };
    let ord2 = arith::ord_p(d.unsigned_abs(), 2);
    if ord2 >= 2 {
        let case = if ord2 >= 3 { 1 } else { 2 };
        let top = (&one - &quarter * &x2) * (&one - (&half * &x2).pow(k + 1));
        return Ok((case, top / denom));
    }
    let v = rat(dec.chi(2) as i64, 1);
    let tail = two_pow(-k - 1) * x.pow(2 * k + 1) * (-&v + &half * &x + &v * &half * &x2);
    Ok((3, (&one - &quarter * &x2 - tail) / denom))
}

pub fn local_density_suite(opts: &CheckOptions) -> Vec<CheckReport> {
    let ms: Vec<i64> = if opts.quick { (-8..=8).collect() } else { (-20..=20).collect() };
    let mut jobs = Vec::new();
    for p in primes_for(opts, &[2, 3, 5]) {
        for r in [1u32, 2] {
            for ramified in [false, true] {
                for &m in &ms {
                    jobs.push((p, r, ramified, m));
                }
            }
        }
    }
    let mut out: Vec<CheckReport> = jobs
        .par_iter()
        .map(|&(p, r, ramified, m)| {
            let params = Params::new()
                .with("p", p)
                .with("r", r)
                .with("ramified", ramified)
                .with("m", m);
            let res = (|| {
                let oracle = localpoly::local_density_oracle(p, m, r, ramified, None)?;
                let closed = localpoly::local_density_closed(p, m, r, ramified)?;
                Ok(CheckReport::exact("local_density", params.clone(), &oracle, &closed))
            })();
            guard("local_density", params, res)
        })
        .collect();

    if opts.prime.is_none() || opts.prime == Some(2) {
        let sub: Vec<CheckReport> = ms
            .iter()
            .filter(|&&m| m != 0)
            .flat_map(|&m| [1u32, 2].map(|r| (m, r)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(m, r)| {
                let base = Params::new().with("m", m).with("r", r);
                let res = (|| {
                    let (case, formula) = p2_subcase_density(m, r)?;
                    let oracle = localpoly::local_density_oracle(2, m, r, false, None)?;
                    Ok(CheckReport::exact(
                        "p2_subcase",
                        base.clone().with("subcase", case),
                        &oracle,
                        &formula,
                    ))
                })();
                guard("p2_subcase", base, res)
            })
            .collect();
        out.extend(sub);
    }

    for p in primes_for(opts, &[2, 3, 5, 7]) {
        for k in 0..=6u32 {
            for chi in -1..=1 {
                for on_d in [false, true] {
                    out.extend(b_poly_reports(p, k, chi, on_d));
                }
            }
        }
    }
    out
}

/// Functional equation and polynomial-calculus derivative of one `b_p`.
pub fn b_poly_reports(p: u64, k: u32, chi: i32, on_d: bool) -> Vec<CheckReport> {
    let params = Params::new()
        .with("p", p)
        .with("k", k)
        .with("chi", chi)
        .with("on_D", on_d);
    let res = (|| -> Result<Vec<CheckReport>> {
        let bp = localpoly::b_poly(p, k, chi, on_d)?;
        let fe = bp.functional_equation_holds();
        let fe_rep = CheckReport::exact(
            "b_p_functional_equation",
            params.clone(),
            &Rational::from_integer(i32::from(fe).into()),
            &Rational::one(),
        );
        let closed = localpoly::b_logderiv_zero(p, k, chi, on_d)?;
        let calc = if on_d && chi == 1 {
            bp.deriv_at_zero()
        } else {
            bp.logderiv_at_zero()
                .ok_or_else(|| Error::Internal("b_p(n,0;D) vanished".into()))?
        };
        let value = CheckReport::exact(
            "b_p_value_at_zero",
            params.clone(),
            &bp.value_at_zero(),
            &localpoly::b_at_zero(p, k, chi, on_d)?,
        );
        let deriv = CheckReport::exact("b_p_log_derivative", params.clone(), &calc, &closed);
        Ok(vec![fe_rep, value, deriv])
    })();
    match res {
        Ok(v) => v,
        Err(e) => vec![guard("b_p", params, Err(e))],
    }
}

// ---------------------------------------------------------------------------
// Class numbers, degrees, conductor sums.

/// Discriminants covering every splitting behaviour at 2, 3 and 5.
pub const CONDUCTOR_DELTAS: [i64; 8] = [-3, -4, -7, -8, -15, -20, -24, -23];

pub fn class_number_suite(opts: &CheckOptions) -> Vec<CheckReport> {
    let (imag_max, real_max, deg_max, n_max) = if opts.quick { (100, 60, 50, 60) } else { (400, 200, 200, 500) };
    let mut out = class_number_formula_reports(imag_max);
    out.extend(regulator_reports(real_max));
    out.extend(hurwitz_bridge_reports(deg_max));
    out.extend(degree_identity_reports(deg_max));
    out.extend(conductor_reports(n_max));
    out
}

/// Form-count class numbers against `L(1, chi)` from Hurwitz zeta values,
/// for imaginary fundamental discriminants `-imag_max < Delta < 0`.
pub fn class_number_formula_reports(imag_max: i64) -> Vec<CheckReport> {
    (-imag_max..0)
        .filter(|&d| arith::is_fundamental(d))
        .map(|delta| {
            let params = Params::new().with("Delta", delta);
            let res = (|| {
                let inv = classnum::imag_invariants(delta)?;
                let l1 = special::dirichlet_l(delta, 1.0)?;
                let h = inv.w as f64 * (delta.unsigned_abs() as f64).sqrt() * l1 / (2.0 * PI);
                Ok(CheckReport::float("class_number_formula", params.clone(), inv.h as f64, h, 1e-10))
            })();
            guard("class_number_formula", params, res)
        })
        .collect()
}

/// `h log eps` from reduced-form cycles and Pell solutions against the
/// log-sine formula, for real fundamental discriminants up to `real_max`.
pub fn regulator_reports(real_max: i64) -> Vec<CheckReport> {
    (2..=real_max)
        .filter(|&d| arith::is_fundamental(d))
        .map(|delta| {
            let params = Params::new().with("Delta", delta);
            let res = (|| {
                let ord = classnum::real_order_invariants(delta)?;
                let pell = ord.h as f64 * ord.log_eps;
                Ok(CheckReport::float(
                    "regulator_log_sin",
                    params.clone(),
                    pell,
                    classnum::h_log_eps_lvalue(delta),
                    1e-10,
                ))
            })();
            guard("regulator_log_sin", params, res)
        })
        .collect()
}

/// `2 H_0(m;1) = H(4m)` with `H` from form counting.
pub fn hurwitz_bridge_reports(m_max: i64) -> Vec<CheckReport> {
    (1..=m_max)
        .map(|m| {
            let params = Params::new().with("m", m);
            let res = (|| {
                let two_h0 = rat(2, 1) * classnum::h0_pos(m, 1)?;
                Ok(CheckReport::exact(
                    "hurwitz_bridge",
                    params.clone(),
                    &two_h0,
                    &classnum::hurwitz(4 * m as u64),
                ))
            })();
            guard("hurwitz_bridge", params, res)
        })
        .collect()
}

/// Value at `s = 1/2` against `2 delta H_0` and the optimal-embedding degree
/// of `Z(m)`, and the constant term against `zeta_D(-1)`, over [`D_GRID`].
pub fn degree_identity_reports(m_max: i64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for big_d in D_GRID {
        for m in 1..=m_max {
            let params = Params::new().with("m", m).with("D", big_d);
            let res = (|| {
                let value = eisenstein::coeff_value_half(m, big_d)?;
                let dec = decompose(m)?;
                let delta = classnum::delta_factor(dec.delta, big_d)?;
                let formula = rat(2 * delta as i64, 1) * classnum::h0_pos(m, big_d)?;
                let degree = classnum::degree_z(m, big_d)?;
                let mut rep = CheckReport::exact("degree_identity", params.clone(), &value, &degree);
                if value != formula {
                    rep.status = crate::CheckStatus::Fail;
                }
                Ok(rep)
            })();
            out.push(guard("degree_identity", params, res));
        }
        let params = Params::new().with("D", big_d);
        let res = (|| {
            Ok(CheckReport::exact(
                "constant_term_value",
                params.clone(),
                &eisenstein::coeff_value_half(0, big_d)?,
                &classnum::zeta_d_minus_one(big_d)?,
            ))
        })();
        out.push(guard("constant_term_value", params, res));
    }
    out
}

/// Conductor sums as products of local values, and the `eta_p` identity,
/// for all `n <= n_max` and a spread of characters and `D`.
pub fn conductor_reports(n_max: u64) -> Vec<CheckReport> {
    let mut jobs = Vec::new();
    for big_d in [1u64, 6, 10, 15] {
        for &delta in &CONDUCTOR_DELTAS {
            for n in 1..=n_max {
                jobs.push((big_d, delta, n));
            }
        }
    }
    jobs.par_iter()
        .flat_map_iter(|&(big_d, delta, n)| {
            let params = Params::new().with("n", n).with("Delta", delta).with("D", big_d);
            let dec = arith::Decomposition { m: 0, n, delta };
            let mut prod = Rational::one();
            for p in arith::factorize(n).primes() {
                if big_d % p != 0 {
                    match localpoly::b_at_zero(p, ord_p(n, p), dec.chi(p), false) {
                        Ok(b) => prod *= b,
                        Err(e) => return vec![guard("conductor_product", params, Err(e))],
                    }
                }
            }
            let mut reps = vec![CheckReport::exact(
                "conductor_product",
                params.clone(),
                &prod,
                &classnum::conductor_sum(&dec, big_d),
            )];
            // 4m = n^2 d must be divisible by 4
            let d = delta.unsigned_abs();
            if (n * n * d) % 4 == 0 {
                let m = (n * n * d / 4) as i64;
                reps.push(guard(
                    "conductor_eta_identity",
                    params,
                    geometry::lemma109_check(m, big_d),
                ));
            }
            reps
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Special functions and the constant-term ledger.

pub fn special_suite(_opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(CheckReport::float_abs(
        "zeta_logderiv_minus1_routes",
        Params::new(),
        special::zeta_logderiv_at_minus1(),
        special::zeta_logderiv_at_minus1_direct(),
        1e-12,
    ));
    for t in [0.05, 0.5, 2.0, 4.0 * PI, 50.0, 400.0] {
        let params = Params::new().with("t", t);
        let res = (|| {
            Ok(CheckReport::float(
                "j_integral_dual",
                params.clone(),
                special::j_integral(t)?,
                special::j_integral_de(t)?,
                1e-11,
            ))
        })();
        out.push(guard("j_integral_dual", params, res));
    }
    for c in [1e-3, 0.5, 0.99, 1.0, 3.0, 4.0 * PI, 200.0, 3000.0] {
        let params = Params::new().with("c", c);
        let res = (|| {
            Ok(CheckReport::float(
                "tail_integral_dual",
                params.clone(),
                special::tail_integral_scaled(c)?,
                special::tail_integral_quad_scaled(c)?,
                1e-11,
            ))
        })();
        out.push(guard("tail_integral_dual", params, res));
    }
    for delta in [-3i64, -4, -7, -8, -23, -84, -163] {
        out.push(guard(
            "faltings_offset",
            Params::new().with("Delta", delta),
            geometry::faltings_offset_report(delta),
        ));
    }
    for m in [-7i64, -3, -1] {
        for v in V_GRID {
            let params = Params::new().with("m", m).with("v", v);
            let res = (|| {
                let a = special::whittaker_deriv_half_neg_scaled(m, v)?;
                let b = special::whittaker_deriv_half_neg_scaled_alt(m, v)?;
                Ok(CheckReport::float("whittaker_deriv_negative_dual", params.clone(), a.re, b.re, 1e-10))
            })();
            out.push(guard("whittaker_deriv_negative_dual", params, res));
        }
    }
    out.extend(constant_term_ledger_reports());
    out
}

/// The `zeta'(2)` and `zeta'(-1)` forms of the constant term, and the
/// constant-term bookkeeping (modular curve identity, conjectural values).
pub fn constant_term_ledger_reports() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for big_d in D_GRID {
        for v in V_GRID {
            let params = Params::new().with("D", big_d).with("v", v);
            let res = (|| {
                Ok(CheckReport::float(
                    "constant_term_zeta_chain",
                    params.clone(),
                    eisenstein::coeff_deriv_half(0, v, big_d)?.deriv_half,
                    eisenstein::constant_deriv_zeta2_form(v, big_d)?,
                    1e-11,
                ))
            })();
            out.push(guard("constant_term_zeta_chain", params, res));
        }
    }
    for big_d in [1u64, 6, 10, 15, 21] {
        for v in V_GRID {
            out.push(guard(
                "constant_term_ledger",
                Params::new().with("D", big_d).with("v", v),
                geometry::constant_term_report(v, big_d),
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Functional equations.

pub fn functional_suite(_opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7] {
        for k in 0..=6u32 {
            for chi in -1..=1 {
                for on_d in [false, true] {
                    let params = Params::new()
                        .with("p", p)
                        .with("k", k)
                        .with("chi", chi)
                        .with("on_D", on_d);
                    let res = (|| {
                        let bp = localpoly::b_poly(p, k, chi, on_d)?;
                        let mut worst = Rational::zero();
                        for x in [rat(1, 2), rat(2, 3), rat(-3, 7), rat(13, 4)] {
                            let r = bp.functional_equation_residual(&x);
                            if r != Rational::zero() {
                                worst = r;
                            }
                        }
                        Ok(CheckReport::exact("b_p_functional_equation", params.clone(), &worst, &Rational::zero()))
                    })();
                    out.push(guard("b_p_functional_equation", params, res));
                }
            }
        }
    }
    // Lambda(w) = Lambda(1 - w) on 30 points
    let lambda_cases: [(i64, u64); 10] = [
        (1, 6),
        (3, 6),
        (5, 10),
        (-3, 6),
        (-7, 10),
        (12, 15),
        (-2, 21),
        (27, 22),
        (-5, 35),
        (8, 14),
    ];
    for (m, big_d) in lambda_cases {
        for w in [0.15, 0.3, 0.45] {
            let params = Params::new().with("m", m).with("D", big_d).with("w", w);
            let res = (|| {
                Ok(CheckReport::float(
                    "lambda_functional_equation",
                    params.clone(),
                    eisenstein::lambda_completed(m, big_d, w)?,
                    eisenstein::lambda_completed(m, big_d, 1.0 - w)?,
                    1e-9,
                ))
            })();
            out.push(guard("lambda_functional_equation", params, res));
        }
    }
    for big_d in [6u64, 10] {
        for m in [-3i64, 0, 1, 2, 5] {
            for s in [0.1, 0.25, 0.4] {
                for v in V_GRID {
                    let params = Params::new().with("m", m).with("v", v).with("s", s).with("D", big_d);
                    let res = (|| {
                        let a = eisenstein::coeff_general(m, v, s, big_d)?.value;
                        let b = eisenstein::coeff_general(m, v, -s, big_d)?.value;
                        Ok(CheckReport::float("coefficient_symmetry", params.clone(), a, b, 1e-8))
                    })();
                    out.push(guard("coefficient_symmetry", params, res));
                }
            }
        }
    }
    for (a, b) in [(2.0, 1.5), (1.25, 0.5), (1.7, 0.4), (2.5, 2.0)] {
        for z in [0.5, 2.0, 9.0] {
            let params = Params::new().with("a", a).with("b", b).with("z", z);
            let res = (|| {
                let lhs = special::psi(a, b, z)?;
                let rhs = z.powf(1.0 - b) * special::psi(1.0 + a - b, 2.0 - b, z)?;
                Ok(CheckReport::float("psi_kummer", params.clone(), lhs, rhs, 1e-9))
            })();
            out.push(guard("psi_kummer", params, res));
        }
    }
    for s in [-0.4, -0.15, 0.1, 0.25, 0.4] {
        for z in [0.3, 1.0, 4.0, 12.0] {
            for n in [-1.5, 1.5] {
                let params = Params::new().with("n", n).with("s", s).with("z", z);
                let res = (|| {
                    let lhs = special::psi_n(n, s, z)?;
                    let rhs = z.powf(-s) * special::psi_n(n, -s, z)?;
                    Ok(CheckReport::float("psi_n_symmetry", params.clone(), lhs, rhs, 1e-9))
                })();
                out.push(guard("psi_n_symmetry", params, res));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Main identity and the tree.

/// `(m, v, D)` triples of the main identity grid; `m != 0`.
pub fn main_identity_grid(quick: bool) -> Vec<(i64, f64, u64)> {
    let (m_max, ds): (i64, &[u64]) = if quick { (10, &[6, 10, 15]) } else { (120, &D_GRID) };
    let mut out = Vec::new();
    for &big_d in ds {
        for v in V_GRID {
            for m in (-m_max..=m_max).filter(|&m| m != 0) {
                out.push((m, v, big_d));
            }
        }
    }
    out
}

pub fn main_identity_reports(grid: &[(i64, f64, u64)]) -> Vec<CheckReport> {
    grid.par_iter()
        .map(|&(m, v, big_d)| {
            let params = Params::new().with("m", m).with("v", v).with("D", big_d);
            guard("main_identity", params, geometry::main_identity_report(m, v, big_d))
        })
        .collect()
}

/// Tree enumeration against the closed forms, and the split-case pattern
/// `(p - 1) * sum = 2 (p^k - 1)`.
pub fn tree_reports() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let pr = rat(p as i64, 1);
        let one = Rational::one();
        for k in 1..=6u32 {
            let kr = rat(k as i64, 1);
            let pk = Rational::from_integer(num_bigint::BigInt::from(p).pow(k));
            let closed = [
                (
                    TreeCase::InertVertex,
                    "tree_inert",
                    -rat(2, 1) * &kr + (&pr + &one) * (&pk - &one) / (&pr - &one),
                ),
                (
                    TreeCase::RamifiedEdgePair,
                    "tree_ramified",
                    -rat(2, 1) * &kr - rat(2, 1) + rat(2, 1) * (&pk * &pr - &one) / (&pr - &one),
                ),
                (TreeCase::SplitApartment, "tree_split", rat(2, 1) * (&pk - &one)),
            ];
            for (case, name, value) in closed {
                let params = Params::new().with("p", p).with("k", k);
                let res = (|| {
                    let t = geometry::tree_mult_sum(p, k, case)?;
                    Ok(CheckReport::exact(name, params.clone(), &(t * (&pr - &one)), &value))
                })();
                out.push(guard(name, params, res));
            }
        }
    }
    out
}

pub fn main_identity_suite(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = main_identity_reports(&main_identity_grid(opts.quick));
    out.extend(tree_reports());
    out
}

pub fn constants_suite() -> Vec<CheckReport> {
    match eisenstein::constants_check() {
        Ok(v) => v,
        Err(e) => vec![guard("constants", Params::new(), Err(e))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::batch_status;
    use crate::CheckStatus;

    fn all_pass(reps: &[CheckReport]) {
        for r in reps {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn p2_subcases_cover_all_three() {
        let mut seen = [false; 3];
        for m in (-20i64..=20).filter(|&m| m != 0) {
            let (case, _) = p2_subcase_density(m, 1).unwrap();
            seen[case as usize - 1] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn quick_suites_pass() {
        let opts = CheckOptions { quick: true, prime: None };
        for suite in [Suite::ClassNumbers, Suite::Special, Suite::Functional, Suite::Constants] {
            let reps = run_suite(suite, &opts);
            assert!(!reps.is_empty());
            all_pass(&reps);
        }
        assert_eq!(constants_suite().len(), 8);
    }

    #[test]
    fn quick_local_density_p2() {
        let opts = CheckOptions { quick: true, prime: Some(2) };
        let reps = local_density_suite(&opts);
        assert!(reps.iter().any(|r| r.name == "p2_subcase"));
        assert_eq!(batch_status(&reps), CheckStatus::Pass);
    }

    #[test]
    fn quick_main_identity() {
        let opts = CheckOptions { quick: true, prime: None };
        let reps = main_identity_suite(&opts);
        assert!(reps.iter().filter(|r| r.name.starts_with("main_identity")).count() >= 100);
        all_pass(&reps);
    }
}
