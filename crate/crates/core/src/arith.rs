//! Exact integer number theory: factorization, Kronecker symbols, the
//! decomposition `4m = n^2 d`, divisors.

use crate::error::{invalid, Error, Result};

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Exponent of `p` in the value (0 if `p` does not divide it).
    pub fn ord(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Brent's variant of Pollard rho; n must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Factor `n` (`1 <= n <= 2^63 - 1`) by trial division with a Pollard rho
/// fallback for the cofactor.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut primes = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p <= 1000 && p * p <= rest {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factor_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Factorization { value: n, factors }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = factorize(n);
    let mut divs = vec![1u64];
    for &(p, e) in &f.factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// `ord_p(n)` for nonzero `n`.
pub fn ord_p(mut n: u64, p: u64) -> u32 {
    assert!(n != 0 && p >= 2);
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).is_squarefree()
}

/// Whether `delta` is the discriminant of a quadratic field.
pub fn is_fundamental(delta: i64) -> bool {
    if delta == 0 || delta == 1 {
        return false;
    }
    let r = delta.rem_euclid(4);
    if r == 1 {
        return is_squarefree(delta.unsigned_abs());
    }
    if r == 0 {
        let k = delta / 4;
        let kr = k.rem_euclid(4);
        return (kr == 2 || kr == 3) && is_squarefree(k.unsigned_abs());
    }
    false
}

fn jacobi_core(mut a: i128, mut n: i128) -> i32 {
    // n odd positive
    let mut t = 1;
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Kronecker symbol `(Delta / a)`.
///
/// `Delta` must be a discriminant (`0` or `1` mod 4); `Delta = 1` encodes the
/// split algebra `Q + Q` and gives the trivial character.
pub fn kronecker(delta: i64, a: i64) -> Result<i32> {
    let r = delta.rem_euclid(4);
    if r == 2 || r == 3 {
        return invalid(format!("{delta} is not a discriminant"));
    }
    if delta == 1 {
        return Ok(1);
    }
    let d = delta as i128;
    let mut b = a as i128;
    if b == 0 {
        return Ok(if d.abs() == 1 { 1 } else { 0 });
    }
    let mut k = 1;
    if b < 0 {
        b = -b;
        if d < 0 {
            k = -k;
        }
    }
    let v = b.trailing_zeros();
    if v > 0 {
        if d % 2 == 0 {
            return Ok(0);
        }
        if v % 2 == 1 {
            let m8 = d.rem_euclid(8);
            if m8 == 3 || m8 == 5 {
                k = -k;
            }
        }
        b >>= v;
    }
    Ok(k * jacobi_core(d, b))
}

/// The decomposition `4m = n^2 d` with `Delta = -d` a fundamental
/// discriminant, or `Delta = 1` when `4m = -n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Decomposition {
    pub m: i64,
    pub n: u64,
    /// `Delta = -d` in the paper's notation.
    pub delta: i64,
}

impl Decomposition {
    /// `d = -Delta`.
    pub fn d(&self) -> i64 {
        -self.delta
    }

    /// `chi_d(p)`, i.e. the Kronecker symbol `(Delta / p)`.
    pub fn chi(&self, p: u64) -> i32 {
        kronecker(self.delta, p as i64).expect("delta is a discriminant")
    }

    pub fn is_split_field(&self) -> bool {
        self.delta == 1
    }
}

/// Write `4m = n^2 (-Delta)` with `Delta` fundamental (or `1` in the
/// split case `4m = -n^2`). `d = -Delta`.
pub fn decompose(m: i64) -> Result<Decomposition> {
    if m == 0 {
        return invalid("decompose requires m != 0");
    }
    let big_n = m
        .unsigned_abs()
        .checked_mul(4)
        .filter(|&v| v <= i64::MAX as u64)
        .ok_or(Error::Overflow("4|m|"))?;
    if m < 0 && is_square(big_n) {
        return Ok(Decomposition {
            m,
            n: isqrt(big_n),
            delta: 1,
        });
    }
    let f = factorize(big_n);
    let mut core = 1u64;
    let mut s = 1u64;
    for &(p, e) in &f.factors {
        if e % 2 == 1 {
            core *= p;
        }
        s *= p.pow(e / 2);
    }
    let signed_core = if m > 0 { -(core as i64) } else { core as i64 };
    let (delta, n) = if signed_core.rem_euclid(4) == 1 {
        (signed_core, s)
    } else {
        // 4|m| = core * s^2 with core squarefree forces s even here.
        (4 * signed_core, s / 2)
    };
    debug_assert!(is_fundamental(delta));
    Ok(Decomposition { m, n, delta })
}

/// Distinct prime factors of a squarefree `D >= 1`, rejecting non-squarefree input.
pub fn squarefree_primes(big_d: u64) -> Result<Vec<u64>> {
    if big_d == 0 {
        return invalid("D must be positive");
    }
    let f = factorize(big_d);
    if !f.is_squarefree() {
        return invalid(format!("D = {big_d} is not squarefree"));
    }
    Ok(f.primes().collect())
}

/// Squarefree `D > 1` with an even number of prime factors, i.e. the
/// discriminant of an indefinite quaternion division algebra over Q.
pub fn quaternion_primes(big_d: u64) -> Result<Vec<u64>> {
    let ps = squarefree_primes(big_d)?;
    if ps.is_empty() || ps.len() % 2 == 1 {
        return invalid(format!(
            "D = {big_d} must have an even, positive number of prime factors"
        ));
    }
    Ok(ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    // Brute-force Kronecker: quadratic character via Euler's criterion on
    // odd primes and the mod 8 rule at 2, extended multiplicatively.
    fn kronecker_oracle(delta: i64, a: i64) -> i32 {
        if a == 0 {
            return i32::from(delta.abs() == 1);
        }
        let mut k = if a < 0 && delta < 0 { -1 } else { 1 };
        for (p, e) in factorize(a.unsigned_abs()).factors {
            let chi: i32 = if p == 2 {
                match delta.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                let r = delta.rem_euclid(p as i64) as u64;
                if r == 0 {
                    0
                } else if (1..p).any(|x| x * x % p == r) {
                    1
                } else {
                    -1
                }
            };
            k *= chi.pow(e);
        }
        k
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert!(factorize(1).factors.is_empty());
        assert_eq!(factorize(9973).factors, vec![(9973, 1)]);
        assert!(trial_is_prime(9973));
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(
            factorize(big).factors,
            vec![(998_244_353, 1), (1_000_000_007, 1)]
        );
        assert_eq!(factorize(i64::MAX as u64).value, i64::MAX as u64);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 3).unwrap(), -1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert_eq!(kronecker(-3, 2).unwrap(), -1);
        assert_eq!(kronecker(1, 7).unwrap(), 1);
        assert!(kronecker(-5, 3).is_err());
        assert!(kronecker(6, 3).is_err());
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(1).unwrap();
        assert_eq!((d.n, d.delta), (1, -4));
        let d = decompose(3).unwrap();
        assert_eq!((d.n, d.delta), (2, -3));
        let d = decompose(-1).unwrap();
        assert_eq!((d.n, d.delta), (2, 1));
        let d = decompose(-3).unwrap();
        assert_eq!((d.n, d.delta), (1, 12));
        assert!(decompose(0).is_err());
        assert!(decompose(i64::MAX).is_err());
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(13), vec![1, 13]);
    }

    // Independent fundamentality predicate: Delta is the discriminant of
    // Q(sqrt(Delta)) iff it equals disc of the squarefree kernel.
    fn fundamental_oracle(delta: i64) -> bool {
        if delta == 1 || delta == 0 {
            return false;
        }
        let mut f = delta.unsigned_abs();
        let mut kernel = 1u64;
        let mut p = 2;
        while p * p <= f {
            let mut e = 0;
            while f.is_multiple_of(p) {
                f /= p;
                e += 1;
            }
            if e % 2 == 1 {
                kernel *= p;
            }
            p += 1;
        }
        kernel *= f;
        let k = delta.signum() * kernel as i64;
        let disc = if k.rem_euclid(4) == 1 { k } else { 4 * k };
        disc == delta
    }

    #[test]
    fn decompose_range() {
        for m in -10_000i64..=10_000 {
            if m == 0 {
                continue;
            }
            let d = decompose(m).unwrap();
            assert_eq!(4 * m, (d.n * d.n) as i64 * d.d(), "m = {m}");
            assert!(d.delta == 1 || fundamental_oracle(d.delta), "m = {m}");
            assert_eq!(is_fundamental(d.delta), d.delta != 1);
        }
    }

    #[test]
    fn kronecker_matches_oracle() {
        for delta in -200i64..=200 {
            if delta.rem_euclid(4) > 1 || delta == 0 || delta == 1 {
                continue;
            }
            for a in -60..=60 {
                assert_eq!(
                    kronecker(delta, a).unwrap(),
                    kronecker_oracle(delta, a),
                    "({delta}/{a})"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative(idx in 0usize..200, a in -500i64..500, b in -500i64..500) {
            let discs: Vec<i64> = (-400i64..400).filter(|&d| is_fundamental(d)).collect();
            let delta = discs[idx % discs.len()];
            prop_assert_eq!(
                kronecker(delta, a * b).unwrap(),
                kronecker(delta, a).unwrap() * kronecker(delta, b).unwrap()
            );
            // period divides |Delta| for positive arguments
            if a > 0 {
                prop_assert_eq!(
                    kronecker(delta, a).unwrap(),
                    kronecker(delta, a + delta.abs()).unwrap()
                );
            }
        }

        #[test]
        fn kronecker_zero_iff_divides(idx in 0usize..200, pi in 0usize..50) {
            let discs: Vec<i64> = (-400i64..400).filter(|&d| is_fundamental(d)).collect();
            let delta = discs[idx % discs.len()];
            let primes: Vec<u64> = (2u64..250).filter(|&p| trial_is_prime(p)).collect();
            let p = primes[pi % primes.len()];
            prop_assert_eq!(kronecker(delta, p as i64).unwrap() == 0, delta % p as i64 == 0);
        }

        #[test]
        fn factorization_valid(n in 1u64..(1u64 << 62)) {
            let f = factorize(n);
            let prod: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors.iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
    }
}
