//! Closed-form Gauss sums for `GL_r(Z_n)` and `SL_r(Z_n)`, their magnitudes,
//! and the number `N_beta` of invertible matrices with a given trace.
//!
//! Every scalar factor is assembled in exact rationals. The product
//! `prod_{i=1}^r (1 - p^-i) / (1 - p^-1)` in the uniform GL formula is read
//! factor by factor, i.e. divided by `(1 - p^-1)^r`; this is the reading that
//! makes it agree with the `Z_{n/d}` route.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{
    certify_integer, divisors, euler_phi, factorize, gcd, is_prime, rational_pow,
    unit_fraction_product,
};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::expsums::{gauss_sum_direct, kloosterman_direct, ramanujan_divisor, GaussSumParams};
use crate::residue_chars::{AddChar, MultChar};

/// Assembled factors of the uniform GL Gauss sum formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GLSumBreakdown {
    pub n: u64,
    pub r: u32,
    /// `gcd(a, n)`; the additive character has order `n / d`.
    pub d: u64,
    /// Conductor of `chi`.
    pub f: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub scalar_prefactor: BigRational,
    /// `G(Z_n, chi, lambda)`.
    pub base_sum: Cyclotomic,
    pub value: Cyclotomic,
}

fn serialize_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn check_moduli(chi: &MultChar, lambda: &AddChar) -> Result<()> {
    if chi.modulus() != lambda.modulus() {
        return Err(Error::InvalidInput(format!(
            "chi is mod {} but lambda is mod {}",
            chi.modulus(),
            lambda.modulus()
        )));
    }
    Ok(())
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    Ok(())
}

/// Primes dividing `n` but not `n / d`.
fn dropped_primes(n: u64, d: u64) -> Result<Vec<u64>> {
    let m = n / d;
    Ok(factorize(n)?
        .primes()
        .filter(|p| !m.is_multiple_of(*p))
        .collect())
}

fn int_pow(base: u64, exp: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(exp))
}

fn tri(r: u32) -> u32 {
    r * (r - 1) / 2
}

/// `prod_{p | n, p not | n/d} prod_{i=1}^r (1 - p^-i) / (1 - p^-1)`.
fn borel_ratio(n: u64, d: u64, r: u32) -> Result<BigRational> {
    Ok(dropped_primes(n, d)?
        .into_iter()
        .map(|p| {
            let one_minus = BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p));
            unit_fraction_product(p, 1, r) / one_minus.pow(r as i32)
        })
        .product())
}

/// `prod_{p | n, p not | n/d} prod_{i=from}^r (1 - p^-i)`.
fn kernel_fraction(n: u64, d: u64, from: u32, r: u32) -> Result<BigRational> {
    Ok(dropped_primes(n, d)?
        .into_iter()
        .map(|p| unit_fraction_product(p, from, r))
        .product())
}

/// `G(GL_r(Z_n), chi, lambda) = n^{r(r-1)/2} d^{r(r-1)/2} * ratio * G(Z_n, chi, lambda)^r`.
pub fn gl_gauss_closed(r: u32, chi: &MultChar, lambda: &AddChar) -> Result<GLSumBreakdown> {
    check_r(r)?;
    check_moduli(chi, lambda)?;
    let n = lambda.modulus();
    let d = lambda.gcd_with_modulus();
    let f = chi.conductor();
    let scalar_prefactor = int_pow(n, tri(r)) * int_pow(d, tri(r)) * borel_ratio(n, d, r)?;
    let base_sum = gauss_sum_direct(&GaussSumParams::new(chi.clone(), *lambda)?)?;
    let value = base_sum.pow(r).scale(&scalar_prefactor);
    Ok(GLSumBreakdown {
        n,
        r,
        d,
        f,
        scalar_prefactor,
        base_sum,
        value,
    })
}

/// The same sum through `Z_{n/d}`: zero when `f` does not divide `n/d`,
/// otherwise `n^{r(r-1)/2} d^{r(r+1)/2} * kernel * G(Z_{n/d}, chi', lambda)^r`.
pub fn gl_gauss_via_thm2(r: u32, chi: &MultChar, lambda: &AddChar) -> Result<Cyclotomic> {
    check_r(r)?;
    check_moduli(chi, lambda)?;
    let n = lambda.modulus();
    let d = lambda.gcd_with_modulus();
    let m = n / d;
    if !m.is_multiple_of(chi.conductor()) {
        return Ok(Cyclotomic::zero());
    }
    let induced = chi.induce(m)?;
    let lambda_m = AddChar::new(m, lambda.multiplier() / d)?;
    let base = gauss_sum_direct(&GaussSumParams::new(induced, lambda_m)?)?;
    let prefactor = int_pow(n, tri(r)) * int_pow(d, r * (r + 1) / 2) * kernel_fraction(n, d, 1, r)?;
    Ok(base.pow(r).scale(&prefactor))
}

/// `|G(GL_r(Z_n), chi, lambda)|^2` as an exact rational.
///
/// Nonzero exactly when `f | n/d`, `n/(d f)` is squarefree and coprime to `f`.
pub fn gl_gauss_magnitude(r: u32, chi: &MultChar, lambda: &AddChar) -> Result<BigRational> {
    check_r(r)?;
    check_moduli(chi, lambda)?;
    let n = lambda.modulus();
    let d = lambda.gcd_with_modulus();
    let f = chi.conductor();
    let m = n / d;
    if !m.is_multiple_of(f) {
        return Ok(BigRational::zero());
    }
    let c = m / f;
    if !factorize(c)?.is_squarefree() || gcd(c, f) != 1 {
        return Ok(BigRational::zero());
    }
    let kernel = kernel_fraction(n, d, 1, r)?;
    Ok(int_pow(n, r * (r - 1)) * int_pow(d, r * (r + 1)) * int_pow(f, r) * &kernel * &kernel)
}

/// `G(SL_r(Z_n), lambda) = n^{r(r-1)/2} d^{r(r+1)/2 - 1} * kernel * K_r(Z_{n/d}, lambda)`.
pub fn sl_gauss_closed(r: u32, lambda: &AddChar, budget: u64) -> Result<Cyclotomic> {
    check_r(r)?;
    let n = lambda.modulus();
    let d = lambda.gcd_with_modulus();
    let m = n / d;
    let kloosterman = kloosterman_direct(r, &AddChar::new(m, lambda.multiplier() / d)?, budget)?;
    let prefactor =
        int_pow(n, tri(r)) * int_pow(d, r * (r + 1) / 2 - 1) * kernel_fraction(n, d, 2, r)?;
    Ok(kloosterman.scale(&prefactor))
}

/// `N_beta` by Ramanujan-sum orthogonality over the divisors of `n`.
pub fn trace_count_thm6(r: u32, n: u64, beta: u64) -> Result<BigInt> {
    check_r(r)?;
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let l = gcd(beta % n, n);
    let outer = n / l;
    let mut sum = BigRational::zero();
    for d in divisors(n) {
        let c_outer = ramanujan_divisor(outer, d as i64);
        let c_n = ramanujan_divisor(n, d as i64);
        if c_outer == 0 || c_n == 0 {
            continue;
        }
        let term = BigRational::from_integer(
            BigInt::from(c_outer) * BigInt::from(c_n).pow(r) * BigInt::from(euler_phi(n / d)),
        ) * int_pow(d, tri(r))
            * borel_ratio(n, d, r)?;
        sum += term;
    }
    let total = sum * rational_pow(n, i64::from(tri(r)) - 1)
        / BigRational::from_integer(BigInt::from(euler_phi(outer)));
    certify_integer(total, "N_beta (divisor sum)")
}

/// The two local factors of the trace count at `p`:
/// `prod (1 - p^-i) - (-1)^r p^{-r(r+1)/2}` for `p` not dividing `beta`,
/// `prod (1 - p^-i) + (-1)^r p^{-r(r+1)/2} (p - 1)` otherwise.
fn local_trace_factor(r: u32, p: u64, divides_beta: bool) -> BigRational {
    let units = unit_fraction_product(p, 1, r);
    let sign = if r.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let tail = sign * rational_pow(p, -i64::from(r * (r + 1) / 2));
    if divides_beta {
        units + tail * BigRational::from_integer(BigInt::from(p - 1))
    } else {
        units - tail
    }
}

/// `N_beta` over `Z_{p^m}`: depends only on whether `p` divides `beta`.
pub fn trace_count_prime_power(r: u32, p: u64, m: u32, beta: u64) -> Result<BigInt> {
    check_r(r)?;
    if !is_prime(p) {
        return Err(Error::NotPrime { p });
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let divides = beta.is_multiple_of(p);
    let total = int_pow(p, m * (r * r - 1)) * local_trace_factor(r, p, divides);
    certify_integer(total, "N_beta (prime power)")
}

/// `N_beta` as a product of local factors over the primes of `n`.
///
/// The factor at `p` is chosen by whether `p` divides `l = gcd(beta, n)`, so
/// the result is the CRT product of the prime-power counts. For `r = 2`,
/// `n = 6`, `beta = 3` this gives `N_1(Z_2) * N_0(Z_3) = 2 * 18 = 36`, which
/// is also the enumerated count over `GL_2(Z_6)`.
pub fn trace_count_product(r: u32, n: u64, beta: u64) -> Result<BigInt> {
    check_r(r)?;
    let f = factorize(n)?;
    let l = gcd(beta % n, n);
    let total = f.primes().fold(int_pow(n, r * r - 1), |acc, p| {
        acc * local_trace_factor(r, p, l.is_multiple_of(p))
    });
    certify_integer(total, "N_beta (product)")
}

/// One row of the trace-count table: all `beta` with `gcd(beta, n) = l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceClass {
    /// `gcd(beta, n)`; `l = n` is the class of `beta = 0`.
    pub l: u64,
    /// Number of residues in the class, `phi(n / l)`.
    pub members: u64,
    #[serde(serialize_with = "serialize_bigint")]
    pub count: BigInt,
}

fn serialize_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    use std::str::FromStr;
    serde_json::Number::from_str(&x.to_string())
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

/// `N_l` for every divisor class `l | n`, ascending in `l`.
pub fn trace_count_classes(r: u32, n: u64) -> Result<Vec<TraceClass>> {
    divisors(n)
        .into_iter()
        .map(|l| {
            Ok(TraceClass {
                l,
                members: euler_phi(n / l),
                count: trace_count_thm6(r, n, l % n)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;
    use crate::matrix_groups::{gl_order, sl_order};
    use crate::residue_chars::enumerate_mult_chars;

    fn chi(n: u64, idx: u64) -> MultChar {
        MultChar::from_index(n, idx).unwrap()
    }

    fn lam(n: u64, a: u64) -> AddChar {
        AddChar::new(n, a).unwrap()
    }

    fn int(x: i64) -> Cyclotomic {
        Cyclotomic::from_integer(x)
    }

    #[test]
    fn gl_closed_examples() {
        let b = gl_gauss_closed(2, &chi(3, 1), &lam(3, 1)).unwrap();
        assert_eq!(b.value, int(-9));
        assert_eq!((b.d, b.f), (1, 3));
        let b = gl_gauss_closed(2, &chi(4, 0), &lam(4, 2)).unwrap();
        assert_eq!(b.value, int(32));
        assert_eq!(b.scalar_prefactor, BigRational::from_integer(8.into()));
        let b = gl_gauss_closed(2, &chi(4, 0), &lam(4, 0)).unwrap();
        assert_eq!(b.value, int(96));
        assert_eq!(b.value.as_integer().unwrap(), gl_order(2, 4).unwrap());
        for r in 1..=3 {
            assert_eq!(
                gl_gauss_closed(r, &chi(1, 0), &lam(1, 0)).unwrap().value,
                int(1)
            );
        }
    }

    #[test]
    fn reduced_modulus_examples() {
        assert!(gl_gauss_via_thm2(2, &chi(4, 1), &lam(4, 2))
            .unwrap()
            .is_zero());
        assert_eq!(
            gl_gauss_via_thm2(2, &chi(4, 0), &lam(4, 2)).unwrap(),
            int(32)
        );
        assert_eq!(
            gl_gauss_via_thm2(1, &chi(6, 0), &lam(6, 1)).unwrap(),
            int(1)
        );
    }

    #[test]
    fn magnitude_examples() {
        let q = |x: i64| BigRational::from_integer(x.into());
        assert_eq!(
            gl_gauss_magnitude(2, &chi(3, 1), &lam(3, 1)).unwrap(),
            q(81)
        );
        assert_eq!(gl_gauss_magnitude(1, &chi(4, 1), &lam(4, 1)).unwrap(), q(4));
        let conductor8 = enumerate_mult_chars(8)
            .unwrap()
            .into_iter()
            .find(|c| c.conductor() == 8)
            .unwrap();
        assert_eq!(
            gl_gauss_magnitude(1, &conductor8, &lam(8, 2)).unwrap(),
            q(0)
        );
    }

    #[test]
    fn sl_closed_examples() {
        let budget = crate::expsums::DEFAULT_BUDGET;
        assert_eq!(sl_gauss_closed(2, &lam(3, 1), budget).unwrap(), int(-3));
        assert_eq!(sl_gauss_closed(2, &lam(2, 1), budget).unwrap(), int(2));
        assert_eq!(sl_gauss_closed(2, &lam(4, 0), budget).unwrap(), int(48));
        for n in 1..=12 {
            for r in 1..=3 {
                let trivial = sl_gauss_closed(r, &lam(n, 0), budget).unwrap();
                assert_eq!(trivial.as_integer().unwrap(), sl_order(r, n).unwrap());
            }
        }
    }

    #[test]
    fn routes_agree_on_formula_grid() {
        for n in 1..=16 {
            for c in enumerate_mult_chars(n).unwrap() {
                for a in 0..n {
                    let l = lam(n, a);
                    for r in 1..=3 {
                        let closed = gl_gauss_closed(r, &c, &l).unwrap().value;
                        assert_eq!(closed, gl_gauss_via_thm2(r, &c, &l).unwrap());
                        let mag = gl_gauss_magnitude(r, &c, &l).unwrap();
                        assert_eq!(closed.norm_sq(), Cyclotomic::from_rational(mag));
                    }
                }
            }
        }
    }

    #[test]
    fn gl_rank_one_matches_enumeration() {
        let budget = crate::expsums::DEFAULT_BUDGET;
        for n in 1..=24 {
            for c in enumerate_mult_chars(n).unwrap() {
                for a in 0..n {
                    let l = lam(n, a);
                    assert_eq!(
                        gl_gauss_closed(1, &c, &l).unwrap().value,
                        crate::matrix_groups::gl_gauss_bruteforce(1, &c, &l, budget).unwrap(),
                        "n={n} chi={} a={a}",
                        c.index()
                    );
                }
            }
        }
    }

    #[test]
    fn trace_count_examples() {
        let big = |x: i64| BigInt::from(x);
        assert_eq!(trace_count_thm6(2, 2, 0).unwrap(), big(4));
        assert_eq!(trace_count_thm6(2, 3, 1).unwrap(), big(15));
        let total: BigInt = (0..6).map(|b| trace_count_thm6(2, 6, b).unwrap()).sum();
        assert_eq!(total, big(288));
        assert_eq!(trace_count_prime_power(2, 2, 1, 0).unwrap(), big(4));
        assert_eq!(trace_count_prime_power(2, 2, 2, 0).unwrap(), big(32));
        assert_eq!(trace_count_prime_power(2, 3, 1, 1).unwrap(), big(15));
        assert_eq!(
            trace_count_prime_power(2, 4, 1, 1),
            Err(Error::NotPrime { p: 4 })
        );
        assert_eq!(trace_count_product(2, 6, 0).unwrap(), big(72));
        assert_eq!(trace_count_product(2, 6, 1).unwrap(), big(30));
        // beta = 3 is a unit mod 2 (2) and zero mod 3 (18)
        assert_eq!(trace_count_product(2, 6, 3).unwrap(), big(36));
        assert_eq!(trace_count_thm6(2, 6, 3).unwrap(), big(36));
        for r in 1..=3 {
            assert_eq!(trace_count_thm6(r, 1, 0).unwrap(), big(1));
            assert_eq!(trace_count_product(r, 1, 0).unwrap(), big(1));
        }
    }

    #[test]
    fn trace_routes_agree() {
        for n in 1..=60u64 {
            for r in 1..=4 {
                let mut total = BigInt::zero();
                for beta in 0..n {
                    let divisor_sum = trace_count_thm6(r, n, beta).unwrap();
                    assert_eq!(
                        divisor_sum,
                        trace_count_product(r, n, beta).unwrap(),
                        "r={r} n={n} b={beta}"
                    );
                    assert_eq!(
                        divisor_sum,
                        trace_count_thm6(r, n, gcd(beta, n) % n).unwrap()
                    );
                    total += divisor_sum;
                }
                assert_eq!(total, gl_order(r, n).unwrap());
            }
        }
    }

    /// Two-case count of trace-`beta` matrices in `GL_r(F_p)`, in integers.
    fn finite_field_count(r: u32, p: u64, beta_zero: bool) -> BigInt {
        let q = BigInt::from(p);
        let prod: BigInt = (1..=r).map(|i| q.pow(i) - 1).product();
        let sign = if r.is_multiple_of(2) {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let inner = if beta_zero {
            prod + sign * (&q - 1)
        } else {
            prod - sign
        };
        // q^{r(r-1)/2 - 1}; exponent is -1 only for r = 1 where inner is divisible by q
        let e = i64::from(r * (r - 1) / 2) - 1;
        if e >= 0 {
            q.pow(e as u32) * inner
        } else {
            inner / q
        }
    }

    #[test]
    fn prime_field_specialization() {
        for p in (2..=7).filter(|&p| is_prime(p)) {
            for r in 1..=3 {
                for beta in 0..p {
                    assert_eq!(
                        trace_count_prime_power(r, p, 1, beta).unwrap(),
                        finite_field_count(r, p, beta == 0),
                        "r={r} p={p} beta={beta}"
                    );
                }
            }
        }
    }

    #[test]
    fn class_table_totals() {
        for n in 1..=30 {
            for r in 1..=3 {
                let rows = trace_count_classes(r, n).unwrap();
                let total: BigInt = rows
                    .iter()
                    .map(|c| BigInt::from(c.members) * &c.count)
                    .sum();
                assert_eq!(total, gl_order(r, n).unwrap());
            }
        }
    }
}
