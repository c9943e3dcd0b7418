//! Integer and multiplicative number-theoretic primitives.
//!
//! Everything here works on `u64` moduli. Products are taken in `u128` so
//! residues up to `2^64` never overflow; counting functions that grow quickly
//! return [`BigUint`].

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};

/// Prime factorization `n = p_1^m_1 ... p_s^m_s` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs in increasing prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The prime-power components `p^m`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, m)| p.pow(m))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, m)| m == 1)
    }
}

/// Trial division up to `sqrt(n)`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut m = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            m += 1;
        }
        if m > 0 {
            factors.push((p, m));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    // 6k +- 1 wheel
    let mut p = 5u64;
    while p.saturating_mul(p) <= rest {
        push(p, &mut rest);
        push(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

fn factors_of(n: u64) -> Factorization {
    assert!(n >= 1, "argument must be a positive integer");
    factorize(n).expect("n >= 1")
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let f = factors_of(p);
    f.factors == [(p, 1)]
}

/// `|Z_n^*|`.
pub fn euler_phi(n: u64) -> u64 {
    factors_of(n)
        .factors
        .iter()
        .map(|&(p, m)| (p - 1) * p.pow(m - 1))
        .product()
}

pub fn moebius(n: u64) -> i64 {
    let f = factors_of(n);
    if !f.is_squarefree() {
        0
    } else if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Divisors of `n` in ascending order, generated from the factorization.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = factors_of(n);
    let mut divs = vec![1u64];
    for &(p, m) in &f.factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..m {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of ordered factorizations of `n` into `r` positive factors.
pub fn divisor_count_r(n: u64, r: u32) -> BigUint {
    assert!(r >= 1, "r must be positive");
    factors_of(n)
        .factors
        .iter()
        .map(|&(_, m)| binomial(u64::from(m) + u64::from(r) - 1, u64::from(m)))
        .product()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `a * b mod n` without overflow.
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` modulo `n`; fails when `gcd(x, n) != 1`.
pub fn mod_inverse(x: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let e = (x as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return Err(Error::NonUnit { x, n });
    }
    Ok(e.x.rem_euclid(n as i128) as u64)
}

/// CRT idempotents `e_i = w_i * n / q_i` for the prime-power components `q_i`
/// of `n`: `e_i = 1 mod q_i`, `e_i = 0 mod q_j` for `j != i`, reduced mod `n`.
pub fn crt_multipliers(f: &Factorization) -> Vec<u64> {
    let n = f.n;
    f.prime_powers()
        .map(|q| {
            let cofactor = n / q;
            let w = mod_inverse(cofactor % q, q).expect("prime-power components are coprime");
            mul_mod(cofactor, w, n)
        })
        .collect()
}

/// Exponent of the largest power of `p` dividing `x`; `x` must be nonzero.
pub fn valuation(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0 && p >= 2);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Multiplicative order of unit `x` modulo `n`, given `phi = euler_phi(n)`.
pub(crate) fn multiplicative_order(x: u64, n: u64, phi: u64) -> u64 {
    let mut order = phi;
    for (p, _) in factors_of(phi).factors {
        while order.is_multiple_of(p) && pow_mod(x, order / p, n) == 1 % n {
            order /= p;
        }
    }
    order
}

/// Smallest primitive root modulo an odd prime power `p^m`.
pub(crate) fn smallest_primitive_root(q: u64) -> u64 {
    let phi = euler_phi(q);
    (2..q)
        .find(|&g| gcd(g, q) == 1 && multiplicative_order(g, q, phi) == phi)
        .expect("odd prime powers have primitive roots")
}

/// `prod_{i=from}^{r} (1 - p^{-i})`.
pub(crate) fn unit_fraction_product(p: u64, from: u32, r: u32) -> BigRational {
    (from..=r)
        .map(|i| BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p).pow(i)))
        .product()
}

/// `base^exp` for any integer exponent.
pub(crate) fn rational_pow(base: u64, exp: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if exp >= 0 {
        b.pow(exp as i32)
    } else {
        b.recip().pow((-exp) as i32)
    }
}

/// Asserts that an assembled count is integral.
pub(crate) fn certify_integer(q: BigRational, what: &str) -> Result<BigInt> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::FormulaGuard(format!(
            "{what} evaluated to non-integer {q}"
        )))
    }
}
