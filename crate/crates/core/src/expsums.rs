//! Scalar exponential sums over `Z_n`: Gauss sums, Ramanujan sums and
//! hyper-Kloosterman sums, each with a direct summation and an independent
//! second route, plus the published magnitude bounds for Kloosterman sums.

use rayon::prelude::*;

use crate::arith::{
    crt_multipliers, divisor_count_r, divisors, euler_phi, factorize, gcd, is_prime, lcm,
    mod_inverse, moebius, mul_mod, valuation,
};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::residue_chars::{unit_group_structure, AddChar, MultChar};

/// Default cap on the number of enumerated terms or candidate matrices.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Fails with [`Error::BudgetExceeded`] when `needed > budget`.
pub fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > u128::from(budget) {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: u64, exp: u32) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(u128::from(base)))
}

/// Parameters of `G(Z_n, chi, lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussSumParams {
    chi: MultChar,
    lambda: AddChar,
}

impl GaussSumParams {
    pub fn new(chi: MultChar, lambda: AddChar) -> Result<Self> {
        if chi.modulus() != lambda.modulus() {
            return Err(Error::InvalidInput(format!(
                "character moduli differ: chi mod {}, lambda mod {}",
                chi.modulus(),
                lambda.modulus()
            )));
        }
        Ok(GaussSumParams { chi, lambda })
    }

    pub fn modulus(&self) -> u64 {
        self.lambda.modulus()
    }

    pub fn chi(&self) -> &MultChar {
        &self.chi
    }

    pub fn lambda(&self) -> &AddChar {
        &self.lambda
    }
}

/// `sum_{x in Z_n^*} chi(x) lambda(x)`.
pub fn gauss_sum_direct(p: &GaussSumParams) -> Result<Cyclotomic> {
    let n = p.modulus();
    let big_e = p.chi.value_level();
    let level = lcm(n, big_e);
    let (chi_step, lambda_step) = (level / big_e, level / n);
    let mut counts = vec![0i128; level as usize];
    for &x in p.chi.structure().units() {
        let e = p.chi.value_exponent(x)? * chi_step + p.lambda.exponent(x) * lambda_step;
        counts[(e % level) as usize] += 1;
    }
    Cyclotomic::from_power_counts(level, &counts)
}

/// Gauss sum by conductor reduction: vanishing test, descent to `Z_{n/d}`,
/// extraction of the multiplier, then the primitive sum at conductor level.
pub fn gauss_sum_reduced(p: &GaussSumParams) -> Result<Cyclotomic> {
    let n = p.modulus();
    let d = p.lambda.gcd_with_modulus();
    let m = n / d;
    let f = p.chi.conductor();
    if !m.is_multiple_of(f) {
        return Ok(Cyclotomic::zero());
    }
    // descent: phi(n)/phi(m) units of Z_n above each unit of Z_m
    let chi_m = p.chi.induce(m)?;
    let descent = Cyclotomic::from_integer(euler_phi(n) / euler_phi(m));
    // lambda_{a'} with a' = a/d a unit mod m: G = conj(chi(a')) G(lambda_1)
    let a_reduced = (p.lambda.multiplier() / d) % m;
    let twist = chi_m.eval(a_reduced)?.conj();
    // G(Z_m, chi, lambda_1) = mu(m/f) chi_f(m/f) G(Z_f, chi_f, lambda_1)
    let cofactor = m / f;
    let mu = moebius(cofactor);
    if mu == 0 || gcd(cofactor, f) != 1 {
        return Ok(Cyclotomic::zero());
    }
    let chi_f = chi_m.induce(f)?;
    let primitive = gauss_sum_direct(&GaussSumParams::new(chi_f.clone(), AddChar::new(f, 1)?)?)?;
    let chi_cofactor = chi_f.eval(cofactor % f)?;
    Ok(descent * twist * Cyclotomic::from_integer(mu) * chi_cofactor * primitive)
}

/// `C_n(k) = sum_{j in Z_n^*} zeta_n^{jk}`.
pub fn ramanujan_direct(n: u64, k: i64) -> Result<Cyclotomic> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let k = k.rem_euclid(n as i64) as u64;
    let mut counts = vec![0i128; n as usize];
    for &j in unit_group_structure(n)?.units() {
        counts[mul_mod(j, k, n) as usize] += 1;
    }
    Cyclotomic::from_power_counts(n, &counts)
}

/// `C_n(k) = sum_{d | gcd(k, n)} d mu(n/d)`, with `gcd(0, n) = n`.
pub fn ramanujan_divisor(n: u64, k: i64) -> i64 {
    let g = gcd(k.unsigned_abs(), n);
    divisors(g)
        .into_iter()
        .map(|d| d as i64 * moebius(n / d))
        .sum()
}

/// Enumerates `(x_1, ..., x_{r-1})` over unit tuples and tallies the exponent
/// of `lambda(x_1 + ... + x_r)` with `x_r = (x_1 ... x_{r-1})^{-1}`.
fn kloosterman_counts(r: u32, lambda: &AddChar) -> Result<Vec<i128>> {
    let n = lambda.modulus();
    let structure = unit_group_structure(n)?;
    let units = structure.units();
    let inverse: Vec<u64> = {
        let mut inv = vec![0u64; n as usize];
        for &u in units {
            inv[u as usize] = mod_inverse(u, n)?;
        }
        inv
    };

    fn walk(
        depth: u32,
        sum: u64,
        prod: u64,
        units: &[u64],
        inverse: &[u64],
        lambda: &AddChar,
        counts: &mut [i128],
    ) {
        let n = lambda.modulus();
        if depth == 0 {
            let total = (sum + inverse[prod as usize]) % n;
            counts[lambda.exponent(total) as usize] += 1;
            return;
        }
        for &x in units {
            walk(
                depth - 1,
                (sum + x) % n,
                mul_mod(prod, x, n),
                units,
                inverse,
                lambda,
                counts,
            );
        }
    }

    let one = 1 % n;
    if r == 1 {
        let mut counts = vec![0i128; n as usize];
        walk(0, 0, one, units, &inverse, lambda, &mut counts);
        return Ok(counts);
    }
    // split on the first coordinate; partial tallies add exactly
    let counts = units
        .par_iter()
        .map(|&x| {
            let mut counts = vec![0i128; n as usize];
            walk(r - 2, x % n, x % n, units, &inverse, lambda, &mut counts);
            counts
        })
        .reduce(
            || vec![0i128; n as usize],
            |mut acc, part| {
                acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(counts)
}

/// `K_r(Z_n, lambda) = sum_{x_1 ... x_r = 1} lambda(x_1 + ... + x_r)` by enumeration.
pub fn kloosterman_direct(r: u32, lambda: &AddChar, budget: u64) -> Result<Cyclotomic> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let n = lambda.modulus();
    check_budget(saturating_pow(euler_phi(n), r - 1), budget)?;
    let counts = kloosterman_counts(r, lambda)?;
    Cyclotomic::from_power_counts(n, &counts)
}

/// Local characters `lambda_{e_i}` on `Z_{q_i}` for the prime-power
/// components `q_i` of `n`: `lambda_{e_i}(x) = lambda(e_i x)`.
pub fn crt_local_characters(lambda: &AddChar) -> Result<Vec<AddChar>> {
    let n = lambda.modulus();
    let f = factorize(n)?;
    let es = crt_multipliers(&f);
    f.prime_powers()
        .zip(es)
        .map(|(q, e)| {
            let cofactor = n / q;
            let scaled = mul_mod(lambda.multiplier(), e, n);
            if !scaled.is_multiple_of(cofactor) {
                return Err(Error::FormulaGuard(format!(
                    "{cofactor} does not divide a*e = {scaled} mod {n}"
                )));
            }
            AddChar::new(q, scaled / cofactor)
        })
        .collect()
}

/// `K_r(Z_n, lambda)` as the product of local sums over the prime-power components.
pub fn kloosterman_crt(r: u32, lambda: &AddChar, budget: u64) -> Result<Cyclotomic> {
    crt_local_characters(lambda)?
        .iter()
        .map(|local| kloosterman_direct(r, local, budget))
        .product()
}

/// `n^{(r-1)/2} d_r(n)`.
pub fn kloosterman_bound_smith(r: u32, n: u64) -> f64 {
    use num_traits::ToPrimitive;
    let d_r = divisor_count_r(n, r).to_f64().unwrap_or(f64::INFINITY);
    (n as f64).powf((f64::from(r) - 1.0) / 2.0) * d_r
}

/// Four-case bound for `|K_r(Z_{p^m}, lambda)|` with `lambda` of order `p^m`,
/// `h = v_p(r)`. Evaluated literally as a real number.
pub fn kloosterman_bound_fisher(r: u32, p: u64, m: u32) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::NotPrime { p });
    }
    if r == 0 || m == 0 {
        return Err(Error::InvalidInput("r and m must be positive".into()));
    }
    let pf = p as f64;
    let rf = f64::from(r);
    let h = i64::from(valuation(u64::from(r), p));
    let v2 = i64::from(p == 2);
    let mf = i64::from(m);
    let main = pf.powf(mf as f64 * (rf - 1.0) / 2.0);
    let bound = if m == 1 {
        rf * pf.powf((rf - 1.0) / 2.0)
    } else if h == 0 {
        rf * main
    } else if mf >= 3 * h + 2 + 4 * v2 {
        pf.powf(v2 as f64 - h as f64 / 2.0) * rf * main
    } else {
        let e = v2 + h.min(mf / 2 - 1 - v2);
        pf.powi(e as i32) * gcd(u64::from(r), p - 1) as f64 * main
    };
    Ok(bound)
}
