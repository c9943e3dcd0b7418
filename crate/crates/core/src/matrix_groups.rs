//! Matrices over `Z_n`, exhaustive enumeration of `GL_r(Z_n)` and `SL_r(Z_n)`,
//! and exact group orders.
//!
//! The enumeration oracles walk all `n^(r^2)` entry vectors and filter by
//! determinant. Sums weighted by `chi(det X) lambda(tr X)` only depend on the
//! pair `(det X, tr X)`, so one sweep builds a `(det, trace)` histogram that
//! every character cell then reuses.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    certify_integer, factorize, gcd, is_prime, lcm, mul_mod, unit_fraction_product,
};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::expsums::{check_budget, saturating_pow};
use crate::residue_chars::{AddChar, MultChar};

/// An `r x r` matrix over `Z_n`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixZn {
    r: usize,
    n: u64,
    entries: Vec<u64>,
}

impl MatrixZn {
    pub fn new(r: usize, n: u64, entries: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        if r == 0 || entries.len() != r * r {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {r}x{r} matrix, got {}",
                r * r,
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= n) {
            return Err(Error::InvalidInput(format!(
                "entry {bad} is not reduced mod {n}"
            )));
        }
        Ok(MatrixZn { r, n, entries })
    }

    pub fn identity(r: usize, n: u64) -> Self {
        let mut entries = vec![0; r * r];
        for i in 0..r {
            entries[i * r + i] = 1 % n;
        }
        MatrixZn { r, n, entries }
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.r + j]
    }

    pub fn det_mod(&self) -> u64 {
        det_entries(self.r, self.n, &self.entries)
    }

    pub fn trace_mod(&self) -> u64 {
        trace_entries(self.r, self.n, &self.entries)
    }
}

pub fn det_mod(x: &MatrixZn) -> u64 {
    x.det_mod()
}

pub fn trace_mod(x: &MatrixZn) -> u64 {
    x.trace_mod()
}

fn trace_entries(r: usize, n: u64, e: &[u64]) -> u64 {
    (0..r).fold(0, |acc, i| (acc + e[i * r + i]) % n)
}

fn det_entries(r: usize, n: u64, e: &[u64]) -> u64 {
    if r <= 4 {
        let cols: Vec<usize> = (0..r).collect();
        let d = cofactor(r, n as i128, e, 0, &cols);
        d.rem_euclid(n as i128) as u64
    } else {
        bareiss(r, e)
            .mod_floor(&BigInt::from(n))
            .to_u64()
            .expect("reduced mod n")
    }
}

trait ModFloor {
    fn mod_floor(&self, n: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor(&self, n: &BigInt) -> BigInt {
        let r = self % n;
        if r.is_negative() {
            r + n
        } else {
            r
        }
    }
}

/// Laplace expansion along `row` over the remaining `cols`, reduced mod `n`.
fn cofactor(r: usize, n: i128, e: &[u64], row: usize, cols: &[usize]) -> i128 {
    if cols.len() == 1 {
        return e[row * r + cols[0]] as i128 % n;
    }
    let mut acc = 0i128;
    for (k, &c) in cols.iter().enumerate() {
        let entry = e[row * r + c] as i128;
        if entry == 0 {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor(r, n, e, row + 1, &rest);
        let term = entry * minor % n;
        acc = (if k % 2 == 0 { acc + term } else { acc - term }) % n;
    }
    acc
}

/// Fraction-free elimination over the integers.
fn bareiss(r: usize, e: &[u64]) -> BigInt {
    let mut a: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| BigInt::from(e[i * r + j])).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..r.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..r).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..r {
            for j in k + 1..r {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[r - 1][r - 1]
}

/// Lexicographic walk over all `n^(r^2)` entry vectors, last entry fastest.
pub struct MatrixCandidates {
    r: usize,
    n: u64,
    next: Option<Vec<u64>>,
}

impl Iterator for MatrixCandidates {
    type Item = MatrixZn;

    fn next(&mut self) -> Option<MatrixZn> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for slot in succ.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(MatrixZn {
            r: self.r,
            n: self.n,
            entries: current,
        })
    }
}

fn candidate_count(r: usize, n: u64) -> u128 {
    saturating_pow(n, (r * r) as u32)
}

fn candidates(r: usize, n: u64, budget: u64) -> Result<MatrixCandidates> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    check_budget(candidate_count(r, n), budget)?;
    Ok(MatrixCandidates {
        r,
        n,
        next: Some(vec![0; r * r]),
    })
}

/// All `X` with `gcd(det X, n) = 1`, in lexicographic order.
pub fn enumerate_gl(r: u32, n: u64, budget: u64) -> Result<impl Iterator<Item = MatrixZn>> {
    Ok(candidates(r as usize, n, budget)?.filter(move |x| gcd(x.det_mod(), n) == 1))
}

/// All `X` with `det X = 1`, in lexicographic order.
pub fn enumerate_sl(r: u32, n: u64, budget: u64) -> Result<impl Iterator<Item = MatrixZn>> {
    Ok(candidates(r as usize, n, budget)?.filter(move |x| x.det_mod() == 1 % n))
}

/// Number of matrices in `M_r(Z_n)` for each `(det, trace)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceDetHistogram {
    r: usize,
    n: u64,
    counts: Vec<u64>,
}

impl TraceDetHistogram {
    pub fn count(&self, det: u64, trace: u64) -> u64 {
        self.counts[(det * self.n + trace) as usize]
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    fn sweep(r: usize, n: u64) -> Self {
        let len = r * r;
        let cells = (n * n) as usize;
        // split on the first entry; partial histograms add exactly
        let counts = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut counts = vec![0u64; cells];
                let mut e = vec![0u64; len];
                e[0] = first;
                loop {
                    let det = det_entries(r, n, &e);
                    let tr = trace_entries(r, n, &e);
                    counts[(det * n + tr) as usize] += 1;
                    // advance entries 1..len
                    let mut done = true;
                    for slot in e[1..].iter_mut().rev() {
                        *slot += 1;
                        if *slot < n {
                            done = false;
                            break;
                        }
                        *slot = 0;
                    }
                    if done {
                        break;
                    }
                }
                counts
            })
            .reduce(
                || vec![0u64; cells],
                |mut acc, part| {
                    acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                    acc
                },
            );
        TraceDetHistogram { r, n, counts }
    }
}

type HistogramCache = RwLock<HashMap<(usize, u64), Arc<TraceDetHistogram>>>;

/// Enumerates `M_r(Z_n)` once per `(r, n)` and caches the histogram.
pub fn trace_det_histogram(r: u32, n: u64, budget: u64) -> Result<Arc<TraceDetHistogram>> {
    let r = r as usize;
    static CACHE: OnceLock<HistogramCache> = OnceLock::new();
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    check_budget(candidate_count(r, n), budget)?;
    let cache = CACHE.get_or_init(Default::default);
    if let Some(h) = cache.read().unwrap().get(&(r, n)) {
        return Ok(Arc::clone(h));
    }
    let h = Arc::new(TraceDetHistogram::sweep(r, n));
    Ok(cache.write().unwrap().entry((r, n)).or_insert(h).clone())
}

/// `|GL_r(Z_{p^m})| = p^(m r^2) prod_{i=1}^r (1 - p^-i)`.
pub fn gl_order_prime_power(r: u32, p: u64, m: u32) -> Result<BigInt> {
    if !is_prime(p) {
        return Err(Error::NotPrime { p });
    }
    let q =
        BigRational::from_integer(BigInt::from(p).pow(m * r * r)) * unit_fraction_product(p, 1, r);
    certify_integer(q, "|GL_r(Z_p^m)|")
}

/// `|GL_r(Z_n)| = n^(r^2) prod_{p | n} prod_{i=1}^r (1 - p^-i)`.
pub fn gl_order(r: u32, n: u64) -> Result<BigInt> {
    let f = factorize(n)?;
    let q = f.primes().fold(
        BigRational::from_integer(BigInt::from(n).pow(r * r)),
        |acc, p| acc * unit_fraction_product(p, 1, r),
    );
    certify_integer(q, "|GL_r(Z_n)|")
}

/// `|SL_r(Z_n)| = n^(r^2 - 1) prod_{p | n} prod_{i=2}^r (1 - p^-i)`.
pub fn sl_order(r: u32, n: u64) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let f = factorize(n)?;
    let q = f.primes().fold(
        BigRational::from_integer(BigInt::from(n).pow(r * r - 1)),
        |acc, p| acc * unit_fraction_product(p, 2, r),
    );
    certify_integer(q, "|SL_r(Z_n)|")
}

/// `sum_{X in GL_r(Z_n)} chi(det X) lambda(tr X)` by enumeration.
pub fn gl_gauss_bruteforce(
    r: u32,
    chi: &MultChar,
    lambda: &AddChar,
    budget: u64,
) -> Result<Cyclotomic> {
    let n = lambda.modulus();
    if chi.modulus() != n {
        return Err(Error::InvalidInput(
            "chi and lambda have different moduli".into(),
        ));
    }
    let h = trace_det_histogram(r, n, budget)?;
    let big_e = chi.value_level();
    let level = lcm(n, big_e);
    let mut counts = vec![0i128; level as usize];
    for &u in chi.structure().units() {
        let chi_part = chi.value_exponent(u)? * (level / big_e);
        for t in 0..n {
            let c = h.count(u, t);
            if c > 0 {
                let e = (chi_part + lambda.exponent(t) * (level / n)) % level;
                counts[e as usize] += i128::from(c);
            }
        }
    }
    Cyclotomic::from_power_counts(level, &counts)
}

/// `sum_{X in SL_r(Z_n)} lambda(tr X)` by enumeration.
pub fn sl_gauss_bruteforce(r: u32, lambda: &AddChar, budget: u64) -> Result<Cyclotomic> {
    let n = lambda.modulus();
    let h = trace_det_histogram(r, n, budget)?;
    let mut counts = vec![0i128; n as usize];
    for t in 0..n {
        counts[lambda.exponent(t) as usize] += i128::from(h.count(1 % n, t));
    }
    Cyclotomic::from_power_counts(n, &counts)
}

/// `N_beta = |{X in GL_r(Z_n) : tr X = beta}|` by enumeration.
pub fn trace_count_bruteforce(r: u32, n: u64, beta: u64, budget: u64) -> Result<u64> {
    let h = trace_det_histogram(r, n, budget)?;
    let beta = beta % n;
    Ok((0..n)
        .filter(|&u| gcd(u, n) == 1)
        .map(|u| h.count(u, beta))
        .sum())
}

/// Matrix product mod `n`; used by tests for closure checks.
pub fn mat_mul(a: &MatrixZn, b: &MatrixZn) -> MatrixZn {
    assert_eq!((a.r, a.n), (b.r, b.n));
    let (r, n) = (a.r, a.n);
    let mut entries = vec![0; r * r];
    for i in 0..r {
        for j in 0..r {
            entries[i * r + j] =
                (0..r).fold(0, |acc, k| (acc + mul_mod(a.get(i, k), b.get(k, j), n)) % n);
        }
    }
    MatrixZn { r, n, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsums::{gauss_sum_direct, GaussSumParams, DEFAULT_BUDGET};
    use crate::residue_chars::enumerate_mult_chars;

    fn m(r: usize, n: u64, e: &[u64]) -> MatrixZn {
        MatrixZn::new(r, n, e.to_vec()).unwrap()
    }

    /// Leibniz expansion over all permutations, independent of the cofactor path.
    fn det_permutations(x: &MatrixZn) -> u64 {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let (r, n) = (x.dim(), x.modulus() as i128);
        let mut acc = 0i128;
        for p in perms(r) {
            let inversions = (0..r)
                .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let prod = (0..r).fold(1i128, |acc, i| acc * x.get(i, p[i]) as i128 % n);
            acc += if inversions % 2 == 0 { prod } else { -prod };
        }
        acc.rem_euclid(n) as u64
    }

    #[test]
    fn det_and_trace_examples() {
        for r in 1..=6 {
            for n in [2, 5, 12] {
                assert_eq!(MatrixZn::identity(r, n).det_mod(), 1);
            }
        }
        assert_eq!(m(2, 2, &[0, 1, 1, 0]).det_mod(), 1);
        assert_eq!(m(2, 5, &[1, 2, 3, 4]).det_mod(), 3);
        assert_eq!(MatrixZn::identity(2, 2).trace_mod(), 0);
        assert_eq!(m(2, 5, &[1, 2, 3, 4]).trace_mod(), 0);
        assert_eq!(m(3, 7, &[0; 9]).trace_mod(), 0);
        assert!(MatrixZn::new(2, 5, vec![1, 2, 3, 5]).is_err());
        assert!(MatrixZn::new(2, 5, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn det_matches_permutation_expansion() {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = move |bound: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % bound
        };
        for _ in 0..500 {
            let r = 1 + next(5) as usize;
            let n = 2 + next(40);
            let e: Vec<u64> = (0..r * r).map(|_| next(n)).collect();
            let x = m(r, n, &e);
            assert_eq!(x.det_mod(), det_permutations(&x), "{x:?}");
            // the elimination path agrees with cofactors on small dims too
            let big = bareiss(r, &e).mod_floor(&BigInt::from(n));
            assert_eq!(big, BigInt::from(x.det_mod()));
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_gl(2, 2, DEFAULT_BUDGET).unwrap().count(), 6);
        assert_eq!(enumerate_sl(2, 2, DEFAULT_BUDGET).unwrap().count(), 6);
        for n in 1..=12u64 {
            assert_eq!(
                enumerate_gl(1, n, DEFAULT_BUDGET).unwrap().count() as u64,
                crate::arith::euler_phi(n)
            );
        }
        let first: Vec<MatrixZn> = enumerate_gl(2, 2, DEFAULT_BUDGET)
            .unwrap()
            .take(2)
            .collect();
        assert_eq!(first[0].entries(), &[0, 1, 1, 0]);
        assert_eq!(first[1].entries(), &[0, 1, 1, 1]);
        assert!(matches!(
            enumerate_gl(3, 4, 1000),
            Err(Error::BudgetExceeded {
                needed: 262_144,
                budget: 1000
            })
        ));
    }

    #[test]
    fn enumerated_groups_are_closed() {
        let gl: Vec<MatrixZn> = enumerate_gl(2, 3, DEFAULT_BUDGET).unwrap().collect();
        let sl: Vec<MatrixZn> = enumerate_sl(2, 3, DEFAULT_BUDGET).unwrap().collect();
        for a in gl.iter().step_by(5) {
            for b in gl.iter().step_by(7) {
                assert!(gl.contains(&mat_mul(a, b)));
            }
        }
        for a in &sl {
            for b in sl.iter().step_by(3) {
                assert!(sl.contains(&mat_mul(a, b)));
            }
        }
    }

    #[test]
    fn order_examples() {
        let int = |x: i64| BigInt::from(x);
        assert_eq!(gl_order_prime_power(2, 2, 1).unwrap(), int(6));
        assert_eq!(gl_order_prime_power(2, 2, 2).unwrap(), int(96));
        assert_eq!(gl_order_prime_power(1, 3, 2).unwrap(), int(6));
        assert_eq!(gl_order_prime_power(2, 4, 1), Err(Error::NotPrime { p: 4 }));
        assert_eq!(gl_order(2, 6).unwrap(), int(288));
        assert_eq!(gl_order(2, 4).unwrap(), int(96));
        for r in 1..=4 {
            assert_eq!(gl_order(r, 1).unwrap(), int(1));
            assert_eq!(sl_order(r, 1).unwrap(), int(1));
        }
        assert_eq!(sl_order(2, 6).unwrap(), int(144));
        assert_eq!(sl_order(2, 2).unwrap(), int(6));
        for n in 1..=20 {
            assert_eq!(sl_order(1, n).unwrap(), int(1));
        }
    }

    #[test]
    fn orders_factor_over_prime_powers() {
        for n in 2..=200u64 {
            for r in 1..=4u32 {
                let f = factorize(n).unwrap();
                let product: BigInt = f
                    .factors()
                    .iter()
                    .map(|&(p, m)| gl_order_prime_power(r, p, m).unwrap())
                    .product();
                assert_eq!(gl_order(r, n).unwrap(), product);
                assert_eq!(
                    sl_order(r, n).unwrap() * BigInt::from(crate::arith::euler_phi(n)),
                    product
                );
            }
        }
    }

    #[test]
    fn enumeration_matches_orders() {
        let grid = [(2u32, 1..=8u64), (3, 1..=4)];
        for (r, ns) in grid {
            for n in ns {
                let gl = enumerate_gl(r, n, DEFAULT_BUDGET).unwrap().count();
                let sl = enumerate_sl(r, n, DEFAULT_BUDGET).unwrap().count();
                assert_eq!(BigInt::from(gl), gl_order(r, n).unwrap(), "r={r} n={n}");
                assert_eq!(BigInt::from(sl), sl_order(r, n).unwrap(), "r={r} n={n}");
                let by_trace: u64 = (0..n)
                    .map(|b| trace_count_bruteforce(r, n, b, DEFAULT_BUDGET).unwrap())
                    .sum();
                assert_eq!(by_trace, gl as u64);
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        let b = DEFAULT_BUDGET;
        let g = |r, n, chi, a| {
            gl_gauss_bruteforce(
                r,
                &MultChar::from_index(n, chi).unwrap(),
                &AddChar::new(n, a).unwrap(),
                b,
            )
            .unwrap()
        };
        assert_eq!(g(2, 2, 0, 1), Cyclotomic::from_integer(2));
        assert_eq!(g(2, 3, 1, 1), Cyclotomic::from_integer(-9));
        for n in 1..=12 {
            for chi in enumerate_mult_chars(n).unwrap() {
                for a in 0..n {
                    let lambda = AddChar::new(n, a).unwrap();
                    let direct =
                        gauss_sum_direct(&GaussSumParams::new(chi.clone(), lambda).unwrap())
                            .unwrap();
                    assert_eq!(gl_gauss_bruteforce(1, &chi, &lambda, b).unwrap(), direct);
                }
            }
        }
        let s = |r, n, a| sl_gauss_bruteforce(r, &AddChar::new(n, a).unwrap(), b).unwrap();
        assert_eq!(s(2, 2, 1), Cyclotomic::from_integer(2));
        assert_eq!(s(2, 3, 1), Cyclotomic::from_integer(-3));
        for n in 1..=9 {
            for a in 0..n {
                assert_eq!(s(1, n, a), AddChar::new(n, a).unwrap().eval(1));
            }
        }
    }

    #[test]
    fn trace_count_examples() {
        let b = DEFAULT_BUDGET;
        assert_eq!(trace_count_bruteforce(2, 2, 0, b).unwrap(), 4);
        assert_eq!(trace_count_bruteforce(2, 2, 1, b).unwrap(), 2);
        assert_eq!(trace_count_bruteforce(2, 3, 0, b).unwrap(), 18);
        assert_eq!(trace_count_bruteforce(2, 3, 1, b).unwrap(), 15);
        assert_eq!(trace_count_bruteforce(2, 3, 2, b).unwrap(), 15);
    }

    #[test]
    fn trace_counts_depend_on_gcd_class() {
        for (r, max_n) in [(2u32, 8u64), (3, 4)] {
            for n in 1..=max_n {
                for beta in 0..n {
                    let class = gcd(beta, n) % n;
                    assert_eq!(
                        trace_count_bruteforce(r, n, beta, DEFAULT_BUDGET).unwrap(),
                        trace_count_bruteforce(r, n, class, DEFAULT_BUDGET).unwrap(),
                        "r={r} n={n} beta={beta}"
                    );
                }
            }
        }
    }
}
