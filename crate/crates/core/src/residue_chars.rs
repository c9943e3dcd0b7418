//! Additive characters of `Z_n` and the multiplicative character group of `Z_n^*`.
//!
//! `Z_n^*` is decomposed canonically: split over prime powers by CRT, use the
//! smallest primitive root for odd `p^m`, generator 3 for 4, and the pair
//! `(-1, 3)` for `2^m` with `m >= 3`. Each component generator is lifted to
//! `Z_n` as the residue that is `g` modulo its prime power and `1` modulo the
//! others. A character is its exponent vector against these generators, so
//! `chi(g_i) = zeta_{ord_i}^{e_i}`.
//!
//! Characters are not extended by zero: evaluating at a non-unit is an error.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::arith::smallest_primitive_root;
use crate::arith::{crt_multipliers, divisors, euler_phi, factorize, gcd, lcm, mul_mod};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};

/// `lambda_a(x) = exp(2 pi i a x / n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AddChar {
    modulus: u64,
    multiplier: u64,
}

impl AddChar {
    /// The multiplier is reduced modulo `n`.
    pub fn new(modulus: u64, multiplier: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(AddChar {
            modulus,
            multiplier: multiplier % modulus,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// `gcd(a, n)`, with `gcd(0, n) = n`.
    pub fn gcd_with_modulus(&self) -> u64 {
        gcd(self.multiplier, self.modulus)
    }

    pub fn order(&self) -> u64 {
        self.modulus / self.gcd_with_modulus()
    }

    /// Exponent `k` with `lambda(x) = zeta_n^k`.
    pub fn exponent(&self, x: u64) -> u64 {
        mul_mod(self.multiplier, x % self.modulus, self.modulus)
    }

    pub fn eval(&self, x: u64) -> Cyclotomic {
        Cyclotomic::root(self.modulus, self.exponent(x) as i64)
            .expect("additive character modulus within level ceiling")
    }

    /// `x -> lambda(c * x)`.
    pub fn dilate(&self, c: u64) -> AddChar {
        AddChar {
            modulus: self.modulus,
            multiplier: mul_mod(self.multiplier, c, self.modulus),
        }
    }
}

pub fn add_char_eval(lambda: &AddChar, x: u64) -> Cyclotomic {
    lambda.eval(x)
}

/// Canonical internal direct-product decomposition of `Z_n^*`.
#[derive(Debug)]
pub struct UnitGroupStructure {
    modulus: u64,
    generators: Vec<(u64, u64)>,
    exponent: u64,
    /// Residue -> mixed-radix index of its exponent vector; `u32::MAX` for non-units.
    dlog: Vec<u32>,
    units: Vec<u64>,
}

impl PartialEq for UnitGroupStructure {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.generators == other.generators
    }
}

impl UnitGroupStructure {
    fn build(n: u64) -> Result<Self> {
        let f = factorize(n)?;
        let idempotents = if n >= 2 {
            crt_multipliers(&f)
        } else {
            Vec::new()
        };
        let mut generators = Vec::new();
        for (&(p, m), &e) in f.factors().iter().zip(&idempotents) {
            let q = p.pow(m);
            let local: Vec<(u64, u64)> = match (p, m) {
                (2, 1) => vec![],
                (2, 2) => vec![(3, 2)],
                (2, _) => vec![(q - 1, 2), (3, q / 4)],
                _ => vec![(smallest_primitive_root(q), euler_phi(q))],
            };
            for (g, order) in local {
                // g mod q, 1 mod the other prime powers
                let lifted = (1 + mul_mod(g - 1, e, n)) % n;
                generators.push((lifted, order));
            }
        }
        let exponent = generators.iter().fold(1, |acc, &(_, o)| lcm(acc, o));
        let phi = euler_phi(n);
        let mut dlog = vec![u32::MAX; n as usize];
        let radix: Vec<u64> = generators.iter().map(|&(_, o)| o).collect();
        for index in 0..phi {
            let v = decode(index, &radix);
            let x = generators.iter().zip(&v).fold(1 % n, |acc, (&(g, _), &k)| {
                mul_mod(acc, crate::arith::pow_mod(g, k, n), n)
            });
            let slot = &mut dlog[x as usize];
            if *slot != u32::MAX {
                return Err(Error::FormulaGuard(format!(
                    "generators of Z_{n}^* do not give unique exponent vectors"
                )));
            }
            *slot = index as u32;
        }
        let units = (0..n).filter(|&x| dlog[x as usize] != u32::MAX).collect();
        Ok(UnitGroupStructure {
            modulus: n,
            generators,
            exponent,
            dlog,
            units,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `(generator, order)` pairs.
    pub fn generators(&self) -> &[(u64, u64)] {
        &self.generators
    }

    pub fn orders(&self) -> Vec<u64> {
        self.generators.iter().map(|&(_, o)| o).collect()
    }

    /// Exponent of the group (lcm of generator orders); character values
    /// are `exponent`-th roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.units.len() as u64
    }

    /// Units of `Z_n` in increasing order.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn is_unit(&self, x: u64) -> bool {
        self.dlog[(x % self.modulus) as usize] != u32::MAX
    }

    /// Exponent vector of unit `x` against the generators.
    pub fn discrete_log(&self, x: u64) -> Result<Vec<u64>> {
        let idx = self.dlog[(x % self.modulus) as usize];
        if idx == u32::MAX {
            return Err(Error::NonUnit { x, n: self.modulus });
        }
        Ok(decode(u64::from(idx), &self.orders()))
    }
}

fn decode(mut index: u64, radix: &[u64]) -> Vec<u64> {
    let mut v = vec![0; radix.len()];
    for (slot, &r) in v.iter_mut().zip(radix).rev() {
        *slot = index % r;
        index /= r;
    }
    v
}

fn encode(digits: &[u64], radix: &[u64]) -> u64 {
    digits
        .iter()
        .zip(radix)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

type StructureCache = RwLock<HashMap<u64, Arc<UnitGroupStructure>>>;

/// Cached canonical structure of `Z_n^*`.
pub fn unit_group_structure(n: u64) -> Result<Arc<UnitGroupStructure>> {
    static CACHE: OnceLock<StructureCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.read().unwrap().get(&n) {
        return Ok(Arc::clone(s));
    }
    let built = Arc::new(UnitGroupStructure::build(n)?);
    Ok(cache.write().unwrap().entry(n).or_insert(built).clone())
}

/// A multiplicative character of `Z_n^*`, given by its exponent vector.
#[derive(Debug, Clone)]
pub struct MultChar {
    structure: Arc<UnitGroupStructure>,
    exponents: Vec<u64>,
}

impl PartialEq for MultChar {
    fn eq(&self, other: &Self) -> bool {
        self.structure.modulus == other.structure.modulus && self.exponents == other.exponents
    }
}

impl Eq for MultChar {}

impl MultChar {
    pub fn trivial(n: u64) -> Result<Self> {
        let structure = unit_group_structure(n)?;
        let exponents = vec![0; structure.generators.len()];
        Ok(MultChar {
            structure,
            exponents,
        })
    }

    /// Character with `chi(g_i) = zeta_{ord_i}^{e_i}`; exponents must be in range.
    pub fn from_exponents(n: u64, exponents: Vec<u64>) -> Result<Self> {
        let structure = unit_group_structure(n)?;
        let orders = structure.orders();
        if exponents.len() != orders.len() || exponents.iter().zip(&orders).any(|(e, o)| e >= o) {
            return Err(Error::InvalidInput(format!(
                "exponent vector {exponents:?} does not match generator orders {orders:?} of Z_{n}^*"
            )));
        }
        Ok(MultChar {
            structure,
            exponents,
        })
    }

    /// Character at position `index` of [`enumerate_mult_chars`].
    pub fn from_index(n: u64, index: u64) -> Result<Self> {
        let structure = unit_group_structure(n)?;
        if index >= structure.order() {
            return Err(Error::InvalidInput(format!(
                "character index {index} out of range for Z_{n}^* ({} characters)",
                structure.order()
            )));
        }
        let exponents = decode(index, &structure.orders());
        Ok(MultChar {
            structure,
            exponents,
        })
    }

    pub fn index(&self) -> u64 {
        encode(&self.exponents, &self.structure.orders())
    }

    pub fn modulus(&self) -> u64 {
        self.structure.modulus
    }

    pub fn structure(&self) -> &Arc<UnitGroupStructure> {
        &self.structure
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Level `E` such that every value is a power of `zeta_E`.
    pub fn value_level(&self) -> u64 {
        self.structure.exponent
    }

    /// `k` with `chi(x) = zeta_E^k`, `E = value_level()`.
    pub fn value_exponent(&self, x: u64) -> Result<u64> {
        let logs = self.structure.discrete_log(x)?;
        let big_e = self.structure.exponent;
        let k = logs
            .iter()
            .zip(&self.exponents)
            .zip(&self.structure.generators)
            .fold(0u64, |acc, ((&v, &e), &(_, o))| {
                (acc + mul_mod(mul_mod(v, e, big_e), big_e / o, big_e)) % big_e
            });
        Ok(k)
    }

    pub fn eval(&self, x: u64) -> Result<Cyclotomic> {
        let k = self.value_exponent(x)?;
        Cyclotomic::root(self.value_level(), k as i64)
    }

    /// Smallest `f | n` such that `chi(x) = 1` for all units `x = 1 mod f`.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus();
        if self.is_trivial() {
            return 1;
        }
        divisors(n)
            .into_iter()
            .find(|&f| {
                self.structure
                    .units
                    .iter()
                    .filter(|&&x| x % f == 1 % f)
                    .all(|&x| self.value_exponent(x) == Ok(0))
            })
            .unwrap_or(n)
    }

    /// Exponent `e` with `zeta_order^e = zeta_E^k`.
    fn rescale(k: u64, from_level: u64, order: u64) -> Result<u64> {
        let num = k as u128 * order as u128;
        if !num.is_multiple_of(from_level as u128) {
            return Err(Error::FormulaGuard(format!(
                "character value zeta_{from_level}^{k} is not an order-{order} root of unity"
            )));
        }
        Ok((num / from_level as u128) as u64 % order)
    }

    /// The character of `Z_m^*` agreeing with this one on residues coprime to `n`.
    pub fn induce(&self, m: u64) -> Result<MultChar> {
        let n = self.modulus();
        let f = self.conductor();
        if m == 0 || !n.is_multiple_of(m) || !m.is_multiple_of(f) {
            return Err(Error::ConductorNotDividing { conductor: f, m, n });
        }
        let target = unit_group_structure(m)?;
        let mut exponents = Vec::with_capacity(target.generators.len());
        for &(g, order) in &target.generators {
            let lift = (0..=n / m)
                .map(|k| (g + k * m) % n)
                .find(|&c| gcd(c, n) == 1)
                .expect("every unit mod m lifts to a unit mod n");
            let k = self.value_exponent(lift)?;
            exponents.push(Self::rescale(k, self.value_level(), order)?);
        }
        Ok(MultChar {
            structure: target,
            exponents,
        })
    }

    /// The character `chi o (reduction mod m)` of `Z_big^*`, for `m | big`.
    pub fn inflate(&self, big: u64) -> Result<MultChar> {
        let m = self.modulus();
        if big == 0 || !big.is_multiple_of(m) {
            return Err(Error::NotMultiple {
                level: m,
                target: big,
            });
        }
        let target = unit_group_structure(big)?;
        let mut exponents = Vec::with_capacity(target.generators.len());
        for &(g, order) in &target.generators {
            let k = self.value_exponent(g % m)?;
            exponents.push(Self::rescale(k, self.value_level(), order)?);
        }
        Ok(MultChar {
            structure: target,
            exponents,
        })
    }
}

pub fn mult_char_eval(chi: &MultChar, x: u64) -> Result<Cyclotomic> {
    chi.eval(x)
}

pub fn conductor(chi: &MultChar) -> u64 {
    chi.conductor()
}

pub fn induce_char(chi: &MultChar, m: u64) -> Result<MultChar> {
    chi.induce(m)
}

/// All `phi(n)` characters in canonical order: mixed-radix over the exponent
/// vector, last generator fastest. Index 0 is the trivial character.
pub fn enumerate_mult_chars(n: u64) -> Result<Vec<MultChar>> {
    let structure = unit_group_structure(n)?;
    let orders = structure.orders();
    Ok((0..structure.order())
        .map(|i| MultChar {
            structure: Arc::clone(&structure),
            exponents: decode(i, &orders),
        })
        .collect())
}

#[derive(Serialize)]
struct MultCharJson<'a> {
    modulus: u64,
    generators: Vec<[u64; 2]>,
    exponents: &'a [u64],
}

impl Serialize for MultChar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MultCharJson {
            modulus: self.modulus(),
            generators: self
                .structure
                .generators
                .iter()
                .map(|&(g, o)| [g, o])
                .collect(),
            exponents: &self.exponents,
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(n: u64, e: &[u64]) -> MultChar {
        MultChar::from_exponents(n, e.to_vec()).unwrap()
    }

    #[test]
    fn additive_examples() {
        let minus_one = Cyclotomic::from_integer(-1);
        assert_eq!(AddChar::new(4, 1).unwrap().eval(2), minus_one);
        assert_eq!(AddChar::new(4, 2).unwrap().eval(3), minus_one);
        for n in 1..10 {
            for a in 0..n {
                assert_eq!(AddChar::new(n, a).unwrap().eval(0), Cyclotomic::one());
            }
        }
        assert_eq!(AddChar::new(12, 8).unwrap().order(), 3);
        assert_eq!(AddChar::new(12, 0).unwrap().order(), 1);
    }

    #[test]
    fn structure_examples() {
        assert!(unit_group_structure(1).unwrap().generators().is_empty());
        assert!(unit_group_structure(2).unwrap().generators().is_empty());
        assert_eq!(
            unit_group_structure(8).unwrap().generators(),
            &[(7, 2), (3, 2)]
        );
        assert_eq!(unit_group_structure(7).unwrap().generators(), &[(3, 6)]);
        assert_eq!(unit_group_structure(4).unwrap().generators(), &[(3, 2)]);
        assert_eq!(
            unit_group_structure(32).unwrap().generators(),
            &[(31, 2), (3, 8)]
        );
        // 12 = 4 * 3: 3 mod 4 lifted to 7, 2 mod 3 lifted to 5
        assert_eq!(
            unit_group_structure(12).unwrap().generators(),
            &[(7, 2), (5, 2)]
        );
    }

    #[test]
    fn structure_invariants() {
        for n in 1..=300u64 {
            let s = unit_group_structure(n).unwrap();
            assert_eq!(s.orders().iter().product::<u64>(), euler_phi(n), "n={n}");
            assert_eq!(s.order(), euler_phi(n));
            for &x in s.units() {
                let v = s.discrete_log(x).unwrap();
                let back = s
                    .generators()
                    .iter()
                    .zip(&v)
                    .fold(1 % n, |acc, (&(g, _), &k)| {
                        mul_mod(acc, crate::arith::pow_mod(g, k, n), n)
                    });
                assert_eq!(back, x);
            }
            // two calls give the same canonical list
            assert_eq!(*s, UnitGroupStructure::build(n).unwrap());
        }
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_mult_chars(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].is_trivial());
        assert_eq!(enumerate_mult_chars(3).unwrap().len(), 2);
        let eight = enumerate_mult_chars(8).unwrap();
        assert_eq!(eight.len(), 4);
        assert!(eight[0].is_trivial());
        for c in &eight {
            for &u in &[1, 3, 5, 7] {
                let v = c.eval(u).unwrap();
                assert!(v == Cyclotomic::one() || v == Cyclotomic::from_integer(-1));
            }
        }
        for n in 1..=60 {
            let all = enumerate_mult_chars(n).unwrap();
            assert_eq!(all.len() as u64, euler_phi(n));
            for (i, c) in all.iter().enumerate() {
                assert_eq!(c.index(), i as u64);
                assert_eq!(&MultChar::from_index(n, i as u64).unwrap(), c);
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let t = MultChar::trivial(10).unwrap();
        for u in [1, 3, 7, 9] {
            assert_eq!(t.eval(u).unwrap(), Cyclotomic::one());
        }
        assert_eq!(chi(3, &[1]).eval(2).unwrap(), Cyclotomic::from_integer(-1));
        assert_eq!(chi(4, &[1]).eval(2), Err(Error::NonUnit { x: 2, n: 4 }));
        assert!(MultChar::from_exponents(4, vec![2]).is_err());
        assert!(MultChar::from_index(4, 2).is_err());
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(MultChar::trivial(12).unwrap().conductor(), 1);
        assert_eq!(chi(4, &[1]).conductor(), 4);
        // chi(7) = 1, chi(3) = -1
        assert_eq!(chi(8, &[0, 1]).conductor(), 8);
        let mut conductors: Vec<u64> = enumerate_mult_chars(8)
            .unwrap()
            .iter()
            .map(MultChar::conductor)
            .collect();
        conductors.sort_unstable();
        assert_eq!(conductors, vec![1, 4, 8, 8]);
        let mut five: Vec<u64> = enumerate_mult_chars(5)
            .unwrap()
            .iter()
            .map(MultChar::conductor)
            .collect();
        five.sort_unstable();
        assert_eq!(five, vec![1, 5, 5, 5]);
    }

    #[test]
    fn induce_examples() {
        let t = MultChar::trivial(12).unwrap().induce(3).unwrap();
        assert_eq!(t, MultChar::trivial(3).unwrap());
        let base = chi(4, &[1]);
        let lifted = base.inflate(8).unwrap();
        assert_eq!(lifted.conductor(), 4);
        assert_eq!(lifted.induce(4).unwrap(), base);
        assert_eq!(
            base.induce(2),
            Err(Error::ConductorNotDividing {
                conductor: 4,
                m: 2,
                n: 4
            })
        );
        assert!(base.induce(3).is_err());
    }

    #[test]
    fn additive_orthogonality() {
        for n in 1..=30u64 {
            for a in (0..n).filter(|&a| gcd(a, n) == 1) {
                let lambda = AddChar::new(n, a).unwrap();
                for x in 0..n {
                    let mut counts = vec![0i128; n as usize];
                    for b in 0..n {
                        counts[lambda.exponent(mul_mod(b, x, n)) as usize] += 1;
                    }
                    let s = Cyclotomic::from_power_counts(n, &counts).unwrap();
                    let expect = if x == 0 { n as i64 } else { 0 };
                    assert_eq!(s, Cyclotomic::from_integer(expect), "n={n} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn multiplicative_orthogonality_and_homomorphism() {
        for n in 1..=20u64 {
            let s = unit_group_structure(n).unwrap();
            for c in enumerate_mult_chars(n).unwrap() {
                let total: Cyclotomic = s.units().iter().map(|&x| c.eval(x).unwrap()).sum();
                let expect = if c.is_trivial() {
                    euler_phi(n) as i64
                } else {
                    0
                };
                assert_eq!(
                    total,
                    Cyclotomic::from_integer(expect),
                    "n={n} chi={:?}",
                    c.exponents()
                );
                for &x in s.units() {
                    for &y in s.units() {
                        assert_eq!(
                            c.eval(mul_mod(x, y, n)).unwrap(),
                            c.eval(x).unwrap() * c.eval(y).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn induced_characters_agree_on_lifts() {
        for n in 1..=24u64 {
            let units = unit_group_structure(n).unwrap();
            for c in enumerate_mult_chars(n).unwrap() {
                let f = c.conductor();
                for m in divisors(n).into_iter().filter(|m| m % f == 0) {
                    let induced = c.induce(m).unwrap();
                    assert_eq!(induced.conductor(), f);
                    for &u in units.units() {
                        assert_eq!(induced.eval(u % m).unwrap(), c.eval(u).unwrap());
                    }
                }
                for m in divisors(n).into_iter().filter(|m| m % f != 0) {
                    assert!(c.induce(m).is_err());
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(chi(8, &[0, 1])).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"modulus": 8, "generators": [[7, 2], [3, 2]], "exponents": [0, 1]})
        );
    }
}
