//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! An element of level `N` is stored as its coefficient vector over the power
//! basis `1, zeta_N, ..., zeta_N^(phi(N)-1)` after division with remainder by
//! the cyclotomic polynomial `Phi_N`. That vector is unique for each field
//! element, so equality at a common level is a coefficient comparison.
//! Mixed-level operands are embedded into the lcm of their levels.
//!
//! The level ceiling guards the public constructors ([`Cyclotomic::root`],
//! [`Cyclotomic::from_power_counts`], [`Cyclotomic::embed`] and
//! [`cyclotomic_poly`]). Levels reached as lcms of admitted levels are not
//! re-checked.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{divisors, euler_phi, factorize, lcm, mod_inverse, moebius};
use crate::error::{Error, Result};

pub const DEFAULT_LEVEL_CEILING: u64 = 10_000;

static LEVEL_CEILING: AtomicU64 = AtomicU64::new(DEFAULT_LEVEL_CEILING);

pub fn level_ceiling() -> u64 {
    LEVEL_CEILING.load(Ordering::Relaxed)
}

pub fn set_level_ceiling(ceiling: u64) {
    LEVEL_CEILING.store(ceiling.max(1), Ordering::Relaxed);
}

fn check_level(level: u64) -> Result<()> {
    if level == 0 {
        return Err(Error::ZeroModulus);
    }
    let ceiling = level_ceiling();
    if level > ceiling {
        return Err(Error::LevelCeiling { level, ceiling });
    }
    Ok(())
}

type PolyCache = RwLock<HashMap<u64, Arc<Vec<i64>>>>;

fn poly_cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Phi_N` as integer coefficients, lowest degree first (length `phi(N) + 1`).
pub fn cyclotomic_poly(level: u64) -> Result<Arc<Vec<i64>>> {
    check_level(level)?;
    Ok(phi_poly(level))
}

fn phi_poly(level: u64) -> Arc<Vec<i64>> {
    if let Some(p) = poly_cache().read().unwrap().get(&level) {
        return Arc::clone(p);
    }
    let poly = Arc::new(compute_phi_poly(level));
    poly_cache()
        .write()
        .unwrap()
        .entry(level)
        .or_insert(poly)
        .clone()
}

/// `Phi_N = prod_{d | N} (x^d - 1)^{mu(N/d)}`: multiply in the `mu = +1`
/// factors, then divide out the `mu = -1` factors exactly.
fn compute_phi_poly(level: u64) -> Vec<i64> {
    let divs = divisors(level);
    let mut poly: Vec<i128> = vec![1];
    for &d in &divs {
        if moebius(level / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i128; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divs {
        if moebius(level / d) == -1 {
            let d = d as usize;
            // poly = q * (x^d - 1)  =>  q[i] = q[i - d] - poly[i]
            let deg = poly.len() - 1 - d;
            let mut q = vec![0i128; deg + 1];
            for i in 0..=deg {
                let shifted = if i >= d { q[i - d] } else { 0 };
                q[i] = shifted - poly[i];
            }
            poly = q;
        }
    }
    debug_assert_eq!(poly.len() as u64, euler_phi(level) + 1);
    poly.into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient fits in i64"))
        .collect()
}

/// Reduces a vector indexed by exponents of `zeta_N` modulo `Phi_N`.
fn reduce_rational(level: u64, mut v: Vec<BigRational>) -> Vec<BigRational> {
    let phi = phi_poly(level);
    let deg = phi.len() - 1;
    for i in (deg..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut v[i], BigRational::zero());
        for (j, &pj) in phi[..deg].iter().enumerate() {
            if pj != 0 {
                v[i - deg + j] -= &c * BigInt::from(pj);
            }
        }
    }
    v.resize(deg, BigRational::zero());
    v
}

fn reduce_integer(level: u64, mut v: Vec<i128>) -> Vec<i128> {
    let phi = phi_poly(level);
    let deg = phi.len() - 1;
    for i in (deg..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        v[i] = 0;
        for (j, &pj) in phi[..deg].iter().enumerate() {
            v[i - deg + j] -= c * i128::from(pj);
        }
    }
    v.resize(deg, 0);
    v
}

/// Coefficients at level `N / p` if the element lies in that subfield.
fn descend_once(level: u64, coeffs: &[BigRational], p: u64) -> Option<Vec<BigRational>> {
    let sub = level / p;
    let pu = p as usize;
    if sub.is_multiple_of(p) {
        // same radical: the level-N/p basis is the level-N basis at multiples of p
        if coeffs
            .iter()
            .enumerate()
            .any(|(j, c)| j % pu != 0 && !c.is_zero())
        {
            return None;
        }
        return Some(coeffs.iter().step_by(pu).cloned().collect());
    }
    // zeta_N^j = zeta_{N/p}^{j s} zeta_p^{j t} with s = p^-1 mod N/p; averaging
    // over Gal(N / (N/p)) sends zeta_p^{jt} to 1 if p | j and to -1/(p-1) otherwise
    let s = mod_inverse(p % sub, sub).expect("p is coprime to N/p") as usize;
    let m = sub as usize;
    let off = -BigRational::new(BigInt::one(), BigInt::from(p - 1));
    let mut v = vec![BigRational::zero(); m];
    for (j, c) in coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let e = (j % m) * s % m;
        if j % pu == 0 {
            v[e] += c;
        } else {
            v[e] += c * &off;
        }
    }
    let projected = Cyclotomic {
        level: sub,
        coeffs: reduce_rational(sub, v),
    };
    (projected.embed_unchecked(level).coeffs == coeffs).then_some(projected.coeffs)
}

/// An exact element of `Q(zeta_N)` in canonical form.
///
/// Arithmetic results are stored at the smallest level whose field contains
/// them, so equal values built in different ways have identical coefficient
/// vectors. Only [`Cyclotomic::embed`] and [`Cyclotomic::from_coeffs`] keep a
/// caller-chosen level.
#[derive(Clone)]
pub struct Cyclotomic {
    level: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            level: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_integer(k: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(k.into()))
    }

    /// `zeta_N^(j mod N)`.
    pub fn root(level: u64, j: i64) -> Result<Self> {
        check_level(level)?;
        let e = j.rem_euclid(level as i64) as usize;
        let mut counts = vec![0i128; level as usize];
        counts[e] = 1;
        Ok(Self::from_reduced_integers(
            level,
            reduce_integer(level, counts),
        ))
    }

    /// `sum_j counts[j] * zeta_N^j` for exponents `j < N`.
    ///
    /// This is the accumulation path for enumeration oracles: terms are
    /// tallied by exponent and reduced once.
    pub fn from_power_counts(level: u64, counts: &[i128]) -> Result<Self> {
        check_level(level)?;
        if counts.len() > level as usize {
            return Err(Error::InvalidInput(format!(
                "{} exponent counts given for level {level}",
                counts.len()
            )));
        }
        Ok(Self::from_reduced_integers(
            level,
            reduce_integer(level, counts.to_vec()),
        ))
    }

    fn from_reduced_integers(level: u64, v: Vec<i128>) -> Self {
        Self::canonical(
            level,
            v.into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// Moves a reduced vector down to the smallest level containing it.
    fn canonical(mut level: u64, mut coeffs: Vec<BigRational>) -> Self {
        if coeffs.iter().skip(1).all(Zero::is_zero) {
            coeffs.truncate(1);
            return Cyclotomic { level: 1, coeffs };
        }
        'descend: loop {
            for p in factorize(level).expect("level >= 1").primes() {
                if let Some(c) = descend_once(level, &coeffs, p) {
                    level /= p;
                    coeffs = c;
                    continue 'descend;
                }
            }
            return Cyclotomic { level, coeffs };
        }
    }

    /// Builds from an already-canonical coefficient vector.
    pub fn from_coeffs(level: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        check_level(level)?;
        let phi = euler_phi(level) as usize;
        if coeffs.len() != phi {
            return Err(Error::InvalidInput(format!(
                "level {level} needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Cyclotomic { level, coeffs })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Canonical power-basis coefficients, length `phi(level)`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Integer value, if the element lies in `Z`.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    /// Scatter into a length-`target` exponent vector via `zeta_N -> zeta_M^(M/N)`.
    fn spread(&self, target: u64, conjugate: bool) -> Vec<BigRational> {
        let step = (target / self.level) as usize;
        let m = target as usize;
        let mut v = vec![BigRational::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (j * step) % m;
            let e = if conjugate { (m - e) % m } else { e };
            v[e] += c;
        }
        v
    }

    fn embed_unchecked(&self, target: u64) -> Self {
        if target == self.level {
            return self.clone();
        }
        Cyclotomic {
            level: target,
            coeffs: reduce_rational(target, self.spread(target, false)),
        }
    }

    /// Value-preserving map into `Q(zeta_M)`; `M` must be a multiple of the level.
    pub fn embed(&self, target: u64) -> Result<Self> {
        check_level(target)?;
        if !target.is_multiple_of(self.level) {
            return Err(Error::NotMultiple {
                level: self.level,
                target,
            });
        }
        Ok(self.embed_unchecked(target))
    }

    fn common(a: &Self, b: &Self) -> (u64, Self, Self) {
        let l = lcm(a.level, b.level);
        (l, a.embed_unchecked(l), b.embed_unchecked(l))
    }

    /// Complex conjugation, `zeta_N -> zeta_N^(N-1)`.
    pub fn conj(&self) -> Self {
        if self.level <= 2 {
            return self.clone();
        }
        Self::canonical(
            self.level,
            reduce_rational(self.level, self.spread(self.level, true)),
        )
    }

    /// `a * conj(a)`.
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::canonical(self.level, self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Double-precision value at `zeta_N = exp(2 pi i / N)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.level as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold((0.0, 0.0), |(re, im), (j, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                let theta = 2.0 * PI * j as f64 / n;
                (re + c * theta.cos(), im + c * theta.sin())
            })
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            return self.coeffs == other.coeffs;
        }
        let (_, a, b) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (level, a, b) = Cyclotomic::common(self, rhs);
        Cyclotomic::canonical(
            level,
            a.coeffs
                .into_iter()
                .zip(b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic::canonical(self.level, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        let (level, a, b) = Cyclotomic::common(self, rhs);
        let m = level as usize;
        let mut v = vec![BigRational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                v[(i + j) % m] += x * y;
            }
        }
        Cyclotomic::canonical(level, reduce_rational(level, v))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |acc, x| &acc + &x)
    }
}

impl std::iter::Product for Cyclotomic {
    fn product<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::one(), |acc, x| &acc * &x)
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({self})")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match j {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if j == 1 {
                        write!(f, "z{}", self.level)?;
                    } else {
                        write!(f, "z{}^{j}", self.level)?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn big_number(x: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("integers are valid JSON numbers")
}

#[derive(Serialize, Deserialize)]
struct CyclotomicJson {
    level: u64,
    coeffs: Vec<[serde_json::Number; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    approx: Option<[f64; 2]>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (re, im) = self.to_complex();
        CyclotomicJson {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [big_number(c.numer()), big_number(c.denom())])
                .collect(),
            approx: Some([re, im]),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CyclotomicJson::deserialize(deserializer)?;
        let parse = |x: &serde_json::Number| {
            BigInt::from_str(&x.to_string()).map_err(|e| D::Error::custom(e.to_string()))
        };
        let coeffs = raw
            .coeffs
            .iter()
            .map(|[num, den]| {
                let den = parse(den)?;
                if den.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(parse(num)?, den))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Cyclotomic::from_coeffs(raw.level, coeffs).map_err(|e| D::Error::custom(e.to_string()))
    }
}
