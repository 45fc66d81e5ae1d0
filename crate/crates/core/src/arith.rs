//! Exact arithmetic on orders: prime sets, factored integers, π-parts,
//! multiplicative orders and the closed forms for r-parts of `k^m - 1`,
//! `k^m - (-1)^m` and their running products.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default magnitude bound for trial-division factorization.
pub const DEFAULT_FACTOR_BOUND: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot factor zero")]
    Zero,
    #[error("{n} exceeds the factorization bound {bound}")]
    ExceedsBound { n: u128, bound: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{r} divides {k}: multiplicative order undefined")]
    Divisible { k: i64, r: u64 },
    #[error("{divisor} does not divide {dividend}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("malformed prime list `{0}`")]
    Parse(String),
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
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

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exponent of `p` in `n` (`n > 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Exponent of the prime `p` in `n!` (Legendre).
pub fn factorial_valuation(n: u64, p: u64) -> u32 {
    let mut v = 0u64;
    let mut pk = p;
    while pk <= n {
        v += n / pk;
        match pk.checked_mul(p) {
            Some(next) => pk = next,
            None => break,
        }
    }
    v as u32
}

/// A finite set of primes, kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet(Vec::new())
    }

    /// Builds a prime set, rejecting any composite member.
    pub fn new<I: IntoIterator<Item = u64>>(items: I) -> Result<Self, ArithError> {
        let mut v: Vec<u64> = items.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&p| !is_prime(p)) {
            return Err(ArithError::NotPrime(bad));
        }
        v.sort_unstable();
        v.dedup();
        Ok(PrimeSet(v))
    }

    pub fn singleton(p: u64) -> Result<Self, ArithError> {
        Self::new([p])
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// Membership in the complement π′.
    pub fn complement_contains(&self, p: u64) -> bool {
        is_prime(p) && !self.contains(p)
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn intersection(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.iter().filter(|&p| other.contains(p)).collect())
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut v: Vec<u64> = self.iter().chain(other.iter()).collect();
        v.sort_unstable();
        v.dedup();
        PrimeSet(v)
    }

    pub fn difference(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.iter().filter(|&p| !other.contains(p)).collect())
    }

    pub fn without(&self, p: u64) -> PrimeSet {
        PrimeSet(self.iter().filter(|&x| x != p).collect())
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    /// True when every prime factor of `n` lies in the set.
    pub fn is_pi_number(&self, mut n: u64) -> bool {
        if n == 0 {
            return false;
        }
        for p in self.iter() {
            while n % p == 0 {
                n /= p;
            }
        }
        n == 1
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = ArithError;
    fn try_from(v: Vec<u64>) -> Result<Self, ArithError> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Vec<u64> {
        s.0
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Parses `3,5,7` (braces optional). The empty string is the empty set.
impl FromStr for PrimeSet {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, ArithError> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if body.is_empty() {
            return Ok(PrimeSet::empty());
        }
        let nums = body
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| ArithError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        PrimeSet::new(nums)
    }
}

/// A positive integer held as its prime factorization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredInteger {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: u64, e: u32) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(p, e);
        }
        Ok(FactoredInteger { factors })
    }

    /// Builds from `(prime, exponent)` pairs; zero exponents are dropped and
    /// repeated primes accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self, ArithError> {
        let mut out = FactoredInteger::one();
        for (p, e) in pairs {
            out = out.mul(&FactoredInteger::prime_power(p, e)?);
        }
        Ok(out)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        FactoredInteger { factors }
    }

    pub fn pow(&self, k: u32) -> FactoredInteger {
        if k == 0 {
            return FactoredInteger::one();
        }
        FactoredInteger { factors: self.factors.iter().map(|(&p, &e)| (p, e * k)).collect() }
    }

    pub fn divides(&self, other: &FactoredInteger) -> bool {
        self.factors.iter().all(|(&p, &e)| other.exponent(p) >= e)
    }

    /// Exact quotient `self / divisor`.
    pub fn checked_div(&self, divisor: &FactoredInteger) -> Result<FactoredInteger, ArithError> {
        if !divisor.divides(self) {
            return Err(ArithError::NotDivisible { dividend: self.to_string(), divisor: divisor.to_string() });
        }
        let mut factors = self.factors.clone();
        for (&p, &e) in &divisor.factors {
            let slot = factors.get_mut(&p).expect("checked by divides");
            *slot -= e;
            if *slot == 0 {
                factors.remove(&p);
            }
        }
        Ok(FactoredInteger { factors })
    }

    /// `n_π`: the largest divisor of `n` whose prime divisors lie in π.
    pub fn pi_part(&self, pi: &PrimeSet) -> FactoredInteger {
        FactoredInteger {
            factors: self.factors.iter().filter(|(p, _)| pi.contains(**p)).map(|(&p, &e)| (p, e)).collect(),
        }
    }

    /// `n_{π′}`.
    pub fn pi_prime_part(&self, pi: &PrimeSet) -> FactoredInteger {
        FactoredInteger {
            factors: self.factors.iter().filter(|(p, _)| !pi.contains(**p)).map(|(&p, &e)| (p, e)).collect(),
        }
    }

    /// π(n).
    pub fn spectrum(&self) -> PrimeSet {
        PrimeSet(self.factors.keys().copied().collect())
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (&p, &e) in &self.factors {
            acc *= BigUint::from(p).pow(e);
        }
        acc
    }

    pub fn to_u128(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p as u128)?;
            }
        }
        Some(acc)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_u128().and_then(|v| u64::try_from(v).ok())
    }
}

/// Renders as `2^5·3·5^3`; the empty factorization renders as `1`.
impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FactoredInteger {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, ArithError> {
        let s = s.trim();
        if s == "1" {
            return Ok(FactoredInteger::one());
        }
        let mut pairs = Vec::new();
        for tok in s.split(['·', '*']) {
            let tok = tok.trim();
            let (p, e) = match tok.split_once('^') {
                Some((p, e)) => (p, e),
                None => (tok, "1"),
            };
            let p = p.trim().parse::<u64>().map_err(|_| ArithError::Parse(s.to_string()))?;
            let e = e.trim().parse::<u32>().map_err(|_| ArithError::Parse(s.to_string()))?;
            pairs.push((p, e));
        }
        FactoredInteger::from_pairs(pairs)
    }
}

/// Trial-division factorization under the default bound.
pub fn factor(n: u64) -> Result<FactoredInteger, ArithError> {
    factor_bounded(n as u128, DEFAULT_FACTOR_BOUND)
}

/// Trial-division factorization of `n <= bound`. The remaining cofactor is
/// certified prime by [`is_prime`] as soon as it drops below the square of
/// the current trial divisor or passes the primality test.
pub fn factor_bounded(n: u128, bound: u64) -> Result<FactoredInteger, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    if n > bound as u128 {
        return Err(ArithError::ExceedsBound { n, bound });
    }
    let mut n = n as u64;
    let mut factors = BTreeMap::new();
    for p in [2u64, 3] {
        while n % p == 0 {
            *factors.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut d = 5u64;
    let mut step = 2u64;
    let mut cofactor_prime = n > 1 && is_prime(n);
    while n > 1 && !cofactor_prime && d.saturating_mul(d) <= n {
        if n % d == 0 {
            while n % d == 0 {
                *factors.entry(d).or_insert(0) += 1;
                n /= d;
            }
            cofactor_prime = n > 1 && is_prime(n);
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        *factors.entry(n).or_insert(0) += 1;
    }
    Ok(FactoredInteger { factors })
}

pub fn pi_part(n: &FactoredInteger, pi: &PrimeSet) -> FactoredInteger {
    n.pi_part(pi)
}

pub fn prime_spectrum(n: &FactoredInteger) -> PrimeSet {
    n.spectrum()
}

fn require_odd_prime(r: u64) -> Result<(), ArithError> {
    if r == 2 || !is_prime(r) {
        return Err(ArithError::NotOddPrime(r));
    }
    Ok(())
}

fn residue(k: i64, r: u64) -> u64 {
    k.rem_euclid(r as i64) as u64
}

/// `e(k, r)`: the multiplicative order of `k` modulo the odd prime `r`.
pub fn mult_order(k: i64, r: u64) -> Result<u64, ArithError> {
    require_odd_prime(r)?;
    let k_mod = residue(k, r);
    if k_mod == 0 {
        return Err(ArithError::Divisible { k, r });
    }
    // the order is the least divisor d of r-1 with k^d = 1
    let mut order = r - 1;
    let group = factor(r - 1)?;
    for (p, e) in group.factors() {
        for _ in 0..e {
            if order % p == 0 && pow_mod(k_mod, order / p, r) == 1 {
                order /= p;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// The parity-adjusted order: `2e` for odd `e`, `e` for `e ≡ 0 (mod 4)`,
/// `e/2` for `e ≡ 2 (mod 4)`.
pub fn e_star(e: u64) -> u64 {
    assert!(e >= 1, "e_star is defined for positive integers");
    match e % 4 {
        0 => e,
        2 => e / 2,
        _ => 2 * e,
    }
}

/// `v_r(k^e - sign)` for `sign ∈ {1, -1}`, computed modulo growing powers of `r`.
fn valuation_pow_offset(k: i64, e: u64, sign: i64, r: u64) -> u32 {
    let base = residue(k, r);
    let target = residue(sign, r);
    if pow_mod(base, e, r) != target {
        return 0;
    }
    let mut v = 1u32;
    let mut modulus = r;
    loop {
        let next = match modulus.checked_mul(r) {
            Some(m) if m <= u64::MAX / 2 => m,
            _ => return v + big_valuation_tail(k, e, sign, r, v),
        };
        let b = residue(k, next);
        if pow_mod(b, e, next) != residue(sign, next) {
            return v;
        }
        v += 1;
        modulus = next;
    }
}

// Falls back to big integers once r^v no longer fits a machine word.
fn big_valuation_tail(k: i64, e: u64, sign: i64, r: u64, known: u32) -> u32 {
    let kk = BigUint::from(k.unsigned_abs());
    let mut value = kk.pow(e as u32);
    let negative_power = k < 0 && e % 2 == 1;
    // value = |k|^e ; we need |k^e - sign|
    let sign_pos = sign > 0;
    value = match (negative_power, sign_pos) {
        (false, true) => value - 1u32,
        (false, false) => value + 1u32,
        (true, true) => value + 1u32,
        (true, false) => value - 1u32,
    };
    let rr = BigUint::from(r);
    let mut v = 0u32;
    while (&value % &rr) == BigUint::from(0u32) {
        value /= &rr;
        v += 1;
    }
    v - known
}

fn r_power(r: u64, v: u32) -> FactoredInteger {
    FactoredInteger::prime_power(r, v).expect("r is prime")
}

fn check_rk(k: i64, r: u64) -> Result<u64, ArithError> {
    mult_order(k, r)
}

/// `(k^m - 1)_r`.
pub fn r_part_pow_minus_one(k: i64, m: u64, r: u64) -> Result<FactoredInteger, ArithError> {
    let e = check_rk(k, r)?;
    if m == 0 || m % e != 0 {
        return Ok(FactoredInteger::one());
    }
    let v = valuation_pow_offset(k, e, 1, r) + valuation(m / e, r);
    Ok(r_power(r, v))
}

/// `(k^m - (-1)^m)_r`.
pub fn r_part_pow_alt(k: i64, m: u64, r: u64) -> Result<FactoredInteger, ArithError> {
    let es = e_star(check_rk(k, r)?);
    if m == 0 || m % es != 0 {
        return Ok(FactoredInteger::one());
    }
    let sign = if es % 2 == 0 { 1 } else { -1 };
    let v = valuation_pow_offset(k, es, sign, r) + valuation(m / es, r);
    Ok(r_power(r, v))
}

/// `∏_{i=1}^{m} (k^i - 1)_r`.
pub fn r_part_product(k: i64, m: u64, r: u64) -> Result<FactoredInteger, ArithError> {
    let e = check_rk(k, r)?;
    let blocks = m / e;
    let per_block = valuation_pow_offset(k, e, 1, r);
    Ok(r_power(r, per_block * blocks as u32 + factorial_valuation(blocks, r)))
}

/// `∏_{i=1}^{m} (k^i - (-1)^i)_r`.
pub fn r_part_product_alt(k: i64, m: u64, r: u64) -> Result<FactoredInteger, ArithError> {
    let es = e_star(check_rk(k, r)?);
    let blocks = m / es;
    let sign = if es % 2 == 0 { 1 } else { -1 };
    let per_block = valuation_pow_offset(k, es, sign, r);
    Ok(r_power(r, per_block * blocks as u32 + factorial_valuation(blocks, r)))
}

/// All primes up to `limit` (inclusive).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}
