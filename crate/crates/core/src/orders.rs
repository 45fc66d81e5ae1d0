//! Group orders in factored form: GLₙ^η(q) and its relatives, all finite
//! simple groups of Lie type, alternating and sporadic groups, Weyl group
//! orders and the inner-diagonal quotient |Ŝ/S|.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, factor_bounded, gcd, ArithError, FactoredInteger, PrimeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{family} needs rank {expected}, got {got}")]
    Rank { family: Family, expected: String, got: u32 },
    #[error("{0}")]
    Field(String),
    #[error("{group} is not simple: {reason}")]
    NotSimple { group: String, reason: String },
    #[error("q = {p}^{m} does not fit in 64 bits")]
    FieldTooLarge { p: u64, m: u32 },
    #[error("unknown group descriptor `{0}`")]
    Parse(String),
}

/// Sign η: `+` for untwisted, `-` for twisted (unitary) forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, OrderError> {
        match s.trim() {
            "+" | "plus" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(OrderError::Parse(other.to_string())),
        }
    }
}

/// Lie-type families; twisted families carry their twist order in the name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    TwistedA,
    B,
    C,
    D,
    TwistedD,
    TrialityD4,
    G2,
    F4,
    E6,
    TwistedE6,
    E7,
    E8,
    Suzuki,
    Ree,
    ReeF4,
}

impl Family {
    pub const ALL: [Family; 16] = [
        Family::A,
        Family::TwistedA,
        Family::B,
        Family::C,
        Family::D,
        Family::TwistedD,
        Family::TrialityD4,
        Family::G2,
        Family::F4,
        Family::E6,
        Family::TwistedE6,
        Family::E7,
        Family::E8,
        Family::Suzuki,
        Family::Ree,
        Family::ReeF4,
    ];

    /// The rank for exceptional families, `None` for classical ones.
    pub fn fixed_rank(self) -> Option<u32> {
        use Family::*;
        match self {
            TrialityD4 => Some(4),
            G2 | Suzuki | Ree => Some(2),
            F4 | ReeF4 => Some(4),
            E6 | TwistedE6 => Some(6),
            E7 => Some(7),
            E8 => Some(8),
            _ => None,
        }
    }

    pub fn min_rank(self) -> u32 {
        use Family::*;
        match self {
            A => 1,
            TwistedA | B | C => 2,
            D | TwistedD => 4,
            other => other.fixed_rank().unwrap(),
        }
    }

    pub fn is_classical(self) -> bool {
        self.fixed_rank().is_none()
    }

    /// ²B₂, ²G₂ and ²F₄: the families handled by the cyclotomic-set criterion.
    pub fn is_suzuki_ree(self) -> bool {
        matches!(self, Family::Suzuki | Family::Ree | Family::ReeF4)
    }

    pub fn is_twisted(self) -> bool {
        use Family::*;
        matches!(self, TwistedA | TwistedD | TrialityD4 | TwistedE6 | Suzuki | Ree | ReeF4)
    }

    /// Prefix used in names, e.g. `2A`, `3D`.
    fn symbol(self) -> &'static str {
        use Family::*;
        match self {
            A => "A",
            TwistedA => "2A",
            B => "B",
            C => "C",
            D => "D",
            TwistedD => "2D",
            TrialityD4 => "3D",
            G2 => "G",
            F4 => "F",
            E6 | E7 | E8 => "E",
            TwistedE6 => "2E",
            Suzuki => "2B",
            Ree => "2G",
            ReeF4 => "2F",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fixed_rank() {
            Some(l) => write!(f, "{}{}", self.symbol(), l),
            None => f.write_str(self.symbol()),
        }
    }
}

impl FromStr for Family {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, OrderError> {
        use Family::*;
        let norm: String = s.trim().chars().filter(|c| !matches!(c, '^' | '_' | ' ')).collect();
        let fam = match norm.to_ascii_uppercase().as_str() {
            "A" => A,
            "2A" => TwistedA,
            "B" => B,
            "C" => C,
            "D" => D,
            "2D" => TwistedD,
            "3D4" | "3D" => TrialityD4,
            "G2" | "G" => G2,
            "F4" | "F" => F4,
            "E6" => E6,
            "2E6" => TwistedE6,
            "E7" => E7,
            "E8" => E8,
            "2B2" | "SZ" => Suzuki,
            "2G2" => Ree,
            "2F4" => ReeF4,
            _ => return Err(OrderError::Parse(s.to_string())),
        };
        Ok(fam)
    }
}

fn checked_q(p: u64, m: u32) -> Result<u64, OrderError> {
    p.checked_pow(m).ok_or(OrderError::FieldTooLarge { p, m })
}

/// Splits a prime power into `(p, m)`.
pub fn prime_power_parts(q: u64) -> Result<(u64, u32), OrderError> {
    let f = arith::factor(q)?;
    let mut it = f.factors();
    match (it.next(), it.next()) {
        (Some((p, m)), None) => Ok((p, m)),
        _ => Err(OrderError::Field(format!("{q} is not a prime power"))),
    }
}

/// A finite simple group of Lie type over F_q with q = pᵐ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimpleGroupSpec {
    family: Family,
    rank: u32,
    p: u64,
    m: u32,
}

impl SimpleGroupSpec {
    /// Validates family rank bounds, Suzuki/Ree field shapes and the small
    /// non-simple cases.
    pub fn new(family: Family, rank: u32, p: u64, m: u32) -> Result<Self, OrderError> {
        if !arith::is_prime(p) {
            return Err(ArithError::NotPrime(p).into());
        }
        if m == 0 {
            return Err(OrderError::Field("field degree m must be positive".into()));
        }
        let q = checked_q(p, m)?;
        if let Some(fixed) = family.fixed_rank() {
            if rank != fixed {
                return Err(OrderError::Rank { family, expected: fixed.to_string(), got: rank });
            }
        } else if rank < family.min_rank() {
            return Err(OrderError::Rank {
                family,
                expected: format!(">= {}{}", family.min_rank(), low_rank_note(family, rank)),
                got: rank,
            });
        }
        let spec = SimpleGroupSpec { family, rank, p, m };
        match family {
            Family::Suzuki | Family::ReeF4 if p != 2 || m % 2 == 0 => {
                return Err(OrderError::Field(format!("{family} needs q = 2^(2k+1), got {q}")))
            }
            Family::Ree if p != 3 || m % 2 == 0 => {
                return Err(OrderError::Field(format!("{family} needs q = 3^(2k+1), got {q}")))
            }
            _ => {}
        }
        if let Some(reason) = non_simple_reason(family, rank, q) {
            return Err(OrderError::NotSimple { group: spec.to_string(), reason: reason.into() });
        }
        Ok(spec)
    }

    pub fn with_q(family: Family, rank: u32, q: u64) -> Result<Self, OrderError> {
        let (p, m) = prime_power_parts(q)?;
        Self::new(family, rank, p, m)
    }

    /// Exceptional family with its fixed rank.
    pub fn exceptional(family: Family, q: u64) -> Result<Self, OrderError> {
        let rank = family.fixed_rank().ok_or_else(|| OrderError::Rank {
            family,
            expected: "an explicit rank".into(),
            got: 0,
        })?;
        Self::with_q(family, rank, q)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The Lie rank `l`.
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// Dimension parameter `n` in the classical notation: `n = l + 1` for
    /// `A_{n-1}` and `²A_{n-1}`, `n = l` otherwise.
    pub fn n(&self) -> u32 {
        match self.family {
            Family::A | Family::TwistedA => self.rank + 1,
            _ => self.rank,
        }
    }

    /// Known exceptional isomorphisms for small parameters.
    pub fn isomorphism_note(&self) -> Option<&'static str> {
        use Family::*;
        match (self.family, self.rank, self.q()) {
            (A, 1, 4) | (A, 1, 5) => Some("A1(4) ≅ A1(5) ≅ Alt(5)"),
            (A, 1, 7) | (A, 2, 2) => Some("A1(7) ≅ A2(2)"),
            (A, 1, 9) => Some("A1(9) ≅ Alt(6)"),
            (A, 3, 2) => Some("A3(2) ≅ Alt(8)"),
            (TwistedA, 3, 2) | (B, 2, 3) | (C, 2, 3) => Some("2A3(2) ≅ B2(3)"),
            (B, _, q) | (C, _, q) if q % 2 == 0 => Some("B_l(2^k) ≅ C_l(2^k)"),
            _ => None,
        }
    }
}

fn low_rank_note(family: Family, rank: u32) -> &'static str {
    match (family, rank) {
        (Family::D, 3) | (Family::TwistedD, 3) => " (PΩ±6(q) ≅ PSL±4(q): use A3 / 2A3)",
        (Family::B, 1) | (Family::C, 1) => " (B1 ≅ C1 ≅ A1)",
        (Family::TwistedA, 1) => " (2A1(q) ≅ A1(q))",
        _ => "",
    }
}

fn non_simple_reason(family: Family, rank: u32, q: u64) -> Option<&'static str> {
    use Family::*;
    match (family, rank, q) {
        (A, 1, 2) => Some("A1(2) ≅ Sym(3)"),
        (A, 1, 3) => Some("A1(3) ≅ Alt(4)"),
        (TwistedA, 2, 2) => Some("2A2(2) is solvable of order 72"),
        (B, 2, 2) | (C, 2, 2) => Some("B2(2) ≅ Sym(6); its derived subgroup is Alt(6) ≅ A1(9)"),
        (G2, _, 2) => Some("G2(2)' ≅ 2A2(3) has index 2"),
        (Suzuki, _, 2) => Some("2B2(2) is a Frobenius group of order 20"),
        (Ree, _, 3) => Some("2G2(3) ≅ PΓL2(8); its derived subgroup is A1(8)"),
        (ReeF4, _, 2) => Some("2F4(2) has the Tits group 2F4(2)' as index-2 subgroup"),
        _ => None,
    }
}

impl fmt::Display for SimpleGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.fixed_rank().is_some() {
            write!(f, "{}({})", self.family, self.q())
        } else {
            write!(f, "{}{}({})", self.family, self.rank, self.q())
        }
    }
}

/// Parses `A1(7)`, `2A2(4)`, `3D4(2)`, `E6(3)`, `2B2(8)`.
impl FromStr for SimpleGroupSpec {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, OrderError> {
        let s = s.trim();
        let (head, rest) = s.split_once('(').ok_or_else(|| OrderError::Parse(s.to_string()))?;
        let q: u64 = rest
            .strip_suffix(')')
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| OrderError::Parse(s.to_string()))?;
        let head = head.trim();
        if let Ok(fam) = head.parse::<Family>() {
            if fam.fixed_rank().is_some() {
                return Self::exceptional(fam, q);
            }
        }
        let split = head.rfind(|c: char| !c.is_ascii_digit()).map(|i| i + 1).unwrap_or(0);
        let (fam, rank) = head.split_at(split);
        let fam: Family = fam.parse()?;
        let rank: u32 = rank.parse().map_err(|_| OrderError::Parse(s.to_string()))?;
        Self::with_q(fam, rank, q)
    }
}

/// GLₙ^η(q): GLₙ(q) for η = +, GUₙ(q) for η = −.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GLSpec {
    pub n: u32,
    pub eta: Sign,
    pub p: u64,
    pub m: u32,
}

impl GLSpec {
    pub fn new(n: u32, eta: Sign, q: u64) -> Result<Self, OrderError> {
        if n == 0 {
            return Err(OrderError::Rank { family: Family::A, expected: ">= 1".into(), got: 0 });
        }
        let (p, m) = prime_power_parts(q)?;
        Ok(GLSpec { n, eta, p, m })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// `q - η`, as an integer.
    pub fn q_minus_eta(&self) -> u64 {
        match self.eta {
            Sign::Plus => self.q() - 1,
            Sign::Minus => self.q() + 1,
        }
    }

    /// The simple section PSLₙ^η(q), when it is simple.
    pub fn simple_section(&self) -> Result<SimpleGroupSpec, OrderError> {
        let fam = match self.eta {
            Sign::Plus => Family::A,
            Sign::Minus => Family::TwistedA,
        };
        SimpleGroupSpec::new(fam, self.n.saturating_sub(1), self.p, self.m)
    }
}

impl fmt::Display for GLSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.eta {
            Sign::Plus => "GL",
            Sign::Minus => "GU",
        };
        write!(f, "{name}{}({})", self.n, self.q())
    }
}

/// Factorizes numbers of the form `q^i ± 1` through cyclotomic values,
/// caching each `Φ_d(q)` so every piece is factored once.
pub struct CyclotomicFactorizer {
    q: u64,
    bound: u64,
    cache: HashMap<u64, FactoredInteger>,
}

impl CyclotomicFactorizer {
    pub fn new(q: u64) -> Self {
        Self::with_bound(q, arith::DEFAULT_FACTOR_BOUND)
    }

    pub fn with_bound(q: u64, bound: u64) -> Self {
        CyclotomicFactorizer { q, bound, cache: HashMap::new() }
    }

    fn phi(&mut self, d: u64) -> Result<FactoredInteger, OrderError> {
        if let Some(f) = self.cache.get(&d) {
            return Ok(f.clone());
        }
        let value = cyclotomic_value(d, self.q);
        let f = if value.is_one() {
            FactoredInteger::one()
        } else {
            let v = value.to_u128().filter(|&v| v <= self.bound as u128).ok_or_else(|| {
                OrderError::Arith(ArithError::ExceedsBound {
                    n: value.to_u128().unwrap_or(u128::MAX),
                    bound: self.bound,
                })
            })?;
            factor_bounded(v, self.bound)?
        };
        self.cache.insert(d, f.clone());
        Ok(f)
    }

    /// `q^i - 1`.
    pub fn pow_minus_one(&mut self, i: u64) -> Result<FactoredInteger, OrderError> {
        let mut acc = FactoredInteger::one();
        for d in divisors(i) {
            acc = acc.mul(&self.phi(d)?);
        }
        Ok(acc)
    }

    /// `q^i + 1`.
    pub fn pow_plus_one(&mut self, i: u64) -> Result<FactoredInteger, OrderError> {
        let mut acc = FactoredInteger::one();
        for d in divisors(2 * i) {
            if i % d != 0 {
                acc = acc.mul(&self.phi(d)?);
            }
        }
        Ok(acc)
    }

    /// `q^i - η^i`.
    pub fn pow_minus_eta(&mut self, i: u64, eta: Sign) -> Result<FactoredInteger, OrderError> {
        match eta {
            Sign::Plus => self.pow_minus_one(i),
            Sign::Minus if i % 2 == 0 => self.pow_minus_one(i),
            Sign::Minus => self.pow_plus_one(i),
        }
    }

    /// `q^k` as a factored integer.
    pub fn q_power(&self, k: u64) -> FactoredInteger {
        arith::factor(self.q).expect("q >= 2").pow(k as u32)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn mobius(n: u64) -> i32 {
    let f = arith::factor(n).expect("n >= 1");
    if f.factors().any(|(_, e)| e > 1) {
        0
    } else if f.factors().count() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Φ_d(q)` via `∏_{e|d} (q^e - 1)^{μ(d/e)}`.
pub fn cyclotomic_value(d: u64, q: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let qb = BigUint::from(q);
    for e in divisors(d) {
        let term = qb.pow(e as u32) - 1u32;
        match mobius(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    if den.is_zero() {
        return BigUint::zero();
    }
    num / den
}

fn gcd_factored(a: u64, b: u64) -> FactoredInteger {
    arith::factor(gcd(a, b).max(1)).expect("positive")
}

/// |GLₙ^η(q)| = q^{n(n-1)/2} ∏_{i=1}^{n} (qⁱ - ηⁱ).
pub fn gl_order(gl: &GLSpec) -> Result<FactoredInteger, OrderError> {
    let mut cf = CyclotomicFactorizer::new(gl.q());
    let n = gl.n as u64;
    let mut acc = cf.q_power(n * (n - 1) / 2);
    for i in 1..=n {
        acc = acc.mul(&cf.pow_minus_eta(i, gl.eta)?);
    }
    Ok(acc)
}

/// |SLₙ^η(q)| = |GLₙ^η(q)| / (q - η).
pub fn sl_order(gl: &GLSpec) -> Result<FactoredInteger, OrderError> {
    let q_eta = arith::factor(gl.q_minus_eta())?;
    Ok(gl_order(gl)?.checked_div(&q_eta)?)
}

/// |PSLₙ^η(q)| = |SLₙ^η(q)| / gcd(n, q - η).
pub fn psl_order(gl: &GLSpec) -> Result<FactoredInteger, OrderError> {
    Ok(sl_order(gl)?.checked_div(&gcd_factored(gl.n as u64, gl.q_minus_eta()))?)
}

/// Order of a finite simple group of Lie type.
pub fn simple_order(spec: &SimpleGroupSpec) -> Result<FactoredInteger, OrderError> {
    use Family::*;
    let q = spec.q();
    let l = spec.rank as u64;
    let mut cf = CyclotomicFactorizer::new(q);
    let minus = |cf: &mut CyclotomicFactorizer, xs: &[u64]| -> Result<FactoredInteger, OrderError> {
        let mut acc = FactoredInteger::one();
        for &i in xs {
            acc = acc.mul(&cf.pow_minus_one(i)?);
        }
        Ok(acc)
    };
    let order = match spec.family {
        A => {
            let gl = GLSpec { n: spec.rank + 1, eta: Sign::Plus, p: spec.p, m: spec.m };
            psl_order(&gl)?
        }
        TwistedA => {
            let gl = GLSpec { n: spec.rank + 1, eta: Sign::Minus, p: spec.p, m: spec.m };
            psl_order(&gl)?
        }
        B | C => {
            let evens: Vec<u64> = (1..=l).map(|i| 2 * i).collect();
            cf.q_power(l * l).mul(&minus(&mut cf, &evens)?).checked_div(&gcd_factored(2, q - 1))?
        }
        D | TwistedD => {
            let evens: Vec<u64> = (1..l).map(|i| 2 * i).collect();
            let middle = if spec.family == D { cf.pow_minus_one(l)? } else { cf.pow_plus_one(l)? };
            cf.q_power(l * (l - 1))
                .mul(&middle)
                .mul(&minus(&mut cf, &evens)?)
                .checked_div(&arith::factor(outdiag_order(spec))?)?
        }
        TrialityD4 => {
            // q^8 + q^4 + 1 = (q^12 - 1) / (q^4 - 1)
            let tri = cf.pow_minus_one(12)?.checked_div(&cf.pow_minus_one(4)?)?;
            cf.q_power(12).mul(&tri).mul(&minus(&mut cf, &[6, 2])?)
        }
        G2 => cf.q_power(6).mul(&minus(&mut cf, &[6, 2])?),
        F4 => cf.q_power(24).mul(&minus(&mut cf, &[12, 8, 6, 2])?),
        E6 => cf.q_power(36).mul(&minus(&mut cf, &[12, 9, 8, 6, 5, 2])?).checked_div(&gcd_factored(3, q - 1))?,
        TwistedE6 => cf
            .q_power(36)
            .mul(&minus(&mut cf, &[12, 8, 6, 2])?)
            .mul(&cf.pow_plus_one(9)?)
            .mul(&cf.pow_plus_one(5)?)
            .checked_div(&gcd_factored(3, q + 1))?,
        E7 => cf.q_power(63).mul(&minus(&mut cf, &[2, 6, 8, 10, 12, 14, 18])?).checked_div(&gcd_factored(2, q - 1))?,
        E8 => cf.q_power(120).mul(&minus(&mut cf, &[2, 8, 12, 14, 18, 20, 24, 30])?),
        Suzuki => cf.q_power(2).mul(&cf.pow_plus_one(2)?).mul(&cf.pow_minus_one(1)?),
        Ree => cf.q_power(3).mul(&cf.pow_plus_one(3)?).mul(&cf.pow_minus_one(1)?),
        ReeF4 => cf
            .q_power(12)
            .mul(&cf.pow_plus_one(6)?)
            .mul(&cf.pow_minus_one(4)?)
            .mul(&cf.pow_plus_one(3)?)
            .mul(&cf.pow_minus_one(1)?),
    };
    Ok(order)
}

fn factorial_factored(n: u64) -> FactoredInteger {
    let mut acc = FactoredInteger::one();
    for i in 2..=n {
        acc = acc.mul(&arith::factor(i).expect("positive"));
    }
    acc
}

/// |W| of the Weyl group; twisted families use the ambient untwisted type
/// (A_l for ²A_l, D_l for ²D_l, D₄ for ³D₄, E₆ for ²E₆, B₂ for ²B₂, G₂ for
/// ²G₂, F₄ for ²F₄).
pub fn weyl_order(spec: &SimpleGroupSpec) -> FactoredInteger {
    use Family::*;
    let l = spec.rank as u64;
    let fixed = |v: u64| arith::factor(v).expect("positive");
    match spec.family {
        A | TwistedA => factorial_factored(l + 1),
        B | C | Suzuki => fixed(2).pow(l as u32).mul(&factorial_factored(l)),
        D | TwistedD | TrialityD4 => fixed(2).pow(l as u32 - 1).mul(&factorial_factored(l)),
        G2 | Ree => fixed(12),
        F4 | ReeF4 => fixed(1152),
        E6 | TwistedE6 => fixed(51_840),
        E7 => fixed(2_903_040),
        E8 => fixed(696_729_600),
    }
}

/// |Ŝ/S|, the order of the group of diagonal automorphisms modulo inner ones.
pub fn outdiag_order(spec: &SimpleGroupSpec) -> u64 {
    use Family::*;
    let q = spec.q();
    let l = spec.rank as u64;
    match spec.family {
        A => gcd(l + 1, q - 1),
        TwistedA => gcd(l + 1, q + 1),
        B | C | E7 => gcd(2, q - 1),
        D => gcd(4, pow_mod_plus(q, l, 4, -1)),
        TwistedD => gcd(4, pow_mod_plus(q, l, 4, 1)),
        E6 => gcd(3, q - 1),
        TwistedE6 => gcd(3, q + 1),
        E8 | F4 | G2 | TrialityD4 | Suzuki | Ree | ReeF4 => 1,
    }
}

// (q^l + offset) mod modulus, with the zero residue mapped to `modulus` so the
// gcd with `modulus` is taken against the true divisibility.
fn pow_mod_plus(q: u64, l: u64, modulus: u64, offset: i64) -> u64 {
    let r = (arith::pow_mod(q, l, modulus) as i64 + offset).rem_euclid(modulus as i64) as u64;
    if r == 0 {
        modulus
    } else {
        r
    }
}

/// The 26 sporadic simple groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sporadic {
    M11,
    M12,
    J1,
    M22,
    J2,
    M23,
    HS,
    J3,
    M24,
    McL,
    He,
    Ru,
    Suz,
    ON,
    Co3,
    Co2,
    Fi22,
    HN,
    Ly,
    Th,
    Fi23,
    Co1,
    J4,
    Fi24,
    B,
    M,
}

impl Sporadic {
    pub const ALL: [Sporadic; 26] = {
        use Sporadic::*;
        [
            M11, M12, J1, M22, J2, M23, HS, J3, M24, McL, He, Ru, Suz, ON, Co3, Co2, Fi22, HN, Ly, Th, Fi23, Co1, J4,
            Fi24, B, M,
        ]
    };

    pub fn name(self) -> &'static str {
        use Sporadic::*;
        match self {
            M11 => "M11",
            M12 => "M12",
            J1 => "J1",
            M22 => "M22",
            J2 => "J2",
            M23 => "M23",
            HS => "HS",
            J3 => "J3",
            M24 => "M24",
            McL => "McL",
            He => "He",
            Ru => "Ru",
            Suz => "Suz",
            ON => "O'N",
            Co3 => "Co3",
            Co2 => "Co2",
            Fi22 => "Fi22",
            HN => "HN",
            Ly => "Ly",
            Th => "Th",
            Fi23 => "Fi23",
            Co1 => "Co1",
            J4 => "J4",
            Fi24 => "Fi24'",
            B => "B",
            M => "M",
        }
    }

    fn exponents(self) -> &'static [(u64, u32)] {
        use Sporadic::*;
        match self {
            M11 => &[(2, 4), (3, 2), (5, 1), (11, 1)],
            M12 => &[(2, 6), (3, 3), (5, 1), (11, 1)],
            J1 => &[(2, 3), (3, 1), (5, 1), (7, 1), (11, 1), (19, 1)],
            M22 => &[(2, 7), (3, 2), (5, 1), (7, 1), (11, 1)],
            J2 => &[(2, 7), (3, 3), (5, 2), (7, 1)],
            M23 => &[(2, 7), (3, 2), (5, 1), (7, 1), (11, 1), (23, 1)],
            HS => &[(2, 9), (3, 2), (5, 3), (7, 1), (11, 1)],
            J3 => &[(2, 7), (3, 5), (5, 1), (17, 1), (19, 1)],
            M24 => &[(2, 10), (3, 3), (5, 1), (7, 1), (11, 1), (23, 1)],
            McL => &[(2, 7), (3, 6), (5, 3), (7, 1), (11, 1)],
            He => &[(2, 10), (3, 3), (5, 2), (7, 3), (17, 1)],
            Ru => &[(2, 14), (3, 3), (5, 3), (7, 1), (13, 1), (29, 1)],
            Suz => &[(2, 13), (3, 7), (5, 2), (7, 1), (11, 1), (13, 1)],
            ON => &[(2, 9), (3, 4), (5, 1), (7, 3), (11, 1), (19, 1), (31, 1)],
            Co3 => &[(2, 10), (3, 7), (5, 3), (7, 1), (11, 1), (23, 1)],
            Co2 => &[(2, 18), (3, 6), (5, 3), (7, 1), (11, 1), (23, 1)],
            Fi22 => &[(2, 17), (3, 9), (5, 2), (7, 1), (11, 1), (13, 1)],
            HN => &[(2, 14), (3, 6), (5, 6), (7, 1), (11, 1), (19, 1)],
            Ly => &[(2, 8), (3, 7), (5, 6), (7, 1), (11, 1), (31, 1), (37, 1), (67, 1)],
            Th => &[(2, 15), (3, 10), (5, 3), (7, 2), (13, 1), (19, 1), (31, 1)],
            Fi23 => &[(2, 18), (3, 13), (5, 2), (7, 1), (11, 1), (13, 1), (17, 1), (23, 1)],
            Co1 => &[(2, 21), (3, 9), (5, 4), (7, 2), (11, 1), (13, 1), (23, 1)],
            J4 => &[(2, 21), (3, 3), (5, 1), (7, 1), (11, 3), (23, 1), (29, 1), (31, 1), (37, 1), (43, 1)],
            Fi24 => &[(2, 21), (3, 16), (5, 2), (7, 3), (11, 1), (13, 1), (17, 1), (23, 1), (29, 1)],
            B => &[(2, 41), (3, 13), (5, 6), (7, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (31, 1), (47, 1)],
            M => &[
                (2, 46),
                (3, 20),
                (5, 9),
                (7, 6),
                (11, 2),
                (13, 3),
                (17, 1),
                (19, 1),
                (23, 1),
                (29, 1),
                (31, 1),
                (41, 1),
                (47, 1),
                (59, 1),
                (71, 1),
            ],
        }
    }

    pub fn order(self) -> FactoredInteger {
        FactoredInteger::from_pairs(self.exponents().iter().copied()).expect("table primes")
    }
}

impl FromStr for Sporadic {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, OrderError> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_uppercase();
        Sporadic::ALL
            .into_iter()
            .find(|g| {
                let name: String = g.name().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
                name.to_ascii_uppercase() == key
            })
            .ok_or_else(|| OrderError::Parse(s.to_string()))
    }
}

/// Any nonabelian finite simple group the classifier can be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimpleGroup {
    Lie(SimpleGroupSpec),
    Alternating(u32),
    Sporadic(Sporadic),
    /// Cyclic group of prime order (an abelian composition factor).
    Cyclic(u64),
}

impl SimpleGroup {
    pub fn alternating(n: u32) -> Result<Self, OrderError> {
        if n < 5 {
            return Err(OrderError::NotSimple { group: format!("Alt({n})"), reason: "n < 5".into() });
        }
        Ok(SimpleGroup::Alternating(n))
    }

    pub fn cyclic(p: u64) -> Result<Self, OrderError> {
        if !arith::is_prime(p) {
            return Err(ArithError::NotPrime(p).into());
        }
        Ok(SimpleGroup::Cyclic(p))
    }

    pub fn order(&self) -> Result<FactoredInteger, OrderError> {
        match self {
            SimpleGroup::Lie(spec) => simple_order(spec),
            SimpleGroup::Alternating(n) => Ok(factorial_factored(*n as u64).checked_div(&arith::factor(2)?)?),
            SimpleGroup::Sporadic(g) => Ok(g.order()),
            SimpleGroup::Cyclic(p) => Ok(FactoredInteger::prime_power(*p, 1)?),
        }
    }
}

impl fmt::Display for SimpleGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleGroup::Lie(s) => write!(f, "{s}"),
            SimpleGroup::Alternating(n) => write!(f, "Alt({n})"),
            SimpleGroup::Sporadic(g) => f.write_str(g.name()),
            SimpleGroup::Cyclic(p) => write!(f, "C{p}"),
        }
    }
}

/// Parses `Alt(7)`, `C3`, a sporadic name, or a Lie-type descriptor.
impl FromStr for SimpleGroup {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, OrderError> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("Alt(").and_then(|x| x.strip_suffix(')')) {
            let n = inner.trim().parse().map_err(|_| OrderError::Parse(s.to_string()))?;
            return SimpleGroup::alternating(n);
        }
        if let Some(p) = t.strip_prefix('C').and_then(|x| x.parse::<u64>().ok()) {
            return SimpleGroup::cyclic(p);
        }
        if let Ok(g) = t.parse::<Sporadic>() {
            return Ok(SimpleGroup::Sporadic(g));
        }
        t.parse::<SimpleGroupSpec>().map(SimpleGroup::Lie)
    }
}

/// π(S) for a Lie-type spec.
pub fn prime_spectrum_of_group(spec: &SimpleGroupSpec) -> Result<PrimeSet, OrderError> {
    Ok(simple_order(spec)?.spectrum())
}
