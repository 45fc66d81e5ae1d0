//! Explicit π-Hall subgroups of GLₙ^η(q) over small fields, and the
//! constructive witnesses showing that they are not dominant.
//!
//! Fields are stored by Zech logarithms: an element is `0` for zero and
//! `i + 1` for `α^i`, where `α` is the class of `x` modulo the
//! lexicographically first primitive polynomial of the requested degree.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, FactoredInteger, PrimeSet};
use crate::classifier::{gl_hall_pi_order, gl_regime, ClassifyError, GlRegime};
use crate::orders::{GLSpec, OrderError, Sign};

/// Largest field this module will tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlHallError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("field of order {p}^{k} is too large to tabulate")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("polynomial {0} is not primitive")]
    NotPrimitive(String),
    #[error("τ = {tau} is not contained in π({value})")]
    TauNotDividing { tau: String, value: u64 },
    #[error("{0}")]
    Regime(String),
    #[error("no unitary element of order {0} found")]
    NoUnitaryElement(u64),
    #[error("certificate line {line}: {msg}")]
    Certificate { line: usize, msg: String },
}

type Result<T> = std::result::Result<T, GlHallError>;

/// The field `F_{p^k}`.
#[derive(Debug, Clone)]
pub struct Field {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
    units: u64,
    exp_poly: Vec<u64>,
    poly_rep: Vec<u32>,
    zech: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn digits(mut c: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn encode(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Powers of `x` modulo a monic polynomial, as encodings; `None` unless `x`
/// has multiplicative order exactly `p^k − 1`.
fn powers_of_x(p: u64, modulus: &[u64]) -> Option<Vec<u64>> {
    let k = modulus.len() - 1;
    let units = p.pow(k as u32) - 1;
    let mut cur = vec![0u64; k];
    cur[0] = 1;
    let mut out = Vec::with_capacity(units as usize);
    for i in 0..units {
        let e = encode(&cur, p);
        if e == 1 && i > 0 {
            return None;
        }
        out.push(e);
        let carry = cur[k - 1];
        for j in (1..k).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        for j in 0..k {
            cur[j] = (cur[j] + (p - carry) * modulus[j]) % p;
        }
    }
    (encode(&cur, p) == 1).then_some(out)
}

impl Field {
    /// `F_{p^k}` built on the first primitive polynomial, ordering monic
    /// polynomials by their lower coefficients read as a base-`p` number.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !arith::is_prime(p) || k == 0 {
            return Err(GlHallError::Order(OrderError::Field(format!("{p}^{k} is not a prime power"))));
        }
        let size = p.checked_pow(k).filter(|&s| s <= MAX_FIELD_ORDER).ok_or(GlHallError::FieldTooLarge { p, k })?;
        for c in 1..size {
            if c % p == 0 {
                continue;
            }
            let mut modulus = digits(c, p, k);
            modulus.push(1);
            if let Some(exp) = powers_of_x(p, &modulus) {
                return Ok(Self::from_tables(p, k, modulus, exp));
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    /// The field defined by a given monic primitive polynomial, coefficients
    /// listed from the constant term up.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        let k = modulus.len().saturating_sub(1) as u32;
        let bad = || GlHallError::NotPrimitive(format!("{modulus:?}"));
        if !arith::is_prime(p) || k == 0 || modulus[k as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(bad());
        }
        p.checked_pow(k).filter(|&s| s <= MAX_FIELD_ORDER).ok_or(GlHallError::FieldTooLarge { p, k })?;
        let exp = powers_of_x(p, &modulus).ok_or_else(bad)?;
        Ok(Self::from_tables(p, k, modulus, exp))
    }

    fn from_tables(p: u64, k: u32, modulus: Vec<u64>, exp_poly: Vec<u64>) -> Field {
        let units = exp_poly.len() as u64;
        let mut poly_rep = vec![0u32; (units + 1) as usize];
        for (i, &e) in exp_poly.iter().enumerate() {
            poly_rep[e as usize] = i as u32 + 1;
        }
        let add_poly = |a: u64, b: u64| {
            let (da, db) = (digits(a, p, k), digits(b, p, k));
            let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            encode(&s, p)
        };
        let zech = exp_poly.iter().map(|&e| poly_rep[add_poly(1, e) as usize]).collect();
        Field { p, k, modulus, units, exp_poly, poly_rep, zech }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.units + 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The modulus as a polynomial in `x`, highest degree first.
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        terms.join(" + ")
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// Element with the given base-`p` polynomial encoding.
    pub fn from_poly(&self, c: u64) -> u32 {
        self.poly_rep[c as usize]
    }

    pub fn to_poly(&self, x: u32) -> u64 {
        if x == 0 {
            0
        } else {
            self.exp_poly[(x - 1) as usize]
        }
    }

    pub fn from_int(&self, i: i64) -> u32 {
        self.from_poly(i.rem_euclid(self.p as i64) as u64)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let (i, j) = ((a - 1) as u64, (b - 1) as u64);
        let z = self.zech[((j + self.units - i) % self.units) as usize];
        if z == 0 {
            0
        } else {
            ((i + (z - 1) as u64) % self.units) as u32 + 1
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 || a == 0 {
            a
        } else {
            self.mul(a, (self.units / 2) as u32 + 1)
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            (((a - 1) as u64 + (b - 1) as u64) % self.units) as u32 + 1
        }
    }

    /// Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        ((self.units - (a - 1) as u64) % self.units) as u32 + 1
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        ((((a - 1) as u128 * e as u128) % self.units as u128) as u32) + 1
    }

    /// `x ↦ x^(p^j)`.
    pub fn frobenius(&self, a: u32, j: u32) -> u32 {
        let e = arith::pow_mod(self.p, j as u64, self.units) as u128;
        if a == 0 {
            0
        } else {
            (((a - 1) as u128 * e) % self.units as u128) as u32 + 1
        }
    }

    pub fn element_order(&self, a: u32) -> u64 {
        assert!(a != 0, "zero has no multiplicative order");
        self.units / arith::gcd((a - 1) as u64, self.units)
    }

    /// A generator of the unique cyclic subgroup of order `d`.
    pub fn root_of_unity(&self, d: u64) -> Option<u32> {
        (d > 0 && self.units % d == 0).then(|| (self.units / d) as u32 + 1)
    }

    /// Elements fixed by `x ↦ x^(p^j)`, ordered by encoding.
    pub fn subfield(&self, j: u32) -> Vec<u32> {
        let mut v: Vec<u32> = (0..=self.units as u32).filter(|&x| self.frobenius(x, j) == x).collect();
        v.sort_by_key(|&x| self.to_poly(x));
        v
    }

    pub fn mat_mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.n;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for l in 0..n {
                let x = a.entries[i * n + l];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = self.mul(x, b.entries[l * n + j]);
                    out[i * n + j] = self.add(out[i * n + j], prod);
                }
            }
        }
        Matrix { n, entries: out }
    }

    pub fn mat_pow(&self, a: &Matrix, mut e: u64) -> Matrix {
        let mut base = a.clone();
        let mut acc = Matrix::identity(a.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn commute(&self, a: &Matrix, b: &Matrix) -> bool {
        self.mat_mul(a, b) == self.mat_mul(b, a)
    }

    pub fn mat_map(&self, a: &Matrix, f: impl Fn(u32) -> u32) -> Matrix {
        Matrix { n: a.n, entries: a.entries.iter().map(|&x| f(x)).collect() }
    }

    pub fn det(&self, a: &Matrix) -> u32 {
        let n = a.n;
        let mut m = a.entries.clone();
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| m[r * n + col] != 0) else { return 0 };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = self.neg(det);
            }
            let pv = m[col * n + col];
            det = self.mul(det, pv);
            let pinv = self.inv(pv);
            for r in col + 1..n {
                let factor = self.mul(m[r * n + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = self.mul(factor, m[col * n + j]);
                    m[r * n + j] = self.sub(m[r * n + j], v);
                }
            }
        }
        det
    }
}

/// Square matrix of field elements in Zech representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    entries: Vec<u32>,
}

impl Matrix {
    pub fn identity(n: usize) -> Matrix {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Matrix { n, entries }
    }

    pub fn from_entries(n: usize, entries: Vec<u32>) -> Matrix {
        assert_eq!(entries.len(), n * n, "matrix needs n² entries");
        Matrix { n, entries }
    }

    pub fn diagonal(diag: &[u32]) -> Matrix {
        let n = diag.len();
        let mut m = Matrix { n, entries: vec![0; n * n] };
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    /// Permutation matrix sending `e_i` to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Matrix {
        let n = perm.len();
        let mut m = Matrix { n, entries: vec![0; n * n] };
        for (i, &j) in perm.iter().enumerate() {
            m.entries[j * n + i] = 1;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        Matrix { n, entries: (0..n * n).map(|idx| self.entries[(idx % n) * n + idx / n]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n * self.n).all(|idx| idx / self.n == idx % self.n || self.entries[idx] == 0)
    }

    /// Copy of `block` placed on the diagonal at `offset`, identity elsewhere.
    pub fn embed(n: usize, offset: usize, block: &Matrix) -> Matrix {
        let mut m = Matrix::identity(n);
        for i in 0..block.n {
            for j in 0..block.n {
                m.entries[(offset + i) * n + offset + j] = block.get(i, j);
            }
        }
        m
    }
}

/// A subgroup given by generators, with all elements when it fits in the bound.
#[derive(Debug, Clone)]
pub struct MatrixSubgroup {
    pub name: String,
    pub degree: usize,
    pub gens: Vec<Matrix>,
    elements: Option<Vec<Matrix>>,
    index: HashMap<Matrix, usize>,
}

impl MatrixSubgroup {
    pub fn generate(field: &Field, name: &str, degree: usize, gens: Vec<Matrix>, bound: usize) -> MatrixSubgroup {
        let id = Matrix::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut head = 0;
        let mut complete = true;
        'outer: while head < elements.len() {
            let x = elements[head].clone();
            head += 1;
            for g in &gens {
                let y = field.mat_mul(&x, g);
                if !index.contains_key(&y) {
                    if elements.len() >= bound {
                        complete = false;
                        break 'outer;
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                }
            }
        }
        let (elements, index) = if complete { (Some(elements), index) } else { (None, HashMap::new()) };
        MatrixSubgroup { name: name.to_string(), degree, gens, elements, index }
    }

    pub fn order(&self) -> Option<usize> {
        self.elements.as_ref().map(Vec::len)
    }

    pub fn is_enumerated(&self) -> bool {
        self.elements.is_some()
    }

    pub fn elements(&self) -> Option<&[Matrix]> {
        self.elements.as_deref()
    }

    pub fn contains(&self, m: &Matrix) -> Option<bool> {
        self.elements.as_ref().map(|_| self.index.contains_key(m))
    }

    pub fn gens_commute(&self, field: &Field) -> bool {
        self.gens.iter().enumerate().all(|(i, a)| self.gens[i + 1..].iter().all(|b| field.commute(a, b)))
    }
}

/// The ambient group GLₙ^η(q), realised over `F_q` (η = +) or `F_{q²}` (η = −).
#[derive(Debug, Clone)]
pub struct GlGroup {
    gl: GLSpec,
    field: Field,
}

/// T, R and TR with the checks made on them.
#[derive(Debug, Clone)]
pub struct HallConstruction {
    pub regime: GlRegime,
    pub t: MatrixSubgroup,
    pub r: MatrixSubgroup,
    pub tr: MatrixSubgroup,
    pub expected_order: FactoredInteger,
    /// TR was enumerated and its order equals `expected_order`.
    pub verified: bool,
    /// Conjugating T's generators by R's lands in T.
    pub t_normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerReport {
    pub order: usize,
    pub abelian: bool,
    pub expected_invariants: Vec<u64>,
    pub matches_expected: bool,
    pub t_ranks: Vec<(u64, u32)>,
    pub contains_r: bool,
    pub structure: String,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub t: u64,
    pub d: u64,
    pub k: u64,
    pub block_sizes: Vec<usize>,
    pub k_group: MatrixSubgroup,
    pub r1: MatrixSubgroup,
    pub rank: u32,
    pub commute: bool,
    pub members: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessStatus {
    Certified,
    NotCertified,
    Partial,
    NotApplicable,
}

impl fmt::Display for WitnessStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessStatus::Certified => "certified",
            WitnessStatus::NotCertified => "not certified",
            WitnessStatus::Partial => "partial",
            WitnessStatus::NotApplicable => "not applicable",
        })
    }
}

/// Outcome of the witness check for one prime `t ∈ τ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TScan {
    pub t: u64,
    pub witness_rank: u32,
    pub kr1_order: Option<usize>,
    pub kr1_pi_group: bool,
    pub kr1_t_rank: Option<u32>,
    pub subgroups_scanned: usize,
    pub max_t_rank: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub gl: String,
    pub pi: PrimeSet,
    pub status: WitnessStatus,
    pub reason: Option<String>,
    pub r: u64,
    pub d: u64,
    pub k: u64,
    pub tr_order: Option<usize>,
    pub scans: Vec<TScan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiCheck {
    pub t: u64,
    /// ψ = φ^psi_power.
    pub psi_power: u32,
    pub k_fixed: bool,
    pub k_centralizes_r1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusReport {
    pub gl: String,
    pub phi_order: u32,
    pub t_invariant: bool,
    pub r_fixed: bool,
    pub r1_fixed_by_odd_part: bool,
    pub k_invariant: bool,
    pub psi: Vec<PsiCheck>,
}

fn log_base(count: usize, t: u64) -> Option<u32> {
    let mut c = count as u64;
    let mut e = 0;
    while c > 1 {
        if c % t != 0 {
            return None;
        }
        c /= t;
        e += 1;
    }
    Some(e)
}

fn format_invariants(inv: &[u64]) -> String {
    let mut runs: Vec<(u64, usize)> = Vec::new();
    for &x in inv {
        match runs.last_mut() {
            Some((y, c)) if *y == x => *c += 1,
            _ => runs.push((x, 1)),
        }
    }
    if runs.is_empty() {
        return "1".into();
    }
    runs.iter().map(|&(x, c)| if c == 1 { x.to_string() } else { format!("{x}^{c}") }).collect::<Vec<_>>().join(" × ")
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

impl GlGroup {
    pub fn new(gl: GLSpec) -> Result<GlGroup> {
        let k = match gl.eta {
            Sign::Plus => gl.m,
            Sign::Minus => 2 * gl.m,
        };
        Ok(GlGroup { gl, field: Field::new(gl.p, k)? })
    }

    pub fn gl(&self) -> &GLSpec {
        &self.gl
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.gl.n as usize
    }

    /// `x ↦ x^q`, the conjugation of `F_{q²}`; identity when η = +.
    pub fn conj(&self, x: u32) -> u32 {
        match self.gl.eta {
            Sign::Plus => x,
            Sign::Minus => self.field.frobenius(x, self.gl.m),
        }
    }

    fn conj_transpose(&self, a: &Matrix) -> Matrix {
        self.field.mat_map(&a.transpose(), |x| self.conj(x))
    }

    /// Invertible, and `(a_ij^q) = ((a_ij)^{-1})^T` when η = −.
    pub fn is_member(&self, a: &Matrix) -> bool {
        if a.n() != self.degree() || self.field.det(a) == 0 {
            return false;
        }
        match self.gl.eta {
            Sign::Plus => true,
            Sign::Minus => self.field.mat_mul(a, &self.conj_transpose(a)).is_identity(),
        }
    }

    /// Entrywise `x ↦ x^p`.
    pub fn phi(&self, a: &Matrix) -> Matrix {
        self.field.mat_map(a, |x| self.field.frobenius(x, 1))
    }

    pub fn phi_order(&self) -> u32 {
        self.field.degree()
    }

    fn phi_power(&self, a: &Matrix, j: u32) -> Matrix {
        self.field.mat_map(a, |x| self.field.frobenius(x, j))
    }

    fn torus_exponent(&self, tau: &PrimeSet) -> u64 {
        arith::factor(self.gl.q_minus_eta()).expect("q - η >= 1").pi_part(tau).to_u64().expect("divides q - η")
    }

    fn in_torus(&self, a: &Matrix, exponent: u64) -> bool {
        a.is_diagonal() && (0..a.n()).all(|i| a.get(i, i) != 0 && self.field.pow(a.get(i, i), exponent) == 1)
    }

    /// Diagonal matrices with entries of order dividing `(q − η)_τ`.
    pub fn build_t(&self, tau: &PrimeSet, bound: usize) -> Result<MatrixSubgroup> {
        let qe = self.gl.q_minus_eta();
        let spectrum = arith::factor(qe).expect("q - η >= 1").spectrum();
        if !tau.is_subset(&spectrum) {
            return Err(GlHallError::TauNotDividing { tau: tau.to_string(), value: qe });
        }
        let n = self.degree();
        let e = self.torus_exponent(tau);
        let omega = self.field.root_of_unity(e).expect("q - η divides the unit group order");
        let gens = if e == 1 {
            Vec::new()
        } else {
            (0..n)
                .map(|i| {
                    let mut d = vec![1u32; n];
                    d[i] = omega;
                    Matrix::diagonal(&d)
                })
                .collect()
        };
        Ok(MatrixSubgroup::generate(&self.field, "T", n, gens, bound))
    }

    /// `[n/r]` disjoint r-cycle permutation matrices.
    pub fn build_r(&self, r: u64) -> Result<MatrixSubgroup> {
        let n = self.gl.n as u64;
        if r < 3 || !arith::is_prime(r) {
            return Err(GlHallError::Regime(format!("r = {r} is not an odd prime")));
        }
        if r > n {
            return Err(GlHallError::Regime(format!("r = {r} exceeds n = {n}")));
        }
        let (d, k) = (n / r, n % r);
        if d + k >= r - 1 {
            return Err(GlHallError::Regime(format!("d + k = {} is not below r - 1 = {}", d + k, r - 1)));
        }
        let gens = (0..d as usize)
            .map(|b| {
                let r = r as usize;
                let mut perm: Vec<usize> = (0..n as usize).collect();
                for i in 0..r {
                    perm[b * r + i] = b * r + (i + 1) % r;
                }
                Matrix::permutation(&perm)
            })
            .collect();
        Ok(MatrixSubgroup::generate(&self.field, "R", n as usize, gens, usize::MAX))
    }

    pub fn build_tr(&self, pi: &PrimeSet, bound: usize) -> Result<HallConstruction> {
        let regime = gl_regime(&self.gl, pi)?;
        let expected_order = gl_hall_pi_order(&self.gl, pi)?;
        let t = self.build_t(&regime.tau, bound)?;
        let r = self.build_r(regime.r)?;
        let gens = t.gens.iter().chain(&r.gens).cloned().collect();
        let tr = MatrixSubgroup::generate(&self.field, "TR", self.degree(), gens, bound);
        let exponent = self.torus_exponent(&regime.tau);
        let t_normalized = r.gens.iter().all(|g| {
            let g_inv = g.transpose();
            t.gens.iter().all(|x| {
                let y = self.field.mat_mul(&self.field.mat_mul(g, x), &g_inv);
                t.contains(&y).unwrap_or_else(|| self.in_torus(&y, exponent))
            })
        });
        let verified = tr.order().map(|o| o as u64) == expected_order.to_u64();
        Ok(HallConstruction { regime, t, r, tr, expected_order, verified, t_normalized })
    }

    /// `C_TR(R)` by exhaustive search, compared with `(q − η)_τ^{d+k} × R`.
    pub fn centralizer_in_tr_of_r(&self, hall: &HallConstruction) -> Option<CentralizerReport> {
        let f = &self.field;
        let elements = hall.tr.elements()?;
        let cent: Vec<&Matrix> = elements.iter().filter(|x| hall.r.gens.iter().all(|g| f.commute(x, g))).collect();
        let abelian = cent.iter().enumerate().all(|(i, a)| cent[i + 1..].iter().all(|b| f.commute(a, b)));
        let reg = &hall.regime;
        let torus = self.torus_exponent(&reg.tau);
        let mut expected: Vec<u64> = vec![torus; (reg.d + reg.k) as usize];
        expected.extend(std::iter::repeat_n(reg.r, reg.d as usize));
        expected.retain(|&x| x > 1);
        let expected_order: u64 = expected.iter().product();
        let exponent = expected.iter().fold(1, |acc, &x| acc / arith::gcd(acc, x) * x);
        let counts_match = divisors(exponent).into_iter().all(|e| {
            let want: u64 = expected.iter().map(|&ni| arith::gcd(e, ni)).product();
            cent.iter().filter(|x| f.mat_pow(x, e).is_identity()).count() as u64 == want
        });
        let t_ranks = reg
            .tau
            .iter()
            .map(|t| {
                let count = cent.iter().filter(|x| f.mat_pow(x, t).is_identity()).count();
                (t, log_base(count, t).unwrap_or(u32::MAX))
            })
            .collect();
        let contains_r = hall.r.elements().unwrap_or(&[]).iter().all(|x| cent.contains(&x));
        Some(CentralizerReport {
            order: cent.len(),
            abelian,
            matches_expected: abelian && counts_match && cent.len() as u64 == expected_order,
            structure: format_invariants(&expected),
            expected_invariants: expected,
            t_ranks,
            contains_r,
        })
    }

    /// An element of order `r` in `GL_{r−1}^η`, with entries fixed by the odd
    /// part of `φ`.
    fn order_r_block(&self, r: u64) -> Result<Matrix> {
        let f = &self.field;
        let s = (r - 1) as usize;
        if self.gl.eta == Sign::Plus {
            // companion matrix of 1 + x + ... + x^(r-1) over the prime field
            let mut m = Matrix { n: s, entries: vec![0; s * s] };
            for i in 0..s {
                if i + 1 < s {
                    m.entries[(i + 1) * s + i] = 1;
                }
                m.entries[i * s + s - 1] = f.from_int(-1);
            }
            return Ok(m);
        }
        let r_us = r as usize;
        let two_part = 1u32 << self.phi_order().trailing_zeros();
        let sub: Vec<u32> = f.subfield(two_part).into_iter().filter(|&x| x != 0).collect();
        let herm = |u: &[u32], v: &[u32]| u.iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, self.conj(b))));
        let axpy = |u: &[u32], lambda: u32, v: &[u32]| -> Vec<u32> {
            u.iter().zip(v).map(|(&a, &b)| f.add(a, f.mul(lambda, b))).collect()
        };
        let mut rest: Vec<Vec<u32>> = (0..s)
            .map(|i| {
                let mut v = vec![0u32; r_us];
                v[i] = 1;
                v[r_us - 1] = f.from_int(-1);
                v
            })
            .collect();
        let mut basis: Vec<Vec<u32>> = Vec::new();
        while !rest.is_empty() {
            let mut found = None;
            'search: for i in 0..rest.len() {
                if herm(&rest[i], &rest[i]) != 0 {
                    found = Some((i, rest[i].clone()));
                    break;
                }
                for j in 0..rest.len() {
                    if j == i {
                        continue;
                    }
                    for &lambda in &sub {
                        let w = axpy(&rest[i], lambda, &rest[j]);
                        if herm(&w, &w) != 0 {
                            found = Some((i, w));
                            break 'search;
                        }
                    }
                }
            }
            let (pos, w) = found.ok_or(GlHallError::NoUnitaryElement(r))?;
            let target = f.inv(herm(&w, &w));
            let c = *sub.iter().find(|&&c| f.mul(c, self.conj(c)) == target).ok_or(GlHallError::NoUnitaryElement(r))?;
            let u: Vec<u32> = w.iter().map(|&x| f.mul(c, x)).collect();
            rest.remove(pos);
            for b in rest.iter_mut() {
                let coef = f.neg(herm(b, &u));
                *b = axpy(b, coef, &u);
            }
            basis.push(u);
        }
        let shift = |v: &[u32]| -> Vec<u32> { (0..r_us).map(|l| v[(l + r_us - 1) % r_us]).collect() };
        let mut m = Matrix { n: s, entries: vec![0; s * s] };
        for (j, bj) in basis.iter().enumerate() {
            let pu = shift(bj);
            for (i, bi) in basis.iter().enumerate() {
                m.entries[i * s + j] = herm(&pu, bi);
            }
        }
        Ok(m)
    }

    /// Block scalars of order `t` on the blocks of
    /// `GL_{r−1}^η(q)^d × GL_1^η(q)^{d+k}`, and an order-`r` element in each
    /// large block.
    pub fn build_witness_k(&self, pi: &PrimeSet, t: u64, bound: usize) -> Result<Witness> {
        let regime = gl_regime(&self.gl, pi)?;
        if !regime.tau.contains(t) {
            return Err(GlHallError::Regime(format!("{t} is not in τ = {}", regime.tau)));
        }
        let f = &self.field;
        let n = self.degree();
        let (r, d, k) = (regime.r, regime.d, regime.k);
        let mut block_sizes = vec![(r - 1) as usize; d as usize];
        block_sizes.extend(std::iter::repeat_n(1, (d + k) as usize));
        let lambda = f.root_of_unity(t).expect("t divides q - η");
        let mut offset = 0;
        let mut k_gens = Vec::new();
        for &size in &block_sizes {
            let mut diag = vec![1u32; n];
            diag[offset..offset + size].fill(lambda);
            k_gens.push(Matrix::diagonal(&diag));
            offset += size;
        }
        let y = self.order_r_block(r)?;
        let r1_gens: Vec<Matrix> = (0..d as usize).map(|b| Matrix::embed(n, b * (r - 1) as usize, &y)).collect();
        let commute = k_gens.iter().all(|a| r1_gens.iter().all(|b| f.commute(a, b)));
        let members = k_gens.iter().chain(&r1_gens).all(|g| self.is_member(g));
        let k_group = MatrixSubgroup::generate(f, "K", n, k_gens, bound);
        let r1 = MatrixSubgroup::generate(f, "R1", n, r1_gens, bound);
        Ok(Witness { t, d, k, block_sizes, k_group, r1, rank: (2 * d + k) as u32, commute, members })
    }

    /// Builds `K R₁` for every `t ∈ τ` and checks that no elementary abelian
    /// r-subgroup of rank `d` in TR has a centralizer of t-rank `2d + k`.
    pub fn verify_dpi_failure_witness(&self, pi: &PrimeSet, bound: usize) -> WitnessReport {
        let mut report = WitnessReport {
            gl: self.gl.to_string(),
            pi: pi.clone(),
            status: WitnessStatus::NotApplicable,
            reason: None,
            r: 0,
            d: 0,
            k: 0,
            tr_order: None,
            scans: Vec::new(),
        };
        let hall = match self.build_tr(pi, bound) {
            Ok(h) => h,
            Err(e) => {
                report.reason = Some(e.to_string());
                return report;
            }
        };
        let reg = &hall.regime;
        (report.r, report.d, report.k) = (reg.r, reg.d, reg.k);
        report.tr_order = hall.tr.order();
        let f = &self.field;
        let r_subgroups = hall.tr.elements().map(|els| elementary_r_subgroups(f, els, reg.r, reg.d as u32));
        let mut all_ok = true;
        for t in reg.tau.iter() {
            let witness = match self.build_witness_k(pi, t, bound) {
                Ok(w) => w,
                Err(e) => {
                    report.status = WitnessStatus::NotCertified;
                    report.reason = Some(e.to_string());
                    return report;
                }
            };
            let gens = witness.k_group.gens.iter().chain(&witness.r1.gens).cloned().collect();
            let kr1 = MatrixSubgroup::generate(f, "KR1", self.degree(), gens, bound);
            let kr1_order = kr1.order();
            let kr1_pi_group = kr1_order.is_some_and(|o| pi.is_pi_number(o as u64));
            let kr1_t_rank = kr1
                .elements()
                .and_then(|els| log_base(els.iter().filter(|x| f.mat_pow(x, t).is_identity()).count(), t));
            let mut scan = TScan {
                t,
                witness_rank: witness.rank,
                kr1_order,
                kr1_pi_group,
                kr1_t_rank,
                subgroups_scanned: 0,
                max_t_rank: None,
            };
            if let (Some(els), Some(subs)) = (hall.tr.elements(), r_subgroups.as_ref()) {
                let omega: Vec<&Matrix> = els.iter().filter(|x| f.mat_pow(x, t).is_identity()).collect();
                let omega_abelian =
                    omega.iter().enumerate().all(|(i, a)| omega[i + 1..].iter().all(|b| f.commute(a, b)));
                if omega_abelian {
                    scan.subgroups_scanned = subs.len();
                    scan.max_t_rank = subs
                        .iter()
                        .map(|gens| {
                            let c = omega.iter().filter(|w| gens.iter().all(|g| f.commute(w, g))).count();
                            log_base(c, t).expect("subgroup of an elementary abelian t-group")
                        })
                        .max();
                }
            }
            let ok = witness.commute
                && witness.members
                && kr1_pi_group
                && kr1_t_rank == Some(witness.rank)
                && scan.max_t_rank.is_some_and(|m| m < witness.rank);
            all_ok &= ok;
            report.scans.push(scan);
        }
        report.status = if !hall.tr.is_enumerated() {
            report.reason = Some(format!("TR exceeds the enumeration bound {bound}"));
            WitnessStatus::Partial
        } else if all_ok && hall.verified {
            WitnessStatus::Certified
        } else {
            WitnessStatus::NotCertified
        };
        report
    }

    /// `φ` normalizes T and fixes R; the odd part of `φ` fixes R₁; `φ`
    /// normalizes each K; and when `t | m`, `ψ` of order `t` fixes K.
    pub fn frobenius_action_check(&self, pi: &PrimeSet) -> Result<FrobeniusReport> {
        let regime = gl_regime(&self.gl, pi)?;
        let f = &self.field;
        let t_group = self.build_t(&regime.tau, 1)?;
        let r_group = self.build_r(regime.r)?;
        let exponent = self.torus_exponent(&regime.tau);
        let t_invariant = t_group.gens.iter().all(|g| self.in_torus(&self.phi(g), exponent));
        let r_fixed = r_group.gens.iter().all(|g| self.phi(g) == *g);
        let phi_order = self.phi_order();
        let odd_power = 1u32 << phi_order.trailing_zeros();
        let mut k_invariant = true;
        let mut r1_fixed_by_odd_part = true;
        let mut psi = Vec::new();
        for t in regime.tau.iter() {
            let w = self.build_witness_k(pi, t, 1)?;
            r1_fixed_by_odd_part &= w.r1.gens.iter().all(|g| self.phi_power(g, odd_power) == *g);
            k_invariant &= w.k_group.gens.iter().all(|g| {
                let h = self.phi(g);
                h.is_diagonal() && (0..h.n()).all(|i| f.pow(h.get(i, i), t) == 1)
            });
            if self.gl.m as u64 % t == 0 {
                let psi_power = phi_order / t as u32;
                psi.push(PsiCheck {
                    t,
                    psi_power,
                    k_fixed: w.k_group.gens.iter().all(|g| self.phi_power(g, psi_power) == *g),
                    k_centralizes_r1: w.k_group.gens.iter().all(|a| w.r1.gens.iter().all(|b| f.commute(a, b))),
                });
            }
        }
        Ok(FrobeniusReport {
            gl: self.gl.to_string(),
            phi_order,
            t_invariant,
            r_fixed,
            r1_fixed_by_odd_part,
            k_invariant,
            psi,
        })
    }
}

/// Generator lists of the elementary abelian r-subgroups of rank `d` among
/// `elements`.
fn elementary_r_subgroups(f: &Field, elements: &[Matrix], r: u64, d: u32) -> Vec<Vec<Matrix>> {
    let index: HashMap<&Matrix, usize> = elements.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let order_r: Vec<usize> = (0..elements.len())
        .filter(|&i| !elements[i].is_identity() && f.mat_pow(&elements[i], r).is_identity())
        .collect();
    // (sorted member indices, generators)
    let mut level: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![index[&Matrix::identity(elements[0].n())]], vec![])];
    for _ in 0..d {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (members, gens) in &level {
            for &y in &order_r {
                if members.binary_search(&y).is_ok() || !gens.iter().all(|&g| f.commute(&elements[g], &elements[y])) {
                    continue;
                }
                let mut powers = vec![Matrix::identity(elements[y].n())];
                for _ in 1..r {
                    let last = powers.last().unwrap();
                    powers.push(f.mat_mul(last, &elements[y]));
                }
                let mut new_members: Vec<usize> = members
                    .iter()
                    .flat_map(|&m| powers.iter().map(move |p| (m, p)))
                    .map(|(m, p)| index[&f.mat_mul(&elements[m], p)])
                    .collect();
                new_members.sort_unstable();
                new_members.dedup();
                if seen.insert(new_members.clone()) {
                    let mut g = gens.clone();
                    g.push(y);
                    next.push((new_members, g));
                }
            }
        }
        level = next;
    }
    level.into_iter().map(|(_, gens)| gens.into_iter().map(|g| elements[g].clone()).collect()).collect()
}

/// Generators of a matrix subgroup with the field they live over, in a
/// line-oriented text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u64,
    pub modulus: Vec<u64>,
    pub group: String,
    pub subgroup: String,
    pub degree: usize,
    pub order: Option<u64>,
    pub verified: bool,
    /// Entries as base-`p` polynomial encodings, row-major.
    pub generators: Vec<Vec<u64>>,
}

impl Certificate {
    pub fn from_subgroup(field: &Field, group: &str, sub: &MatrixSubgroup, verified: bool) -> Certificate {
        Certificate {
            p: field.p(),
            modulus: field.modulus().to_vec(),
            group: group.to_string(),
            subgroup: sub.name.clone(),
            degree: sub.degree,
            order: sub.order().map(|o| o as u64),
            verified,
            generators: sub.gens.iter().map(|g| g.entries().iter().map(|&x| field.to_poly(x)).collect()).collect(),
        }
    }

    pub fn field(&self) -> Result<Field> {
        Field::with_modulus(self.p, self.modulus.clone())
    }

    pub fn matrices(&self, field: &Field) -> Vec<Matrix> {
        self.generators
            .iter()
            .map(|g| Matrix::from_entries(self.degree, g.iter().map(|&c| field.from_poly(c)).collect()))
            .collect()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modulus: Vec<String> = self.modulus.iter().map(u64::to_string).collect();
        writeln!(f, "field {} {}", self.p, modulus.join(","))?;
        writeln!(f, "group {}", self.group)?;
        writeln!(f, "subgroup {}", self.subgroup)?;
        writeln!(f, "degree {}", self.degree)?;
        match self.order {
            Some(o) => writeln!(f, "order {o}")?,
            None => writeln!(f, "order unknown")?,
        }
        writeln!(f, "verified {}", self.verified)?;
        for g in &self.generators {
            writeln!(f, "gen")?;
            for row in g.chunks(self.degree.max(1)) {
                let row: Vec<String> = row.iter().map(u64::to_string).collect();
                writeln!(f, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Certificate {
    type Err = GlHallError;

    fn from_str(s: &str) -> Result<Certificate> {
        let err = |line: usize, msg: &str| GlHallError::Certificate { line, msg: msg.to_string() };
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (no, line) = lines.next().ok_or_else(|| err(0, &format!("missing `{key}` line")))?;
            let rest = line.strip_prefix(key).ok_or_else(|| err(no, &format!("expected `{key}`")))?;
            Ok((no, rest.trim().to_string()))
        };
        let (no, field) = header("field")?;
        let (p, modulus) = field.split_once(' ').ok_or_else(|| err(no, "expected `field <p> <modulus>`"))?;
        let p = p.parse().map_err(|_| err(no, "bad characteristic"))?;
        let modulus = modulus
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| err(no, "bad modulus"))?;
        let (_, group) = header("group")?;
        let (_, subgroup) = header("subgroup")?;
        let (no, degree) = header("degree")?;
        let degree: usize = degree.parse().map_err(|_| err(no, "bad degree"))?;
        let (no, order) = header("order")?;
        let order = match order.as_str() {
            "unknown" => None,
            o => Some(o.parse().map_err(|_| err(no, "bad order"))?),
        };
        let (no, verified) = header("verified")?;
        let verified = verified.parse().map_err(|_| err(no, "expected true or false"))?;
        let mut generators = Vec::new();
        while let Some((no, line)) = lines.next() {
            if line != "gen" {
                return Err(err(no, "expected `gen`"));
            }
            let mut entries = Vec::with_capacity(degree * degree);
            for _ in 0..degree {
                let (no, row) = lines.next().ok_or_else(|| err(no, "truncated matrix"))?;
                let row = row
                    .split_whitespace()
                    .map(str::parse::<u64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| err(no, "bad matrix entry"))?;
                if row.len() != degree {
                    return Err(err(no, &format!("expected {degree} entries")));
                }
                entries.extend(row);
            }
            generators.push(entries);
        }
        Ok(Certificate { p, modulus, group, subgroup, degree, order, verified, generators })
    }
}
