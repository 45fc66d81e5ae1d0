//! Arithmetic decision procedure for D_π (equivalently U_π) in finite
//! simple groups of Lie type.
//!
//! Each criterion is a [`Criterion`] trait object held in a
//! [`CriterionRegistry`]. The registry evaluates the four D_π conditions in
//! order (I, II, III, IV) and, only when all of them fail, the E_π∖D_π
//! detectors. The first criterion that fires decides the verdict, and every
//! checked sub-condition is kept as a witness.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, mult_order, r_part_pow_minus_one, FactoredInteger, PrimeSet};
use crate::orders::{self, Family, GLSpec, OrderError, Sign, SimpleGroup, SimpleGroupSpec, Sporadic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("empty list of composition factors")]
    NoFactors,
    #[error("{gl} with π = {pi} is outside the Hall regime: {reason}")]
    Regime { gl: String, pi: String, reason: String },
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
}

/// π restricted to π(S), its least prime `r`, the rest `τ`, and `e(q, t)`
/// for each `t` in `π ∩ π(S)` different from the characteristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiContext {
    pub pi: PrimeSet,
    pub pi_effective: PrimeSet,
    pub r: Option<u64>,
    pub tau: PrimeSet,
    pub orders_mod: BTreeMap<u64, u64>,
    pub q: u64,
    pub p: u64,
    pub n: u32,
}

impl PiContext {
    /// `e(q, t)`; `None` for `t = p` or `t = 2` or primes outside `π ∩ π(S)`.
    pub fn e(&self, t: u64) -> Option<u64> {
        self.orders_mod.get(&t).copied()
    }

    fn p_in_pi(&self) -> bool {
        self.pi.contains(self.p)
    }
}

pub fn make_context(spec: &SimpleGroupSpec, pi: &PrimeSet) -> Result<PiContext, OrderError> {
    let spectrum = orders::prime_spectrum_of_group(spec)?;
    let pi_effective = pi.intersection(&spectrum);
    let r = PrimeSet::min(&pi_effective);
    let tau = r.map(|r| pi_effective.without(r)).unwrap_or_default();
    let q = spec.q();
    let orders_mod = pi_effective
        .iter()
        .filter(|&t| t != 2 && t != spec.p())
        .map(|t| (t, mult_order(q as i64, t).expect("t is an odd prime coprime to q")))
        .collect();
    Ok(PiContext { pi: pi.clone(), pi_effective, r, tau, orders_mod, q, p: spec.p(), n: spec.n() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Dpi,
    EpiNotDpi,
    NotEpi,
    Undetermined,
}

impl Status {
    /// 0 = D_π, 1 = determined not D_π, 2 = undetermined.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Dpi => 0,
            Status::EpiNotDpi | Status::NotEpi => 1,
            Status::Undetermined => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Dpi => "Dpi",
            Status::EpiNotDpi => "EpiNotDpi",
            Status::NotEpi => "NotEpi",
            Status::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallVerdict {
    pub group: String,
    pub pi: PrimeSet,
    pub status: Status,
    pub condition_tag: Option<String>,
    pub witnesses: Vec<(String, String)>,
    pub citations: Vec<String>,
    pub notes: Vec<String>,
    /// Mirrors `status == Dpi`: D_π and U_π coincide.
    pub upi: bool,
}

impl HallVerdict {
    fn new(group: String, pi: PrimeSet, status: Status) -> Self {
        HallVerdict {
            group,
            pi,
            status,
            condition_tag: None,
            witnesses: Vec::new(),
            citations: Vec::new(),
            notes: Vec::new(),
            upi: status == Status::Dpi,
        }
    }

    fn with_firing(mut self, firing: Firing) -> Self {
        self.citations.push(firing.tag.clone());
        self.condition_tag = Some(firing.tag);
        self.witnesses.extend(firing.witnesses);
        self.notes.extend(firing.notes);
        self
    }

    pub fn witness(&self, name: &str) -> Option<&str> {
        self.witnesses.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

/// What a criterion reports when it fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    pub tag: String,
    pub witnesses: Vec<(String, String)>,
    pub notes: Vec<String>,
}

/// Ordered record of checked sub-conditions; the first failing check is kept.
#[derive(Debug, Default, Clone)]
struct Checks {
    witnesses: Vec<(String, String)>,
    failed: Option<String>,
}

impl Checks {
    fn value(&mut self, name: &str, v: impl fmt::Display) -> &mut Self {
        self.witnesses.push((name.to_string(), v.to_string()));
        self
    }

    fn require(&mut self, label: impl Into<String>, ok: bool) -> bool {
        let label = label.into();
        self.witnesses.push((label.clone(), ok.to_string()));
        if !ok && self.failed.is_none() {
            self.failed = Some(label);
        }
        ok
    }

    fn passed(&self) -> bool {
        self.failed.is_none()
    }

    fn into_firing(self, tag: impl Into<String>) -> Option<Firing> {
        self.passed().then(|| Firing { tag: tag.into(), witnesses: self.witnesses, notes: Vec::new() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    /// Firing proves D_π.
    Dpi,
    /// Firing (after every D_π criterion failed) yields E_π∖D_π.
    EpiNotDpi,
}

/// One interchangeable arithmetic criterion.
pub trait Criterion: Send + Sync {
    fn name(&self) -> &'static str;
    fn kind(&self) -> CriterionKind;
    fn description(&self) -> &'static str;
    fn evaluate(&self, spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing>;
}

fn pi_of(n: u64) -> PrimeSet {
    arith::factor(n).expect("n >= 1").spectrum()
}

fn r_part_is_r(q: u64, r: u64) -> (bool, u64) {
    let part = r_part_pow_minus_one(q as i64, r - 1, r).expect("r coprime to q");
    let v = part.to_u64().unwrap_or(u64::MAX);
    (v == r, v)
}

/// Condition I: `p ∈ π`, `(π ∩ π(S)) ∖ {p} ⊆ π(q − 1)` and no prime of
/// `π ∩ π(S)` divides `|W(S)|`.
pub fn condition_i(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if !ctx.p_in_pi() {
        return None;
    }
    let weyl = orders::weyl_order(spec);
    let rest = ctx.pi_effective.without(ctx.p);
    let q_minus_one = pi_of(ctx.q - 1);
    let mut c = Checks::default();
    c.value("p", ctx.p).value("tau'", &rest).value("|W|", &weyl);
    c.require("tau' ⊆ π(q-1)", rest.is_subset(&q_minus_one));
    for s in ctx.pi_effective.iter() {
        c.require(format!("{s} ∤ |W|"), weyl.exponent(s) == 0);
    }
    let mut firing = c.into_firing("Condition I")?;
    if spec.family().is_twisted() {
        firing.notes.push("weyl-convention: |W| of the ambient untwisted type".into());
    }
    Some(firing)
}

fn not_suzuki_ree_and_p_outside(spec: &SimpleGroupSpec, ctx: &PiContext) -> bool {
    !spec.family().is_suzuki_ree() && !ctx.p_in_pi() && ctx.r.is_some()
}

/// Condition II: some `t ∈ τ` has `b = e(q, t) ≠ a = e(q, r)` and one of
/// items (a)–(h) holds.
pub fn condition_ii(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if !not_suzuki_ree_and_p_outside(spec, ctx) {
        return None;
    }
    let r = ctx.r?;
    let a = ctx.e(r)?;
    let taus: Vec<(u64, u64)> = ctx.tau.iter().map(|s| (s, ctx.e(s).expect("s ≠ p"))).collect();
    let mut others: Vec<u64> = taus.iter().map(|&(_, e)| e).filter(|&e| e != a).collect();
    others.sort_unstable();
    others.dedup();
    // items (a)-(f) need e(q,s) = b for all s, and (g)-(h) need e(q,s) ∈ {a, b}:
    // more than one value different from a rules out every item
    let [b] = others[..] else { return None };
    let n = ctx.n as u64;
    let (rp_ok, rp) = r_part_is_r(ctx.q, r);
    let br1 = n / (r - 1);
    let br0 = n / r;
    let all_b = taus.iter().all(|&(_, e)| e == b);
    let all_a_or_b = taus.iter().all(|&(_, e)| e == a || e == b);
    let n_lt_bs = taus.iter().all(|&(s, _)| n < b * s);

    let base = |c: &mut Checks| {
        c.value("r", r).value("tau", &ctx.tau).value("a", a).value("b", b).value("n", n);
    };
    let linear = |item: char, bracket_shift: u64| -> Option<Firing> {
        let mut c = Checks::default();
        base(&mut c);
        c.require("a = r-1", a == r - 1);
        c.require("b = r", b == r);
        c.value("(q^(r-1)-1)_r", rp);
        c.require("(q^(r-1)-1)_r = r", rp_ok);
        c.value("[n/(r-1)]", br1).value("[n/r]", br0);
        c.require(format!("[n/(r-1)] = [n/r] + {bracket_shift}"), br1 == br0 + bracket_shift);
        if bracket_shift == 1 {
            c.require("n ≡ -1 (mod r)", (n + 1) % r == 0);
        }
        c.require("e(q,s) = b for all s ∈ τ", all_b);
        c.require("n < b·s for all s ∈ τ", n_lt_bs);
        c.into_firing(format!("Condition II({item})"))
    };
    let unitary = |item: char, r_mod4: u64, bracket_shift: u64| -> Option<Firing> {
        let mut c = Checks::default();
        base(&mut c);
        c.require(format!("r ≡ {r_mod4} (mod 4)"), r % 4 == r_mod4);
        if r_mod4 == 1 {
            c.require("a = r-1", a == r - 1);
        } else {
            c.require("a = (r-1)/2", 2 * a == r - 1);
        }
        c.require("b = 2r", b == 2 * r);
        c.value("(q^(r-1)-1)_r", rp);
        c.require("(q^(r-1)-1)_r = r", rp_ok);
        c.value("[n/(r-1)]", br1).value("[n/r]", br0);
        c.require(format!("[n/(r-1)] = [n/r] + {bracket_shift}"), br1 == br0 + bracket_shift);
        if bracket_shift == 1 {
            c.require("n ≡ -1 (mod r)", (n + 1) % r == 0);
        }
        c.require("e(q,s) = b for all s ∈ τ", all_b);
        c.into_firing(format!("Condition II({item})"))
    };
    let orthogonal = |item: char| -> Option<Firing> {
        let mut c = Checks::default();
        base(&mut c);
        if item == 'g' {
            c.require("a odd", a % 2 == 1);
            c.require("n = b = 2a", n == b && b == 2 * a);
        } else {
            c.require("b odd", b % 2 == 1);
            c.require("n = a = 2b", n == a && a == 2 * b);
        }
        c.require("e(q,s) ∈ {a,b} for all s ∈ τ", all_a_or_b);
        let mut f = c.into_firing(format!("Condition II({item})"))?;
        f.notes.push("cyclic Hall subgroup".into());
        Some(f)
    };
    match spec.family() {
        Family::A => linear('a', 0).or_else(|| linear('b', 1)),
        Family::TwistedA => unitary('c', 1, 0)
            .or_else(|| unitary('d', 3, 0))
            .or_else(|| unitary('e', 1, 1))
            .or_else(|| unitary('f', 3, 1)),
        Family::TwistedD => orthogonal('g').or_else(|| orthogonal('h')),
        _ => None,
    }
}

/// Condition III: `e(q, t) = c = e(q, r)` for every `t ∈ τ` together with the
/// family-specific bounds of items (a)–(o).
pub fn condition_iii(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if !not_suzuki_ree_and_p_outside(spec, ctx) {
        return None;
    }
    let r = ctx.r?;
    let c_val = ctx.e(r)?;
    if !ctx.tau.iter().all(|t| ctx.e(t) == Some(c_val)) {
        return None;
    }
    let n = ctx.n as u64;
    let tau = &ctx.tau;
    let all = |f: &dyn Fn(u64) -> bool| tau.iter().all(f);
    let not_in_tau = |xs: &[u64]| xs.iter().all(|&x| !tau.contains(x));
    let mut c = Checks::default();
    c.value("r", r).value("tau", tau).value("c", c_val).value("n", n);
    use Family::*;
    let item = match spec.family() {
        A => {
            c.require("n < c·t for all t ∈ τ", all(&|t| n < c_val * t));
            'a'
        }
        TwistedA => match c_val % 4 {
            0 => {
                c.require("n < c·t for all t ∈ τ", all(&|t| n < c_val * t));
                'b'
            }
            2 => {
                c.require("2n < c·t for all t ∈ τ", all(&|t| 2 * n < c_val * t));
                'c'
            }
            _ => {
                c.require("n < 2c·t for all t ∈ τ", all(&|t| n < 2 * c_val * t));
                'd'
            }
        },
        B | C | D | TwistedD => {
            let fam = spec.family();
            if c_val % 2 == 0 && matches!(fam, B | C | TwistedD) {
                c.require("2n < c·t for all t ∈ τ", all(&|t| 2 * n < c_val * t));
                'e'
            } else if c_val % 2 == 1 && matches!(fam, B | C | D) {
                c.require("n < c·t for all t ∈ τ", all(&|t| n < c_val * t));
                'f'
            } else if fam == D {
                c.require("2n ≤ c·t for all t ∈ τ", all(&|t| 2 * n <= c_val * t));
                'g'
            } else {
                c.require("n ≤ c·t for all t ∈ τ", all(&|t| n <= c_val * t));
                'h'
            }
        }
        TrialityD4 => 'i',
        E6 => {
            if r == 3 && c_val == 1 {
                c.require("5,13 ∉ τ", not_in_tau(&[5, 13]));
            }
            'j'
        }
        TwistedE6 => {
            if r == 3 && c_val == 2 {
                c.require("5,13 ∉ τ", not_in_tau(&[5, 13]));
            }
            'k'
        }
        E7 => {
            if r == 3 && c_val <= 2 {
                c.require("5,7,13 ∉ τ", not_in_tau(&[5, 7, 13]));
            }
            if r == 5 && c_val <= 2 {
                c.require("7 ∉ τ", not_in_tau(&[7]));
            }
            'l'
        }
        E8 => {
            if r == 3 && c_val <= 2 {
                c.require("5,7,13 ∉ τ", not_in_tau(&[5, 7, 13]));
            }
            if r == 5 && c_val <= 2 {
                c.require("7,31 ∉ τ", not_in_tau(&[7, 31]));
            }
            'm'
        }
        G2 => 'n',
        F4 => {
            if r == 3 && c_val == 1 {
                c.require("13 ∉ τ", not_in_tau(&[13]));
            }
            'o'
        }
        Suzuki | Ree | ReeF4 => return None,
    };
    c.into_firing(format!("Condition III({item})"))
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The cyclotomic-type divisor sets for ²B₂, ²G₂ and ²F₄, labelled by the
/// integer whose prime divisors they are.
pub fn suzuki_ree_sets(spec: &SimpleGroupSpec) -> Vec<(String, PrimeSet)> {
    let q = spec.q() as i128;
    let pi = |v: i128| pi_of(v as u64);
    match spec.family() {
        Family::Suzuki => {
            let s = isqrt(2 * spec.q()) as i128;
            vec![("q-1".into(), pi(q - 1)), ("q+√(2q)+1".into(), pi(q + s + 1)), ("q-√(2q)+1".into(), pi(q - s + 1))]
        }
        Family::Ree => {
            let s = isqrt(3 * spec.q()) as i128;
            let two = PrimeSet::singleton(2).unwrap();
            vec![
                ("q-1".into(), pi(q - 1).difference(&two)),
                ("q+√(3q)+1".into(), pi(q + s + 1).difference(&two)),
                ("q-√(3q)+1".into(), pi(q - s + 1).difference(&two)),
            ]
        }
        Family::ReeF4 => {
            let s = isqrt(2 * spec.q()) as i128;
            vec![
                ("q^2+1".into(), pi(q * q + 1)),
                ("q^2-1".into(), pi(q * q - 1)),
                ("q+√(2q)+1".into(), pi(q + s + 1)),
                ("q-√(2q)+1".into(), pi(q - s + 1)),
                ("q^2+q√(2q)-√(2q)-1".into(), pi(q * q + q * s - s - 1)),
                ("q^2-q√(2q)+√(2q)-1".into(), pi(q * q - q * s + s - 1)),
                ("q^2+q√(2q)+q+√(2q)+1".into(), pi(q * q + q * s + q + s + 1)),
                ("q^2-q√(2q)+q-√(2q)+1".into(), pi(q * q - q * s + q - s + 1)),
            ]
        }
        _ => Vec::new(),
    }
}

/// Condition IV: for ²B₂, ²G₂, ²F₄, `π ∩ π(S)` lies inside one of the listed
/// divisor sets.
pub fn condition_iv(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if !spec.family().is_suzuki_ree() {
        return None;
    }
    let item = match spec.family() {
        Family::Suzuki => 'a',
        Family::Ree => 'b',
        _ => 'c',
    };
    let (label, set) = suzuki_ree_sets(spec).into_iter().find(|(_, set)| ctx.pi_effective.is_subset(set))?;
    Some(Firing {
        tag: format!("Condition IV({item})"),
        witnesses: vec![
            ("pi∩π(S)".into(), ctx.pi_effective.to_string()),
            ("set".into(), label),
            ("π(set)".into(), set.to_string()),
        ],
        notes: Vec::new(),
    })
}

/// Item II(A) of the E_π∖D_π list: `p ∈ π`, `p | |W(S)|`, and every other
/// prime of `π ∩ π(S)` divides `q − 1` but not `|W(S)|`.
pub fn epi_item_char_in_pi(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if !ctx.p_in_pi() {
        return None;
    }
    let weyl = orders::weyl_order(spec);
    let mut c = Checks::default();
    c.value("p", ctx.p).value("|W|", &weyl);
    c.require("p | |W|", weyl.exponent(ctx.p) > 0);
    for t in ctx.pi_effective.without(ctx.p).iter() {
        c.require(format!("{t} | q-1"), (ctx.q - 1) % t == 0);
        c.require(format!("{t} ∤ |W|"), weyl.exponent(t) == 0);
    }
    c.into_firing("Item II-A")
}

/// Feasibility bound for linear and unitary E_π∖D_π cases:
/// `gcd(n, q − η)_π = 1` and `r ≤ n ≤ r(r − 2)`.
pub fn gl_feasibility(n: u64, q_minus_eta: u64, r: u64, pi: &PrimeSet) -> bool {
    let g = arith::gcd(n, q_minus_eta);
    let g_pi = arith::factor(g).expect("g >= 1").pi_part(pi);
    g_pi.is_one() && r <= n && n <= r * (r.saturating_sub(2))
}

/// Items (a)–(c) of the E_π∖D_π list for PSLₙ^η(q), evaluated without the
/// feasibility filter so the first failing check can be reported.
fn linear_unitary_item(spec: &SimpleGroupSpec, ctx: &PiContext) -> Result<Firing, String> {
    let r = ctx.r.ok_or("π ∩ π(S) is empty")?;
    if ctx.p_in_pi() {
        return Err(format!("characteristic p = {} lies in π", ctx.p));
    }
    if ctx.pi.contains(2) {
        return Err("2 ∈ π".into());
    }
    let n = ctx.n as u64;
    let e_r = ctx.e(r).expect("r ≠ p");
    let (rp_ok, rp) = r_part_is_r(ctx.q, r);
    let (item, eta_order) = match spec.family() {
        Family::A => ('a', 1),
        Family::TwistedA if r % 4 == 1 => ('b', 2),
        Family::TwistedA => ('c', 2),
        other => return Err(format!("family {other} is neither linear nor unitary")),
    };
    let mut c = Checks::default();
    c.value("r", r).value("tau", &ctx.tau).value("n", n).value("e(q,r)", e_r);
    match item {
        'a' => c.require("e(q,r) = r-1", e_r == r - 1),
        'b' => c.require("r ≡ 1 (mod 4)", r % 4 == 1) && c.require("e(q,r) = r-1", e_r == r - 1),
        _ => c.require("r ≡ 3 (mod 4)", r % 4 == 3) && c.require("e(q,r) = (r-1)/2", 2 * e_r == r - 1),
    };
    c.value("(q^(r-1)-1)_r", rp);
    c.require("(q^(r-1)-1)_r = r", rp_ok);
    c.value("[n/(r-1)]", n / (r - 1)).value("[n/r]", n / r);
    c.require(format!("bracket equality [{n}/{}] = [{n}/{r}]", r - 1), n / (r - 1) == n / r);
    for t in ctx.tau.iter() {
        c.require(format!("e(q,{t}) = {eta_order}"), ctx.e(t) == Some(eta_order));
        c.require(format!("n < {t}"), n < t);
    }
    if let Some(failed) = c.failed.clone() {
        return Err(failed);
    }
    let mut f = c.into_firing(format!("Item II-B({item})")).expect("all checks passed");
    // n = dr + k = d(r-1) + (d+k) with 0 < d+k < r-1
    let d = n / r;
    let k = n - d * r;
    assert!(d == n / (r - 1) && d + k > 0 && d + k < r - 1, "bracket identity violated");
    f.witnesses.push(("d".into(), d.to_string()));
    f.witnesses.push(("k".into(), k.to_string()));
    Ok(f)
}

fn exceptional_item(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if ctx.p_in_pi() {
        return None;
    }
    let eff = &ctx.pi_effective;
    let minus = pi_of(ctx.q - 1);
    let plus = pi_of(ctx.q + 1);
    let has = |xs: &[u64]| xs.iter().all(|&x| eff.contains(x));
    let lacks = |xs: &[u64]| xs.iter().all(|&x| !eff.contains(x));
    let in_minus = eff.is_subset(&minus);
    let in_plus = eff.is_subset(&plus);
    let mut c = Checks::default();
    c.value("pi∩π(S)", eff);
    let item = match spec.family() {
        Family::E6 => {
            c.require("π∩π(S) ⊆ π(q-1)", in_minus);
            c.require("3,13 ∈ π∩π(S)", has(&[3, 13]));
            c.require("5 ∉ π∩π(S)", lacks(&[5]));
            'd'
        }
        Family::TwistedE6 => {
            c.require("π∩π(S) ⊆ π(q+1)", in_plus);
            c.require("3,13 ∈ π∩π(S)", has(&[3, 13]));
            c.require("5 ∉ π∩π(S)", lacks(&[5]));
            'e'
        }
        Family::E7 => {
            c.require("π∩π(S) ⊆ π(q-1) or π(q+1)", in_minus || in_plus);
            c.require("3,13 ∈ π∩π(S)", has(&[3, 13]));
            c.require("5,7 ∉ π∩π(S)", lacks(&[5, 7]));
            'f'
        }
        Family::E8 => {
            c.require("π∩π(S) ⊆ π(q-1) or π(q+1)", in_minus || in_plus);
            if has(&[3, 13]) {
                c.require("5,7 ∉ π∩π(S)", lacks(&[5, 7]));
                'g'
            } else {
                c.require("5,31 ∈ π∩π(S)", has(&[5, 31]));
                c.require("3,7 ∉ π∩π(S)", lacks(&[3, 7]));
                'h'
            }
        }
        Family::F4 => {
            c.require("π∩π(S) ⊆ π(q-1) or π(q+1)", in_minus || in_plus);
            c.require("3,13 ∈ π∩π(S)", has(&[3, 13]));
            'i'
        }
        _ => return None,
    };
    c.into_firing(format!("Item II-B({item})"))
}

/// Items II(B)(a)–(i) of the E_π∖D_π list.
pub fn epi_item_char_outside(spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
    if ctx.p_in_pi() {
        return None;
    }
    match spec.family() {
        Family::A | Family::TwistedA => {
            let r = ctx.r?;
            let eta = if spec.family() == Family::A { Sign::Plus } else { Sign::Minus };
            let q_eta = (ctx.q as i64 - eta.as_i64()) as u64;
            if !gl_feasibility(ctx.n as u64, q_eta, r, &ctx.pi) {
                return None;
            }
            linear_unitary_item(spec, ctx).ok()
        }
        _ => exceptional_item(spec, ctx),
    }
}

type Eval = fn(&SimpleGroupSpec, &PiContext) -> Option<Firing>;

struct FnCriterion {
    name: &'static str,
    kind: CriterionKind,
    description: &'static str,
    eval: Eval,
}

impl Criterion for FnCriterion {
    fn name(&self) -> &'static str {
        self.name
    }
    fn kind(&self) -> CriterionKind {
        self.kind
    }
    fn description(&self) -> &'static str {
        self.description
    }
    fn evaluate(&self, spec: &SimpleGroupSpec, ctx: &PiContext) -> Option<Firing> {
        (self.eval)(spec, ctx)
    }
}

/// Named criteria, evaluated in registration order.
pub struct CriterionRegistry {
    entries: Vec<Box<dyn Criterion>>,
}

impl CriterionRegistry {
    pub fn empty() -> Self {
        CriterionRegistry { entries: Vec::new() }
    }

    /// Conditions I–IV followed by the E_π∖D_π detectors II(A) and II(B).
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        let table: [(&'static str, CriterionKind, &'static str, Eval); 6] = [
            ("condition-I", CriterionKind::Dpi, "p ∈ π, τ ⊆ π(q-1), π coprime to |W|", condition_i),
            ("condition-II", CriterionKind::Dpi, "two distinct orders e(q,·), items (a)-(h)", condition_ii),
            ("condition-III", CriterionKind::Dpi, "uniform order c = e(q,t), items (a)-(o)", condition_iii),
            ("condition-IV", CriterionKind::Dpi, "Suzuki and Ree groups, divisor sets", condition_iv),
            ("epi-II-A", CriterionKind::EpiNotDpi, "characteristic in π dividing |W|", epi_item_char_in_pi),
            (
                "epi-II-B",
                CriterionKind::EpiNotDpi,
                "linear, unitary and exceptional E∖D items (a)-(i)",
                epi_item_char_outside,
            ),
        ];
        for (name, kind, description, eval) in table {
            reg.register(Box::new(FnCriterion { name, kind, description, eval }));
        }
        reg
    }

    /// The standard criteria restricted to `names`, still in standard order.
    pub fn select<S: AsRef<str>>(names: &[S]) -> Result<Self, ClassifyError> {
        let mut reg = Self::standard();
        for n in names {
            if reg.get(n.as_ref()).is_none() {
                return Err(ClassifyError::UnknownCriterion(n.as_ref().to_string()));
            }
        }
        reg.entries.retain(|c| names.iter().any(|n| n.as_ref() == c.name()));
        Ok(reg)
    }

    pub fn register(&mut self, criterion: Box<dyn Criterion>) {
        self.entries.push(criterion);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Criterion> {
        self.entries.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Criterion> {
        self.entries.iter().map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|c| c.name()).collect()
    }

    /// Full classification of a simple group against π.
    pub fn classify(&self, group: &SimpleGroup, pi: &PrimeSet) -> Result<HallVerdict, ClassifyError> {
        let order = group.order()?;
        let spectrum = order.spectrum();
        let eff = pi.intersection(&spectrum);
        let name = group.to_string();
        if eff.len() <= 1 {
            let mut v = HallVerdict::new(name, pi.clone(), Status::Dpi);
            v.condition_tag = Some("sylow-trivial".into());
            v.citations.push("nilpotent Hall subgroup".into());
            v.witnesses.push(("pi∩π(S)".into(), eff.to_string()));
            return Ok(v);
        }
        if pi.contains(2) {
            let mut v = HallVerdict::new(name, pi.clone(), Status::Undetermined);
            v.condition_tag = Some("scope:2∈π".into());
            v.notes.push("no D_π criterion for 2 ∈ π; D_π = U_π still holds".into());
            return Ok(v);
        }
        let spec = match group {
            SimpleGroup::Lie(spec) => spec,
            SimpleGroup::Sporadic(Sporadic::ON) if eff.as_slice() == [3, 5] => {
                let mut v = HallVerdict::new(name, pi.clone(), Status::EpiNotDpi);
                v.condition_tag = Some("Item I".into());
                v.citations.push("Item I".into());
                v.witnesses.push(("pi∩π(S)".into(), eff.to_string()));
                return Ok(v);
            }
            _ => {
                let mut v = HallVerdict::new(name, pi.clone(), Status::Undetermined);
                v.condition_tag = Some("scope:non-Lie".into());
                v.notes.push("criteria for alternating and sporadic groups are not implemented".into());
                return Ok(v);
            }
        };
        let ctx = make_context(spec, pi)?;
        let mut checked = Vec::new();
        for kind in [CriterionKind::Dpi, CriterionKind::EpiNotDpi] {
            for crit in self.entries.iter().filter(|c| c.kind() == kind) {
                checked.push(crit.name().to_string());
                if let Some(firing) = crit.evaluate(spec, &ctx) {
                    let status = if kind == CriterionKind::Dpi { Status::Dpi } else { Status::EpiNotDpi };
                    let mut v = HallVerdict::new(name, pi.clone(), status).with_firing(firing);
                    v.notes.push(format!("checked: {}", checked.join(",")));
                    return Ok(v);
                }
            }
        }
        let mut v = HallVerdict::new(name, pi.clone(), Status::NotEpi);
        v.condition_tag = Some("none".into());
        v.witnesses.push(("pi∩π(S)".into(), eff.to_string()));
        v.notes.push(format!("checked: {}", checked.join(",")));
        Ok(v)
    }
}

fn standard_registry() -> &'static CriterionRegistry {
    static REGISTRY: OnceLock<CriterionRegistry> = OnceLock::new();
    REGISTRY.get_or_init(CriterionRegistry::standard)
}

pub fn classify_dpi(group: &SimpleGroup, pi: &PrimeSet) -> Result<HallVerdict, ClassifyError> {
    standard_registry().classify(group, pi)
}

pub fn classify_lie(spec: &SimpleGroupSpec, pi: &PrimeSet) -> Result<HallVerdict, ClassifyError> {
    classify_dpi(&SimpleGroup::Lie(*spec), pi)
}

/// The E_π∖D_π item for a simple group (O'N and Lie type), `None` if no item
/// applies. Only meaningful when `2 ∉ π`.
pub fn epi_minus_dpi_item(group: &SimpleGroup, pi: &PrimeSet) -> Result<Option<Firing>, ClassifyError> {
    match group {
        SimpleGroup::Sporadic(Sporadic::ON) => {
            let eff = pi.intersection(&group.order()?.spectrum());
            Ok((eff.as_slice() == [3, 5]).then(|| Firing {
                tag: "Item I".into(),
                witnesses: vec![("pi∩π(S)".into(), eff.to_string())],
                notes: Vec::new(),
            }))
        }
        SimpleGroup::Lie(spec) => {
            let ctx = make_context(spec, pi)?;
            if ctx.pi_effective.len() < 2 {
                return Ok(None);
            }
            Ok(epi_item_char_in_pi(spec, &ctx).or_else(|| epi_item_char_outside(spec, &ctx)))
        }
        _ => Ok(None),
    }
}

/// The E_π∖D_π regime for GLₙ^η(q) (items (a)–(c) on its simple section),
/// with `d = [n/r]` and `k = n − dr`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlRegime {
    pub gl: GLSpec,
    pub pi: PrimeSet,
    pub r: u64,
    pub tau: PrimeSet,
    pub d: u64,
    pub k: u64,
    pub item: String,
}

pub fn gl_regime(gl: &GLSpec, pi: &PrimeSet) -> Result<GlRegime, ClassifyError> {
    let fail = |reason: String| ClassifyError::Regime { gl: gl.to_string(), pi: pi.to_string(), reason };
    let spec = gl.simple_section().map_err(|e| fail(e.to_string()))?;
    let ctx = make_context(&spec, pi)?;
    if ctx.pi_effective.len() < 2 {
        return Err(fail("fewer than two primes of π divide the order".into()));
    }
    let firing = linear_unitary_item(&spec, &ctx).map_err(fail)?;
    let get = |k: &str| firing.witnesses.iter().find(|(n, _)| n == k).map(|(_, v)| v.parse::<u64>().unwrap());
    Ok(GlRegime {
        gl: *gl,
        pi: pi.clone(),
        r: ctx.r.unwrap(),
        tau: ctx.tau.clone(),
        d: get("d").unwrap(),
        k: get("k").unwrap(),
        item: firing.tag,
    })
}

/// `|GLₙ^η(q)|_π = (q − η)^n_τ · r^{[n/r]}` in the E_π∖D_π regime.
pub fn gl_hall_pi_order(gl: &GLSpec, pi: &PrimeSet) -> Result<FactoredInteger, ClassifyError> {
    let regime = gl_regime(gl, pi)?;
    let torus = arith::factor(gl.q_minus_eta()).expect("q - η >= 1").pi_part(&regime.tau);
    let r_part = FactoredInteger::prime_power(regime.r, (gl.n as u64 / regime.r) as u32).expect("r prime");
    Ok(torus.pow(gl.n).mul(&r_part))
}

/// D_π of a group from verdicts on its composition factors.
pub fn dpi_by_composition_factors(verdicts: &[HallVerdict]) -> Result<HallVerdict, ClassifyError> {
    let first = verdicts.first().ok_or(ClassifyError::NoFactors)?;
    let names: Vec<&str> = verdicts.iter().map(|v| v.group.as_str()).collect();
    let group = names.join(" | ");
    let refuting = verdicts.iter().position(|v| matches!(v.status, Status::EpiNotDpi | Status::NotEpi));
    let undetermined = verdicts.iter().any(|v| v.status == Status::Undetermined);
    let mut out = match refuting {
        Some(i) => {
            let not_epi = verdicts.iter().position(|v| v.status == Status::NotEpi);
            let status = if not_epi.is_some() { Status::NotEpi } else { Status::EpiNotDpi };
            let mut v = HallVerdict::new(group, first.pi.clone(), status);
            v.condition_tag = Some("composition-factors".into());
            v.witnesses.push(("refuting-factor".into(), (i + 1).to_string()));
            v.witnesses.push(("refuting-group".into(), verdicts[i].group.clone()));
            if status == Status::EpiNotDpi && undetermined {
                v.notes.push("E_π of the whole group assumes E_π of the undetermined factors".into());
            }
            v
        }
        None if undetermined => {
            let mut v = HallVerdict::new(group, first.pi.clone(), Status::Undetermined);
            v.condition_tag = Some("composition-factors".into());
            v
        }
        None => {
            let mut v = HallVerdict::new(group, first.pi.clone(), Status::Dpi);
            v.condition_tag = Some("composition-factors".into());
            v
        }
    };
    out.citations.push("D_π and U_π are decided by composition factors".into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(s: &str) -> PrimeSet {
        s.parse().unwrap()
    }

    fn lie(s: &str) -> SimpleGroupSpec {
        s.parse().unwrap()
    }

    fn classify(g: &str, p: &str) -> HallVerdict {
        classify_dpi(&g.parse().unwrap(), &pi(p)).unwrap()
    }

    #[test]
    fn context_examples() {
        let ctx = make_context(&lie("A1(7)"), &pi("3,7")).unwrap();
        assert_eq!(ctx.pi_effective, pi("3,7"));
        assert_eq!(ctx.r, Some(3));
        assert_eq!(ctx.tau, pi("7"));
        let ctx = make_context(&lie("A1(7)"), &pi("5,11")).unwrap();
        assert!(ctx.pi_effective.is_empty() && ctx.r.is_none());
        let ctx = make_context(&lie("A2(11)"), &pi("3,5")).unwrap();
        assert_eq!((ctx.r, ctx.e(3), ctx.e(5)), (Some(3), Some(2), Some(1)));
    }

    #[test]
    fn condition_i_examples() {
        let s = lie("A1(7)");
        assert_eq!(condition_i(&s, &make_context(&s, &pi("3,7")).unwrap()).unwrap().tag, "Condition I");
        assert_eq!(classify("A1(7)", "2,7").status, Status::Undetermined);
        let s = lie("A2(3)");
        assert!(condition_i(&s, &make_context(&s, &pi("3,13")).unwrap()).is_none());
    }

    #[test]
    fn condition_ii_examples() {
        let s = lie("A1(11)");
        assert!(condition_ii(&s, &make_context(&s, &pi("3,5")).unwrap()).is_none());
        // A2(2) ≅ A1(7): a = e(2,3) = 2, b = e(2,7) = 3
        let s = lie("A2(2)");
        assert_eq!(condition_ii(&s, &make_context(&s, &pi("3,7")).unwrap()).unwrap().tag, "Condition II(a)");
        // for r = 3 item (a) needs b = 3 with a = 2; e(q,3) = 3 is impossible so
        // b = r must come from a different prime t
        let s = lie("A2(11)");
        assert!(condition_ii(&s, &make_context(&s, &pi("3,5")).unwrap()).is_none());
    }

    #[test]
    fn condition_ii_twisted_d_item_g() {
        // 2D6(q) with e(q,r) = a = 3 and e(q,t) = 6 = n: q = 2, r = 7, t = 3? e(2,3) = 2.
        // Search small q for a case with a odd and b = 2a = n.
        let mut hit = None;
        'search: for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let s = SimpleGroupSpec::with_q(Family::TwistedD, 6, q).unwrap();
            let spectrum = orders::prime_spectrum_of_group(&s).unwrap();
            let odd: Vec<u64> = spectrum.iter().filter(|&t| t != 2 && t != s.p()).collect();
            for &r in &odd {
                for &t in &odd {
                    if t <= r {
                        continue;
                    }
                    let (a, b) = (mult_order(q as i64, r).unwrap(), mult_order(q as i64, t).unwrap());
                    if a == 3 && b == 6 {
                        hit = Some((s, pi(&format!("{r},{t}"))));
                        break 'search;
                    }
                }
            }
        }
        let (s, p) = hit.expect("some 2D6(q) has a = 3, b = 6");
        let f = condition_ii(&s, &make_context(&s, &p).unwrap()).unwrap();
        assert_eq!(f.tag, "Condition II(g)");
        assert!(f.notes.iter().any(|n| n.contains("cyclic")));
    }

    #[test]
    fn condition_iii_examples() {
        // A1(q), all primes of π dividing q - 1 and exceeding n = 2
        let s = lie("A1(31)");
        let f = condition_iii(&s, &make_context(&s, &pi("3,5")).unwrap()).unwrap();
        assert_eq!(f.tag, "Condition III(a)");
        let s = lie("A2(11)");
        assert!(condition_iii(&s, &make_context(&s, &pi("3,5")).unwrap()).is_none());
        let s = lie("3D4(2)");
        let f = condition_iii(&s, &make_context(&s, &pi("7,13")).unwrap());
        assert!(f.is_none(), "e(2,7) = 3 ≠ e(2,13) = 12");
        let f = condition_iii(&s, &make_context(&s, &pi("3,7")).unwrap());
        assert!(f.is_none(), "e(2,3) = 2 ≠ e(2,7) = 3");
        let s = lie("3D4(43)");
        let f = condition_iii(&s, &make_context(&s, &pi("3,7")).unwrap()).unwrap();
        assert_eq!(f.tag, "Condition III(i)");
    }

    #[test]
    fn condition_iv_examples() {
        let s = lie("2B2(8)");
        assert!(condition_iv(&s, &make_context(&s, &pi("5,13")).unwrap()).is_none());
        assert!(condition_iv(&s, &make_context(&s, &pi("5,7")).unwrap()).is_none());
        assert_eq!(classify("2G2(27)", "13").condition_tag.as_deref(), Some("sylow-trivial"));
        // 2B2(32): q-1 = 31, q+8+1 = 41, q-8+1 = 25
        let s = lie("2B2(32)");
        assert!(condition_iv(&s, &make_context(&s, &pi("5,41")).unwrap()).is_none());
        // 2B2(128): q - 1 = 127, q + 16 + 1 = 145 = 5·29, q - 16 + 1 = 113
        let s = lie("2B2(128)");
        let f = condition_iv(&s, &make_context(&s, &pi("5,29")).unwrap()).unwrap();
        assert_eq!(f.tag, "Condition IV(a)");
    }

    #[test]
    fn suzuki_ree_sets_divide_order() {
        for g in ["2B2(8)", "2B2(32)", "2G2(27)", "2F4(8)"] {
            let s = lie(g);
            let spectrum = orders::prime_spectrum_of_group(&s).unwrap();
            for (label, set) in suzuki_ree_sets(&s) {
                assert!(set.is_subset(&spectrum), "{g}: {label} gives {set}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let v = classify("A1(7)", "3,7");
        assert_eq!((v.status, v.condition_tag.as_deref()), (Status::Dpi, Some("Condition I")));
        assert!(v.upi);
        let v = classify("A2(11)", "3,5");
        assert_eq!((v.status, v.condition_tag.as_deref()), (Status::EpiNotDpi, Some("Item II-B(a)")));
        assert!(!v.upi);
        assert_eq!(v.witness("d"), Some("1"));
        assert_eq!(classify("A1(11)", "3,5").status, Status::NotEpi);
        let v = classify("2A2(4)", "3,5");
        assert_eq!((v.status, v.condition_tag.as_deref()), (Status::EpiNotDpi, Some("Item II-B(c)")));
        let v = classify("O'N", "3,5");
        assert_eq!((v.status, v.condition_tag.as_deref()), (Status::EpiNotDpi, Some("Item I")));
        assert_eq!(classify("O'N", "3,7").status, Status::Undetermined);
        assert_eq!(classify("Alt(7)", "3,5").status, Status::Undetermined);
        assert_eq!(classify("Alt(7)", "11,13").status, Status::Dpi);
    }

    #[test]
    fn epi_minus_dpi_examples() {
        let on: SimpleGroup = "O'N".parse().unwrap();
        assert_eq!(epi_minus_dpi_item(&on, &pi("3,5")).unwrap().unwrap().tag, "Item I");
        let g: SimpleGroup = "2A2(4)".parse().unwrap();
        let f = epi_minus_dpi_item(&g, &pi("3,5")).unwrap().unwrap();
        assert_eq!(f.tag, "Item II-B(c)");
        assert!(f.witnesses.contains(&("e(q,r)".into(), "1".into())));
        assert!(f.witnesses.contains(&("(q^(r-1)-1)_r".into(), "3".into())));
        let g: SimpleGroup = "A2(11)".parse().unwrap();
        assert!(epi_minus_dpi_item(&g, &pi("5,37")).unwrap().is_none());
        assert!(!gl_feasibility(3, 10, 5, &pi("5,37")));
    }

    #[test]
    fn exceptional_items() {
        // E6(q) with 3, 13 | q - 1 and 5 ∤ |S| ∩ π: q = 79 (78 = 2·3·13)
        let g: SimpleGroup = "E6(79)".parse().unwrap();
        match classify_dpi(&g, &pi("3,13")) {
            Ok(v) => assert_eq!((v.status, v.condition_tag.as_deref()), (Status::EpiNotDpi, Some("Item II-B(d)"))),
            Err(ClassifyError::Order(OrderError::Arith(_))) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn hall_orders() {
        let gl = GLSpec::new(3, Sign::Plus, 11).unwrap();
        assert_eq!(gl_hall_pi_order(&gl, &pi("3,5")).unwrap().to_u64(), Some(375));
        let gu = GLSpec::new(3, Sign::Minus, 4).unwrap();
        assert_eq!(gl_hall_pi_order(&gu, &pi("3,5")).unwrap().to_u64(), Some(375));
        let gl2 = GLSpec::new(2, Sign::Plus, 11).unwrap();
        match gl_hall_pi_order(&gl2, &pi("3,5")) {
            Err(ClassifyError::Regime { reason, .. }) => assert!(reason.contains("bracket equality"), "{reason}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn composition_factor_logic() {
        let d = classify("A1(7)", "3,7");
        let n = classify("A1(11)", "3,5");
        let u = classify("Alt(7)", "3,5");
        assert_eq!(dpi_by_composition_factors(&[d.clone(), d.clone()]).unwrap().status, Status::Dpi);
        let v = dpi_by_composition_factors(&[d.clone(), n]).unwrap();
        assert_eq!(v.status, Status::NotEpi);
        assert_eq!(v.witness("refuting-factor"), Some("2"));
        assert_eq!(dpi_by_composition_factors(&[d, u]).unwrap().status, Status::Undetermined);
        assert_eq!(dpi_by_composition_factors(&[]), Err(ClassifyError::NoFactors));
    }

    #[test]
    fn registry_lookup() {
        let reg = CriterionRegistry::standard();
        assert_eq!(
            reg.names(),
            ["condition-I", "condition-II", "condition-III", "condition-IV", "epi-II-A", "epi-II-B"]
        );
        assert!(reg.get("condition-III").is_some());
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn selected_registry() {
        let g: SimpleGroup = "A2(11)".parse().unwrap();
        let pi: PrimeSet = "3,5".parse().unwrap();
        let reg = CriterionRegistry::select(&["epi-II-B", "condition-I"]).unwrap();
        assert_eq!(reg.names(), ["condition-I", "epi-II-B"]);
        assert_eq!(reg.classify(&g, &pi).unwrap().status, Status::EpiNotDpi);
        let reg = CriterionRegistry::select(&["condition-I"]).unwrap();
        assert_eq!(reg.classify(&g, &pi).unwrap().status, Status::NotEpi);
        assert!(matches!(CriterionRegistry::select(&["x"]), Err(ClassifyError::UnknownCriterion(_))));
    }
}
