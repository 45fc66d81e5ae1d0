//! Definition-level checks on small permutation groups: Hall subgroups,
//! C_π, D_π, property (*), pronormality, strong pronormality and overgroups.
//!
//! A [`PermGroup`] is fully enumerated. Subgroups are bitsets over its
//! element indices, and every search can be restricted to a subgroup
//! `within`, so the same code decides D_π for overgroups of a Hall subgroup.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arith::{self, PrimeSet};

/// Default cap on enumerated permutation group orders.
pub const DEFAULT_PERM_BOUND: usize = 200_000;

const TABLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("malformed permutation `{text}`: {reason}")]
    Cycle { text: String, reason: String },
    #[error("point {point} outside 1..={degree}")]
    Point { point: usize, degree: usize },
    #[error("group order exceeds the enumeration bound {0}")]
    BoundExceeded(usize),
    #[error("the given set is not a subgroup of the ambient group")]
    NotSubgroup,
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("D_π strategies disagree for π = {pi}: {detail}")]
    StrategiesDisagree { pi: String, detail: String },
}

type Result<T> = std::result::Result<T, OracleError>;

/// A permutation of `{0, …, n−1}`; displayed and parsed 1-based in cycle
/// notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u16).collect())
    }

    pub fn from_images(images: Vec<u16>) -> Result<Perm> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize).ok_or_else(|| OracleError::Cycle {
                text: format!("{images:?}"),
                reason: "image out of range".into(),
            })?;
            if std::mem::replace(slot, true) {
                return Err(OracleError::Cycle { text: format!("{images:?}"), reason: "not a bijection".into() });
            }
        }
        Ok(Perm(images))
    }

    /// Parses `(1,2,3)(4,5)` (spaces allowed, `()` is the identity).
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Perm> {
        let bad = |reason: &str| OracleError::Cycle { text: text.to_string(), reason: reason.to_string() };
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut moved = vec![false; degree];
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let cycle = &body[..close];
            rest = &body[close + 1..];
            if cycle.is_empty() {
                continue;
            }
            let points = cycle
                .split(',')
                .map(|s| s.parse::<usize>().map_err(|_| bad("non-numeric point")))
                .collect::<Result<Vec<_>>>()?;
            for &pt in &points {
                if pt == 0 || pt > degree {
                    return Err(OracleError::Point { point: pt, degree });
                }
                if std::mem::replace(&mut moved[pt - 1], true) {
                    return Err(bad("point repeated"));
                }
            }
            for (i, &pt) in points.iter().enumerate() {
                images[pt - 1] = (points[(i + 1) % points.len()] - 1) as u16;
            }
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u16;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1, |acc, c| {
            let l = c.len() as u64;
            acc / arith::gcd(acc, l) * l
        })
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(","))?;
        }
        Ok(())
    }
}

/// Fixed-size set of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitset(Vec<u64>);

impl Bitset {
    pub fn new(n: usize) -> Bitset {
        Bitset(vec![0; n.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Bitset) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// A subgroup of an enumerated [`PermGroup`], by element indices.
#[derive(Debug, Clone)]
pub struct Subgroup {
    members: Bitset,
    elements: Vec<u32>,
    gens: Vec<u32>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.members.contains(i as usize)
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn gens(&self) -> &[u32] {
        &self.gens
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// A fully enumerated permutation group; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, u32>,
    table: Option<Vec<u32>>,
    inv: Vec<u32>,
    orders: Vec<u64>,
}

impl PermGroup {
    pub fn generate(degree: usize, gens: Vec<Perm>, bound: usize) -> Result<PermGroup> {
        for g in &gens {
            if g.degree() != degree {
                return Err(OracleError::Point { point: g.degree(), degree });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0u32)]);
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head].clone();
            head += 1;
            for g in &gens {
                let y = x.then(g);
                if !index.contains_key(&y) {
                    if elements.len() >= bound {
                        return Err(OracleError::BoundExceeded(bound));
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&a.then(b)]);
                }
            }
            t
        });
        let inv = elements.iter().map(|e| index[&e.inverse()]).collect();
        let orders = elements.iter().map(Perm::order).collect();
        Ok(PermGroup { degree, gens, elements, index, table, inv, orders })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: u32) -> &Perm {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, p: &Perm) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn element_order(&self, i: u32) -> u64 {
        self.orders[i as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => self.index[&self.elements[a as usize].then(&self.elements[b as usize])],
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// `g⁻¹ x g`.
    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn prime_spectrum(&self) -> PrimeSet {
        arith::factor(self.order() as u64).expect("order >= 1").spectrum()
    }

    pub fn whole(&self) -> Subgroup {
        let mut members = Bitset::new(self.order());
        for i in 0..self.order() {
            members.insert(i);
        }
        let gens = self.gens.iter().map(|g| self.index[g]).collect();
        Subgroup { members, elements: (0..self.order() as u32).collect(), gens }
    }

    /// The subgroup generated by permutations, which must lie in the group.
    pub fn subgroup(&self, gens: &[Perm]) -> Result<Subgroup> {
        let idx = gens.iter().map(|g| self.index_of(g).ok_or(OracleError::NotSubgroup)).collect::<Result<Vec<_>>>()?;
        Ok(self.closure(&idx, usize::MAX, &|_| true).expect("unrestricted closure"))
    }

    /// `⟨gens⟩`, or `None` as soon as an element fails `allowed` or the
    /// order passes `limit`.
    pub fn closure(&self, gens: &[u32], limit: usize, allowed: &dyn Fn(u32) -> bool) -> Option<Subgroup> {
        let mut members = Bitset::new(self.order());
        members.insert(0);
        let mut elements = vec![0u32];
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if members.insert(y as usize) {
                    if !allowed(y) || elements.len() >= limit {
                        return None;
                    }
                    elements.push(y);
                }
            }
        }
        elements.sort_unstable();
        let mut gens = gens.to_vec();
        gens.retain(|&g| g != 0);
        Some(Subgroup { members, elements, gens })
    }

    pub fn conjugate(&self, h: &Subgroup, g: u32) -> Subgroup {
        let mut members = Bitset::new(self.order());
        let mut elements: Vec<u32> = h.elements.iter().map(|&x| self.conj(x, g)).collect();
        for &e in &elements {
            members.insert(e as usize);
        }
        elements.sort_unstable();
        Subgroup { members, elements, gens: h.gens.iter().map(|&x| self.conj(x, g)).collect() }
    }

    fn conjugates_into(&self, h: &Subgroup, g: u32, target: &Subgroup) -> bool {
        h.gens.iter().all(|&x| target.contains(self.conj(x, g)))
    }

    fn invariant(&self, h: &Subgroup) -> Vec<(u64, usize)> {
        let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
        for &e in &h.elements {
            *hist.entry(self.element_order(e)).or_default() += 1;
        }
        hist.into_iter().collect()
    }

    /// Some `g ∈ within` with `a^g = b`.
    pub fn conjugating_element(&self, a: &Subgroup, b: &Subgroup, within: &Subgroup) -> Option<u32> {
        if a.order() != b.order() || self.invariant(a) != self.invariant(b) {
            return None;
        }
        within.elements.iter().copied().find(|&g| self.conjugates_into(a, g, b))
    }

    /// Distinct conjugates `h^g`, `g ∈ within`.
    pub fn conjugates(&self, h: &Subgroup, within: &Subgroup) -> Vec<Subgroup> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &g in &within.elements {
            let c = self.conjugate(h, g);
            if seen.insert(c.members.clone()) {
                out.push(c);
            }
        }
        out
    }

    fn is_pi_element(&self, x: u32, pi: &PrimeSet) -> bool {
        pi.is_pi_number(self.element_order(x))
    }

    /// Classes, under conjugation by `within`, of the subgroups of `within`
    /// whose elements all satisfy `allowed`, found by extending class
    /// representatives one element at a time from the trivial subgroup.
    pub fn subgroup_classes(
        &self,
        within: &Subgroup,
        allowed: &dyn Fn(u32) -> bool,
        limit: usize,
    ) -> Vec<SubgroupClass> {
        let candidates: Vec<u32> = within.elements.iter().copied().filter(|&x| x != 0 && allowed(x)).collect();
        let trivial = self.closure(&[], 1, &|_| true).expect("trivial subgroup");
        let mut classes = vec![SubgroupClass { rep: trivial.clone(), maximal: true }];
        let mut keys = vec![self.invariant(&trivial)];
        let mut seen = HashSet::from([trivial.members.clone()]);
        let mut head = 0;
        while head < classes.len() {
            let rep = classes[head].rep.clone();
            for &x in &candidates {
                if rep.contains(x) {
                    continue;
                }
                let mut gens = rep.gens.clone();
                gens.push(x);
                let Some(v) = self.closure(&gens, limit, allowed) else { continue };
                classes[head].maximal = false;
                if !seen.insert(v.members.clone()) {
                    continue;
                }
                let key = self.invariant(&v);
                let known = classes
                    .iter()
                    .zip(&keys)
                    .any(|(c, k)| *k == key && self.conjugating_element(&c.rep, &v, within).is_some());
                if !known {
                    classes.push(SubgroupClass { rep: v, maximal: true });
                    keys.push(key);
                }
            }
            head += 1;
        }
        classes
    }

    /// π-subgroup classes of `within`, with the Hall order `|within|_π`.
    pub fn analyze_pi(&self, within: &Subgroup, pi: &PrimeSet) -> PiAnalysis {
        let hall_order =
            arith::factor(within.order() as u64).expect("order >= 1").pi_part(pi).to_u64().expect("fits") as usize;
        let classes = self.subgroup_classes(within, &|x| self.is_pi_element(x, pi), hall_order);
        PiAnalysis { pi: pi.clone(), hall_order, classes }
    }

    pub fn maximal_pi_subgroups(&self, pi: &PrimeSet) -> Vec<Subgroup> {
        self.analyze_pi(&self.whole(), pi).maximal().cloned().collect()
    }

    pub fn has_hall(&self, pi: &PrimeSet) -> Option<Subgroup> {
        self.analyze_pi(&self.whole(), pi).halls().next().cloned()
    }

    pub fn check_cpi(&self, pi: &PrimeSet) -> bool {
        self.analyze_pi(&self.whole(), pi).halls().count() == 1
    }

    pub fn check_dpi(&self, pi: &PrimeSet) -> Result<bool> {
        self.check_dpi_within(&self.whole(), pi)
    }

    /// D_π of `within`, decided by every registered strategy; they must agree.
    pub fn check_dpi_within(&self, within: &Subgroup, pi: &PrimeSet) -> Result<bool> {
        let analysis = self.analyze_pi(within, pi);
        let verdicts: Vec<(&str, bool)> =
            dpi_strategies().iter().map(|s| (s.name(), s.decide(self, within, &analysis))).collect();
        if verdicts.windows(2).any(|w| w[0].1 != w[1].1) {
            return Err(OracleError::StrategiesDisagree { pi: pi.to_string(), detail: format!("{verdicts:?}") });
        }
        Ok(verdicts[0].1)
    }

    fn check_inside(&self, h: &Subgroup, g: &Subgroup) -> Result<()> {
        if h.is_subgroup_of(g) {
            Ok(())
        } else {
            Err(OracleError::NotSubgroup)
        }
    }

    /// For all `g`: `h^g = h^x` for some `x ∈ ⟨h, h^g⟩`.
    pub fn is_pronormal(&self, h: &Subgroup, within: &Subgroup) -> Result<bool> {
        self.check_inside(h, within)?;
        Ok(self.conjugates(h, within).iter().all(|hg| {
            if hg == h {
                return true;
            }
            let mut gens = h.gens.clone();
            gens.extend(&hg.gens);
            let j = self.closure(&gens, usize::MAX, &|_| true).expect("unrestricted closure");
            j.elements.iter().any(|&x| self.conjugates_into(h, x, hg))
        }))
    }

    /// For all `K ≤ h` and `g`: `K^{gx} ≤ h` for some `x ∈ ⟨h, K^g⟩`.
    pub fn is_strongly_pronormal(&self, h: &Subgroup, within: &Subgroup) -> Result<bool> {
        self.check_inside(h, within)?;
        // the condition for (K^y, g) with y ∈ h is the condition for (K, yg),
        // so one K per h-class suffices
        let reps = self.subgroup_classes(h, &|_| true, h.order());
        for class in &reps {
            for kg in self.conjugates(&class.rep, within) {
                if kg.is_subgroup_of(h) {
                    continue;
                }
                let mut gens = h.gens.clone();
                gens.extend(&kg.gens);
                let j = self.closure(&gens, usize::MAX, &|_| true).expect("unrestricted closure");
                if !j.elements.iter().any(|&x| self.conjugates_into(&kg, x, h)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Every `M` with `h ≤ M ≤ within`.
    pub fn overgroups(&self, h: &Subgroup, within: &Subgroup) -> Result<Vec<Subgroup>> {
        self.check_inside(h, within)?;
        let mut found = vec![h.clone()];
        let mut seen = HashSet::from([h.members.clone()]);
        let mut head = 0;
        while head < found.len() {
            let m = found[head].clone();
            head += 1;
            for &x in &within.elements {
                if m.contains(x) {
                    continue;
                }
                let mut gens = m.gens.clone();
                gens.push(x);
                let v = self.closure(&gens, usize::MAX, &|_| true).expect("unrestricted closure");
                if seen.insert(v.members.clone()) {
                    found.push(v);
                }
            }
        }
        found.sort_by_key(Subgroup::order);
        Ok(found)
    }

    /// Every overgroup of every π-Hall subgroup satisfies D_π.
    pub fn verify_main_theorem(&self, pi: &PrimeSet) -> Result<MainTheoremReport> {
        let whole = self.whole();
        let analysis = self.analyze_pi(&whole, pi);
        let mut report = MainTheoremReport { applicable: false, reason: None, pairs: Vec::new(), passed: false };
        if !self.check_dpi_within(&whole, pi)? {
            report.reason = Some("not D_π".into());
            return Ok(report);
        }
        report.applicable = true;
        for h in analysis.halls() {
            for m in self.overgroups(h, &whole)? {
                let dpi = self.check_dpi_within(&m, pi)?;
                report.pairs.push(OvergroupCheck { hall_order: h.order(), overgroup_order: m.order(), dpi });
            }
        }
        report.passed = report.pairs.iter().all(|p| p.dpi);
        Ok(report)
    }

    /// Every π-subgroup has a normal abelian τ-Hall subgroup, where
    /// `τ = (π ∩ π(G)) ∖ {min}`.
    pub fn check_star_property(&self, pi: &PrimeSet) -> bool {
        let eff = pi.intersection(&self.prime_spectrum());
        let Some(r) = PrimeSet::min(&eff) else { return true };
        let tau = eff.without(r);
        let analysis = self.analyze_pi(&self.whole(), pi);
        analysis.classes.iter().all(|c| self.has_normal_abelian_hall(&c.rep, &tau))
    }

    fn has_normal_abelian_hall(&self, u: &Subgroup, tau: &PrimeSet) -> bool {
        let tau_elems: Vec<u32> = u.elements.iter().copied().filter(|&x| self.is_pi_element(x, tau)).collect();
        let want = arith::factor(u.order() as u64).expect("order >= 1").pi_part(tau).to_u64().expect("fits") as usize;
        if tau_elems.len() != want {
            return false;
        }
        let abelian = tau_elems
            .iter()
            .enumerate()
            .all(|(i, &a)| tau_elems[i + 1..].iter().all(|&b| self.mul(a, b) == self.mul(b, a)));
        // an abelian set of τ-elements closed under products is the subgroup
        abelian
            && tau_elems.iter().all(|&a| tau_elems.iter().all(|&b| tau_elems.binary_search(&self.mul(a, b)).is_ok()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupClass {
    pub rep: Subgroup,
    /// No element outside `rep` generates a larger subgroup of the family.
    pub maximal: bool,
}

#[derive(Debug, Clone)]
pub struct PiAnalysis {
    pub pi: PrimeSet,
    pub hall_order: usize,
    pub classes: Vec<SubgroupClass>,
}

impl PiAnalysis {
    pub fn halls(&self) -> impl Iterator<Item = &Subgroup> {
        self.classes.iter().filter(move |c| c.rep.order() == self.hall_order).map(|c| &c.rep)
    }

    pub fn maximal(&self) -> impl Iterator<Item = &Subgroup> {
        self.classes.iter().filter(|c| c.maximal).map(|c| &c.rep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OvergroupCheck {
    pub hall_order: usize,
    pub overgroup_order: usize,
    pub dpi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainTheoremReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub pairs: Vec<OvergroupCheck>,
    pub passed: bool,
}

/// A way of deciding D_π from the π-subgroup classes of a group.
pub trait DpiStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn decide(&self, group: &PermGroup, within: &Subgroup, analysis: &PiAnalysis) -> bool;
}

/// One class of π-Hall subgroups, and every π-subgroup lies in one of them.
pub struct DefinitionStrategy;

impl DpiStrategy for DefinitionStrategy {
    fn name(&self) -> &'static str {
        "definition"
    }

    fn decide(&self, group: &PermGroup, within: &Subgroup, analysis: &PiAnalysis) -> bool {
        let halls: Vec<&Subgroup> = analysis.halls().collect();
        let [hall] = halls[..] else { return false };
        analysis.classes.iter().all(|c| within.elements.iter().any(|&g| group.conjugates_into(&c.rep, g, hall)))
    }
}

/// The maximal π-subgroups form one class, of Hall order.
pub struct MaximalClassesStrategy;

impl DpiStrategy for MaximalClassesStrategy {
    fn name(&self) -> &'static str {
        "maximal-classes"
    }

    fn decide(&self, _group: &PermGroup, _within: &Subgroup, analysis: &PiAnalysis) -> bool {
        let maximal: Vec<&Subgroup> = analysis.maximal().collect();
        maximal.len() == 1 && maximal[0].order() == analysis.hall_order
    }
}

pub fn dpi_strategies() -> &'static [&'static dyn DpiStrategy] {
    &[&DefinitionStrategy, &MaximalClassesStrategy]
}

pub fn dpi_strategy(name: &str) -> Result<&'static dyn DpiStrategy> {
    dpi_strategies().iter().copied().find(|s| s.name() == name).ok_or_else(|| OracleError::UnknownStrategy(name.into()))
}

/// A way of computing the order of a permutation group from generators.
pub trait OrderStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn order(&self, degree: usize, gens: &[Perm]) -> Result<u128>;
}

pub struct EnumerationOrder {
    pub bound: usize,
}

impl OrderStrategy for EnumerationOrder {
    fn name(&self) -> &'static str {
        "enumeration"
    }

    fn order(&self, degree: usize, gens: &[Perm]) -> Result<u128> {
        Ok(PermGroup::generate(degree, gens.to_vec(), self.bound)?.order() as u128)
    }
}

pub struct SchreierSimsOrder;

impl OrderStrategy for SchreierSimsOrder {
    fn name(&self) -> &'static str {
        "schreier-sims"
    }

    fn order(&self, degree: usize, gens: &[Perm]) -> Result<u128> {
        Ok(StabilizerChain::new(degree, gens).order())
    }
}

pub fn order_strategy(name: &str, bound: usize) -> Result<Box<dyn OrderStrategy>> {
    match name {
        "enumeration" => Ok(Box::new(EnumerationOrder { bound })),
        "schreier-sims" => Ok(Box::new(SchreierSimsOrder)),
        other => Err(OracleError::UnknownStrategy(other.into())),
    }
}

pub const ORDER_STRATEGIES: [&str; 2] = ["enumeration", "schreier-sims"];

/// Keeps at most one generator per (first moved point, its image), without
/// changing the generated group.
fn sims_filter(degree: usize, gens: impl IntoIterator<Item = Perm>) -> Vec<Perm> {
    let mut table: HashMap<(usize, usize), Perm> = HashMap::new();
    for mut g in gens {
        while let Some(i) = (0..degree).find(|&i| g.apply(i) != i) {
            let j = g.apply(i);
            match table.get(&(i, j)) {
                Some(h) => g = g.then(&h.inverse()),
                None => {
                    table.insert((i, j), g);
                    break;
                }
            }
        }
    }
    let mut out: Vec<Perm> = table.into_values().collect();
    out.sort();
    out
}

/// Base, basic orbits and transversals.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    levels: Vec<(usize, HashMap<usize, Perm>)>,
}

impl StabilizerChain {
    pub fn new(degree: usize, gens: &[Perm]) -> StabilizerChain {
        let mut levels = Vec::new();
        let mut current = sims_filter(degree, gens.iter().cloned());
        while !current.is_empty() {
            let base = (0..degree).find(|&p| current.iter().any(|g| g.apply(p) != p)).expect("non-identity generator");
            let mut transversal = HashMap::from([(base, Perm::identity(degree))]);
            let mut queue = vec![base];
            while let Some(pt) = queue.pop() {
                let u = transversal[&pt].clone();
                for g in &current {
                    let img = g.apply(pt);
                    if let Entry::Vacant(slot) = transversal.entry(img) {
                        slot.insert(u.then(g));
                        queue.push(img);
                    }
                }
            }
            let schreier = transversal.iter().flat_map(|(&pt, u)| {
                let transversal = &transversal;
                current.iter().map(move |g| u.then(g).then(&transversal[&g.apply(pt)].inverse()))
            });
            let next = sims_filter(degree, schreier.collect::<Vec<_>>());
            levels.push((base, transversal));
            current = next;
        }
        StabilizerChain { levels }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|(_, t)| t.len() as u128).product()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|(b, _)| *b).collect()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        let mut g = p.clone();
        for (base, transversal) in &self.levels {
            match transversal.get(&g.apply(*base)) {
                Some(u) => g = g.then(&u.inverse()),
                None => return false,
            }
        }
        g.is_identity()
    }
}

/// The generators of a group in cycle notation, space separated.
pub fn format_gens(gens: &[Perm]) -> String {
    gens.iter().map(Perm::to_string).collect::<Vec<_>>().join(" ")
}

impl FromStr for Perm {
    type Err = OracleError;

    /// Degree taken from the largest point mentioned.
    fn from_str(s: &str) -> Result<Perm> {
        let degree = s.split(|c: char| !c.is_ascii_digit()).filter_map(|t| t.parse::<usize>().ok()).max().unwrap_or(0);
        Perm::parse_cycles(degree, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pi(s: &str) -> PrimeSet {
        s.parse().unwrap()
    }

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        let gens = gens.iter().map(|g| Perm::parse_cycles(degree, g).unwrap()).collect();
        PermGroup::generate(degree, gens, DEFAULT_PERM_BOUND).unwrap()
    }

    fn a5() -> PermGroup {
        group(5, &["(1,2,3,4,5)", "(1,2,3)"])
    }

    fn psl27() -> PermGroup {
        // x ↦ x + 1 and x ↦ -1/x on the projective line over F_7, ∞ = 8
        group(8, &["(1,2,3,4,5,6,7)", "(1,8)(2,7)(3,4)(5,6)"])
    }

    fn s3() -> PermGroup {
        group(3, &["(1,2,3)", "(1,2)"])
    }

    #[test]
    fn parsing_and_display() {
        let p = Perm::parse_cycles(5, "(1,2,3)(4, 5)").unwrap();
        assert_eq!(p.to_string(), "(1,2,3)(4,5)");
        assert_eq!(p.order(), 6);
        assert_eq!(Perm::parse_cycles(3, "()").unwrap(), Perm::identity(3));
        assert!(matches!(Perm::parse_cycles(3, "(1,4)"), Err(OracleError::Point { point: 4, .. })));
        assert!(Perm::parse_cycles(3, "(1,2,1)").is_err());
        assert!(Perm::parse_cycles(3, "(1,2").is_err());
        assert!(Perm::parse_cycles(3, "1,2").is_err());
        assert_eq!("(1,3)".parse::<Perm>().unwrap().degree(), 3);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(PermGroup::generate(4, vec![], 10).unwrap().order(), 1);
        assert_eq!(a5().order(), 60);
        assert_eq!(psl27().order(), 168);
        assert!(matches!(PermGroup::generate(5, a5().gens().to_vec(), 59), Err(OracleError::BoundExceeded(59))));
    }

    #[test]
    fn schreier_sims_matches_enumeration() {
        for g in [a5(), psl27(), s3(), group(7, &["(1,2,3,4,5,6,7)", "(1,2,3)"])] {
            let chain = StabilizerChain::new(g.degree(), g.gens());
            assert_eq!(chain.order(), g.order() as u128);
            assert!(g.elements.iter().all(|e| chain.contains(e)));
        }
        let s7 = StabilizerChain::new(
            7,
            &[Perm::parse_cycles(7, "(1,2,3,4,5,6,7)").unwrap(), Perm::parse_cycles(7, "(1,2)").unwrap()],
        );
        assert_eq!(s7.order(), 5040);
        assert!(!StabilizerChain::new(5, a5().gens()).contains(&Perm::parse_cycles(5, "(1,2)").unwrap()));
    }

    #[test]
    fn maximal_pi_subgroup_examples() {
        let m = a5().maximal_pi_subgroups(&pi("5"));
        assert_eq!(m.iter().map(Subgroup::order).collect::<Vec<_>>(), [5]);
        let g = psl27();
        let m = g.maximal_pi_subgroups(&pi("3,7"));
        assert_eq!(m.iter().map(Subgroup::order).collect::<Vec<_>>(), [21]);
        let m = g.maximal_pi_subgroups(&pi("2,3"));
        assert_eq!(m.iter().map(Subgroup::order).collect::<Vec<_>>(), [24, 24]);
        assert!(g.conjugating_element(&m[0], &m[1], &g.whole()).is_none());
    }

    #[test]
    fn hall_examples() {
        let g = psl27();
        assert!(g.check_dpi(&pi("3,7")).unwrap());
        let s4 = g.has_hall(&pi("2,3")).unwrap();
        assert_eq!(s4.order(), 24);
        assert!(!g.check_cpi(&pi("2,3")));
        assert!(!g.check_dpi(&pi("2,3")).unwrap());
        let psl211 = group(12, &["(1,2,3,4,5,6,7,8,9,10,11)", "(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)"]);
        assert_eq!(psl211.order(), 660);
        assert!(psl211.has_hall(&pi("3,5")).is_none());
        assert!(!psl211.check_dpi(&pi("3,5")).unwrap());
        assert!(psl211.check_dpi(&pi("5,11")).unwrap());
    }

    #[test]
    fn pronormality_examples() {
        let g = psl27();
        let whole = g.whole();
        let f21 = g.has_hall(&pi("3,7")).unwrap();
        assert!(g.is_pronormal(&f21, &whole).unwrap());
        assert!(g.is_strongly_pronormal(&f21, &whole).unwrap());
        assert!(g.is_pronormal(&whole, &whole).unwrap());
        assert!(g.is_strongly_pronormal(&whole, &whole).unwrap());
        let c7 = g.has_hall(&pi("7")).unwrap();
        assert!(g.is_strongly_pronormal(&c7, &whole).unwrap());
        let s = s3();
        let c2 = s.subgroup(&[Perm::parse_cycles(3, "(1,2)").unwrap()]).unwrap();
        assert!(s.is_pronormal(&c2, &s.whole()).unwrap());
        let outside = a5().whole();
        assert_eq!(g.is_pronormal(&outside, &c7), Err(OracleError::NotSubgroup));
    }

    #[test]
    fn non_pronormal_subgroup() {
        // a non-normal subgroup of order 2 in S4 generated by a transposition is
        // not pronormal: its conjugate (3,4) generates with it a Klein group
        let s4 = group(4, &["(1,2,3,4)", "(1,2)"]);
        let h = s4.subgroup(&[Perm::parse_cycles(4, "(1,2)").unwrap()]).unwrap();
        assert!(!s4.is_pronormal(&h, &s4.whole()).unwrap());
        assert!(!s4.is_strongly_pronormal(&h, &s4.whole()).unwrap());
    }

    #[test]
    fn overgroup_examples() {
        let g = psl27();
        let whole = g.whole();
        assert_eq!(g.overgroups(&whole, &whole).unwrap().len(), 1);
        let f21 = g.has_hall(&pi("3,7")).unwrap();
        let orders: Vec<usize> = g.overgroups(&f21, &whole).unwrap().iter().map(Subgroup::order).collect();
        assert_eq!(orders, [21, 168]);
        let a = a5();
        let c5 = a.has_hall(&pi("5")).unwrap();
        let orders: Vec<usize> = a.overgroups(&c5, &a.whole()).unwrap().iter().map(Subgroup::order).collect();
        assert_eq!(orders, [5, 10, 60]);
    }

    #[test]
    fn main_theorem_examples() {
        let r = psl27().verify_main_theorem(&pi("3,7")).unwrap();
        assert!(r.applicable && r.passed);
        assert_eq!(r.pairs.len(), 2);
        let r = a5().verify_main_theorem(&pi("3,5")).unwrap();
        assert!(!r.applicable);
        assert_eq!(r.reason.as_deref(), Some("not D_π"));
        let s4 = group(4, &["(1,2,3,4)", "(1,2)"]);
        assert!(s4.verify_main_theorem(&pi("3")).unwrap().passed);
    }

    #[test]
    fn star_property_examples() {
        let g = psl27();
        assert!(g.check_star_property(&pi("3,7")));
        assert!(!g.check_star_property(&pi("2,3")));
        assert!(g.check_star_property(&pi("11,13")));
    }

    #[test]
    fn strategies_registered() {
        assert_eq!(dpi_strategy("definition").unwrap().name(), "definition");
        assert!(dpi_strategy("guess").is_err());
        for name in ORDER_STRATEGIES {
            assert_eq!(order_strategy(name, 1000).unwrap().order(5, a5().gens()).unwrap(), 60);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn perm_group_laws(
            a in Just((0u16..6).collect::<Vec<_>>()).prop_shuffle(),
            b in Just((0u16..6).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let a = Perm::from_images(a).unwrap();
            let b = Perm::from_images(b).unwrap();
            prop_assert!(a.then(&a.inverse()).is_identity());
            prop_assert_eq!(a.then(&b).inverse(), b.inverse().then(&a.inverse()));
            let text = a.to_string();
            prop_assert_eq!(Perm::parse_cycles(6, &text).unwrap(), a.clone());
            let g = PermGroup::generate(6, vec![a.clone(), b.clone()], 1000).unwrap();
            prop_assert_eq!(StabilizerChain::new(6, &[a, b]).order(), g.order() as u128);
        }
    }
}
