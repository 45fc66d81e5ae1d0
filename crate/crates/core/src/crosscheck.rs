//! Classifier against oracle on catalog groups, plus the theorem checks on
//! every D_π row.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, PrimeSet};
use crate::catalog::{Catalog, CatalogEntry};
use crate::classifier::{ClassifyError, Status};
use crate::oracle::{self, OracleError, PermGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrosscheckError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("empty π")]
    EmptyPi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub order: u64,
    pub hall_order: u64,
    pub hall_classes: usize,
    pub has_hall: bool,
    pub cpi: bool,
    pub dpi: bool,
    pub maximal_orders: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierCall {
    pub target: String,
    pub status: Status,
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Agree,
    OracleOnly,
    Disagree(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremChecks {
    pub main_theorem: bool,
    pub overgroups_checked: usize,
    pub strongly_pronormal: bool,
    /// `None` unless `2 ∉ π` and `π` avoids the characteristic of some
    /// recorded Lie-type name.
    pub star: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub group: String,
    pub pi: PrimeSet,
    pub classifier: Vec<ClassifierCall>,
    pub oracle: OracleSummary,
    pub agreement: Agreement,
    /// D_π ⟹ C_π ⟹ E_π, and E_π ⟹ C_π when `2 ∉ π`.
    pub invariants_hold: bool,
    pub theorems: Option<TheoremChecks>,
}

impl CrosscheckRow {
    pub fn failed(&self) -> bool {
        matches!(self.agreement, Agreement::Disagree(_))
            || !self.invariants_hold
            || self.theorems.as_ref().is_some_and(|t| !t.main_theorem || !t.strongly_pronormal || t.star == Some(false))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckConfig {
    pub bound: usize,
    /// Run the theorem checks on D_π rows.
    pub theorems: bool,
    /// Decide D_π with one named oracle strategy; `None` runs all of them and
    /// requires agreement.
    pub dpi_strategy: Option<String>,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        CrosscheckConfig { bound: crate::enumeration_bound(), theorems: true, dpi_strategy: None }
    }
}

/// Two-element sets of odd primes up to `limit`.
pub fn odd_prime_pairs(limit: u64) -> Vec<PrimeSet> {
    let primes: Vec<u64> = arith::primes_up_to(limit).into_iter().filter(|&p| p != 2).collect();
    let mut out = Vec::new();
    for (i, &a) in primes.iter().enumerate() {
        for &b in &primes[i + 1..] {
            out.push(PrimeSet::new([a, b]).expect("primes"));
        }
    }
    out
}

fn compare(calls: &[ClassifierCall], oracle: &OracleSummary) -> Agreement {
    let mut determined = false;
    for c in calls {
        let expected = match c.status {
            Status::Dpi => oracle.dpi,
            Status::EpiNotDpi => oracle.has_hall && !oracle.dpi,
            Status::NotEpi => !oracle.has_hall,
            Status::Undetermined => continue,
        };
        determined = true;
        if !expected {
            return Agreement::Disagree(format!(
                "classifier says {} for {} ({}), oracle has_hall={} dpi={}",
                c.status,
                c.target,
                c.tag.as_deref().unwrap_or("-"),
                oracle.has_hall,
                oracle.dpi
            ));
        }
    }
    if determined {
        Agreement::Agree
    } else {
        Agreement::OracleOnly
    }
}

pub fn check_row(
    entry: &CatalogEntry,
    group: &PermGroup,
    pi: &PrimeSet,
    config: &CrosscheckConfig,
) -> Result<CrosscheckRow, CrosscheckError> {
    if pi.is_empty() {
        return Err(CrosscheckError::EmptyPi);
    }
    let whole = group.whole();
    let analysis = group.analyze_pi(&whole, pi);
    let dpi = match &config.dpi_strategy {
        Some(name) => oracle::dpi_strategy(name)?.decide(group, &whole, &analysis),
        None => group.check_dpi_within(&whole, pi)?,
    };
    let halls: Vec<_> = analysis.halls().cloned().collect();
    let oracle = OracleSummary {
        order: group.order() as u64,
        hall_order: analysis.hall_order as u64,
        hall_classes: halls.len(),
        has_hall: !halls.is_empty(),
        cpi: halls.len() == 1,
        dpi,
        maximal_orders: analysis.maximal().map(|m| m.order() as u64).collect(),
    };
    let classifier: Vec<ClassifierCall> = entry
        .classify(pi)?
        .into_iter()
        .map(|v| ClassifierCall { target: v.group, status: v.status, tag: v.condition_tag })
        .collect();
    let agreement = compare(&classifier, &oracle);
    let invariants_hold = (!oracle.dpi || oracle.cpi)
        && (!oracle.cpi || oracle.has_hall)
        && (pi.contains(2) || !oracle.has_hall || oracle.cpi);
    let theorems = if config.theorems && oracle.dpi {
        let main = group.verify_main_theorem(pi)?;
        let mut strongly_pronormal = true;
        for h in &halls {
            strongly_pronormal &= group.is_strongly_pronormal(h, &whole)?;
        }
        let star_applies = !pi.contains(2) && entry.lie.iter().any(|s| !pi.contains(s.p()));
        Some(TheoremChecks {
            main_theorem: main.passed,
            overgroups_checked: main.pairs.len(),
            strongly_pronormal,
            star: star_applies.then(|| group.check_star_property(pi)),
        })
    } else {
        None
    };
    Ok(CrosscheckRow {
        group: entry.name.clone(),
        pi: pi.clone(),
        classifier,
        oracle,
        agreement,
        invariants_hold,
        theorems,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub rows: Vec<CrosscheckRow>,
}

impl CrosscheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CrosscheckRow> {
        self.rows.iter().filter(|r| r.failed())
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn row(&self, group: &str, pi: &str) -> Option<&CrosscheckRow> {
        let pi: PrimeSet = pi.parse().ok()?;
        self.rows.iter().find(|r| r.group == group && r.pi == pi)
    }
}

/// One row per catalog group and π meeting the group's spectrum in at least
/// two primes; rows sorted by group name, then π.
pub fn crosscheck(
    catalog: &Catalog,
    pis: &[PrimeSet],
    config: &CrosscheckConfig,
) -> Result<CrosscheckReport, CrosscheckError> {
    if pis.iter().any(PrimeSet::is_empty) {
        return Err(CrosscheckError::EmptyPi);
    }
    let mut rows = Vec::new();
    for entry in &catalog.entries {
        let group = entry.group(config.bound)?;
        let spectrum = group.prime_spectrum();
        for pi in pis {
            if pi.intersection(&spectrum).len() >= 2 {
                rows.push(check_row(entry, &group, pi, config)?);
            }
        }
    }
    rows.sort_by(|a, b| (&a.group, &a.pi).cmp(&(&b.group, &b.pi)));
    rows.dedup_by(|a, b| a.group == b.group && a.pi == b.pi);
    Ok(CrosscheckReport { rows })
}

impl std::fmt::Display for CrosscheckRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdicts: Vec<String> = self.classifier.iter().map(|c| format!("{}={}", c.target, c.status)).collect();
        let agreement = match &self.agreement {
            Agreement::Agree => "agree".to_string(),
            Agreement::OracleOnly => "oracle-only".to_string(),
            Agreement::Disagree(d) => format!("DISAGREE: {d}"),
        };
        write!(
            f,
            "{:<9} {:<8} hall={:<5} classes={} C={:<5} D={:<5} [{}] {}",
            self.group,
            self.pi.to_string(),
            self.oracle.has_hall,
            self.oracle.hall_classes,
            self.oracle.cpi,
            self.oracle.dpi,
            verdicts.join(" "),
            agreement
        )?;
        if let Some(t) = &self.theorems {
            write!(
                f,
                " main={} ({} overgroups) strong-pronormal={} star={}",
                t.main_theorem,
                t.overgroups_checked,
                t.strongly_pronormal,
                t.star.map_or("n/a".to_string(), |s| s.to_string())
            )?;
        }
        Ok(())
    }
}
