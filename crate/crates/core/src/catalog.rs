//! The catalog of small permutation groups and its text format.
//!
//! ```text
//! # comment
//! name: PSL2(7)
//! degree: 8
//! gen: (1,2,3,4,5,6,7)
//! gen: (1,8)(2,7)(3,4)(5,6)
//! lie: A1(7)
//! lie: A2(2)
//! ```
//!
//! `lie:` names an isomorphic simple group of Lie type (repeatable),
//! `alternating: n` an isomorphic alternating group, and `factors:` the
//! composition factors of a non-simple group.

use std::collections::HashSet;

use thiserror::Error;

use crate::arith::PrimeSet;
use crate::classifier::{self, ClassifyError, HallVerdict};
use crate::oracle::{OracleError, Perm, PermGroup};
use crate::orders::{SimpleGroup, SimpleGroupSpec};

const SHIPPED: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no catalog entry named `{0}`")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: usize,
    pub gens: Vec<Perm>,
    pub lie: Vec<SimpleGroupSpec>,
    pub alternating: Option<u32>,
    pub factors: Vec<SimpleGroup>,
    pub line: usize,
}

impl CatalogEntry {
    pub fn group(&self, bound: usize) -> Result<PermGroup, OracleError> {
        PermGroup::generate(self.degree, self.gens.clone(), bound)
    }

    /// The simple groups this entry is recorded as isomorphic to.
    pub fn simple_names(&self) -> Vec<SimpleGroup> {
        let mut out: Vec<SimpleGroup> = self.lie.iter().map(|s| SimpleGroup::Lie(*s)).collect();
        if let Some(n) = self.alternating {
            out.push(SimpleGroup::alternating(n).expect("validated at parse time"));
        }
        out
    }

    /// One verdict per recorded name, or a single composition-factor verdict.
    pub fn classify(&self, pi: &PrimeSet) -> Result<Vec<HallVerdict>, ClassifyError> {
        if !self.factors.is_empty() {
            let verdicts =
                self.factors.iter().map(|f| classifier::classify_dpi(f, pi)).collect::<Result<Vec<_>, _>>()?;
            return Ok(vec![classifier::dpi_by_composition_factors(&verdicts)?]);
        }
        self.simple_names().iter().map(|g| classifier::classify_dpi(g, pi)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

#[derive(Default)]
struct Draft {
    name: Option<String>,
    degree: Option<usize>,
    gens: Vec<(usize, String)>,
    lie: Vec<SimpleGroupSpec>,
    alternating: Option<u32>,
    factors: Vec<SimpleGroup>,
    line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> CatalogError {
    CatalogError::Parse { line, msg: msg.into() }
}

impl Draft {
    fn finish(self) -> Result<CatalogEntry, CatalogError> {
        let name = self.name.ok_or_else(|| err(self.line, "stanza without `name:`"))?;
        let degree = self.degree.ok_or_else(|| err(self.line, format!("`{name}` has no `degree:`")))?;
        let gens = self
            .gens
            .iter()
            .map(|(line, text)| Perm::parse_cycles(degree, text).map_err(|e| err(*line, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CatalogEntry {
            name,
            degree,
            gens,
            lie: self.lie,
            alternating: self.alternating,
            factors: self.factors,
            line: self.line,
        })
    }
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let mut entries = Vec::new();
        let mut draft: Option<Draft> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if let Some(d) = draft.take() {
                    entries.push(d.finish()?);
                }
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| err(line_no, "expected `key: value`"))?;
            let value = value.trim();
            let d = draft.get_or_insert_with(|| Draft { line: line_no, ..Draft::default() });
            match key.trim() {
                "name" => {
                    if d.name.replace(value.to_string()).is_some() {
                        return Err(err(line_no, "second `name:` in one stanza"));
                    }
                }
                "degree" => {
                    let n = value.parse().map_err(|_| err(line_no, "degree must be a positive integer"))?;
                    if n == 0 || n > u16::MAX as usize {
                        return Err(err(line_no, "degree must be a positive integer"));
                    }
                    d.degree = Some(n);
                }
                "gen" => d.gens.push((line_no, value.to_string())),
                "lie" => d.lie.push(value.parse().map_err(|e: crate::orders::OrderError| err(line_no, e.to_string()))?),
                "alternating" => {
                    let n: u32 = value.parse().map_err(|_| err(line_no, "bad alternating degree"))?;
                    SimpleGroup::alternating(n).map_err(|e| err(line_no, e.to_string()))?;
                    d.alternating = Some(n);
                }
                "factors" => {
                    for f in value.split_whitespace() {
                        d.factors.push(f.parse().map_err(|e: crate::orders::OrderError| err(line_no, e.to_string()))?);
                    }
                }
                other => return Err(err(line_no, format!("unknown field `{other}`"))),
            }
        }
        if let Some(d) = draft.take() {
            entries.push(d.finish()?);
        }
        let mut names = HashSet::new();
        for e in &entries {
            if !names.insert(e.name.clone()) {
                return Err(err(e.line, format!("duplicate name `{}`", e.name)));
            }
        }
        Ok(Catalog { entries })
    }

    /// The catalog compiled into the library.
    pub fn shipped() -> Catalog {
        Catalog::parse(SHIPPED).expect("shipped catalog parses")
    }

    pub fn get(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| CatalogError::Unknown(name.to_string()))
    }
}
