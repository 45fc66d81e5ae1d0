//! JSON Lines records. The first line is a header naming the schema and its
//! version; every other line is one [`Record`] tagged by `kind`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{FactoredInteger, PrimeSet};
use crate::classifier::{GlRegime, HallVerdict};
use crate::crosscheck::CrosscheckRow;
use crate::glhall::{CentralizerReport, Certificate, FrobeniusReport, WitnessReport};

pub const SCHEMA: &str = "hallpi/records";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("record line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("missing header line")]
    MissingHeader,
    #[error("unsupported schema `{schema}` version {version}")]
    Schema { schema: String, version: u32 },
    #[error("record line {0}: header after the first line")]
    StrayHeader(usize),
}

/// An integer kept both in decimal and factored form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Number {
    pub value: String,
    pub factored: String,
}

impl From<&FactoredInteger> for Number {
    fn from(n: &FactoredInteger) -> Self {
        Number { value: n.to_biguint().to_string(), factored: n.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub group: String,
    pub order: Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallOrderRecord {
    pub gl: String,
    pub pi: PrimeSet,
    pub r: u64,
    pub tau: PrimeSet,
    pub d: u64,
    pub k: u64,
    pub item: String,
    pub order: Number,
}

impl HallOrderRecord {
    pub fn new(regime: &GlRegime, order: &FactoredInteger) -> Self {
        HallOrderRecord {
            gl: regime.gl.to_string(),
            pi: regime.pi.clone(),
            r: regime.r,
            tau: regime.tau.clone(),
            d: regime.d,
            k: regime.k,
            item: regime.item.clone(),
            order: order.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerRecord {
    pub gl: String,
    pub pi: PrimeSet,
    pub report: CentralizerReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Record {
    Header { schema: String, version: u32 },
    Verdict(HallVerdict),
    Order(OrderRecord),
    HallOrder(HallOrderRecord),
    Crosscheck(CrosscheckRow),
    Witness(WitnessReport),
    Frobenius(FrobeniusReport),
    Centralizer(CentralizerRecord),
    Certificate(Certificate),
}

impl Record {
    pub fn header() -> Record {
        Record::Header { schema: SCHEMA.to_string(), version: VERSION }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Header line followed by one line per record.
pub fn render(records: &[Record]) -> String {
    let mut out = Record::header().to_line();
    out.push('\n');
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

/// Inverse of [`render`]; blank lines are ignored.
pub fn parse(text: &str) -> Result<Vec<Record>, RecordError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (i, first) = lines.next().ok_or(RecordError::MissingHeader)?;
    match serde_json::from_str(first).map_err(|source| RecordError::Json { line: i + 1, source })? {
        Record::Header { schema, version } if schema == SCHEMA && version == VERSION => {}
        Record::Header { schema, version } => return Err(RecordError::Schema { schema, version }),
        _ => return Err(RecordError::MissingHeader),
    }
    lines
        .map(|(i, l)| match serde_json::from_str(l) {
            Ok(Record::Header { .. }) => Err(RecordError::StrayHeader(i + 1)),
            Ok(r) => Ok(r),
            Err(source) => Err(RecordError::Json { line: i + 1, source }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::classifier::{classify_dpi, gl_hall_pi_order, gl_regime};
    use crate::crosscheck::check_row;
    use crate::glhall::GlGroup;
    use crate::oracle::DEFAULT_PERM_BOUND;
    use crate::orders::{GLSpec, Sign, SimpleGroup};

    #[test]
    fn round_trip() {
        let pi: PrimeSet = "3,5".parse().unwrap();
        let gl = GLSpec::new(3, Sign::Plus, 11).unwrap();
        let g = GlGroup::new(gl).unwrap();
        let hall = g.build_tr(&pi, 100_000).unwrap();
        let mut records = vec![
            Record::Verdict(classify_dpi(&"A2(11)".parse::<SimpleGroup>().unwrap(), &pi).unwrap()),
            Record::Order(OrderRecord {
                group: "GL3(11)".into(),
                order: (&crate::orders::gl_order(&gl).unwrap()).into(),
            }),
            Record::HallOrder(HallOrderRecord::new(
                &gl_regime(&gl, &pi).unwrap(),
                &gl_hall_pi_order(&gl, &pi).unwrap(),
            )),
            Record::Witness(g.verify_dpi_failure_witness(&pi, 100_000)),
            Record::Frobenius(g.frobenius_action_check(&pi).unwrap()),
            Record::Certificate(Certificate::from_subgroup(g.field(), "GL3(11)", &hall.tr, hall.verified)),
        ];
        if let Some(report) = g.centralizer_in_tr_of_r(&hall) {
            records.push(Record::Centralizer(CentralizerRecord { gl: gl.to_string(), pi: pi.clone(), report }));
        }
        let cat = Catalog::shipped();
        let entry = cat.get("PSL2(7)").unwrap();
        let group = entry.group(DEFAULT_PERM_BOUND).unwrap();
        records
            .push(Record::Crosscheck(check_row(entry, &group, &"3,7".parse().unwrap(), &Default::default()).unwrap()));
        let text = render(&records);
        assert!(text.starts_with("{\"kind\":\"header\",\"schema\":\"hallpi/records\",\"version\":1}\n"));
        assert_eq!(parse(&text).unwrap(), records);
    }

    #[test]
    fn header_checks() {
        assert!(matches!(parse(""), Err(RecordError::MissingHeader)));
        let bad = "{\"kind\":\"header\",\"schema\":\"hallpi/records\",\"version\":9}\n";
        assert!(matches!(parse(bad), Err(RecordError::Schema { version: 9, .. })));
        let twice = format!("{}{}", render(&[]), Record::header().to_line());
        assert!(matches!(parse(&twice), Err(RecordError::StrayHeader(2))));
        let junk = format!("{}{{\"kind\":\"nope\"}}\n", render(&[]));
        assert!(matches!(parse(&junk), Err(RecordError::Json { line: 2, .. })));
    }
}
