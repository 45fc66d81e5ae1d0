use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hallpi::arith::{FactoredInteger, PrimeSet};
use hallpi::catalog::Catalog;
use hallpi::classifier::{self, CriterionKind, CriterionRegistry, HallVerdict};
use hallpi::crosscheck::{self, CrosscheckConfig};
use hallpi::glhall::{Certificate, GlGroup, WitnessReport, WitnessStatus};
use hallpi::oracle;
use hallpi::orders::{self, Family, GLSpec, SimpleGroup, SimpleGroupSpec};
use hallpi::records::{self, CentralizerRecord, HallOrderRecord, OrderRecord, Record};

/// Exit code for usage and runtime errors; 0, 1 and 2 carry verdicts.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "hallpi", version, about = "Hall π-subgroup properties of finite simple groups of Lie type")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Enumeration bound for explicit groups (defaults to $HALLPI_BOUND, then 1000000).
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Decide D_π for a simple group.
    Classify {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        pi: PrimeSet,
        /// Comma-separated criterion names to use instead of the full registry.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<String>,
    },
    /// Factored order of a simple group, of GLₙ^η(q), or of a catalog group.
    Order {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        gl: GlArg,
        /// A catalog group, by name.
        #[arg(long, conflicts_with_all = ["group", "family", "gl"])]
        catalog_group: Option<String>,
        #[arg(long, requires = "catalog_group")]
        catalog: Option<PathBuf>,
        /// Permutation-group order strategy for `--catalog-group`.
        #[arg(long, default_value = "schreier-sims", requires = "catalog_group")]
        strategy: String,
    },
    /// π-Hall order of GLₙ^η(q) in the E_π∖D_π regime.
    HallOrder {
        #[command(flatten)]
        gl: GlArg,
        #[arg(long)]
        pi: PrimeSet,
    },
    /// Build T, R, TR, K and R₁ in GLₙ^η(q), write certificates and the witness report.
    Construct {
        #[command(flatten)]
        gl: GlArg,
        #[arg(long)]
        pi: PrimeSet,
        /// Output directory (default: ./construct-<group>-<π>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare classifier verdicts with the brute-force oracle on a catalog.
    Crosscheck {
        /// Catalog file (default: the shipped catalog).
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// π to test, repeatable (default: all pairs of odd primes up to 13).
        #[arg(long)]
        pi: Vec<PrimeSet>,
        /// Decide D_π with one oracle strategy instead of cross-asserting all.
        #[arg(long)]
        dpi_strategy: Option<String>,
        /// Skip the theorem checks on D_π rows.
        #[arg(long)]
        no_theorems: bool,
    },
    /// List the registered criteria and oracle strategies.
    Criteria,
}

#[derive(Args)]
struct GroupArgs {
    /// Group name such as `A2(11)`, `2A2(4)`, `E6(2)`, `Alt(7)` or `O'N`.
    #[arg(long, conflicts_with_all = ["family", "rank", "q", "twist"])]
    group: Option<String>,
    /// Lie family letter (A, B, C, D, G2, F4, E6, E7, E8, ...).
    #[arg(long, requires = "q")]
    family: Option<String>,
    #[arg(long)]
    rank: Option<u32>,
    #[arg(long)]
    q: Option<u64>,
    /// Twist order prefixed to the family (2 or 3).
    #[arg(long, requires = "family")]
    twist: Option<u32>,
}

#[derive(Args)]
struct GlArg {
    /// GLₙ^η(q) as `n η q`, for example `3 + 11` or `3 - 4`.
    #[arg(long, num_args = 3, value_names = ["N", "ETA", "Q"], allow_hyphen_values = true)]
    gl: Option<Vec<String>>,
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(msg.into()))
}

impl GroupArgs {
    fn is_set(&self) -> bool {
        self.group.is_some() || self.family.is_some()
    }

    fn parse(&self) -> Result<SimpleGroup, CliError> {
        if let Some(name) = &self.group {
            return Ok(name.parse()?);
        }
        let Some(family) = &self.family else {
            return fail("give --group or --family/--rank/--q");
        };
        let q = self.q.expect("clap requires --q with --family");
        let name = match self.twist {
            Some(t) => format!("{t}{family}"),
            None => family.clone(),
        };
        let family: Family = name.parse()?;
        let spec = match (family.fixed_rank(), self.rank) {
            (Some(_), _) => SimpleGroupSpec::exceptional(family, q)?,
            (None, Some(rank)) => SimpleGroupSpec::with_q(family, rank, q)?,
            (None, None) => return fail(format!("family {family} needs --rank")),
        };
        Ok(SimpleGroup::Lie(spec))
    }
}

impl GlArg {
    fn parse(&self) -> Result<Option<GLSpec>, CliError> {
        let Some(v) = &self.gl else { return Ok(None) };
        let n: u32 = v[0].parse().map_err(|_| CliError(format!("bad degree `{}`", v[0])))?;
        let q: u64 = v[2].parse().map_err(|_| CliError(format!("bad field order `{}`", v[2])))?;
        Ok(Some(GLSpec::new(n, v[1].parse()?, q)?))
    }

    fn require(&self) -> Result<GLSpec, CliError> {
        self.parse()?.map_or_else(|| fail("--gl N ETA Q is required"), Ok)
    }
}

/// `2^5·3` as `2⁵·3`.
fn superscript(n: &FactoredInteger) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if n.is_one() {
        return "1".into();
    }
    n.factors()
        .map(|(p, e)| {
            let exp: String = if e == 1 {
                String::new()
            } else {
                e.to_string().bytes().map(|b| DIGITS[(b - b'0') as usize]).collect()
            };
            format!("{p}{exp}")
        })
        .collect::<Vec<_>>()
        .join("·")
}

struct Output {
    format: Format,
    text: String,
    records: Vec<Record>,
}

impl Output {
    fn new(format: Format) -> Self {
        Output { format, text: String::new(), records: Vec::new() }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn record(&mut self, r: Record) {
        self.records.push(r);
    }

    fn flush(self) -> io::Result<()> {
        let mut out = io::stdout().lock();
        match self.format {
            Format::Text => out.write_all(self.text.as_bytes()),
            Format::Records => out.write_all(records::render(&self.records).as_bytes()),
        }
    }
}

fn render_verdict(out: &mut Output, v: &HallVerdict) {
    out.line(format!("group      {}", v.group));
    out.line(format!("pi         {}", v.pi));
    out.line(format!("status     {}", v.status));
    if let Some(tag) = &v.condition_tag {
        out.line(format!("condition  {tag}"));
    }
    for (k, val) in &v.witnesses {
        out.line(format!("witness    {k} = {val}"));
    }
    if !v.citations.is_empty() {
        out.line(format!("cites      {}", v.citations.join(", ")));
    }
    for n in &v.notes {
        out.line(format!("note       {n}"));
    }
    out.line(format!("U_pi       {}", v.upi));
}

fn cmd_classify(out: &mut Output, group: &GroupArgs, pi: &PrimeSet, criteria: &[String]) -> Result<u8, CliError> {
    let g = group.parse()?;
    let verdict = if criteria.is_empty() {
        classifier::classify_dpi(&g, pi)?
    } else {
        CriterionRegistry::select(criteria)?.classify(&g, pi)?
    };
    render_verdict(out, &verdict);
    let code = verdict.status.exit_code() as u8;
    out.record(Record::Verdict(verdict));
    Ok(code)
}

fn order_record(out: &mut Output, name: String, order: &FactoredInteger) {
    out.line(format!("|{name}| = {}", superscript(order)));
    out.line(format!("         = {}", order.to_biguint()));
    out.record(Record::Order(OrderRecord { group: name, order: order.into() }));
}

fn cmd_order(
    out: &mut Output,
    group: &GroupArgs,
    gl: &GlArg,
    catalog_group: Option<&str>,
    catalog: Option<&Path>,
    strategy: &str,
    bound: usize,
) -> Result<u8, CliError> {
    if let Some(name) = catalog_group {
        let cat = load_catalog(catalog)?;
        let entry = cat.get(name)?;
        let order = oracle::order_strategy(strategy, bound)?.order(entry.degree, &entry.gens)?;
        let order = hallpi::arith::factor(u64::try_from(order).map_err(|_| CliError("order overflows u64".into()))?)?;
        order_record(out, entry.name.clone(), &order);
        out.line(format!("strategy   {strategy}"));
        return Ok(0);
    }
    match (gl.parse()?, group.is_set()) {
        (Some(gl), false) => {
            order_record(out, gl.to_string(), &orders::gl_order(&gl)?);
            Ok(0)
        }
        (None, true) => {
            let g = group.parse()?;
            order_record(out, g.to_string(), &g.order()?);
            if let SimpleGroup::Lie(spec) = g {
                out.line(format!("|W|      = {}", superscript(&orders::weyl_order(&spec))));
                out.line(format!("outdiag  = {}", orders::outdiag_order(&spec)));
            }
            Ok(0)
        }
        _ => fail("give exactly one of --gl, --group/--family, --catalog-group"),
    }
}

fn cmd_hall_order(out: &mut Output, gl: &GlArg, pi: &PrimeSet) -> Result<u8, CliError> {
    let gl = gl.require()?;
    let regime = classifier::gl_regime(&gl, pi)?;
    let order = classifier::gl_hall_pi_order(&gl, pi)?;
    out.line(format!("|{gl}|_{pi} = {}", superscript(&order)));
    out.line(format!(
        "regime     {} (r = {}, τ = {}, d = {}, k = {})",
        regime.item, regime.r, regime.tau, regime.d, regime.k
    ));
    out.record(Record::HallOrder(HallOrderRecord::new(&regime, &order)));
    Ok(0)
}

fn render_witness(out: &mut Output, w: &WitnessReport) {
    out.line(format!("witness    {}", w.status));
    if let Some(reason) = &w.reason {
        out.line(format!("reason     {reason}"));
    }
    for s in &w.scans {
        out.line(format!(
            "  t = {}: rank(K) = {}, max t-rank over C_TR(R₀) = {}, {} subgroups scanned",
            s.t,
            s.witness_rank,
            s.max_t_rank.map_or("?".into(), |m| m.to_string()),
            s.subgroups_scanned
        ));
    }
}

fn default_out_dir(gl: &GLSpec, pi: &PrimeSet) -> PathBuf {
    let gl = gl.to_string();
    let name: Vec<&str> = gl.split(|c: char| !c.is_ascii_alphanumeric()).filter(|s| !s.is_empty()).collect();
    let pis: Vec<String> = pi.iter().map(|p| p.to_string()).collect();
    PathBuf::from(format!("construct-{}-pi{}", name.join("_"), pis.join("_")))
}

fn cmd_construct(
    out: &mut Output,
    gl: &GlArg,
    pi: &PrimeSet,
    dir: Option<&Path>,
    bound: usize,
) -> Result<u8, CliError> {
    let gl = gl.require()?;
    let group = GlGroup::new(gl)?;
    let report = group.verify_dpi_failure_witness(pi, bound);
    out.line(format!("group      {gl} over GF({}) mod {}", group.field().order(), group.field().modulus_string()));
    let hall = match group.build_tr(pi, bound) {
        Ok(h) => h,
        Err(_) => {
            render_witness(out, &report);
            out.record(Record::Witness(report));
            return Ok(2);
        }
    };
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| default_out_dir(&gl, pi));
    fs::create_dir_all(&dir)?;
    let name = gl.to_string();
    let mut certs = vec![
        ("T".to_string(), Certificate::from_subgroup(group.field(), &name, &hall.t, hall.t.is_enumerated())),
        ("R".to_string(), Certificate::from_subgroup(group.field(), &name, &hall.r, hall.r.is_enumerated())),
        ("TR".to_string(), Certificate::from_subgroup(group.field(), &name, &hall.tr, hall.verified)),
    ];
    for t in hall.regime.tau.iter() {
        let w = group.build_witness_k(pi, t, bound)?;
        let ok = w.commute && w.members;
        certs.push((
            format!("K_t{t}"),
            Certificate::from_subgroup(group.field(), &name, &w.k_group, ok && w.k_group.is_enumerated()),
        ));
        certs.push((
            format!("R1_t{t}"),
            Certificate::from_subgroup(group.field(), &name, &w.r1, ok && w.r1.is_enumerated()),
        ));
    }
    out.line(format!(
        "TR         order {} (expected {}){}",
        hall.tr.order().map_or("unknown".into(), |o| o.to_string()),
        hall.expected_order.to_biguint(),
        if hall.verified { "" } else { ", unverified" }
    ));
    if let Some(c) = group.centralizer_in_tr_of_r(&hall) {
        out.line(format!("C_TR(R)    {} (expected shape: {})", c.structure, c.matches_expected));
        out.record(Record::Centralizer(CentralizerRecord { gl: name.clone(), pi: pi.clone(), report: c }));
    }
    render_witness(out, &report);
    for (file, cert) in &certs {
        let path = dir.join(format!("{file}.cert"));
        fs::write(&path, cert.to_string())?;
        out.line(format!("wrote      {}", path.display()));
    }
    let code = match report.status {
        WitnessStatus::Certified => 0,
        WitnessStatus::NotCertified => 1,
        WitnessStatus::Partial | WitnessStatus::NotApplicable => 2,
    };
    let mut file_records = vec![Record::Witness(report.clone())];
    file_records.extend(certs.into_iter().map(|(_, c)| Record::Certificate(c)));
    let path = dir.join("witness.jsonl");
    fs::write(&path, records::render(&file_records))?;
    out.line(format!("wrote      {}", path.display()));
    out.records.extend(file_records);
    Ok(code)
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, CliError> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?;
            Ok(Catalog::parse(&text)?)
        }
        None => Ok(Catalog::shipped()),
    }
}

fn cmd_crosscheck(
    out: &mut Output,
    catalog: Option<&Path>,
    pis: &[PrimeSet],
    config: &CrosscheckConfig,
) -> Result<u8, CliError> {
    let cat = load_catalog(catalog)?;
    let pis = if pis.is_empty() { crosscheck::odd_prime_pairs(13) } else { pis.to_vec() };
    let report = crosscheck::crosscheck(&cat, &pis, config)?;
    for row in &report.rows {
        out.line(row.to_string());
    }
    let failures: Vec<_> = report.failures().collect();
    out.line(format!("{} rows, {} failures", report.rows.len(), failures.len()));
    for f in &failures {
        out.line(format!("FAIL {} {}: {:?}", f.group, f.pi, f.agreement));
    }
    let code = if failures.is_empty() { 0 } else { 1 };
    out.records.extend(report.rows.into_iter().map(Record::Crosscheck));
    Ok(code)
}

fn cmd_criteria(out: &mut Output) -> Result<u8, CliError> {
    for c in CriterionRegistry::standard().iter() {
        let kind = match c.kind() {
            CriterionKind::Dpi => "D_π",
            CriterionKind::EpiNotDpi => "E_π∖D_π",
        };
        out.line(format!("{:<14} {:<8} {}", c.name(), kind, c.description()));
    }
    for s in oracle::dpi_strategies() {
        out.line(format!("{:<14} oracle   D_π decision", s.name()));
    }
    for s in oracle::ORDER_STRATEGIES {
        out.line(format!("{s:<14} oracle   permutation group order"));
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<(Output, u8), CliError> {
    let bound = cli.bound.unwrap_or_else(hallpi::enumeration_bound);
    let mut out = Output::new(cli.format);
    let code = match &cli.command {
        Command::Classify { group, pi, criteria } => cmd_classify(&mut out, group, pi, criteria)?,
        Command::Order { group, gl, catalog_group, catalog, strategy } => {
            cmd_order(&mut out, group, gl, catalog_group.as_deref(), catalog.as_deref(), strategy, bound)?
        }
        Command::HallOrder { gl, pi } => cmd_hall_order(&mut out, gl, pi)?,
        Command::Construct { gl, pi, out: dir } => cmd_construct(&mut out, gl, pi, dir.as_deref(), bound)?,
        Command::Crosscheck { catalog, pi, dpi_strategy, no_theorems } => {
            if pi.iter().any(PrimeSet::is_empty) {
                return fail("empty π");
            }
            let config = CrosscheckConfig { bound, theorems: !no_theorems, dpi_strategy: dpi_strategy.clone() };
            cmd_crosscheck(&mut out, catalog.as_deref(), pi, &config)?
        }
        Command::Criteria => cmd_criteria(&mut out)?,
    };
    Ok((out, code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            if let Err(e) = out.flush() {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ERROR);
            }
            ExitCode::from(code)
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hallpi::classifier::Status;

    #[test]
    fn superscripts() {
        let n: FactoredInteger = hallpi::arith::factor(2 * 2 * 2 * 2 * 2 * 3 * 125 * 11).unwrap();
        assert_eq!(superscript(&n), "2⁵·3·5³·11");
        assert_eq!(superscript(&FactoredInteger::one()), "1");
        let big = FactoredInteger::prime_power(2, 12).unwrap();
        assert_eq!(superscript(&big), "2¹²");
    }

    #[test]
    fn default_dir_names() {
        let gl = GLSpec::new(3, "-".parse().unwrap(), 4).unwrap();
        assert_eq!(default_out_dir(&gl, &"3,5".parse().unwrap()), PathBuf::from("construct-GU3_4-pi3_5"));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn status_codes() {
        for (s, c) in [(Status::Dpi, 0), (Status::EpiNotDpi, 1), (Status::NotEpi, 1), (Status::Undetermined, 2)] {
            assert_eq!(s.exit_code(), c);
        }
    }
}
