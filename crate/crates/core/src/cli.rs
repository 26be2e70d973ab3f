//! Command-line front end. Every command builds a [`Report`] of typed
//! records, rendered either as aligned tables or as JSON lines whose
//! rationals are lossless `"num/den"` strings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::{check_supermartingale, optional_decomposition};
use crate::emm::{lower_price, paste, require_no_arbitrage, sample_emm_with, upper_price, Measure};
use crate::error::{Error, Result};
use crate::expectation::{acceptance_oracle, check_axioms, subhedge, superhedge, Axiom};
use crate::format;
use crate::lp::{VertexOptions, DEFAULT_VERTEX_CAP};
use crate::market::{AdaptedProcess, Claim, Market};
use crate::pricing::{is_attainable_with, is_complete_at, price_interval, verify_pasting_characterization};
use crate::random;
use crate::rational::{approx, to_display, to_record, Rational};

#[derive(Debug, Clone, Parser)]
#[command(name = "superhedge", version, about = "Exact superhedging and no-arbitrage pricing on scenario trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Largest node branching accepted by vertex enumeration.
    #[arg(long, global = true, env = "SUPERHEDGE_VERTEX_CAP", default_value_t = DEFAULT_VERTEX_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Records,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Super/subhedging prices, no-arbitrage interval and replication per atom.
    Price {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        claim: PathBuf,
        #[arg(long, default_value_t = 0)]
        time: usize,
    },
    /// Completeness verdict with the pasting cross-check.
    Complete {
        #[arg(long)]
        market: PathBuf,
        /// Every time when omitted.
        #[arg(long)]
        time: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optional decomposition of a supermartingale (a process file, or the
    /// superhedging price process of a claim).
    Decompose {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, conflicts_with = "claim", required_unless_present = "claim")]
        process: Option<PathBuf>,
        #[arg(long)]
        claim: Option<PathBuf>,
    },
    /// Property suite on seeded random claims.
    Check {
        #[arg(long)]
        market: PathBuf,
        /// Every time when omitted.
        #[arg(long)]
        time: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        claims: usize,
    },
    /// A pseudo-random equivalent martingale measure.
    EmmSample {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Paste two sampled measures at a time.
    Paste {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        seed2: u64,
        #[arg(long, default_value_t = 0)]
        time: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rat(Rational),
    Text(String),
    Bool(bool),
    Int(usize),
}

impl Value {
    fn table(&self) -> String {
        match self {
            Value::Rat(r) => to_display(r),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
            Value::Int(n) => n.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Rat(r) => serde_json::Value::String(to_record(r)),
            Value::Text(s) => serde_json::Value::String(s.clone()),
            Value::Bool(b) => serde_json::Value::Bool(*b),
            Value::Int(n) => serde_json::Value::from(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, Value)>,
}

impl Record {
    fn new(kind: &'static str) -> Self {
        Self { kind, fields: Vec::new() }
    }

    fn with(mut self, key: &'static str, v: Value) -> Self {
        self.fields.push((key, v));
        self
    }

    fn rat(self, key: &'static str, r: &Rational) -> Self {
        self.with(key, Value::Rat(r.clone()))
    }

    fn text(self, key: &'static str, s: impl Into<String>) -> Self {
        self.with(key, Value::Text(s.into()))
    }

    fn flag(self, key: &'static str, b: bool) -> Self {
        self.with(key, Value::Bool(b))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    /// Number of failed properties or cross-checks.
    pub failures: usize,
}

impl Report {
    fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn render(&self, fmt: OutputFormat) -> String {
        match fmt {
            OutputFormat::Records => {
                let mut out = String::new();
                for r in &self.records {
                    let mut obj = serde_json::Map::new();
                    obj.insert("kind".into(), r.kind.into());
                    for (k, v) in &r.fields {
                        obj.insert((*k).into(), v.json());
                    }
                    let _ = writeln!(out, "{}", serde_json::Value::Object(obj));
                }
                out
            }
            OutputFormat::Table => self.table(),
        }
    }

    /// Consecutive records of one kind share an aligned table. Rational
    /// columns get an advisory decimal column labelled `~name`.
    fn table(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.records.len() {
            let kind = self.records[i].kind;
            let keys: Vec<&str> = self.records[i].fields.iter().map(|(k, _)| *k).collect();
            let mut j = i;
            while j < self.records.len()
                && self.records[j].kind == kind
                && self.records[j].fields.iter().map(|(k, _)| *k).eq(keys.iter().copied())
            {
                j += 1;
            }
            let group = &self.records[i..j];
            let mut header: Vec<String> = Vec::new();
            let mut rows: Vec<Vec<String>> = vec![Vec::new(); group.len()];
            for (c, key) in keys.iter().enumerate() {
                header.push(key.to_string());
                for (r, rec) in group.iter().enumerate() {
                    rows[r].push(rec.fields[c].1.table());
                }
                if group.iter().any(|rec| matches!(rec.fields[c].1, Value::Rat(ref x) if !x.is_integer())) {
                    header.push(format!("~{key}"));
                    for (r, rec) in group.iter().enumerate() {
                        rows[r].push(match &rec.fields[c].1 {
                            Value::Rat(x) => format!("{:.6}", approx(x)),
                            _ => String::new(),
                        });
                    }
                }
            }
            let widths: Vec<usize> = (0..header.len())
                .map(|c| rows.iter().map(|r| r[c].chars().count()).chain([header[c].chars().count()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "[{kind}]");
            let _ = writeln!(out, "{}", line(&header));
            for r in &rows {
                let _ = writeln!(out, "{}", line(r));
            }
            out.push('\n');
            i = j;
        }
        out
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a market and runs the arbitrage check that every command starts with.
fn load_market(path: &Path) -> Result<Market> {
    let m = format::parse_market(&read(path)?)?;
    require_no_arbitrage(&m)?;
    Ok(m)
}

fn vector(v: &[Rational]) -> String {
    match v {
        [x] => to_record(x),
        _ => format!("({})", v.iter().map(to_record).collect::<Vec<_>>().join(", ")),
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let opts = VertexOptions { cap: cli.cap };
    match &cli.command {
        Command::Price { market, claim, time } => {
            let m = load_market(market)?;
            let h = format::parse_claim(&read(claim)?, &m)?;
            cmd_price(&m, &h, *time, opts)
        }
        Command::Complete { market, time, seed } => cmd_complete(&load_market(market)?, *time, *seed),
        Command::Decompose { market, process, claim } => {
            let m = load_market(market)?;
            let v = match (process, claim) {
                (Some(p), _) => format::parse_process(&read(p)?, &m)?,
                (None, Some(c)) => superhedge(&m, &format::parse_claim(&read(c)?, &m)?, 0)?.process,
                (None, None) => return Err(Error::Mismatch("either --process or --claim is required".into())),
            };
            cmd_decompose(&m, &v)
        }
        Command::Check { market, time, seed, claims } => cmd_check(&load_market(market)?, *time, *seed, *claims, opts),
        Command::EmmSample { market, seed } => {
            let m = load_market(market)?;
            let q = sample_emm_with(&m, *seed, opts)?;
            Ok(measure_report(&m, &q))
        }
        Command::Paste { market, seed, seed2, time } => {
            let m = load_market(market)?;
            let q1 = sample_emm_with(&m, *seed, opts)?;
            let q2 = sample_emm_with(&m, *seed2, opts)?;
            let mut r = measure_report(&m, &paste(&m, &q1, &q2, *time)?);
            if r.failures == 0 {
                r.push(Record::new("paste").with("t", Value::Int(*time)).flag("emm", true));
            }
            Ok(r)
        }
    }
}

fn measure_report(m: &Market, q: &Measure) -> Report {
    let tree = &m.tree;
    let mut r = Report::default();
    for n in tree.internal_nodes() {
        for (c, p) in tree.node(n).children.iter().zip(q.transition(n)) {
            r.push(
                Record::new("transition")
                    .text("parent", tree.node(n).id.clone())
                    .text("child", tree.node(*c).id.clone())
                    .rat("q", p),
            );
        }
    }
    if !q.is_equivalent_martingale_measure(m) {
        r.failures += 1;
    }
    r
}

pub fn cmd_price(m: &Market, h: &Claim, t: usize, opts: VertexOptions) -> Result<Report> {
    m.tree.check_time(t)?;
    let sup = superhedge(m, h, t)?;
    let sub = subhedge(m, h, t)?;
    let up = upper_price(m, h, t)?;
    let lo = lower_price(m, h, t)?;
    if sup.price != up.values || sub.price != lo.values {
        return Err(Error::Mismatch("hedging prices differ from martingale price bounds".into()));
    }
    let interval = if h.nonnegative { Some(price_interval(m, h, t)?) } else { None };
    let att = is_attainable_with(m, h, t, opts)?;
    let tree = &m.tree;
    let mut r = Report::default();
    for (a, atom) in tree.level(t).enumerate() {
        let mut rec = Record::new("price")
            .text("atom", tree.node(atom).id.clone())
            .rat("lower", &lo.values[a])
            .rat("upper", &up.values[a]);
        let shape = match &interval {
            Some(iv) if iv.atoms[a].degenerate => format!("[{}]", to_display(&iv.atoms[a].upper)),
            Some(iv) => format!("({}, {})", to_display(&iv.atoms[a].lower), to_display(&iv.atoms[a].upper)),
            None => "-".to_string(),
        };
        rec = rec
            .text("interval", shape)
            .flag("attainable", att.attainable[a])
            .text(
                "xi",
                if att.attainable[a] && !tree.node(atom).is_leaf() {
                    vector(att.strategy.at(atom))
                } else {
                    "-".to_string()
                },
            );
        r.push(rec);
    }
    for n in tree.level(t).start..tree.level(tree.horizon()).start {
        let a = tree.ancestor_at(n, t) - tree.level(t).start;
        if att.attainable[a] {
            r.push(
                Record::new("replication")
                    .text("node", tree.node(n).id.clone())
                    .text("xi", vector(att.strategy.at(n))),
            );
        }
    }
    Ok(r)
}

pub fn cmd_complete(m: &Market, time: Option<usize>, seed: u64) -> Result<Report> {
    let tree = &m.tree;
    let times: Vec<usize> = match time {
        Some(t) => {
            tree.check_time(t)?;
            vec![t]
        }
        None => (0..=m.horizon()).collect(),
    };
    let mut r = Report::default();
    for t in times {
        let c = is_complete_at(m, t)?;
        let pasting = verify_pasting_characterization(m, t, &[seed, seed + 1, seed + 2])?;
        if !pasting {
            r.failures += 1;
        }
        let ids: Vec<String> = c.violating.iter().map(|&n| tree.node(n).id.clone()).collect();
        let verdict = if c.complete {
            "complete".to_string()
        } else {
            format!("incomplete at {}", ids.join(", "))
        };
        r.push(
            Record::new("complete")
                .with("t", Value::Int(t))
                .flag("complete", c.complete)
                .text("verdict", verdict)
                .flag("pasting", pasting),
        );
    }
    Ok(r)
}

pub fn cmd_decompose(m: &Market, v: &AdaptedProcess) -> Result<Report> {
    let tree = &m.tree;
    if let Some(n) = check_supermartingale(m, v)? {
        return Err(Error::NotSupermartingale(tree.node(n).id.clone()));
    }
    let d = optional_decomposition(m, v)?;
    let mut r = Report::default();
    for (n, node) in tree.nodes().iter().enumerate() {
        r.push(
            Record::new("decomposition")
                .text("node", node.id.clone())
                .with("level", Value::Int(node.level))
                .rat("v", v.at(n))
                .text("xi", if node.is_leaf() { "-".to_string() } else { vector(d.strategy.at(n)) })
                .rat("c", d.consumption.at(n)),
        );
    }
    Ok(r)
}

/// Axioms plus the cross-module invariants on `count` seeded claims.
pub fn cmd_check(m: &Market, time: Option<usize>, seed: u64, count: usize, opts: VertexOptions) -> Result<Report> {
    let tree = &m.tree;
    let times: Vec<usize> = match time {
        Some(t) => {
            tree.check_time(t)?;
            vec![t]
        }
        None => (0..=m.horizon()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = tree.num_leaves();
    let claims: Vec<Claim> = (0..count.max(1)).map(|_| random::claim(&mut rng, leaves, false)).collect();
    let positive: Vec<Claim> = claims.iter().map(|h| h.map(|x| x.abs())).collect();
    let mut r = Report::default();
    let outcome = |r: &mut Report, name: &str, t: usize, ok: bool, detail: String| {
        if !ok {
            r.failures += 1;
        }
        r.push(
            Record::new("property")
                .text("name", name)
                .with("t", Value::Int(t))
                .text("result", if ok { "pass" } else { "FAIL" })
                .text("detail", detail),
        );
    };
    for &t in &times {
        for rep in check_axioms(m, t, &claims, seed)? {
            if rep.axiom == Axiom::Linearity {
                let detail = if rep.holds { "linear: market complete on samples" } else { "nonlinear" };
                r.push(
                    Record::new("property")
                        .text("name", rep.axiom.name())
                        .with("t", Value::Int(t))
                        .text("result", "info")
                        .text("detail", detail),
                );
                continue;
            }
            let detail = match &rep.counterexample {
                None => format!("{} cases", rep.cases),
                Some(c) => format!(
                    "atom {} at t={}: {} on claims {}",
                    c.atom,
                    c.time,
                    vector(&c.values),
                    c.claims.iter().map(|h| vector(&h.payoff)).collect::<Vec<_>>().join(" ")
                ),
            };
            outcome(&mut r, rep.axiom.name(), t, rep.holds, detail);
        }

        let mut duality = true;
        let mut oracle = true;
        let mut attain = true;
        let mut all_attainable = true;
        let mut linear = true;
        for (h, p) in claims.iter().zip(&positive) {
            let sup = superhedge(m, h, t)?;
            let sub = subhedge(m, h, t)?;
            duality &= sup.price == upper_price(m, h, t)?.values && sub.price == lower_price(m, h, t)?.values;
            oracle &= acceptance_oracle(m, h, t)? == sup.price;
            linear &= sup.price == sub.price;
            let iv = price_interval(m, p, t)?;
            let a = is_attainable_with(m, p, t, opts)?;
            attain &= iv.degenerate() == a.attainable;
            all_attainable &= a.all();
        }
        outcome(&mut r, "duality", t, duality, format!("{} claims", claims.len()));
        outcome(&mut r, "acceptance-oracle", t, oracle, format!("{} claims", claims.len()));
        outcome(&mut r, "attainable-iff-degenerate", t, attain, format!("{} claims", claims.len()));
        let complete = is_complete_at(m, t)?.complete;
        let agree = complete == all_attainable && complete == linear;
        outcome(
            &mut r,
            "completeness",
            t,
            agree,
            format!("complete={complete} attainable={all_attainable} linear={linear}"),
        );
    }
    let mut decomp = true;
    for p in &positive {
        let v = superhedge(m, p, 0)?.process;
        let d = optional_decomposition(m, &v)?;
        let surplus: Vec<Rational> = tree.level(m.horizon()).map(|n| d.consumption.at(n).clone()).collect();
        decomp &= d.reconstruct(m, v.at(tree.root())) == v && surplus.iter().all(|c| !c.is_negative());
    }
    outcome(&mut r, "optional-decomposition", 0, decomp, format!("{} claims", positive.len()));
    Ok(r)
}

/// Parses arguments, runs the command and prints the report. Returns the
/// process exit code: 0 on success, 1 on property failures, 2 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.failures == 0 {
                0
            } else {
                eprintln!("{} check(s) failed", report.failures);
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
