//! Command-line front end. [`run`] does all the work and returns the exit
//! code and output, so it can be tested without spawning a process.
//!
//! Exit codes: 0 when everything requested passed, 1 when a verification
//! failed, 2 on invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::moments::{moment, Family};
use crate::numerics::{
    display_rational, fraction_string, parse_rational, round_decimal, Enclosure, ExactRational,
};
use crate::partitions::Partition;
use crate::rank_laws::{
    joint_class, joint_selmer, joint_sha, marginal_class, marginal_selmer, marginal_sha, LawValue,
    RankVector,
};
use crate::verify::{self, SampleReport, TableReport, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "clrank", version, about = "Cohen-Lenstra style moments and rank laws, with verification suites")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Decimals shown for enclosures.
    #[arg(long, env = "CLRANK_DIGITS", default_value_t = 8, global = true)]
    pub digits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Class,
    Sha,
    Selmer,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long)]
    pub p: u64,
    /// Weighting parameter u (class and sha).
    #[arg(long, default_value_t = 0)]
    pub u: u32,
    /// Proportion of even-rank curves (selmer).
    #[arg(long, default_value = "1/2")]
    pub alpha: String,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        Ok(match self.family {
            FamilyName::Class => Family::ClassGroup { u: self.u },
            FamilyName::Sha => Family::Sha { u: self.u },
            FamilyName::Selmer => Family::selmer(parse_rational(&self.alpha)?)?,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact moment indexed by a partition.
    Moment {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Partition, e.g. "2,1,1" or "1^2 2^1"; "" for the empty partition.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Joint or marginal rank law.
    Ranklaw {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Joint law at this rank parameter, e.g. "1,0".
        #[arg(long, conflicts_with_all = ["l", "k", "rank"])]
        joint: Option<String>,
        /// Marginal law of the p^l-rank.
        #[arg(long)]
        l: Option<u32>,
        /// Rank parameter k (ranks are k, 2k, 2k+delta for class, sha, selmer).
        #[arg(long, conflicts_with = "rank")]
        k: Option<u32>,
        /// Actual rank value.
        #[arg(long)]
        rank: Option<u32>,
        /// Selmer parity for --joint or --k.
        #[arg(long, default_value_t = 0)]
        delta: u32,
        #[arg(long, default_value = "1e-12")]
        tol: String,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Truncated moment system for one partition.
    System {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Selmer only: check a single parity slice.
        #[arg(long)]
        delta: Option<u32>,
        #[arg(long = "R", default_value_t = 20)]
        big_r: u32,
        #[arg(long, default_value = "1e-6")]
        tol: String,
    },
    /// The mixed even/odd candidate for the conjugate-indexed Sha system.
    Usystem {
        #[arg(long)]
        mix: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        u: u32,
        /// Repeatable; defaults to every partition with parts <= 2 and length <= 2.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long = "R", default_value_t = 20)]
        big_r: u32,
        #[arg(long, default_value = "1e-6")]
        tol: String,
    },
    /// Recompute the published f(p, l, rank) tables.
    Tables,
    /// Duality identity for every partition up to a size.
    Identity {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        max_size: u32,
    },
    /// Total mass of the truncated joint law.
    Normalization {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long = "R", default_value_t = 25)]
        big_r: u32,
        #[arg(long, default_value = "1e-6")]
        tol: String,
    },
    /// Large-l and large-p limits.
    Limits,
    /// Joint law summed down to the closed-form marginal.
    Marginalization {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        delta: u32,
        #[arg(long = "R", default_value_t = 25)]
        big_r: u32,
        #[arg(long, default_value = "1e-8")]
        tol: String,
    },
    /// Monte-Carlo sampling from the truncated joint law.
    Sample {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long = "R", default_value_t = 20)]
        big_r: u32,
    },
}

/// Exit code plus captured streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One result in a command's output.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)] // short-lived, collected once per command
enum Item {
    Moment(MomentOut),
    Law(LawOut),
    Report(VerificationReport),
    Tables(TableReport),
    Sample(SampleReport),
}

#[derive(Debug, Clone, Serialize)]
struct MomentOut {
    kind: &'static str,
    #[serde(flatten)]
    family: Family,
    p: u64,
    lambda: String,
    value: String,
    decimal: String,
}

#[derive(Debug, Clone, Serialize)]
struct LawOut {
    kind: &'static str,
    #[serde(flatten)]
    law: LawValue,
    decimal: String,
    certain: bool,
}

impl Item {
    fn pass(&self) -> bool {
        match self {
            Item::Moment(_) | Item::Law(_) => true,
            Item::Report(r) => r.pass,
            Item::Tables(t) => t.pass,
            Item::Sample(s) => s.pass,
        }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((name, items)) => {
            let pass = items.iter().all(Item::pass);
            CliOutput {
                code: if pass { EXIT_PASS } else { EXIT_FAIL },
                stdout: render(&cli, name, pass, &items),
                stderr: String::new(),
            }
        }
        Err(e) => CliOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn partition(s: &str) -> Result<Partition> {
    s.parse()
}

fn law_item(law: LawValue, digits: u32) -> Item {
    let r = round_decimal(&law.probability, digits);
    Item::Law(LawOut {
        kind: "law",
        decimal: r.to_string(),
        certain: r.certain,
        law,
    })
}

fn execute(cli: &Cli) -> Result<(&'static str, Vec<Item>)> {
    match &cli.command {
        Command::Moment { fam, lambda } => {
            let family = fam.family()?;
            let lambda = partition(lambda)?;
            let v = moment(&family, &lambda, fam.p)?;
            let decimal = round_decimal(&Enclosure::exact(v.clone()), cli.digits).to_string();
            Ok((
                "moment",
                vec![Item::Moment(MomentOut {
                    kind: "moment",
                    family,
                    p: fam.p,
                    lambda: lambda.to_string(),
                    value: fraction_string(&v),
                    decimal,
                })],
            ))
        }
        Command::Ranklaw { fam, joint, l, k, rank, delta, tol } => {
            let tol = parse_rational(tol)?;
            let family = fam.family()?;
            let law = if let Some(j) = joint {
                let mu: RankVector = j.parse()?;
                match &family {
                    Family::ClassGroup { u } => joint_class(&mu, fam.p, *u, &tol)?,
                    Family::Sha { u } => joint_sha(&mu, fam.p, *u, &tol)?,
                    Family::Selmer { alpha } => joint_selmer(&mu, fam.p, *delta, alpha, &tol)?,
                }
            } else {
                let ell = l.ok_or_else(|| invalid("give either --joint or --l with --k/--rank"))?;
                let (k, delta) = match (k, rank, &family) {
                    (Some(k), None, _) => (*k, *delta),
                    (None, Some(r), Family::ClassGroup { .. }) => (*r, 0),
                    (None, Some(r), Family::Sha { .. }) => {
                        if r % 2 == 1 {
                            return Err(invalid("Sha ranks are even"));
                        }
                        (r / 2, 0)
                    }
                    (None, Some(r), Family::Selmer { .. }) => (r / 2, r % 2),
                    _ => return Err(invalid("give exactly one of --k and --rank")),
                };
                match &family {
                    Family::ClassGroup { u } => marginal_class(fam.p, ell, k, *u, &tol)?,
                    Family::Sha { u } => marginal_sha(fam.p, ell, k, *u, &tol)?,
                    Family::Selmer { alpha } => marginal_selmer(fam.p, ell, k, delta, alpha, &tol)?,
                }
            };
            Ok(("ranklaw", vec![law_item(law, cli.digits)]))
        }
        Command::Verify { check } => verify_command(check),
    }
}

fn default_grid() -> Vec<Partition> {
    crate::partitions::partitions_up_to(2, 2).collect()
}

fn verify_command(check: &VerifyCommand) -> Result<(&'static str, Vec<Item>)> {
    let reports = |v: Vec<VerificationReport>| v.into_iter().map(Item::Report).collect::<Vec<_>>();
    Ok(match check {
        VerifyCommand::System { fam, lambda, delta, big_r, tol } => {
            let tol = parse_rational(tol)?;
            let family = fam.family()?;
            let lambda = partition(lambda)?;
            let r = match (delta, &family) {
                (None, _) => verify::check_system(&family, &lambda, fam.p, &tol, *big_r)?,
                (Some(d), Family::Selmer { alpha }) => {
                    verify::check_selmer_slice(&lambda, fam.p, alpha, *d, &tol, *big_r)?
                }
                (Some(_), _) => return Err(invalid("--delta applies to the selmer family only")),
            };
            ("verify system", vec![Item::Report(r)])
        }
        VerifyCommand::Usystem { mix, p, u, lambda, big_r, tol } => {
            let tol = parse_rational(tol)?;
            let mix = parse_rational(mix)?;
            let grid = if lambda.is_empty() {
                default_grid()
            } else {
                lambda.iter().map(|s| partition(s)).collect::<Result<Vec<_>>>()?
            };
            ("verify usystem", reports(verify::check_u_grid(&mix, *p, *u, &grid, &tol, *big_r)?))
        }
        VerifyCommand::Tables => ("verify tables", vec![Item::Tables(verify::reproduce_tables()?)]),
        VerifyCommand::Identity { p, max_size } => {
            ("verify identity", reports(verify::check_identity(*p, *max_size)?))
        }
        VerifyCommand::Normalization { fam, l, big_r, tol } => {
            let tol = parse_rational(tol)?;
            let r = verify::check_normalization(&fam.family()?, fam.p, *l, &tol, *big_r)?;
            ("verify normalization", vec![Item::Report(r)])
        }
        VerifyCommand::Limits => {
            let one = ExactRational::from_integer(1.into());
            ("verify limits", reports(verify::check_limits(&one)?))
        }
        VerifyCommand::Marginalization { fam, l, k, delta, big_r, tol } => {
            let tol = parse_rational(tol)?;
            let r = verify::check_marginalization(&fam.family()?, *delta, fam.p, *l, *k, &tol, *big_r)?;
            ("verify marginalization", vec![Item::Report(r)])
        }
        VerifyCommand::Sample { fam, seed, n, l, lambda, big_r } => {
            let r = verify::sample_ranks(*seed, *n, &fam.family()?, fam.p, *l, &partition(lambda)?, *big_r)?;
            ("verify sample", vec![Item::Sample(r)])
        }
    })
}

fn render(cli: &Cli, name: &str, pass: bool, items: &[Item]) -> String {
    match cli.format {
        Format::Json => {
            let doc = json!({"command": name, "pass": pass, "results": items});
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(items),
        Format::Text => render_text(items, cli.digits),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn params_string(m: &serde_json::Map<String, Value>) -> String {
    m.iter()
        .map(|(k, v)| match v {
            Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// CSV layouts (header row first):
///
/// * moment: `family,p,lambda,value,decimal`
/// * law: `family,p,params,lo,hi,decimal`
/// * report: `check,params,lhs_lo,lhs_hi,rhs_lo,rhs_hi,residual,tail,truncation,pass`
/// * tables: `p,l,rank,printed,rounded,truncated,status`
/// * sample: `ranks,probability,count,frequency,std_error,within_4_sigma`
fn render_csv(items: &[Item]) -> String {
    let mut out = String::new();
    let mut header_done = false;
    let mut header = |out: &mut String, h: &str| {
        if !header_done {
            out.push_str(h);
            out.push('\n');
            header_done = true;
        }
    };
    for item in items {
        match item {
            Item::Moment(m) => {
                header(&mut out, "family,p,lambda,value,decimal");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    m.family.name(),
                    m.p,
                    csv_field(&m.lambda),
                    m.value,
                    csv_field(&m.decimal)
                );
            }
            Item::Law(l) => {
                header(&mut out, "family,p,params,lo,hi,decimal");
                let params: Vec<String> = l.law.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    l.law.family,
                    l.law.p,
                    csv_field(&params.join(";")),
                    fraction_string(l.law.probability.lo()),
                    fraction_string(l.law.probability.hi()),
                    csv_field(&l.decimal)
                );
            }
            Item::Report(r) => {
                header(&mut out, "check,params,lhs_lo,lhs_hi,rhs_lo,rhs_hi,residual,tail,truncation,pass");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.check,
                    csv_field(&params_string(&r.params)),
                    fraction_string(r.lhs.lo()),
                    fraction_string(r.lhs.hi()),
                    fraction_string(r.rhs.lo()),
                    fraction_string(r.rhs.hi()),
                    fraction_string(&r.residual),
                    fraction_string(&r.tail),
                    r.truncation.map(|t| t.to_string()).unwrap_or_default(),
                    r.pass
                );
            }
            Item::Tables(t) => {
                header(&mut out, "p,l,rank,printed,rounded,truncated,status");
                for c in &t.cells {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        c.p,
                        c.ell,
                        c.rank,
                        c.printed,
                        c.rounded,
                        c.truncated,
                        serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
                    );
                }
            }
            Item::Sample(s) => {
                header(&mut out, "ranks,probability,count,frequency,std_error,within_4_sigma");
                for o in &s.outcomes {
                    let ranks: Vec<String> = o.ranks.iter().map(|r| r.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "{},{:e},{},{:e},{:e},{}",
                        csv_field(&ranks.join(",")),
                        o.probability,
                        o.count,
                        o.frequency,
                        o.std_error,
                        o.within_4_sigma
                    );
                }
            }
        }
    }
    out
}

fn render_text(items: &[Item], digits: u32) -> String {
    let mut out = String::new();
    for item in items {
        match item {
            Item::Moment(m) => {
                let v = parse_rational(&m.value).expect("own output");
                let _ = writeln!(out, "{}", display_rational(&v));
                let _ = writeln!(out, "{}", m.decimal);
            }
            Item::Law(l) => {
                let _ = writeln!(out, "{}", l.decimal);
                let e = &l.law.probability;
                let _ = writeln!(
                    out,
                    "enclosure [{:.3e}, {:.3e}] width {:.1e}",
                    crate::numerics::to_f64(e.lo()),
                    crate::numerics::to_f64(e.hi()),
                    crate::numerics::to_f64(&e.width())
                );
                for n in &l.law.notes {
                    let _ = writeln!(out, "note: {n}");
                }
            }
            Item::Report(r) => {
                let _ = writeln!(out, "{}", r.text_line(digits));
            }
            Item::Tables(t) => out.push_str(&t.text()),
            Item::Sample(s) => {
                let _ = writeln!(
                    out,
                    "{} sample seed={} n={} moment={} empirical={:.6} se={:.6}",
                    if s.pass { "PASS" } else { "FAIL" },
                    s.seed,
                    s.draws,
                    s.moment,
                    s.empirical_moment,
                    s.moment_std_error
                );
                for o in &s.outcomes {
                    let _ = writeln!(
                        out,
                        "  ranks={:?} p={:.6} freq={:.6} se={:.2e}{}",
                        o.ranks,
                        o.probability,
                        o.frequency,
                        o.std_error,
                        if o.within_4_sigma { "" } else { "  (outside 4 sigma)" }
                    );
                }
            }
        }
    }
    out
}
