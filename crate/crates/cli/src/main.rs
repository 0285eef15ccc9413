//! Command-line front end: exact correlator/coefficient queries and
//! the identity verification suites, with an optional persistent
//! correlator cache.
//!
//! Exit codes: 0 all requested values computed / all identities pass,
//! 1 at least one identity failed, 2 usage or configuration error
//! (including a malformed cache).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kdvtau::{
    check_cor41, check_cor42, check_galilean_group, check_hirota, check_kdv, check_theorem18,
    fmt_rat, CorrelatorTable, Error, GalileanMap, HirotaWindow, TruncationSpec,
    VerificationReport, WkEngine,
};

const EXIT_IDENTITY_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "kdvtau", version, about = "Exact KdV tau-function coefficients and identity checks")]
struct Cli {
    /// Correlator cache file; loaded if present, rewritten on success
    #[arg(long, global = true, env = "KDVTAU_CACHE")]
    cache: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Single-threaded, order-stable traversal
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Intersection number of psi-classes at the given genus
    Wk(Query),
    /// Generalized BGW coefficient, with its power of x^2
    Cbgw(Query),
    /// NBI coefficient, with its power of x^2/2
    Nbi(Query),
    /// Kappa-class integral against psi-classes
    Kn(KnQuery),
    /// Run a verification suite; exit 0 iff every coefficient passes
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Query {
    /// Genus
    #[arg(long)]
    g: u32,
    /// Comma-separated psi exponents, e.g. --ks 0,1,2
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u32>,
}

#[derive(Args)]
struct KnQuery {
    /// Genus
    #[arg(long)]
    g: u32,
    /// Comma-separated psi exponents
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    ks: Option<Vec<u32>>,
    /// Number of marked points, all with exponent 0 (use --n 0 for the
    /// zero-pointed integral)
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Kdv,
    Hirota,
    Theorem18,
    Cor41,
    Cor42,
    GalileanGroup,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run
    #[arg(value_enum)]
    suite: Suite,
    /// Max genus (guard rail: <= 6)
    #[arg(long, default_value_t = 2)]
    gmax: u32,
    /// Max number of insertions / time-degree (guard rail: <= 10)
    #[arg(long, default_value_t = 3)]
    nmax: u32,
    /// Max exposed time index
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    /// Max q-order for the symmetry suites
    #[arg(long, default_value_t = 3)]
    qmax: u32,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.deterministic { 1 } else { cli.threads };
    if threads > 0 {
        // ignore the error if a pool already exists (tests call run
        // repeatedly in one process)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let table = Arc::new(CorrelatorTable::new());
    if let Some(path) = &cli.cache {
        if path.exists() {
            table.load(path)?;
        }
    }

    let code = match &cli.command {
        Command::Wk(q) => {
            let v = WkEngine::new(table.clone()).correlator(q.g, &q.ks);
            print_scalar(cli.format, "wk", q.g, &q.ks, &fmt_rat(&v), None);
            ExitCode::SUCCESS
        }
        Command::Cbgw(q) => {
            let c = kdvtau::BgwEngine::new(table.clone()).cbgw_coefficient(q.g, &q.ks);
            print_scalar(
                cli.format,
                "cbgw",
                q.g,
                &q.ks,
                &fmt_rat(&c.value),
                Some(("x²", c.yexp)),
            );
            ExitCode::SUCCESS
        }
        Command::Nbi(q) => {
            let c = kdvtau::BgwEngine::new(table.clone()).nbi_correlator(q.g, &q.ks);
            print_scalar(
                cli.format,
                "nbi",
                q.g,
                &q.ks,
                &fmt_rat(&c.value),
                Some(("x²/2", c.yexp)),
            );
            ExitCode::SUCCESS
        }
        Command::Kn(q) => {
            let ks = match (&q.ks, q.n) {
                (Some(ks), None) => ks.clone(),
                (None, Some(n)) => vec![0; n as usize],
                (None, None) => {
                    return Err(Error::Config("kn needs --ks or --n".into()));
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let v = kdvtau::KappaEngine::new(table.clone()).kn_psi_integral(q.g, &ks)?;
            print_scalar(cli.format, "kn", q.g, &ks, &fmt_rat(&v), None);
            ExitCode::SUCCESS
        }
        Command::Verify(args) => {
            if args.gmax > 6 || args.nmax > 10 {
                return Err(Error::Config(
                    "guard rails: gmax <= 6 and nmax <= 10".into(),
                ));
            }
            let report = run_suite(args.suite, args, table.clone())?;
            emit_report(cli.format, &report, args.out.as_deref())?;
            if report.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_IDENTITY_FAILURE)
            }
        }
    };

    if let Some(path) = &cli.cache {
        table.save(path)?;
    }
    Ok(code)
}

fn run_suite(
    suite: Suite,
    args: &VerifyArgs,
    table: Arc<CorrelatorTable>,
) -> Result<VerificationReport, Error> {
    let (gmax, nmax, kmax, qmax) = (args.gmax, args.nmax, args.kmax, args.qmax);
    match suite {
        Suite::Theorem18 => Ok(check_theorem18(table, gmax, nmax, kmax)),
        Suite::Cor41 => Ok(check_cor41(table, gmax, nmax, kmax)),
        Suite::Cor42 => Ok(check_cor42(table, gmax, nmax, kmax)),
        Suite::Kdv => {
            let u = WkEngine::new(table).solution(TruncationSpec::new(gmax, nmax, kmax, 0, 0));
            check_kdv(&u)
        }
        Suite::Hirota => {
            let f =
                WkEngine::new(table).free_energy(TruncationSpec::new(gmax, nmax, kmax, 0, 0));
            let ps: Vec<u32> = [0u32, 1].into_iter().filter(|&p| 1 + 2 * p <= nmax).collect();
            check_hirota(&f, &ps, &HirotaWindow { dmax: 2, dimension_graded: true })
        }
        Suite::GalileanGroup => {
            let q = qmax.max(1);
            check_galilean_group(table, TruncationSpec::new(gmax, nmax, kmax, q, q))
        }
        Suite::All => {
            let mut merged = VerificationReport::new(
                "all",
                format!("gmax={gmax} nmax={nmax} kmax={kmax} qmax={qmax}"),
            );
            for s in [
                Suite::Kdv,
                Suite::Hirota,
                Suite::Theorem18,
                Suite::Cor41,
                Suite::Cor42,
                Suite::GalileanGroup,
            ] {
                merged.merge(run_suite(s, args, table.clone())?);
            }
            // the symmetry-transported solution is part of the full
            // certification: the transformed WK solution still solves
            // the first flow
            let gl = gmax.min(1);
            let u = WkEngine::new(table)
                .solution(TruncationSpec::new(gl, nmax.max(4), kmax.min(2), 2, 2));
            let ut = kdvtau::transform_solution(&u, &GalileanMap::Formal)?;
            merged.merge(check_kdv(&ut)?);
            Ok(merged)
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn print_scalar(
    format: Format,
    command: &str,
    g: u32,
    ks: &[u32],
    value: &str,
    base: Option<(&str, i64)>,
) {
    match format {
        Format::Table => match base {
            Some((b, e)) => println!("{value} · ({b})^{e}"),
            None => println!("{value}"),
        },
        Format::Json => {
            let mut obj = json!({
                "command": command,
                "g": g,
                "ks": ks,
                "value": value,
            });
            if let Some((b, e)) = base {
                obj["base"] = json!(b);
                obj["exponent"] = json!(e);
            }
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
        }
        Format::Csv => {
            let ks_str = ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
            let (b, e) = base.map(|(b, e)| (b.to_string(), e.to_string())).unwrap_or_default();
            println!("command,g,ks,value,base,exponent");
            println!(
                "{},{},{},{},{},{}",
                command,
                g,
                csv_field(&ks_str),
                csv_field(value),
                csv_field(&b),
                e
            );
        }
    }
}

fn emit_report(
    format: Format,
    report: &VerificationReport,
    out: Option<&Path>,
) -> Result<(), Error> {
    let body = match format {
        Format::Table => {
            let mut lines = report.render_lines();
            lines.push(format!(
                "# summary passed={} failed={}",
                report.passed(),
                report.failed()
            ));
            lines.join("\n") + "\n"
        }
        Format::Json => {
            let records: Vec<_> = report
                .records
                .iter()
                .map(|r| {
                    json!({
                        "location": r.location,
                        "lhs": r.lhs,
                        "rhs": r.rhs,
                        "ok": r.ok,
                    })
                })
                .collect();
            let obj = json!({
                "identity": report.identity,
                "params": report.params,
                "header": report.header,
                "passed": report.passed(),
                "failed": report.failed(),
                "records": records,
            });
            serde_json::to_string_pretty(&obj).unwrap() + "\n"
        }
        Format::Csv => {
            let mut lines = vec!["identity,location,lhs,rhs,ok".to_string()];
            for r in &report.records {
                lines.push(format!(
                    "{},{},{},{},{}",
                    csv_field(&report.identity),
                    csv_field(&r.location),
                    csv_field(&r.lhs),
                    csv_field(&r.rhs),
                    r.ok
                ));
            }
            lines.join("\n") + "\n"
        }
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}
