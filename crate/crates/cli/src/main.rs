use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use arpa_forge::designs::{check_arpa, check_cpa, pi_pair, ratio, DesignPair, PairKind, Verdict};
use arpa_forge::io::{pair_from_json_value, pair_to_json, parse_pair_text, write_pair_text};
use arpa_forge::lift::{construct_arpa, lift_pair, verify_lift, Construction};
use arpa_forge::lp::{delta_by_bases, delta_opt, gamma_report, optimal_cpa};
use arpa_forge::regular::{materialize, RepVec};
use arpa_forge::{fixtures, suites, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "arpa-forge", version, about = "Build and check ARPA and CPA designs with exact arithmetic")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Arpa,
    Cpa,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal ratio of a (q, p)-ARPA of strength k.
    Gamma { q: usize, p: usize, k: usize },
    /// Optimal ratio of a (nu, d)-CPA of strength k by both routes.
    Delta { nu: usize, d: usize, k: usize },
    /// Optimal regular CPA.
    Construct {
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Emit explicit arrays instead of count vectors.
        #[arg(long)]
        materialize: bool,
        /// Divide the counts by their gcd.
        #[arg(long)]
        reduce: bool,
    },
    /// Lift a regular CPA (pair JSON, pair text or count-vector JSON) to an ARPA.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check a pair file at strength k.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        k: usize,
    },
    /// Regenerate a reference table and compare it with the shipped pairs.
    Table {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(["1", "2", "3", "5", "6", "7"]))]
        n: String,
        /// Also print the arrays.
        #[arg(long)]
        rows: bool,
    },
    /// Run the randomized identity suites.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        iters: usize,
    },
}

/// Failure classes mapped to exit codes.
enum Fail {
    /// A check ran and did not pass. The report is already printed.
    Verification,
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameters(_)
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::Shape(_)
            | Error::NoClosedForm { .. } => Fail::Usage(e.to_string()),
            _ => Fail::Runtime(e.to_string()),
        }
    }
}

type Out = Result<(), Fail>;

fn emit_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn emit_csv(header: &[&str], rows: &[Vec<String>]) {
    println!("{}", csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    for r in rows {
        println!("{}", csv_line(r));
    }
}

/// One CSV line per distinct array row.
fn pair_csv(pair: &DesignPair) {
    let n = pair.params.size;
    let mut header = vec!["side".to_string(), "multiplicity".to_string()];
    header.extend((0..n).map(|j| format!("c{j}")));
    println!("{}", csv_line(&header));
    for (side, a) in [("first", &pair.first), ("second", &pair.second)] {
        for (w, m) in a.iter() {
            let mut r = vec![side.to_string(), m.to_string()];
            r.extend(w.symbols().iter().map(|s| s.to_string()));
            println!("{}", csv_line(&r));
        }
    }
}

fn emit_pair(fmt: Format, pair: &DesignPair) {
    match fmt {
        Format::Text => print!("{}", write_pair_text(pair)),
        Format::Json => emit_json(&pair_to_json(pair)),
        Format::Csv => pair_csv(pair),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "passed": v.passed(),
        "failures": v.failures.iter().map(|f| json!({
            "condition": f.condition.name(),
            "witness": f.witness.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn gamma_cmd(fmt: Format, q: usize, p: usize, k: usize) -> Out {
    let r = gamma_report(q, p, k)?;
    let seq = r.sequence.as_ref().map(|s| s.to_string());
    match fmt {
        Format::Text => {
            println!("{}", r.value);
            println!("sequence {}", seq.as_deref().unwrap_or("none (p = q)"));
            println!("min_rstar {}", r.min_rstar);
        }
        Format::Json => emit_json(&json!({
            "q": q, "p": p, "k": k,
            "gamma": r.value.to_string(),
            "sequence": r.sequence.as_ref().map(|s| s.as_slice().to_vec()),
            "min_rstar": r.min_rstar.to_string(),
        })),
        Format::Csv => emit_csv(
            &["q", "p", "k", "gamma", "sequence", "min_rstar"],
            &[vec![
                q.to_string(),
                p.to_string(),
                k.to_string(),
                r.value.to_string(),
                seq.unwrap_or_default(),
                r.min_rstar.to_string(),
            ]],
        ),
    }
    Ok(())
}

fn delta_cmd(fmt: Format, nu: usize, d: usize, k: usize) -> Out {
    let opt = delta_opt(nu, d, k)?;
    let bases = delta_by_bases(nu, d, k, true)?;
    let agree = opt.value == bases.delta;
    match fmt {
        Format::Text => {
            println!("{}", opt.value);
            println!("maximisation {} at {}", opt.value, opt.sequence);
            println!(
                "bases {} ({} feasible, {} optimal)",
                bases.delta,
                bases.feasible_bases,
                bases.optimal_bases.len()
            );
            println!("agree {agree}");
        }
        Format::Json => emit_json(&json!({
            "nu": nu, "d": d, "k": k,
            "delta": opt.value.to_string(),
            "maximisation": opt.value.to_string(),
            "sequence": opt.sequence.as_slice(),
            "bases": bases.delta.to_string(),
            "optimal_bases": bases.optimal_bases.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "agree": agree,
        })),
        Format::Csv => emit_csv(
            &["nu", "d", "k", "maximisation", "bases", "agree"],
            &[vec![
                nu.to_string(),
                d.to_string(),
                k.to_string(),
                opt.value.to_string(),
                bases.delta.to_string(),
                agree.to_string(),
            ]],
        ),
    }
    if agree {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

fn repvec_text(v: &RepVec) -> String {
    let join = |c: &[u64]| c.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    format!(
        "nu {} d {} k {}\ny {}\nx {}\nratio {}\n",
        v.nu,
        v.d,
        v.k,
        join(&v.y),
        join(&v.x),
        v.ratio()
    )
}

fn construct_cmd(fmt: Format, nu: usize, d: usize, k: usize, mat: bool, reduce: bool) -> Out {
    let mut v = optimal_cpa(nu, d, k)?;
    if reduce {
        v = v.reduced();
    }
    if mat {
        emit_pair(fmt, &materialize(&v)?);
        return Ok(());
    }
    match fmt {
        Format::Text => print!("{}", repvec_text(&v)),
        Format::Json => {
            let mut j = serde_json::to_value(&v).expect("counts serialize");
            j["ratio"] = json!(v.ratio().to_string());
            emit_json(&j);
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = (0..=nu)
                .map(|i| {
                    let x = v.x.get(i).copied().unwrap_or(0);
                    vec![i.to_string(), v.y[i].to_string(), x.to_string()]
                })
                .collect();
            emit_csv(&["weight", "y", "x"], &rows);
        }
    }
    Ok(())
}

fn read_input(path: &PathBuf) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Reads a pair from JSON or the text format.
fn read_pair(text: &str) -> Result<DesignPair, Fail> {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => Ok(pair_from_json_value(v)?),
        Err(_) => Ok(parse_pair_text(text)?),
    }
}

fn lift_input(text: &str) -> Result<Construction, Fail> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        if v.get("y").is_some() {
            let rv: RepVec = serde_json::from_value(v).map_err(|e| Fail::Usage(e.to_string()))?;
            rv.validate()?;
            return Ok(lift_pair(&materialize(&rv)?)?);
        }
    }
    let pair = read_pair(text)?;
    if pair.kind != PairKind::Cpa {
        return Err(Fail::Usage("lift expects a CPA pair".into()));
    }
    Ok(lift_pair(&pair)?)
}

fn lift_cmd(fmt: Format, input: &PathBuf) -> Out {
    let c = lift_input(&read_input(input)?)?;
    let dp = c.lifted.d_prime;
    let report = verify_lift(&c.arpa, &c.scaled_cpa, dp)?;
    match fmt {
        Format::Text => {
            println!("d' {dp}");
            println!("ratio {}", ratio(&c.arpa));
            println!("interprets {}", report.interprets);
            println!("verdict {}", report.verdict);
            print!("{}", write_pair_text(&c.arpa));
        }
        Format::Json => emit_json(&json!({
            "d_prime": dp,
            "ratio": ratio(&c.arpa).to_string(),
            "scale": c.lifted.ztilde.scale.to_string(),
            "interprets": report.interprets,
            "verdict": verdict_json(&report.verdict),
            "arpa": pair_to_json(&c.arpa),
        })),
        Format::Csv => pair_csv(&c.arpa),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

fn verify_cmd(fmt: Format, input: &PathBuf, kind: Kind, k: usize) -> Out {
    let pair = read_pair(&read_input(input)?)?;
    let p = pair.params;
    let v = match kind {
        Kind::Arpa => check_arpa(&pair, p.size, p.budget, k)?,
        Kind::Cpa => check_cpa(&pair, p.size, p.budget, k)?,
    };
    match fmt {
        Format::Text => {
            println!("{v}");
            println!("ratio {}", ratio(&pair));
        }
        Format::Json => {
            let mut j = verdict_json(&v);
            j["ratio"] = json!(ratio(&pair).to_string());
            emit_json(&j);
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = v
                .failures
                .iter()
                .map(|f| vec![f.condition.name().to_string(), f.witness.to_string()])
                .collect();
            emit_csv(&["condition", "witness"], &rows);
        }
    }
    if v.passed() {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

/// One regenerated table entry.
struct Entry {
    name: &'static str,
    pair: DesignPair,
    status: &'static str,
    ok: bool,
}

fn entry(name: &'static str, pair: DesignPair, status: &'static str, ok: bool) -> Entry {
    Entry { name, pair, status, ok }
}

fn lifted_entry(name: &'static str, q: usize, p: usize, k: usize) -> Result<Entry, Fail> {
    let built = construct_arpa(q, p, k)?.arpa;
    let want = fixtures::by_name(name).ok_or_else(|| Fail::Runtime(format!("missing fixture {name}")))?;
    if built == want {
        return Ok(entry(name, built, "match", true));
    }
    // Reference tables that break their own budget are compared through their projection.
    let reference_valid = want.verify()?.passed();
    let same_projection = pi_pair(&built)? == pi_pair(&want)?;
    Ok(if !reference_valid && same_projection && built.verify()?.passed() {
        entry(name, built, "projection-match (reference fails its own check)", true)
    } else {
        entry(name, built, "DIFF", false)
    })
}

fn table_entries(n: &str) -> Result<Vec<Entry>, Fail> {
    let sample = |name: &'static str| -> Result<Entry, Fail> {
        let pair = fixtures::by_name(name).ok_or_else(|| Fail::Runtime(format!("missing fixture {name}")))?;
        let ok = pair.verify()?.passed();
        Ok(entry(name, pair, if ok { "verified" } else { "FAILS CHECK" }, ok))
    };
    // Projections of the sample ARPAs regenerate the sample CPAs.
    let projected = |arpa: &'static str, cpa: &'static str| -> Result<Entry, Fail> {
        let built = pi_pair(&fixtures::by_name(arpa).expect("fixture"))?;
        let want = fixtures::by_name(cpa).expect("fixture");
        let ok = built == want && built.verify()?.passed();
        Ok(entry(cpa, built, if ok { "match" } else { "DIFF" }, ok))
    };
    let lifted_from = |name: &'static str, src: &'static str| -> Result<Entry, Fail> {
        let built = lift_pair(&fixtures::by_name(src).expect("fixture"))?.arpa;
        let ok = fixtures::by_name(name).as_ref() == Some(&built);
        Ok(entry(name, built, if ok { "match" } else { "DIFF" }, ok))
    };
    match n {
        "1" => ["sample_arpa_4_3_2", "sample_arpa_5_3_2", "sample_arpa_5_4_3"].map(sample).into_iter().collect(),
        "2" => [
            ("sample_arpa_4_3_2", "sample_cpa_4_3_2"),
            ("sample_arpa_5_3_2", "sample_cpa_5_3_2"),
            ("sample_arpa_5_4_3", "sample_cpa_5_4_3"),
        ]
        .map(|(a, c)| projected(a, c))
        .into_iter()
        .collect(),
        "3" => Ok(vec![
            lifted_from("lifted_arpa_5_4_3", "sample_cpa_5_4_3")?,
            lifted_entry("lifted_arpa_5_2_2", 5, 2, 2)?,
        ]),
        "5" => Ok(vec![lifted_entry("lifted_arpa_6_2_2", 6, 2, 2)?, lifted_entry("lifted_arpa_5_3_3", 5, 3, 3)?]),
        "6" => Ok(vec![
            lifted_entry("lifted_arpa_4_2_1", 4, 2, 1)?,
            lifted_entry("lifted_arpa_5_3_1", 5, 3, 1)?,
            lifted_entry("lifted_arpa_5_4_1", 5, 4, 1)?,
        ]),
        "7" => Ok(vec![
            lifted_entry("lifted_arpa_4_3_2", 4, 3, 2)?,
            lifted_entry("lifted_arpa_5_3_2", 5, 3, 2)?,
            lifted_entry("lifted_arpa_5_4_2", 5, 4, 2)?,
        ]),
        _ => Err(Fail::Usage(format!("no table {n}"))),
    }
}

fn table_cmd(fmt: Format, n: &str, rows: bool) -> Out {
    let entries = table_entries(n)?;
    let fields = |e: &Entry| {
        let p = e.pair.params;
        vec![
            e.name.to_string(),
            e.pair.kind.to_string(),
            format!("{} {} {}", p.size, p.budget, p.strength),
            ratio(&e.pair).to_string(),
            e.pair.target_count().to_string(),
            e.pair.row_count().to_string(),
            e.pair.first.distinct_rows().to_string(),
            e.pair.second.distinct_rows().to_string(),
            e.status.to_string(),
        ]
    };
    match fmt {
        Format::Text => {
            for e in &entries {
                let f = fields(e);
                println!(
                    "{}: {} ({}) ratio {} = {}/{}, distinct rows {}+{}, {}",
                    f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8]
                );
                if rows {
                    let mut s = String::new();
                    for line in write_pair_text(&e.pair).lines() {
                        let _ = writeln!(s, "    {line}");
                    }
                    print!("{s}");
                }
            }
        }
        Format::Json => emit_json(&json!({
            "table": n,
            "entries": entries.iter().map(|e| {
                let f = fields(e);
                let mut j = json!({
                    "name": f[0], "kind": f[1], "params": f[2], "ratio": f[3],
                    "target_rows": f[4], "rows": f[5], "status": f[8], "ok": e.ok,
                });
                if rows {
                    j["pair"] = pair_to_json(&e.pair);
                }
                j
            }).collect::<Vec<_>>(),
        })),
        Format::Csv => emit_csv(
            &["name", "kind", "params", "ratio", "target_rows", "rows", "distinct_first", "distinct_second", "status"],
            &entries.iter().map(fields).collect::<Vec<_>>(),
        ),
    }
    if entries.iter().all(|e| e.ok) {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

fn identities_cmd(fmt: Format, seed: u64, iters: usize) -> Out {
    let results = suites::run_all(seed, iters);
    match fmt {
        Format::Text => results.iter().for_each(|s| println!("{s}")),
        Format::Json => emit_json(&json!({
            "seed": seed,
            "iters": iters,
            "suites": results.iter().map(|s| json!({
                "name": s.name, "cases": s.cases, "passed": s.passed(), "failures": s.failures,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => emit_csv(
            &["suite", "cases", "failures", "passed"],
            &results
                .iter()
                .map(|s| vec![s.name.to_string(), s.cases.to_string(), s.failures.len().to_string(), s.passed().to_string()])
                .collect::<Vec<_>>(),
        ),
    }
    if results.iter().all(|s| s.passed()) {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

fn configure_threads() -> Result<(), Fail> {
    let Ok(raw) = std::env::var("ARPA_FORGE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Fail::Usage(format!("ARPA_FORGE_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Out {
    configure_threads()?;
    let fmt = cli.format;
    match cli.cmd {
        Cmd::Gamma { q, p, k } => gamma_cmd(fmt, q, p, k),
        Cmd::Delta { nu, d, k } => delta_cmd(fmt, nu, d, k),
        Cmd::Construct { nu, d, k, materialize, reduce } => construct_cmd(fmt, nu, d, k, materialize, reduce),
        Cmd::Lift { input } => lift_cmd(fmt, &input),
        Cmd::Verify { input, kind, k } => verify_cmd(fmt, &input, kind, k),
        Cmd::Table { n, rows } => table_cmd(fmt, &n, rows),
        Cmd::Identities { seed, iters } => identities_cmd(fmt, seed, iters),
    }
}

/// Looks for `--format json` before clap has parsed, so usage errors can be
/// reported in the requested shape.
fn wants_json(args: &[String]) -> bool {
    args.iter().enumerate().any(|(i, a)| {
        a == "--format=json" || (a == "--format" && args.get(i + 1).map(String::as_str) == Some("json"))
    })
}

fn report_error(json_mode: bool, kind: &str, msg: &str) {
    if json_mode {
        emit_json(&json!({ "error": { "kind": kind, "message": msg } }));
    } else {
        eprintln!("error: {msg}");
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let json_mode = wants_json(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if json_mode {
                report_error(true, "usage", e.to_string().trim());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verification) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            report_error(json_mode, "usage", &msg);
            ExitCode::from(2)
        }
        Err(Fail::Runtime(msg)) => {
            report_error(json_mode, "runtime", &msg);
            ExitCode::from(1)
        }
    }
}
