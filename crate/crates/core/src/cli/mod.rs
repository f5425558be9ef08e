//! Command line: `mult`, `verify`, `interp` and `export`.

mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dlchar::{almost_unipotent, dl_character, oracle_multiplicity};
use crate::error::{Error, Result};
use crate::formulas::{analyze_family, closed_multiplicity, select_theta, Family, MultiplicityQuery, ThetaPolicy};
use crate::group::Gln;
use crate::scalar::rat_string;
use crate::weyl::Partition;

pub const SCHEMA: &str = "dlmult/1";
pub const THREADS_ENV: &str = "DLMULT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dlmult",
    version,
    about = "Exact multiplicities of Deligne-Lusztig and almost unipotent characters of GL_n(q)"
)]
struct Cli {
    /// Worker threads; defaults to $DLMULT_THREADS, then the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplicity of a tensor product of U_chi and R_T(theta) in the trivial character.
    Mult(MultArgs),
    /// Run one of the built-in verification suites.
    Verify(VerifyArgs),
    /// Interpolate a family of values over prime powers q.
    Interp(InterpArgs),
    /// Dump tables.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct MultArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
    /// Weyl characters: `triv`, `sgn`, `[2,1]` or `2+1`, comma separated.
    #[arg(long, default_value = "")]
    chars: String,
    /// Cycle type of the torus, e.g. `1,1` or `2`.
    #[arg(long)]
    torus: Option<String>,
    /// Torus character as exponents, or a policy; repeat for several.
    #[arg(long)]
    theta: Vec<String>,
    /// Also evaluate the brute force class sum and compare.
    #[arg(long)]
    oracle: bool,
    /// Include per-type contributions.
    #[arg(long)]
    breakdown: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Seed for sampled grids.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Orthogonality,
    SplitOracle,
    FormulaOracle,
    Fs,
    Green,
    Poset,
}

#[derive(Args, Debug)]
struct InterpArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: usize,
    /// Comma separated prime powers.
    #[arg(long)]
    qs: String,
    #[arg(long)]
    holdout: Option<u64>,
    #[arg(long, default_value = "")]
    chars: String,
    /// Torus for `mult`; `cox`, `split` or a cycle type for `fiber`.
    #[arg(long = "type", alias = "torus")]
    torus: Option<String>,
    /// Character selection policy for `mult` and `stst-dlcox`.
    #[arg(long)]
    theta: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    StstDlcox,
    TorusPart,
    Fiber,
    Mult,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(value_enum)]
    what: ExportKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    torus: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Weyl character for an almost unipotent character.
    #[arg(long)]
    chi: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Classes,
    Types,
    Green,
    Poset,
    Character,
}

/// Splits `a,[2,1],b` at commas outside brackets.
pub fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter().map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn parse_chars(g: &Gln, s: &str) -> Result<Vec<Partition>> {
    split_list(s).iter().map(|c| g.parse_char(c)).collect()
}

fn parse_torus(n: usize, s: &str) -> Result<Partition> {
    let p = match s.trim() {
        "cox" | "coxeter" => Partition::row(n),
        "split" => Partition::column(n),
        other => other.parse::<Partition>()?,
    };
    if p.size() != n {
        return Err(Error::InvalidArgument(format!("{p} is not a cycle type of S_{n}")));
    }
    Ok(p)
}

fn parse_qs(s: &str) -> Result<Vec<u64>> {
    s.split(',').map(|x| x.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad q '{x}'")))).collect()
}

fn configure_threads(cli: Option<usize>) {
    let n = cli.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

struct Report {
    json: Value,
    csv: Option<Vec<Vec<String>>>,
    code: i32,
}

fn emit(report: Report, format: Format, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    let text = match (format, &report.csv) {
        (Format::Csv, Some(rows)) => {
            let mut wr = csv::Writer::from_writer(Vec::new());
            for r in rows {
                wr.write_record(r)?;
            }
            String::from_utf8(wr.into_inner().map_err(|e| Error::Io(e.to_string()))?)
                .map_err(|e| Error::Io(e.to_string()))?
        }
        (Format::Csv, None) => return Err(Error::InvalidArgument("this report has no CSV form".into())),
        (Format::Json, _) => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses `args` (including the program name), runs, writes to `stdout`
/// and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    configure_threads(cli.threads);
    let result = match &cli.command {
        Command::Mult(a) => cmd_mult(a),
        Command::Verify(a) => verify::run(a.suite, a.seed).map(|(json, ok)| Report {
            json,
            csv: None,
            code: if ok { EXIT_OK } else { EXIT_MISMATCH },
        }),
        Command::Interp(a) => cmd_interp(a),
        Command::Export(a) => cmd_export(a),
    };
    match result.and_then(|r| {
        let code = r.code;
        emit(r, cli.format, &cli.out, stdout).map(|_| code)
    }) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Consistency(_) | Error::ShadowMismatch { .. } | Error::NotRational(_) => EXIT_MISMATCH,
                _ => EXIT_USAGE,
            }
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn cmd_mult(a: &MultArgs) -> Result<Report> {
    let g = Gln::new(a.n, a.q)?;
    let chars = parse_chars(&g, &a.chars)?;
    let torus = match &a.torus {
        Some(t) => parse_torus(a.n, t)?,
        None if a.theta.is_empty() => Partition::column(a.n),
        None => return Err(Error::InvalidArgument("--theta needs --torus".into())),
    };
    let entry = g.torus(&torus)?;
    let mut thetas = Vec::new();
    for s in &a.theta {
        let policy: ThetaPolicy = s.parse()?;
        let th = select_theta(&entry, &policy)?
            .ok_or_else(|| Error::InvalidArgument(format!("no character on {torus} satisfies {policy}")))?;
        thetas.push(th);
    }
    let query =
        MultiplicityQuery { n: a.n, q: a.q, chars: chars.clone(), torus: torus.clone(), thetas: thetas.clone() };
    let res = closed_multiplicity(&g, &query)?;
    let mut json = json!({
        "schema": SCHEMA,
        "command": "mult",
        "query": {
            "n": a.n,
            "q": a.q,
            "chars": chars.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "torus": torus.to_string(),
            "thetas": thetas.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        },
        "value": rat_string(&res.value),
    });
    if a.breakdown {
        json["breakdown"] = serde_json::to_value(&res.breakdown)?;
    }
    let mut code = EXIT_OK;
    let mut oracle_cell = String::new();
    let mut match_cell = String::new();
    if a.oracle {
        let brute = oracle_multiplicity(&g, &chars, &torus, &thetas)?;
        let ok = brute == res.value;
        json["oracle"] = Value::String(rat_string(&brute));
        json["match"] = Value::Bool(ok);
        oracle_cell = rat_string(&brute);
        match_cell = ok.to_string();
        if !ok {
            code = EXIT_MISMATCH;
        }
    }
    let thetas_cell = thetas.iter().map(|t| format!("({t})")).collect::<Vec<_>>().join(" ");
    let chars_cell = chars.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let csv = vec![
        vec!["n", "q", "chars", "torus", "thetas", "value", "oracle", "match"].into_iter().map(String::from).collect(),
        vec![
            a.n.to_string(),
            a.q.to_string(),
            chars_cell,
            torus.to_string(),
            thetas_cell,
            rat_string(&res.value),
            oracle_cell,
            match_cell,
        ],
    ];
    Ok(Report { json, csv: Some(csv), code })
}

fn cmd_interp(a: &InterpArgs) -> Result<Report> {
    let qs = parse_qs(&a.qs)?;
    if qs.len() < 3 {
        return Err(Error::InvalidArgument("interpolation needs at least 3 values of q".into()));
    }
    let weyl = crate::weyl::build_table(a.n)?;
    let chars_of = |s: &str| -> Result<Vec<Partition>> {
        split_list(s)
            .iter()
            .map(|c| {
                let p = match c.as_str() {
                    "triv" | "trivial" => Partition::row(a.n),
                    "sgn" | "sign" | "st" => Partition::column(a.n),
                    other => other.parse()?,
                };
                weyl.char_index(&p)
                    .map(|_| p.clone())
                    .ok_or_else(|| Error::InvalidArgument(format!("{p} is not a character of S_{}", a.n)))
            })
            .collect()
    };
    let family = match a.family {
        FamilyKind::StstDlcox => Family::Multiplicity {
            n: a.n,
            chars: vec![Partition::column(a.n), Partition::column(a.n)],
            torus: Partition::row(a.n),
            policy: a.theta.as_deref().unwrap_or("pattern:center+gp").parse()?,
        },
        FamilyKind::TorusPart => Family::TorusPart { n: a.n, chars: chars_of(&a.chars)? },
        FamilyKind::Fiber => Family::Fiber { n: a.n, torus: parse_torus(a.n, a.torus.as_deref().unwrap_or("cox"))? },
        FamilyKind::Mult => Family::Multiplicity {
            n: a.n,
            chars: chars_of(&a.chars)?,
            torus: parse_torus(a.n, a.torus.as_deref().unwrap_or("cox"))?,
            policy: a.theta.as_deref().unwrap_or("trivial").parse()?,
        },
    };
    let rep = match analyze_family(&family, &qs, a.holdout) {
        Err(Error::Precondition(msg)) => {
            let json = json!({ "schema": SCHEMA, "command": "interp", "error": msg });
            return Ok(Report { json, csv: None, code: EXIT_MISMATCH });
        }
        other => other?,
    };
    let code = if rep.holdout_ok == Some(false) { EXIT_MISMATCH } else { EXIT_OK };
    let mut json = serde_json::to_value(&rep)?;
    json["schema"] = Value::String(SCHEMA.into());
    json["command"] = Value::String("interp".into());
    json["family"] = Value::String(a.family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default());
    let mut rows = vec![vec!["q".to_string(), "value".to_string(), "theta".to_string()]];
    for p in &rep.points {
        rows.push(vec![p.q.to_string(), rat_string(&p.value), p.theta.clone().unwrap_or_default()]);
    }
    Ok(Report { json, csv: Some(rows), code })
}

fn cmd_export(a: &ExportArgs) -> Result<Report> {
    let need_q = || a.q.ok_or_else(|| Error::InvalidArgument("--q is required".into()));
    match a.what {
        ExportKind::Classes => {
            let g = Gln::new(a.n, need_q()?)?;
            let mut buf = Vec::new();
            g.classes.write_csv(&mut buf)?;
            let rows = csv_rows(&buf)?;
            let classes: Vec<Value> = g
                .classes
                .classes
                .iter()
                .map(|c| json!({ "class": c.label.canonical(), "size": c.size.to_string(), "centralizer": c.centralizer.to_string() }))
                .collect();
            let json = json!({ "schema": SCHEMA, "command": "export", "what": "classes", "n": g.n, "q": g.q, "order": g.order().to_string(), "classes": classes });
            Ok(Report { json, csv: Some(rows), code: EXIT_OK })
        }
        ExportKind::Types => {
            let g = Gln::new(a.n, need_q()?)?;
            let mut rows =
                vec![vec!["type".to_string(), "fiber".to_string(), "centralizer".to_string(), "classes".to_string()]];
            let mut types = Vec::new();
            for t in &g.types {
                rows.push(vec![
                    t.label.to_string(),
                    t.fiber.to_string(),
                    t.centralizer.to_string(),
                    t.classes.to_string(),
                ]);
                types.push(json!({ "type": t.label.to_string(), "fiber": t.fiber.to_string(), "centralizer": t.centralizer.to_string(), "classes": t.classes }));
            }
            let json =
                json!({ "schema": SCHEMA, "command": "export", "what": "types", "n": g.n, "q": g.q, "types": types });
            Ok(Report { json, csv: Some(rows), code: EXIT_OK })
        }
        ExportKind::Green => {
            let tables = crate::green::GreenTables::new(a.n)?;
            let mut buf = Vec::new();
            tables.write_csv(&mut buf)?;
            let rows = csv_rows(&buf)?;
            let mut entries = Vec::new();
            for m in 1..=a.n {
                for ((l, r), p) in &tables.table(m)?.entries {
                    entries.push(
                        json!({ "m": m, "lambda": l.to_string(), "rho": r.to_string(), "polynomial": p.to_string() }),
                    );
                }
            }
            let json = json!({ "schema": SCHEMA, "command": "export", "what": "green", "entries": entries });
            Ok(Report { json, csv: Some(rows), code: EXIT_OK })
        }
        ExportKind::Poset => {
            let g = Gln::new(a.n, need_q()?)?;
            let torus = parse_torus(a.n, a.torus.as_deref().unwrap_or("split"))?;
            let entry = g.torus(&torus)?;
            let json = json!({ "schema": SCHEMA, "command": "export", "what": "poset", "n": g.n, "q": g.q, "torus": torus.to_string(), "poset": entry.poset.to_json() });
            Ok(Report { json, csv: None, code: EXIT_OK })
        }
        ExportKind::Character => {
            let g = Gln::new(a.n, need_q()?)?;
            let (f, label) = match (&a.chi, &a.theta) {
                (Some(chi), None) => {
                    let chi = g.parse_char(chi)?;
                    let ring = crate::scalar::CycRing::new(1, 2.0 * (g.order() as f64).log2() + 16.0)?;
                    (almost_unipotent(&g, &chi, &ring)?, format!("U{chi}"))
                }
                (None, Some(th)) => {
                    let torus = parse_torus(a.n, a.torus.as_deref().unwrap_or("split"))?;
                    let entry = g.torus(&torus)?;
                    let policy: ThetaPolicy = th.parse()?;
                    let theta = select_theta(&entry, &policy)?
                        .ok_or_else(|| Error::InvalidArgument(format!("no character satisfies {policy}")))?;
                    let ring = g.ring(&[&torus], 2)?;
                    (dl_character(&g, &torus, &theta, &ring)?, format!("R_{torus}({theta})"))
                }
                _ => return Err(Error::InvalidArgument("give exactly one of --chi or --theta".into())),
            };
            let mut json = f.to_json(&g)?;
            json["schema"] = Value::String(SCHEMA.into());
            json["command"] = Value::String("export".into());
            json["character"] = Value::String(label);
            Ok(Report { json, csv: None, code: EXIT_OK })
        }
    }
}

fn csv_rows(buf: &[u8]) -> Result<Vec<Vec<String>>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(buf);
    rd.records().map(|r| Ok(r?.iter().map(String::from).collect())).collect()
}
