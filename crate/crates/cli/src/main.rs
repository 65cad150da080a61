use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rrlab::cayley::ball::cache_dir;
use rrlab::cayley::graphs::GraphBudgets;
use rrlab::cayley::{graph_phi, Graph, PhiVerdict};
use rrlab::certify::certificate::{requested_mode, verify_certificate, Certificate, RequestedMode};
use rrlab::certify::greendlinger::greendlinger_new_relator;
use rrlab::certify::{WitnessVerdict, DEFAULT_EXHAUSTIVE, DEFAULT_SAMPLES};
use rrlab::constructions::endo::{endo_witness, system_by_name};
use rrlab::constructions::witnesses::{bracket_witness, law_witness, wreath_witness};
use rrlab::oracles::catalog::{catalog_entries, parse_module, sc_relators};
use rrlab::oracles::{metabelian_law, parse_group};
use rrlab::scalesets::{classify, equivalent, parse_scale, preceq, ScaleSet};
use rrlab::scan::{scan, RowVerdict, ScanOptions};

/// `println!` that exits quietly when stdout is closed.
macro_rules! say {
    ($($arg:tt)*) => {{
        let mut out = std::io::stdout().lock();
        if let Err(e) = writeln!(out, $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(e.into());
        }
    }};
}

#[derive(Parser)]
#[command(name = "rrlab", version, about = "Relation ranges of marked groups and graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Wreath,
    Bracket,
    Law,
    Endo,
    Greendlinger,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
    Structural,
}

#[derive(Subcommand)]
enum Command {
    /// List the group specs understood by --group.
    Catalog,
    /// Scan the relation range of a group up to a length.
    Scan {
        #[arg(long)]
        group: String,
        #[arg(long)]
        max_length: usize,
        #[arg(long)]
        ball_radius: Option<usize>,
        #[arg(long, default_value_t = 64)]
        fill_area: usize,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE)]
        exhaustive_up_to: usize,
        /// Constant for classifying the In-set, e.g. 2 or 3/2.
        #[arg(long)]
        c: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the ball cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Φ of a finite graph given as an edge file.
    GraphPhi {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        max_cosets: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Scale-set classification and comparison.
    Sets {
        #[command(subcommand)]
        command: SetsCommand,
    },
    /// Generate or verify witness certificates.
    Witness {
        #[command(subcommand)]
        command: WitnessCommand,
    },
    /// Grigorchuk system utilities.
    Grig {
        #[command(subcommand)]
        command: GrigCommand,
    },
}

#[derive(Subcommand)]
enum SetsCommand {
    Classify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        c: String,
        /// `HI` or `LO..HI`.
        #[arg(long)]
        window: String,
    },
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: String,
        #[arg(long)]
        window: String,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    Gen {
        #[arg(long, value_enum)]
        method: Method,
        /// Group spec; for `endo` the system name (bs23 or grigorchuk).
        #[arg(long)]
        group: String,
        /// Parameter: n for wreath/bracket/law, k for endo, relator length for greendlinger.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GrigCommand {
    /// Elements of K_{n+1} outside K_n.
    Kchain {
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
    },
}

/// Completed run; `unknown` selects exit code 2.
struct Outcome {
    unknown: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome { unknown: false }) => ExitCode::SUCCESS,
        Ok(Outcome { unknown: true }) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    let done = Outcome { unknown: false };
    match cmd {
        Command::Catalog => {
            for (spec, about) in catalog_entries() {
                say!("{spec:<40} {about}");
            }
            Ok(done)
        }
        Command::Scan { group, max_length, ball_radius, fill_area, exhaustive_up_to, c, format, out, no_cache } => {
            let mut opts = ScanOptions::new(max_length);
            opts.ball_radius = ball_radius;
            opts.fill_area = fill_area;
            opts.exhaustive_up_to = exhaustive_up_to;
            opts.cache_dir = (!no_cache).then(cache_dir);
            let c = c.as_deref().map(parse_scale).transpose()?;
            let result = scan(&group, &opts, c)?;
            let text = match format {
                Format::Json => {
                    let mut lines = vec![json!({"record": "scan", "group": result.group, "options": result.options})];
                    for row in &result.rows {
                        let mut v = serde_json::to_value(row)?;
                        v["record"] = json!("row");
                        lines.push(v);
                    }
                    lines.push(json!({
                        "record": "summary",
                        "in_set": result.in_set,
                        "intervals": result.intervals,
                        "classification": result.classification,
                    }));
                    lines.iter().map(|v| format!("{v}\n")).collect::<String>()
                }
                Format::Table => {
                    let mut t = format!("{:>5}  {:<8} {:<20} {:>8}  note\n", "n", "verdict", "method", "checked");
                    for r in &result.rows {
                        let verdict = match r.verdict {
                            RowVerdict::In => "In",
                            RowVerdict::Out => "Out",
                            RowVerdict::Unknown => "Unknown",
                        };
                        t += &format!("{:>5}  {:<8} {:<20} {:>8}  {}\n", r.n, verdict, r.method, r.checked, r.note.as_deref().unwrap_or(""));
                    }
                    t += &format!("In: {:?}\n", result.in_set.elements());
                    if let Some(cl) = &result.classification {
                        t += &format!("classification: {:?} (c = {})\n", cl.kind, cl.c);
                    }
                    t
                }
            };
            emit(&text, out.as_deref())?;
            Ok(Outcome { unknown: result.has_unknown() })
        }
        Command::GraphPhi { edges, max_n, max_cosets, format } => {
            let x = Graph::read(&edges)?;
            let mut budgets = GraphBudgets::default();
            if let Some(m) = max_cosets {
                budgets.max_cosets = m;
            }
            let phi = graph_phi(&x, max_n, budgets)?;
            let mut unknown = false;
            for (n, v) in &phi {
                unknown |= v.decided().is_none();
                match format {
                    Format::Json => {
                        let mut rec = serde_json::to_value(v)?;
                        if !rec.is_object() {
                            rec = json!({"verdict": rec});
                        }
                        rec["n"] = json!(n);
                        say!("{rec}");
                    }
                    Format::Table => {
                        let label = match v {
                            PhiVerdict::In(_) => "In",
                            PhiVerdict::Out(_) => "Out",
                            PhiVerdict::Unknown => "Unknown",
                        };
                        say!("{n:>5}  {label}");
                    }
                }
            }
            Ok(Outcome { unknown })
        }
        Command::Sets { command } => sets(command),
        Command::Witness { command: WitnessCommand::Gen { method, group, n, out } } => {
            let cert = generate(method, &group, n)?;
            cert.save(&out)?;
            say!("{}", json!({"record": "witness", "method": cert.method, "group": cert.group_spec, "n": cert.n, "length": cert.word.chars().filter(|c| c.is_alphabetic()).count(), "out": out}));
            Ok(done)
        }
        Command::Witness { command: WitnessCommand::Verify { file, mode, samples, seed } } => {
            let cert = Certificate::load(&file)?;
            let mode = mode.and_then(|m| {
                let m = match m {
                    Mode::Exhaustive => RequestedMode::Exhaustive,
                    Mode::Sampled => RequestedMode::Sampled,
                    Mode::Structural => RequestedMode::Structural,
                };
                requested_mode(&cert, m, samples, seed)
            });
            let verdict = verify_certificate(&cert, mode)?;
            say!("{}", serde_json::to_string(&verdict)?);
            match verdict {
                WitnessVerdict::Valid { .. } => Ok(done),
                WitnessVerdict::Undecided { .. } => Ok(Outcome { unknown: true }),
                WitnessVerdict::Invalid { reason } => bail!("certificate is invalid: {reason}"),
            }
        }
        Command::Grig { command: GrigCommand::Kchain { max_depth } } => {
            let sys = system_by_name("grigorchuk")?;
            let chain = sys.chain(max_depth + 1);
            let mut ok = true;
            for (n, w) in chain.iter().enumerate().take(max_depth + 1) {
                let outside = !sys.k_membership(w, n);
                let inside = sys.k_membership(w, n + 1);
                ok &= outside && inside;
                say!("{}", json!({"record": "kchain", "n": n, "word": sys.g.format(w), "length": w.len(), "in_next": inside, "outside": outside}));
            }
            if !ok {
                bail!("chain element failed its membership check");
            }
            Ok(done)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path)?;
        }
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    Ok(())
}

fn parse_window(s: &str, default_lo: u64) -> Result<(u64, u64)> {
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once(',')) {
        Some((lo, hi)) => (lo.trim().parse()?, hi.trim().parse()?),
        None => (default_lo, s.trim().parse()?),
    };
    if lo > hi {
        bail!("empty window {s}");
    }
    Ok((lo, hi))
}

fn sets(cmd: SetsCommand) -> Result<Outcome> {
    match cmd {
        SetsCommand::Classify { file, c, window } => {
            let a = ScaleSet::read_file(&file)?;
            let v = classify(&a, parse_scale(&c)?, parse_window(&window, 1)?)?;
            say!("{}", serde_json::to_string(&v)?);
        }
        SetsCommand::Compare { a, b, c, window } => {
            let (a, b) = (ScaleSet::read_file(&a)?, ScaleSet::read_file(&b)?);
            let (c, w) = (parse_scale(&c)?, parse_window(&window, 1)?);
            let ab = preceq(&a, &b, c, w)?;
            let ba = preceq(&b, &a, c, w)?;
            say!("{}", json!({"a_preceq_b": ab, "b_preceq_a": ba, "equivalent": equivalent(&a, &b, c, w)?}));
        }
    }
    Ok(Outcome { unknown: false })
}

fn generate(method: Method, group: &str, n: usize) -> Result<Certificate> {
    let report = match method {
        Method::Wreath => wreath_witness(&parse_module(group)?, n as i64)?,
        Method::Bracket => bracket_witness(&parse_module(group)?, n as i64)?,
        Method::Law => {
            let g = parse_group(group)?;
            let module = parse_module(group).ok();
            law_witness(&g, module.as_ref(), &metabelian_law(), 4, n as i64)?
        }
        Method::Endo => {
            let sys = system_by_name(group)?;
            match endo_witness(&sys, n)? {
                Some(r) => r,
                None => bail!("no new relation of length ≤ {n} in the limit group"),
            }
        }
        Method::Greendlinger => {
            let (alphabet, relators) = sc_relators(group)?;
            let Some(r) = relators.iter().find(|r| r.len() == n) else {
                bail!("no relator of length {n} in {group}");
            };
            let shorter: Vec<_> = relators.iter().filter(|s| s.len() < n).cloned().collect();
            let cert = greendlinger_new_relator(alphabet.len(), r, &shorter)?;
            return Ok(Certificate::greendlinger(group, &alphabet, r, cert.max_overlap));
        }
    };
    let method = match method {
        Method::Wreath => "wreath",
        Method::Bracket => "bracket",
        Method::Law => "law",
        Method::Endo => "endo",
        Method::Greendlinger => unreachable!(),
    };
    Ok(Certificate::from_witness(method, &report.witness))
}
