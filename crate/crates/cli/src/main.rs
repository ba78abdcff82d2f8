//! `burstrecon`: closed-form counts, oracle sweeps, channel simulation and
//! reconstruction from the command line.

mod sweep;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use burstrecon::{
    count_centers_by_radius1_ball_size, del_ball_max, del_intersection_lower_bound, del_intersection_max_binary,
    ins_ball_size, ins_intersection_max, reconstruct_from_deletions, reconstruct_from_insertions,
    sample_distinct_outputs, sphere_packing_bound, BallKind, ChannelParams, EnumerationCap, Error, ExactCount,
    OutputSet, Sequence, DEFAULT_CAP, RNG_ALGORITHM,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::sweep::{SweepConfig, SweepKind};

const EXIT_PRECONDITION: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(
    name = "burstrecon",
    version,
    about = "Burst insertion/deletion ball counts, simulation and reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form count exactly.
    Count(CountArgs),
    /// Compare closed forms against brute-force oracles over a parameter grid.
    Verify(VerifyArgs),
    /// Draw distinct channel outputs of a word.
    Simulate(SimulateArgs),
    /// Recover a word from distinct channel outputs (one per line).
    Reconstruct(ReconstructArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKind {
    /// Insertion ball size.
    InsBall,
    /// Maximum insertion-ball intersection.
    InsInt,
    /// Maximum deletion ball size.
    DelBall,
    /// Maximum binary deletion-ball intersection.
    DelInt,
    /// Deletion intersection of the flipped extremal pair (lower bound).
    DelIntLb,
    /// Sphere-packing bound for insertion codes.
    SpherePacking,
    /// Number of centers with a given radius-1 deletion-ball size.
    Centers,
}

#[derive(Args)]
struct CountArgs {
    kind: CountKind,
    #[arg(short)]
    q: u32,
    #[arg(short)]
    b: u32,
    #[arg(short)]
    n: u32,
    #[arg(short)]
    t: Option<u32>,
    /// Ball size for `centers`; all sizes when omitted.
    #[arg(short)]
    i: Option<u32>,
    #[arg(long)]
    as_json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    /// Values as `3`, `1-4` or `1,2,5`.
    #[arg(short, default_value = "2-3")]
    q: String,
    #[arg(short, default_value = "1-3")]
    b: String,
    #[arg(short, default_value = "1-2")]
    t: String,
    #[arg(short, default_value = "1-5")]
    n: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = SweepKind::defaults())]
    kind: Vec<SweepKind>,
    /// Enumeration cap; overrides BURSTRECON_CAP.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Round trips per grid point for the reconstruction kinds.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    jobs: Option<usize>,
    /// Leave the `ms` column empty so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// List every skipped row with its reason on stderr.
    #[arg(long, short)]
    verbose: bool,
    /// Offset every formula value by one (harness self-test).
    #[arg(long, hide = true)]
    corrupt: bool,
}

#[derive(Args)]
#[group(id = "channel", required = true, multiple = false, args = ["ins", "del"])]
struct ChannelKindArgs {
    #[arg(long)]
    ins: bool,
    #[arg(long)]
    del: bool,
}

impl ChannelKindArgs {
    fn kind(&self) -> BallKind {
        if self.ins {
            BallKind::Insertion
        } else {
            BallKind::Deletion
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(short)]
    x: String,
    #[command(flatten)]
    channel: ChannelKindArgs,
    #[arg(short, default_value_t = 2)]
    q: u32,
    #[arg(short)]
    b: usize,
    #[arg(short)]
    t: usize,
    /// Number of distinct outputs.
    #[arg(short = 'N')]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Read words from this file instead of stdin.
    #[arg(long)]
    input: Option<String>,
    /// Length of the transmitted word; inferred from the inputs when omitted.
    #[arg(short)]
    n: Option<usize>,
    #[arg(short, default_value_t = 2)]
    q: u32,
    #[arg(short)]
    b: usize,
    #[arg(short)]
    t: usize,
    #[command(flatten)]
    channel: ChannelKindArgs,
    /// Print per-step class sizes as `#` lines before the word.
    #[arg(long)]
    diagnostics: bool,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(io::Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

pub(crate) fn enumeration_cap(flag: Option<usize>) -> Result<EnumerationCap, String> {
    if let Some(c) = flag {
        return Ok(EnumerationCap(c));
    }
    match std::env::var("BURSTRECON_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map(EnumerationCap)
            .map_err(|e| format!("BURSTRECON_CAP={v:?} is not a count: {e}")),
        Err(_) => Ok(EnumerationCap(DEFAULT_CAP)),
    }
}

fn need_t(t: Option<u32>) -> Result<u32, Failure> {
    t.ok_or_else(|| Failure::Usage("this count needs -t".into()))
}

fn cmd_count(a: &CountArgs) -> Result<(), Failure> {
    let t = match a.kind {
        CountKind::Centers => a.t.unwrap_or(1),
        _ => need_t(a.t)?,
    };
    let p = ChannelParams::new(a.q, a.b, t, a.n)?;
    let params = json!({"q": a.q, "b": a.b, "t": t, "n": a.n});
    let single = |v: ExactCount| -> serde_json::Value { json!(v.to_string()) };
    let (text, value) = match a.kind {
        CountKind::InsBall => {
            let v: ExactCount = ins_ball_size(&p)?;
            (v.to_string(), single(v))
        }
        CountKind::InsInt => {
            let v: ExactCount = ins_intersection_max(&p)?;
            (v.to_string(), single(v))
        }
        CountKind::DelBall => {
            let v: ExactCount = del_ball_max(&p)?;
            (v.to_string(), single(v))
        }
        CountKind::DelInt => {
            if a.q != 2 {
                return Err(Failure::Usage(format!(
                    "del-int: exact value known only for q = 2 (got q = {}); try `count del-int-lb` for the lower bound",
                    a.q
                )));
            }
            let v: ExactCount = del_intersection_max_binary(&p)?;
            (v.to_string(), single(v))
        }
        CountKind::DelIntLb => {
            let v: ExactCount = del_intersection_lower_bound(&p)?;
            (v.to_string(), single(v))
        }
        CountKind::SpherePacking => {
            let s = sphere_packing_bound::<ExactCount>(&p)?;
            let text = format!("{} (floor {})", s.value, s.floor);
            (
                text,
                json!({"ratio": s.value.to_string(), "floor": s.floor.to_string()}),
            )
        }
        CountKind::Centers => {
            let sizes = match a.i {
                Some(i) => vec![i],
                None if a.n > a.b => (1..=a.n - a.b + 1).collect(),
                None => return Err(Error::InvalidParams("centers: requires n >= b + 1".into()).into()),
            };
            let mut table = BTreeMap::new();
            for i in sizes {
                let v: ExactCount = count_centers_by_radius1_ball_size(a.q, a.b, a.n, i)?;
                table.insert(i, v.to_string());
            }
            if a.i.is_some() {
                let v = table.into_values().next().expect("one size");
                (v.clone(), json!(v))
            } else {
                let text = table
                    .iter()
                    .map(|(i, v)| format!("{i} {v}"))
                    .collect::<Vec<_>>()
                    .join("\n");
                let obj: serde_json::Map<String, serde_json::Value> =
                    table.into_iter().map(|(i, v)| (i.to_string(), json!(v))).collect();
                (text, serde_json::Value::Object(obj))
            }
        }
    };
    if a.as_json {
        let kind = a.kind.to_possible_value().expect("named variant");
        println!("{}", json!({"kind": kind.get_name(), "params": params, "value": value}));
    } else {
        println!("{text}");
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let config = SweepConfig {
        q: sweep::parse_values(&a.q).map_err(Failure::Usage)?,
        b: sweep::parse_values(&a.b).map_err(Failure::Usage)?,
        t: sweep::parse_values(&a.t).map_err(Failure::Usage)?,
        n: sweep::parse_values(&a.n).map_err(Failure::Usage)?,
        kinds: a.kind.clone(),
        cap: enumeration_cap(a.cap).map_err(Failure::Usage)?,
        seed: a.seed,
        trials: a.trials,
        timing: !a.no_timing,
        corrupt: a.corrupt,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let outcome = pool.install(|| sweep::run(&config));
    let mut err = io::stderr().lock();
    if a.verbose {
        for note in &outcome.notes {
            writeln!(err, "skipped {note}")?;
        }
    } else if !outcome.notes.is_empty() {
        writeln!(
            err,
            "{} rows skipped (preconditions or cap); --verbose lists them",
            outcome.notes.len()
        )?;
    }
    let stdout = io::stdout().lock();
    match a.format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(stdout);
            for row in &outcome.rows {
                w.serialize(row).map_err(|e| Failure::Io(io::Error::other(e)))?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = stdout;
            serde_json::to_writer_pretty(&mut out, &outcome.rows).map_err(|e| Failure::Io(io::Error::other(e)))?;
            writeln!(out)?;
        }
    }
    if outcome.rows.iter().any(|r| r.status == sweep::Status::Mismatch) {
        return Err(Failure::Mismatch);
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let x = Sequence::parse(&a.x, a.q)?;
    let kind = a.channel.kind();
    let cap = enumeration_cap(a.cap).map_err(Failure::Usage)?;
    let sample = sample_distinct_outputs(&x, a.t, a.b, kind, a.count, a.seed, cap)?;
    let mut out = io::stdout().lock();
    match a.format {
        TextFormat::Text => {
            writeln!(
                out,
                "# simulate {kind} x={x} q={} b={} t={} N={} seed={} rng={RNG_ALGORITHM}",
                a.q, a.b, a.t, a.count, a.seed
            )?;
            for trace in &sample.traces {
                for line in trace.to_lines() {
                    writeln!(out, "# {line}")?;
                }
                writeln!(out, "{}", trace.output)?;
            }
        }
        TextFormat::Json => {
            let outputs: Vec<_> = sample
                .traces
                .iter()
                .map(|tr| json!({"word": tr.output.to_string(), "events": tr.to_lines()}))
                .collect();
            let doc = json!({
                "kind": kind.to_string(),
                "x": x.to_string(),
                "params": {"q": a.q, "b": a.b, "t": a.t, "n": x.len()},
                "seed": a.seed,
                "rng": RNG_ALGORITHM,
                "outputs": outputs,
            });
            writeln!(out, "{doc}")?;
        }
    }
    Ok(())
}

fn read_words(text: &str, q: u32) -> Result<OutputSet, Error> {
    let mut set = OutputSet::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        set.insert(Sequence::parse(line, q)?)?;
    }
    Ok(set)
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<(), Failure> {
    let text = match &a.input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let u = read_words(&text, a.q)?;
    let kind = a.channel.kind();
    let shift = a.t * a.b;
    let n = match (a.n, u.word_len()) {
        (Some(n), _) => n,
        (None, Some(len)) => match kind {
            BallKind::Insertion => len
                .checked_sub(shift)
                .ok_or_else(|| Failure::Usage(format!("words of length {len} are shorter than tb = {shift}")))?,
            BallKind::Deletion => len + shift,
        },
        (None, None) => return Err(Failure::Usage("no input words".into())),
    };
    let result = match kind {
        BallKind::Insertion => reconstruct_from_insertions(&u, n, a.q, a.b, a.t)?,
        BallKind::Deletion => {
            if a.q != 2 {
                return Err(Failure::Usage(format!(
                    "deletion reconstruction is available only for q = 2 (got q = {})",
                    a.q
                )));
            }
            reconstruct_from_deletions(&u, n, a.b, a.t)?
        }
    };
    let mut out = io::stdout().lock();
    if a.diagnostics {
        writeln!(out, "# inputs={} iterations={}", u.len(), result.iterations)?;
        for step in &result.diagnostics {
            writeln!(out, "# {step}")?;
        }
        if kind == BallKind::Deletion {
            let unknown: Vec<String> = result.unknown_positions.iter().map(ToString::to_string).collect();
            writeln!(
                out,
                "# unknown=[{}] candidates={}",
                unknown.join(","),
                result.candidates_checked
            )?;
        }
    }
    writeln!(out, "{}", result.word)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::CapExceeded { .. }) {
                EXIT_CAP
            } else {
                EXIT_PRECONDITION
            })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PRECONDITION)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(Failure::Mismatch) => {
            eprintln!("error: formula and oracle disagree on at least one row");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
