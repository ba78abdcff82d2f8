//! Formula-versus-oracle sweeps for `verify`.

use std::fmt;
use std::time::Instant;

use burstrecon::{
    del_ball_max, del_intersection_max_binary, enumerate_deletion_ball, enumerate_insertion_ball, ins_ball_size,
    ins_intersection_max, max_intersection_exhaustive, reconstruct_from_deletions, reconstruct_from_insertions,
    sample_distinct_outputs, trial_seed, y_sequence, BallKind, ChannelParams, EnumerationCap, Error, ExactCount,
    Sequence,
};
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Draws per trial before a deletion round trip gives up looking for a
/// center whose ball exceeds the threshold.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Every center's insertion ball against the closed form.
    InsBall,
    /// Exhaustive maximum insertion intersection.
    InsInt,
    /// Maximum deletion ball over all centers, and the shifted cyclic centers.
    DelBall,
    /// Exhaustive maximum binary deletion intersection.
    DelInt,
    /// Insertion ball size through its length recurrence.
    InsRec,
    /// Insertion reconstruction round trips at threshold + 1.
    InsRt,
    /// Binary deletion reconstruction round trips at threshold + 1.
    DelRt,
}

impl SweepKind {
    pub fn defaults() -> Vec<SweepKind> {
        SweepKind::value_variants().to_vec()
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("named variant").get_name())
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q: Vec<u32>,
    pub b: Vec<u32>,
    pub t: Vec<u32>,
    pub n: Vec<u32>,
    pub kinds: Vec<SweepKind>,
    pub cap: EnumerationCap,
    pub seed: u64,
    pub trials: usize,
    pub timing: bool,
    pub corrupt: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "true")]
    Match,
    #[serde(rename = "false")]
    Mismatch,
    #[serde(rename = "skipped")]
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub q: u32,
    pub b: u32,
    pub t: u32,
    pub n: u32,
    pub kind: String,
    pub formula: Option<String>,
    pub oracle: Option<String>,
    #[serde(rename = "match")]
    pub status: Status,
    pub ms: Option<u64>,
}

pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub notes: Vec<String>,
}

/// Parses `3`, `1-4` or `1,2,5` (mixing allowed: `1-3,7`).
pub fn parse_values(text: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad value '{s}' in '{text}': {e}"))
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range '{part}'"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(part)?),
        }
    }
    if out.is_empty() {
        return Err(format!("no values in '{text}'"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

enum Eval {
    Compared { formula: ExactCount, oracle: ExactCount },
    Skip(String),
}

impl From<Error> for Eval {
    fn from(e: Error) -> Self {
        Eval::Skip(e.to_string())
    }
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Eval::from(e),
        }
    };
}

fn all_words(n: usize, q: u32) -> Vec<Sequence> {
    let total = (q as usize).pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut s = vec![0u8; n];
            for c in s.iter_mut().rev() {
                *c = (k % q as usize) as u8;
                k /= q as usize;
            }
            Sequence::new(s, q).expect("symbols below q")
        })
        .collect()
}

fn centers(n: usize, q: u32, cap: EnumerationCap) -> Result<Vec<Sequence>, Eval> {
    match (q as usize).checked_pow(n as u32) {
        Some(total) if total <= cap.0 => Ok(all_words(n, q)),
        _ => Err(Eval::Skip(format!("{q}^{n} centers exceed the cap {}", cap.0))),
    }
}

fn eval_ins_ball(p: &ChannelParams, cap: EnumerationCap) -> Eval {
    let formula: ExactCount = attempt!(ins_ball_size(p));
    let xs = match centers(p.n as usize, p.q, cap) {
        Ok(xs) => xs,
        Err(skip) => return skip,
    };
    let sizes: Result<Vec<usize>, Error> = xs
        .par_iter()
        .map(|x| enumerate_insertion_ball(x, p.t as usize, p.b as usize, cap).map(|s| s.len()))
        .collect();
    let sizes = attempt!(sizes);
    // Report a deviating size when there is one.
    let oracle = sizes
        .iter()
        .map(|&s| ExactCount::from(s))
        .find(|s| *s != formula)
        .unwrap_or_else(|| formula.clone());
    Eval::Compared { formula, oracle }
}

fn eval_ins_int(p: &ChannelParams, cap: EnumerationCap) -> Eval {
    let formula: ExactCount = attempt!(ins_intersection_max(p));
    let found = attempt!(max_intersection_exhaustive(
        p.n as usize,
        p.q,
        p.b as usize,
        p.t as usize,
        BallKind::Insertion,
        cap
    ));
    Eval::Compared {
        formula,
        oracle: ExactCount::from(found.size),
    }
}

fn eval_del_ball(p: &ChannelParams, cap: EnumerationCap) -> Eval {
    let formula: ExactCount = attempt!(del_ball_max(p));
    let (n, b, t) = (p.n as usize, p.b as usize, p.t as usize);
    if n < b * t {
        return Eval::Skip(format!("n = {n} is shorter than bt = {}", b * t));
    }
    let xs = match centers(n, p.q, cap) {
        Ok(xs) => xs,
        Err(skip) => return skip,
    };
    let sizes: Result<Vec<usize>, Error> = xs
        .par_iter()
        .map(|x| enumerate_deletion_ball(x, t, b, cap).map(|s| s.len()))
        .collect();
    let best = attempt!(sizes).into_iter().max().unwrap_or(0);
    for sigma in 0..p.q {
        for j in (0..b).filter(|&j| j <= n) {
            let y = attempt!(y_sequence(n, p.q, b, sigma, j));
            let size = attempt!(enumerate_deletion_ball(&y, t, b, cap)).len();
            if size != best {
                return Eval::Compared {
                    formula,
                    oracle: ExactCount::from(size),
                };
            }
        }
    }
    Eval::Compared {
        formula,
        oracle: ExactCount::from(best),
    }
}

fn eval_del_int(p: &ChannelParams, cap: EnumerationCap) -> Eval {
    let formula: ExactCount = attempt!(del_intersection_max_binary(p));
    let found = attempt!(max_intersection_exhaustive(
        p.n as usize,
        2,
        p.b as usize,
        p.t as usize,
        BallKind::Deletion,
        cap
    ));
    Eval::Compared {
        formula,
        oracle: ExactCount::from(found.size),
    }
}

fn eval_ins_rec(p: &ChannelParams) -> Eval {
    if p.n == 0 {
        return Eval::Skip("recurrence needs n >= 1".into());
    }
    let formula: ExactCount = attempt!(ins_ball_size(p));
    let (q, b) = (ExactCount::from(p.q), p.b);
    let mut oracle = ExactCount::from(0u32);
    for i in 0..=p.t {
        let shorter = attempt!(ChannelParams::new(p.q, p.b, p.t - i, p.n - 1));
        let ball: ExactCount = attempt!(ins_ball_size(&shorter));
        oracle += (&q - 1u32).pow(i) * q.pow(i * (b - 1)) * ball;
    }
    Eval::Compared { formula, oracle }
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, q: u32) -> Sequence {
    Sequence::new((0..n).map(|_| rng.gen_range(0..q as u8)).collect(), q).expect("symbols below q")
}

fn eval_round_trips(p: &ChannelParams, kind: BallKind, cfg: &SweepConfig, row_seed: u64) -> Eval {
    let (n, b, t, q) = (p.n as usize, p.b as usize, p.t as usize, p.q);
    let threshold: ExactCount = match kind {
        BallKind::Insertion => {
            if n == 0 {
                return Eval::Skip("reconstruction needs n >= 1".into());
            }
            attempt!(ins_intersection_max(p))
        }
        BallKind::Deletion => {
            let thr: ExactCount = attempt!(del_intersection_max_binary(p));
            let largest: ExactCount = attempt!(del_ball_max(p));
            if largest <= thr {
                return Eval::Skip(format!("largest ball {largest} does not exceed the threshold {thr}"));
            }
            thr
        }
    };
    let Ok(count) = usize::try_from(&threshold + 1u32) else {
        return Eval::Skip(format!("threshold {threshold} too large to sample"));
    };
    let mut successes = 0usize;
    for k in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(row_seed, k as u64));
        let mut redraws = 0;
        let (x, sample) = loop {
            let x = random_word(&mut rng, n, q);
            match sample_distinct_outputs(&x, t, b, kind, count, rng.gen(), cfg.cap) {
                Ok(s) => break (x, s),
                Err(Error::BallTooSmall { .. }) if redraws < MAX_REDRAWS => redraws += 1,
                Err(e) => return e.into(),
            }
        };
        let u = attempt!(sample.outputs());
        let got = match kind {
            BallKind::Insertion => reconstruct_from_insertions(&u, n, q, b, t),
            BallKind::Deletion => reconstruct_from_deletions(&u, n, b, t),
        };
        if matches!(got, Ok(r) if r.word == x) {
            successes += 1;
        }
    }
    Eval::Compared {
        formula: ExactCount::from(cfg.trials),
        oracle: ExactCount::from(successes),
    }
}

fn row_seed(master: u64, kind: SweepKind, p: &ChannelParams) -> u64 {
    let key = (kind as u64) << 56 | u64::from(p.q) << 40 | u64::from(p.b) << 28 | u64::from(p.t) << 16 | u64::from(p.n);
    trial_seed(master, key)
}

fn evaluate(kind: SweepKind, p: &ChannelParams, cfg: &SweepConfig) -> Eval {
    match kind {
        SweepKind::InsBall => eval_ins_ball(p, cfg.cap),
        SweepKind::InsInt => eval_ins_int(p, cfg.cap),
        SweepKind::DelBall => eval_del_ball(p, cfg.cap),
        SweepKind::DelInt => eval_del_int(p, cfg.cap),
        SweepKind::InsRec => eval_ins_rec(p),
        SweepKind::InsRt => eval_round_trips(p, BallKind::Insertion, cfg, row_seed(cfg.seed, kind, p)),
        SweepKind::DelRt => eval_round_trips(p, BallKind::Deletion, cfg, row_seed(cfg.seed, kind, p)),
    }
}

/// Evaluates every grid point, in parallel, returning rows ordered by
/// `(q, b, t, n, kind)`.
pub fn run(cfg: &SweepConfig) -> SweepOutcome {
    let mut kinds = cfg.kinds.clone();
    kinds.sort_by_key(|k| *k as u8);
    kinds.dedup();
    let mut grid = Vec::new();
    for &q in &cfg.q {
        for &b in &cfg.b {
            for &t in &cfg.t {
                for &n in &cfg.n {
                    for &kind in &kinds {
                        grid.push((q, b, t, n, kind));
                    }
                }
            }
        }
    }
    let evaluated: Vec<(ResultRow, Option<String>)> = grid
        .par_iter()
        .map(|&(q, b, t, n, kind)| {
            let start = Instant::now();
            let eval = match ChannelParams::new(q, b, t, n) {
                Ok(p) => evaluate(kind, &p, cfg),
                Err(e) => e.into(),
            };
            let ms = cfg.timing.then(|| start.elapsed().as_millis() as u64);
            let mut row = ResultRow {
                q,
                b,
                t,
                n,
                kind: kind.to_string(),
                formula: None,
                oracle: None,
                status: Status::Skipped,
                ms,
            };
            let note = match eval {
                Eval::Compared { formula, oracle } => {
                    let formula = if cfg.corrupt { formula + 1u32 } else { formula };
                    row.status = if formula == oracle {
                        Status::Match
                    } else {
                        Status::Mismatch
                    };
                    row.formula = Some(formula.to_string());
                    row.oracle = Some(oracle.to_string());
                    None
                }
                Eval::Skip(reason) => Some(format!("q={q} b={b} t={t} n={n} {kind}: {reason}")),
            };
            (row, note)
        })
        .collect();
    let (rows, notes): (Vec<_>, Vec<_>) = evaluated.into_iter().unzip();
    SweepOutcome {
        rows,
        notes: notes.into_iter().flatten().collect(),
    }
}
