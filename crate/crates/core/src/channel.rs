//! Burst insertion and deletion channels: explicit bursts, traces and seeded
//! sampling of distinct channel outputs.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balls::{deletion_witness, enumerate_deletion_ball, BallKind, EnumerationCap, OutputSet};
use crate::combinatorics::{ins_ball_size, ChannelParams};
use crate::error::{precondition, Error, Result};
use crate::sequences::Sequence;

/// Identifier of the generator behind [`sample_distinct_outputs`].
pub const RNG_ALGORITHM: &str = "chacha8";

/// Consecutive duplicate draws tolerated per requested output before the
/// sampler switches to enumerate-and-shuffle.
pub const REJECTION_FACTOR: usize = 64;

/// One burst applied at a 1-based position of the current word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstEvent {
    pub kind: BallKind,
    pub position: usize,
    /// Inserted symbols; `None` for deletions.
    pub payload: Option<Sequence>,
}

impl BurstEvent {
    pub fn insertion(position: usize, payload: Sequence) -> Self {
        BurstEvent {
            kind: BallKind::Insertion,
            position,
            payload: Some(payload),
        }
    }

    pub fn deletion(position: usize) -> Self {
        BurstEvent {
            kind: BallKind::Deletion,
            position,
            payload: None,
        }
    }

    pub fn apply(&self, x: &Sequence, b: usize) -> Result<Sequence> {
        match (&self.kind, &self.payload) {
            (BallKind::Insertion, Some(p)) => apply_burst_insertion(x, self.position, p),
            (BallKind::Deletion, None) => apply_burst_deletion(x, self.position, b),
            _ => Err(Error::Parse(
                "insertions need a payload, deletions must not have one".into(),
            )),
        }
    }

    /// Parses `kind pos [payload]`.
    pub fn parse(line: &str, q: u32) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let kind = parts.next().ok_or_else(|| Error::Parse("empty trace line".into()))?;
        let pos = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing position in '{line}'")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad position in '{line}': {e}")))?;
        let event = match kind {
            "ins" => {
                let payload = parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("missing payload in '{line}'")))?;
                BurstEvent::insertion(pos, Sequence::parse(payload, q)?)
            }
            "del" => BurstEvent::deletion(pos),
            other => return Err(Error::Parse(format!("unknown burst kind '{other}'"))),
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in '{line}'")));
        }
        Ok(event)
    }
}

impl fmt::Display for BurstEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Some(p) => write!(f, "{} {} {}", self.kind, self.position, p),
            None => write!(f, "{} {}", self.kind, self.position),
        }
    }
}

/// An input word, the bursts applied in order, and the resulting output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelTrace {
    pub input: Sequence,
    pub events: Vec<BurstEvent>,
    pub output: Sequence,
}

impl ChannelTrace {
    /// Re-applies the events to the input.
    pub fn replay(&self, b: usize) -> Result<Sequence> {
        self.events.iter().try_fold(self.input.clone(), |w, e| e.apply(&w, b))
    }

    /// One `kind pos [payload]` line per event.
    pub fn to_lines(&self) -> Vec<String> {
        self.events.iter().map(ToString::to_string).collect()
    }
}

/// `x_1 .. x_{pos-1} ∘ payload ∘ x_pos .. x_n`.
pub fn apply_burst_insertion(x: &Sequence, pos: usize, payload: &Sequence) -> Result<Sequence> {
    if pos < 1 || pos > x.len() + 1 {
        return Err(precondition(
            "apply_burst_insertion",
            format!("position {pos} outside [1, {}]", x.len() + 1),
        ));
    }
    if payload.is_empty() {
        return Err(precondition("apply_burst_insertion", "payload must be nonempty"));
    }
    let head = x.slice(0, pos - 1).concat(payload)?;
    head.concat(&x.slice(pos - 1, x.len()))
}

/// `x_1 .. x_{pos-1} ∘ x_{pos+b} .. x_n`.
pub fn apply_burst_deletion(x: &Sequence, pos: usize, b: usize) -> Result<Sequence> {
    if b == 0 || x.len() < b || pos < 1 || pos > x.len() - b + 1 {
        return Err(precondition(
            "apply_burst_deletion",
            format!("position {pos} invalid for length {} and b = {b}", x.len()),
        ));
    }
    x.slice(0, pos - 1).concat(&x.slice(pos - 1 + b, x.len()))
}

/// Distinct channel outputs with one generating trace each, in draw order.
#[derive(Debug, Clone)]
pub struct Sample {
    pub traces: Vec<ChannelTrace>,
    pub rng: &'static str,
    pub seed: u64,
    /// True when the enumerate-and-shuffle fallback produced the tail.
    pub used_fallback: bool,
}

impl Sample {
    pub fn outputs(&self) -> Result<OutputSet> {
        OutputSet::from_words(self.traces.iter().map(|t| t.output.clone()))
    }
}

/// Seed for trial `index` derived from a master seed (SplitMix64 finalizer).
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_trace(x: &Sequence, t: usize, b: usize, kind: BallKind, rng: &mut ChaCha8Rng) -> Result<ChannelTrace> {
    let q = x.alphabet() as u8;
    let mut word = x.clone();
    let mut events = Vec::with_capacity(t);
    for _ in 0..t {
        let event = match kind {
            BallKind::Insertion => {
                let pos = rng.gen_range(1..=word.len() + 1);
                let payload = (0..b).map(|_| rng.gen_range(0..q)).collect();
                BurstEvent::insertion(pos, Sequence::new(payload, u32::from(q))?)
            }
            BallKind::Deletion => BurstEvent::deletion(rng.gen_range(1..=word.len() - b + 1)),
        };
        word = event.apply(&word, b)?;
        events.push(event);
    }
    Ok(ChannelTrace {
        input: x.clone(),
        events,
        output: word,
    })
}

/// Reconstructs a burst list that sends `x` to `y`.
fn trace_for(x: &Sequence, y: &Sequence, t: usize, b: usize, kind: BallKind) -> Result<ChannelTrace> {
    let events = match kind {
        BallKind::Deletion => {
            let starts = deletion_witness(x, y, t, b)?.ok_or_else(|| Error::Inconsistent { word: y.to_string() })?;
            starts
                .iter()
                .enumerate()
                .map(|(k, s)| BurstEvent::deletion(s - k * b))
                .collect()
        }
        BallKind::Insertion => {
            // Blocks removed from y, inserted left to right at their final offsets.
            let starts = deletion_witness(y, x, t, b)?.ok_or_else(|| Error::Inconsistent { word: y.to_string() })?;
            starts
                .iter()
                .map(|&s| BurstEvent::insertion(s, y.slice(s - 1, s - 1 + b)))
                .collect()
        }
    };
    Ok(ChannelTrace {
        input: x.clone(),
        events,
        output: y.clone(),
    })
}

/// Draws `count` distinct members of the radius-`t` ball of `x`, each with a
/// trace, reproducibly from `seed`.
///
/// Uniform random burst lists are drawn and duplicates rejected; after
/// `REJECTION_FACTOR * count` consecutive rejections the ball is enumerated
/// and shuffled with the same generator.
pub fn sample_distinct_outputs(
    x: &Sequence,
    t: usize,
    b: usize,
    kind: BallKind,
    count: usize,
    seed: u64,
    cap: EnumerationCap,
) -> Result<Sample> {
    const OP: &str = "sample_distinct_outputs";
    if count == 0 {
        return Err(precondition(OP, "at least one output must be requested"));
    }
    if b == 0 {
        return Err(Error::InvalidParams("burst length b must be at least 1".into()));
    }
    let mut enumerated: Option<OutputSet> = None;
    match kind {
        BallKind::Insertion => {
            let params = ChannelParams::new(x.alphabet(), b as u32, t as u32, x.len() as u32)?;
            let size: BigUint = ins_ball_size(&params)?;
            if size < BigUint::from(count) {
                return Err(Error::BallTooSmall {
                    size: size.to_string(),
                    requested: count,
                });
            }
        }
        BallKind::Deletion => {
            if x.len() < b * t {
                return Err(precondition(
                    OP,
                    format!("word of length {} is shorter than bt = {}", x.len(), b * t),
                ));
            }
            let ball = enumerate_deletion_ball(x, t, b, cap)?;
            if ball.len() < count {
                return Err(Error::BallTooSmall {
                    size: ball.len().to_string(),
                    requested: count,
                });
            }
            enumerated = Some(ball);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut traces = Vec::with_capacity(count);
    let mut rejections = 0usize;
    let limit = REJECTION_FACTOR.saturating_mul(count);
    while traces.len() < count && rejections < limit {
        let trace = random_trace(x, t, b, kind, &mut rng)?;
        if seen.insert(trace.output.clone()) {
            traces.push(trace);
            rejections = 0;
        } else {
            rejections += 1;
        }
    }

    let used_fallback = traces.len() < count;
    if used_fallback {
        let ball = match enumerated {
            Some(ball) => ball,
            None => crate::balls::enumerate_insertion_ball(x, t, b, cap)?,
        };
        let mut rest: Vec<Sequence> = ball.into_iter().filter(|w| !seen.contains(w)).collect();
        rest.shuffle(&mut rng);
        for y in rest.into_iter().take(count - traces.len()) {
            traces.push(trace_for(x, &y, t, b, kind)?);
        }
    }

    Ok(Sample {
        traces,
        rng: RNG_ALGORITHM,
        seed,
        used_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balls::{enumerate_ball, is_descendant};

    fn seq(s: &str) -> Sequence {
        Sequence::parse(s, 2).unwrap()
    }

    const CAP: EnumerationCap = EnumerationCap(crate::balls::DEFAULT_CAP);

    #[test]
    fn insertion_examples() {
        assert_eq!(apply_burst_insertion(&seq("010"), 2, &seq("11")).unwrap(), seq("01110"));
        assert_eq!(apply_burst_insertion(&seq(""), 1, &seq("01")).unwrap(), seq("01"));
        assert_eq!(apply_burst_insertion(&seq("0"), 2, &seq("10")).unwrap(), seq("010"));
        assert!(apply_burst_insertion(&seq("0"), 3, &seq("10")).is_err());
        assert!(apply_burst_insertion(&seq("0"), 0, &seq("10")).is_err());
    }

    #[test]
    fn deletion_examples() {
        assert_eq!(apply_burst_deletion(&seq("01110"), 2, 2).unwrap(), seq("010"));
        assert_eq!(apply_burst_deletion(&seq("0110"), 1, 2).unwrap(), seq("10"));
        assert_eq!(apply_burst_deletion(&seq("000"), 1, 3).unwrap(), seq(""));
        assert!(apply_burst_deletion(&seq("0110"), 4, 2).is_err());
        assert!(apply_burst_deletion(&seq("0"), 1, 2).is_err());
    }

    #[test]
    fn event_text_round_trip() {
        let e = BurstEvent::insertion(3, seq("01"));
        assert_eq!(e.to_string(), "ins 3 01");
        assert_eq!(BurstEvent::parse("ins 3 01", 2).unwrap(), e);
        assert_eq!(BurstEvent::parse("del 2", 2).unwrap(), BurstEvent::deletion(2));
        assert!(BurstEvent::parse("del", 2).is_err());
        assert!(BurstEvent::parse("sub 1", 2).is_err());
        assert!(BurstEvent::parse("del 1 01", 2).is_err());
    }

    #[test]
    fn sample_examples() {
        let s = sample_distinct_outputs(&seq("0"), 1, 2, BallKind::Insertion, 5, 11, CAP).unwrap();
        let ball = enumerate_ball(&seq("0"), 1, 2, BallKind::Insertion, CAP).unwrap();
        let out = s.outputs().unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.is_subset(&ball));

        let err = sample_distinct_outputs(&seq("0101"), 1, 2, BallKind::Deletion, 2, 1, CAP).unwrap_err();
        assert_eq!(
            err,
            Error::BallTooSmall {
                size: "1".into(),
                requested: 2
            }
        );

        let s = sample_distinct_outputs(&seq("01100"), 1, 2, BallKind::Deletion, 1, 3, CAP).unwrap();
        assert_eq!(s.traces.len(), 1);
        assert_eq!(s.traces[0].replay(2).unwrap(), s.traces[0].output);
    }

    #[test]
    fn full_ball_request_uses_fallback_and_traces_replay() {
        for (x, t, b, kind) in [
            ("0110", 2, 1, BallKind::Insertion),
            ("0110100", 2, 2, BallKind::Deletion),
            ("01", 2, 2, BallKind::Insertion),
        ] {
            let x = seq(x);
            let ball = enumerate_ball(&x, t, b, kind, CAP).unwrap();
            let s = sample_distinct_outputs(&x, t, b, kind, ball.len(), 5, CAP).unwrap();
            assert_eq!(s.outputs().unwrap(), ball);
            for tr in &s.traces {
                assert_eq!(tr.events.len(), t);
                assert_eq!(tr.replay(b).unwrap(), tr.output);
                assert!(is_descendant(&x, &tr.output, t, b, kind).unwrap());
            }
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let x = seq("0110100");
        let a = sample_distinct_outputs(&x, 2, 2, BallKind::Insertion, 40, 99, CAP).unwrap();
        let b = sample_distinct_outputs(&x, 2, 2, BallKind::Insertion, 40, 99, CAP).unwrap();
        assert_eq!(a.traces, b.traces);
        let c = sample_distinct_outputs(&x, 2, 2, BallKind::Insertion, 40, 100, CAP).unwrap();
        assert_ne!(a.traces, c.traces);
    }

    #[test]
    fn trial_seeds_differ() {
        let seeds: HashSet<u64> = (0..1000).map(|i| trial_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
    }
}
