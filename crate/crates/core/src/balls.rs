//! Brute-force error balls, exhaustive extremal searches and the burst
//! descendant test.
//!
//! These routines are the oracles every closed-form count is checked against,
//! so they follow the operational definitions literally: bursts are applied
//! one at a time, breadth first, and duplicates are removed after each round.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::combinatorics::{ins_ball_size, ChannelParams};
use crate::error::{precondition, Error, Result};
use crate::sequences::{check_alphabet, Sequence};

/// Default largest number of words any single enumeration may hold.
pub const DEFAULT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BallKind {
    Insertion,
    Deletion,
}

impl fmt::Display for BallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BallKind::Insertion => "ins",
            BallKind::Deletion => "del",
        })
    }
}

/// Upper limit on enumeration sizes; exceeding it is refused, not truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(pub usize);

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(DEFAULT_CAP)
    }
}

impl EnumerationCap {
    fn check(&self, size: usize) -> Result<()> {
        if size > self.0 {
            return Err(Error::CapExceeded {
                size: size.to_string(),
                cap: self.0,
            });
        }
        Ok(())
    }
}

/// A duplicate-free set of words sharing one length and alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutputSet {
    words: BTreeSet<Sequence>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words(words: impl IntoIterator<Item = Sequence>) -> Result<Self> {
        let mut set = OutputSet::new();
        for w in words {
            set.insert(w)?;
        }
        Ok(set)
    }

    /// Adds a word; returns `false` if it was already present.
    pub fn insert(&mut self, word: Sequence) -> Result<bool> {
        if let Some(first) = self.words.first() {
            if first.len() != word.len() {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    found: word.len(),
                });
            }
            if first.alphabet() != word.alphabet() {
                return Err(Error::AlphabetMismatch {
                    expected: first.alphabet(),
                    found: word.alphabet(),
                });
            }
        }
        Ok(self.words.insert(word))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Common length of the members, `None` when empty.
    pub fn word_len(&self) -> Option<usize> {
        self.words.first().map(Sequence::len)
    }

    pub fn alphabet(&self) -> Option<u32> {
        self.words.first().map(Sequence::alphabet)
    }

    pub fn contains(&self, word: &Sequence) -> bool {
        self.words.contains(word)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &Sequence> {
        self.words.iter()
    }

    pub fn is_subset(&self, other: &OutputSet) -> bool {
        self.words.is_subset(&other.words)
    }

    fn from_raw(words: impl IntoIterator<Item = Vec<u8>>, q: u8) -> Self {
        OutputSet {
            words: words.into_iter().map(|w| Sequence::from_raw(w, q)).collect(),
        }
    }
}

impl IntoIterator for OutputSet {
    type Item = Sequence;
    type IntoIter = std::collections::btree_set::IntoIter<Sequence>;

    fn into_iter(self) -> Self::IntoIter {
        self.words.into_iter()
    }
}

/// Exact set intersection. Both sets must hold words of the same length.
pub fn intersection(a: &OutputSet, b: &OutputSet) -> Result<OutputSet> {
    if let (Some(la), Some(lb)) = (a.word_len(), b.word_len()) {
        if la != lb {
            return Err(Error::LengthMismatch {
                expected: la,
                found: lb,
            });
        }
    }
    Ok(OutputSet {
        words: a.words.intersection(&b.words).cloned().collect(),
    })
}

/// All `q^b` words of length `b`, in lexicographic order.
fn all_words(q: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..q).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

fn insertion_ball_raw(x: &[u8], q: u8, t: usize, b: usize, cap: EnumerationCap) -> Result<HashSet<Vec<u8>>> {
    let payloads = all_words(q, b);
    let mut level: HashSet<Vec<u8>> = HashSet::from([x.to_vec()]);
    for _ in 0..t {
        let mut next = HashSet::new();
        for w in &level {
            for pos in 0..=w.len() {
                for p in &payloads {
                    let mut y = Vec::with_capacity(w.len() + b);
                    y.extend_from_slice(&w[..pos]);
                    y.extend_from_slice(p);
                    y.extend_from_slice(&w[pos..]);
                    next.insert(y);
                }
            }
            cap.check(next.len())?;
        }
        level = next;
    }
    Ok(level)
}

fn deletion_ball_raw(x: &[u8], t: usize, b: usize, cap: EnumerationCap) -> Result<HashSet<Vec<u8>>> {
    let mut level: HashSet<Vec<u8>> = HashSet::from([x.to_vec()]);
    for _ in 0..t {
        let mut next = HashSet::new();
        for w in &level {
            for pos in 0..=(w.len() - b) {
                let mut y = Vec::with_capacity(w.len() - b);
                y.extend_from_slice(&w[..pos]);
                y.extend_from_slice(&w[pos + b..]);
                next.insert(y);
            }
            cap.check(next.len())?;
        }
        level = next;
    }
    Ok(level)
}

fn check_burst(b: usize) -> Result<()> {
    if b == 0 {
        return Err(Error::InvalidParams("burst length b must be at least 1".into()));
    }
    Ok(())
}

/// The radius-`t` b-burst-insertion ball of `x`.
pub fn enumerate_insertion_ball(x: &Sequence, t: usize, b: usize, cap: EnumerationCap) -> Result<OutputSet> {
    check_burst(b)?;
    let params = ChannelParams::new(x.alphabet(), b as u32, t as u32, x.len() as u32)?;
    let size: BigUint = ins_ball_size(&params)?;
    if size > BigUint::from(cap.0) {
        return Err(Error::CapExceeded {
            size: size.to_string(),
            cap: cap.0,
        });
    }
    let raw = insertion_ball_raw(x.symbols(), x.q_raw(), t, b, cap)?;
    Ok(OutputSet::from_raw(raw, x.q_raw()))
}

/// The radius-`t` b-burst-deletion ball of `x`; requires `|x| >= bt`.
pub fn enumerate_deletion_ball(x: &Sequence, t: usize, b: usize, cap: EnumerationCap) -> Result<OutputSet> {
    check_burst(b)?;
    if x.len() < b * t {
        return Err(precondition(
            "enumerate_deletion_ball",
            format!("word of length {} is shorter than bt = {}", x.len(), b * t),
        ));
    }
    let raw = deletion_ball_raw(x.symbols(), t, b, cap)?;
    Ok(OutputSet::from_raw(raw, x.q_raw()))
}

/// Enumerates the ball of the given kind.
pub fn enumerate_ball(x: &Sequence, t: usize, b: usize, kind: BallKind, cap: EnumerationCap) -> Result<OutputSet> {
    match kind {
        BallKind::Insertion => enumerate_insertion_ball(x, t, b, cap),
        BallKind::Deletion => enumerate_deletion_ball(x, t, b, cap),
    }
}

/// Result of an exhaustive maximum-intersection search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxIntersection {
    pub size: usize,
    /// Lexicographically smallest maximizing pair, `x < y`.
    pub x: Sequence,
    pub y: Sequence,
}

fn sorted_intersection_len(a: &[Vec<u8>], b: &[Vec<u8>]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Maximum of `|ball(x) ∩ ball(y)|` over all distinct centers of length `n`.
///
/// The cap bounds the total number of ball members held in memory at once
/// (`q^n` balls side by side).
pub fn max_intersection_exhaustive(
    n: usize,
    q: u32,
    b: usize,
    t: usize,
    kind: BallKind,
    cap: EnumerationCap,
) -> Result<MaxIntersection> {
    const OP: &str = "max_intersection_exhaustive";
    check_alphabet(q)?;
    check_burst(b)?;
    if n == 0 {
        return Err(precondition(OP, "n = 0 has a single word, no distinct pair"));
    }
    if kind == BallKind::Deletion && n < b * t {
        return Err(precondition(OP, format!("n = {n} is shorter than bt = {}", b * t)));
    }
    let total = (q as usize)
        .checked_pow(n as u32)
        .filter(|&w| w <= cap.0)
        .ok_or_else(|| Error::CapExceeded {
            size: format!("{q}^{n}"),
            cap: cap.0,
        })?;
    let centers = all_words(q as u8, n);
    debug_assert_eq!(centers.len(), total);

    let mut held = 0usize;
    let mut balls = Vec::with_capacity(centers.len());
    for c in &centers {
        let raw = match kind {
            BallKind::Insertion => insertion_ball_raw(c, q as u8, t, b, cap)?,
            BallKind::Deletion => deletion_ball_raw(c, t, b, cap)?,
        };
        held += raw.len();
        cap.check(held)?;
        let mut sorted: Vec<Vec<u8>> = raw.into_iter().collect();
        sorted.sort_unstable();
        balls.push(sorted);
    }

    let best = (0..centers.len())
        .into_par_iter()
        .filter_map(|i| {
            ((i + 1)..centers.len())
                .map(|j| (sorted_intersection_len(&balls[i], &balls[j]), i, j))
                .reduce(pick_better)
        })
        .reduce_with(pick_better)
        .expect("q^n >= 2 centers give at least one pair");

    let (size, i, j) = best;
    Ok(MaxIntersection {
        size,
        x: Sequence::from_raw(centers[i].clone(), q as u8),
        y: Sequence::from_raw(centers[j].clone(), q as u8),
    })
}

/// Larger intersection wins; ties go to the smaller index pair.
fn pick_better(a: (usize, usize, usize), b: (usize, usize, usize)) -> (usize, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

fn check_same_alphabet(a: &Sequence, b: &Sequence) -> Result<()> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: a.alphabet(),
            found: b.alphabet(),
        });
    }
    Ok(())
}

fn check_deletion_lengths(v: &Sequence, y: &Sequence, t: usize, b: usize) -> Result<()> {
    check_burst(b)?;
    check_same_alphabet(v, y)?;
    let expected = v.len().checked_sub(t * b).ok_or(Error::LengthMismatch {
        expected: t * b,
        found: v.len(),
    })?;
    if y.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: y.len(),
        });
    }
    Ok(())
}

/// `reach[i][k]`: the suffix `v[i..]` can produce the matching suffix of `y`
/// using exactly `t - k` more bursts, where `k` bursts were used on `v[..i]`.
fn suffix_table(v: &[u8], y: &[u8], t: usize, b: usize) -> Vec<Vec<bool>> {
    let n = v.len();
    let mut reach = vec![vec![false; t + 1]; n + 1];
    reach[n][t] = true;
    for i in (0..n).rev() {
        for k in 0..=t {
            let Some(yi) = i.checked_sub(k * b) else { continue };
            let matched = yi < y.len() && v[i] == y[yi] && reach[i + 1][k];
            let burst = k < t && i + b <= n && reach[i + b][k + 1];
            reach[i][k] = matched || burst;
        }
    }
    reach
}

/// Whether `y` is obtained from `v` by exactly `t` bursts of `b` deletions.
///
/// Dynamic program over (position in `v`, bursts used); `O(|v| t)` states.
pub fn is_deletion_descendant(v: &Sequence, y: &Sequence, t: usize, b: usize) -> Result<bool> {
    check_deletion_lengths(v, y, t, b)?;
    Ok(suffix_table(v.symbols(), y.symbols(), t, b)[0][0])
}

/// Start positions (1-based, in the coordinates of `v`, increasing) of `t`
/// disjoint length-`b` blocks whose removal turns `v` into `y`, if any.
pub fn deletion_witness(v: &Sequence, y: &Sequence, t: usize, b: usize) -> Result<Option<Vec<usize>>> {
    check_deletion_lengths(v, y, t, b)?;
    let (vs, ys) = (v.symbols(), y.symbols());
    let reach = suffix_table(vs, ys, t, b);
    if !reach[0][0] {
        return Ok(None);
    }
    let (mut i, mut k) = (0usize, 0usize);
    let mut starts = Vec::with_capacity(t);
    while i < vs.len() {
        let yi = i - k * b;
        if yi < ys.len() && vs[i] == ys[yi] && reach[i + 1][k] {
            i += 1;
        } else {
            starts.push(i + 1);
            i += b;
            k += 1;
        }
    }
    debug_assert_eq!(starts.len(), t);
    Ok(Some(starts))
}

/// Symbol-by-symbol scan: each symbol of `y` is matched at the first position
/// `v_{j + fb}` carrying it, consuming `f` bursts. Equivalent to the dynamic
/// program and kept as an independent cross-check.
pub fn greedy_is_deletion_descendant(v: &Sequence, y: &Sequence, t: usize, b: usize) -> Result<bool> {
    check_deletion_lengths(v, y, t, b)?;
    let (vs, ys) = (v.symbols(), y.symbols());
    let (mut pos, mut left) = (0usize, t);
    for &sym in ys {
        let skip = (0..=left).find(|&f| vs.get(pos + f * b) == Some(&sym));
        match skip {
            Some(f) => {
                pos += f * b + 1;
                left -= f;
            }
            None => return Ok(false),
        }
    }
    // The remaining tail has length exactly left * b by the length check.
    Ok(true)
}

/// Whether `y` is obtained from `x` by exactly `t` bursts of `b` insertions,
/// which holds exactly when `x` is a `t`-burst deletion descendant of `y`.
pub fn is_insertion_descendant(x: &Sequence, y: &Sequence, t: usize, b: usize) -> Result<bool> {
    is_deletion_descendant(y, x, t, b)
}

/// Descendant test for either channel: `word` received from `center`.
pub fn is_descendant(center: &Sequence, word: &Sequence, t: usize, b: usize, kind: BallKind) -> Result<bool> {
    match kind {
        BallKind::Insertion => is_insertion_descendant(center, word, t, b),
        BallKind::Deletion => is_deletion_descendant(center, word, t, b),
    }
}
