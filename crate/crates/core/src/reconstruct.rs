//! Threshold reconstruction of a transmitted word from distinct outputs of a
//! burst-insertion or burst-deletion channel.
//!
//! Both procedures peel the transmitted word one symbol at a time. The
//! insertion decoder decides each symbol by pairwise precedence counts over
//! the positions `1, b+1, ..., tb+1` and then keeps the prefix class that is
//! still above the next threshold. The binary deletion decoder decides by
//! majority; when the majority class is too small it learns that the symbol
//! `b` places ahead is the complement, leaving `b-1` cells unknown, which a
//! final candidate filter resolves.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::balls::{is_deletion_descendant, is_insertion_descendant, OutputSet};
use crate::combinatorics::{
    binary_deletion_threshold, del_intersection_max_binary, ins_intersection_max, ChannelParams,
};
use crate::error::{precondition, Error, Result};
use crate::scalar::{mul, pow};
use crate::sequences::{check_alphabet, Sequence};

/// Selects the class `U^{alpha,i,b}`: words whose first `alpha` among the
/// positions `1, b+1, ..., tb+1` sits at `(i-1)b+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassifierIndex {
    pub alpha: u8,
    /// 1-based, in `[1, t+1]`.
    pub i: usize,
}

/// Partition of a word set by first appearances at positions `1, b+1, ...`,
/// plus pairwise precedence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstSymbolClasses {
    q: usize,
    t: usize,
    /// `members[alpha][i-1]`: indices of the words in class `(alpha, i)`.
    members: Vec<Vec<Vec<usize>>>,
    /// `precedence[alpha][beta]`: words where `alpha` appears before `beta`.
    precedence: Vec<Vec<usize>>,
}

impl FirstSymbolClasses {
    pub fn class(&self, index: ClassifierIndex) -> &[usize] {
        &self.members[usize::from(index.alpha)][index.i - 1]
    }

    pub fn class_size(&self, alpha: u8, i: usize) -> usize {
        self.class(ClassifierIndex { alpha, i }).len()
    }

    /// `|U^{alpha ≻ beta, b}|`.
    pub fn precedence(&self, alpha: u8, beta: u8) -> usize {
        self.precedence[usize::from(alpha)][usize::from(beta)]
    }

    /// Sizes of `U^{alpha,1,b}, ..., U^{alpha,t+1,b}`.
    pub fn class_sizes(&self, alpha: u8) -> Vec<usize> {
        self.members[usize::from(alpha)].iter().map(Vec::len).collect()
    }

    /// The symbol that beats every other symbol in precedence, if any.
    pub fn precedence_winner(&self) -> Option<u8> {
        (0..self.q).find_map(|beta| {
            let wins = (0..self.q)
                .filter(|&alpha| alpha != beta)
                .all(|alpha| self.precedence[alpha][beta] < self.precedence[beta][alpha]);
            wins.then_some(beta as u8)
        })
    }

    pub fn radius(&self) -> usize {
        self.t
    }
}

fn classify_raw<W: AsRef<[u8]>>(words: &[W], q: usize, b: usize, t: usize) -> FirstSymbolClasses {
    let mut members = vec![vec![Vec::new(); t + 1]; q];
    let mut precedence = vec![vec![0usize; q]; q];
    let mut first = vec![usize::MAX; q];
    for (idx, w) in words.iter().enumerate() {
        let w = w.as_ref();
        first.fill(usize::MAX);
        for i in 0..=t {
            let s = usize::from(w[i * b]);
            if first[s] == usize::MAX {
                first[s] = i;
                members[s][i].push(idx);
            }
        }
        for alpha in 0..q {
            if first[alpha] == usize::MAX {
                continue;
            }
            for beta in 0..q {
                if beta != alpha && first[alpha] < first[beta] {
                    precedence[alpha][beta] += 1;
                }
            }
        }
    }
    FirstSymbolClasses {
        q,
        t,
        members,
        precedence,
    }
}

/// Classifies every word of `u` by the first appearance of each symbol among
/// positions `1, b+1, ..., tb+1`. Words must have length at least `tb+1`.
pub fn classify_first_symbol(u: &OutputSet, q: u32, b: usize, t: usize) -> Result<FirstSymbolClasses> {
    check_alphabet(q)?;
    if b == 0 {
        return Err(Error::InvalidParams("burst length b must be at least 1".into()));
    }
    if let Some(a) = u.alphabet() {
        if a != q {
            return Err(Error::AlphabetMismatch { expected: q, found: a });
        }
    }
    if let Some(len) = u.word_len() {
        if len < t * b + 1 {
            return Err(precondition(
                "classify_first_symbol",
                format!("words of length {len} are shorter than tb+1 = {}", t * b + 1),
            ));
        }
    }
    let words: Vec<&[u8]> = u.iter().map(Sequence::symbols).collect();
    Ok(classify_raw(&words, q as usize, b, t))
}

/// Per-iteration record of a reconstruction run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepDiagnostics {
    /// 1-based position decided in this step.
    pub position: usize,
    pub symbol: u8,
    /// Insertions: `|U^{symbol,i,b}|` for `i = 1..=t+1`. Deletions: `[|U^0|, |U^1|]`.
    pub class_sizes: Vec<usize>,
    /// Bursts attributed to this step.
    pub bursts: usize,
    /// Words carried into the next step.
    pub remaining: usize,
}

impl fmt::Display for StepDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.class_sizes.iter().map(ToString::to_string).collect();
        write!(
            f,
            "pos={} sym={} classes=[{}] bursts={} remaining={}",
            self.position,
            self.symbol,
            sizes.join(","),
            self.bursts,
            self.remaining
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub word: Sequence,
    pub iterations: usize,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Cells left unknown by the deletion decoder's first phase (1-based).
    pub unknown_positions: Vec<usize>,
    /// Completions examined by the deletion decoder's candidate filter.
    pub candidates_checked: usize,
}

fn check_inputs(u: &OutputSet, q: u32, expected_len: usize) -> Result<()> {
    if u.is_empty() {
        return Err(Error::BelowThreshold {
            have: 0,
            needed: "1".into(),
        });
    }
    if let Some(a) = u.alphabet() {
        if a != q {
            return Err(Error::AlphabetMismatch { expected: q, found: a });
        }
    }
    let len = u.word_len().unwrap_or(0);
    if len != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            found: len,
        });
    }
    Ok(())
}

fn check_threshold(have: usize, max_intersection: &BigUint) -> Result<()> {
    let needed = max_intersection + 1u32;
    if BigUint::from(have) < needed {
        return Err(Error::BelowThreshold {
            have,
            needed: needed.to_string(),
        });
    }
    Ok(())
}

fn take_singleton(words: Vec<Vec<u8>>, position: usize) -> Result<Vec<u8>> {
    if words.len() != 1 {
        return Err(Error::NotSingleton {
            position,
            count: words.len(),
        });
    }
    Ok(words.into_iter().next().expect("one word"))
}

/// Recovers `x` of length `n` from at least `N⁺(n,t) + 1` distinct words of
/// its radius-`t` b-burst-insertion ball.
pub fn reconstruct_from_insertions(
    u: &OutputSet,
    n: usize,
    q: u32,
    b: usize,
    t: usize,
) -> Result<ReconstructionResult> {
    let params = ChannelParams::new(q, b as u32, t as u32, n as u32)?;
    if n == 0 {
        return Err(precondition("reconstruct_from_insertions", "requires n >= 1"));
    }
    check_inputs(u, q, n + t * b)?;
    check_threshold(u.len(), &ins_intersection_max::<BigUint>(&params)?)?;

    let (q64, b64) = (u64::from(q), b as u64);
    let threshold = |n_rest: usize, j: usize, t_cur: usize| -> Result<BigUint> {
        let rest = ChannelParams::new(q, b as u32, (t_cur - j) as u32, n_rest as u32)?;
        let inner: BigUint = ins_intersection_max(&rest)?;
        let growth: BigUint = mul(&pow(q64 - 1, j as u64)?, &pow(q64, j as u64 * (b64 - 1))?)?;
        Ok(mul(&growth, &inner)? + 1u32)
    };

    let mut words: Vec<Vec<u8>> = u.iter().map(|w| w.symbols().to_vec()).collect();
    let mut out: Vec<u8> = Vec::with_capacity(n);
    let mut t_cur = t;
    let mut diagnostics = Vec::new();

    while out.len() < n {
        let position = out.len() + 1;
        if t_cur == 0 {
            out.extend(take_singleton(words, position)?);
            break;
        }
        let classes = classify_raw(&words, q as usize, b, t_cur);
        let beta = classes.precedence_winner().ok_or(Error::NoFirstSymbol { position })?;
        out.push(beta);
        let n_rest = n - out.len();
        if n_rest == 0 {
            diagnostics.push(StepDiagnostics {
                position,
                symbol: beta,
                class_sizes: classes.class_sizes(beta),
                bursts: 0,
                remaining: 0,
            });
            break;
        }

        let mut chosen = None;
        for j in (0..=t_cur).rev() {
            let size = classes.class_size(beta, j + 1);
            if BigUint::from(size) >= threshold(n_rest, j, t_cur)? {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.ok_or(Error::NoThresholdClass { position })?;

        // Largest group sharing the first jb symbols; ties to the smallest prefix.
        let strip = j * b + 1;
        let mut groups: BTreeMap<&[u8], Vec<usize>> = BTreeMap::new();
        for &idx in classes.class(ClassifierIndex { alpha: beta, i: j + 1 }) {
            groups.entry(&words[idx][..j * b]).or_default().push(idx);
        }
        let best = groups
            .values()
            .fold(None::<&Vec<usize>>, |best, g| match best {
                Some(cur) if cur.len() >= g.len() => Some(cur),
                _ => Some(g),
            })
            .expect("chosen class is nonempty");
        let next: Vec<Vec<u8>> = best.iter().map(|&idx| words[idx][strip..].to_vec()).collect();

        diagnostics.push(StepDiagnostics {
            position,
            symbol: beta,
            class_sizes: classes.class_sizes(beta),
            bursts: j,
            remaining: next.len(),
        });
        words = next;
        t_cur -= j;
    }

    let word = Sequence::new(out, q)?;
    for y in u.iter() {
        if !is_insertion_descendant(&word, y, t, b)? {
            return Err(Error::Inconsistent { word: y.to_string() });
        }
    }
    Ok(ReconstructionResult {
        word,
        iterations: diagnostics.len(),
        diagnostics,
        unknown_positions: Vec::new(),
        candidates_checked: 1,
    })
}

/// A binary word with some cells unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialWord {
    cells: Vec<Option<u8>>,
}

impl PartialWord {
    pub fn new(cells: Vec<Option<u8>>) -> Result<Self> {
        if let Some(bad) = cells.iter().flatten().find(|&&s| s > 1) {
            return Err(Error::SymbolOutOfRange {
                symbol: u32::from(*bad),
                q: 2,
            });
        }
        Ok(PartialWord { cells })
    }

    /// Parses a string over `{0, 1, ?}`.
    pub fn parse(text: &str) -> Result<Self> {
        let cells = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(Some(0)),
                '1' => Ok(Some(1)),
                '?' => Ok(None),
                other => Err(Error::Parse(format!("'{other}' is not 0, 1 or ?"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartialWord { cells })
    }

    pub fn cells(&self) -> &[Option<u8>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 1-based positions of unknown cells.
    pub fn unknown_positions(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for PartialWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            match c {
                Some(s) => write!(f, "{s}")?,
                None => f.write_str("?")?,
            }
        }
        Ok(())
    }
}

/// All binary completions of `p`, in lexicographic order of the unknown cells.
pub fn candidate_expansion(p: &PartialWord) -> Vec<Sequence> {
    let unknown: Vec<usize> = p.unknown_positions().iter().map(|i| i - 1).collect();
    let base: Vec<u8> = p.cells.iter().map(|c| c.unwrap_or(0)).collect();
    (0u64..1 << unknown.len())
        .map(|mask| {
            let mut w = base.clone();
            for (k, &pos) in unknown.iter().enumerate() {
                w[pos] = ((mask >> (unknown.len() - 1 - k)) & 1) as u8;
            }
            Sequence::from_raw(w, 2)
        })
        .collect()
}

/// Output of the deletion decoder's majority phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityPhase {
    pub partial: PartialWord,
    pub diagnostics: Vec<StepDiagnostics>,
}

fn check_deletion_params(u: &OutputSet, n: usize, b: usize, t: usize) -> Result<()> {
    let params = ChannelParams::new(2, b as u32, t as u32, n as u32)?;
    let max_int: BigUint = del_intersection_max_binary(&params)?;
    check_inputs(u, 2, n - t * b)?;
    check_threshold(u.len(), &max_int)
}

/// First phase of the binary deletion decoder: fixes every cell of `x` except
/// at most `t(b-1)` unknowns.
pub fn deletion_majority_phase(u: &OutputSet, n: usize, b: usize, t: usize) -> Result<MajorityPhase> {
    check_deletion_params(u, n, b, t)?;
    let mut cells: Vec<Option<u8>> = vec![None; n];
    let mut words: Vec<Vec<u8>> = u.iter().map(|w| w.symbols().to_vec()).collect();
    let mut i = 0usize;
    let mut t_cur = t;
    let mut n_rem = n;
    let mut unknown = 0usize;
    let mut diagnostics = Vec::new();

    while i < n {
        let position = i + 1;
        if t_cur == 0 {
            let tail = take_singleton(words, position)?;
            debug_assert_eq!(tail.len(), n - i);
            for (cell, s) in cells[i..].iter_mut().zip(tail) {
                *cell = Some(s);
            }
            break;
        }
        let ones = words.iter().filter(|w| w.first() == Some(&1)).count();
        let zeros = words.iter().filter(|w| w.first() == Some(&0)).count();
        if ones == zeros {
            return Err(Error::MajorityTie { position });
        }
        let beta: u8 = u8::from(ones > zeros);
        let majority = zeros.max(ones);
        cells[i] = Some(beta);
        let threshold: BigUint = binary_deletion_threshold(b as u32, n_rem as i64 - 1, t_cur as i64)?;

        let (keep, bursts) = if BigUint::from(majority) > threshold {
            i += 1;
            n_rem -= 1;
            (beta, 0)
        } else {
            if i + b >= n {
                return Err(precondition(
                    "deletion_majority_phase",
                    format!("minority branch at position {position} runs past the word end"),
                ));
            }
            unknown += b - 1;
            cells[i + b] = Some(1 - beta);
            i += b + 1;
            n_rem -= b + 1;
            t_cur -= 1;
            (1 - beta, 1)
        };
        words = words
            .into_iter()
            .filter(|w| w.first() == Some(&keep))
            .map(|mut w| {
                w.remove(0);
                w
            })
            .collect();
        diagnostics.push(StepDiagnostics {
            position,
            symbol: beta,
            class_sizes: vec![zeros, ones],
            bursts,
            remaining: words.len(),
        });
    }
    debug_assert!(unknown <= t * (b - 1));
    Ok(MajorityPhase {
        partial: PartialWord { cells },
        diagnostics,
    })
}

/// Recovers binary `x` of length `n` from at least `N⁻(n,t) + 1` distinct
/// words of its radius-`t` b-burst-deletion ball.
pub fn reconstruct_from_deletions(u: &OutputSet, n: usize, b: usize, t: usize) -> Result<ReconstructionResult> {
    let phase = deletion_majority_phase(u, n, b, t)?;
    let candidates = candidate_expansion(&phase.partial);
    let inputs: Vec<&Sequence> = u.iter().collect();
    let verdicts: Vec<bool> = candidates
        .par_iter()
        .map(|v| -> Result<bool> {
            for y in &inputs {
                if !is_deletion_descendant(v, y, t, b)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?;
    let mut survivors = candidates.iter().zip(&verdicts).filter(|(_, ok)| **ok).map(|(v, _)| v);
    let word = survivors.next().ok_or(Error::NoCandidate)?.clone();
    let extra = survivors.count();
    if extra > 0 {
        return Err(Error::MultipleCandidates { count: extra + 1 });
    }
    Ok(ReconstructionResult {
        word,
        iterations: phase.diagnostics.len(),
        unknown_positions: phase.partial.unknown_positions(),
        diagnostics: phase.diagnostics,
        candidates_checked: candidates.len(),
    })
}
