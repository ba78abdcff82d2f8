//! Words over `{0, ..., q-1}`, b-run analysis and the extremal deletion centers.

use std::fmt;

use crate::combinatorics::MAX_ALPHABET;
use crate::error::{precondition, Error, Result};

/// A word over the alphabet `{0, ..., q-1}`. The empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    symbols: Vec<u8>,
    q: u8,
}

impl Sequence {
    pub fn new(symbols: Vec<u8>, q: u32) -> Result<Self> {
        check_alphabet(q)?;
        if let Some(&bad) = symbols.iter().find(|&&s| u32::from(s) >= q) {
            return Err(Error::SymbolOutOfRange {
                symbol: u32::from(bad),
                q,
            });
        }
        Ok(Sequence { symbols, q: q as u8 })
    }

    pub fn empty(q: u32) -> Result<Self> {
        Sequence::new(Vec::new(), q)
    }

    /// Caller guarantees every symbol is below `q`.
    pub(crate) fn from_raw(symbols: Vec<u8>, q: u8) -> Self {
        debug_assert!(symbols.iter().all(|&s| s < q));
        Sequence { symbols, q }
    }

    /// Parses the digit-string form (`q <= 10`) or the comma-separated form.
    pub fn parse(text: &str, q: u32) -> Result<Self> {
        check_alphabet(q)?;
        let text = text.trim();
        let symbols = if q <= 10 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("'{c}' is not a digit")))
                })
                .collect::<Result<Vec<_>>>()?
        } else if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u8>()
                        .map_err(|e| Error::Parse(format!("'{part}': {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Sequence::new(symbols, q)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> u32 {
        u32::from(self.q)
    }

    pub(crate) fn q_raw(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        if self.q != other.q {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet(),
                found: other.alphabet(),
            });
        }
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Sequence { symbols, q: self.q })
    }

    /// Substring `[start, end)` using 0-based offsets.
    pub fn slice(&self, start: usize, end: usize) -> Sequence {
        Sequence {
            symbols: self.symbols[start..end].to_vec(),
            q: self.q,
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 10 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let mut first = true;
            for s in &self.symbols {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "{s}")?;
            }
            Ok(())
        }
    }
}

pub(crate) fn check_alphabet(q: u32) -> Result<()> {
    if !(2..=MAX_ALPHABET).contains(&q) {
        return Err(Error::InvalidParams(format!(
            "alphabet size q={q} must lie in [2, {MAX_ALPHABET}]"
        )));
    }
    Ok(())
}

fn check_symbol(sigma: u32, q: u32) -> Result<()> {
    check_alphabet(q)?;
    if sigma >= q {
        return Err(Error::SymbolOutOfRange { symbol: sigma, q });
    }
    Ok(())
}

/// The b-cyclic word `X_i = sigma + floor((i-1)/b) mod q`.
pub fn b_cyclic(n: usize, q: u32, b: usize, sigma: u32) -> Result<Sequence> {
    check_symbol(sigma, q)?;
    if b == 0 {
        return Err(Error::InvalidParams("burst length b must be at least 1".into()));
    }
    let symbols = (0..n).map(|i| ((sigma as usize + i / b) % q as usize) as u8).collect();
    Ok(Sequence::from_raw(symbols, q as u8))
}

/// `sigma^j` followed by the b-cyclic word of length `n - j` starting at
/// `sigma + 1`. These words attain the maximal deletion-ball size.
pub fn y_sequence(n: usize, q: u32, b: usize, sigma: u32, j: usize) -> Result<Sequence> {
    check_symbol(sigma, q)?;
    if j >= b {
        return Err(precondition(
            "y_sequence",
            format!("j = {j} must lie in [0, b-1] = [0, {}]", b - 1),
        ));
    }
    if j > n {
        return Err(precondition("y_sequence", format!("j = {j} exceeds n = {n}")));
    }
    let mut symbols = vec![sigma as u8; j];
    let tail = b_cyclic(n - j, q, b, (sigma + 1) % q)?;
    symbols.extend_from_slice(tail.symbols());
    Ok(Sequence::from_raw(symbols, q as u8))
}

/// Number of b-runs of `x`, i.e. `1 + |{j > b : x_j != x_{j-b}}|`, which is
/// the size of its radius-1 b-burst-deletion ball.
pub fn radius1_del_ball_size(x: &Sequence, b: usize) -> Result<usize> {
    if b == 0 || x.len() < b + 1 {
        return Err(precondition(
            "radius1_del_ball_size",
            format!("requires b >= 1 and length >= b + 1 (length {}, b {b})", x.len()),
        ));
    }
    let s = x.symbols();
    Ok(1 + (b..s.len()).filter(|&j| s[j] != s[j - b]).count())
}

/// The `b x ceil(n/b)` column-major layout of a word; short rows are padded
/// by repeating their last symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayRepresentation {
    pub rows: Vec<Vec<u8>>,
}

impl ArrayRepresentation {
    /// Number of runs in each row.
    pub fn run_counts(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|row| 1 + row.windows(2).filter(|w| w[0] != w[1]).count())
            .collect()
    }

    /// `1 + sum_i (r_i - 1)`.
    pub fn deletion_ball_size(&self) -> usize {
        1 + self.run_counts().iter().map(|r| r - 1).sum::<usize>()
    }
}

pub fn array_representation(x: &Sequence, b: usize) -> Result<ArrayRepresentation> {
    if b == 0 || x.is_empty() {
        return Err(precondition(
            "array_representation",
            "requires b >= 1 and a nonempty word",
        ));
    }
    let s = x.symbols();
    let cols = s.len().div_ceil(b);
    let rows = (0..b)
        .map(|r| {
            let mut row: Vec<u8> = Vec::with_capacity(cols);
            for c in 0..cols {
                match s.get(c * b + r) {
                    Some(&v) => row.push(v),
                    None => {
                        // A row with no cell at all (b > n) repeats the final symbol of x.
                        let pad = row.last().copied().unwrap_or(s[s.len() - 1]);
                        row.push(pad);
                    }
                }
            }
            row
        })
        .collect();
    Ok(ArrayRepresentation { rows })
}
