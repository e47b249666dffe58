use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A finite string over the alphabet {0, 1}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self, Error> {
        if let Some(bad) = symbols.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidParameter(format!("symbol {bad} not in {{0,1}}")));
        }
        Ok(Word(symbols))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Word(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Word(vec![1; n])
    }

    /// Word with the binary digits of `bits`, most significant first.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        Word((0..len).map(|i| ((bits >> (len - 1 - i)) & 1) as u8).collect())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, symbol: u8) {
        debug_assert!(symbol <= 1);
        self.0.push(symbol);
    }

    pub fn pushed(&self, symbol: u8) -> Self {
        let mut w = self.clone();
        w.push(symbol);
        w
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, m: usize) -> Self {
        Word(self.0.repeat(m))
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        Word(self.0[start..end].to_vec())
    }

    pub fn count(&self, symbol: u8) -> usize {
        self.0.iter().filter(|&&s| s == symbol).count()
    }

    pub fn contains_zero(&self) -> bool {
        self.0.contains(&0)
    }

    pub fn leading(&self, symbol: u8) -> usize {
        self.0.iter().take_while(|&&s| s == symbol).count()
    }

    pub fn trailing(&self, symbol: u8) -> usize {
        self.0.iter().rev().take_while(|&&s| s == symbol).count()
    }

    /// Cyclic rotation starting at position `i`.
    pub fn rotation(&self, i: usize) -> Self {
        let n = self.len();
        Word((0..n).map(|k| self.0[(i + k) % n]).collect())
    }

    /// Symbol at position `i` of the bi-infinite periodic sequence `self^Z`.
    pub fn periodic_at(&self, i: i64) -> u8 {
        let n = self.len() as i64;
        self.0[i.rem_euclid(n) as usize]
    }

    /// All contiguous factors of length `len`.
    pub fn windows(&self, len: usize) -> impl Iterator<Item = Word> + '_ {
        self.0.windows(len.max(1)).filter(move |_| len > 0).map(|w| Word(w.to_vec()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!("'{other}' is not a binary symbol"))),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Word)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.iter().map(|&b| b.min(1)).collect())
    }
}

/// Shorthand for literals in tests and examples; panics on non-binary input.
pub fn w(s: &str) -> Word {
    s.parse().expect("binary word literal")
}
