use std::fmt;

use crate::error::{Error, Result};

/// A finite word over the alphabet `{1, ..., a}`.
///
/// Symbols are stored zero-based; every public constructor and formatter
/// speaks the one-based convention.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    /// Builds a word from one-based symbols.
    pub fn from_symbols(symbols: &[usize], alphabet_size: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(symbols.len());
        for &s in symbols {
            if s == 0 || s > alphabet_size {
                return Err(Error::BadSymbol { symbol: s, alphabet: alphabet_size });
            }
            out.push((s - 1) as u8);
        }
        Ok(Word(out))
    }

    /// Wraps zero-based symbol indices.
    pub fn from_indices(indices: Vec<u8>) -> Self {
        Word(indices)
    }

    /// Parses the textual form: bare digits when `alphabet_size <= 9`,
    /// otherwise symbols separated by `.`.
    pub fn parse(text: &str, alphabet_size: usize) -> Result<Self> {
        let text = text.trim();
        let symbols: Vec<usize> = if alphabet_size <= 9 && !text.contains('.') {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::WordParse(text.to_string()))?
        } else {
            text.split('.')
                .map(|p| p.parse::<usize>().ok())
                .collect::<Option<_>>()
                .ok_or_else(|| Error::WordParse(text.to_string()))?
        };
        if symbols.is_empty() {
            return Err(Error::WordParse(text.to_string()));
        }
        Word::from_symbols(&symbols, alphabet_size)
    }

    pub fn format(&self, alphabet_size: usize) -> String {
        let sep = if alphabet_size <= 9 { "" } else { "." };
        self.symbols().map(|s| s.to_string()).collect::<Vec<_>>().join(sep)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One-based symbols.
    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize + 1)
    }

    /// Zero-based symbol indices.
    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// The word `σ^n w`.
    pub fn shift(&self, n: usize) -> Word {
        Word(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn push_index(&mut self, s: u8) {
        self.0.push(s);
    }

    /// Length of the longest common prefix.
    pub fn common_prefix(&self, other: &Word) -> usize {
        common_prefix(&self.0, &other.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.0.iter().copied().max().unwrap_or(0) as usize + 1;
        f.write_str(&self.format(max))
    }
}

pub(crate) fn common_prefix(x: &[u8], y: &[u8]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

/// Base-`a` code of a zero-based word; lexicographic order of equal-length
/// words coincides with numeric order of codes.
pub(crate) fn code(indices: &[u8], alphabet_size: usize) -> usize {
    indices.iter().fold(0usize, |acc, &s| acc * alphabet_size + s as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let w = Word::parse("1221", 2).unwrap();
        assert_eq!(w.indices(), &[0, 1, 1, 0]);
        assert_eq!(w.format(2), "1221");
        let big = Word::parse("10.2.11", 12).unwrap();
        assert_eq!(big.format(12), "10.2.11");
        assert!(Word::parse("13", 2).is_err());
        assert!(Word::parse("", 2).is_err());
        assert!(Word::parse("1x", 2).is_err());
    }

    #[test]
    fn codes_follow_lexicographic_order() {
        assert_eq!(code(&[1, 0, 1], 2), 5);
        assert_eq!(code(&[2, 0, 1], 3), 19);
    }
}
