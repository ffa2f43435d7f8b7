use std::collections::HashSet;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::sft::{code, SftSpec, Word};
use crate::thermo::GibbsMarkovMeasure;

/// A finite union of cylinders `[w]` over words of a common length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hole {
    word_len: usize,
    alphabet_size: usize,
    words: Vec<Word>,
    codes: HashSet<usize>,
}

impl Hole {
    pub fn new(spec: &SftSpec, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut words: Vec<Word> = words.into_iter().collect();
        words.sort();
        words.dedup();
        let Some(first) = words.first() else {
            return Err(Error::EmptyHole);
        };
        let word_len = first.len();
        for w in &words {
            if w.len() != word_len {
                return Err(Error::LengthMismatch(word_len, w.len()));
            }
            spec.check_admissible(w)?;
        }
        let a = spec.alphabet_size();
        let codes = words.iter().map(|w| code(w.indices(), a)).collect();
        Ok(Hole { word_len, alphabet_size: a, words, codes })
    }

    /// The common cylinder length `n`.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// The defining words, sorted.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Whether a point with truncation `w` (at least `n` symbols) lies in the hole.
    pub fn contains(&self, w: &Word) -> bool {
        w.len() >= self.word_len && self.contains_indices(w.indices())
    }

    #[inline]
    pub(crate) fn contains_indices(&self, w: &[u8]) -> bool {
        self.codes.contains(&code(&w[..self.word_len], self.alphabet_size))
    }

    pub fn measure(&self, mu: &GibbsMarkovMeasure) -> f64 {
        self.words.iter().map(|w| mu.cylinder_measure_marginal(w)).sum()
    }
}

/// Holes `I_n` for a contiguous range of `n`, shrinking towards a point `z`
/// of declared period `p` (zero when aperiodic).
#[derive(Debug, Clone, PartialEq)]
pub struct HoleSequence {
    spec: SftSpec,
    z: Word,
    period: usize,
    holes: Vec<Hole>,
}

impl HoleSequence {
    /// Holes given explicitly, in increasing and contiguous order of `n`.
    pub fn new(spec: &SftSpec, z: Word, period: usize, holes: Vec<Hole>) -> Result<Self> {
        spec.check_admissible(&z)?;
        if holes.is_empty() {
            return Err(Error::EmptyHole);
        }
        for pair in holes.windows(2) {
            if pair[1].word_len != pair[0].word_len + 1 {
                return Err(Error::InvalidArgument(format!(
                    "hole lengths must be contiguous, found {} after {}",
                    pair[1].word_len, pair[0].word_len
                )));
            }
        }
        Ok(HoleSequence { spec: spec.clone(), z, period, holes })
    }

    /// `I_n = [z_1 ... z_n]` for each `n` in `range`.
    pub fn cylinders_around(spec: &SftSpec, z: Word, period: usize, range: RangeInclusive<usize>) -> Result<Self> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo == 0 || hi < lo {
            return Err(Error::InvalidArgument(format!("bad hole range {lo}..={hi}")));
        }
        if z.len() < hi {
            return Err(Error::WordTooShort { needed: hi, have: z.len() });
        }
        let holes = range.map(|n| Hole::new(spec, [z.prefix(n)])).collect::<Result<Vec<_>>>()?;
        HoleSequence::new(spec, z, period, holes)
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn z(&self) -> &Word {
        &self.z
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn hole(&self, n: usize) -> Option<&Hole> {
        let first = self.holes[0].word_len;
        n.checked_sub(first).and_then(|i| self.holes.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hole_validation() {
        let spec = SftSpec::golden_mean(0.5).unwrap();
        let w = |s: &str| Word::parse(s, 2).unwrap();
        assert_eq!(Hole::new(&spec, Vec::new()), Err(Error::EmptyHole));
        assert!(matches!(Hole::new(&spec, [w("22")]), Err(Error::Inadmissible(_))));
        assert_eq!(Hole::new(&spec, [w("12"), w("1")]), Err(Error::LengthMismatch(1, 2)));
        let h = Hole::new(&spec, [w("21"), w("12"), w("21")]).unwrap();
        assert_eq!(h.size(), 2);
        assert!(h.contains(&w("2112")) && !h.contains(&w("1121")) && !h.contains(&w("1")));
    }

    #[test]
    fn cylinders_around_a_point() {
        let spec = SftSpec::full_shift(2, 0.5).unwrap();
        let z = Word::parse("121212", 2).unwrap();
        let seq = HoleSequence::cylinders_around(&spec, z, 2, 2..=5).unwrap();
        assert_eq!(seq.holes().len(), 4);
        assert_eq!(seq.hole(4).unwrap().words()[0], Word::parse("1212", 2).unwrap());
        assert!(seq.hole(1).is_none() && seq.hole(6).is_none());
        assert!(HoleSequence::cylinders_around(&spec, Word::parse("12", 2).unwrap(), 0, 1..=3).is_err());
    }
}
