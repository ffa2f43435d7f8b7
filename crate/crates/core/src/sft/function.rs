use super::{code, SftSpec, Word};
use crate::error::{Error, Result};

/// Sup norm, Lipschitz seminorm and Lipschitz norm of a function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub sup_norm: f64,
    pub seminorm: f64,
    pub lipschitz_norm: f64,
}

/// A function `g: X -> R` that depends only on the first `depth` symbols.
///
/// Values live in a dense table indexed by the base-`a` code of the
/// defining word; slots of inadmissible words hold NaN and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConstantFunction {
    spec: SftSpec,
    depth: usize,
    values: Vec<f64>,
    words: Vec<Vec<u8>>,
    variations: Vec<f64>,
    sup_norm: f64,
    seminorm: f64,
}

impl LocallyConstantFunction {
    /// Builds a function from a table that must list every admissible
    /// `depth`-word exactly once.
    pub fn from_table<I>(spec: &SftSpec, depth: usize, table: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, f64)>,
    {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let a = spec.alphabet_size();
        let mut values = vec![f64::NAN; a.pow(depth as u32)];
        let mut seen = vec![false; values.len()];
        for (w, v) in table {
            if w.len() != depth || !spec.is_admissible(&w) {
                return Err(Error::UnexpectedWord(spec.format_word(&w)));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(spec.format_word(&w)));
            }
            let c = code(w.indices(), a);
            if seen[c] {
                return Err(Error::UnexpectedWord(spec.format_word(&w)));
            }
            seen[c] = true;
            values[c] = v;
        }
        let words = spec.enumerate_indices(depth);
        for w in &words {
            if !seen[code(w, a)] {
                return Err(Error::MissingWord(spec.format_word(&Word::from_indices(w.clone()))));
            }
        }
        Ok(Self::finish(spec.clone(), depth, values, words))
    }

    /// Builds a function by evaluating `f` on every admissible `depth`-word
    /// (zero-based symbols).
    pub fn from_fn(spec: &SftSpec, depth: usize, mut f: impl FnMut(&[u8]) -> f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let a = spec.alphabet_size();
        let words = spec.enumerate_indices(depth);
        let mut values = vec![f64::NAN; a.pow(depth as u32)];
        for w in &words {
            let v = f(w);
            if !v.is_finite() {
                return Err(Error::NonFinite(spec.format_word(&Word::from_indices(w.clone()))));
            }
            values[code(w, a)] = v;
        }
        Ok(Self::finish(spec.clone(), depth, values, words))
    }

    /// Depth-1 table from per-symbol values (`values[i]` is the value on symbol `i + 1`).
    pub fn from_symbol_values(spec: &SftSpec, values: &[f64]) -> Result<Self> {
        if values.len() != spec.alphabet_size() {
            return Err(Error::InvalidArgument(format!(
                "expected {} symbol values, got {}",
                spec.alphabet_size(),
                values.len()
            )));
        }
        Self::from_fn(spec, 1, |w| values[w[0] as usize])
    }

    pub fn constant(spec: &SftSpec, c: f64) -> Result<Self> {
        Self::from_fn(spec, 1, |_| c)
    }

    fn finish(spec: SftSpec, depth: usize, values: Vec<f64>, words: Vec<Vec<u8>>) -> Self {
        let a = spec.alphabet_size();
        let theta = spec.theta();
        let sup_norm = words.iter().map(|w| values[code(w, a)].abs()).fold(0.0, f64::max);
        // V_m: spread of values inside each m-cylinder. Words are sorted, so
        // each m-prefix class is a contiguous run.
        let variations: Vec<f64> = (0..depth)
            .map(|m| {
                let mut best = 0.0f64;
                let mut start = 0;
                while start < words.len() {
                    let mut end = start;
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    while end < words.len() && words[end][..m] == words[start][..m] {
                        let v = values[code(&words[end], a)];
                        lo = lo.min(v);
                        hi = hi.max(v);
                        end += 1;
                    }
                    best = best.max(hi - lo);
                    start = end;
                }
                best
            })
            .collect();
        let seminorm = variations
            .iter()
            .enumerate()
            .map(|(m, v)| v / theta.powi(m as i32))
            .fold(0.0, f64::max);
        LocallyConstantFunction { spec, depth, values, words, variations, sup_norm, seminorm }
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Value on the cylinder named by the first `depth` zero-based symbols of `w`.
    #[inline]
    pub fn eval_indices(&self, w: &[u8]) -> f64 {
        self.values[code(&w[..self.depth], self.spec.alphabet_size())]
    }

    /// Value at (any point extending) `w`.
    pub fn value(&self, w: &Word) -> Result<f64> {
        if w.len() < self.depth {
            return Err(Error::WordTooShort { needed: self.depth, have: w.len() });
        }
        self.spec.check_admissible(&w.prefix(self.depth))?;
        Ok(self.eval_indices(w.indices()))
    }

    /// Admissible `depth`-words paired with their values, in lexicographic order.
    pub fn table(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        self.words.iter().map(|w| (Word::from_indices(w.clone()), self.eval_indices(w)))
    }

    pub(crate) fn word_indices(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn min_value(&self) -> f64 {
        self.words.iter().map(|w| self.eval_indices(w)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.words.iter().map(|w| self.eval_indices(w)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V_m(g)`; zero for `m >= depth`.
    pub fn variation(&self, m: usize) -> f64 {
        self.variations.get(m).copied().unwrap_or(0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn seminorm(&self) -> f64 {
        self.seminorm
    }

    pub fn norms(&self) -> Norms {
        Norms {
            sup_norm: self.sup_norm,
            seminorm: self.seminorm,
            lipschitz_norm: self.sup_norm + self.seminorm,
        }
    }

    /// The same function tabulated at a larger depth.
    pub fn promote(&self, depth: usize) -> Self {
        assert!(depth >= self.depth, "cannot promote depth {} to {depth}", self.depth);
        if depth == self.depth {
            return self.clone();
        }
        Self::from_fn(&self.spec, depth, |w| self.eval_indices(w)).expect("values already finite")
    }

    /// `g + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::from_fn(&self.spec, self.depth, |w| self.eval_indices(w) + c)
    }

    /// Pointwise combination of two functions over the same shift.
    pub fn combine(&self, other: &Self, mut op: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let depth = self.depth.max(other.depth);
        Self::from_fn(&self.spec, depth, |w| op(self.eval_indices(w), other.eval_indices(w)))
    }

    /// `S_n g(w) = Σ_{j<n} g(σ^j w)`.
    pub fn birkhoff_sum(&self, w: &Word, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let needed = n + self.depth - 1;
        if w.len() < needed {
            return Err(Error::WordTooShort { needed, have: w.len() });
        }
        self.spec.check_admissible(&w.prefix(needed))?;
        Ok(self.birkhoff_sum_indices(w.indices(), n))
    }

    #[inline]
    pub(crate) fn birkhoff_sum_indices(&self, w: &[u8], n: usize) -> f64 {
        (0..n).map(|j| self.eval_indices(&w[j..])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(spec: &SftSpec, entries: &[(&str, f64)]) -> Vec<(Word, f64)> {
        entries.iter().map(|(w, v)| (Word::parse(w, spec.alphabet_size()).unwrap(), *v)).collect()
    }

    #[test]
    fn norm_examples() {
        let spec = SftSpec::full_shift(2, 0.5).unwrap();
        let c = LocallyConstantFunction::constant(&spec, -3.0).unwrap();
        assert_eq!(c.norms(), Norms { sup_norm: 3.0, seminorm: 0.0, lipschitz_norm: 3.0 });

        let g = LocallyConstantFunction::from_symbol_values(&spec, &[0.0, 1.0]).unwrap();
        assert_eq!(g.norms(), Norms { sup_norm: 1.0, seminorm: 1.0, lipschitz_norm: 2.0 });

        let h = LocallyConstantFunction::from_table(
            &spec,
            2,
            table(&spec, &[("11", 0.0), ("12", 0.0), ("21", 3.0), ("22", 3.0)]),
        )
        .unwrap();
        assert_eq!(h.variation(0), 3.0);
        assert_eq!(h.variation(1), 0.0);
        assert_eq!(h.seminorm(), 3.0);
    }

    #[test]
    fn table_errors() {
        let golden = SftSpec::golden_mean(0.5).unwrap();
        let missing = LocallyConstantFunction::from_table(&golden, 2, table(&golden, &[("11", 0.0), ("12", 1.0)]));
        assert_eq!(missing, Err(Error::MissingWord("21".into())));
        let forbidden = LocallyConstantFunction::from_table(
            &golden,
            2,
            table(&golden, &[("11", 0.0), ("12", 1.0), ("21", 1.0), ("22", 1.0)]),
        );
        assert_eq!(forbidden, Err(Error::UnexpectedWord("22".into())));
        let short = LocallyConstantFunction::from_table(&golden, 2, table(&golden, &[("1", 0.0)]));
        assert_eq!(short, Err(Error::UnexpectedWord("1".into())));
        assert_eq!(LocallyConstantFunction::from_table(&golden, 0, Vec::new()), Err(Error::ZeroDepth));
        let nan = LocallyConstantFunction::from_table(&golden, 1, table(&golden, &[("1", f64::NAN), ("2", 0.0)]));
        assert_eq!(nan, Err(Error::NonFinite("1".into())));
    }

    #[test]
    fn birkhoff_examples() {
        let spec = SftSpec::full_shift(2, 0.5).unwrap();
        let w = spec.parse_word("1221").unwrap();
        let g = LocallyConstantFunction::from_symbol_values(&spec, &[1.0, 5.0]).unwrap();
        assert_eq!(g.birkhoff_sum(&w, 0).unwrap(), 0.0);
        assert_eq!(g.birkhoff_sum(&w, 3).unwrap(), 11.0);
        let c = LocallyConstantFunction::constant(&spec, 2.5).unwrap();
        assert_eq!(c.birkhoff_sum(&w, 4).unwrap(), 10.0);
        let deep = g.promote(3);
        assert_eq!(deep.birkhoff_sum(&w, 3), Err(Error::WordTooShort { needed: 5, have: 4 }));
    }

    /// Brute-force seminorm: sup over pairs of depth-k words of
    /// |g(x) - g(y)| / d_θ(x, y).
    fn brute_seminorm(g: &LocallyConstantFunction) -> f64 {
        let spec = g.spec();
        let words = spec.enumerate_words(g.depth());
        let mut best = 0.0f64;
        for x in &words {
            for y in &words {
                if x == y {
                    continue;
                }
                let d = spec.d_theta(x, y).unwrap();
                best = best.max((g.value(x).unwrap() - g.value(y).unwrap()).abs() / d);
            }
        }
        best
    }

    fn arb_function() -> impl Strategy<Value = LocallyConstantFunction> {
        let shifts = prop_oneof![
            Just(vec![vec![1u8, 1], vec![1, 1]]),
            Just(vec![vec![1u8, 1], vec![1, 0]]),
            Just(vec![vec![1u8, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]),
            Just(vec![vec![1u8, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]),
        ];
        (shifts, 1usize..=5, 0.1f64..0.9, prop::collection::vec(-5.0f64..5.0, 243))
            .prop_map(|(m, depth, theta, vals)| {
                let spec = SftSpec::new(&m, theta).unwrap();
                let depth = if spec.alphabet_size() == 3 { depth.min(4) } else { depth };
                let mut i = 0;
                LocallyConstantFunction::from_fn(&spec, depth, |_| {
                    i += 1;
                    vals[i % vals.len()]
                })
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn seminorm_matches_pairwise_sup(g in arb_function()) {
            let brute = brute_seminorm(&g);
            prop_assert!((brute - g.seminorm()).abs() <= 1e-12 * brute.max(1.0));
        }

        #[test]
        fn local_constancy(g in arb_function(), extra in 0usize..3) {
            let spec = g.spec().clone();
            let long = spec.enumerate_words(g.depth() + extra + 1);
            for x in &long {
                for y in &long {
                    if x.common_prefix(y) >= g.depth() {
                        prop_assert_eq!(g.value(x).unwrap(), g.value(y).unwrap());
                    }
                }
            }
        }

        #[test]
        fn birkhoff_cocycle(g in arb_function(), n in 0usize..6, m in 0usize..6, pick in 0usize..1000) {
            let spec = g.spec().clone();
            let words = spec.enumerate_words(n + m + g.depth());
            let w = &words[pick % words.len()];
            let whole = g.birkhoff_sum(w, n + m).unwrap();
            let split = g.birkhoff_sum(w, n).unwrap() + g.birkhoff_sum(&w.shift(n), m).unwrap();
            prop_assert!((whole - split).abs() <= 1e-12 * whole.abs().max(1.0));
        }
    }
}
