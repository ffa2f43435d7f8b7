//! One-sided subshifts of finite type, their words and the `d_θ` metric.

mod function;
mod word;

pub use function::{LocallyConstantFunction, Norms};
pub use word::Word;
pub(crate) use word::{code, common_prefix};

use crate::error::{Error, Result};

/// A validated transition matrix together with the metric parameter θ.
#[derive(Debug, Clone, PartialEq)]
pub struct SftSpec {
    alphabet_size: usize,
    transition: Vec<bool>,
    theta: f64,
    aperiodicity_power: usize,
}

impl SftSpec {
    /// Validates a 0/1 matrix and θ, and finds the least `d` with `A^d > 0`.
    pub fn new(raw_matrix: &[Vec<u8>], theta: f64) -> Result<Self> {
        let a = raw_matrix.len();
        if a < 2 {
            return Err(Error::AlphabetTooSmall(a));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::BadTheta(theta));
        }
        let mut transition = Vec::with_capacity(a * a);
        for (i, row) in raw_matrix.iter().enumerate() {
            if row.len() != a {
                return Err(Error::BadMatrix(format!("row {} has length {}, expected {a}", i + 1, row.len())));
            }
            for &e in row {
                match e {
                    0 => transition.push(false),
                    1 => transition.push(true),
                    other => return Err(Error::BadMatrix(format!("entry {other} in row {}", i + 1))),
                }
            }
        }
        for s in 0..a {
            let row_alive = (0..a).any(|j| transition[s * a + j]);
            let col_alive = (0..a).any(|i| transition[i * a + s]);
            if !row_alive || !col_alive {
                return Err(Error::DeadSymbol(s + 1));
            }
        }

        let mut power = transition.clone();
        let mut d = 1;
        while !power.iter().all(|&e| e) {
            if d >= a * a {
                return Err(Error::NotPrimitive(a * a));
            }
            power = bool_mul(&power, &transition, a);
            d += 1;
        }
        Ok(SftSpec { alphabet_size: a, transition, theta, aperiodicity_power: d })
    }

    /// The full shift on `a` symbols.
    pub fn full_shift(a: usize, theta: f64) -> Result<Self> {
        SftSpec::new(&vec![vec![1; a]; a], theta)
    }

    /// The golden-mean shift: the word `22` is forbidden.
    pub fn golden_mean(theta: f64) -> Result<Self> {
        SftSpec::new(&[vec![1, 1], vec![1, 0]], theta)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn aperiodicity_power(&self) -> usize {
        self.aperiodicity_power
    }

    /// Whether the zero-based transition `i -> j` is allowed.
    #[inline]
    pub fn allowed(&self, i: u8, j: u8) -> bool {
        self.transition[i as usize * self.alphabet_size + j as usize]
    }

    /// The matrix as 0/1 rows.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.transition
            .chunks(self.alphabet_size)
            .map(|row| row.iter().map(|&e| e as u8).collect())
            .collect()
    }

    pub(crate) fn admissible_indices(&self, w: &[u8]) -> bool {
        w.iter().all(|&s| (s as usize) < self.alphabet_size) && w.windows(2).all(|p| self.allowed(p[0], p[1]))
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        self.admissible_indices(w.indices())
    }

    pub fn check_admissible(&self, w: &Word) -> Result<()> {
        if self.is_admissible(w) {
            Ok(())
        } else {
            Err(Error::Inadmissible(self.format_word(w)))
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let w = Word::parse(text, self.alphabet_size)?;
        self.check_admissible(&w)?;
        Ok(w)
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.format(self.alphabet_size)
    }

    /// All admissible words of length `n`, in lexicographic order.
    pub fn enumerate_words(&self, n: usize) -> Vec<Word> {
        self.enumerate_indices(n).into_iter().map(Word::from_indices).collect()
    }

    pub(crate) fn enumerate_indices(&self, n: usize) -> Vec<Vec<u8>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let a = self.alphabet_size as u8;
        let mut layer: Vec<Vec<u8>> = (0..a).map(|s| vec![s]).collect();
        for _ in 1..n {
            let mut next = Vec::with_capacity(layer.len() * 2);
            for w in &layer {
                let last = *w.last().unwrap();
                for s in 0..a {
                    if self.allowed(last, s) {
                        let mut e = w.clone();
                        e.push(s);
                        next.push(e);
                    }
                }
            }
            layer = next;
        }
        layer
    }

    /// Number of admissible words of length `n`, computed by transfer counting.
    pub fn count_words(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let a = self.alphabet_size;
        let mut counts = vec![1u128; a];
        for _ in 1..n {
            let mut next = vec![0u128; a];
            for (i, &c) in counts.iter().enumerate() {
                for (j, slot) in next.iter_mut().enumerate() {
                    if self.transition[i * a + j] {
                        *slot = slot.saturating_add(c);
                    }
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
    }

    /// `d_θ(x, y) = θ^m` with `m` the first index where the truncations differ;
    /// zero when the words coincide.
    pub fn d_theta(&self, x: &Word, y: &Word) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        let m = x.common_prefix(y);
        if m == x.len() {
            return Ok(0.0);
        }
        Ok(self.theta.powi(m as i32))
    }

    /// Like [`SftSpec::d_theta`] but for truncations of points the caller
    /// knows to be distinct: identical words cannot resolve the distance.
    pub fn d_theta_distinct(&self, x: &Word, y: &Word) -> Result<f64> {
        if x.len() == y.len() && x == y {
            return Err(Error::TruncationTooShort(x.len()));
        }
        self.d_theta(x, y)
    }
}

fn bool_mul(x: &[bool], y: &[bool], a: usize) -> Vec<bool> {
    let mut out = vec![false; a * a];
    for i in 0..a {
        for j in 0..a {
            out[i * a + j] = (0..a).any(|k| x[i * a + k] && y[k * a + j]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validates_examples() {
        let full = SftSpec::full_shift(2, 0.5).unwrap();
        assert_eq!(full.aperiodicity_power(), 1);
        // A^2 = [[2,1],[1,1]] > 0 while A has a zero.
        let golden = SftSpec::golden_mean(0.5).unwrap();
        assert_eq!(golden.aperiodicity_power(), 2);
        assert_eq!(SftSpec::new(&[vec![1, 0], vec![0, 1]], 0.5), Err(Error::NotPrimitive(4)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(SftSpec::new(&[vec![1, 1], vec![0, 0]], 0.5), Err(Error::DeadSymbol(2)));
        assert_eq!(SftSpec::new(&[vec![1, 0], vec![1, 0]], 0.5), Err(Error::DeadSymbol(2)));
        assert!(matches!(SftSpec::full_shift(2, 1.0), Err(Error::BadTheta(_))));
        assert!(matches!(SftSpec::full_shift(2, 0.0), Err(Error::BadTheta(_))));
        assert!(matches!(SftSpec::new(&[vec![1, 2], vec![1, 1]], 0.5), Err(Error::BadMatrix(_))));
        assert!(matches!(SftSpec::new(&[vec![1, 1], vec![1]], 0.5), Err(Error::BadMatrix(_))));
        assert_eq!(SftSpec::new(&[vec![1]], 0.5), Err(Error::AlphabetTooSmall(1)));
        // Period-2 cycle: irreducible but not aperiodic.
        assert!(matches!(SftSpec::new(&[vec![0, 1], vec![1, 0]], 0.5), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn enumerates_words() {
        let full = SftSpec::full_shift(2, 0.5).unwrap();
        let names: Vec<_> = full.enumerate_words(2).iter().map(|w| full.format_word(w)).collect();
        assert_eq!(names, ["11", "12", "21", "22"]);
        let golden = SftSpec::golden_mean(0.5).unwrap();
        let names: Vec<_> = golden.enumerate_words(2).iter().map(|w| golden.format_word(w)).collect();
        assert_eq!(names, ["11", "12", "21"]);
        // Fibonacci recursion from #1 = 2, #2 = 3.
        let mut fib = vec![2u128, 3];
        for n in 2..5 {
            fib.push(fib[n - 1] + fib[n - 2]);
        }
        assert_eq!(golden.enumerate_words(5).len() as u128, fib[4]);
        assert_eq!(golden.enumerate_words(5).len(), 13);
        for n in 1..10 {
            assert_eq!(golden.count_words(n), golden.enumerate_words(n).len() as u128);
        }
    }

    #[test]
    fn metric_examples() {
        let full = SftSpec::full_shift(2, 0.5).unwrap();
        let w = |s: &str| full.parse_word(s).unwrap();
        assert_eq!(full.d_theta(&w("1211"), &w("1211")).unwrap(), 0.0);
        assert_eq!(full.d_theta(&w("1211"), &w("1221")).unwrap(), 0.25);
        assert_eq!(full.d_theta(&w("2111"), &w("1111")).unwrap(), 1.0);
        assert_eq!(full.d_theta_distinct(&w("12"), &w("12")), Err(Error::TruncationTooShort(2)));
        assert_eq!(full.d_theta(&w("12"), &w("121")), Err(Error::LengthMismatch(2, 3)));
    }

    fn golden_words(len: usize) -> impl Strategy<Value = Word> {
        let words = SftSpec::golden_mean(0.5).unwrap().enumerate_words(len);
        proptest::sample::select(words)
    }

    proptest! {
        #[test]
        fn d_theta_is_a_symmetric_ultrametric(x in golden_words(8), y in golden_words(8), z in golden_words(8)) {
            let spec = SftSpec::golden_mean(0.5).unwrap();
            let dxy = spec.d_theta(&x, &y).unwrap();
            prop_assert_eq!(dxy, spec.d_theta(&y, &x).unwrap());
            let dxz = spec.d_theta(&x, &z).unwrap();
            let dzy = spec.d_theta(&z, &y).unwrap();
            prop_assert!(dxy <= dxz.max(dzy));
        }
    }
}
