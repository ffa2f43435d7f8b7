//! Pressure and equilibrium states of locally constant potentials.
//!
//! A depth-`k` potential is recoded as a weighted transition matrix on
//! admissible `(k-1)`-words. Its Perron data `(λ, h, v)` give the pressure
//! `log λ` and the equilibrium state as a stationary Markov measure with
//! initial law `v·h` and kernel `π(w→w') = M(w,w') h(w') / (λ h(w))`.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perron::{perron_vector, SparseMatrix};
use crate::sft::{code, LocallyConstantFunction, SftSpec, Word};

#[derive(Debug, Clone)]
pub struct GibbsMarkovMeasure {
    spec: SftSpec,
    potential: LocallyConstantFunction,
    states: Vec<Vec<u8>>,
    state_index: Vec<usize>,
    lambda: f64,
    right: Vec<f64>,
    left: Vec<f64>,
    stationary: Vec<f64>,
    /// `kernel[state * a + s]`: probability of appending symbol `s`.
    kernel: Vec<f64>,
    next_state: Vec<usize>,
}

impl GibbsMarkovMeasure {
    /// The unique equilibrium state of `potential`.
    pub fn new(potential: &LocallyConstantFunction) -> Result<Self> {
        let spec = potential.spec().clone();
        let a = spec.alphabet_size();
        let potential = potential.promote(potential.depth().max(2));
        let k = potential.depth();
        let states = spec.enumerate_indices(k - 1);
        let mut state_index = vec![usize::MAX; a.pow((k - 1) as u32)];
        for (i, w) in states.iter().enumerate() {
            state_index[code(w, a)] = i;
        }

        let mut next_state = vec![usize::MAX; states.len() * a];
        let mut rows = Vec::with_capacity(states.len());
        let mut word = vec![0u8; k];
        for (i, w) in states.iter().enumerate() {
            let mut row = Vec::with_capacity(a);
            word[..k - 1].copy_from_slice(w);
            for s in 0..a as u8 {
                if !spec.allowed(w[k - 2], s) {
                    continue;
                }
                word[k - 1] = s;
                let j = state_index[code(&word[1..], a)];
                next_state[i * a + s as usize] = j;
                row.push((j, potential.eval_indices(&word).exp()));
            }
            rows.push(row);
        }
        let weighted = SparseMatrix::new(rows);
        let right = perron_vector(&weighted)?;
        let left = perron_vector(&weighted.transpose())?;
        let lambda = right.value;
        let h = right.vector;
        let dot: f64 = left.vector.iter().zip(&h).map(|(v, h)| v * h).sum();
        let v: Vec<f64> = left.vector.iter().map(|x| x / dot).collect();
        let stationary: Vec<f64> = v.iter().zip(&h).map(|(v, h)| v * h).collect();

        let mut kernel = vec![0.0; states.len() * a];
        for (i, row) in (0..states.len()).map(|i| (i, weighted.row(i))) {
            for (s, slot) in kernel[i * a..(i + 1) * a].iter_mut().enumerate() {
                let j = next_state[i * a + s];
                if j != usize::MAX {
                    let weight = row.iter().find(|e| e.0 == j).map_or(0.0, |e| e.1);
                    *slot = weight * h[j] / (lambda * h[i]);
                }
            }
        }

        Ok(GibbsMarkovMeasure {
            spec,
            potential,
            states,
            state_index,
            lambda,
            right: h,
            left: v,
            stationary,
            kernel,
            next_state,
        })
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    /// The potential, promoted to depth at least 2.
    pub fn potential(&self) -> &LocallyConstantFunction {
        &self.potential
    }

    /// Length of the words used as Markov states (`k - 1`).
    pub fn state_len(&self) -> usize {
        self.potential.depth() - 1
    }

    pub fn states(&self) -> Vec<Word> {
        self.states.iter().cloned().map(Word::from_indices).collect()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pressure(&self) -> f64 {
        self.lambda.ln()
    }

    pub fn right_eigenvector(&self) -> &[f64] {
        &self.right
    }

    pub fn left_eigenvector(&self) -> &[f64] {
        &self.left
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Transition probability from state `i` to state `j` (zero when not adjacent).
    pub fn kernel_entry(&self, i: usize, j: usize) -> f64 {
        let a = self.spec.alphabet_size();
        (0..a).find(|&s| self.next_state[i * a + s] == j).map_or(0.0, |s| self.kernel[i * a + s])
    }

    #[inline]
    pub(crate) fn state_of(&self, w: &[u8]) -> usize {
        self.state_index[code(w, self.spec.alphabet_size())]
    }

    /// Probability of the next symbol `s` given a context whose last
    /// `k - 1` symbols form the current state.
    #[inline]
    pub(crate) fn step_prob(&self, context: &[u8], s: u8) -> f64 {
        let l = self.state_len();
        let st = self.state_of(&context[context.len() - l..]);
        self.kernel[st * self.spec.alphabet_size() + s as usize]
    }

    /// μ([w]) for zero-based `w` with `len >= k - 1`; zero if inadmissible.
    pub(crate) fn measure_indices(&self, w: &[u8]) -> f64 {
        let l = self.state_len();
        debug_assert!(w.len() >= l);
        if !self.spec.admissible_indices(w) {
            return 0.0;
        }
        let a = self.spec.alphabet_size();
        let mut st = self.state_of(&w[..l]);
        let mut mass = self.stationary[st];
        for &s in &w[l..] {
            mass *= self.kernel[st * a + s as usize];
            st = self.next_state[st * a + s as usize];
        }
        mass
    }

    /// μ([w]) by the product formula. Requires `len(w) >= k - 1`.
    pub fn cylinder_measure(&self, w: &Word) -> Result<f64> {
        let l = self.state_len();
        if w.len() < l {
            return Err(Error::WordTooShort { needed: l, have: w.len() });
        }
        Ok(self.measure_indices(w.indices()))
    }

    /// μ([w]) for words of any positive length; short words are summed over
    /// their completions to a state.
    pub fn cylinder_measure_marginal(&self, w: &Word) -> f64 {
        if w.len() >= self.state_len() {
            return self.measure_indices(w.indices());
        }
        self.states
            .iter()
            .zip(&self.stationary)
            .filter(|(s, _)| s.starts_with(w.indices()))
            .map(|(_, m)| m)
            .sum()
    }

    /// `∫ g dμ`, exact.
    pub fn integrate(&self, g: &LocallyConstantFunction) -> f64 {
        g.word_indices()
            .iter()
            .map(|w| {
                let mass = if w.len() >= self.state_len() {
                    self.measure_indices(w)
                } else {
                    self.cylinder_measure_marginal(&Word::from_indices(w.clone()))
                };
                mass * g.eval_indices(w)
            })
            .sum()
    }

    /// Measure-theoretic entropy `h_μ = P - ∫φ dμ`.
    pub fn entropy(&self) -> f64 {
        self.pressure() - self.integrate(&self.potential)
    }

    pub(crate) fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.stationary.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.stationary.len() - 1
    }

    #[inline]
    pub(crate) fn sample_symbol<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> (u8, usize) {
        let a = self.spec.alphabet_size();
        let probs = &self.kernel[state * a..(state + 1) * a];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (s, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = s;
                if u < acc {
                    return (s as u8, self.next_state[state * a + s]);
                }
            }
        }
        (last as u8, self.next_state[state * a + last])
    }

    /// Extends `w` (whose last `k - 1` symbols are `state`) by `extra` symbols.
    pub(crate) fn extend_sample<R: Rng + ?Sized>(&self, w: &mut Vec<u8>, mut state: usize, extra: usize, rng: &mut R) {
        for _ in 0..extra {
            let (s, next) = self.sample_symbol(state, rng);
            w.push(s);
            state = next;
        }
    }

    /// A μ-distributed word of length `len`, reproducible for a given generator state.
    pub fn sample_orbit<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<Word> {
        let l = self.state_len();
        if len < l {
            return Err(Error::WordTooShort { needed: l, have: len });
        }
        let st = self.sample_state(rng);
        let mut w = self.states[st].clone();
        self.extend_sample(&mut w, st, len - l, rng);
        Ok(Word::from_indices(w))
    }

    pub(crate) fn sample_indices<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<u8> {
        let l = self.state_len();
        let st = self.sample_state(rng);
        let mut w = Vec::with_capacity(len.max(l));
        w.extend_from_slice(&self.states[st]);
        self.extend_sample(&mut w, st, len.saturating_sub(l), rng);
        w
    }

    /// Depth-first walk over admissible extensions of `prefix` (admissible,
    /// of length at least `k - 1`). `visit` receives each word with its
    /// measure and decides whether to descend further.
    pub(crate) fn walk_from<F>(&self, prefix: &[u8], visit: &mut F)
    where
        F: FnMut(&[u8], f64) -> bool,
    {
        let a = self.spec.alphabet_size();
        let l = self.state_len();
        let mut word = prefix.to_vec();
        let state = self.state_of(&word[word.len() - l..]);
        let mass = self.measure_indices(&word);
        self.walk_rec(&mut word, state, mass, a, visit);
    }

    fn walk_rec<F>(&self, word: &mut Vec<u8>, state: usize, mass: f64, a: usize, visit: &mut F)
    where
        F: FnMut(&[u8], f64) -> bool,
    {
        if !visit(word, mass) {
            return;
        }
        for s in 0..a {
            let next = self.next_state[state * a + s];
            if next == usize::MAX {
                continue;
            }
            word.push(s as u8);
            self.walk_rec(word, next, mass * self.kernel[state * a + s], a, visit);
            word.pop();
        }
    }

    /// The measure's chain on admissible `len`-words, `len >= k - 1`.
    pub fn block_chain(&self, len: usize) -> Result<BlockChain> {
        BlockChain::new(self, len)
    }
}

/// The equilibrium state viewed as a Markov chain on admissible `len`-words
/// (the higher-block presentation), with state `w` stepping to `w[1..]·s`.
#[derive(Debug, Clone)]
pub struct BlockChain {
    len: usize,
    alphabet_size: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<usize, usize>,
    initial: Vec<f64>,
    successors: Vec<Vec<(usize, f64)>>,
}

impl BlockChain {
    fn new(measure: &GibbsMarkovMeasure, len: usize) -> Result<Self> {
        let l = measure.state_len();
        if len < l.max(1) {
            return Err(Error::WordTooShort { needed: l.max(1), have: len });
        }
        let spec = measure.spec();
        let a = spec.alphabet_size();
        let states = spec.enumerate_indices(len);
        let index: HashMap<usize, usize> = states.iter().enumerate().map(|(i, w)| (code(w, a), i)).collect();
        let initial = states.iter().map(|w| measure.measure_indices(w)).collect();
        let mut buf = vec![0u8; len + 1];
        let successors = states
            .iter()
            .map(|w| {
                buf[..len].copy_from_slice(w);
                (0..a as u8)
                    .filter(|&s| spec.allowed(w[len - 1], s))
                    .map(|s| {
                        buf[len] = s;
                        (index[&code(&buf[1..], a)], measure.step_prob(&buf[..len], s))
                    })
                    .collect()
            })
            .collect();
        Ok(BlockChain { len, alphabet_size: a, states, index, initial, successors })
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_word(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn state_index(&self, w: &[u8]) -> Option<usize> {
        self.index.get(&code(w, self.alphabet_size)).copied()
    }

    /// μ of each state's cylinder.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn successors(&self, i: usize) -> &[(usize, f64)] {
        &self.successors[i]
    }

    pub fn kernel_matrix(&self) -> SparseMatrix {
        SparseMatrix::new(self.successors.clone())
    }

    pub(crate) fn sample_initial<R: Rng + ?Sized>(&self, cumulative: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
        cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
    }

    pub(crate) fn cumulative_initial(&self) -> Vec<f64> {
        self.initial
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    #[inline]
    pub(crate) fn sample_next<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let succ = &self.successors[state];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(j, p) in succ {
            acc += p;
            if u < acc {
                return j;
            }
        }
        succ[succ.len() - 1].0
    }
}
