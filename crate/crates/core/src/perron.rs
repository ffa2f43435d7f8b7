//! Perron roots and vectors of sparse nonnegative matrices.
//!
//! Irreducible matrices are handled by power iteration bracketed by the
//! Collatz–Wielandt bounds `min_i (Mx)_i/x_i <= ρ <= max_i (Mx)_i/x_i`,
//! which hold for every positive `x`. Imprimitive blocks are shifted by a
//! multiple of the identity so that the iteration matrix is primitive.
//! Reducible matrices are split into strongly connected components.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

/// Relative width of the Collatz–Wielandt bracket accepted as converged.
pub const EIGEN_TOLERANCE: f64 = 1e-12;
pub const ITERATION_BUDGET: usize = 1_000_000;
const POLISH_PATIENCE: usize = 8;

/// Row-major sparse matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(rows: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert!(rows.iter().flatten().all(|&(j, v)| j < rows.len() && v >= 0.0));
        SparseMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v));
            }
        }
        SparseMatrix { rows }
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    /// `y = xᵀ M` (row vector times matrix).
    pub fn vec_mul(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (xi, row) in x.iter().zip(&self.rows) {
            if *xi != 0.0 {
                for &(j, v) in row {
                    y[j] += xi * v;
                }
            }
        }
    }

    /// Same sparsity pattern with every entry in row `i` multiplied by `w[i]`.
    pub fn scale_rows(&self, w: &[f64]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows.iter().zip(w).map(|(row, &s)| row.iter().map(|&(j, v)| (j, v * s)).collect()).collect(),
        }
    }

    fn submatrix(&self, nodes: &[usize]) -> SparseMatrix {
        let mut local = vec![usize::MAX; self.dim()];
        for (k, &n) in nodes.iter().enumerate() {
            local[n] = k;
        }
        SparseMatrix {
            rows: nodes
                .iter()
                .map(|&n| {
                    self.rows[n]
                        .iter()
                        .filter(|&&(j, v)| local[j] != usize::MAX && v > 0.0)
                        .map(|&(j, v)| (local[j], v))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Dominant eigenvalue and positive right eigenvector (max-normalised).
#[derive(Debug, Clone)]
pub struct PerronVector {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Perron root and right eigenvector of an irreducible nonnegative matrix.
pub fn perron_vector(m: &SparseMatrix) -> Result<PerronVector> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let shift = if period(m) > 1 {
        m.rows.iter().map(|r| r.iter().map(|e| e.1).sum::<f64>()).fold(0.0, f64::max)
    } else {
        0.0
    };
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut width = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for iter in 1..=ITERATION_BUDGET {
        m.mul_vec(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
            let r = *yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if !(hi > 0.0) || !lo.is_finite() {
            return Err(Error::EigenFailure { residual: f64::NAN, iterations: iter });
        }
        width = (hi - lo) / hi;
        let scale = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / scale;
        }
        // Past the tolerance, keep polishing while the bracket still shrinks.
        if width < best {
            best = width;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if width <= EIGEN_TOLERANCE && (width == 0.0 || stalled >= POLISH_PATIENCE) {
            return Ok(PerronVector { value: 0.5 * (lo + hi) - shift, vector: x, iterations: iter });
        }
    }
    Err(Error::EigenFailure { residual: width, iterations: ITERATION_BUDGET })
}

/// Period of an irreducible matrix's graph (gcd of cycle lengths).
fn period(m: &SparseMatrix) -> usize {
    let n = m.dim();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, w) in m.row(u) {
            if w > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..n {
        for &(v, w) in m.row(u) {
            if w > 0.0 && level[u] != usize::MAX && level[v] != usize::MAX {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g.max(1)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The strongly connected components of a sparsity pattern that carry at
/// least one cycle. The spectral radius of any matrix with this pattern is
/// the largest Perron root among them.
#[derive(Debug, Clone)]
pub struct CyclicComponents {
    components: Vec<Vec<usize>>,
}

impl CyclicComponents {
    pub fn of(m: &SparseMatrix) -> Self {
        let mut graph = DiGraph::<(), ()>::with_capacity(m.dim(), 0);
        let nodes: Vec<_> = (0..m.dim()).map(|_| graph.add_node(())).collect();
        for i in 0..m.dim() {
            for &(j, v) in m.row(i) {
                if v > 0.0 {
                    graph.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let mut components: Vec<Vec<usize>> = kosaraju_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || m.row(c[0]).iter().any(|&(j, v)| j == c[0] && v > 0.0))
            .collect();
        components.sort();
        CyclicComponents { components }
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Spectral radius of `m`, which must share the pattern this
    /// decomposition was built from. Zero for nilpotent patterns.
    pub fn spectral_radius(&self, m: &SparseMatrix) -> Result<f64> {
        let mut best = 0.0f64;
        for c in &self.components {
            best = best.max(perron_vector(&m.submatrix(c))?.value);
        }
        Ok(best)
    }
}

/// Spectral radius of an arbitrary nonnegative sparse matrix.
pub fn spectral_radius(m: &SparseMatrix) -> Result<f64> {
    CyclicComponents::of(m).spectral_radius(m)
}
