//! Real polynomials with sign-change root isolation on bounded intervals.

use std::ops::{Add, Mul, Sub};

/// `c[0] + c[1] s + ... + c[d] s^d`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect())
    }

    /// The antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(j, c)| c / (j + 1) as f64));
        Polynomial::new(out)
    }

    /// `∫_a^b p(s) ds`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// The polynomial `s ↦ p(s + c)`.
    pub fn shift(&self, c: f64) -> Polynomial {
        // Horner's scheme on polynomials: p(x + c) = (((c_d)(x+c) + c_{d-1})(x+c) + ...).
        let mut out = Polynomial::default();
        let lin = Polynomial::new(vec![c, 1.0]);
        for &coef in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Polynomial::constant(coef);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Points in `(a, b)` where the polynomial changes sign, ascending.
    /// Roots of even multiplicity are not reported.
    pub fn sign_changes(&self, a: f64, b: f64) -> Vec<f64> {
        if !(a < b) {
            return Vec::new();
        }
        match self.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if r > a && r < b {
                    vec![r]
                } else {
                    Vec::new()
                }
            }
            Some(_) => {
                let mut knots = vec![a];
                knots.extend(self.derivative().sign_changes(a, b));
                knots.push(b);
                let mut roots = Vec::new();
                for seg in knots.windows(2) {
                    if let Some(r) = self.bisect(seg[0], seg[1]) {
                        if r > a && r < b && roots.last().is_none_or(|&last: &f64| r > last) {
                            roots.push(r);
                        }
                    }
                }
                roots
            }
        }
    }

    /// Root of a monotone segment with a strict sign change, if any.
    fn bisect(&self, mut lo: f64, mut hi: f64) -> Option<f64> {
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        if flo == 0.0 || fhi == 0.0 || (flo > 0.0) == (fhi > 0.0) {
            // A zero exactly at a knot is either an interval end or a root of
            // even multiplicity; neither splits the sign pattern inside.
            return None;
        }
        let rising = fhi > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return Some(mid);
            }
            if (fm > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Breakpoints `a = x_0 < ... < x_r = b` between which the sign of `p` is constant.
    pub fn sign_partition(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend(self.sign_changes(a, b));
        pts.push(b);
        pts
    }

    /// `max_{s ∈ [a,b]} |p(s)|`.
    pub fn max_abs(&self, a: f64, b: f64) -> f64 {
        let mut best = self.eval(a).abs().max(self.eval(b).abs());
        for c in self.derivative().sign_changes(a, b) {
            best = best.max(self.eval(c).abs());
        }
        best
    }

    /// `∫_a^b |p(s)| ds`, exact up to root isolation.
    pub fn abs_integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        self.sign_partition(a, b).windows(2).map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs()).sum()
    }

    /// Lebesgue measure of `{s ∈ [a,b] : pred(p(s))}` for a predicate on values.
    pub fn measure_where(&self, a: f64, b: f64, pred: impl Fn(f64) -> bool) -> f64 {
        self.sign_partition(a, b)
            .windows(2)
            .filter(|w| pred(self.eval(0.5 * (w[0] + w[1]))))
            .map(|w| w[1] - w[0])
            .sum()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Polynomial::default();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}
