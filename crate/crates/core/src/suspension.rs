//! The suspension semi-flow over a subshift of finite type.
//!
//! Points of `Λ = {(x, s) : 0 <= s < f(x)}` move upward at unit speed and
//! jump to `(σx, 0)` on reaching the roof. Observables are polynomials in
//! the level `s` on each cylinder, which makes the fibre integral `F̃`, the
//! sup norm `‖F‖` and the cylinder-regularity constant `C` exact.

use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::sft::{code, common_prefix, LocallyConstantFunction, SftSpec, Word};
use crate::thermo::GibbsMarkovMeasure;

pub const MAX_DEGREE: usize = 8;

/// A locally constant roof function bounded below by 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofFunction {
    base: LocallyConstantFunction,
    min_value: f64,
    mean: Option<f64>,
}

impl RoofFunction {
    pub fn new(base: LocallyConstantFunction) -> Result<Self> {
        let min_value = base.min_value();
        if min_value < 1.0 {
            return Err(Error::RoofBelowOne(min_value));
        }
        Ok(RoofFunction { base, min_value, mean: None })
    }

    pub fn constant(spec: &SftSpec, c: f64) -> Result<Self> {
        RoofFunction::new(LocallyConstantFunction::constant(spec, c)?)
    }

    /// Caches `∫ f dμ`.
    pub fn with_measure(mut self, mu: &GibbsMarkovMeasure) -> Self {
        self.mean = Some(mu.integrate(&self.base));
        self
    }

    pub fn base(&self) -> &LocallyConstantFunction {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.base.depth()
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn sup_norm(&self) -> f64 {
        self.base.sup_norm()
    }

    pub fn seminorm(&self) -> f64 {
        self.base.seminorm()
    }

    /// `∫ f dμ` if a measure has been attached.
    pub fn mean(&self) -> Option<f64> {
        self.mean
    }

    /// `∫ f dμ`, using the cached value when it exists.
    pub fn mean_under(&self, mu: &GibbsMarkovMeasure) -> f64 {
        self.mean.unwrap_or_else(|| mu.integrate(&self.base))
    }

    #[inline]
    pub(crate) fn eval_indices(&self, w: &[u8]) -> f64 {
        self.base.eval_indices(w)
    }
}

/// A point `(x, s)` of the suspension, with `x` truncated to a finite word.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub base: Word,
    pub level: f64,
}

impl FlowPoint {
    pub fn new(f: &RoofFunction, base: Word, level: f64) -> Result<Self> {
        let roof = f.base().value(&base)?;
        if !(level >= 0.0 && level < roof) {
            return Err(Error::InvalidArgument(format!("level {level} outside [0, {roof})")));
        }
        Ok(FlowPoint { base, level })
    }

    pub fn on_base(base: Word) -> Self {
        FlowPoint { base, level: 0.0 }
    }
}

/// Result of flowing a point: the image, the number of roof crossings `m`
/// and the new level `s + t - S_m f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowStep {
    pub point: FlowPoint,
    pub laps: usize,
    pub residual: f64,
}

/// Finds `m` with `S_m f(w) <= total < S_{m+1} f(w)` and returns `(m, S_m f(w))`.
/// Exact ties go to the later lap.
pub(crate) fn lap_decomposition(f: &RoofFunction, w: &[u8], total: f64) -> Result<(usize, f64)> {
    let k = f.depth();
    let mut partial = 0.0;
    let mut m = 0;
    loop {
        if m + k > w.len() {
            return Err(Error::WordTooShort { needed: m + k, have: w.len() });
        }
        let next = partial + f.eval_indices(&w[m..]);
        if total < next {
            return Ok((m, partial));
        }
        partial = next;
        m += 1;
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::BadTime(t))
    }
}

/// `Φ^t(p)`.
pub fn flow_step(f: &RoofFunction, p: &FlowPoint, t: f64) -> Result<FlowStep> {
    check_time(t)?;
    let total = p.level + t;
    let (laps, partial) = lap_decomposition(f, p.base.indices(), total)?;
    let residual = total - partial;
    Ok(FlowStep { point: FlowPoint { base: p.base.shift(laps), level: residual }, laps, residual })
}

pub const SEMIGROUP_TOLERANCE: f64 = 1e-9;

/// Whether `Φ^{t1+t2}(p) = Φ^{t2}(Φ^{t1}(p))`: identical base words and
/// levels within [`SEMIGROUP_TOLERANCE`].
pub fn semigroup_check(f: &RoofFunction, p: &FlowPoint, t1: f64, t2: f64) -> Result<bool> {
    let direct = flow_step(f, p, t1 + t2)?;
    let first = flow_step(f, p, t1)?;
    let composed = flow_step(f, &first.point, t2)?;
    Ok(direct.point.base == composed.point.base
        && direct.laps == first.laps + composed.laps
        && (direct.point.level - composed.point.level).abs() <= SEMIGROUP_TOLERANCE)
}

/// An observable `F(x, s) = Σ_j c_j(w) s^j` on each cylinder `[w]` of depth `k_F`.
#[derive(Debug, Clone)]
pub struct FlowObservable {
    spec: SftSpec,
    depth: usize,
    polys: Vec<Polynomial>,
    /// `max(k_F, k_f)`: the depth at which `F̃`, `‖F‖` and `C` are resolved.
    joint_depth: usize,
    sup_norm: f64,
    condition_constant: f64,
    tilde: LocallyConstantFunction,
}

impl FlowObservable {
    /// Builds the observable from per-word coefficient lists `[c_0, c_1, ...]`
    /// and resolves its exact constants against the roof `f`.
    pub fn build<I>(spec: &SftSpec, f: &RoofFunction, depth: usize, coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Vec<f64>)>,
    {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let a = spec.alphabet_size();
        let mut polys = vec![Polynomial::default(); a.pow(depth as u32)];
        let mut seen = vec![false; polys.len()];
        for (w, c) in coefficients {
            if w.len() != depth || !spec.is_admissible(&w) {
                return Err(Error::UnexpectedWord(spec.format_word(&w)));
            }
            if c.len() > MAX_DEGREE + 1 {
                return Err(Error::DegreeTooHigh(c.len() - 1));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(spec.format_word(&w)));
            }
            let i = code(w.indices(), a);
            if seen[i] {
                return Err(Error::UnexpectedWord(spec.format_word(&w)));
            }
            seen[i] = true;
            polys[i] = Polynomial::new(c);
        }
        for w in spec.enumerate_indices(depth) {
            if !seen[code(&w, a)] {
                return Err(Error::MissingWord(spec.format_word(&Word::from_indices(w))));
            }
        }

        let joint_depth = depth.max(f.depth());
        let words = spec.enumerate_indices(joint_depth);
        let poly_of = |w: &[u8]| &polys[code(&w[..depth], a)];
        let sup_norm = words.iter().map(|w| poly_of(w).max_abs(0.0, f.eval_indices(w))).fold(0.0, f64::max);
        let tilde = LocallyConstantFunction::from_fn(spec, joint_depth, |w| poly_of(w).integral(0.0, f.eval_indices(w)))?;

        let theta = spec.theta();
        let mut condition_constant = 0.0f64;
        for (i, x) in words.iter().enumerate() {
            for y in &words[i + 1..] {
                let (px, py) = (poly_of(x), poly_of(y));
                if px == py {
                    continue;
                }
                let m = common_prefix(x, y);
                let upper = f.eval_indices(x).min(f.eval_indices(y));
                let gap = (px - py).abs_integral(0.0, upper);
                condition_constant = condition_constant.max(gap / theta.powi(m as i32));
            }
        }

        Ok(FlowObservable {
            spec: spec.clone(),
            depth,
            polys,
            joint_depth,
            sup_norm,
            condition_constant,
            tilde,
        })
    }

    /// An observable depending on the base point only: `F(x, s) = g(x)`.
    pub fn from_base_function(f: &RoofFunction, g: &LocallyConstantFunction) -> Result<Self> {
        let spec = g.spec().clone();
        Self::build(&spec, f, g.depth(), g.table().map(|(w, v)| (w, vec![v])))
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn joint_depth(&self) -> usize {
        self.joint_depth
    }

    /// `‖F‖ = sup_x sup_{0 <= s <= f(x)} |F(x, s)|`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Least `C` with `∫_0^{min(f(x),f(y))} |F(x,s) - F(y,s)| ds <= C d_θ(x, y)`.
    pub fn condition_constant(&self) -> f64 {
        self.condition_constant
    }

    /// `F̃(x) = ∫_0^{f(x)} F(x, s) ds`.
    pub fn tilde(&self) -> &LocallyConstantFunction {
        &self.tilde
    }

    #[inline]
    pub(crate) fn poly_indices(&self, w: &[u8]) -> &Polynomial {
        &self.polys[code(&w[..self.depth], self.spec.alphabet_size())]
    }

    pub fn poly(&self, w: &Word) -> Result<&Polynomial> {
        if w.len() < self.depth {
            return Err(Error::WordTooShort { needed: self.depth, have: w.len() });
        }
        Ok(self.poly_indices(w.indices()))
    }

    pub fn eval(&self, p: &FlowPoint) -> Result<f64> {
        Ok(self.poly(&p.base)?.eval(p.level))
    }

    /// `∫_0^u F(Φ^s(x, 0)) ds` as `S_m F̃(x) + ∫_0^r F(σ^m x, s) ds`.
    pub(crate) fn integral_from_base(&self, f: &RoofFunction, w: &[u8], u: f64) -> Result<f64> {
        let (m, partial) = lap_decomposition(f, w, u)?;
        if m + self.joint_depth > w.len() {
            return Err(Error::WordTooShort { needed: m + self.joint_depth, have: w.len() });
        }
        let laps = self.tilde.birkhoff_sum_indices(w, m);
        Ok(laps + self.poly_indices(&w[m..]).integral(0.0, u - partial))
    }
}

/// `∫_0^t F(Φ^s p) ds`, exact.
pub fn flow_birkhoff(obs: &FlowObservable, f: &RoofFunction, p: &FlowPoint, t: f64) -> Result<f64> {
    check_time(t)?;
    let w = p.base.indices();
    let whole = obs.integral_from_base(f, w, p.level + t)?;
    Ok(whole - obs.poly_indices(w).integral(0.0, p.level))
}

/// `∫ F dν = ∫ F̃ dμ / ∫ f dμ`.
pub fn nu_integral(mu: &GibbsMarkovMeasure, f: &RoofFunction, obs: &FlowObservable) -> f64 {
    mu.integrate(obs.tilde()) / f.mean_under(mu)
}

/// Draws `(x, l)` from ν by rejection: `x ~ μ` truncated to `word_len`,
/// `l ~ U[0, ‖f‖)`, accepted when `l < f(x)`.
pub fn sample_nu<R: Rng + ?Sized>(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    word_len: usize,
    rng: &mut R,
) -> Result<FlowPoint> {
    if word_len < f.depth().max(mu.state_len()) {
        return Err(Error::WordTooShort { needed: f.depth().max(mu.state_len()), have: word_len });
    }
    Ok(sample_nu_indices(mu, f, word_len, rng).0)
}

/// As [`sample_nu`], also reporting the number of proposals used.
pub(crate) fn sample_nu_indices<R: Rng + ?Sized>(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    word_len: usize,
    rng: &mut R,
) -> (FlowPoint, usize) {
    let top = f.sup_norm();
    let mut tries = 0;
    loop {
        tries += 1;
        let w = mu.sample_indices(word_len, rng);
        let level = rng.gen::<f64>() * top;
        if level < f.eval_indices(&w) {
            return (FlowPoint { base: Word::from_indices(w), level }, tries);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full2() -> SftSpec {
        SftSpec::full_shift(2, 0.5).unwrap()
    }

    fn step_roof(spec: &SftSpec, a: f64, b: f64) -> RoofFunction {
        RoofFunction::new(LocallyConstantFunction::from_symbol_values(spec, &[a, b]).unwrap()).unwrap()
    }

    #[test]
    fn roof_must_be_at_least_one() {
        let spec = full2();
        assert_eq!(
            RoofFunction::new(LocallyConstantFunction::from_symbol_values(&spec, &[0.5, 2.0]).unwrap()),
            Err(Error::RoofBelowOne(0.5))
        );
    }

    #[test]
    fn flow_step_examples() {
        let spec = full2();
        let unit = RoofFunction::constant(&spec, 1.0).unwrap();
        let x = spec.parse_word("12211").unwrap();
        let out = flow_step(&unit, &FlowPoint::on_base(x.clone()), 1.0).unwrap();
        assert_eq!(out.point, FlowPoint { base: x.shift(1), level: 0.0 });
        assert_eq!(out.laps, 1);

        let f = step_roof(&spec, 1.0, 1.5);
        let p = FlowPoint::new(&f, x.clone(), 0.5).unwrap();
        assert_eq!(flow_step(&f, &p, 0.0).unwrap().point, p);
        // s + t = 2.7; S_2 f = 2.5 <= 2.7 < S_3 f = 4.0.
        let out = flow_step(&f, &p, 2.2).unwrap();
        assert_eq!(out.laps, 2);
        assert_eq!(out.point.base, x.shift(2));
        assert!((out.residual - 0.2).abs() < 1e-12);

        // Ties go to the next lap.
        let out = flow_step(&f, &FlowPoint::on_base(x.clone()), 2.5).unwrap();
        assert_eq!((out.laps, out.residual), (2, 0.0));

        assert!(matches!(flow_step(&f, &p, 100.0), Err(Error::WordTooShort { .. })));
        assert!(matches!(flow_step(&f, &p, -1.0), Err(Error::BadTime(_))));
        assert!(FlowPoint::new(&f, x, 1.0).is_err());
    }

    #[test]
    fn semigroup_on_random_cases() {
        let spec = SftSpec::golden_mean(0.5).unwrap();
        let f = RoofFunction::new(
            LocallyConstantFunction::from_fn(&spec, 2, |w| 1.0 + 0.3 * w[0] as f64 + 0.55 * w[1] as f64).unwrap(),
        )
        .unwrap();
        let mu = GibbsMarkovMeasure::new(&LocallyConstantFunction::constant(&spec, 0.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = sample_nu(&mu, &f, 40, &mut rng).unwrap();
            let t1 = rng.gen::<f64>() * 12.0;
            let t2 = rng.gen::<f64>() * 12.0;
            assert!(semigroup_check(&f, &p, t1, t2).unwrap());
        }
        let unit = RoofFunction::constant(&spec, 1.0).unwrap();
        let x = FlowPoint::on_base(spec.parse_word("1211212").unwrap());
        for (t1, t2) in [(0.0, 3.0), (2.0, 3.0), (1.0, 1.0)] {
            let direct = flow_step(&unit, &x, t1 + t2).unwrap();
            let composed = flow_step(&unit, &flow_step(&unit, &x, t1).unwrap().point, t2).unwrap();
            assert_eq!(direct.point, composed.point);
        }
    }

    #[test]
    fn observable_examples() {
        let spec = full2();
        let f = step_roof(&spec, 1.0, 1.5);
        let one = FlowObservable::build(&spec, &f, 1, spec.enumerate_words(1).into_iter().map(|w| (w, vec![1.0])))
            .unwrap();
        assert_eq!(one.sup_norm(), 1.0);
        assert_eq!(one.condition_constant(), 0.0);
        assert_eq!(one.tilde(), f.base());

        let two = RoofFunction::constant(&spec, 2.0).unwrap();
        let ramp = FlowObservable::build(&spec, &two, 1, spec.enumerate_words(1).into_iter().map(|w| (w, vec![0.0, 1.0])))
            .unwrap();
        assert_eq!(ramp.sup_norm(), 2.0);
        assert_eq!(ramp.condition_constant(), 0.0);
        for (_, v) in ramp.tilde().table() {
            assert!((v - 2.0).abs() < 1e-15);
        }

        let unit = RoofFunction::constant(&spec, 1.0).unwrap();
        let step = FlowObservable::build(
            &spec,
            &unit,
            1,
            vec![(spec.parse_word("1").unwrap(), vec![1.0]), (spec.parse_word("2").unwrap(), vec![0.0])],
        )
        .unwrap();
        assert_eq!(step.condition_constant(), 1.0);
        let vals: Vec<f64> = step.tilde().table().map(|e| e.1).collect();
        assert_eq!(vals, [1.0, 0.0]);
    }

    #[test]
    fn observable_errors() {
        let spec = full2();
        let f = RoofFunction::constant(&spec, 1.0).unwrap();
        let high = FlowObservable::build(&spec, &f, 1, spec.enumerate_words(1).into_iter().map(|w| (w, vec![1.0; 10])));
        assert!(matches!(high, Err(Error::DegreeTooHigh(9))));
        let missing = FlowObservable::build(&spec, &f, 1, vec![(spec.parse_word("1").unwrap(), vec![1.0])]);
        assert!(matches!(missing, Err(Error::MissingWord(_))));
    }

    #[test]
    fn flow_birkhoff_examples() {
        let spec = full2();
        let f = step_roof(&spec, 1.0, 1.5);
        let c = FlowObservable::from_base_function(&f, &LocallyConstantFunction::constant(&spec, 0.75).unwrap()).unwrap();
        let x = spec.parse_word("1221121211").unwrap();
        let p = FlowPoint::new(&f, x.clone(), 0.3).unwrap();
        assert!((flow_birkhoff(&c, &f, &p, 4.2).unwrap() - 0.75 * 4.2).abs() < 1e-12);

        let unit = RoofFunction::constant(&spec, 1.0).unwrap();
        let g = LocallyConstantFunction::from_symbol_values(&spec, &[2.0, -1.0]).unwrap();
        let obs = FlowObservable::from_base_function(&unit, &g).unwrap();
        let v = flow_birkhoff(&obs, &unit, &FlowPoint::on_base(x.clone()), 6.0).unwrap();
        assert!((v - g.birkhoff_sum(&x, 6).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn nu_integral_examples() {
        let spec = SftSpec::golden_mean(0.5).unwrap();
        let phi = LocallyConstantFunction::from_fn(&spec, 2, |w| 0.2 * w[0] as f64 - 0.4 * w[1] as f64).unwrap();
        let mu = GibbsMarkovMeasure::new(&phi).unwrap();
        let f = RoofFunction::new(LocallyConstantFunction::from_symbol_values(&spec, &[1.0, 2.5]).unwrap()).unwrap();
        let c = FlowObservable::from_base_function(&f, &LocallyConstantFunction::constant(&spec, 3.0).unwrap()).unwrap();
        assert!((nu_integral(&mu, &f, &c) - 3.0).abs() < 1e-12);

        let two = RoofFunction::constant(&spec, 2.0).unwrap();
        let ramp = FlowObservable::build(&spec, &two, 1, spec.enumerate_words(1).into_iter().map(|w| (w, vec![0.0, 1.0])))
            .unwrap();
        assert!((nu_integral(&mu, &two, &ramp) - 1.0).abs() < 1e-12);

        let uniform =
            GibbsMarkovMeasure::new(&LocallyConstantFunction::constant(&full2(), 0.0).unwrap()).unwrap();
        let unit = RoofFunction::constant(&full2(), 1.0).unwrap();
        let g = LocallyConstantFunction::from_symbol_values(&full2(), &[0.25, 4.0]).unwrap();
        let obs = FlowObservable::from_base_function(&unit, &g).unwrap();
        assert!((nu_integral(&uniform, &unit, &obs) - uniform.integrate(&g)).abs() < 1e-12);
    }

    #[test]
    fn sample_nu_behaviour() {
        let spec = full2();
        let mu = GibbsMarkovMeasure::new(&LocallyConstantFunction::constant(&spec, 0.0).unwrap()).unwrap();
        let flat = RoofFunction::constant(&spec, 1.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            assert_eq!(sample_nu_indices(&mu, &flat, 4, &mut rng).1, 1);
        }
        let f = step_roof(&spec, 1.0, 1.5);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(sample_nu(&mu, &f, 10, &mut a).unwrap(), sample_nu(&mu, &f, 10, &mut b).unwrap());
    }
}
