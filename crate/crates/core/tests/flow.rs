use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermoflow_core::suspension::{flow_birkhoff, flow_step, sample_nu, semigroup_check};
use thermoflow_core::{FlowObservable, FlowPoint, GibbsMarkovMeasure, LocallyConstantFunction, RoofFunction, SftSpec, Word};

fn golden_setup() -> (SftSpec, GibbsMarkovMeasure, RoofFunction) {
    let spec = SftSpec::golden_mean(0.5).unwrap();
    let phi = LocallyConstantFunction::from_fn(&spec, 2, |w| 0.2 * w[0] as f64 - 0.35 * w[1] as f64).unwrap();
    let mu = GibbsMarkovMeasure::new(&phi).unwrap();
    let f = RoofFunction::new(LocallyConstantFunction::from_symbol_values(&spec, &[1.0, 1.6]).unwrap()).unwrap();
    (spec, mu, f)
}

/// Pushes binned ν-mass forward by `t` cell by cell and compares it with the
/// ν-mass of each target bin.
#[test]
fn nu_is_invariant_on_cylinder_level_bins() {
    let (spec, mu, f) = golden_setup();
    let (n, t, width) = (8usize, 0.7, 0.1);
    let mean = f.mean_under(&mu);
    let bins = (f.sup_norm() / width).ceil() as usize;
    let mut pushed: HashMap<(Vec<u8>, usize), f64> = HashMap::new();
    let add = |map: &mut HashMap<(Vec<u8>, usize), f64>, base: &[u8], lo: f64, hi: f64, density: f64| {
        for b in 0..bins {
            let overlap = (hi.min((b + 1) as f64 * width) - lo.max(b as f64 * width)).max(0.0);
            if overlap > 0.0 {
                *map.entry((base[..n].to_vec(), b)).or_default() += overlap * density;
            }
        }
    };
    for w in spec.enumerate_words(n + 1) {
        let roof = f.base().value(&w).unwrap();
        let density = mu.cylinder_measure_marginal(&w) / mean;
        let split = roof - t;
        for (lo, hi) in [(0.0, split), (split, roof)] {
            let p = FlowPoint::new(&f, w.clone(), 0.5 * (lo + hi)).unwrap();
            let image = flow_step(&f, &p, t).unwrap();
            let shift = image.point.level - p.level;
            add(&mut pushed, image.point.base.indices(), lo + shift, hi + shift, density);
        }
    }
    let mut worst = 0.0f64;
    for v in spec.enumerate_words(n) {
        let roof = f.base().value(&v.prefix(1)).unwrap();
        let m = mu.cylinder_measure_marginal(&v) / mean;
        for b in 0..bins {
            let expected = ((b + 1) as f64 * width).min(roof) - (b as f64 * width).min(roof);
            let got = pushed.get(&(v.indices().to_vec(), b)).copied().unwrap_or(0.0);
            worst = worst.max((got - expected * m).abs());
        }
    }
    assert!(worst < 1e-3, "largest bin discrepancy {worst}");
}

#[test]
fn semigroup_holds_on_random_points() {
    let (_, mu, f) = golden_setup();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..1000 {
        let p = sample_nu(&mu, &f, 48, &mut rng).unwrap();
        let (t1, t2) = (rng.gen::<f64>() * 15.0, rng.gen::<f64>() * 15.0);
        assert!(semigroup_check(&f, &p, t1, t2).unwrap());
    }
}

/// Composite Simpson rule over each lap, with step at most `h`.
fn quadrature(obs: &FlowObservable, f: &RoofFunction, w: &Word, level: f64, t: f64, h: f64) -> f64 {
    let mut total = 0.0;
    let mut m = 0;
    let mut start = level;
    let mut remaining = t;
    while remaining > 0.0 {
        let tail = w.shift(m);
        let roof = f.base().value(&tail).unwrap();
        let end = roof.min(start + remaining);
        let poly = obs.poly(&tail).unwrap();
        let pieces = (((end - start) / h).ceil() as usize).max(1);
        let pieces = pieces + pieces % 2;
        let step = (end - start) / pieces as f64;
        let mut s = poly.eval(start) + poly.eval(end);
        for i in 1..pieces {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * poly.eval(start + i as f64 * step);
        }
        total += s * step / 3.0;
        remaining -= end - start;
        start = 0.0;
        m += 1;
    }
    total
}

#[test]
fn flow_birkhoff_matches_quadrature() {
    let spec = SftSpec::full_shift(2, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let f = RoofFunction::new(
            LocallyConstantFunction::from_fn(&spec, 2, |_| 1.0 + 1.5 * rng.gen::<f64>()).unwrap(),
        )
        .unwrap();
        let depth = 1 + case % 2;
        let degree = case % 6;
        let coefficients: Vec<_> = spec
            .enumerate_words(depth)
            .into_iter()
            .map(|w| (w, (0..=degree).map(|_| rng.gen_range(-2.0..2.0)).collect()))
            .collect();
        let obs = FlowObservable::build(&spec, &f, depth, coefficients).unwrap();
        let w = Word::from_indices((0..30).map(|_| rng.gen_range(0..2u8)).collect());
        let roof0 = f.base().value(&w).unwrap();
        let level = if case % 3 == 0 { 0.0 } else { rng.gen::<f64>() * roof0 };
        let t = rng.gen::<f64>() * 8.0;
        let p = FlowPoint::new(&f, w.clone(), level).unwrap();
        let exact = flow_birkhoff(&obs, &f, &p, t).unwrap();
        let approx = quadrature(&obs, &f, &w, level, t, 1e-4);
        assert!((exact - approx).abs() < 1e-6, "case {case}: {exact} vs {approx}");
    }
}

fn arb_observable() -> impl Strategy<Value = (Vec<f64>, usize, Vec<Vec<f64>>)> {
    (1usize..=2, 1usize..=2, 0usize..=3).prop_flat_map(|(roof_depth, depth, degree)| {
        (
            prop::collection::vec(1.0f64..3.0, 1 << roof_depth),
            Just(depth),
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, degree + 1), 1 << depth),
        )
    })
}

proptest! {
    #[test]
    fn integrated_seminorm_is_controlled((roof, depth, coeffs) in arb_observable(), theta in 0.2f64..0.8) {
        let spec = SftSpec::full_shift(2, theta).unwrap();
        let roof_depth = roof.len().trailing_zeros() as usize;
        let f = RoofFunction::new(
            LocallyConstantFunction::from_table(&spec, roof_depth, spec.enumerate_words(roof_depth).into_iter().zip(roof)).unwrap(),
        )
        .unwrap();
        let obs = FlowObservable::build(&spec, &f, depth, spec.enumerate_words(depth).into_iter().zip(coeffs)).unwrap();
        let lhs = obs.tilde().seminorm();
        let rhs = f.seminorm() * obs.sup_norm() + obs.condition_constant();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "{} > {}", lhs, rhs);
    }
}
