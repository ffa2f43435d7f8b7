use proptest::prelude::*;
use thermoflow_core::deviations::{empirical_z_exact, ld_bound, ld_constants, LevelMode, DEFAULT_BUDGET};
use thermoflow_core::{FlowObservable, GibbsMarkovMeasure, LocallyConstantFunction, RoofFunction, SftSpec};

fn setup(f2: f64, g: [f64; 2]) -> (GibbsMarkovMeasure, RoofFunction, FlowObservable) {
    let spec = SftSpec::full_shift(2, 0.5).unwrap();
    let mu = GibbsMarkovMeasure::new(&LocallyConstantFunction::constant(&spec, 0.0).unwrap()).unwrap();
    let f = RoofFunction::new(LocallyConstantFunction::from_symbol_values(&spec, &[1.0, f2]).unwrap()).unwrap();
    let obs = FlowObservable::from_base_function(&f, &LocallyConstantFunction::from_symbol_values(&spec, &g).unwrap())
        .unwrap();
    (mu, f, obs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_z_is_nonincreasing_in_epsilon(f2 in 1.0f64..2.0, g1 in -1.0f64..1.0, t in 2.0f64..9.0) {
        let (mu, f, obs) = setup(f2, [0.0, g1]);
        for mode in [LevelMode::Zero, LevelMode::Nu] {
            let mut previous = f64::INFINITY;
            for i in 1..=12 {
                let z = empirical_z_exact(&mu, &f, &obs, 0.05 * i as f64, t, mode, DEFAULT_BUDGET).unwrap();
                prop_assert!(z.at_least <= previous);
                prop_assert!(z.exceeding <= z.at_least);
                previous = z.at_least;
            }
        }
    }

    #[test]
    fn level_nu_is_dominated_by_level_zero(f2 in 1.0f64..2.0, g1 in -1.0f64..1.0, t in 2.0f64..9.0, eps in 0.05f64..0.6) {
        let (mu, f, obs) = setup(f2, [0.0, g1]);
        let z0 = empirical_z_exact(&mu, &f, &obs, eps, t, LevelMode::Zero, DEFAULT_BUDGET).unwrap();
        let znu = empirical_z_exact(&mu, &f, &obs, eps, t, LevelMode::Nu, DEFAULT_BUDGET).unwrap();
        let factor = f.sup_norm() / f.mean_under(&mu);
        prop_assert!(znu.at_least <= factor * z0.at_least + 1e-12, "{} > {} * {}", znu.at_least, factor, z0.at_least);
    }
}

#[test]
fn bound_dominates_exact_mass_past_threshold() {
    let (mu, f, obs) = setup(1.25, [0.0, 1.0]);
    let c = ld_constants(&f, &obs, 0.5, 0.1).unwrap();
    assert!(c.t0 < 20.0);
    let mut t = c.t0;
    while t <= 20.0 {
        let z = empirical_z_exact(&mu, &f, &obs, 0.5, t, LevelMode::Zero, DEFAULT_BUDGET).unwrap();
        let b = ld_bound(&c, t).unwrap();
        assert!(z.at_least <= b.single && z.at_least <= b.two_term, "t = {t}");
        assert!((b.log_single - (-c.x * t + t.ln() + c.y)).abs() < 1e-12);
        t += 1.5;
    }
}
