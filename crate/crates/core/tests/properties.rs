use hardy_core::greens::{build_greens, solve_ode_system, GreensSeries};
use hardy_core::grid::GridMetadata;
use hardy_core::identities::{relative_spread, wronskian_of_components, ComponentSet};
use hardy_core::specfun::{hyp2f1, log_gamma};
use hardy_core::symbol::{mode_constants, theta, ModeSymbol};
use hardy_core::{Complex64, CylinderParams, GridFunction, ModeIndex};
use proptest::prelude::*;
use std::sync::OnceLock;

fn series() -> &'static GreensSeries {
    static SERIES: OnceLock<GreensSeries> = OnceLock::new();
    SERIES.get_or_init(|| build_greens(&CylinderParams::new(3, 0.5, None, 0.2).unwrap(), ModeIndex::RADIAL, 8).unwrap())
}

fn unstable_series() -> &'static GreensSeries {
    static SERIES: OnceLock<GreensSeries> = OnceLock::new();
    SERIES.get_or_init(|| build_greens(&CylinderParams::new(4, 0.4, None, 1.5).unwrap(), ModeIndex::RADIAL, 8).unwrap())
}

fn bump(a: f64, c: f64, s: f64) -> GridFunction {
    GridFunction::from_fn(-10.0, 10.0, 1.0 / 16.0, |t| a * (-((t - c) / s).powi(2)).exp()).unwrap()
}

fn params() -> impl Strategy<Value = CylinderParams> {
    (2u32..=7, 0.05f64..0.95, 0.0f64..0.5).prop_map(|(n, g, k)| CylinderParams::new(n, g, None, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_is_even(p in params(), l in 0u32..6, x in -30.0f64..30.0, y in -0.5f64..0.5) {
        let z = Complex64::new(x, y);
        let a = theta(&p, ModeIndex::new(l), z).unwrap();
        let b = theta(&p, ModeIndex::new(l), -z).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn symbol_is_real_and_positive_on_the_axis(p in params(), l in 0u32..6, xi in -200.0f64..200.0) {
        let s = ModeSymbol::new(&p, ModeIndex::new(l));
        let v = theta(&p, ModeIndex::new(l), Complex64::new(xi, 0.0)).unwrap();
        prop_assert!(v.re > 0.0 && v.im.abs() <= 1e-12 * v.re);
        let ratio = s.real_value(xi) / Complex64::new(f64::from(l), xi).norm().max(1.0).powf(2.0 * p.gamma);
        prop_assert!(ratio > 0.05 && ratio < 20.0, "ratio {}", ratio);
    }

    #[test]
    fn mode_constants_differ_by_gamma(p in params(), l in 0u32..50) {
        let (a, b) = mode_constants(&p, ModeIndex::new(l));
        prop_assert!((a - b - p.gamma).abs() < 1e-14);
        prop_assert!(b > 0.0);
    }

    #[test]
    fn log_gamma_recurrence(x in 0.1f64..30.0, y in -30.0f64..30.0) {
        let z = Complex64::new(x, y);
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        let d = lhs - rhs;
        // equal modulo 2 pi i
        let k = (d.im / (2.0 * std::f64::consts::PI)).round();
        prop_assert!(d.re.abs() < 1e-12 * lhs.norm().max(1.0));
        prop_assert!((d.im - 2.0 * std::f64::consts::PI * k).abs() < 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn hyp2f1_is_symmetric(a in -2.0f64..3.0, b in -2.0f64..3.0, c in 0.5f64..4.0, x in 0.0f64..0.9) {
        let u = hyp2f1(a, b, c, x).unwrap();
        let v = hyp2f1(b, a, c, x).unwrap();
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
    }

    #[test]
    fn solver_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let g = series();
        let (h1, h2) = (bump(1.0, c1, 0.8), bump(1.0, c2, 1.1));
        let mix = h1.with_real(&h1.real().iter().zip(h2.real()).map(|(x, y)| a * x + b * y).collect::<Vec<_>>()).unwrap();
        let (w1, w2, w) = (solve_ode_system(g, &h1).unwrap(), solve_ode_system(g, &h2).unwrap(), solve_ode_system(g, &mix).unwrap());
        for i in 0..w.len() {
            let expected = a * w1.real()[i] + b * w2.real()[i];
            prop_assert!((w.real()[i] - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn wronskian_is_bilinear_and_antisymmetric(alpha in -3.0f64..3.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, unstable in any::<bool>()) {
        let g = if unstable { unstable_series() } else { series() };
        let a = ComponentSet::from_source(g, &bump(1.0, c1, 0.9));
        let b = ComponentSet::from_source(g, &bump(0.7, c2, 1.2));
        let ab = wronskian_of_components(&a, &b).unwrap();
        let ba = wronskian_of_components(&b, &a).unwrap();
        let scaled = wronskian_of_components(&a.scaled(alpha), &b).unwrap();
        let scale = ab.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        for i in 0..ab.len() {
            prop_assert!((ab[i] + ba[i]).abs() <= 1e-14 * scale);
            prop_assert!((scaled[i] - alpha * ab[i]).abs() <= 1e-13 * scale * alpha.abs().max(1.0));
        }
    }

    #[test]
    fn csv_and_json_round_trip(values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40), t_min in -50.0f64..50.0, step in 1e-3f64..1.0) {
        let samples = values.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let g = GridFunction::new(t_min, step, samples).unwrap();
        let back = GridFunction::from_csv_str(&g.to_csv_string()).unwrap();
        prop_assert_eq!(back.samples(), g.samples());
        // a single row carries no step
        if g.len() > 1 {
            prop_assert!(back.same_grid(&g));
        }
        let (json, _) = GridFunction::from_json(&g.to_json(GridMetadata::default()).unwrap()).unwrap();
        prop_assert_eq!(json, g);
    }

    #[test]
    fn spread_is_a_bounded_symmetric_measure(x in prop::collection::vec(0.1f64..10.0, 3)) {
        let s = relative_spread(&x);
        let mut r = x.clone();
        r.reverse();
        prop_assert!((0.0..1.0).contains(&s));
        prop_assert_eq!(s, relative_spread(&r));
        let scaled: Vec<f64> = x.iter().map(|v| 7.0 * v).collect();
        prop_assert!((relative_spread(&scaled) - s).abs() < 1e-14);
    }
}
