use gabench::grunge::*;
use gabench::{Bounds, GrungeLandscape, MinimaCatalog, Objective};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Compensated (Neumaier) sum of the Gaussian terms, as an independent
/// reference for the plain accumulation in the library.
fn reference_value(l: &GrungeLandscape, x: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 0..l.gaussian_count() {
        let r2: f64 = x.iter().zip(l.center(i)).map(|(a, b)| (a - b).powi(2)).sum();
        let t = l.weights()[i] * (-l.widths()[i] * r2).exp();
        let s = sum + t;
        comp += if sum.abs() >= t.abs() {
            (sum - s) + t
        } else {
            (t - s) + sum
        };
        sum = s;
    }
    sum + comp
}

fn tiny(m: usize, n: usize, seed: u64) -> GrungeLandscape {
    generate(m, n, seed, &GenerateOptions::default()).unwrap()
}

#[test]
fn value_matches_compensated_sum() {
    let l = tiny(6, 500, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = l.bounds.sample_point(6, &mut rng);
        let (a, b) = (l.value(&x).unwrap(), reference_value(&l, &x));
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn gradient_matches_central_differences() {
    let l = tiny(4, 60, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let x = l.bounds.sample_point(4, &mut rng);
        let g = l.gradient(&x).unwrap();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut err = 0.0f64;
        for j in 0..4 {
            let h = 1e-6;
            let mut p = x.clone();
            p[j] += h;
            let up = l.value(&p).unwrap();
            p[j] -= 2.0 * h;
            let fd = (up - l.value(&p).unwrap()) / (2.0 * h);
            err += (fd - g[j]).powi(2);
        }
        assert!(err.sqrt() <= 1e-5 * norm.max(1e-2));
    }
}

#[test]
fn wrong_dimension_is_rejected() {
    let l = tiny(3, 5, 0);
    assert!(l.value(&[1.0, 2.0]).is_err());
    assert!(l.gradient(&[1.0; 4]).is_err());
}

#[test]
fn text_round_trip_is_exact() {
    let l = tiny(5, 40, 9);
    let back: GrungeLandscape = l.to_text().parse().unwrap();
    assert_eq!(back, l);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.txt");
    l.save(&path).unwrap();
    assert_eq!(GrungeLandscape::load(&path).unwrap(), l);
}

#[test]
fn malformed_landscapes_are_parse_errors() {
    let good = tiny(2, 3, 1).to_text();
    let cases = [
        String::new(),
        good.replacen("GRUNGE 1", "GRUNGE 9", 1),
        good.replacen("2 3", "2 4", 1),
        good.lines().take(3).collect::<Vec<_>>().join("\n"),
        good.replacen("BOUNDS 0 10", "BOUNDS 10 0", 1),
        good.replace('\n', " x\n"),
    ];
    for text in cases {
        assert!(text.parse::<GrungeLandscape>().is_err(), "accepted:\n{text}");
    }
}

#[test]
fn catalog_round_trip_and_order_check() {
    let l = tiny(2, 8, 4);
    let cat = enumerate(&l, &EnumerateOptions::new(12, 1e-4)).unwrap();
    assert!(!cat.entries.is_empty());
    let back: MinimaCatalog = cat.to_text().parse().unwrap();
    assert_eq!(back.entries, cat.entries);
    if cat.entries.len() >= 2 {
        let mut swapped = cat.clone();
        swapped.entries.swap(0, 1);
        assert!(swapped.to_text().parse::<MinimaCatalog>().is_err());
    }
    assert!("MINIMA 2\n-1 0 0 1\n".parse::<MinimaCatalog>().is_err());
}

#[test]
fn catalog_entries_are_stationary_minima_above_the_weight_sum() {
    let l = tiny(2, 20, 7);
    let cat = enumerate(&l, &EnumerateOptions::new(40, 1e-4)).unwrap();
    let floor: f64 = l.weights().iter().sum();
    for e in &cat.entries {
        let g = l.gradient(&e.location).unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-6);
        assert!(e.value >= floor);
        assert!(e.location.iter().all(|&v| v.is_finite()));
    }
    for w in cat.entries.windows(2) {
        assert!(w[0].value <= w[1].value);
        let d: f64 = w[0]
            .location
            .iter()
            .zip(&w[1].location)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        assert!(d.sqrt() > 1e-4);
    }
}

fn value_set(c: &MinimaCatalog) -> Vec<f64> {
    c.entries.iter().map(|e| e.value).collect()
}

#[test]
fn doubling_the_grid_keeps_the_minima() {
    for seed in [1, 2, 3] {
        let l = tiny(2, 20, seed);
        let a = enumerate(&l, &EnumerateOptions::new(50, 1e-4)).unwrap();
        let b = enumerate(&l, &EnumerateOptions::new(100, 1e-4)).unwrap();
        let (va, vb) = (value_set(&a), value_set(&b));
        assert_eq!(va.len(), vb.len(), "seed {seed}: {va:?} vs {vb:?}");
        for (x, y) in va.iter().zip(&vb) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let l = tiny(3, 15, 5);
    let o = EnumerateOptions::new(8, 1e-4);
    assert_eq!(enumerate(&l, &o).unwrap(), enumerate(&l, &o).unwrap());
    let m = multistart(&l, 300, 4, &o).unwrap();
    assert_eq!(m, multistart(&l, 300, 4, &o).unwrap());
}

#[test]
fn oversized_grid_is_refused() {
    let l = tiny(10, 3, 0);
    assert!(matches!(
        enumerate(&l, &EnumerateOptions::new(10, 1e-4)),
        Err(gabench::Error::GridTooLarge { .. })
    ));
    assert!(enumerate(&l, &EnumerateOptions::new(1, 1e-4)).is_err());
}

#[test]
fn grid_nodes_cover_the_box_edges() {
    let b = Bounds::new(0.0, 10.0).unwrap();
    assert_eq!(grid_node(0, 3, 2, b), vec![0.0, 0.0]);
    assert_eq!(grid_node(8, 3, 2, b), vec![10.0, 10.0]);
    assert_eq!(grid_node(5, 3, 2, b), vec![5.0, 10.0]);
}

#[test]
fn landscape_objective_has_no_target_until_given_one() {
    let l = std::sync::Arc::new(tiny(2, 5, 0));
    let spec =
        gabench::FunctionSpec::new(gabench::FunctionKind::Grunge(l.clone()), 2).unwrap();
    assert!(spec.require_target().is_err());
    assert_eq!(spec.name, "GRUNGE[2,5]");
    assert_eq!(spec.value(&[1.0, 2.0]), l.value(&[1.0, 2.0]).unwrap());
    assert!(gabench::FunctionSpec::new(gabench::FunctionKind::Grunge(l), 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_is_never_below_the_sum_of_wells(
        seed in any::<u64>(),
        x in prop::collection::vec(-5.0f64..15.0, 3),
    ) {
        let l = tiny(3, 30, seed);
        let floor: f64 = l.weights().iter().sum();
        let v = l.value(&x).unwrap();
        prop_assert!(v >= floor && v <= 0.0);
    }

    #[test]
    fn scaling_weights_scales_values(seed in any::<u64>(), k in 0.1f64..10.0) {
        let l = tiny(2, 10, seed);
        let s = l.scaled(k);
        let x = [3.3, 7.1];
        let (a, b) = (l.value(&x).unwrap() * k, s.value(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn generation_is_a_pure_function_of_its_seed(seed in any::<u64>()) {
        let o = GenerateOptions::default();
        prop_assert_eq!(generate(3, 7, seed, &o).unwrap(), generate(3, 7, seed, &o).unwrap());
    }
}
