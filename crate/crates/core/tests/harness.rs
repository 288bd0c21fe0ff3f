use gabench::ga::{CrossoverKind, NichingSettings, RunOptions};
use gabench::harness::*;
use gabench::lookup_function;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn record(dim: usize, seed: u64, steps: u64, success: bool) -> RunRecord {
    RunRecord {
        function: "ackley".into(),
        dim,
        algorithm: CrossoverKind::Portugal(3),
        locopt: true,
        niching: None,
        seed,
        steps,
        success,
        best_value: 1.0 / 3.0,
        wall_ms: 12,
    }
}

const DIMS: [usize; 6] = [5, 10, 25, 50, 100, 200];

#[test]
fn noiseless_power_laws_are_recovered_exactly() {
    for b in [0.5, 1.0, 1.28, 2.0, 3.5] {
        let pts: Vec<(usize, f64)> = DIMS.iter().map(|&d| (d, 7.5 * (d as f64).powf(b))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - b).abs() < 1e-9, "{b}: {}", fit.exponent);
        assert!((fit.prefactor - 7.5).abs() < 1e-7);
        assert!(fit.residual < 1e-9);
        assert_eq!(fit.dim_range, (5, 200));
    }
}

#[test]
fn noisy_power_laws_stay_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for b in [0.5, 1.0, 1.28, 2.0, 3.5] {
        let pts: Vec<(usize, f64)> = DIMS
            .iter()
            .map(|&d| (d, 40.0 * (d as f64).powf(b) * (1.0 + rng.random_range(-0.1..0.1))))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - b).abs() < 0.05, "{b}: {}", fit.exponent);
    }
}

#[test]
fn fits_need_two_distinct_dimensions() {
    assert!(fit_power_law(&[(10, 5.0)]).is_err());
    assert!(fit_power_law(&[(10, 5.0), (10, 6.0)]).is_err());
    assert!(fit_power_law(&[(10, 5.0), (20, 0.0), (30, f64::NAN)]).is_err());
}

#[test]
fn records_round_trip_through_csv() {
    let mut recs: Vec<RunRecord> = (0..5).map(|i| record(10 + i, i as u64, 100 * i as u64, i % 2 == 0)).collect();
    recs[1].niching = Some(NichingSettings::new(10, 100));
    recs[2].niching = Some(NichingSettings { replace: false, ..NichingSettings::new(3, 7) });
    recs[3].best_value = -1.234_567_890_123_456_7e-300;
    recs[4].function = "GRUNGE[2,20]".into();
    let echo = config_echo(&RunOptions::new(CrossoverKind::Germany, 4));
    let mut buf = Vec::new();
    write_records(&recs, &mut buf, &echo).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("# algorithm=Germany\n"));
    assert!(text.contains("function,dim,algorithm,locopt,niching,mnic,seed,steps,success,best_value,wall_ms"));
    assert_eq!(read_records(buf.as_slice()).unwrap(), recs);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    export_records(&recs, &p, &[]).unwrap();
    assert_eq!(import_records(&p).unwrap(), recs);
}

#[test]
fn malformed_records_report_their_line() {
    let header = RECORD_COLUMNS.join(",");
    let good = "ackley,3,Germany,true,off,0,1,10,true,0.5,1";
    for bad in [
        good.replace("Germany", "Italy"),
        good.replace(",3,", ",x,"),
        good.replace("true,off", "maybe,off"),
        good.replace(",off,", ",0,"),
        format!("{good},extra"),
    ] {
        let text = format!("# echo\n{header}\n{good}\n{bad}\n");
        match read_records(text.as_bytes()) {
            Err(gabench::Error::Parse { line, .. }) => assert_eq!(line, 4, "{bad}"),
            Err(gabench::Error::Csv(_)) => {}
            other => panic!("{bad}: {other:?}"),
        }
    }
    assert!(read_records("a,b\n1,2\n".as_bytes()).is_err());
}

#[test]
fn scatter_statistics_over_successes() {
    let recs = vec![
        record(10, 1, 100, true),
        record(10, 2, 300, true),
        record(10, 3, 200, true),
        record(10, 4, 9999, false),
    ];
    let s = ScatterSummary::from_records(&recs).unwrap();
    assert_eq!((s.runs, s.successes), (4, 3));
    assert_eq!((s.min, s.max, s.median, s.average), (100.0, 300.0, 200.0, 200.0));
    assert!((s.std_dev - 100.0).abs() < 1e-12);
    assert!((s.max_dev_pct - 50.0).abs() < 1e-12);
    let none = ScatterSummary::from_records(&[record(10, 1, 5, false)]).unwrap();
    assert!(none.unsolved() && none.average.is_nan());
}

#[test]
fn series_and_plot_exports() {
    let mut recs = Vec::new();
    for &d in &[10usize, 20, 40] {
        for s in 0..3 {
            recs.push(record(d, s, 50 * d as u64 + s, true));
        }
    }
    recs.push(record(80, 9, 1, false));
    let series = ScalingSeries::from_records("ackley", CrossoverKind::Portugal(3), recs);
    assert_eq!(series.points.len(), 4);
    let fit = series.fit.clone().unwrap();
    assert!((fit.exponent - 1.0).abs() < 0.01);
    assert_eq!(fit.dim_range, (10, 40));

    let mut buf = Vec::new();
    write_series(std::slice::from_ref(&series), &mut buf, &["seed=1".into()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("ackley,Portugal:3,80,NaN,NaN,0,1"));
    assert!(text.lines().any(|l| l.starts_with("#fit Portugal:3 ")));

    let script = plot_script(std::slice::from_ref(&series)).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains("fit0(x)"));
    let empty = ScalingSeries::from_records("x", CrossoverKind::Holland, vec![record(5, 1, 1, false)]);
    assert!(plot_script(std::slice::from_ref(&empty)).is_err());
    let mut buf = Vec::new();
    write_series(&[empty], &mut buf, &[]).unwrap();
    assert!(String::from_utf8(buf).unwrap().contains("#nofit Holland"));
}

#[test]
fn repeats_use_consecutive_seeds() {
    let f = lookup_function("rastrigin", 3).unwrap();
    let mut o = RunOptions::new(CrossoverKind::Germany, 0);
    o.config.pool_size = 30;
    o.config.max_steps = 200;
    let r = repeat_runs(&f, &o, 4, 100).unwrap();
    let seeds: Vec<u64> = r.records().iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![101, 102, 103, 104]);
    assert!(repeat_runs(&f, &o, 0, 0).is_err());
}

#[test]
fn sweeps_require_increasing_dimensions() {
    let o = RunOptions::new(CrossoverKind::Germany, 0);
    let make = |d| lookup_function("ackley", d);
    assert!(dimension_sweep(make, &[], &o, 1, 0).is_err());
    assert!(dimension_sweep(make, &[4, 4], &o, 1, 0).is_err());
    assert!(dimension_sweep(make, &[8, 4], &o, 1, 0).is_err());
}

#[test]
fn small_sweep_end_to_end() {
    let mut o = RunOptions::new(CrossoverKind::Germany, 0).with_local();
    o.config.pool_size = 20;
    o.config.max_steps = 500;
    let s = dimension_sweep(|d| lookup_function("rastrigin", d), &[2, 4, 8], &o, 2, 10).unwrap();
    assert_eq!(s.records.len(), 6);
    assert_eq!(s.points.iter().map(|p| p.dim).collect::<Vec<_>>(), vec![2, 4, 8]);
}

#[test]
fn config_echo_lists_every_tunable() {
    let mut o = RunOptions::new(CrossoverKind::Portugal(5), 9).with_local();
    o.niching = Some(NichingSettings::new(10, 50));
    let echo = config_echo(&o);
    for key in ["algorithm=Portugal:5", "pool_size=1000", "fitness_diversity=0.00000001", "seed=9", "locopt=true", "niching=10", "mnic=50"] {
        assert!(echo.iter().any(|l| l == key), "{key} missing from {echo:?}");
    }
}

proptest! {
    #[test]
    fn fitted_exponent_is_scale_invariant(b in 0.1f64..4.0, k in 0.01f64..1e4) {
        let pts: Vec<(usize, f64)> = DIMS.iter().map(|&d| (d, k * (d as f64).powf(b))).collect();
        let fit = fit_power_law(&pts).unwrap();
        prop_assert!((fit.exponent - b).abs() < 1e-9);
        prop_assert!((fit.prefactor / k - 1.0).abs() < 1e-8);
    }
}
