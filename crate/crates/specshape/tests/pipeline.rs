use specshape::analyze::{analyze, RowStatus};
use specshape::compare::compare;
use specshape::csvio::{read_rows, to_string};
use specshape::optimal::optimal_k;
use specshape::simulate::{simulate, SimulateRow};
use specshape::ExperimentSpec;
use specshape_core::analysis::FormulaMode::{self, AsPrinted, Rederived};
use specshape_core::{PuMode, SuStrategy};

const BOTH: [FormulaMode; 2] = [AsPrinted, Rederived];

fn spec(json: &str) -> ExperimentSpec {
    ExperimentSpec::from_json(json).unwrap()
}

#[test]
fn printed_and_rederived_against_two_channel_simulation() {
    // every scenario here has P_idle = 0.5: ARQ with one receiver at
    // ε = 0.5 serves in 2 slots on average, network coding in 2m
    let s = spec(
        r#"{"base": {"num_channels": 2, "minislots_per_slot": 4, "num_receivers": 1, "erasure_prob": 0.5},
            "sweep": {"parameter": "lambda", "values": [0.25]},
            "simulate": true, "sim": {"horizon": 1100000, "warmup": 100000, "seed": 3}}"#,
    );
    let a = analyze(&s, &BOTH, 3).unwrap();
    let (sims, _) = simulate(&s, 3).unwrap();
    let r = compare(&a, &sims).unwrap();
    let arq = |fm| {
        r.rows
            .iter()
            .find(|x| x.mode == PuMode::Arq && x.formula_mode == fm)
            .unwrap()
    };
    let (printed, rederived) = (arq(AsPrinted), arq(Rederived));
    assert!((rederived.eta_s_analytic.unwrap() - 2.0).abs() < 1e-12);
    assert!((printed.eta_s_analytic.unwrap() - 2.25).abs() < 1e-12);
    assert!((rederived.eta_s_sim - 2.0).abs() < 3.0 * rederived.stderr_sim, "{rederived:?}");
    assert!((printed.eta_s_sim - 2.25).abs() > 3.0 * printed.stderr_sim);
}

#[test]
fn zero_backoff_rows_have_zero_gain() {
    let s = spec(
        r#"{"sweep": {"parameter": "k", "values": [0, 2]}, "simulate": true,
            "sim": {"horizon": 22000, "warmup": 2000}}"#,
    );
    let a = analyze(&s, &BOTH, 1).unwrap();
    let (sims, _) = simulate(&s, 1).unwrap();
    let r = compare(&a, &sims).unwrap();
    for row in r.rows.iter().filter(|x| x.gain_sim.is_some()) {
        if row.k == 0 {
            assert_eq!(row.gain_sim, Some(0.0));
            assert_eq!(row.gain_analytic, Some(0.0));
        } else {
            assert!(row.gain_sim.unwrap() > 0.0);
        }
    }
    assert!(r.gain_ok);
}

#[test]
fn compare_is_a_function_of_the_csv_datasets() {
    let s = spec(
        r#"{"sweep": {"parameter": "epsilon", "values": [0.05, 0.2]}, "simulate": true,
            "sim": {"horizon": 22000, "warmup": 2000, "trials": 2}}"#,
    );
    let a = analyze(&s, &BOTH, 9).unwrap();
    let (sims, _) = simulate(&s, 9).unwrap();
    let direct = compare(&a, &sims).unwrap();
    let a2 = read_rows(to_string(&a).unwrap().as_bytes()).unwrap();
    let s2: Vec<SimulateRow> = read_rows(to_string(&sims).unwrap().as_bytes()).unwrap();
    assert_eq!(a2, a);
    assert_eq!(s2, sims);
    assert_eq!(compare(&a2, &s2).unwrap(), direct);
    // two replications plus the pooled row per run
    assert_eq!(sims.len(), 2 * 3 * 3);
}

#[test]
fn mismatched_grids_are_rejected() {
    let s1 = spec(r#"{"sweep": {"parameter": "lambda", "values": [0.2, 0.3]}, "sim": {"horizon": 2200}}"#);
    let s2 = spec(r#"{"sweep": {"parameter": "lambda", "values": [0.2]}, "sim": {"horizon": 2200}}"#);
    let a = analyze(&s1, &[Rederived], 1).unwrap();
    let (sims, _) = simulate(&s2, 1).unwrap();
    let e = compare(&a, &sims).unwrap_err();
    assert!(e.to_string().starts_with("mismatched sweep grids"), "{e}");
}

#[test]
fn unstable_points_are_flagged_rows() {
    let s = spec(
        r#"{"base": {"batch_size": 2, "erasure_prob": 0.25}, "sweep": {"parameter": "lambda", "values": [0.3, 0.6]}}"#,
    );
    let a = analyze(&s, &[Rederived], 1).unwrap();
    assert_eq!(a.len(), 6);
    assert!(a[..3].iter().all(|r| r.status == RowStatus::Ok));
    let nc: Vec<_> = a[3..].iter().filter(|r| r.mode == PuMode::NetworkCoding).collect();
    assert!(nc.iter().all(|r| r.status == RowStatus::Unstable && r.eta_p.is_some()));
}

#[test]
fn analysis_rows_follow_sweep_order() {
    let s = spec(r#"{"sweep": {"parameter": "m", "values": [8, 2, 5]}}"#);
    let a = analyze(&s, &BOTH, 1).unwrap();
    let values: Vec<f64> = a.iter().map(|r| r.value).collect();
    assert_eq!(values, [[8.0; 6], [2.0; 6], [5.0; 6]].concat());
    assert_eq!(a[1].formula_mode, Rederived);
    assert_eq!(a[2].strategy, SuStrategy::AdaptiveTwoStage);
}

#[test]
fn delta_curve_minimizer() {
    let s = spec(
        r#"{"base": {"batch_size": 8, "erasure_prob": 0.2}, "sweep": {"parameter": "lambda", "values": [0.4]}}"#,
    );
    let (rows, skipped) = optimal_k(&s, &[AsPrinted], 12).unwrap();
    assert!(skipped.is_empty());
    assert_eq!(rows.len(), 13);
    let best = rows[0].best_k as usize;
    assert!(best > 0 && best < 12);
    let min = rows.iter().map(|r| r.delta).fold(f64::INFINITY, f64::min);
    assert_eq!(rows[best].delta, min);
}
