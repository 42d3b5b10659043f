use std::sync::OnceLock;

use pillai_fib::pipeline::report::{BallRecord, ProofReport, StageRecord};
use pillai_fib::pipeline::{run_proof, verify_report_detailed, Config};
use pillai_fib::search::enumerate;
use pillai_fib::RealBall;

fn baseline() -> &'static ProofReport {
    static R: OnceLock<ProofReport> = OnceLock::new();
    R.get_or_init(|| run_proof(&Config::default()).unwrap())
}

fn bounds(r: &ProofReport) -> Vec<(String, i64)> {
    r.stages
        .iter()
        .filter_map(|s| match s {
            StageRecord::Reduction(x) => Some((x.id.clone(), x.bound)),
            _ => None,
        })
        .collect()
}

fn write(r: &ProofReport) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    r.write(&path).unwrap();
    (dir, path)
}

#[test]
fn runs_are_deterministic() {
    let again = run_proof(&Config::default()).unwrap();
    assert_eq!(baseline().canonical_json(), again.canonical_json());
}

#[test]
fn doubled_precision_moves_no_bound_by_more_than_one() {
    let hi = run_proof(&Config {
        prec: 1536,
        ..Config::default()
    })
    .unwrap();
    assert_eq!(hi.verdict, baseline().verdict);
    for ((id, a), (_, b)) in bounds(baseline()).iter().zip(bounds(&hi)) {
        assert!((a - b).abs() <= 1, "{id}: {a} vs {b}");
    }
}

#[test]
fn larger_rectangle_adds_no_solution() {
    let small = enumerate(400, 300);
    let big = enumerate(500, 360);
    assert_eq!(small, big);
}

#[test]
fn report_round_trips_and_verifies() {
    let (_d, path) = write(baseline());
    assert_eq!(&ProofReport::read(&path).unwrap(), baseline());
    assert!(verify_report_detailed(&path, false).unwrap().is_empty());
}

#[test]
fn negated_epsilon_is_rejected() {
    let mut r = baseline().clone();
    let s = r.reduction_mut("S6").unwrap();
    let e = s.min_epsilon.epsilon.to_ball().unwrap();
    s.min_epsilon.epsilon = BallRecord::from_ball(&-&e);
    let (_d, path) = write(&r);
    let fails = verify_report_detailed(&path, false).unwrap();
    assert!(fails.iter().any(|f| f.starts_with("S6")), "{fails:?}");
}

#[test]
fn inflated_final_bound_is_rejected() {
    let mut r = baseline().clone();
    r.reduction_mut("S6").unwrap().bound = 401;
    let (_d, path) = write(&r);
    let fails = verify_report_detailed(&path, false).unwrap();
    assert!(fails.iter().any(|f| f.starts_with("S7")), "{fails:?}");
}

#[test]
fn widened_range_is_rejected() {
    let mut r = baseline().clone();
    r.reduction_mut("S3").unwrap().ranges[0][1] += 5;
    let (_d, path) = write(&r);
    assert!(!verify_report_detailed(&path, false).unwrap().is_empty());
}

#[test]
fn recorded_epsilon_is_a_ball() {
    let s = baseline().reduction("S2.n").unwrap();
    let e: RealBall = s.min_epsilon.epsilon.to_ball().unwrap();
    assert!(e.lower().signum() > 0);
}
