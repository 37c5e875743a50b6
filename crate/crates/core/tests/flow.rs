use tadpole_core::io::{read_state_csv, write_state_csv};
use tadpole_core::states::{classify, DEFAULT_TOL};
use tadpole_core::variational::{line_action, monotone_along_gamma, solve_ground_state, sweep};
use tadpole_core::{GraphParams, SolveOptions};

fn coarse(l: f64) -> tadpole_core::Result<GraphParams> {
    GraphParams::with_grid(1.0, 0.5, l, Some(l / 100.0), None)
}

#[test]
fn sweep_is_independent_of_the_thread_count() {
    let ls: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let opts = SolveOptions::default();
    let one = sweep(&ls, coarse, &opts, Some(1)).unwrap();
    let three = sweep(&ls, coarse, &opts, Some(3)).unwrap();
    assert_eq!(one, three);
    assert!(one.iter().zip(&ls).all(|(r, &l)| r.l == l && r.converged));
    assert!(one.iter().all(|r| r.action < line_action(1.0)));
    assert!(monotone_along_gamma(&one, 1.0, 0.5, 1e-3));
}

#[test]
fn bad_lengths_are_reported_per_row() {
    let rows = sweep(&[0.5, -1.0], coarse, &SolveOptions::default(), Some(2)).unwrap();
    assert!(rows[0].converged && rows[0].error.is_none());
    assert!(!rows[1].converged && rows[1].error.is_some());
}

#[test]
fn saved_state_classifies_like_the_report() {
    let p = GraphParams::with_grid(1.0, 0.5, 0.75, Some(2.5e-3), None).unwrap();
    let sol = solve_ground_state(&p, &SolveOptions::default()).unwrap();
    assert!(sol.report.converged);
    let mut buf = Vec::new();
    write_state_csv(&mut buf, &sol.state, &p).unwrap();
    let (q, v) = read_state_csv(buf.as_slice()).unwrap();
    assert_eq!(classify(&v, &q, DEFAULT_TOL).ok(), sol.report.shape);
}

#[test]
fn stopping_rule_is_honoured() {
    let p = coarse(1.0).unwrap();
    let capped = SolveOptions { max_iter: 2, ..SolveOptions::default() };
    let sol = solve_ground_state(&p, &capped).unwrap();
    assert!(!sol.report.converged);
    assert_eq!(sol.history.len(), 2);
    let sol = solve_ground_state(&p, &SolveOptions::default()).unwrap();
    let last = sol.history.last().unwrap();
    assert!(sol.report.converged && last.relative_change <= 1e-7);
    assert!(sol.history[..sol.history.len() - 1].iter().all(|h| h.relative_change > 1e-7));
}
