use pldg::checks;
use pldg::descent::SolverConfig;
use pldg::problems::ProblemId;
use pldg::study::{run_study, StudyConfig};

#[test]
fn seeded_suites_repeat() {
    assert_eq!(checks::convexity_suite(5, 200), checks::convexity_suite(5, 200));
    assert_eq!(checks::gradient_fd_suite(5, 5), checks::gradient_fd_suite(5, 5));
    assert_ne!(checks::gradient_fd_suite(5, 5).detail, checks::gradient_fd_suite(6, 5).detail);
}

#[test]
fn studies_are_bitwise_reproducible() {
    let mut cfg = StudyConfig::new(ProblemId::Smooth);
    cfg.p = Some(1.5);
    cfg.degrees = vec![2];
    cfg.levels = 2;
    cfg.solver = SolverConfig::default();
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    for (x, y) in a[0].levels.iter().zip(&b[0].levels) {
        assert_eq!(x.descent.u, y.descent.u);
        assert_eq!(x.descent.iterations, y.descent.iterations);
        assert_eq!(x.result.errors.as_array(), y.result.errors.as_array());
    }
}

fn strip_seconds(table: &str) -> String {
    table.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

#[test]
fn csv_outputs_repeat() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let mut cfg = StudyConfig::new(ProblemId::Degenerate);
        cfg.degrees = vec![1];
        cfg.levels = 2;
        cfg.out = Some(d.path().to_path_buf());
        run_study(&cfg).unwrap();
    }
    let read = |i: usize, name: &str| std::fs::read_to_string(dirs[i].path().join(name)).unwrap();
    for l in 0..2 {
        let name = format!("history_k1_l{l}.csv");
        assert_eq!(read(0, &name), read(1, &name));
    }
    assert_eq!(strip_seconds(&read(0, "table_k1.csv")), strip_seconds(&read(1, "table_k1.csv")));
}
