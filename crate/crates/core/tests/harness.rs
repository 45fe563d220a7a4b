use biharm::generators::{p3_domain, p5_domain};
use biharm::graph::GraphFile;
use biharm::harness::{
    run_solve, run_sweep, write_csv, EpsGrid, EpsSpec, FSpec, LambdaSpec, Problem, RunConfig,
    SolutionReport, Spacing, CSV_HEADER,
};
use biharm::{Error, Execution};

fn write_graph(
    dir: &tempfile::TempDir,
    name: &str,
    (g, d): (biharm::WeightedGraph, biharm::Domain),
) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, GraphFile::to_json(&g, d.interior())).unwrap();
    path
}

#[test]
fn spec_strings_parse() {
    assert_eq!(
        "0.5*lambda1".parse::<LambdaSpec>().unwrap(),
        LambdaSpec::Relative(0.5)
    );
    assert_eq!(
        "lambda1*0.25".parse::<LambdaSpec>().unwrap(),
        LambdaSpec::Relative(0.25)
    );
    assert_eq!(
        "lambda1".parse::<LambdaSpec>().unwrap(),
        LambdaSpec::Relative(1.0)
    );
    assert_eq!(
        "3".parse::<LambdaSpec>().unwrap(),
        LambdaSpec::Absolute(3.0)
    );
    assert!("lambda2".parse::<LambdaSpec>().is_err());
    assert!("nan".parse::<LambdaSpec>().is_err());

    assert_eq!("eps1".parse::<EpsSpec>().unwrap(), EpsSpec::Relative(1.0));
    assert_eq!(
        "1.5*eps1".parse::<EpsSpec>().unwrap(),
        EpsSpec::Relative(1.5)
    );
    assert_eq!("1e-3".parse::<EpsSpec>().unwrap(), EpsSpec::Absolute(1e-3));
    assert!(EpsSpec::Relative(0.5).resolve(None).is_err());

    assert_eq!("const:2".parse::<FSpec>().unwrap(), FSpec::Constant(2.0));
    assert_eq!(
        "vertex:b:-1".parse::<FSpec>().unwrap(),
        FSpec::Vertex("b".into(), -1.0)
    );
    assert!("vertex:b".parse::<FSpec>().is_err());
}

#[test]
fn grid_endpoints_are_exact() {
    let grid: EpsGrid = "1e-6:eps1:20:log".parse().unwrap();
    assert_eq!(grid.spacing, Spacing::Logarithmic);
    let e1 = 0.0032158043495656872;
    let values = grid.values(Some(e1)).unwrap();
    assert_eq!(values.len(), 20);
    assert_eq!(values[0], 1e-6);
    assert_eq!(values[19], e1);
    assert!(values.windows(2).all(|w| w[0] < w[1]));

    let lin: EpsGrid = "0:1:5:lin".parse().unwrap();
    assert_eq!(lin.values(None).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!("0:1:5:log"
        .parse::<EpsGrid>()
        .unwrap()
        .values(None)
        .is_err());
    assert!("0:1:5".parse::<EpsGrid>().is_err());
    assert!("1:0:5:lin"
        .parse::<EpsGrid>()
        .unwrap()
        .values(None)
        .is_err());
}

#[test]
fn forcing_file_resolves_by_vertex_id() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = p5_domain();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"d": 2.5, "b": -1}"#).unwrap();
    let f = FSpec::File(path.clone()).resolve(&g, &d).unwrap();
    assert_eq!(f.values(), &[-1.0, 0.0, 2.5]);
    std::fs::write(&path, r#"{"a": 1}"#).unwrap();
    assert!(matches!(
        FSpec::File(path).resolve(&g, &d),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn report_round_trips_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_graph(&dir, "p5.json", p5_domain());
    let mut cfg = RunConfig::new(&path, LambdaSpec::Relative(0.5), 4.0, FSpec::Constant(1.0));
    cfg.eps = Some(EpsSpec::Relative(0.5));
    let (prepared, params, report) = run_solve(&cfg).unwrap();
    assert!(report.certificate.certified);
    assert!(report.notes.is_empty());

    let json = report.to_json();
    let back: SolutionReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json(), json);

    let problem = Problem::load(&path).unwrap();
    assert_eq!(
        back.verify(&problem, &params, &prepared.constants).unwrap(),
        report.certificate
    );

    let mut tampered = back.clone();
    *tampered.mountain_pass.values.get_mut("c").unwrap() *= 1.001;
    let cert = tampered
        .verify(&problem, &params, &prepared.constants)
        .unwrap();
    assert!(!cert.mountain_pass && !cert.certified);
}

#[test]
fn out_of_regime_and_trivial_notes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_graph(&dir, "p3.json", p3_domain());
    let mut cfg = RunConfig::new(&path, LambdaSpec::Absolute(1.0), 4.0, FSpec::Constant(1.0));
    cfg.eps = Some(EpsSpec::Absolute(0.0));
    let (_, _, report) = run_solve(&cfg).unwrap();
    assert!(report.certificate.trivial_local_min);
    assert!(report.notes.iter().any(|n| n.contains("trivial")));
    assert!(report
        .notes
        .iter()
        .any(|n| n.contains("out of guaranteed regime")));
}

#[test]
fn sweep_is_identical_across_execution_modes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_graph(&dir, "p5.json", p5_domain());
    let mut cfg = RunConfig::new(&path, LambdaSpec::Relative(0.5), 4.0, FSpec::Constant(1.0));
    cfg.eps_grid = Some("1e-5:1.5*eps1:6:log".parse().unwrap());
    cfg.execution = Execution::Sequential;
    let seq = run_sweep(&cfg).unwrap();
    cfg.execution = Execution::Parallel;
    let par = run_sweep(&cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&seq).unwrap(),
        serde_json::to_string(&par).unwrap()
    );
    assert_eq!(seq.row_count, 6);
    assert!(seq.rows.iter().all(|r| r.error.is_none()));
    assert!(!seq.rows[5].in_regime);

    let mut csv = Vec::new();
    write_csv(&seq.rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 7);
}
