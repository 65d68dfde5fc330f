use sqlab::harness::{self, Cell, Command, ExperimentConfig, Format, Rows, EVOLVE_HEADER, LEARN_HEADER};

fn cfg(command: Command, class: &str) -> ExperimentConfig {
    ExperimentConfig {
        command,
        n: 3,
        epsilon: 0.2,
        tau: Some(0.05),
        class: class.into(),
        dist: "uniform".into(),
        oracle: "exact".into(),
        seeds: vec![0, 1],
        out: "unused".into(),
        format: Format::Csv,
        max_generations: None,
        c_hoeffding: None,
        psi_samples: None,
    }
}

#[test]
fn learn_traces_read_back() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = cfg(Command::Learn, "conjunctions");
    c.out = tmp.path().to_path_buf();
    for format in [Format::Csv, Format::Json] {
        c.format = format;
        let out = harness::run(&c).unwrap();
        assert_eq!(out.files.len(), 16);
        assert!(out.breaches.is_empty());
        harness::write_outputs(&out, &c, tmp.path()).unwrap();
        let (stem, rows) = &out.files[3];
        let path = tmp.path().join(format!("{stem}.{}", format.extension()));
        let back = Rows::read(&path, format, &LEARN_HEADER).unwrap();
        assert!(back.same(rows));
        let last = rows.rows.last().unwrap();
        assert_eq!(last[1], Cell::Empty, "halting iteration has no accepted gamma");
    }
}

#[test]
fn evolve_summary_and_traces() {
    let mut c = cfg(Command::Evolve, "disjunctions");
    c.tau = None;
    c.seeds = vec![4, 5, 6];
    let out = harness::run(&c).unwrap();
    assert_eq!(out.summary.rows.len(), 3);
    assert_eq!(out.files[0].1.header, EVOLVE_HEADER.map(String::from).to_vec());
    assert_eq!(out.metrics["reached_rate"], 1.0);
    let first = &out.files[0].1.rows[0];
    assert_eq!(first[3], Cell::from("initial"));
}

#[test]
fn invalid_oracle_is_reported_as_breach() {
    let mut c = cfg(Command::Agnostic, "parities");
    c.oracle = "biased:0.3".into();
    let out = harness::run(&c).unwrap();
    assert_eq!(out.breaches.len(), 2);
    assert!(out.breaches[0].guarantee.contains("oracle validity"));
}

#[test]
fn evolve_rejects_non_disjunction_classes() {
    let mut c = cfg(Command::Evolve, "parities");
    c.tau = None;
    assert!(matches!(harness::run(&c), Err(sqlab::Error::Config { .. })));
}

#[test]
fn dim_reports_exact_parity_dimension() {
    let mut c = cfg(Command::Dim, "parities");
    c.seeds = vec![0];
    let out = harness::run(&c).unwrap();
    let rows = &out.files[0].1.rows;
    assert_eq!(rows[0][1], Cell::from("sq_dim"));
    assert_eq!(rows[0][2], Cell::from(8usize));
    assert_eq!(rows[0][3], Cell::from("exact"));
}
