use std::path::Path;
use std::process::{Command, Output};

use invnorm::config::RunConfig;
use invnorm::files::{self, TABLE1_HEADER, TABLE2_HEADER};
use invnorm::run::{certify, solve_parallel, Progress};
use invnorm_core::assembly::CoefficientMatrix;
use invnorm_core::certify::GapOutcome;
use invnorm_core::problems::{constant_q, lotka_volterra, MultiStartOptions};

fn invnorm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invnorm")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const ZERO_2D: &str = "[problem]\nkind = \"constant-q\"\nc = 0.0\ndim = 2\n\n\
                       [discretization]\nn_cert = 10\n\n[constants]\nc_h = \"heuristic\"\n";

#[test]
fn certify_zero_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.toml", ZERO_2D);
    let out = invnorm(&["certify", "--config", &cfg, "--out", "zero.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = files::read_certificate(&dir.path().join("zero.json")).unwrap();
    let b = cert.inv_norm_upper.unwrap().hi;
    assert!((b - 0.2251).abs() < 1e-3, "{b}");

    // the file is the in-memory record, field for field
    let cfg = RunConfig::parse(ZERO_2D).unwrap();
    let mine = certify(&cfg, 10, &mut Progress::new(false)).unwrap().certificate;
    assert_eq!(mine.without_timings(), cert.without_timings());
    let again = dir.path().join("again.json");
    files::write_certificate(&again, &mine).unwrap();
    assert_eq!(files::read_certificate(&again).unwrap(), mine);
}

#[test]
fn certify_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[problem\nkind = 3");
    assert_eq!(invnorm(&["certify", "--config", &bad], dir.path()).status.code(), Some(1));
    let unknown = write(dir.path(), "unknown.toml", "[discretization]\nn_certify = 60\n");
    let out = invnorm(&["certify", "--config", &unknown], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_certify"));
    assert_eq!(invnorm(&["certify", "--config", "missing.toml"], dir.path()).status.code(), Some(1));
    assert_eq!(invnorm(&["certify"], dir.path()).status.code(), Some(1));
    assert_eq!(invnorm(&["table", "--which", "3"], dir.path()).status.code(), Some(1));
}

#[test]
fn no_bound_exits_two() {
    // c = π² puts the first Dirichlet eigenvalue at zero
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "resonant.toml",
        "[problem]\nkind = \"constant-q\"\nc = 9.869604401089358\ndim = 1\n\n\
         [discretization]\nn_cert = 10\n\n[constants]\nc_h = \"heuristic\"\n\n[refinement]\nenabled = false\n",
    );
    let out = invnorm(&["certify", "--config", &cfg, "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(files::read_certificate(&dir.path().join("r.json")).unwrap().inv_norm_upper.is_none());
}

#[test]
fn custom_coefficients_match_constant_problem() {
    let dir = tempfile::tempdir().unwrap();
    let q = CoefficientMatrix::scalar_identity(1, 1, 5.0);
    write(dir.path(), "five.json", &serde_json::to_string(&q).unwrap());
    let custom = RunConfig::load(Path::new(&write(
        dir.path(),
        "custom.toml",
        "[problem]\nkind = \"custom\"\ncoefficients = \"five.json\"\n\n[constants]\nc_h = \"heuristic\"\n",
    )))
    .unwrap();
    let constant = RunConfig::parse("[problem]\nkind = \"constant-q\"\nc = 5.0\ndim = 1\n\n[constants]\nc_h = \"heuristic\"\n")
        .unwrap();
    let a = certify(&custom, 20, &mut Progress::new(false)).unwrap().certificate;
    let b = certify(&constant, 20, &mut Progress::new(false)).unwrap().certificate;
    assert_eq!(a.inv_norm_upper, b.inv_norm_upper);
    assert_eq!(a.problem.hash, b.problem.hash);
}

#[test]
fn tables_from_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs");
    std::fs::create_dir(&runs).unwrap();
    let out = invnorm(&["table", "--which", "1", "--dir", "runs"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no certificates"));

    let cfg = write(dir.path(), "zero.toml", &format!("{ZERO_2D}\n[table]\nn_cert = [12, 10]\n"));
    let out = invnorm(&["table", "--which", "2", "--dir", "runs", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rows = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), TABLE2_HEADER);
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.iter().map(|r| r[0].to_string()).collect::<Vec<_>>(), ["10", "12"]);
    let cert = files::read_certificate(&runs.join("certificate-N10.json")).unwrap();
    // 17 significant digits read back to the same double
    let printed: f64 = rows[0][4].parse().unwrap();
    assert_eq!(printed, cert.inv_norm_upper.unwrap().hi);
    assert_eq!(rows[0][4].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);

    let out = invnorm(&["table", "--which", "1", "--dir", "runs", "--out", "t1.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "N,C_h,C_Ms,lambda_h1,liu_lower");
    assert_eq!(TABLE1_HEADER.join(","), "N,C_h,C_Ms,lambda_h1,liu_lower");
    assert_eq!(text.lines().count(), 3);

    // a run without a gap prints dashes
    let mut none = cert.clone();
    none.gap = GapOutcome::NotFound;
    none.inv_norm_upper = None;
    let mut buf = Vec::new();
    files::write_table(&mut buf, 2, &[none]).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap(), "10,--,--,--,--");
}

#[test]
fn defaults_dump_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = invnorm(&["--dump-defaults"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cfg = RunConfig::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, RunConfig::default());
}

#[test]
fn solution_and_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lotka_volterra();
    let opts = MultiStartOptions { n_coarse: 6, ..MultiStartOptions::default() };
    let sol = solve_parallel(&spec, 8, &opts, 1).unwrap();
    let p = dir.path().join("sol.json");
    files::write_solution(&p, &spec.name, &sol).unwrap();
    let back = files::read_solution(&p).unwrap();
    assert_eq!(back.solution, sol);
    assert_eq!((back.dim, back.m, back.n), (2, 2, 8));

    let mut grid = Vec::new();
    files::write_grid(&mut grid, &sol.field, 5).unwrap();
    let text = String::from_utf8(grid).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    assert_eq!(data.len(), 25);
    // boundary values vanish
    let first: Vec<f64> = data[0].split(' ').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first.len(), 4);
    assert!(first[2].abs() < 1e-12 && first[3].abs() < 1e-12);
}

#[test]
fn parallel_starts_match_sequential() {
    let spec = constant_q(5.0, 1, 1).unwrap();
    let opts = MultiStartOptions { n_coarse: 6, ..MultiStartOptions::default() };
    let a = solve_parallel(&spec, 10, &opts, 1).unwrap();
    let b = solve_parallel(&spec, 10, &opts, 3).unwrap();
    assert_eq!(a, b);
    let lv = lotka_volterra();
    let a = solve_parallel(&lv, 8, &opts, 1).unwrap();
    let b = solve_parallel(&lv, 8, &opts, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn selftest_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = invnorm(&["selftest"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);

    let bad = invnorm(&["selftest", "--inject-fault", "gram"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("FAIL [assembly]"), "{text}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e:#}", p.display()));
            seen += 1;
        }
    }
    assert!(seen >= 2);
}
