use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rcg::{solve, Method};
use rcg_cli::commands::{build_problem, start_point};
use rcg_cli::config::PartialConfig;
use rcg_cli::trace_csv::{parse_trace, write_trace, Row, HEADER};

fn rcg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn summary_field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
}

#[test]
fn run_rayleigh_100_converges_to_lambda_min() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "run",
            "--problem",
            "rayleigh",
            "--n",
            "100",
            "--seed",
            "7",
            "--method",
            "scaled_dy",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.starts_with("method=scaled_dy iters="), "{line}");
    assert_eq!(summary_field(&line, "converged"), "true");
    let gap: f64 = summary_field(&line, "oracle_gap").parse().unwrap();
    assert!(gap <= 1e-8, "{gap}");
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), HEADER);
}

#[test]
fn bad_wolfe_constants_exit_4_naming_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.cfg"),
        "problem = rayleigh\nn = 5\nc1 = 0.5\nc2 = 0.4\n",
    )
    .unwrap();
    let o = rcg(dir.path(), &["run", "--config", "bad.cfg"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("c1 < c2 < 1"));
}

#[test]
fn unknown_key_and_bad_usage_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("x.cfg"),
        "problem = rayleigh\nn = 5\nsize = 3\n",
    )
    .unwrap();
    assert_eq!(code(&rcg(dir.path(), &["run", "--config", "x.cfg"])), 4);
    assert_eq!(
        code(&rcg(dir.path(), &["run", "--problem", "torus", "--n", "3"])),
        4
    );
    assert_eq!(code(&rcg(dir.path(), &["launch"])), 4);
    assert_eq!(
        code(&rcg(
            dir.path(),
            &["run", "--problem", "rayleigh", "--n", "x"]
        )),
        4
    );
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("r.cfg"),
        "# small run\nproblem = rayleigh\nn = 10\nseed = 3\noutput_path = a.csv\n",
    )
    .unwrap();
    let o = rcg(dir.path(), &["run", "--config", "r.cfg", "--out", "b.csv"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("b.csv").exists());
    assert!(!dir.path().join("a.csv").exists());
}

#[test]
fn quadratic_fixture_reaches_minus_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "run",
            "--problem",
            "quadratic",
            "--a-diag",
            "1,2",
            "--b",
            "1,1",
        ],
    );
    assert_eq!(code(&o), 0);
    let f: f64 = summary_field(&stdout(&o), "f").parse().unwrap();
    assert!((f + 0.75).abs() <= 1e-8, "{f}");
}

#[test]
fn iteration_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "run",
            "--problem",
            "rayleigh",
            "--n",
            "50",
            "--max-iters",
            "3",
        ],
    );
    assert_eq!(code(&o), 2);
    assert_eq!(summary_field(&stdout(&o), "converged"), "false");
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(parse_trace(&csv).unwrap().len(), 4);
}

#[test]
fn reference_method_off_euclidean_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "run",
            "--problem",
            "rayleigh",
            "--n",
            "5",
            "--method",
            "euclidean_dy_reference",
        ],
    );
    assert_eq!(code(&o), 4);
}

#[test]
fn gradcheck_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rcg(
            dir.path(),
            &["gradcheck", "--problem", "rayleigh", "--n", "30"]
        )),
        0
    );
    assert_eq!(
        code(&rcg(
            dir.path(),
            &[
                "gradcheck",
                "--problem",
                "brockett",
                "--n",
                "20",
                "--p",
                "3"
            ]
        )),
        0
    );
    assert_eq!(
        code(&rcg(
            dir.path(),
            &["gradcheck", "--problem", "quadratic", "--n", "20"]
        )),
        0
    );
    // coarse step: the truncation error dominates on the curved manifolds
    let o = rcg(
        dir.path(),
        &[
            "gradcheck",
            "--problem",
            "rayleigh",
            "--n",
            "30",
            "--h",
            "1e-1",
        ],
    );
    assert_eq!(code(&o), 1);
    let err: f64 = summary_field(&stdout(&o), "max_rel_error").parse().unwrap();
    assert!(err > 1e-5);
    assert_eq!(
        code(&rcg(
            dir.path(),
            &[
                "gradcheck",
                "--problem",
                "rayleigh",
                "--n",
                "30",
                "--h",
                "0"
            ]
        )),
        4
    );
}

#[test]
fn compare_rayleigh_all_converge_with_weak_wolfe_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "compare",
            "--problem",
            "rayleigh",
            "--n",
            "100",
            "--seed",
            "7",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows =
        parse_trace(&fs::read_to_string(dir.path().join("trace_scaled_dy.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.armijo_ok && r.curvature_ok));
    for tag in ["fr_scaled", "steepest_descent"] {
        assert!(dir.path().join(format!("trace_{tag}.csv")).exists());
    }
}

#[test]
fn compare_quadratic_reproduces_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &["compare", "--problem", "quadratic", "--n", "50"],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let gap: f64 = summary_field(out.lines().last().unwrap(), "max_coordinate_gap")
        .parse()
        .unwrap();
    assert!(gap <= 1e-13, "{gap}");
    let a = fs::read_to_string(dir.path().join("trace_scaled_dy.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("trace_euclidean_dy_reference.csv")).unwrap();
    let (a, b) = (parse_trace(&a).unwrap(), parse_trace(&b).unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.f - y.f).abs() <= 1e-13 * x.f.abs().max(1.0));
    }
}

#[test]
fn compare_brockett_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = rcg(
        dir.path(),
        &[
            "compare",
            "--problem",
            "brockett",
            "--n",
            "30",
            "--p",
            "3",
            "--seed",
            "1",
        ],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for line in out.lines().skip(1).take(3) {
        let gap: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(gap <= 1e-6, "{line}");
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.csv", "b.csv"] {
        let o = rcg(
            dir.path(),
            &[
                "run",
                "--problem",
                "brockett",
                "--n",
                "12",
                "--p",
                "3",
                "--seed",
                "4",
                "--out",
                out,
            ],
        );
        assert_eq!(code(&o), 0);
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_round_trip_is_exact() {
    let cfg = PartialConfig::parse_file_contents("problem = rayleigh\nn = 40\nseed = 2\n")
        .unwrap()
        .resolve()
        .unwrap();
    let problem = build_problem(&cfg).unwrap();
    let r = solve(
        &problem,
        &start_point(&problem, cfg.seed),
        &cfg.solve_options(Method::ScaledDY).unwrap(),
    )
    .unwrap();
    let mut buf = Vec::new();
    write_trace(&mut buf, &r.trace).unwrap();
    let parsed = parse_trace(std::str::from_utf8(&buf).unwrap()).unwrap();
    let expected: Vec<Row> = r.trace.iter().map(Row::from).collect();
    assert_eq!(parsed, expected);
}
