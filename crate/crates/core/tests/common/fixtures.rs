//! Command-line scenarios shared by the CLI tests and the acceptance run.
//! Each scenario writes its input files into a scratch directory, runs the
//! tool in-process and checks the exit code plus a lossless re-parse of
//! everything it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use otcert::approximation::ConvergenceReport;
use otcert::cli::{self, EXIT_INFEASIBLE, EXIT_INFINITE_SUPPORT, EXIT_NOT_MONOTONE, EXIT_OK, EXIT_PARSE};
use otcert::formats::*;
use otcert::verify_feasibility;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["otcert"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

pub struct Scenario {
    pub name: &'static str,
    pub run: fn(&Path) -> Result<(), String>,
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn expect_code(o: &Outcome, code: i32) -> Result<(), String> {
    if o.code == code {
        Ok(())
    } else {
        Err(format!("exit {} (wanted {code}); stderr: {}", o.code, o.stderr.trim()))
    }
}

/// Parse `text` as `T`, re-serialize, and require the identical text back.
fn reparse<T: Serialize + DeserializeOwned>(text: &str) -> Result<T, String> {
    let value: T = serde_json::from_str(text).map_err(|e| format!("re-parse failed: {e}"))?;
    let again = to_json(&value) + "\n";
    if again != text {
        return Err(format!("re-serialization differs:\n{text}\nvs\n{again}"));
    }
    Ok(value)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn two_point_instance(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (
        write(dir, "mu.json", r#"{"points":[[0],[1]]}"#),
        write(dir, "nu.json", r#"{"points":[[0.25],[2]]}"#),
        write(dir, "sq.json", r#"{"kind":"sqeuclidean"}"#),
    )
}

fn solve_identity(dir: &Path) -> Result<(), String> {
    let mu = write(dir, "mu.json", r#"{"points":[[0,0],[1,2],[3,1]],"weights":[0.2,0.3,0.5]}"#);
    let cost = write(dir, "sq.json", r#"{"kind":"sqeuclidean"}"#);
    let out = dir.join("plan.json");
    let o = run(&["solve", "--mu", s(&mu), "--nu", s(&mu), "--cost", s(&cost), "--out", s(&out)]);
    expect_code(&o, EXIT_OK)?;
    ensure(o.stderr.lines().any(|l| l == "cost 0"), format!("stderr {:?}", o.stderr))?;
    let plan: PlanFile = reparse(&o.stdout)?;
    ensure(fs::read_to_string(&out).unwrap() == o.stdout, "--out differs from stdout")?;
    ensure(plan.entries == vec![(0, 0, 0.2), (1, 1, 0.3), (2, 2, 0.5)], format!("plan {:?}", plan.entries))
}

fn solve_two_point(dir: &Path) -> Result<(), String> {
    let (mu, nu, cost) = two_point_instance(dir);
    let o = run(&["solve", "--mu", s(&mu), "--nu", s(&nu), "--cost", s(&cost)]);
    expect_code(&o, EXIT_OK)?;
    ensure(o.stderr.contains("cost 0.53125"), format!("stderr {:?}", o.stderr))?;
    let plan: PlanFile = reparse(&o.stdout)?;
    ensure(plan.cost == Some(CostValue(0.53125)), "cost field")?;
    ensure(plan.to_plan().is_ok(), "plan does not rebuild")
}

fn solve_infeasible(dir: &Path) -> Result<(), String> {
    let (mu, nu, _) = two_point_instance(dir);
    let cost = write(dir, "inf.json", r#"{"kind":"matrix","matrix":[["inf","inf"],["inf","inf"]]}"#);
    let o = run(&["solve", "--mu", s(&mu), "--nu", s(&nu), "--cost", s(&cost)]);
    expect_code(&o, EXIT_INFEASIBLE)?;
    ensure(o.stderr.contains("infeasible"), format!("stderr {:?}", o.stderr))?;
    ensure(o.stdout.is_empty(), "stdout should be empty")
}

fn solve_malformed(dir: &Path) -> Result<(), String> {
    let (mu, _, cost) = two_point_instance(dir);
    let bad = write(dir, "bad.json", r#"{"points":[[0],[1]], "weights": [0.5]"#);
    expect_code(&run(&["solve", "--mu", s(&mu), "--nu", s(&bad), "--cost", s(&cost)]), EXIT_PARSE)?;
    let unnormalized = write(dir, "un.json", r#"{"points":[[0],[1]], "weights": [0.5, 0.6]}"#);
    expect_code(&run(&["solve", "--mu", s(&mu), "--nu", s(&unnormalized), "--cost", s(&cost)]), EXIT_PARSE)?;
    expect_code(&run(&["solve", "--mu", s(&mu), "--nu", "/nonexistent/x.json", "--cost", s(&cost)]), EXIT_PARSE)
}

fn check_optimal(dir: &Path) -> Result<(), String> {
    let (mu, nu, cost) = two_point_instance(dir);
    let plan = dir.join("plan.json");
    expect_code(&run(&["solve", "--mu", s(&mu), "--nu", s(&nu), "--cost", s(&cost), "-o", s(&plan)]), EXIT_OK)?;
    let cert = dir.join("cert.json");
    let o = run(&["check", "--plan", s(&plan), "--cost", s(&cost), "--mu", s(&mu), "--nu", s(&nu), "--out", s(&cert)]);
    expect_code(&o, EXIT_OK)?;
    let c: CertificateFile = reparse(&o.stdout)?;
    ensure(c == CertificateFile::Monotone { tol: 1e-9 }, format!("{c:?}"))?;
    ensure(fs::read_to_string(&cert).unwrap() == o.stdout, "--out differs from stdout")
}

fn check_torus_gamma2(dir: &Path) -> Result<(), String> {
    let pairs: Vec<String> = (0..5).map(|k| format!("[{k},{}]", (k + 1) % 5)).collect();
    let support = write(dir, "gamma2.json", &format!(r#"{{"pairs":[{}]}}"#, pairs.join(",")));
    let cost = write(dir, "torus.json", r#"{"kind":"torus","n":5}"#);
    let o = run(&["check", "--plan", s(&support), "--cost", s(&cost)]);
    expect_code(&o, EXIT_NOT_MONOTONE)?;
    match reparse::<CertificateFile>(&o.stdout)? {
        CertificateFile::Violated { cycle, improvement, pairs, tol } => {
            ensure(cycle.len() == 5 && pairs.len() == 5, format!("cycle {cycle:?}"))?;
            ensure(improvement == 5.0 && tol == Some(1e-9), format!("improvement {improvement}"))
        }
        other => Err(format!("expected a violation, got {other:?}")),
    }
}

fn check_infinite_support(dir: &Path) -> Result<(), String> {
    let plan = write(dir, "plan.json", r#"{"entries":[[0,1,0.5],[1,0,0.5]],"n":2,"m":2}"#);
    let cost = write(dir, "m.json", r#"{"kind":"matrix","matrix":[[0,"inf"],[1,0]]}"#);
    let o = run(&["check", "--plan", s(&plan), "--cost", s(&cost)]);
    expect_code(&o, EXIT_INFINITE_SUPPORT)?;
    let o = run(&["potentials", "--plan", s(&plan), "--cost", s(&cost)]);
    expect_code(&o, EXIT_INFINITE_SUPPORT)
}

fn potentials_optimal(dir: &Path) -> Result<(), String> {
    let mu = write(dir, "mu.json", r#"{"points":[[0.1],[0.4],[0.9],[1.3]],"weights":[0.1,0.2,0.3,0.4]}"#);
    let nu = write(dir, "nu.json", r#"{"points":[[0.0],[0.5],[2.0]],"weights":[0.5,0.25,0.25]}"#);
    let cost = write(dir, "p.json", r#"{"kind":"pnorm","p":1.5}"#);
    let plan = dir.join("plan.json");
    expect_code(&run(&["solve", "--mu", s(&mu), "--nu", s(&nu), "--cost", s(&cost), "-o", s(&plan)]), EXIT_OK)?;
    let out = dir.join("pot.json");
    let o = run(&["potentials", "--plan", s(&plan), "--cost", s(&cost), "--mu", s(&mu), "--nu", s(&nu), "-o", s(&out)]);
    expect_code(&o, EXIT_OK)?;
    let file: PotentialsFile = reparse(&o.stdout)?;
    let gap = file.gap.ok_or("missing gap")?;
    ensure(gap.abs() <= 1e-8, format!("gap {gap}"))?;
    ensure(o.stderr.contains("gap"), "gap not printed")?;
    let pp = file.to_pair().map_err(|e| e.to_string())?;
    ensure(PotentialsFile { dual_value: file.dual_value, gap: file.gap, ..PotentialsFile::from_pair(&pp) } == file, "domain round trip")?;
    let spec = load_json::<CostFile>(&cost).unwrap().to_spec().unwrap();
    let m = load_json::<MeasureFile>(&mu).unwrap().to_measure().unwrap();
    let n = load_json::<MeasureFile>(&nu).unwrap().to_measure().unwrap();
    let costs = otcert::cost_matrix(&spec, &m, &n).unwrap();
    ensure(verify_feasibility(&pp, &costs, 1e-9).unwrap().passed, "re-parsed potentials infeasible")
}

fn potentials_torus(dir: &Path) -> Result<(), String> {
    let cost = write(dir, "torus.json", r#"{"kind":"torus","n":6}"#);
    let g1 = write(dir, "g1.json", r#"{"pairs":[[0,0],[1,1],[2,2],[3,3],[4,4],[5,5]]}"#);
    let o = run(&["potentials", "--plan", s(&g1), "--cost", s(&cost)]);
    expect_code(&o, EXIT_OK)?;
    let file: PotentialsFile = reparse(&o.stdout)?;
    for k in 0..6 {
        ensure(file.phi[k].0 + file.psi[k].0 == 1.0, format!("phi + psi at {k}"))?;
    }
    let g2 = write(dir, "g2.json", r#"{"pairs":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,0]]}"#);
    let o = run(&["potentials", "--plan", s(&g2), "--cost", s(&cost)]);
    expect_code(&o, EXIT_NOT_MONOTONE)?;
    ensure(o.stderr.contains("cycle"), format!("stderr {:?}", o.stderr))
}

fn approx_config(dir: &Path, schedule: &str, mu: &str, nu: &str) -> PathBuf {
    write(
        dir,
        "approx.json",
        &format!(r#"{{"mu":{mu},"nu":{nu},"cost":{{"kind":"sqeuclidean"}},"schedule":{schedule},"seed":11}}"#),
    )
}

fn approx_csv_round_trip(report_text: &str) -> Result<ConvergenceReport, String> {
    let report = read_report_csv(report_text.as_bytes()).map_err(|e| e.to_string())?;
    ensure(report_csv_string(&report) == report_text, "csv re-serialization differs")?;
    Ok(report)
}

fn approx_uniform_shift(dir: &Path) -> Result<(), String> {
    let cfg = approx_config(
        dir,
        "[50,100,200,400,800]",
        r#"{"kind":"uniform","lo":0,"hi":1}"#,
        r#"{"kind":"uniform","lo":1,"hi":2}"#,
    );
    let out = dir.join("report.csv");
    let o = run(&["approx", s(&cfg), "--out", s(&out)]);
    expect_code(&o, EXIT_OK)?;
    let report = approx_csv_round_trip(&o.stdout)?;
    ensure(fs::read_to_string(&out).unwrap() == o.stdout, "--out differs from stdout")?;
    let last = report.rows.last().ok_or("no rows")?;
    ensure(last.n == 800 && (last.cost - 1.0).abs() <= 0.05, format!("final row {last:?}"))?;
    ensure(report.reference.is_some_and(|r| (r - 1.0).abs() < 1e-6), "reference")?;
    ensure(o.stderr.contains("n = 800"), "summary missing")
}

fn approx_same_cloud(dir: &Path) -> Result<(), String> {
    let cloud = r#"{"kind":"point_cloud","points":[[0.25,1.0]]}"#;
    let cfg = approx_config(dir, "[5,10,20]", cloud, cloud);
    let o = run(&["approx", s(&cfg)]);
    expect_code(&o, EXIT_OK)?;
    let report = approx_csv_round_trip(&o.stdout)?;
    ensure(report.rows.iter().all(|r| r.cost == 0.0), "nonzero cost")
}

fn approx_tiny_and_json(dir: &Path) -> Result<(), String> {
    let cfg = approx_config(dir, "[10]", r#"{"kind":"uniform","lo":0,"hi":1}"#, r#"{"kind":"uniform","lo":0,"hi":2}"#);
    let o = run(&["approx", s(&cfg)]);
    expect_code(&o, EXIT_OK)?;
    ensure(o.stdout.starts_with("n,cost,dual_gap,wall_ms\n"), "header")?;
    let report = approx_csv_round_trip(&o.stdout)?;
    ensure(report.rows.len() == 1 && report.seed == 11, "one row")?;
    let o = run(&["approx", s(&cfg), "--format", "json", "--seed", "4"]);
    expect_code(&o, EXIT_OK)?;
    let report: ConvergenceReport = reparse(&o.stdout)?;
    ensure(report.seed == 4, "seed override")?;
    let bad = approx_config(dir, "[10, 5]", r#"{"kind":"uniform","lo":0,"hi":1}"#, r#"{"kind":"uniform","lo":0,"hi":1}"#);
    expect_code(&run(&["approx", s(&bad)]), EXIT_PARSE)
}

fn torus_gamma1(_: &Path) -> Result<(), String> {
    let o = run(&["torus", "5", "gamma1"]);
    expect_code(&o, EXIT_OK)?;
    let t: TorusFile = reparse(&o.stdout)?;
    ensure(t.plan_cost == CostValue(1.0) && t.dual_value == Some(PotentialEntry(1.0)), format!("{t:?}"))?;
    ensure(t.certificate.is_monotone() && t.feasible == Some(true), "certificate")
}

fn torus_gamma2(_: &Path) -> Result<(), String> {
    for n in [2usize, 5] {
        let o = run(&["torus", &n.to_string(), "gamma2"]);
        expect_code(&o, EXIT_NOT_MONOTONE)?;
        let t: TorusFile = reparse(&o.stdout)?;
        ensure(t.plan_cost == CostValue(2.0) && t.potentials.is_none(), format!("{t:?}"))?;
        match t.certificate {
            CertificateFile::Violated { cycle, improvement, .. } => {
                ensure(cycle.len() == n && improvement == n as f64, format!("cycle {cycle:?}"))?
            }
            other => return Err(format!("{other:?}")),
        }
        ensure(o.stderr.contains("no potential pair"), "missing explanation")?;
    }
    Ok(())
}

fn bad_arguments(_: &Path) -> Result<(), String> {
    expect_code(&run(&["torus", "1"]), EXIT_PARSE)?;
    expect_code(&run(&["torus", "5", "gamma3"]), EXIT_PARSE)?;
    expect_code(&run(&["frobnicate"]), EXIT_PARSE)?;
    expect_code(&run(&["torus", "5", "--format", "csv"]), EXIT_PARSE)?;
    let help = run(&["--help"]);
    expect_code(&help, EXIT_OK)?;
    ensure(help.stdout.contains("--tol") && help.stdout.contains("default"), "help text")
}

pub fn scenarios() -> Vec<Scenario> {
    macro_rules! sc {
        ($($f:ident),* $(,)?) => { vec![$(Scenario { name: stringify!($f), run: $f }),*] };
    }
    sc![
        solve_identity,
        solve_two_point,
        solve_infeasible,
        solve_malformed,
        check_optimal,
        check_torus_gamma2,
        check_infinite_support,
        potentials_optimal,
        potentials_torus,
        approx_uniform_shift,
        approx_same_cloud,
        approx_tiny_and_json,
        torus_gamma1,
        torus_gamma2,
        bad_arguments,
    ]
}

/// Run every scenario in its own scratch directory; returns the failures.
pub fn run_all() -> Vec<(&'static str, String)> {
    scenarios()
        .into_iter()
        .filter_map(|sc| {
            let dir = tempfile::tempdir().unwrap();
            (sc.run)(dir.path()).err().map(|e| (sc.name, e))
        })
        .collect()
}
