use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ck_lax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ck-lax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn claim<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["claims"].as_array().unwrap().iter().find(|c| c["claim_id"] == id).unwrap()
}

/// A small config keeps the full pipeline fast in debug builds.
fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, format!("degree_cap = 4\nflows_per_case = 2\nrandom_characters = 10\n{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn flipped_coproduct_breaks_the_structure_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("r.json");
    let o = ck_lax(&["verify-all", "--config", &cfg, "--flip-coproduct", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let r = report(&out);
    let c = claim(&r, "g1.structure_constants");
    assert_eq!(c["status"], "fail");
    assert!(c["witness"].as_str().unwrap().contains("[X1, X2] = -2*X3"), "{}", c["witness"]);
}

#[test]
fn reports_are_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        ck_lax(&["--seed", "7", "verify-all", "--config", &cfg, "--out", p.to_str().unwrap()]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(report(&a)["config"]["seed"], 7);
}

#[test]
fn narrow_window_fails_claims_instead_of_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("r.json");
    let o = ck_lax(&["--window", "-2,2", "verify-all", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let r = report(&out);
    let c = claim(&r, "lax.solution");
    assert_eq!(c["status"], "fail");
    assert!(c["witness"].as_str().unwrap().contains("window"), "{}", c["witness"]);
}

#[test]
fn malformed_config_points_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "seed = 1\nflows_per_case = \"many\"\n").unwrap();
    let o = ck_lax(&["verify-all", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "sede = 1\n").unwrap();
    let o = ck_lax(&["verify-all", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sede"), "{}", stderr(&o));
}

#[test]
fn gen_structure_prints_the_delta1_table() {
    let o = ck_lax(&["gen-structure", "--algebra", "delta1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[X1, X2] = 2*X3\n[X1, X3*] = -2*X2*\n[X2, X3*] = 2*X1*\n");
    let o = ck_lax(&["gen-structure", "--algebra", "g3", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
}

#[test]
fn p_one_flow_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.json");
    let o = ck_lax(&["--seed", "4", "flow", "--algebra", "g2", "--p", "1", "--emit", traj.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in stdout(&o).lines() {
        let (_, value) = line.split_once(" = ").unwrap();
        assert!(!value.contains('t'), "{line}");
    }
    let v = report(&traj);
    for c in v["beta"]["0"].as_array().unwrap() {
        assert!(!c.as_str().unwrap().contains('t'));
    }
}

#[test]
fn negative_p_is_accepted() {
    let o = ck_lax(&["flow", "--algebra", "g1", "--p", "-1", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn flows_on_doubles_are_refused() {
    let o = ck_lax(&["flow", "--algebra", "delta1", "--p", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_round_trips_through_a_trajectory_file() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.json");
    let csv = dir.path().join("trace.csv");
    let emit = format!("{},{}", traj.display(), csv.display());
    let o = ck_lax(&["--seed", "1", "flow", "--algebra", "g1", "--p", "0", "--emit", &emit]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = ck_lax(&["fit", "--algebra", "g1", "--traj", traj.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let h: ck_lax::algebra::MultiPoly = stdout(&o).trim().parse().unwrap();
    let v = report(&traj);
    let parse = |k: &str| -> Vec<ck_lax::algebra::MultiPoly> {
        v["beta"][k].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect()
    };
    let residual = ck_lax::poisson::fit_residual(&h, &parse("0"), &parse("1"));
    assert!(residual.iter().all(|r| r.is_zero()));

    let trace = fs::read_to_string(&csv).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "t,beta0_X1,beta0_X2,beta0_X3,H,rk4_beta0_X1,rk4_beta0_X2,rk4_beta0_X3");
    assert_eq!(lines.count(), 11);
}

#[test]
fn flow_reads_l0_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let l0 = dir.path().join("l0.json");
    // X1 = •, X2 = ladder, X3 = cherry
    fs::write(&l0, r#"{"[]": [[-1, "1"]], "[[]]": [[-1, "2"], [1, "1"]], "[[][]]": []}"#).unwrap();
    let o = ck_lax(&["flow", "--algebra", "g1", "--p", "0", "--L0", l0.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("beta0[X3] = "), "{}", stdout(&o));
}

#[test]
fn hopf_dump_lists_every_tree() {
    let o = ck_lax(&["--degree-cap", "4", "hopf-dump"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 1 + 2 + 4);
    assert!(stdout(&o).contains("Δ([[][]]) = 1*(1 ⊗ [[][]]) + 2*([] ⊗ [[]]) + 1*([],[] ⊗ []) + 1*([[][]] ⊗ 1)"));
}
