use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spaceform"))
        .args(args)
        .env("SPACEFORM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_rot_polar_records_curvature_one_ninth() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--surface", "rot_polar", "--c", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    let k = r["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().contains("gaussian curvature")).unwrap();
    assert!((k["target"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(k["pass"], true);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| !c["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn verify_veronese_records_normal_form() {
    let o = run(&["verify", "--surface", "veronese"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS") && l.contains("5.773503e-1")));
}

#[test]
fn verify_all_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["verify", "--all", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--surface", "no_such_surface"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--surface", "rot_polar"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["leaf", "--c", "1", "--R", "0.2"]).status.code(), Some(2));
    assert_eq!(run(&["leaf", "--c", "1", "--R", "0"]).status.code(), Some(2));
    assert_eq!(run(&["export", "--surface", "veronese", "--grid", "4by4", "--out", "/dev/null"]).status.code(), Some(2));
}

#[test]
fn leaf_topology_tags() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("leaf.csv");
    let o = run(&["leaf", "--c", "1", "--R", "0.12", "--n", "21", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("pair_of_pants_union waist_radius="));
    let body = fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().next(), Some("u0,u1,u2,L"));
    for row in body.lines().skip(1) {
        let l: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((l - 0.12).abs() < 1e-10);
    }
    let o = run(&["leaf", "--c", "-1", "--R", "0.12", "--n", "21"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("two_cylinders"));
}

fn check_obj(body: &str) -> (usize, usize) {
    let nv = body.lines().filter(|l| l.starts_with("v ")).count();
    let mut nf = 0;
    for l in body.lines().filter(|l| l.starts_with("f ")) {
        let idx: Vec<usize> = l.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
        assert_eq!(idx.len(), 3);
        assert!(idx.iter().all(|&i| i >= 1 && i <= nv));
        nf += 1;
    }
    for l in body.lines().filter(|l| l.starts_with("v ")) {
        assert_eq!(l.split_whitespace().skip(1).filter(|t| t.parse::<f64>().unwrap().is_finite()).count(), 3);
    }
    (nv, nf)
}

#[test]
fn generate_writes_mesh_curvature_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["generate", "--c", "1", "--R", "0.1", "--patch", "12", "--export", "obj", "--dir", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (nv, nf) = check_obj(&fs::read_to_string(dir.path().join("generated_c1_R0.1.obj")).unwrap());
    assert_eq!(nv, 144);
    assert_eq!(nf, 2 * 11 * 11);
    let curv = fs::read_to_string(dir.path().join("generated_c1_R0.1_curvature.csv")).unwrap();
    assert_eq!(curv.lines().count(), 1 + 144);
    for row in curv.lines().skip(1) {
        let k: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((k - 1.0 / 9.0).abs() < 1e-4);
    }
    let r = report(&dir.path().join("generated_c1_R0.1_report.json"));
    assert_eq!(r["command"], "generate");
}

#[test]
fn export_rot_polar_vertex_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rot.obj");
    let o = run(&["export", "--surface", "rot_polar", "--c", "1", "--grid", "15x20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.contains("projection: stereographic"));
    assert_eq!(check_obj(&body).0, 300);
    let ply = dir.path().join("rot.ply");
    let o = run(&["export", "--surface", "rot_polar", "--c", "-1", "--grid", "15x20", "--format", "ply", "--out", ply.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&ply).unwrap().contains("element vertex 300"));
}

#[test]
fn export_crease_rows_and_beta_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tube.csv");
    let o = run(&["export", "--surface", "fhat_c", "--c", "1", "--fixed", "0.6150", "--grid", "6x6", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = fs::read_to_string(&out).unwrap();
    let header = body.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.ends_with("x1,x2,x3,x4,x5,crease_proximity"));
    let rows: Vec<&str> = body.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r.ends_with(",1")));

    let beta = dir.path().join("beta.csv");
    let o = run(&["export", "--surface", "beta", "--grid", "10x20", "--out", beta.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = fs::read_to_string(&beta).unwrap();
    assert_eq!(body.lines().next(), Some("r,x,y,residual"));
    assert_eq!(body.lines().count(), 201);
    for row in body.lines().skip(1) {
        let res: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(res.abs() <= 1e-10);
    }
}
