use std::path::Path;
use std::process::{Command, Output};

use glq_core::oracle::{benchmark_pairs, golden_values, Integral};
use glq_core::potentials::galerkin_all;
use glq_core::Config;

fn glq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glq")).args(args).env_remove("GLQ_FORMAT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json_pairs(pairs: &[([[f64; 3]; 3], [[f64; 3]; 3])]) -> String {
    let rows: Vec<_> =
        pairs.iter().enumerate().map(|(k, (x, y))| serde_json::json!({"id": format!("p{k}"), "x": x, "y": y})).collect();
    serde_json::to_string(&rows).unwrap()
}

fn arrays(t: &glq_core::geometry::Triangle) -> [[f64; 3]; 3] {
    t.vertices().map(|p| [p.x, p.y, p.z])
}

#[test]
fn benchmark_file_reproduces_reference_rows() {
    let dir = tempfile::tempdir().unwrap();
    let pairs: Vec<_> = benchmark_pairs().unwrap().iter().map(|(x, y)| (arrays(x), arrays(y))).collect();
    let input = write(dir.path(), "bench.json", &json_pairs(&pairs));
    let out = glq(&["eval", &input]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "id,L,M,Lp_x,Lp_y,Lp_z,Mp,contact,branch,regularized");

    let golden = golden_values().unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], format!("p{k}"));
        assert_eq!(row[7], "NoTouch");
        for g in &golden[6 * k..6 * k + 6] {
            let col = match g.which {
                Integral::L => 1,
                Integral::M => 2,
                Integral::Lp(i) => 3 + i,
                Integral::Mp => 6,
            };
            let got: f64 = row[col].parse().unwrap();
            assert!((got - g.value).abs() < 1e-12, "{}: {got} vs {}", g.label, g.value);
        }
    }
}

#[test]
fn printed_numbers_round_trip_to_the_same_bits() {
    let dir = tempfile::tempdir().unwrap();
    let pairs: Vec<_> = benchmark_pairs().unwrap().iter().map(|(x, y)| (arrays(x), arrays(y))).collect();
    let input = write(dir.path(), "bench.json", &json_pairs(&pairs));
    let output = dir.path().join("out.csv");
    let out = glq(&["eval", &input, "-o", output.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&output).unwrap();
    for (line, (tx, ty)) in text.lines().skip(1).zip(benchmark_pairs().unwrap()) {
        let row: Vec<f64> = line.split(',').skip(1).take(6).map(|s| s.parse().unwrap()).collect();
        let o = galerkin_all(&tx, &ty, &Config::default()).unwrap();
        let want = [o.l, o.m, o.lp[0], o.lp[1], o.lp[2], o.mp];
        for k in 0..6 {
            assert_eq!(row[k].to_bits(), want[k].to_bits());
        }
    }
}

#[test]
fn csv_input_and_output_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("id,x1x,x1y,x1z,x2x,x2y,x2z,x3x,x3y,x3z,y1x,y1y,y1z,y2x,y2y,y2z,y3x,y3y,y3z\n# comment\n");
    for k in 0..40 {
        let z = 0.5 + k as f64 * 0.1;
        text += &format!("r{k},0,0,0,1,0,0,0,1,0,0,0,{z},1,0,{z},0,1,{z}\n");
    }
    let input = write(dir.path(), "pairs.csv", &text);
    let one = glq(&["--threads", "1", "eval", &input]);
    let many = glq(&["--threads", "4", "eval", &input]);
    assert!(one.status.success() && many.status.success());
    assert_eq!(stdout(&one), stdout(&many));
    let ids: Vec<String> = stdout(&many).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(ids, (0..40).map(|k| format!("r{k}")).collect::<Vec<_>>());
    assert!(stdout(&many).lines().nth(1).unwrap().ends_with("NoTouch,ParallelPlanes,false"));
}

#[test]
fn empty_input_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "empty.json", "[]");
    let out = glq(&["eval", &input]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "id,L,M,Lp_x,Lp_y,Lp_z,Mp,contact,branch,regularized\n");
}

#[test]
fn malformed_row_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = "id,x1x,x1y,x1z,x2x,x2y,x2z,x3x,x3y,x3z,y1x,y1y,y1z,y2x,y2y,y2z,y3x,y3y,y3z\n\
                good,0,0,0,1,0,0,0,1,0,0,0,1,1,0,1,0,1,1\n\
                bad,0,0,0,1,0,zero,0,1,0,0,0,1,1,0,1,0,1,1\n";
    let input = write(dir.path(), "pairs.csv", text);
    let out = glq(&["eval", &input]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("bad") && err.contains("x2z"), "{err}");

    let input = write(dir.path(), "pairs.txt", "[]");
    assert_eq!(glq(&["eval", &input]).status.code(), Some(2));
    let input = write(dir.path(), "broken.json", "[{\"id\": \"a\", \"x\": [[0,0,0]]}]");
    let out = glq(&["eval", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("record 0"), "{}", stderr(&out));
}

#[test]
fn failing_records_are_reported_and_the_rest_written() {
    let dir = tempfile::tempdir().unwrap();
    let good = ([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]);
    let degenerate = ([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], good.1);
    let input = write(dir.path(), "pairs.json", &json_pairs(&[good, degenerate, good]));
    let out = glq(&["eval", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("record 1") && stderr(&out).contains("degenerate"), "{}", stderr(&out));
    let text = stdout(&out);
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["p0", "p2"]);

    let out = glq(&["eval", "--fail-fast", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "");
}

#[test]
fn json_output_through_environment() {
    let dir = tempfile::tempdir().unwrap();
    let pairs: Vec<_> = benchmark_pairs().unwrap().iter().map(|(x, y)| (arrays(x), arrays(y))).collect();
    let input = write(dir.path(), "bench.json", &json_pairs(&pairs[..1]));
    let out = Command::new(env!("CARGO_BIN_EXE_glq")).args(["eval", &input]).env("GLQ_FORMAT", "json").output().unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((rows[0]["L"].as_f64().unwrap() - 0.139757030669707).abs() < 1e-12);
    assert_eq!(rows[0]["regularized"], false);
}

#[test]
fn validate_passes_and_is_deterministic() {
    let one = glq(&["--threads", "1", "validate"]);
    let many = glq(&["--threads", "4", "validate"]);
    assert_eq!(one.status.code(), Some(0), "{}", stdout(&one));
    assert_eq!(stdout(&one), stdout(&many));
    let text = stdout(&one);
    let row = text.lines().find(|l| l.starts_with("stacked L h=0,")).unwrap();
    let dev: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(dev <= 1e-13, "{row}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn validate_with_zero_tolerance_fails_every_benchmark() {
    let out = glq(&["validate", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let golden = golden_values().unwrap().len();
    let failed = text.lines().filter(|l| l.ends_with(",FAIL")).count();
    assert_eq!(failed, golden);
    assert!(text.lines().filter(|l| l.contains("vs quadrature")).all(|l| l.ends_with(",PASS")));
}

fn footer(text: &str, name: &str) -> String {
    let key = format!("# slope_{name}=");
    text.lines().find_map(|l| l.strip_prefix(&key)).unwrap().to_string()
}

#[test]
fn converge_one_touch_slopes() {
    let out = glq(&["converge", "--kind", "one", "--eps-min", "1e-6", "--eps-max", "1e-2", "--points", "9"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "eps,L,M,Mp,rel_L,rel_M,rel_Mp");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);
    for q in ["L", "M"] {
        let s: f64 = footer(&text, q).parse().unwrap();
        assert!((s - 1.0).abs() <= 0.1, "slope {q} {s}");
    }
}

#[test]
fn converge_two_touch_follows_the_log_model() {
    let out = glq(&["converge", "--kind", "two", "--eps-min", "1e-8", "--eps-max", "1e-6", "--points", "5"]);
    assert!(out.status.success());
    let ratios: Vec<f64> = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            c[6].abs() / (c[0] / (1.0 / c[0]).ln())
        })
        .collect();
    let last = *ratios.last().unwrap();
    assert!(ratios.iter().all(|r| (r / last - 1.0).abs() <= 0.2), "{ratios:?}");
}

#[test]
fn converge_edge_cases() {
    let out = glq(&["converge", "--kind", "two", "--points", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert_eq!(footer(&text, "L"), "n/a");

    let out = glq(&["converge", "--kind", "one", "--eps-min", "1e-12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("offsets must lie"));
    let out = glq(&["converge", "--kind", "one", "--eps-min", "1e-2", "--eps-max", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
}
