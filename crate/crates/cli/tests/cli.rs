use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flowknots::curves::{shapes, write_knot_file};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], threads: Option<usize>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_flowknots"));
    c.current_dir(dir).args(args);
    match threads {
        Some(n) => c.env("AI_THREADS", n.to_string()),
        None => c.env_remove("AI_THREADS"),
    };
    c.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn setup() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = shapes::hopf::<f64>(256);
    write_knot_file(&d.path().join("hopf.txt"), &[a, b]).unwrap();
    write_knot_file(&d.path().join("trefoil.txt"), &[shapes::trefoil::<f64>(128)]).unwrap();
    std::fs::write(d.path().join("b.cfg"), "# tube pair\nfield=tube_pair\nv0=1.0\nr=0.4\n").unwrap();
    std::fs::write(d.path().join("c.cfg"), "field=beltrami_ball\nradius=1.0\n").unwrap();
    std::fs::write(d.path().join("chord.txt"), "1; circle=[1,2]; free=[]; edges=[(1,2)]\n").unwrap();
    d
}

#[test]
fn linking_number_of_the_hopf_link() {
    let d = setup();
    let o = run(d.path(), &["invariant", "--knot", "hopf.txt", "--which", "lk", "--out", "lk.json"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(d.path().join("lk.json"));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-2, "{v}");
    for key in ["std_error", "samples", "rejections", "config", "manifest"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["manifest"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn v2_and_diagram_integrals_of_a_knot() {
    let d = setup();
    let o = run(d.path(), &["invariant", "--knot", "trefoil.txt", "--which", "v2", "--mc", "20000", "--seed", "3"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 0.1, "{v}");
    assert!(v["std_error"].as_f64().unwrap() > 0.0);

    let o = run(d.path(), &["invariant", "--knot", "trefoil.txt", "--which", "ID", "--diagram", "chord.txt"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(d.path(), &["invariant", "--knot", "trefoil.txt", "--which", "ID"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--diagram"));
}

#[test]
fn input_errors_exit_with_two_and_distinct_messages() {
    let d = setup();
    let o = run(d.path(), &["helicity", "--field", "missing.cfg"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config not found"), "{}", stderr(&o));

    std::fs::write(d.path().join("bad.cfg"), "field=tube_pair\ncolour=red\n").unwrap();
    let o = run(d.path(), &["helicity", "--field", "bad.cfg"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key `colour`"), "{}", stderr(&o));

    let o = run(d.path(), &["invariant", "--knot", "nope.txt", "--which", "lk"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read knot file"), "{}", stderr(&o));

    std::fs::write(d.path().join("junk.txt"), "0 0 0\n1 one 0\n").unwrap();
    let o = run(d.path(), &["invariant", "--knot", "junk.txt", "--which", "writhe"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(d.path(), &["helicity", "--field", "b.cfg", "--bogus"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bogus"));

    let o = run(d.path(), &["selftest", "--budget", "huge"], None);
    assert_eq!(o.status.code(), Some(2));

    let o = run(d.path(), &["invariant", "--knot", "trefoil.txt", "--which", "lk"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("two components"));

    let o = run(d.path(), &["helicity", "--field", "b.cfg"], Some(0));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("AI_THREADS"));
}

#[test]
fn helicity_csv_is_reproducible_across_thread_counts() {
    let d = setup();
    let args = ["helicity", "--field", "c.cfg", "--pairs", "40", "--T", "5,10,20", "--seed", "5", "--out", "h.csv"];
    let o = run(d.path(), &args, Some(1));
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read(d.path().join("h.csv")).unwrap();
    let m1 = json(d.path().join("h.csv.manifest.json"));
    let o = run(d.path(), &args, Some(3));
    assert!(o.status.success());
    assert_eq!(std::fs::read(d.path().join("h.csv")).unwrap(), first);
    let m2 = json(d.path().join("h.csv.manifest.json"));
    assert_eq!(m1["config_hash"], m2["config_hash"]);

    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "quantity,T,estimate,std_error,n_pairs,dt,seed");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("helicity,5,"));
    assert!(lines[3].ends_with(",40,0.01,5"));
    let leftovers: Vec<_> = std::fs::read_dir(d.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn config_hash_tracks_inputs() {
    let d = setup();
    let args = ["qhelicity", "--field", "c.cfg", "--pairs", "30", "--T", "5,10,15", "--out", "q.csv"];
    assert!(run(d.path(), &args, None).status.success());
    let h1 = json(d.path().join("q.csv.manifest.json"))["config_hash"].clone();
    std::fs::write(d.path().join("c.cfg"), "field=beltrami_ball\nradius=1.0\n# edited\n").unwrap();
    assert!(run(d.path(), &args, None).status.success());
    let h2 = json(d.path().join("q.csv.manifest.json"))["config_hash"].clone();
    assert_ne!(h1, h2);
}

#[test]
fn bounds_and_convergence_reports() {
    let d = setup();
    let o = run(
        d.path(),
        &["bounds", "--field", "c.cfg", "--pairs", "60", "--T", "10,20,40", "--energy-samples", "20000", "--out", "b.json"],
        None,
    );
    let v = json(d.path().join("b.json"));
    assert_eq!(o.status.success(), v["holds"].as_bool().unwrap());
    assert_eq!(v["canonical"].as_array().unwrap().len(), 5);
    assert!(v["report"]["raw"]["inequalities"].is_array());

    let o = run(d.path(), &["converge", "--field", "c.cfg", "--pairs", "60", "--T", "10,20,40", "--quantity", "crossing"], None);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["rungs"].as_array().unwrap().len(), 3);
    assert!(v.get("stabilized").is_some());
    assert!(matches!(o.status.code(), Some(0 | 1)));
}

#[test]
fn asymptotic_ladders() {
    let d = setup();
    let o = run(d.path(), &["asymptotic", "--field", "c.cfg", "--pairs", "30", "--T", "5,10,15"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("crossing_number,5,"), "{text}");

    let o = run(
        d.path(),
        &["asymptotic", "--field", "c.cfg", "--diagram", "chord.txt", "--pairs", "4", "--points", "64", "--T", "5,10,15"],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
}
