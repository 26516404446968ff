use std::path::Path;
use std::process::{Command, Output};

use depthsr::io;
use depthsr::upsample::upsample_nn;
use serde_json::Value;

fn dsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsr")).args(args).output().expect("run dsr")
}

fn ok_json(args: &[&str]) -> Value {
    let out = dsr(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn fail_json(args: &[&str]) -> Value {
    let out = dsr(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim().lines().last().unwrap()).expect("json error line")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

const SMALL: [&str; 4] = ["--width", "96", "--height", "72"];

fn synth(dir: &Path, count: &str, seed: &str) -> Value {
    let mut args = vec!["synth", "--count", count, "--seed", seed, "--out", s(dir)];
    args.extend(SMALL);
    ok_json(&args)
}

#[test]
fn synth_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    synth(&a, "1", "7");
    synth(&b, "1", "7");
    assert_eq!(tree_bytes(&a), tree_bytes(&b));
    assert!(a.join("sample_0000").join(io::DEPTH_HR).is_file());
}

#[test]
fn synth_manifest_seeds() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), "0", "7");
    let m: Value = io::read_json(t.path().join("manifest.json")).unwrap();
    assert_eq!(m["samples"].as_array().unwrap().len(), 0);

    let d = t.path().join("ten");
    synth(&d, "10", "7");
    let m: Value = io::read_json(d.join("manifest.json")).unwrap();
    let seeds: Vec<u64> = m["samples"].as_array().unwrap().iter().map(|e| e["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (7..17).collect::<Vec<_>>());
}

#[test]
fn prepare_is_idempotent_and_parallel_safe() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    synth(&a, "3", "1");
    synth(&b, "3", "1");
    let r = ok_json(&["prepare", "--in", s(&a)]);
    assert_eq!(r["samples"].as_array().unwrap().len(), 3);
    let first = tree_bytes(&a);
    ok_json(&["prepare", "--in", s(&a)]);
    assert_eq!(tree_bytes(&a), first);
    ok_json(&["--jobs", "1", "prepare", "--in", s(&b)]);
    assert_eq!(tree_bytes(&b), first);

    let sample = io::read_sample(a.join("sample_0001")).unwrap();
    sample.validate().unwrap();
    assert!(sample.hr_depth.is_fully_defined());
    assert_eq!(sample.lr_depth.unwrap().dims(), (24, 18));
}

#[test]
fn prepare_scale_three_on_full_resolution() {
    let t = tempfile::tempdir().unwrap();
    ok_json(&["synth", "--count", "1", "--out", s(t.path()), "--width", "1680", "--height", "1200", "--fixed"]);
    ok_json(&["prepare", "--in", s(t.path()), "--scale", "3"]);
    let sample = io::read_sample(t.path().join("sample_0000")).unwrap();
    assert_eq!(sample.lr_depth.unwrap().dims(), (560, 400));
    assert_eq!(sample.scale, 3);
}

#[test]
fn config_file_overrides_flags() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("c");
    synth(&d, "1", "3");
    let cfg = t.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scale": 4, "plane": {"object_margin_epsilon": 5.0}, "scene": {"width": 10}}"#).unwrap();
    ok_json(&["prepare", "--in", s(&d), "--scale", "2", "--config", s(&cfg)]);
    let sample = io::read_sample(d.join("sample_0000")).unwrap();
    assert_eq!(sample.lr_depth.unwrap().dims(), (24, 18));

    let bad = t.path().join("bad.json");
    std::fs::write(&bad, r#"{"scale": "four"}"#).unwrap();
    assert!(fail_json(&["prepare", "--in", s(&d), "--config", s(&bad)])["error"].is_string());
}

#[test]
fn evaluate_ground_truth_and_baseline() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), "1", "4");
    ok_json(&["prepare", "--in", s(t.path())]);
    let dir = t.path().join("sample_0000");

    let gt = dir.join(io::DEPTH_HR);
    let ply = t.path().join("gt.ply");
    let r = ok_json(&["evaluate", "--pred", s(&gt), "--sample", s(&dir), "--pcl", "--ply", s(&ply)]);
    assert_eq!(r["rmse"], 0.0);
    assert_eq!(r["object_rmse"], 0.0);
    assert_eq!(r["object_loss"], 0.0);
    let cloud = depthsr::geom::ply::read_ply(&ply).unwrap();
    assert!(cloud.colors.unwrap().iter().all(|c| *c == [0.0, 0.0, 1.0]));

    let sample = io::read_sample(&dir).unwrap();
    let nn = upsample_nn(sample.lr_depth.as_ref().unwrap(), sample.scale).unwrap();
    let pred = t.path().join("nn.pfm");
    io::pfm::write_depth(&pred, &nn).unwrap();
    let r = ok_json(&["evaluate", "--pred", s(&pred), "--sample", s(&dir), "--pcl", "--k", "20", "--ratio", "2.0"]);
    assert!(r["rmse"].as_f64().unwrap().is_finite());
    assert!(r["object_rmse"].as_f64().unwrap() > 0.0);
    let frac = r["point_cloud"]["removed_fraction"].as_f64().unwrap();
    assert!((0.0..1.0).contains(&frac));
    assert!(t.path().join("nn.ply").is_file());

    let sym = ok_json(&["evaluate", "--pred", s(&pred), "--sample", s(&dir), "--pcl", "--symmetric"]);
    assert!(sym["point_cloud"]["distances"]["max"].as_f64() >= r["point_cloud"]["distances"]["max"].as_f64());
}

#[test]
fn evaluate_rejects_wrong_dimensions() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), "1", "4");
    let pred = t.path().join("small.pfm");
    io::pfm::write_depth(&pred, &depthsr::DepthMap::constant(8, 8, 500.0).unwrap()).unwrap();
    let e = fail_json(&["evaluate", "--pred", s(&pred), "--sample", s(&t.path().join("sample_0000"))]);
    assert!(e["error"].as_str().unwrap().contains("prediction: expected (96, 72)"), "{e}");
}

#[test]
fn bench_records_and_stage_names() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), "1", "5");
    let dir = t.path().join("sample_0000");
    let r = ok_json(&["bench", "--in", s(&dir), "--stages", "fill,downsample,objectmap", "--reps", "5"]);
    let recs = r.as_array().unwrap();
    assert_eq!(recs.len(), 3);
    for (rec, stage) in recs.iter().zip(["fill", "downsample", "objectmap"]) {
        assert_eq!(rec["stage"], stage);
        assert_eq!((rec["w"].as_u64(), rec["h"].as_u64()), (Some(96), Some(72)));
        assert_eq!(rec["repetitions"], 5);
        assert!(rec["seconds"].as_f64().unwrap() > 0.0);
    }
    let e = fail_json(&["bench", "--in", s(&dir), "--stages", "fill,sharpen"]);
    assert!(e["error"].as_str().unwrap().contains("sharpen"));
}

#[test]
fn bench_extrapolate() {
    // t = 1e-14 n^2 + 1e-8 n + 0.01 through three points
    let t = |n: f64| 1e-14 * n * n + 1e-8 * n + 0.01;
    let pts: Vec<String> = [(100, 100), (400, 300), (1000, 800)]
        .iter()
        .map(|&(w, h)| format!("{w}x{h}={:.17}", t((w * h) as f64)))
        .collect();
    let mut args = vec!["bench", "extrapolate", "--at", "2000x1500"];
    for p in &pts {
        args.extend(["--point", p.as_str()]);
    }
    let r = ok_json(&args);
    let want = t(3e6);
    assert!((r[0]["seconds"].as_f64().unwrap() - want).abs() <= 1e-9 * want);

    let r = ok_json(&[
        "bench", "extrapolate", "--at", "140x200",
        "--point", "560x800=0.068", "--point", "1120x800=0.091", "--point", "1680x1200=0.184",
    ]);
    let got = r[0]["seconds"].as_f64().unwrap();
    assert!((got - 0.054).abs() <= 0.1 * 0.054, "{got}");

    let e = fail_json(&["bench", "extrapolate", "--at", "10x10", "--point", "5x5=1", "--point", "5x5=2", "--point", "1x1=1"]);
    assert!(e["error"].as_str().unwrap().contains("singular"));
}
