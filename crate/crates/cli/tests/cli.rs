mod common;

use std::net::TcpListener;
use std::process::Stdio;

use serde_json::Value;
use topicrec::corpus::ItemFormat;
use topicrec::{build_corpus, build_similarity, load_items, train, LdaHyperparams, ModelFile, PreprocessConfig};
use topicrec_cli::commands::{self, SweepReport};

use common::{bin, data, run, train_sample};

#[test]
fn train_writes_loadable_model_and_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    let out = train_sample(&model, 5, 1, 200);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("mean UMass coherence"), "{stdout}");
    assert_eq!(stdout.lines().count(), 6);

    let loaded = ModelFile::load(&model).unwrap();
    assert_eq!(loaded.model.topics(), 5);
    assert_eq!(loaded.model.item_ids().len(), 40);
    assert_eq!(loaded.similarity.as_ref().unwrap(), &build_similarity(&loaded.model));
    let report: topicrec::CoherenceReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.bin.coherence.json")).unwrap()).unwrap();
    assert_eq!(report.per_topic.len(), 5);
}

#[test]
fn cli_train_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 4, 9, 150).status.success());

    let items = load_items(data("sample_items.jsonl"), ItemFormat::Jsonl).unwrap();
    let corpus = build_corpus(&items, true, &PreprocessConfig::default()).unwrap();
    let hyper = LdaHyperparams {
        seed: 9,
        iterations: 150,
        ..LdaHyperparams::new(4)
    };
    let lib = train(&corpus, &hyper).unwrap();
    let lib_file = ModelFile::new(lib.clone(), Some(build_similarity(&lib))).unwrap();
    assert_eq!(std::fs::read(&model).unwrap(), lib_file.to_bytes());
}

#[test]
fn bad_path_exits_2() {
    let out = run(&[
        "train",
        "--items",
        "/nonexistent/items.jsonl",
        "--topics",
        "3",
        "--output",
        "/tmp/x.bin",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/nonexistent/items.jsonl"), "{err}");

    let out = run(&["export", "--model", "/nonexistent/model.bin"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_model_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.bin");
    std::fs::write(&p, b"NOTAMODEL").unwrap();
    let out = run(&["export", "--model", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recommend_matches_library_and_row_argmax() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 5, 2, 200).status.success());
    let file = ModelFile::load(&model).unwrap();
    let ids = file.model.item_ids().to_vec();

    let ratings = dir.path().join("r.json");
    std::fs::write(&ratings, format!(r#"{{"{}": 5}}"#, ids[3])).unwrap();
    let out = run(&[
        "recommend",
        "--model",
        model.to_str().unwrap(),
        "--ratings",
        ratings.to_str().unwrap(),
        "-k",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let parsed = commands::read_ratings(&ratings).unwrap();
    let lib = commands::recommend_from_file(&file, &parsed, 4, topicrec::DEFAULT_TOP_TERMS).unwrap();
    assert_eq!(out.stdout, commands::recommendation_json(&lib).into_bytes());

    // A single top rating puts the most similar other item first.
    let sim = file.similarity.as_ref().unwrap();
    let best = (0..ids.len())
        .filter(|&i| i != 3)
        .max_by(|&a, &b| {
            sim.get(a, 3)
                .total_cmp(&sim.get(b, 3))
                .then_with(|| ids[b].cmp(&ids[a]))
        })
        .unwrap();
    assert_eq!(lib.ranked[0].item_id, ids[best]);
}

#[test]
fn recommend_rejects_zero_k_and_unknown_items() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 3, 2, 50).status.success());
    let ratings = dir.path().join("r.json");
    std::fs::write(&ratings, r#"{"NG1000": 5}"#).unwrap();
    let args = [
        "recommend",
        "--model",
        model.to_str().unwrap(),
        "--ratings",
        ratings.to_str().unwrap(),
    ];

    let out = bin().args(args).args(["-k", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));

    std::fs::write(&ratings, r#"{"NG1000": 5, "NOPE42": 3}"#).unwrap();
    let out = bin().args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOPE42"));

    std::fs::write(&ratings, r#"{"NG1000": 9}"#).unwrap();
    let out = bin().args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_csv_and_compare_json() {
    let items = data("sample_items.jsonl");
    let out = run(&[
        "sweep",
        "--items",
        items.to_str().unwrap(),
        "--topics",
        "2,3",
        "--iterations",
        "60",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "K,mean_coherence");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,") && lines[2].starts_with("3,"));

    let out = run(&[
        "sweep",
        "--items",
        items.to_str().unwrap(),
        "--topics",
        "2,3",
        "--iterations",
        "60",
        "--compare-enrichment",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: SweepReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.series.len(), 2);
    assert_eq!(report.series[0].name, "D");
    assert_eq!(report.series[1].name, "DE");
    for s in &report.series {
        for row in &s.rows {
            let mean = row.report.per_topic.iter().sum::<f64>() / row.report.per_topic.len() as f64;
            assert!((mean - row.mean_coherence).abs() < 1e-12);
            assert_eq!(row.report.per_topic.len(), row.topics);
        }
    }
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 3, 4, 50).status.success());
    let out = run(&["export", "--model", model.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["magic"], "TOPICREC");
    let back = ModelFile::from_json(&text).unwrap();
    let orig = ModelFile::load(&model).unwrap();
    assert_eq!(back.model.item_ids(), orig.model.item_ids());
    for (a, b) in back.model.phi().iter().zip(orig.model.phi()) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn serve_fails_on_busy_port() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 3, 4, 50).status.success());
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let status = bin()
        .args(["serve", "--model", model.to_str().unwrap()])
        .args(["--items", data("sample_items.jsonl").to_str().unwrap()])
        .args([
            "--bind",
            &addr,
            "--ratings-log",
            dir.path().join("r.jsonl").to_str().unwrap(),
        ])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn ratings_log_flag_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    assert!(train_sample(&model, 3, 4, 50).status.success());
    let (env_log, flag_log) = (dir.path().join("env.jsonl"), dir.path().join("flag.jsonl"));
    let mut child = bin()
        .args(["serve", "--model", model.to_str().unwrap()])
        .args(["--items", data("sample_items.jsonl").to_str().unwrap()])
        .args(["--bind", "127.0.0.1:0", "--ratings-log", flag_log.to_str().unwrap()])
        .env("TOPICREC_RATINGS_LOG", &env_log)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    std::io::BufRead::read_line(&mut std::io::BufReader::new(child.stdout.take().unwrap()), &mut line).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(flag_log.exists());
    assert!(!env_log.exists());
}
