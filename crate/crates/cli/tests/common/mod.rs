#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_topicrec"));
    c.env("RUST_LOG", "warn");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn topicrec")
}

/// `topicrec train` on the sample collection.
pub fn train_sample(out: &Path, topics: usize, seed: u64, iterations: usize) -> Output {
    run(&[
        "train",
        "--items",
        data("sample_items.jsonl").to_str().unwrap(),
        "--enrich",
        "--topics",
        &topics.to_string(),
        "--seed",
        &seed.to_string(),
        "--iterations",
        &iterations.to_string(),
        "--output",
        out.to_str().unwrap(),
    ])
}

pub struct Server {
    pub child: Child,
    pub base: String,
}

impl Server {
    /// Starts `topicrec serve` on an ephemeral port and waits for its address.
    pub fn start(model: &Path, log: &Path, features: bool) -> Server {
        let mut cmd = bin();
        cmd.args(["serve", "--model", model.to_str().unwrap()])
            .args(["--items", data("sample_items.jsonl").to_str().unwrap()])
            .args(["--bind", "127.0.0.1:0"])
            .env("TOPICREC_RATINGS_LOG", log)
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        if features {
            cmd.args(["--features", data("sample_features.csv").to_str().unwrap()]);
        }
        let mut child = cmd.spawn().expect("spawn server");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Server { child, base }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// SIGKILL, no graceful shutdown.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder().http_status_as_error(false).build().into()
}
