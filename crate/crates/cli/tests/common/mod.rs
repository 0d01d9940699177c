#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Output, Stdio};
use std::time::{Duration, Instant};

use ragscope_core::model::to_document;
use ragscope_core::ExperimentFile;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ragscope")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn write_file(dir: &Path, name: &str, file: &ExperimentFile) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, to_document(file)).unwrap();
    path
}

/// A `ragscope serve` child process on an ephemeral port.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(configure: impl FnOnce(&mut Command)) -> Server {
        let mut cmd = Command::new(bin());
        cmd.args(["serve", "--port", "0"])
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        configure(&mut cmd);
        let mut child = cmd.spawn().expect("server spawns");
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

    pub fn port(&self) -> u16 {
        self.base.rsplit(':').next().unwrap().parse().unwrap()
    }

    /// Sends SIGINT and waits for the process to exit.
    pub fn interrupt(mut self) -> ExitStatus {
        Command::new("kill")
            .args(["-INT", &self.child.id().to_string()])
            .status()
            .unwrap();
        let deadline = Instant::now() + Duration::from_secs(10);
        loop {
            if let Some(status) = self.child.try_wait().unwrap() {
                return status;
            }
            assert!(Instant::now() < deadline, "server did not stop");
            std::thread::sleep(Duration::from_millis(20));
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn client() -> reqwest::blocking::Client {
    reqwest::blocking::Client::new()
}

/// Uploads a document and returns the new session id.
pub fn upload(server: &Server, body: String) -> String {
    let resp = client()
        .post(server.url("/api/experiments"))
        .body(body)
        .send()
        .unwrap();
    assert_eq!(resp.status().as_u16(), 201);
    let v: serde_json::Value = resp.json().unwrap();
    v["session_id"].as_str().unwrap().to_string()
}

pub fn get_bytes(server: &Server, path: &str) -> (u16, Vec<u8>) {
    let resp = client().get(server.url(path)).send().unwrap();
    (resp.status().as_u16(), resp.bytes().unwrap().to_vec())
}
