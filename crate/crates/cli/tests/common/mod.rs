//! Shared fixtures for CLI tests: synthetic bar files around a Tuesday
//! post-close report and helpers to run the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use breakfit_core::{gbm_path, GbmParams, NoisePath};
use chrono::{Duration, NaiveDateTime};
use tempfile::TempDir;

pub const BREAK_TS: &str = "2021-04-07T09:30:00";
pub const LEFT_START: &str = "2021-04-06T10:00:00";

/// Tuesday post-close filing: effective day Wednesday, admissible.
pub const EVENT_ROW: &str = "2021-04-06T17:00:00,post_close";

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_breakfit"))
}

pub fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process not killed by signal")
}

pub struct Fixture {
    pub dir: TempDir,
}

impl Fixture {
    pub fn new() -> Self {
        Self {
            dir: TempDir::new().expect("tempdir"),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).expect("mkdir");
        }
        std::fs::write(&path, contents).expect("write fixture");
        path
    }
}

/// Bars CSV text on a 5-minute grid from `start`.
pub fn bars_doc(start: &str, prices: &[f64]) -> String {
    let t0: NaiveDateTime = start.parse().expect("valid start");
    let mut doc = String::from("timestamp,price\n");
    for (i, price) in prices.iter().enumerate() {
        let ts = t0 + Duration::minutes(5 * i as i64);
        doc.push_str(&format!("{},{price}\n", ts.format("%Y-%m-%dT%H:%M:%S")));
    }
    doc
}

/// Bars spanning both sides of the Wednesday 09:30 break.
pub fn two_sided_bars(left: &[f64], right: &[f64]) -> String {
    let mut doc = bars_doc(LEFT_START, left);
    let right_doc = bars_doc(BREAK_TS, right);
    doc.push_str(right_doc.strip_prefix("timestamp,price\n").unwrap());
    doc
}

/// Deterministic GBM-ish price column for fixtures.
pub fn gbm_prices(seed: u64, s0: f64, mu: f64, sigma: f64, n_points: usize) -> Vec<f64> {
    let noise = NoisePath::generate(seed, n_points - 1);
    gbm_path(&GbmParams { mu, sigma }, s0, n_points - 1, &noise)
        .expect("valid sim")
        .prices()
        .to_vec()
}

/// Standard single-ticker fixture: events.csv + <ticker>.csv with 30 bars a
/// side around the break, at a low price scale.
#[allow(dead_code)]
pub fn standard_fixture(ticker: &str) -> (Fixture, PathBuf, PathBuf) {
    let fixture = Fixture::new();
    let events = fixture.write(
        "events.csv",
        &format!("ticker,report_time,session\n{ticker},{EVENT_ROW}\n"),
    );
    let left = gbm_prices(11, 3.0, 0.0005, 0.012, 30);
    let right = gbm_prices(12, 0.92 * left.last().unwrap(), -0.001, 0.02, 30);
    let bars = fixture.write(&format!("{ticker}.csv"), &two_sided_bars(&left, &right));
    (fixture, bars, events)
}

#[allow(dead_code)]
pub fn read_file(path: &Path) -> String {
    std::fs::read_to_string(path).expect("readable file")
}
