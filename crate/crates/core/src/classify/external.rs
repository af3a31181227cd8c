//! Client side of the line-delimited JSON protocol for classifiers running
//! in a child process.
//!
//! ```text
//! -> {"op":"fit","features":[[...]],"labels":[0,1,...]}   <- {"ok":true}
//! -> {"op":"predict","features":[[...]]}                  <- {"ok":true,"probs":[...]}
//! -> {"op":"shutdown"}                                    <- {"ok":true}
//! failures                                                <- {"ok":false,"error":"..."}
//! ```
//!
//! Each fit/predict session spawns a fresh process.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_finite, check_training, Classifier};
use crate::error::{Error, Result};

pub const DEFAULT_MESSAGE_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum Request<'a> {
    Fit { features: Vec<&'a [f64]>, labels: Vec<u8> },
    Predict { features: Vec<&'a [f64]> },
    Shutdown,
}

#[derive(Deserialize)]
struct Reply {
    ok: bool,
    #[serde(default)]
    probs: Option<Vec<f64>>,
    #[serde(default)]
    error: Option<String>,
}

/// Classifier backed by an external command. `fit` only records the
/// training set; the process is started when predictions are requested.
#[derive(Debug, Clone)]
pub struct ExternalClassifier {
    command: Vec<String>,
    timeout: Duration,
    training: Option<(Array2<f64>, Vec<bool>)>,
}

impl ExternalClassifier {
    /// `command` is split on whitespace into a program and its arguments.
    pub fn new(command: &str) -> Result<Self> {
        let command: Vec<String> = command.split_whitespace().map(str::to_owned).collect();
        if command.is_empty() {
            return Err(Error::InvalidInput("empty external classifier command".into()));
        }
        Ok(Self {
            command,
            timeout: DEFAULT_MESSAGE_TIMEOUT,
            training: None,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

impl Classifier for ExternalClassifier {
    fn fit(&mut self, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()> {
        check_training(features, labels)?;
        self.training = Some((features.to_owned(), labels.to_vec()));
        Ok(())
    }

    fn predict_proba(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let (x, y) = self.training.as_ref().ok_or(Error::NotFitted)?;
        Session::spawn(&self.command, self.timeout)?.run(x.view(), y, features)
    }
}

/// Fits the external classifier on `(features, labels)` and predicts `query`
/// in a single child-process session.
pub fn external_fit_predict(
    command: &str,
    features: ArrayView2<'_, f64>,
    labels: &[bool],
    query: ArrayView2<'_, f64>,
    timeout: Duration,
) -> Result<Vec<f64>> {
    let mut c = ExternalClassifier::new(command)?.with_timeout(timeout);
    c.fit(features, labels)?;
    c.predict_proba(query)
}

struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl Session {
    fn spawn(command: &[String], timeout: Duration) -> Result<Self> {
        let mut child = Command::new(&command[0])
            .args(&command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::protocol("spawn", format!("{}: {e}", command[0])))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            replies: rx,
            timeout,
        })
    }

    fn run(mut self, x: ArrayView2<'_, f64>, y: &[bool], query: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        check_finite(query)?;
        let train_rows = rows(x);
        let query_rows = rows(query);
        self.exchange(
            "fit",
            &Request::Fit {
                features: train_rows.iter().map(Vec::as_slice).collect(),
                labels: y.iter().map(|&v| v as u8).collect(),
            },
        )?;
        let reply = self.exchange(
            "predict",
            &Request::Predict {
                features: query_rows.iter().map(Vec::as_slice).collect(),
            },
        )?;
        let probs = reply
            .probs
            .ok_or_else(|| Error::protocol("predict", "reply has no probs"))?;
        if probs.len() != query.nrows() {
            return Err(Error::protocol(
                "predict",
                format!("expected {} probabilities, got {}", query.nrows(), probs.len()),
            ));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::protocol("predict", "probability out of range"));
        }
        self.exchange("shutdown", &Request::Shutdown)?;
        Ok(probs)
    }

    fn exchange(&mut self, stage: &'static str, request: &Request<'_>) -> Result<Reply> {
        let mut line = serde_json::to_string(request).map_err(|e| Error::protocol(stage, e.to_string()))?;
        line.push('\n');
        let stdin = self.stdin.as_mut().ok_or_else(|| Error::protocol(stage, "stdin closed"))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::protocol(stage, format!("write failed: {e}")))?;
        let raw = match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(raw)) => raw,
            Ok(Err(e)) => return Err(Error::protocol(stage, format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(Error::protocol(stage, format!("no reply within {:?}", self.timeout)))
            }
            Err(RecvTimeoutError::Disconnected) => {
                let status = self.child.wait().ok();
                return Err(Error::protocol(
                    stage,
                    format!("child exited before replying ({})", status.map_or("unknown".into(), |s| s.to_string())),
                ));
            }
        };
        let reply: Reply = serde_json::from_str(&raw)
            .map_err(|e| Error::protocol(stage, format!("malformed reply {raw:?}: {e}")))?;
        if !reply.ok {
            return Err(Error::protocol(
                stage,
                reply.error.unwrap_or_else(|| "unspecified error".into()),
            ));
        }
        Ok(reply)
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        drop(self.stdin.take());
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}

fn rows(x: ArrayView2<'_, f64>) -> Vec<Vec<f64>> {
    x.rows().into_iter().map(|r| r.to_vec()).collect()
}
