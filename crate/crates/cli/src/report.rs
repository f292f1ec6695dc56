//! Report assembly. Every numeric field prints at 1e-12 precision so two
//! runs of the same config agree byte for byte; the generation timestamp is
//! the single `#`-prefixed metadata line and everything after it is
//! deterministic.

use std::fmt::Display;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub struct Report {
    body: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(body, "command {command}");
        Report { body }
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.body, "{key} {value}");
    }

    pub fn num_line(&mut self, key: &str, x: f64) {
        let _ = writeln!(self.body, "{key} {}", num(x));
    }

    pub fn section(&mut self, name: &str) {
        let _ = writeln!(self.body, "[{name}]");
    }

    pub fn render(&self) -> String {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("# generated {ts}\n{}", self.body)
    }
}
