//! Reporting harness for the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite is a package of its own because one criterion is expected to
//! fail, and cargo stops at the first failing test binary. This package
//! sorts last in the workspace, so every other crate is tested first.

use std::sync::Mutex;
use std::time::Instant;

/// Outcome of one criterion.
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

pub fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

// Criteria run one at a time so that the reported times are their own.
static SERIAL: Mutex<()> = Mutex::new(());

/// Runs criterion `n`, prints
/// `acceptance NN PASS|FAIL <name>: <detail> [<seconds> s]` and panics on
/// failure. Exceeding `budget_s` counts as a failure.
pub fn run(n: u32, name: &str, budget_s: Option<f64>, body: impl FnOnce() -> Verdict) {
    let _turn = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut v = body();
    let secs = start.elapsed().as_secs_f64();
    if let Some(b) = budget_s {
        if secs > b {
            v.pass = false;
            v.detail.push_str(&format!("; over the {b} s budget"));
        }
    }
    println!("{}", line(n, name, &v, secs));
    assert!(v.pass, "acceptance {n:02} failed: {}", v.detail);
}

fn line(n: u32, name: &str, v: &Verdict, secs: f64) -> String {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    format!("acceptance {n:02} {tag} {name}: {} [{secs:.2} s]", v.detail)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let v = verdict(false, "x");
        assert_eq!(line(3, "lp", &v, 0.5), "acceptance 03 FAIL lp: x [0.50 s]");
    }

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|t| 2.0 - 0.5 * t).collect();
        assert!((slope(&x, &y) + 0.5).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "acceptance 01 failed")]
    fn failure_panics() {
        run(1, "t", None, || verdict(false, "no"));
    }
}
