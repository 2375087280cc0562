#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn gaussdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parsed CSV: column names and rows of raw cells.
pub struct Csv {
    pub comment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut lines = text.lines();
        let comment = lines.next().expect("comment line").to_string();
        assert!(comment.starts_with("# gaussdyn-version "), "{comment}");
        assert!(comment.contains(", scenario-hash "), "{comment}");
        let columns = lines
            .next()
            .expect("header")
            .split(',')
            .map(str::to_string)
            .collect::<Vec<_>>();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        for r in &rows {
            assert_eq!(r.len(), columns.len());
        }
        Csv {
            comment,
            columns,
            rows,
        }
    }

    pub fn col(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn text(&self, name: &str) -> Vec<&str> {
        let i = self.col(name);
        self.rows.iter().map(|r| r[i].as_str()).collect()
    }

    pub fn num(&self, name: &str) -> Vec<f64> {
        self.text(name)
            .into_iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }
}

pub fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Sign changes of a series, treating |x| ≤ tol as zero.
pub fn sign_changes(xs: &[f64], tol: f64) -> usize {
    let signs: Vec<i8> = xs
        .iter()
        .filter(|x| x.abs() > tol)
        .map(|x| if *x > 0.0 { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Initial states relaxing towards the asymptote (n_f, m_c,f) at R = 1,
/// sampled on p = 1 − e^{−γt} for `samples` points of p ∈ [0, 1).
pub fn relaxation_scenario(n0: f64, m0: f64, mc0: f64, n_f: f64, samples: usize) -> String {
    // asymptote params have λ = 1, κ = 1, decay rate 2(κ + λ) = 4
    let times: Vec<String> = (0..samples)
        .map(|i| {
            let p = i as f64 / samples as f64;
            format!("{:e}", -(1.0 - p).ln() / 4.0)
        })
        .collect();
    format!(
        r#"{{"schema": 1,
            "params": {{"asymptote": {{"n_f": {n_f}, "mc_f": 1, "R": 1}}}},
            "initial_state": {{"custom": [{n0}, {n0}, {m0}, 0, {m0}, 0, {mc0}, 0, 0, 0]}},
            "times": [{}]}}"#,
        times.join(", ")
    )
}
