//! Benchmark summaries: an aligned text table and JSON rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Which quantity a row averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Optimality gap in percent.
    Gap,
    /// Improvement ratio in percent.
    Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub n: usize,
    pub p: usize,
    pub method: String,
    pub metric: Metric,
    /// Mean of the metric in percent; `None` when no oracle was available.
    pub value: Option<f64>,
    pub mean_objective: f64,
    /// Mean solver seconds per instance.
    pub runtime: f64,
    pub instances: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// One JSON object per line.
    pub fn to_rows(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("row serialises"));
            out.push('\n');
        }
        out
    }

    pub fn from_rows(text: &str) -> Result<Self, serde_json::Error> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { rows })
    }

    pub fn to_table(&self) -> String {
        let header = [
            "dataset",
            "n",
            "p",
            "method",
            "metric",
            "mean (%)",
            "objective",
            "time (s)",
            "instances",
            "seed",
        ];
        let cells: Vec<[String; 10]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.dataset.clone(),
                    r.n.to_string(),
                    r.p.to_string(),
                    r.method.clone(),
                    match r.metric {
                        Metric::Gap => "gap".into(),
                        Metric::Q => "Q".into(),
                    },
                    r.value.map_or_else(|| "n/a".into(), |v| format!("{v:.2}")),
                    format!("{:.2}", r.mean_objective),
                    format!("{:.4}", r.runtime),
                    r.instances.to_string(),
                    r.seed.to_string(),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, items: &[String]| {
            let parts: Vec<String> = items
                .iter()
                .zip(&widths)
                .enumerate()
                // Text columns left-aligned, numbers right-aligned.
                .map(|(i, (c, w))| {
                    if i == 0 || i == 3 || i == 4 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &header.map(String::from));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for row in &cells {
            line(&mut out, row);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchReport {
        BenchReport {
            rows: vec![
                BenchRow {
                    dataset: "Grid_64".into(),
                    n: 64,
                    p: 6,
                    method: "greedy-swap".into(),
                    metric: Metric::Gap,
                    value: Some(0.125),
                    mean_objective: 123456.5,
                    runtime: 0.01,
                    instances: 10,
                    seed: 0,
                },
                BenchRow {
                    dataset: "Grid_64".into(),
                    n: 64,
                    p: 6,
                    method: "random".into(),
                    metric: Metric::Gap,
                    value: None,
                    mean_objective: 2.0,
                    runtime: 0.0,
                    instances: 10,
                    seed: 0,
                },
            ],
        }
    }

    #[test]
    fn rows_round_trip() {
        let r = sample();
        assert_eq!(BenchReport::from_rows(&r.to_rows()).unwrap(), r);
    }

    #[test]
    fn table_is_aligned() {
        let table = sample().to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].contains("n/a"));
        let col = lines[0].find("method").unwrap();
        assert_eq!(lines[2].find("greedy-swap"), Some(col));
        assert_eq!(lines[3].find("random"), Some(col));
    }
}
