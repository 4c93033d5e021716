//! Report rows, their CSV form and the model-by-setting table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One (task pair, setting, model) cell. `mean` is empty when every
/// request failed; `failed` counts requests without a score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task_pair: String,
    pub setting: String,
    pub model: String,
    pub metric: String,
    pub mean: Option<f64>,
    pub replications: usize,
    pub failed: usize,
}

pub fn write_report_csv<W: Write>(w: W, rows: &[ReportRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(r: R) -> Result<Vec<ReportRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let rows = rd
        .deserialize()
        .collect::<std::result::Result<Vec<ReportRow>, _>>()?;
    Ok(rows)
}

fn setting_rank(s: &str) -> usize {
    compose_tasks::Setting::ALL
        .iter()
        .position(|x| x.as_str() == s)
        .unwrap_or(usize::MAX)
}

/// Rows are (task pair, setting, metric), columns are models, both in a
/// fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportTable {
    pub models: Vec<String>,
    pub rows: Vec<(String, String, String)>,
    cells: BTreeMap<(usize, usize), ReportRow>,
}

impl ReportTable {
    pub fn new(rows: &[ReportRow]) -> Self {
        let models: Vec<String> = rows
            .iter()
            .map(|r| r.model.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut keys: Vec<(String, String, String)> = rows
            .iter()
            .map(|r| (r.task_pair.clone(), r.setting.clone(), r.metric.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        keys.sort_by(|a, b| {
            (&a.0, setting_rank(&a.1), &a.1, &a.2).cmp(&(&b.0, setting_rank(&b.1), &b.1, &b.2))
        });
        let mut cells = BTreeMap::new();
        for r in rows {
            let row = keys
                .iter()
                .position(|k| k.0 == r.task_pair && k.1 == r.setting && k.2 == r.metric)
                .unwrap();
            let col = models.iter().position(|m| *m == r.model).unwrap();
            cells.insert((row, col), r.clone());
        }
        Self {
            models,
            rows: keys,
            cells,
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&ReportRow> {
        self.cells.get(&(row, col))
    }

    /// Percentages rounded to integers; `*` marks cells with failed
    /// requests, `-` cells with no data.
    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| task | setting | metric |");
        for m in &self.models {
            s.push_str(&format!(" {m} |"));
        }
        s.push_str("\n|---|---|---|");
        s.push_str(&"---:|".repeat(self.models.len()));
        s.push('\n');
        for (i, (task, setting, metric)) in self.rows.iter().enumerate() {
            s.push_str(&format!("| {task} | {setting} | {metric} |"));
            for j in 0..self.models.len() {
                let text = match self.cell(i, j) {
                    None => "-".to_string(),
                    Some(c) => {
                        let v = c
                            .mean
                            .map_or("-".to_string(), |m| format!("{:.0}", m * 100.0));
                        if c.failed > 0 {
                            format!("{v}*")
                        } else {
                            v
                        }
                    }
                };
                s.push_str(&format!(" {text} |"));
            }
            s.push('\n');
        }
        s
    }
}
