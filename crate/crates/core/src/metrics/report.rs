use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::types::{Complexity, EpisodeResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Split {
    Low,
    High,
    All,
}

impl Split {
    pub const ORDER: [Split; 3] = [Split::Low, Split::High, Split::All];

    pub fn includes(self, subtask_count: u32) -> bool {
        match self {
            Split::Low => Complexity::of(subtask_count) == Complexity::Low,
            Split::High => Complexity::of(subtask_count) == Complexity::High,
            Split::All => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Low => "LOW",
            Split::High => "HIGH",
            Split::All => "ALL",
        }
    }
}

/// Aggregate metrics over one split. `sr` is exactly `successes / n_episodes`;
/// rounding happens only when rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub split: Split,
    pub n_episodes: usize,
    pub successes: usize,
    pub sr: f64,
    pub ne_mean: f64,
    pub bertscore_mean: Option<f64>,
}

impl MetricsReport {
    pub fn from_results(results: &[EpisodeResult], split: Split) -> Self {
        let members: Vec<&EpisodeResult> = results
            .iter()
            .filter(|r| split.includes(r.subtask_count))
            .collect();
        let n = members.len();
        let successes = members.iter().filter(|r| r.success).count();
        let (sr, ne_mean) = if n == 0 {
            (0.0, 0.0)
        } else {
            (
                successes as f64 / n as f64,
                members.iter().map(|r| r.navigation_error).sum::<f64>() / n as f64,
            )
        };
        let sims: Vec<f64> = members.iter().filter_map(|r| r.similarity).collect();
        let bertscore_mean =
            (!sims.is_empty()).then(|| sims.iter().sum::<f64>() / sims.len() as f64);
        MetricsReport {
            split,
            n_episodes: n,
            successes,
            sr,
            ne_mean,
            bertscore_mean,
        }
    }

    /// Reports for LOW, HIGH and ALL, in that order.
    pub fn all_splits(results: &[EpisodeResult]) -> [MetricsReport; 3] {
        Split::ORDER.map(|s| MetricsReport::from_results(results, s))
    }
}

/// One row of the comparison table: a method with its three split reports.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    pub translator: String,
    pub reports: [MetricsReport; 3],
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.decimals$}"))
}

fn split_cells(r: &MetricsReport, sr_dec: usize, ne_dec: usize) -> [String; 3] {
    let has = r.n_episodes > 0;
    [
        fmt_opt(has.then_some(r.sr), sr_dec),
        fmt_opt(has.then_some(r.ne_mean), ne_dec),
        fmt_opt(r.bertscore_mean, 4),
    ]
}

/// CSV with Method, Translator and n/SR/NE/BERTScore per split.
pub fn render_table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("Method,Translator");
    for s in Split::ORDER {
        let s = s.as_str();
        write!(out, ",{s} n,{s} SR,{s} NE,{s} BERTScore").unwrap();
    }
    out.push('\n');
    for row in rows {
        write!(out, "{},{}", csv_field(&row.method), csv_field(&row.translator)).unwrap();
        for r in &row.reports {
            let [sr, ne, bs] = split_cells(r, 4, 4);
            write!(out, ",{},{sr},{ne},{bs}", r.n_episodes).unwrap();
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn aligned(table: &[Vec<String>]) -> String {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            table
                .iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in table {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Aligned text table in the comparison layout: SR and NE to two decimals,
/// BERTScore to four.
pub fn render_table_text(rows: &[TableRow]) -> String {
    let mut table = vec![
        vec!["Method".to_string(), "Translator".to_string()],
        vec![String::new(), String::new()],
    ];
    for s in Split::ORDER {
        table[0].extend([s.as_str().to_string(), String::new(), String::new()]);
        table[1].extend(["SR".to_string(), "NE".to_string(), "BERTScore".to_string()]);
    }
    for row in rows {
        let mut line = vec![row.method.clone(), row.translator.clone()];
        for r in &row.reports {
            line.extend(split_cells(r, 2, 2));
        }
        table.push(line);
    }
    aligned(&table)
}

/// One row of a principle ablation (metrics over the whole set).
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub index: usize,
    pub label: String,
    pub report: MetricsReport,
}

pub fn render_ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("#,Translation Principle,n,SR,NE,BERTScore\n");
    for row in rows {
        let [sr, ne, bs] = split_cells(&row.report, 4, 4);
        writeln!(
            out,
            "{},{},{},{sr},{ne},{bs}",
            row.index,
            csv_field(&row.label),
            row.report.n_episodes
        )
        .unwrap();
    }
    out
}

pub fn render_ablation_text(rows: &[AblationRow]) -> String {
    let mut table = vec![vec![
        "#".to_string(),
        "Translation Principle".to_string(),
        "SR".to_string(),
        "NE".to_string(),
        "BERTScore".to_string(),
    ]];
    for row in rows {
        let [sr, ne, bs] = split_cells(&row.report, 2, 2);
        table.push(vec![row.index.to_string(), row.label.clone(), sr, ne, bs]);
    }
    aligned(&table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Action, Pose, Termination};

    fn r(subtasks: u32, success: bool, ne: f64, sim: Option<f64>) -> EpisodeResult {
        EpisodeResult {
            episode_id: format!("e{subtasks}{ne}"),
            subtask_count: subtasks,
            predicted_actions: vec![Action::Stop],
            final_pose: Pose::origin(),
            navigation_error: ne,
            success,
            termination: Termination::Stopped,
            similarity: sim,
            translated: None,
            parse_fallback: false,
        }
    }

    #[test]
    fn split_arithmetic() {
        let rs = vec![
            r(1, true, 0.5, Some(0.9)),
            r(2, false, 4.0, Some(0.8)),
            r(3, true, 1.0, None),
            r(4, false, 6.0, Some(0.7)),
            r(3, true, 2.0, None),
        ];
        let [low, high, all] = MetricsReport::all_splits(&rs);
        assert_eq!(low.n_episodes + high.n_episodes, all.n_episodes);
        assert_eq!(low.successes + high.successes, all.successes);
        assert_eq!(low.sr, 0.5);
        assert_eq!(high.sr, 2.0 / 3.0);
        assert_eq!(all.sr, 3.0 / 5.0);
        assert_eq!(all.ne_mean, 13.5 / 5.0);
        assert_eq!(high.bertscore_mean, Some(0.7));
        let weighted = (low.n_episodes as f64 * low.sr + high.n_episodes as f64 * high.sr) / all.n_episodes as f64;
        assert!((weighted - all.sr).abs() < 1e-15);
    }

    #[test]
    fn empty_split_renders_dashes() {
        let rows = vec![TableRow {
            method: "Fixed".into(),
            translator: "-".into(),
            reports: MetricsReport::all_splits(&[r(2, false, 3.0, None)]),
        }];
        let text = render_table_text(&rows);
        assert!(text.lines().nth(2).unwrap().starts_with("Fixed"));
        let csv = render_table_csv(&rows);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "Fixed,-,1,0.0000,3.0000,-,0,-,-,-,1,0.0000,3.0000,-"
        );
    }
}
