//! Rendering of command results as aligned tables, JSON or CSV.

use std::collections::BTreeMap;

use fahp_core::consistency::ConsistencyReport;
use fahp_core::hierarchy::{ValidationReport, GOAL_ID};
use fahp_core::report::{export_csv, export_sensitivity_csv};
use fahp_core::{DecisionResult, Hierarchy, SensitivityReport};
use serde_json::{json, Value};

use crate::args::Format;

/// Left-aligns the first `text_cols` columns and right-aligns the rest.
fn table(header: &[&str], rows: &[Vec<String>], text_cols: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| {
                if k < text_cols {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut header.iter().copied());
    for row in rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn label<'a>(h: &'a Hierarchy, id: &'a str) -> &'a str {
    h.label(id).unwrap_or(id)
}

pub fn validation(
    report: &ValidationReport,
    consistency: Option<&BTreeMap<String, ConsistencyReport>>,
    format: Format,
) -> String {
    let empty = BTreeMap::new();
    let consistency = consistency.unwrap_or(&empty);
    let rows: Vec<Vec<String>> = consistency
        .iter()
        .map(|(node, r)| {
            vec![
                node.clone(),
                r.order.to_string(),
                format!("{:.4}", r.lambda_max),
                format!("{:.4}", r.ci),
                format!("{:.2}", r.ri),
                format!("{:.4}", r.cr),
                if r.acceptable { "ok" } else { "REVISE" }.to_string(),
            ]
        })
        .collect();
    match format {
        Format::Json => pretty(&json!({
            "valid": report.is_valid(),
            "violations": report.violations,
            "consistency": consistency,
        })),
        Format::Csv if !report.is_valid() => csv_text(
            &["violation"],
            &report
                .violations
                .iter()
                .map(|v| vec![v.to_string()])
                .collect::<Vec<_>>(),
        ),
        Format::Csv => csv_text(
            &["node", "order", "lambda_max", "ci", "ri", "cr", "status"],
            &rows,
        ),
        Format::Table if !report.is_valid() => format!("invalid project:\n{report}\n"),
        Format::Table => {
            let mut out = String::from("structure: valid\n\n");
            out += &table(
                &["node", "order", "lambda_max", "CI", "RI", "CR", "status"],
                &rows,
                1,
            );
            for (node, r) in consistency.iter().filter(|(_, r)| !r.acceptable) {
                out += &format!("\n{node}: CR {:.4} >= {}\n", r.cr, r.threshold);
                for c in r.worst_entries.iter().take(3) {
                    out += &format!(
                        "  cell ({}, {}): {:.3}, suggest {}\n",
                        c.i,
                        c.j,
                        c.current,
                        c.suggested.value()
                    );
                }
            }
            out
        }
    }
}

pub fn weights(h: &Hierarchy, r: &DecisionResult, node: Option<&str>, format: Format) -> String {
    let nodes: Vec<String> = match node {
        Some(n) => vec![n.to_string()],
        None => h
            .decision_nodes()
            .iter()
            .filter(|n| !n.is_leaf)
            .map(|n| n.id.to_string())
            .collect(),
    };
    let global = |id: &str| r.global_criterion_weights.get(id).copied();
    match format {
        Format::Json => {
            let local: BTreeMap<&str, _> = nodes
                .iter()
                .map(|n| (n.as_str(), &r.local_weights[n]))
                .collect();
            let items: Vec<&str> = local
                .values()
                .flat_map(|w| w.items.iter().map(String::as_str))
                .collect();
            let global: BTreeMap<&str, f64> = items
                .into_iter()
                .filter_map(|i| global(i).map(|g| (i, g)))
                .collect();
            pretty(&json!({
                "local_weights": local,
                "global_criterion_weights": global,
            }))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = nodes
                .iter()
                .flat_map(|n| {
                    r.local_weights[n].iter().map(move |(id, w)| {
                        vec![
                            n.clone(),
                            id.to_string(),
                            w.to_string(),
                            global(id).map(|g| g.to_string()).unwrap_or_default(),
                        ]
                    })
                })
                .collect();
            csv_text(&["node", "item", "local_weight", "global_weight"], &rows)
        }
        Format::Table => {
            let mut out = String::new();
            for (k, n) in nodes.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                let title = if n == GOAL_ID {
                    h.goal.as_str()
                } else {
                    label(h, n)
                };
                out += &format!("{n}: {title}\n");
                let rows: Vec<Vec<String>> = r.local_weights[n]
                    .iter()
                    .map(|(id, w)| {
                        vec![
                            id.to_string(),
                            label(h, id).to_string(),
                            format!("{w:.3}"),
                            global(id).map(|g| format!("{g:.4}")).unwrap_or_default(),
                        ]
                    })
                    .collect();
                out += &table(&["id", "label", "local", "global"], &rows, 2);
            }
            out
        }
    }
}

pub fn ranking(h: &Hierarchy, r: &DecisionResult, format: Format) -> String {
    match format {
        Format::Json => {
            let criterion_scores: BTreeMap<&str, &Vec<f64>> = r
                .criterion_scores
                .iter()
                .map(|c| (c.criterion.as_str(), &c.scores))
                .collect();
            let scores: BTreeMap<&str, f64> = r
                .alternatives
                .iter()
                .map(String::as_str)
                .zip(r.global_scores.iter().copied())
                .collect();
            pretty(&json!({
                "order": r.ranking.order,
                "ties": r.ranking.ties,
                "alternatives": r.alternatives,
                "global_scores": r.global_scores,
                "scores": scores,
                "criterion_scores": criterion_scores,
                "main_weights": r.main_weights(),
            }))
        }
        Format::Csv => export_csv(r),
        Format::Table => {
            let mut header = vec!["alternative", ""];
            header.extend(r.criterion_scores.iter().map(|c| c.criterion.as_str()));
            header.extend(["score", "rank"]);
            let mut weight_row = vec!["weight".to_string(), String::new()];
            weight_row.extend(r.main_weights().weights.iter().map(|w| format!("{w:.3}")));
            weight_row.extend([String::new(), String::new()]);
            let mut rows = vec![weight_row];
            for (k, alt) in r.alternatives.iter().enumerate() {
                let mut row = vec![alt.clone(), label(h, alt).to_string()];
                row.extend(
                    r.criterion_scores
                        .iter()
                        .map(|c| format!("{:.3}", c.scores[k])),
                );
                row.push(format!("{:.4}", r.global_scores[k]));
                row.push(r.ranking.position(alt).unwrap_or(0).to_string());
                rows.push(row);
            }
            let names: Vec<&str> = r.ranking.order.iter().map(|a| label(h, a)).collect();
            let mut out = table(&header, &rows, 2);
            out += &format!(
                "\nranking: {} ({})\n",
                r.ranking.order.join(" > "),
                names.join(", ")
            );
            for tie in &r.ranking.ties {
                out += &format!("tied: {}\n", tie.join(", "));
            }
            out
        }
    }
}

pub fn sensitivity(rep: &SensitivityReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(rep).expect("report serializes")),
        Format::Csv => export_sensitivity_csv(rep),
        Format::Table => {
            let rows: Vec<Vec<String>> = rep
                .scenarios
                .iter()
                .map(|s| {
                    let flips: Vec<String> = rep
                        .flips_in(&s.scenario.name)
                        .map(|f| format!("{} over {}", f.below, f.above))
                        .collect();
                    vec![
                        s.scenario.name.clone(),
                        s.scenario.boosted.clone().unwrap_or_else(|| "-".into()),
                        s.ranking.order.join(" > "),
                        if flips.is_empty() {
                            "-".into()
                        } else {
                            flips.join("; ")
                        },
                    ]
                })
                .collect();
            let mut out = format!("factor {}\n\n", rep.factor);
            out += &table(&["scenario", "boosted", "ranking", "flips"], &rows, 4);

            let mut header = vec!["alternative".to_string()];
            header.extend(rep.scenarios.iter().map(|s| s.scenario.name.clone()));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let scores: Vec<Vec<String>> = rep
                .alternatives
                .iter()
                .enumerate()
                .map(|(k, alt)| {
                    let mut row = vec![alt.clone()];
                    row.extend(
                        rep.scenarios
                            .iter()
                            .map(|s| format!("{:.4}", s.global_scores[k])),
                    );
                    row
                })
                .collect();
            out += "\n";
            out += &table(&header, &scores, 1);
            out
        }
    }
}
