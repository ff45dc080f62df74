//! CSV exports and the Markdown decision report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::consistency::ConsistencyReport;
use crate::fuzzy::SignedScore;
use crate::hierarchy::{DecisionResult, Hierarchy, GOAL_ID};
use crate::sensitivity::SensitivityReport;

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer flushes");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// One row per alternative: its score under each top-level criterion, then
/// the global score. Values have six decimals.
pub fn export_csv(result: &DecisionResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["alternative".to_string()];
    header.extend(result.criterion_scores.iter().map(|c| c.criterion.clone()));
    header.push("global".into());
    w.write_record(&header).expect("write to memory");
    for (k, alt) in result.alternatives.iter().enumerate() {
        let mut row = vec![alt.clone()];
        row.extend(result.criterion_scores.iter().map(|c| f6(c.scores[k])));
        row.push(f6(result.global_scores[k]));
        w.write_record(&row).expect("write to memory");
    }
    finish(w)
}

/// One row per (scenario, alternative) with the scenario score and rank.
pub fn export_sensitivity_csv(report: &SensitivityReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "boosted",
        "factor",
        "alternative",
        "score",
        "rank",
    ])
    .expect("write to memory");
    for s in &report.scenarios {
        for (k, alt) in report.alternatives.iter().enumerate() {
            let rank = s.ranking.position(alt).unwrap_or(0);
            w.write_record([
                s.scenario.name.as_str(),
                s.scenario.boosted.as_deref().unwrap_or(""),
                &s.scenario.factor.to_string(),
                alt,
                &f6(s.global_scores[k]),
                &rank.to_string(),
            ])
            .expect("write to memory");
        }
    }
    finish(w)
}

fn label<'a>(h: &'a Hierarchy, id: &'a str) -> &'a str {
    h.label(id).unwrap_or(id)
}

/// Markdown report: criterion weights, per-criterion alternative scores,
/// final ranking, sensitivity scenarios and a consistency annex. Output is a
/// pure function of the inputs.
pub fn render_report(
    h: &Hierarchy,
    result: &DecisionResult,
    sensitivity: Option<&SensitivityReport>,
    consistency: &BTreeMap<String, ConsistencyReport>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", h.goal);

    let _ = writeln!(out, "## Criterion weights\n");
    for node in h.decision_nodes().iter().filter(|n| !n.is_leaf) {
        let Some(w) = result.local_weights.get(node.id) else {
            continue;
        };
        let title = if node.id == GOAL_ID {
            "Main criteria".to_string()
        } else {
            format!("{} ({})", label(h, node.id), node.id)
        };
        let _ = writeln!(out, "### {title}\n");
        let _ = writeln!(out, "| Criterion | Label | Local weight | Global weight |");
        let _ = writeln!(out, "|---|---|---:|---:|");
        for (id, wi) in w.iter() {
            let global = result
                .global_criterion_weights
                .get(id)
                .copied()
                .unwrap_or(wi);
            let _ = writeln!(out, "| {id} | {} | {wi:.3} | {global:.4} |", label(h, id));
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "## Alternative scores by criterion\n");
    let mut header = String::from("| Alternative |");
    let mut rule = String::from("|---|");
    for c in &result.criterion_scores {
        let _ = write!(header, " {} |", c.criterion);
        rule.push_str("---:|");
    }
    header.push_str(" Global |");
    rule.push_str("---:|");
    let _ = writeln!(out, "{header}\n{rule}");
    for (k, alt) in result.alternatives.iter().enumerate() {
        let _ = write!(out, "| {} ({alt}) |", label(h, alt));
        for c in &result.criterion_scores {
            let _ = write!(out, " {:.3} |", c.scores[k]);
        }
        let _ = writeln!(out, " {:.3} |", result.global_scores[k]);
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "## Final ranking\n");
    let names: Vec<&str> = result.ranking.order.iter().map(|a| label(h, a)).collect();
    let _ = writeln!(out, "Final order: {}.\n", names.join(", "));
    for (pos, alt) in result.ranking.order.iter().enumerate() {
        let score = result.score(alt).unwrap_or(f64::NAN);
        let _ = writeln!(out, "{}. {} ({alt}): {score:.4}", pos + 1, label(h, alt));
    }
    for tie in &result.ranking.ties {
        let _ = writeln!(out, "\nTied: {}", tie.join(", "));
    }
    let _ = writeln!(out);

    if let Some(s) = sensitivity {
        let _ = writeln!(out, "## Sensitivity (factor {})\n", s.factor);
        let _ = writeln!(out, "| Scenario | Boosted | Ranking | Flips vs baseline |");
        let _ = writeln!(out, "|---|---|---|---|");
        for r in &s.scenarios {
            let flips: Vec<String> = s
                .flips_in(&r.scenario.name)
                .map(|f| format!("{} over {}", f.below, f.above))
                .collect();
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                r.scenario.name,
                r.scenario.boosted.as_deref().unwrap_or("baseline"),
                r.ranking.order.join(" > "),
                if flips.is_empty() {
                    "none".to_string()
                } else {
                    flips.join("; ")
                }
            );
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "## Consistency annex\n");
    let _ = writeln!(out, "| Node | Order | lambda_max | CI | RI | CR | Status |");
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---|");
    for (node, r) in consistency {
        let status = if r.acceptable { "ok" } else { "REVISE" };
        let _ = writeln!(
            out,
            "| {node} | {} | {:.4} | {:.4} | {:.2} | {:.4} | {status} |",
            r.order, r.lambda_max, r.ci, r.ri, r.cr
        );
    }
    let failing: Vec<_> = consistency.iter().filter(|(_, r)| !r.acceptable).collect();
    for (node, r) in failing {
        let items: Vec<String> = h
            .node(node)
            .map(|n| n.items.iter().map(|s| s.to_string()).collect())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "\n**{node}** exceeds the threshold (CR {:.4} >= {}). Suggested revisions:\n",
            r.cr, r.threshold
        );
        for cell in r.worst_entries.iter().take(3) {
            let a = items.get(cell.i).map(String::as_str).unwrap_or("?");
            let b = items.get(cell.j).map(String::as_str).unwrap_or("?");
            let _ = writeln!(
                out,
                "- {a} vs {b}: currently {:.3}, suggest {}",
                cell.current,
                describe(cell.suggested)
            );
        }
    }
    out
}

fn describe(s: SignedScore) -> String {
    let term = s.score.linguistic_term().to_lowercase();
    if s.reciprocal {
        format!("score {} (reverse direction, {term})", s.value())
    } else {
        format!("score {} ({term})", s.value())
    }
}
