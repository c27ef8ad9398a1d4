//! Tables of knowledge-index evolution.

use serde_json::json;

use sessioncheck_core::check::{index_json, CheckResult};
use sessioncheck_core::model::{KnowledgeIndex, RoleId};
use sessioncheck_core::syntax::print_type;

fn table(index: &KnowledgeIndex, indent: &str) -> String {
    if index.is_empty() {
        return format!("{indent}no messages\n");
    }
    let rows: Vec<[String; 3]> = index
        .items()
        .iter()
        .map(|item| {
            let knowers: Vec<_> = item.knowers().iter().map(RoleId::as_str).collect();
            [
                item.var.to_string(),
                print_type(&item.ty),
                format!("{{{}}}", knowers.join(", ")),
            ]
        })
        .collect();
    let header = ["var", "type", "knowers"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 3]| {
        format!(
            "{indent}{:<w0$} | {:<w1$} | {}\n",
            cells[0],
            cells[1],
            cells[2],
            w0 = widths[0],
            w1 = widths[1]
        )
    };
    let mut out = line(header);
    out.push_str(&format!(
        "{indent}{}-+-{}-+-{}\n",
        "-".repeat(widths[0]),
        "-".repeat(widths[1]),
        "-".repeat(widths[2])
    ));
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2]]));
    }
    out
}

pub fn render(name: &str, result: &CheckResult) -> String {
    let mut out = format!("{name}\n");
    for instance in &result.instances {
        out.push_str(&format!("\nprotocol {}\n", instance.label));
        let mut n = 0;
        for step in result.steps.iter().filter(|s| s.protocol == instance.label) {
            n += 1;
            let path = if step.arms.is_empty() {
                String::new()
            } else {
                format!(" [{}]", step.arms.join(" / "))
            };
            out.push_str(&format!(
                "  step {n}{path} at line {}: {}\n",
                step.span.line, step.summary
            ));
            out.push_str(&table(&step.after, "    "));
        }
    }
    out.push_str("\nfinal indices\n");
    for (label, index) in &result.final_indices {
        out.push_str(&format!("  {label}\n"));
        out.push_str(&table(index, "    "));
    }
    out
}

/// `{file, steps: [{protocol, arms, line, statement, index}], final: [{path, index}]}`
pub fn to_json(name: &str, result: &CheckResult) -> serde_json::Value {
    json!({
        "file": name,
        "steps": result.steps.iter().map(|s| json!({
            "protocol": s.protocol,
            "arms": s.arms,
            "line": s.span.line,
            "statement": s.summary,
            "index": index_json(&s.after),
        })).collect::<Vec<_>>(),
        "final": result.final_indices.iter().map(|(label, index)| json!({
            "path": label.to_string(),
            "index": index_json(index),
        })).collect::<Vec<_>>(),
    })
}
