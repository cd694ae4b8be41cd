use super::{ClusterAssignment, Dendrogram};
use crate::error::{Error, Result};
use crate::fmt::sig12;

fn newick_label(label: &str) -> String {
    let special = |c: char| c.is_whitespace() || "()[]':;,".contains(c);
    if label.chars().any(special) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Newick string with branch lengths equal to height differences.
pub fn dendrogram_newick(dend: &Dendrogram) -> String {
    let n = dend.leaves();
    if dend.merges().is_empty() {
        return match dend.leaf_labels().first() {
            Some(l) => format!("{};", newick_label(l)),
            None => ";".to_string(),
        };
    }
    let height = |node: usize| {
        if node < n {
            0.0
        } else {
            dend.merges()[node - n].height
        }
    };
    let root = n + dend.merges().len() - 1;

    // Iterative post-order; `Exit` emits the closing parenthesis.
    enum Step {
        Enter(usize, f64),
        Comma,
        Exit(usize, f64),
    }
    let mut out = String::new();
    let mut stack = vec![Step::Enter(root, 0.0)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(node, branch) if node < n => {
                out.push_str(&newick_label(&dend.leaf_labels()[node]));
                out.push(':');
                out.push_str(&sig12(branch));
            }
            Step::Enter(node, branch) => {
                let m = dend.merges()[node - n];
                out.push('(');
                stack.push(Step::Exit(node, branch));
                stack.push(Step::Enter(m.right, m.height - height(m.right)));
                stack.push(Step::Comma);
                stack.push(Step::Enter(m.left, m.height - height(m.left)));
            }
            Step::Comma => out.push(','),
            Step::Exit(node, branch) => {
                out.push(')');
                if node != root {
                    out.push(':');
                    out.push_str(&sig12(branch));
                }
            }
        }
    }
    out.push(';');
    out
}

/// Graphviz DOT rendering; internal nodes carry their merge height.
pub fn dendrogram_dot(dend: &Dendrogram) -> String {
    let mut out = String::from("digraph dendrogram {\n  node [shape=box];\n");
    for (i, label) in dend.leaf_labels().iter().enumerate() {
        out.push_str(&format!("  n{i} [label={:?}];\n", label));
    }
    for m in dend.merges() {
        out.push_str(&format!(
            "  n{} [shape=point, xlabel=\"{}\"];\n  n{} -> n{};\n  n{} -> n{};\n",
            m.id,
            sig12(m.height),
            m.id,
            m.left,
            m.id,
            m.right
        ));
    }
    out.push_str("}\n");
    out
}

/// `id,cluster` CSV for an assignment over the given item ids.
pub fn assignment_csv(ids: &[String], assignment: &ClusterAssignment) -> Result<String> {
    if ids.len() != assignment.labels().len() {
        return Err(Error::InvalidArgument(format!(
            "{} ids for {} labels",
            ids.len(),
            assignment.labels().len()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(["id", "cluster"]).map_err(csv_err)?;
    for (id, c) in ids.iter().zip(assignment.labels()) {
        w.write_record([id.as_str(), &c.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
