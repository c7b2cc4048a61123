//! `table`: re-render stored JSON summaries as the aligned text table.

use std::path::Path;

use anyhow::{Context, Result};

use crate::metrics::{render_table, MetricsSummary};

/// Collect `*.json` summaries under `dir` (one level of `cells/` included),
/// sort them, and print the table.
pub fn command(dir: &Path) -> Result<()> {
    let mut rows = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries =
            std::fs::read_dir(&d).with_context(|| format!("reading {}", d.display()))?;
        for entry in entries {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let summary: MetricsSummary = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                rows.push(summary);
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.n, a.seed, &a.method, &a.backend).cmp(&(b.n, b.seed, &b.method, &b.backend))
    });
    print!("{}", render_table(&rows));
    Ok(())
}
