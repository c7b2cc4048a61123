//! `bench`: a methods x sizes x seeds grid with shared initial points.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Result};

use crate::config::{parse_method_backend, BenchCell, FileConfig, RunConfig};
use crate::metrics::{render_table, write_atomic, MetricsSummary};
use crate::run;

pub struct BenchPlan {
    pub cells: Vec<BenchCell>,
    pub base: RunConfig,
    pub jobs: usize,
}

/// Expand the grid in a stable order: sizes, then seeds, then methods.
pub fn plan(base: RunConfig, file: &FileConfig) -> Result<BenchPlan> {
    let methods = file
        .methods
        .clone()
        .unwrap_or_else(|| vec!["hipnex-krylov".into(), "npe-krylov".into()]);
    let sizes = file.sizes.clone().unwrap_or_else(|| vec![200]);
    let seeds = file.seeds.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let mut cells = Vec::new();
    for &n in &sizes {
        for &seed in &seeds {
            for entry in &methods {
                let (method, backend) = parse_method_backend(entry)?;
                cells.push(BenchCell {
                    method,
                    backend,
                    n,
                    seed,
                });
            }
        }
    }
    Ok(BenchPlan {
        cells,
        base,
        jobs: file.jobs.unwrap_or(0),
    })
}

/// Run every cell (in parallel worker threads), write the grid CSV, the
/// aligned table, and per-cell JSON summaries.
pub fn command(plan: &BenchPlan) -> Result<()> {
    let n_cells = plan.cells.len();
    let results: Vec<Mutex<Option<Result<MetricsSummary, String>>>> =
        (0..n_cells).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = if plan.jobs == 0 {
        n_cells.max(1).min(std::thread::available_parallelism().map(|p| p.get()).unwrap_or(4))
    } else {
        plan.jobs
    };

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= n_cells {
                    break;
                }
                let cell = &plan.cells[idx];
                let mut config = plan.base.clone();
                config.method = cell.method;
                config.backend = cell.backend;
                config.n = cell.n;
                config.seed = cell.seed;
                let outcome = run::execute(&config)
                    .map(|a| a.summary)
                    .map_err(|e| format!("{e:#}"));
                *results[idx].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut rows: Vec<MetricsSummary> = Vec::with_capacity(n_cells);
    let mut failures = 0usize;
    for (cell, slot) in plan.cells.iter().zip(&results) {
        match slot.lock().unwrap().take().expect("worker filled every slot") {
            Ok(summary) => rows.push(summary),
            Err(message) => {
                failures += 1;
                eprintln!(
                    "cell {}-{} n={} seed={} failed: {message}",
                    cell.method.as_str(),
                    cell.backend,
                    cell.n,
                    cell.seed
                );
            }
        }
    }

    // Shared-start verification: identical (n, seed) means identical x0.
    for a in &rows {
        for b in &rows {
            if a.n == b.n && a.seed == b.seed && a.problem == b.problem && a.x0_hash != b.x0_hash {
                bail!(
                    "initial-point mismatch for n={} seed={}: {} vs {}",
                    a.n,
                    a.seed,
                    a.x0_hash,
                    b.x0_hash
                );
            }
        }
    }

    let mut csv = String::from(MetricsSummary::csv_header());
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    let csv_path = plan.base.out.join("bench.csv");
    write_atomic(&csv_path, &csv)?;
    let table = render_table(&rows);
    write_atomic(&plan.base.out.join("bench.txt"), &table)?;
    for row in &rows {
        let name = format!(
            "{}-{}-n{}-seed{}.json",
            row.method, row.backend, row.n, row.seed
        );
        write_atomic(
            &plan.base.out.join("cells").join(name),
            &serde_json::to_string_pretty(row)?,
        )?;
    }
    print!("{table}");
    println!(
        "{} of {} cells succeeded; wrote {}",
        rows.len(),
        n_cells,
        csv_path.display()
    );
    if failures > 0 && rows.is_empty() {
        bail!("every benchmark cell failed");
    }
    Ok(())
}
