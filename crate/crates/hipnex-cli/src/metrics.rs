//! Summary records, trace rows, and their CSV/JSON/text renderings.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// One solver run reduced to the benchmark-table columns, plus provenance.
/// Field order is the JSON key order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub method: String,
    pub backend: String,
    pub problem: String,
    pub n: usize,
    pub seed: u64,
    pub rho: f64,
    pub time_s: f64,
    pub iterations: u64,
    /// `||F(x_end)||` at the final base point.
    pub final_residual: f64,
    /// Best pointwise certificate residual `||F(y) + nu||` seen.
    pub best_residual: f64,
    pub linear_solves: u64,
    pub f_evals: u64,
    /// Combined Jacobian evaluations (materializations + products).
    pub j_evals: u64,
    pub j_evals_breakdown: JevalBreakdown,
    pub inner_iterations: u64,
    pub termination: String,
    pub warnings: u64,
    /// FNV-1a hash of the initial point's bits (shared-start verification).
    pub x0_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JevalBreakdown {
    pub materializations: u64,
    pub jv_products: u64,
}

impl MetricsSummary {
    pub fn csv_header() -> &'static str {
        "method,backend,problem,n,seed,rho,time_s,iterations,final_residual,best_residual,\
         linear_solves,f_evals,j_evals,inner_iterations,termination,warnings,x0_hash"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:e},{:.6},{},{:e},{:e},{},{},{},{},{},{},{}",
            self.method,
            self.backend,
            self.problem,
            self.n,
            self.seed,
            self.rho,
            self.time_s,
            self.iterations,
            self.final_residual,
            self.best_residual,
            self.linear_solves,
            self.f_evals,
            self.j_evals,
            self.inner_iterations,
            self.termination,
            self.warnings,
            self.x0_hash,
        )
    }
}

/// One unified trace row shared by all methods.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub k: u64,
    pub wall_time_s: f64,
    pub lambda: f64,
    pub residual_norm: f64,
    pub step_class: &'static str,
    pub inner_iters: u64,
    pub cum_linear_solves: u64,
    pub cum_f_evals: u64,
    pub cum_j_evals: u64,
}

pub const TRACE_HEADER: &str =
    "k,wall_time_s,lambda,residual_norm,step_class,inner_iters,cum_linear_solves,cum_F_evals,cum_J_evals";

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:e},{:e},{},{},{},{},{}",
            r.k,
            r.wall_time_s,
            r.lambda,
            r.residual_norm,
            r.step_class,
            r.inner_iters,
            r.cum_linear_solves,
            r.cum_f_evals,
            r.cum_j_evals
        );
    }
    out
}

/// Aligned plain-text table over the benchmark columns.
pub fn render_table(rows: &[MetricsSummary]) -> String {
    let headers = [
        "n",
        "Method",
        "time(s)",
        "Iterations",
        "||F(x_end)||",
        "Linear Solves",
        "F evaluations",
        "J evaluations",
        "Inner iterations",
    ];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                format!("{}-{}", r.method, r.backend),
                format!("{:.3}", r.time_s),
                r.iterations.to_string(),
                format!("{:.3e}", r.final_residual),
                r.linear_solves.to_string(),
                r.f_evals.to_string(),
                r.j_evals.to_string(),
                r.inner_iterations.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let write_row = |out: &mut String, cells: &[String]| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:>w$}", w = w);
        }
        out.push('\n');
    };
    write_row(
        &mut out,
        &headers.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
    );
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in &body {
        write_row(&mut out, row);
    }
    out
}

/// FNV-1a over the raw bits of a vector; stable across runs and platforms.
pub fn hash_vector(v: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in v {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = hash_vector(&[1.0, 2.0, 3.0]);
        let b = hash_vector(&[1.0, 2.0, 3.0]);
        let c = hash_vector(&[1.0, 2.0, 3.0 + 1e-16]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        // 3.0 + 1e-16 rounds to 3.0 in f64; a genuinely different value must
        // change the hash
        assert_eq!(a, c);
        let d = hash_vector(&[1.0, 2.0, 3.5]);
        assert_ne!(a, d);
    }

    #[test]
    fn table_renders_aligned() {
        let row = MetricsSummary {
            method: "hipnex".into(),
            backend: "krylov".into(),
            problem: "cubic".into(),
            n: 100,
            seed: 1,
            rho: 1e-6,
            time_s: 0.5,
            iterations: 100,
            final_residual: 1e-7,
            best_residual: 1e-7,
            linear_solves: 10,
            f_evals: 11,
            j_evals: 12,
            j_evals_breakdown: JevalBreakdown {
                materializations: 0,
                jv_products: 12,
            },
            inner_iterations: 13,
            termination: "pointwise".into(),
            warnings: 0,
            x0_hash: "0".repeat(16),
        };
        let text = render_table(&[row.clone(), row]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].len(), lines[0].len());
        assert!(lines[0].contains("Linear Solves"));
    }
}
