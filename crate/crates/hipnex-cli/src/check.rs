//! `check`: run the library's verification suites and report.

use anyhow::{bail, Result};
use hipnex::checks::{
    self, budget_suite, ergodic_suite, hpe_suite, invariant_suite, operator_suite, params_suite,
    rate_suite, subproblem_suite,
};

pub fn command(selector: &str, verbose: bool) -> Result<()> {
    let reports: Vec<checks::CheckReport> = match selector {
        "params" => vec![params_suite(1000, 20240811)],
        "operators" => operator_suite(),
        "invariants" => invariant_suite(),
        "rates" => rate_suite(),
        "budgets" => budget_suite(),
        "subproblem" => subproblem_suite(100, 99),
        "hpe" => vec![hpe_suite()],
        "ergodic" => vec![ergodic_suite()],
        "all" => checks::all_suites(),
        other => bail!(
            "unknown suite '{other}' (expected params, operators, invariants, rates, \
             budgets, subproblem, hpe, ergodic, or all)"
        ),
    };
    let mut failed = 0;
    for report in &reports {
        println!("{report}");
        if verbose || !report.passed {
            for d in &report.details {
                println!("    {d}");
            }
        }
        if !report.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", reports.len());
    }
    println!("all {} checks passed", reports.len());
    Ok(())
}
