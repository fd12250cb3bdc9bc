//! Bounds and solver settings for one verification run.

use std::time::Duration;

/// Environment variable naming the default solver command line.
pub const SOLVER_ENV: &str = "AGV_SOLVER";

/// Solver command used when neither a flag nor the environment names one.
pub const DEFAULT_SOLVER: &str = "z3 -in -smt2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    /// Largest induction depth tried.
    pub max_k: usize,
    /// Depth up to which counterexamples are searched for.
    pub bmc_depth: usize,
    /// Wall-clock budget of one obligation.
    pub timeout: Duration,
    /// Program followed by its arguments.
    pub solver: Vec<String>,
    /// Obligations checked at the same time.
    pub jobs: usize,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig {
            max_k: 10,
            bmc_depth: 20,
            timeout: Duration::from_secs(60),
            solver: default_solver(),
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// The solver named by `AGV_SOLVER`, falling back to z3.
pub fn default_solver() -> Vec<String> {
    let cmd = std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty());
    split_command(cmd.as_deref().unwrap_or(DEFAULT_SOLVER))
}

/// Splits a command line on whitespace.
pub fn split_command(cmd: &str) -> Vec<String> {
    cmd.split_whitespace().map(str::to_string).collect()
}

impl CheckConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_k == 0 {
            return Err("the induction depth bound must be positive".into());
        }
        if self.bmc_depth == 0 {
            return Err("the BMC depth bound must be positive".into());
        }
        if self.timeout.is_zero() {
            return Err("the timeout must be positive".into());
        }
        if self.jobs == 0 {
            return Err("the number of jobs must be positive".into());
        }
        if self.solver.is_empty() {
            return Err("empty solver command".into());
        }
        Ok(())
    }
}
