//! Run and benchmark configuration: a flat TOML file, overridable by flags.
//!
//! Schema (all keys optional unless noted):
//!
//! ```toml
//! # what to solve
//! problem   = "cubic"      # cubic | affine | box
//! n         = 100          # problem size parameter
//! seed      = 42
//! l         = 1e-3         # cubic: Lipschitz constant of the derivative
//! cond      = 20.0         # cubic: condition number of the coupling matrix
//!
//! # how to solve it
//! method    = "hipnex"     # hipnex | npe | hpe
//! backend   = "auto"       # auto | direct | krylov | tseng
//! sigma_hat = 0.25         # subproblem relative-error tolerance
//! rho       = 1e-6
//! max_iter  = 200000
//! max_inner = 0            # Krylov product cap per solve; 0 = auto
//! strict    = false        # invariant breaches abort instead of warning
//! theta     = 0.1875       # parameter overrides (validated)
//! eta       = 750.0
//! lambda1   = 2.0
//!
//! # npe-only
//! npe_sigma_l = 0.1
//! npe_sigma_u = 0.5
//!
//! # hpe-only (requires problem = "affine")
//! hpe_tau   = 0.5
//! hpe_eta   = 0.5
//! hpe_steps = 200
//!
//! # output
//! out       = "out"
//!
//! # bench-only grids
//! methods   = ["hipnex-krylov", "npe-krylov"]
//! sizes     = [200]
//! seeds     = [1, 2, 3]
//! jobs      = 0            # parallel workers; 0 = all cells
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use hipnex::subproblem::Backend;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hipnex,
    Npe,
    Hpe,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Hipnex => "hipnex",
            Method::Npe => "npe",
            Method::Hpe => "hpe",
        }
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hipnex" => Ok(Method::Hipnex),
            "npe" => Ok(Method::Npe),
            "hpe" => Ok(Method::Hpe),
            other => bail!("unknown method '{other}' (expected hipnex, npe, or hpe)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Cubic,
    Affine,
    Box,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Cubic => "cubic",
            ProblemKind::Affine => "affine",
            ProblemKind::Box => "box",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(ProblemKind::Cubic),
            "affine" => Ok(ProblemKind::Affine),
            "box" => Ok(ProblemKind::Box),
            other => bail!("unknown problem '{other}' (expected cubic, affine, or box)"),
        }
    }
}

pub fn parse_backend(s: &str) -> Result<Backend> {
    match s {
        "auto" => Ok(Backend::Auto),
        "direct" => Ok(Backend::Direct),
        "krylov" => Ok(Backend::Krylov),
        "tseng" => Ok(Backend::Tseng),
        other => bail!("unknown backend '{other}' (expected auto, direct, krylov, or tseng)"),
    }
}

/// Raw file contents; everything optional so flags can fill the gaps.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub method: Option<String>,
    pub problem: Option<String>,
    pub backend: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub rho: Option<f64>,
    pub max_iter: Option<u64>,
    pub max_inner: Option<u64>,
    pub sigma_hat: Option<f64>,
    pub strict: Option<bool>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub lambda1: Option<f64>,
    pub l: Option<f64>,
    pub cond: Option<f64>,
    pub npe_sigma_l: Option<f64>,
    pub npe_sigma_u: Option<f64>,
    pub hpe_tau: Option<f64>,
    pub hpe_eta: Option<f64>,
    pub hpe_steps: Option<u64>,
    pub out: Option<PathBuf>,
    pub methods: Option<Vec<String>>,
    pub sizes: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fully resolved single-run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub problem: ProblemKind,
    pub backend: Backend,
    pub n: usize,
    pub seed: u64,
    pub rho: f64,
    pub max_iter: u64,
    pub max_inner: u64,
    pub sigma_hat: f64,
    pub strict: bool,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub lambda1: Option<f64>,
    pub l: f64,
    pub cond: f64,
    pub npe_sigma_l: f64,
    pub npe_sigma_u: f64,
    pub hpe_tau: f64,
    pub hpe_eta: f64,
    pub hpe_steps: u64,
    pub out: PathBuf,
    /// Fault-injection hook for the strict-mode monitors (hidden flag).
    pub corrupt_lambda_at: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Hipnex,
            problem: ProblemKind::Cubic,
            backend: Backend::Auto,
            n: 100,
            seed: 42,
            rho: 1e-6,
            max_iter: 500_000,
            max_inner: 0,
            sigma_hat: 0.25,
            strict: false,
            theta: None,
            eta: None,
            lambda1: None,
            l: 1e-3,
            cond: 20.0,
            npe_sigma_l: 0.1,
            npe_sigma_u: 0.5,
            hpe_tau: 0.5,
            hpe_eta: 0.5,
            hpe_steps: 200,
            out: PathBuf::from("out"),
            corrupt_lambda_at: None,
        }
    }
}

impl RunConfig {
    /// Layer file values over the defaults.
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<()> {
        if let Some(v) = &file.method {
            self.method = v.parse()?;
        }
        if let Some(v) = &file.problem {
            self.problem = v.parse()?;
        }
        if let Some(v) = &file.backend {
            self.backend = parse_backend(v)?;
        }
        if let Some(v) = file.n {
            self.n = v;
        }
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = file.rho {
            self.rho = v;
        }
        if let Some(v) = file.max_iter {
            self.max_iter = v;
        }
        if let Some(v) = file.max_inner {
            self.max_inner = v;
        }
        if let Some(v) = file.sigma_hat {
            self.sigma_hat = v;
        }
        if let Some(v) = file.strict {
            self.strict = v;
        }
        self.theta = file.theta.or(self.theta);
        self.eta = file.eta.or(self.eta);
        self.lambda1 = file.lambda1.or(self.lambda1);
        if let Some(v) = file.l {
            self.l = v;
        }
        if let Some(v) = file.cond {
            self.cond = v;
        }
        if let Some(v) = file.npe_sigma_l {
            self.npe_sigma_l = v;
        }
        if let Some(v) = file.npe_sigma_u {
            self.npe_sigma_u = v;
        }
        if let Some(v) = file.hpe_tau {
            self.hpe_tau = v;
        }
        if let Some(v) = file.hpe_eta {
            self.hpe_eta = v;
        }
        if let Some(v) = file.hpe_steps {
            self.hpe_steps = v;
        }
        if let Some(v) = &file.out {
            self.out = v.clone();
        }
        Ok(())
    }

    /// Sanity checks before any solve; parameter derivation re-validates the
    /// analytic ranges.
    // `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            bail!("n must be positive");
        }
        if !(self.rho > 0.0) {
            bail!("rho must be positive");
        }
        if !(0.0..0.5).contains(&self.sigma_hat) {
            bail!(
                "sigma_hat must lie in [0, 1/2), got {}",
                self.sigma_hat
            );
        }
        if !(self.l > 0.0) {
            bail!("l (Lipschitz constant) must be positive");
        }
        if self.method == Method::Hpe && self.problem != ProblemKind::Affine {
            bail!("the hpe driver requires problem = \"affine\" (exact resolvent oracle)");
        }
        Ok(())
    }
}

/// A benchmark cell: method-backend pair, size, seed.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub method: Method,
    pub backend: Backend,
    pub n: usize,
    pub seed: u64,
}

/// Parse a `method-backend` grid entry such as `hipnex-krylov`.
pub fn parse_method_backend(entry: &str) -> Result<(Method, Backend)> {
    match entry.split_once('-') {
        Some((m, b)) => Ok((m.parse()?, parse_backend(b)?)),
        None => Ok((entry.parse()?, Backend::Auto)),
    }
}
