//! Benchmark harness comparing the semismooth Newton projector with the
//! root-finding baseline on random instances.
//!
//! Instances draw `b` with i.i.d. `N(0, sigma^2)` entries and `lambda` as the
//! sorted absolute values of standard normals, then set
//! `tau = beta * kappa_lambda(b)` so that `b` is always outside the ball.
//!
//! Randomness is ChaCha8 seeded with the configured seed; instance `rep` of
//! cell `k` uses stream `(k << 32) | rep`, so every instance is reproducible
//! on its own and independent of thread count. Normals come from the
//! ziggurat sampler in `rand_distr`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::norm::{owl_norm, Instance, Weights};
use crate::projector::project_ball;
use crate::rootfind::{solve_root, RootfindParams};
use crate::ssn::SsnParams;
use crate::{Error, Result};

/// Relative objective gap between solvers above which a cell is flagged.
pub const GAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Ssn,
    Rootfind,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Ssn => "ssn",
            Solver::Rootfind => "rootfind",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ssn" => Ok(Solver::Ssn),
            "rootfind" => Ok(Solver::Rootfind),
            other => Err(Error::InvalidConfig(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub sigma_list: Vec<f64>,
    pub beta_list: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    /// SSN stopping tolerance.
    pub eps: f64,
    pub rootfind: RootfindParams,
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_list: vec![10_000, 100_000, 1_000_000],
            sigma_list: vec![1e-3, 1.0, 1e3],
            beta_list: vec![1e-3, 1e-2, 1e-1, 0.5, 0.8],
            reps: 10,
            seed: 0,
            solvers: vec![Solver::Ssn, Solver::Rootfind],
            eps: 1e-12,
            rootfind: RootfindParams::default(),
            threads: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_list.is_empty() || self.sigma_list.is_empty() || self.beta_list.is_empty() {
            return bad("n, sigma and beta lists must be non-empty");
        }
        if self.n_list.contains(&0) {
            return bad("dimensions must be positive");
        }
        if self.sigma_list.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return bad("sigma values must be positive");
        }
        if self.beta_list.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            return bad("beta values must lie in (0, 1)");
        }
        if self.reps == 0 {
            return bad("reps must be at least 1");
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required");
        }
        if self.threads == 0 {
            return bad("threads must be at least 1");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        Ok(())
    }

    /// Cells in output order: beta, then n, then sigma.
    pub fn cells(&self) -> Vec<(f64, usize, f64)> {
        let mut out = Vec::new();
        for &beta in &self.beta_list {
            for &n in &self.n_list {
                for &sigma in &self.sigma_list {
                    out.push((beta, n, sigma));
                }
            }
        }
        out
    }
}

/// Random generator for repetition `rep` of cell `cell`.
pub fn instance_rng(seed: u64, cell: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cell as u64) << 32) | rep as u64);
    rng
}

/// Draws one benchmark instance.
pub fn generate_instance<R: Rng + ?Sized>(
    n: usize,
    sigma: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Instance> {
    if n == 0 || !(sigma > 0.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need n >= 1, sigma > 0, beta in (0, 1); got n={n}, sigma={sigma}, beta={beta}"
        )));
    }
    let b: Vec<f64> = (0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut lam: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
        .collect();
    lam.sort_unstable_by(|a, b| b.total_cmp(a));
    let weights = Weights::new(lam)?;
    let kappa = owl_norm(&b, &weights)?;
    Instance::new(b, weights, beta * kappa)
}

/// One solve of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub beta: f64,
    pub n: usize,
    pub sigma: f64,
    pub solver: Solver,
    pub rep: usize,
    pub time_s: f64,
    /// Newton iterations for SSN, rho evaluations for the root finder.
    pub iters_or_evals: usize,
    pub eta: f64,
    /// `1/2 |x - b|^2`; NaN when the solver failed.
    pub objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub mean_time: f64,
    pub median_time: f64,
    pub mean_count: f64,
    pub mean_eta: f64,
    pub failures: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub beta: f64,
    pub n: usize,
    pub sigma: f64,
    pub ssn: Option<SolverSummary>,
    pub rootfind: Option<SolverSummary>,
    /// Largest relative objective difference between the two solvers.
    pub max_objective_gap: Option<f64>,
}

impl CellResult {
    pub fn gap_exceeded(&self) -> bool {
        self.max_objective_gap.is_some_and(|g| !(g <= GAP_TOL))
    }

    pub fn has_failures(&self) -> bool {
        [&self.ssn, &self.rootfind]
            .into_iter()
            .flatten()
            .any(|s| s.failures > 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub solvers: Vec<Solver>,
    pub records: Vec<RunRecord>,
    pub cells: Vec<CellResult>,
}

fn objective(x: &[f64], b: &[f64]) -> f64 {
    0.5 * x.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
}

fn run_one(
    inst: &Instance,
    solver: Solver,
    cfg: &ExperimentConfig,
) -> (f64, usize, f64, f64, bool) {
    match solver {
        Solver::Ssn => {
            let params = SsnParams {
                eps: cfg.eps,
                ..SsnParams::default()
            };
            let t0 = Instant::now();
            let res = project_ball(inst, &params);
            let dt = t0.elapsed().as_secs_f64();
            match res {
                Ok(r) => {
                    let (iters, eta) = r
                        .report()
                        .map_or((0, 0.0), |s| (s.iterations, s.residual_eta));
                    (dt, iters, eta, objective(&r.x, inst.b()), true)
                }
                Err(Error::NotConverged { iterations, eta }) => {
                    (dt, iterations, eta, f64::NAN, false)
                }
                Err(_) => (dt, 0, f64::NAN, f64::NAN, false),
            }
        }
        Solver::Rootfind => {
            let t0 = Instant::now();
            let res = solve_root(inst, &cfg.rootfind);
            let dt = t0.elapsed().as_secs_f64();
            match res {
                Ok(r) => (
                    dt,
                    r.evaluations,
                    r.residual,
                    objective(&r.x, inst.b()),
                    true,
                ),
                Err(Error::RootNotConverged { evaluations }) => {
                    (dt, evaluations, f64::NAN, f64::NAN, false)
                }
                Err(_) => (dt, 0, f64::NAN, f64::NAN, false),
            }
        }
    }
}

/// Runs every cell and repetition. Solver failures are recorded, not fatal.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.reps).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let per_job: Vec<Result<Vec<RunRecord>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, rep)| {
                let (beta, n, sigma) = cells[c];
                let mut rng = instance_rng(cfg.seed, c, rep);
                let inst = generate_instance(n, sigma, beta, &mut rng)?;
                Ok(cfg
                    .solvers
                    .iter()
                    .map(|&solver| {
                        let (time_s, count, eta, obj, ok) = run_one(&inst, solver, cfg);
                        RunRecord {
                            beta,
                            n,
                            sigma,
                            solver,
                            rep,
                            time_s,
                            iters_or_evals: count,
                            eta,
                            objective: obj,
                            converged: ok,
                        }
                    })
                    .collect())
            })
            .collect()
    });
    let mut records = Vec::with_capacity(jobs.len() * cfg.solvers.len());
    for r in per_job {
        records.extend(r?);
    }

    let summaries = cells
        .iter()
        .map(|&(beta, n, sigma)| {
            let in_cell: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.beta == beta && r.n == n && r.sigma == sigma)
                .collect();
            let summary = |s: Solver| summarize(in_cell.iter().copied().filter(|r| r.solver == s));
            let ssn = cfg
                .solvers
                .contains(&Solver::Ssn)
                .then(|| summary(Solver::Ssn));
            let rootfind = cfg
                .solvers
                .contains(&Solver::Rootfind)
                .then(|| summary(Solver::Rootfind));
            let max_objective_gap = (ssn.is_some() && rootfind.is_some()).then(|| {
                (0..cfg.reps)
                    .map(|rep| {
                        let obj = |s| {
                            in_cell
                                .iter()
                                .find(|r| r.rep == rep && r.solver == s)
                                .map_or(f64::NAN, |r| r.objective)
                        };
                        let (a, b) = (obj(Solver::Ssn), obj(Solver::Rootfind));
                        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
                    })
                    .fold(
                        0.0,
                        |m: f64, g| if g.is_nan() { f64::NAN } else { m.max(g) },
                    )
            });
            CellResult {
                beta,
                n,
                sigma,
                ssn,
                rootfind,
                max_objective_gap,
            }
        })
        .collect();

    Ok(ExperimentTable {
        solvers: cfg.solvers.clone(),
        records,
        cells: summaries,
    })
}

fn summarize<'a>(runs: impl Iterator<Item = &'a RunRecord>) -> SolverSummary {
    let runs: Vec<&RunRecord> = runs.collect();
    let k = runs.len().max(1) as f64;
    let mut times: Vec<f64> = runs.iter().map(|r| r.time_s).collect();
    times.sort_by(f64::total_cmp);
    let median_time = match times.len() {
        0 => f64::NAN,
        m if m % 2 == 1 => times[m / 2],
        m => 0.5 * (times[m / 2 - 1] + times[m / 2]),
    };
    SolverSummary {
        mean_time: runs.iter().map(|r| r.time_s).sum::<f64>() / k,
        median_time,
        mean_count: runs.iter().map(|r| r.iters_or_evals as f64).sum::<f64>() / k,
        mean_eta: runs.iter().map(|r| r.eta).sum::<f64>() / k,
        failures: runs.iter().filter(|r| !r.converged).count(),
        runs: runs.len(),
    }
}

impl ExperimentTable {
    pub fn any_failure(&self) -> bool {
        self.records.iter().any(|r| !r.converged)
    }

    /// One row per run: `beta,n,sigma,solver,rep,time_s,iters_or_evals,eta,objective`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "beta,n,sigma,solver,rep,time_s,iters_or_evals,eta,objective"
        )?;
        for r in &self.records {
            writeln!(
                w,
                "{:e},{},{:e},{},{},{:e},{},{:e},{:e}",
                r.beta,
                r.n,
                r.sigma,
                r.solver,
                r.rep,
                r.time_s,
                r.iters_or_evals,
                r.eta,
                r.objective
            )?;
        }
        Ok(())
    }

    /// Per-cell averages as an aligned Markdown table. Cells with solver
    /// failures or an objective gap above [`GAP_TOL`] are marked with `!`.
    pub fn write_markdown<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let both = self.solvers.contains(&Solver::Rootfind);
        let with_ssn = self.solvers.contains(&Solver::Ssn);
        let mut header = vec!["beta", "n", "sigma"];
        if with_ssn {
            header.extend(["iter", "eta", "time ssn (s)"]);
        }
        if both {
            header.extend(["evals", "time rootfind (s)"]);
        }
        if with_ssn && both {
            header.push("max gap");
        }
        header.push("");
        let mut rows: Vec<Vec<String>> = Vec::new();
        for c in &self.cells {
            let mut row = vec![
                format!("{:e}", c.beta),
                format!("{:e}", c.n as f64),
                format!("{:e}", c.sigma),
            ];
            if let Some(s) = &c.ssn {
                row.push(format!("{:.1}", s.mean_count));
                row.push(format!("{:.1e}", s.mean_eta));
                row.push(format!("{:.4}", s.mean_time));
            }
            if let Some(r) = &c.rootfind {
                row.push(format!("{:.1}", r.mean_count));
                row.push(format!("{:.4}", r.mean_time));
            }
            if let Some(g) = c.max_objective_gap {
                row.push(format!("{g:.1e}"));
            }
            row.push(if c.has_failures() || c.gap_exceeded() {
                "!".into()
            } else {
                String::new()
            });
            rows.push(row);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|j| {
                rows.iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(header[j].len()))
                    .max()
                    .unwrap_or(0)
                    .max(1)
            })
            .collect();
        let line = |cells: Vec<String>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &wd)| format!("{c:>wd$}"))
                .collect();
            format!("| {} |", padded.join(" | "))
        };
        writeln!(
            w,
            "{}",
            line(header.iter().map(|s| s.to_string()).collect())
        )?;
        writeln!(
            w,
            "|{}|",
            widths
                .iter()
                .map(|&wd| format!("{}:", "-".repeat(wd + 1)))
                .collect::<Vec<_>>()
                .join("|")
        )?;
        for row in rows {
            writeln!(w, "{}", line(row))?;
        }
        Ok(())
    }
}
