//! Trial runners shared by the binary and the acceptance suite.

use anyhow::{bail, Context};
use disperse_core::engine::TraceDetail;
use disperse_core::environment::{bfs_distances, gen_carved, gen_square, random_cell};
use disperse_core::invariants::{run_monitored, Checks};
use disperse_core::rng::{derive_seed, WakeProbability};
use disperse_core::tasep::{
    agents_for_horizon, alpha, coupled_run, energy_bound, flux_count, makespan_bound, TasepState,
};
use disperse_core::{
    compute_metrics, optimal_baselines, run, Algorithm, Cell, Environment, MetricsReport,
    RunOutcome, Schedule,
};

use crate::envspec::{check_supported, EnvRequest};
use crate::records::{fmt_p, RunRow};
use crate::stats::{mean, std_dev};
use crate::InvariantFailure;

/// Synchronous for `None`, independent Bernoulli wakes otherwise.
pub fn schedule_for(p: Option<f64>, seed: u64) -> anyhow::Result<Schedule> {
    Ok(match p {
        None => Schedule::Synchronous,
        Some(p) => Schedule::bernoulli(p, seed)?,
    })
}

/// A generous default: a hundred times the synchronous makespan, scaled by
/// the slowdown `1 / α(p)`.
pub fn default_step_limit(n: usize, p: Option<f64>) -> u64 {
    let slow = p.and_then(|p| alpha(p).ok()).map_or(1.0, |a| 0.5 / a);
    (100.0 * slow * (2 * n + 2) as f64).ceil() as u64 + 1000
}

/// Runs one trial to completion and computes its metrics.
pub fn run_metrics(
    env: &Environment,
    alg: Algorithm,
    schedule: &Schedule,
    step_limit: u64,
) -> anyhow::Result<MetricsReport> {
    if alg.needs_synchronous() && *schedule != Schedule::Synchronous {
        bail!("{alg} needs synchronous timing");
    }
    let mut policy = alg.policy(env);
    let out = run(
        env,
        policy.as_mut(),
        schedule,
        step_limit,
        TraceDetail::Compact,
    )?;
    if out.outcome == RunOutcome::StepLimitExceeded {
        bail!("{alg} did not finish within {step_limit} steps");
    }
    Ok(compute_metrics(&out.trace)?)
}

/// Result of a batch of trials on one environment.
#[derive(Clone, Debug)]
pub struct TrialBatch {
    pub rows: Vec<RunRow>,
    /// Optimality equalities that did not hold, one message each.
    pub failures: Vec<String>,
}

/// Runs `trials` trials; trial `j` uses seed `derive_seed(seed, j)`.
pub fn run_trials(
    req: &EnvRequest,
    alg: Algorithm,
    p: Option<f64>,
    seed: u64,
    trials: u32,
    step_limit: Option<u64>,
) -> anyhow::Result<TrialBatch> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let env = req.build(seed)?;
    check_supported(&env, alg)?;
    let opt = optimal_baselines(&env);
    let limit = step_limit.unwrap_or_else(|| default_step_limit(env.n(), p));
    if limit < 2 * env.n() as u64 {
        bail!("--step-limit {limit} is below 2n = {}", 2 * env.n());
    }
    let mut batch = TrialBatch {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for j in 0..trials {
        let s = derive_seed(seed, j as u64);
        let schedule = schedule_for(p, s)?;
        let report = run_metrics(&env, alg, &schedule, limit)
            .with_context(|| format!("env {} seed {s}", req.id()))?;
        let cmp = disperse_core::metrics::compare(&report, &opt);
        if p.is_none() && alg.optimal_when_synchronous() && !cmp.all_exact() {
            let detail: Vec<String> = cmp
                .all()
                .iter()
                .filter(|(_, r)| !r.is_exact())
                .map(|(k, r)| format!("{k}={r}"))
                .collect();
            batch.failures.push(format!(
                "{alg} on {} seed {s}: {}",
                req.id(),
                detail.join(" ")
            ));
        }
        batch.rows.push(RunRow {
            env_id: req.id(),
            algorithm: alg.to_string(),
            p,
            seed: s,
            report,
            opt,
        });
    }
    Ok(batch)
}

/// Environment family of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchEnv {
    /// `k × k` square, random source unless one is fixed.
    Square,
    /// Carved square with a fraction of cells removed.
    Carved,
}

impl std::str::FromStr for BenchEnv {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(BenchEnv::Square),
            "carved" => Ok(BenchEnv::Carved),
            _ => Err(format!(
                "unknown sweep environment {s:?}; use square or carved"
            )),
        }
    }
}

impl std::fmt::Display for BenchEnv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchEnv::Square => "square",
            BenchEnv::Carved => "carved",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub envs: Vec<BenchEnv>,
    pub ks: Vec<u32>,
    pub algs: Vec<Algorithm>,
    pub ps: Vec<Option<f64>>,
    pub trials: u32,
    pub seed: u64,
    /// Fixed source for square sweeps.
    pub source: Option<Cell>,
    /// Fraction of cells removed in carved sweeps.
    pub carve_fraction: f64,
}

pub const BENCH_HEADER: [&str; 16] = [
    "env",
    "k",
    "algorithm",
    "p",
    "trials",
    "n_mean",
    "M_mean",
    "M_std",
    "T_total_mean",
    "T_total_std",
    "T_max_mean",
    "T_max_std",
    "E_total_mean",
    "E_total_std",
    "E_max_mean",
    "E_max_std",
];

/// One aggregate sweep row. `stats` holds (mean, std) of M, T_total,
/// T_max, E_total and E_max in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub env: BenchEnv,
    pub k: u32,
    pub algorithm: Algorithm,
    pub p: Option<f64>,
    pub trials: u32,
    pub n_mean: f64,
    pub stats: [(f64, f64); 5],
}

impl BenchRow {
    pub fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.env.to_string(),
            self.k.to_string(),
            self.algorithm.to_string(),
            self.p.map_or_else(|| "sync".into(), fmt_p),
            self.trials.to_string(),
            format!("{:.3}", self.n_mean),
        ];
        for (m, s) in self.stats {
            out.push(format!("{m:.3}"));
            out.push(format!("{s:.3}"));
        }
        out
    }

    pub fn t_total_mean(&self) -> f64 {
        self.stats[1].0
    }
}

/// Environment of trial `seed` in a sweep.
pub fn bench_env(
    kind: BenchEnv,
    k: u32,
    seed: u64,
    source: Option<Cell>,
    carve_fraction: f64,
) -> anyhow::Result<Environment> {
    Ok(match kind {
        BenchEnv::Square => {
            let full = gen_square(k, Cell::new(0, 0))?;
            let s = source.unwrap_or_else(|| random_cell(full.region(), seed));
            full.with_source(s)?
        }
        BenchEnv::Carved => {
            let removals = (carve_fraction * (k * k) as f64).round() as u32;
            let env = gen_carved(k, removals.min(k * k - 1), seed)?;
            match source {
                Some(s) if env.contains(s) => env.with_source(s)?,
                _ => env,
            }
        }
    })
}

/// Runs the sweep; rows come out in (env, k, algorithm, p) order.
pub fn bench(cfg: &BenchConfig) -> anyhow::Result<Vec<BenchRow>> {
    if cfg.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let mut rows = Vec::new();
    for &kind in &cfg.envs {
        for &k in &cfg.ks {
            let envs: Vec<Environment> = (0..cfg.trials)
                .map(|j| {
                    bench_env(
                        kind,
                        k,
                        derive_seed(cfg.seed, j as u64),
                        cfg.source,
                        cfg.carve_fraction,
                    )
                })
                .collect::<anyhow::Result<_>>()?;
            for &alg in &cfg.algs {
                for &p in &cfg.ps {
                    if p.is_some() && alg.needs_synchronous() {
                        continue;
                    }
                    let mut samples: [Vec<f64>; 5] = Default::default();
                    for (j, env) in envs.iter().enumerate() {
                        let s = derive_seed(cfg.seed, j as u64);
                        let limit = default_step_limit(env.n(), p);
                        let m = run_metrics(env, alg, &schedule_for(p, s)?, limit)
                            .with_context(|| format!("{kind}:{k} {alg} seed {s}"))?;
                        for (v, x) in samples
                            .iter_mut()
                            .zip([m.makespan, m.t_total, m.t_max, m.e_total, m.e_max])
                        {
                            v.push(x as f64);
                        }
                    }
                    let ns: Vec<f64> = envs.iter().map(|e| e.n() as f64).collect();
                    let stats = samples.each_ref().map(|v| (mean(v), std_dev(v)));
                    rows.push(BenchRow {
                        env: kind,
                        k,
                        algorithm: alg,
                        p,
                        trials: cfg.trials,
                        n_mean: mean(&ns),
                        stats,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// `F(t)` sampled along one TASEP run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxSample {
    pub p: f64,
    pub seed: u64,
    pub t: u64,
    pub flux: usize,
}

impl FluxSample {
    pub fn rate(&self) -> f64 {
        if self.t == 0 {
            0.0
        } else {
            self.flux as f64 / self.t as f64
        }
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            fmt_p(self.p),
            self.seed.to_string(),
            self.t.to_string(),
            self.flux.to_string(),
            format!("{:.6}", self.rate()),
        ]
    }
}

pub const FLUX_HEADER: [&str; 5] = ["p", "seed", "t", "F_t", "alpha_t_estimate"];

/// Runs TASEP to `horizon`, sampling every `every` steps and at the horizon.
pub fn flux_series(p: f64, seed: u64, horizon: u64, every: u64) -> anyhow::Result<Vec<FluxSample>> {
    let wp = WakeProbability::new(p)
        .with_context(|| format!("probability must lie in (0, 1], got {p}"))?;
    let every = every.max(1);
    let mut state = TasepState::new(agents_for_horizon(horizon));
    let mut out = Vec::new();
    for t in 1..=horizon {
        state.step_stream(seed, wp)?;
        if t % every == 0 || t == horizon {
            out.push(FluxSample {
                p,
                seed,
                t,
                flux: flux_count(&state),
            });
        }
    }
    Ok(out)
}

/// Outcome of coupled runs over several seeds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoupleSummary {
    pub runs: usize,
    pub violations: usize,
    /// Path makespan within `(1/α + n^{-1/3})(n + 1)`.
    pub makespan_pass: usize,
    /// Region `E_max` within `2(1/α + d^{-1/3})d`.
    pub energy_pass: usize,
    /// Region makespan at most the first step with `F(t) > n`.
    pub flux_order_pass: usize,
    /// Peak count of active robots in the region, over all runs.
    pub peak_active: usize,
    /// Largest source distance seen.
    pub max_depth: u32,
    pub first_violation: Option<String>,
}

/// Coupled runs for seeds `derive_seed(seed, j)`, `j < seeds`, plus an
/// energy check of the region run under the same seed.
pub fn couple(
    req: &EnvRequest,
    p: f64,
    seed: u64,
    seeds: u32,
    step_limit: Option<u64>,
) -> anyhow::Result<CoupleSummary> {
    let mut sum = CoupleSummary::default();
    for j in 0..seeds {
        let s = derive_seed(seed, j as u64);
        let env = req.build(s)?;
        check_supported(&env, Algorithm::AsynchFcdfs)?;
        let limit = step_limit.unwrap_or_else(|| default_step_limit(env.n(), Some(p)));
        let report = coupled_run(&env, p, s, limit, false)
            .with_context(|| format!("{} seed {s}", req.id()))?;
        sum.runs += 1;
        sum.violations += report.violations.len();
        if let (None, Some(v)) = (&sum.first_violation, report.violations.first()) {
            sum.first_violation = Some(format!(
                "seed {s}: robot {} at step {}: {:?}",
                v.i, v.t, v.kind
            ));
        }
        sum.makespan_pass +=
            usize::from(report.path_makespan as f64 <= makespan_bound(env.n(), p)?);
        sum.flux_order_pass += usize::from(report.region_makespan <= report.flux_time);

        let d = bfs_distances(env.region(), env.source())?.max();
        sum.max_depth = sum.max_depth.max(d);
        let mut policy = Algorithm::AsynchFcdfs.policy(&env);
        let m = run_monitored(
            &env,
            policy.as_mut(),
            Schedule::bernoulli(p, s)?,
            limit,
            TraceDetail::Compact,
            Checks::default(),
        )?;
        sum.peak_active = sum.peak_active.max(m.peak_active);
        let e_max = compute_metrics(&m.trace)?.e_max;
        sum.energy_pass += usize::from(e_max as f64 <= energy_bound(d, p)?);
    }
    if sum.violations > 0 {
        return Err(InvariantFailure(format!(
            "{} coupling violation(s); first {}",
            sum.violations,
            sum.first_violation.clone().unwrap_or_default()
        ))
        .into());
    }
    Ok(sum)
}

/// One point of the energy-ratio probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub k: u32,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub e_total: u64,
    pub e_star: u64,
    pub ratio: f64,
}

pub const PROBE_HEADER: [&str; 8] = [
    "k",
    "n",
    "p",
    "seed",
    "E_total",
    "E_total_star",
    "ratio",
    "ceiling",
];

impl ProbeRow {
    pub fn ceiling(&self) -> f64 {
        8.0 / self.p
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.n.to_string(),
            fmt_p(self.p),
            self.seed.to_string(),
            self.e_total.to_string(),
            self.e_star.to_string(),
            format!("{:.6}", self.ratio),
            format!("{:.6}", self.ceiling()),
        ]
    }
}

/// Asynchronous energy over its synchronous optimum on corner-source
/// squares of side `k`.
pub fn probe(ks: &[u32], ps: &[f64], seed: u64, seeds: u32) -> anyhow::Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for &p in ps {
        for &k in ks {
            let env = gen_square(k, Cell::new(0, 0))?;
            let opt = optimal_baselines(&env);
            for j in 0..seeds {
                let s = derive_seed(seed, j as u64);
                let m = run_metrics(
                    &env,
                    Algorithm::AsynchFcdfs,
                    &Schedule::bernoulli(p, s)?,
                    default_step_limit(env.n(), Some(p)),
                )?;
                rows.push(ProbeRow {
                    k,
                    n: env.n(),
                    p,
                    seed: s,
                    e_total: m.e_total,
                    e_star: opt.e_total,
                    ratio: m.e_total as f64 / opt.e_total as f64,
                });
            }
        }
    }
    Ok(rows)
}
