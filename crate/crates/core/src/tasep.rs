//! Totally asymmetric simple exclusion with step initial conditions, and the
//! coupling of a region run, a path run and TASEP over shared wake streams.

use alloc::vec::Vec;

use crate::algorithms::AsynchFcdfs;
use crate::engine::{EngineError, Local, RobotId, Schedule, Simulation, TraceDetail, World};
use crate::environment::{gen_path, EnvError, Environment};
use crate::rng::{WakeProbability, WakeStream};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TasepError {
    #[error("probability must lie in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("exclusion violated by agent {i} at step {t}")]
    ExclusionViolated { i: usize, t: u64 },
    #[error("no completion within {0} steps")]
    StepLimit(u64),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Asymptotic flux `½(1 - √(1 - p))`.
pub fn alpha(p: f64) -> Result<f64, TasepError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(TasepError::BadProbability(p));
    }
    Ok(0.5 * (1.0 - libm::sqrt(1.0 - p)))
}

/// `p / α(p)`, which never exceeds 4.
pub fn p_over_alpha(p: f64) -> Result<f64, TasepError> {
    Ok(p / alpha(p)?)
}

/// `(1/α + n^{-1/3})(n + 1)`: the makespan yardstick on a path of `n` cells.
pub fn makespan_bound(n: usize, p: f64) -> Result<f64, TasepError> {
    Ok((1.0 / alpha(p)? + libm::cbrt(n as f64).recip()) * (n as f64 + 1.0))
}

/// `2(1/α + d^{-1/3}) d`: the per-robot energy yardstick at depth `d`.
pub fn energy_bound(d: u32, p: f64) -> Result<f64, TasepError> {
    Ok(2.0 * (1.0 / alpha(p)? + libm::cbrt(d as f64).recip()) * d as f64)
}

/// Agents needed to know `F(t)` exactly up to `horizon`: agent `i` cannot
/// reach the origin before step `2i - 1`.
pub fn agents_for_horizon(horizon: u64) -> usize {
    (horizon as usize).div_ceil(2) + 1
}

/// Positions of agents `1..=N`, agent `i` starting at `-i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TasepState {
    x: Vec<i64>,
    t: u64,
    flux: usize,
    /// Agents from this zero-based index on are still at their start.
    frozen: usize,
}

impl TasepState {
    pub fn new(agents: usize) -> TasepState {
        TasepState {
            x: (1..=agents as i64).map(|i| -i).collect(),
            t: 0,
            flux: 0,
            frozen: 0,
        }
    }

    pub fn clock(&self) -> u64 {
        self.t
    }

    /// `x_i` for `i = 1..=N` at index `i - 1`.
    pub fn positions(&self) -> &[i64] {
        &self.x
    }

    pub fn position(&self, i: usize) -> i64 {
        self.x[i - 1]
    }

    /// Advances one step. `wake(i)` is asked only for agents `i` whose next
    /// cell is empty at step start.
    pub fn step_with(&mut self, mut wake: impl FnMut(usize) -> bool) -> Result<(), TasepError> {
        self.t += 1;
        let limit = (self.frozen + 1).min(self.x.len());
        let mut ahead_old = i64::MAX;
        for k in 0..limit {
            let xk = self.x[k];
            let free = xk + 1 < ahead_old;
            ahead_old = xk;
            if free && wake(k + 1) {
                self.x[k] = xk + 1;
                if xk == -1 {
                    self.flux += 1;
                }
                if k > 0 && self.x[k] >= self.x[k - 1] {
                    return Err(TasepError::ExclusionViolated {
                        i: k + 1,
                        t: self.t,
                    });
                }
            }
        }
        while self.frozen < self.x.len() && self.x[self.frozen] != -(self.frozen as i64 + 1) {
            self.frozen += 1;
        }
        Ok(())
    }

    /// Advances one step with explicit wake bits; agents past the slice sleep.
    pub fn step(&mut self, wake_bits: &[bool]) -> Result<(), TasepError> {
        self.step_with(|i| wake_bits.get(i - 1).copied().unwrap_or(false))
    }

    /// Advances one step using agent `i`'s stream `(seed, i)`.
    pub fn step_stream(&mut self, seed: u64, p: WakeProbability) -> Result<(), TasepError> {
        let t = self.t + 1;
        self.step_with(|i| WakeStream::new(seed, i as i64).wakes(t, p))
    }
}

/// `F(t)`: agents at a non-negative coordinate.
pub fn flux_count(state: &TasepState) -> usize {
    state.flux
}

/// Which coupling inequality failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Robot unsettled in the region while settled on the path.
    SettledOnPathFirst,
    /// Robot shallower in the region than on the path.
    RegionDepthBelowPath,
    /// Robot unsettled on the path and shallower than its TASEP agent.
    PathDepthBelowTasep,
    /// `F(t) > n` while the region run is still incomplete.
    FluxBeforeCompletion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CouplingViolation {
    /// One-based robot index; zero for the flux condition.
    pub i: usize,
    pub t: u64,
    pub kind: ViolationKind,
}

/// State of all three processes at the end of one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub t: u64,
    pub depth_region: Vec<i64>,
    pub depth_path: Vec<i64>,
    pub tasep: Vec<i64>,
    pub settled_region: Vec<bool>,
    pub settled_path: Vec<bool>,
}

/// Outcome of a coupled run.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingReport {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub region_makespan: u64,
    pub path_makespan: u64,
    /// First step with `F(t) >= n + 1`.
    pub flux_time: u64,
    pub violations: Vec<CouplingViolation>,
    pub records: Vec<StepRecord>,
}

impl CouplingReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn depth(world: &World, i: RobotId) -> i64 {
    world.robots().get(i).map_or(-1, |r| r.moves as i64)
}

fn settled(world: &World, i: RobotId) -> bool {
    world.robots().get(i).is_some_and(|r| r.settled)
}

/// Runs the asynchronous policy on `env` and on the path of the same size,
/// plus TASEP, all on the streams `(seed, i)`, checking every step that
/// region depth ≥ path depth ≥ TASEP position for unsettled robots, and that
/// `F(t) > n` only once the region is full.
pub fn coupled_run(
    env: &Environment,
    p: f64,
    seed: u64,
    step_limit: u64,
    record_steps: bool,
) -> Result<CouplingReport, TasepError> {
    let wp = WakeProbability::new(p).ok_or(TasepError::BadProbability(p))?;
    let n = env.n();
    let schedule = Schedule::coupled(p, seed)?;
    let mut region = Simulation::new(env.clone(), schedule, TraceDetail::Compact);
    let mut path = Simulation::new(gen_path(n as u32)?, schedule, TraceDetail::Compact);
    let mut tasep = TasepState::new(n + 1);
    let mut policy = Local(AsynchFcdfs);
    let mut report = CouplingReport {
        n,
        p,
        seed,
        region_makespan: 0,
        path_makespan: 0,
        flux_time: 0,
        violations: Vec::new(),
        records: Vec::new(),
    };
    loop {
        let t = tasep.clock();
        let (r, q) = (&region.world, &path.world);
        for i in 0..n {
            let mut flag = |kind| {
                report
                    .violations
                    .push(CouplingViolation { i: i + 1, t, kind })
            };
            if !settled(r, i) {
                if settled(q, i) {
                    flag(ViolationKind::SettledOnPathFirst);
                } else if depth(r, i) < depth(q, i) {
                    flag(ViolationKind::RegionDepthBelowPath);
                }
            }
            if !settled(q, i) && depth(q, i) < tasep.position(i + 1) {
                flag(ViolationKind::PathDepthBelowTasep);
            }
        }
        let flux = flux_count(&tasep);
        if flux > n && report.flux_time == 0 {
            report.flux_time = t;
        }
        if flux > n && !r.is_complete() {
            report.violations.push(CouplingViolation {
                i: 0,
                t,
                kind: ViolationKind::FluxBeforeCompletion,
            });
        }
        if record_steps {
            report.records.push(StepRecord {
                t,
                depth_region: (0..n).map(|i| depth(r, i)).collect(),
                depth_path: (0..n).map(|i| depth(q, i)).collect(),
                tasep: tasep.positions().to_vec(),
                settled_region: (0..n).map(|i| settled(r, i)).collect(),
                settled_path: (0..n).map(|i| settled(q, i)).collect(),
            });
        }
        if r.is_complete() && report.region_makespan == 0 {
            report.region_makespan = t;
        }
        if q.is_complete() && report.path_makespan == 0 {
            report.path_makespan = t;
        }
        if r.is_complete() && q.is_complete() && flux > n {
            return Ok(report);
        }
        if t >= step_limit {
            return Err(TasepError::StepLimit(step_limit));
        }
        if !region.world.is_complete() {
            region.step(&mut policy)?;
        }
        if !path.world.is_complete() {
            path.step(&mut policy)?;
        }
        tasep.step_stream(seed, wp)?;
    }
}
