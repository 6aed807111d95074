//! Makespan, travel and energy from traces, and their analytic optima.

use alloc::vec::Vec;
use core::fmt;

use crate::engine::{Event, Trace};
use crate::environment::{bfs_distances, Environment};
use crate::grid::Cell;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("trace is incomplete: {settled} of {n} cells hold settled robots")]
    IncompleteTrace { settled: usize, n: usize },
}

/// Per-robot figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RobotMetrics {
    pub t_start: u64,
    pub t_end: u64,
    /// Moves made, `T_i`.
    pub travel: u64,
    /// Steps from entry to settling, `E_i = t_end - t_start`.
    pub energy: u64,
    pub settle_cell: Cell,
}

/// Metrics of one complete run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricsReport {
    pub n: usize,
    pub makespan: u64,
    pub t_total: u64,
    pub t_max: u64,
    pub e_total: u64,
    pub e_max: u64,
    pub robots: Vec<RobotMetrics>,
}

pub fn compute_metrics(trace: &Trace) -> Result<MetricsReport, MetricsError> {
    struct Acc {
        t_start: u64,
        t_end: Option<u64>,
        moves: u64,
        cell: Cell,
    }
    let mut acc: Vec<Acc> = Vec::new();
    for e in trace.events() {
        match *e {
            Event::Enter { t, robot, cell } => {
                debug_assert_eq!(robot, acc.len());
                acc.push(Acc {
                    t_start: t,
                    t_end: None,
                    moves: 0,
                    cell,
                });
            }
            Event::Move { robot, to, .. } => {
                acc[robot].moves += 1;
                acc[robot].cell = to;
            }
            Event::Settle { t, robot, .. } => acc[robot].t_end = Some(t),
            _ => {}
        }
    }
    let settled = acc.iter().filter(|a| a.t_end.is_some()).count();
    if settled != trace.n() || acc.len() != trace.n() {
        return Err(MetricsError::IncompleteTrace {
            settled,
            n: trace.n(),
        });
    }
    let robots: Vec<RobotMetrics> = acc
        .iter()
        .map(|a| {
            let t_end = a.t_end.unwrap();
            RobotMetrics {
                t_start: a.t_start,
                t_end,
                travel: a.moves,
                energy: t_end - a.t_start,
                settle_cell: a.cell,
            }
        })
        .collect();
    Ok(MetricsReport {
        n: trace.n(),
        makespan: robots.iter().map(|r| r.t_end).max().unwrap_or(0),
        t_total: robots.iter().map(|r| r.travel).sum(),
        t_max: robots.iter().map(|r| r.travel).max().unwrap_or(0),
        e_total: robots.iter().map(|r| r.energy).sum(),
        e_max: robots.iter().map(|r| r.energy).max().unwrap_or(0),
        robots,
    })
}

/// Lower bounds that an omniscient controller attains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimalBaselines {
    pub n: usize,
    pub makespan: u64,
    pub t_total: u64,
    pub t_max: u64,
    pub e_total: u64,
    pub e_max: u64,
}

pub fn optimal_baselines(env: &Environment) -> OptimalBaselines {
    let dist = bfs_distances(env.region(), env.source()).expect("source is free");
    let n = env.n();
    let sum = dist.sum();
    let max = dist.max() as u64;
    OptimalBaselines {
        n,
        makespan: 2 * n as u64,
        t_total: sum,
        t_max: max,
        e_total: n as u64 + sum,
        e_max: 1 + max,
    }
}

/// `actual / optimal` kept as integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub actual: u64,
    pub optimal: u64,
}

impl Ratio {
    pub fn is_exact(&self) -> bool {
        self.actual == self.optimal
    }

    pub fn value(&self) -> f64 {
        if self.optimal == 0 {
            if self.actual == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.actual as f64 / self.optimal as f64
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.actual, self.optimal)
    }
}

/// All five ratios of a report against the optima.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub makespan: Ratio,
    pub t_total: Ratio,
    pub t_max: Ratio,
    pub e_total: Ratio,
    pub e_max: Ratio,
}

impl Comparison {
    pub fn all(&self) -> [(&'static str, Ratio); 5] {
        [
            ("M", self.makespan),
            ("T_total", self.t_total),
            ("T_max", self.t_max),
            ("E_total", self.e_total),
            ("E_max", self.e_max),
        ]
    }

    pub fn all_exact(&self) -> bool {
        self.all().iter().all(|(_, r)| r.is_exact())
    }
}

pub fn compare(report: &MetricsReport, opt: &OptimalBaselines) -> Comparison {
    let r = |actual, optimal| Ratio { actual, optimal };
    Comparison {
        makespan: r(report.makespan, opt.makespan),
        t_total: r(report.t_total, opt.t_total),
        t_max: r(report.t_max, opt.t_max),
        e_total: r(report.e_total, opt.e_total),
        e_max: r(report.e_max, opt.e_max),
    }
}
