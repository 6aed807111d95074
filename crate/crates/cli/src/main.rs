use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use disperse::envspec::{parse_cell, EnvRequest, EnvSource, Generator};
use disperse::experiments::{
    bench, couple, flux_series, probe, run_trials, schedule_for, BenchConfig, BenchEnv,
    BENCH_HEADER, FLUX_HEADER, PROBE_HEADER,
};
use disperse::plot::{line_chart, Series};
use disperse::records::{append_csv, fmt_p, write_csv, RUN_HEADER};
use disperse::render::{snapshot, to_ascii, to_svg};
use disperse::InvariantFailure;
use disperse_core::environment::{
    articulation_points, bfs_distances, count_classes, hole_components, is_connected,
    is_simply_connected, to_ascii as env_ascii,
};
use disperse_core::rng::derive_seed;
use disperse_core::tasep::alpha;
use disperse_core::{Algorithm, Cell, EngineError, Environment};

#[derive(Parser)]
#[command(
    name = "disperse",
    version,
    about = "Uniform dispersion experiments on grid regions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct EnvArgs {
    /// Generator: square:K, carved:K:R, gkr:K:R, path:N or ring:W:H.
    #[arg(
        long,
        value_name = "SPEC",
        conflicts_with = "map",
        required_unless_present = "map"
    )]
    gen: Option<Generator>,
    /// MovingAI `.map` file or ASCII grid (`.` free, `#` wall, `S` source).
    #[arg(long, value_name = "FILE")]
    map: Option<PathBuf>,
    /// Source cell, overriding the generator's or map's default.
    #[arg(long, value_name = "X,Y", value_parser = parse_cell)]
    source: Option<Cell>,
    /// Fill enclosed holes so the region becomes simply connected.
    #[arg(long)]
    repair: bool,
}

impl EnvArgs {
    fn request(&self) -> EnvRequest {
        let from = match (&self.gen, &self.map) {
            (Some(g), _) => EnvSource::Gen(*g),
            (None, Some(m)) => EnvSource::Map(m.clone()),
            (None, None) => unreachable!("clap requires one of --gen and --map"),
        };
        EnvRequest {
            from,
            source: self.source,
            repair: self.repair,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct TimingArgs {
    /// Every robot acts every step (the default).
    #[arg(long, conflicts_with = "p")]
    sync: bool,
    /// Wake probability of each robot and of the source.
    #[arg(long, value_name = "FLOAT", value_parser = parse_p)]
    p: Option<f64>,
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    #[arg(long, env = "DISPERSE_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_p(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(format!("probability must lie in (0, 1], got {p}"))
    }
}

fn parse_p_or_sync(s: &str) -> Result<Option<f64>, String> {
    if s == "sync" {
        Ok(None)
    } else {
        parse_p(s).map(Some)
    }
}

/// `A..B:STEP`, `A..B` or a single value.
fn parse_range(s: &str) -> Result<Vec<u32>, String> {
    let num = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|_| format!("{s:?}: bad number {v:?}"))
    };
    let Some((a, rest)) = s.split_once("..") else {
        return Ok(vec![num(s)?]);
    };
    let (b, step) = match rest.split_once(':') {
        Some((b, st)) => (num(b)?, num(st)?),
        None => (num(rest)?, 1),
    };
    if step == 0 {
        return Err(format!("{s:?}: step must be positive"));
    }
    Ok((num(a)?..=b).step_by(step as usize).collect())
}

#[derive(Subcommand)]
enum Command {
    /// Run trials and write one CSV row per trial.
    Run {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_name = "NAME")]
        alg: Algorithm,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long, value_name = "INT")]
        step_limit: Option<u64>,
        /// Append rows here instead of printing them.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Snapshot of the first trial; SVG for `.svg` paths, ASCII otherwise.
        #[arg(long, value_name = "PATH", requires = "at")]
        render: Option<PathBuf>,
        #[arg(long, value_name = "STEP", requires = "render")]
        at: Option<u64>,
    },
    /// Sweep sizes, algorithms and wake probabilities; one aggregate row each.
    Bench {
        /// Environment families.
        #[arg(long, value_delimiter = ',', default_value = "square")]
        envs: Vec<BenchEnv>,
        /// Side lengths as `A..B:STEP` or a comma list.
        #[arg(long, value_parser = parse_range, value_delimiter = ',', default_value = "10..50:10")]
        k: Vec<Vec<u32>>,
        #[arg(long, value_delimiter = ',', default_value = "fcdfs,dflf,bflf")]
        algs: Vec<Algorithm>,
        /// Wake probabilities; `sync` for synchronous timing.
        #[arg(long, value_delimiter = ',', value_parser = parse_p_or_sync, default_value = "sync")]
        p: Vec<Option<f64>>,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[command(flatten)]
        seed: SeedArg,
        /// Fixed source; random per trial when absent.
        #[arg(long, value_name = "X,Y", value_parser = parse_cell)]
        source: Option<Cell>,
        /// Fraction of cells removed in carved environments.
        #[arg(long, default_value_t = 0.2)]
        carve_fraction: f64,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Print an ASCII snapshot at a step and optionally write an SVG.
    Render {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_name = "NAME", default_value = "fcdfs")]
        alg: Algorithm,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_name = "STEP")]
        at: u64,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        /// Cell size in pixels.
        #[arg(long, default_value_t = 24)]
        px: u32,
    },
    /// Report size, connectivity, vertex classes and source distances.
    Validate {
        /// Map file; alternatively use --gen.
        #[arg(
            value_name = "MAP",
            conflicts_with = "gen",
            required_unless_present = "gen"
        )]
        map: Option<PathBuf>,
        #[arg(long, value_name = "SPEC")]
        gen: Option<Generator>,
        #[arg(long, value_name = "X,Y", value_parser = parse_cell)]
        source: Option<Cell>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Print a generated environment as an ASCII grid.
    Gen {
        spec: Generator,
        #[arg(long, value_name = "X,Y", value_parser = parse_cell)]
        source: Option<Cell>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// TASEP flux series as CSV.
    Tasep {
        #[arg(long, value_delimiter = ',', value_parser = parse_p, default_value = "0.5,0.75,1")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 20_000)]
        horizon: u64,
        /// Sampling interval.
        #[arg(long, default_value_t = 1000)]
        every: u64,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Coupled region, path and TASEP runs; prints violations and bound pass rates.
    Couple {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_parser = parse_p, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        seeds: u32,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_name = "INT")]
        step_limit: Option<u64>,
    },
    /// Asynchronous energy over its synchronous optimum across sizes.
    Probe {
        /// Target region sizes; squares of side round(√n) are used.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "100,400,900,1600,2500,4000"
        )]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', value_parser = parse_p, default_value = "0.5,0.75")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        seeds: u32,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
}

fn emit<R: AsRef<[String]>>(
    csv: Option<&PathBuf>,
    header: &[&str],
    rows: &[R],
) -> anyhow::Result<()> {
    match csv {
        Some(path) => append_csv(path, header, rows),
        None => Ok(write_csv(std::io::stdout().lock(), Some(header), rows)?),
    }
}

fn timing(t: TimingArgs) -> Option<f64> {
    if t.sync {
        None
    } else {
        t.p
    }
}

fn write_snapshot(
    env: &Environment,
    alg: Algorithm,
    p: Option<f64>,
    seed: u64,
    at: u64,
    path: &PathBuf,
) -> anyhow::Result<()> {
    let snap = snapshot(env, alg, schedule_for(p, seed)?, at)?;
    let body = if path.extension().is_some_and(|e| e == "svg") {
        to_svg(&snap, 24)
    } else {
        to_ascii(&snap)
    };
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn validate(env: &Environment) -> String {
    let r = env.region();
    let holes = hole_components(r).len();
    let classes = count_classes(r);
    let dist = bfs_distances(r, env.source()).expect("source is free");
    let yes = |b: bool| if b { "yes" } else { "no" };
    let simple = if is_simply_connected(r) {
        "yes".to_string()
    } else {
        format!("no ({holes} hole component(s))")
    };
    format!(
        "n: {}\nconnected: {}\nsimply connected: {simple}\nholes: {holes}\ncorners: {}\nhalls: {}\nopen: {}\narticulation points: {}\nsource: {},{}\nsum dist: {}\nmax dist: {}\n",
        r.len(),
        yes(is_connected(r)),
        classes.corners,
        classes.halls,
        classes.open,
        articulation_points(r).len(),
        env.source().x,
        env.source().y,
        dist.sum(),
        dist.max(),
    )
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Run {
            env,
            alg,
            timing: t,
            seed,
            trials,
            step_limit,
            csv,
            render,
            at,
        } => {
            let req = env.request();
            let p = timing(t);
            let batch = run_trials(&req, alg, p, seed.seed, trials, step_limit)?;
            let rows: Vec<_> = batch.rows.iter().map(|r| r.fields()).collect();
            emit(csv.as_ref(), &RUN_HEADER, &rows)?;
            if let (Some(path), Some(at)) = (render, at) {
                write_snapshot(
                    &req.build(seed.seed)?,
                    alg,
                    p,
                    derive_seed(seed.seed, 0),
                    at,
                    &path,
                )?;
            }
            if !batch.failures.is_empty() {
                return Err(InvariantFailure(format!(
                    "optimality equality failed: {}",
                    batch.failures.join("; ")
                ))
                .into());
            }
        }
        Command::Bench {
            envs,
            k,
            algs,
            p,
            trials,
            seed,
            source,
            carve_fraction,
            csv,
        } => {
            if !(0.0..1.0).contains(&carve_fraction) {
                bail!("--carve-fraction must lie in [0, 1)");
            }
            let cfg = BenchConfig {
                envs,
                ks: k.concat(),
                algs,
                ps: p,
                trials,
                seed: seed.seed,
                source,
                carve_fraction,
            };
            let rows: Vec<_> = bench(&cfg)?.iter().map(|r| r.fields()).collect();
            emit(csv.as_ref(), &BENCH_HEADER, &rows)?;
        }
        Command::Render {
            env,
            alg,
            timing: t,
            seed,
            at,
            svg,
            px,
        } => {
            let environment = env.request().build(seed.seed)?;
            disperse::envspec::check_supported(&environment, alg)?;
            let snap = snapshot(&environment, alg, schedule_for(timing(t), seed.seed)?, at)?;
            print!("{}", to_ascii(&snap));
            if let Some(path) = svg {
                std::fs::write(&path, to_svg(&snap, px))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Validate {
            map,
            gen,
            source,
            seed,
        } => {
            let req = match (gen, map) {
                (Some(g), _) => EnvRequest {
                    from: EnvSource::Gen(g),
                    source,
                    repair: false,
                },
                (None, Some(m)) => EnvRequest {
                    from: EnvSource::Map(m),
                    source,
                    repair: false,
                },
                (None, None) => unreachable!("clap requires a map or --gen"),
            };
            print!("{}", validate(&req.build(seed.seed)?));
        }
        Command::Gen { spec, source, seed } => {
            print!("{}", env_ascii(&spec.build(source, seed.seed)?));
        }
        Command::Tasep {
            p,
            trials,
            seed,
            horizon,
            every,
            csv,
        } => {
            let mut rows = Vec::new();
            for &p in &p {
                for j in 0..trials {
                    rows.extend(
                        flux_series(p, derive_seed(seed.seed, j as u64), horizon, every)?
                            .iter()
                            .map(|s| s.fields()),
                    );
                }
            }
            emit(csv.as_ref(), &FLUX_HEADER, &rows)?;
        }
        Command::Couple {
            env,
            p,
            seeds,
            seed,
            step_limit,
        } => {
            let s = couple(&env.request(), p, seed.seed, seeds, step_limit)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "runs: {}", s.runs)?;
            writeln!(out, "violations: {}", s.violations)?;
            writeln!(out, "alpha: {:.9}", alpha(p)?)?;
            writeln!(
                out,
                "makespan bound pass rate: {}/{}",
                s.makespan_pass, s.runs
            )?;
            writeln!(out, "energy bound pass rate: {}/{}", s.energy_pass, s.runs)?;
            writeln!(
                out,
                "flux ordering pass rate: {}/{}",
                s.flux_order_pass, s.runs
            )?;
            writeln!(
                out,
                "peak active robots: {} (max dist {})",
                s.peak_active, s.max_depth
            )?;
        }
        Command::Probe {
            n,
            p,
            seeds,
            seed,
            csv,
            svg,
        } => {
            let ks: Vec<u32> = n
                .iter()
                .map(|&n| (n as f64).sqrt().round().max(1.0) as u32)
                .collect();
            let rows = probe(&ks, &p, seed.seed, seeds)?;
            let fields: Vec<_> = rows.iter().map(|r| r.fields()).collect();
            emit(csv.as_ref(), &PROBE_HEADER, &fields)?;
            if let Some(path) = svg {
                let series: Vec<Series> = p
                    .iter()
                    .map(|&p| {
                        let mut points: Vec<(f64, f64)> = Vec::new();
                        for &k in &ks {
                            let rs: Vec<f64> = rows
                                .iter()
                                .filter(|r| r.p == p && r.k == k)
                                .map(|r| r.ratio)
                                .collect();
                            points.push(((k * k) as f64, disperse::stats::mean(&rs)));
                        }
                        Series {
                            label: format!("p = {}", fmt_p(p)),
                            points,
                        }
                    })
                    .collect();
                let guides: Vec<(String, f64)> = p
                    .iter()
                    .map(|&p| (format!("8/p, p = {}", fmt_p(p)), 8.0 / p))
                    .collect();
                let chart = line_chart(
                    "Asynchronous energy over optimum",
                    "n",
                    "E_total / (n + sum dist)",
                    &series,
                    &guides,
                );
                std::fs::write(&path, chart)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(r) = rows.iter().find(|r| r.ratio > r.ceiling()) {
                return Err(InvariantFailure(format!(
                    "ratio {:.3} exceeds 8/p at n = {}, p = {}",
                    r.ratio, r.n, r.p
                ))
                .into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let invariant = e
                .chain()
                .any(|c| c.is::<InvariantFailure>() || c.is::<EngineError>());
            ExitCode::from(if invariant { 1 } else { 2 })
        }
    }
}
