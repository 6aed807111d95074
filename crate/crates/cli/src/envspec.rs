//! Environment requests from `--gen`, `--map`, `--source` and `--repair`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use disperse_core::environment::{
    from_ascii, gen_carved, gen_gkr, gen_path, gen_ring, gen_square, hole_components,
    is_simply_connected, load_movingai, repair_holes,
};
use disperse_core::{Algorithm, Cell, Environment};

/// A generator family with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Square(u32),
    Carved(u32, u32),
    Gkr(u32, u32),
    Path(u32),
    Ring(u32, u32),
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<u32, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("{s:?}: missing parameter {i}"))?
                .parse()
                .map_err(|_| format!("{s:?}: parameter {i} is not a non-negative integer"))
        };
        let arity = |k: usize| {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(format!("{s:?}: expected {k} parameters"))
            }
        };
        match parts[0] {
            "square" => arity(1).and(Ok(Generator::Square(num(1)?))),
            "carved" => arity(2).and(Ok(Generator::Carved(num(1)?, num(2)?))),
            "gkr" => arity(2).and(Ok(Generator::Gkr(num(1)?, num(2)?))),
            "path" => arity(1).and(Ok(Generator::Path(num(1)?))),
            "ring" => arity(2).and(Ok(Generator::Ring(num(1)?, num(2)?))),
            other => Err(format!("unknown generator {other:?}; use square:K, carved:K:R, gkr:K:R, path:N or ring:W:H")),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Square(k) => write!(f, "square:{k}"),
            Generator::Carved(k, r) => write!(f, "carved:{k}:{r}"),
            Generator::Gkr(k, r) => write!(f, "gkr:{k}:{r}"),
            Generator::Path(n) => write!(f, "path:{n}"),
            Generator::Ring(w, h) => write!(f, "ring:{w}:{h}"),
        }
    }
}

impl Generator {
    /// Builds the environment. `seed` picks the carving and the source of
    /// carved regions; `source` overrides the default source.
    pub fn build(self, source: Option<Cell>, seed: u64) -> anyhow::Result<Environment> {
        let env = match self {
            Generator::Square(k) => return Ok(gen_square(k, source.unwrap_or(Cell::new(0, 0)))?),
            Generator::Carved(k, r) => gen_carved(k, r, seed)?,
            Generator::Gkr(k, r) => gen_gkr(k, r)?,
            Generator::Path(n) => gen_path(n)?,
            Generator::Ring(w, h) => gen_ring(w, h)?,
        };
        Ok(match source {
            Some(s) => env.with_source(s)?,
            None => env,
        })
    }
}

/// Parses `X,Y`.
pub fn parse_cell(s: &str) -> Result<Cell, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("{s:?}: expected X,Y"))?;
    let coord = |v: &str| {
        v.trim()
            .parse::<i32>()
            .map_err(|_| format!("{s:?}: bad coordinate {v:?}"))
    };
    Ok(Cell::new(coord(x)?, coord(y)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvSource {
    Gen(Generator),
    Map(PathBuf),
}

/// Where the environment comes from and how to adjust it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvRequest {
    pub from: EnvSource,
    pub source: Option<Cell>,
    pub repair: bool,
}

impl EnvRequest {
    pub fn generator(g: Generator) -> EnvRequest {
        EnvRequest {
            from: EnvSource::Gen(g),
            source: None,
            repair: false,
        }
    }

    /// Identifier used in the `env_id` column.
    pub fn id(&self) -> String {
        let base = match &self.from {
            EnvSource::Gen(g) => g.to_string(),
            EnvSource::Map(p) => p.file_name().map_or_else(
                || p.display().to_string(),
                |f| f.to_string_lossy().into_owned(),
            ),
        };
        match self.source {
            Some(s) => format!("{base}@{},{}", s.x, s.y),
            None => base,
        }
    }

    /// Builds the environment, filling holes when `repair` is set.
    pub fn build(&self, seed: u64) -> anyhow::Result<Environment> {
        let env = match &self.from {
            EnvSource::Gen(g) => g.build(self.source, seed)?,
            EnvSource::Map(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                load_map_text(&text, self.source)
                    .with_context(|| format!("loading {}", path.display()))?
            }
        };
        Ok(if self.repair { repair_holes(&env) } else { env })
    }
}

/// Reads a MovingAI map (first line `type ...`) or an ASCII grid.
pub fn load_map_text(text: &str, source: Option<Cell>) -> anyhow::Result<Environment> {
    if text.trim_start().starts_with("type") {
        let Some(s) = source else {
            bail!("MovingAI maps need --source X,Y")
        };
        return Ok(load_movingai(text, s)?);
    }
    let env = from_ascii(text)?;
    Ok(match source {
        Some(s) => env.with_source(s)?,
        None => env,
    })
}

/// Corner-following policies are only defined on simply connected regions.
pub fn check_supported(env: &Environment, alg: Algorithm) -> anyhow::Result<()> {
    let needs_simple = matches!(
        alg,
        Algorithm::Fcdfs | Algorithm::Fcdfs5 | Algorithm::AsynchFcdfs
    );
    if needs_simple && !is_simply_connected(env.region()) {
        let holes = hole_components(env.region()).len();
        bail!("region is not simply connected ({holes} hole component(s)); {alg} needs a simply connected region, pass --repair to fill holes");
    }
    Ok(())
}
