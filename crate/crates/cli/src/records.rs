//! CSV rows.

use std::io::Write;

use disperse_core::{MetricsReport, OptimalBaselines};

pub const RUN_HEADER: [&str; 15] = [
    "env_id",
    "algorithm",
    "p",
    "seed",
    "n",
    "M",
    "M_star",
    "T_total",
    "T_total_star",
    "T_max",
    "T_max_star",
    "E_total",
    "E_total_star",
    "E_max",
    "E_max_star",
];

/// One run against its optima.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub env_id: String,
    pub algorithm: String,
    /// Wake probability, `None` for synchronous runs.
    pub p: Option<f64>,
    pub seed: u64,
    pub report: MetricsReport,
    pub opt: OptimalBaselines,
}

impl RunRow {
    pub fn fields(&self) -> [String; 15] {
        let (r, o) = (&self.report, &self.opt);
        [
            self.env_id.clone(),
            self.algorithm.clone(),
            self.p.map_or_else(|| "sync".into(), fmt_p),
            self.seed.to_string(),
            r.n.to_string(),
            r.makespan.to_string(),
            o.makespan.to_string(),
            r.t_total.to_string(),
            o.t_total.to_string(),
            r.t_max.to_string(),
            o.t_max.to_string(),
            r.e_total.to_string(),
            o.e_total.to_string(),
            r.e_max.to_string(),
            o.e_max.to_string(),
        ]
    }
}

/// Writes `rows`, preceded by `header` when given.
pub fn write_csv<W: Write, R: AsRef<[String]>>(
    out: W,
    header: Option<&[&str]>,
    rows: &[R],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for row in rows {
        w.write_record(row.as_ref())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends rows to `path`, writing the header only when the file is new or empty.
pub fn append_csv<R: AsRef<[String]>>(
    path: &std::path::Path,
    header: &[&str],
    rows: &[R],
) -> anyhow::Result<()> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    write_csv(file, fresh.then_some(header), rows)?;
    Ok(())
}

/// Formats a probability without trailing noise.
pub fn fmt_p(p: f64) -> String {
    format!("{p}")
}
