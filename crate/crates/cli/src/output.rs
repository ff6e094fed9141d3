//! Tables written as CSV or JSON lines behind a `#` comment header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use spinor_tunnel::analysis::unwrap_angles;
use spinor_tunnel::{ReducedTrajectory, SampledSeries, Trajectory, VERSION};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Key/value pairs recorded at the top of every data file.
#[derive(Debug, Clone, Default)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        let mut h = Self::default();
        h.push("command", command);
        h
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    /// Records a float with its shortest round-trip representation.
    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, format!("{value:?}"))
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("# spinor-tunnel {VERSION}")];
        out.extend(self.entries.iter().map(|(k, v)| format!("# {k} = {v}")));
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Num(v) => v,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }
}

/// Seventeen significant digits.
pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(e.to_string())
}

pub fn write_table<W: Write>(w: W, header: &Header, table: &Table, format: Format) -> CliResult<()> {
    let mut w = BufWriter::new(w);
    let io = |e| CliError::Io { path: "<output>".into(), source: e };
    for line in header.lines() {
        writeln!(w, "{line}").map_err(io)?;
    }
    match format {
        Format::Csv => {
            let mut cw = csv::WriterBuilder::new().has_headers(false).from_writer(&mut w);
            cw.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                let fields = row.iter().map(|c| match c {
                    Cell::Num(v) => format_num(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Missing => String::new(),
                });
                cw.write_record(fields).map_err(csv_err)?;
            }
            cw.flush().map_err(io)?;
        }
        Format::Jsonl => {
            for row in &table.rows {
                let mut obj = serde_json::Map::new();
                for (name, cell) in table.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(x) => serde_json::Value::from(*x),
                        Cell::Text(s) => serde_json::Value::from(s.as_str()),
                        Cell::Missing => serde_json::Value::Null,
                    };
                    obj.insert(name.clone(), v);
                }
                serde_json::to_writer(&mut w, &obj).map_err(|e| CliError::Data(e.to_string()))?;
                writeln!(w).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

/// Where a table goes: a file path or standard output (`-`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    pub fn from_arg(p: &Path) -> Self {
        if p.as_os_str() == "-" {
            Self::Stdout
        } else {
            Self::File(p.to_path_buf())
        }
    }

    pub fn is_stdout(&self) -> bool {
        matches!(self, Self::Stdout)
    }

    pub fn label(&self) -> String {
        match self {
            Self::Stdout => "-".into(),
            Self::File(p) => p.display().to_string(),
        }
    }
}

pub fn emit(dest: &Destination, header: &Header, table: &Table, format: Format) -> CliResult<()> {
    match dest {
        Destination::Stdout => write_table(std::io::stdout().lock(), header, table, format),
        Destination::File(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            write_table(f, header, table, format).map_err(|e| match e {
                CliError::Io { source, .. } => CliError::io(p, source),
                other => other,
            })
        }
    }
}

pub const STATE_COLUMNS: [&str; 12] = [
    "xi_plus_re",
    "xi_plus_im",
    "xi_zero_re",
    "xi_zero_im",
    "xi_minus_re",
    "xi_minus_im",
    "eta_plus_re",
    "eta_plus_im",
    "eta_zero_re",
    "eta_zero_im",
    "eta_minus_re",
    "eta_minus_im",
];

pub const OBSERVABLE_COLUMNS: [&str; 13] = [
    "M_left", "M_right", "n0_left", "R_plus", "R_minus", "I_plus", "I_minus", "R0", "I0", "theta", "energy",
    "total_norm", "total_Fz",
];

pub fn trajectory_columns() -> Vec<&'static str> {
    let mut cols = vec!["t"];
    cols.extend(STATE_COLUMNS);
    cols.extend(OBSERVABLE_COLUMNS);
    cols
}

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(&trajectory_columns());
    for k in 0..traj.len() {
        let (l, r) = (&traj.observables_left[k], &traj.observables_right[k]);
        let mut row: Vec<Cell> = vec![traj.times[k].into()];
        row.extend(traj.states[k].to_reals().iter().map(|v| Cell::Num(*v)));
        row.extend(
            [
                l.m,
                r.m,
                l.n0,
                l.r_plus,
                l.r_minus,
                l.i_plus,
                l.i_minus,
                l.r0,
                l.i0,
                l.theta,
                traj.energy[k],
                traj.total_norm[k],
                traj.total_magnetization[k],
            ]
            .map(Cell::Num),
        );
        table.push(row);
    }
    table
}

pub fn reduced_table(traj: &ReducedTrajectory) -> Table {
    let mut table = Table::new(&["t", "M", "R0", "I0", "theta", "C"]);
    for (k, s) in traj.states.iter().enumerate() {
        let theta = if s.r0 == 0.0 && s.i0 == 0.0 { 0.0 } else { s.i0.atan2(s.r0) };
        table.push(vec![
            traj.times[k].into(),
            s.m.into(),
            s.r0.into(),
            s.i0.into(),
            theta.into(),
            traj.conserved[k].into(),
        ]);
    }
    table
}

/// `(t, θ unwrapped, M)` table.
pub fn portrait_table(times: &[f64], theta: &[f64], m: &[f64]) -> Table {
    let mut table = Table::new(&["t", "theta_unwrapped", "M_left"]);
    for ((t, th), m) in times.iter().zip(unwrap_angles(theta)).zip(m) {
        table.push(vec![(*t).into(), th.into(), (*m).into()]);
    }
    table
}

/// Reads a numeric CSV (comment lines start with `#`); the time column is `t`.
pub fn read_series(path: &Path) -> CliResult<SampledSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        for (k, field) in rec.iter().enumerate().take(names.len()) {
            let v = if field.is_empty() {
                f64::NAN
            } else {
                field.trim().parse::<f64>().map_err(|_| {
                    CliError::Data(format!("{}: row {}: column {} is not numeric: '{field}'", path.display(), i + 1, names[k]))
                })?
            };
            cols[k].push(v);
        }
    }
    let t_idx = names
        .iter()
        .position(|n| n == "t")
        .ok_or_else(|| CliError::Data(format!("{}: no 't' column", path.display())))?;
    let times = cols[t_idx].clone();
    let columns = names.into_iter().zip(cols).filter(|(n, _)| n != "t").collect();
    Ok(SampledSeries { times, columns })
}

/// Column lookup accepting either the CSV spelling or the observable name.
pub fn find_column<'a>(series: &'a SampledSeries, name: &str) -> CliResult<&'a [f64]> {
    if let Ok(c) = series.column(name) {
        return Ok(c);
    }
    let lower = name.to_ascii_lowercase();
    let alias = match lower.as_str() {
        "total_fz" => "total_Fz",
        "rho_pp_minus_rho_00" => "rho_pp_minus_rho_00",
        _ => "",
    };
    if let Ok(c) = series.column(alias) {
        return Ok(c);
    }
    series
        .columns
        .iter()
        .find(|(n, _)| n.to_ascii_lowercase() == lower)
        .map(|(_, v)| v.as_slice())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown column '{name}'; available: {}",
                series.columns.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
            ))
        })
}
