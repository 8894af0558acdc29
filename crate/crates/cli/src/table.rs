//! Result tables and their CSV form.
//!
//! A file starts with a header block of `# key: value` lines describing the
//! experiment, the plot layout and every column, followed by RFC-4180 records
//! (CRLF line ends). Floats carry 17 significant digits; infinities are
//! written as `inf` and values that were not evaluated as empty fields.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{invalid, CliError, CliResult};

pub const FORMAT_TAG: &str = "krylov-sqrt-csv 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnType {
    Integer,
    Float,
    Text,
}

impl ColumnType {
    fn name(self) -> &'static str {
        match self {
            ColumnType::Integer => "integer",
            ColumnType::Float => "float",
            ColumnType::Text => "text",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
    pub description: String,
}

impl Column {
    pub fn new(name: &str, ty: ColumnType, description: &str) -> Self {
        Self {
            name: name.into(),
            ty,
            description: description.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    /// Not evaluated; written as an empty field.
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(v) => Some(*v),
            Cell::Text(_) | Cell::Empty => None,
        }
    }
}

pub fn format_float(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

/// Axis scaling of a plot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotScale {
    Linear,
    SemilogY,
    LogLog,
}

impl PlotScale {
    pub fn name(self) -> &'static str {
        match self {
            PlotScale::Linear => "linear",
            PlotScale::SemilogY => "semilogy",
            PlotScale::LogLog => "loglog",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(PlotScale::Linear),
            "semilogy" => Some(PlotScale::SemilogY),
            "loglog" => Some(PlotScale::LogLog),
            _ => None,
        }
    }
}

/// How a table is drawn by `plot`.
#[derive(Clone, Debug)]
pub struct PlotLayout {
    pub x: String,
    pub y: Vec<String>,
    /// Column splitting the rows into separate series.
    pub group: Option<String>,
    pub scale: PlotScale,
    /// Unconnected markers instead of polylines.
    pub markers: bool,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub experiment: String,
    /// Free-form `key: value` metadata (seed, status, parameters).
    pub meta: Vec<(String, String)>,
    pub plot: Option<PlotLayout>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Derived quantities such as fitted slopes.
    pub summary: Vec<(String, f64)>,
}

impl Table {
    pub fn new(experiment: &str, columns: Vec<Column>) -> Self {
        Self {
            experiment: experiment.into(),
            meta: Vec::new(),
            plot: None,
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn header_lines(&self) -> Vec<String> {
        let mut h = vec![
            format!("format: {FORMAT_TAG}"),
            format!("experiment: {}", self.experiment),
        ];
        h.extend(self.meta.iter().map(|(k, v)| format!("meta.{k}: {v}")));
        if let Some(p) = &self.plot {
            h.push(format!("plot.x: {}", p.x));
            h.push(format!("plot.y: {}", p.y.join(",")));
            if let Some(g) = &p.group {
                h.push(format!("plot.group: {g}"));
            }
            h.push(format!("plot.scale: {}", p.scale.name()));
            if p.markers {
                h.push("plot.style: markers".into());
            }
        }
        for c in &self.columns {
            h.push(format!("column.{}: {}; {}", c.name, c.ty.name(), c.description));
        }
        for (k, v) in &self.summary {
            h.push(format!("summary.{k}: {}", format_float(*v)));
        }
        h
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> CliResult<()> {
        let io = |e: std::io::Error| CliError::Io {
            context: "writing csv".into(),
            source: e,
        };
        for line in self.header_lines() {
            write!(w, "# {line}\r\n").map_err(io)?;
        }
        let mut cw = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(&mut w);
        let csv_err = |e: csv::Error| invalid(format!("csv: {e}"));
        cw.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in &self.rows {
            let rec: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(v) if v.is_nan() => String::new(),
                    Cell::Float(v) => format_float(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            cw.write_record(&rec).map_err(csv_err)?;
        }
        cw.flush().map_err(io)?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> CliResult<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf).map_err(CliError::io(path.display().to_string()))
    }

    /// Reads a file written by [`Table::write_csv`].
    pub fn read_file(path: &Path) -> CliResult<Table> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path.display().to_string()))?;
        Self::parse(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> CliResult<Table> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut ordered: Vec<(String, String)> = Vec::new();
        let mut body_start = text.len();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let t = line.trim_end_matches(['\r', '\n']);
            let Some(rest) = t.strip_prefix("# ") else {
                body_start = offset;
                break;
            };
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| invalid(format!("malformed header line '{t}'")))?;
            header.insert(k.to_string(), v.to_string());
            ordered.push((k.to_string(), v.to_string()));
            offset += line.len();
        }
        if header.get("format").map(String::as_str) != Some(FORMAT_TAG) {
            return Err(invalid(format!("missing '# format: {FORMAT_TAG}' header")));
        }
        let experiment = header
            .get("experiment")
            .cloned()
            .ok_or_else(|| invalid("missing experiment header"))?;
        let mut rdr = csv::ReaderBuilder::new().from_reader(&text.as_bytes()[body_start..]);
        let names: Vec<String> = rdr
            .headers()
            .map_err(|e| invalid(format!("csv: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut columns = Vec::new();
        for name in &names {
            let spec = header
                .get(&format!("column.{name}"))
                .ok_or_else(|| invalid(format!("column '{name}' is not described in the header")))?;
            let (ty, desc) = spec.split_once("; ").unwrap_or((spec.as_str(), ""));
            let ty = match ty {
                "integer" => ColumnType::Integer,
                "float" => ColumnType::Float,
                "text" => ColumnType::Text,
                other => return Err(invalid(format!("unknown column type '{other}'"))),
            };
            columns.push(Column::new(name, ty, desc));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| invalid(format!("csv: {e}")))?;
            if rec.len() != columns.len() {
                return Err(invalid(format!(
                    "record {} has {} fields, expected {}",
                    i + 1,
                    rec.len(),
                    columns.len()
                )));
            }
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(s, c)| match c.ty {
                    ColumnType::Integer | ColumnType::Float if s.is_empty() => Ok(Cell::Empty),
                    ColumnType::Integer => s
                        .parse()
                        .map(Cell::Int)
                        .map_err(|_| invalid(format!("record {}: '{s}' is not an integer", i + 1))),
                    ColumnType::Float => parse_float(s)
                        .map(Cell::Float)
                        .ok_or_else(|| invalid(format!("record {}: '{s}' is not a number", i + 1))),
                    ColumnType::Text => Ok(Cell::Text(s.to_string())),
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.push(row);
        }
        let plot = match (header.get("plot.x"), header.get("plot.y"), header.get("plot.scale")) {
            (Some(x), Some(y), Some(scale)) => Some(PlotLayout {
                x: x.clone(),
                y: y.split(',').map(str::to_string).collect(),
                group: header.get("plot.group").cloned(),
                scale: PlotScale::from_name(scale).ok_or_else(|| invalid(format!("unknown plot scale '{scale}'")))?,
                markers: header.get("plot.style").map(String::as_str) == Some("markers"),
            }),
            _ => None,
        };
        let meta = ordered
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("meta.").map(|k| (k.to_string(), v.clone())))
            .collect();
        let summary = ordered
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("summary.").map(|k| (k.to_string(), v)))
            .map(|(k, v)| {
                parse_float(v)
                    .map(|x| (k.clone(), x))
                    .ok_or_else(|| invalid(format!("summary '{k}' is not a number")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Table {
            experiment,
            meta,
            plot,
            columns,
            rows,
            summary,
        })
    }
}
