//! Result tables: one row per metric, one column per threshold (plus
//! optional per-sample columns), rendered as CSV, TSV, or markdown.

use std::fmt::Write as _;

use crate::metrics::Metric;

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Tsv,
    Markdown,
}

impl TableFormat {
    pub fn name(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
            TableFormat::Markdown => "markdown",
        }
    }
}

/// Error for table format names that do not parse.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown table format {0:?} (expected csv, tsv, or markdown)")]
pub struct UnknownFormat(pub String);

impl std::str::FromStr for TableFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "tsv" => Ok(TableFormat::Tsv),
            "markdown" => Ok(TableFormat::Markdown),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub metric: Metric,
    pub values: Vec<f64>,
    /// Index of the best value, set by [`MetricTable::mark_best`]. Only
    /// markdown renders the marker; CSV and TSV stay plain so they reparse
    /// cleanly.
    pub best: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    /// Column headers following the leading `metric` column.
    pub columns: Vec<String>,
    pub rows: Vec<MetricRow>,
}

impl MetricTable {
    /// Marks each row's best value among the first `lead_columns` columns
    /// (the aggregate columns; per-sample columns never carry the marker):
    /// maximum for quality metrics, minimum for separation metrics, earliest
    /// column on ties.
    pub fn mark_best(&mut self, lead_columns: usize) {
        for row in &mut self.rows {
            let slice = &row.values[..lead_columns.min(row.values.len())];
            row.best = if slice.is_empty() {
                None
            } else {
                let mut best = 0;
                for (i, &v) in slice.iter().enumerate().skip(1) {
                    let better = if row.metric.lower_is_better() {
                        v < slice[best]
                    } else {
                        v > slice[best]
                    };
                    if better {
                        best = i;
                    }
                }
                Some(best)
            };
        }
    }

    pub fn render(&self, format: TableFormat, precision: usize) -> String {
        match format {
            TableFormat::Csv => self.delimited(',', precision),
            TableFormat::Tsv => self.delimited('\t', precision),
            TableFormat::Markdown => self.markdown(precision),
        }
    }

    fn delimited(&self, sep: char, precision: usize) -> String {
        let mut out = String::from("metric");
        for c in &self.columns {
            out.push(sep);
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(row.metric.name());
            for &v in &row.values {
                out.push(sep);
                let _ = write!(out, "{v:.precision$}");
            }
            out.push('\n');
        }
        out
    }

    fn markdown(&self, precision: usize) -> String {
        let mut out = String::from("| metric |");
        for c in &self.columns {
            let _ = write!(out, " {c} |");
        }
        out.push_str("\n| --- |");
        for _ in &self.columns {
            out.push_str(" ---: |");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "| {} |", row.metric.name());
            for (i, &v) in row.values.iter().enumerate() {
                if row.best == Some(i) {
                    let _ = write!(out, " **{v:.precision$}** |");
                } else {
                    let _ = write!(out, " {v:.precision$} |");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a table rendered as CSV back into rows (best markers are not part
/// of the CSV encoding, so `best` comes back unset).
pub fn parse_table_csv(text: &str) -> Result<MetricTable, ExperimentError> {
    let bad = |message: String| ExperimentError::BadTable(message);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("no header line".into()))?;
    let mut fields = header.split(',');
    if fields.next() != Some("metric") {
        return Err(bad(format!("header must start with \"metric\": {header:?}")));
    }
    let columns: Vec<String> = fields.map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        let mut fields = line.split(',');
        let name = fields.next().expect("split yields at least one field");
        let metric: Metric = name
            .parse()
            .map_err(|e: crate::metrics::UnknownMetric| bad(e.to_string()))?;
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(format!("bad number {f:?} in row {name}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if values.len() != columns.len() {
            return Err(bad(format!(
                "row {name} has {} values for {} columns",
                values.len(),
                columns.len()
            )));
        }
        rows.push(MetricRow {
            metric,
            values,
            best: None,
        });
    }
    if rows.is_empty() {
        return Err(ExperimentError::EmptyTable);
    }
    Ok(MetricTable { columns, rows })
}
