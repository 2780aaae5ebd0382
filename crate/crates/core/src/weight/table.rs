use std::path::Path;

use crate::error::{Error, Result};

/// Piecewise-linear weight given by knots `t_0 < ... < t_m` and positive values.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    knots: Vec<f64>,
    values: Vec<f64>,
    source: Option<String>,
}

impl Table {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let t = Table {
            knots,
            values,
            source: None,
        };
        t.validate()?;
        Ok(t)
    }

    /// Reads a two-column CSV with header `t,w`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::Table(e.to_string()))?
            .clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "w" {
            return Err(Error::Table(format!(
                "{}: expected header `t,w`, found `{}`",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Table(e.to_string()))?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Table(format!("row {}: unreadable column {i}", line + 2)))
            };
            knots.push(parse(0)?);
            values.push(parse(1)?);
        }
        let mut t = Table::new(knots, values)?;
        t.source = Some(path.display().to_string());
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.len() < 2 || self.knots.len() != self.values.len() {
            return Err(Error::Table(
                "need at least two knots and one value per knot".into(),
            ));
        }
        if !(self.knots[0] > 0.0) {
            return Err(Error::Table("knots must be positive".into()));
        }
        if self.knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Table("knots must be strictly increasing".into()));
        }
        if self.values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Table("values must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Index of the segment `[t_i, t_{i+1})` holding `t`; the last segment
    /// also owns the final knot.
    fn segment(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= t);
        i.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub(crate) fn interpolate(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let s = (t - a) / (b - a);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub(crate) fn slope(&self, t: f64) -> f64 {
        let i = self.segment(t);
        (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i])
    }
}
