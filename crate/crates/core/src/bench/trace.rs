use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::kernel_core::offline_penalized_optimum;
use crate::losses::LossFunction;
use crate::{Matrix, OcoError, Result, Vector};

pub const TRACE_HEADER: [&str; 4] = ["round", "learner_loss", "comparator_loss", "cum_regret"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: usize,
    pub learner_loss: f64,
    pub comparator_loss: f64,
    pub cum_regret: f64,
}

/// Covariate, label and prediction of one regression round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRecord {
    pub x: Vec<f64>,
    pub y: f64,
    pub prediction: f64,
}

/// Sidecar describing how a trace was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub algorithm: String,
    pub seed: u64,
    pub config_hash: String,
    pub horizon: usize,
    pub path_variation: Option<f64>,
    pub dynamic_regret: f64,
    /// Measured penalized regret, for regression runs against a fixed function.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalized_regret: Option<f64>,
    pub created_unix_secs: u64,
}

/// Per-round learner and comparator losses with running dynamic regret.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretTrace {
    rows: Vec<TraceRow>,
    regression: Vec<RegressionRecord>,
}

fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl RegretTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn regression(&self) -> &[RegressionRecord] {
        &self.regression
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, learner_loss: f64, comparator_loss: f64) {
        let previous = self.rows.last().map_or(0.0, |r| r.cum_regret);
        self.rows.push(TraceRow {
            round: self.rows.len() + 1,
            learner_loss,
            comparator_loss,
            cum_regret: previous + (learner_loss - comparator_loss),
        });
    }

    pub fn push_regression(&mut self, x: &Vector, y: f64, prediction: f64) {
        self.regression.push(RegressionRecord { x: x.iter().copied().collect(), y, prediction });
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| OcoError::Io(e.to_string());
        w.write_record(TRACE_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.round.to_string(),
                format_number(r.learner_loss),
                format_number(r.comparator_loss),
                format_number(r.cum_regret),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Parse a trace CSV, checking the header, round numbering and that the
    /// cumulative column equals the running sum of per-round regrets.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = reader.headers().map_err(|e| OcoError::Parse(e.to_string()))?;
        if headers.iter().ne(TRACE_HEADER.iter().copied()) {
            return Err(OcoError::Parse(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
        }
        let mut trace = RegretTrace::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| OcoError::Parse(format!("line {line}: {e}")))?;
            if record.len() != 4 {
                return Err(OcoError::Parse(format!("line {line}: expected 4 fields, got {}", record.len())));
            }
            let round: usize = record[0]
                .trim()
                .parse()
                .map_err(|_| OcoError::Parse(format!("line {line}: bad round {:?}", &record[0])))?;
            if round != i + 1 {
                return Err(OcoError::Parse(format!("line {line}: expected round {}, got {round}", i + 1)));
            }
            let number = |k: usize| -> Result<f64> {
                let v: f64 = record[k]
                    .trim()
                    .parse()
                    .map_err(|_| OcoError::Parse(format!("line {line}: bad number {:?}", &record[k])))?;
                if !v.is_finite() {
                    return Err(OcoError::Parse(format!("line {line}: non-finite value")));
                }
                Ok(v)
            };
            let (learner, comparator, cum) = (number(1)?, number(2)?, number(3)?);
            trace.push(learner, comparator);
            let expected = trace.rows.last().expect("just pushed").cum_regret;
            if (expected - cum).abs() > 1e-9 * expected.abs().max(1.0) {
                return Err(OcoError::Parse(format!(
                    "line {line}: cumulative regret {cum} disagrees with running sum {expected}"
                )));
            }
            trace.rows.last_mut().expect("just pushed").cum_regret = cum;
        }
        Ok(trace)
    }
}

/// `sum_t f_t(x_t) - sum_t f_t(z_t)`.
pub fn dynamic_regret(trace: &RegretTrace) -> f64 {
    trace.rows.iter().map(|r| r.learner_loss).sum::<f64>() - trace.rows.iter().map(|r| r.comparator_loss).sum::<f64>()
}

/// Static regret on rounds `start..=end` against a fixed point.
pub fn interval_regret(
    trace: &RegretTrace,
    losses: &[LossFunction],
    start: usize,
    end: usize,
    comparator: &Vector,
) -> Result<f64> {
    let horizon = trace.len();
    if start == 0 || start > end || end > horizon || losses.len() < end {
        return Err(OcoError::Interval { start, end, horizon });
    }
    let mut total = 0.0;
    for t in start..=end {
        total += trace.rows[t - 1].learner_loss - losses[t - 1].eval(comparator)?;
    }
    Ok(total)
}

/// `sum_t (yhat_t - y_t)^2 - inf_f [ sum_t (f(x_t) - y_t)^2 + a |f|^2 ]`.
pub fn penalized_regret(trace: &RegretTrace, kernel: &Matrix, a: f64) -> Result<f64> {
    let records = trace.regression();
    if records.len() != kernel.nrows() {
        return Err(OcoError::Dimension { expected: kernel.nrows(), got: records.len() });
    }
    let learner: f64 = records.iter().map(|r| (r.prediction - r.y).powi(2)).sum();
    let labels = Vector::from_iterator(records.len(), records.iter().map(|r| r.y));
    Ok(learner - offline_penalized_optimum(kernel, &labels, a)?)
}
