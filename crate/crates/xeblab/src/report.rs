//! Reports as `key=value` blocks and single-row CSV, plus the per-trial
//! benchmark CSV.
//!
//! Reals are written in shortest round-trip exponent form, so every report
//! parses back to the exact values that produced it.

use std::fmt::Write as _;
use std::str::FromStr;

use xeblab_core::analysis::{DistinguishabilityReport, DivergenceReport, FitReport, MomentReport};
use xeblab_core::estimators::{EstimatorTrial, MseBenchmark};
use xeblab_core::XebReport;

use crate::error::ParseError;

/// Text or CSV rendering of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

pub fn real(x: f64) -> String {
    format!("{x:e}")
}

/// An ordered list of named fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fields(pub Vec<(String, String)>);

impl Fields {
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, real(value))
    }

    pub fn to_key_values(&self) -> String {
        self.0.iter().fold(String::new(), |mut out, (k, v)| {
            let _ = writeln!(out, "{k}={v}");
            out
        })
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = self.0.iter().map(|(k, _)| k.as_str()).collect();
        let row: Vec<&str> = self.0.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_key_values(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn parse_key_values(text: &str) -> Result<Self, ParseError> {
        let mut fields = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ParseError::at(i + 1, "expected key=value"))?;
            fields.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self(fields))
    }

    pub fn parse_csv(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ParseError::at(1, "missing CSV header"))?;
        let row = lines.next().ok_or_else(|| ParseError::at(2, "missing CSV row"))?;
        let keys: Vec<&str> = header.split(',').collect();
        let values: Vec<&str> = row.split(',').collect();
        if keys.len() != values.len() {
            return Err(ParseError::at(2, format!("{} columns in header but {} in row", keys.len(), values.len())));
        }
        Ok(Self(keys.into_iter().zip(values).map(|(k, v)| (k.to_string(), v.to_string())).collect()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, ParseError> {
        let (line, value) = self
            .0
            .iter()
            .enumerate()
            .find(|(_, (k, _))| k == key)
            .map(|(i, (_, v))| (i + 1, v))
            .ok_or_else(|| ParseError::at(0, format!("missing field `{key}`")))?;
        value.parse().map_err(|_| ParseError::at(line, format!("invalid value {value:?} for `{key}`")))
    }
}

pub fn xeb_fields(r: &XebReport) -> Fields {
    let mut f = Fields::default();
    f.push("n", r.n)
        .push("k", r.k)
        .real("score", r.score)
        .real("b_implied", r.b_implied)
        .real("threshold_b", r.threshold_b)
        .push("xhog_pass", r.xhog_pass)
        .real("fidelity_estimate", r.fidelity_estimate)
        .push("seed", r.seed);
    f
}

/// Inverse of [`xeb_fields`], from either rendering.
pub fn parse_xeb_report(f: &Fields) -> Result<XebReport, ParseError> {
    Ok(XebReport {
        n: f.get("n")?,
        k: f.get("k")?,
        score: f.get("score")?,
        b_implied: f.get("b_implied")?,
        threshold_b: f.get("threshold_b")?,
        xhog_pass: f.get("xhog_pass")?,
        fidelity_estimate: f.get("fidelity_estimate")?,
        seed: f.get("seed")?,
    })
}

pub fn fit_fields(r: &FitReport) -> Fields {
    let mut f = Fields::default();
    f.real("ks_statistic", r.statistic)
        .push("sample_count", r.sample_count)
        .real("threshold", r.threshold)
        .push("pass", r.pass);
    f
}

pub fn moment_fields(r: &MomentReport) -> Fields {
    let mut f = Fields::default();
    f.real("fidelity", r.fidelity)
        .push("circuits", r.circuits)
        .push("samples_per_circuit", r.samples_per_circuit)
        .real("mean_scaled", r.mean)
        .real("mean_se", r.mean_se)
        .real("expected_mean", r.expected_mean)
        .real("mean_z", r.mean_z())
        .real("variance_scaled", r.variance)
        .real("variance_se", r.variance_se)
        .real("expected_variance", r.expected_variance)
        .real("variance_z", r.variance_z());
    f
}

pub fn divergence_fields(r: &DivergenceReport) -> Fields {
    let mut f = Fields::default();
    f.real("b", r.b)
        .real("kl", r.kl)
        .real("quadrature_error", r.quadrature_error)
        .real("taylor_approx", r.taylor_approx)
        .push("k", r.k)
        .real("tv_bound", r.tv_bound);
    f
}

pub fn distinguishability_fields(r: &DistinguishabilityReport) -> Fields {
    let mut f = Fields::default();
    f.real("b", r.b)
        .push("k", r.k)
        .push("trials", r.trials)
        .real("advantage", r.advantage)
        .real("standard_error", r.standard_error)
        .real("tv_bound", r.tv_bound);
    f
}

/// Summary block of a benchmark run; the rates are `none` when undefined.
pub fn benchmark_fields(estimator: &str, r: &MseBenchmark) -> Fields {
    let optional = |x: Option<f64>| x.map_or_else(|| "none".to_string(), real);
    let mut f = Fields::default();
    f.push("estimator", estimator)
        .push("n", r.n)
        .push("trials", r.trials.len())
        .real("mean_gain", r.mean_gain)
        .real("standard_error", r.standard_error)
        .real("scaled_gain", r.scaled_gain)
        .real("scaled_standard_error", r.scaled_standard_error)
        .real("mse_estimator", r.mse_estimator())
        .real("mse_trivial", r.mse_trivial())
        .push("hit_rate", optional(r.hit_rate()))
        .push("success_rate", optional(r.success_rate()));
    f
}

pub const TRIAL_HEADER: &str = "seed,p0,p,X";

/// One row of the per-trial benchmark CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRow {
    pub seed: u64,
    pub p0: f64,
    pub p: f64,
    pub gain: f64,
}

impl From<&EstimatorTrial> for TrialRow {
    fn from(t: &EstimatorTrial) -> Self {
        Self { seed: t.seed, p0: t.p0, p: t.p, gain: t.gain }
    }
}

pub fn trials_csv(rows: impl IntoIterator<Item = TrialRow>) -> String {
    let mut out = format!("{TRIAL_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.seed, real(r.p0), real(r.p), real(r.gain));
    }
    out
}

pub fn parse_trials_csv(text: &str) -> Result<Vec<TrialRow>, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == TRIAL_HEADER => {}
        _ => return Err(ParseError::at(1, format!("expected header `{TRIAL_HEADER}`"))),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            let cols: Vec<&str> = l.trim().split(',').collect();
            let [seed, p0, p, gain] = cols[..] else {
                return Err(ParseError::at(line, format!("expected 4 columns, got {}", cols.len())));
            };
            let parse = |s: &str| s.parse::<f64>().map_err(|_| ParseError::at(line, format!("invalid number {s:?}")));
            Ok(TrialRow {
                seed: seed.parse().map_err(|_| ParseError::at(line, format!("invalid seed {seed:?}")))?,
                p0: parse(p0)?,
                p: parse(p)?,
                gain: parse(gain)?,
            })
        })
        .collect()
}
