//! Global sensitivity analysis: Latin hypercube sampling over parameter
//! ranges, model evaluation per sample, and partial rank correlation.
//!
//! Sample evaluations run in parallel but are indexed, so reports are
//! identical to a serial run for the same seed.

mod lhs;
mod stats;

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::equilibrium::{self, EquilibriumError, EquilibriumReport};
use crate::model::{EcosystemConfig, Param, State};
use crate::policy::{self, PolicyError, PolicyProblem, ThresholdOptions};
use crate::presets;

pub use lhs::lhs_sample;
pub use stats::{correlation_p_value, prcc, rank, spearman, Correlation, Significance};

pub const DEFAULT_SAMPLES: usize = 100;

/// Largest excluded fraction a threshold analysis tolerates.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("invalid range for {param}: [{low}, {high}]")]
    InvalidRange { param: Param, low: f64, high: f64 },
    #[error("{0} listed twice")]
    DuplicateParam(Param),
    #[error("{0} has no sampling range")]
    NotSampled(Param),
    #[error("{samples} samples cannot support {params} parameters (need more than params + 2)")]
    TooFewSamples { samples: usize, params: usize },
    #[error("{excluded} of {samples} samples excluded; first: {first}")]
    TooManyExcluded {
        excluded: usize,
        samples: usize,
        first: String,
    },
    #[error("base configuration: {0}")]
    Policy(#[from] PolicyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub param: Param,
    pub low: f64,
    pub high: f64,
}

/// Parameters to vary with their ranges. Zero-width ranges are accepted
/// and yield constant columns, whose correlations are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRanges(Vec<ParamRange>);

impl ParameterRanges {
    pub fn new(ranges: Vec<ParamRange>) -> Result<Self, SensitivityError> {
        for (i, r) in ranges.iter().enumerate() {
            if !(r.low.is_finite() && r.high.is_finite() && r.low <= r.high) {
                return Err(SensitivityError::InvalidRange {
                    param: r.param,
                    low: r.low,
                    high: r.high,
                });
            }
            if ranges[..i].iter().any(|o| o.param == r.param) {
                return Err(SensitivityError::DuplicateParam(r.param));
            }
        }
        Ok(Self(ranges))
    }

    /// Table ranges for the listed parameters.
    pub fn from_table(params: &[Param]) -> Result<Self, SensitivityError> {
        let ranges = params
            .iter()
            .map(|&param| {
                let (low, high) = param
                    .table_range()
                    .ok_or(SensitivityError::NotSampled(param))?;
                Ok(ParamRange { param, low, high })
            })
            .collect::<Result<Vec<_>, SensitivityError>>()?;
        Self::new(ranges)
    }

    /// Shared menu price, both restaurants' tip rates and wages, and the
    /// three system ratios.
    pub fn equilibrium_default() -> Self {
        Self::from_table(&[
            Param::MenuPrice,
            Param::TipRate1,
            Param::TipRate2,
            Param::WaiterPay1,
            Param::WaiterPay2,
            Param::CookPay1,
            Param::CookPay2,
            Param::FoodToService,
            Param::DinersPerWaiter,
            Param::CooksPerWaiter,
        ])
        .expect("table ranges are valid")
    }

    pub fn threshold_default() -> Self {
        Self::from_table(&[
            Param::MenuPrice,
            Param::FoodToService,
            Param::DinersPerWaiter,
            Param::CooksPerWaiter,
        ])
        .expect("table ranges are valid")
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParamRange> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn params(&self) -> Vec<Param> {
        self.0.iter().map(|r| r.param).collect()
    }

    /// `base` with one sample row applied.
    pub fn apply(&self, base: &EcosystemConfig, row: &[f64]) -> EcosystemConfig {
        let mut cfg = *base;
        for (r, &v) in self.0.iter().zip(row) {
            cfg.set(r.param, v);
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub params: Vec<Param>,
    pub output_names: Vec<String>,
    pub seed: u64,
    /// Every drawn sample, `n` rows by parameter.
    pub samples: Vec<Vec<f64>>,
    /// Outputs per sample; `None` for excluded rows.
    pub outputs: Vec<Option<Vec<f64>>>,
    pub excluded: Vec<Exclusion>,
    /// Indexed `[output][param]`; `None` where undefined.
    pub prcc: Vec<Vec<Option<Correlation>>>,
    pub notes: Vec<String>,
}

impl SensitivityReport {
    fn build(
        params: Vec<Param>,
        output_names: &[&str],
        seed: u64,
        samples: Vec<Vec<f64>>,
        outputs: Vec<Result<Vec<f64>, String>>,
        notes: Vec<String>,
    ) -> Self {
        let mut excluded = Vec::new();
        let outputs: Vec<Option<Vec<f64>>> = outputs
            .into_iter()
            .enumerate()
            .map(|(index, r)| match r {
                Ok(v) => Some(v),
                Err(reason) => {
                    excluded.push(Exclusion { index, reason });
                    None
                }
            })
            .collect();
        let (rows, values): (Vec<Vec<f64>>, Vec<&Vec<f64>>) = samples
            .iter()
            .zip(&outputs)
            .filter_map(|(s, o)| o.as_ref().map(|o| (s.clone(), o)))
            .unzip();
        let k = params.len();
        let prcc = (0..output_names.len())
            .map(|out| {
                if rows.len() <= k + 2 {
                    return vec![None; k];
                }
                let y: Vec<f64> = values.iter().map(|v| v[out]).collect();
                stats::prcc(&rows, &y)
            })
            .collect();
        Self {
            params,
            output_names: output_names.iter().map(|s| s.to_string()).collect(),
            seed,
            samples,
            outputs,
            excluded,
            prcc,
            notes,
        }
    }

    pub fn included(&self) -> usize {
        self.outputs.iter().filter(|o| o.is_some()).count()
    }

    pub fn correlation(&self, output: &str, param: Param) -> Option<Correlation> {
        let o = self.output_names.iter().position(|n| n == output)?;
        let p = self.params.iter().position(|&q| q == param)?;
        self.prcc[o][p]
    }

    /// `parameter,output,prcc,p_value,stars`; undefined cells read
    /// `undefined`.
    pub fn write_prcc_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "parameter,output,prcc,p_value,stars")?;
        for (o, name) in self.output_names.iter().enumerate() {
            for (p, param) in self.params.iter().enumerate() {
                match self.prcc[o][p] {
                    Some(c) => writeln!(
                        out,
                        "{param},{name},{},{},{}",
                        c.coefficient,
                        c.p_value,
                        c.significance()
                    )?,
                    None => writeln!(out, "{param},{name},undefined,undefined,undefined")?,
                }
            }
        }
        Ok(())
    }

    /// One row per sample with its outputs, or the exclusion reason.
    pub fn write_samples_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["index".to_string()];
        header.extend(self.params.iter().map(|p| p.name().to_string()));
        header.extend(self.output_names.iter().cloned());
        header.push("excluded".into());
        writeln!(out, "{}", header.join(","))?;
        let mut reasons = self.excluded.iter().peekable();
        for (i, (row, output)) in self.samples.iter().zip(&self.outputs).enumerate() {
            let mut cells = vec![i.to_string()];
            cells.extend(row.iter().map(f64::to_string));
            match output {
                Some(v) => {
                    cells.extend(v.iter().map(f64::to_string));
                    cells.push(String::new());
                }
                None => {
                    cells.extend(self.output_names.iter().map(|_| String::new()));
                    let reason = reasons.next().map_or("", |e| e.reason.as_str());
                    cells.push(format!("\"{}\"", reason.replace('"', "'")));
                }
            }
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for SensitivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "seed {}: {} samples, {} excluded",
            self.seed,
            self.samples.len(),
            self.excluded.len()
        )?;
        for (o, name) in self.output_names.iter().enumerate() {
            for (p, param) in self.params.iter().enumerate() {
                match self.prcc[o][p] {
                    Some(c) => writeln!(
                        f,
                        "  {name} ~ {param}: {:+.3} (p = {:.2e}) {}",
                        c.coefficient,
                        c.p_value,
                        c.significance()
                    )?,
                    None => writeln!(f, "  {name} ~ {param}: undefined")?,
                }
            }
        }
        Ok(())
    }
}

fn check_size(ranges: &ParameterRanges, n: usize) -> Result<(), SensitivityError> {
    if n <= ranges.len() + 2 {
        return Err(SensitivityError::TooFewSamples {
            samples: n,
            params: ranges.len(),
        });
    }
    Ok(())
}

/// Equilibrium analysis of every sample, in sample order.
pub fn stability_survey(
    base: &EcosystemConfig,
    ranges: &ParameterRanges,
    n: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<Result<EquilibriumReport, EquilibriumError>>) {
    let samples = lhs_sample(ranges, n, seed);
    let reports = samples
        .par_iter()
        .map(|row| equilibrium::find_equilibrium(&ranges.apply(base, row), State::PARITY))
        .collect();
    (samples, reports)
}

/// PRCC of the equilibrium diner and waiter shares against each sampled
/// parameter, on top of the table baseline.
pub fn equilibrium_sensitivity(
    ranges: &ParameterRanges,
    n: usize,
    seed: u64,
) -> Result<SensitivityReport, SensitivityError> {
    check_size(ranges, n)?;
    let base = EcosystemConfig::baseline();
    let (samples, reports) = stability_survey(&base, ranges, n, seed);
    let outputs = reports
        .into_iter()
        .map(|r| {
            r.map(|r| vec![r.fixed_point.diners, r.fixed_point.waiters])
                .map_err(|e| e.to_string())
        })
        .collect();
    let notes = vec![format!(
        "varied: {}",
        ranges.params().iter().map(|p| p.name()).collect::<Vec<_>>().join(" ")
    )];
    Ok(SensitivityReport::build(
        ranges.params(),
        &["D*", "W*"],
        seed,
        samples,
        outputs,
        notes,
    ))
}

/// PRCC of the critical tip rate against each sampled parameter.
///
/// Every sample re-optimizes both policies' wages on top of the typical
/// restaurant ecosystem. Samples without a single crossing are excluded;
/// more than half excluded aborts the analysis.
pub fn threshold_sensitivity(
    ranges: &ParameterRanges,
    n: usize,
    seed: u64,
    opts: &ThresholdOptions,
) -> Result<SensitivityReport, SensitivityError> {
    threshold_sensitivity_with(&presets::typical_restaurant(), ranges, n, seed, opts)
}

pub fn threshold_sensitivity_with(
    base: &EcosystemConfig,
    ranges: &ParameterRanges,
    n: usize,
    seed: u64,
    opts: &ThresholdOptions,
) -> Result<SensitivityReport, SensitivityError> {
    check_size(ranges, n)?;
    PolicyProblem::new(*base)?;
    let samples = lhs_sample(ranges, n, seed);
    let outputs: Vec<Result<Vec<f64>, String>> = samples
        .par_iter()
        .map(|row| {
            let problem = PolicyProblem::new(ranges.apply(base, row)).map_err(|e| e.to_string())?;
            policy::critical_tip_rate(&problem, opts)
                .map(|tc| vec![tc])
                .map_err(|e| e.to_string())
        })
        .collect();
    let excluded = outputs.iter().filter(|o| o.is_err()).count();
    if excluded as f64 > MAX_EXCLUDED_FRACTION * n as f64 {
        let first = outputs
            .iter()
            .find_map(|o| o.as_ref().err().cloned())
            .unwrap_or_default();
        return Err(SensitivityError::TooManyExcluded {
            excluded,
            samples: n,
            first,
        });
    }
    let notes = vec![
        "wages re-optimized per sample under both policies".to_string(),
        format!(
            "tip bracket [{}, {}], tolerance {}",
            opts.bracket.0, opts.bracket.1, opts.tol
        ),
    ];
    Ok(SensitivityReport::build(
        ranges.params(),
        &["Tc"],
        seed,
        samples,
        outputs,
        notes,
    ))
}
