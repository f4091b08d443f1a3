//! Structural-break metrics from left/right parameter fits and the
//! tabular report rendering.
//!
//! A break is quantified per parameter as the right/left ratio and the
//! percentage change `(right/left - 1) * 100`. A zero left value leaves
//! both undefined; they render as `NA`.

use std::fmt;

use thiserror::Error;

use crate::gbm::GbmParams;
use crate::sde::{CevParams, JumpFactor};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("row {index} is a {found} row in a {expected} report")]
    MixedModels {
        index: usize,
        expected: BreakModel,
        found: BreakModel,
    },
}

/// Which fitted model a row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakModel {
    GbmMle,
    CevJump,
}

impl fmt::Display for BreakModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakModel::GbmMle => write!(f, "gbm"),
            BreakModel::CevJump => write!(f, "cev"),
        }
    }
}

/// Right-over-left ratio; undefined when the left value is zero.
pub fn ratio_rl(left: f64, right: f64) -> Option<f64> {
    if left == 0.0 {
        None
    } else {
        Some(right / left)
    }
}

/// Percentage change `(right/left - 1) * 100`; undefined when left is zero.
pub fn change_pct(left: f64, right: f64) -> Option<f64> {
    ratio_rl(left, right).map(|ratio| (ratio - 1.0) * 100.0)
}

/// Jump size as a percentage: `(y - 1) * 100`.
pub fn jump_pct(jump: JumpFactor) -> f64 {
    (jump.y() - 1.0) * 100.0
}

/// Left/right values of one parameter across the break.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamChange {
    pub left: f64,
    pub right: f64,
}

impl ParamChange {
    pub fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    pub fn ratio(&self) -> Option<f64> {
        ratio_rl(self.left, self.right)
    }

    pub fn change_pct(&self) -> Option<f64> {
        change_pct(self.left, self.right)
    }
}

/// One ticker's break metrics. Gamma and jump fields are present exactly
/// for CEV rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakRow {
    pub ticker: String,
    pub model: BreakModel,
    pub mu: ParamChange,
    pub sigma: ParamChange,
    pub gamma: Option<ParamChange>,
    pub jump: Option<JumpFactor>,
}

impl BreakRow {
    pub fn gbm(ticker: impl Into<String>, left: &GbmParams, right: &GbmParams) -> Self {
        Self {
            ticker: ticker.into(),
            model: BreakModel::GbmMle,
            mu: ParamChange::new(left.mu, right.mu),
            sigma: ParamChange::new(left.sigma, right.sigma),
            gamma: None,
            jump: None,
        }
    }

    pub fn cev_jump(
        ticker: impl Into<String>,
        left: &CevParams,
        right: &CevParams,
        jump: JumpFactor,
    ) -> Self {
        Self {
            ticker: ticker.into(),
            model: BreakModel::CevJump,
            mu: ParamChange::new(left.mu, right.mu),
            sigma: ParamChange::new(left.sigma, right.sigma),
            gamma: Some(ParamChange::new(left.gamma, right.gamma)),
            jump: Some(jump),
        }
    }

    pub fn jump_pct(&self) -> Option<f64> {
        self.jump.map(jump_pct)
    }
}

/// Output field separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Csv,
}

impl ReportFormat {
    fn separator(&self) -> char {
        match self {
            ReportFormat::Tsv => '\t',
            ReportFormat::Csv => ',',
        }
    }
}

const GBM_COLUMNS: [&str; 5] = [
    "ticker",
    "mu change %",
    "mu ratio r/l",
    "sigma change %",
    "sigma ratio r/l",
];

const CEV_COLUMNS: [&str; 8] = [
    "ticker",
    "mu change %",
    "mu ratio r/l",
    "sigma change %",
    "sigma ratio r/l",
    "jump %",
    "gamma change %",
    "gamma ratio r/l",
];

/// Fixed-point with two decimals and an explicit sign; `NA` when undefined.
fn fmt_metric(value: Option<f64>) -> String {
    match value {
        None => "NA".to_string(),
        Some(v) => format!("{v:+.2}"),
    }
}

/// Renders rows of one model kind as a TSV/CSV document: a header line in
/// the model's column set, then one line per row, two decimal places with
/// explicit signs, `NA` for undefined ratios. Column names are stable.
pub fn build_report(
    model: BreakModel,
    rows: &[BreakRow],
    format: ReportFormat,
) -> Result<String, ReportError> {
    for (index, row) in rows.iter().enumerate() {
        if row.model != model {
            return Err(ReportError::MixedModels {
                index,
                expected: model,
                found: row.model,
            });
        }
    }
    let sep = format.separator();
    let header: &[&str] = match model {
        BreakModel::GbmMle => &GBM_COLUMNS,
        BreakModel::CevJump => &CEV_COLUMNS,
    };
    let mut out = String::new();
    out.push_str(&header.join(&sep.to_string()));
    out.push('\n');
    for row in rows {
        let mut fields = vec![
            row.ticker.clone(),
            fmt_metric(row.mu.change_pct()),
            fmt_metric(row.mu.ratio()),
            fmt_metric(row.sigma.change_pct()),
            fmt_metric(row.sigma.ratio()),
        ];
        if model == BreakModel::CevJump {
            let gamma = row.gamma.expect("cev rows carry gamma");
            fields.push(fmt_metric(row.jump_pct()));
            fields.push(fmt_metric(gamma.change_pct()));
            fields.push(fmt_metric(gamma.ratio()));
        }
        out.push_str(&fields.join(&sep.to_string()));
        out.push('\n');
    }
    Ok(out)
}
